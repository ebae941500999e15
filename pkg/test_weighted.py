#!/usr/bin/env python3
"""Tests for radial weights, weighted projections and the Kohn-Morrey report"""

import math

import numpy as np
import pytest

from fockcomplex.errors import DegreeError, WeightSpecError
from fockcomplex.forms import PForm
from fockcomplex.polynomials import HoloPoly, MixedPoly, enumerate_up_to
from fockcomplex.scalars import qqi
from fockcomplex.verify import random_form
from fockcomplex.weighted import (
    MomentTable, RadialPolyWeight, closed_moment, form_norm_sq_weighted, formnorm_check, inner_weighted,
    kohn_morrey_report, moment_rows, parse_weight, partial_star_weighted, project_weighted,
    quadrature_moment, weighted_adjoint_defect,
)

QUARTIC = RadialPolyWeight.uniform(1, 1.0, 2)


class TestWeightSpec:
    def test_plain(self):
        assert parse_weight("1|z|^4") == QUARTIC
        assert parse_weight("|z|^2", 3) == RadialPolyWeight.gaussian(3)

    def test_indexed(self):
        weight = parse_weight("2|z1|^2 + 0.5*|z2|^6")
        assert weight.params == ((2.0, 1), (0.5, 3))

    def test_json(self):
        weight = parse_weight('{"weights": [{"c": 1, "s": 2}, {"c": 3, "s": 1}]}')
        assert weight.params == ((1.0, 2), (3.0, 1))

    @pytest.mark.parametrize("text", [
        "1|z|^3",
        "-1|z|^2",
        "1|z1|^2 + 1|z1|^4",
        "1|z2|^2",
        "1|z|^2 + 1|z1|^2",
        "abc",
        '{"weights": [{"c": 1}]}',
    ])
    def test_rejected(self, text):
        with pytest.raises(WeightSpecError):
            parse_weight(text)

    def test_non_separable_plain_power(self):
        with pytest.raises(WeightSpecError):
            parse_weight("1|z|^4", 2)

    def test_dimension_mismatch(self):
        with pytest.raises(WeightSpecError):
            parse_weight("1|z1|^2 + 1|z2|^2", 3)

    def test_describe(self):
        assert QUARTIC.describe() == "1|z1|^4"
        assert RadialPolyWeight.gaussian(2).is_gaussian


class TestMoments:
    def test_gaussian_moments_are_factorials(self):
        for k in range(12):
            assert closed_moment(1.0, 1, k) == pytest.approx(math.factorial(k) / 2, rel=1e-12)

    @pytest.mark.parametrize("c,s", [(1.0, 1), (1.0, 2), (2.0, 2), (1.0, 3), (0.5, 4)])
    def test_quadrature_agrees(self, c, s):
        for k in range(8):
            assert quadrature_moment(c, s, k) == pytest.approx(closed_moment(c, s, k), rel=1e-9)

    def test_table_caches(self):
        table = MomentTable(QUARTIC, "quadrature")
        first = table.moment(0, 3)
        assert table.moment(0, 3) is first

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            MomentTable(QUARTIC, "monte-carlo")

    def test_rows(self):
        rows = moment_rows(parse_weight("1|z1|^4 + 2|z2|^2"), 3)
        assert len(rows) == 8
        assert all(row["relative_error"] < 1e-9 for row in rows)


class TestInnerProducts:
    def test_gaussian_constant(self):
        one = HoloPoly(2, {(0, 0): 1})
        assert inner_weighted(one, one, RadialPolyWeight.gaussian(2)) == pytest.approx(math.pi ** 2)

    def test_quartic(self):
        z = HoloPoly(1, {(1,): 1})
        assert inner_weighted(z, z, QUARTIC) == pytest.approx(math.pi / 2)
        mixed = MixedPoly.monomial(1, (2,), (1,))
        assert inner_weighted(z, mixed, QUARTIC) == pytest.approx(math.pi * math.gamma(1.5) / 2)

    def test_selection_rule(self):
        f = MixedPoly.monomial(2, (1, 0), (0, 0))
        g = MixedPoly.monomial(2, (0, 1), (0, 0))
        assert inner_weighted(f, g, parse_weight("1|z1|^4 + 1|z2|^2")) == 0


class TestProjection:
    def test_holomorphic_is_fixed(self):
        z = HoloPoly(1, {(1,): 1})
        assert project_weighted(z, QUARTIC).coefficient((1,)) == pytest.approx(1)

    def test_quartic_projection(self):
        projected = project_weighted(MixedPoly.monomial(1, (2,), (1,), 2), QUARTIC)
        assert projected.coefficient((1,)) == pytest.approx(math.sqrt(math.pi))

    def test_antiholomorphic_vanishes(self):
        assert project_weighted(MixedPoly.monomial(1, (0,), (1,)), RadialPolyWeight.gaussian(1)).is_zero()

    def test_orthogonality(self):
        weight = parse_weight("1|z1|^4 + 2|z2|^6")
        m = MixedPoly(2, {((3, 2), (1, 1)): qqi(1, 2), ((1, 0), (0, 1)): 1, ((2, 4), (2, 0)): qqi(0, -3)})
        remainder = m - MixedPoly.from_holo(project_weighted(m, weight))
        scale = 1 + abs(inner_weighted(m, m, weight))
        for alpha in enumerate_up_to(2, 6):
            h = HoloPoly(2, {alpha: 1})
            assert abs(inner_weighted(remainder, h, weight)) <= 1e-9 * scale


class TestWeightedAdjoint:
    def test_gaussian_reduces_to_multiplication(self):
        u = PForm.basis(2, (0,), (0, 0))
        result = partial_star_weighted(u, RadialPolyWeight.gaussian(2))
        assert result.component(()).coefficient((1, 0)) == pytest.approx(1)

    def test_quartic(self):
        result = partial_star_weighted(PForm.basis(1, (0,), (0,)), QUARTIC)
        assert result.component(()).coefficient((1,)) == pytest.approx(math.sqrt(math.pi))

    def test_zero(self):
        assert partial_star_weighted(PForm.zero(1, 1), QUARTIC).is_zero()

    def test_functions_rejected(self):
        with pytest.raises(DegreeError):
            partial_star_weighted(PForm.function(HoloPoly(1, {(0,): 1})), QUARTIC)

    @pytest.mark.parametrize("text,p", [("1|z1|^4 + 1|z2|^2", 1), ("2|z1|^4 + 1|z2|^6", 2)])
    def test_adjointness(self, text, p):
        weight = parse_weight(text)
        rng = np.random.default_rng(3)
        for _ in range(5):
            f = random_form(rng, 2, p - 1, 3)
            u = random_form(rng, 2, p, 3)
            scale = 1 + form_norm_sq_weighted(u, weight) + form_norm_sq_weighted(f, weight)
            assert weighted_adjoint_defect(f, u, weight) <= 1e-8 * scale


class TestKohnMorrey:
    def test_quartic_constant_form(self):
        report = kohn_morrey_report(PForm.basis(1, (0,), (0,)), QUARTIC)
        assert report.lhs == pytest.approx(math.pi ** 2 / 2, rel=1e-8)
        assert report.derivative_term == 0
        assert report.levi_term == pytest.approx(2 * math.pi, rel=1e-8)
        assert report.torsion == pytest.approx(2 * math.pi - math.pi ** 2 / 2, rel=1e-8)
        assert report.torsion_alt1 == pytest.approx(report.torsion, rel=1e-9)
        assert report.torsion_alt2 == pytest.approx(report.torsion, rel=1e-8)
        assert abs(report.residual) < 1e-8 * report.scale
        assert report.check() == []

    def test_quadrature_oracle(self):
        closed = kohn_morrey_report(PForm.basis(1, (0,), (0,)), QUARTIC, "closed")
        oracle = kohn_morrey_report(PForm.basis(1, (0,), (0,)), QUARTIC, "quadrature")
        assert oracle.torsion == pytest.approx(closed.torsion, rel=1e-9)
        assert oracle.lhs == pytest.approx(closed.lhs, rel=1e-9)

    def test_gaussian_has_no_torsion(self):
        report = kohn_morrey_report(PForm.basis(2, (0,), (0, 0)), RadialPolyWeight.gaussian(2))
        assert report.torsion == pytest.approx(0, abs=1e-10)
        assert report.lhs == pytest.approx(math.pi ** 2)
        assert report.levi_term == pytest.approx(math.pi ** 2)

    def test_zero_form(self):
        report = kohn_morrey_report(PForm.zero(1, 1), QUARTIC)
        assert (report.lhs, report.levi_term, report.torsion, report.residual) == (0, 0, 0, 0)

    @pytest.mark.parametrize("c,s", [(1.0, 1), (1.0, 2), (2.0, 2), (1.0, 3)])
    def test_random_forms(self, c, s):
        weight = RadialPolyWeight.uniform(2, c, s)
        rng = np.random.default_rng(11)
        for p in (1, 2):
            for _ in range(3):
                report = kohn_morrey_report(random_form(rng, 2, p, 2), weight)
                assert report.check(1e-8, 1e-8) == []
                assert report.torsion >= -1e-9 * report.scale

    def test_functions_rejected(self):
        with pytest.raises(DegreeError):
            kohn_morrey_report(PForm.function(HoloPoly(1, {(0,): 1})), QUARTIC)


class TestFormNorm:
    @pytest.mark.parametrize("weight,u", [
        (QUARTIC, HoloPoly(1, {(0,): 1})),
        (RadialPolyWeight.gaussian(1), HoloPoly(1, {(0,): 1})),
        (RadialPolyWeight.gaussian(1), HoloPoly(1, {(1,): 1})),
        (parse_weight("1|z1|^4 + 3|z2|^2"), HoloPoly(2, {(2, 1): qqi(1, 1), (0, 3): 2})),
    ])
    def test_identity(self, weight, u):
        lhs, rhs, difference = formnorm_check(u, 0, weight)
        assert abs(difference) <= 1e-8 * (1 + abs(lhs))

    def test_gaussian_linear(self):
        lhs, rhs, _ = formnorm_check(HoloPoly(1, {(1,): 1}), 0, RadialPolyWeight.gaussian(1))
        assert lhs == pytest.approx(math.pi)
        assert rhs == pytest.approx(math.pi)
