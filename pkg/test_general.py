#!/usr/bin/env python3
"""Tests for complexes built from constant-coefficient differential operators"""

import math

import numpy as np
import pytest

from fockcomplex.dbar import partial, partial_star, solve_partial
from fockcomplex.errors import (
    DegreeError, NonConstantCoefficientError, NonPositiveCertificateError, NotClosedError,
)
from fockcomplex.fock import norm_sq
from fockcomplex.forms import PForm, inner_forms
from fockcomplex.general import (
    DOperator, apply_D, apply_Dstar, commutator_form, converge_canonical, energy_identity,
    estimate_constant, kernel_basis, neumann_D, solve_canonical_D, solve_canonical_Dstar,
)
from fockcomplex.polynomials import HoloPoly
from fockcomplex.scalars import ExactScalar, qqi
from fockcomplex.verify import random_form

SECOND = DOperator.second_derivatives(1)
MIXED = DOperator.mixed_pair()


def mono(n, alpha, c=1):
    return HoloPoly.monomial(n, alpha, c)


class TestOperator:
    def test_from_specs(self):
        D = DOperator.from_specs(["d1*d2", "d1^2 + d2^2"])
        assert D.dim == 2
        assert D.to_json() == MIXED.to_json()
        assert D.homogeneous_degree == 2

    def test_mixed_orders_are_not_homogeneous(self):
        assert DOperator.from_specs(["d1", "d2^2"]).homogeneous_degree is None

    def test_rejects_multiplication_part(self):
        with pytest.raises(NonConstantCoefficientError):
            DOperator.from_specs(["z1*d1"], 1)

    def test_json(self):
        assert DOperator.from_json({"n": 2, "p": ["d1^2", "d2^2"]}).to_json() == \
            DOperator.second_derivatives(2).to_json()


class TestApply:
    def test_dbar_special_case(self):
        D = DOperator.dbar(3)
        u = PForm(3, 1, {(0,): HoloPoly(3, {(1, 2, 0): qqi(1, 1)}), (2,): HoloPoly(3, {(0, 1, 3): 2})})
        assert apply_D(D, u) == partial(u)
        v = PForm(3, 2, {(0, 1): HoloPoly(3, {(1, 0, 1): 3})})
        assert apply_Dstar(D, v) == partial_star(v)

    def test_second_derivative(self):
        u = PForm.function(mono(1, (4,)))
        assert apply_D(SECOND, u) == PForm.basis(1, (0,), (2,), 12)

    def test_mixed_pair_on_product(self):
        u = PForm.function(mono(2, (1, 1)))
        assert apply_D(MIXED, u) == PForm.basis(2, (0,), (0, 0))

    def test_adjoint_is_multiplication(self):
        assert apply_Dstar(SECOND, PForm.basis(1, (0,), (0,))) == PForm.function(mono(1, (2,)))
        assert apply_Dstar(MIXED, PForm.basis(2, (0,), (0, 0))) == PForm.function(mono(2, (1, 1)))
        assert apply_Dstar(MIXED, PForm.zero(2, 1)).is_zero()

    def test_top_form_adjoint(self):
        g = HoloPoly(2, {(1, 0): 1, (0, 2): qqi(0, 1)})
        result = apply_Dstar(MIXED, PForm(2, 2, {(0, 1): g}))
        p1_star = mono(2, (1, 1))
        p2_star = HoloPoly(2, {(2, 0): 1, (0, 2): 1})
        assert result == PForm(2, 1, {(0,): -(p2_star * g), (1,): p1_star * g})

    def test_degree_errors(self):
        with pytest.raises(DegreeError):
            apply_D(SECOND, PForm.basis(1, (0,), (0,)))
        with pytest.raises(DegreeError):
            apply_Dstar(SECOND, PForm.function(mono(1, (0,))))

    @pytest.mark.parametrize("D", [MIXED, DOperator.second_derivatives(2), DOperator.from_specs(["d1 + 2*d2^2", "(1+i)*d1"])])
    def test_complex_and_adjointness(self, D):
        rng = np.random.default_rng(5)
        for _ in range(3):
            u = random_form(rng, 2, 0, 4)
            v = random_form(rng, 2, 1, 4)
            assert apply_D(D, apply_D(D, u)).is_zero()
            assert apply_Dstar(D, apply_Dstar(D, PForm(2, 2, {(0, 1): u.component(())}))).is_zero()
            assert inner_forms(apply_D(D, u), v) == inner_forms(u, apply_Dstar(D, v))


class TestCommutatorForm:
    def test_second_derivative_examples(self):
        assert commutator_form(SECOND, PForm.basis(1, (0,), (1,))) == ExactScalar(qqi(6), 1)
        assert commutator_form(SECOND, PForm.basis(1, (0,), (0,))) == ExactScalar(qqi(2), 1)

    def test_mixed_pair_integral(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            u = random_form(rng, 2, 1, 4)
            u1, u2 = u.component((0,)), u.component((1,))
            expected = (norm_sq(u1) + norm_sq(u2) * 4
                        + norm_sq(u1.derivative(0) + u2.derivative(1) * 2)
                        + norm_sq(u1.derivative(1) + u2.derivative(0) * 2))
            assert commutator_form(MIXED, u) == expected

    @pytest.mark.parametrize("D", [SECOND, MIXED, DOperator.dbar(2), DOperator.from_specs(["d1 + d2^2", "d1*d2 + 3"])])
    def test_energy_identity(self, D):
        rng = np.random.default_rng(23)
        for p in range(1, D.dim + 1):
            for _ in range(3):
                u = random_form(rng, D.dim, p, 3)
                lhs, derivative_term, commutator_term = energy_identity(D, u)
                assert lhs == derivative_term + commutator_term


class TestCertificate:
    @pytest.mark.parametrize("window", [0, 2, 4, 6])
    def test_second_derivatives(self, window):
        certificate = estimate_constant(SECOND, 1, window)
        assert certificate.lambda_min >= 2 - 1e-9
        assert certificate.C <= 0.5 + 1e-9

    @pytest.mark.parametrize("window", [0, 2, 4, 6])
    def test_mixed_pair(self, window):
        assert estimate_constant(MIXED, 1, window).lambda_min >= 1 - 1e-9

    def test_dbar_constant(self):
        assert estimate_constant(DOperator.dbar(2), 1, 3).lambda_min == pytest.approx(1)

    def test_degenerate_operator(self):
        D = DOperator.from_specs(["d1", "0"], 2)
        certificate = estimate_constant(D, 1, 2)
        assert not certificate.positive
        assert certificate.C is None


class TestSolveD:
    def test_constant_form(self):
        alpha = PForm.basis(1, (0,), (0,))
        report = solve_canonical_D(SECOND, alpha, 6)
        assert report.solution == PForm.function(mono(1, (2,), qqi("1/2")))
        assert apply_D(SECOND, report.solution) == alpha
        assert report.residual_norm == 0.0
        assert report.max_defect == 0.0
        assert report.exact
        assert report.within_bound

    def test_linear_form(self):
        report = solve_canonical_D(SECOND, PForm.basis(1, (0,), (1,)), 6)
        assert report.solution == PForm.function(mono(1, (3,), qqi("1/6")))

    def test_neumann_blocks(self):
        assert neumann_D(SECOND, PForm.basis(1, (0,), (0,)), 4) == PForm.basis(1, (0,), (0,), qqi("1/2"))

    def test_matches_dbar_solver(self):
        alpha = PForm.basis(2, (0,), (0, 0))
        report = solve_canonical_D(DOperator.dbar(2), alpha, 4)
        assert report.solution == solve_partial(alpha)

    def test_not_closed(self):
        alpha = PForm.basis(2, (0,), (0, 2))
        with pytest.raises(NotClosedError):
            solve_canonical_D(DOperator.second_derivatives(2), alpha, 4)

    def test_non_positive_certificate(self):
        D = DOperator.from_specs(["d1", "0"], 2)
        with pytest.raises(NonPositiveCertificateError):
            solve_canonical_D(D, PForm.basis(2, (1,), (0, 0)), 2)

    def test_kernel_orthogonality(self):
        alpha = apply_D(MIXED, PForm.function(HoloPoly(2, {(3, 1): 1, (2, 2): qqi(0, 2)})))
        report = solve_canonical_D(MIXED, alpha, 4)
        assert apply_D(MIXED, report.solution) == alpha
        kernel = kernel_basis(MIXED, 0, 4)
        assert all(inner_forms(report.solution, k).is_zero() for k in kernel)


class TestSolveDstar:
    BETA = PForm(2, 1, {(0,): mono(2, (0, 2)), (1,): mono(2, (2, 0), -1)})

    def test_exact(self):
        D = DOperator.second_derivatives(2)
        assert apply_Dstar(D, self.BETA).is_zero()
        report = solve_canonical_Dstar(D, self.BETA, 6)
        assert apply_Dstar(D, report.solution) == self.BETA
        assert report.max_defect == 0.0
        assert report.within_bound

    def test_galerkin_convergence(self):
        D = DOperator.second_derivatives(2)
        report = converge_canonical(D, self.BETA.to_float(), 6, "Dstar")
        assert report.residual_norm < 1e-8
        assert len(report.extra["residual_history"]) == 2
        assert report.max_defect < 1e-8

    def test_not_closed(self):
        beta = PForm.basis(2, (0,), (0, 0))
        with pytest.raises(NotClosedError) as info:
            solve_canonical_Dstar(DOperator.second_derivatives(2), beta, 4)
        assert info.value.residual_norm == pytest.approx(math.sqrt(2) * math.pi)

    def test_degree_range(self):
        with pytest.raises(DegreeError):
            solve_canonical_Dstar(SECOND, PForm.basis(1, (0,), (0,)), 4)

    def test_dbar_round_trip(self):
        D = DOperator.dbar(3)
        beta = partial_star(PForm(3, 2, {(0, 1): HoloPoly(3, {(1, 0, 1): 1}),
                                         (1, 2): HoloPoly(3, {(0, 2, 0): qqi(1, -1)})}))
        report = solve_canonical_Dstar(D, beta, 4)
        assert apply_Dstar(D, report.solution) == beta
