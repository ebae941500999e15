#!/usr/bin/env python3
"""Tests for the holomorphic d-complex, its Laplacian and the canonical solver"""

import math

import numpy as np
import pytest

from fockcomplex.dbar import (
    assemble_box_matrix, box, box_closed_form, box_eigenvalues, graph_norm_sq,
    kernel_basis_partial, basic_estimate_terms, neumann, partial, partial_star, solve_partial,
    solve_partial_report, spectrum_table, tail_bound,
)
from fockcomplex.errors import DegreeError, NotClosedError
from fockcomplex.fock import WitnessSeries, witness_polynomial
from fockcomplex.forms import (
    PForm, form_norm_sq, inner_forms, parse_form_index, format_form_index, wedge_sign,
)
from fockcomplex.linalg import nullspace, solve_exact
from fockcomplex.polynomials import HoloPoly
from fockcomplex.scalars import ExactScalar, qqi
from fockcomplex.verify import random_form


def mono(n, alpha, c=1):
    return HoloPoly.monomial(n, alpha, c)


def form(n, p, components):
    return PForm(n, p, components)


class TestForms:
    def test_wedge_sign(self):
        assert wedge_sign(1, (0,)) == (-1, (0, 1))
        assert wedge_sign(0, (1,)) == (1, (0, 1))
        assert wedge_sign(0, (0,)) == (0, None)
        assert wedge_sign(1, (0, 2)) == (-1, (0, 1, 2))

    def test_index_text(self):
        assert parse_form_index("1,3") == (0, 2)
        assert format_form_index((0, 2)) == "1,3"
        assert parse_form_index("") == ()

    def test_rejects_unsorted_index(self):
        with pytest.raises(ValueError):
            PForm(2, 2, {(1, 0): mono(2, (0, 0))})

    def test_json_round_trip(self):
        u = form(3, 2, {(0, 2): mono(3, (1, 0, 2), qqi(1, -3)), (1, 2): mono(3, (0, 0, 0), qqi("1/2"))})
        assert PForm.from_json(u.to_json()) == u


class TestPartial:
    def test_closed_term_vanishes(self):
        assert partial(form(2, 1, {(0,): mono(2, (1, 0))})).is_zero()

    def test_wedge_reordering_sign(self):
        u = form(2, 1, {(0,): mono(2, (0, 1))})
        assert partial(u) == form(2, 2, {(0, 1): mono(2, (0, 0), -1)})

    def test_gradient_of_function(self):
        f = HoloPoly(2, {(2, 1): 1})
        expected = form(2, 1, {(0,): mono(2, (1, 1), 2), (1,): mono(2, (2, 0))})
        assert partial(PForm.function(f)) == expected

    def test_top_degree_rejected(self):
        with pytest.raises(DegreeError):
            partial(form(2, 2, {(0, 1): mono(2, (0, 0))}))


class TestPartialStar:
    def test_multiplication(self):
        assert partial_star(PForm.basis(2, (0,), (0, 0))) == PForm.function(mono(2, (1, 0)))

    def test_signs(self):
        u = form(2, 2, {(0, 1): mono(2, (0, 1))})
        expected = form(2, 1, {(1,): mono(2, (1, 1)), (0,): mono(2, (0, 2), -1)})
        assert partial_star(u) == expected

    def test_functions_rejected(self):
        with pytest.raises(DegreeError):
            partial_star(PForm.function(mono(1, (0,))))

    def test_adjointness(self):
        u = form(3, 1, {(0,): HoloPoly(3, {(1, 0, 1): qqi(2, 1), (0, 0, 0): 3}),
                        (2,): HoloPoly(3, {(0, 2, 0): qqi(0, -1)})})
        v = form(3, 2, {(0, 1): HoloPoly(3, {(1, 0, 2): 1, (0, 1, 0): qqi(1, 1)}),
                        (0, 2): HoloPoly(3, {(2, 0, 1): qqi(-2, 0)}),
                        (1, 2): HoloPoly(3, {(0, 2, 0): 5})})
        assert inner_forms(partial(u), v) == inner_forms(u, partial_star(v))

    def test_complex_property(self):
        u = form(3, 1, {(0,): HoloPoly(3, {(1, 2, 1): 1}), (1,): HoloPoly(3, {(3, 0, 1): qqi(1, 1)})})
        assert partial(partial(u)).is_zero()
        v = form(3, 3, {(0, 1, 2): HoloPoly(3, {(1, 1, 0): 2})})
        assert partial_star(partial_star(v)).is_zero()


class TestBox:
    def test_eigenvalue_on_monomial(self):
        u = form(2, 1, {(0,): mono(2, (1, 1))})
        assert box(u) == form(2, 1, {(0,): mono(2, (1, 1), 3)})

    def test_constants_in_kernel_for_functions(self):
        assert box(PForm.function(mono(2, (0, 0)))).is_zero()

    def test_top_degree(self):
        u = PForm.basis(2, (0, 1), (0, 0))
        assert box(u) == PForm.basis(2, (0, 1), (0, 0), 2)

    @pytest.mark.parametrize("p", [0, 1, 2, 3])
    def test_closed_form_agrees(self, p):
        components = {J: HoloPoly(3, {(1, 0, 2): qqi(1, 2), (0, 1, 0): 4})
                      for J in [(0, 1, 2)[:p]]}
        u = form(3, p, components)
        assert box(u) == box_closed_form(u)

    def test_random_forms_agree_with_closed_form(self, caplog):
        rng = np.random.default_rng(8)
        with caplog.at_level("ERROR", logger="fockcomplex.dbar"):
            for p in range(4):
                u = random_form(rng, 3, p, 3)
                assert box(u) == box_closed_form(u)
        assert not caplog.records


class TestSpectrum:
    def test_table(self):
        assert spectrum_table(2, 1, 2).rows == [(1, 2), (2, 4), (3, 6)]
        assert spectrum_table(1, 1, 3).rows == [(1, 1), (2, 1), (3, 1), (4, 1)]
        assert spectrum_table(2, 0, 1).rows == [(0, 1), (1, 2)]

    def test_multiplicities(self):
        for n in range(1, 5):
            for p in range(n + 1):
                for m, (value, multiplicity) in enumerate(spectrum_table(n, p, 6).rows):
                    assert value == m + p
                    assert multiplicity == math.comb(n + m - 1, n - 1) * math.comb(n, p)

    def test_invalid_degree(self):
        with pytest.raises(DegreeError):
            spectrum_table(2, 3, 1)

    @pytest.mark.parametrize("n,p,cutoff,expected", [
        (2, 1, 2, [1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 3, 3]),
        (1, 1, 0, [1]),
        (2, 2, 1, [2, 3, 3]),
    ])
    def test_numeric_eigenvalues(self, n, p, cutoff, expected):
        np.testing.assert_allclose(box_eigenvalues(n, p, cutoff), expected, atol=1e-9)

    def test_finite_sections_match_table(self):
        for n in range(1, 4):
            for p in range(1, n + 1):
                for cutoff in range(0, 4):
                    numeric = box_eigenvalues(n, p, cutoff)
                    analytic = spectrum_table(n, p, cutoff).eigenvalues
                    assert np.max(np.abs(numeric - np.array(analytic))) < 1e-9

    def test_matrix_is_diagonal(self):
        matrix = assemble_box_matrix(3, 2, 2).toarray()
        assert matrix.shape == (3 * 10, 3 * 10)
        assert np.count_nonzero(matrix - np.diag(np.diag(matrix))) == 0


class TestNeumann:
    def test_inverse_of_box(self):
        u = form(2, 1, {(0,): mono(2, (1, 1))})
        assert neumann(u) == form(2, 1, {(0,): mono(2, (1, 1), qqi("1/3"))})
        assert box(neumann(u)) == u
        assert neumann(box(u)) == u

    def test_constant_form_is_fixed(self):
        u = PForm.basis(2, (0,), (0, 0))
        assert neumann(u) == u

    def test_functions_rejected(self):
        with pytest.raises(DegreeError):
            neumann(PForm.function(mono(1, (1,))))

    def test_contraction(self):
        u = form(2, 2, {(0, 1): HoloPoly(2, {(0, 0): 1, (3, 1): qqi(2, -1)})})
        assert form_norm_sq(neumann(u)) * 4 <= form_norm_sq(u)

    def test_commutes_with_partial(self):
        u = form(3, 1, {(0,): HoloPoly(3, {(1, 1, 0): 1, (0, 0, 2): qqi(0, 1)}),
                        (2,): HoloPoly(3, {(2, 0, 0): 3})})
        assert neumann(partial(u)) == partial(neumann(u))
        v = form(3, 2, {(0, 2): HoloPoly(3, {(1, 0, 1): 1})})
        assert neumann(partial_star(v)) == partial_star(neumann(v))


class TestSolve:
    def test_constant_form(self):
        alpha = PForm.basis(2, (0,), (0, 0))
        u0 = solve_partial(alpha)
        assert u0 == PForm.function(mono(2, (1, 0)))
        assert partial(u0) == alpha
        assert form_norm_sq(u0) == form_norm_sq(alpha)

    def test_symmetric_form(self):
        alpha = form(2, 1, {(0,): mono(2, (0, 1)), (1,): mono(2, (1, 0))})
        assert solve_partial(alpha) == PForm.function(mono(2, (1, 1)))

    def test_not_closed(self):
        alpha = form(2, 1, {(0,): mono(2, (0, 1))})
        with pytest.raises(NotClosedError) as info:
            solve_partial(alpha)
        assert info.value.residual == form(2, 2, {(0, 1): mono(2, (0, 0), -1)})
        assert info.value.residual_norm == pytest.approx(math.pi)

    @pytest.mark.parametrize("n,p", [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3)])
    def test_bound_on_random_closed_forms(self, n, p):
        rng = np.random.default_rng(n * 10 + p)
        for _ in range(5):
            alpha = partial(random_form(rng, n, p - 1, 3))
            u0 = solve_partial(alpha)
            assert partial(u0) == alpha
            assert form_norm_sq(u0) * p <= form_norm_sq(alpha)

    def test_report(self):
        alpha = partial(form(3, 1, {(0,): HoloPoly(3, {(1, 1, 0): 1}), (2,): HoloPoly(3, {(0, 2, 1): qqi(1, 1)})}))
        report = solve_partial_report(alpha)
        assert report.residual_norm == 0.0
        assert report.max_defect == 0.0
        assert report.bound == pytest.approx(2 ** -0.5)
        assert report.within_bound
        assert partial(report.solution) == alpha

    def test_report_on_top_degree(self):
        alpha = form(2, 2, {(0, 1): HoloPoly(2, {(1, 0): 1, (0, 0): 2})})
        report = solve_partial_report(alpha)
        assert partial(report.solution) == alpha
        assert report.within_bound


class TestKernel:
    def test_functions(self):
        kernel = kernel_basis_partial(2, 0, 3)
        assert len(kernel) == 1
        assert kernel[0].polynomial_degree == 0

    def test_closed_one_forms(self):
        # closed homogeneous 1-forms of degree m are gradients of degree m+1 polynomials
        kernel = kernel_basis_partial(2, 1, 2)
        assert len(kernel) == 2 + 3 + 4
        assert all(partial(k).is_zero() for k in kernel)

    def test_top_degree_rejected(self):
        with pytest.raises(DegreeError):
            kernel_basis_partial(2, 2, 1)


class TestExactLinearAlgebra:
    def test_nullspace(self):
        basis = nullspace([[qqi(1), qqi(0, 1), qqi(0)]], 3)
        assert len(basis) == 2
        for vector in basis:
            assert vector[0] + qqi(0, 1) * vector[1] == qqi(0)

    def test_nullspace_of_empty_map(self):
        assert nullspace([], 2) == [[qqi(1), qqi(0)], [qqi(0), qqi(1)]]

    def test_solve(self):
        matrix = [[qqi(2), qqi(1)], [qqi(0), qqi(0, 1)]]
        assert solve_exact(matrix, [qqi(3), qqi(0, 1)]) == [qqi(1), qqi(1)]

    def test_singular(self):
        assert solve_exact([[qqi(1), qqi(2)], [qqi(2), qqi(4)]], [qqi(1), qqi(2)]) is None

class TestEstimates:
    def test_decomposition(self):
        u = form(3, 2, {(0, 1): HoloPoly(3, {(1, 0, 1): qqi(1, -1), (0, 0, 0): 2}),
                        (1, 2): HoloPoly(3, {(2, 1, 0): 3})})
        lhs, derivative_term, p_norm = basic_estimate_terms(u)
        assert lhs == derivative_term + p_norm
        assert p_norm <= lhs

    def test_graph_norm(self):
        assert graph_norm_sq(mono(1, (0,))) == ExactScalar(qqi(1), 1)
        assert graph_norm_sq(HoloPoly(1, {(0,): 1, (1,): 1})) == ExactScalar(qqi(3), 1)
        assert graph_norm_sq(mono(2, (2, 1))) == ExactScalar(qqi(2 * 4), 2)

    def test_tail_bound(self):
        g = witness_polynomial(WitnessSeries("G"), 60)
        for cutoff in range(51):
            tail, bound = tail_bound(g, cutoff)
            assert tail <= bound * (1 + 1e-12)
