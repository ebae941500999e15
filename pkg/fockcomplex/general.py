"""
Complexes built from constant-coefficient differential operators.
D u = sum'_J sum_k p_k(u_J) dz_k ^ dz_J and its adjoint D* v = sum'_K sum_j p_j* v_{jK} dz_K,
where p_j* is multiplication by p_j with conjugated coefficients (d_j -> z_j).
The Neumann operator of box_D = D*D + DD* is computed by a Galerkin solve on
forms of bounded degree; blockwise and exact when every p_j is homogeneous
of the same order, since box_D then preserves total degree.
"""

import json
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .dbar import CanonicalSolution, orthogonality_defects
from .errors import (
    DegreeError, DimensionMismatchError, NonConstantCoefficientError, NonConvergenceError,
    NonPositiveCertificateError, NotClosedError,
)
from .fock import Scalar, as_float, inner_gaussian, norm_sq
from .forms import (
    BasisElement, FormIndex, PForm, form_basis, form_norm_sq, increasing_indices, inner_forms,
    kernel_of, wedge_sign,
)
from .linalg import hermitian_solve, smallest_eigenvalue, solve_exact
from .polynomials import HoloPoly, MultiIndex, multi_factorial
from .scalars import ExactScalar, qqi, rational_to_float
from .weyl import WeylOperator, apply, commutator, formal_adjoint_constant, format_weyl, parse_weyl

logger = logging.getLogger(__name__)

# eigenvalues at or below this count as zero
CERTIFICATE_FLOOR = 1e-12


class DOperator:
    """The tuple (p_1, ..., p_n) of constant-coefficient operators defining D"""

    def __init__(self, ops: Sequence[WeylOperator]):
        ops = tuple(ops)
        if not ops:
            raise ValueError("D needs at least one operator")
        dim = ops[0].dim
        if len(ops) != dim:
            raise DimensionMismatchError(len(ops), dim, "operator count and dimension")
        for j, op in enumerate(ops):
            if op.dim != dim:
                raise DimensionMismatchError(op.dim, dim, f"p_{j + 1} and D")
            if not op.is_constant_coefficient:
                raise NonConstantCoefficientError(f"p_{j + 1} = {format_weyl(op)} has a multiplication part")
        self.dim = dim
        self.ops = ops
        self.adjoints = tuple(formal_adjoint_constant(op) for op in ops)
        self._commutators: Dict[Tuple[int, int], WeylOperator] = {}

    @classmethod
    def from_specs(cls, specs: Sequence[str], n: Optional[int] = None) -> 'DOperator':
        """Operators from weyl expressions, e.g. ["d1*d2", "d1^2 + d2^2"]"""
        dim = n if n is not None else len(specs)
        return cls([parse_weyl(spec, dim) for spec in specs])

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> 'DOperator':
        return cls.from_specs(list(data["p"]), int(data["n"]))

    @classmethod
    def dbar(cls, n: int) -> 'DOperator':
        """p_j = d_j, recovering the holomorphic d-complex"""
        return cls([WeylOperator.d(n, j) for j in range(n)])

    @classmethod
    def second_derivatives(cls, n: int) -> 'DOperator':
        """p_j = d_j^2"""
        return cls([WeylOperator.d(n, j, 2) for j in range(n)])

    @classmethod
    def mixed_pair(cls) -> 'DOperator':
        """n = 2 with p_1 = d_1 d_2 and p_2 = d_1^2 + d_2^2"""
        return cls.from_specs(["d1*d2", "d1^2 + d2^2"], 2)

    @property
    def homogeneous_degree(self) -> Optional[int]:
        orders = {op.homogeneous_order for op in self.ops}
        if len(orders) == 1 and None not in orders:
            return orders.pop()
        return None

    def commutator_op(self, k: int, j: int) -> WeylOperator:
        """[p_k, p_j*]"""
        key = (k, j)
        if key not in self._commutators:
            self._commutators[key] = commutator(self.ops[k], self.adjoints[j])
        return self._commutators[key]

    def to_json(self) -> Dict[str, Any]:
        return {"n": self.dim, "p": [format_weyl(op) for op in self.ops]}

    def __str__(self) -> str:
        return json.dumps(self.to_json()["p"])

    def __repr__(self) -> str:
        return f"DOperator({self})"


def _check_dim(D: DOperator, u: PForm) -> None:
    if D.dim != u.dim:
        raise DimensionMismatchError(D.dim, u.dim, "operator and form")


def apply_D(D: DOperator, u: PForm) -> PForm:
    _check_dim(D, u)
    if u.degree >= u.dim:
        raise DegreeError(f"D is not defined on ({u.degree},0)-forms in dimension {u.dim}")
    out: Dict[FormIndex, HoloPoly] = {}
    for J, f in u.components.items():
        for k, op in enumerate(D.ops):
            sign, M = wedge_sign(k, J)
            if not sign:
                continue
            term = apply(op, f)
            if term.is_zero():
                continue
            term = term if sign > 0 else -term
            out[M] = out[M] + term if M in out else term
    return PForm(u.dim, u.degree + 1, out)


def apply_Dstar(D: DOperator, v: PForm) -> PForm:
    _check_dim(D, v)
    if v.degree == 0:
        raise DegreeError("D* is not defined on functions")
    out: Dict[FormIndex, HoloPoly] = {}
    for K in increasing_indices(v.dim, v.degree - 1):
        total = HoloPoly.zero(v.dim)
        for j, adjoint in enumerate(D.adjoints):
            total = total + apply(adjoint, v.signed_component(j, K))
        out[K] = total
    return PForm(v.dim, v.degree - 1, out)


def commutator_pairing(D: DOperator, u: PForm, v: PForm) -> Scalar:
    """sum'_K sum_{j,k} ([p_k, p_j*] u_{jK}, v_{kK})"""
    _check_dim(D, u)
    if u.degree == 0:
        raise DegreeError("commutator form needs forms of degree >= 1")
    exact = u.exact and v.exact
    total: Scalar = ExactScalar.zero(u.dim) if exact else 0j
    for K in increasing_indices(u.dim, u.degree - 1):
        for j in range(u.dim):
            u_jK = u.signed_component(j, K)
            if u_jK.is_zero():
                continue
            for k in range(u.dim):
                v_kK = v.signed_component(k, K)
                if v_kK.is_zero():
                    continue
                total = total + inner_gaussian(apply(D.commutator_op(k, j), u_jK), v_kK)
    return total


def commutator_form(D: DOperator, u: PForm) -> Scalar:
    return commutator_pairing(D, u, u)


def derivative_sum(D: DOperator, u: PForm) -> Scalar:
    """sum'_J sum_k |p_k(u_J)|^2"""
    total: Scalar = ExactScalar.zero(u.dim) if u.exact else 0j
    for f in u.components.values():
        for op in D.ops:
            total = total + norm_sq(apply(op, f))
    return total


def energy(D: DOperator, u: PForm) -> Scalar:
    """|Du|^2 + |D*u|^2 with the undefined half dropped at p = 0 or p = n"""
    total: Scalar = ExactScalar.zero(u.dim) if u.exact else 0j
    if u.degree < u.dim:
        total = total + form_norm_sq(apply_D(D, u))
    if u.degree > 0:
        total = total + form_norm_sq(apply_Dstar(D, u))
    return total


def energy_identity(D: DOperator, u: PForm) -> Tuple[Scalar, Scalar, Scalar]:
    """(|Du|^2 + |D*u|^2, sum |p_k u_J|^2, commutator_form); the first is the sum of the others"""
    return energy(D, u), derivative_sum(D, u), commutator_form(D, u)


@dataclass
class EstimateCertificate:
    """Smallest eigenvalue of the commutator form on forms of degree <= window"""

    window: int
    p: int
    lambda_min: float
    size: int

    @property
    def positive(self) -> bool:
        return self.lambda_min > CERTIFICATE_FLOOR

    @property
    def C(self) -> Optional[float]:
        return 1.0 / self.lambda_min if self.positive else None

    def to_json(self) -> Dict[str, Any]:
        return {"window": self.window, "p": self.p, "lambda_min": self.lambda_min,
                "C": self.C, "positive": self.positive, "size": self.size}


def _orthonormal_scale(alpha: MultiIndex) -> float:
    """1/sqrt(alpha!) without the pi^n factor, which cancels in every ratio used here"""
    return 1.0 / math.sqrt(multi_factorial(alpha))


def _rational_part(value: Scalar, n: int) -> complex:
    """Gaussian inner products of polynomials in n variables are (rational) * pi^n; drop the pi^n"""
    if isinstance(value, ExactScalar):
        return complex(rational_to_float(value.real), rational_to_float(value.imag))
    return complex(value) / math.pi ** n


def _hermitian_matrix(n: int, basis: List[BasisElement], pairing) -> np.ndarray:
    """H[r, c] = pairing(e_c, e_r) over phi_alpha dz_J, pi^n divided out"""
    forms = [PForm.basis(n, J, alpha) for J, alpha in basis]
    scales = [_orthonormal_scale(alpha) for _, alpha in basis]
    size = len(basis)
    matrix = np.zeros((size, size), dtype=complex)
    for c in range(size):
        for r in range(c, size):
            value = _rational_part(pairing(forms[c], forms[r]), n) * scales[c] * scales[r]
            matrix[r, c] = value
            matrix[c, r] = value.conjugate()
    return matrix


def commutator_matrix(D: DOperator, p: int, window: int) -> np.ndarray:
    if not 1 <= p <= D.dim:
        raise DegreeError(f"form degree {p} outside 1..{D.dim}")
    basis = form_basis(D.dim, p, range(window + 1))
    return _hermitian_matrix(D.dim, basis, lambda u, v: commutator_pairing(D, u, v))


def estimate_constant(D: DOperator, p: int, window: int) -> EstimateCertificate:
    """lambda_min of the commutator form against the identity on degree <= window; C = 1/lambda_min"""
    matrix = commutator_matrix(D, p, window)
    certificate = EstimateCertificate(window, p, smallest_eigenvalue(matrix), matrix.shape[0])
    logger.debug(f"Certificate for D={D} p={p} window={window}: lambda_min={certificate.lambda_min:.12g}")
    return certificate


def kernel_basis(D: DOperator, p: int, max_degree: int, adjoint: bool = False) -> List[PForm]:
    """Exact basis of ker D (or ker D*) on (p,0)-forms of degree <= max_degree"""
    if not 0 <= p <= D.dim:
        raise DegreeError(f"form degree {p} outside 0..{D.dim}")
    degrees = range(max_degree + 1)
    if (adjoint and p == 0) or (not adjoint and p == D.dim):
        return [PForm.basis(D.dim, J, alpha) for J, alpha in form_basis(D.dim, p, degrees)]
    op = (lambda u: apply_Dstar(D, u)) if adjoint else (lambda u: apply_D(D, u))
    return kernel_of(op, D.dim, p, degrees)


def quadratic_form(D: DOperator, u: PForm, v: PForm) -> Scalar:
    """Q_D(u, v) = (Du, Dv) + (D*u, D*v)"""
    total: Scalar = ExactScalar.zero(u.dim) if u.exact and v.exact else 0j
    if u.degree < u.dim:
        total = total + inner_forms(apply_D(D, u), apply_D(D, v))
    if u.degree > 0:
        total = total + inner_forms(apply_Dstar(D, u), apply_Dstar(D, v))
    return total


def _neumann_block_exact(D: DOperator, alpha: PForm, m: int) -> PForm:
    """Exact solve of box_D w = alpha on the degree-m block (alpha homogeneous of degree m)"""
    basis = form_basis(D.dim, alpha.degree, [m])
    forms = [PForm.basis(D.dim, J, a) for J, a in basis]
    images = [(apply_D(D, e) if alpha.degree < D.dim else None,
               apply_Dstar(D, e) if alpha.degree > 0 else None) for e in forms]
    size = len(basis)
    matrix = [[qqi(0)] * size for _ in range(size)]
    for c in range(size):
        for r in range(size):
            value = ExactScalar.zero(D.dim)
            for left, right in zip(images[c], images[r]):
                if left is not None:
                    value = value + inner_forms(left, right)
            matrix[r][c] = value.value
    rhs = [inner_forms(alpha, e).value for e in forms]
    solution = solve_exact(matrix, rhs)
    if solution is None:
        raise NonPositiveCertificateError(0.0)
    components: Dict[FormIndex, Dict[MultiIndex, Any]] = {}
    for (J, a), x in zip(basis, solution):
        if x:
            components.setdefault(J, {})[a] = x
    return PForm(D.dim, alpha.degree, {J: HoloPoly(D.dim, terms) for J, terms in components.items()})


def neumann_D(D: DOperator, alpha: PForm, window: int) -> PForm:
    """Galerkin approximation of box_D^{-1} alpha on forms of degree <= window"""
    _check_dim(D, alpha)
    if alpha.is_zero():
        return alpha
    if D.homogeneous_degree is not None and alpha.exact:
        result = PForm.zero(D.dim, alpha.degree)
        for m, block in alpha.homogeneous_parts().items():
            result = result + _neumann_block_exact(D, block, m)
        logger.debug(f"Exact blockwise Neumann solve over degrees {list(alpha.homogeneous_parts())}")
        return result
    basis = form_basis(D.dim, alpha.degree, range(window + 1))
    matrix = _hermitian_matrix(D.dim, basis, lambda u, v: quadratic_form(D, u, v))
    scales = [_orthonormal_scale(a) for _, a in basis]
    forms = [PForm.basis(D.dim, J, a) for J, a in basis]
    rhs = np.array([_rational_part(inner_forms(alpha, e), D.dim) * s for e, s in zip(forms, scales)])
    coefficients = hermitian_solve(matrix, rhs)
    components: Dict[FormIndex, Dict[MultiIndex, complex]] = {}
    for (J, a), x, s in zip(basis, coefficients, scales):
        if x:
            # x is the coefficient of phi_a; back to monomials (pi^n dropped on both sides)
            components.setdefault(J, {})[a] = complex(x) * s
    logger.debug(f"Galerkin Neumann solve on {len(basis)} basis forms (window {window})")
    return PForm(D.dim, alpha.degree, {J: HoloPoly(D.dim, terms) for J, terms in components.items()})


def _norm(u: PForm) -> float:
    return math.sqrt(max(as_float(form_norm_sq(u)), 0.0)) if not u.is_zero() else 0.0


def _require_certificate(D: DOperator, p: int, window: int) -> EstimateCertificate:
    certificate = estimate_constant(D, p, window)
    if not certificate.positive:
        raise NonPositiveCertificateError(certificate.lambda_min)
    return certificate


def _report(D: DOperator, rhs: PForm, solution: PForm, residual: PForm, kernel: List[PForm],
            certificate: EstimateCertificate, window: int) -> CanonicalSolution:
    rhs_norm = _norm(rhs)
    return CanonicalSolution(
        solution=solution,
        residual_norm=_norm(residual),
        orthogonality_defects=orthogonality_defects(solution, kernel),
        norm_ratio=_norm(solution) / rhs_norm if rhs_norm else 0.0,
        bound=math.sqrt(certificate.C),
        exact=D.homogeneous_degree is not None and rhs.exact,
        window=window,
        extra={"certificate": certificate.to_json(), "operator": D.to_json()["p"]},
    )


def solve_canonical_D(D: DOperator, alpha: PForm, window: int) -> CanonicalSolution:
    """u0 = D*(N_D alpha), the solution of Du = alpha orthogonal to ker D"""
    _check_dim(D, alpha)
    if alpha.degree == 0:
        raise DegreeError("right-hand side of Du = alpha must have degree >= 1")
    if alpha.degree < D.dim:
        closure = apply_D(D, alpha)
        if not closure.is_zero():
            size = _norm(closure)
            raise NotClosedError(f"right-hand side is not D-closed: |D alpha| = {size:.6g}",
                                 residual=closure, residual_norm=size)
    certificate = _require_certificate(D, alpha.degree, window)
    u0 = apply_Dstar(D, neumann_D(D, alpha, window))
    kernel = kernel_basis(D, alpha.degree - 1, window)
    return _report(D, alpha, u0, apply_D(D, u0) - alpha, kernel, certificate, window)


def solve_canonical_Dstar(D: DOperator, beta: PForm, window: int) -> CanonicalSolution:
    """v0 = D(N_D beta), the solution of D*v = beta orthogonal to ker D*"""
    _check_dim(D, beta)
    if D.dim < 2 or not 1 <= beta.degree <= D.dim - 1:
        raise DegreeError(f"D*v = beta needs n > 1 and 1 <= p <= n-1 (n={D.dim}, p={beta.degree})")
    closure = apply_Dstar(D, beta)
    if not closure.is_zero():
        size = _norm(closure)
        raise NotClosedError(f"right-hand side is not D*-closed: |D* beta| = {size:.6g}",
                             residual=closure, residual_norm=size)
    certificate = _require_certificate(D, beta.degree, window)
    v0 = apply_D(D, neumann_D(D, beta, window))
    kernel = kernel_basis(D, beta.degree + 1, window, adjoint=True)
    return _report(D, beta, v0, apply_Dstar(D, v0) - beta, kernel, certificate, window)


def converge_canonical(D: DOperator, rhs: PForm, window: int, direction: str = "D",
                       tolerance: float = 1e-8, factor: float = 2.0) -> CanonicalSolution:
    """Solve at window and window+2; the residual must fall below tolerance or shrink by factor"""
    solver = {"D": solve_canonical_D, "Dstar": solve_canonical_Dstar}.get(direction)
    if solver is None:
        raise ValueError(f"unknown direction {direction!r}, expected 'D' or 'Dstar'")
    first = solver(D, rhs, window)
    second = solver(D, rhs, window + 2)
    history = [first.residual_norm, second.residual_norm]
    second.extra["residual_history"] = history
    if second.residual_norm <= tolerance:
        return second
    if second.residual_norm * factor <= first.residual_norm:
        return second
    raise NonConvergenceError(
        f"residual {history[1]:.3g} at window {window + 2} did not improve on {history[0]:.3g} "
        f"by a factor {factor:g}", history)
