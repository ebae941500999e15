"""
The holomorphic d-complex on the Gaussian Fock space.
partial / partial_star act on (p,0)-forms, box is the complex Laplacian
(diagonal on homogeneous degrees with eigenvalue m+p), neumann its inverse
for p >= 1, and solve_partial the canonical solution of du = alpha.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy import sparse

from .errors import DegreeError, NotClosedError
from .fock import Scalar, as_float, norm_sq
from .forms import (
    FormIndex, PForm, form_basis, form_norm_sq, increasing_indices, inner_forms, kernel_of,
    wedge_sign,
)
from .linalg import hermitian_eigenvalues
from .polynomials import HoloPoly, multi_factorial
from .scalars import ExactScalar, times_rational, to_complex

logger = logging.getLogger(__name__)


def partial(u: PForm) -> PForm:
    """sum'_J sum_j (d u_J / d z_j) dz_j ^ dz_J"""
    if u.degree >= u.dim:
        raise DegreeError(f"partial is not defined on ({u.degree},0)-forms in dimension {u.dim}")
    out: Dict[FormIndex, HoloPoly] = {}
    for J, f in u.components.items():
        for j in range(u.dim):
            sign, M = wedge_sign(j, J)
            if not sign:
                continue
            term = f.derivative(j)
            if term.is_zero():
                continue
            term = term if sign > 0 else -term
            out[M] = out[M] + term if M in out else term
    return PForm(u.dim, u.degree + 1, out)


def partial_star(u: PForm) -> PForm:
    """(partial* u)_K = sum_j z_j u_{jK}"""
    if u.degree == 0:
        raise DegreeError("partial_star is not defined on functions")
    out: Dict[FormIndex, HoloPoly] = {}
    for K in increasing_indices(u.dim, u.degree - 1):
        total = HoloPoly.zero(u.dim)
        for j in range(u.dim):
            total = total + u.signed_component(j, K).times_variable(j)
        out[K] = total
    return PForm(u.dim, u.degree - 1, out)


def box(u: PForm) -> PForm:
    """partial* partial + partial partial*, dropping the half that is undefined at p = 0 or p = n.
    Exact inputs are also run through box_closed_form and the two results compared."""
    result = PForm.zero(u.dim, u.degree)
    if u.degree < u.dim:
        result = result + partial_star(partial(u))
    if u.degree > 0:
        result = result + partial(partial_star(u))
    if u.exact and result != box_closed_form(u):
        logger.error(f"box of a degree-{u.degree} form disagrees with its closed form")
    return result


def box_closed_form(u: PForm) -> PForm:
    """sum_k z_k d u_J / d z_k + p u_J, i.e. z^alpha dz_J -> (|alpha| + p) z^alpha dz_J"""
    p = u.degree
    return u.map_components(lambda J, f: f.map_coefficients(lambda alpha, c: c * (sum(alpha) + p)))


def neumann(u: PForm) -> PForm:
    """Inverse of box: the degree-m part is divided by m + p"""
    if u.degree == 0:
        raise DegreeError("box is not invertible on functions (0 is an eigenvalue)")
    p = u.degree
    return u.map_components(
        lambda J, f: f.map_coefficients(lambda alpha, c: times_rational(c, 1, sum(alpha) + p)))


@dataclass
class SpectrumTable:
    """Eigenvalues m+p of box on (p,0)-forms with their multiplicities"""

    n: int
    p: int
    rows: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def eigenvalues(self) -> List[int]:
        """Eigenvalues repeated by multiplicity"""
        out: List[int] = []
        for value, multiplicity in self.rows:
            out.extend([value] * multiplicity)
        return out

    def to_json(self) -> Dict[str, Any]:
        return {"n": self.n, "p": self.p,
                "rows": [{"eigenvalue": v, "multiplicity": k} for v, k in self.rows]}

    def to_csv_rows(self) -> List[List[int]]:
        return [[v, k] for v, k in self.rows]


def _check_form_degree(n: int, p: int) -> None:
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if not 0 <= p <= n:
        raise DegreeError(f"form degree {p} outside 0..{n}")


def spectrum_table(n: int, p: int, m_max: int) -> SpectrumTable:
    _check_form_degree(n, p)
    if m_max < 0:
        raise ValueError(f"m_max must be >= 0, got {m_max}")
    rows = [(m + p, math.comb(n + m - 1, n - 1) * math.comb(n, p)) for m in range(m_max + 1)]
    return SpectrumTable(n, p, rows)


def assemble_box_matrix(n: int, p: int, cutoff: int) -> sparse.csr_matrix:
    """Finite section of box on span{phi_alpha dz_J : |alpha| <= cutoff}, orthonormal basis"""
    _check_form_degree(n, p)
    basis = form_basis(n, p, range(cutoff + 1))
    index = {element: i for i, element in enumerate(basis)}
    rows, cols, values = [], [], []
    for col, (J, alpha) in enumerate(basis):
        image = box(PForm.basis(n, J, alpha))
        for K, f in image.components.items():
            for beta, c in f.terms.items():
                # phi_alpha = z^alpha / sqrt(pi^n alpha!)
                scale = math.sqrt(multi_factorial(beta) / multi_factorial(alpha))
                rows.append(index[(K, beta)])
                cols.append(col)
                values.append(to_complex(c) * scale)
    size = len(basis)
    matrix = sparse.coo_matrix((values, (rows, cols)), shape=(size, size), dtype=complex).tocsr()
    logger.debug(f"Assembled box matrix n={n} p={p} cutoff={cutoff}: {size}x{size}, nnz={matrix.nnz}")
    return matrix


def box_eigenvalues(n: int, p: int, cutoff: int) -> np.ndarray:
    """Sorted eigenvalues of the assembled finite section"""
    return np.sort(hermitian_eigenvalues(assemble_box_matrix(n, p, cutoff)))


def kernel_basis_partial(n: int, p: int, max_degree: int) -> List[PForm]:
    """Exact basis of ker(partial) on (p,0)-forms of degree <= max_degree, one degree block at a time"""
    _check_form_degree(n, p)
    if p == n:
        raise DegreeError(f"partial is not defined on ({p},0)-forms in dimension {n}")
    kernel: List[PForm] = []
    for m in range(max_degree + 1):
        kernel.extend(kernel_of(partial, n, p, [m]))
    return kernel


def solve_partial(alpha: PForm) -> PForm:
    """Canonical solution partial*(N alpha) of du = alpha"""
    if alpha.degree == 0:
        raise DegreeError("solve_partial needs a form of degree >= 1")
    if alpha.degree < alpha.dim:
        residual = partial(alpha)
        if not residual.is_zero():
            size = math.sqrt(as_float(form_norm_sq(residual)))
            raise NotClosedError(f"right-hand side is not closed: |d alpha| = {size:.6g}",
                                 residual=residual, residual_norm=size)
    return partial_star(neumann(alpha))


@dataclass
class CanonicalSolution:
    """Solution of a canonical solve together with its certificates"""

    solution: PForm
    residual_norm: float
    orthogonality_defects: List[float]
    norm_ratio: float
    bound: float
    exact: bool = False
    window: Optional[int] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def max_defect(self) -> float:
        return max(self.orthogonality_defects, default=0.0)

    @property
    def within_bound(self) -> bool:
        return self.norm_ratio <= self.bound * (1 + 1e-12)

    def to_json(self) -> Dict[str, Any]:
        data = {
            "solution": self.solution.to_json(),
            "residual_norm": self.residual_norm,
            "orthogonality_defects": self.orthogonality_defects,
            "max_orthogonality_defect": self.max_defect,
            "norm_ratio": self.norm_ratio,
            "bound": self.bound,
            "within_bound": self.within_bound,
            "exact": self.exact,
        }
        if self.window is not None:
            data["window"] = self.window
        data.update(self.extra)
        return data


def _ratio(numerator: Scalar, denominator: Scalar) -> float:
    den = as_float(denominator)
    return math.sqrt(as_float(numerator) / den) if den else 0.0


def orthogonality_defects(u: PForm, kernel: List[PForm]) -> List[float]:
    return [abs(complex(value.to_complex() if isinstance(value, ExactScalar) else value))
            for value in (inner_forms(u, k) for k in kernel)]


def solve_partial_report(alpha: PForm, max_degree: Optional[int] = None) -> CanonicalSolution:
    """solve_partial plus residual, kernel orthogonality, norm ratio and the p^(-1/2) bound"""
    u0 = solve_partial(alpha)
    if max_degree is None:
        max_degree = u0.polynomial_degree or 0
    kernel = kernel_basis_partial(alpha.dim, alpha.degree - 1, max_degree)
    residual = partial(u0) - alpha
    report = CanonicalSolution(
        solution=u0,
        residual_norm=math.sqrt(as_float(form_norm_sq(residual))) if not residual.is_zero() else 0.0,
        orthogonality_defects=orthogonality_defects(u0, kernel),
        norm_ratio=_ratio(form_norm_sq(u0), form_norm_sq(alpha)),
        bound=alpha.degree ** -0.5,
        exact=alpha.exact,
        window=max_degree,
    )
    logger.debug(f"Canonical solution of degree {u0.polynomial_degree}, "
                 f"{len(kernel)} kernel checks, ratio {report.norm_ratio:.6g}")
    return report


def graph_norm_sq(f: Any) -> Scalar:
    """|f|^2 + sum_k |df/dz_k|^2 for a function (HoloPoly or 0-form)"""
    if isinstance(f, PForm):
        if f.degree != 0:
            raise DegreeError("graph_norm_sq takes a function")
        f = f.component(())
    total = norm_sq(f)
    for k in range(f.dim):
        total = total + norm_sq(f.derivative(k))
    return total


def basic_estimate_terms(u: PForm) -> Tuple[Scalar, Scalar, Scalar]:
    """(|du|^2 + |d*u|^2, sum'_J sum_k |d u_J/d z_k|^2, p |u|^2); the first equals the sum of the others"""
    zero = ExactScalar.zero(u.dim) if u.exact else 0j
    lhs = zero
    if u.degree < u.dim:
        lhs = lhs + form_norm_sq(partial(u))
    if u.degree > 0:
        lhs = lhs + form_norm_sq(partial_star(u))
    derivative_term = zero
    for f in u.components.values():
        for k in range(u.dim):
            derivative_term = derivative_term + norm_sq(f.derivative(k))
    return lhs, derivative_term, form_norm_sq(u) * u.degree


def tail_bound(f: HoloPoly, cutoff: int) -> Tuple[float, float]:
    """(|f - Pi_N f|^2, graph_norm_sq(f) / (N + 2)) with Pi_N the projection on degree <= N"""
    tail = f - f.truncate(cutoff)
    return as_float(norm_sq(tail)), as_float(graph_norm_sq(f)) / (cutoff + 2)
