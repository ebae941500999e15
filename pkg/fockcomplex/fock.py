"""
Gaussian Fock space calculus on polynomials.
Inner products, orthonormal coefficients, the reproducing kernel, the Bergman
projection of mixed polynomials, ladder operators, the Volterra primitive and
the two witness series used to show unboundedness of the ladder operators.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from .errors import DimensionMismatchError
from .polynomials import (
    HoloPoly, MixedPoly, MultiIndex, enumerate_degree, falling, multi_factorial, sub_index,
)
from .scalars import ExactScalar, add, conj, qqi, times_rational, to_complex

logger = logging.getLogger(__name__)

Scalar = Union[ExactScalar, complex]


def monomial_norm_sq(alpha: MultiIndex) -> ExactScalar:
    """||z^alpha||^2 = pi^n alpha!"""
    return ExactScalar(qqi(multi_factorial(alpha)), len(alpha))


def _check_same_dim(f, g) -> None:
    if f.dim != g.dim:
        raise DimensionMismatchError(f.dim, g.dim, "polynomials")


def inner_gaussian(f: HoloPoly, g: HoloPoly) -> Scalar:
    """(f, g) against e^{-|z|^2}; exact ExactScalar for exact inputs, complex otherwise"""
    _check_same_dim(f, g)
    small, large = (f, g) if len(f.terms) <= len(g.terms) else (g, f)
    if f.exact and g.exact:
        total = qqi(0)
        for alpha in small.terms:
            if alpha in large.terms:
                total += f.terms[alpha] * conj(g.terms[alpha]) * multi_factorial(alpha)
        return ExactScalar(total, f.dim)
    total = 0j
    for alpha in small.terms:
        if alpha in large.terms:
            c = to_complex(f.terms[alpha]) * to_complex(g.terms[alpha]).conjugate()
            total += c * multi_factorial(alpha)
    return total * math.pi ** f.dim


def norm_sq(f: HoloPoly) -> Scalar:
    return inner_gaussian(f, f)


def as_float(value: Scalar) -> float:
    """Real part of an inner-product value as a float"""
    if isinstance(value, ExactScalar):
        return value.to_complex().real
    return complex(value).real


def to_orthonormal(f: HoloPoly) -> Dict[MultiIndex, complex]:
    """Coefficients of f in the orthonormal basis z^alpha / sqrt(pi^n alpha!)"""
    scale = math.pi ** f.dim
    return {alpha: to_complex(c) * math.sqrt(scale * multi_factorial(alpha))
            for alpha, c in f.terms.items()}


def from_orthonormal(dim: int, coefficients: Dict[MultiIndex, complex]) -> HoloPoly:
    """Float polynomial sum_alpha c_alpha phi_alpha"""
    scale = math.pi ** dim
    return HoloPoly(dim, {alpha: complex(c) / math.sqrt(scale * multi_factorial(alpha))
                          for alpha, c in coefficients.items()})


def evaluate(f: HoloPoly, z: Sequence[complex]) -> complex:
    """Horner evaluation in the last variable, recursing over the others"""
    point = np.asarray(z, dtype=complex)
    if point.shape != (f.dim,):
        raise DimensionMismatchError(point.size, f.dim, "point and polynomial")
    return _horner(list(f.terms.items()), point, f.dim - 1)


def _horner(terms, point: np.ndarray, var: int) -> complex:
    if var < 0:
        return sum((to_complex(c) for _, c in terms), 0j)
    by_power: Dict[int, list] = {}
    for alpha, c in terms:
        by_power.setdefault(alpha[var], []).append((alpha, c))
    if not by_power:
        return 0j
    acc = 0j
    for power in range(max(by_power), -1, -1):
        acc = acc * point[var]
        if power in by_power:
            acc += _horner(by_power[power], point, var - 1)
    return complex(acc)


def kernel_truncated(z: Sequence[complex], w: Sequence[complex], cutoff: int) -> complex:
    """pi^{-n} sum_{k<=cutoff} (z . conj(w))^k / k!"""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if z.shape != w.shape:
        raise DimensionMismatchError(z.size, w.size, "kernel arguments")
    s = complex(np.vdot(w, z))
    total, term = 0j, 1 + 0j
    for k in range(cutoff + 1):
        if k:
            term *= s / k
        total += term
    return total / math.pi ** z.size


def kernel_closed(z: Sequence[complex], w: Sequence[complex]) -> complex:
    """pi^{-n} exp(z . conj(w))"""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return complex(np.exp(np.vdot(w, z))) / math.pi ** z.size


def reproduce(f: HoloPoly, z: Sequence[complex]) -> complex:
    """(f, K(., z)) with the kernel expanded in monomials up to degree(f)"""
    point = np.asarray(z, dtype=complex)
    if point.shape != (f.dim,):
        raise DimensionMismatchError(point.size, f.dim, "point and polynomial")
    if f.is_zero():
        return 0j
    scale = math.pi ** f.dim
    kernel: Dict[MultiIndex, complex] = {}
    for m in range(f.degree + 1):
        for alpha in enumerate_degree(f.dim, m):
            zbar_alpha = complex(np.prod(np.conj(point) ** np.array(alpha)))
            kernel[alpha] = zbar_alpha / (multi_factorial(alpha) * scale)
    total = 0j
    for alpha, c in f.terms.items():
        total += to_complex(c) * kernel[alpha].conjugate() * multi_factorial(alpha) * scale
    return total


def pointwise_bound(f: HoloPoly, z: Sequence[complex]) -> Tuple[float, float]:
    """(|f(z)|^2, K(z,z) ||f||^2): Cauchy-Schwarz against the kernel"""
    value = evaluate(f, z)
    diagonal = kernel_closed(z, z).real
    return abs(value) ** 2, diagonal * as_float(norm_sq(f))


def bergman_project_gaussian(m: MixedPoly) -> HoloPoly:
    """Orthogonal projection of z^alpha zbar^beta is alpha!/(alpha-beta)! z^(alpha-beta)"""
    out: Dict[MultiIndex, object] = {}
    for (alpha, beta), c in m.terms.items():
        gamma = sub_index(alpha, beta)
        if gamma is None:
            continue
        value = c * falling(alpha, beta)
        out[gamma] = add(out[gamma], value) if gamma in out else value
    return HoloPoly(m.dim, out)


def annihilate(f: HoloPoly, j: int) -> HoloPoly:
    """a_j f = df/dz_j"""
    return f.derivative(j)


def create(f: HoloPoly, j: int) -> HoloPoly:
    """a_j* f = z_j f"""
    return f.times_variable(j)


def ladder_energy_identity(f: HoloPoly) -> Tuple[ExactScalar, ExactScalar]:
    """(||a f||^2 + ||a* f||^2, 2||a f||^2 + ||f||^2) for n = 1, exact"""
    if f.dim != 1:
        raise DimensionMismatchError(f.dim, 1, "ladder identity")
    af = norm_sq(annihilate(f, 0))
    lhs = af + norm_sq(create(f, 0))
    rhs = af + af + norm_sq(f)
    return lhs, rhs


def annihilation_sparse(dimension: int) -> sparse.csr_matrix:
    """Matrix of a on span{phi_0, ..., phi_{dimension-1}}"""
    return sparse.diags(np.sqrt(np.arange(1, dimension, dtype=float)), 1,
                        shape=(dimension, dimension), format="csr")


def creation_sparse(dimension: int) -> sparse.csr_matrix:
    return annihilation_sparse(dimension).transpose().tocsr()


def volterra_primitive(f: HoloPoly) -> HoloPoly:
    """Primitive with zero constant term; T(phi_k) = phi_{k+1}/sqrt(k+1)"""
    if f.dim != 1:
        raise DimensionMismatchError(f.dim, 1, "Volterra primitive")
    return HoloPoly(1, {(k + 1,): times_rational(c, 1, k + 1) for (k,), c in f.terms.items()})


def volterra_tail_norm(start: int, span: int = 64) -> float:
    """Operator 2-norm of T restricted to span{phi_k : start <= k < start+span}"""
    matrix = np.zeros((span + 1, span))
    for col, k in enumerate(range(start, start + span)):
        phi_k = from_orthonormal(1, {(k,): 1.0})
        image = to_orthonormal(volterra_primitive(phi_k))
        for (row_k,), value in image.items():
            matrix[row_k - start, col] = value.real
    norm = float(np.linalg.norm(matrix, 2))
    logger.debug(f"Volterra tail norm from k={start} over {span} modes: {norm:.17g}")
    return norm


@dataclass(frozen=True)
class WitnessSeries:
    """F = sum_{k>=2} phi_k/sqrt(k(k-1)) or G = sum_{k>=0} phi_k/(k+1)"""

    kind: str

    def __post_init__(self):
        if self.kind not in ("F", "G"):
            raise ValueError(f"unknown witness series {self.kind!r}, expected 'F' or 'G'")

    def coefficient(self, k: int) -> float:
        if self.kind == "F":
            return 1.0 / math.sqrt(k * (k - 1)) if k >= 2 else 0.0
        return 1.0 / (k + 1)

    def coefficients(self, cutoff: int) -> np.ndarray:
        return np.array([self.coefficient(k) for k in range(cutoff + 1)])


def witness_polynomial(series: WitnessSeries, cutoff: int) -> HoloPoly:
    """Partial sum up to phi_cutoff as a float polynomial in one variable"""
    coeffs = series.coefficients(cutoff)
    return from_orthonormal(1, {(k,): c for k, c in enumerate(coeffs) if c})


def witness_partial_norms(series: WitnessSeries, cutoff: int) -> Tuple[float, float]:
    """(||S_N||^2, ||a S_N||^2) for F, (||S_N||^2, ||a* S_N||^2) for G"""
    if cutoff < 2:
        raise ValueError(f"cutoff must be >= 2, got {cutoff}")
    dimension = cutoff + 2
    vector = np.zeros(dimension)
    vector[:cutoff + 1] = series.coefficients(cutoff)
    ladder = annihilation_sparse(dimension) if series.kind == "F" else creation_sparse(dimension)
    image = ladder @ vector
    return float(np.sum(vector ** 2)), float(np.sum(image ** 2))
