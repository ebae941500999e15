"""
(p,0)-forms with polynomial coefficients.
Components are keyed by strictly increasing 0-based index tuples J; the text
and JSON forms use 1-based indices ("1,2" for dz_1 ^ dz_2).
"""

import itertools
import logging
from types import MappingProxyType
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Tuple

from .errors import DegreeError, DimensionMismatchError
from .fock import Scalar, inner_gaussian
from .linalg import nullspace, sparse_columns_to_rows
from .polynomials import HoloPoly, MultiIndex, enumerate_degree
from .scalars import ExactScalar

logger = logging.getLogger(__name__)

FormIndex = Tuple[int, ...]
BasisElement = Tuple[FormIndex, MultiIndex]


def increasing_indices(n: int, p: int) -> List[FormIndex]:
    return list(itertools.combinations(range(n), p))


def wedge_sign(j: int, J: FormIndex) -> Tuple[int, Optional[FormIndex]]:
    """dz_j ^ dz_J = sign * dz_M with M increasing; sign 0 when j is already in J"""
    if j in J:
        return 0, None
    before = sum(1 for i in J if i < j)
    return (-1 if before % 2 else 1), tuple(sorted(J + (j,)))


def parse_form_index(key: str) -> FormIndex:
    key = key.strip()
    if not key:
        return ()
    return tuple(int(part) - 1 for part in key.split(","))


def format_form_index(J: FormIndex) -> str:
    return ",".join(str(j + 1) for j in J)


class PForm:
    """sum' u_J dz_J over increasing J of length p"""

    __slots__ = ("_dim", "_degree", "_components")

    def __init__(self, dim: int, degree: int, components: Optional[Mapping[Any, HoloPoly]] = None):
        if not 0 <= degree <= dim:
            raise DegreeError(f"form degree {degree} outside 0..{dim}")
        clean: Dict[FormIndex, HoloPoly] = {}
        for J, f in (components or {}).items():
            key = tuple(int(j) for j in J)
            if len(key) != degree or list(key) != sorted(set(key)):
                raise ValueError(f"invalid increasing index {key} for a ({degree},0)-form")
            if key and (key[0] < 0 or key[-1] >= dim):
                raise ValueError(f"index {key} out of range for dimension {dim}")
            if f.dim != dim:
                raise DimensionMismatchError(f.dim, dim, "component and form")
            if not f.is_zero():
                clean[key] = f
        self._dim = dim
        self._degree = degree
        self._components = MappingProxyType(clean)

    @classmethod
    def zero(cls, dim: int, degree: int) -> 'PForm':
        return cls(dim, degree)

    @classmethod
    def function(cls, f: HoloPoly) -> 'PForm':
        """A polynomial seen as a 0-form"""
        return cls(f.dim, 0, {(): f})

    @classmethod
    def basis(cls, dim: int, J: FormIndex, alpha: MultiIndex, c: Any = 1) -> 'PForm':
        return cls(dim, len(J), {J: HoloPoly.monomial(dim, alpha, c)})

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def components(self) -> Mapping[FormIndex, HoloPoly]:
        return self._components

    @property
    def exact(self) -> bool:
        return all(f.exact for f in self._components.values())

    @property
    def polynomial_degree(self) -> Optional[int]:
        degrees = [f.degree for f in self._components.values()]
        return max(degrees) if degrees else None

    def is_zero(self) -> bool:
        return not self._components

    def component(self, J: FormIndex) -> HoloPoly:
        return self._components.get(tuple(J), HoloPoly.zero(self._dim))

    def signed_component(self, j: int, K: FormIndex) -> HoloPoly:
        """u_{jK}: antisymmetric extension of the coefficients"""
        sign, J = wedge_sign(j, K)
        if not sign:
            return HoloPoly.zero(self._dim)
        f = self.component(J)
        return f if sign > 0 else -f

    def _check(self, other: 'PForm') -> None:
        if self._dim != other._dim:
            raise DimensionMismatchError(self._dim, other._dim, "forms")
        if self._degree != other._degree:
            raise DegreeError(f"cannot combine forms of degree {self._degree} and {other._degree}")

    def __add__(self, other: 'PForm') -> 'PForm':
        if not isinstance(other, PForm):
            return NotImplemented
        self._check(other)
        out = dict(self._components)
        for J, f in other._components.items():
            out[J] = out[J] + f if J in out else f
        return PForm(self._dim, self._degree, out)

    def __neg__(self) -> 'PForm':
        return self.map_components(lambda J, f: -f)

    def __sub__(self, other: 'PForm') -> 'PForm':
        if not isinstance(other, PForm):
            return NotImplemented
        return self + (-other)

    def scale(self, c: Any) -> 'PForm':
        return self.map_components(lambda J, f: f.scale(c))

    def __mul__(self, c: Any) -> 'PForm':
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PForm):
            return NotImplemented
        return (self._dim, self._degree) == (other._dim, other._degree) and \
            dict(self._components) == dict(other._components)

    def __hash__(self) -> int:
        return hash((self._dim, self._degree, frozenset(self._components.items())))

    def map_components(self, fn: Callable[[FormIndex, HoloPoly], HoloPoly]) -> 'PForm':
        return PForm(self._dim, self._degree, {J: fn(J, f) for J, f in self._components.items()})

    def truncate(self, max_degree: int) -> 'PForm':
        return self.map_components(lambda J, f: f.truncate(max_degree))

    def homogeneous_parts(self) -> Dict[int, 'PForm']:
        grouped: Dict[int, Dict[FormIndex, HoloPoly]] = {}
        for J, f in self._components.items():
            for m, part in f.homogeneous_parts().items():
                grouped.setdefault(m, {})[J] = part
        return {m: PForm(self._dim, self._degree, grouped[m]) for m in sorted(grouped)}

    def to_float(self) -> 'PForm':
        return self.map_components(lambda J, f: f.to_float())

    def to_json(self) -> Dict[str, Any]:
        return {"n": self._dim, "p": self._degree,
                "components": {format_form_index(J): self._components[J].to_json()
                               for J in sorted(self._components)}}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> 'PForm':
        dim, degree = int(data["n"]), int(data["p"])
        components = {}
        for key, poly in data.get("components", {}).items():
            f = HoloPoly.from_json(poly)
            J = parse_form_index(key)
            components[J] = components[J] + f if J in components else f
        return cls(dim, degree, components)

    def __str__(self) -> str:
        if not self._components:
            return "0"
        parts = []
        for J in sorted(self._components):
            wedge = "^".join(f"dz{j + 1}" for j in J)
            body = f"({self._components[J]})"
            parts.append(f"{body}*{wedge}" if wedge else body)
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"PForm(n={self._dim}, p={self._degree}, {self})"


def inner_forms(u: PForm, v: PForm) -> Scalar:
    """sum'_J (u_J, v_J) in the Gaussian Fock space"""
    if u.dim != v.dim:
        raise DimensionMismatchError(u.dim, v.dim, "forms")
    if u.degree != v.degree:
        raise DegreeError(f"cannot pair forms of degree {u.degree} and {v.degree}")
    exact = u.exact and v.exact
    total: Scalar = ExactScalar.zero(u.dim) if exact else 0j
    for J, f in u.components.items():
        if J in v.components:
            total = total + inner_gaussian(f, v.components[J])
    return total


def form_norm_sq(u: PForm) -> Scalar:
    return inner_forms(u, u)


def form_basis(n: int, p: int, degrees: Iterable[int]) -> List[BasisElement]:
    """Monomial basis z^alpha dz_J ordered by degree, then J, then alpha"""
    basis: List[BasisElement] = []
    for m in degrees:
        for J in increasing_indices(n, p):
            for alpha in enumerate_degree(n, m):
                basis.append((J, alpha))
    return basis


def coordinates(u: PForm, index: Mapping[BasisElement, int]) -> Dict[int, Any]:
    """Monomial coefficients of u keyed by position in a basis"""
    out: Dict[int, Any] = {}
    for J, f in u.components.items():
        for alpha, c in f.terms.items():
            out[index[(J, alpha)]] = c
    return out


def kernel_of(op: Callable[[PForm], PForm], n: int, p: int,
              degrees: Iterable[int]) -> List[PForm]:
    """Exact basis of the kernel of a linear form operator on the span of z^alpha dz_J, |alpha| in degrees"""
    basis = form_basis(n, p, degrees)
    if not basis:
        return []
    columns = []
    for J, alpha in basis:
        image = op(PForm.basis(n, J, alpha))
        columns.append({(K, beta): c for K, f in image.components.items() for beta, c in f.terms.items()})
    vectors = nullspace(sparse_columns_to_rows(columns), len(basis))
    kernel = []
    for vector in vectors:
        components: Dict[FormIndex, Dict[MultiIndex, Any]] = {}
        for (J, alpha), c in zip(basis, vector):
            if c:
                components.setdefault(J, {})[alpha] = c
        kernel.append(PForm(n, p, {J: HoloPoly(n, terms) for J, terms in components.items()}))
    logger.debug(f"Kernel on {len(basis)} basis forms (n={n}, p={p}) has dimension {len(kernel)}")
    return kernel
