"""
Multi-indices and sparse polynomials.
HoloPoly is a polynomial in z, MixedPoly a polynomial in z and its conjugate.
Coefficients are exact Gaussian rationals or, on the float path, complex.
"""

import math
from functools import lru_cache
from types import MappingProxyType
from typing import Any, Callable, Dict, Iterator, List, Mapping, Optional, Tuple

from .errors import DimensionMismatchError
from .scalars import (
    Coefficient, add, coerce, conj, format_gauss, format_rational, is_exact, mul,
    qqi, rational, to_complex,
)

MultiIndex = Tuple[int, ...]


@lru_cache(maxsize=None)
def factorial(k: int) -> int:
    return math.factorial(k)


def total_degree(alpha: MultiIndex) -> int:
    return sum(alpha)


def multi_factorial(alpha: MultiIndex) -> int:
    """alpha! = alpha_1! ... alpha_n!"""
    result = 1
    for a in alpha:
        result *= factorial(a)
    return result


def falling(gamma: MultiIndex, b: MultiIndex) -> int:
    """gamma!/(gamma-b)!, or 0 when b exceeds gamma in some component"""
    result = 1
    for g, k in zip(gamma, b):
        if k > g:
            return 0
        result *= factorial(g) // factorial(g - k)
    return result


def unit(n: int, j: int) -> MultiIndex:
    return tuple(1 if i == j else 0 for i in range(n))


def zero_index(n: int) -> MultiIndex:
    return (0,) * n


def add_index(alpha: MultiIndex, beta: MultiIndex) -> MultiIndex:
    return tuple(a + b for a, b in zip(alpha, beta))


def sub_index(alpha: MultiIndex, beta: MultiIndex) -> Optional[MultiIndex]:
    """alpha - beta, or None if some component would be negative"""
    diff = tuple(a - b for a, b in zip(alpha, beta))
    if any(d < 0 for d in diff):
        return None
    return diff


def graded_key(alpha: MultiIndex) -> Tuple[int, Tuple[int, ...]]:
    """Sort key for graded lexicographic order (degree first, then lex descending)"""
    return (sum(alpha), tuple(-a for a in alpha))


@lru_cache(maxsize=None)
def _enumerate_degree(n: int, m: int) -> Tuple[MultiIndex, ...]:
    if n == 1:
        return ((m,),)
    out = []
    for first in range(m, -1, -1):
        for rest in _enumerate_degree(n - 1, m - first):
            out.append((first,) + rest)
    return tuple(out)


def enumerate_degree(n: int, m: int) -> List[MultiIndex]:
    """All multi-indices of length n and total degree m, graded lexicographic order"""
    if n < 1 or m < 0:
        raise ValueError(f"enumerate_degree needs n >= 1 and m >= 0 (got n={n}, m={m})")
    return list(_enumerate_degree(n, m))


def enumerate_up_to(n: int, max_degree: int) -> List[MultiIndex]:
    out: List[MultiIndex] = []
    for m in range(max_degree + 1):
        out.extend(_enumerate_degree(n, m))
    return out


def _check_index(alpha: Any, n: int) -> MultiIndex:
    key = tuple(int(a) for a in alpha)
    if len(key) != n:
        raise DimensionMismatchError(len(key), n, "multi-index and polynomial")
    if any(a < 0 for a in key):
        raise ValueError(f"negative exponent in multi-index {key}")
    return key


def _monomial_text(alpha: MultiIndex, letter: str) -> List[str]:
    parts = []
    for j, a in enumerate(alpha):
        if a == 1:
            parts.append(f"{letter}{j + 1}")
        elif a > 1:
            parts.append(f"{letter}{j + 1}^{a}")
    return parts


def _coefficient_text(c: Coefficient) -> str:
    if is_exact(c):
        return format_gauss(c)
    return repr(complex(c))


class HoloPoly:
    """Holomorphic polynomial: sparse map multi-index -> coefficient"""

    __slots__ = ("_dim", "_terms")

    def __init__(self, dim: int, terms: Optional[Mapping[Any, Any]] = None):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        clean: Dict[MultiIndex, Coefficient] = {}
        for alpha, c in (terms or {}).items():
            key = _check_index(alpha, dim)
            c = coerce(c)
            if c:
                clean[key] = c
        self._dim = dim
        self._terms = MappingProxyType(clean)

    @classmethod
    def zero(cls, dim: int) -> 'HoloPoly':
        return cls(dim)

    @classmethod
    def constant(cls, dim: int, c: Any = 1) -> 'HoloPoly':
        return cls(dim, {zero_index(dim): c})

    @classmethod
    def monomial(cls, dim: int, alpha: MultiIndex, c: Any = 1) -> 'HoloPoly':
        return cls(dim, {alpha: c})

    @classmethod
    def variable(cls, dim: int, j: int) -> 'HoloPoly':
        """z_{j+1} (0-based j)"""
        return cls(dim, {unit(dim, j): 1})

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def terms(self) -> Mapping[MultiIndex, Coefficient]:
        return self._terms

    @property
    def degree(self) -> Optional[int]:
        """Maximal total degree, None for the zero polynomial"""
        if not self._terms:
            return None
        return max(sum(alpha) for alpha in self._terms)

    @property
    def exact(self) -> bool:
        return all(is_exact(c) for c in self._terms.values())

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, alpha: MultiIndex) -> Coefficient:
        return self._terms.get(tuple(alpha), qqi(0))

    def sorted_terms(self) -> List[Tuple[MultiIndex, Coefficient]]:
        return sorted(self._terms.items(), key=lambda item: graded_key(item[0]))

    def _check(self, other: 'HoloPoly') -> None:
        if self._dim != other._dim:
            raise DimensionMismatchError(self._dim, other._dim, "polynomials")

    def __add__(self, other: 'HoloPoly') -> 'HoloPoly':
        if not isinstance(other, HoloPoly):
            return NotImplemented
        self._check(other)
        out = dict(self._terms)
        for alpha, c in other._terms.items():
            out[alpha] = add(out[alpha], c) if alpha in out else c
        return HoloPoly(self._dim, out)

    def __neg__(self) -> 'HoloPoly':
        return HoloPoly(self._dim, {alpha: -c for alpha, c in self._terms.items()})

    def __sub__(self, other: 'HoloPoly') -> 'HoloPoly':
        if not isinstance(other, HoloPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: Any) -> 'HoloPoly':
        if isinstance(other, HoloPoly):
            self._check(other)
            out: Dict[MultiIndex, Coefficient] = {}
            for alpha, c in self._terms.items():
                for beta, d in other._terms.items():
                    key = add_index(alpha, beta)
                    prod = mul(c, d)
                    out[key] = add(out[key], prod) if key in out else prod
            return HoloPoly(self._dim, out)
        if isinstance(other, (MixedPoly,)):
            return NotImplemented
        return self.scale(other)

    def __rmul__(self, other: Any) -> 'HoloPoly':
        return self.scale(other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HoloPoly):
            return NotImplemented
        return self._dim == other._dim and dict(self._terms) == dict(other._terms)

    def __hash__(self) -> int:
        return hash((self._dim, frozenset(self._terms.items())))

    def scale(self, c: Any) -> 'HoloPoly':
        c = coerce(c)
        return HoloPoly(self._dim, {alpha: mul(d, c) for alpha, d in self._terms.items()})

    def map_coefficients(self, fn: Callable[[MultiIndex, Coefficient], Any]) -> 'HoloPoly':
        return HoloPoly(self._dim, {alpha: fn(alpha, c) for alpha, c in self._terms.items()})

    def derivative(self, j: int) -> 'HoloPoly':
        """d/dz_{j+1}"""
        out = {}
        for alpha, c in self._terms.items():
            if alpha[j]:
                lowered = alpha[:j] + (alpha[j] - 1,) + alpha[j + 1:]
                out[lowered] = c * alpha[j]
        return HoloPoly(self._dim, out)

    def shift(self, a: MultiIndex) -> 'HoloPoly':
        """Multiply by the monomial z^a"""
        return HoloPoly(self._dim, {add_index(alpha, a): c for alpha, c in self._terms.items()})

    def times_variable(self, j: int) -> 'HoloPoly':
        return self.shift(unit(self._dim, j))

    def homogeneous_part(self, m: int) -> 'HoloPoly':
        return HoloPoly(self._dim, {a: c for a, c in self._terms.items() if sum(a) == m})

    def homogeneous_parts(self) -> Dict[int, 'HoloPoly']:
        grouped: Dict[int, Dict[MultiIndex, Coefficient]] = {}
        for alpha, c in self._terms.items():
            grouped.setdefault(sum(alpha), {})[alpha] = c
        return {m: HoloPoly(self._dim, grouped[m]) for m in sorted(grouped)}

    def truncate(self, max_degree: int) -> 'HoloPoly':
        """Projection onto polynomials of degree <= max_degree"""
        return HoloPoly(self._dim, {a: c for a, c in self._terms.items() if sum(a) <= max_degree})

    def conjugate_coefficients(self) -> 'HoloPoly':
        return HoloPoly(self._dim, {alpha: conj(c) for alpha, c in self._terms.items()})

    def to_float(self) -> 'HoloPoly':
        return HoloPoly(self._dim, {alpha: to_complex(c) for alpha, c in self._terms.items()})

    def to_json(self) -> Dict[str, Any]:
        return {"n": self._dim, "terms": [_term_json(alpha, None, c) for alpha, c in self.sorted_terms()]}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> 'HoloPoly':
        dim = int(data["n"])
        terms: Dict[MultiIndex, Coefficient] = {}
        for entry in data.get("terms", []):
            if entry.get("zbar") and any(entry["zbar"]):
                raise ValueError("holomorphic polynomial cannot carry zbar exponents")
            key = _check_index(entry["z"], dim)
            c = _coefficient_from_json(entry)
            terms[key] = add(terms[key], c) if key in terms else c
        return cls(dim, terms)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for alpha, c in self.sorted_terms():
            mono = "*".join(_monomial_text(alpha, "z"))
            coeff = _coefficient_text(c)
            pieces.append(f"{coeff}*{mono}" if mono else coeff)
        return " + ".join(pieces)

    def __repr__(self) -> str:
        return f"HoloPoly(n={self._dim}, {self})"


MixedKey = Tuple[MultiIndex, MultiIndex]


class MixedPoly:
    """Polynomial in z and conj(z): sparse map (alpha, beta) -> coefficient of z^alpha zbar^beta"""

    __slots__ = ("_dim", "_terms")

    def __init__(self, dim: int, terms: Optional[Mapping[Any, Any]] = None):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        clean: Dict[MixedKey, Coefficient] = {}
        for (alpha, beta), c in (terms or {}).items():
            key = (_check_index(alpha, dim), _check_index(beta, dim))
            c = coerce(c)
            if c:
                clean[key] = c
        self._dim = dim
        self._terms = MappingProxyType(clean)

    @classmethod
    def from_holo(cls, f: HoloPoly) -> 'MixedPoly':
        zero = zero_index(f.dim)
        return cls(f.dim, {(alpha, zero): c for alpha, c in f.terms.items()})

    @classmethod
    def from_antiholo(cls, f: HoloPoly) -> 'MixedPoly':
        """conj(f) as a polynomial in zbar"""
        zero = zero_index(f.dim)
        return cls(f.dim, {(zero, alpha): conj(c) for alpha, c in f.terms.items()})

    @classmethod
    def monomial(cls, dim: int, alpha: MultiIndex, beta: MultiIndex, c: Any = 1) -> 'MixedPoly':
        return cls(dim, {(alpha, beta): c})

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def terms(self) -> Mapping[MixedKey, Coefficient]:
        return self._terms

    @property
    def exact(self) -> bool:
        return all(is_exact(c) for c in self._terms.values())

    def is_zero(self) -> bool:
        return not self._terms

    def is_holomorphic(self) -> bool:
        return all(not any(beta) for _, beta in self._terms)

    def holomorphic_part(self) -> HoloPoly:
        return HoloPoly(self._dim, {a: c for (a, b), c in self._terms.items() if not any(b)})

    def _check(self, other: 'MixedPoly') -> None:
        if self._dim != other._dim:
            raise DimensionMismatchError(self._dim, other._dim, "polynomials")

    def __add__(self, other: 'MixedPoly') -> 'MixedPoly':
        if isinstance(other, HoloPoly):
            other = MixedPoly.from_holo(other)
        if not isinstance(other, MixedPoly):
            return NotImplemented
        self._check(other)
        out = dict(self._terms)
        for key, c in other._terms.items():
            out[key] = add(out[key], c) if key in out else c
        return MixedPoly(self._dim, out)

    __radd__ = __add__

    def __neg__(self) -> 'MixedPoly':
        return MixedPoly(self._dim, {key: -c for key, c in self._terms.items()})

    def __sub__(self, other: 'MixedPoly') -> 'MixedPoly':
        if isinstance(other, HoloPoly):
            other = MixedPoly.from_holo(other)
        return self + (-other)

    def __mul__(self, other: Any) -> 'MixedPoly':
        if isinstance(other, HoloPoly):
            other = MixedPoly.from_holo(other)
        if isinstance(other, MixedPoly):
            self._check(other)
            out: Dict[MixedKey, Coefficient] = {}
            for (a1, b1), c in self._terms.items():
                for (a2, b2), d in other._terms.items():
                    key = (add_index(a1, a2), add_index(b1, b2))
                    prod = mul(c, d)
                    out[key] = add(out[key], prod) if key in out else prod
            return MixedPoly(self._dim, out)
        return self.scale(other)

    def __rmul__(self, other: Any) -> 'MixedPoly':
        if isinstance(other, HoloPoly):
            return MixedPoly.from_holo(other) * self
        return self.scale(other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MixedPoly):
            return NotImplemented
        return self._dim == other._dim and dict(self._terms) == dict(other._terms)

    def __hash__(self) -> int:
        return hash((self._dim, frozenset(self._terms.items())))

    def scale(self, c: Any) -> 'MixedPoly':
        c = coerce(c)
        return MixedPoly(self._dim, {key: mul(d, c) for key, d in self._terms.items()})

    def times_zbar(self, j: int) -> 'MixedPoly':
        e = unit(self._dim, j)
        return MixedPoly(self._dim, {(a, add_index(b, e)): c for (a, b), c in self._terms.items()})

    def conjugate(self) -> 'MixedPoly':
        """Complex conjugate as a function: swaps z and zbar and conjugates coefficients"""
        return MixedPoly(self._dim, {(b, a): conj(c) for (a, b), c in self._terms.items()})

    def to_float(self) -> 'MixedPoly':
        return MixedPoly(self._dim, {key: to_complex(c) for key, c in self._terms.items()})

    def sorted_terms(self) -> List[Tuple[MixedKey, Coefficient]]:
        return sorted(self._terms.items(),
                      key=lambda item: (graded_key(item[0][0]), graded_key(item[0][1])))

    def to_json(self) -> Dict[str, Any]:
        return {"n": self._dim,
                "terms": [_term_json(a, b, c) for (a, b), c in self.sorted_terms()]}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> 'MixedPoly':
        dim = int(data["n"])
        terms: Dict[MixedKey, Coefficient] = {}
        for entry in data.get("terms", []):
            alpha = _check_index(entry["z"], dim)
            beta = _check_index(entry.get("zbar") or zero_index(dim), dim)
            c = _coefficient_from_json(entry)
            key = (alpha, beta)
            terms[key] = add(terms[key], c) if key in terms else c
        return cls(dim, terms)

    def __iter__(self) -> Iterator[Tuple[MixedKey, Coefficient]]:
        return iter(self._terms.items())

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for (alpha, beta), c in self.sorted_terms():
            mono = "*".join(_monomial_text(alpha, "z") + _monomial_text(beta, "zbar"))
            coeff = _coefficient_text(c)
            pieces.append(f"{coeff}*{mono}" if mono else coeff)
        return " + ".join(pieces)

    def __repr__(self) -> str:
        return f"MixedPoly(n={self._dim}, {self})"


def _term_json(alpha: MultiIndex, beta: Optional[MultiIndex], c: Coefficient) -> Dict[str, Any]:
    entry: Dict[str, Any] = {"z": list(alpha)}
    if beta is not None:
        entry["zbar"] = list(beta)
    if is_exact(c):
        entry["re"] = format_rational(c.x)
        entry["im"] = format_rational(c.y)
    else:
        c = complex(c)
        entry["re"] = c.real
        entry["im"] = c.imag
    return entry


def _coefficient_from_json(entry: Mapping[str, Any]) -> Coefficient:
    re, im = entry.get("re", "0"), entry.get("im", "0")
    if isinstance(re, float) or isinstance(im, float):
        return complex(float(re), float(im))
    return qqi(rational(re), rational(im))
