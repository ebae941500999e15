"""
Normal-ordered differential operators with polynomial coefficients.
A WeylOperator is a finite sum c * z^a d^b with every multiplication to the
left of every derivative. Composition re-orders with d_j z_j = z_j d_j + 1,
so two operators are equal exactly when their term maps are equal.
"""

import itertools
import logging
import math
import re
from types import MappingProxyType
from typing import Any, Dict, List, Mapping, Optional, Tuple

from .errors import DimensionMismatchError, NonConstantCoefficientError, WeylSyntaxError
from .polynomials import (
    HoloPoly, MultiIndex, add_index, falling, graded_key, sub_index, unit, zero_index,
)
from .scalars import (
    Coefficient, add, coerce, conj, format_gauss, is_exact, mul, qqi, rational,
)

logger = logging.getLogger(__name__)

WeylKey = Tuple[MultiIndex, MultiIndex]


class WeylOperator:
    """Sum of c * z^a d^b in normal order; exact Gaussian-rational coefficients"""

    __slots__ = ("_dim", "_terms")

    def __init__(self, dim: int, terms: Optional[Mapping[Any, Any]] = None):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        clean: Dict[WeylKey, Coefficient] = {}
        for (a, b), c in (terms or {}).items():
            a, b = tuple(int(x) for x in a), tuple(int(x) for x in b)
            if len(a) != dim or len(b) != dim:
                raise DimensionMismatchError(max(len(a), len(b)), dim, "operator term")
            if min(a + b) < 0:
                raise ValueError(f"negative exponent in operator term {(a, b)}")
            c = coerce(c)
            if not is_exact(c):
                raise TypeError("Weyl operators carry exact coefficients")
            if c:
                clean[(a, b)] = c
        self._dim = dim
        self._terms = MappingProxyType(clean)

    @classmethod
    def identity(cls, dim: int) -> 'WeylOperator':
        return cls.scalar(dim, 1)

    @classmethod
    def scalar(cls, dim: int, c: Any) -> 'WeylOperator':
        zero = zero_index(dim)
        return cls(dim, {(zero, zero): c})

    @classmethod
    def z(cls, dim: int, j: int, power: int = 1) -> 'WeylOperator':
        """Multiplication by z_{j+1}^power"""
        return cls(dim, {(tuple(power * e for e in unit(dim, j)), zero_index(dim)): 1})

    @classmethod
    def d(cls, dim: int, j: int, power: int = 1) -> 'WeylOperator':
        """(d/dz_{j+1})^power"""
        return cls(dim, {(zero_index(dim), tuple(power * e for e in unit(dim, j))): 1})

    @classmethod
    def multiplication(cls, f: HoloPoly) -> 'WeylOperator':
        zero = zero_index(f.dim)
        return cls(f.dim, {(alpha, zero): c for alpha, c in f.terms.items()})

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def terms(self) -> Mapping[WeylKey, Coefficient]:
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_constant_coefficient(self) -> bool:
        return all(not any(a) for a, _ in self._terms)

    @property
    def homogeneous_order(self) -> Optional[int]:
        """d when every term is a pure derivative of total order d"""
        if not self._terms or not self.is_constant_coefficient:
            return None
        orders = {sum(b) for _, b in self._terms}
        return orders.pop() if len(orders) == 1 else None

    def max_multiplication_degree(self) -> int:
        return max((sum(a) for a, _ in self._terms), default=0)

    def max_derivative_order(self) -> int:
        return max((sum(b) for _, b in self._terms), default=0)

    def min_derivative_order(self) -> int:
        return min((sum(b) for _, b in self._terms), default=0)

    def _check(self, other: 'WeylOperator') -> None:
        if self._dim != other._dim:
            raise DimensionMismatchError(self._dim, other._dim, "operators")

    def __add__(self, other: 'WeylOperator') -> 'WeylOperator':
        if not isinstance(other, WeylOperator):
            return NotImplemented
        self._check(other)
        out = dict(self._terms)
        for key, c in other._terms.items():
            out[key] = out[key] + c if key in out else c
        return WeylOperator(self._dim, out)

    def __neg__(self) -> 'WeylOperator':
        return WeylOperator(self._dim, {key: -c for key, c in self._terms.items()})

    def __sub__(self, other: 'WeylOperator') -> 'WeylOperator':
        if not isinstance(other, WeylOperator):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: Any) -> 'WeylOperator':
        if isinstance(other, WeylOperator):
            return compose(self, other)
        c = coerce(other)
        return WeylOperator(self._dim, {key: d * c for key, d in self._terms.items()})

    def __rmul__(self, other: Any) -> 'WeylOperator':
        c = coerce(other)
        return WeylOperator(self._dim, {key: c * d for key, d in self._terms.items()})

    def __matmul__(self, other: 'WeylOperator') -> 'WeylOperator':
        return compose(self, other)

    def __call__(self, f: HoloPoly) -> HoloPoly:
        return apply(self, f)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeylOperator):
            return NotImplemented
        return self._dim == other._dim and dict(self._terms) == dict(other._terms)

    def __hash__(self) -> int:
        return hash((self._dim, frozenset(self._terms.items())))

    def __str__(self) -> str:
        return format_weyl(self)

    def __repr__(self) -> str:
        return f"WeylOperator(n={self._dim}, {format_weyl(self)})"


def apply(op: WeylOperator, f: HoloPoly) -> HoloPoly:
    """z^a d^b z^gamma = gamma!/(gamma-b)! z^(gamma-b+a)"""
    if op.dim != f.dim:
        raise DimensionMismatchError(op.dim, f.dim, "operator and polynomial")
    out: Dict[MultiIndex, Coefficient] = {}
    for (a, b), c in op.terms.items():
        for gamma, d in f.terms.items():
            lowered = sub_index(gamma, b)
            if lowered is None:
                continue
            key = add_index(lowered, a)
            value = mul(c, d) * falling(gamma, b)
            out[key] = add(out[key], value) if key in out else value
    return HoloPoly(f.dim, out)


def _reorder(b: MultiIndex, a: MultiIndex):
    """d^b z^a = sum_k prod_j C(b_j,k_j) a_j!/(a_j-k_j)! z^(a-k) d^(b-k)"""
    ranges = [range(min(bj, aj) + 1) for bj, aj in zip(b, a)]
    for k in itertools.product(*ranges):
        weight = 1
        for bj, aj, kj in zip(b, a, k):
            weight *= math.comb(bj, kj) * (math.factorial(aj) // math.factorial(aj - kj))
        yield tuple(x - y for x, y in zip(a, k)), tuple(x - y for x, y in zip(b, k)), weight


def compose(left: WeylOperator, right: WeylOperator) -> WeylOperator:
    """Normal-ordered product left * right"""
    if left.dim != right.dim:
        raise DimensionMismatchError(left.dim, right.dim, "operators")
    out: Dict[WeylKey, Coefficient] = {}
    for (a1, b1), c1 in left.terms.items():
        for (a2, b2), c2 in right.terms.items():
            for a_rest, b_rest, weight in _reorder(b1, a2):
                key = (add_index(a1, a_rest), add_index(b_rest, b2))
                value = c1 * c2 * weight
                out[key] = out[key] + value if key in out else value
    return WeylOperator(left.dim, out)


def commutator(left: WeylOperator, right: WeylOperator) -> WeylOperator:
    return compose(left, right) - compose(right, left)


def formal_adjoint_constant(p: WeylOperator) -> WeylOperator:
    """Adjoint of a constant-coefficient operator in the Gaussian Fock space:
    multiplication by p with conjugated coefficients and d^b replaced by z^b"""
    if not p.is_constant_coefficient:
        raise NonConstantCoefficientError(
            f"adjoint is only defined for constant-coefficient operators, got {format_weyl(p)}")
    zero = zero_index(p.dim)
    return WeylOperator(p.dim, {(b, zero): conj(c) for (_, b), c in p.terms.items()})


def symbol_polynomial(p: WeylOperator) -> HoloPoly:
    """The polynomial p(z) obtained from a constant-coefficient operator by d_j -> z_j"""
    if not p.is_constant_coefficient:
        raise NonConstantCoefficientError(f"{format_weyl(p)} has a multiplication part")
    return HoloPoly(p.dim, {b: c for (_, b), c in p.terms.items()})


def _factor_text(a: MultiIndex, b: MultiIndex) -> List[str]:
    parts = []
    for letter, exps in (("z", a), ("d", b)):
        for j, e in enumerate(exps):
            if e == 1:
                parts.append(f"{letter}{j + 1}")
            elif e > 1:
                parts.append(f"{letter}{j + 1}^{e}")
    return parts


def format_weyl(op: WeylOperator) -> str:
    """Canonical text form accepted back by parse_weyl"""
    if op.is_zero():
        return "0"
    items = sorted(op.terms.items(), key=lambda item: (
        -(sum(item[0][0]) + sum(item[0][1])), graded_key(item[0][0]), graded_key(item[0][1])))
    text = ""
    for position, ((a, b), c) in enumerate(items):
        factors = _factor_text(a, b)
        negative = (not c.y and c.x < 0) or (not c.x and c.y < 0)
        magnitude = -c if negative else c
        if factors and magnitude == qqi(1):
            body = "*".join(factors)
        else:
            body = "*".join([format_gauss(magnitude)] + factors)
        if position == 0:
            text = f"-{body}" if negative else body
        else:
            text += f" - {body}" if negative else f" + {body}"
    return text


_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<number>\d+(?:\s*/\s*\d+)?)"
    r"|(?P<symbol>[zd])(?P<index>\d+)"
    r"|(?P<imag>i)(?![A-Za-z0-9])"
    r"|(?P<op>[-+*^()])"
    r")"
)


class _Token:
    __slots__ = ("kind", "text", "position")

    def __init__(self, kind: str, text: str, position: int):
        self.kind = kind
        self.text = text
        self.position = position


def _tokenize(expr: str) -> List[_Token]:
    tokens: List[_Token] = []
    pos = 0
    while pos < len(expr):
        if expr[pos].isspace():
            pos += 1
            continue
        match = _TOKEN.match(expr, pos)
        if match is None or match.end() == pos:
            word = re.match(r"[A-Za-z_]\w*", expr[pos:])
            if word:
                raise WeylSyntaxError(f"unknown symbol {word.group(0)!r}", pos)
            raise WeylSyntaxError(f"unexpected character {expr[pos]!r}", pos)
        start = match.start(match.lastgroup) if match.lastgroup != "index" else match.start("symbol")
        if match.group("number") is not None:
            tokens.append(_Token("number", re.sub(r"\s", "", match.group("number")), start))
        elif match.group("symbol") is not None:
            tokens.append(_Token(match.group("symbol"), match.group("index"), match.start("symbol")))
        elif match.group("imag") is not None:
            tokens.append(_Token("imag", "i", start))
        else:
            tokens.append(_Token(match.group("op"), match.group("op"), start))
        pos = match.end()
    tokens.append(_Token("end", "", len(expr)))
    return tokens


class _Parser:
    """expr := ['+'|'-'] term (('+'|'-') term)*
    term := atom (['*'] atom)*
    atom := NUMBER ['i'] | 'i' | ('z'|'d') INDEX ['^' POSINT] | '(' expr ')'"""

    def __init__(self, tokens: List[_Token], dim: int):
        self.tokens = tokens
        self.pos = 0
        self.dim = dim

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self, kind: Optional[str] = None) -> _Token:
        token = self.tokens[self.pos]
        if kind is not None and token.kind != kind:
            expected = "end of input" if kind == "end" else repr(kind)
            raise WeylSyntaxError(f"expected {expected}, found {token.text or 'end of input'!r}",
                                  token.position)
        self.pos += 1
        return token

    def parse(self) -> WeylOperator:
        result = self.expr()
        self.take("end")
        return result

    def expr(self) -> WeylOperator:
        sign = 1
        if self.peek().kind in ("+", "-"):
            sign = -1 if self.take().kind == "-" else 1
        result = self.term() * sign
        while self.peek().kind in ("+", "-"):
            op = self.take().kind
            value = self.term()
            result = result + value if op == "+" else result - value
        return result

    def term(self) -> WeylOperator:
        result = self.atom()
        while True:
            token = self.peek()
            if token.kind == "*":
                self.take()
                result = compose(result, self.atom())
            elif token.kind in ("number", "imag", "z", "d", "("):
                result = compose(result, self.atom())
            else:
                return result

    def atom(self) -> WeylOperator:
        token = self.peek()
        if token.kind == "number":
            self.take()
            value = qqi(rational(token.text))
            if self.peek().kind == "imag":
                self.take()
                value = value * qqi(0, 1)
            return WeylOperator.scalar(self.dim, value)
        if token.kind == "imag":
            self.take()
            return WeylOperator.scalar(self.dim, qqi(0, 1))
        if token.kind in ("z", "d"):
            self.take()
            index = int(token.text)
            if not 1 <= index <= self.dim:
                raise WeylSyntaxError(f"index {index} out of range 1..{self.dim}", token.position)
            power = 1
            if self.peek().kind == "^":
                self.take()
                exponent = self.take("number")
                if "/" in exponent.text or int(exponent.text) < 1:
                    raise WeylSyntaxError("exponent must be a positive integer", exponent.position)
                power = int(exponent.text)
            factory = WeylOperator.z if token.kind == "z" else WeylOperator.d
            return factory(self.dim, index - 1, power)
        if token.kind == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        raise WeylSyntaxError(f"unexpected {token.text or 'end of input'!r}", token.position)


def parse_weyl(expr: str, dim: Optional[int] = None) -> WeylOperator:
    """Parse an operator such as "d1^2", "z1*d1 + 1" or "(1/2+3/4i)*d2"; result is normal-ordered"""
    tokens = _tokenize(expr)
    if dim is None:
        indices = [int(t.text) for t in tokens if t.kind in ("z", "d")]
        dim = max(indices, default=1)
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    op = _Parser(tokens, dim).parse()
    logger.debug(f"Parsed {expr!r} -> {format_weyl(op)}")
    return op
