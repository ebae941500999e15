"""
Exact scalars for Gaussian-weight computations.
Gaussian rationals come from sympy's QQ_I domain. Powers of pi are carried
symbolically so inner products of polynomials stay exact.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Union

from sympy import QQ, QQ_I

GaussRational = type(QQ_I.one)
Coefficient = Union[GaussRational, complex]


def rational(value: Any):
    """Convert int, Fraction, str ("p/q") or float to a QQ element"""
    if isinstance(value, type(QQ.one)):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, (str, float)):
        value = Fraction(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    raise TypeError(f"cannot convert {value!r} to a rational")


def qqi(re: Any = 0, im: Any = 0) -> GaussRational:
    """Gaussian rational re + im*i"""
    return QQ_I(rational(re), rational(im))


def is_exact(c: Any) -> bool:
    return isinstance(c, GaussRational)


def coerce(c: Any) -> Coefficient:
    """Normalize a user-supplied coefficient: exact stays exact, floats become complex"""
    if is_exact(c):
        return c
    if isinstance(c, (int, Fraction, str)) and not isinstance(c, bool):
        return qqi(c)
    if isinstance(c, type(QQ.one)):
        return QQ_I(c, QQ(0))
    return complex(c)


def rational_to_float(q) -> float:
    return int(q.numerator) / int(q.denominator)


def to_complex(c: Any) -> complex:
    if is_exact(c):
        return complex(rational_to_float(c.x), rational_to_float(c.y))
    return complex(c)


def conj(c: Coefficient) -> Coefficient:
    if is_exact(c):
        return QQ_I(c.x, -c.y)
    return complex(c).conjugate()


def mul(a: Coefficient, b: Coefficient) -> Coefficient:
    """Product that tolerates mixing exact and float coefficients"""
    if is_exact(a) and is_exact(b):
        return a * b
    return to_complex(a) * to_complex(b)


def add(a: Coefficient, b: Coefficient) -> Coefficient:
    if is_exact(a) and is_exact(b):
        return a + b
    return to_complex(a) + to_complex(b)


def times_int(c: Coefficient, k: int) -> Coefficient:
    return c * k


def times_rational(c: Coefficient, num: int, den: int) -> Coefficient:
    """c * num/den, exact when c is exact"""
    if is_exact(c):
        return c * QQ_I(QQ(num, den), QQ(0))
    return c * (num / den)


def format_rational(q) -> str:
    q = rational(q)
    num, den = int(q.numerator), int(q.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def format_gauss(c: GaussRational) -> str:
    """Compact text form: "3/2", "-i", "2/3i", "(1/2+3/4i)" """
    re, im = c.x, c.y
    if not im:
        return format_rational(re)
    if im == 1:
        im_text = "i"
    elif im == -1:
        im_text = "-i"
    else:
        im_text = f"{format_rational(im)}i"
    if not re:
        return im_text
    sign = "-" if im < 0 else "+"
    im_abs = format_rational(-im) if im < 0 else format_rational(im)
    im_abs = "i" if im_abs == "1" else f"{im_abs}i"
    return f"({format_rational(re)}{sign}{im_abs})"


@dataclass(frozen=True)
class ExactScalar:
    """value * pi**pi_power with value an exact Gaussian rational"""

    value: GaussRational
    pi_power: int = 0

    @classmethod
    def zero(cls, pi_power: int = 0) -> 'ExactScalar':
        return cls(qqi(0), pi_power)

    @classmethod
    def total(cls, items: Iterable['ExactScalar'], pi_power: int = 0) -> 'ExactScalar':
        acc = cls.zero(pi_power)
        for item in items:
            acc = acc + item
        return acc

    def is_zero(self) -> bool:
        return not self.value

    @property
    def real(self):
        """Exact real part of the rational factor"""
        return self.value.x

    @property
    def imag(self):
        return self.value.y

    def _aligned(self, other: 'ExactScalar') -> int:
        if self.pi_power == other.pi_power or other.is_zero():
            return self.pi_power
        if self.is_zero():
            return other.pi_power
        raise ValueError(
            f"cannot combine pi^{self.pi_power} and pi^{other.pi_power} exactly")

    def __add__(self, other: Any) -> Any:
        if isinstance(other, (float, complex)):
            return self.to_complex() + other
        if not isinstance(other, ExactScalar):
            return NotImplemented
        power = self._aligned(other)
        return ExactScalar(self.value + other.value, power)

    def __radd__(self, other: Any) -> Any:
        if isinstance(other, (float, complex)):
            return other + self.to_complex()
        return NotImplemented

    def __sub__(self, other: 'ExactScalar') -> 'ExactScalar':
        if not isinstance(other, ExactScalar):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> 'ExactScalar':
        return ExactScalar(-self.value, self.pi_power)

    def __mul__(self, other: Any) -> Any:
        if isinstance(other, (float, complex)):
            return self.to_complex() * other
        if isinstance(other, ExactScalar):
            return ExactScalar(self.value * other.value, self.pi_power + other.pi_power)
        return ExactScalar(self.value * coerce(other), self.pi_power)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExactScalar):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.pi_power == other.pi_power and self.value == other.value

    def __hash__(self) -> int:
        if self.is_zero():
            return hash(0)
        return hash((self.value, self.pi_power))

    def _real_pair(self, other: 'ExactScalar'):
        if self.imag or other.imag:
            raise ValueError("ordering requires real scalars")
        self._aligned(other)
        return self.real, other.real

    def __le__(self, other: 'ExactScalar') -> bool:
        a, b = self._real_pair(other)
        return a <= b

    def __lt__(self, other: 'ExactScalar') -> bool:
        a, b = self._real_pair(other)
        return a < b

    def __ge__(self, other: 'ExactScalar') -> bool:
        return other <= self

    def __gt__(self, other: 'ExactScalar') -> bool:
        return other < self

    def to_complex(self) -> complex:
        return to_complex(self.value) * math.pi ** self.pi_power

    def __float__(self) -> float:
        if self.imag:
            raise ValueError("scalar has a nonzero imaginary part")
        return rational_to_float(self.real) * math.pi ** self.pi_power

    def format(self) -> str:
        """Symbolic form such as "3/2·π^2" """
        base = format_gauss(self.value)
        if self.is_zero() or self.pi_power == 0:
            return base
        return f"{base}·π^{self.pi_power}"

    def __repr__(self) -> str:
        return f"ExactScalar({self.format()})"
