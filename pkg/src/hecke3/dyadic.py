"""Bounded-precision 2-adic numbers, the character psi and the type data of E.

``psi`` is the additive character of Q_2 with kernel containing 2Z_2 and
psi(1/2) = +i: psi(x) = exp(pi*i*r(x)) where r(x) in [0, 2) is the dyadic
rational with x - r(x) in 2Z_2.  The other admissible character is the
complex conjugate; pass ``conjugate=True`` to use it.

2x2 matrices are tuples of rows whose entries are ints, Fractions or
:class:`Dyadic`.  Membership questions are decided from valuations, which
are exact for rationals and known up to the precision for dyadics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Callable, Sequence, TypeVar, Union

from .cyclolinalg import GaussRat
from .errors import InsufficientPrecision, NilpotentRisk, NotMember

DEFAULT_PRECISION = 32
MAX_PRECISION = 1024

T = TypeVar("T")


def v2(n: int) -> int:
    if n == 0:
        raise ValueError("v2(0) is infinite")
    return (n & -n).bit_length() - 1


@dataclass(frozen=True)
class Dyadic:
    """The 2-adic number 2^valuation * unit, unit odd and known mod 2^precision.

    Exact zero has ``valuation = inf``.  A quantity only known to lie in
    2^N Z_2 is stored with ``valuation = N`` and ``precision = 0``.
    """

    valuation: float | int
    unit: int = 1
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.valuation == math.inf:
            return
        if self.precision < 0:
            raise ValueError("precision must be non-negative")
        if self.precision == 0:
            object.__setattr__(self, "unit", 0)
            return
        if self.unit % 2 == 0:
            raise ValueError("unit part must be odd")
        object.__setattr__(self, "unit", self.unit % (1 << self.precision))

    @classmethod
    def exact_zero(cls) -> "Dyadic":
        return cls(math.inf, 0, 0)

    @classmethod
    def from_rational(cls, x: int | Fraction, precision: int = DEFAULT_PRECISION) -> "Dyadic":
        x = Fraction(x)
        if x == 0:
            return cls.exact_zero()
        v = v2(x.numerator) - v2(x.denominator)
        num = x.numerator >> max(v, 0)
        den = x.denominator >> max(-v, 0)
        mod = 1 << precision
        return cls(v, num * pow(den, -1, mod) % mod, precision)

    @classmethod
    def big_o(cls, n: int) -> "Dyadic":
        """An unknown element of 2^n Z_2."""
        return cls(n, 0, 0)

    @property
    def is_exact_zero(self) -> bool:
        return self.valuation == math.inf

    @property
    def absolute_precision(self) -> float | int:
        return math.inf if self.is_exact_zero else self.valuation + self.precision

    @property
    def known(self) -> bool:
        """Whether the valuation is actually known."""
        return self.is_exact_zero or self.precision > 0

    def _pair(self) -> tuple[int, int, float | int]:
        # (integer m, exponent e, absolute precision) with value = m * 2^e
        if self.is_exact_zero:
            return 0, 0, math.inf
        return self.unit, int(self.valuation), self.absolute_precision

    @staticmethod
    def _make(m: int, e: int, absprec: float | int) -> "Dyadic":
        if m == 0:
            if absprec == math.inf:
                return Dyadic.exact_zero()
            return Dyadic.big_o(int(absprec))
        v = v2(m) + e
        if absprec == math.inf:
            raise ValueError("exact nonzero dyadics need a finite precision")
        if v >= absprec:
            return Dyadic.big_o(int(absprec))
        k = int(absprec - v)
        return Dyadic(v, (m >> v2(m)) % (1 << k), k)

    def __add__(self, other):
        other = _dy(other, self._prec_hint())
        if self.is_exact_zero:
            return other
        if other.is_exact_zero:
            return self
        m1, e1, p1 = self._pair()
        m2, e2, p2 = other._pair()
        e = min(e1, e2)
        m = (m1 << (e1 - e)) + (m2 << (e2 - e))
        absprec = min(p1, p2)
        if absprec <= e:
            return Dyadic.big_o(int(absprec))
        m %= 1 << int(absprec - e)
        return Dyadic._make(m, e, absprec)

    __radd__ = __add__

    def __neg__(self):
        if self.is_exact_zero or self.precision == 0:
            return self
        return Dyadic(self.valuation, -self.unit, self.precision)

    def __sub__(self, other):
        return self + (-_dy(other, self._prec_hint()))

    def __rsub__(self, other):
        return _dy(other, self._prec_hint()) - self

    def __mul__(self, other):
        other = _dy(other, self._prec_hint())
        if self.is_exact_zero or other.is_exact_zero:
            return Dyadic.exact_zero()
        if self.precision == 0 or other.precision == 0:
            return Dyadic.big_o(int(self.valuation + other.valuation))
        k = min(self.precision, other.precision)
        return Dyadic(self.valuation + other.valuation, self.unit * other.unit % (1 << k), k)

    __rmul__ = __mul__

    def inverse(self) -> "Dyadic":
        if self.is_exact_zero:
            raise ZeroDivisionError("inverse of zero")
        if self.precision == 0:
            raise InsufficientPrecision("cannot invert an element of unknown valuation")
        mod = 1 << self.precision
        return Dyadic(-self.valuation, pow(self.unit, -1, mod), self.precision)

    def __truediv__(self, other):
        return self * _dy(other, self._prec_hint()).inverse()

    def __rtruediv__(self, other):
        return _dy(other, self._prec_hint()) * self.inverse()

    def _prec_hint(self) -> int:
        return max(self.precision, DEFAULT_PRECISION) if not self.is_exact_zero else DEFAULT_PRECISION

    def to_fraction(self) -> Fraction:
        """The canonical rational representative (unit taken in [0, 2^k))."""
        if self.is_exact_zero or self.precision == 0:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(2) ** int(self.valuation)

    def __repr__(self):
        if self.is_exact_zero:
            return "Dyadic(0)"
        if self.precision == 0:
            return f"Dyadic(O(2^{self.valuation}))"
        return f"Dyadic(2^{self.valuation}*{self.unit} + O(2^{self.absolute_precision}))"


Number = Union[int, Fraction, Dyadic]


def _dy(x: Number, precision: int = DEFAULT_PRECISION) -> Dyadic:
    return x if isinstance(x, Dyadic) else Dyadic.from_rational(x, precision)


def valuation(x: Number) -> float | int:
    """2-adic valuation; exact zero is +inf.  Unknown valuations raise."""
    if isinstance(x, Dyadic):
        if not x.known:
            raise InsufficientPrecision(f"valuation of {x!r} is not determined")
        return x.valuation
    x = Fraction(x)
    if x == 0:
        return math.inf
    return v2(x.numerator) - v2(x.denominator)


def at_least(x: Number, bound: int) -> bool:
    """Decide v(x) >= bound; O(2^N) with N >= bound counts as satisfied."""
    if isinstance(x, Dyadic) and not x.known:
        if x.valuation >= bound:
            return True
        raise InsufficientPrecision(f"cannot compare valuation of {x!r} with {bound}")
    return valuation(x) >= bound


# ---------------------------------------------------------------------------
# roots of unity and psi


@total_ordering
@dataclass(frozen=True)
class RootOfUnity:
    """exp(2*pi*i*exponent), exponent a dyadic rational taken mod 1."""

    exponent: Fraction

    def __post_init__(self):
        q = Fraction(self.exponent) % 1
        if q.denominator & (q.denominator - 1):
            raise ValueError("only 2-power roots of unity are supported")
        object.__setattr__(self, "exponent", q)

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        return RootOfUnity(self.exponent + other.exponent)

    def __pow__(self, n: int) -> "RootOfUnity":
        return RootOfUnity(self.exponent * n)

    def inverse(self) -> "RootOfUnity":
        return RootOfUnity(-self.exponent)

    def conjugate(self) -> "RootOfUnity":
        return self.inverse()

    @property
    def order(self) -> int:
        return self.exponent.denominator

    def to_gauss(self) -> GaussRat:
        """The value in Q(i); defined only for orders 1, 2 and 4."""
        table = {Fraction(0): GaussRat(1), Fraction(1, 4): GaussRat(0, 1),
                 Fraction(1, 2): GaussRat(-1), Fraction(3, 4): GaussRat(0, -1)}
        if self.exponent not in table:
            raise ValueError(f"exp(2 pi i {self.exponent}) is not in Q(i)")
        return table[self.exponent]

    def __lt__(self, other):
        return self.exponent < other.exponent

    def __str__(self):
        try:
            from .cyclolinalg import format_gauss
            return format_gauss(self.to_gauss())
        except ValueError:
            return f"exp(2*pi*i*{self.exponent})"


ONE = RootOfUnity(Fraction(0))


def dyadic_part(x: Number) -> Fraction:
    """r(x): the dyadic rational in [0, 2) with x - r(x) in 2Z_2."""
    if isinstance(x, Dyadic):
        if x.is_exact_zero:
            return Fraction(0)
        if x.absolute_precision < 1:
            raise InsufficientPrecision(f"{x!r} is not known modulo 2")
        if x.precision == 0:
            return Fraction(0)  # O(2^N) with N >= 1
        v = int(x.valuation)
        if v >= 1:
            return Fraction(0)
        s = -v
        return Fraction(x.unit % (1 << (s + 1)), 1 << s)
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    s = max(0, v2(x.denominator))
    odd_den = x.denominator >> s
    mod = 1 << (s + 1)
    c = x.numerator * pow(odd_den, -1, mod) % mod
    return Fraction(c, 1 << s)


def psi(x: Number, *, conjugate: bool = False) -> RootOfUnity:
    """psi(x) = exp(pi*i*r(x)); psi(1) = -1 and psi(1/2) = i."""
    r = dyadic_part(x)
    q = r / 2
    return RootOfUnity(-q if conjugate else q)


def with_precision_retry(fn: Callable[[int], T], start: int = DEFAULT_PRECISION,
                         limit: int = MAX_PRECISION) -> T:
    """Call ``fn(precision)``, doubling the precision on InsufficientPrecision."""
    k = start
    while True:
        try:
            return fn(k)
        except InsufficientPrecision:
            if k >= limit:
                raise
            k *= 2


# ---------------------------------------------------------------------------
# 2x2 matrices


Mat2 = tuple[tuple[Number, Number], tuple[Number, Number]]


def m2(a, b, c, d) -> Mat2:
    return ((a, b), (c, d))


def m2_mul(x: Mat2, y: Mat2) -> Mat2:
    return ((x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
            (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]))


def m2_det(x: Mat2):
    return x[0][0] * x[1][1] - x[0][1] * x[1][0]


def m2_inv(x: Mat2) -> Mat2:
    d = m2_det(x)
    if not isinstance(d, Dyadic):
        d = Fraction(d)
        if d == 0:
            raise ZeroDivisionError("singular 2x2 matrix")
    return ((x[1][1] / d, -x[0][1] / d), (-x[1][0] / d, x[0][0] / d))


def m2_sub_identity(x: Mat2) -> Mat2:
    return ((x[0][0] - 1, x[0][1]), (x[1][0], x[1][1] - 1))


def m2_scale(c, x: Mat2) -> Mat2:
    return ((c * x[0][0], c * x[0][1]), (c * x[1][0], c * x[1][1]))


def m2_trace(x: Mat2):
    return x[0][0] + x[1][1]


def _frac_matrix(x: Sequence[Sequence]) -> Mat2:
    return tuple(tuple(e if isinstance(e, Dyadic) else Fraction(e) for e in row) for row in x)  # type: ignore


@dataclass(frozen=True)
class FiltrationLevel:
    """Index n of P^n, or of U^n = 1 + P^n (then n >= 1)."""

    n: int

    def __int__(self) -> int:
        return self.n


def filtration_pattern(n: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Minimal valuations of the entries of elements of P^n."""
    k, odd = divmod(n, 2)
    if odd:
        return ((k + 1, k), (k + 1, k + 1))
    return ((k, k), (k + 1, k))


def in_P(m: Sequence[Sequence[Number]], n: int) -> bool:
    """Membership in P^n: 2^k U for n = 2k, 2^k Pi U for n = 2k+1."""
    pat = filtration_pattern(n)
    return all(at_least(m[i][j], pat[i][j]) for i in range(2) for j in range(2))


def in_filtration(m: Sequence[Sequence[Number]], n: int | FiltrationLevel, *, units: bool = False) -> bool:
    """P^n membership, or U^n = 1 + P^n membership when ``units`` is set."""
    n = int(n)
    if units:
        if n < 1:
            raise ValueError("U^n is defined for n >= 1")
        return in_P(m2_sub_identity(_frac_matrix(m)), n)
    return in_P(m, n)


def in_U(m: Sequence[Sequence[Number]], n: int) -> bool:
    return in_filtration(m, n, units=True)


def filtration_level(m: Sequence[Sequence[Number]]) -> int | float:
    """The largest n with m in P^n (inf for the zero matrix)."""
    vals = [valuation(m[i][j]) for i in range(2) for j in range(2)]
    if all(v == math.inf for v in vals):
        return math.inf
    n = 2 * int(min(v for v in vals if v != math.inf)) - 2
    while in_P(m, n + 1):
        n += 1
    while not in_P(m, n):
        n -= 1
    return n


# ---------------------------------------------------------------------------
# alpha, psi_alpha, E and J_alpha


@dataclass(frozen=True)
class AlphaDatum:
    D: int
    t: int

    def __post_init__(self):
        if self.D % 2 == 0:
            raise ValueError("D must be odd")
        object.__setattr__(self, "D", 1 if self.D % 4 == 1 else -1)
        object.__setattr__(self, "t", self.t % 2)

    def matrix(self) -> Mat2:
        return m2(Fraction(0), Fraction(1, 8), Fraction(2 * self.D, 8), Fraction(2 * self.t, 8))

    def pi(self) -> Mat2:
        """The uniformizer [[0,1],[2D,0]] of E."""
        return m2(Fraction(0), Fraction(1), Fraction(2 * self.D), Fraction(0))


def alpha_matrix(D: int, t: int) -> Mat2:
    return m2(Fraction(0), Fraction(1, 8), Fraction(2 * D, 8), Fraction(2 * t, 8))


def psi_alpha(a: AlphaDatum | tuple[int, int], x: Sequence[Sequence[Number]], *,
              conjugate: bool = False) -> RootOfUnity:
    """psi(tr(alpha(D,t)(x - 1))) for x in U^3."""
    a = a if isinstance(a, AlphaDatum) else AlphaDatum(*a)
    return psi_trace(a.matrix(), x, conjugate=conjugate)


def psi_trace(alpha: Sequence[Sequence[Number]], x: Sequence[Sequence[Number]], *,
              conjugate: bool = False) -> RootOfUnity:
    """psi(tr(alpha (x - 1))) for any 2x2 alpha and x in U^3."""
    x = _frac_matrix(x)
    if not in_U(x, 3):
        raise NotMember("psi_alpha is defined on U^3 only")
    return psi(m2_trace(m2_mul(_frac_matrix(alpha), m2_sub_identity(x))), conjugate=conjugate)


def psi_alpha_closed_form(a: AlphaDatum, x: Sequence[Sequence[Number]], *, conjugate: bool = False) -> RootOfUnity:
    """The same character through the coordinates x = [[4x1+1, 2x2], [4x3, 4x4+1]]."""
    x = _frac_matrix(x)
    x2 = x[0][1] / 2
    x3 = x[1][0] / 4
    x4 = (x[1][1] - 1) / 4
    return psi(Fraction(1, 2) * x3 + Fraction(a.D, 2) * x2 + a.t * x4, conjugate=conjugate)


def in_E_units(g: Sequence[Sequence[Number]], D: int) -> tuple[int, Number, Number]:
    """(n, x, y) with g = Pi_D^n [[x, y], [2Dy, x]] and x a unit, else NotMember."""
    g = _frac_matrix(g)
    det = m2_det(g)
    n = valuation(det)
    if n == math.inf:
        raise NotMember("singular matrix")
    n = int(n)
    pi_inv_n = _pi_power(D, -n)
    h = m2_mul(pi_inv_n, g)
    x, y = h[0][0], h[0][1]
    if not _equal(h[1][1], x) or not _equal(h[1][0], 2 * D * y):
        raise NotMember("matrix does not have the shape of an element of E")
    if valuation(x) != 0 or not at_least(y, 0):
        raise NotMember("not a unit times a power of the uniformizer")
    return n, x, y


def _pi_power(D: int, n: int) -> Mat2:
    # Pi^2 = 2D, so Pi^n = (2D)^(n//2) * Pi^(n%2)
    q, r = divmod(n, 2)
    scale = Fraction(2 * D) ** q
    base = m2(Fraction(1), Fraction(0), Fraction(0), Fraction(1)) if r == 0 else m2(
        Fraction(0), Fraction(1), Fraction(2 * D), Fraction(0))
    return m2_scale(scale, base)


def _equal(a: Number, b: Number) -> bool:
    d = a - b
    if isinstance(d, Dyadic):
        if d.is_exact_zero or d.precision == 0:
            return True  # equal to the working precision
        return False
    return d == 0


def E_unit_classes(D: int) -> list[Mat2]:
    """Representatives of O_E^x modulo 1 + P_E^3: x in {1, 3}, y in {0, 1}."""
    return [m2(Fraction(x), Fraction(y), Fraction(2 * D * y), Fraction(x)) for x in (1, 3) for y in (0, 1)]


def j_alpha_factor(g: Sequence[Sequence[Number]], a: AlphaDatum | tuple[int, int]) -> tuple[Mat2, Mat2]:
    """(e, u) with g = e u, e in E^x and u in U^3; NotMember if impossible."""
    a = a if isinstance(a, AlphaDatum) else AlphaDatum(*a)
    g = _frac_matrix(g)
    n = valuation(m2_det(g))
    if n == math.inf:
        raise NotMember("singular matrix")
    pin = _pi_power(a.D, int(n))
    rest = m2_mul(_pi_power(a.D, -int(n)), g)
    for e in E_unit_classes(a.D):
        u = m2_mul(m2_inv(e), rest)
        if in_U(u, 3):
            return m2_mul(pin, e), u
    raise NotMember("matrix is not in E^x U^3")


def in_J_alpha(g: Sequence[Sequence[Number]], a: AlphaDatum | tuple[int, int]) -> bool:
    """Membership in J_alpha = E^x U^3 by search over the classes of O_E^x / (1 + P_E^3)."""
    try:
        j_alpha_factor(g, a)
    except NotMember:
        return False
    return True


def alpha_normal_form(a: Number, b: Number, c: Number, d: Number) -> AlphaDatum:
    """(D, t) for alpha = (1/8)[[2a, b], [2c, 2d]]: D = bc - 2ad mod 4, t = a + d mod 2."""
    if valuation(b) != 0 or valuation(c) != 0:
        raise NilpotentRisk("b and c must be 2-adic units, otherwise alpha + P^-4 meets the nilpotent cone")
    for z in (a, d):
        if not at_least(z, 0):
            raise ValueError("a and d must be 2-adic integers")
    Dv = b * c - 2 * a * d
    tv = a + d
    D = _mod_int(Dv, 4)
    t = _mod_int(tv, 2)
    return AlphaDatum(D, t)


def conjugator(a: Number, b: Number, c: Number, d: Number) -> Mat2:
    """The matrix [[bc - 2ad, a], [0, c]] that conjugates alpha into normal form."""
    return m2(b * c - 2 * a * d, a, 0, c)


def _mod_int(x: Number, m: int) -> int:
    """x mod m for a 2-adic integer x and m a power of two."""
    k = m.bit_length() - 1
    if isinstance(x, Dyadic):
        if x.is_exact_zero:
            return 0
        if x.absolute_precision < k:
            raise InsufficientPrecision(f"{x!r} not known mod {m}")
        if x.precision == 0:
            return 0
        return (x.unit << int(x.valuation)) % m
    x = Fraction(x)
    return x.numerator * pow(x.denominator, -1, m) % m
