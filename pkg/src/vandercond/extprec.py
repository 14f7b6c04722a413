"""Double-double ("compensated") real arithmetic.

A value is the unevaluated sum ``hi + lo`` of two binary64 numbers with
``|lo| <= ulp(hi)/2``, which gives roughly 106 significant bits.  The
numeric kernels are plain functions over ``(hi, lo)`` float pairs compiled
with numba, so the same code serves the scalar :class:`ExtReal` wrapper and
the array kernels in :mod:`vandercond.kernel` and :mod:`vandercond.spectral`.

The error-free transformations rely on strict IEEE evaluation; numba does
not contract or reassociate floating point operations unless ``fastmath``
is requested, and nothing here requests it.
"""

from __future__ import annotations

import math
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Union

import numba
import numpy as np

from .errors import DomainError

_SPLITTER = 134217729.0  # 2**27 + 1

jit = numba.njit(cache=True, nogil=True)


# ---------------------------------------------------------------------------
# Error-free transformations
# ---------------------------------------------------------------------------


@jit
def two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


@jit
def quick_two_sum(a, b):
    # requires |a| >= |b| (or a == 0)
    s = a + b
    err = b - (s - a)
    return s, err


@jit
def split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


@jit
def two_prod(a, b):
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


# ---------------------------------------------------------------------------
# Double-double kernels on (hi, lo) pairs
# ---------------------------------------------------------------------------


@jit
def dd_add(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    t, f = two_sum(al, bl)
    e += t
    s, e = quick_two_sum(s, e)
    e += f
    return quick_two_sum(s, e)


@jit
def dd_sub(ah, al, bh, bl):
    return dd_add(ah, al, -bh, -bl)


@jit
def dd_add_d(ah, al, b):
    s, e = two_sum(ah, b)
    e += al
    return quick_two_sum(s, e)


@jit
def dd_mul(ah, al, bh, bl):
    p, e = two_prod(ah, bh)
    e += ah * bl + al * bh
    return quick_two_sum(p, e)


@jit
def dd_mul_d(ah, al, b):
    p, e = two_prod(ah, b)
    e += al * b
    return quick_two_sum(p, e)


@jit
def dd_div(ah, al, bh, bl):
    q1 = ah / bh
    ph, pl = dd_mul_d(bh, bl, q1)
    rh, rl = dd_sub(ah, al, ph, pl)
    q2 = rh / bh
    ph, pl = dd_mul_d(bh, bl, q2)
    rh, rl = dd_sub(rh, rl, ph, pl)
    q3 = rh / bh
    q1, q2 = quick_two_sum(q1, q2)
    return dd_add_d(q1, q2, q3)


@jit
def dd_sqrt(ah, al):
    if ah == 0.0:
        return 0.0, 0.0
    x = 1.0 / math.sqrt(ah)
    y = ah * x
    ph, pl = two_prod(y, y)
    rh, rl = dd_sub(ah, al, ph, pl)
    return two_sum(y, rh * (x * 0.5))


@jit
def dd_abs(ah, al):
    if ah < 0.0 or (ah == 0.0 and al < 0.0):
        return -ah, -al
    return ah, al


# Taylor coefficients of sin(pi*y)/y and cos(pi*y) in powers of y**2, as
# (hi, lo) pairs rounded from a 60-digit evaluation.
_SIN_COEFFS = np.array([
    (float.fromhex('0x1.921fb54442d18p+1'), float.fromhex('0x1.1a62633145c07p-53')),
    (float.fromhex('-0x1.4abbce625be53p+2'), float.fromhex('0x1.05511c68476a8p-52')),
    (float.fromhex('0x1.466bc6775aae2p+1'), float.fromhex('-0x1.6dc0cbddb0fc3p-54')),
    (float.fromhex('-0x1.32d2cce62bd86p-1'), float.fromhex('0x1.066847a026e69p-55')),
    (float.fromhex('0x1.50783487ee782p-4'), float.fromhex('-0x1.1be14e6e8854ap-58')),
    (float.fromhex('-0x1.e3074fde8871fp-8'), float.fromhex('-0x1.88ef203b0a336p-62')),
    (float.fromhex('0x1.e8f434d018d63p-12'), float.fromhex('0x1.94682b2571263p-67')),
    (float.fromhex('-0x1.6fadb9f155744p-16'), float.fromhex('0x1.bab97c50b4cd0p-70')),
    (float.fromhex('0x1.aaec32af93359p-21'), float.fromhex('0x1.4fe55050e576ap-76')),
    (float.fromhex('-0x1.8a404211f9547p-26'), float.fromhex('-0x1.6d424c0620248p-84')),
    (float.fromhex('0x1.2877020d52cf0p-31'), float.fromhex('-0x1.c9db31d99b9a3p-85')),
    (float.fromhex('-0x1.7215f879e1ac9p-37'), float.fromhex('0x1.a2cc59fc2e3e8p-91')),
    (float.fromhex('0x1.859c594ba4573p-43'), float.fromhex('0x1.46446588874ecp-98')),
    (float.fromhex('-0x1.5e91aac4928dbp-49'), float.fromhex('0x1.36e8311afce96p-103')),
    (float.fromhex('0x1.10b5242e256ccp-55'), float.fromhex('-0x1.163d6ee411febp-112')),
    (float.fromhex('-0x1.7271f9271ad31p-62'), float.fromhex('-0x1.548bf9784d77bp-119')),
])
_COS_COEFFS = np.array([
    (1.0, 0.0),
    (float.fromhex('-0x1.3bd3cc9be45dep+2'), float.fromhex('-0x1.692b71366cc04p-52')),
    (float.fromhex('0x1.03c1f081b5ac4p+2'), float.fromhex('-0x1.32b33f87fc145p-52')),
    (float.fromhex('-0x1.55d3c7e3cbffap+0'), float.fromhex('0x1.d582920937625p-59')),
    (float.fromhex('0x1.e1f506891babbp-3'), float.fromhex('-0x1.7362f495c096dp-60')),
    (float.fromhex('-0x1.a6d1f2a204a8cp-6'), float.fromhex('0x1.5961232276df6p-60')),
    (float.fromhex('0x1.f9d38a3763cc3p-10'), float.fromhex('-0x1.c8a14c8bd6bc5p-64')),
    (float.fromhex('-0x1.b6e24f44b128fp-14'), float.fromhex('-0x1.6de1e0a0c23b9p-69')),
    (float.fromhex('0x1.20c62c2f2d7f5p-18'), float.fromhex('-0x1.5a3cd1a11c7a2p-72')),
    (float.fromhex('-0x1.2a0c591af8314p-23'), float.fromhex('-0x1.215803afbd5f8p-77')),
    (float.fromhex('0x1.ef6e308d6d1c4p-29'), float.fromhex('-0x1.c5f7779fbdd48p-83')),
    (float.fromhex('-0x1.52ae4120fde27p-34'), float.fromhex('0x1.76dd247cd9002p-88')),
    (float.fromhex('0x1.838d8f4321800p-40'), float.fromhex('-0x1.453680e7f5659p-96')),
    (float.fromhex('-0x1.789d662bb5482p-46'), float.fromhex('-0x1.01d70ae199b04p-104')),
    (float.fromhex('0x1.3aab85bac2365p-52'), float.fromhex('-0x1.b618dab265a90p-107')),
    (float.fromhex('-0x1.c8ed0a80ad0c3p-59'), float.fromhex('-0x1.b4eedfa1adc15p-116')),
])

PI_HI = float.fromhex('0x1.921fb54442d18p+1')
PI_LO = float.fromhex('0x1.1a62633145c07p-53')


@jit
def _horner(coeffs, yh, yl):
    n = coeffs.shape[0]
    ah = coeffs[n - 1, 0]
    al = coeffs[n - 1, 1]
    for k in range(n - 2, -1, -1):
        ah, al = dd_mul(ah, al, yh, yl)
        ah, al = dd_add(ah, al, coeffs[k, 0], coeffs[k, 1])
    return ah, al


@jit
def _reduce(xh, xl):
    """Return (k, yh, yl) with x = y + k/2 exactly, |y| <= 1/4, k in 0..3."""
    m = 2.0 * np.rint(0.5 * xh)
    rh = xh - m
    rh, rl = two_sum(rh, xl)
    q = np.rint(2.0 * rh)
    yh = rh - 0.5 * q
    yh, yl = two_sum(yh, rl)
    k = int(q) % 4
    return k, yh, yl


@jit
def _sin_poly(yh, yl):
    y2h, y2l = dd_mul(yh, yl, yh, yl)
    ph, pl = _horner(_SIN_COEFFS, y2h, y2l)
    return dd_mul(ph, pl, yh, yl)


@jit
def _cos_poly(yh, yl):
    y2h, y2l = dd_mul(yh, yl, yh, yl)
    return _horner(_COS_COEFFS, y2h, y2l)


@jit
def dd_sin_pi(xh, xl):
    if not math.isfinite(xh):
        return math.nan, math.nan
    k, yh, yl = _reduce(xh, xl)
    if k == 0:
        return _sin_poly(yh, yl)
    if k == 1:
        return _cos_poly(yh, yl)
    if k == 2:
        sh, sl = _sin_poly(yh, yl)
        return -sh, -sl
    ch, cl = _cos_poly(yh, yl)
    return -ch, -cl


@jit
def dd_cos_pi(xh, xl):
    if not math.isfinite(xh):
        return math.nan, math.nan
    k, yh, yl = _reduce(xh, xl)
    if k == 0:
        return _cos_poly(yh, yl)
    if k == 1:
        sh, sl = _sin_poly(yh, yl)
        return -sh, -sl
    if k == 2:
        ch, cl = _cos_poly(yh, yl)
        return -ch, -cl
    return _sin_poly(yh, yl)


# ---------------------------------------------------------------------------
# Scalar wrapper
# ---------------------------------------------------------------------------

Number = Union["ExtReal", float, int]


class ExtReal:
    """Immutable double-double scalar."""

    __slots__ = ("hi", "lo")

    def __init__(self, hi: float = 0.0, lo: float = 0.0):
        hi = float(hi)
        lo = float(lo)
        if lo != 0.0:
            hi, lo = two_sum(hi, lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "lo", lo)

    def __setattr__(self, name, value):
        raise AttributeError("ExtReal is immutable")

    # construction ---------------------------------------------------------

    @classmethod
    def coerce(cls, x) -> "ExtReal":
        if isinstance(x, ExtReal):
            return x
        if isinstance(x, float):
            return cls(x)
        if isinstance(x, int):
            hi = float(x)
            return cls(hi, float(x - int(hi)))
        if isinstance(x, (Fraction, Decimal, str)):
            return cls.from_exact(x)
        return cls(float(x))

    @classmethod
    def from_exact(cls, x) -> "ExtReal":
        """Nearest double-double to an exact rational, Decimal or decimal string."""
        if isinstance(x, str):
            with localcontext() as ctx:
                ctx.prec = 200
                x = Decimal(x)
        q = Fraction(x)
        hi = float(q)
        lo = float(q - Fraction(hi))
        return cls(hi, lo)

    # conversion -----------------------------------------------------------

    def __float__(self) -> float:
        return self.hi + self.lo

    def as_fraction(self) -> Fraction:
        return Fraction(self.hi) + Fraction(self.lo)

    def as_decimal(self) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = 1100
            return Decimal(self.hi) + Decimal(self.lo)

    def to_str(self, digits: int = 34) -> str:
        """Decimal string with at least ``digits`` significant digits that parses back exactly."""
        if self.hi == 0.0:
            return "0"
        exact = self.as_decimal()
        for d in range(digits, 1100):
            with localcontext() as ctx:
                ctx.prec = d + 2
                s = format(exact, f".{d - 1}e")
            if ExtReal.from_exact(s) == self:
                return s
        return format(exact, "e")

    def __repr__(self) -> str:
        return f"ExtReal({self.hi!r}, {self.lo!r})"

    def __str__(self) -> str:
        return self.to_str(32)

    # arithmetic -----------------------------------------------------------

    def __neg__(self):
        return ExtReal(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __abs__(self):
        return ExtReal(*dd_abs(self.hi, self.lo))

    def __add__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return _make(dd_add(self.hi, self.lo, o.hi, o.lo))

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return _make(dd_sub(self.hi, self.lo, o.hi, o.lo))

    def __rsub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return _make(dd_mul(self.hi, self.lo, o.hi, o.lo))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        if o.hi == 0.0:
            raise DomainError("division by zero")
        return _make(dd_div(self.hi, self.lo, o.hi, o.lo))

    def __rtruediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o / self

    # comparison -----------------------------------------------------------

    def _key(self):
        return (self.hi, self.lo)

    def __eq__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self.hi == o.hi and self.lo == o.lo

    def __hash__(self):
        return hash((self.hi, self.lo))

    def __lt__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self._key() < o._key()

    def __le__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self._key() <= o._key()

    def __gt__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self._key() > o._key()

    def __ge__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self._key() >= o._key()

    def __bool__(self):
        return self.hi != 0.0

    def is_integer(self) -> bool:
        return float(self.hi).is_integer() and float(self.lo).is_integer()


def _make(pair) -> ExtReal:
    r = ExtReal.__new__(ExtReal)
    object.__setattr__(r, "hi", float(pair[0]))
    object.__setattr__(r, "lo", float(pair[1]))
    return r


def _coerce_or_none(x):
    if isinstance(x, ExtReal):
        return x
    if isinstance(x, (int, float, Fraction, Decimal, np.floating, np.integer)):
        return ExtReal.coerce(x if not isinstance(x, (np.floating, np.integer)) else x.item())
    return None


ZERO = ExtReal(0.0)
ONE = ExtReal(1.0)


def arith(a: Number, b: Number, op: str) -> ExtReal:
    """Apply ``op`` (one of ``add``, ``sub``, ``mul``, ``div``) in double-double."""
    a = ExtReal.coerce(a)
    b = ExtReal.coerce(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def sqrt_ext(a: Number) -> ExtReal:
    a = ExtReal.coerce(a)
    if a.hi < 0.0:
        raise DomainError(f"sqrt of negative value {float(a)!r}")
    return _make(dd_sqrt(a.hi, a.lo))


def sin_pi(x: Number) -> ExtReal:
    """sin(pi*x); the argument is reduced modulo 2 before pi enters."""
    x = ExtReal.coerce(x)
    if not math.isfinite(x.hi):
        raise DomainError("sin_pi of non-finite value")
    return _make(dd_sin_pi(x.hi, x.lo))


def cos_pi(x: Number) -> ExtReal:
    x = ExtReal.coerce(x)
    if not math.isfinite(x.hi):
        raise DomainError("cos_pi of non-finite value")
    return _make(dd_cos_pi(x.hi, x.lo))


def pi() -> ExtReal:
    return ExtReal(PI_HI, PI_LO)
