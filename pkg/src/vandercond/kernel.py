"""Dirichlet kernel D_n(t) = sin(N pi t) / sin(pi t) and its derivatives.

Everything is evaluated in double-double.  Arguments are passed in units of
pi (the caller hands over ``t``, never ``pi * t``) so that the reduction
inside :func:`~vandercond.extprec.sin_pi` stays exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import PreconditionError
from .extprec import (
    ExtReal,
    PI_HI,
    PI_LO,
    _make,
    dd_add,
    dd_cos_pi,
    dd_div,
    dd_mul,
    dd_mul_d,
    dd_sin_pi,
    dd_sub,
    jit,
)


@dataclass(frozen=True)
class Bandwidth:
    """Polynomial degree ``n``; the number of frequencies is ``N = 2n + 1``."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise PreconditionError(f"degree must be a nonnegative integer, got {self.n!r}")

    @property
    def N(self) -> int:
        return 2 * self.n + 1

    @classmethod
    def from_N(cls, N: int) -> "Bandwidth":
        if N < 1 or N % 2 != 1:
            raise PreconditionError(f"N must be a positive odd integer, got {N!r}")
        return cls((N - 1) // 2)


# ---------------------------------------------------------------------------
# compiled kernels
# ---------------------------------------------------------------------------


# below this |N r| the quadratic Taylor polynomial at 0 is exact to double-double
TINY_NT = 1e-17


@jit
def _offset(xh, xl):
    """``x - round(x)``; D_n has period 1 for odd N."""
    k = np.floor(xh + 0.5)
    return dd_add(xh - k, 0.0, xl, 0.0) if k != 0.0 else (xh, xl)


@jit
def _d2_at_zero(N):
    # -pi^2 N (N^2 - 1) / 3
    p2h, p2l = dd_mul(PI_HI, PI_LO, PI_HI, PI_LO)
    qh, ql = dd_mul_d(p2h, p2l, N * (N * N - 1.0))
    qh, ql = dd_div(qh, ql, 3.0, 0.0)
    return -qh, -ql


@jit
def dd_dirichlet(N, xh, xl):
    rh, rl = _offset(xh, xl)
    if abs(N * rh) < TINY_NT:
        # N + D''(0) r^2 / 2
        ch, cl = _d2_at_zero(N)
        r2h, r2l = dd_mul(rh, rl, rh, rl)
        ch, cl = dd_mul(ch, cl, r2h, r2l)
        return dd_add(N, 0.0, 0.5 * ch, 0.5 * cl)
    sh, sl = dd_sin_pi(xh, xl)
    nh, nl = dd_mul_d(xh, xl, N)
    Sh, Sl = dd_sin_pi(nh, nl)
    return dd_div(Sh, Sl, sh, sl)


@jit
def _trig(N, xh, xl):
    nh, nl = dd_mul_d(xh, xl, N)
    Sh, Sl = dd_sin_pi(nh, nl)
    Ch, Cl = dd_cos_pi(nh, nl)
    sh, sl = dd_sin_pi(xh, xl)
    ch, cl = dd_cos_pi(xh, xl)
    return Sh, Sl, Ch, Cl, sh, sl, ch, cl


@jit
def _d1_numerator(N, Sh, Sl, Ch, Cl, sh, sl, ch, cl):
    # N cos(N pi t) sin(pi t) - sin(N pi t) cos(pi t)
    ah, al = dd_mul(Ch, Cl, sh, sl)
    ah, al = dd_mul_d(ah, al, N)
    bh, bl = dd_mul(Sh, Sl, ch, cl)
    return dd_sub(ah, al, bh, bl)


@jit
def dd_dirichlet_d1(N, xh, xl):
    rh, rl = _offset(xh, xl)
    if abs(N * rh) < TINY_NT:
        ch, cl = _d2_at_zero(N)
        return dd_mul(ch, cl, rh, rl)
    Sh, Sl, Ch, Cl, sh, sl, ch, cl = _trig(N, xh, xl)
    fh, fl = _d1_numerator(N, Sh, Sl, Ch, Cl, sh, sl, ch, cl)
    fh, fl = dd_mul(fh, fl, PI_HI, PI_LO)
    s2h, s2l = dd_mul(sh, sl, sh, sl)
    return dd_div(fh, fl, s2h, s2l)


@jit
def dd_dirichlet_d2(N, xh, xl):
    rh, rl = _offset(xh, xl)
    if abs(N * rh) < TINY_NT:
        return _d2_at_zero(N)
    Sh, Sl, Ch, Cl, sh, sl, ch, cl = _trig(N, xh, xl)
    fh, fl = _d1_numerator(N, Sh, Sl, Ch, Cl, sh, sl, ch, cl)
    s2h, s2l = dd_mul(sh, sl, sh, sl)
    # sin(N pi t) sin(pi t)^2 (1 - N^2) - 2 f cos(pi t)
    ah, al = dd_mul(Sh, Sl, s2h, s2l)
    ah, al = dd_mul_d(ah, al, 1.0 - N * N)
    bh, bl = dd_mul(fh, fl, ch, cl)
    bh, bl = dd_mul_d(bh, bl, 2.0)
    nh, nl = dd_sub(ah, al, bh, bl)
    p2h, p2l = dd_mul(PI_HI, PI_LO, PI_HI, PI_LO)
    nh, nl = dd_mul(nh, nl, p2h, p2l)
    s3h, s3l = dd_mul(s2h, s2l, sh, sl)
    return dd_div(nh, nl, s3h, s3l)


@jit
def dirichlet_array(N, xh, xl):
    """Elementwise D_n over double-double arrays ``xh + xl``."""
    out_h = np.empty_like(xh)
    out_l = np.empty_like(xh)
    for i in range(xh.size):
        out_h.flat[i], out_l.flat[i] = dd_dirichlet(N, xh.flat[i], xl.flat[i])
    return out_h, out_l


# ---------------------------------------------------------------------------
# scalar API
# ---------------------------------------------------------------------------


def dirichlet(bw: Bandwidth, t) -> ExtReal:
    t = ExtReal.coerce(t)
    return _make(dd_dirichlet(float(bw.N), t.hi, t.lo))


def dirichlet_d1(bw: Bandwidth, t) -> ExtReal:
    t = ExtReal.coerce(t)
    return _make(dd_dirichlet_d1(float(bw.N), t.hi, t.lo))


def dirichlet_d2(bw: Bandwidth, t) -> ExtReal:
    t = ExtReal.coerce(t)
    return _make(dd_dirichlet_d2(float(bw.N), t.hi, t.lo))


@dataclass(frozen=True)
class KernelEnvelopes:
    """Analytic envelopes of D_n at a point; ``None`` where ``t`` is out of range.

    ``lower_taylor <= D_n(t) <= upper_taylor`` for ``|t| <= 1/N``; ``abs_bound``,
    ``d1_bound`` and ``d2_bound`` bound ``|D_n|``, ``|D_n'|`` and ``|D_n''|`` for
    ``0 < |t| <= 1/2``.
    """

    t: float
    N: int
    lower_taylor: Optional[float]
    upper_taylor: Optional[float]
    abs_bound: Optional[float]
    d1_bound: Optional[float]
    d2_bound: Optional[float]

    def require(self, name: str) -> float:
        value = getattr(self, name)
        if value is None:
            rng = "|t| <= 1/N" if name.endswith("taylor") else "0 < |t| <= 1/2"
            raise PreconditionError(f"envelope {name!r} requires {rng}, got t={self.t!r}, N={self.N}")
        return value


def kernel_envelopes(bw: Bandwidth, t: float) -> KernelEnvelopes:
    N = bw.N
    a = abs(float(t))
    taylor_ok = a <= 1.0 / N
    mag_ok = 0.0 < a <= 0.5
    if not (taylor_ok or mag_ok):
        raise PreconditionError(
            f"t={t!r} outside every envelope range (taylor: |t| <= 1/N, magnitude: 0 < |t| <= 1/2)"
        )
    lower = upper = abs_b = d1 = d2 = None
    if taylor_ok:
        lower = N - (math.pi ** 2 / 6.0) * N ** 3 * a * a
        upper = N - N ** 3 * a * a
    if mag_ok:
        # N^2 (pi/(2N|t|) + 1/(2N^2 t^2)) and N^3 (...) expanded; overflow saturates to inf
        ia = 1.0 / a if a > 1e-300 else math.inf
        abs_b = 0.5 * ia
        d1 = 0.5 * math.pi * N * ia + 0.5 * ia * ia
        d2 = 0.5 * math.pi ** 2 * N * N * ia + math.pi * N * ia * ia + ia * ia * ia
    return KernelEnvelopes(float(t), N, lower, upper, abs_b, d1, d2)
