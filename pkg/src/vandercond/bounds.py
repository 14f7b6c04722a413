"""Closed-form bounds on singular values and condition numbers.

All constants are evaluated in binary64.  The only exception is the exact
lower-bound mechanism, ``N -+ |D_n(tau/N)|``, which is evaluated in
double-double because it is compared against measured eigenvalues.

Every bound is carried as a :class:`BoundEntry` with an applicability flag
instead of being dropped when its preconditions fail.  Plots draw several
bounds outside their proven range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import PreconditionError
from .extprec import ExtReal
from .kernel import Bandwidth, dirichlet

TARGETS = ("cond", "sigma_min", "sigma_max", "norm_K", "norm_K_inv", "pinv_norm")
COLLIDING_TAU = math.sqrt(12.0 / math.pi ** 2 - 1.0)


@dataclass(frozen=True)
class BoundEntry:
    name: str
    kind: str  # "lower" or "upper"
    target: str
    value: float
    applicable: bool
    precondition_note: str = ""

    def holds(self, measured: float, rtol: float = 0.0) -> bool:
        """Whether ``measured`` respects this bound up to relative slack ``rtol``."""
        if self.kind == "upper":
            return measured <= self.value * (1.0 + rtol)
        return measured >= self.value * (1.0 - rtol)


@dataclass(frozen=True)
class BoundReport:
    entries: tuple[BoundEntry, ...]

    def __iter__(self):
        return iter(self.entries)

    def get(self, name: str) -> BoundEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(e.name == name for e in self.entries)

    def applicable(self, target: Optional[str] = None, kind: Optional[str] = None) -> list[BoundEntry]:
        return [
            e for e in self.entries
            if e.applicable and (target is None or e.target == target) and (kind is None or e.kind == kind)
        ]

    def is_consistent(self) -> bool:
        """Applicable lower cond bounds never exceed applicable upper cond bounds."""
        lo = [e.value for e in self.applicable("cond", "lower")]
        hi = [e.value for e in self.applicable("cond", "upper")]
        return not lo or not hi or max(lo) <= min(hi)

    def violations(self, measured: dict[str, float], rtol: float = 0.0) -> list[BoundEntry]:
        return [e for e in self.applicable() if e.target in measured and not e.holds(measured[e.target], rtol)]


def _entry(name, kind, target, value, applicable, note) -> BoundEntry:
    return BoundEntry(name, kind, target, float(value), bool(applicable), note)


def log_factor(M: int) -> float:
    """``log(floor(M/4)) + 1`` with the natural logarithm."""
    if M < 4:
        raise PreconditionError(f"log factor needs M >= 4, got {M}")
    return math.log(M // 4) + 1.0


# ---------------------------------------------------------------------------
# well separated nodes and the general lower bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WellSeparatedBounds:
    sigma_min_sq_lo: float
    sigma_max_sq_hi: float
    cond_sq_hi: float
    norm_K_hi: float
    norm_K_inv_hi: float
    applicable: bool


def well_separated_bounds(N: int, tau: float) -> WellSeparatedBounds:
    """Sandwich for ``tau > 1``; every value is NaN and the flag is False otherwise."""
    if not tau > 1.0:
        nan = math.nan
        return WellSeparatedBounds(nan, nan, nan, nan, nan, False)
    return WellSeparatedBounds(
        sigma_min_sq_lo=N * (1.0 - 1.0 / tau),
        sigma_max_sq_hi=N * (1.0 + 1.0 / tau),
        cond_sq_hi=1.0 + 2.0 / (tau - 1.0),
        norm_K_hi=N + N / tau,
        norm_K_inv_hi=1.0 / (N - N / tau),
        applicable=True,
    )


def is_half_integer(tau: float) -> bool:
    return tau > 0.0 and (tau - 0.5).is_integer()


@dataclass(frozen=True)
class LowerBounds:
    n_minus_d: ExtReal  # N - |D_n(tau/N)|, bounds sigma_min^2 from above
    n_plus_d: ExtReal  # N + |D_n(tau/N)|, bounds sigma_max^2 from below
    cond_sq_lo_exact: float
    cond_sq_lo_colliding: float  # NaN unless tau <= sqrt(12/pi^2 - 1)
    cond_lo_simple: float  # NaN unless tau <= 1
    cond_sq_lo_half_integer: float  # NaN unless tau in N + 1/2

    @property
    def sigma_min_sq_hi(self) -> float:
        return float(self.n_minus_d)

    @property
    def sigma_max_sq_lo(self) -> float:
        return float(self.n_plus_d)


def lower_bound(N: int, tau: float, gap=None) -> LowerBounds:
    """Lower bounds driven by the closest pair.

    ``gap`` is the minimal wrap distance itself (``tau/N``); pass it as an
    :class:`ExtReal` to keep the full double-double value of a measured
    configuration.
    """
    if not tau > 0.0:
        raise PreconditionError(f"tau must be positive, got {tau!r}")
    bw = Bandwidth.from_N(N)
    g = ExtReal(tau) / N if gap is None else ExtReal.coerce(gap)
    d = abs(dirichlet(bw, g))
    nm = ExtReal(N) - d
    np_ = ExtReal(N) + d
    exact = 1.0 + 2.0 * float(d) / float(nm)
    nan = math.nan
    return LowerBounds(
        n_minus_d=nm,
        n_plus_d=np_,
        cond_sq_lo_exact=exact,
        cond_sq_lo_colliding=12.0 / (math.pi ** 2 * tau ** 2) - 1.0 if tau <= COLLIDING_TAU else nan,
        cond_lo_simple=math.sqrt(6.0) / (math.pi * tau) if tau <= 1.0 else nan,
        cond_sq_lo_half_integer=1.0 + 2.0 / (math.pi * tau - 1.0) if is_half_integer(tau) else nan,
    )


# ---------------------------------------------------------------------------
# one nearly-colliding pair
# ---------------------------------------------------------------------------


def c_rho(rho: float) -> float:
    """Constant of the ``||K^{-1}||`` bound for one nearly-colliding pair, ``rho >= 5``."""
    if not rho >= 5.0:
        raise PreconditionError(f"C(rho) is defined for rho >= 5, got {rho!r}")
    pi = math.pi
    head = (2.0 * rho - 1.0) / (rho - 1.0) + math.sqrt(rho / (rho - 1.0))
    inner = 1.0 + pi ** 4 / (12.0 * rho ** 2) + 1.21 * pi / rho ** 3 + pi ** 4 / (180.0 * rho ** 4)
    return head / (2.0 - rho / (rho - 1.0) * inner)


def upper_one_pair(N: int, tau: float, rho: float) -> list[BoundEntry]:
    in_class = tau <= 1.0 and rho > 1.0
    cls_note = "" if in_class else "not a one-pair configuration (needs tau <= 1 < rho); "
    inv = c_rho(rho) / (N * tau ** 2) if rho >= 5.0 else math.nan
    return [
        _entry("onepair_norm_K", "upper", "norm_K", 2.3 * N, in_class and rho >= 6.0, cls_note + "needs rho >= 6"),
        _entry("onepair_norm_K_inv", "upper", "norm_K_inv", inv, in_class and rho >= 5.0, cls_note + "needs rho >= 5"),
        _entry("onepair_cond", "upper", "cond", 4.0 / tau, in_class and rho >= 6.0, cls_note + "needs rho >= 6, tau <= 1"),
    ]


# ---------------------------------------------------------------------------
# pairs of nearly-colliding nodes
# ---------------------------------------------------------------------------


def _check_pairwise_args(rho: float, c: float, M: int) -> None:
    if M < 4 or M % 2:
        raise PreconditionError(f"pairwise constants need even M >= 4, got {M}")
    if not c >= 1.0:
        raise PreconditionError(f"uniformity constant must be >= 1, got {c!r}")
    if not rho > 1.0:
        raise PreconditionError(f"rho must exceed 1, got {rho!r}")


def c_tilde(tau: float, rho: float, c: float, M: int) -> float:
    _check_pairwise_args(rho, c, M)
    pi = math.pi
    L = log_factor(M)
    c2 = c * c
    bracket = c2 * pi ** 2 * tau / 6.0 + c * pi * L / rho + c * pi ** 2 / (6.0 * rho ** 2)
    return (
        2.0
        - c2 * pi ** 2 * L / rho
        - c2 * pi ** 3 / (3.0 * rho ** 2)
        - 2.42 * c2 / rho ** 3
        - rho / (rho - 1.0) * bracket ** 2
    )


def _pairwise_head(rho: float) -> float:
    return 2.0 * rho / (rho - 1.0) + math.sqrt((rho + 1.0) / (rho - 1.0))


def c_pairwise(tau: float, rho: float, c: float, M: int) -> Optional[float]:
    """``C(tau, rho, c, M)``, or ``None`` when ``C~ <= 0`` voids the bound."""
    ct = c_tilde(tau, rho, c, M)
    if ct <= 0.0:
        return None
    return _pairwise_head(rho) / ct


def c_tilde_c1(rho: float, M: int) -> float:
    """Variant of ``C~`` for identical pair gaps (``c = 1``), free of ``tau``."""
    _check_pairwise_args(rho, 1.0, M)
    pi = math.pi
    L = log_factor(M)
    r1 = rho - 1.0
    return (
        2.0
        - pi ** 2 * L / rho
        - pi ** 3 / (3.0 * rho ** 2)
        - 2.42 / rho ** 3
        - rho / r1
        - 2.0 * pi * L / r1
        - pi ** 2 / (3.0 * rho * r1)
        - pi ** 2 * L ** 2 / (rho * r1)
        - pi ** 3 * L / (3.0 * rho ** 2 * r1)
        - pi ** 4 / (36.0 * rho ** 3 * r1)
    )


def c_pairwise_c1(rho: float, M: int) -> Optional[float]:
    ct = c_tilde_c1(rho, M)
    if ct <= 0.0:
        return None
    return _pairwise_head(rho) / ct


PAIRWISE_PINV_CONST = math.sqrt(11.3)


def upper_pairwise(N: int, tau: float, rho: float, c: float, M: int) -> list[BoundEntry]:
    _check_pairwise_args(rho, c, M)
    L = log_factor(M)
    in_class = c * tau <= 1.0
    cls_note = "" if in_class else "not a pairwise configuration (needs c tau <= 1); "
    C = c_pairwise(tau, rho, c, M) if tau <= 0.5 and rho >= 2.0 else None
    inv_ok = in_class and C is not None
    thm_ok = in_class and tau <= 1.0 / (4.0 * c * c) and rho >= 10.0 * c * c * L
    thm_note = cls_note + "needs tau <= 1/(4c^2), rho >= 10c^2(log floor(M/4)+1)"
    return [
        _entry("pairwise_norm_K", "upper", "norm_K", 2.0 * N * (rho + 1.0) / rho, in_class, cls_note),
        _entry("pairwise_norm_K_inv", "upper", "norm_K_inv", C / (N * tau ** 2) if C is not None else math.nan,
               inv_ok, cls_note + "needs C~ > 0, tau <= 1/2, rho >= 2"),
        _entry("pairwise_cond", "upper", "cond", 5.0 / tau, thm_ok, thm_note),
        _entry("pairwise_pinv", "upper", "pinv_norm", PAIRWISE_PINV_CONST / (tau * math.sqrt(N)), thm_ok, thm_note),
    ]


def upper_pairwise_c1(N: int, tau: float, rho: float, c: float, M: int) -> list[BoundEntry]:
    _check_pairwise_args(rho, c, M)
    L = log_factor(M)
    base_ok = c == 1.0 and tau <= 1.0
    note = "" if base_ok else "needs identical pair gaps (c = 1) and tau <= 1; "
    C = c_pairwise_c1(rho, M)
    return [
        _entry("pairwise_c1_norm_K_inv", "upper", "norm_K_inv",
               C / (N * tau ** 2) if C is not None else math.nan, base_ok and C is not None, note + "needs C~(rho, M) > 0"),
        _entry("pairwise_c1_cond", "upper", "cond", 5.0 / tau, base_ok and rho >= 25.0 * L,
               note + "needs rho >= 25(log floor(M/4)+1)"),
    ]


# ---------------------------------------------------------------------------
# bounds from earlier work used for comparison
# ---------------------------------------------------------------------------


def bdgy_coefficient(M: int, N: int) -> float:
    """``||A^+|| <= coefficient / (tau sqrt(N))`` for clustered nodes."""
    return (2.0 * (2.0 * math.pi) ** (M - 1) * float(M) ** (2 * M - 1) / math.pi
            * (N * math.sqrt(N)) / ((N - 1) * math.sqrt(N - 1)))


def lili_coefficient(M: int, N: int) -> float:
    return (20.0 * math.sqrt(2.0) / 19.0 / math.sqrt(1.0 - math.pi ** 2 / 12.0)
            * ((N - 1) / 2.0) / ((N - 1) // 2) * 4.0 / math.pi
            * math.sqrt(M) * math.sqrt(N) / math.sqrt(N - 1))


def lili_thresholds(M: int, N: int, rho: Optional[float] = None) -> tuple[float, float]:
    """Minimal admissible tau for the two comparison theorems, with ``rho = 2N/M`` by default."""
    r = 2.0 * N / M if rho is None else rho
    q = N / (N - 1.0)
    t1 = 20.0 ** 2 * M * 2.0 ** 5 * q ** 3 / r ** 2
    t2 = 1e4 * 2.0 ** 10 * M * q ** 5 / (r ** 4 * math.pi)
    return t1, t2


COMPARISONS = ("bdgy", "lili_thm1", "lili_thm2")


def comparison_bounds(M: int, N: int, tau: float, which: str) -> list[BoundEntry]:
    scale = 1.0 / (tau * math.sqrt(N))
    if which == "bdgy":
        return [_entry("bdgy", "upper", "pinv_norm", bdgy_coefficient(M, N) * scale, tau <= 1.0, "needs tau <= 1")]
    if which in ("lili_thm1", "lili_thm2"):
        t1, t2 = lili_thresholds(M, N)
        thr = t1 if which == "lili_thm1" else t2
        return [_entry(which, "upper", "pinv_norm", lili_coefficient(M, N) * scale, tau >= thr,
                       f"needs tau >= {thr!r} (rho = 2N/M)")]
    raise PreconditionError(f"unknown comparison {which!r}, expected one of {COMPARISONS}")


# ---------------------------------------------------------------------------
# full report
# ---------------------------------------------------------------------------


def lower_entries(N: int, tau: float, gap=None) -> list[BoundEntry]:
    lb = lower_bound(N, tau, gap)
    return [
        _entry("lower_sigma_min", "upper", "sigma_min", math.sqrt(lb.sigma_min_sq_hi), True, ""),
        _entry("lower_sigma_max", "lower", "sigma_max", math.sqrt(lb.sigma_max_sq_lo), True, ""),
        _entry("lower_cond_exact", "lower", "cond", math.sqrt(lb.cond_sq_lo_exact), True, ""),
        _entry("lower_cond_colliding", "lower", "cond",
               math.sqrt(max(lb.cond_sq_lo_colliding, 0.0)) if tau <= COLLIDING_TAU else math.nan,
               tau <= COLLIDING_TAU, "needs tau <= sqrt(12/pi^2 - 1)"),
        _entry("lower_cond_simple", "lower", "cond", math.sqrt(6.0) / (math.pi * tau), tau <= 1.0, "needs tau <= 1"),
        _entry("lower_cond_half_integer", "lower", "cond",
               math.sqrt(lb.cond_sq_lo_half_integer) if is_half_integer(tau) else math.nan,
               is_half_integer(tau), "needs tau in N + 1/2"),
    ]


def well_separated_entries(N: int, tau: float) -> list[BoundEntry]:
    ws = well_separated_bounds(N, tau)
    note = "needs tau > 1"
    sq = math.sqrt
    return [
        _entry("well_sigma_min", "lower", "sigma_min", sq(ws.sigma_min_sq_lo) if ws.applicable else math.nan, ws.applicable, note),
        _entry("well_sigma_max", "upper", "sigma_max", sq(ws.sigma_max_sq_hi) if ws.applicable else math.nan, ws.applicable, note),
        _entry("well_cond", "upper", "cond", sq(ws.cond_sq_hi) if ws.applicable else math.nan, ws.applicable, note),
        _entry("well_norm_K", "upper", "norm_K", ws.norm_K_hi, ws.applicable, note),
        _entry("well_norm_K_inv", "upper", "norm_K_inv", ws.norm_K_inv_hi, ws.applicable, note),
    ]


def bound_report(
    N: int,
    M: int,
    tau: float,
    rho: Optional[float] = None,
    c: Optional[float] = None,
    kind: Optional[str] = None,
    gap=None,
    comparisons: Iterable[str] = (),
) -> BoundReport:
    """Collect every bound meaningful for a configuration.

    ``kind`` is ``"one-pair"``, ``"pairwise"`` or anything else; it selects
    which structured bounds are evaluated (their own gating still applies).
    """
    entries = lower_entries(N, tau, gap) + well_separated_entries(N, tau)
    if kind == "one-pair" and rho is not None:
        entries += upper_one_pair(N, tau, rho)
    if kind == "pairwise" and rho is not None and c is not None and rho > 1.0:
        entries += upper_pairwise(N, tau, rho, c, M)
        entries += upper_pairwise_c1(N, tau, rho, c, M)
    for which in comparisons:
        entries += comparison_bounds(M, N, tau, which)
    return BoundReport(tuple(entries))
