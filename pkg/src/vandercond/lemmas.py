"""Randomized checks of the auxiliary matrix inequalities and kernel envelopes.

Each check draws its own sample, counts violations and records the worst
relative excess.  Nothing is raised on failure.  The CLI ``selftest`` and
the test-suite read the returned report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .kernel import Bandwidth, dd_dirichlet, dd_dirichlet_d1, dd_dirichlet_d2, kernel_envelopes
from .nodes import gen_one_pair, gen_pairwise, make_rng, split_seed
from .spectral import build_gram, partition_gram, schur_decompose

# binary64 slack: several inequalities are equalities for some inputs
FLOAT_RTOL = 1e-9
SCHUR_RTOL = 1e-20


@dataclass
class LemmaCheck:
    name: str
    trials: int = 0
    violations: int = 0
    worst: float = -math.inf  # largest (lhs - rhs) / scale seen

    @property
    def passed(self) -> bool:
        return self.trials > 0 and self.violations == 0

    def record(self, lhs: float, rhs: float, scale: float, rtol: float) -> None:
        self.trials += 1
        excess = (lhs - rhs) / scale
        self.worst = max(self.worst, excess)
        if excess > rtol:
            self.violations += 1


@dataclass
class LemmaReport:
    checks: list[LemmaCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def get(self, name: str) -> LemmaCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def lines(self) -> list[str]:
        return [
            f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.trials} trials, {c.violations} violations, "
            f"worst excess {c.worst:.3e}"
            for c in self.checks
        ]


def _norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2)) if a.size else 0.0


def _random_complex(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    return rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))


def _random_spd(rng: np.random.Generator, n: int, cond: float) -> np.ndarray:
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = np.exp(rng.uniform(0.0, math.log(cond), n))
    return (q * lam) @ q.T


def check_envelopes(points: int, rng: np.random.Generator) -> tuple[LemmaCheck, LemmaCheck]:
    """Taylor sandwich on ``|t| <= 1/N`` and magnitude bounds on ``0 < |t| <= 1/2``."""
    taylor = LemmaCheck("kernel taylor sandwich")
    mag = LemmaCheck("kernel magnitude bounds")
    ns = (1, 5, 50, 500)
    per = max(1, points // len(ns))
    for n in ns:
        bw = Bandwidth(n)
        N = float(bw.N)
        ts = np.concatenate([rng.uniform(0.0, 1.0 / N, per), [0.0, 1.0 / N]])
        for t in ts:
            env = kernel_envelopes(bw, t)
            d = sum(dd_dirichlet(N, t, 0.0))
            taylor.record(env.lower_taylor, d, N, FLOAT_RTOL)
            taylor.record(d, env.upper_taylor, N, FLOAT_RTOL)
        ts = np.concatenate([rng.uniform(0.0, 0.5, per), [0.5, 1.0 / N, 1e-9]])
        ts = ts[ts > 0.0]
        for t in ts:
            env = kernel_envelopes(bw, t)
            for value, bound in (
                (dd_dirichlet(N, t, 0.0), env.abs_bound),
                (dd_dirichlet_d1(N, t, 0.0), env.d1_bound),
                (dd_dirichlet_d2(N, t, 0.0), env.d2_bound),
            ):
                mag.record(abs(sum(value)), bound, bound, FLOAT_RTOL)
    return taylor, mag


def check_domination(samples: int, rng: np.random.Generator) -> LemmaCheck:
    chk = LemmaCheck("entrywise domination")
    for _ in range(samples):
        m, n = rng.integers(1, 9, size=2)
        a = _random_complex(rng, m, n)
        dom = np.abs(a) + rng.exponential(0.5, (m, n)) * (rng.random((m, n)) < 0.5)
        rhs = _norm(dom)
        chk.record(_norm(a), rhs, rhs, FLOAT_RTOL)
    return chk


def check_neumann(samples: int, rng: np.random.Generator) -> LemmaCheck:
    chk = LemmaCheck("neumann inverse bound")
    for _ in range(samples):
        n = int(rng.integers(1, 9))
        a = _random_spd(rng, n, 1e3)
        na = _norm(a)
        eta = na * rng.uniform(1.0 + 1e-6, 3.0)
        rhs = 1.0 / (eta - _norm(eta * np.eye(n) - a))
        chk.record(_norm(np.linalg.inv(a)), rhs, rhs, FLOAT_RTOL)
    return chk


def check_interlacing(samples: int, rng: np.random.Generator) -> LemmaCheck:
    chk = LemmaCheck("cauchy interlacing")
    for _ in range(samples):
        n = int(rng.integers(2, 10))
        h = _random_complex(rng, n, n)
        h = (h + h.conj().T) / 2.0
        k = int(rng.integers(1, n))
        idx = np.sort(rng.choice(n, size=k, replace=False))
        lp = np.linalg.eigvalsh(h)
        lb = np.linalg.eigvalsh(h[np.ix_(idx, idx)])
        scale = max(_norm(h), 1e-300)
        worst = max(np.max(lp[:k] - lb), np.max(lb - lp[n - k:]))
        chk.record(worst, 0.0, scale, FLOAT_RTOL)
    return chk


def check_block_gerschgorin(samples: int, rng: np.random.Generator) -> tuple[LemmaCheck, LemmaCheck]:
    off = LemmaCheck("off-diagonal block norm")
    tri = LemmaCheck("unit triangular block norm")
    for i in range(samples):
        m, n = rng.integers(1, 7, size=2)
        a = _random_complex(rng, m, n) * (0.0 if i == 0 else rng.exponential(1.0))
        na = _norm(a)
        big = np.block([[np.zeros((n, n)), a.conj().T], [a, np.zeros((m, m))]])
        off.record(_norm(big), na, max(na, 1.0), FLOAT_RTOL)
        low = np.block([[np.eye(n), np.zeros((n, m))], [a, np.eye(m)]])
        rhs = 1.0 + na + na * na
        tri.record(_norm(low) ** 2, rhs, rhs, FLOAT_RTOL)
    return off, tri


def check_schur(samples: int, seed: int) -> LemmaCheck:
    chk = LemmaCheck("schur reconstruction")
    for i in range(samples):
        s = split_seed(seed, i)
        rng = make_rng(s)
        if i % 2:
            ns = gen_one_pair(int(rng.integers(3, 9)), s)
        else:
            ns = gen_pairwise(2 * int(rng.integers(2, 5)), 2.0, s)
        G = build_gram(ns)
        pg = partition_gram(G, ns.pairing)
        normK = _norm(G.K.to_float())
        for pivot in ("upper", "lower"):
            chk.record(schur_decompose(pg, pivot).residual(), 0.0, normK, SCHUR_RTOL)
    return chk


def check_lemmas(samples: int = 1000, grid_points: int = 3000, schur_samples: int = 100,
                          seed: int = 0) -> LemmaReport:
    if samples < 1 or grid_points < 1 or schur_samples < 1:
        raise PreconditionError("sample counts must be positive")
    rng = make_rng(seed)
    report = LemmaReport()
    report.checks.extend(check_envelopes(grid_points, rng))
    report.checks.append(check_domination(samples, rng))
    report.checks.append(check_neumann(samples, rng))
    report.checks.append(check_schur(schur_samples, split_seed(seed, 1)))
    report.checks.append(check_interlacing(samples, rng))
    report.checks.extend(check_block_gerschgorin(samples, rng))
    return report
