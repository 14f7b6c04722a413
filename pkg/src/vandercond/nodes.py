"""Node sets on the torus, separation statistics and the randomized generators.

Positions ``t_j`` live in ``[0, 1)`` and are stored as double-double values so
that pair gaps down to ``1e-11 / N`` survive next to positions close to 1.

Random streams
--------------
Every generator is a pure function of its parameters and a 64-bit seed.  The
seed keys numpy's Philox-4x64-10 counter generator directly (``key=seed``,
counter 0), and uniforms come from ``Generator.random`` (53-bit doubles in
``[0, 1)``).  Per-trial seeds are derived with :func:`split_seed`, a
SplitMix64 mix of the base seed and the trial index.  Draws happen in the
order documented on each generator.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ClassificationError, PreconditionError
from .extprec import ExtReal, _make, dd_abs, dd_add, dd_div, dd_mul_d, dd_sub, jit
from .kernel import Bandwidth

MASK64 = (1 << 64) - 1

Pairing = tuple[tuple[int, int], ...]


# ---------------------------------------------------------------------------
# random streams
# ---------------------------------------------------------------------------


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def split_seed(seed: int, index: int) -> int:
    """Child seed number ``index`` of ``seed``: ``splitmix64(splitmix64(seed) + index)``."""
    return splitmix64((splitmix64(seed & MASK64) + index) & MASK64)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed & MASK64))


def log_uniform_tau(rng: np.random.Generator) -> float:
    """tau = 10**(-11 u), u uniform in [0, 1), i.e. tau in (1e-11, 1]."""
    return 10.0 ** (-11.0 * rng.random())


def uniform_open_closed(rng: np.random.Generator, lo: float, hi: float) -> float:
    """Uniform sample from ``(lo, hi]``."""
    return lo + (hi - lo) * (1.0 - rng.random())


# ---------------------------------------------------------------------------
# data model
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NodeSet:
    """Sorted positions ``t_1 < ... < t_M`` in ``[0, 1)`` with a bandwidth.

    ``pairing`` optionally records which (sorted) indices a generator placed
    as nearly-colliding pairs; it is metadata, not part of the node set's
    identity.
    """

    bw: Bandwidth
    t: tuple[ExtReal, ...]
    pairing: Optional[Pairing] = field(default=None)

    def __post_init__(self):
        if len(self.t) < 1:
            raise PreconditionError("a node set needs at least one node")
        for a, b in zip(self.t, self.t[1:]):
            if not a < b:
                raise PreconditionError("node positions must be strictly increasing")
        if self.t[0] < 0.0 or self.t[-1] >= 1.0:
            raise PreconditionError("node positions must lie in [0, 1)")
        if self.bw.N <= self.M:
            raise PreconditionError(f"need N > M, got N={self.bw.N}, M={self.M}")

    @classmethod
    def from_positions(
        cls, positions: Iterable, N: int, pairing: Optional[Sequence[Sequence[int]]] = None
    ) -> "NodeSet":
        """Build from unsorted positions; a pairing refers to the input order."""
        pos = [ExtReal.coerce(p) for p in positions]
        order = sorted(range(len(pos)), key=lambda i: pos[i])
        rank = {old: new for new, old in enumerate(order)}
        pairs = None
        if pairing is not None:
            pairs = _canonical_pairs((rank[a], rank[b]) for a, b in pairing)
        return cls(Bandwidth.from_N(N), tuple(pos[i] for i in order), pairs)

    @property
    def M(self) -> int:
        return len(self.t)

    @property
    def N(self) -> int:
        return self.bw.N

    def hi_lo(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.array([x.hi for x in self.t]), np.array([x.lo for x in self.t]))

    def __eq__(self, other):
        if not isinstance(other, NodeSet):
            return NotImplemented
        return self.bw == other.bw and self.t == other.t

    def __hash__(self):
        return hash((self.bw, self.t))


def _canonical_pairs(pairs: Iterable[tuple[int, int]]) -> Pairing:
    return tuple(sorted(tuple(sorted(p)) for p in pairs))


# ---------------------------------------------------------------------------
# wrap-around metric
# ---------------------------------------------------------------------------


@jit
def dd_wrap_distance(ah, al, bh, bl):
    dh, dl = dd_sub(ah, al, bh, bl)
    dh, dl = dd_abs(dh, dl)
    # reduce into [0, 1) first; positions outside [0, 1) are tolerated here
    k = math.floor(dh)
    if k != 0.0:
        dh, dl = dd_add(dh, dl, -k, 0.0)
    if dh > 0.5 or (dh == 0.5 and dl > 0.0):
        dh, dl = dd_sub(1.0, 0.0, dh, dl)
    return dh, dl


@jit
def _distance_matrix(th, tl, N):
    M = th.shape[0]
    out_h = np.zeros((M, M))
    out_l = np.zeros((M, M))
    for i in range(M):
        for j in range(i + 1, M):
            dh, dl = dd_wrap_distance(th[i], tl[i], th[j], tl[j])
            dh, dl = dd_mul_d(dh, dl, N)
            out_h[i, j] = dh
            out_h[j, i] = dh
            out_l[i, j] = dl
            out_l[j, i] = dl
    return out_h, out_l


def wrap_distance_ext(a, b) -> ExtReal:
    a = ExtReal.coerce(a)
    b = ExtReal.coerce(b)
    return _make(dd_wrap_distance(a.hi, a.lo, b.hi, b.lo))


def wrap_distance(a, b) -> float:
    """min over integers r of |a - b + r|, evaluated in double-double and rounded."""
    return float(wrap_distance_ext(a, b))


def normalized_distances(ns: NodeSet) -> tuple[np.ndarray, np.ndarray]:
    """``N * |t_i - t_j|_T`` for all pairs as a double-double matrix (hi, lo)."""
    th, tl = ns.hi_lo()
    return _distance_matrix(th, tl, float(ns.N))


# ---------------------------------------------------------------------------
# separation statistics and classification
# ---------------------------------------------------------------------------


class ConfigKind(enum.Enum):
    WELL_SEPARATED = "well-separated"
    ONE_PAIR = "one-pair"
    PAIRWISE = "pairwise"
    GENERAL = "general"


@dataclass(frozen=True)
class SeparationStats:
    """Normalized separations of a node set.

    ``tau`` is N times the minimal wrap distance.  ``rho`` is N times the
    minimal distance between nodes that are not designated partners
    (``inf`` when no such distance exists).  ``c`` is the ratio of largest
    to smallest partner gap.  ``min_gap`` keeps the minimal unnormalized
    distance in double-double for exact kernel evaluations.
    """

    tau: float
    rho: float
    c: Optional[float]
    pairing: Optional[Pairing]
    min_gap: ExtReal
    N: int
    M: int


@dataclass(frozen=True)
class ConfigClass:
    kind: ConfigKind
    tau: float
    rho: float
    c: Optional[float] = None
    pairing: Optional[Pairing] = None


def separation_stats(ns: NodeSet, pairing: Optional[Sequence[Sequence[int]]] = None) -> SeparationStats:
    """Statistics of ``ns`` with ``pairing`` (sorted indices) as designated partners."""
    M = ns.M
    if M < 2:
        raise PreconditionError("separation statistics need at least two nodes")
    pairs = _canonical_pairs(pairing) if pairing else None
    if pairs:
        seen = [i for p in pairs for i in p]
        if len(seen) != len(set(seen)) or min(seen) < 0 or max(seen) >= M:
            raise PreconditionError(f"invalid pairing {pairs!r} for M={M}")
    dh, dl = normalized_distances(ns)
    iu = np.triu_indices(M, 1)
    k = int(np.argmin(dh[iu] + dl[iu]))
    i0, j0 = int(iu[0][k]), int(iu[1][k])
    min_gap = wrap_distance_ext(ns.t[i0], ns.t[j0])
    tau = float(dh[i0, j0] + dl[i0, j0])

    mask = np.ones((M, M), dtype=bool)
    np.fill_diagonal(mask, False)
    c = None
    if pairs:
        gaps = []
        for a, b in pairs:
            mask[a, b] = mask[b, a] = False
            gaps.append(ExtReal(dh[a, b], dl[a, b]))
        c = float(max(gaps) / min(gaps))
    rest = dh[mask] + dl[mask]
    rho = float(rest.min()) if rest.size else math.inf
    return SeparationStats(tau, rho, c, pairs, min_gap, ns.N, M)


def _close_pairs(ns: NodeSet) -> list[tuple[int, int]]:
    dh, dl = normalized_distances(ns)
    M = ns.M
    close = []
    for i in range(M):
        for j in range(i + 1, M):
            if ExtReal(dh[i, j], dl[i, j]) <= 1.0:
                close.append((i, j))
    return close


def classify(
    ns: NodeSet, pairing_hint: Optional[Sequence[Sequence[int]]] = None
) -> tuple[ConfigClass, SeparationStats]:
    """Most specific configuration class of ``ns`` and its separation statistics.

    Without a hint, partners are found by matching every node to the
    neighbours within distance ``1/N``; a node with two such neighbours makes
    the pairing ambiguous.  A one-pair set with ``M = 2`` has ``rho = inf``.
    Sets that are neither well separated nor fit a pair definition come back
    as ``GENERAL``.
    """
    if ns.M < 2:
        raise PreconditionError("classification needs at least two nodes")
    if pairing_hint is not None:
        pairs = list(_canonical_pairs(pairing_hint))
    else:
        pairs = _close_pairs(ns)
        partner: dict[int, int] = {}
        for a, b in pairs:
            for x, y in ((a, b), (b, a)):
                if x in partner:
                    trio = tuple(sorted({x, y, partner[x]}))
                    raise ClassificationError(
                        f"ambiguous pairing: node {x} has two neighbours within 1/N, offending triple {trio}"
                    )
                partner[x] = y

    stats = separation_stats(ns, pairs or None)
    if not pairs:
        kind = ConfigKind.WELL_SEPARATED if stats.tau > 1.0 else ConfigKind.GENERAL
        return ConfigClass(kind, stats.tau, stats.rho), stats

    pair_taus = []
    dh, dl = normalized_distances(ns)
    for a, b in pairs:
        pair_taus.append(ExtReal(dh[a, b], dl[a, b]))
    close = all(g <= 1.0 for g in pair_taus)

    if len(pairs) == 1 and close and stats.rho > 1.0:
        return ConfigClass(ConfigKind.ONE_PAIR, stats.tau, stats.rho, None, stats.pairing), stats
    perfect = 2 * len(pairs) == ns.M
    if perfect and ns.M >= 4 and close and stats.rho > 1.0 and stats.c * stats.tau <= 1.0:
        return ConfigClass(ConfigKind.PAIRWISE, stats.tau, stats.rho, stats.c, stats.pairing), stats
    if stats.tau > 1.0:
        return ConfigClass(ConfigKind.WELL_SEPARATED, stats.tau, stats.tau), stats
    return ConfigClass(ConfigKind.GENERAL, stats.tau, stats.rho, stats.c, stats.pairing), stats


def block_order(pairing: Pairing) -> list[int]:
    """Node order ``[first of every pair] + [second of every pair]`` for the pairwise partition."""
    return [a for a, _ in pairing] + [b for _, b in pairing]


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def _dd_div(x: float, N: int) -> ExtReal:
    return _make(dd_div(float(x), 0.0, float(N), 0.0))


def _chain(N: int, gaps: Sequence[float]) -> list[ExtReal]:
    """Positions 0, g_1/N, g_1/N + g_2/N, ... accumulated in double-double."""
    pos = [ExtReal(0.0)]
    for g in gaps:
        pos.append(pos[-1] + _dd_div(g, N))
    return pos


def gen_one_pair(M: int, seed: int) -> NodeSet:
    """One nearly-colliding pair followed by ``M - 2`` well-separated nodes.

    ``N = 1 + 12 (M - 1)``; draws tau, then rho_3, ..., rho_M uniform in (6, 12].
    """
    if M < 3:
        raise PreconditionError(f"gen_one_pair needs M >= 3, got {M}")
    rng = make_rng(seed)
    N = 1 + 12 * (M - 1)
    tau = log_uniform_tau(rng)
    rhos = [uniform_open_closed(rng, 6.0, 12.0) for _ in range(3, M + 1)]
    pos = _chain(N, [tau] + rhos)
    return NodeSet(Bandwidth.from_N(N), tuple(pos), ((0, 1),))


def pairwise_parameters(M: int, c: float) -> tuple[float, float, int]:
    """``(tau_max, rho_min, N)`` used by :func:`gen_pairwise`."""
    tau_max = 1.0 / (4.0 * c * c)
    rho_min = 10.0 * c * c * (math.log(M // 4) + 1.0)
    bound = (c * tau_max + 2.0 * rho_min) * M / 2.0
    N = math.floor(bound) + 1
    if N % 2 == 0:
        N += 1
    return tau_max, rho_min, N


def gen_pairwise(M: int, c: float, seed: int) -> NodeSet:
    """Interleaved pairs: gaps alternate tau_j (pair) and rho_j (between pairs).

    Draws tau, then for j = 3..M one value each: rho_j uniform in
    (rho_min, 2 rho_min] for odd j, tau_j uniform in (tau, c tau] for even j.
    The pairing is (1,2), (3,4), ... in sorted order.
    """
    if M < 4 or M % 2:
        raise PreconditionError(f"gen_pairwise needs even M >= 4, got {M}")
    if c < 1.0:
        raise PreconditionError(f"uniformity constant must be >= 1, got {c}")
    rng = make_rng(seed)
    _, rho_min, N = pairwise_parameters(M, c)
    tau = log_uniform_tau(rng)
    gaps = [tau]
    for j in range(3, M + 1):
        if j % 2:
            gaps.append(uniform_open_closed(rng, rho_min, 2.0 * rho_min))
        else:
            gaps.append(uniform_open_closed(rng, tau, c * tau))
    pos = _chain(N, gaps)
    pairing = tuple((2 * k, 2 * k + 1) for k in range(M // 2))
    return NodeSet(Bandwidth.from_N(N), tuple(pos), pairing)


BDGY_N = 1001
BDGY_RHO_MIN = 12.0


def gen_compare_bdgy(seed: int) -> NodeSet:
    """Three nodes within an arc of length 1/18: {0, tau/N, (tau + rho)/N}, N = 1001.

    Draws tau, then rho uniform in (12, N/18 - tau].
    """
    rng = make_rng(seed)
    M = 3
    N = BDGY_N
    tau = log_uniform_tau(rng)
    rho = uniform_open_closed(rng, BDGY_RHO_MIN, N / (2.0 * M * M) - tau)
    pos = _chain(N, [tau, rho])
    return NodeSet(Bandwidth.from_N(N), tuple(pos), ((0, 1),))


LILI_N = 2 ** 15 + 1


def gen_compare_lili(M: int, seed: int) -> NodeSet:
    """Equispaced anchors (2j - 2)/M, each with a partner tau/N to its right; N = 2**15 + 1.

    Draws tau only.  Anchors and the gap are rounded to binary64 so every
    pair gap is exactly the same double-double value.
    """
    if M < 2 or M % 2:
        raise PreconditionError(f"gen_compare_lili needs even M, got {M}")
    rng = make_rng(seed)
    N = LILI_N
    tau = log_uniform_tau(rng)
    gap = tau / N
    pos = []
    for j in range(M // 2):
        a = (2.0 * j) / M
        pos.append(ExtReal(a))
        pos.append(ExtReal(a) + gap)
    pairing = tuple((2 * k, 2 * k + 1) for k in range(M // 2))
    return NodeSet(Bandwidth.from_N(N), tuple(pos), pairing)


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

_HEADER = re.compile(r"^#\s*N=(\d+)\s+M=(\d+)\s*$")


def format_nodes(ns: NodeSet) -> str:
    lines = [f"# N={ns.N} M={ns.M}"]
    lines.extend(x.to_str(34) for x in ns.t)
    return "\n".join(lines) + "\n"


def parse_nodes(text: str) -> NodeSet:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise PreconditionError("empty node file")
    m = _HEADER.match(lines[0])
    if not m:
        raise PreconditionError(f"bad node file header {lines[0]!r}, expected '# N=<odd int> M=<int>'")
    N, M = int(m.group(1)), int(m.group(2))
    values = [ExtReal.from_exact(s) for s in lines[1:]]
    if len(values) != M:
        raise PreconditionError(f"header announces M={M} but file holds {len(values)} positions")
    return NodeSet(Bandwidth.from_N(N), tuple(values))


def write_nodes(ns: NodeSet, path) -> None:
    Path(path).write_text(format_nodes(ns))


def read_nodes(path) -> NodeSet:
    return parse_nodes(Path(path).read_text())
