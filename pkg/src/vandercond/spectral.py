"""Vandermonde and Gram matrices, Jacobi solvers and Schur complements.

Condition numbers come from the M x M Gram matrix ``K = A A^*`` whose entries
are Dirichlet kernel values.  Its eigenvalues are computed by cyclic
two-sided Jacobi in double-double, which keeps high relative accuracy for the
tiny eigenvalue of nearly-colliding configurations (``cond(K)`` reaches about
``1e22`` in the experiments).  A binary64 one-sided Jacobi SVD of the
materialized ``M x N`` Vandermonde matrix serves as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, PreconditionError, SolverError
from .extprec import (
    ExtReal,
    _make,
    dd_abs,
    dd_add,
    dd_cos_pi,
    dd_div,
    dd_mul,
    dd_mul_d,
    dd_sin_pi,
    dd_sqrt,
    dd_sub,
    jit,
    two_sum,
)
from .kernel import Bandwidth, dd_dirichlet
from .nodes import NodeSet, Pairing, block_order

JACOBI_TOL = 1e-60
JACOBI_MAX_SWEEPS = 60
SVD_MAX_N = 2 ** 16
SVD_MAX_M = 512


# ---------------------------------------------------------------------------
# double-double matrices
# ---------------------------------------------------------------------------


@jit
def _dd_matmul(Ah, Al, Bh, Bl):
    n, k = Ah.shape
    m = Bh.shape[1]
    Ch = np.zeros((n, m))
    Cl = np.zeros((n, m))
    for i in range(n):
        for j in range(m):
            sh = 0.0
            sl = 0.0
            for r in range(k):
                ph, pl = dd_mul(Ah[i, r], Al[i, r], Bh[r, j], Bl[r, j])
                sh, sl = dd_add(sh, sl, ph, pl)
            Ch[i, j] = sh
            Cl[i, j] = sl
    return Ch, Cl


@jit
def _dd_elementwise_add(Ah, Al, Bh, Bl, sign):
    Ch = np.empty_like(Ah)
    Cl = np.empty_like(Ah)
    for i in range(Ah.size):
        Ch.flat[i], Cl.flat[i] = dd_add(Ah.flat[i], Al.flat[i], sign * Bh.flat[i], sign * Bl.flat[i])
    return Ch, Cl


@jit
def _dd_lu(Ah, Al):
    """In-place LU with partial pivoting; returns (LU_h, LU_l, perm, sign)."""
    n = Ah.shape[0]
    Uh = Ah.copy()
    Ul = Al.copy()
    perm = np.arange(n)
    sign = 1.0
    for k in range(n):
        piv = k
        best = abs(Uh[k, k])
        for i in range(k + 1, n):
            if abs(Uh[i, k]) > best:
                best = abs(Uh[i, k])
                piv = i
        if best == 0.0:
            return Uh, Ul, perm, 0.0
        if piv != k:
            for j in range(n):
                Uh[k, j], Uh[piv, j] = Uh[piv, j], Uh[k, j]
                Ul[k, j], Ul[piv, j] = Ul[piv, j], Ul[k, j]
            perm[k], perm[piv] = perm[piv], perm[k]
            sign = -sign
        for i in range(k + 1, n):
            fh, fl = dd_div(Uh[i, k], Ul[i, k], Uh[k, k], Ul[k, k])
            Uh[i, k] = fh
            Ul[i, k] = fl
            for j in range(k + 1, n):
                ph, pl = dd_mul(fh, fl, Uh[k, j], Ul[k, j])
                Uh[i, j], Ul[i, j] = dd_sub(Uh[i, j], Ul[i, j], ph, pl)
    return Uh, Ul, perm, sign


@jit
def _dd_lu_solve(LUh, LUl, perm, Bh, Bl):
    n = LUh.shape[0]
    m = Bh.shape[1]
    Xh = np.empty((n, m))
    Xl = np.empty((n, m))
    for c in range(m):
        yh = np.empty(n)
        yl = np.empty(n)
        for i in range(n):
            sh = Bh[perm[i], c]
            sl = Bl[perm[i], c]
            for j in range(i):
                ph, pl = dd_mul(LUh[i, j], LUl[i, j], yh[j], yl[j])
                sh, sl = dd_sub(sh, sl, ph, pl)
            yh[i] = sh
            yl[i] = sl
        for i in range(n - 1, -1, -1):
            sh = yh[i]
            sl = yl[i]
            for j in range(i + 1, n):
                ph, pl = dd_mul(LUh[i, j], LUl[i, j], Xh[j, c], Xl[j, c])
                sh, sl = dd_sub(sh, sl, ph, pl)
            Xh[i, c], Xl[i, c] = dd_div(sh, sl, LUh[i, i], LUl[i, i])
    return Xh, Xl


@dataclass(frozen=True, eq=False)
class DDMatrix:
    """Dense double-double matrix stored as two binary64 arrays."""

    hi: np.ndarray
    lo: np.ndarray

    @classmethod
    def from_float(cls, a) -> "DDMatrix":
        a = np.array(a, dtype=float, ndmin=2)
        return cls(a, np.zeros_like(a))

    @classmethod
    def identity(cls, n: int) -> "DDMatrix":
        return cls.from_float(np.eye(n))

    @classmethod
    def zeros(cls, n: int, m: int) -> "DDMatrix":
        return cls.from_float(np.zeros((n, m)))

    @property
    def shape(self):
        return self.hi.shape

    def __getitem__(self, idx) -> "DDMatrix":
        return DDMatrix(np.atleast_2d(self.hi[idx]), np.atleast_2d(self.lo[idx]))

    def entry(self, i: int, j: int) -> ExtReal:
        return ExtReal(self.hi[i, j], self.lo[i, j])

    @property
    def T(self) -> "DDMatrix":
        return DDMatrix(self.hi.T.copy(), self.lo.T.copy())

    def __matmul__(self, other: "DDMatrix") -> "DDMatrix":
        return DDMatrix(*_dd_matmul(
            np.ascontiguousarray(self.hi), np.ascontiguousarray(self.lo),
            np.ascontiguousarray(other.hi), np.ascontiguousarray(other.lo)))

    def __add__(self, other: "DDMatrix") -> "DDMatrix":
        return DDMatrix(*_dd_elementwise_add(self.hi, self.lo, other.hi, other.lo, 1.0))

    def __sub__(self, other: "DDMatrix") -> "DDMatrix":
        return DDMatrix(*_dd_elementwise_add(self.hi, self.lo, other.hi, other.lo, -1.0))

    def __neg__(self) -> "DDMatrix":
        return DDMatrix(-self.hi, -self.lo)

    def to_float(self) -> np.ndarray:
        return self.hi + self.lo

    def solve(self, rhs: "DDMatrix") -> "DDMatrix":
        """``self^{-1} rhs`` by LU with partial pivoting in double-double."""
        LUh, LUl, perm, sign = _dd_lu(self.hi, self.lo)
        if sign == 0.0:
            raise DomainError("singular matrix")
        return DDMatrix(*_dd_lu_solve(LUh, LUl, perm, rhs.hi, rhs.lo))

    def det(self) -> ExtReal:
        LUh, LUl, _, sign = _dd_lu(self.hi, self.lo)
        d = ExtReal(sign)
        for i in range(LUh.shape[0]):
            d = d * ExtReal(LUh[i, i], LUl[i, i])
        return d

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.hi + self.lo))) if self.hi.size else 0.0


def block(m1: DDMatrix, m2: DDMatrix, m3: DDMatrix, m4: DDMatrix) -> DDMatrix:
    return DDMatrix(np.block([[m1.hi, m2.hi], [m3.hi, m4.hi]]), np.block([[m1.lo, m2.lo], [m3.lo, m4.lo]]))


# ---------------------------------------------------------------------------
# Vandermonde and Gram matrices
# ---------------------------------------------------------------------------


@jit
def _vandermonde(th, tl, n):
    M = th.shape[0]
    N = 2 * n + 1
    out = np.empty((M, N), dtype=np.complex128)
    for j in range(M):
        for idx in range(N):
            k = idx - n
            # z_j^k = exp(2 pi i k t_j): the phase 2 k t_j is reduced mod 2 inside sin_pi/cos_pi
            ph, pl = dd_mul_d(th[j], tl[j], 2.0 * k)
            ch, cl = dd_cos_pi(ph, pl)
            sh, sl = dd_sin_pi(ph, pl)
            out[j, idx] = complex(ch + cl, sh + sl)
    return out


def vandermonde(ns: NodeSet) -> np.ndarray:
    """Materialize the ``M x N`` matrix ``(z_j^k)`` with ``|k| <= n`` in complex128."""
    if ns.M > SVD_MAX_M or ns.N > SVD_MAX_N:
        raise PreconditionError(
            f"Vandermonde materialization limited to M <= {SVD_MAX_M}, N <= {SVD_MAX_N}; got M={ns.M}, N={ns.N}"
        )
    th, tl = ns.hi_lo()
    return _vandermonde(th, tl, ns.bw.n)


@jit
def _gram(th, tl, N):
    M = th.shape[0]
    Kh = np.zeros((M, M))
    Kl = np.zeros((M, M))
    for i in range(M):
        Kh[i, i] = N
        for j in range(i + 1, M):
            dh, dl = dd_sub(th[i], tl[i], th[j], tl[j])
            vh, vl = dd_dirichlet(N, dh, dl)
            Kh[i, j] = vh
            Kh[j, i] = vh
            Kl[i, j] = vl
            Kl[j, i] = vl
    return Kh, Kl


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """``K = A A^* = (D_n(t_i - t_j))`` in double-double."""

    bw: Bandwidth
    K: DDMatrix

    @property
    def M(self) -> int:
        return self.K.shape[0]

    @property
    def N(self) -> int:
        return self.bw.N


def build_gram(ns: NodeSet) -> GramMatrix:
    th, tl = ns.hi_lo()
    return GramMatrix(ns.bw, DDMatrix(*_gram(th, tl, float(ns.N))))


def format_gram(G: GramMatrix) -> str:
    lines = [f"# gram M={G.M} N={G.N}"]
    for i in range(G.M):
        lines.append(" ".join(G.K.entry(i, j).to_str(34) for j in range(G.M)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# two-sided Jacobi, double-double
# ---------------------------------------------------------------------------


@jit
def _offdiag_norm2(Ah, Al):
    n = Ah.shape[0]
    off = 0.0
    tot = 0.0
    for i in range(n):
        for j in range(n):
            v = Ah[i, j] + Al[i, j]
            tot += v * v
            if i != j:
                off += v * v
    return off, tot


@jit
def _jacobi_rotate(Ah, Al, p, q):
    n = Ah.shape[0]
    app_h, app_l = Ah[p, p], Al[p, p]
    aqq_h, aqq_l = Ah[q, q], Al[q, q]
    apq_h, apq_l = Ah[p, q], Al[p, q]
    # theta = (a_qq - a_pp) / (2 a_pq), t = tan of the rotation angle
    dh, dl = dd_sub(aqq_h, aqq_l, app_h, app_l)
    thh, thl = dd_div(dh, dl, 2.0 * apq_h, 2.0 * apq_l)
    if abs(thh) > 1e17:
        th_, tl_ = dd_div(0.5, 0.0, thh, thl)
    else:
        sgn = 1.0 if thh >= 0.0 else -1.0
        ath, atl = dd_abs(thh, thl)
        sqh, sql = dd_mul(thh, thl, thh, thl)
        sqh, sql = dd_add(sqh, sql, 1.0, 0.0)
        sqh, sql = dd_sqrt(sqh, sql)
        denh, denl = dd_add(ath, atl, sqh, sql)
        th_, tl_ = dd_div(sgn, 0.0, denh, denl)
    # c = 1/sqrt(1 + t^2), s = t c, tau = s / (1 + c)
    ch, cl = dd_mul(th_, tl_, th_, tl_)
    ch, cl = dd_add(ch, cl, 1.0, 0.0)
    ch, cl = dd_sqrt(ch, cl)
    ch, cl = dd_div(1.0, 0.0, ch, cl)
    sh, sl = dd_mul(th_, tl_, ch, cl)
    oph, opl = dd_add(ch, cl, 1.0, 0.0)
    tah, tal = dd_div(sh, sl, oph, opl)
    hh, hl = dd_mul(th_, tl_, apq_h, apq_l)
    Ah[p, p], Al[p, p] = dd_sub(app_h, app_l, hh, hl)
    Ah[q, q], Al[q, q] = dd_add(aqq_h, aqq_l, hh, hl)
    Ah[p, q] = 0.0
    Al[p, q] = 0.0
    Ah[q, p] = 0.0
    Al[q, p] = 0.0
    for r in range(n):
        if r == p or r == q:
            continue
        gh, gl = Ah[p, r], Al[p, r]
        kh, kl = Ah[q, r], Al[q, r]
        # g' = g - s (k + g tau), k' = k + s (g - k tau)
        xh, xl = dd_mul(gh, gl, tah, tal)
        xh, xl = dd_add(kh, kl, xh, xl)
        xh, xl = dd_mul(sh, sl, xh, xl)
        ngh, ngl = dd_sub(gh, gl, xh, xl)
        yh, yl = dd_mul(kh, kl, tah, tal)
        yh, yl = dd_sub(gh, gl, yh, yl)
        yh, yl = dd_mul(sh, sl, yh, yl)
        nkh, nkl = dd_add(kh, kl, yh, yl)
        Ah[p, r] = ngh
        Al[p, r] = ngl
        Ah[r, p] = ngh
        Al[r, p] = ngl
        Ah[q, r] = nkh
        Al[q, r] = nkl
        Ah[r, q] = nkh
        Al[r, q] = nkl


@jit
def _jacobi_eig(Ah, Al, tol, max_sweeps):
    n = Ah.shape[0]
    off, tot = _offdiag_norm2(Ah, Al)
    fro = math.sqrt(tot)
    sweeps = 0
    converged = off <= (tol * fro) ** 2
    while not converged and sweeps < max_sweeps:
        sweeps += 1
        rotations = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                a = abs(Ah[p, q])
                if a == 0.0 or a <= tol * math.sqrt(abs(Ah[p, p] * Ah[q, q])):
                    continue
                _jacobi_rotate(Ah, Al, p, q)
                rotations += 1
        off, _ = _offdiag_norm2(Ah, Al)
        converged = rotations == 0 or off <= (tol * fro) ** 2
    return sweeps, converged, math.sqrt(off) / fro if fro > 0 else 0.0


@dataclass(frozen=True)
class JacobiResult:
    eigenvalues: tuple[ExtReal, ...]
    sweeps: int
    residual: float


def eig_sym_jacobi(
    K, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS
) -> JacobiResult:
    """Eigenvalues (ascending, double-double) of a real symmetric matrix.

    Row-cyclic Jacobi; a pair is rotated only if
    ``|a_pq| > tol * sqrt(|a_pp a_qq|)``.  Stops after a sweep without
    rotations or once the off-diagonal Frobenius norm drops below
    ``tol * ||K||_F``; raises :class:`SolverError` after ``max_sweeps``.
    """
    if isinstance(K, GramMatrix):
        K = K.K
    if not isinstance(K, DDMatrix):
        K = DDMatrix.from_float(K)
    Ah = np.array(K.hi, dtype=float, copy=True)
    Al = np.array(K.lo, dtype=float, copy=True)
    if Ah.ndim != 2 or Ah.shape[0] != Ah.shape[1]:
        raise PreconditionError(f"square matrix required, got shape {Ah.shape}")
    if not (np.array_equal(Ah, Ah.T) and np.array_equal(Al, Al.T)):
        raise PreconditionError("symmetric matrix required")
    sweeps, converged, residual = _jacobi_eig(Ah, Al, tol, max_sweeps)
    if not converged:
        raise SolverError(
            f"Jacobi did not converge in {max_sweeps} sweeps (relative off-diagonal norm {residual:.3e})",
            residual=residual,
            sweeps=sweeps,
        )
    d = np.diag(Ah).copy()
    dl = np.diag(Al).copy()
    order = np.lexsort((dl, d))
    return JacobiResult(tuple(ExtReal(d[i], dl[i]) for i in order), sweeps, residual)


# ---------------------------------------------------------------------------
# one-sided Jacobi SVD, binary64
# ---------------------------------------------------------------------------


def svd_one_sided_jacobi(A: np.ndarray, tol: float = 4 * np.finfo(float).eps,
                         max_sweeps: int = JACOBI_MAX_SWEEPS) -> np.ndarray:
    """Singular values (descending) of a complex ``M x N`` matrix with ``M <= N``.

    Hestenes iteration on the rows: each pair of rows is rotated until their
    inner product is negligible against the product of their norms; the
    singular values are then the row norms.
    """
    A = np.array(A, dtype=np.complex128, copy=True, ndmin=2)
    M, N = A.shape
    if M > SVD_MAX_M or N > SVD_MAX_N:
        raise PreconditionError(f"SVD size guard: M <= {SVD_MAX_M}, N <= {SVD_MAX_N}; got {M} x {N}")
    if M > N:
        raise PreconditionError("one-sided Jacobi on rows needs M <= N")
    norms = np.einsum("ij,ij->i", A, A.conj()).real
    for _ in range(max_sweeps):
        rotated = False
        for i in range(M - 1):
            for j in range(i + 1, M):
                gamma = np.vdot(A[j], A[i])  # sum a_i conj(a_j)
                g = abs(gamma)
                alpha, beta = norms[i], norms[j]
                if g == 0.0 or g <= tol * math.sqrt(alpha * beta):
                    continue
                rotated = True
                phase = gamma / g
                zeta = (beta - alpha) / (2.0 * g)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                b = phase * A[j]
                ai = c * A[i] - s * b
                A[j] = s * A[i] + c * b
                A[i] = ai
                norms[i] = np.vdot(A[i], A[i]).real
                norms[j] = np.vdot(A[j], A[j]).real
        if not rotated:
            return np.sort(np.sqrt(norms))[::-1]
    raise SolverError(f"one-sided Jacobi did not converge in {max_sweeps} sweeps", sweeps=max_sweeps)


# ---------------------------------------------------------------------------
# spectral summary
# ---------------------------------------------------------------------------

MODES = ("gram-dd", "svd-f64")


@dataclass(frozen=True)
class SpectralSummary:
    sigma_min: ExtReal
    sigma_max: ExtReal
    cond: ExtReal
    norm_K: ExtReal
    norm_K_inv: ExtReal
    mode: str
    eigenvalues: tuple[ExtReal, ...] = ()

    @property
    def pinv_norm(self) -> ExtReal:
        return ExtReal(1.0) / self.sigma_min


def spectral_summary(ns: NodeSet, mode: str = "gram-dd") -> SpectralSummary:
    if mode == "gram-dd":
        lam = eig_sym_jacobi(build_gram(ns)).eigenvalues
        lmin, lmax = lam[0], lam[-1]
        if lmin.hi <= 0.0:
            raise SolverError(f"Gram matrix not numerically positive definite (lambda_min={float(lmin)!r})")
        return SpectralSummary(
            sigma_min=_make(dd_sqrt(lmin.hi, lmin.lo)),
            sigma_max=_make(dd_sqrt(lmax.hi, lmax.lo)),
            cond=_make(dd_sqrt(*_pair(lmax / lmin))),
            norm_K=lmax,
            norm_K_inv=ExtReal(1.0) / lmin,
            mode=mode,
            eigenvalues=lam,
        )
    if mode == "svd-f64":
        sv = svd_one_sided_jacobi(vandermonde(ns))
        smax, smin = ExtReal(sv[0]), ExtReal(sv[-1])
        if smin.hi <= 0.0:
            raise SolverError("zero singular value")
        return SpectralSummary(
            sigma_min=smin,
            sigma_max=smax,
            cond=smax / smin,
            norm_K=smax * smax,
            norm_K_inv=ExtReal(1.0) / (smin * smin),
            mode=mode,
            eigenvalues=tuple(ExtReal(s * s) for s in sv[::-1]),
        )
    raise PreconditionError(f"unknown mode {mode!r}, expected one of {MODES}")


def _pair(x: ExtReal):
    return x.hi, x.lo


# ---------------------------------------------------------------------------
# partitions and Schur complements
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PartitionedGram:
    """``K`` reordered by ``order`` and split as ``[[K1, B^*], [B, K2]]``."""

    K1: DDMatrix
    K2: DDMatrix
    B: DDMatrix
    order: tuple[int, ...]
    scheme: str

    def reassemble(self) -> DDMatrix:
        return block(self.K1, self.B.T, self.B, self.K2)


def partition_gram(G: GramMatrix, pairing: Pairing) -> PartitionedGram:
    """Split ``K`` for one designated pair (block sizes 1 and M-1) or a full pairing (M/2 and M/2).

    One pair ``(i, j)``: node ``i`` forms the first block and its partner leads
    the second.  Full pairing: first nodes of all pairs, then their partners
    in the same order, so ``B`` is close to ``K1``.
    """
    M = G.M
    if len(pairing) == 1:
        i, j = pairing[0]
        order = [i, j] + [k for k in range(M) if k not in (i, j)]
        split, scheme = 1, "one-pair"
    elif 2 * len(pairing) == M:
        order = block_order(pairing)
        split, scheme = M // 2, "pairwise"
    else:
        raise PreconditionError(f"pairing {pairing!r} is neither a single pair nor perfect for M={M}")
    idx = np.array(order)
    P = DDMatrix(G.K.hi[np.ix_(idx, idx)], G.K.lo[np.ix_(idx, idx)])
    return PartitionedGram(
        K1=DDMatrix(P.hi[:split, :split].copy(), P.lo[:split, :split].copy()),
        K2=DDMatrix(P.hi[split:, split:].copy(), P.lo[split:, split:].copy()),
        B=DDMatrix(P.hi[split:, :split].copy(), P.lo[split:, :split].copy()),
        order=tuple(order),
        scheme=scheme,
    )


@dataclass(frozen=True, eq=False)
class SchurFactors:
    """``M = lower^{-1} @ block_diag @ upper^{-1}`` with ``complement = M4 - M3 M1^{-1} M2``."""

    lower: DDMatrix
    block_diag: DDMatrix
    upper: DDMatrix
    complement: DDMatrix
    pivot: DDMatrix
    n1: int
    source: DDMatrix

    def residual(self) -> float:
        """Largest entrywise deviation of the reconstruction from ``source``."""
        return (self.reconstruct() - self.source).max_abs()

    def reconstruct(self) -> DDMatrix:
        n1 = self.n1
        n = self.lower.shape[0]
        n2 = n - n1
        L_inv = block(DDMatrix.identity(n1), DDMatrix.zeros(n1, n2),
                      -self.lower[n1:, :n1], DDMatrix.identity(n2))
        U_inv = block(DDMatrix.identity(n1), -self.upper[:n1, n1:],
                      DDMatrix.zeros(n2, n1), DDMatrix.identity(n2))
        return L_inv @ self.block_diag @ U_inv


def schur_blocks(m1: DDMatrix, m2: DDMatrix, m3: DDMatrix, m4: DDMatrix) -> SchurFactors:
    """Schur decomposition of ``[[m1, m2], [m3, m4]]`` with respect to ``m1``."""
    n1, n2 = m1.shape[0], m4.shape[0]
    LUh, LUl, perm, sign = _dd_lu(m1.hi, m1.lo)
    if sign == 0.0:
        raise DomainError("pivot block is singular")
    X = DDMatrix(*_dd_lu_solve(LUh, LUl, perm, m2.hi, m2.lo))  # m1^{-1} m2
    m1t = m1.T
    Y = m1t.solve(m3.T).T  # m3 m1^{-1}
    S = m4 - m3 @ X
    lower = block(DDMatrix.identity(n1), DDMatrix.zeros(n1, n2), -Y, DDMatrix.identity(n2))
    upper = block(DDMatrix.identity(n1), -X, DDMatrix.zeros(n2, n1), DDMatrix.identity(n2))
    diag = block(m1, DDMatrix.zeros(n1, n2), DDMatrix.zeros(n2, n1), S)
    return SchurFactors(lower, diag, upper, S, m1, n1, block(m1, m2, m3, m4))


def schur_decompose(pg: PartitionedGram, pivot: str = "upper") -> SchurFactors:
    """Schur factors of a partitioned Gram matrix.

    ``pivot="upper"`` eliminates ``K1`` (complement ``K2 - B K1^{-1} B^*``);
    ``pivot="lower"`` eliminates ``K2`` and works on the block-swapped matrix
    ``[[K2, B], [B^*, K1]]`` (complement ``K1 - B^* K2^{-1} B``).
    """
    if pivot == "upper":
        return schur_blocks(pg.K1, pg.B.T, pg.B, pg.K2)
    if pivot == "lower":
        return schur_blocks(pg.K2, pg.B, pg.B.T, pg.K1)
    raise PreconditionError(f"pivot must be 'upper' or 'lower', got {pivot!r}")
