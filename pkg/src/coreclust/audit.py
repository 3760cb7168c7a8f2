"""Fairness audits: decide (alpha, beta)-core membership and find witnesses.

A clustering fails the (alpha, beta)-core when some coalition S of at least
alpha*n/k agents and some unused candidate center y' satisfy

    beta * sum_{i in S} d(i, y') < sum_{i in S} d(i, Y)        (strictly).

The audit engine answers three questions, each with a concrete witness:

* min_beta      -- smallest beta at which a given alpha is satisfied;
* max_blocking_size -- largest coalition size that still blocks at a beta;
* is_in_core    -- yes/no membership at a fixed (alpha, beta).

For a fixed deviation y' and coalition size s, the best coalition under a
multiplier c is simply the s largest values of d(i,Y) - c*d(i,y'), so the
ratio maximization is solved by Dinkelbach iteration: start from the top-s
by d(i,Y), then repeatedly re-select the top-s under the current ratio until
no size-s set beats it.  Each step strictly increases the ratio and there
are finitely many subsets, so the loop terminates (in practice within a few
rounds).

Deviations on the continuous line are restricted to unoccupied agent
coordinates: for any fixed S the total |x_i - y| is minimized at a median
of S, which is an agent location, so the joint (S, y') maximum over the
whole line is preserved.

Strictness at the boundary uses the shared 1e-9 scaled tolerance: a
coalition blocks only when the improvement clears float noise, so the
clustering *is* in the core at exactly beta = min_beta.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import ParameterError, SizeLimitError, ValidationError
from .instance import Clustering, Instance
from .metric import TOL, PointRef, cross_distances

_CHUNK = 256  # deviation columns processed per block, bounds peak memory


@dataclass
class BlockingWitness:
    """A deviation y', a coalition (agent indices), and both inequality sides."""

    y_prime: PointRef
    coalition: List[int]
    sum_to_Y: float
    sum_to_y_prime: float

    @property
    def ratio(self) -> float:
        if self.sum_to_y_prime <= 0.0:
            return math.inf if self.sum_to_Y > 0.0 else 0.0
        return self.sum_to_Y / self.sum_to_y_prime

    def to_json(self, space=None) -> dict:
        y = self.y_prime
        if isinstance(y, tuple):
            y = [float(v) for v in y]
        elif isinstance(y, (np.integer,)):
            y = int(y)
        elif isinstance(y, (np.floating,)):
            y = float(y)
        return {
            "y_prime": y,
            "coalition": [int(i) for i in self.coalition],
            "sum_to_Y": float(self.sum_to_Y),
            "sum_to_y_prime": float(self.sum_to_y_prime),
            "ratio": "inf" if math.isinf(self.ratio) else float(self.ratio),
        }


@dataclass
class AuditResult:
    """Both audit dimensions for one clustering.

    beta_min is the attained minimum beta at alpha_query (inf when a
    coalition reaches a zero-distance deviation while paying a positive
    cost); s_max is the largest blocking size at beta_query, zero when
    nothing blocks at the proportional size; alpha_sup = k*s_max/n, and the
    clustering is in the (alpha, beta_query)-core exactly for
    alpha*n/k > s_max.
    """

    alpha_query: float
    beta_query: float
    beta_min: float
    s_max: int
    alpha_sup: float
    in_core: bool
    beta_witness: Optional[BlockingWitness] = None
    s_witness: Optional[BlockingWitness] = None
    core_witness: Optional[BlockingWitness] = None

    def to_json(self) -> dict:
        return {
            "alpha_query": self.alpha_query,
            "beta_query": self.beta_query,
            "beta_min": "inf" if math.isinf(self.beta_min) else self.beta_min,
            "s_max": self.s_max,
            "alpha_sup": self.alpha_sup,
            "in_core": self.in_core,
            "witness": (self.core_witness or self.s_witness or self.beta_witness
                        ).to_json() if (self.core_witness or self.s_witness
                                        or self.beta_witness) else None,
        }


# ---------------------------------------------------------------------------
# shared precomputation
# ---------------------------------------------------------------------------

class _AuditContext:
    """Distances from every agent to the clustering and to every deviation."""

    def __init__(self, inst: Instance, clustering: Clustering):
        if len(clustering.centers) != inst.k:
            raise ValidationError(
                f"clustering has {len(clustering.centers)} centers; instance wants k={inst.k}")
        self.inst = inst
        self.centers = list(clustering.centers)
        n = inst.n
        d_to_centers = cross_distances(inst.space, inst.agents, self.centers)
        self.dY = d_to_centers.min(axis=1)
        if inst.continuous_candidates:
            coords = sorted({float(a) for a in inst.agents})
            centers = np.asarray([float(c) for c in self.centers])
            devs = [c for c in coords
                    if np.abs(centers - c).min() > TOL * max(1.0, abs(c))]
            self.devs: List[PointRef] = devs
            self.D = cross_distances(inst.space, inst.agents, devs) if devs else \
                np.zeros((n, 0))
        else:
            cands = list(inst.candidates)
            Dall = cross_distances(inst.space, inst.agents, cands)
            used = np.zeros(len(cands), dtype=bool)
            for col in range(d_to_centers.shape[1]):
                prof = d_to_centers[:, col][:, None]
                scale = np.maximum(1.0, np.maximum(np.abs(Dall), np.abs(prof)))
                same = (np.abs(Dall - prof) <= TOL * scale).all(axis=0)
                used |= same
            keep = ~used
            self.devs = [c for c, k_ in zip(cands, keep) if k_]
            self.D = Dall[:, keep]
        self.m = len(self.devs)
        hi = 1.0
        if self.D.size:
            hi = max(hi, float(self.D.max()))
        if self.dY.size:
            hi = max(hi, float(self.dY.max()))
        self.zero_tol = TOL * hi


def deviation_candidates(inst: Instance, clustering: Clustering) -> List[PointRef]:
    """Candidate centers still available to a deviating coalition.

    Finite candidate sets drop every candidate whose distance profile to the
    agents coincides with a used center; on the continuous line the
    deviations are the unoccupied agent coordinates.
    """
    return _AuditContext(inst, clustering).devs


def coalition_size(inst: Instance, alpha: float) -> int:
    """Smallest blocking-coalition size at relaxation alpha: ceil(alpha*n/k).

    Products within 1e-9 of an integer round to it, so alpha values meant to
    hit an exact threshold are not bumped a full agent by float noise.
    """
    if alpha < 1.0:
        raise ParameterError(f"alpha must be >= 1, got {alpha}")
    x = alpha * inst.n / inst.k
    nearest = round(x)
    if abs(x - nearest) <= TOL * max(1.0, abs(x)):
        return int(nearest)
    return int(math.ceil(x))


def _blocking_margin(cy: np.ndarray, cd_scaled: np.ndarray) -> np.ndarray:
    """Elementwise: does sum d(i,Y) beat beta * sum d(i,y') beyond noise."""
    scale = np.maximum(1.0, np.maximum(np.abs(cy), np.abs(cd_scaled)))
    return (cy - cd_scaled) > TOL * scale


def _witness_from_column(ctx: _AuditContext, j: int, idx: Sequence[int]) -> BlockingWitness:
    idx = sorted(int(i) for i in idx)
    return BlockingWitness(
        y_prime=ctx.devs[j],
        coalition=idx,
        sum_to_Y=float(ctx.dY[idx].sum()),
        sum_to_y_prime=float(ctx.D[idx, j].sum()),
    )


def max_blocking_size(inst: Instance, clustering: Clustering, beta: float
                      ) -> Tuple[int, Optional[BlockingWitness]]:
    """Largest coalition size with a blocking move at improvement factor beta.

    Per deviation, gains d(i,Y) - beta*d(i,y') are sorted descending and the
    longest prefix with a strictly positive sum is that deviation's best
    size; sizes below ceil(n/k) never form a valid coalition and report 0.
    """
    if beta <= 0:
        raise ParameterError(f"beta must be positive, got {beta}")
    ctx = _AuditContext(inst, clustering)
    return _max_blocking_size(ctx, beta)


def _max_blocking_size(ctx: _AuditContext, beta: float
                       ) -> Tuple[int, Optional[BlockingWitness]]:
    n = ctx.inst.n
    s_min = coalition_size(ctx.inst, 1.0)
    best_len = 0
    best_j = -1
    for lo in range(0, ctx.m, _CHUNK):
        block = ctx.D[:, lo:lo + _CHUNK]
        gains = ctx.dY[:, None] - beta * block
        order = np.argsort(-gains, axis=0, kind="stable")
        cy = np.take_along_axis(
            np.broadcast_to(ctx.dY[:, None], gains.shape), order, axis=0).cumsum(axis=0)
        cd = beta * np.take_along_axis(block, order, axis=0).cumsum(axis=0)
        blocking = _blocking_margin(cy, cd)
        any_block = blocking.any(axis=0)
        lens = np.where(any_block, n - np.argmax(blocking[::-1, :], axis=0), 0)
        jloc = int(np.argmax(lens))
        if int(lens[jloc]) > best_len:
            best_len = int(lens[jloc])
            best_j = lo + jloc
    if best_len < s_min:
        return 0, None
    dv = ctx.D[:, best_j]
    order = np.argsort(-(ctx.dY - beta * dv), kind="stable")
    return best_len, _witness_from_column(ctx, best_j, order[:best_len])


def min_beta(inst: Instance, clustering: Clustering, alpha: float
             ) -> Tuple[float, Optional[BlockingWitness]]:
    """Smallest beta such that the clustering is in the (alpha, beta)-core.

    Maximizes sum d(i,Y) / sum d(i,y') over coalitions of the exact size
    ceil(alpha*n/k) for every deviation y' (larger coalitions never achieve
    a higher ratio).  Returns inf when some coalition reaches y' at total
    distance zero while paying a positive cost, and 0 when no deviation or
    no coalition is possible at all.
    """
    ctx = _AuditContext(inst, clustering)
    return _min_beta(ctx, alpha)


def _min_beta(ctx: _AuditContext, alpha: float
              ) -> Tuple[float, Optional[BlockingWitness]]:
    s = coalition_size(ctx.inst, alpha)
    n = ctx.inst.n
    if s > n or ctx.m == 0:
        return 0.0, None
    best = -1.0
    best_witness: Optional[BlockingWitness] = None
    for j in range(ctx.m):
        value, idx = _best_ratio_for_dev(ctx, j, s)
        if value > best:
            best = value
            best_witness = _witness_from_column(ctx, j, idx)
            if math.isinf(best):
                break
    return max(best, 0.0), best_witness


def _best_ratio_for_dev(ctx: _AuditContext, j: int, s: int
                        ) -> Tuple[float, np.ndarray]:
    """Dinkelbach iteration for one deviation column at coalition size s."""
    dY = ctx.dY
    dv = ctx.D[:, j]
    zero = dv <= ctx.zero_tol
    if int(zero.sum()) >= s:
        zi = np.flatnonzero(zero)
        top = zi[np.argsort(-dY[zi], kind="stable")[:s]]
        num = float(dY[top].sum())
        if num > TOL * max(1.0, num):
            return math.inf, top
    idx = np.argsort(-dY, kind="stable")[:s]
    num = float(dY[idx].sum())
    den = float(dv[idx].sum())
    if den <= ctx.zero_tol:
        return (math.inf, idx) if num > TOL else (0.0, idx)
    beta = num / den
    for _ in range(200):
        gains = dY - beta * dv
        cand = np.argsort(-gains, kind="stable")[:s]
        surplus = float(gains[cand].sum())
        cnum = float(dY[cand].sum())
        cden = float(dv[cand].sum())
        if surplus <= TOL * max(1.0, cnum, beta * cden):
            break
        if cden <= ctx.zero_tol:
            return math.inf, cand
        new_beta = cnum / cden
        if new_beta <= beta:
            break
        beta, idx = new_beta, cand
    return beta, idx


def _best_at_size(ctx: _AuditContext, beta: float, s: int
                  ) -> Tuple[bool, Optional[BlockingWitness]]:
    """Does any size-s coalition block at beta; with the extremal witness."""
    best_margin = -math.inf
    best = None
    for lo in range(0, ctx.m, _CHUNK):
        block = ctx.D[:, lo:lo + _CHUNK]
        gains = ctx.dY[:, None] - beta * block
        idx = np.argpartition(-gains, s - 1, axis=0)[:s, :]
        cy = np.take_along_axis(
            np.broadcast_to(ctx.dY[:, None], gains.shape), idx, axis=0).sum(axis=0)
        cd = beta * np.take_along_axis(block, idx, axis=0).sum(axis=0)
        blocked = _blocking_margin(cy, cd)
        if not blocked.any():
            continue
        margins = np.where(blocked, cy - cd, -math.inf)
        jloc = int(np.argmax(margins))
        if margins[jloc] > best_margin:
            best_margin = float(margins[jloc])
            best = _witness_from_column(ctx, lo + jloc, idx[:, jloc])
    return best is not None, best


def is_in_core(inst: Instance, clustering: Clustering, alpha: float, beta: float
               ) -> Tuple[bool, Optional[BlockingWitness]]:
    """Membership check at fixed (alpha, beta); a witness when it fails.

    Checking coalitions of the single size ceil(alpha*n/k) suffices: any
    larger blocking coalition contains one of that size at least as good.
    """
    if beta <= 0:
        raise ParameterError(f"beta must be positive, got {beta}")
    ctx = _AuditContext(inst, clustering)
    return _is_in_core(ctx, alpha, beta)


def _is_in_core(ctx: _AuditContext, alpha: float, beta: float
                ) -> Tuple[bool, Optional[BlockingWitness]]:
    s = coalition_size(ctx.inst, alpha)
    if s > ctx.inst.n or ctx.m == 0:
        return True, None
    blocked, witness = _best_at_size(ctx, beta, s)
    return (not blocked), witness


def audit(inst: Instance, clustering: Clustering, alpha: float = 1.0,
          beta: float = 1.0) -> AuditResult:
    """Full audit: min beta at the queried alpha, max blocking size at the
    queried beta, and membership at the queried pair."""
    ctx = _AuditContext(inst, clustering)
    bmin, bwit = _min_beta(ctx, alpha)
    smax, swit = _max_blocking_size(ctx, beta)
    ok, cwit = _is_in_core(ctx, alpha, beta)
    return AuditResult(
        alpha_query=alpha,
        beta_query=beta,
        beta_min=bmin,
        s_max=smax,
        alpha_sup=inst.k * smax / inst.n,
        in_core=ok,
        beta_witness=bwit,
        s_witness=swit,
        core_witness=cwit,
    )


# ---------------------------------------------------------------------------
# exhaustive oracle
# ---------------------------------------------------------------------------

ORACLE_MAX_N = 16
ORACLE_MAX_CANDS = 16


def oracle_audit(inst: Instance, clustering: Clustering,
                 alpha: Optional[float] = None,
                 beta: Optional[float] = None) -> AuditResult:
    """Brute-force audit by direct subset enumeration.

    Enumerates every coalition of each relevant size together with every
    deviation candidate, maximizing the ratio (for beta_min) or scanning
    sizes downward (for s_max).  Only the small-instance regime is allowed;
    this is the reference the fast path is validated against.
    """
    ctx = _AuditContext(inst, clustering)
    n = inst.n
    if n > ORACLE_MAX_N:
        raise SizeLimitError(f"oracle_audit limited to n <= {ORACLE_MAX_N}, got {n}")
    if ctx.m > ORACLE_MAX_CANDS:
        raise SizeLimitError(
            f"oracle_audit limited to {ORACLE_MAX_CANDS} deviation candidates, got {ctx.m}")
    if alpha is None:
        alpha = 1.0
    if beta is None:
        beta = 1.0

    bmin, bwit = _oracle_min_beta(ctx, alpha)
    smax, swit = _oracle_max_size(ctx, beta)
    in_core = smax < coalition_size(inst, alpha)
    return AuditResult(
        alpha_query=alpha, beta_query=beta,
        beta_min=bmin, s_max=smax,
        alpha_sup=inst.k * smax / inst.n,
        in_core=in_core,
        beta_witness=bwit, s_witness=swit,
    )


def _oracle_min_beta(ctx: _AuditContext, alpha: float
                     ) -> Tuple[float, Optional[BlockingWitness]]:
    s = coalition_size(ctx.inst, alpha)
    n = ctx.inst.n
    if s > n or ctx.m == 0:
        return 0.0, None
    best = -1.0
    best_pair = None
    for j in range(ctx.m):
        dv = ctx.D[:, j]
        for combo in itertools.combinations(range(n), s):
            idx = list(combo)
            num = float(ctx.dY[idx].sum())
            den = float(dv[idx].sum())
            if den <= ctx.zero_tol:
                if num > TOL * max(1.0, num):
                    return math.inf, _witness_from_column(ctx, j, idx)
                continue
            ratio = num / den
            if ratio > best:
                best = ratio
                best_pair = (j, idx)
    if best_pair is None:
        return 0.0, None
    return max(best, 0.0), _witness_from_column(ctx, *best_pair)


def _oracle_max_size(ctx: _AuditContext, beta: float
                     ) -> Tuple[int, Optional[BlockingWitness]]:
    n = ctx.inst.n
    s_min = coalition_size(ctx.inst, 1.0)
    if s_min > n or ctx.m == 0:
        return 0, None
    for size in range(n, s_min - 1, -1):
        for j in range(ctx.m):
            dv = ctx.D[:, j]
            for combo in itertools.combinations(range(n), size):
                idx = list(combo)
                cy = float(ctx.dY[idx].sum())
                cd = beta * float(dv[idx].sum())
                if _blocking_margin(np.asarray(cy), np.asarray(cd)):
                    return size, _witness_from_column(ctx, j, idx)
    return 0, None
