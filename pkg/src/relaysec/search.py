"""Derivative-free multi-start maximization over a box.

``maximize`` runs a full Cartesian grid scan, then a compass (coordinate-wise)
ascent with step halving from the best grid points and a few seeded random
points, and finally an optional epigraph polish for max-min objectives.

Objectives are vectorized: they take an ``(N, d)`` array of points and return
``(N,)`` values, or ``(N, G)`` "pieces" whose row-wise minimum is the
objective.  Infeasible points must score ``-inf``.  The returned value is
always the objective evaluated at the returned point, so for inner bounds it
is achievable by construction.
"""

import itertools
import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize

from .errors import ArgumentError

logger = logging.getLogger(__name__)

GRID_CHUNK = 65536
MAX_GRID_POINTS = 20_000_000


@dataclass(frozen=True)
class SearchConfig:
    grid: int = 11
    restarts: int = 20
    step_floor: float = 1e-6
    max_iter: int = 500
    seed: int = 0
    random_restarts: Optional[int] = None  # default: max(1, restarts // 5)
    polish: bool = False  # opt-in COBYQA epigraph polish of the best local result

    def __post_init__(self):
        if self.grid < 1 or self.restarts < 1 or self.max_iter < 1:
            raise ArgumentError("grid, restarts and max_iter must be positive")
        if not self.step_floor > 0:
            raise ArgumentError("step_floor must be positive")
        if self.seed < 0 or int(self.seed) != self.seed:
            raise ArgumentError("seed must be an unsigned integer")
        if self.random_restarts is not None and self.random_restarts < 0:
            raise ArgumentError("random_restarts must be non-negative")

    @property
    def n_random(self):
        return max(1, self.restarts // 5) if self.random_restarts is None else self.random_restarts

    def to_dict(self):
        out = {
            "grid": self.grid,
            "restarts": self.restarts,
            "step_floor": self.step_floor,
            "max_iter": self.max_iter,
            "seed": self.seed,
            "polish": self.polish,
        }
        if self.random_restarts is not None:
            out["random_restarts"] = self.random_restarts
        return out


@dataclass
class SearchResult:
    value: float
    x: np.ndarray
    grid_value: float
    local_value: float
    evaluations: int
    iterations: int
    polished: bool = False
    trace: dict = field(default_factory=dict)


class _Counter:
    def __init__(self, fn, pieces):
        self.fn = fn
        self.pieces = pieces
        self.n = 0

    def raw(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        self.n += len(X)
        out = np.asarray(self.fn(X), dtype=np.float64)
        if self.pieces and out.ndim == 1:
            out = out[:, None]
        return out

    def __call__(self, X):
        out = self.raw(X)
        if self.pieces:
            out = out.min(axis=1)
        return np.where(np.isnan(out), -np.inf, out)


def grid_points(lower, upper, n):
    axes = [np.linspace(lo, hi, n) if hi > lo else np.array([lo]) for lo, hi in zip(lower, upper)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _lex_best(values, X):
    """Index of the max value; lexicographically smallest point among exact ties."""
    top = np.max(values)
    idx = np.nonzero(values == top)[0]
    if len(idx) == 1:
        return int(idx[0])
    sub = X[idx]
    order = np.lexsort(sub.T[::-1])
    return int(idx[order[0]])


def _ranked(values, X):
    """Indices sorted by value descending, ties by lexicographic point."""
    keys = [X[:, j] for j in range(X.shape[1] - 1, -1, -1)] + [-values]
    return np.lexsort(keys)


def _directions(d):
    """Pattern of +-e_i and +-e_i +-e_j.

    The pair moves let the search climb ridges where two pieces of a max-min
    objective cross, which pure coordinate moves cannot do.
    """
    eye = np.eye(d)
    out = [eye, -eye]
    for i, j in itertools.combinations(range(d), 2):
        for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            out.append((si * eye[i] + sj * eye[j])[None])
    return np.concatenate(out)


def _compass(f, X, V, lower, upper, step, cfg):
    """Pattern-search ascent with step halving, run for all starts at once."""
    width = np.where(upper > lower, upper - lower, 1.0)
    d = X.shape[1]
    dirs = _directions(d)
    iters = 0
    for iters in range(1, cfg.max_iter + 1):
        live = np.nonzero(np.any(step >= cfg.step_floor * width, axis=1))[0]
        if live.size == 0:
            break
        # candidates: (len(live), n_dirs, d)
        moves = dirs[None] * step[live, None, :]
        cand = np.clip(X[live, None, :] + moves, lower, upper)
        vals = f(cand.reshape(-1, d)).reshape(len(live), len(dirs))
        best = np.argmax(vals, axis=1)
        bv = vals[np.arange(len(live)), best]
        up = bv > V[live]
        mv = live[up]
        X[mv] = cand[up, best[up]]
        V[mv] = bv[up]
        step[live[~up]] *= 0.5
    return X, V, iters


def _polish(f, x0, v0, lower, upper, feasibility):
    """Epigraph form max t s.t. piece_k(x) >= t, solved with COBYQA."""
    d = len(x0)

    def pieces(x):
        p = f.raw(np.clip(x, lower, upper)[None])[0]
        # keep the constraint finite where the objective marks infeasibility
        return np.where(np.isfinite(p), p, -1e3)

    def neg_t(z):
        return -z[d]

    cons = [{"type": "ineq", "fun": lambda z: pieces(z[:d]) - z[d]}]
    if feasibility is not None:
        cons.append({"type": "ineq", "fun": lambda z: np.atleast_1d(feasibility(np.clip(z[:d], lower, upper)[None]))})
    if not np.isfinite(v0):
        return x0, v0
    p0 = pieces(x0)
    z0 = np.append(x0, p0.min())
    bounds = list(zip(lower, upper)) + [(z0[d] - 1.0, z0[d] + 10.0)]
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            res = minimize(
                neg_t,
                z0,
                method="COBYQA",
                bounds=bounds,
                constraints=cons,
                options={"maxfev": 100 * (d + 1), "final_tr_radius": 1e-10},
            )
        x = np.clip(res.x[:d], lower, upper)
    except Exception as exc:  # pragma: no cover - defensive, the grid/compass result stands
        logger.debug("polish failed: %s", exc)
        return x0, v0
    v = float(f(x[None])[0])
    if v > v0:
        return x, v
    return x0, v0


def maximize(
    objective: Callable,
    lower,
    upper,
    config: SearchConfig = SearchConfig(),
    pieces: bool = False,
    feasibility: Optional[Callable] = None,
) -> SearchResult:
    """Maximize a vectorized objective over the box ``[lower, upper]``.

    Deterministic for a fixed ``config.seed``.  Among exactly tied optima the
    lexicographically smallest point wins.
    """
    lower = np.asarray(lower, dtype=np.float64)
    upper = np.asarray(upper, dtype=np.float64)
    if lower.shape != upper.shape or lower.ndim != 1:
        raise ArgumentError("lower and upper must be 1-D arrays of equal length")
    if np.any(upper < lower):
        raise ArgumentError("upper bound below lower bound")
    d = len(lower)
    f = _Counter(objective, pieces)

    npts = config.grid ** d
    if npts > MAX_GRID_POINTS:
        raise ArgumentError(f"grid of {npts} points is too large")
    G = grid_points(lower, upper, config.grid)
    GV = np.concatenate([f(G[i : i + GRID_CHUNK]) for i in range(0, len(G), GRID_CHUNK)])
    finite = np.isfinite(GV)
    if not finite.any():
        raise ArgumentError("objective is -inf on every grid point")
    gi = _lex_best(np.where(finite, GV, -np.inf), G)
    grid_x, grid_v = G[gi].copy(), float(GV[gi])

    order = [i for i in _ranked(np.where(finite, GV, -np.inf), G) if finite[i]][: config.restarts]
    starts = [G[i] for i in order]
    rng = np.random.default_rng(config.seed)
    n_rand, tries = config.n_random, 0
    while n_rand > 0 and tries < 100 * config.n_random:
        r = lower + rng.random(d) * (upper - lower)
        tries += 1
        if np.isfinite(f(r[None])[0]):
            starts.append(r)
            n_rand -= 1
    X = np.array(starts, dtype=np.float64)
    V = f(X)
    spacing = (upper - lower) / max(config.grid - 1, 1)
    if config.grid == 1:
        spacing = (upper - lower) / 2.0
    step = np.tile(spacing, (len(X), 1))
    X, V, iters = _compass(f, X, V, lower, upper, step, config)

    li = _lex_best(V, X)
    local_v = float(V[li])
    polished = False
    if pieces and config.polish:
        for i in _ranked(V, X)[:1]:
            x, v = _polish(f, X[i].copy(), float(V[i]), lower, upper, feasibility)
            if v > V[i]:
                X[i], V[i] = x, v
                polished = True
        li = _lex_best(V, X)

    best_x, best_v = X[li].copy(), float(V[li])
    if grid_v > best_v or (grid_v == best_v and tuple(grid_x) < tuple(best_x)):
        best_x, best_v = grid_x, grid_v
    return SearchResult(
        value=best_v,
        x=best_x,
        grid_value=grid_v,
        local_value=local_v,
        evaluations=f.n,
        iterations=iters,
        polished=polished,
        trace={"starts": len(X), "grid_points": len(G)},
    )
