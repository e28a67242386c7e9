"""Covariance parameterization and bound optimization for the Gaussian model.

A covariance point is six numbers: the variances of (X_R, X_D, X_2) and the
pairwise correlations (rho_RD, rho_R2, rho_D2).  Points whose implied matrix
is indefinite score -inf instead of being projected.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dmc import EavesdropperCase
from .errors import ArgumentError, InfeasibleParamsError
from .gaussian import (
    GaussianOrthogonalChannel,
    InputCovariance,
    deaf_relay_capacity,
    nf_pieces,
    rate_pieces_batch,
    wiretap_baseline,
)
from .probability import PSD_TOL, psd_clip
from .search import SearchConfig, SearchResult, maximize

__all__ = [
    "BOUNDS",
    "CovarianceParams",
    "RateEntry",
    "SearchConfig",
    "SearchResult",
    "covariance_box",
    "maximize",
    "optimize_bound",
    "params_to_covariances",
    "to_covariance",
]

BOUNDS = ("pdf_inner", "nf_inner", "genie_outer", "no_secrecy")
SECRECY_BOUNDS = ("pdf_inner", "nf_inner", "genie_outer")


@dataclass(frozen=True)
class CovarianceParams:
    var_r: float
    var_d: float
    var_2: float
    rho_rd: float = 0.0
    rho_r2: float = 0.0
    rho_d2: float = 0.0

    def __post_init__(self):
        for name in ("var_r", "var_d", "var_2"):
            if not getattr(self, name) >= 0:
                raise ArgumentError(f"{name} must be non-negative")
        for name in ("rho_rd", "rho_r2", "rho_d2"):
            if not -1.0 <= getattr(self, name) <= 1.0:
                raise ArgumentError(f"{name} must lie in [-1, 1]")

    def as_array(self):
        return np.array([self.var_r, self.var_d, self.var_2, self.rho_rd, self.rho_r2, self.rho_d2])

    @classmethod
    def from_array(cls, x):
        x = np.asarray(x, dtype=np.float64)
        return cls(*(float(v) for v in x))


def params_to_covariances(X):
    """Batch map (N, 6) params -> (N, 3, 3) covariances and their min eigenvalues.

    Matrices with a negative eigenvalue come back clipped to the PSD cone;
    ``lam`` is the eigenvalue before clipping, used for the feasibility test.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    s = np.sqrt(np.maximum(X[:, :3], 0.0))
    R = np.empty((X.shape[0], 3, 3))
    R[:, 0, 0] = R[:, 1, 1] = R[:, 2, 2] = 1.0
    R[:, 0, 1] = R[:, 1, 0] = X[:, 3]
    R[:, 0, 2] = R[:, 2, 0] = X[:, 4]
    R[:, 1, 2] = R[:, 2, 1] = X[:, 5]
    K = R * s[:, :, None] * s[:, None, :]
    # within-tolerance points are evaluated at their PSD projection so the
    # search cannot profit from a slightly indefinite matrix
    K, lam = psd_clip(K)
    return K, lam


def to_covariance(params: CovarianceParams, channel: Optional[GaussianOrthogonalChannel] = None) -> InputCovariance:
    """Build K_ij = rho_ij sigma_i sigma_j, rejecting indefinite combinations."""
    if channel is not None:
        v = params.as_array()[:3]
        if np.any(v > channel.powers + PSD_TOL):
            raise ArgumentError(f"variances {v.tolist()} exceed power limits {channel.powers.tolist()}")
    K, lam = params_to_covariances(params.as_array())
    if lam[0] < -PSD_TOL:
        raise InfeasibleParamsError(f"covariance is indefinite (min eigenvalue {lam[0]:.3e})", float(lam[0]))
    return InputCovariance(K[0])


def covariance_box(channel: GaussianOrthogonalChannel):
    lower = np.array([0.0, 0.0, 0.0, -1.0, -1.0, -1.0])
    upper = np.concatenate([channel.powers, np.ones(3)])
    return lower, upper


def _covariance_objective(channel, which):
    def objective(X):
        K, lam = params_to_covariances(X)
        ok = lam >= -PSD_TOL
        out = np.full((X.shape[0], 2 if which != "genie_outer" else 1), -np.inf)
        if ok.any():
            p = rate_pieces_batch(channel, which, K[ok])
            out[ok, : p.shape[1]] = p
            if p.shape[1] < out.shape[1]:
                out[ok, p.shape[1] :] = np.inf
        return out

    def feasibility(X):
        return params_to_covariances(X)[1] + PSD_TOL

    return objective, feasibility


@dataclass
class RateEntry:
    bound: str
    case: Optional[str]
    value: float
    argmax: dict
    config: dict
    search: Optional[dict] = field(default=None)

    def to_dict(self):
        out = {"bound": self.bound, "value": self.value, "argmax": self.argmax, "config": self.config}
        if self.case is not None:
            out["case"] = self.case
        return out


def _check_case(channel, which):
    if which in SECRECY_BOUNDS and channel.case is None:
        raise ArgumentError(f"{which} is a secrecy bound but no eavesdropper flag is set")


def optimize_bound(channel: GaussianOrthogonalChannel, which: str, config: SearchConfig = SearchConfig()) -> RateEntry:
    """Optimize one bound for ``channel`` and package it as a report entry.

    ``nf_inner`` searches the two powers (p_D, p_2); the other bounds search the
    full six-parameter covariance box.
    """
    if which not in BOUNDS:
        raise ArgumentError(f"unknown bound {which!r}; expected one of {BOUNDS}")
    _check_case(channel, which)
    case = channel.case.value if channel.case is not None else None
    if which == "nf_inner":
        res = maximize(
            lambda X: nf_pieces(channel, X[:, 0], X[:, 1]),
            [0.0, 0.0],
            [channel.P_D, channel.P_2],
            config,
            pieces=True,
        )
        argmax = {"p_D": float(res.x[0]), "p_2": float(res.x[1])}
    else:
        objective, feasibility = _covariance_objective(channel, which)
        lower, upper = covariance_box(channel)
        res = maximize(objective, lower, upper, config, pieces=True, feasibility=feasibility)
        p = CovarianceParams.from_array(res.x)
        to_covariance(p, channel)
        argmax = {k: float(v) for k, v in zip(("var_r", "var_d", "var_2", "rho_rd", "rho_r2", "rho_d2"), res.x)}
    return RateEntry(
        bound=which,
        case=case,
        value=max(res.value, 0.0),
        argmax=argmax,
        config=config.to_dict(),
        search={"grid_value": res.grid_value, "evaluations": res.evaluations, "polished": res.polished},
    )


def case_rates(channel: GaussianOrthogonalChannel, case, config: SearchConfig = SearchConfig()) -> dict:
    """All rates for one eavesdropper case: inner bounds, outer bound and baseline."""
    ch = channel.with_case(EavesdropperCase.parse(case))
    out = {b: optimize_bound(ch, b, config) for b in SECRECY_BOUNDS}
    out["wiretap_baseline"] = wiretap_baseline(ch)
    return out


__all__ += ["case_rates", "deaf_relay_capacity"]
