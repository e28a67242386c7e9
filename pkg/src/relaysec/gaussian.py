"""Gaussian orthogonal relay-eavesdropper channel and its rate bounds.

The source sends X_R on the source-to-relay channel and X_D on the
destination channel, the relay sends X_2::

    Y_1  = h_sr X_R + Z_1
    Y    = h_sd X_D + h_rd X_2 + Z
    Y_21 = 1_e1 h_se1 X_R + Z_21
    Y_22 = 1_e2 (h_se2 X_D + h_re X_2) + Z_22

with independent unit-variance noises.  Rates are in bits per channel use.

Every covariance-based bound is built as a list of conditional-MI terms on
the 7-variable joint ``(X_R, X_D, X_2, Y_1, Y, Y_21, Y_22)`` and evaluated
in batch through ``kernels.batch_conditional_mi``.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .dmc import EavesdropperCase
from .errors import ArgumentError, NumericDomainError, PreconditionError
from .kernels import batch_conditional_mi
from .probability import PSD_TOL, SYMMETRY_TOL, GaussianJoint, gaussian_capacity, psd_clip
from .search import SearchConfig, maximize

VARIABLES = ("X_R", "X_D", "X_2", "Y_1", "Y", "Y_21", "Y_22")
XR, XD, X2, Y1, Y, Y21, Y22 = (1 << i for i in range(7))
Y2 = Y21 | Y22
POWER_TOL = 1e-9

_FLAGS = {
    EavesdropperCase.CASE1: (True, False),
    EavesdropperCase.CASE2: (False, True),
    EavesdropperCase.CASE3: (True, True),
}


def _c(x):
    return 0.5 * np.log2(1.0 + np.asarray(x, dtype=np.float64))


@dataclass(frozen=True)
class GaussianOrthogonalChannel:
    h_sr: float
    h_sd: float
    h_rd: float
    h_se1: float
    h_se2: float
    h_re: float
    P_R: float = 1.0
    P_D: float = 1.0
    P_2: float = 1.0
    e1: bool = True
    e2: bool = True

    def __post_init__(self):
        for name in ("h_sr", "h_sd", "h_rd", "h_se1", "h_se2", "h_re", "P_R", "P_D", "P_2"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise ArgumentError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        for name in ("P_R", "P_D", "P_2"):
            if getattr(self, name) < 0:
                raise ArgumentError(f"power {name} must be non-negative")
        object.__setattr__(self, "e1", bool(self.e1))
        object.__setattr__(self, "e2", bool(self.e2))

    @property
    def case(self) -> Optional[EavesdropperCase]:
        for case, flags in _FLAGS.items():
            if flags == (self.e1, self.e2):
                return case
        return None

    @property
    def powers(self):
        return np.array([self.P_R, self.P_D, self.P_2])

    @property
    def has_active_eavesdropper(self) -> bool:
        return bool((self.e1 and self.h_se1 != 0) or (self.e2 and (self.h_se2 != 0 or self.h_re != 0)))

    def with_case(self, case) -> "GaussianOrthogonalChannel":
        e1, e2 = _FLAGS[EavesdropperCase.parse(case)]
        return replace(self, e1=e1, e2=e2)

    def gain_matrix(self) -> np.ndarray:
        """Rows Y_1, Y, Y_21, Y_22 against columns X_R, X_D, X_2."""
        f1, f2 = float(self.e1), float(self.e2)
        return np.array(
            [
                [self.h_sr, 0.0, 0.0],
                [0.0, self.h_sd, self.h_rd],
                [f1 * self.h_se1, 0.0, 0.0],
                [0.0, f2 * self.h_se2, f2 * self.h_re],
            ]
        )

    def to_dict(self):
        return {
            "channel": {k: getattr(self, k) for k in ("h_sr", "h_sd", "h_rd", "h_se1", "h_se2", "h_re")},
            "powers": {"P_R": self.P_R, "P_D": self.P_D, "P_2": self.P_2},
            "eavesdropper": {"e1": self.e1, "e2": self.e2},
        }


@dataclass(frozen=True, eq=False)
class InputCovariance:
    """3x3 input covariance ordered (X_R, X_D, X_2)."""

    K: np.ndarray

    def __post_init__(self):
        K = np.array(self.K, dtype=np.float64)
        if K.shape != (3, 3) or not np.all(np.isfinite(K)):
            raise ArgumentError(f"input covariance must be a finite 3x3 matrix, got shape {K.shape}")
        if np.max(np.abs(K - K.T)) > SYMMETRY_TOL:
            raise ArgumentError("input covariance is not symmetric")
        K, lam = psd_clip(0.5 * (K + K.T))
        if lam < -PSD_TOL:
            raise ArgumentError(f"input covariance is not PSD (min eigenvalue {lam:.3e})")
        K.setflags(write=False)
        object.__setattr__(self, "K", K)

    def check_powers(self, channel: GaussianOrthogonalChannel):
        d = np.diag(self.K)
        if np.any(d > channel.powers + POWER_TOL):
            raise ArgumentError(f"variances {d.tolist()} exceed power limits {channel.powers.tolist()}")
        return self

    @classmethod
    def diag(cls, v_r, v_d, v_2):
        return cls(np.diag([v_r, v_d, v_2]))


def _as_cov(channel, K):
    cov = K if isinstance(K, InputCovariance) else InputCovariance(K)
    return cov.check_powers(channel).K


def joint_covariances(channel: GaussianOrthogonalChannel, Ks) -> np.ndarray:
    """Batch of 7x7 joint covariances for input covariances ``Ks`` (N, 3, 3)."""
    Ks = np.asarray(Ks, dtype=np.float64)
    A = channel.gain_matrix()
    KA = Ks @ A.T
    out = np.empty((Ks.shape[0], 7, 7))
    out[:, :3, :3] = Ks
    out[:, :3, 3:] = KA
    out[:, 3:, :3] = np.swapaxes(KA, 1, 2)
    out[:, 3:, 3:] = A @ KA + np.eye(4)
    return out


def joint_output_covariance(channel: GaussianOrthogonalChannel, K) -> GaussianJoint:
    return GaussianJoint(joint_covariances(channel, _as_cov(channel, K)[None])[0], VARIABLES)


# --------------------------------------------------------------------------
# Rate expressions as MI-term programs
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RateProgram:
    """min over groups of (sum of terms in group) minus the sum of ``sub`` terms."""

    groups: tuple  # tuple of tuples of (A, B, C) masks
    sub: tuple = ()

    def masks(self):
        rows = [t for g in self.groups for t in g] + list(self.sub)
        return np.array(rows, dtype=np.int64)

    def pieces(self, sigma) -> np.ndarray:
        """(N, G) array of group value minus subtrahend."""
        T = batch_conditional_mi(sigma, self.masks())
        if np.isnan(T).any():
            raise NumericDomainError("negative mutual information beyond rounding tolerance")
        out = np.empty((T.shape[0], len(self.groups)))
        k = 0
        for g, grp in enumerate(self.groups):
            out[:, g] = T[:, k : k + len(grp)].sum(axis=1)
            k += len(grp)
        if self.sub:
            out -= T[:, k:].sum(axis=1)[:, None]
        return out


def _case_or_default(channel):
    # with both flags off the eavesdropper rows are pure noise, so any case
    # template evaluates its eavesdropper terms to 0
    return channel.case or EavesdropperCase.CASE3


def pdf_program(case) -> RateProgram:
    case = EavesdropperCase.parse(case)
    head = (((XD | XR, Y | Y1, X2),), ((XD | X2, Y, 0),))
    sub = {
        EavesdropperCase.CASE1: ((XR, Y2, 0),),
        EavesdropperCase.CASE2: ((XD | X2, Y2, 0),),
        EavesdropperCase.CASE3: ((XR, Y2, X2), (XD | X2, Y2, 0)),
    }[case]
    return RateProgram(head, sub)


def genie_program(case) -> RateProgram:
    case = EavesdropperCase.parse(case)
    sub = {
        EavesdropperCase.CASE1: ((XR, Y2, 0),),
        EavesdropperCase.CASE2: ((XD | X2, Y2, 0),),
        EavesdropperCase.CASE3: ((XR | XD | X2, Y2, 0),),
    }[case]
    return RateProgram((((XD | X2, Y, 0),),), sub)


NO_SECRECY_PROGRAM = RateProgram((((XR, Y1, X2), (XD, Y, X2)), ((XR | XD | X2, Y, 0),)))


def _rate(program, channel, K):
    sigma = joint_covariances(channel, _as_cov(channel, K)[None])
    return max(float(program.pieces(sigma)[0].min()), 0.0)


def pdf_inner_rate(channel: GaussianOrthogonalChannel, K) -> float:
    """PDF inner rate with jointly Gaussian inputs of covariance ``K``."""
    return _rate(pdf_program(_case_or_default(channel)), channel, K)


def genie_outer_rate(channel: GaussianOrthogonalChannel, K) -> float:
    """Genie-aided outer-bound objective at ``K`` (maximize over K for the bound)."""
    return _rate(genie_program(_case_or_default(channel)), channel, K)


def no_secrecy_rate(channel: GaussianOrthogonalChannel, K) -> float:
    """Capacity expression without secrecy constraint at input covariance ``K``."""
    return _rate(NO_SECRECY_PROGRAM, channel, K)


def rate_pieces_batch(channel: GaussianOrthogonalChannel, which: str, Ks) -> np.ndarray:
    """(N, G) pieces of a bound for a batch of (already valid) covariances."""
    case = _case_or_default(channel)
    program = {
        "pdf_inner": lambda: pdf_program(case),
        "genie_outer": lambda: genie_program(case),
        "no_secrecy": lambda: NO_SECRECY_PROGRAM,
    }.get(which)
    if program is None:
        raise ArgumentError(f"unknown covariance bound {which!r}")
    return program().pieces(joint_covariances(channel, Ks))


# --------------------------------------------------------------------------
# Noise forwarding and the deaf relay
# --------------------------------------------------------------------------


def nf_pieces(channel: GaussianOrthogonalChannel, p_d, p_2) -> np.ndarray:
    """Both NF min-terms for arrays of powers, shape (N, 2).

    The source-to-relay channel is idle (X_R = 0), so only the destination
    channel tap matters; with it inactive (case 1) both eavesdropper terms
    vanish.
    """
    p_d = np.atleast_1d(np.asarray(p_d, dtype=np.float64))
    p_2 = np.atleast_1d(np.asarray(p_2, dtype=np.float64))
    f = float(channel.e2)
    a, b = channel.h_sd**2, channel.h_rd**2
    ae, be = channel.h_se2**2, channel.h_re**2
    t1 = _c(a * p_d + b * p_2) - f * _c(ae * p_d + be * p_2)
    t2 = _c(a * p_d) - f * _c(ae * p_d / (1.0 + be * p_2))
    return np.stack([t1, t2], axis=-1)


def _check_power(name, p, limit):
    p = float(p)
    if not (-POWER_TOL <= p <= limit + POWER_TOL):
        raise ArgumentError(f"{name}={p!r} outside [0, {limit}]")
    return min(max(p, 0.0), limit)


def nf_inner_rate(channel: GaussianOrthogonalChannel, p_d, p_2) -> float:
    """Noise-forwarding secrecy rate at source power ``p_d`` and relay power ``p_2``."""
    p_d = _check_power("p_D", p_d, channel.P_D)
    p_2 = _check_power("p_2", p_2, channel.P_2)
    return max(float(nf_pieces(channel, p_d, p_2)[0].min()), 0.0)


def _nf_grid_max(channel, lo_d, hi_d, lo_2, hi_2, n):
    pd = np.linspace(lo_d, hi_d, n)
    p2 = np.linspace(lo_2, hi_2, n)
    D, T = np.meshgrid(pd, p2, indexing="ij")
    v = nf_pieces(channel, D.ravel(), T.ravel()).min(axis=1)
    i = int(np.argmax(v))  # first max in (p_D, p_2) lexicographic order
    return float(v[i]), float(D.ravel()[i]), float(T.ravel()[i])


def deaf_relay_capacity(channel: GaussianOrthogonalChannel, grid: int = 101, levels: int = 40):
    """Secrecy capacity with a deaf relay (h_sr = 0), cases 2 and 3.

    Full grid over the power box, then repeated zoom grids around the incumbent.
    Returns ``(bits, p_D, p_2)``.
    """
    if channel.h_sr != 0:
        raise PreconditionError("deaf-relay capacity needs h_sr = 0")
    if channel.case not in (EavesdropperCase.CASE2, EavesdropperCase.CASE3):
        raise PreconditionError("deaf-relay capacity is defined for case2 and case3 only")
    P_D, P_2 = channel.P_D, channel.P_2
    best = _nf_grid_max(channel, 0.0, P_D, 0.0, P_2, grid)
    hd, h2 = P_D / (grid - 1), P_2 / (grid - 1)
    for _ in range(levels):
        if max(hd, h2) < 1e-13:
            break
        _, pd, p2 = best
        cand = _nf_grid_max(
            channel,
            max(pd - 2 * hd, 0.0),
            min(pd + 2 * hd, P_D),
            max(p2 - 2 * h2, 0.0),
            min(p2 + 2 * h2, P_2),
            21,
        )
        if cand[0] > best[0]:
            best = cand
        hd, h2 = hd / 5.0, h2 / 5.0
    val, pd, p2 = best
    return max(val, 0.0), pd, p2


def wiretap_baseline(channel: GaussianOrthogonalChannel) -> float:
    """Secrecy rate with a silent relay (X_R = X_2 = 0)."""
    direct = gaussian_capacity(channel.h_sd**2 * channel.P_D)
    if not channel.e2:
        return float(direct)
    return float(max(direct - gaussian_capacity(channel.h_se2**2 * channel.P_D), 0.0))


# --------------------------------------------------------------------------
# MIMOME
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MimomeInstance:
    H: np.ndarray
    H_e: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        H = np.atleast_2d(np.asarray(self.H, dtype=np.float64))
        He = np.atleast_2d(np.asarray(self.H_e, dtype=np.float64))
        S = np.atleast_2d(np.asarray(self.S, dtype=np.float64))
        m = S.shape[0]
        if S.shape != (m, m):
            raise ArgumentError(f"S must be square, got {S.shape}")
        if H.shape[1] != m or He.shape[1] != m:
            raise ArgumentError(f"H {H.shape} and H_e {He.shape} need {m} columns to match S")
        if not (np.all(np.isfinite(H)) and np.all(np.isfinite(He)) and np.all(np.isfinite(S))):
            raise ArgumentError("MIMOME matrices must be finite")
        if np.max(np.abs(S - S.T)) > SYMMETRY_TOL:
            raise ArgumentError("S is not symmetric")
        S = 0.5 * (S + S.T)
        w = np.linalg.eigvalsh(S)
        if w.min() < -PSD_TOL:
            raise ArgumentError(f"S is not PSD (min eigenvalue {w.min():.3e})")
        if m > 3:
            raise ArgumentError("MIMOME search supports at most 3 transmit antennas")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "H_e", He)
        object.__setattr__(self, "S", S)

    @property
    def m(self):
        return self.S.shape[0]

    def sqrt_s(self):
        w, V = np.linalg.eigh(self.S)
        return (V * np.sqrt(np.maximum(w, 0.0))) @ V.T


def mimome_objective(instance: MimomeInstance, Ks) -> np.ndarray:
    """1/2 logdet(I + H K H') - 1/2 logdet(I + He K He') in bits, batched."""
    Ks = np.asarray(Ks, dtype=np.float64)
    H, He = instance.H, instance.H_e
    a = np.linalg.slogdet(np.eye(H.shape[0]) + H @ Ks @ H.T)[1]
    b = np.linalg.slogdet(np.eye(He.shape[0]) + He @ Ks @ He.T)[1]
    return 0.5 * (a - b) / np.log(2.0)


def _rotations(angles, m):
    n = angles.shape[0]
    if m == 1:
        return np.ones((n, 1, 1))
    if m == 2:
        c, s = np.cos(angles[:, 0]), np.sin(angles[:, 0])
        return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], 1)

    def rz(t):
        c, s, z, o = np.cos(t), np.sin(t), np.zeros_like(t), np.ones_like(t)
        return np.stack([np.stack([c, -s, z], -1), np.stack([s, c, z], -1), np.stack([z, z, o], -1)], 1)

    def ry(t):
        c, s, z, o = np.cos(t), np.sin(t), np.zeros_like(t), np.ones_like(t)
        return np.stack([np.stack([c, z, s], -1), np.stack([z, o, z], -1), np.stack([-s, z, c], -1)], 1)

    return rz(angles[:, 0]) @ ry(angles[:, 1]) @ rz(angles[:, 2])


def mimome_space(m):
    """Box for (eigen-fractions, rotation angles) of K = S^1/2 U diag(l) U' S^1/2."""
    n_ang = {1: 0, 2: 1, 3: 3}[m]
    lower = np.zeros(m + n_ang)
    upper = np.concatenate([np.ones(m), {0: [], 1: [np.pi], 3: [2 * np.pi, np.pi, np.pi]}[n_ang]])
    return lower, upper


def mimome_covariances(instance: MimomeInstance, X) -> np.ndarray:
    """Map search points to covariances, all satisfying 0 <= K <= S."""
    m = instance.m
    X = np.atleast_2d(X)
    lam = np.clip(X[:, :m], 0.0, 1.0)
    U = _rotations(X[:, m:], m)
    Q = (U * lam[:, None, :]) @ np.swapaxes(U, 1, 2)
    R = instance.sqrt_s()
    K = R @ Q @ R
    return 0.5 * (K + np.swapaxes(K, 1, 2))


def mimome_secrecy(instance: MimomeInstance, config=None):
    """Best found MIMOME secrecy rate over 0 <= K <= S.  Returns ``(bits, K)``."""
    config = config or SearchConfig()
    lower, upper = mimome_space(instance.m)
    res = maximize(lambda X: mimome_objective(instance, mimome_covariances(instance, X)), lower, upper, config)
    K = mimome_covariances(instance, res.x[None])[0]
    value = float(mimome_objective(instance, K[None])[0])
    return max(value, 0.0), K
