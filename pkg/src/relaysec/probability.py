"""Information measures over finite alphabets and jointly Gaussian vectors.

All quantities are in bits.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ArgumentError, NumericDomainError
from .kernels import NEG_MI_TOL, batch_conditional_mi, entropy_rows

PMF_SUM_TOL = 1e-12
SYMMETRY_TOL = 1e-10
PSD_TOL = 1e-9


@dataclass(frozen=True)
class FiniteAlphabet:
    size: int
    labels: Optional[tuple] = None

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise ArgumentError(f"alphabet size must be a positive integer, got {self.size!r}")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
            if len(self.labels) != self.size:
                raise ArgumentError(
                    f"alphabet has {self.size} symbols but {len(self.labels)} labels"
                )


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Dense probability table, one axis per finite alphabet."""

    axes: tuple
    table: np.ndarray

    def __post_init__(self):
        axes = tuple(a if isinstance(a, FiniteAlphabet) else FiniteAlphabet(int(a)) for a in self.axes)
        table = np.array(self.table, dtype=np.float64)
        shape = tuple(a.size for a in axes)
        if table.size != int(np.prod(shape, dtype=np.int64)):
            raise ArgumentError(f"table has {table.size} entries, axes need {shape}")
        table = table.reshape(shape)
        if np.any(table < 0):
            raise ArgumentError("probabilities must be non-negative")
        total = table.sum()
        if abs(total - 1.0) > PMF_SUM_TOL:
            raise ArgumentError(f"probabilities sum to {total!r}, not 1")
        table.setflags(write=False)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "table", table)

    @classmethod
    def from_table(cls, table) -> "JointPmf":
        table = np.asarray(table, dtype=np.float64)
        return cls(tuple(FiniteAlphabet(s) for s in table.shape), table)

    @property
    def shape(self):
        return self.table.shape

    @property
    def ndim(self):
        return self.table.ndim

    def marginal(self, keep: Sequence[int]) -> np.ndarray:
        keep = _check_axes(keep, self.ndim)
        return marginal_table(self.table, keep)


def _check_axes(axes, ndim, allow_empty=True):
    try:
        out = tuple(int(a) for a in axes)
    except TypeError:
        out = (int(axes),)
    for a in out:
        if a < 0 or a >= ndim:
            raise ArgumentError(f"axis index {a} out of range for {ndim} axes")
    if len(set(out)) != len(out):
        raise ArgumentError(f"repeated axis in {out}")
    if not allow_empty and not out:
        raise ArgumentError("axis group must be non-empty")
    return out


def marginal_table(table, keep, batch=False):
    """Sum out every axis not in ``keep``; kept axes stay in ascending order.

    With ``batch=True`` axis 0 is a batch axis and ``keep`` indexes the
    remaining axes.
    """
    off = 1 if batch else 0
    nd = table.ndim - off
    drop = tuple(a + off for a in range(nd) if a not in keep)
    return table.sum(axis=drop) if drop else table


def table_entropy(table, keep, batch=False):
    """Entropy in bits of the marginal of ``table`` on ``keep`` (array or batch of arrays)."""
    if not keep:
        return np.zeros(table.shape[0]) if batch else 0.0
    m = marginal_table(table, tuple(sorted(keep)), batch=batch)
    if batch:
        return entropy_rows(m.reshape(m.shape[0], -1))
    return float(entropy_rows(m.reshape(1, -1))[0])


def clamp_mi(value):
    """Apply the rounding clamp to a (batch of) MI values.

    Values in (-1e-10, 0) become 0; anything more negative is a numeric fault.
    """
    arr = np.asarray(value, dtype=np.float64)
    if np.any(arr < -NEG_MI_TOL):
        raise NumericDomainError(f"mutual information evaluated to {arr.min()!r} bits")
    arr = np.maximum(arr, 0.0)
    return float(arr) if arr.ndim == 0 else arr


def table_mi(table, A, B, C=(), batch=False):
    """I(A;B|C) in bits straight from a probability table (no validation)."""
    A, B, C = set(A), set(B), set(C)
    val = (
        table_entropy(table, A | C, batch)
        + table_entropy(table, B | C, batch)
        - table_entropy(table, C, batch)
        - table_entropy(table, A | B | C, batch)
    )
    return clamp_mi(val)


def entropy(pmf: JointPmf, subset) -> float:
    """Entropy (bits) of the marginal of ``pmf`` on the axes in ``subset``."""
    subset = _check_axes(subset, pmf.ndim, allow_empty=False)
    return max(table_entropy(pmf.table, subset), 0.0)


def mutual_information(pmf: JointPmf, A, B, C=()) -> float:
    """Conditional mutual information I(A;B|C) in bits."""
    A = _check_axes(A, pmf.ndim, allow_empty=False)
    B = _check_axes(B, pmf.ndim, allow_empty=False)
    C = _check_axes(C, pmf.ndim)
    sa, sb, sc = set(A), set(B), set(C)
    if sa & sb or sa & sc or sb & sc:
        raise ArgumentError(f"axis groups overlap: A={A}, B={B}, C={C}")
    return table_mi(pmf.table, sa, sb, sc)


def gaussian_capacity(snr) -> float:
    """C(x) = 1/2 log2(1 + x)."""
    snr = float(snr)
    if not snr >= 0.0:
        raise ArgumentError(f"snr must be non-negative, got {snr!r}")
    return 0.5 * np.log2(1.0 + snr)


def psd_clip(K):
    """Clip negative eigenvalues of symmetric ``K`` (one matrix or a batch) to 0.

    Returns ``(K_clipped, min_eigenvalue)``.  Matrices that are already PSD
    come back unchanged.  Callers decide whether the eigenvalue is small
    enough to call rounding; evaluating the clipped matrix keeps searches
    from exploiting that tolerance.
    """
    K = np.asarray(K, dtype=np.float64)
    w, V = np.linalg.eigh(K)
    lam = w[..., 0]
    neg = lam < 0
    if np.any(neg):
        K = K.copy()
        Kc = (V[neg] * np.maximum(w[neg], 0.0)[..., None, :]) @ np.swapaxes(V[neg], -1, -2)
        K[neg] = 0.5 * (Kc + np.swapaxes(Kc, -1, -2))
    return K, (lam if lam.ndim else float(lam))


@dataclass(frozen=True, eq=False)
class GaussianJoint:
    """Zero-mean jointly Gaussian vector described by its covariance."""

    covariance: np.ndarray
    names: tuple = field(default=())

    def __post_init__(self):
        S = np.array(self.covariance, dtype=np.float64)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] < 1:
            raise ArgumentError(f"covariance must be square, got shape {S.shape}")
        if not np.all(np.isfinite(S)):
            raise NumericDomainError("covariance has non-finite entries")
        if np.max(np.abs(S - S.T)) > SYMMETRY_TOL:
            raise NumericDomainError("covariance is not symmetric")
        S, lam = psd_clip(0.5 * (S + S.T))
        if lam < -PSD_TOL:
            raise NumericDomainError(f"covariance is indefinite (min eigenvalue {lam:.3e})")
        S.setflags(write=False)
        names = tuple(self.names) if self.names else tuple(f"v{i}" for i in range(S.shape[0]))
        if len(names) != S.shape[0]:
            raise ArgumentError("one name per variable required")
        object.__setattr__(self, "covariance", S)
        object.__setattr__(self, "names", names)

    @property
    def dim(self) -> int:
        return self.covariance.shape[0]

    def index(self, key) -> int:
        if isinstance(key, str):
            try:
                return self.names.index(key)
            except ValueError:
                raise ArgumentError(f"unknown variable {key!r}") from None
        key = int(key)
        if not 0 <= key < self.dim:
            raise ArgumentError(f"variable index {key} out of range")
        return key

    def mask(self, keys) -> int:
        if isinstance(keys, (str, int, np.integer)):
            keys = (keys,)
        m = 0
        for k in keys:
            m |= 1 << self.index(k)
        return m


def gaussian_mutual_information(joint: GaussianJoint, A, B, C=()) -> float:
    """I(A;B|C) in bits for jointly Gaussian variables (indices or names)."""
    a, b, c = joint.mask(A), joint.mask(B), joint.mask(C)
    if not a or not b:
        raise ArgumentError("A and B must be non-empty")
    if a & b or a & c or b & c:
        raise ArgumentError("index groups must be disjoint")
    val = batch_conditional_mi(joint.covariance[None], np.array([[a, b, c]]))[0, 0]
    if np.isnan(val):
        raise NumericDomainError("negative mutual information beyond rounding tolerance")
    return float(val)
