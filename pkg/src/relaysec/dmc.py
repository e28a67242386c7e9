"""Finite-alphabet orthogonal relay-eavesdropper channels.

A channel is stored as two dense conditional tables::

    kernel1[x_r, x_2, y_1, y_21] = p(y_1, y_21 | x_r, x_2)   # source -> relay channel
    kernel2[x_d, x_2, y,   y_22] = p(y,   y_22 | x_d, x_2)   # source/relay -> destination

so the orthogonal product structure holds by construction; the eavesdropper
case tag decides which of the two eavesdropper outputs may carry signal.
"""

import enum
import itertools
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ArgumentError, CapacityGuardError, RelaySecError
from .probability import JointPmf, clamp_mi, table_entropy, table_mi

SLICE_TOL = 1e-12
FACTOR_TOL = 1e-10
MAX_INPUT_CELLS = 64
MAX_GRID_POINTS = 2_000_000
MAX_JOINT_ENTRIES = 50_000_000


class EavesdropperCase(enum.Enum):
    CASE1 = "case1"  # eavesdropper hears only the source -> relay channel
    CASE2 = "case2"  # eavesdropper hears only the destination channel
    CASE3 = "case3"  # eavesdropper hears both

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ArgumentError(f"unknown eavesdropper case {value!r}") from None

    def __str__(self):
        return self.value


def _as_kernel(arr, n_in, name):
    arr = np.array(arr, dtype=np.float64)
    if arr.ndim != 2 + n_in:
        raise ArgumentError(f"{name} must have {n_in} input and 2 output axes, got shape {arr.shape}")
    if np.any(arr < 0):
        raise ArgumentError(f"{name} has negative entries")
    sums = arr.sum(axis=(-2, -1))
    if np.max(np.abs(sums - 1.0)) > SLICE_TOL:
        raise ArgumentError(f"{name}: conditional slices do not sum to 1 (worst {sums.ravel()[np.argmax(np.abs(sums - 1.0))]!r})")
    arr.setflags(write=False)
    return arr


def _as_conditional(arr, n_cond, name):
    arr = np.array(arr, dtype=np.float64)
    if np.any(arr < 0):
        raise ArgumentError(f"{name} has negative entries")
    axes = tuple(range(n_cond, arr.ndim))
    sums = arr.sum(axis=axes) if axes else arr
    if np.max(np.abs(sums - 1.0)) > SLICE_TOL:
        raise ArgumentError(f"{name}: conditional slices do not sum to 1")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class OrthogonalDmc:
    kernel1: np.ndarray
    kernel2: np.ndarray
    case: EavesdropperCase = EavesdropperCase.CASE3

    def __post_init__(self):
        k1 = _as_kernel(self.kernel1, 2, "kernel1")
        k2 = _as_kernel(self.kernel2, 2, "kernel2")
        if k1.shape[1] != k2.shape[1]:
            raise ArgumentError(
                f"relay input alphabet differs between kernels ({k1.shape[1]} vs {k2.shape[1]})"
            )
        object.__setattr__(self, "kernel1", k1)
        object.__setattr__(self, "kernel2", k2)
        object.__setattr__(self, "case", EavesdropperCase.parse(self.case))

    @property
    def input_shape(self):
        """Alphabet sizes of (X_R, X_D, X_2)."""
        return (self.kernel1.shape[0], self.kernel2.shape[0], self.kernel1.shape[1])

    @property
    def sizes(self):
        """Alphabet sizes keyed by variable name."""
        xr, x2, y1, y21 = self.kernel1.shape
        xd, _, y, y22 = self.kernel2.shape
        return {"x_r": xr, "x_d": xd, "x_2": x2, "y_1": y1, "y": y, "y_21": y21, "y_22": y22}

    def with_case(self, case) -> "OrthogonalDmc":
        return replace(self, case=EavesdropperCase.parse(case))

    def to_dict(self):
        return {
            "case": self.case.value,
            "kernel1": self.kernel1.tolist(),
            "kernel2": self.kernel2.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - {"case", "kernel1", "kernel2"}
        if unknown:
            raise ArgumentError(f"unknown channel keys: {sorted(unknown)}")
        return cls(d["kernel1"], d["kernel2"], d.get("case", "case3"))


@dataclass(frozen=True, eq=False)
class AuxiliaryScheme:
    """Time-sharing variable U, auxiliaries (V_R, V_D, V_2) and a prefix channel.

    ``p_u[u]``, ``p_v_given_u[u, v_r, v_d, v_2]`` and
    ``prefix[v_r, v_d, v_2, x_r, x_d, x_2]``.
    """

    p_u: np.ndarray
    p_v_given_u: np.ndarray
    prefix: np.ndarray

    def __post_init__(self):
        p_u = _as_conditional(np.atleast_1d(self.p_u), 0, "p_u")
        pv = _as_conditional(self.p_v_given_u, 1, "p_v_given_u")
        pre = _as_conditional(self.prefix, 3, "prefix")
        if p_u.ndim != 1 or pv.ndim != 4 or pre.ndim != 6:
            raise ArgumentError("scheme arrays have the wrong number of axes")
        if pv.shape[0] != p_u.shape[0] or pv.shape[1:] != pre.shape[:3]:
            raise ArgumentError("scheme auxiliary alphabets are inconsistent")
        object.__setattr__(self, "p_u", p_u)
        object.__setattr__(self, "p_v_given_u", pv)
        object.__setattr__(self, "prefix", pre)

    @property
    def input_shape(self):
        return self.prefix.shape[3:]

    @classmethod
    def identity(cls, input_pmf) -> "AuxiliaryScheme":
        """V = X through a noiseless prefix, constant U."""
        table = input_pmf.table if isinstance(input_pmf, JointPmf) else np.asarray(input_pmf, float)
        shape = table.shape
        n = int(np.prod(shape))
        prefix = np.eye(n).reshape(shape + shape)
        return cls(np.ones(1), table[None], prefix)

    def to_dict(self):
        return {
            "p_u": self.p_u.tolist(),
            "p_v_given_u": self.p_v_given_u.tolist(),
            "prefix": self.prefix.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - {"p_u", "p_v_given_u", "prefix"}
        if unknown:
            raise ArgumentError(f"unknown scheme keys: {sorted(unknown)}")
        return cls(d["p_u"], d["p_v_given_u"], d["prefix"])


@dataclass(frozen=True, eq=False)
class FullDuplexDmc:
    """Full-duplex relay-eavesdropper channel with a fixed input scheme.

    ``kernel[x_1, x_2, y, y_1, y_2]``, ``p_v[v]``, ``p_x1_given_v[v, x_1]``,
    ``p_x2_given_v[v, x_2]``.
    """

    kernel: np.ndarray
    p_v: np.ndarray
    p_x1_given_v: np.ndarray
    p_x2_given_v: np.ndarray

    def __post_init__(self):
        k = _as_conditional(self.kernel, 2, "kernel")
        if k.ndim != 5:
            raise ArgumentError("kernel must have axes (x1, x2, y, y1, y2)")
        pv = _as_conditional(np.atleast_1d(self.p_v), 0, "p_v")
        p1 = _as_conditional(self.p_x1_given_v, 1, "p_x1_given_v")
        p2 = _as_conditional(self.p_x2_given_v, 1, "p_x2_given_v")
        if p1.shape != (pv.shape[0], k.shape[0]) or p2.shape != (pv.shape[0], k.shape[1]):
            raise ArgumentError("input scheme does not match the channel alphabets")
        object.__setattr__(self, "kernel", k)
        object.__setattr__(self, "p_v", pv)
        object.__setattr__(self, "p_x1_given_v", p1)
        object.__setattr__(self, "p_x2_given_v", p2)


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    max_violation: float
    messages: tuple = ()


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------


def _product_violation(kernel, indep_axis):
    """Max deviation of p(a, b | in) from p(a | in) q(b) with q input-free.

    ``indep_axis`` is the output axis (-1 or -2) that must be independent.
    """
    pa = kernel.sum(axis=indep_axis, keepdims=True)
    other = -1 if indep_axis == -2 else -2
    pb = kernel.sum(axis=other, keepdims=True)
    flat_b = pb.reshape(-1, pb.shape[-2] * pb.shape[-1])
    input_dependence = float(np.max(np.abs(flat_b - flat_b.mean(axis=0))))
    product = float(np.max(np.abs(kernel - pa * pb)))
    return max(input_dependence, product)


def validate_factorization(channel: OrthogonalDmc) -> ValidationReport:
    """Check the product structure demanded by the channel's eavesdropper case."""
    msgs = []
    worst = 0.0
    for name, k in (("kernel1", channel.kernel1), ("kernel2", channel.kernel2)):
        dev = float(np.max(np.abs(k.sum(axis=(-2, -1)) - 1.0)))
        worst = max(worst, dev)
        if dev > SLICE_TOL:
            msgs.append(f"{name} slices deviate from 1 by {dev:.3e}")
    if channel.case is EavesdropperCase.CASE1:
        dev = _product_violation(channel.kernel2, -1)
        worst = max(worst, dev)
        if dev > FACTOR_TOL:
            msgs.append(f"case1: y_22 is not independent of the destination-channel inputs ({dev:.3e})")
    elif channel.case is EavesdropperCase.CASE2:
        dev = _product_violation(channel.kernel1, -1)
        worst = max(worst, dev)
        if dev > FACTOR_TOL:
            msgs.append(f"case2: y_21 is not independent of the relay-channel inputs ({dev:.3e})")
    return ValidationReport(not msgs, worst, tuple(msgs))


# --------------------------------------------------------------------------
# joint tables
# --------------------------------------------------------------------------

# axes of the input-level joint
XR, XD, X2, Y1, Y, Y21, Y22 = range(7)
# axes of the auxiliary-level joint (inputs summed out)
U_, VR, VD, V2, AY1, AY, AY21, AY22 = range(8)


def _check_input(channel, table, batch=False):
    shape = table.shape[1:] if batch else table.shape
    if tuple(shape) != tuple(channel.input_shape):
        raise ArgumentError(
            f"input pmf has shape {tuple(shape)}, channel inputs are {channel.input_shape}"
        )


def input_joint(channel: OrthogonalDmc, table, batch=False):
    """Joint table over (X_R, X_D, X_2, Y_1, Y, Y_21, Y_22)."""
    size = table.size * channel.kernel1.shape[2] * channel.kernel1.shape[3]
    size *= channel.kernel2.shape[2] * channel.kernel2.shape[3]
    if size > MAX_JOINT_ENTRIES:
        raise CapacityGuardError(f"joint table would have {size} entries")
    spec = "nabc,acde,bcfg->nabcdfeg" if batch else "abc,acde,bcfg->abcdfeg"
    return np.einsum(spec, table, channel.kernel1, channel.kernel2, optimize=True)


def auxiliary_joint(channel: OrthogonalDmc, scheme: AuxiliaryScheme):
    """Joint table over (U, V_R, V_D, V_2, Y_1, Y, Y_21, Y_22)."""
    if tuple(scheme.input_shape) != tuple(channel.input_shape):
        raise ArgumentError(
            f"scheme emits inputs of shape {tuple(scheme.input_shape)}, channel expects {channel.input_shape}"
        )
    puv = scheme.p_u[:, None, None, None] * scheme.p_v_given_u
    size = puv.size
    for k in (channel.kernel1, channel.kernel2):
        size *= k.shape[2] * k.shape[3]
    if size > MAX_JOINT_ENTRIES:
        raise CapacityGuardError(f"joint table would have {size} entries")
    # u r d t: U, V_R, V_D, V_2 ; a b c: X_R, X_D, X_2
    return np.einsum(
        "urdt,rdtabc,acpq,bcsw->urdtpsqw",
        puv,
        scheme.prefix,
        channel.kernel1,
        channel.kernel2,
        optimize=True,
    )


# --------------------------------------------------------------------------
# bound expressions
# --------------------------------------------------------------------------


def _pdf_rate_from_joint(J, case, batch=False, clamp=True):
    first = table_mi(J, {XD, XR}, {Y, Y1}, {X2}, batch)
    second = table_mi(J, {XD, X2}, {Y}, (), batch)
    if case is EavesdropperCase.CASE1:
        sub = table_mi(J, {XR}, {Y21, Y22}, (), batch)
    elif case is EavesdropperCase.CASE2:
        sub = table_mi(J, {XD, X2}, {Y21, Y22}, (), batch)
    else:
        sub = table_mi(J, {XR}, {Y21, Y22}, {X2}, batch) + table_mi(J, {XD, X2}, {Y21, Y22}, (), batch)
    val = np.minimum(first, second) - sub
    return np.maximum(val, 0.0) if clamp else val


def _input_table(channel, inp):
    table = inp.table if isinstance(inp, JointPmf) else np.asarray(inp, dtype=np.float64)
    _check_input(channel, table)
    return table


def pdf_inner_bound(channel: OrthogonalDmc, input_pmf) -> float:
    """Partial decode-and-forward secrecy rate at a fixed p(x_r, x_d, x_2)."""
    J = input_joint(channel, _input_table(channel, input_pmf))
    return float(_pdf_rate_from_joint(J, channel.case))


def _H(M, keep):
    return table_entropy(M, keep, batch=True)


def pdf_inner_bound_batch(channel: OrthogonalDmc, tables) -> np.ndarray:
    """Vectorized :func:`pdf_inner_bound` over a stack of input tables.

    Works from two reduced marginals, p(x_r, x_d, x_2, y_1, y) and
    p(x_r, x_d, x_2, y_21, y_22), instead of the full seven-axis joint.
    """
    P = np.asarray(tables, dtype=np.float64)
    _check_input(channel, P, batch=True)
    k1, k2 = channel.kernel1, channel.kernel2
    main = np.einsum("nabc,acd,bcf->nabcdf", P, k1.sum(axis=3), k2.sum(axis=3), optimize=True)
    eve = np.einsum("nabc,ace,bcg->nabceg", P, k1.sum(axis=2), k2.sum(axis=2), optimize=True)
    # main axes: 0 X_R, 1 X_D, 2 X_2, 3 Y_1, 4 Y ; eve axes: 0 X_R, 1 X_D, 2 X_2, 3 Y_21, 4 Y_22
    h_x2 = _H(main, {2})
    h_dx2 = _H(main, {1, 2})
    first = _H(main, {0, 1, 2}) + _H(main, {2, 3, 4}) - h_x2 - _H(main, {0, 1, 2, 3, 4})
    second = h_dx2 + _H(main, {4}) - _H(main, {1, 2, 4})
    h_y2 = _H(eve, {3, 4})
    leak_dx2 = h_dx2 + h_y2 - _H(eve, {1, 2, 3, 4})
    if channel.case is EavesdropperCase.CASE1:
        sub = _H(eve, {0}) + h_y2 - _H(eve, {0, 3, 4})
    elif channel.case is EavesdropperCase.CASE2:
        sub = leak_dx2
    else:
        leak_r = _H(eve, {0, 2}) + _H(eve, {2, 3, 4}) - h_x2 - _H(eve, {0, 2, 3, 4})
        sub = clamp_mi(leak_r) + clamp_mi(leak_dx2)
    if channel.case is not EavesdropperCase.CASE3:
        sub = clamp_mi(sub)
    val = np.minimum(clamp_mi(first), clamp_mi(second)) - sub
    return np.maximum(val, 0.0)


def _aux_terms(Q):
    first = table_mi(Q, {VD, VR}, {AY, AY1}, {V2, U_})
    second = table_mi(Q, {VD, V2}, {AY}, {U_})
    return min(first, second)


def randomized_pdf_inner_bound(channel: OrthogonalDmc, scheme: AuxiliaryScheme) -> float:
    """PDF secrecy rate with a prefix channel and time sharing."""
    Q = auxiliary_joint(channel, scheme)
    head = _aux_terms(Q)
    Y2 = {AY21, AY22}
    if channel.case is EavesdropperCase.CASE1:
        sub = table_mi(Q, {VR}, Y2, {U_})
    elif channel.case is EavesdropperCase.CASE2:
        sub = table_mi(Q, {VD, V2}, Y2, {U_})
    else:
        sub = table_mi(Q, {VR}, Y2, {V2, U_}) + table_mi(Q, {VD, V2}, Y2, {U_})
    return max(head - sub, 0.0)


def outer_bound_expression(channel: OrthogonalDmc, scheme: AuxiliaryScheme) -> float:
    """Outer-bound expression evaluated at one scheme.

    This is *not* a certified outer bound: the bound is the maximum of this
    expression over all schemes of unbounded cardinality.
    """
    Q = auxiliary_joint(channel, scheme)
    head = _aux_terms(Q)
    Y2 = {AY21, AY22}
    if channel.case is EavesdropperCase.CASE1:
        sub = table_mi(Q, {VR}, Y2, {U_})
    elif channel.case is EavesdropperCase.CASE2:
        sub = table_mi(Q, {VD, V2}, Y2, {U_})
    else:
        sub = table_mi(Q, {VR, VD, V2}, Y2, {U_})
    return max(head - sub, 0.0)


def full_duplex_pdf_rate(channel: FullDuplexDmc) -> float:
    """PDF secrecy rate of a full-duplex relay-eavesdropper channel."""
    # axes: V, X1, X2, Y, Y1, Y2
    J = np.einsum(
        "v,va,vb,abcde->vabcde",
        channel.p_v,
        channel.p_x1_given_v,
        channel.p_x2_given_v,
        channel.kernel,
        optimize=True,
    )
    first = table_mi(J, {1}, {3}, {2, 0}) + table_mi(J, {0}, {4}, {2})
    second = table_mi(J, {1, 2, 0}, {3})
    sub = table_mi(J, {1, 2}, {5})
    return max(min(first, second) - sub, 0.0)


def no_eavesdropper_capacity_expression(channel: OrthogonalDmc, input_pmf) -> float:
    """Relay-channel capacity expression (no secrecy) at a fixed input pmf."""
    J = input_joint(channel, _input_table(channel, input_pmf))
    cut1 = table_mi(J, {XR}, {Y1}, {X2}) + table_mi(J, {XD}, {Y}, {X2})
    cut2 = table_mi(J, {XR, XD, X2}, {Y})
    return float(min(cut1, cut2))


def split_decoding_gap(channel: OrthogonalDmc, input_pmf) -> float:
    """I(X_D;Y|X_2) + I(X_R;Y_1|X_2) - I(X_D X_R; Y Y_1 | X_2); never negative."""
    J = input_joint(channel, _input_table(channel, input_pmf))
    lhs = table_mi(J, {XD}, {Y}, {X2}) + table_mi(J, {XR}, {Y1}, {X2})
    return float(lhs - table_mi(J, {XD, XR}, {Y, Y1}, {X2}))


# --------------------------------------------------------------------------
# simplex search
# --------------------------------------------------------------------------


def simplex_grid_size(cells: int, resolution: int) -> int:
    return math.comb(resolution + cells - 1, cells - 1)


def _simplex_chunks(cells, resolution, chunk):
    """Yield (m, cells) arrays of integer compositions of ``resolution``, lexicographic in bar positions."""
    if cells == 1:
        yield np.array([[resolution]], dtype=np.int64)
        return
    total = resolution + cells - 1
    combos = itertools.combinations(range(total), cells - 1)
    while True:
        block = list(itertools.islice(combos, chunk))
        if not block:
            return
        bars = np.array(block, dtype=np.int64)
        edges = np.concatenate(
            [np.full((len(bars), 1), -1), bars, np.full((len(bars), 1), total)], axis=1
        )
        yield np.diff(edges, axis=1) - 1


def _lex_less(a, b):
    diff = np.nonzero(a != b)[0]
    return bool(diff.size) and a[diff[0]] < b[diff[0]]


def _pick_best(values, tables, best_val, best_tab):
    """Max with lexicographically smallest table among exact ties."""
    top = values.max()
    if top < best_val:
        return best_val, best_tab
    idx = np.nonzero(values == top)[0]
    cand = tables[idx[0]]
    for i in idx[1:]:
        if _lex_less(tables[i], cand):
            cand = tables[i]
    if top > best_val or best_tab is None or _lex_less(cand, best_tab):
        return float(top), cand.copy()
    return best_val, best_tab


def _refine(channel, starts, resolution, floor=1e-6, max_iter=500):
    """Pairwise mass-transfer ascent with step halving, run for all starts at once."""
    shape = channel.input_shape
    n = int(np.prod(shape))
    X = starts.reshape(len(starts), n).copy()
    vals = pdf_inner_bound_batch(channel, X.reshape((-1,) + shape))
    step = np.full(len(X), 1.0 / resolution)
    pairs = np.array([(i, j) for i in range(n) for j in range(n) if i != j])
    chunk = max(1, 200_000 // max(1, X.shape[1] * 64))
    for _ in range(max_iter):
        live = np.nonzero(step >= floor)[0]
        if live.size == 0:
            break
        for r in live:
            moved = np.minimum(step[r], X[r, pairs[:, 0]])
            ok = moved > 0
            if not ok.any():
                step[r] *= 0.5
                continue
            cand = np.repeat(X[r][None], ok.sum(), axis=0)
            rows = np.arange(cand.shape[0])
            cand[rows, pairs[ok, 0]] -= moved[ok]
            cand[rows, pairs[ok, 1]] += moved[ok]
            cand = np.maximum(cand, 0.0)
            cand /= cand.sum(axis=1, keepdims=True)
            cv = np.concatenate(
                [
                    pdf_inner_bound_batch(channel, cand[i : i + chunk].reshape((-1,) + shape))
                    for i in range(0, len(cand), chunk)
                ]
            )
            k = int(np.argmax(cv))
            if cv[k] > vals[r]:
                X[r], vals[r] = cand[k], cv[k]
            else:
                step[r] *= 0.5
    return X, vals


def maximize_inner_bound(
    channel: OrthogonalDmc,
    grid_resolution: int,
    refine: bool = False,
    restarts: int = 20,
    max_grid_points: int = MAX_GRID_POINTS,
):
    """Best PDF secrecy rate over a simplex grid of input pmfs.

    Every grid point is an actual input distribution, so the returned value is
    achievable.  With ``refine`` the best ``restarts`` grid points seed a
    pairwise mass-transfer ascent.

    Returns ``(rate, JointPmf)``.
    """
    if int(grid_resolution) != grid_resolution or grid_resolution < 1:
        raise ArgumentError("grid_resolution must be a positive integer")
    shape = channel.input_shape
    cells = int(np.prod(shape))
    if cells > MAX_INPUT_CELLS:
        raise CapacityGuardError(f"{cells} input cells exceeds the limit of {MAX_INPUT_CELLS}")
    npts = simplex_grid_size(cells, grid_resolution)
    if npts > max_grid_points:
        raise CapacityGuardError(
            f"simplex grid at resolution {grid_resolution} over {cells} cells has {npts} points "
            f"(limit {max_grid_points})"
        )
    joint_per_pt = cells * int(np.prod(channel.kernel1.shape[2:])) * int(np.prod(channel.kernel2.shape[2:]))
    chunk = max(1, min(20_000, 4_000_000 // joint_per_pt))
    best_val, best_tab = -np.inf, None
    keep_vals, keep_tabs = [], []
    for counts in _simplex_chunks(cells, grid_resolution, chunk):
        tabs = counts / grid_resolution
        vals = pdf_inner_bound_batch(channel, tabs.reshape((-1,) + shape))
        best_val, best_tab = _pick_best(vals, tabs, best_val, best_tab)
        if refine:
            top = np.argsort(-vals, kind="stable")[:restarts]
            keep_vals.append(vals[top])
            keep_tabs.append(tabs[top])
    if refine:
        allv = np.concatenate(keep_vals)
        allt = np.concatenate(keep_tabs)
        top = np.argsort(-allv, kind="stable")[:restarts]
        X, vals = _refine(channel, allt[top], grid_resolution)
        best_val, best_tab = _pick_best(vals, X, best_val, best_tab)
    return float(best_val), JointPmf.from_table(best_tab.reshape(shape) / best_tab.sum())


# --------------------------------------------------------------------------
# the three worked examples
# --------------------------------------------------------------------------


def _det_kernel(n_a, n_b, n_o1, n_o2, fn):
    k = np.zeros((n_a, n_b, n_o1, n_o2))
    for a in range(n_a):
        for b in range(n_b):
            o1, o2 = fn(a, b)
            k[a, b, o1, o2] = 1.0
    return k


def _bits(x):
    """(first, second) bits of a 2-bit symbol encoded as 2*first + second."""
    return x >> 1, x & 1


def _pair(a, b):
    return 2 * a + b


def _example1():
    k1 = _det_kernel(2, 2, 2, 2, lambda xr, x2: (xr, xr))
    k2 = _det_kernel(2, 2, 2, 2, lambda xd, x2: (xd * x2, 1 if xd <= x2 else 0))
    ch = OrthogonalDmc(k1, k2, EavesdropperCase.CASE3)
    inp = np.zeros((2, 2, 2))
    inp[0, :, 1] = 0.5  # X_R = 0, X_D = w uniform, X_2 = 1
    return ch, AuxiliaryScheme.identity(inp), 1.0


def _example2():
    def k1(xr, x2):
        return xr, xr

    def k2(xd, x2):
        ad, bd = _bits(xd)
        a1, b1 = _bits(x2)
        return _pair(ad, bd ^ a1), _pair(a1, b1 ^ ad)

    ch = OrthogonalDmc(_det_kernel(4, 4, 4, 4, k1), _det_kernel(4, 4, 4, 4, k2), EavesdropperCase.CASE3)
    # V_R, V_2 constant; V_D = X_D uniform; relay emits (0, n) with n a fair coin.
    pv = np.zeros((1, 1, 4, 1))
    pv[0, 0, :, 0] = 0.25
    prefix = np.zeros((1, 4, 1, 4, 4, 4))
    for vd in range(4):
        for n in (0, 1):
            prefix[0, vd, 0, _pair(0, 0), vd, _pair(0, n)] = 0.5
    return ch, AuxiliaryScheme(np.ones(1), pv, prefix), 2.0


def _example3():
    def k1(xr, x2):
        ar, br = _bits(xr)
        return xr, br

    def k2(xd, x2):
        a1, b1 = _bits(x2)
        return _pair(a1, xd), b1 ^ xd

    ch = OrthogonalDmc(_det_kernel(4, 4, 4, 2, k1), _det_kernel(2, 4, 4, 2, k2), EavesdropperCase.CASE3)
    # V_R = current relay-channel bit, V_D = current direct bit, V_2 = the bit the
    # relay decoded in the previous use (stationary: uniform, independent).
    pv = np.full((1, 2, 2, 2), 0.125)
    prefix = np.zeros((2, 2, 2, 4, 2, 4))
    for vr, vd, v2, n in itertools.product((0, 1), repeat=4):
        prefix[vr, vd, v2, _pair(vr, 0), vd, _pair(v2, n)] = 0.5
    return ch, AuxiliaryScheme(np.ones(1), pv, prefix), 2.0


_EXAMPLES = {1: _example1, 2: _example2, 3: _example3}


def example_channel(example_id: int):
    """``(channel, scheme, expected_rate)`` for worked example 1, 2 or 3."""
    try:
        build = _EXAMPLES[int(example_id)]
    except (KeyError, TypeError, ValueError):
        raise ArgumentError(f"example id must be 1, 2 or 3, got {example_id!r}") from None
    return build()


def example_input(example_id: int) -> JointPmf:
    """Plain (non-randomized) input pmf matching each example's coding strategy."""
    ch, scheme, _ = example_channel(example_id)
    p = np.einsum("urdt,rdtabc->abc", scheme.p_u[:, None, None, None] * scheme.p_v_given_u, scheme.prefix)
    return JointPmf.from_table(p)


@dataclass(frozen=True)
class ExampleCheck:
    example_id: int
    expected: float
    achieved: float
    factorization_ok: bool
    error: Optional[str] = None

    @property
    def passed(self):
        return self.error is None and self.factorization_ok and abs(self.achieved - self.expected) <= 1e-9


def check_example(example_id, channel, scheme, expected) -> ExampleCheck:
    """Evaluate one example scheme and its factorization; never raises."""
    try:
        report = validate_factorization(channel)
        achieved = randomized_pdf_inner_bound(channel, scheme)
        outer = outer_bound_expression(channel, scheme)
    except RelaySecError as exc:
        return ExampleCheck(example_id, expected, float("nan"), False, str(exc))
    error = None
    if abs(outer - expected) > 1e-9:
        error = f"outer expression {outer:.9f} differs from {expected:.9f}"
    return ExampleCheck(example_id, expected, achieved, report.passed, error)
