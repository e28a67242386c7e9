"""Relay-position sweeps over a planar path-loss geometry.

Gains follow h = 1 / d^(alpha/2).  A sweep moves the relay along a segment
and, at every sample and every requested eavesdropper case, optimizes the
PDF, NF and genie bounds and evaluates the silent-relay baseline.
"""

import csv
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .dmc import EavesdropperCase
from .errors import ArgumentError, DegenerateGeometryError
from .gaussian import GaussianOrthogonalChannel, wiretap_baseline
from .optimizer import optimize_bound
from .search import SearchConfig

logger = logging.getLogger(__name__)

HEADER = ("relay_x", "relay_y", "case", "pdf_inner", "nf_inner", "genie_outer", "wiretap_baseline")
SOURCE_OFFSET = 1e-3
# coarse grid plus many random starts: the PDF optimum often sits off the grid
SWEEP_CONFIG = SearchConfig(grid=5, restarts=8, random_restarts=24)
MIN_DISTANCE = 1e-12


def _point(p, name):
    try:
        x, y = (float(v) for v in p)
    except (TypeError, ValueError):
        raise ArgumentError(f"{name} must be an (x, y) pair, got {p!r}") from None
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ArgumentError(f"{name} must be finite")
    return (x, y)


@dataclass(frozen=True)
class Geometry:
    source: tuple = (0.0, 0.0)
    destination: tuple = (1.0, 0.0)
    eavesdropper: tuple = (1.5, 0.0)
    relay: tuple = (0.5, 0.0)
    alpha: float = 2.0
    P_R: float = 1.0
    P_D: float = 1.0
    P_2: float = 1.0

    def __post_init__(self):
        for name in ("source", "destination", "eavesdropper", "relay"):
            object.__setattr__(self, name, _point(getattr(self, name), name))
        if not float(self.alpha) > 0:
            raise ArgumentError("path-loss exponent must be positive")
        for name in ("alpha", "P_R", "P_D", "P_2"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if min(self.P_R, self.P_D, self.P_2) < 0:
            raise ArgumentError("powers must be non-negative")

    def with_relay(self, relay) -> "Geometry":
        return replace(self, relay=relay)

    def to_dict(self):
        return {
            "source": list(self.source),
            "destination": list(self.destination),
            "eavesdropper": list(self.eavesdropper),
            "relay": list(self.relay),
            "alpha": self.alpha,
        }


def path_gain(a, b, alpha, label="link"):
    d = math.dist(a, b)
    if d < MIN_DISTANCE:
        raise DegenerateGeometryError(f"{label}: transmitter and receiver coincide at {tuple(a)}")
    return 1.0 / d ** (alpha / 2.0)


def gains_from_geometry(geometry: Geometry, case=EavesdropperCase.CASE3) -> GaussianOrthogonalChannel:
    g = geometry
    h_se = path_gain(g.source, g.eavesdropper, g.alpha, "source-eavesdropper")
    ch = GaussianOrthogonalChannel(
        h_sr=path_gain(g.source, g.relay, g.alpha, "source-relay"),
        h_sd=path_gain(g.source, g.destination, g.alpha, "source-destination"),
        h_rd=path_gain(g.relay, g.destination, g.alpha, "relay-destination"),
        h_se1=h_se,
        h_se2=h_se,
        h_re=path_gain(g.relay, g.eavesdropper, g.alpha, "relay-eavesdropper"),
        P_R=g.P_R,
        P_D=g.P_D,
        P_2=g.P_2,
    )
    return ch.with_case(case)


@dataclass(frozen=True)
class SweepRow:
    relay_x: float
    relay_y: float
    case: str
    pdf_inner: float
    nf_inner: float
    genie_outer: float
    wiretap_baseline: float
    flagged: bool = False
    note: str = ""

    def cells(self):
        rates = (self.pdf_inner, self.nf_inner, self.genie_outer, self.wiretap_baseline)
        return [f"{self.relay_x:.6f}", f"{self.relay_y:.6f}", self.case] + [f"{r:.6f}" for r in rates]


@dataclass
class SweepResult:
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def violations(self, tol=1e-6):
        """Unflagged rows where an inner bound exceeds the outer bound."""
        return [
            r
            for r in self.rows
            if not r.flagged and (r.pdf_inner > r.genie_outer + tol or r.nf_inner > r.genie_outer + tol)
        ]

    def find(self, relay_x, case, tol=1e-9):
        case = EavesdropperCase.parse(case).value
        for r in self.rows:
            if r.case == case and abs(r.relay_x - relay_x) <= tol:
                return r
        raise KeyError((relay_x, case))


def relay_path(start, end, samples):
    if int(samples) != samples or samples < 2:
        raise ArgumentError("a relay path needs at least 2 samples")
    start, end = np.asarray(_point(start, "start")), np.asarray(_point(end, "end"))
    t = np.linspace(0.0, 1.0, int(samples))
    return start[None] + t[:, None] * (end - start)[None]


def _offset_from_source(p, source, direction):
    if math.dist(p, source) >= MIN_DISTANCE:
        return (float(p[0]), float(p[1])), ""
    n = np.linalg.norm(direction)
    u = direction / n if n > 0 else np.array([1.0, 0.0])
    q = np.asarray(source) + SOURCE_OFFSET * u
    return (float(q[0]), float(q[1])), f"relay moved {SOURCE_OFFSET:g} off the source"


def evaluate_point(geometry: Geometry, case, config: SearchConfig) -> dict:
    ch = gains_from_geometry(geometry, case)
    return {
        "pdf_inner": optimize_bound(ch, "pdf_inner", config).value,
        "nf_inner": optimize_bound(ch, "nf_inner", config).value,
        "genie_outer": optimize_bound(ch, "genie_outer", config).value,
        "wiretap_baseline": wiretap_baseline(ch),
    }


def sweep_relay_position(
    base: Geometry,
    start=(0.0, 0.0),
    end=(3.0, 0.0),
    samples: int = 41,
    cases=("case1", "case2", "case3"),
    config: SearchConfig = SWEEP_CONFIG,
) -> SweepResult:
    """Rates at each relay sample and case, rows ordered by position then case."""
    cases = sorted({EavesdropperCase.parse(c) for c in cases}, key=lambda c: c.value)
    if not cases:
        raise ArgumentError("at least one case is required")
    pts = relay_path(start, end, samples)
    direction = pts[-1] - pts[0]
    result = SweepResult(
        metadata={
            "geometry": base.to_dict(),
            "powers": {"P_R": base.P_R, "P_D": base.P_D, "P_2": base.P_2},
            "path": {"start": pts[0].tolist(), "end": pts[-1].tolist(), "samples": int(samples)},
            "cases": [c.value for c in cases],
            "optimizer": config.to_dict(),
            "notes": [],
        }
    )
    for p in pts:
        pos, note = _offset_from_source(p, base.source, direction)
        if note:
            result.metadata["notes"].append(f"{note}: sampled at ({pos[0]:.6f}, {pos[1]:.6f})")
        geo = base.with_relay(pos)
        for case in cases:
            try:
                rates = evaluate_point(geo, case, config)
                row = SweepRow(pos[0], pos[1], case.value, flagged=False, note=note, **rates)
            except DegenerateGeometryError as exc:
                logger.warning("skipping relay at %s: %s", pos, exc)
                nan = float("nan")
                row = SweepRow(pos[0], pos[1], case.value, nan, nan, nan, nan, flagged=True, note=str(exc))
            result.rows.append(row)
    flagged = sorted({(r.relay_x, r.relay_y, r.note) for r in result.rows if r.flagged})
    result.metadata["notes"] += [f"degenerate geometry at ({x:.6f}, {y:.6f}): {n}" for x, y, n in flagged]
    return result


def emit_table(result: SweepResult, destination) -> None:
    """Write the sweep as CSV with 6-decimal rates (flagged rows carry ``nan``)."""
    path = Path(destination)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(HEADER)
            for row in result.rows:
                w.writerow(row.cells())
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write sweep table: {exc.strerror}", str(path)) from exc
