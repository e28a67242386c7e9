import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relaysec.errors import ArgumentError, DegenerateGeometryError
from relaysec.search import SearchConfig
from relaysec.sweep import (
    HEADER,
    Geometry,
    SweepResult,
    SweepRow,
    emit_table,
    gains_from_geometry,
    path_gain,
    relay_path,
    sweep_relay_position,
)

TINY = SearchConfig(grid=3, restarts=3)


def test_path_gain_examples():
    assert path_gain((0, 0), (1, 0), 2) == 1.0
    assert path_gain((0, 0), (1.5, 0), 2) == pytest.approx(1 / 1.5, abs=1e-15)
    assert path_gain((0, 0), (0.5, 0), 4) == pytest.approx(4.0, abs=1e-15)
    with pytest.raises(DegenerateGeometryError):
        path_gain((1, 1), (1, 1), 2)


def test_default_gains():
    ch = gains_from_geometry(Geometry())
    assert ch.h_sd == 1.0
    assert ch.h_se1 == ch.h_se2 == pytest.approx(1 / 1.5)
    assert ch.h_sr == pytest.approx(2.0)
    assert ch.h_re == pytest.approx(1.0)
    assert gains_from_geometry(Geometry(), "case2").case.value == "case2"
    with pytest.raises(DegenerateGeometryError):
        gains_from_geometry(Geometry(relay=(1.0, 0.0)))


def test_geometry_validation():
    with pytest.raises(ArgumentError):
        Geometry(alpha=0)
    with pytest.raises(ArgumentError):
        Geometry(relay=(1.0,))
    with pytest.raises(ArgumentError):
        Geometry(P_D=-1)
    with pytest.raises(ArgumentError):
        relay_path((0, 0), (1, 0), 1)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 2 * math.pi), st.floats(0.5, 4))
def test_gains_depend_only_on_distances(dx, dy, theta, alpha):
    g = Geometry(relay=(0.4, 0.3), alpha=alpha)
    c, s = math.cos(theta), math.sin(theta)

    def move(p):
        return (c * p[0] - s * p[1] + dx, s * p[0] + c * p[1] + dy)

    h = Geometry(*(move(p) for p in (g.source, g.destination, g.eavesdropper, g.relay)), alpha=alpha)
    a, b = gains_from_geometry(g), gains_from_geometry(h)
    for k in ("h_sr", "h_sd", "h_rd", "h_se1", "h_se2", "h_re"):
        assert getattr(a, k) == pytest.approx(getattr(b, k), rel=1e-9)


# ---------------------------------------------------------------- table output


def test_emit_empty_and_single(tmp_path):
    p = tmp_path / "empty.csv"
    emit_table(SweepResult(), p)
    assert p.read_text() == "relay_x,relay_y,case,pdf_inner,nf_inner,genie_outer,wiretap_baseline\n"
    row = SweepRow(0.5, 0.0, "case2", 0.1234567, 0.2, 0.3, 1 / 3)
    emit_table(SweepResult([row]), p)
    lines = p.read_text().splitlines()
    assert len(lines) == 2
    assert lines[1] == "0.500000,0.000000,case2,0.123457,0.200000,0.300000,0.333333"
    assert tuple(lines[0].split(",")) == HEADER


def test_emit_unwritable_path(tmp_path):
    bad = tmp_path / "missing" / "out.csv"
    with pytest.raises(OSError) as err:
        emit_table(SweepResult(), bad)
    assert str(bad) in str(err.value)


# ---------------------------------------------------------------- sweeps


def test_small_sweep_invariants_and_order(tmp_path):
    res = sweep_relay_position(Geometry(), (0, 0), (3, 0), 5, ("case2", "case1"), TINY)
    assert len(res.rows) == 10
    assert [r.case for r in res.rows[:2]] == ["case1", "case2"]
    xs = [r.relay_x for r in res.rows[::2]]
    assert xs == sorted(xs) and xs[0] == pytest.approx(1e-3)
    assert res.metadata["notes"] and "off the source" in res.metadata["notes"][0]
    assert res.violations() == []
    assert [r.relay_x for r in res.rows if r.flagged] == [1.5, 1.5]  # relay on the eavesdropper
    for r in (r for r in res.rows if not r.flagged):
        assert r.pdf_inner >= 0 and r.nf_inner >= 0
        assert r.pdf_inner <= r.genie_outer + 1e-6 and r.nf_inner <= r.genie_outer + 1e-6
    assert res.find(3.0, "case2").pdf_inner >= res.find(3.0, "case2").wiretap_baseline - 1e-9


def test_degenerate_point_is_flagged():
    res = sweep_relay_position(Geometry(), (1.0, 0.0), (1.5, 0.0), 2, ("case2",), TINY)
    a, b = res.rows
    assert a.flagged and b.flagged
    assert math.isnan(a.pdf_inner)
    assert any("degenerate" in n for n in res.metadata["notes"])
    assert res.violations() == []


def test_sweep_is_byte_reproducible(tmp_path):
    paths = []
    for i in range(2):
        res = sweep_relay_position(Geometry(), (0.2, 0.0), (2.0, 0.0), 3, ("case3",), TINY)
        p = tmp_path / f"run{i}.csv"
        emit_table(res, p)
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_sweep_needs_cases():
    with pytest.raises(ArgumentError):
        sweep_relay_position(Geometry(), samples=2, cases=(), config=TINY)
