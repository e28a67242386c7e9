"""TOML run configuration: parsing with strict key checking, and writing.

Sections::

    [channel]       h_sr h_sd h_rd h_se1 h_se2 h_re
    [powers]        P_R P_D P_2
    [eavesdropper]  e1 e2            (booleans)  or  case = "case1|case2|case3"
    [geometry]      source destination eavesdropper relay alpha
    [sweep]         start end samples cases
    [optimizer]     grid restarts step_floor max_iter seed polish random_restarts
    [mimome]        H H_e S
    [dmc]           case kernel1 kernel2           (nested arrays)
    [scheme]        p_u p_v_given_u prefix          (nested arrays)

``[report]`` and ``[results]`` tables written by the CLI are ignored on input
so a saved report is also a valid config.
"""

import math
import sys
from dataclasses import dataclass, field
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import tomli_w

from .dmc import AuxiliaryScheme, EavesdropperCase, OrthogonalDmc
from .errors import ArgumentError, ConfigError
from .gaussian import GaussianOrthogonalChannel, MimomeInstance
from .search import SearchConfig
from .sweep import Geometry

CHANNEL_KEYS = ("h_sr", "h_sd", "h_rd", "h_se1", "h_se2", "h_re")
POWER_KEYS = ("P_R", "P_D", "P_2")
SCHEMA = {
    "channel": set(CHANNEL_KEYS),
    "powers": set(POWER_KEYS),
    "eavesdropper": {"e1", "e2", "case"},
    "geometry": {"source", "destination", "eavesdropper", "relay", "alpha"},
    "sweep": {"start", "end", "samples", "cases"},
    "optimizer": {"grid", "restarts", "step_floor", "max_iter", "seed", "polish", "random_restarts"},
    "mimome": {"H", "H_e", "S"},
    "dmc": {"case", "kernel1", "kernel2"},
    "scheme": {"p_u", "p_v_given_u", "prefix"},
}
IGNORED = {"report", "results"}


@dataclass
class RunSpec:
    """Validated contents of a config file."""

    channel: Optional[GaussianOrthogonalChannel] = None
    geometry: Optional[Geometry] = None
    cases: Optional[list] = None
    sweep: dict = field(default_factory=dict)
    optimizer: SearchConfig = field(default_factory=SearchConfig)
    mimome: Optional[MimomeInstance] = None
    dmc: Optional[OrthogonalDmc] = None
    scheme: Optional[AuxiliaryScheme] = None
    raw: dict = field(default_factory=dict)


def _num(section, key, value, integer=False):
    where = f"[{section}].{key}"
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if integer and (not isinstance(value, int) or value < 0):
        raise ConfigError(f"{where}: expected a non-negative integer, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{where}: must be finite")
    return value


def _point(section, key, value):
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError(f"[{section}].{key}: expected [x, y], got {value!r}")
    return tuple(float(_num(section, key, v)) for v in value)


def _matrix(section, key, value):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [[float(value)]]
    if not isinstance(value, list) or not value:
        raise ConfigError(f"[{section}].{key}: expected a matrix (list of rows)")
    rows = [r if isinstance(r, list) else [r] for r in value]
    if len({len(r) for r in rows}) != 1:
        raise ConfigError(f"[{section}].{key}: rows have different lengths")
    return [[float(_num(section, key, v)) for v in r] for r in rows]


def _check_keys(data):
    for section, body in data.items():
        if section in IGNORED:
            continue
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]; expected one of {sorted(SCHEMA)}")
        if not isinstance(body, dict):
            raise ConfigError(f"[{section}] must be a table")
        unknown = set(body) - SCHEMA[section]
        if unknown:
            raise ConfigError(f"[{section}]: unknown key(s) {sorted(unknown)}; allowed {sorted(SCHEMA[section])}")


def _cases(section, key, value):
    if isinstance(value, str):
        value = [value]
    if not isinstance(value, list):
        raise ConfigError(f"[{section}].{key}: expected a case label or list of labels")
    try:
        return [EavesdropperCase.parse(v) for v in value]
    except ArgumentError as exc:
        raise ConfigError(f"[{section}].{key}: {exc}") from None


def parse_config(data: dict) -> RunSpec:
    """Validate a decoded TOML document."""
    _check_keys(data)
    spec = RunSpec(raw={k: v for k, v in data.items() if k not in IGNORED})

    powers = {k: float(_num("powers", k, v)) for k, v in data.get("powers", {}).items()}
    for k, v in powers.items():
        if v < 0:
            raise ConfigError(f"[powers].{k}: must be non-negative")

    eve = data.get("eavesdropper", {})
    flags = None
    if "case" in eve:
        if "e1" in eve or "e2" in eve:
            raise ConfigError("[eavesdropper]: give either case or e1/e2, not both")
        spec.cases = _cases("eavesdropper", "case", eve["case"])
    elif eve:
        for k in ("e1", "e2"):
            if k in eve and not isinstance(eve[k], bool):
                raise ConfigError(f"[eavesdropper].{k}: expected true or false")
        flags = (bool(eve.get("e1", False)), bool(eve.get("e2", False)))

    if "channel" in data:
        ch = data["channel"]
        missing = [k for k in CHANNEL_KEYS if k not in ch]
        if missing:
            raise ConfigError(f"[channel]: missing key(s) {missing}")
        gains = {k: float(_num("channel", k, ch[k])) for k in CHANNEL_KEYS}
        e1, e2 = flags if flags is not None else (True, True)
        spec.channel = GaussianOrthogonalChannel(**gains, **powers, e1=e1, e2=e2)
        if flags is not None and spec.channel.case is not None:
            spec.cases = [spec.channel.case]
        elif flags is not None:
            spec.cases = []

    if "geometry" in data:
        g = data["geometry"]
        kw = {k: _point("geometry", k, g[k]) for k in ("source", "destination", "eavesdropper", "relay") if k in g}
        if "alpha" in g:
            kw["alpha"] = float(_num("geometry", "alpha", g["alpha"]))
        try:
            spec.geometry = Geometry(**kw, **powers)
        except ArgumentError as exc:
            raise ConfigError(f"[geometry]: {exc}") from None

    if "sweep" in data:
        s = data["sweep"]
        out = {}
        for k in ("start", "end"):
            if k in s:
                out[k] = _point("sweep", k, s[k])
        if "samples" in s:
            out["samples"] = _num("sweep", "samples", s["samples"], integer=True)
            if out["samples"] < 2:
                raise ConfigError("[sweep].samples: need at least 2")
        if "cases" in s:
            out["cases"] = [c.value for c in _cases("sweep", "cases", s["cases"])]
        spec.sweep = out

    if "optimizer" in data:
        o = data["optimizer"]
        kw = {}
        for k in ("grid", "restarts", "max_iter", "seed", "random_restarts"):
            if k in o:
                kw[k] = _num("optimizer", k, o[k], integer=True)
        if "step_floor" in o:
            kw["step_floor"] = float(_num("optimizer", "step_floor", o["step_floor"]))
        if "polish" in o:
            if not isinstance(o["polish"], bool):
                raise ConfigError("[optimizer].polish: expected true or false")
            kw["polish"] = o["polish"]
        try:
            spec.optimizer = SearchConfig(**kw)
        except ArgumentError as exc:
            raise ConfigError(f"[optimizer]: {exc}") from None

    if "mimome" in data:
        m = data["mimome"]
        missing = [k for k in ("H", "H_e", "S") if k not in m]
        if missing:
            raise ConfigError(f"[mimome]: missing key(s) {missing}")
        try:
            spec.mimome = MimomeInstance(*(_matrix("mimome", k, m[k]) for k in ("H", "H_e", "S")))
        except ArgumentError as exc:
            raise ConfigError(f"[mimome]: {exc}") from None
    for name, cls in (("dmc", OrthogonalDmc), ("scheme", AuxiliaryScheme)):
        if name in data:
            try:
                setattr(spec, name, cls.from_dict(data[name]))
            except (ArgumentError, KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"[{name}]: {exc}") from None
    return spec


def dmc_document(channel: OrthogonalDmc, scheme: Optional[AuxiliaryScheme] = None) -> dict:
    """Config document holding a finite-alphabet channel and optionally a scheme."""
    doc = {"dmc": channel.to_dict()}
    if scheme is not None:
        doc["scheme"] = scheme.to_dict()
    return doc


def loads(text: str) -> RunSpec:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return parse_config(data)


def load(path) -> RunSpec:
    """Read and validate a config file.  I/O failures propagate as ``OSError``."""
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ConfigError(f"{path}: not UTF-8 text ({exc})") from None
    try:
        return loads(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _plain(obj):
    """Convert numpy scalars/arrays and tuples to TOML-friendly values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items() if v is not None}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _plain(obj.tolist())
    return obj


def dumps(doc: dict) -> str:
    return tomli_w.dumps(_plain(doc))


def dump(doc: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))
