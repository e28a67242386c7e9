"""Command-line entry point.

    relaysec evaluate --config chan.toml [--case case2] [--out report.toml]
    relaysec sweep [--config sweep.toml] --out rates.csv
    relaysec verify-examples
    relaysec mimome --config mimo.toml

Exit codes: 0 success, 1 failed verification, 2 parse/config error,
3 precondition error, 4 numeric-domain error, 5 I/O error.
"""

import argparse
import logging
import sys
from dataclasses import dataclass, field, replace
from typing import Optional

from . import __version__
from .config import dump, load
from .dmc import EavesdropperCase, check_example, example_channel
from .errors import (
    ArgumentError,
    CapacityGuardError,
    ConfigError,
    DegenerateGeometryError,
    InfeasibleParamsError,
    NumericDomainError,
    PreconditionError,
)
from .gaussian import deaf_relay_capacity, mimome_secrecy, wiretap_baseline
from .optimizer import optimize_bound
from .search import SearchConfig
from .sweep import SWEEP_CONFIG, Geometry, emit_table, gains_from_geometry, sweep_relay_position

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_PRECONDITION, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4, 5
ALL_CASES = ("case1", "case2", "case3")
SWEEP_DEFAULTS = {"start": (0.0, 0.0), "end": (3.0, 0.0), "samples": 41}
OUTER_CAVEAT = "genie_outer is the best value found; under-maximization can only make it smaller"
CASE1_NF_NOTE = "case1 nf_inner uses the NF template with only the relay-channel tap active"


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------


@dataclass
class RateReport:
    channel: dict
    optimizer: dict
    cases: dict = field(default_factory=dict)  # case label -> {bound: value}
    argmax: dict = field(default_factory=dict)
    no_secrecy: Optional[float] = None
    active_eavesdropper: bool = True
    notes: list = field(default_factory=list)

    def violations(self, tol=1e-6):
        out = []
        for case, r in self.cases.items():
            for b in ("pdf_inner", "nf_inner"):
                if r[b] > r["genie_outer"] + tol:
                    out.append(f"{case}: {b} {r[b]:.6f} exceeds genie_outer {r['genie_outer']:.6f}")
        return out

    def to_dict(self):
        body = {"active_eavesdropper": self.active_eavesdropper, "notes": list(self.notes)}
        if self.no_secrecy is not None:
            body["no_secrecy"] = self.no_secrecy
        for case, r in self.cases.items():
            body[case] = dict(r)
            body[case]["argmax"] = self.argmax.get(case, {})
        return body

    def format(self) -> str:
        ch = self.channel
        lines = [
            "channel: " + " ".join(f"{k}={v:.6f}" for k, v in ch["channel"].items()),
            "powers: " + " ".join(f"{k}={v:.6f}" for k, v in ch["powers"].items()),
            "optimizer: " + " ".join(f"{k}={self.optimizer[k]}" for k in ("grid", "restarts", "seed")),
        ]
        if not self.active_eavesdropper:
            lines.append("no active eavesdropper: secrecy bounds omitted")
        for case, r in self.cases.items():
            for b, v in r.items():
                lines.append(f"{case}  {b:<17}{v:.6f}")
        if self.no_secrecy is not None:
            lines.append(f"no_secrecy capacity   {self.no_secrecy:.6f}")
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines)


def build_report(channel, cases, config: SearchConfig) -> RateReport:
    report = RateReport(channel=channel.to_dict(), optimizer=config.to_dict())
    report.active_eavesdropper = bool(cases) and any(channel.with_case(c).has_active_eavesdropper for c in cases)
    if report.active_eavesdropper:
        for case in cases:
            ch = channel.with_case(case)
            label = EavesdropperCase.parse(case).value
            entries = {b: optimize_bound(ch, b, config) for b in ("pdf_inner", "nf_inner", "genie_outer")}
            rates = {b: e.value for b, e in entries.items()}
            rates["wiretap_baseline"] = wiretap_baseline(ch)
            if ch.h_sr == 0 and label != "case1":
                rates["deaf_relay"] = deaf_relay_capacity(ch)[0]
            report.cases[label] = rates
            report.argmax[label] = {b: e.argmax for b, e in entries.items()}
        if "case1" in report.cases:
            report.notes.append(CASE1_NF_NOTE)
        report.notes.append(OUTER_CAVEAT)
        report.notes += [f"sandwich violated: {v}" for v in report.violations()]
    report.no_secrecy = optimize_bound(channel, "no_secrecy", config).value
    return report


# --------------------------------------------------------------------------
# example verification
# --------------------------------------------------------------------------


def verify_examples(examples=None):
    """Check the three worked examples; ``examples`` overrides (id, channel, scheme, expected) tuples."""
    if examples is None:
        examples = [(i, *example_channel(i)) for i in (1, 2, 3)]
    return [check_example(*ex) for ex in examples]


def format_checks(checks) -> str:
    lines = []
    for c in checks:
        status = "ok" if c.passed else "FAILED"
        detail = f"rate {c.achieved:.9f} (expected {c.expected:.9f}), factorization {'ok' if c.factorization_ok else 'violated'}"
        if c.error:
            detail += f", {c.error}"
        lines.append(f"example {c.example_id}: {status}: {detail}")
    lines.append(f"{sum(c.passed for c in checks)}/{len(checks)} examples verified")
    return "\n".join(lines)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def _optimizer(spec_cfg: SearchConfig, args) -> SearchConfig:
    kw = {}
    for k in ("seed", "grid", "restarts"):
        v = getattr(args, k, None)
        if v is not None:
            kw[k] = v
    return replace(spec_cfg, **kw) if kw else spec_cfg


def _cli_cases(args, default):
    if args.case is None:
        return default
    return list(ALL_CASES) if args.case == "all" else [args.case]


def cmd_evaluate(args) -> int:
    spec = load(args.config)
    if spec.channel is not None:
        channel = spec.channel
    elif spec.geometry is not None:
        channel = gains_from_geometry(spec.geometry)
    else:
        raise ConfigError(f"{args.config}: evaluate needs a [channel] or [geometry] section")
    config = _optimizer(spec.optimizer, args)
    default = [c.value for c in spec.cases] if spec.cases is not None else list(ALL_CASES)
    report = build_report(channel, _cli_cases(args, default), config)
    print(report.format())
    if args.out:
        doc = dict(spec.raw)
        doc["optimizer"] = config.to_dict()
        if args.case is not None:
            doc.setdefault("eavesdropper", {})
            doc["eavesdropper"] = {"case": _cli_cases(args, [])}
        doc["report"] = report.to_dict()
        dump(doc, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = load(args.config) if args.config else None
    geometry = spec.geometry if spec and spec.geometry else Geometry()
    base = spec.optimizer if spec and "optimizer" in spec.raw else SWEEP_CONFIG
    config = _optimizer(base, args)
    sw = dict(SWEEP_DEFAULTS)
    if spec:
        sw.update(spec.sweep)
    cases = _cli_cases(args, sw.pop("cases", list(ALL_CASES)))
    result = sweep_relay_position(geometry, cases=cases, config=config, **sw)
    emit_table(result, args.out)
    dump({"metadata": result.metadata}, f"{args.out}.meta.toml")
    bad = result.violations()
    print(f"wrote {len(result.rows)} rows to {args.out}")
    for r in bad:
        print(f"warning: inner bound above outer bound at relay ({r.relay_x:.6f}, {r.relay_y:.6f}) {r.case}")
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = verify_examples()
    print(format_checks(checks))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


def cmd_mimome(args) -> int:
    spec = load(args.config)
    if spec.mimome is None:
        raise ConfigError(f"{args.config}: mimome needs a [mimome] section with H, H_e and S")
    config = _optimizer(spec.optimizer, args)
    value, K = mimome_secrecy(spec.mimome, config)
    print(f"mimome secrecy rate: {value:.6f} bits")
    print("K_X:")
    for row in K:
        print("  " + " ".join(f"{v:.6f}" for v in row))
    if args.out:
        doc = dict(spec.raw)
        doc["optimizer"] = config.to_dict()
        doc["report"] = {"value": value, "K": K}
        dump(doc, args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def _u64(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser():
    parser = argparse.ArgumentParser(prog="relaysec", description="Secrecy-rate bounds for orthogonal relay-eavesdropper channels.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required):
        p.add_argument("--config", required=config_required, help="TOML config file")
        p.add_argument("--out", help="output path")
        p.add_argument("--seed", type=_u64, help="optimizer seed")
        p.add_argument("--grid", type=_positive, help="grid points per search axis")
        p.add_argument("--restarts", type=_positive, help="local-search restarts")

    p = sub.add_parser("evaluate", help="optimize all bounds for one channel")
    common(p, True)
    p.add_argument("--case", choices=ALL_CASES + ("all",))
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="relay-position sweep to CSV")
    common(p, False)
    p.add_argument("--case", choices=ALL_CASES + ("all",))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify-examples", help="check the three finite-alphabet examples")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mimome", help="MIMOME secrecy rate for [mimome] H, H_e, S")
    common(p, True)
    p.set_defaults(func=cmd_mimome)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "sweep" and not args.out:
        print("error: sweep needs --out", file=sys.stderr)
        return EXIT_PARSE
    try:
        return args.func(args)
    except (ConfigError, ArgumentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (PreconditionError, InfeasibleParamsError, DegenerateGeometryError, CapacityGuardError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except NumericDomainError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
