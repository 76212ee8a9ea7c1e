"""Command-line entry point: ``seqaudit <command> [--config PATH] [--seed N] [--out DIR] [--strategy S]``.

Exit codes: 0 success, 1 usage error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from seqaudit.errors import UsageError
from seqaudit.experiments import (
    ExperimentConfig,
    ExperimentKind,
    KIND_DEFAULTS,
    audit_stream,
    decoupling_grid,
    dpsgd_audit_run,
    replicate_mean_mechanism_table,
    sweep_stream,
    synthetic_suite,
)

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="seqaudit", description="Sequential auditing of (epsilon, delta)-differential privacy.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for kind in ExperimentKind:
        s = sub.add_parser(kind.value)
        s.add_argument("--config", help="JSON file mirroring ExperimentConfig")
        s.add_argument("--seed", type=int, help="master seed (overrides the config)")
        s.add_argument("--out", help="output directory for CSV files")
        s.add_argument("--strategy", choices=["ons", "eprocess"], help="betting strategy")
    return p


def resolve_config(args) -> ExperimentConfig:
    kind = ExperimentKind(args.command)
    data = dict(KIND_DEFAULTS[kind])
    if args.config:
        with open(args.config) as fh:
            try:
                loaded = json.load(fh)
            except json.JSONDecodeError as exc:
                raise UsageError(f"{args.config}: not valid JSON ({exc})") from None
        if not isinstance(loaded, dict):
            raise UsageError(f"{args.config}: config must be a JSON object")
        loaded.pop("kind", None)
        data.update(loaded)
    for key in ("seed", "out", "strategy"):
        val = getattr(args, key)
        if val is not None:
            data[key] = val
    if args.seed is not None and args.seed < 0:
        raise UsageError("--seed must be a non-negative integer")
    data["kind"] = kind
    return ExperimentConfig.from_dict(data)


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return "inf" if math.isinf(x) else f"{x:.4g}"
    return str(x)


def _print_rows(header, rows) -> None:
    print("\t".join(header))
    for r in rows:
        print("\t".join(_fmt(v) for v in r))


def run(cfg: ExperimentConfig) -> None:
    kind = cfg.kind
    if kind in (ExperimentKind.TABLE1, ExperimentKind.TABLE2):
        rows = replicate_mean_mechanism_table(cfg)
        _print_rows(("mechanism", "epsilon", "strategy", "rate", "rate_se", "mean_stop", "stop_se", "runs"),
                    [(r.mechanism, r.epsilon, r.strategy, r.rejection_rate, r.rate_stderr, r.mean_stop,
                      r.stop_stderr, r.runs) for r in rows])
    elif kind is ExperimentKind.DECOUPLE:
        rows = decoupling_grid(cfg)
        _print_rows(("variant", "mechanism", "rate", "runs"),
                    [(r.variant, r.mechanism, r.rejection_rate, r.runs) for r in rows])
    elif kind is ExperimentKind.SYNTHETIC:
        rows = synthetic_suite(cfg)
        _print_rows(("family", "dim", "param", "rate", "mean_stop", "runs"),
                    [(r.family, r.dim, r.param, r.rejection_rate, r.mean_stop, r.runs) for r in rows])
    elif kind is ExperimentKind.DPSGD:
        runs = dpsgd_audit_run(cfg)
        checkpoints = [t for t in (100, 250, 500) if t <= cfg.n_max_for(0)]
        _print_rows(("fixture", "run", "sigma", *[f"eps_lb@{t}" for t in checkpoints]),
                    [(c.fixture, c.run, c.sigma, *[c.sweep.at(t) for t in checkpoints]) for c in runs])
    elif kind is ExperimentKind.AUDIT:
        results = audit_stream(cfg)
        _print_rows(("rep", "rejected", "stopping_time", "final_log_wealth", "bandwidth", "truncated"),
                    [(i, a.rejected, a.stopping_time, a.final_log_wealth, a.bandwidth, a.truncated)
                     for i, a in enumerate(results)])
    else:
        sweep = sweep_stream(cfg)
        t_end = len(sweep.lower_bound) - 1
        print(f"steps\t{t_end}\nepsilon_lb\t{_fmt(sweep.at(t_end))}\nbandwidth\t{_fmt(sweep.bandwidth)}")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        run(resolve_config(args))
    except UsageError as exc:
        print(f"seqaudit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        path = f" ({exc.filename})" if getattr(exc, "filename", None) else ""
        print(f"seqaudit: I/O error{path}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
