"""Command-line front end: ``loopspam run|sweep|characterize|selftest``.

Exit codes: 0 success, 1 failed self-test, 2 configuration error,
3 runtime error.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from .config import load_config, load_policy, parse_counts
from .errors import ConfigError, LoopSpamError
from .report import (
    characterization_table,
    delta_csv,
    run_scenario,
    summary_table,
    to_json,
)
from .selftest import run_selftest
from .simulator import SettingsPlan
from .states import WernerParams, horodecki_report, m_from_params, rho_werner

EXIT_OK = 0
EXIT_SELFTEST_FAILED = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _apply_overrides(config, args):
    plan = config.plan
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        changes["trials"] = args.trials
    if getattr(args, "counts", None) is not None:
        try:
            changes["counts_per_pair"] = parse_counts(args.counts)
        except ValueError as exc:
            raise ConfigError(f"--counts: {exc}") from None
    if changes:
        fields = dict(alice=plan.alice, bob=plan.bob, counts_per_pair=plan.counts_per_pair,
                      trials=plan.trials, seed=plan.seed)
        fields.update(changes)
        try:
            config.plan = SettingsPlan(**fields)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if getattr(args, "cheat", None) is not None:
        config.cheat, config.policy = load_policy(args.cheat)
    if getattr(args, "threshold", None) is not None:
        if not args.threshold > 0:
            raise ConfigError("--threshold must be positive")
        config.threshold = args.threshold
    if getattr(args, "workers", None) is not None:
        config.workers = args.workers
    if getattr(args, "out", None) is not None:
        config.report = args.out
    if getattr(args, "format", None) is not None:
        config.fmt = args.format
    return config


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args):
    config = _apply_overrides(load_config(args.config), args)
    report = run_scenario(config)
    text = delta_csv(report) if config.fmt == "csv" else to_json(report)
    _emit(text, config.report)
    # keep stdout machine-readable when the report goes there
    table_stream = sys.stdout if config.report else sys.stderr
    print(summary_table(report), file=table_stream)
    return report


def _parse_range(text, name):
    """``start:stop:num`` (inclusive, linspace) or a single value."""
    try:
        parts = [float(p) for p in text.split(":")]
    except ValueError:
        raise ConfigError(f"--{name}: cannot parse range {text!r}") from None
    if len(parts) == 1:
        values = np.array(parts)
    elif len(parts) == 3 and parts[2] >= 1 and parts[2] == int(parts[2]):
        values = np.linspace(parts[0], parts[1], int(parts[2]))
    else:
        raise ConfigError(f"--{name}: expected 'start:stop:num' or a value, got {text!r}")
    if np.any(values < 0) or np.any(values > 1):
        raise ConfigError(f"--{name}: values must lie in [0, 1]")
    return values


def sweep_rows(ps_values, pw_values):
    rows = []
    for p_s in ps_values:
        for p_w in pw_values:
            params = WernerParams(float(p_s), float(p_w))
            rep = horodecki_report(rho_werner(params))
            m = m_from_params(params)
            rows.append({
                "p_s": float(p_s),
                "p_w": float(p_w),
                "M": m,
                "S_max": float(2 * np.sqrt(m)),
                "negativity": rep.negativity,
                "chsh_capable": bool(m > 1),
            })
    return rows


def cmd_sweep(args):
    rows = sweep_rows(_parse_range(args.ps, "ps"), _parse_range(args.pw, "pw"))
    if args.format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
        text = buf.getvalue()
    _emit(text, args.out)
    return rows


def cmd_characterize(args):
    config = _apply_overrides(load_config(args.config), args)
    config.tomography = True
    report = run_scenario(config)
    block = report["characterization"]
    if config.fmt == "json" or config.report:
        _emit(to_json({"characterization": block, "config": report["config"]}),
              config.report)
    print(characterization_table(block),
          file=sys.stdout if config.report or config.fmt != "json" else sys.stderr)
    return block


def cmd_selftest(args):
    return run_selftest()


def build_parser():
    parser = argparse.ArgumentParser(
        prog="loopspam",
        description="Faked Bell violations and their detection by loop consistency checks.")
    parser.add_argument("--version", action="version", version=f"loopspam {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_flags(p):
        p.add_argument("--config", default="honest",
                       help="config file, or a bundled name: honest, cheat, bell")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--counts", help="expected coincidences per setting pair, or 'exact'")
        p.add_argument("--cheat", help="none, paper, or a rules file")
        p.add_argument("--threshold", type=float)
        p.add_argument("--workers", type=int, help="threads for trial execution")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"))

    p_run = sub.add_parser("run", help="simulate trials and test for false correlations")
    scenario_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_char = sub.add_parser("characterize", help="tomography and entanglement figures")
    scenario_flags(p_char)
    p_char.set_defaults(func=cmd_characterize)

    p_sweep = sub.add_parser("sweep", help="M, S_max and negativity over (p_s, p_w)")
    p_sweep.add_argument("--ps", default="0:1:11", help="start:stop:num or a value")
    p_sweep.add_argument("--pw", default="0:1:11", help="start:stop:num or a value")
    p_sweep.add_argument("--out")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.set_defaults(func=cmd_sweep)

    p_self = sub.add_parser("selftest", help="run the exact-mode check battery")
    p_self.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (LoopSpamError, ArithmeticError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if args.command == "selftest" and not result:
        return EXIT_SELFTEST_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
