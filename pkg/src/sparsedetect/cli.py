"""Command-line front end.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

Config files are JSON::

    {
      "design": {"variant": "gaussian", "n": 2000, "p": 10000},
      "model": "SFEM",
      "alpha_grid": [0.6, 0.75],
      "signal_grid": [0.1, 0.25, 0.5],
      "trials": 200,
      "master_seed": 0,
      "sigma": 1.0,
      "sigma_known": true,
      "tests": ["ANOVA", "MAX", "HC_CONT", "HC_DISC:adaptive-one"],
      "fresh_design_per_trial": true,
      "zeta_rescale": false
    }

Design variants: identity (p), random_orthonormal (n, p), balanced_one_way (p, k),
balanced_one_way_constrained (p, k), constant_correlation (p, gamma, n >= p+1),
gaussian (n, p), rademacher (n, p), basis_concatenation (n, a power of two).
HC_DISC s-policies: adaptive-one (s = 1), theorem (s from alpha), sqrt2
(s = sqrt(2 log p)). A manifest.json written by ``run`` or ``reproduce`` is
also accepted as a config and replays the recorded run.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .bench import ExperimentConfig, results_to_csv, run_grid
from .boundaries import boundary_table
from .designs import DESIGN_KINDS, DesignSpec, build_design, write_design_csv
from .plots import risk_plot_svg
from .presets import PRESETS, cell_count, preset_configs

log = logging.getLogger("sparsedetect")


class UsageError(Exception):
    pass


def _fmt_boundary(x: float) -> str:
    if x == float("inf"):
        return "inf"
    return f"{x:.10f}".rstrip("0").rstrip(".")


def boundary_csv(alpha_min: float, alpha_max: float, step: float | None) -> str:
    try:
        rows = boundary_table(alpha_min, alpha_max, step)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    lines = ["alpha,rho_star,rho_max,rho_rand"]
    for r in rows:
        lines.append(",".join(_fmt_boundary(v) for v in (r.alpha, r.rho_star, r.rho_max, r.rho_rand)))
    return "\n".join(lines) + "\n"


def load_configs(path) -> list[ExperimentConfig]:
    """Parse a config (or manifest) file; problems raise :class:`UsageError`."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    entries = data["configs"] if isinstance(data, dict) and "configs" in data else [data]
    configs = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise UsageError(f"{path}: config entry {i} is not an object")
        try:
            configs.append(ExperimentConfig.from_dict(entry))
        except (TypeError, ValueError) as exc:
            raise UsageError(f"{path}: invalid config: {exc}") from exc
    return configs


def _override(configs, seed, trials):
    changes = {}
    if seed is not None:
        changes["master_seed"] = seed
    if trials is not None:
        if trials < 1:
            raise UsageError("--trials must be positive")
        changes["trials"] = trials
    return [replace(c, **changes) for c in configs] if changes else configs


def _plot_name(config, alpha):
    return f"{config.design.label.replace(' ', '_').replace('=', '')}_alpha{alpha:g}.svg"


def execute(configs, out_dir, threads=1, plot=False, command="run") -> Path:
    """Run every config, writing results.csv, manifest.json and optional plots."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = datetime.now(timezone.utc).isoformat()
    chunks, outputs = [], ["results.csv", "manifest.json"]
    for i, config in enumerate(configs):
        log.info("grid %d/%d: %s", i + 1, len(configs), config.design.label)
        estimates = run_grid(config, threads=threads)
        csv_text = results_to_csv(estimates, config)
        chunks.append(csv_text if i == 0 else csv_text.split("\n", 1)[1])
        if plot:
            plot_dir = out_dir / "plots"
            plot_dir.mkdir(exist_ok=True)
            xlabel = "r" if config.model == "SFEM" else "tau"
            for alpha in config.alpha_grid:
                curves = {}
                for est in estimates:
                    if est.alpha == alpha:
                        curves.setdefault(est.test, []).append((est.signal, est.best_risk))
                S = next(e.S for e in estimates if e.alpha == alpha)
                title = f"{config.design.label}, alpha={alpha:g} (S={S})"
                name = _plot_name(config, alpha)
                (plot_dir / name).write_text(risk_plot_svg(curves, title, xlabel))
                outputs.append(f"plots/{name}")
    (out_dir / "results.csv").write_text("".join(chunks))
    manifest = {
        "tool": "sparsedetect",
        "version": __version__,
        "command": command,
        "threads": threads,
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
        "outputs": outputs,
        "configs": [c.to_dict() for c in configs],
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return out_dir / "results.csv"


def _add_run_flags(parser, plot_default=False):
    parser.add_argument("--out", default="results", help="output directory (default: results)")
    parser.add_argument("--seed", type=int, default=None, help="master seed (default: config value, else 0)")
    parser.add_argument("--trials", type=int, default=None, help="override the trial count")
    parser.add_argument("--threads", type=int, default=1, help="worker threads per cell (default: 1)")
    if not plot_default:
        parser.add_argument("--plot", action="store_true", help="write risk-vs-signal SVG plots")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsedetect", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    bt = sub.add_parser("boundary-table", help="print rho_star, rho_max, rho_rand on an alpha grid")
    bt.add_argument("--alpha-min", type=float, required=True)
    bt.add_argument("--alpha-max", type=float, default=None, help="defaults to --alpha-min")
    bt.add_argument("--step", type=float, default=None)
    bt.add_argument("--output", default=None, help="write CSV here instead of stdout")

    ds = sub.add_parser("design", help="build a design matrix and export it as CSV")
    ds.add_argument("--variant", choices=DESIGN_KINDS, required=True)
    ds.add_argument("--n", type=int)
    ds.add_argument("--p", type=int)
    ds.add_argument("--k", type=int)
    ds.add_argument("--gamma", type=float)
    ds.add_argument("--seed", type=int, default=0)
    ds.add_argument("--output", required=True)

    run = sub.add_parser("run", help="run an experiment grid from a JSON config")
    run.add_argument("--config", required=True)
    _add_run_flags(run)

    rep = sub.add_parser("reproduce", help="run a built-in desk-scale figure preset")
    rep.add_argument("figure", help=f"one of {', '.join(sorted(PRESETS))}")
    _add_run_flags(rep, plot_default=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if getattr(args, "threads", 1) < 1:
            raise UsageError("--threads must be at least 1")
        if args.command == "boundary-table":
            alpha_max = args.alpha_min if args.alpha_max is None else args.alpha_max
            if args.step is not None and args.step <= 0:
                raise UsageError("--step must be positive")
            text = boundary_csv(args.alpha_min, alpha_max, args.step)
            if args.output:
                Path(args.output).write_text(text)
            else:
                sys.stdout.write(text)
            return 0
        if args.command == "design":
            params = {k: getattr(args, k) for k in ("n", "p", "k", "gamma") if getattr(args, k) is not None}
            if args.variant == "constant_correlation" and "n" not in params and "p" in params:
                params["n"] = params["p"] + 1
            try:
                spec = DesignSpec(args.variant, **params)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
            write_design_csv(build_design(spec, args.seed), args.output)
            return 0
        if args.command == "run":
            configs = _override(load_configs(args.config), args.seed, args.trials)
            plot = args.plot
        else:
            try:
                configs = preset_configs(args.figure)
            except KeyError as exc:
                raise UsageError(exc.args[0]) from exc
            configs = _override(configs, args.seed, args.trials)
            log.info("preset %s: %d cells", args.figure, cell_count(configs))
            plot = True
        execute(configs, args.out, threads=args.threads, plot=plot, command=args.command)
        return 0
    except UsageError as exc:
        print(f"sparsedetect: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"sparsedetect: failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
