"""Command line entry point: ``zzctrl {run,dla,concurrence,bounds}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

from .control import SynthesisConfig
from .harness import (
    ExperimentConfig, bounds_report, check_controllability, matrix_from_pairs, run_batch, summarize,
)
from .quantum import concurrence, validate_density

EXIT_OK, EXIT_IO, EXIT_CONFIG = 0, 1, 2

# flag -> (section, field)
_RUN_FLAGS = {
    "samples": ("experiment", "n_samples"),
    "kind": ("experiment", "state_kind"),
    "drift": ("experiment", "drift_magnitude"),
    "seed": ("experiment", "seed"),
    "out": ("experiment", "output_dir"),
    "workers": ("experiment", "workers"),
    "slices": ("synthesis", "n_slices"),
    "dt": ("synthesis", "dt"),
    "eta": ("synthesis", "eta"),
    "epsilon": ("synthesis", "epsilon"),
    "max_iters": ("synthesis", "max_iters"),
    "restarts": ("synthesis", "restarts"),
    "rel_err": ("synthesis", "rel_err_target"),
    "control_weight": ("synthesis", "control_weight"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zzctrl", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="batch synthesis experiment")
    run.add_argument("--config", help="JSON file mirroring ExperimentConfig")
    run.add_argument("--samples", type=int)
    run.add_argument("--kind", choices=["pure", "mixed", "rank2", "all"])
    run.add_argument("--slices", type=int)
    run.add_argument("--dt", type=float)
    run.add_argument("--eta", type=float)
    run.add_argument("--epsilon", type=float)
    run.add_argument("--max-iters", type=int)
    run.add_argument("--restarts", type=int)
    run.add_argument("--rel-err", type=float)
    run.add_argument("--control-weight", type=float)
    run.add_argument("--drift", type=float)
    run.add_argument("--seed", type=int)
    run.add_argument("--out")
    run.add_argument("--workers", type=int)
    run.add_argument("--wall-time", action="store_true", help="record wall-clock times in runs.csv")

    dla = sub.add_parser("dla", help="dynamical Lie algebra of the control generators")
    dla.add_argument("--drifts", type=int, default=10, help="random drifts per magnitude")
    dla.add_argument("--magnitudes", type=float, nargs="+", default=[0.1, 1.0, 10.0])
    dla.add_argument("--seed", type=int, default=0)

    for name, text in (("concurrence", "concurrence of a state"), ("bounds", "ZZ range over the unitary orbit")):
        s = sub.add_parser(name, help=text)
        s.add_argument("state", help="JSON file: 4x4 array of [re, im] pairs (or {\"rho\": ...})")
    return p


def experiment_config(args) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
    synth = data.pop("synthesis", {})
    for flag, (section, name) in _RUN_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            (synth if section == "synthesis" else data)[name] = value
    if args.wall_time:
        data["record_wall_time"] = True
    return ExperimentConfig.from_dict({**data, "synthesis": SynthesisConfig(**synth)})


def _load_state(path: str):
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data["rho"]
    return validate_density(matrix_from_pairs(data))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        try:
            cfg = experiment_config(args)
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_IO
        except (ValueError, TypeError, KeyError) as exc:
            print(f"error: invalid config: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        try:
            records = run_batch(cfg)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        s = summarize(records)
        print(f"samples: {s.n_samples}  converged: {s.n_converged} ({s.convergence_rate:.1%})")
        print("error quantiles: " + "  ".join(f"{k}={v:.4f}" for k, v in s.quantiles.items()))
        print(f"mean iterations: {s.mean_iterations:.1f}")
        print(f"outputs written to {cfg.output_dir}")
        return EXIT_OK

    if args.command == "dla":
        report = check_controllability(args.drifts, args.magnitudes, args.seed)
        print(report.text)
        return EXIT_OK

    try:
        rho = _load_state(args.state)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: invalid state: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "concurrence":
        print(repr(concurrence(rho)))
    else:
        print(json.dumps(bounds_report(rho)))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
