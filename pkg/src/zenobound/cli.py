"""Command-line front end: ``zenobound {state,run,sweep,baseline}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io
from .measures import negativity
from .states import ParameterError, density, psi_plus, sigma_alpha, sigma_free, sigma_minus, sigma_plus
from .sweep import activation_window, run_sweep, trajectory_export
from .xor import xor_trajectory
from .zeno import DeadEndError, run_multi_round

log = logging.getLogger("zenobound")

EXIT_OK = 0
EXIT_CONFIG = 3
EXIT_PARAMETER = 4
EXIT_DEAD_END = 5


def cmd_state(args) -> list[Path]:
    if args.kind == "sigma_alpha":
        if args.alpha is None:
            raise ParameterError("sigma_alpha needs --alpha")
        m = sigma_alpha(args.alpha)
    elif args.kind == "sigma_free":
        if args.F is None:
            raise ParameterError("sigma_free needs --F")
        m = sigma_free(args.F)
    elif args.kind == "psi_plus":
        m = density(psi_plus())
    elif args.kind == "sigma_plus":
        m = sigma_plus()
    else:
        m = sigma_minus()
    return [io.write_matrix(args.out_dir / f"{args.kind}.txt", m)]


def cmd_run(args) -> list[Path]:
    cfg, rounds = io.parse_config(Path(args.config).read_text())
    if args.k is not None:
        cfg = cfg.replace(k=args.k)
    if args.rounds is not None:
        rounds = args.rounds
    if rounds < 1:
        raise ParameterError(f"rounds must be >= 1, got {rounds}")
    results = run_multi_round([cfg] * rounds)
    out = args.out_dir
    outputs = []
    summary = [(0, negativity(sigma_free(cfg.F)), cfg.F, 1.0, 1.0)]
    for r, res in enumerate(results, 1):
        tr = res.trace
        rows = zip(range(1, cfg.k + 1), tr.negativities, tr.fidelities, tr.cumulative_probabilities)
        outputs.append((io.write_csv(out / f"trajectory_round{r}.csv", io.TRAJECTORY_HEADER, rows),
                        f"negativity/fidelity of the conditional free pair versus k, round {r}"))
        outputs.append((io.write_matrix(out / f"state_round{r}.txt", res.state),
                        f"free-pair density matrix after round {r}"))
        summary.append((r, res.negativity, res.fidelity, res.probability, res.cumulative_probability))
    outputs.append((
        io.write_csv(out / "rounds.csv",
                     ("round", "negativity", "fidelity", "probability", "cumulative_probability"), summary),
        "negativity and fidelity per chained round (round 0 is the input state)",
    ))
    manifest = io.write_manifest(out, "run", io.format_config(cfg, rounds), outputs)
    return [p for p, _ in outputs] + [manifest]


def cmd_sweep(args) -> list[Path]:
    spec = io.parse_sweep_spec(Path(args.spec).read_text())
    result = run_sweep(spec, workers=args.workers)
    out = args.out_dir
    table = io.write_csv(out / "sweep_table.csv", io.SWEEP_HEADER, io.sweep_rows(result))
    best = out / "best_config.txt"
    best.write_text(
        io.format_config(result.best)
        + f"# negativity = {io.fmt(result.best_negativity)}\n"
        + f"# fidelity = {io.fmt(result.best_fidelity)}\n"
        + f"# probability = {io.fmt(result.best_probability)}\n"
    )
    outputs = [(table, "every swept cell"), (best, f"argmax under {spec.objective}")]
    traj = trajectory_export(result.best, spec.k_max)
    outputs.append((io.write_csv(out / "best_trajectory.csv", io.TRAJECTORY_HEADER, traj),
                    "trajectory of the best levels and outcome over the full k range"))
    manifest = io.write_manifest(out, "sweep", Path(args.spec).read_text(), outputs)
    window = activation_window(result, negativity(sigma_free(spec.F)))
    if window:
        log.info("activation window k=%d..%d", window[0], window[-1])
    return [p for p, _ in outputs] + [manifest]


def cmd_baseline(args) -> list[Path]:
    traj = xor_trajectory(args.F0, args.alpha, args.rounds)
    rows = [(r, res.F_next, res.success_probability, res.cumulative_probability)
            for r, res in enumerate(traj, 1)]
    return [io.write_csv(args.out_dir / "baseline.csv",
                         ("round", "fidelity", "success_probability", "cumulative_probability"), rows)]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zenobound", description=__doc__)
    parser.add_argument("--out-dir", type=Path, default=Path("."), help="directory for output files")
    parser.add_argument("-v", "--verbose", action="store_true")
    # also accepted after the subcommand name
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", type=Path, default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", parents=[common], help="write a state's density matrix")
    p.add_argument("kind", choices=["sigma_alpha", "sigma_free", "psi_plus", "sigma_plus", "sigma_minus"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--F", type=float)
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("run", parents=[common], help="run the protocol from a key-value config file")
    p.add_argument("config", type=Path)
    p.add_argument("--k", type=int, help="override the iteration count")
    p.add_argument("--rounds", type=int, help="override the number of chained rounds")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", parents=[common], help="brute-force search from a sweep spec file")
    p.add_argument("spec", type=Path)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("baseline", parents=[common], help="XOR activation recursion")
    p.add_argument("--F0", type=float, default=0.3)
    p.add_argument("--alpha", type=float, default=4.0)
    p.add_argument("--rounds", type=int, default=2)
    p.set_defaults(func=cmd_baseline)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        for path in args.func(args):
            print(path)
    except io.ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ParameterError as e:
        print(f"parameter error: {e}", file=sys.stderr)
        return EXIT_PARAMETER
    except DeadEndError as e:
        print(f"dead end: {e}", file=sys.stderr)
        return EXIT_DEAD_END
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
