"""Command-line front end.

    uskd fig2   --panel {top,avg-coupler,repeats,avg-channel} --out DIR [...]
    uskd fig3b  --out DIR [--n-small 20 --n-large 2000 --grid 201 --repeats 100]
    uskd keygen --rounds N --out DIR [--eve {none,tap,mzi} ...]
    uskd verify [--quick] [--self-test-negative]

Any subcommand also takes ``--config FILE`` with ``key=value`` lines named
after the long flags (``n-small=20``); flags given on the command line win.
The seed falls back to ``$USKD_SEED`` and then to 0.

Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 I/O error,
4 error rate above ``--max-error``.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import output, protocol, verify
from .mzi import TWO_PI
from .noise import NoiseModel

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_IO, EXIT_THRESHOLD = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


# A typed-in 2pi such as 6.2832 overshoots slightly; snap it instead of rejecting.
RANGE_SNAP = 1e-4


def _range(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad angle {text!r}") from None
    return TWO_PI if TWO_PI < v <= TWO_PI + RANGE_SNAP else v


def _ranges(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(_range(v) for v in text.replace(" ", "").split(",") if v)
    except argparse.ArgumentTypeError:
        raise argparse.ArgumentTypeError(f"bad range list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty range list")
    return vals


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uskd", description="Round-trip MZI key distribution simulator")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out=True):
        sp.add_argument("--config", type=Path, help="key=value file with defaults for the flags")
        sp.add_argument("--seed", type=_seed, help="64-bit seed (default: $USKD_SEED or 0)")
        if out:
            sp.add_argument("--out", type=Path, help="output directory (required)")

    f2 = sub.add_parser("fig2", help="coupler/channel noise sweeps")
    common(f2)
    f2.add_argument("--panel", choices=("top", "avg-coupler", "repeats", "avg-channel"))
    f2.add_argument("--ranges", type=_ranges, help="comma-separated coupler noise ranges [rad]")
    f2.add_argument("--n", type=int, default=2000, help="samples per grid point")
    f2.add_argument("--grid", type=int, default=200)
    f2.add_argument("--repeats", type=int, default=10)
    f2.add_argument("--chan-range", type=_range, default=TWO_PI)
    f2.add_argument("--coupler-mode", choices=("direct", "per-arm"), default="direct")
    f2.add_argument("--phi", type=float, default=0.0)
    f2.add_argument("--psi", type=float, default=0.0)
    f2.add_argument("--workers", type=int, default=0)

    f3 = sub.add_parser("fig3b", help="fluctuation versus averaging number")
    common(f3)
    f3.add_argument("--n-small", type=int, default=20)
    f3.add_argument("--n-large", type=int, default=2000)
    f3.add_argument("--grid", type=int, default=201)
    f3.add_argument("--repeats", type=int, default=100)
    f3.add_argument("--chan-range", type=_range, default=TWO_PI)
    f3.add_argument("--phi", type=float, default=0.0)
    f3.add_argument("--psi", type=float, default=0.0)
    f3.add_argument("--workers", type=int, default=0)

    kg = sub.add_parser("keygen", help="run a key-distribution session")
    common(kg)
    kg.add_argument("--rounds", type=int, default=1000)
    kg.add_argument("--coupler-range", type=_range, default=0.0)
    kg.add_argument("--chan-range", type=_range, default=TWO_PI)
    kg.add_argument("--coupler-mode", choices=("direct", "per-arm"), default="per-arm")
    kg.add_argument("--walk-step", type=float, help="use slowly varying channel noise with this step [rad]")
    kg.add_argument("--guard", type=float, default=0.1)
    kg.add_argument("--eve", choices=("none", "tap", "mzi"), default="none")
    kg.add_argument("--eve-prior", type=_range, default=TWO_PI, help="width of Eve's uniform prior on zeta")
    kg.add_argument("--max-error", type=float)

    vf = sub.add_parser("verify", help="run the invariant suite")
    common(vf, out=False)
    vf.add_argument("--quick", action="store_true")
    vf.add_argument("--self-test-negative", action="store_true", help="inject a beam-splitter fault")
    return p


def _flag_dest(parser: argparse.ArgumentParser, key: str) -> str | None:
    for action in parser._actions:
        if "--" + key in action.option_strings:
            return action.dest
    return None


def parse(argv) -> argparse.Namespace:
    """Parse flags, layering a --config file underneath them."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        try:
            values = output.read_keyvalue(args.config)
        except (OSError, ValueError) as exc:
            parser.error(f"cannot read config: {exc}")
        sub = parser._subparsers._group_actions[0].choices[args.command]
        defaults = {}
        for key, value in values.items():
            dest = _flag_dest(sub, key)
            if dest is None or key == "config":
                sub.error(f"unknown config key {key!r}")
            defaults[dest] = value
        # string defaults pass through each flag's type conversion
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
        for dest in ("self_test_negative", "quick"):
            if dest in defaults and isinstance(getattr(args, dest), str):
                setattr(args, dest, defaults[dest].lower() in ("1", "true", "yes"))
    if args.seed is None:
        env = os.environ.get("USKD_SEED")
        try:
            args.seed = _seed(env) if env else 0
        except (ValueError, argparse.ArgumentTypeError):
            parser.error("USKD_SEED is not a valid seed")
    return args


def _outdir(args) -> Path:
    if args.out is None:
        raise UsageError("--out is required")
    args.out.mkdir(parents=True, exist_ok=True)
    return args.out


def cmd_fig2(args) -> int:
    if args.panel is None:
        raise UsageError("--panel is required")
    ranges = args.ranges
    if ranges is None:
        ranges = {"avg-coupler": ex.QUARTER_TURN_RANGES, "avg-channel": ex.CHANNEL_PANEL_RANGES}.get(args.panel, (TWO_PI,))
    spec = ex.SweepSpec(
        phi=args.phi, psi=args.psi, coupler_ranges=ranges, samples_per_point=args.n,
        zeta_grid=args.grid, repeats=args.repeats, seed=args.seed,
        coupler_mode=args.coupler_mode, chan_range=args.chan_range,
    )
    if args.panel == "repeats" and spec.repeats < 2:
        raise UsageError("--repeats must be >= 2 for the repeats panel")
    started = output.utc_now()
    out = _outdir(args)
    if args.panel == "top":
        traces = [ex.fig2_individual(spec)]
    elif args.panel == "avg-coupler":
        traces = ex.fig2_avg_over_coupler(spec, workers=args.workers)
    elif args.panel == "repeats":
        traces = ex.fig2_repeat_trials(spec, workers=args.workers)
    else:
        traces = ex.fig2_avg_over_channel(spec, workers=args.workers)
    files = []
    for t in traces:
        files.append(output.write_trace(out / f"fig2_{t.label}.csv", t))
        print(
            f"{t.label}: mean_IA={float(np.mean(t.mean_IA)):.4f} "
            f"mean_IB={float(np.mean(t.mean_IB)):.4f} crossovers={t.crossover_count}"
        )
    digest = output.digest({"command": "fig2", "panel": args.panel, "spec": asdict(spec)})
    output.write_manifest(out / "manifest.txt", digest, spec.seed, started, files)
    return EXIT_OK


def cmd_fig3b(args) -> int:
    spec = ex.SweepSpec(
        phi=args.phi, psi=args.psi, zeta_grid=args.grid, repeats=args.repeats,
        seed=args.seed, chan_range=args.chan_range,
    )
    if args.n_small < 1 or args.n_large < 1:
        raise UsageError("sample counts must be >= 1")
    started = output.utc_now()
    out = _outdir(args)
    small, large = ex.fig3b_averaging(spec, args.n_small, args.n_large, workers=args.workers)
    files = [
        output.write_trace(out / f"fig3b_n{args.n_small}.csv", small),
        output.write_trace(out / f"fig3b_n{args.n_large}.csv", large),
        output.write_csv(
            out / "fig3b_fluctuation.csv",
            ("axis_value", f"std_IA_n{args.n_small}", f"std_IB_n{args.n_small}",
             f"std_IA_n{args.n_large}", f"std_IB_n{args.n_large}"),
            zip(small.axis, small.std_IA, small.std_IB, large.std_IA, large.std_IB),
        ),
    ]
    mid = int(np.argmin(np.abs(small.axis - np.pi)))
    print(f"zeta''={small.axis[mid]:.4f}: std n={args.n_small}: {small.std_IA[mid]:.4g}, n={args.n_large}: {large.std_IA[mid]:.4g}")
    digest = output.digest({"command": "fig3b", "n": [args.n_small, args.n_large], "spec": asdict(spec)})
    output.write_manifest(out / "manifest.txt", digest, spec.seed, started, files)
    return EXIT_OK


ROUND_HEADER = (
    "round", "bob_basis", "alice_basis", "outbound_click", "return_click", "relation", "key_bit",
    "eve_guess", "I_alpha", "I_beta", "I_A", "I_B", "zeta1", "zeta2", "zeta_alpha", "zeta_beta",
)


def cmd_keygen(args) -> int:
    if args.rounds < 1:
        raise UsageError("--rounds must be >= 1")
    if args.walk_step is not None:
        chan = NoiseModel.walk(step=args.walk_step, bound=args.chan_range)
    else:
        chan = NoiseModel.iid(args.chan_range)
    config = protocol.SessionConfig(
        rounds=args.rounds, guard_band=args.guard, chan_model=chan,
        coupler_model=NoiseModel.iid(args.coupler_range), coupler_mode=args.coupler_mode,
        eve=protocol.EveStrategy(kind=args.eve, zeta_prior_range=args.eve_prior), seed=args.seed,
    )
    started = output.utc_now()
    out = _outdir(args)
    stats, records = protocol.run_session(config)
    rows = (
        (
            i, int(r.bob_basis), int(r.alice_basis), r.outbound_click, r.return_click, r.relation,
            "" if r.key_bit is None else str(r.key_bit),
            "" if r.eve_guess is None else str(int(r.eve_guess)),
            r.I_alpha, r.I_beta, r.I_A, r.I_B,
            r.noise.zeta1, r.noise.zeta2, r.noise.zeta_alpha, r.noise.zeta_beta,
        )
        for i, r in enumerate(records)
    )
    summary = {
        "rounds": str(stats.rounds),
        "key_rate": stats.key_rate,
        "error_rate": stats.error_rate,
        "discard_rate": stats.discard_rate,
        "eve_guess_rate": stats.eve_guess_rate,
    }
    for (b, a), c in stats.per_combination.items():
        summary[f"combo_{b}{a}_rounds"] = str(c["rounds"])
        summary[f"combo_{b}{a}_errors"] = str(c["errors"])
    files = [output.write_csv(out / "rounds.csv", ROUND_HEADER, rows), output.write_keyvalue(out / "stats.txt", summary)]
    for k in ("key_rate", "error_rate", "discard_rate", "eve_guess_rate"):
        print(f"{k}={output.fmt(summary[k])}")
    output.write_manifest(out / "manifest.txt", output.digest({"command": "keygen", "config": asdict(config)}),
                          config.seed, started, files)
    if args.max_error is not None and stats.error_rate > args.max_error:
        print(f"error rate {stats.error_rate:.6g} exceeds --max-error {args.max_error}", file=sys.stderr)
        return EXIT_THRESHOLD
    return EXIT_OK


def cmd_verify(args) -> int:
    ok = True
    for name, passed, detail in verify.run_checks(quick=args.quick, bs_sign=-1 if args.self_test_negative else 1):
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        ok &= passed
    return EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {"fig2": cmd_fig2, "fig3b": cmd_fig3b, "keygen": cmd_keygen, "verify": cmd_verify}


def main(argv=None) -> int:
    try:
        args = parse(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"uskd {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"uskd {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
