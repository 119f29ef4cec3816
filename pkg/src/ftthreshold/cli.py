"""Command-line front end.

Every output file starts with its run manifest (a ``# manifest: {...}``
comment line in CSV, a ``"manifest"`` key in JSON).  ``ftthreshold replay
FILE`` re-runs the recorded command and, given the same package version,
writes a byte-identical file.  Timing goes to stderr only.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from fractions import Fraction
from typing import Sequence

from . import __version__
from .analysis import (
    DivergentEquilibriumError,
    HandModelParams,
    NoBreakEvenError,
    ToffoliParams,
    find_breakeven,
    find_optimal_nop,
    memory_threshold_estimate,
    memory_threshold_factor,
    toffoli_recursion,
    xor_equilibrium,
)
from .enumeration import enumerate_cat, enumerate_syndrome_measurement, format_fraction
from .ftec import CatPreparationError, FtecStrategy, StrategyKind
from .montecarlo import DEFAULT_TARGET_RSE, default_workers, sample_cats, sweep_epsilon, sweep_nop

EXIT_OK = 0
EXIT_IMPRECISE = 1
EXIT_USAGE = 2

MANIFEST_PREFIX = "# manifest: "

# flags that change how a run executes but not what it writes
_NON_SEMANTIC = {"--out": 1, "--workers": 1}


class UsageError(ValueError):
    pass


# -- argument parsing ----------------------------------------------------------


def parse_eps(text: str) -> list[float]:
    """``0.002`` or an inclusive range ``start:stop:step``."""
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"bad --eps {text!r}") from None
    if len(nums) == 1:
        values = nums
    elif len(nums) == 3:
        start, stop, step = nums
        if step <= 0 or stop < start:
            raise UsageError(f"bad --eps range {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [round(start + i * step, 12) for i in range(count)]
    else:
        raise UsageError(f"bad --eps {text!r}; use a value or start:stop:step")
    if any(not 0.0 < v < 0.75 for v in values):
        raise UsageError("epsilon values must lie in (0, 0.75)")
    return values


def parse_nop(text: str) -> list[int]:
    """``15``, an inclusive range ``a..b`` or a list ``1,2,4``."""
    try:
        if ".." in text:
            a, b = text.split("..")
            values = list(range(int(a), int(b) + 1))
        else:
            values = [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"bad --nop {text!r}") from None
    if not values:
        raise UsageError(f"empty --nop range {text!r}")
    if min(values) < 1:
        raise UsageError("nop must be at least 1")
    return values


def _count(text: str) -> int:
    # accepts 1e7 style counts
    value = float(text)
    if value != int(value) or value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--strategy", choices=[k.value for k in StrategyKind], default="full")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--target-rse", type=float, default=DEFAULT_TARGET_RSE)
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: all cores)")
    p.add_argument("--max-trials", type=_count, default=1_000_000)
    p.add_argument("--no-guard", action="store_true", help="disable the 0,0,1,1 re-measurement guard")
    p.add_argument("--out", default="-", help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ftthreshold", description="Steane-code memory threshold experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep-nop", help="effective error rate vs. gates between recoveries")
    p.add_argument("--eps", required=True)
    p.add_argument("--nop", default="1..60")
    _add_run_flags(p)

    p = sub.add_parser("sweep-eps", help="effective error rate vs. fundamental error rate")
    p.add_argument("--eps", default="0.0002:0.012:0.0002")
    p.add_argument("--nop", default=None, help="gates between recoveries (default 15, or 1 per gate)")
    _add_run_flags(p)

    p = sub.add_parser("cat-coeffs", help="exact fault-path coefficients of cats and syndrome bits")
    p.add_argument("--mc-check", action="store_true", help="cross-check against sampled cats")
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--samples", type=_count, default=10_000_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default="-")

    p = sub.add_parser("models", help="closed-form error models")
    p.add_argument("--K02", type=float, default=None, help="default: 6 x 130")
    p.add_argument("--K12", type=float, default=None, help="default: 6 x 9.6")
    p.add_argument("--eps", type=float, default=1e-3, help="gate error rate for the hand model and memory estimate")
    p.add_argument("--eps0", type=float, default=1e-4)
    p.add_argument("--epsT0", type=float, default=1e-4)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--level-gate-factor", type=float, default=1000.0)
    p.add_argument("--out", default="-")

    p = sub.add_parser("replay", help="re-run the command recorded in an output file")
    p.add_argument("file")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default="-")
    return parser


def semantic_argv(argv: Sequence[str]) -> list[str]:
    """``argv`` without the flags that cannot change the output."""
    out: list[str] = []
    skip = 0
    for arg in argv:
        if skip:
            skip -= 1
            continue
        name = arg.split("=", 1)[0]
        if name in _NON_SEMANTIC:
            skip = 0 if "=" in arg else _NON_SEMANTIC[name]
            continue
        out.append(arg)
    return out


# -- output --------------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(x, ".5e")


def _manifest(command: str, argv: Sequence[str], config: dict, seed: int | None, **extra) -> dict:
    m = {
        "command": command,
        "argv": semantic_argv(argv),
        "config": config,
        "master_seed": seed,
        "version": __version__,
    }
    m.update(extra)
    return m


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def render_csv(manifest: dict, x_name: str, rows, x_fmt=str) -> str:
    buf = io.StringIO()
    buf.write(MANIFEST_PREFIX + _dumps(manifest) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([x_name, "effective_rate", "rel_std_err", "trials", "censored"])
    for r in rows:
        s = r.stats
        w.writerow([x_fmt(r.x), _fmt(s.effective_rate), _fmt(s.rel_std_err), s.trials, s.censored])
    return buf.getvalue()


def render_json(manifest: dict, body: dict) -> str:
    return json.dumps({"manifest": manifest, **body}, indent=2, sort_keys=True) + "\n"


def _write(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _info(msg: str) -> None:
    print(msg, file=sys.stderr)


def _fraction_dict(d: dict) -> dict:
    return {k: (None if v is None else format_fraction(v)) for k, v in d.items()}


# -- commands ------------------------------------------------------------------


def _strategy(args) -> FtecStrategy:
    return FtecStrategy(StrategyKind(args.strategy), special_case_guard=not args.no_guard)


def _run_config(args, strategy) -> dict:
    return {
        "strategy": strategy.kind.value,
        "special_case_guard": strategy.special_case_guard,
        "target_rse": args.target_rse,
        "max_trials": args.max_trials,
    }


def _precision_exit(rows) -> int:
    return EXIT_OK if all(r.stats.reached_precision for r in rows) else EXIT_IMPRECISE


def cmd_sweep_nop(args, argv) -> tuple[str, int]:
    eps = parse_eps(args.eps)
    if len(eps) != 1:
        raise UsageError("sweep-nop takes a single --eps value")
    nops = parse_nop(args.nop)
    strategy = _strategy(args)
    if strategy.per_gate:
        raise UsageError("per-gate strategies fix nop=1; use sweep-eps")
    rows = sweep_nop(
        eps[0], nops, strategy, args.seed, workers=args.workers,
        target_rse=args.target_rse, max_trials=args.max_trials,
    )
    config = {"epsilon": eps[0], "nop": nops, **_run_config(args, strategy)}
    manifest = _manifest("sweep-nop", argv, config, args.seed, rows_precise=[r.stats.reached_precision for r in rows])
    table = [(r.x, r.effective_rate, r.rel_std_err) for r in rows if r.stats.failures > 0]
    if len({x for x, *_ in table}) >= 3:
        opt = find_optimal_nop(table)
        f = opt.fit
        _info(f"fit: a={f.a:.5g} b={f.b:.5g} c={f.c:.5g} (rel. rms residual {f.residual:.3g})")
        fitted = "none" if opt.fitted is None else f"{opt.fitted:.3g}"
        _info(f"optimal nop: tabulated {opt.tabulated}, fitted {fitted}")
    elif table:
        _info(f"optimal nop: tabulated {int(min(table, key=lambda t: t[1])[0])}")
    return render_csv(manifest, "nop", rows), _precision_exit(rows)


def cmd_sweep_eps(args, argv) -> tuple[str, int]:
    eps = parse_eps(args.eps)
    strategy = _strategy(args)
    if args.nop is None:
        nop = 1 if strategy.per_gate else 15
    else:
        nops = parse_nop(args.nop)
        if len(nops) != 1:
            raise UsageError("sweep-eps takes a single --nop value")
        nop = nops[0]
    if strategy.per_gate and nop != 1:
        raise UsageError("per-gate strategies require nop=1")
    rows = sweep_epsilon(
        nop, eps, strategy, args.seed, workers=args.workers,
        target_rse=args.target_rse, max_trials=args.max_trials,
    )
    config = {"epsilon": eps, "nop": nop, **_run_config(args, strategy)}
    manifest = _manifest("sweep-eps", argv, config, args.seed, rows_precise=[r.stats.reached_precision for r in rows])
    try:
        be = find_breakeven([(r.x, r.effective_rate, r.rel_std_err) for r in rows])
        _info(f"level-1 break-even: epsilon = {be.epsilon:.4g} (band {be.lower:.4g} .. {be.upper:.4g}, ~1/{1 / be.epsilon:.0f})")
    except NoBreakEvenError as exc:
        _info(f"level-1 break-even: {exc}")
    return render_csv(manifest, "epsilon", rows, _fmt), _precision_exit(rows)


def mc_agreement(coeffs, sample, epsilon: float, z: float = 3.0) -> dict:
    """Compare sampled cat classes with the enumerated leading-order rates."""
    n = sample.samples
    predicted = {
        "p_1pf": (coeffs.p_1pf * epsilon, sample.counts.get((1, 0), 0)),
        "p_1bf": (coeffs.p_1bf * epsilon, sample.counts.get((0, 1), 0)),
        "p_1pf_1bf": (coeffs.p_1pf_1bf * epsilon, sample.counts.get((1, 1), 0)),
        "p_2bf": (coeffs.p_2bf * epsilon**2, sample.counts.get((0, 2), 0) + sample.counts.get((1, 2), 0)),
    }
    out = {}
    for name, (rate, observed) in predicted.items():
        expected = float(rate) * n
        # Poisson spread plus a next-order allowance
        slack = z * math.sqrt(max(expected, 1.0)) + 30.0 * epsilon * expected
        out[name] = {
            "expected": expected,
            "observed": observed,
            "agree": abs(observed - expected) <= slack,
        }
    return out


def cmd_cat_coeffs(args, argv) -> tuple[str, int]:
    cat = enumerate_cat(order=2)
    synd = {
        basis: _fraction_dict(enumerate_syndrome_measurement(4, basis).as_dict())
        for basis in ("s", "c")
    }
    body = {"cat": _fraction_dict(cat.as_dict()), "syndrome_measurement": synd}
    config: dict = {"mc_check": args.mc_check}
    seed = None
    if args.mc_check:
        if not 0.0 < args.eps < 0.75:
            raise UsageError("--eps must lie in (0, 0.75)")
        sample = sample_cats(args.eps, args.samples, master_seed=args.seed)
        body["mc_check"] = {
            "epsilon": args.eps,
            "samples": sample.samples,
            "attempts": sample.attempts,
            "classes": mc_agreement(cat, sample, args.eps),
        }
        config.update(epsilon=args.eps, samples=args.samples)
        seed = args.seed
    return render_json(_manifest("cat-coeffs", argv, config, seed), body), EXIT_OK


def cmd_models(args, argv) -> tuple[str, int]:
    if args.K02 is None and args.K12 is None:
        hm = HandModelParams.from_single_basis()
    else:
        d = HandModelParams.from_single_basis()
        hm = HandModelParams(d.K02 if args.K02 is None else args.K02, d.K12 if args.K12 is None else args.K12)
    if args.levels < 1:
        raise UsageError("--levels must be at least 1")
    toff = ToffoliParams(args.eps0, args.epsT0, args.level_gate_factor)
    c_sym, c_single = hm.components
    factor = memory_threshold_factor()
    reduction, mem = memory_threshold_estimate(args.eps, factor)
    eq = xor_equilibrium()
    body = {
        "hand_model": {
            "K02": hm.K02,
            "K12": hm.K12,
            "K": hm.K,
            "components": [c_sym, c_single],
            "n_opt": hm.n_opt,
            "eps1_at_n_opt": hm.K * args.eps**2,
        },
        "toffoli": {
            "eps0": toff.eps0,
            "epsT0": toff.epsT0,
            "level_gate_factor": toff.level_gate_factor,
            "trajectory": [list(t) for t in toffoli_recursion(toff, args.levels)],
        },
        "equilibrium": {"x": format_fraction(Fraction(eq)), "value": float(eq)},
        "memory": {
            "factor": format_fraction(Fraction(factor)),
            "reduction": reduction,
            "gate_threshold": args.eps,
            "threshold_estimate": mem,
            "statement": f"memory-error threshold about {reduction}x lower than the gate threshold, "
            f"so epsilon ~ {mem:.0e}",
        },
    }
    config = {k: getattr(args, k) for k in ("K02", "K12", "eps", "eps0", "epsT0", "levels", "level_gate_factor")}
    _info(f"K = {c_sym:.0f} + {c_single:.0f} = {hm.K:.0f}, n_opt = {hm.n_opt:.2f}")
    _info(body["memory"]["statement"])
    return render_json(_manifest("models", argv, config, None), body), EXIT_OK


def read_manifest(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.startswith(MANIFEST_PREFIX):
        return json.loads(text.splitlines()[0][len(MANIFEST_PREFIX):])
    try:
        return json.loads(text)["manifest"]
    except (json.JSONDecodeError, KeyError, TypeError):
        raise UsageError(f"{path}: no run manifest found") from None


COMMANDS = {
    "sweep-nop": cmd_sweep_nop,
    "sweep-eps": cmd_sweep_eps,
    "cat-coeffs": cmd_cat_coeffs,
    "models": cmd_models,
}


def _dispatch(args, argv: list[str]) -> int:
    if args.command == "replay":
        manifest = read_manifest(args.file)
        if manifest.get("version") != __version__:
            _info(f"warning: file written by version {manifest.get('version')}, replaying with {__version__}")
        inner = list(manifest["argv"])
        if args.workers is not None:
            inner += ["--workers", str(args.workers)]
        inner += ["--out", args.out]
        return main(inner)
    if getattr(args, "workers", 0) is None:
        args.workers = default_workers()
    start = time.perf_counter()
    text, code = COMMANDS[args.command](args, argv)
    _write(text, args.out)
    _info(f"wall-clock: {time.perf_counter() - start:.1f} s")
    if code == EXIT_IMPRECISE:
        _info("precision target not reached for some rows")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return _dispatch(args, argv)
    except (UsageError, ValueError, DivergentEquilibriumError) as exc:
        print(f"ftthreshold: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CatPreparationError as exc:
        print(f"ftthreshold: {exc}", file=sys.stderr)
        return EXIT_IMPRECISE


if __name__ == "__main__":
    sys.exit(main())
