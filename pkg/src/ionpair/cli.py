"""Command-line front end: ``ionpair grover | bench | gates | validate``.

Exit status: 0 when the command completed, 2 for usage or config errors,
3 when an internal invariant fails (for example a gate that is not unitary).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import bench, gates
from .config import CONFIG_ENV, ConfigError, RunConfig, default_path, load, validate
from .grover import GroverConfig, delay_grid, run_grover, run_grover_bare, verify_trace
from .ion_model import PhysicalParams

EXIT_OK, EXIT_USAGE, EXIT_INTERNAL = 0, 2, 3

DEFAULTS_NOTE = (
    "Default physical parameters (eta=0.1, Omega=0.05, nu=1, delta=0.9, omega_eg=100, "
    "frequencies in units of nu) are illustrative, not measured values."
)


class UsageError(Exception):
    pass


class InternalError(Exception):
    pass


# -- parsing helpers ----------------------------------------------------------

def parse_grid(text: str) -> list[float]:
    """'a:b:n' -> n evenly spaced points in [a, b]; 'x,y,z' -> explicit list."""
    try:
        if ":" in text:
            a, b, n = text.split(":")
            if int(n) < 1:
                raise ValueError
            return [float(x) for x in np.linspace(float(a), float(b), int(n))]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"bad grid {text!r}; use start:stop:count or a comma-separated list"
        ) from None


def parse_delay(text: str, params: PhysicalParams) -> float:
    """A delay in time units, or a fraction of the free-evolution period ('0.25period')."""
    text = text.strip()
    try:
        if text.endswith("period"):
            return float(text[: -len("period")] or 1) * 2 * math.pi / params.omega_eg
        return float(text)
    except ValueError:
        raise UsageError(f"bad delay {text!r}; use a number or e.g. 0.25period") from None


def atomic_write(path: Path, text: str, force: bool) -> None:
    """Write via temp file + rename; never replace a file unless forced."""
    path = Path(path)
    if path.exists() and not force:
        raise UsageError(f"{path} exists; pass --force to replace it")
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _base_config(args) -> dict:
    path = getattr(args, "config", None) or default_path()
    if not path:
        return {}
    if not Path(path).exists():
        raise UsageError(f"config file {path} not found")
    return load(path)


def _resolve(args, overrides: dict) -> tuple[RunConfig, list[str]]:
    data = _base_config(args)
    data.update({k: v for k, v in overrides.items() if v is not None})
    return validate(data)


def _warn(warnings: list[str]) -> None:
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)


# -- commands -----------------------------------------------------------------

def cmd_grover(args) -> int:
    overrides = {}
    if args.params:
        overrides["params"] = json.loads(args.params)
    cfg, warnings = _resolve(args, overrides)
    _warn(warnings)
    params = cfg.physical()
    delays = []
    if args.delay_after_prep is not None:
        delays.append(("after-prep", parse_delay(args.delay_after_prep, params)))
    if args.delay_after_oracle is not None:
        delays.append(("after-oracle", parse_delay(args.delay_after_oracle, params)))
    if args.oracle_mode == "measured" and args.seed is None:
        raise UsageError("--oracle-mode measured needs --seed")
    try:
        gcfg = GroverConfig(
            marked=args.marked,
            level=args.level,
            delays=tuple(delays),
            oracle_mode=args.oracle_mode,
            seed=args.seed,
            params=params,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    trace = run_grover(gcfg) if args.encoding == "pair" else run_grover_bare(gcfg)
    report = verify_trace(trace)
    if not report.passed:
        raise InternalError(f"trace failed verification:\n{report}")
    if args.out:
        atomic_write(Path(args.out), trace.to_json() + "\n", args.force)
    print(f"success={trace.success_probability:.6f}")
    if trace.level == "physical":
        print(f"leakage={trace.leakage_final:.6f}")
    return EXIT_OK


def _run_bench(cfg: RunConfig, workers: int) -> bench.BenchReport:
    params = cfg.physical()
    if cfg.experiment == "dephasing":
        rep = bench.sweep_dephasing(cfg.sigma_grid, cfg.kind, cfg.trials, cfg.seed, workers=workers)
    elif cfg.experiment == "delay":
        rep = bench.sweep_delay(cfg.delay_grid, cfg.encoding, cfg.marked, cfg.seed, params)
    else:
        rep = bench.compare_oracle_modes(cfg.marked, cfg.trials, cfg.seed, workers=workers, level=cfg.level)
    return bench.BenchReport(**{**rep.__dict__, "config": cfg.to_dict()})


def cmd_bench(args) -> int:
    overrides: dict = {}
    if args.experiment:
        overrides["experiment"] = args.experiment
    if args.params:
        overrides["params"] = json.loads(args.params)
    for key in ("kind", "encoding", "marked", "trials", "seed", "level"):
        overrides[key] = getattr(args, key, None)
    if args.sigma_grid is not None:
        overrides["sigma_grid"] = args.sigma_grid
    if args.delays is not None:
        overrides["delay_grid"] = args.delays
    data = _base_config(args)
    data.update({k: v for k, v in overrides.items() if v is not None})
    if args.grid is not None:
        # the grid spans free-evolution periods, which depend on omega_eg
        params = validate({**data, "delay_grid": [0.0]})[0].physical()
        data["delay_grid"] = [float(t) for t in delay_grid(args.grid, params, args.periods)]
    cfg, warnings = validate(data)
    _warn(warnings)
    report = _run_bench(cfg, args.workers)
    out_dir = Path(args.out_dir)
    stem = args.prefix or f"bench-{report.experiment}"
    atomic_write(out_dir / f"{stem}.csv", report.to_csv(), args.force)
    atomic_write(out_dir / f"{stem}.json", report.to_json(), args.force)
    for p, m, s in report.rows():
        label = p if isinstance(p, str) else f"{p:.6g}"
        print(f"{report.param_name}={label} mean={m:.6f} stderr={s:.3g}")
    print(f"wrote {out_dir / stem}.csv and .json")
    return EXIT_OK


def cmd_gates(args) -> int:
    try:
        gates.catalog()
    except gates.CatalogError as exc:
        raise InternalError(str(exc)) from None
    if args.action == "list":
        print("U  (needs --theta)")
        for name in gates.GATE_BUILDERS:
            print(name)
        return EXIT_OK
    if args.action == "verify":
        rows = gates.identity_ledger()
        passed = 0
        for desc, err in rows:
            ok = err <= 1e-12
            passed += ok
            print(f"{'PASS' if ok else 'FAIL'}  {desc}  (max error {err:.2e})")
        print(f"{passed}/{len(rows)} identities pass")
        return EXIT_OK if passed == len(rows) else EXIT_INTERNAL
    name = args.name
    if name is None:
        raise UsageError("gates dump needs a gate name")
    if name == "U":
        if args.theta is None:
            raise UsageError("gates dump U needs --theta")
        gate = gates.gate_u(_parse_angle(args.theta))
    elif name in gates.GATE_BUILDERS:
        gate = gates.GATE_BUILDERS[name]()
    else:
        raise UsageError(f"unknown gate {name!r}; known: U, {', '.join(gates.GATE_BUILDERS)}")
    print(f"{name} =")
    print(gates.format_matrix(gate))
    print(json.dumps([[[float(z.real), float(z.imag)] for z in row] for row in gate.entries]))
    return EXIT_OK


def _parse_angle(text: str) -> float:
    """Angles like '0', '1.2', 'pi/2', '7pi/4'."""
    t = text.replace(" ", "").replace("*", "")
    try:
        if "pi" in t:
            num, _, den = t.partition("/")
            coeff = num.replace("pi", "")
            coeff = -1.0 if coeff == "-" else float(coeff or 1)
            return coeff * math.pi / (float(den) if den else 1.0)
        return float(t)
    except ValueError:
        raise UsageError(f"bad angle {text!r}") from None


def cmd_validate(args) -> int:
    path = args.path or default_path()
    if not path:
        raise UsageError(f"no config given (argument or ${CONFIG_ENV})")
    if not Path(path).exists():
        raise UsageError(f"config file {path} not found")
    cfg, warnings = validate(load(path))
    _warn(warnings)
    print(json.dumps(cfg.to_dict(), indent=2, sort_keys=True))
    print("config OK")
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ionpair",
        description="Pair-encoded trapped-ion Grover search and robustness benchmarks.",
        epilog=DEFAULTS_NOTE + f" A default config file may be named in ${CONFIG_ENV}.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("grover", help="run one Grover search and write its trace", epilog=DEFAULTS_NOTE)
    g.add_argument("--marked", default="11", help="marked state: 00, 01, 10 or 11")
    g.add_argument("--level", choices=("logical", "physical"), default="logical")
    g.add_argument("--encoding", choices=("pair", "bare"), default="pair")
    g.add_argument("--oracle-mode", choices=("unitary", "measured"), default="unitary")
    g.add_argument("--seed", type=int)
    g.add_argument("--delay-after-prep", metavar="TAU", help="time units, or e.g. 0.25period")
    g.add_argument("--delay-after-oracle", metavar="TAU")
    g.add_argument("--params", help="JSON object overriding physical parameters")
    g.add_argument("--config", help="JSON config file supplying physical parameters")
    g.add_argument("--out", help="trace JSON output path")
    g.add_argument("--force", action="store_true", help="replace existing output files")
    g.set_defaults(func=cmd_grover)

    b = sub.add_parser("bench", help="run a benchmark sweep and write CSV + JSON", epilog=DEFAULTS_NOTE)
    b.add_argument("experiment", nargs="?", choices=("dephasing", "delay", "oracle"))
    b.add_argument("--config", help="config file, or a previous report to replay")
    b.add_argument("--kind", choices=("collective", "independent"))
    b.add_argument("--sigma-grid", type=parse_grid, help="start:stop:count or comma list")
    b.add_argument("--grid", type=int, help="number of delay points over --periods free-evolution periods")
    b.add_argument("--periods", type=float, default=1.0)
    b.add_argument("--delays", type=parse_grid, help="explicit delay grid in time units")
    b.add_argument("--encoding", choices=("pair", "bare"))
    b.add_argument("--marked")
    b.add_argument("--level", choices=("logical", "physical"))
    b.add_argument("--trials", type=int)
    b.add_argument("--seed", type=int)
    b.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo trials")
    b.add_argument("--params", help="JSON object overriding physical parameters")
    b.add_argument("--out-dir", default=".")
    b.add_argument("--prefix", help="output file stem (default bench-<experiment>)")
    b.add_argument("--force", action="store_true")
    b.set_defaults(func=cmd_bench)

    q = sub.add_parser("gates", help="print or verify the gate catalog")
    q.add_argument("action", choices=("dump", "verify", "list"))
    q.add_argument("name", nargs="?")
    q.add_argument("--theta", help="rotation angle for U, e.g. 7pi/4")
    q.set_defaults(func=cmd_gates)

    v = sub.add_parser("validate", help="check a config file and print it resolved")
    v.add_argument("path", nargs="?")
    v.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print("config error:", file=sys.stderr)
        for p in exc.problems:
            print(f"  - {p}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, json.JSONDecodeError) as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InternalError, gates.CatalogError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
