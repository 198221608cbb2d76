"""Command line: ``planarcc bounds | census | verify``.

Exit codes: 0 success; 1 a hard census check failed; 2 census not saturated;
3 degenerate critical point found; 4 input file violates the schema;
5 verification mismatch; 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from . import kernels
from .bounds import bound_table
from .census import CensusOptions, epsilon_masses, run_census
from .config import MassVector
from .serialize import census_csv, census_summary, census_to_dict, render_bounds, write_census
from .solver import SolveOptions
from .spectral import TOL_DEGENERATE, TOL_EIG
from .verify import SchemaError, verify_census

EXIT_OK, EXIT_CHECKS, EXIT_UNSATURATED, EXIT_DEGENERATE = 0, 1, 2, 3
EXIT_SCHEMA, EXIT_MISMATCH, EXIT_USAGE = 4, 5, 64

DEFAULT_EPSILON = 0.01

log = logging.getLogger("planarcc")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    """Effective census parameters; embedded verbatim in the JSON output."""

    masses: list
    seed: int = 0
    starts_budget: int = 2_000_000
    window_factor: int = 500
    window_min: int = 2000
    tol_residual: float = 1e-12
    tol_eig: float = TOL_EIG
    tol_degenerate: float = TOL_DEGENERATE
    max_iter: int = 80
    max_halvings: int = 20
    min_sep: float = 0.05
    collapse_tol: float = 1e-6
    epsilon_sweep: list | None = None

    def census_options(self, workers: int = 1) -> CensusOptions:
        solve = SolveOptions(tol_residual=self.tol_residual, max_iter=self.max_iter,
                             max_halvings=self.max_halvings, min_sep=self.min_sep,
                             collapse_tol=self.collapse_tol)
        return CensusOptions(seed=self.seed, starts_budget=self.starts_budget,
                             window_factor=self.window_factor, window_min=self.window_min,
                             workers=workers, solve=solve, tol_eig=self.tol_eig,
                             tol_degenerate=self.tol_degenerate)


def parse_masses(text: str) -> list:
    """``"1,1,1,eps"`` -> ``[1.0, 1.0, 1.0, "eps"]``; masses must be positive."""
    out: list = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok.lower() in ("eps", "epsilon"):
            out.append("eps")
            continue
        try:
            v = float(tok)
        except ValueError:
            raise UsageError(f"not a mass: {tok!r}") from None
        if not (v > 0 and v != float("inf")):
            raise UsageError(f"masses must be positive and finite, got {tok}")
        out.append(v)
    if len(out) < 3:
        raise UsageError("a census needs at least 3 masses")
    return out


def parse_floats(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"not a list of numbers: {text!r}") from None
    if not vals or any(not v > 0 for v in vals):
        raise UsageError(f"epsilon values must be positive: {text!r}")
    return vals


def cmd_bounds(args) -> int:
    if args.n is None or args.n < 3:
        raise UsageError("--n must be an integer >= 3")
    print(render_bounds(bound_table(args.n), args.format))
    return EXIT_OK


def _exit_code(data: dict) -> int:
    if not data["saturated"]:
        return EXIT_UNSATURATED
    if data["degenerate_found"]:
        return EXIT_DEGENERATE
    if not all(c["pass"] for c in data["hard_checks"].values()):
        return EXIT_CHECKS
    return EXIT_OK


def _sweep_path(out: Path, eps: float) -> Path:
    return out.with_name(f"{out.stem}_eps{eps:g}{out.suffix}")


_FLAG_FIELDS = {
    "seed": "seed", "starts_budget": "starts_budget", "tol_residual": "tol_residual",
    "tol_eig": "tol_eig", "tol_degenerate": "tol_degenerate", "max_iter": "max_iter",
    "damping_steps": "max_halvings", "min_sep": "min_sep", "collapse_tol": "collapse_tol",
    "window_factor": "window_factor", "window_min": "window_min",
}


def build_run_config(args, pattern: list, sweep: list | None) -> RunConfig:
    """Defaults, overridden by ``--config`` JSON, overridden by explicit flags."""
    values: dict = {}
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        known = set(RunConfig.__dataclass_fields__) - {"masses", "epsilon_sweep"}
        unknown = set(loaded) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        values.update(loaded)
    for flag, name in _FLAG_FIELDS.items():
        v = getattr(args, flag)
        if v is not None:
            values[name] = v
    config = RunConfig(masses=pattern, epsilon_sweep=sweep, **values)
    if config.starts_budget < 1 or config.max_iter < 1 or config.max_halvings < 0:
        raise UsageError("budgets and iteration counts must be positive")
    if not (config.tol_residual > 0 and config.tol_eig > 0 and config.min_sep >= 0):
        raise UsageError("tolerances must be positive")
    return config


def cmd_census(args) -> int:
    pattern = parse_masses(args.masses)
    if args.n is not None and args.n != len(pattern):
        raise UsageError(f"--n {args.n} does not match {len(pattern)} masses")
    sweep = parse_floats(args.epsilon_sweep) if args.epsilon_sweep else None
    has_eps = "eps" in pattern
    if sweep and not has_eps:
        raise UsageError("--epsilon-sweep needs an 'eps' entry in --masses")
    if args.workers < 1:
        raise UsageError("--workers must be positive")
    config = build_run_config(args, pattern, sweep)
    opts = config.census_options(args.workers)
    eps_values = sweep or ([args.epsilon if args.epsilon is not None else DEFAULT_EPSILON]
                           if has_eps else [None])
    out = Path(args.out)

    codes = []
    outputs = []
    for eps in eps_values:
        masses = epsilon_masses(pattern, eps) if eps is not None else MassVector(pattern)
        log.info("census for masses %s (kernels: %s)", list(masses.values), kernels.BACKEND)
        result = run_census(masses, opts)
        data = census_to_dict(result, asdict(config), epsilon=eps, epsilon_sweep=sweep)
        path = _sweep_path(out, eps) if sweep and len(sweep) > 1 else out
        json_path, csv_path = write_census(data, path)
        outputs.append(data)
        if args.format == "json":
            print(json.dumps({"json": str(json_path), "csv": str(csv_path),
                              "morse_poly": data["morse_poly"], "total": data["total"],
                              "saturated": data["saturated"],
                              "hard_checks": data["hard_checks"]}))
        elif args.format == "csv":
            print(census_csv(data), end="")
        else:
            print(census_summary(data))
            print(f"wrote {json_path} and {csv_path}")
            print()
        codes.append(_exit_code(data))
    if sweep and len(sweep) > 1 and args.format == "text":
        for eps, data in zip(eps_values, outputs):
            print(f"epsilon={eps:g}: " + " ".join(map(str, data["morse_poly"]))
                  + f" | {data['total']}")
    for code in (EXIT_UNSATURATED, EXIT_DEGENERATE, EXIT_CHECKS):
        if code in codes:
            return code
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        data = json.loads(Path(args.input_file).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read census file: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        problems = verify_census(data)
    except SchemaError as exc:
        print(f"schema violation: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    if problems:
        print(f"{len(problems)} mismatch(es):")
        for p in problems:
            print(f"  {p}")
        return EXIT_MISMATCH
    print(f"ok: {len(data['records'])} records verified, "
          f"counts {' '.join(map(str, data['morse_poly']))} | {data['total']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="planarcc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bounds", help="print the four lower-bound rows for n bodies")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--format", choices=("text", "json", "csv"), default="text")
    b.set_defaults(func=cmd_bounds)

    c = sub.add_parser("census", help="find all central configurations of given masses")
    c.add_argument("--masses", required=True,
                   help="comma separated positive masses; 'eps' marks a small mass")
    c.add_argument("--n", type=int, help="optional consistency check on the mass count")
    c.add_argument("--config", help="JSON file with run parameters (flags override it)")
    c.add_argument("--seed", type=int)
    c.add_argument("--starts-budget", type=int, help="random starts allowed (default 2000000)")
    c.add_argument("--tol-residual", type=float, help="Newton residual max-norm (default 1e-12)")
    c.add_argument("--tol-eig", type=float, help=f"relative eigenvalue sign cut (default {TOL_EIG:g})")
    c.add_argument("--tol-degenerate", type=float,
                   help=f"relative degeneracy cut (default {TOL_DEGENERATE:g})")
    c.add_argument("--max-iter", type=int, help="Newton iterations per start (default 80)")
    c.add_argument("--damping-steps", type=int, help="line-search halvings (default 20)")
    c.add_argument("--min-sep", type=float, help="start separation at I=1 (default 0.05)")
    c.add_argument("--collapse-tol", type=float, help="collision abort distance (default 1e-6)")
    c.add_argument("--window-factor", type=int,
                   help="saturation window per record found (default 500)")
    c.add_argument("--window-min", type=int, help="minimum saturation window (default 2000)")
    c.add_argument("--epsilon", type=float, default=None,
                   help=f"value substituted for 'eps' (default {DEFAULT_EPSILON})")
    c.add_argument("--epsilon-sweep", help="comma separated values substituted for 'eps'")
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--format", choices=("text", "json", "csv"), default="text")
    c.add_argument("--out", default="census.json", help="JSON path; CSV is written alongside")
    c.set_defaults(func=cmd_census)

    v = sub.add_parser("verify", help="recompute a census JSON file from positions")
    v.add_argument("input_file")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"planarcc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
