"""Command-line front end.

Commands: analyze (run both criteria on a state), sweep (scan a family
parameter), decompose-verify (check a separable decomposition against a
state), dump-state (write a named family to the state file format).

Exit codes: 0 = no violation found (INCONCLUSIVE / verified), 2 = an
inseparability verdict (or decomposition mismatch), 1 = usage or input
error.
"""

from __future__ import annotations

import argparse
import datetime
import json
import multiprocessing
import sys
from dataclasses import dataclass

from . import __version__, decomp, sepcrit, statefab
from .matkit import ContractViolation
from .sepcrit import SamplingBudget
from .statefab import StateFormatError, StateInvariantError

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2


@dataclass
class RunConfig:
    command: str
    family: str | None = None
    input_path: str | None = None
    param: float | None = None
    grid: list[float] | None = None
    base_family: str | None = None
    base_param: float | None = None
    tol_eig: float = 1e-9
    tol_rank: float = 1e-8
    tol_member: float = 1e-7
    samples: int = 25
    seed: int = 42
    output_format: str = "text"
    output_path: str | None = None
    timestamp: bool = True
    jobs: int = 1

    def budget(self) -> SamplingBudget:
        return SamplingBudget(
            samples_per_parameter=self.samples,
            seed=self.seed,
            tol_eig=self.tol_eig,
            tol_rank=self.tol_rank,
            tol_member=self.tol_member,
        )


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--tol-eig", type=float, default=1e-9,
                   help="eigenvalue tolerance for the partial-transpose test")
    p.add_argument("--tol-rank", type=float, default=1e-8,
                   help="eigenvalue cutoff defining numerical ranges")
    p.add_argument("--tol-member", type=float, default=1e-7,
                   help="relative residual for subspace membership")
    p.add_argument("--samples", "-M", type=int, default=25,
                   help="sampled values per free solver parameter")
    p.add_argument("--seed", type=int, default=42, help="sampling PRNG seed")
    p.add_argument("--format", choices=("text", "json"), default="text",
                   dest="output_format")
    p.add_argument("--output", "-o", default=None, help="write the report here")
    p.add_argument("--no-timestamp", action="store_true",
                   help="omit the timestamp from JSON reports")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sepscan",
        description="Separability analysis of bipartite density matrices.")
    parser.add_argument("--version", action="version", version=f"sepscan {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="run both separability criteria on one state")
    src = pa.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", choices=statefab.FAMILY_NAMES)
    src.add_argument("--input", dest="input_path", help="state file to analyze")
    pa.add_argument("--param", type=float, default=None, help="family parameter in [0, 1]")
    pa.add_argument("--base-family", default=None,
                    help="base family for eps_mix (e.g. rho_a)")
    pa.add_argument("--base-param", type=float, default=None,
                    help="parameter of the eps_mix base family")
    _add_common(pa)

    ps = sub.add_parser("sweep", help="analyze a parametric family over a grid")
    ps.add_argument("--family", required=True, choices=sorted(
        n for n in statefab.FAMILY_NAMES if statefab.family_has_parameter(n) and n != "eps_mix"))
    ps.add_argument("--grid", required=True,
                    help="comma list (0.1,0.2,...) or start:stop:count")
    ps.add_argument("--jobs", type=int, default=1,
                    help="parallel workers for independent grid points")
    _add_common(ps)

    pd = sub.add_parser("decompose-verify",
                        help="verify a separable decomposition against a state")
    pd.add_argument("--input", dest="input_path", help="state file")
    pd.add_argument("--decomposition", help="decomposition file")
    pd.add_argument("--builtin", choices=("rho_symmetric", "sigma_symmetric"),
                    help="verify a built-in phase-average decomposition")
    pd.add_argument("--points", type=int, default=None,
                    help="number of terms for the built-in decomposition")
    pd.add_argument("--tol", type=float, default=1e-10, help="entrywise tolerance")
    pd.add_argument("--format", choices=("text", "json"), default="text",
                    dest="output_format")
    pd.add_argument("--output", "-o", default=None)
    pd.add_argument("--no-timestamp", action="store_true")

    pw = sub.add_parser("dump-state", help="write a named family to a state file")
    pw.add_argument("--family", required=True, choices=statefab.FAMILY_NAMES)
    pw.add_argument("--param", type=float, default=None)
    pw.add_argument("--base-family", default=None)
    pw.add_argument("--base-param", type=float, default=None)
    pw.add_argument("--label", default=None, help="override the stored label")
    pw.add_argument("--output", "-o", default=None, help="target path (default stdout)")

    return parser


def _parse_grid(text: str) -> list[float]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("grid must be start:stop:count or a comma list")
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
        if count < 2:
            raise ValueError("grid needs at least 2 points")
        step = (stop - start) / (count - 1)
        return [start + i * step for i in range(count)]
    values = [float(x) for x in text.split(",") if x.strip() != ""]
    if len(values) < 2:
        raise ValueError("grid needs at least 2 points")
    return values


def _build_state(cfg: RunConfig) -> statefab.BipartiteState:
    if cfg.input_path is not None:
        with open(cfg.input_path, "r", encoding="utf-8") as fh:
            return statefab.read_state(fh.read())
    if cfg.family == "eps_mix":
        if cfg.base_family is None:
            raise ContractViolation("eps_mix requires --base-family")
        base = statefab.state_family(
            cfg.base_family,
            cfg.base_param if statefab.family_has_parameter(cfg.base_family) else None)
        return statefab.state_family("eps_mix", cfg.param, base=base)
    param = cfg.param if statefab.family_has_parameter(cfg.family) else None
    if cfg.param is not None and not statefab.family_has_parameter(cfg.family):
        raise ContractViolation(f"family {cfg.family!r} takes no parameter")
    return statefab.state_family(cfg.family, param)


def _report_header(cfg: RunConfig) -> dict:
    head = {
        "schema": SCHEMA_VERSION,
        "version": __version__,
        "command": cfg.command,
    }
    if cfg.family:
        head["family"] = cfg.family
        if cfg.param is not None:
            head["param"] = cfg.param
        if cfg.base_family:
            head["base_family"] = cfg.base_family
            head["base_param"] = cfg.base_param
    if cfg.input_path:
        head["input"] = cfg.input_path
    if cfg.timestamp:
        head["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return head


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _analyze_text(report: sepcrit.SeparabilityReport, cfg: RunConfig) -> str:
    lines = []
    what = cfg.family or cfg.input_path
    if cfg.param is not None:
        what = f"{what} (param={cfg.param:g})"
    lines.append(f"state: {what}")
    lines.append(f"verdict: {report.verdict}")
    lines.append(f"min eigenvalue of partial transpose: {report.min_eig_pt:.12g}")
    lines.append(f"rank(rho) = {report.rank_rho}, rank(partial transpose) = {report.rank_pt}")
    if report.certificate_direction:
        lines.append(f"certificate direction: {report.certificate_direction}"
                     f" (witness on the {report.witness_side} side)")
    if report.witness is not None:
        comps = ", ".join(f"{z.real:+.6f}{z.imag:+.6f}j" for z in report.witness)
        lines.append(f"witness: [{comps}]")
    for direction, counts in report.product_vector_counts.items():
        if counts.get("unconstrained"):
            lines.append(f"{direction}: range is the full space (criterion trivial)")
        else:
            lines.append(f"{direction}: {counts['samples']} product vectors, "
                         f"{counts['admissible']} admissible")
    return "\n".join(lines)


def cmd_analyze(cfg: RunConfig) -> int:
    try:
        state = _build_state(cfg)
    except (OSError, StateFormatError, StateInvariantError, ContractViolation) as exc:
        print(f"sepscan analyze: {exc}", file=sys.stderr)
        return EXIT_ERROR
    report = sepcrit.analyze(state, cfg.budget())
    if cfg.output_format == "json":
        payload = _report_header(cfg)
        payload.update(report.to_dict())
        _emit(cfg, json.dumps(payload, indent=2, sort_keys=True))
    else:
        _emit(cfg, _analyze_text(report, cfg))
    return EXIT_OK if report.verdict == sepcrit.VERDICT_INCONCLUSIVE else EXIT_VIOLATION


def _sweep_row(args) -> dict:
    family, param, budget_fields = args
    budget = SamplingBudget(**budget_fields)
    state = statefab.state_family(family, param)
    report = sepcrit.analyze(state, budget)
    return {
        "param": param,
        "min_eig_pt": report.min_eig_pt,
        "rank_rho": report.rank_rho,
        "rank_pt": report.rank_pt,
        "verdict": report.verdict,
    }


def cmd_sweep(cfg: RunConfig) -> int:
    try:
        grid = sorted(cfg.grid)
        for p in grid:
            if not 0.0 <= p <= 1.0:
                raise ContractViolation(f"grid value {p:g} outside [0, 1]")
    except (ValueError, ContractViolation) as exc:
        print(f"sepscan sweep: {exc}", file=sys.stderr)
        return EXIT_ERROR
    budget_fields = {
        "samples_per_parameter": cfg.samples,
        "seed": cfg.seed,
        "tol_eig": cfg.tol_eig,
        "tol_rank": cfg.tol_rank,
        "tol_member": cfg.tol_member,
    }
    tasks = [(cfg.family, p, budget_fields) for p in grid]
    try:
        if cfg.jobs > 1:
            with multiprocessing.Pool(cfg.jobs) as pool:
                rows = pool.map(_sweep_row, tasks)
        else:
            rows = [_sweep_row(t) for t in tasks]
    except ContractViolation as exc:
        print(f"sepscan sweep: {exc}", file=sys.stderr)
        return EXIT_ERROR
    rows.sort(key=lambda r: r["param"])
    if cfg.output_format == "json":
        payload = _report_header(cfg)
        payload["rows"] = rows
        _emit(cfg, json.dumps(payload, indent=2, sort_keys=True))
    else:
        header = f"{'param':>8}  {'min_eig_pt':>14}  {'rank':>4}  {'rank_pt':>7}  verdict"
        lines = [header, "-" * len(header)]
        for r in rows:
            lines.append(f"{r['param']:>8.4f}  {r['min_eig_pt']:>14.6e}  "
                         f"{r['rank_rho']:>4d}  {r['rank_pt']:>7d}  {r['verdict']}")
        _emit(cfg, "\n".join(lines))
    return EXIT_OK


def cmd_decompose_verify(args, cfg: RunConfig) -> int:
    try:
        if args.builtin:
            which = args.builtin
            default_points = 7 if which == "rho_symmetric" else 9
            points = args.points if args.points is not None else default_points
            d = decomp.fourier_decomposition(which, points)
            state = statefab.state_family(which)
        else:
            if not args.input_path or not args.decomposition:
                raise ContractViolation(
                    "need --input and --decomposition, or --builtin")
            with open(args.input_path, "r", encoding="utf-8") as fh:
                state = statefab.read_state(fh.read())
            with open(args.decomposition, "r", encoding="utf-8") as fh:
                d = decomp.read_decomposition(fh.read())
        ok, deviation = decomp.verify_decomposition(state, d, tol=args.tol)
    except (OSError, StateFormatError, StateInvariantError, ContractViolation) as exc:
        print(f"sepscan decompose-verify: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if cfg.output_format == "json":
        payload = _report_header(cfg)
        payload.update({
            "verified": ok,
            "max_deviation": deviation,
            "terms": len(d),
            "term_bound": (d.dimA * d.dimB) ** 2,
            "tol": args.tol,
        })
        _emit(cfg, json.dumps(payload, indent=2, sort_keys=True))
    else:
        status = "verified" if ok else "MISMATCH"
        _emit(cfg, f"{status}: {len(d)} terms (bound {(d.dimA * d.dimB) ** 2}), "
                   f"max deviation {deviation:.3e} (tol {args.tol:g})")
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_dump_state(args) -> int:
    try:
        cfg = RunConfig(command="dump-state", family=args.family, param=args.param,
                        base_family=args.base_family, base_param=args.base_param)
        state = _build_state(cfg)
        if args.label is not None:
            state = statefab.BipartiteState(state.dimA, state.dimB, state.rho,
                                            label=args.label)
        text = statefab.write_state(state)
    except (ContractViolation, StateInvariantError) as exc:
        print(f"sepscan dump-state: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "dump-state":
        return cmd_dump_state(args)

    cfg = RunConfig(command=args.command)
    cfg.output_format = getattr(args, "output_format", "text")
    cfg.output_path = getattr(args, "output", None)
    cfg.timestamp = not getattr(args, "no_timestamp", False)
    for name in ("tol_eig", "tol_rank", "tol_member", "samples", "seed"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))

    if args.command == "analyze":
        cfg.family = args.family
        cfg.input_path = args.input_path
        cfg.param = args.param
        cfg.base_family = args.base_family
        cfg.base_param = args.base_param
        return cmd_analyze(cfg)
    if args.command == "sweep":
        cfg.family = args.family
        cfg.jobs = args.jobs
        try:
            cfg.grid = _parse_grid(args.grid)
        except ValueError as exc:
            print(f"sepscan sweep: {exc}", file=sys.stderr)
            return EXIT_ERROR
        return cmd_sweep(cfg)
    if args.command == "decompose-verify":
        cfg.input_path = args.input_path
        return cmd_decompose_verify(args, cfg)
    parser.error(f"unknown command {args.command!r}")
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
