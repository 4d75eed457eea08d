"""Command-line driver.

Exit codes: 0 on success, 1 when a constraint set is unsatisfiable or a check
fails, 2 on malformed input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .constraints import generate, load_topology, parse_constraints, render_bundle, render_constraints
from .derivation import apply_shell, derive_interfaces, parse_shell, parse_stub
from .emit import emit_config, render_cfg, render_header
from .errors import MdlError
from .pipeline import configure, load_service_dir, load_services
from .seniority import leq
from .solver import Diverged, Sat, SolverConfig, Unsat, parse_solution, render_solution, solve, verify
from .syntax import parse_term, render_term
from .terms import is_ground


class _Fail(Exception):
    """Semantic failure: reported on stderr, exit code 1."""


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as err:
        raise MdlError(f"cannot read {path}: {err.strerror}") from None


def _write(path: Path | str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        try:
            Path(path).write_text(text)
        except OSError as err:
            raise MdlError(f"cannot write {path}: {err.strerror}") from None


def _ground_term(path: str):
    t = parse_term(_read(path), source=path)
    if not is_ground(t):
        raise MdlError(f"{path}: term must not contain variables")
    return t


def _report(verdict) -> Sat:
    if isinstance(verdict, Unsat):
        lines = "".join(f"  {o}\n" for o in verdict.explanation)
        raise _Fail(f"unsatisfiable; conflicting constraints:\n{lines}".rstrip())
    if isinstance(verdict, Diverged):
        raise _Fail(f"bound propagation did not stabilise within {verdict.rounds} rounds")
    return verdict


def cmd_parse(args) -> None:
    print(render_term(parse_term(_read(args.file), source=args.file)))


def cmd_check(args) -> None:
    if not leq(_ground_term(args.junior), _ground_term(args.senior)):
        raise _Fail(f"{args.junior} is not junior to {args.senior}")


def cmd_derive(args) -> None:
    d = derive_interfaces(parse_stub(_read(args.stub)))
    if args.shell:
        d = apply_shell(d, parse_shell(_read(args.shell)))
    _write(args.output, render_bundle(d))


def cmd_constraints(args) -> None:
    cs = generate(load_topology(_read(args.topo)), load_services(args.ifc))
    _write(args.output, render_constraints(cs))


def _solver_config(args) -> SolverConfig:
    return SolverConfig(max_rounds=args.max_rounds)


def cmd_solve(args) -> None:
    cs = parse_constraints(_read(args.constraints), source=args.constraints)
    sat = _report(solve(cs, _solver_config(args)))
    _write(args.output, render_solution(sat.solution))


def cmd_verify(args) -> None:
    cs = parse_constraints(_read(args.constraints), source=args.constraints)
    ok, failures = verify(cs, parse_solution(_read(args.solution)))
    if not ok:
        raise _Fail("violated constraints:\n" + "\n".join(f"  {o}" for o in failures))


def _write_configs(out: Path, configs, cpp_header: bool) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, cfg in sorted(configs.items()):
        (out / f"{name}.cfg").write_text(render_cfg(cfg))
        if cpp_header:
            (out / f"{name}.hpp").write_text(render_header(cfg))


def cmd_emit(args) -> None:
    solution = parse_solution(_read(args.sol))
    services = load_services(args.ifc)
    configs = {n: emit_config(d, solution) for n, d in services.items()}
    _write_configs(Path(args.out), configs, args.cpp_header)


def cmd_configure(args) -> None:
    services = load_service_dir(args.ifc_dir)
    result = configure(_read(args.topo), services, _solver_config(args))
    sat = _report(result.verdict)
    _write_configs(Path(args.out), result.configs, args.cpp_header)
    if args.sol:
        _write(args.sol, render_solution(sat.solution))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mdlconf", description="Configure service interfaces from MDL terms.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("parse", help="validate an MDL term and print its canonical form")
    s.add_argument("file")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("check", help="succeed when JUNIOR is junior to SENIOR (ground terms)")
    s.add_argument("junior")
    s.add_argument("senior")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("derive", help="derive an interface bundle from a service stub")
    s.add_argument("stub")
    s.add_argument("--shell")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_derive)

    s = sub.add_parser("constraints", help="generate the constraint set of a topology")
    s.add_argument("--topo", required=True)
    s.add_argument("ifc", nargs="+", help=".ifc or .stub files")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_constraints)

    for name, func, help_ in (
        ("solve", cmd_solve, "solve a constraint set and print the solution"),
        ("configure", cmd_configure, "run the whole pipeline and write one .cfg per service"),
    ):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--max-rounds", type=int, default=SolverConfig.max_rounds)
        s.set_defaults(func=func)
        if name == "solve":
            s.add_argument("constraints")
            s.add_argument("-o", "--output")
        else:
            s.add_argument("--topo", required=True)
            s.add_argument("--ifc-dir", required=True)
            s.add_argument("--out", required=True)
            s.add_argument("--sol", help="also write the solution here")
            s.add_argument("--cpp-header", action="store_true")

    s = sub.add_parser("verify", help="check a solution against a constraint set")
    s.add_argument("constraints")
    s.add_argument("solution")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("emit", help="write per-service configuration files from a solution")
    s.add_argument("--sol", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--cpp-header", action="store_true")
    s.add_argument("ifc", nargs="+")
    s.set_defaults(func=cmd_emit)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except _Fail as err:
        print(f"mdlconf {args.command}: {err}", file=sys.stderr)
        return 1
    except (MdlError, ValueError) as err:
        print(f"mdlconf {args.command}: error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
