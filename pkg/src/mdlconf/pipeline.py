"""End-to-end configuration: interfaces in, per-service configurations out."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .constraints import ConstraintSet, Topology, generate, load_topology, parse_bundle
from .derivation import DerivedService, apply_shell, derive_interfaces, parse_shell, parse_stub
from .emit import ServiceConfig, emit_config
from .errors import TopologyError
from .solver import Sat, SolverConfig, Verdict, solve


def load_service_file(path: Path) -> DerivedService:
    text = path.read_text()
    if path.suffix == ".ifc":
        d = parse_bundle(text, default_name=path.stem, source=str(path))
    else:
        d = derive_interfaces(parse_stub(text))
    shell = path.with_suffix(".shell")
    if shell.exists():
        d = apply_shell(d, parse_shell(shell.read_text()))
    return d


def load_services(paths) -> dict[str, DerivedService]:
    services: dict[str, DerivedService] = {}
    for path in sorted(Path(p) for p in paths):
        d = load_service_file(path)
        if d.name in services:
            raise TopologyError(f"service {d.name!r} defined twice (again in {path})")
        services[d.name] = d
    return services


def load_service_dir(directory) -> dict[str, DerivedService]:
    root = Path(directory)
    if not root.is_dir():
        raise TopologyError(f"{root} is not a directory")
    return load_services([*root.glob("*.ifc"), *root.glob("*.stub")])


@dataclass(frozen=True)
class Configuration:
    constraints: ConstraintSet
    verdict: Verdict
    configs: dict[str, ServiceConfig]


def configure(
    top: Topology | str, services: dict[str, DerivedService], cfg: SolverConfig | None = None
) -> Configuration:
    if isinstance(top, str):
        top = load_topology(top)
    cs = generate(top, services)
    verdict = solve(cs, cfg)
    configs = {}
    if isinstance(verdict, Sat):
        for name in sorted(services):
            configs[name] = emit_config(services[name], verdict.solution)
    return Configuration(cs, verdict, configs)
