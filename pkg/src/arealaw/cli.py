"""Command-line front end: region scans, mutual information, continuum fits, oracle checks.

Every command writes CSV with ``#`` provenance headers. Values are printed
with 17 significant digits and rows come out in a fixed order regardless of
the worker count, so identical configurations give byte-identical files.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path

from . import __version__
from .entropy import State, StateModel
from .errors import ArealawError
from .fits import (
    fit_chord,
    fit_continuum_extrapolation,
    fit_finite_size,
    fit_log_area_law,
    fit_thermal,
)
from .lattice import LatticeSpec, momentum_indices
from .oracle import form_density, quadrature_renyi
from .quadform import DistributionKind
from .verify import format_table, run_oracle_suite

ORACLE_MAX_DIM = 4
ORACLE_TOL = 1e-6


class ConfigError(ValueError):
    """A run configuration that fails validation."""


def fmt(value) -> str:
    """Locale-free, round-trippable number formatting; ``None`` becomes an empty cell."""
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


# parsing of list-valued options ---------------------------------------------

def parse_int_list(text: str) -> list[int]:
    """``"1,4,9"`` or inclusive ranges ``"2:10"`` / ``"10:100:10"``, comma-joined."""
    values: list[int] = []
    for item in filter(None, (part.strip() for part in text.split(","))):
        if ":" in item:
            pieces = [int(p) for p in item.split(":")]
            if len(pieces) not in (2, 3) or (len(pieces) == 3 and pieces[2] <= 0):
                raise ConfigError(f"bad range {item!r}; use start:stop or start:stop:step")
            start, stop, step = pieces if len(pieces) == 3 else (*pieces, 1)
            values.extend(range(start, stop + 1, step))
        else:
            values.append(int(item))
    if not values:
        raise ConfigError(f"empty list {text!r}")
    return sorted(set(values))


def parse_number_list(text: str) -> list[float]:
    """Comma-separated numbers; fractions like ``1/3`` are accepted."""
    try:
        values = [float(Fraction(p.strip())) for p in text.split(",") if p.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad number list {text!r}: {exc}") from None
    if not values:
        raise ConfigError(f"empty list {text!r}")
    return values


def parse_kinds(text: str) -> list[DistributionKind]:
    if text.strip() == "all":
        return list(DistributionKind)
    try:
        chosen = {DistributionKind(p.strip().lower()) for p in text.split(",") if p.strip()}
    except ValueError as exc:
        names = ", ".join(k.value for k in DistributionKind)
        raise ConfigError(f"{exc}; choose from {names} or 'all'") from None
    return [k for k in DistributionKind if k in chosen]


# configuration ----------------------------------------------------------------

@dataclass
class RunConfig:
    sites: int | None = None
    length: float | None = None
    spacing: float = 1.0
    mass: float = 1.0
    state: str = "ground"
    temperature: float | None = None
    momentum: str | None = None
    kinds: str = "all"
    orders: str = "2"
    regions: str | None = None
    spacings: str | None = None
    max_length: float | None = None
    oracle: bool = False
    output: str | None = field(default=None, metadata={"provenance": False})
    threads: int = field(default=1, metadata={"provenance": False})
    timing: bool = field(default=False, metadata={"provenance": False})

    def provenance(self) -> list[tuple[str, str]]:
        """Settings that determine the numbers; execution details are left out."""
        return [(f.name, str(getattr(self, f.name))) for f in fields(self)
                if f.metadata.get("provenance", True) and getattr(self, f.name) is not None]


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_BOOL_WORDS = {"1": True, "true": True, "yes": True, "on": True,
               "0": False, "false": False, "no": False, "off": False}


def _coerce(name: str, raw: str):
    kind = _FIELD_TYPES[name]
    try:
        if kind.startswith("bool"):
            return _BOOL_WORDS[raw.strip().lower()]
        if kind.startswith("int"):
            return int(raw)
        if kind.startswith("float"):
            return float(Fraction(raw.strip()))
    except (KeyError, ValueError, ZeroDivisionError):
        raise ConfigError(f"{name}: cannot interpret {raw!r}") from None
    return raw.strip()


def read_config_file(path: str) -> dict[str, object]:
    """``key = value`` lines; ``#`` starts a comment, dashes and underscores are interchangeable."""
    values: dict[str, object] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: expected a known key=value, got {line!r}")
        values[key] = _coerce(key, raw)
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    settings: dict[str, object] = {}
    if args.config:
        settings.update(read_config_file(args.config))
    for name in _FIELD_TYPES:
        value = getattr(args, name, None)
        if value is not None:
            settings[name] = value
    return RunConfig(**settings)


@dataclass(frozen=True)
class Plan:
    spec: LatticeSpec
    state: State
    kinds: list[DistributionKind]
    orders: list[float]
    regions: list[int]


def _lattice(config: RunConfig, spacing: float) -> LatticeSpec:
    if config.sites is not None:
        return LatticeSpec(config.sites, spacing, config.mass)
    if config.length is not None:
        return LatticeSpec.from_length(config.length, spacing, config.mass)
    raise ConfigError("give the lattice size with --sites or --length")


def _state(config: RunConfig, spec: LatticeSpec) -> State:
    if config.state == "thermal":
        if config.temperature is None:
            raise ConfigError("thermal states need --temperature")
        return State("thermal", temperature=config.temperature)
    if config.temperature is not None:
        raise ConfigError("--temperature only applies to --state thermal")
    if config.state == "particle":
        if config.momentum is None:
            raise ConfigError("particle states need --momentum (an index or 'edge')")
        try:
            k = spec.zone_edge if config.momentum == "edge" else int(config.momentum)
        except ValueError:
            raise ConfigError(f"momentum must be an integer or 'edge', got {config.momentum!r}") from None
        if k not in set(momentum_indices(spec).tolist()):
            raise ConfigError(f"momentum {k} is not in the lattice momentum set")
        return State("particle", momentum=k)
    if config.momentum is not None:
        raise ConfigError("--momentum only applies to --state particle")
    return State(config.state)


def _orders(config: RunConfig, state: State) -> list[float]:
    orders = sorted(set(parse_number_list(config.orders)))
    if any(not r > 0 for r in orders):
        raise ConfigError("orders must be positive")
    if not state.is_gaussian and any(r not in (2, 3, 4) for r in orders):
        raise ConfigError("particle states support orders 2, 3 and 4")
    return orders


def make_plan(config: RunConfig, spacing: float | None = None,
              default_regions=None) -> Plan:
    try:
        spec = _lattice(config, config.spacing if spacing is None else spacing)
        state = _state(config, spec)
        if state.name == "ground" or state.name == "particle":
            if spec.mass == 0:
                raise ConfigError("a massless periodic chain has a zero mode; use mass > 0")
        kinds = parse_kinds(config.kinds)
        orders = _orders(config, state)
        if config.regions is not None:
            regions = parse_int_list(config.regions)
        else:
            regions = list(default_regions(spec))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if not kinds:
        raise ConfigError("no distribution kinds selected")
    if regions[0] < 1 or regions[-1] > spec.n_sites:
        raise ConfigError(f"region sizes must lie in [1, {spec.n_sites}]")
    if config.threads < 1:
        raise ConfigError("--threads must be at least 1")
    return Plan(spec, state, kinds, orders, regions)


# output -----------------------------------------------------------------------

def render_csv(command: str, config: RunConfig, header: list[str], rows: list[list],
               footer: list[str] = ()) -> str:
    lines = [f"# arealaw {__version__}", f"# command={command}"]
    lines += [f"# {key}={value}" for key, value in config.provenance()]
    lines.append(",".join(header))
    lines += [",".join(cell if isinstance(cell, str) else fmt(cell) for cell in row) for row in rows]
    lines += [f"# {line}" for line in footer]
    return "\n".join(lines) + "\n"


def emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    with open(output, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def _params(result) -> str:
    return " ".join(f"{name}={fmt(value)}" for name, value in result.params.items())


def _dispatch(function, items, threads: int):
    """Map over ``items`` on a thread pool; results keep the input order."""
    if threads == 1:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(function, items))


# scan -------------------------------------------------------------------------

SCAN_HEADER = ["M", "l", "kind", "state", "r", "gaussian_part", "delta_s", "subtracted",
               "wehrl_offset_subtracted", "runtime_ms"]


def _oracle_gap(model: StateModel, kind: DistributionKind, m: int, r: float) -> float | None:
    """Quadrature check of one unsubtracted Rényi entropy, when the grid stays small."""
    if m * len(kind.sectors) > ORACLE_MAX_DIM:
        return None
    cov = model.gaussian_cov(kind, m)
    estimate = quadrature_renyi(form_density(model.local_form(kind, m), cov), cov, r)
    return abs(estimate - model.renyi(kind, m, r))


def _scan_footer(plan: Plan, records) -> list[str]:
    spec, state = plan.spec, plan.state
    if not state.is_gaussian or state.name == "vacuum":
        return []
    footer = []
    for kind in plan.kinds:
        for r in plan.orders:
            chosen = [rec for rec in records if rec.kind is kind and rec.r == r]
            lengths = [rec.length for rec in chosen]
            values = [rec.wehrl_offset_subtracted if kind is DistributionKind.HUSIMI
                      else rec.subtracted for rec in chosen]
            try:
                if state.name == "thermal":
                    result = fit_thermal(lengths, values, state.temperature, spec.spacing)
                else:
                    result = fit_log_area_law(lengths, values, spec.spacing)
            except ArealawError:
                continue
            footer.append(f"fit kind={kind.value} r={fmt(r)} model={result.model} "
                          f"{_params(result)} points={result.n_points}")
    return footer


def cmd_scan(config: RunConfig) -> str:
    plan = make_plan(config, default_regions=lambda spec: range(1, spec.n_sites))
    model = StateModel(plan.spec, plan.state)
    model.prepare(plan.kinds)

    def work(m):
        out = []
        for kind in plan.kinds:
            for r in plan.orders:
                start = time.perf_counter()
                record = model.record(kind, m, r)
                elapsed = 1e3 * (time.perf_counter() - start)
                gap = _oracle_gap(model, kind, m, r) if config.oracle else None
                out.append((record, elapsed, gap))
        return out

    results = [item for chunk in _dispatch(work, plan.regions, config.threads) for item in chunk]
    rows = [[rec.m_sites, rec.length, rec.kind.value, rec.state, rec.r, rec.gaussian_part,
             rec.delta_s, rec.subtracted, rec.wehrl_offset_subtracted,
             elapsed if config.timing else None]
            for rec, elapsed, _ in results]
    footer = _scan_footer(plan, [rec for rec, *_ in results])
    if config.oracle:
        gaps = [gap for *_, gap in results if gap is not None]
        worst = max(gaps, default=0.0)
        footer.append(f"oracle checked={len(gaps)} worst={fmt(worst)} tol={fmt(ORACLE_TOL)}")
        if worst > ORACLE_TOL:
            raise ArealawError(f"quadrature oracle disagrees by {worst:.3e}")
    return render_csv("scan", config, SCAN_HEADER, rows, footer)


# mutual information -------------------------------------------------------------

MI_HEADER = ["M", "l", "kind", "state", "r", "mutual_information"]


def cmd_mutual_info(config: RunConfig) -> str:
    plan = make_plan(config, default_regions=lambda spec: range(1, spec.n_sites))
    if plan.regions[-1] >= plan.spec.n_sites:
        raise ConfigError(f"mutual information needs region sizes below {plan.spec.n_sites}")
    model = StateModel(plan.spec, plan.state)
    model.prepare(plan.kinds)

    def work(m):
        return [model.mutual_information(kind, m, r) for kind in plan.kinds for r in plan.orders]

    values = _dispatch(work, plan.regions, config.threads)
    spacing, total = plan.spec.spacing, plan.spec.total_length
    rows, footer = [], []
    combos = [(kind, r) for kind in plan.kinds for r in plan.orders]
    for m, chunk in zip(plan.regions, values):
        rows += [[m, m * spacing, kind.value, plan.state.tag, r, value]
                 for (kind, r), value in zip(combos, chunk)]
    for index, (kind, r) in enumerate(combos):
        lengths = [m * spacing for m in plan.regions]
        series = [chunk[index] for chunk in values]
        for fitter in (fit_finite_size, fit_chord):
            try:
                result = fitter(lengths, series, total, spacing)
            except ArealawError:
                continue
            footer.append(f"fit kind={kind.value} r={fmt(r)} model={result.model} "
                          f"{_params(result)} points={result.n_points}")
    return render_csv("mutual-info", config, MI_HEADER, rows, footer)


# central charge -------------------------------------------------------------------

CC_HEADER = ["spacing", "sites", "kind", "r", "a", "b", "points"]
MIN_SPACINGS = 4


def central_charge_rows(config: RunConfig):
    """Per-spacing log-law prefactors for every kind and order.

    Husimi prefactors use the offset-subtracted entropy.
    """
    if config.spacings is None or config.max_length is None:
        raise ConfigError("central-charge needs --spacings and --max-length")
    if config.length is None:
        raise ConfigError("central-charge fixes the physical size; give --length, not --sites")
    spacings = sorted(set(parse_number_list(config.spacings)), reverse=True)
    if len(spacings) < MIN_SPACINGS:
        raise ConfigError(f"the extrapolation needs at least {MIN_SPACINGS} spacings")
    if not 0 < config.max_length < config.length:
        raise ConfigError("--max-length must lie strictly between 0 and --length")
    plans = []
    for spacing in spacings:
        top = round(config.max_length / spacing)
        if not math.isclose(top * spacing, config.max_length, rel_tol=1e-9):
            raise ConfigError(f"max length {config.max_length} is not a multiple of {spacing}")
        plans.append(make_plan(config, spacing, default_regions=lambda spec, top=top: range(1, top + 1)))
    for plan in plans:
        if not plan.state.is_gaussian:
            raise ConfigError("central-charge fits need a Gaussian state")

    def work(plan):
        model = StateModel(plan.spec, plan.state)
        model.prepare(plan.kinds)
        out = []
        for kind in plan.kinds:
            for r in plan.orders:
                records = [model.record(kind, m, r) for m in plan.regions]
                values = [rec.wehrl_offset_subtracted if kind is DistributionKind.HUSIMI
                          else rec.subtracted for rec in records]
                result = fit_log_area_law([rec.length for rec in records], values, plan.spec.spacing)
                out.append((kind, r, result))
        return out

    return plans, _dispatch(work, plans, config.threads)


def cmd_central_charge(config: RunConfig) -> str:
    plans, per_spacing = central_charge_rows(config)
    rows = []
    for plan, fits in zip(plans, per_spacing):
        rows += [[plan.spec.spacing, plan.spec.n_sites, kind.value, r, res["a"], res["b"], res.n_points]
                 for kind, r, res in fits]
    footer = []
    for index, (kind, r, _) in enumerate(per_spacing[0]):
        spacings = [plan.spec.spacing for plan in plans]
        prefactors = [fits[index][2]["a"] for fits in per_spacing]
        result = fit_continuum_extrapolation(spacings, prefactors)
        footer.append(f"continuum kind={kind.value} r={fmt(r)} {_params(result)} rss={fmt(result.rss)}")
    return render_csv("central-charge", config, CC_HEADER, rows, footer)


# entry point ----------------------------------------------------------------------

COMMANDS = {"scan": cmd_scan, "mutual-info": cmd_mutual_info, "central-charge": cmd_central_charge}


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    lattice = parser.add_argument_group("lattice and state")
    lattice.add_argument("--sites", type=int, help="number of lattice sites N")
    lattice.add_argument("--length", type=float, help="physical chain length L (sites = L/spacing)")
    lattice.add_argument("--spacing", type=float, help="lattice spacing (default 1)")
    lattice.add_argument("--mass", type=float, help="field mass (default 1)")
    lattice.add_argument("--state", choices=["ground", "thermal", "particle", "vacuum"])
    lattice.add_argument("--temperature", type=float, help="temperature of a thermal state")
    lattice.add_argument("--momentum", help="particle momentum index, or 'edge' for the zone edge")
    scan = parser.add_argument_group("scan")
    scan.add_argument("--kinds", help="comma list of wigner,field,momentum,husimi or 'all'")
    scan.add_argument("--orders", help="comma list of Renyi orders (default 2)")
    scan.add_argument("--regions", help="region sizes M, e.g. '1,5,10' or '2:100:2' (inclusive)")
    scan.add_argument("--spacings", help="central-charge: comma list of spacings, fractions allowed")
    scan.add_argument("--max-length", dest="max_length", type=float,
                      help="central-charge: largest region length fitted")
    scan.add_argument("--oracle", action="store_const", const=True,
                      help="cross-check small regions against quadrature")
    io = parser.add_argument_group("execution")
    io.add_argument("--config", help="key=value file; flags override it")
    io.add_argument("--output", help="CSV path (default: standard output)")
    io.add_argument("--threads", type=int, help="worker threads (output does not depend on it)")
    io.add_argument("--timing", action="store_const", const=True,
                    help="fill the runtime_ms column (makes output non-reproducible)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arealaw", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "scan": "subtracted entropies over region sizes",
        "mutual-info": "mutual information between a region and its complement",
        "central-charge": "area-law prefactors over spacings and their continuum limit",
    }
    for name, text in helps.items():
        _add_run_options(sub.add_parser(name, help=text, description=text))
    sub.add_parser("verify", help="run the oracle suite and print a pass/fail table")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        results = run_oracle_suite()
        print(format_table(results))
        return 0 if all(r.passed for r in results) else 1
    try:
        config = build_config(args)
        text = COMMANDS[args.command](config)
    except (ConfigError, ArealawError, ValueError) as exc:
        print(f"arealaw {args.command}: error: {exc}", file=sys.stderr)
        return 2
    emit(text, config.output)
    return 0
