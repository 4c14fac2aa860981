"""Command-line front end: ``list``, ``verify`` and ``derive``.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

from . import __version__
from .algebra import GROUP_IDS
from .bialgebra import UsageError
from .classify import SymbolError, TOLERANCES, entries, find_entry, instantiate, resolve_symbols, verify_entry
from .derive import FIT_TOL, derive_group, derive_report_dict
from .families import FAMILIES

MIN_SAMPLES = 10
PROJECTION_TOL = 1e-8
STABILITY_TOL = 1e-6


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass
class RunConfig:
    command: str = "verify"
    group: str | None = None
    family: int | None = None
    entry: str | None = None
    seed: int = 0
    samples: int | None = None
    tol: dict = field(default_factory=dict)
    symbols: dict = field(default_factory=dict)
    swap_gomez_12: bool = False
    out: str | None = None
    format: str = "json"

    def validate(self) -> None:
        if self.group is not None and self.group not in GROUP_IDS:
            raise ConfigError(f"unknown group {self.group!r}; expected one of {', '.join(GROUP_IDS)}")
        if self.family is not None:
            if self.group is None:
                raise ConfigError("--family needs --group")
            if self.family not in [f.index for f in FAMILIES[self.group]]:
                raise ConfigError(f"{self.group} has no family {self.family}")
        if self.entry is not None and self.group is None:
            raise ConfigError("--entry needs --group")
        if self.samples is not None and self.samples < MIN_SAMPLES:
            raise ConfigError(f"--samples must be >= {MIN_SAMPLES}")
        if self.format not in ("json", "text"):
            raise ConfigError(f"unknown format {self.format!r}")
        for k in self.tol:
            if k not in TOLERANCES:
                raise ConfigError(f"unknown tolerance {k!r}; expected one of {', '.join(TOLERANCES)}")
        try:
            resolve_symbols(self.symbols)
        except SymbolError as exc:
            raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------- parsing


def parse_pairs(text: str, what: str) -> dict:
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in item:
            raise ConfigError(f"{what}: expected key=value, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        out[k] = v
    return out


def parse_tol(text: str) -> dict:
    """``1e-8`` (every upper-bound check) or ``jacobi=1e-8,casimir=1e-7``."""
    try:
        if "=" not in text:
            v = float(text)
            return {k: v for k in TOLERANCES if k != "best_fit_r"}
        return {k: float(v) for k, v in parse_pairs(text, "--tol").items()}
    except ValueError as exc:
        raise ConfigError(f"bad --tol value {text!r}") from exc


def parse_symbols(text: str) -> tuple[dict, bool]:
    """Symbol overrides; ``swap12`` toggles the interchanged Gomez basis."""
    pairs = parse_pairs(text, "--symbols")
    swap = pairs.pop("swap12", "0").lower() in ("1", "true", "yes")
    try:
        return {k: float(v) for k, v in pairs.items()}, swap
    except ValueError as exc:
        raise ConfigError(f"bad --symbols value {text!r}") from exc


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


_KEYS = ("group", "family", "entry", "seed", "samples", "tol", "symbols", "out", "format")


def build_config(command: str, args: argparse.Namespace) -> RunConfig:
    raw = read_config_file(args.config) if getattr(args, "config", None) else {}
    unknown = set(raw) - set(_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    for k in _KEYS:
        v = getattr(args, k, None)
        if v is not None:
            raw[k] = v
    cfg = RunConfig(command=command)
    try:
        if "group" in raw:
            cfg.group = str(raw["group"])
        if "family" in raw:
            cfg.family = int(raw["family"])
        if "entry" in raw:
            cfg.entry = str(raw["entry"])
        if "seed" in raw:
            cfg.seed = int(raw["seed"])
        if "samples" in raw:
            cfg.samples = int(raw["samples"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if "tol" in raw:
        cfg.tol = parse_tol(str(raw["tol"]))
    if "symbols" in raw:
        cfg.symbols, cfg.swap_gomez_12 = parse_symbols(str(raw["symbols"]))
    if "out" in raw:
        cfg.out = str(raw["out"])
    if "format" in raw:
        cfg.format = str(raw["format"])
    cfg.validate()
    return cfg


# ---------------------------------------------------------------- serialization


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON with floats written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return dumps(obj.item(), indent, _level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _emit(cfg: RunConfig, payload: dict, text: str) -> None:
    body = dumps(payload) + "\n" if cfg.format == "json" else text
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)


# ---------------------------------------------------------------- commands


def cmd_list(cfg: RunConfig) -> int:
    gids = [cfg.group] if cfg.group else list(GROUP_IDS)
    groups = []
    lines = []
    for gid in gids:
        fams = [{"family": f.index, "parameters": list(f.param_names), "quadratic": f.quadratic}
                for f in FAMILIES[gid]]
        rows = [{"id": e.row, "family": e.family, "coboundary": e.coboundary,
                 "parameters": {k: v for k, v in e.assignments if v is not None}}
                for e in entries(gid)]
        groups.append({"group": gid, "families": fams, "table": rows})
        lines.append(f"{gid}: {len(fams)} families, {len(rows)} table rows")
        if cfg.group:
            for f in fams:
                lines.append(f"  family {f['family']}: ({', '.join(f['parameters'])})"
                             + ("" if f["quadratic"] else "  [not quadratic]"))
            for r in rows:
                lines.append(f"  row {r['id']}: family {r['family']}{'  (*)' if r['coboundary'] else ''}  "
                             + ", ".join(f"{k}={v}" for k, v in r["parameters"].items()))
    _emit(cfg, {"tool_version": __version__, "groups": groups}, "\n".join(lines) + "\n")
    return 0


def _selected_entries(cfg: RunConfig) -> list:
    if cfg.entry is not None:
        return [find_entry(cfg.group, cfg.entry)]
    rows = list(entries(cfg.group))
    if cfg.family is not None:
        rows = [e for e in rows if e.family == cfg.family]
    return rows


def cmd_verify(cfg: RunConfig) -> int:
    samples = None
    if cfg.samples is not None:
        samples = {k: cfg.samples for k in ("jacobi", "multiplicativity", "casimir", "coboundary")}
    selected = _selected_entries(cfg)
    for e in selected:
        # symbol errors are usage errors, reported before any work is done
        instantiate(e, cfg.symbols)
    reports = [verify_entry(e, cfg.seed, symbols=cfg.symbols, samples=samples, tolerances=cfg.tol,
                            swap12=cfg.swap_gomez_12)
               for e in selected]
    ok = all(r.passed for r in reports)
    payload = {
        "tool_version": __version__,
        "seed": cfg.seed,
        "group": cfg.group or "all",
        "entries": [r.to_dict() for r in reports],
        "pass": ok,
    }
    lines = []
    for r in reports:
        lines.append(f"{'PASS' if r.passed else 'FAIL'}  {r.entry_id}")
        for c in r.checks:
            op = "<=" if c.kind == "max" else ">="
            lines.append(f"    {'ok ' if c.passed else 'BAD'} {c.name:32s} {c.residual:.3e} {op} {c.tolerance:.0e}"
                         f"  (n={c.samples})")
        for n in r.notes:
            lines.append(f"    note: {n}")
    lines.append(f"{sum(r.passed for r in reports)}/{len(reports)} entries pass")
    _emit(cfg, payload, "\n".join(lines) + "\n")
    return 0 if ok else 1


def cmd_derive(cfg: RunConfig) -> int:
    gids = [cfg.group] if cfg.group else list(GROUP_IDS)
    out_entries, blocks, lines = [], [], []
    ok = True
    for gid in gids:
        rep = derive_group(gid, seed_value=cfg.seed)
        d = derive_report_dict(rep)
        checks = [{"name": "stability", "residual": rep.stability_angle, "tolerance": STABILITY_TOL,
                   "samples": rep.n_pairs, "pass": rep.stability_angle <= STABILITY_TOL}]
        for f in rep.families:
            if f.in_ansatz:
                checks.append({"name": f"projection[{f.family}]", "residual": f.projection_residual,
                               "tolerance": PROJECTION_TOL, "samples": rep.n_pairs,
                               "pass": f.projection_residual <= PROJECTION_TOL})
                checks.append({"name": f"jacobi[{f.family}]", "residual": f.jacobi_residual,
                               "tolerance": PROJECTION_TOL, "samples": rep.n_pairs,
                               "pass": f.jacobi_residual <= PROJECTION_TOL})
        passed = all(c["pass"] for c in checks)
        ok &= passed
        out_entries.append({"id": f"{gid}:derive", "checks": checks, "pass": passed})
        blocks.append(d)
        lines.append(f"{'PASS' if passed else 'FAIL'}  {gid}: {rep.n_monomials} monomials, "
                     f"multiplicativity nullspace dimension {rep.nullspace_dimension}, "
                     f"Jacobi-filtered dimension {rep.jacobi_dimension}")
        j = rep.jacobi
        lines.append(f"    Jacobi on full span: {'holds' if j.full_span_passes else 'fails'}"
                     + ("" if j.full_span_passes else f" ({j.n_quadratic_constraints} independent quadratic constraint(s))"))
        for f in rep.families:
            if f.in_ansatz:
                lines.append(f"    {f.family}: projection residual {f.projection_residual:.2e}, "
                             f"Jacobi residual {f.jacobi_residual:.2e}")
            else:
                lines.append(f"    {f.family}: {f.note} (fit residual {f.fit_residual:.2e} > {FIT_TOL:.0e})")
    payload = {"tool_version": __version__, "seed": cfg.seed, "group": cfg.group or "all",
               "entries": out_entries, "derive": blocks, "pass": ok}
    _emit(cfg, payload, "\n".join(lines) + "\n")
    return 0 if ok else 1


COMMANDS = {"list": cmd_list, "verify": cmd_verify, "derive": cmd_derive}


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plgroups", description="Poisson-Lie structures on 3D real Lie groups")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (("list", "list groups, families and table rows"),
                           ("verify", "verify table rows"),
                           ("derive", "re-derive the quadratic Ansatz numerically")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--group")
        s.add_argument("--format", choices=("json", "text"))
        s.add_argument("--out")
        s.add_argument("--config", help="flat key = value file; flags override it")
        if name != "list":
            s.add_argument("--seed", type=int)
        if name == "verify":
            s.add_argument("--family", type=int)
            s.add_argument("--entry")
            s.add_argument("--samples", type=int, help=f"points per check (>= {MIN_SAMPLES})")
            s.add_argument("--tol", help="a float, or name=value pairs")
            s.add_argument("--symbols", help="k=v,... over lam, omega, alpha, beta, rho, mu; swap12=1")
    return p


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args.command, args)
        if args.command == "list" and cfg.format == "json" and args.format is None and not args.config:
            cfg.format = "text"
        return COMMANDS[args.command](cfg)
    except (ConfigError, UsageError, SymbolError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
