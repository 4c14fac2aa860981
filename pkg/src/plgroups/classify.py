"""Classification tables and the per-row verification pipeline.

Each table row names a bialgebra, a bracket family and the family parameters
as expressions in the symbols ``lam, omega, alpha, beta, rho, mu``.
:func:`verify_entry` instantiates a row and runs every check that applies.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field

import numpy as np

from .algebra import DomainError
from .bialgebra import (
    PreconditionError,
    UsageError,
    co_jacobi_check,
    coboundary_map,
    cocommutator_of,
    cocycle_check,
    gomez_basis,
    linearize,
    mcybe_check,
    mcybe_status,
    r_matrix,
    sample_upper,
    sklyanin_basis,
    bivector_samples,
    structure_constants_in_basis,
    to_basis,
)
from .families import BracketFamily, ParameterError, applicable_branches, get_family
from .group import GroupSpec, get_group
from .poisson import bivector_eval, casimir_batch, casimir_points, jacobiator_batch, multiplicativity_batch


class SymbolError(ValueError):
    """Symbol values violate the table's assumptions."""


SYMBOLS = ("lam", "omega", "alpha", "beta", "rho", "mu")
DEFAULT_SYMBOLS = {"lam": 1.0, "omega": 1.0, "alpha": 1.0, "beta": 1.0, "rho": 0.5, "mu": 1.0}
NA = None  # "·": parameter not present in the family


def _check_symbols(s: dict) -> None:
    for k in ("lam", "omega", "alpha", "beta"):
        if s[k] == 0:
            raise SymbolError(f"{k} must be nonzero")
    if not -1.0 <= s["rho"] <= 1.0:
        raise SymbolError(f"rho must satisfy -1 <= rho <= 1, got {s['rho']}")
    if s["mu"] < 0:
        raise SymbolError(f"mu must be >= 0, got {s['mu']}")


@dataclass(frozen=True)
class ClassEntry:
    gid: str
    row: str
    coboundary: bool
    family: int
    assignments: tuple  # ((param, expression or None), ...)
    table: int
    notes: tuple = ()

    @property
    def id(self) -> str:
        return f"{self.gid}:{self.row}"

    @property
    def symbols(self) -> tuple:
        used = set()
        for _, expr in self.assignments:
            if expr is not None:
                used |= {s for s in SYMBOLS if s in _names(expr)}
        return tuple(s for s in SYMBOLS if s in used)

    @property
    def uses_omega(self) -> bool:
        return "omega" in self.symbols


def _names(expr: str) -> set:
    return set(compile(expr, "<entry>", "eval").co_names)


def _eval(expr: str, symbols: dict) -> float:
    unknown = _names(expr) - set(SYMBOLS) - {"sqrt"}
    if unknown:
        raise SymbolError(f"unknown names {sorted(unknown)} in {expr!r}")
    env = dict(symbols, sqrt=math.sqrt)
    return float(eval(expr, {"__builtins__": {}}, env))  # restricted namespace, table literals only


def _row(table, gid, row, cob, fam, names, values, notes=()):
    return ClassEntry(gid, row, cob, fam, tuple(zip(names, values)), table, tuple(notes))


_A3_3_NOTE = "parameter a is 0 in every row; it is equivalent to d under the automorphism Y <-> Z"
_P3 = ("a", "b", "c")
_P4 = ("a", "b", "c", "d")
_P6 = ("a", "b", "c", "d", "e", "f")

TABLES = (
    # Table 1: A3_2
    _row(1, "A3_2", "12", True, 1, _P3, ("0", "0", "-omega")),
    _row(1, "A3_2", "(8)", True, 1, _P3, ("1", "0", "0")),
    _row(1, "A3_2", "13", False, 1, _P3, ("0", "lam", "0")),
    _row(1, "A3_2", "14", False, 1, _P3, ("0", "lam", "-omega")),
    # Table 2: A3_1
    _row(2, "A3_1", "(5-5′)", False, 2, _P4, ("-rho", "0", "0", "-1"),
         ("coboundary only at rho = 1 (a = d)",)),
    _row(2, "A3_1", "(12)", False, 2, _P4, ("-1", "0", "1", "-1")),
    _row(2, "A3_1", "(15)", False, 2, _P4, ("-mu", "1", "1", "-mu")),
    _row(2, "A3_1", "17", False, 2, _P4, ("0", "0", "1", "0")),
    _row(2, "A3_1", "(13)", False, 3, _P4, ("-1", "0", "lam", NA)),
    _row(2, "A3_1", "(10)", False, 3, _P4, ("-1", "0", "0", NA)),
    # Table 3: A3_3
    _row(3, "A3_3", "5 (ρ=1)", True, 1, _P6, ("0", "0", "0", "0", "0", "-1"), (_A3_3_NOTE,)),
    _row(3, "A3_3", "6 (ρ=1, χ=𝔢₀∧𝔢₁)", True, 1, _P6, ("0", "0", "0", "-1", "0", "0"), (_A3_3_NOTE,)),
    _row(3, "A3_3", "7 (ρ=1)", False, 1, _P6, ("0", "lam", "0", "0", "0", "0"), (_A3_3_NOTE,)),
    _row(3, "A3_3", "(1)", False, 1, _P6, ("0", "lam", "0", "0", "0", "-alpha"), (_A3_3_NOTE,)),
    _row(3, "A3_3", "(2)", False, 1, _P6, ("0", "0", "lam/2", "0", "lam/2", "-omega"), (_A3_3_NOTE,)),
    _row(3, "A3_3", "9", False, 1, _P6, ("0", "0", "lam/2", "0", "lam/2", "0"), (_A3_3_NOTE,)),
    _row(3, "A3_3", "10", False, 1, _P6, ("0", "0", "-1/2", "0", "0", "0"), (_A3_3_NOTE,)),
    _row(3, "A3_3", "11", False, 1, _P6, ("0", "0", "-1/2", "0", "0", "-omega"), (_A3_3_NOTE,)),
    _row(3, "A3_3", "(3)", False, 1, _P6, ("0", "0", "-1/2", "-alpha", "0", "0"), (_A3_3_NOTE,)),
    # Table 4: A3_4
    _row(4, "A3_4", "6 (ρ=-1, χ=𝔢₀∧𝔢₁)", True, 1, _P3, ("0", "0", "1")),
    _row(4, "A3_4", "7 (ρ=-1)", False, 1, _P3, ("-lam", "0", "0")),
    _row(4, "A3_4", "(11)", True, 1, _P3, ("0", "-alpha*beta", "alpha")),
    _row(4, "A3_4", "5′", False, 2, _P3, ("0", "0", "1")),
    _row(4, "A3_4", "8", False, 2, _P3, ("-alpha", "0", "1")),
    _row(4, "A3_4", "(14)", False, 2, _P3, ("alpha*lam", "-alpha", "1")),
    # Table 5: A3_5
    _row(5, "A3_5", "5", True, 2, _P3, ("0", "-rho", NA)),
    _row(5, "A3_5", "6 (χ=𝔢₀∧𝔢₁)", True, 2, _P3, ("1", "0", NA)),
    _row(5, "A3_5", "7", False, 1, _P3, ("lam*rho", "0", "0")),
    # Table 6: A3_6
    _row(6, "A3_6", "(9)", False, 1, _P3, ("0", "0", "-lam")),
    _row(6, "A3_6", "15′", False, 2, _P3, ("0", "0", "-omega")),
    _row(6, "A3_6", "(11′)", True, 1, _P3, ("-1", "0", "0")),
    _row(6, "A3_6", "(14′)", False, 2, _P3, ("-alpha", "0", "-lam")),
    # Table 7: A3_7
    _row(7, "A3_7", "15", True, 1, _P3, ("-omega", "0", "0")),
    _row(7, "A3_7", "16", False, 2, _P3, ("-lam", NA, NA)),
    # Table 8: A3_8
    _row(8, "A3_8", "1", True, 1, _P3, ("0", "lam/2", "0")),
    _row(8, "A3_8", "2", True, 1, _P3, ("0", "0", "sqrt(2)*lam/4")),
    _row(8, "A3_8", "3", True, 1, _P3, ("sqrt(2)*lam/4", "0", "0")),
    # Table 9: A3_9 (printed without the coboundary mark; every structure on a simple algebra is one)
    _row(9, "A3_9", "4", True, 1, _P3, ("lam", "0", "0"), ("coboundary: the algebra is simple",)),
)


def entries(gid: str | None = None) -> tuple:
    return tuple(e for e in TABLES if gid is None or e.gid == gid)


def _normalise(s: str) -> str:
    return s.replace("′", "'").replace(" ", "")


def find_entry(gid: str, key: str) -> ClassEntry:
    """Row of ``gid`` by printed id, ASCII spelling (``'`` for ``′``) or leading token.

    The outer parentheses of a printed id may be dropped: ``5-5'`` finds ``(5-5′)``.
    """
    rows = entries(gid)
    for test in (lambda e: e.row == key,
                 lambda e: _normalise(e.row) == _normalise(key),
                 lambda e: _normalise(e.row.split(" (")[0]) == _normalise(key),
                 lambda e: _normalise(e.row.split(" (")[0]).strip("()") == _normalise(key).strip("()")):
        hits = [e for e in rows if test(e)]
        if len(hits) == 1:
            return hits[0]
        if len(hits) > 1:
            raise UsageError(f"entry {key!r} is ambiguous in {gid}")
    raise UsageError(f"{gid} has no table row {key!r}; rows: {[e.row for e in rows]}")


def resolve_symbols(overrides: dict | None = None) -> dict:
    s = dict(DEFAULT_SYMBOLS)
    for k, v in (overrides or {}).items():
        if k not in s:
            raise SymbolError(f"unknown symbol {k!r}")
        s[k] = float(v)
    _check_symbols(s)
    return s


def entry_group(entry: ClassEntry, symbols: dict | None = None) -> GroupSpec:
    """Group of a row; rho and mu feed the algebra for A3_5 and A3_7."""
    s = resolve_symbols(symbols)
    try:
        return get_group(entry.gid, rho=s["rho"], mu=s["mu"])
    except (DomainError, ValueError) as exc:
        raise SymbolError(str(exc)) from exc


def instantiate(entry: ClassEntry, symbols: dict | None = None) -> tuple[BracketFamily, dict]:
    """Family and concrete parameters of a row. Raises :class:`SymbolError` on bad symbols."""
    s = resolve_symbols(symbols)
    fam = get_family(entry.gid, entry.family)
    params = {}
    for name, expr in entry.assignments:
        if expr is None:
            continue
        params[name] = _eval(expr, s)
    g = entry_group(entry, s)
    try:
        fam.check(params, g.params)
    except ParameterError as exc:
        raise SymbolError(str(exc)) from exc
    return fam, params


# ---------------------------------------------------------------- reports


TOLERANCES = {
    "identity": 1e-12,
    "jacobi": 1e-9,
    "multiplicativity": 1e-9,
    "casimir": 1e-8,
    "cocycle": 1e-10,
    "co_jacobi": 1e-10,
    "cocycle_gomez": 1e-10,
    "mcybe": 1e-12,
    "coboundary": 1e-10,
    "best_fit_r": 1e-2,
}

SAMPLES = {"jacobi": 200, "multiplicativity": 200, "casimir": 100, "coboundary": 50}


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float
    samples: int
    # "max": pass iff residual <= tolerance; "min": pass iff residual >= tolerance
    kind: str = "max"

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.residual):
            return False
        return self.residual <= self.tolerance if self.kind == "max" else self.residual >= self.tolerance

    def to_dict(self) -> dict:
        return {"name": self.name, "residual": float(self.residual), "tolerance": float(self.tolerance),
                "samples": int(self.samples), "pass": bool(self.passed)}


@dataclass
class VerificationReport:
    gid: str
    entry_id: str
    seed: int
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"id": self.entry_id, "seed": self.seed, "checks": [c.to_dict() for c in self.checks],
                "notes": list(self.notes), "pass": self.passed}


def row_seed(seed: int, entry_id: str) -> int:
    """Per-row seed from the master seed and the row id (stable across processes)."""
    return (int(seed) * 1_000_003 + zlib.crc32(entry_id.encode("utf-8"))) % (2**32)


# ---------------------------------------------------------------- individual checks


def _rel(res, scale) -> float:
    if np.size(res) == 0:
        return float("inf")
    return float(np.max(np.asarray(res) / (1.0 + np.asarray(scale))))


def check_identity(g: GroupSpec, fam: BracketFamily, p: dict) -> float:
    return float(np.abs(bivector_eval(fam, p, g.identity_upper(), g)).max())


def check_jacobi(g: GroupSpec, fam: BracketFamily, p: dict, rng: np.random.Generator, n: int) -> float:
    res, scale = jacobiator_batch(g, fam, p, g.sample_local(rng, n))
    return _rel(res, scale)


def check_multiplicativity(g: GroupSpec, fam: BracketFamily, p: dict, rng: np.random.Generator, n: int) -> float:
    res, scale = multiplicativity_batch(g, fam, p, g.sample_local(rng, n), g.sample_local(rng, n))
    return _rel(res, scale)


def check_casimir(g: GroupSpec, branch, p: dict, rng: np.random.Generator, n: int) -> tuple[float, int]:
    u = casimir_points(g, branch, p, rng, n)
    res, scale = casimir_batch(g, branch, p, u)
    return _rel(res, scale), u.shape[1]


def relative_discrepancy(S: np.ndarray, P: np.ndarray) -> float:
    """``max|S - P| / max|P|`` (absolute when the family bracket vanishes)."""
    d = float(np.abs(S - P).max())
    scale = float(np.abs(P).max())
    return d / scale if scale > 0 else d


@dataclass
class BestFit:
    residual: float
    r: tuple
    candidates: int
    unconstrained: float


def best_fit_r(g: GroupSpec, fam: BracketFamily, p: dict, rng: np.random.Generator, n_points: int = 50,
               grid: int = 11, box: float = 2.0, steps: int = 50) -> BestFit:
    """Smallest Sklyanin-vs-family discrepancy over r solving the mCYBE.

    A ``grid``^3 scan of ``[-box, box]^3`` restricted to mCYBE solutions is
    followed by ``steps`` rounds of compass search that only visits solutions.
    ``unconstrained`` is the relative 2-norm residual of the least-squares r
    over all of r-space, a lower bound for any r in that norm.
    """
    U = sample_upper(g, rng, n_points)
    Sb = sklyanin_basis(g, U)  # (3, n, n, N), linear in (r12, r13, r23)
    P = bivector_samples(g, fam, p, U)

    def disc(r):
        return relative_discrepancy(np.einsum("k,kabN->abN", r, Sb), P)

    def ok(r):
        return mcybe_status(r_matrix(*r), g.sc) == "pass"

    axis = np.linspace(-box, box, grid)
    best, best_r, count = np.inf, np.zeros(3), 0
    for r in np.array(np.meshgrid(axis, axis, axis, indexing="ij")).reshape(3, -1).T:
        if not ok(r):
            continue
        count += 1
        d = disc(r)
        if d < best:
            best, best_r = d, r
    step = (axis[1] - axis[0]) / 2
    for _ in range(steps):
        moved = False
        for k in range(3):
            for sgn in (1.0, -1.0):
                r = best_r.copy()
                r[k] += sgn * step
                if ok(r):
                    d = disc(r)
                    if d < best:
                        best, best_r, moved = d, r, True
        if not moved:
            step /= 2
    A = Sb.reshape(3, -1).T
    b = P.reshape(-1)
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    nb = np.linalg.norm(b)
    lower = float(np.linalg.norm(A @ x - b) / nb) if nb > 0 else 0.0
    return BestFit(float(best), tuple(float(v) for v in best_r), count, lower)


def _linearisation_checks(g: GroupSpec, fam, p, swap12: bool, suffix: str) -> list:
    f = linearize(fam, p, g)
    delta = cocommutator_of(f)
    B = gomez_basis(g.gid, swap12=swap12)
    return [
        Check("cocycle" + suffix, cocycle_check(delta, g.sc), TOLERANCES["cocycle"], 1),
        Check("co_jacobi" + suffix, co_jacobi_check(delta), TOLERANCES["co_jacobi"], 1),
        Check("cocycle_gomez" + suffix,
              cocycle_check(to_basis(delta, B), structure_constants_in_basis(g.sc, B)),
              TOLERANCES["cocycle_gomez"], 1),
    ]


def _coboundary_checks(g, fam, p, rng, n, suffix) -> tuple[list, list]:
    notes = []
    cmap = coboundary_map(g.gid, fam.index)
    R = cmap.r_from_params(p, g.params) if cmap else None
    if R is None:
        notes.append(f"no r identification for {fam.name} at {p}")
        return [Check("coboundary" + suffix, np.inf, TOLERANCES["coboundary"], 0)], notes
    checks = [Check("mcybe" + suffix, mcybe_check(R, g.sc), TOLERANCES["mcybe"], 1)]
    try:
        U = sample_upper(g, rng, n)
        S = np.einsum("k,kabN->abN", np.array([R[0, 1], R[0, 2], R[1, 2]]), sklyanin_basis(g, U))
        d = relative_discrepancy(S, bivector_samples(g, fam, p, U))
    except (PreconditionError, UsageError) as exc:
        notes.append(str(exc))
        d = np.inf
    checks.append(Check("coboundary" + suffix, d, TOLERANCES["coboundary"], n))
    return checks, notes


def verify_instance(entry: ClassEntry, symbols: dict, rng: np.random.Generator, samples: dict,
                    tolerances: dict, coboundary: bool, swap12: bool = False, suffix: str = "") -> tuple[list, list]:
    g = entry_group(entry, symbols)
    fam, p = instantiate(entry, symbols)
    checks, notes = [], []
    checks.append(Check("identity" + suffix, check_identity(g, fam, p), tolerances["identity"], 1))
    checks.append(Check("jacobi" + suffix, check_jacobi(g, fam, p, rng, samples["jacobi"]),
                        tolerances["jacobi"], samples["jacobi"]))
    checks.append(Check("multiplicativity" + suffix,
                        check_multiplicativity(g, fam, p, rng, samples["multiplicativity"]),
                        tolerances["multiplicativity"], samples["multiplicativity"]))
    branches = applicable_branches(g.gid, fam.index, p, g.params)
    if not branches:
        notes.append(f"no Casimir on file for {fam.name} at {p}")
    for br in branches:
        res, n = check_casimir(g, br, p, rng, samples["casimir"])
        checks.append(Check(f"casimir[{br.label}]" + suffix, res, tolerances["casimir"], n))
    for c in _linearisation_checks(g, fam, p, swap12, suffix):
        c.tolerance = tolerances[c.name[: len(c.name) - len(suffix)] if suffix else c.name]
        checks.append(c)
    if coboundary:
        cb, cn = _coboundary_checks(g, fam, p, rng, samples["coboundary"], suffix)
        for c in cb:
            c.tolerance = tolerances[c.name[: len(c.name) - len(suffix)] if suffix else c.name]
        checks += cb
        notes += cn
    else:
        fit = best_fit_r(g, fam, p, rng, samples["coboundary"])
        checks.append(Check("best_fit_r" + suffix, fit.residual, tolerances["best_fit_r"],
                            samples["coboundary"], kind="min"))
        notes.append(f"best-fit r{suffix} = {tuple(round(v, 6) for v in fit.r)} over {fit.candidates} mCYBE grid "
                     f"points; unconstrained least squares leaves {fit.unconstrained:.3e} (relative 2-norm)")
    return checks, notes


def verify_entry(entry: ClassEntry, seed: int = 0, symbols: dict | None = None, samples: dict | None = None,
                 tolerances: dict | None = None, coboundary: bool | None = None,
                 swap12: bool = False) -> VerificationReport:
    """Run every applicable check on one table row.

    Rows whose parameters involve omega are checked at omega = +1 and -1
    (scaled by the magnitude of any omega override); check names carry the sign.
    ``coboundary`` overrides the row's printed flag.
    """
    samples = dict(SAMPLES, **(samples or {}))
    tolerances = dict(TOLERANCES, **(tolerances or {}))
    cob = entry.coboundary if coboundary is None else coboundary
    base = resolve_symbols(symbols)
    report = VerificationReport(entry.gid, entry.id, int(seed), notes=list(entry.notes))
    rng = np.random.default_rng(row_seed(seed, entry.id))
    variants = [("", base)]
    if entry.uses_omega:
        w = abs(base["omega"])
        variants = [("[omega=+1]", dict(base, omega=w)), ("[omega=-1]", dict(base, omega=-w))]
    for suffix, sym in variants:
        try:
            checks, notes = verify_instance(entry, sym, rng, samples, tolerances, cob, swap12, suffix)
        except SymbolError as exc:
            checks, notes = [Check("instantiate" + suffix, np.inf, 0.0, 0)], [str(exc)]
        report.checks += checks
        report.notes += notes
    return report


def full_suite(seed: int = 0, gid: str | None = None, **kwargs) -> list:
    """:func:`verify_entry` over every table row (optionally one group)."""
    return [verify_entry(e, seed, **kwargs) for e in entries(gid)]


__all__ = [
    "BestFit",
    "Check",
    "ClassEntry",
    "DEFAULT_SYMBOLS",
    "SAMPLES",
    "SymbolError",
    "TABLES",
    "TOLERANCES",
    "VerificationReport",
    "best_fit_r",
    "entries",
    "entry_group",
    "find_entry",
    "full_suite",
    "instantiate",
    "relative_discrepancy",
    "resolve_symbols",
    "row_seed",
    "verify_entry",
]
