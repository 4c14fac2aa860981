"""Closed-form Poisson-Lie bracket families and their Casimir functions.

Bivectors are written in upper coordinates and return ``{(a, b): expr}`` for
``a < b`` (0-based positions in ``chart.upper_names``); missing pairs vanish.
Every formula takes ``(U, p, gp)``: upper coordinates, family parameters and
group parameters (``rho``/``mu``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .jet import Jet


class ParameterError(ValueError):
    """Family parameters violate one of the family's constraint predicates."""


class BranchError(ValueError):
    """Casimir branch guard is false for the given parameters."""


@dataclass(frozen=True)
class BracketFamily:
    gid: str
    index: int
    param_names: tuple
    bivector: Callable
    # (description, predicate(p, gp)) pairs that valid parameters satisfy
    constraints: tuple = ()
    # parameters appearing in denominators; sampled with |value| >= 0.1
    denominators: tuple = ()
    # False when the printed bivector has a non-quadratic term
    quadratic: bool = True
    # False when the bivector is not linear in the parameters
    param_linear: bool = True

    @property
    def name(self) -> str:
        return f"{self.gid}/{self.index}"

    def check(self, p: dict, gp: dict) -> None:
        missing = set(self.param_names) - set(p)
        if missing:
            raise ParameterError(f"{self.name}: missing parameters {sorted(missing)}")
        for desc, pred in self.constraints:
            if not pred(p, gp):
                raise ParameterError(f"{self.name}: constraint {desc} violated by {p}")


@dataclass(frozen=True)
class CasimirBranch:
    gid: str
    family: int
    label: str
    guard_text: str
    guard: Callable
    func: Callable
    # sampler(rng, gp) -> params inside the guard
    sample: Callable
    # functions of (U, p, gp) that must stay away from zero
    singular: Callable = field(default=lambda U, p, gp: ())

    @property
    def name(self) -> str:
        return f"{self.gid}/{self.family}:{self.label}"


def _nz(name):
    return (f"{name} != 0", lambda p, gp: p[name] != 0)


# ---------------------------------------------------------------- A3_1


def _a31_1(U, p, gp):
    X, Y, Z = U
    a, b, c, d = p["a"], p["b"], p["c"], p["d"]
    return {
        (0, 1): a * X + b * Y,
        (0, 2): a / 2 * X * X + c * X + d * Y + b * Z,
        (1, 2): -a * a * d / b**2 * X - b / 2 * Y * Y - (2 * a * d - b * c) / b * Y - a * Z,
    }


def _a31_2(U, p, gp):
    X, Y, Z = U
    return {(0, 2): p["a"] * X + p["b"] * Y, (1, 2): p["c"] * X + p["d"] * Y}


def _a31_3(U, p, gp):
    X, Y, Z = U
    a, b, c = p["a"], p["b"], p["c"]
    return {(0, 1): a * X, (0, 2): a / 2 * X * X + b * X, (1, 2): -c * X + b * Y - a * Z}


# ---------------------------------------------------------------- A3_2 .. A3_5


def _a32_1(U, p, gp):
    X, Y, Z = U
    a, b, c = p["a"], p["b"], p["c"]
    return {(0, 2): -a * X * X + b * X * Y + a * X, (1, 2): c * (1 - X * X) + b / 2 * Y * Y + a * Y}


def _a33_1(U, p, gp):
    X, Y, Z = U
    a, b, c, d, e, f = (p[k] for k in "abcdef")
    return {
        (0, 1): a * (X * X - X) - b * X * Y - 2 * c * X * Z,
        (0, 2): d * (X * X - X) + 2 * e * X * Y + b * X * Z,
        (1, 2): f * (1 - X * X) + e * Y * Y + b * Y * Z - d * Y + c * Z * Z + a * Z,
    }


def _a34_1(U, p, gp):
    X, Y, Z = U
    a, b, c = p["a"], p["b"], p["c"]
    return {
        (0, 1): -a * X * Y + b * (X - 1),
        (0, 2): c * (X - X * X) - a * X * Z,
        (1, 2): a * Y * Z - c * Y - b * Z,
    }


def _a34_2(U, p, gp):
    X, Y, Z = U
    a, b, c = p["a"], p["b"], p["c"]
    return {(0, 1): a * (1 - X), (0, 2): b * (X * X - X), (1, 2): b * Y + a * Z + c * np.log(X)}


def _a35_1(U, p, gp):
    X, Y, Z = U
    a, b, c, r = p["a"], p["b"], p["c"], gp["rho"]
    return {
        (0, 1): -a * X * Y + b * X * (X**r - 1),
        (0, 2): c * (X - X * X) + a / r * X * Z,
        (1, 2): r * b * c / a * (1 - X ** (1 + r)) + a * Y * Z + r * c * Y + b * Z,
    }


def _a35_2(U, p, gp):
    X, Y, Z = U
    a, b, r = p["a"], p["b"], gp["rho"]
    return {(0, 2): a * (X - X * X), (1, 2): b * (1 - X ** (1 + r)) + r * a * Y}


def _a35_3(U, p, gp):
    X, Y, Z = U
    a, b, r = p["a"], p["b"], gp["rho"]
    return {(0, 1): a * X * (X**r - 1), (1, 2): b * (1 - X ** (1 + r)) + a * Z}


# ---------------------------------------------------------------- A3_6, A3_7


def rotation_angle(C, S):
    """The angle with (cos, sin) proportional to (C, S).

    On ``S > 0`` and ``C**2 + S**2 == 1`` this is ``arccos(C)``; unlike
    ``arccos(C)`` it is smooth through the identity.
    """
    return np.arctan2(S, C)


def _a36_common(U, a, b):
    C, S, Y, Z = U
    return {
        (0, 2): a * (1 - C * C) + b * S * (1 - C),
        (0, 3): a * S * (1 - C) + b * (C * C - 1),
        (1, 2): -a * C * S + b * (C * C - C),
        (1, 3): a * (C * C - C) + b * C * S,
    }


def _a36_1(U, p, gp):
    C, S, Y, Z = U
    a, b, c = p["a"], p["b"], p["c"]
    out = _a36_common(U, a, b)
    out[(0, 2)] = out[(0, 2)] - c * S * Y
    out[(0, 3)] = out[(0, 3)] - c * S * Z
    out[(1, 2)] = out[(1, 2)] + c * C * Y
    out[(1, 3)] = out[(1, 3)] + c * C * Z
    out[(2, 3)] = a * Z + b * Y - c / 2 * (Y * Y + Z * Z)
    return out


def _a36_2(U, p, gp):
    C, S, Y, Z = U
    a, b, c = p["a"], p["b"], p["c"]
    out = _a36_common(U, a, b)
    out[(2, 3)] = a * Z + b * Y + c * rotation_angle(C, S)
    return out


def _a37_1(U, p, gp):
    C, S, Y, Z = U
    a, b, c, m = p["a"], p["b"], p["c"], gp["mu"]
    k1 = (c * c * (1 + m * m) * (-Y + m * Z) + b * (-2 * a * S + b * (-Y + m * Z))
          + 2 * c * (a * (-1 + C + m * S) + b * m * (Y - m * Z)))
    k2 = (b * b * (m * Y + Z) - 2 * b * (a * (C - 1) + c * m * (m * Y + Z))
          + c * (2 * a * m * (C - 1) - 2 * a * S + c * (1 + m * m) * (m * Y + Z)))
    u = m * C + S
    v = C - m * S
    yz = -(1 / (4 * a)) * (
        -4 * a * a * (C * C + S * S - 1)
        + 4 * a * ((c + m * b - c * m * m) * Y + (b - 2 * c * m) * Z)
        + (1 + m * m) * (c * c + (b - c * m) ** 2) * (Y * Y + Z * Z)
    )
    return {
        (0, 2): u / (2 * a) * k1,
        (0, 3): -u / (2 * a) * k2,
        (1, 2): -v / (2 * a) * k1,
        (1, 3): v / (2 * a) * k2,
        (2, 3): yz,
    }


def _a37_2(U, p, gp):
    C, S, Y, Z = U
    a, m = p["a"], gp["mu"]
    return {
        (0, 2): a * (Y - m * Z) * (m * C + S) / m,
        (0, 3): a * (m * Y + Z) * (m * C + S) / m,
        (1, 2): -a * (Y - m * Z) * (C - m * S) / m,
        (1, 3): -a * (m * Y + Z) * (C - m * S) / m,
        # printed with the opposite sign, which breaks multiplicativity
        (2, 3): a * (m * m + 1) * (Y * Y + Z * Z) / (2 * m),
    }


# ---------------------------------------------------------------- A3_8, A3_9


def _a38_1(U, p, gp):
    X, Y, Z, W = U
    a, b, c = p["a"], p["b"], p["c"]
    return {
        (0, 1): -a * X * X + b * X * Y + c * (1 - Y * Y),
        (0, 2): -(a * X + c * Z) * (Y + W),
        (0, 3): -a * X * X - b * X * W + c * (1 - W * W),
        (1, 2): a * (1 - Y * Y) - b * Y * Z - c * Z * Z,
        (1, 3): 2 * b * (1 - W * Y) + (c * Z - a * X) * (Y - W),
        (2, 3): a * (W * W - 1) - b * Z * W + c * Z * Z,
    }


def _a39_1(U, p, gp):
    x, y, z = U
    a, b, c = p["a"], p["b"], p["c"]
    cy = np.cos(y)
    return {
        (0, 1): (a * np.sin(y) + b * np.sin(x) * cy + c * np.cos(x) * cy - c) / cy,
        (0, 2): (a * np.sin(z) + b * np.cos(x) - b * np.cos(z) - c * np.sin(x)) / cy,
        (1, 2): -(a * np.cos(z) * cy + b * np.sin(z) * cy - a + c * np.sin(y)) / cy,
    }


FAMILIES = {
    "A3_1": (
        BracketFamily("A3_1", 1, ("a", "b", "c", "d"), _a31_1, (_nz("b"),), ("b",),
                      param_linear=False),
        BracketFamily("A3_1", 2, ("a", "b", "c", "d"), _a31_2),
        BracketFamily("A3_1", 3, ("a", "b", "c"), _a31_3, (_nz("a"),)),
    ),
    "A3_2": (BracketFamily("A3_2", 1, ("a", "b", "c"), _a32_1),),
    "A3_3": (BracketFamily("A3_3", 1, ("a", "b", "c", "d", "e", "f"), _a33_1),),
    "A3_4": (
        BracketFamily("A3_4", 1, ("a", "b", "c"), _a34_1),
        BracketFamily("A3_4", 2, ("a", "b", "c"), _a34_2, (_nz("c"),), quadratic=False),
    ),
    "A3_5": (
        BracketFamily("A3_5", 1, ("a", "b", "c"), _a35_1, (_nz("a"),), ("a",),
                      param_linear=False),
        BracketFamily("A3_5", 2, ("a", "b"), _a35_2),
        BracketFamily("A3_5", 3, ("a", "b"), _a35_3, (_nz("a"),)),
    ),
    "A3_6": (
        BracketFamily("A3_6", 1, ("a", "b", "c"), _a36_1),
        BracketFamily("A3_6", 2, ("a", "b", "c"), _a36_2, (_nz("c"),), quadratic=False),
    ),
    "A3_7": (
        BracketFamily("A3_7", 1, ("a", "b", "c"), _a37_1, (_nz("a"),), ("a",),
                      param_linear=False),
        BracketFamily("A3_7", 2, ("a",), _a37_2),
    ),
    "A3_8": (BracketFamily("A3_8", 1, ("a", "b", "c"), _a38_1),),
    "A3_9": (BracketFamily("A3_9", 1, ("a", "b", "c"), _a39_1),),
}


def get_family(gid: str, index: int) -> BracketFamily:
    for fam in FAMILIES[gid]:
        if fam.index == index:
            return fam
    raise KeyError(f"{gid} has no bracket family {index}")


def sample_params(fam: BracketFamily, rng: np.random.Generator, gp: dict, box=2.0) -> dict:
    """Uniform draw in ``[-box, box]`` rejecting constraint violations and small denominators."""
    while True:
        p = {k: float(rng.uniform(-box, box)) for k in fam.param_names}
        if any(abs(p[k]) < 0.1 for k in fam.denominators):
            continue
        if all(pred(p, gp) for _, pred in fam.constraints):
            return p


# ---------------------------------------------------------------- Casimirs
#
# Casimirs are evaluated in complex arithmetic: several printed expressions
# take real powers or logarithms of quantities that change sign, and only the
# differential dC matters.


def _draw(rng, names, box=2.0, away=0.1):
    out = {}
    for k in names:
        v = 0.0
        while abs(v) < away:
            v = float(rng.uniform(-box, box))
        out[k] = v
    return out


def _c_a31_1(U, p, gp):
    X, Y, Z = U
    a, b, c, d = p["a"], p["b"], p["c"], p["d"]
    s = a * X + b * Y
    return (2 * (b * c - a * d) * X + b * b * (2 * Z - X * Y) - 2 * d * s * np.log(s)) / s


def _disc(p):
    return (p["a"] - p["d"]) ** 2 + 4 * p["b"] * p["c"]


def _c_a31_2_pos(U, p, gp):
    X, Y, Z = U
    a, c, d = p["a"], p["c"], p["d"]
    al = np.sqrt(_disc(p))
    ratio = ((al + a - d) * Y - 2 * c * X) / ((al - a + d) * Y + 2 * c * X)
    quad = (0.5 * (a - d) * Y - c * X) ** 2 - al * al / 4 * Y * Y
    return ratio ** (a + d) * quad**al


def _c_a31_2_neg(U, p, gp):
    X, Y, Z = U
    a, c, d = p["a"], p["c"], p["d"]
    al = np.sqrt(-_disc(p))
    return (a + d) * np.arctan((2 * c * X - (a - d) * Y) / (al * Y)) + 0.5 * al * np.log(
        al * al / 4 * Y * Y + ((a - d) / 2 * Y - c * X) ** 2)


def _c_a31_2_deg(U, p, gp):
    X, Y, Z = U
    a, c, d = p["a"], p["c"], p["d"]
    return np.exp(2 * (a + d) * c * X / ((a - d) * ((d - a) * Y + 2 * c * X))) / (
        2 * c * X + (d - a) * Y)


def _c_a31_2_c0(U, p, gp):
    # the disc > 0 formula is identically degenerate at c = 0
    X, Y, Z = U
    a, b, d = p["a"], p["b"], p["d"]
    return d * np.log((a - d) * X + b * Y) - a * np.log(Y)


def _sample_a31_c0(rng, gp):
    while True:
        p = dict(_draw(rng, "abd"), c=0.0)
        if abs(p["a"] - p["d"]) > 0.1:
            return p


def _sample_a31_pos(rng, gp):
    while True:
        p = _draw(rng, "abcd")
        if _disc(p) > 1e-6:
            return p


def _sample_a31_neg(rng, gp):
    while True:
        p = _draw(rng, "abcd")
        if _disc(p) < -1e-6:
            return p


def _sample_a31_deg(rng, gp):
    while True:
        p = _draw(rng, "acd")
        if abs(p["a"] - p["d"]) > 0.1:
            p["b"] = -(p["a"] - p["d"]) ** 2 / (4 * p["c"])
            return p


def _sample_fixed(names_free, fixed):
    def sample(rng, gp):
        p = _draw(rng, names_free)
        for k, v in fixed.items():
            p[k] = v(p) if callable(v) else v
        return p

    return sample


def _c_a31_3_c(U, p, gp):
    X, Y, Z = U
    a, b, c = p["a"], p["b"], p["c"]
    return X * np.exp((2 * b * Y + a * (X * Y - 2 * Z)) / (2 * c * X))


def _c_a31_3_0(U, p, gp):
    X, Y, Z = U
    a, b = p["a"], p["b"]
    return (2 * b * Y + a * (X * Y - 2 * Z)) / X


def _c_a32(U, p, gp):
    X, Y, Z = U
    a, b, c = p["a"], p["b"], p["c"]
    return (2 * c * (1 + X * X) + Y * (-2 * a * (-1 + X) + b * Y)) / X


def _c_a33(U, p, gp):
    X, Y, Z = U
    a, b, c, d, e, f = (p[k] for k in "abcdef")
    return (f * (1 + X * X) + d * (-1 + X) * Y + e * Y * Y + a * Z * (1 - X) + Z * (b * Y + c * Z)) / X


def _c_a34_1a(U, p, gp):
    X, Y, Z = U
    a, b, c = p["a"], p["b"], p["c"]
    return (c * (X - 1) + a * Z) / (b * (1 - X) + a * X * Y)


def _c_a34_1b(U, p, gp):
    X, Y, Z = U
    b, c = p["b"], p["c"]
    return (b * Z + c * X * Y) / (X - 1)


def _c_a34_2(U, p, gp):
    X, Y, Z = U
    a, b, c = p["a"], p["b"], p["c"]
    return np.exp((b * X * Y + a * Z) / (c * (X - 1))) * (X ** (X / (X - 1)) / (X - 1))


def _c_a35_1(U, p, gp):
    X, Y, Z = U
    a, b, c, r = p["a"], p["b"], p["c"], gp["rho"]
    return X ** (-r) * (b * (1 - X**r) + a * Y) * (r * c * (X - 1) - a * Z) ** r


def _c_a35_2(U, p, gp):
    X, Y, Z = U
    a, b, r = p["a"], p["b"], gp["rho"]
    return (1 - 1 / X) ** r * (b * (1 - X**r) + r * a * Y)


def _c_a35_3(U, p, gp):
    X, Y, Z = U
    a, b, r = p["a"], p["b"], gp["rho"]
    return (X ** (-r) - 1) * (b * (X - 1) - a * Z) ** r


def _c_a36_1c(U, p, gp):
    C, S, Y, Z = U
    a, b, c = p["a"], p["b"], p["c"]
    return 2 * np.arctan((c * Z - a * (1 - C) + b * S) / (b * (1 - C) + a * S - c * Y)) - np.arctan(C / S)


def _c_a36_10(U, p, gp):
    C, S, Y, Z = U
    a, b = p["a"], p["b"]
    return a * Y - b * Z + S * (a * Z + b * Y) / (C - 1)


def _c_a36_2(U, p, gp):
    C, S, Y, Z = U
    a, b, c = p["a"], p["b"], p["c"]
    return c * np.log(1 - C) + a * Y - b * Z + S * (a * Z + b * Y + c * rotation_angle(C, S)) / (C - 1)


def _a37_log_argument(U, p, gp):
    C, S, Y, Z = U
    a, b, c, m = p["a"], p["b"], p["c"], gp["mu"]
    i = 1j
    return (-2 * i * a * (-1 + C - i * S) + (i + m) * (i * b + c - i * c * m) * (Y - i * Z)) / (
        (i + m) * (b - c * (i + m)))


def _c_a37_1(U, p, gp):
    # the second logarithm is the complex conjugate of the first
    C, S, Y, Z = U
    m = gp["mu"]
    t = np.log(_a37_log_argument(U, p, gp)) / (1j + m)
    return np.arctan(S / C) + t + _conj(t)


def _conj(z):
    if isinstance(z, Jet):
        return Jet(np.conj(z.val), np.conj(z.grad))
    return np.conj(z)


def printed_a37_casimir_1(U, p, gp):
    """The A3_7 family-1 Casimir exactly as printed; kept to show it fails."""
    C, S, Y, Z = U
    a, b, c, m = p["a"], p["b"], p["c"], gp["mu"]
    i = 1j
    t2 = (2 * i * a * (-1 + C + i * S) + (m + i) * (i * b + c + i * c * m) * (Y + i * Z)) / (
        (m - i) * (b + c * (i - m)))
    return np.arctan(S / C) + np.log(_a37_log_argument(U, p, gp)) / (1j + m) + np.log(t2) / (-1j + m)


def printed_a37_casimir_2(U, p, gp):
    """The A3_7 family-2 Casimir exactly as printed; a Casimir of the misprinted bracket."""
    C, S, Y, Z = U
    m = gp["mu"]
    return np.arctan(S / C) + 2 / (1 + m * m) * (np.arctan(Z / Y) - m / 2 * np.log(Y * Y + Z * Z))


def _c_a37_10(U, p, gp):
    C, S, Y, Z = U
    return np.arctan(S / C)


def _c_a37_2(U, p, gp):
    C, S, Y, Z = U
    m = gp["mu"]
    # the sign of the bracketed term follows the corrected {Y, Z} entry
    return np.arctan(S / C) - 2 / (1 + m * m) * (np.arctan(Z / Y) - m / 2 * np.log(Y * Y + Z * Z))


def _c_a38_ac(U, p, gp):
    X, Y, Z, W = U
    a, b, c = p["a"], p["b"], p["c"]
    return (a * (W - Y) - b * Z) / (a * X + c * Z)


def _c_a38_ab(U, p, gp):
    X, Y, Z, W = U
    return (W - Y) / Z


def _c_a38_ac0(U, p, gp):
    X, Y, Z, W = U
    return X / Z


def _c_a39(U, p, gp):
    x, y, z = U
    return x / 2 - np.arctan(np.sin((y - z) / 2) / np.sin((y + z) / 2))


def _xy(U):
    return U[0], U[1], U[2]


CASIMIRS = {
    "A3_1": (
        CasimirBranch("A3_1", 1, "C1", "b != 0", lambda p, gp: p["b"] != 0, _c_a31_1,
                      lambda rng, gp: _draw(rng, "abcd"),
                      lambda U, p, gp: (p["a"] * U[0] + p["b"] * U[1],)),
        CasimirBranch("A3_1", 2, "C2.disc>0", "(a-d)^2 + 4bc > 0 and c != 0",
                      lambda p, gp: _disc(p) > 0 and p["c"] != 0, _c_a31_2_pos, _sample_a31_pos,
                      lambda U, p, gp: _a31_pos_singular(U, p)),
        CasimirBranch("A3_1", 2, "C2.c=0,a!=d", "c = 0, a != d",
                      lambda p, gp: p["c"] == 0 and p["a"] != p["d"], _c_a31_2_c0,
                      _sample_a31_c0,
                      lambda U, p, gp: ((p["a"] - p["d"]) * U[0] + p["b"] * U[1], U[1])),
        CasimirBranch("A3_1", 2, "C2.disc<0", "(a-d)^2 + 4bc < 0",
                      lambda p, gp: _disc(p) < 0, _c_a31_2_neg, _sample_a31_neg,
                      lambda U, p, gp: (U[1],)),
        CasimirBranch("A3_1", 2, "C2.disc=0,a!=d", "c != 0, b = -(a-d)^2/(4c), a != d",
                      lambda p, gp: p["c"] != 0 and p["a"] != p["d"]
                      and np.isclose(p["b"], -(p["a"] - p["d"]) ** 2 / (4 * p["c"]), rtol=0, atol=1e-12),
                      _c_a31_2_deg, _sample_a31_deg,
                      lambda U, p, gp: (2 * p["c"] * U[0] + (p["d"] - p["a"]) * U[1],)),
        CasimirBranch("A3_1", 2, "C2.d=a,b=0", "d = a, b = 0, c != 0",
                      lambda p, gp: p["d"] == p["a"] and p["b"] == 0 and p["c"] != 0,
                      lambda U, p, gp: U[0] * np.exp(-p["a"] * U[1] / (p["c"] * U[0])),
                      _sample_fixed("ac", {"d": lambda p: p["a"], "b": 0.0}),
                      lambda U, p, gp: (U[0],)),
        CasimirBranch("A3_1", 2, "C2.a=d,c=0", "a = d, c = 0, b != 0",
                      lambda p, gp: p["d"] == p["a"] and p["c"] == 0 and p["b"] != 0,
                      lambda U, p, gp: U[1] * np.exp(-p["a"] * U[0] / (p["b"] * U[1])),
                      _sample_fixed("ab", {"d": lambda p: p["a"], "c": 0.0}),
                      lambda U, p, gp: (U[1],)),
        CasimirBranch("A3_1", 2, "C2.a=d,b=c=0", "a = d, b = c = 0",
                      lambda p, gp: p["d"] == p["a"] and p["b"] == 0 and p["c"] == 0,
                      lambda U, p, gp: U[0] / U[1],
                      _sample_fixed("a", {"d": lambda p: p["a"], "b": 0.0, "c": 0.0}),
                      lambda U, p, gp: (U[1],)),
        CasimirBranch("A3_1", 3, "C3.c!=0", "c != 0", lambda p, gp: p["c"] != 0, _c_a31_3_c,
                      lambda rng, gp: _draw(rng, "abc"), lambda U, p, gp: (U[0],)),
        CasimirBranch("A3_1", 3, "C3.c=0", "c = 0", lambda p, gp: p["c"] == 0, _c_a31_3_0,
                      _sample_fixed("ab", {"c": 0.0}), lambda U, p, gp: (U[0],)),
    ),
    "A3_2": (
        CasimirBranch("A3_2", 1, "C", "all parameters", lambda p, gp: True, _c_a32,
                      lambda rng, gp: _draw(rng, "abc", away=0.0)),
    ),
    "A3_3": (
        CasimirBranch("A3_3", 1, "C", "all parameters", lambda p, gp: True, _c_a33,
                      lambda rng, gp: _draw(rng, "abcdef", away=0.0)),
    ),
    "A3_4": (
        CasimirBranch("A3_4", 1, "C1.a!=0", "a != 0", lambda p, gp: p["a"] != 0, _c_a34_1a,
                      lambda rng, gp: _draw(rng, "abc"),
                      lambda U, p, gp: (p["b"] * (1 - U[0]) + p["a"] * U[0] * U[1],)),
        CasimirBranch("A3_4", 1, "C1.a=0", "a = 0", lambda p, gp: p["a"] == 0, _c_a34_1b,
                      _sample_fixed("bc", {"a": 0.0}), lambda U, p, gp: (U[0] - 1,)),
        CasimirBranch("A3_4", 2, "C2", "c != 0", lambda p, gp: p["c"] != 0, _c_a34_2,
                      lambda rng, gp: _draw(rng, "abc"), lambda U, p, gp: (U[0] - 1,)),
    ),
    "A3_5": (
        CasimirBranch("A3_5", 1, "C1", "a != 0", lambda p, gp: p["a"] != 0, _c_a35_1,
                      lambda rng, gp: _draw(rng, "abc"),
                      lambda U, p, gp: (p["b"] * (1 - U[0] ** gp["rho"]) + p["a"] * U[1],
                                        gp["rho"] * p["c"] * (U[0] - 1) - p["a"] * U[2])),
        CasimirBranch("A3_5", 2, "C2", "all parameters", lambda p, gp: True, _c_a35_2,
                      lambda rng, gp: _draw(rng, "ab"), lambda U, p, gp: (U[0] - 1,)),
        CasimirBranch("A3_5", 3, "C3", "a != 0", lambda p, gp: p["a"] != 0, _c_a35_3,
                      lambda rng, gp: _draw(rng, "ab"),
                      lambda U, p, gp: (U[0] - 1, p["b"] * (U[0] - 1) - p["a"] * U[2])),
    ),
    "A3_6": (
        CasimirBranch("A3_6", 1, "C1.c!=0", "c != 0", lambda p, gp: p["c"] != 0, _c_a36_1c,
                      lambda rng, gp: _draw(rng, "abc"),
                      lambda U, p, gp: (U[1], p["b"] * (1 - U[0]) + p["a"] * U[1] - p["c"] * U[2])),
        CasimirBranch("A3_6", 1, "C1.c=0", "c = 0", lambda p, gp: p["c"] == 0, _c_a36_10,
                      _sample_fixed("ab", {"c": 0.0}), lambda U, p, gp: (U[1],)),
        CasimirBranch("A3_6", 2, "C2", "c != 0", lambda p, gp: p["c"] != 0, _c_a36_2,
                      lambda rng, gp: _draw(rng, "abc"), lambda U, p, gp: (U[1],)),
    ),
    "A3_7": (
        CasimirBranch("A3_7", 1, "C1", "a != 0 and (b, c) != (0, 0)",
                      lambda p, gp: p["a"] != 0 and (p["b"] != 0 or p["c"] != 0), _c_a37_1,
                      lambda rng, gp: _draw(rng, "abc"),
                      lambda U, p, gp: (_a37_log_argument(U, p, gp),)),
        CasimirBranch("A3_7", 1, "C1.b=c=0", "a != 0 and b = c = 0",
                      lambda p, gp: p["a"] != 0 and p["b"] == 0 and p["c"] == 0, _c_a37_10,
                      _sample_fixed("a", {"b": 0.0, "c": 0.0})),
        CasimirBranch("A3_7", 2, "C2", "all parameters", lambda p, gp: True, _c_a37_2,
                      lambda rng, gp: _draw(rng, "a"), lambda U, p, gp: (U[2],)),
    ),
    "A3_8": (
        CasimirBranch("A3_8", 1, "C.a|c!=0", "a != 0 or c != 0",
                      lambda p, gp: p["a"] != 0 or p["c"] != 0, _c_a38_ac,
                      lambda rng, gp: _draw(rng, "abc"),
                      lambda U, p, gp: (p["a"] * U[0] + p["c"] * U[2],)),
        CasimirBranch("A3_8", 1, "C.a=b=0", "a = b = 0",
                      lambda p, gp: p["a"] == 0 and p["b"] == 0, _c_a38_ab,
                      _sample_fixed("c", {"a": 0.0, "b": 0.0}), lambda U, p, gp: (U[2],)),
        CasimirBranch("A3_8", 1, "C.a=c=0", "a = c = 0",
                      lambda p, gp: p["a"] == 0 and p["c"] == 0, _c_a38_ac0,
                      _sample_fixed("b", {"a": 0.0, "c": 0.0}), lambda U, p, gp: (U[2],)),
    ),
    "A3_9": (
        CasimirBranch("A3_9", 1, "C.b=c=0", "b = c = 0",
                      lambda p, gp: p["b"] == 0 and p["c"] == 0, _c_a39,
                      _sample_fixed("a", {"b": 0.0, "c": 0.0}),
                      lambda U, p, gp: (np.sin((U[1] + U[2]) / 2),)),
    ),
}


def _a31_pos_singular(U, p):
    X, Y, Z = U
    a, c, d = p["a"], p["c"], p["d"]
    al = np.sqrt(_disc(p))
    return (
        (al + a - d) * Y - 2 * c * X,
        (al - a + d) * Y + 2 * c * X,
        (0.5 * (a - d) * Y - c * X) ** 2 - al * al / 4 * Y * Y,
    )


def casimir_branches(gid: str, family: int | None = None) -> tuple:
    return tuple(b for b in CASIMIRS.get(gid, ()) if family is None or b.family == family)


def applicable_branches(gid: str, family: int, p: dict, gp: dict) -> tuple:
    return tuple(b for b in casimir_branches(gid, family) if b.guard(p, gp))
