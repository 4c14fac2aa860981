"""Tangent Lie bialgebras, classical r-matrices and Sklyanin brackets.

Conventions
-----------
* ``q = (q1, q2, q3) = (z, y, x)``: the lower coordinate ``q^i`` is dual to ``e_i``.
* ``DualStructureConstants.f[i, j, k] = d/dq^k {q^i, q^j}`` at the identity.
* A cocommutator is ``d[k, i, j]`` with ``delta(e_k) = sum_{i<j} d[k, i, j] e_i ^ e_j``
  and ``e_i ^ e_j = e_i (x) e_j - e_j (x) e_i``; equivalently ``d[k]`` is the full
  antisymmetric coefficient matrix of ``delta(e_k)`` on ``e_a (x) e_b``.
* An r-matrix is the full antisymmetric 3x3 matrix ``R`` with ``R[i, j] = r^{ij}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import StructureConstants
from .families import BracketFamily
from .group import GroupPoint, GroupSpec, coordinate_function, get_group, invariant_fields
from .jet import seed, value
from .poisson import bivector_upper


class PreconditionError(ValueError):
    """An operation was called outside its precondition (e.g. r not solving the mCYBE)."""


class UsageError(ValueError):
    """An operation was asked for something it does not define."""


# lower (x, y, z) -> q index: q1 = z, q2 = y, q3 = x
_Q_FROM_LOWER = (2, 1, 0)

# tolerance split for the mCYBE: pass below PASS * scale, fail above FAIL
MCYBE_PASS = 1e-12
MCYBE_FAIL = 1e-3


@dataclass(frozen=True)
class DualStructureConstants:
    f: np.ndarray

    def jacobi_residual(self) -> float:
        return StructureConstants(self.f).jacobi_residual()

    def antisymmetry_residual(self) -> float:
        return StructureConstants(self.f).antisymmetry_residual()


@dataclass(frozen=True)
class Cocommutator:
    d: np.ndarray

    def of(self, k: int) -> np.ndarray:
        """Coefficient matrix of ``delta(e_k)`` (``k`` 1-based) on ``e_a (x) e_b``."""
        return self.d[k - 1]


# ---------------------------------------------------------------- r-matrices


def r_matrix(r12: float = 0.0, r13: float = 0.0, r23: float = 0.0) -> np.ndarray:
    R = np.zeros((3, 3))
    R[0, 1], R[0, 2], R[1, 2] = r12, r13, r23
    return R - R.T


def r_components(R: np.ndarray) -> tuple:
    return float(R[0, 1]), float(R[0, 2]), float(R[1, 2])


def _ad(sc: StructureConstants) -> np.ndarray:
    """``A[i]`` is the matrix of ``ad_{e_i}``: ``A[i][m, a] = c[i, a, m]``."""
    return sc.c.transpose(0, 2, 1)


def schouten(R: np.ndarray, sc: StructureConstants) -> np.ndarray:
    """Components of ``[[r, r]] = [r12, r13] + [r12, r23] + [r13, r23]``."""
    c = sc.c
    return (np.einsum("abi,aj,bk->ijk", c, R, R)
            + np.einsum("abj,ia,bk->ijk", c, R, R)
            + np.einsum("abk,ia,jb->ijk", c, R, R))


def mcybe_residual(R: np.ndarray, sc: StructureConstants) -> float:
    """Max over ``zeta = e_m`` of the ad-action of ``zeta`` on ``[[r, r]]``."""
    S = schouten(R, sc)
    worst = 0.0
    for A in _ad(sc):
        t = (np.einsum("ia,ajk->ijk", A, S) + np.einsum("ja,iak->ijk", A, S)
             + np.einsum("ka,ija->ijk", A, S))
        worst = max(worst, float(np.abs(t).max()))
    return worst


def mcybe_check(R: np.ndarray, sc: StructureConstants) -> float:
    return mcybe_residual(np.asarray(R, float), sc)


def mcybe_status(R: np.ndarray, sc: StructureConstants) -> str:
    """``"pass"``, ``"fail"`` or ``"indeterminate"`` for the mCYBE of ``R``.

    The pass threshold scales with ``|r|^2 |c|^2``, the size of the terms in the
    ad-action of the Schouten bracket.
    """
    R = np.asarray(R, float)
    res = mcybe_residual(R, sc)
    scale = max(1.0, float(np.abs(R).max()) ** 2 * float(np.abs(sc.c).max()) ** 2)
    if res <= MCYBE_PASS * scale:
        return "pass"
    if res >= MCYBE_FAIL:
        return "fail"
    return "indeterminate"


def cocommutator_from_r(R: np.ndarray, sc: StructureConstants) -> Cocommutator:
    """``delta_r(e_k) = (ad_{e_k} (x) 1 + 1 (x) ad_{e_k})(r)``."""
    A = _ad(sc)
    R = np.asarray(R, float)
    return Cocommutator(np.einsum("kma,ab->kmb", A, R) + np.einsum("ab,knb->kan", R, A))


# ---------------------------------------------------------------- linearization


def _q_jacobian_at_identity(g: GroupSpec) -> np.ndarray:
    """``d(upper)/d(q)`` at the identity, shape ``(n_upper, 3)``."""
    jets = seed([0.0, 0.0, 0.0])
    U = g.chart.lower_to_upper(*jets)
    D = np.zeros((g.chart.n_upper, 3))
    for a, u in enumerate(U):
        grad = np.asarray(u.grad) if hasattr(u, "grad") else np.zeros(3)
        D[a] = [grad[_Q_FROM_LOWER[i]] for i in range(3)]
    return D


def linearize_bivector(g: GroupSpec, bivector: Callable) -> DualStructureConstants:
    """Dual structure constants of a bivector field vanishing at the identity.

    ``bivector(U)`` returns the nested-list matrix of upper-coordinate brackets;
    it is differentiated along the q-directions at the identity with a jet.
    Since the bivector vanishes at e, ``d{q^i, q^j} = J dPi J^T`` with ``J`` a
    left inverse of ``d(upper)/d(q)``.
    """
    D = _q_jacobian_at_identity(g)
    J = np.linalg.pinv(D)
    jets = seed([0.0, 0.0, 0.0])
    P = bivector(g.chart.lower_to_upper(*jets))
    n = g.chart.n_upper
    dP = np.zeros((n, n, 3))
    for a in range(n):
        for b in range(n):
            v = P[a][b]
            if hasattr(v, "grad"):
                grad = np.asarray(v.grad, dtype=float)
                dP[a, b] = [grad[_Q_FROM_LOWER[k]] for k in range(3)]
    return DualStructureConstants(np.einsum("ia,abk,jb->ijk", J, dP, J))


def linearize(fam: BracketFamily, params: dict, g: GroupSpec | None = None) -> DualStructureConstants:
    """``f[i, j, k] = d/dq^k {q^i, q^j}`` at the identity for a printed family."""
    g = g or get_group(fam.gid)
    fam.check(params, g.params)
    return linearize_bivector(g, lambda U: bivector_upper(g, fam, params, U))


def cocommutator_of(f: DualStructureConstants) -> Cocommutator:
    """``d[k, i, j] = f[i, j, k]``."""
    return Cocommutator(np.asarray(f.f, float).transpose(2, 0, 1).copy())


def cocycle_residuals(delta: Cocommutator, sc: StructureConstants) -> np.ndarray:
    """``delta([e_i, e_j]) - ad_{e_i} delta(e_j) + ad_{e_j} delta(e_i)`` for all pairs.

    ``ad_X`` acts on ``g (x) g`` as ``ad_X (x) 1 + 1 (x) ad_X``; this is the
    1-cocycle condition with ``[T, Y (x) 1 + 1 (x) Y] = -ad_Y T``.
    """
    A = _ad(sc)
    d = delta.d

    def act(i, T):
        return A[i] @ T + T @ A[i].T

    out = np.zeros((3, 3, 3, 3))
    for i in range(3):
        for j in range(3):
            lhs = np.einsum("k,kab->ab", sc.c[i, j], d)
            out[i, j] = lhs - act(i, d[j]) + act(j, d[i])
    return out


def cocycle_check(delta: Cocommutator, sc: StructureConstants) -> float:
    return float(np.abs(cocycle_residuals(delta, sc)).max())


def co_jacobi_check(delta: Cocommutator) -> float:
    """Jacobi residual of the dual bracket ``f[i, j, k] = d[k, i, j]``."""
    return StructureConstants(delta.d.transpose(1, 2, 0)).jacobi_residual()


# ---------------------------------------------------------------- Gomez bases

_SQ2 = np.sqrt(2.0)

# rows: e_i in terms of (E0, E1, E2), the generators of the reference classification
GOMEZ_BASIS = {
    "A3_1": np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1]], float),
    "A3_2": np.array([[0, 1, 0], [0, 0, 1], [-1, 0, 0]], float),
    "A3_3": np.array([[0, 1, 0], [0, 0, 1], [-1, 0, 0]], float),
    "A3_4": np.array([[0, 1, 0], [0, 0, 1], [-1, 0, 0]], float),
    "A3_5": np.array([[0, 1, 0], [0, 0, 1], [-1, 0, 0]], float),
    "A3_6": np.array([[0, 1, 0], [0, 0, 1], [-1, 0, 0]], float),
    "A3_7": np.array([[0, 1, 0], [0, 0, 1], [-1, 0, 0]], float),
    "A3_8": np.array([[0, _SQ2, 0], [-1, 0, 0], [0, 0, _SQ2]], float),
    "A3_9": np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], float),
}


def gomez_basis(gid: str, swap12: bool = False) -> np.ndarray:
    """Change-of-basis matrix ``B`` with ``e_i = sum_a B[i, a] E_a``.

    ``swap12`` interchanges ``E1`` and ``E2`` (the reading under which the
    reference cocommutators carry a suspected misprint).
    """
    B = GOMEZ_BASIS[gid].copy()
    if swap12:
        B = B[:, [0, 2, 1]]
    return B


def to_basis(delta: Cocommutator, B: np.ndarray) -> Cocommutator:
    """Cocommutator in the basis ``E`` where ``e = B E``."""
    Binv = np.linalg.inv(B)
    return Cocommutator(np.einsum("Ak,kab,aB,bC->ABC", Binv, delta.d, B, B))


def structure_constants_in_basis(sc: StructureConstants, B: np.ndarray) -> StructureConstants:
    Binv = np.linalg.inv(B)
    c = np.einsum("Ai,Bj,ijk,kC->ABC", Binv, Binv, sc.c, B)
    return StructureConstants(c, dict(sc.params))


# ---------------------------------------------------------------- Sklyanin brackets


def field_matrices(g: GroupSpec, U) -> tuple[np.ndarray, np.ndarray]:
    """Left and right fields applied to every upper coordinate, shape ``(n, 3, N)``."""
    U = [np.atleast_1d(np.asarray(u, float)) for u in U]
    n = g.chart.n_upper
    L = np.stack([invariant_fields(g, "left", lambda V, a=a: V[a], U) for a in range(n)])
    Rt = np.stack([invariant_fields(g, "right", lambda V, a=a: V[a], U) for a in range(n)])
    return L, Rt


def sklyanin_bivector(g: GroupSpec, R: np.ndarray, U) -> np.ndarray:
    """``{U^a, U^b} = r^{ij} (L_i U^a L_j U^b - R_i U^a R_j U^b)``, shape ``(n, n, N)``.

    No mCYBE check; the result is linear in ``R``.
    """
    L, Rf = field_matrices(g, U)
    R = np.asarray(R, float)
    return np.einsum("aiN,ij,bjN->abN", L, R, L) - np.einsum("aiN,ij,bjN->abN", Rf, R, Rf)


def sklyanin_basis(g: GroupSpec, U) -> np.ndarray:
    """Sklyanin bivectors of ``e1^e2``, ``e1^e3``, ``e2^e3``; shape ``(3, n, n, N)``."""
    L, Rf = field_matrices(g, U)
    out = []
    for comps in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
        R = r_matrix(*comps)
        out.append(np.einsum("aiN,ij,bjN->abN", L, R, L) - np.einsum("aiN,ij,bjN->abN", Rf, R, Rf))
    return np.stack(out)


def sklyanin_bracket(R: np.ndarray, f, h, p: GroupPoint, check: bool = True) -> float:
    """Sklyanin bracket of two functions of upper coordinates (or coordinate names) at ``p``."""
    g = p.group
    R = np.asarray(R, float)
    if check and mcybe_status(R, g.sc) != "pass":
        raise PreconditionError(f"{g.gid}: r does not solve the mCYBE "
                                f"(residual {mcybe_residual(R, g.sc):.3e})")
    if isinstance(f, str):
        f = coordinate_function(g, f)
    if isinstance(h, str):
        h = coordinate_function(g, h)
    U = [np.array([c]) for c in p.coords]
    Lf = invariant_fields(g, "left", f, U)[:, 0]
    Lh = invariant_fields(g, "left", h, U)[:, 0]
    Rf = invariant_fields(g, "right", f, U)[:, 0]
    Rh = invariant_fields(g, "right", h, U)[:, 0]
    return float(Lf @ R @ Lh - Rf @ R @ Rh)


def linearize_sklyanin(g: GroupSpec, R: np.ndarray, h: float = 1e-3) -> DualStructureConstants:
    """Linearization of the Sklyanin bivector by Richardson-extrapolated central differences.

    The Sklyanin bivector is built from jets already, so its derivative at the
    identity is taken by differences in the q-directions (an independent route
    from :func:`cocommutator_from_r`).
    """
    D = _q_jacobian_at_identity(g)
    J = np.linalg.pinv(D)
    n = g.chart.n_upper

    def P_at(q):
        lower = [q[_Q_FROM_LOWER.index(i)] for i in range(3)]
        U = [np.array([float(value(u))]) for u in g.chart.lower_to_upper(*lower)]
        return sklyanin_bivector(g, R, U)[:, :, 0]

    dP = np.zeros((n, n, 3))
    for k in range(3):
        def diff(step):
            e = np.zeros(3)
            e[k] = step
            return (P_at(e) - P_at(-e)) / (2 * step)

        dP[:, :, k] = (4 * diff(h / 2) - diff(h)) / 3
    return DualStructureConstants(np.einsum("ia,abk,jb->ijk", J, dP, J))


# ---------------------------------------------------------------- coboundary identifications


@dataclass(frozen=True)
class CoboundaryMap:
    """Printed identification of a family's parameters with an r-matrix.

    ``params_from_r(R, gp)`` gives family parameters; ``r_from_params(p, gp)``
    returns the r-matrix or ``None`` when the parameters are not of coboundary form.
    """

    gid: str
    family: int
    params_from_r: Callable
    r_from_params: Callable
    # r components that play no role in the bracket
    free: tuple = ()
    # the identification as printed, when it differs from the verified one
    printed_params_from_r: Callable | None = None


def _close(*pairs, tol=1e-12):
    return all(abs(a - b) <= tol * (1 + abs(a) + abs(b)) for a, b in pairs)


def _cb(gid, fam, fwd, inv, free=(), printed=None):
    return CoboundaryMap(gid, fam, fwd, inv, free, printed)


def _r(R):
    return r_components(R)


COBOUNDARY = {
    # printed with a = d = -r23
    ("A3_1", 2): _cb(
        "A3_1", 2,
        lambda R, gp: {"a": _r(R)[2], "b": 0.0, "c": 0.0, "d": _r(R)[2]},
        lambda p, gp: r_matrix(0, 0, p["a"]) if _close((p["a"], p["d"]), (p["b"], 0), (p["c"], 0)) else None,
        free=("r12", "r13"),
        printed=lambda R, gp: {"a": -_r(R)[2], "b": 0.0, "c": 0.0, "d": -_r(R)[2]},
    ),
    ("A3_2", 1): _cb(
        "A3_2", 1,
        lambda R, gp: {"a": -_r(R)[1], "b": 0.0, "c": _r(R)[0]},
        lambda p, gp: r_matrix(p["c"], -p["a"], 0) if _close((p["b"], 0)) else None,
    ),
    ("A3_3", 1): _cb(
        "A3_3", 1,
        lambda R, gp: {"a": _r(R)[2], "b": 0.0, "c": 0.0, "d": _r(R)[1], "e": 0.0, "f": _r(R)[0]},
        lambda p, gp: (r_matrix(p["f"], p["d"], p["a"])
                       if _close((p["b"], 0), (p["c"], 0), (p["e"], 0)) else None),
    ),
    ("A3_4", 1): _cb(
        "A3_4", 1,
        lambda R, gp: {"a": 0.0, "b": _r(R)[2], "c": -_r(R)[1]},
        lambda p, gp: r_matrix(0, -p["c"], p["b"]) if _close((p["a"], 0)) else None,
        free=("r12",),
    ),
    ("A3_5", 2): _cb(
        "A3_5", 2,
        lambda R, gp: {"a": -_r(R)[1], "b": gp["rho"] * _r(R)[0]},
        lambda p, gp: r_matrix(p["b"] / gp["rho"], -p["a"], 0),
    ),
    ("A3_5", 3): _cb(
        "A3_5", 3,
        lambda R, gp: {"a": gp["rho"] * _r(R)[2], "b": gp["rho"] * _r(R)[0]},
        lambda p, gp: r_matrix(p["b"] / gp["rho"], 0, p["a"] / gp["rho"]),
    ),
    ("A3_6", 1): _cb(
        "A3_6", 1,
        lambda R, gp: {"a": _r(R)[1], "b": -_r(R)[2], "c": 0.0},
        lambda p, gp: r_matrix(0, p["a"], -p["b"]) if _close((p["c"], 0)) else None,
        free=("r12",),
    ),
    ("A3_7", 1): _cb(
        "A3_7", 1,
        lambda R, gp: {"a": _r(R)[0] * (1 + gp["mu"] ** 2), "b": 0.0, "c": 0.0},
        lambda p, gp: (r_matrix(p["a"] / (1 + gp["mu"] ** 2), 0, 0)
                       if _close((p["b"], 0), (p["c"], 0)) else None),
    ),
    # printed as a = -r12, b = -2 r13, c = r23 (twice the Sklyanin bracket)
    ("A3_8", 1): _cb(
        "A3_8", 1,
        lambda R, gp: {"a": -_r(R)[0] / 2, "b": -_r(R)[1], "c": _r(R)[2] / 2},
        lambda p, gp: r_matrix(-2 * p["a"], -p["b"], 2 * p["c"]),
        printed=lambda R, gp: {"a": -_r(R)[0], "b": -2 * _r(R)[1], "c": _r(R)[2]},
    ),
    # printed as a = r12, b = r13, c = r23
    ("A3_9", 1): _cb(
        "A3_9", 1,
        lambda R, gp: {"a": -_r(R)[0], "b": -_r(R)[1], "c": -_r(R)[2]},
        lambda p, gp: r_matrix(-p["a"], -p["b"], -p["c"]),
        printed=lambda R, gp: {"a": _r(R)[0], "b": _r(R)[1], "c": _r(R)[2]},
    ),
}


def coboundary_map(gid: str, family: int) -> CoboundaryMap | None:
    return COBOUNDARY.get((gid, family))


def bivector_samples(g: GroupSpec, fam: BracketFamily, params: dict, U) -> np.ndarray:
    """Family bivector at batched upper points, shape ``(n, n, N)``."""
    U = [np.atleast_1d(np.asarray(u, float)) for u in U]
    N = max(u.shape[0] for u in U)
    P = bivector_upper(g, fam, params, U)
    n = len(P)
    out = np.zeros((n, n, N))
    for a in range(n):
        for b in range(n):
            out[a, b] = value(P[a][b])
    return out


def sample_upper(g: GroupSpec, rng: np.random.Generator, n: int) -> list:
    u = g.sample_local(rng, n)
    return [np.asarray(value(v), float) for v in g.chart.local_to_upper(*u)]


def coboundary_discrepancy(g: GroupSpec, fam: BracketFamily, params: dict, R: np.ndarray, U) -> float:
    """Max-abs difference between the Sklyanin bracket of ``R`` and the family at points ``U``."""
    S = sklyanin_bivector(g, R, U)
    P = bivector_samples(g, fam, params, U)
    return float(np.abs(S - P).max())


def coboundary_match(fam: BracketFamily, params: dict, rng: np.random.Generator, n_points: int = 50,
                     g: GroupSpec | None = None, R: np.ndarray | None = None) -> float:
    """Sklyanin-vs-family discrepancy for the printed r identification of ``params``.

    ``R`` overrides the printed identification. Raises :class:`UsageError` when the
    family has no coboundary identification or ``params`` are not of coboundary form.
    """
    g = g or get_group(fam.gid)
    fam.check(params, g.params)
    if R is None:
        cmap = coboundary_map(fam.gid, fam.index)
        if cmap is None:
            raise UsageError(f"{fam.name} has no coboundary identification")
        R = cmap.r_from_params(params, g.params)
        if R is None:
            raise UsageError(f"{fam.name}: parameters {params} are not of coboundary form")
    if mcybe_status(R, g.sc) != "pass":
        raise PreconditionError(f"{g.gid}: r does not solve the mCYBE")
    U = sample_upper(g, rng, n_points)
    return coboundary_discrepancy(g, fam, params, R, U)


__all__ = [
    "COBOUNDARY",
    "Cocommutator",
    "CoboundaryMap",
    "DualStructureConstants",
    "GOMEZ_BASIS",
    "PreconditionError",
    "UsageError",
    "bivector_samples",
    "co_jacobi_check",
    "coboundary_discrepancy",
    "coboundary_map",
    "coboundary_match",
    "cocommutator_from_r",
    "cocommutator_of",
    "cocycle_check",
    "cocycle_residuals",
    "field_matrices",
    "gomez_basis",
    "linearize",
    "linearize_bivector",
    "linearize_sklyanin",
    "mcybe_check",
    "mcybe_residual",
    "mcybe_status",
    "r_components",
    "r_matrix",
    "sample_upper",
    "schouten",
    "sklyanin_basis",
    "sklyanin_bivector",
    "sklyanin_bracket",
    "structure_constants_in_basis",
    "to_basis",
]
