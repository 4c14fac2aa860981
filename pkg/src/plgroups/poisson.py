"""Evaluation and verification of Poisson-Lie bivectors.

All derivatives come from jets; sample loops are vectorised over batches of
points. Residuals come in two flavours: an absolute residual and a scale (the
sum of magnitudes of the terms that cancel), so that callers can apply the
relative criterion ``residual <= tol * (1 + scale)``.
"""

from __future__ import annotations

import numpy as np

from .algebra import DomainError
from .families import (
    BracketFamily,
    BranchError,
    CasimirBranch,
    ParameterError,
    get_family,
)
from .group import GroupPoint, GroupSpec, get_group, in_chart, local_matrix, matmul
from .jet import Jet, seed, value


def _zero_like(U):
    return 0.0 * value(U[0])


def bivector_upper(g: GroupSpec, fam: BracketFamily, p: dict, U):
    """Full antisymmetric matrix of brackets of upper coordinates (nested list)."""
    n = g.chart.n_upper
    entries = fam.bivector(U, p, g.params)
    out = [[0.0] * n for _ in range(n)]
    for (a, b), v in entries.items():
        out[a][b] = v
        out[b][a] = -v
    return out


def bivector_eval(fam: BracketFamily, params: dict, coords, g: GroupSpec | None = None) -> np.ndarray:
    """Antisymmetric matrix ``{X^a, X^b}`` at one point given in upper coordinates."""
    g = g or get_group(fam.gid)
    fam.check(params, g.params)
    U = [np.asarray(c, dtype=float) for c in coords]
    if len(U) != g.chart.n_upper:
        raise ValueError(f"{g.gid} expects {g.chart.n_upper} upper coordinates")
    P = bivector_upper(g, fam, params, U)
    return np.array([[float(value(v)) for v in row] for row in P])


def to_local(g: GroupSpec, P, U):
    """Bivector in local coordinates, ``L P L^T`` with ``L = d(local)/d(upper)``."""
    if g.chart.local_jacobian is None:
        return P
    L = g.chart.local_jac(U)
    n = g.chart.n_upper
    out = [[0.0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(i + 1, 3):
            s = 0.0
            for a in range(n):
                if _is_zero(L[i][a]):
                    continue
                for b in range(n):
                    if a == b or _is_zero(L[j][b]):
                        continue
                    s = s + L[i][a] * P[a][b] * L[j][b]
            out[i][j] = s
            out[j][i] = -s
    return out


def _is_zero(v) -> bool:
    return not isinstance(v, Jet) and np.ndim(v) == 0 and v == 0.0


def local_bivector(g: GroupSpec, fam: BracketFamily, p: dict, u):
    U = g.chart.local_to_upper(*u)
    return to_local(g, bivector_upper(g, fam, p, U), U)


# ---------------------------------------------------------------- Jacobi


def jacobiator_local(P, nvars: int = 3):
    """Jacobiator of a local bivector whose entries are jets in the local coordinates.

    Returns ``(residual, scale)`` arrays over the batch; only the single
    independent component (0, 1, 2) exists in three dimensions.
    """
    vals = [[value(P[i][j]) for j in range(3)] for i in range(3)]
    shape = np.broadcast_shapes(*(np.shape(v) for row in vals for v in row))

    def grad(i, j):
        v = P[i][j]
        if isinstance(v, Jet):
            return np.broadcast_to(v.grad, (nvars,) + shape)
        return np.zeros((nvars,) + shape)

    total = np.zeros(shape)
    scale = np.zeros(shape)
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        dbc = grad(b, c)
        for d in range(3):
            term = vals[d][a] * dbc[d]
            total = total + term
            scale = scale + np.abs(term)
    return np.abs(total), scale


def jacobiator_batch(g: GroupSpec, fam: BracketFamily, p: dict, u: np.ndarray):
    """Jacobi residual and scale at a batch of local points ``u`` (shape ``(3, N)``)."""
    uj = seed(list(u))
    return jacobiator_local(local_bivector(g, fam, p, uj))


def jacobiator(fam: BracketFamily, params: dict, coords, g: GroupSpec | None = None) -> float:
    """Max-abs Jacobiator at one point given in upper coordinates."""
    g = g or get_group(fam.gid)
    fam.check(params, g.params)
    u = np.array([float(value(v)) for v in g.chart.upper_to_local(list(coords))])
    res, _ = jacobiator_batch(g, fam, params, u[:, None])
    return float(res.max())


# ---------------------------------------------------------------- multiplicativity


def multiplicativity_batch(g: GroupSpec, fam: BracketFamily, p: dict, up: np.ndarray, uq: np.ndarray):
    """Residual of ``{Delta f, Delta g} = Delta {f, g}`` for all upper coordinate pairs.

    ``up``/``uq`` are batches of local points, shape ``(3, N)``. Returns
    ``(residual, scale)`` arrays of shape ``(N,)``.
    """
    jets = seed(list(up) + list(uq))
    Mp = local_matrix(g, jets[:3])
    Mq = local_matrix(g, jets[3:])
    Upq = g.chart.matrix_to_upper(matmul(Mp, Mq))
    n = g.chart.n_upper
    N = up.shape[1]
    G = np.stack([np.broadcast_to(u.grad, (6, N)) if isinstance(u, Jet) else np.zeros((6, N))
                  for u in Upq])  # (n, 6, N)
    Pp = _local_values(g, fam, p, up)
    Pq = _local_values(g, fam, p, uq)
    Gp, Gq = G[:, :3], G[:, 3:]
    lhs = np.einsum("adN,deN,beN->abN", Gp, Pp, Gp) + np.einsum("adN,deN,beN->abN", Gq, Pq, Gq)
    scale = (np.einsum("adN,deN,beN->abN", np.abs(Gp), np.abs(Pp), np.abs(Gp))
             + np.einsum("adN,deN,beN->abN", np.abs(Gq), np.abs(Pq), np.abs(Gq)))
    Uv = [np.asarray(value(u)) for u in Upq]
    rhs = _as_array(bivector_upper(g, fam, p, Uv), N)
    res = np.abs(lhs - rhs).reshape(n * n, N)
    sc = (scale + np.abs(rhs)).reshape(n * n, N)
    k = res.argmax(axis=0)
    return res[k, np.arange(N)], sc.max(axis=0)


def _as_array(P, N):
    n = len(P)
    out = np.zeros((n, n, N))
    for i in range(n):
        for j in range(n):
            out[i, j] = value(P[i][j])
    return out


def _local_values(g, fam, p, u):
    P = local_bivector(g, fam, p, list(u))
    return _as_array(P, u.shape[1])


def multiplicativity_residual(fam: BracketFamily, params: dict, p: GroupPoint, q: GroupPoint) -> float:
    """Max-abs multiplicativity residual for one pair of points."""
    if p.gid != q.gid or p.gid != fam.gid:
        raise ValueError("points and family must belong to the same group")
    g = p.group
    fam.check(params, g.params)
    up = np.array([float(value(v)) for v in g.chart.upper_to_local(list(p.coords))])[:, None]
    uq = np.array([float(value(v)) for v in g.chart.upper_to_local(list(q.coords))])[:, None]
    Upq = g.chart.matrix_to_upper((p.matrix @ q.matrix).tolist())
    if not in_chart(g, Upq).all():
        raise DomainError(f"{g.gid}: product leaves the chart")
    res, _ = multiplicativity_batch(g, fam, params, up, uq)
    return float(res[0])


# ---------------------------------------------------------------- Casimirs


def casimir_batch(g: GroupSpec, branch: CasimirBranch, p: dict, u: np.ndarray):
    """Residual ``max_b |sum_a dC_a P^{ab}|`` and its scale at local points ``u``.

    The Casimir is differentiated in local coordinates in complex arithmetic;
    the residual is the larger of the real and imaginary parts.
    """
    uj = seed(list(u), dtype=complex)
    U = g.chart.local_to_upper(*uj)
    C = branch.func(U, p, g.params)
    N = u.shape[1]
    dC = np.broadcast_to(C.grad, (3, N)) if isinstance(C, Jet) else np.zeros((3, N))
    fam = get_family(g.gid, branch.family)
    P = _local_values(g, fam, p, u)
    terms = dC[:, None, :] * P  # (a, b, N)
    total = terms.sum(axis=0)
    res = np.maximum(np.abs(total.real), np.abs(total.imag)).max(axis=0)
    scale = np.abs(terms).sum(axis=0).max(axis=0)
    return res, scale


def casimir_value(branch: CasimirBranch, params: dict, coords, g: GroupSpec | None = None):
    g = g or get_group(branch.gid)
    if not branch.guard(params, g.params):
        raise BranchError(f"{branch.name}: guard '{branch.guard_text}' is false for {params}")
    U = [np.asarray(c, dtype=complex) for c in coords]
    v = complex(value(branch.func(U, params, g.params)))
    return v.real if v.imag == 0 else v


def casimir_residual(branch: CasimirBranch, params: dict, coords, g: GroupSpec | None = None,
                     min_distance: float = 0.05) -> float:
    """Residual of ``dC . P`` at one point given in upper coordinates."""
    g = g or get_group(branch.gid)
    if not branch.guard(params, g.params):
        raise BranchError(f"{branch.name}: guard '{branch.guard_text}' is false for {params}")
    U = [np.asarray(c, dtype=float) for c in coords]
    near = [abs(float(value(s))) < min_distance for s in branch.singular(U, params, g.params)]
    if any(near):
        raise DomainError(f"{branch.name}: point within {min_distance} of a singular locus")
    u = np.array([float(value(v)) for v in g.chart.upper_to_local(U)])[:, None]
    res, _ = casimir_batch(g, branch, params, u)
    return float(res[0])


def function_residual(g: GroupSpec, fam: BracketFamily, p: dict, f, u: np.ndarray):
    """``max_b |sum_a df_a P^{ab}|`` for an arbitrary function ``f`` of upper coordinates."""
    uj = seed(list(u))
    F = f(g.chart.local_to_upper(*uj))
    N = u.shape[1]
    dF = np.broadcast_to(F.grad, (3, N)) if isinstance(F, Jet) else np.zeros((3, N))
    P = _local_values(g, fam, p, u)
    return np.abs((dF[:, None, :] * P).sum(axis=0)).max(axis=0)


__all__ = [
    "BranchError",
    "ParameterError",
    "bivector_eval",
    "bivector_upper",
    "casimir_batch",
    "casimir_residual",
    "casimir_value",
    "function_residual",
    "jacobiator",
    "jacobiator_batch",
    "local_bivector",
    "multiplicativity_batch",
    "multiplicativity_residual",
    "to_local",
]


def casimir_points(g: GroupSpec, branch: CasimirBranch, p: dict, rng: np.random.Generator, n: int,
                   min_distance: float = 0.05) -> np.ndarray:
    """``n`` local points at least ``min_distance`` away from the branch's singular loci."""
    out, have = [], 0
    for _ in range(100):
        u = g.sample_local(rng, 2 * n)
        U = [np.asarray(value(v), float) for v in g.chart.local_to_upper(*u)]
        ok = np.ones(u.shape[1], bool)
        for s in branch.singular(U, p, g.params):
            ok &= np.abs(np.asarray(value(s))) >= min_distance
        out.append(u[:, ok])
        have += int(ok.sum())
        if have >= n:
            break
    return np.concatenate(out, axis=1)[:, :n]
