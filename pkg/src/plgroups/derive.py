"""Numerical re-derivation of the multiplicative quadratic Ansatz.

For each group three matrix entries ``V = (V^1, V^2, V^3)`` serve as
coordinates, and the unknown bracket is

    {V^a, V^b} = sum_m c^{ab}_m phi_m(M),    a < b,

where ``phi_m`` runs over the constant, the matrix entries and all products of
two entries, with functionally dependent monomials removed. Multiplicativity
is linear in ``c``; its nullspace is computed by SVD. The Jacobi identity is
quadratic in ``c`` and is examined on the nullspace through its polarised
bilinear form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bialgebra import UsageError
from .families import BracketFamily
from .group import GroupSpec, get_group, local_matrix, matmul
from .jet import Jet, seed, value
from .poisson import local_bivector

SV_TOL = 1e-9
PAIRS = ((0, 1), (0, 2), (1, 2))

# matrix entries used as Ansatz coordinates, in the order of the printed brackets
ANSATZ_ENTRIES = {
    "A3_1": ((1, 2), (0, 1), (0, 2)),  # X = M23, Y = M12, Z = M13
    "A3_2": ((0, 0), (1, 2), (0, 2)),  # X = M11, Y = M23, Z = M13
    "A3_3": ((0, 0), (1, 2), (0, 2)),
    "A3_4": ((0, 0), (1, 2), (0, 2)),
    "A3_5": ((0, 0), (1, 2), (0, 2)),
    "A3_6": ((1, 0), (0, 2), (1, 2)),  # S = M21, Y = M13, Z = M23
    "A3_7": ((1, 0), (0, 2), (1, 2)),
    "A3_8": ((0, 1), (0, 0), (1, 0)),  # X = M12, Y = M11, Z = M21
    "A3_9": ((0, 1), (0, 2), (1, 2)),  # M12, M13, M23
}

# printed upper coordinate for each Ansatz coordinate (None: not an upper coordinate)
ANSATZ_NAMES = {
    "A3_6": ("S", "Y", "Z"),
    "A3_7": ("S", "Y", "Z"),
    "A3_8": ("X", "Y", "Z"),
    "A3_9": ("M12", "M13", "M23"),
}

# keep |det dV/du| above this at sampled points
MIN_JACOBIAN = 0.05


@dataclass(frozen=True)
class Monomials:
    """Deduplicated monomial basis: each entry is a tuple of matrix indices."""

    gid: str
    terms: tuple

    def __len__(self) -> int:
        return len(self.terms)

    def evaluate(self, M):
        out = []
        for t in self.terms:
            v = 1.0
            for (i, j) in t:
                v = v * M[i][j]
            out.append(v)
        return out

    def label(self, k: int) -> str:
        t = self.terms[k]
        return "1" if not t else "*".join(f"M{i + 1}{j + 1}" for i, j in t)


@dataclass(frozen=True)
class AnsatzCoefficients:
    """``c[a, b, m]`` antisymmetric in ``(a, b)`` over a :class:`Monomials` basis."""

    c: np.ndarray
    monomials: Monomials

    @classmethod
    def from_vector(cls, v: np.ndarray, monomials: Monomials) -> AnsatzCoefficients:
        K = len(monomials)
        c = np.zeros((3, 3, K))
        for s, (a, b) in enumerate(PAIRS):
            c[a, b] = v[s * K:(s + 1) * K]
            c[b, a] = -c[a, b]
        return cls(c, monomials)

    def vector(self) -> np.ndarray:
        return np.concatenate([self.c[a, b] for a, b in PAIRS])


# ---------------------------------------------------------------- sampling


def _entries(M, idx):
    return [M[i][j] for i, j in idx]


def _local_box(g: GroupSpec):
    box = list(g.chart.local_box)
    if g.gid == "A3_7":
        # S = M21 stops being a coordinate where tan(theta) = 1/mu
        hi = np.arctan(1.0 / g.params["mu"]) - 0.1
        box[0] = (box[0][0], min(box[0][1], hi))
    return box


def _v_jacobian_det(g: GroupSpec, u: np.ndarray) -> np.ndarray:
    uj = seed(list(u))
    V = _entries(local_matrix(g, uj), ANSATZ_ENTRIES[g.gid])
    N = u.shape[1]
    D = np.stack([np.broadcast_to(v.grad, (3, N)) if isinstance(v, Jet) else np.zeros((3, N)) for v in V])
    return np.linalg.det(np.moveaxis(D, -1, 0))


def sample_points(g: GroupSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    """Local points, shape ``(3, n)``, where the Ansatz entries form a good chart."""
    box = _local_box(g)
    out = []
    have = 0
    while have < n:
        u = np.stack([rng.uniform(lo, hi, 2 * n) for lo, hi in box])
        ok = np.abs(_v_jacobian_det(g, u)) >= MIN_JACOBIAN
        out.append(u[:, ok])
        have += int(ok.sum())
    return np.concatenate(out, axis=1)[:, :n]


def sample_pairs(g: GroupSpec, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    return sample_points(g, rng, n), sample_points(g, rng, n)


# ---------------------------------------------------------------- monomials


def monomial_basis(g: GroupSpec, rng: np.random.Generator | None = None, n_points: int = 60,
                   tol: float = 1e-9) -> Monomials:
    """Constant, entries and pairwise entry products with dependent ones dropped.

    Candidates are evaluated at ``n_points`` random points and kept greedily in a
    fixed order when they are not in the span of those already kept.
    """
    rng = rng or np.random.default_rng(12345)
    n = g.dim
    idx = [(i, j) for i in range(n) for j in range(n)]
    cands = [()] + [(e,) for e in idx] + [(idx[a], idx[b]) for a in range(len(idx)) for b in range(a, len(idx))]
    u = sample_points(g, rng, n_points)
    M = local_matrix(g, list(u))
    cols = Monomials(g.gid, tuple(cands)).evaluate(M)
    cols = [np.broadcast_to(np.asarray(value(c), float), (n_points,)) for c in cols]
    kept, Q = [], np.zeros((n_points, 0))
    for t, col in zip(cands, cols):
        norm = np.linalg.norm(col)
        if norm == 0.0:
            continue
        r = col - Q @ (Q.T @ col)
        r = r - Q @ (Q.T @ r)
        if np.linalg.norm(r) > tol * norm:
            kept.append(t)
            Q = np.column_stack([Q, r / np.linalg.norm(r)])
    return Monomials(g.gid, tuple(kept))


def _monomial_values(mono: Monomials, M, N: int) -> np.ndarray:
    vals = mono.evaluate(M)
    return np.stack([np.broadcast_to(np.asarray(value(v), float), (N,)) for v in vals])


# ---------------------------------------------------------------- multiplicativity system


def _grad(v, nvars, N):
    if isinstance(v, Jet):
        return np.broadcast_to(v.grad, (nvars, N))
    return np.zeros((nvars, N))


def _pair_minors(G: np.ndarray) -> np.ndarray:
    """``m[(a,b), (c,d), N] = G[a,c] G[b,d] - G[a,d] G[b,c]`` over PAIRS."""
    out = np.zeros((3, 3, G.shape[-1]))
    for s, (a, b) in enumerate(PAIRS):
        for t, (c, d) in enumerate(PAIRS):
            out[s, t] = G[a, c] * G[b, d] - G[a, d] * G[b, c]
    return out


def multiplicativity_matrix(g: GroupSpec, up: np.ndarray, uq: np.ndarray, mono: Monomials) -> np.ndarray:
    """Rows: ``LHS - RHS`` of multiplicativity as linear functionals of the Ansatz vector.

    ``up``/``uq`` are local points (shape ``(3, N)``). Row order is pair-major
    within each sample; columns follow :meth:`AnsatzCoefficients.vector`.
    """
    if up.shape[1] < 1:
        raise UsageError("need at least one sample pair")
    N = up.shape[1]
    K = len(mono)
    idx = ANSATZ_ENTRIES[g.gid]
    jets = seed(list(up) + list(uq))
    Mp = local_matrix(g, jets[:3])
    Mq = local_matrix(g, jets[3:])
    Vpq = _entries(matmul(Mp, Mq), idx)
    A = np.stack([_grad(v, 6, N) for v in Vpq])  # (3, 6, N)
    Bp = np.stack([_grad(v, 6, N)[:3] for v in _entries(Mp, idx)])
    Bq = np.stack([_grad(v, 6, N)[3:] for v in _entries(Mq, idx)])
    # dV(pq)/dV(p) = dV(pq)/du_p (dV_p/du_p)^{-1}
    Gp = np.einsum("aiN,Nij->ajN", A[:, :3], np.linalg.inv(np.moveaxis(Bp, -1, 0)))
    Gq = np.einsum("aiN,Nij->ajN", A[:, 3:], np.linalg.inv(np.moveaxis(Bq, -1, 0)))
    mp, mq = _pair_minors(Gp), _pair_minors(Gq)
    phi_p = _monomial_values(mono, [[value(x) for x in row] for row in Mp], N)
    phi_q = _monomial_values(mono, [[value(x) for x in row] for row in Mq], N)
    Mpq = matmul([[value(x) for x in row] for row in Mp], [[value(x) for x in row] for row in Mq])
    phi_pq = _monomial_values(mono, Mpq, N)
    rows = np.zeros((N, 3, 3, K))
    for s in range(3):
        for t in range(3):
            rows[:, s, t] = (mp[s, t][:, None] * phi_p.T + mq[s, t][:, None] * phi_q.T)
        rows[:, s, s] -= phi_pq.T
    return rows.reshape(N * 3, 3 * K)


def nullspace(mat: np.ndarray, sv_tol: float = SV_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the right nullspace; relative singular-value cutoff."""
    mat = np.asarray(mat, float)
    if mat.size == 0:
        raise UsageError("nullspace of an empty matrix")
    if not np.all(np.isfinite(mat)):
        raise UsageError("nullspace: non-finite entries")
    _, s, vt = np.linalg.svd(mat, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > sv_tol * smax)) if smax > 0 else 0
    basis = vt[rank:].T
    # deterministic sign: largest-magnitude entry of each vector positive
    for k in range(basis.shape[1]):
        i = np.argmax(np.abs(basis[:, k]))
        if basis[i, k] < 0:
            basis[:, k] = -basis[:, k]
    return basis


def _column_scale(mat: np.ndarray) -> np.ndarray:
    s = np.linalg.norm(mat, axis=0)
    s[s == 0] = 1.0
    return s


def ansatz_nullspace(mat: np.ndarray, sv_tol: float = SV_TOL) -> np.ndarray:
    """Nullspace of the multiplicativity matrix after column equilibration.

    Columns are scaled to unit norm (monomials range over very different
    magnitudes); the basis is mapped back and re-orthonormalised.
    """
    s = _column_scale(mat)
    N = nullspace(mat / s, sv_tol)
    if N.shape[1] == 0:
        return N
    q, _ = np.linalg.qr(N / s[:, None])
    return nullspace_canonical(q)


def nullspace_canonical(B: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of ``span(B)``."""
    if B.shape[1] == 0:
        return B
    u, _, _ = np.linalg.svd(B, full_matrices=False)
    for k in range(u.shape[1]):
        i = np.argmax(np.abs(u[:, k]))
        if u[i, k] < 0:
            u[:, k] = -u[:, k]
    return u


def subspace_angle(A: np.ndarray, B: np.ndarray) -> float:
    """Largest principal angle between ``span(A)`` and ``span(B)`` (radians)."""
    if A.shape[1] != B.shape[1]:
        return float(np.pi / 2)
    if A.shape[1] == 0:
        return 0.0
    qa, _ = np.linalg.qr(A)
    qb, _ = np.linalg.qr(B)
    s = np.linalg.svd(qa.T @ qb, compute_uv=False)
    return float(np.arccos(np.clip(s.min(), -1.0, 1.0)))


# ---------------------------------------------------------------- Jacobi


def _ansatz_fields(g: GroupSpec, mono: Monomials, u: np.ndarray):
    """Monomial values and their V-gradients at local points: ``(K, N)``, ``(K, 3, N)``."""
    N = u.shape[1]
    uj = seed(list(u))
    M = local_matrix(g, uj)
    V = _entries(M, ANSATZ_ENTRIES[g.gid])
    D = np.stack([_grad(v, 3, N) for v in V])  # dV/du, (3, 3, N)
    Dinv = np.linalg.inv(np.moveaxis(D, -1, 0))  # (N, 3, 3): du/dV
    phis = mono.evaluate(M)
    val = np.stack([np.broadcast_to(np.asarray(value(p), float), (N,)) for p in phis])
    du = np.stack([_grad(p, 3, N) for p in phis])  # (K, 3, N)
    dV = np.einsum("kiN,Nij->kjN", du, Dinv)
    return val, dV


def jacobi_forms(g: GroupSpec, basis: np.ndarray, mono: Monomials, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric bilinear forms ``B[N, s, t]`` with ``Jacobiator(sum l_s v_s) = l^T B l``.

    Also returns a per-point scale (sum of magnitudes of the cancelling terms
    for unit-norm combinations).
    """
    d = basis.shape[1]
    val, dV = _ansatz_fields(g, mono, u)
    N = u.shape[1]
    # P[s, a, b, N] and dP[s, a, b, k, N] in V coordinates
    P = np.zeros((d, 3, 3, N))
    dP = np.zeros((d, 3, 3, 3, N))
    for s in range(d):
        c = AnsatzCoefficients.from_vector(basis[:, s], mono).c
        P[s] = np.einsum("abm,mN->abN", c, val)
        dP[s] = np.einsum("abm,mkN->abkN", c, dV)
    B = np.zeros((N, d, d))
    scale = np.zeros(N)
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        term = np.einsum("sdN,tdN->Nst", P[:, :, a], dP[:, b, c])
        B += term
        scale += np.abs(term).sum(axis=(1, 2))
    return 0.5 * (B + B.transpose(0, 2, 1)), scale


@dataclass
class JacobiSummary:
    span_dimension: int
    full_span_passes: bool
    n_quadratic_constraints: int
    max_form: float
    scale: float
    notes: list = field(default_factory=list)


def jacobi_filter(basis: np.ndarray, g: GroupSpec, n_points: int = 40, rng: np.random.Generator | None = None,
                  mono: Monomials | None = None, tol: float = 1e-8) -> JacobiSummary:
    """Whether the Jacobi identity holds on the whole span, else how many quadratic constraints act."""
    d = basis.shape[1]
    if d == 0:
        return JacobiSummary(0, True, 0, 0.0, 0.0, ["empty basis"])
    rng = rng or np.random.default_rng(0)
    mono = mono or monomial_basis(g)
    u = sample_points(g, rng, n_points)
    B, scale = jacobi_forms(g, basis, mono, u)
    # unit-norm basis vectors: the cancelling terms are O(1) unless they vanish structurally
    sc = 1.0 + float(scale.max())
    iu = np.triu_indices(d)
    Q = B[:, iu[0], iu[1]] * np.where(iu[0] == iu[1], 1.0, 2.0)
    smax = float(np.abs(Q).max())
    if smax <= tol * sc:
        return JacobiSummary(d, True, 0, smax, sc)
    s = np.linalg.svd(Q, compute_uv=False)
    rank = int(np.sum(s > tol * max(s[0], sc)))
    return JacobiSummary(d, False, rank, smax, sc)


def _project_to_variety(B: np.ndarray, lam: np.ndarray, iters: int = 200, tol: float = 1e-15) -> np.ndarray:
    """Gauss-Newton (minimum-norm steps) onto ``{l : l^T B_n l = 0 for all n}``."""
    x = lam.copy()
    for _ in range(iters):
        f = np.einsum("nst,s,t->n", B, x, x)
        if np.abs(f).max() <= tol * (x @ x):
            break
        Jm = 2.0 * np.einsum("nst,t->ns", B, x)
        step, *_ = np.linalg.lstsq(Jm, -f, rcond=1e-6)
        x = x + step
    return x


def jacobi_local_dimension(g: GroupSpec, basis: np.ndarray, lam: np.ndarray, mono: Monomials, u: np.ndarray,
                           rng: np.random.Generator | None = None, radius: float = 1e-3) -> int:
    """Dimension of the Jacobi variety near ``basis @ lam``.

    Random points within ``radius`` of ``lam`` are projected onto the variety
    and the displacements' rank is counted. Unlike a gradient-rank count this
    also works on non-reduced components (e.g. a squared linear constraint),
    where every point is singular.
    """
    rng = rng or np.random.default_rng(0)
    d = basis.shape[1]
    B, scale = jacobi_forms(g, basis, mono, u)
    B = B / float(scale.max() or 1.0)
    lam = np.asarray(lam, float) / np.linalg.norm(lam)
    lam = _project_to_variety(B, lam)
    disp = []
    for _ in range(3 * d + 3):
        xi = rng.standard_normal(d)
        x = _project_to_variety(B, lam + radius * xi / np.linalg.norm(xi))
        disp.append(x - lam)
    s = np.linalg.svd(np.array(disp), compute_uv=False)
    return int(np.sum(s > 0.02 * radius))


def jacobi_on_vector(g: GroupSpec, v: np.ndarray, mono: Monomials, u: np.ndarray) -> tuple[float, float]:
    """Max relative Jacobiator of a single Ansatz vector at local points ``u``."""
    B, scale = jacobi_forms(g, v[:, None], mono, u)
    return float(np.abs(B[:, 0, 0]).max()), float(scale.max())


# ---------------------------------------------------------------- printed families


def family_in_ansatz(g: GroupSpec, fam: BracketFamily, params: dict, u: np.ndarray):
    """Brackets of the Ansatz coordinates under a printed family, shape ``(3 pairs, N)``."""
    N = u.shape[1]
    uj = seed(list(u))
    V = _entries(local_matrix(g, uj), ANSATZ_ENTRIES[g.gid])
    D = np.stack([_grad(v, 3, N) for v in V])
    pl = local_bivector(g, fam, params, list(u))
    Pl = np.zeros((3, 3, N))
    for i in range(3):
        for j in range(3):
            Pl[i, j] = value(pl[i][j])
    PV = np.einsum("aiN,ijN,bjN->abN", D, Pl, D)
    return np.stack([PV[a, b] for a, b in PAIRS])


def fit_family(g: GroupSpec, fam: BracketFamily, params: dict, mono: Monomials, u: np.ndarray):
    """Least-squares Ansatz vector for a printed family and its relative fit residual."""
    N = u.shape[1]
    target = family_in_ansatz(g, fam, params, u)
    M = local_matrix(g, list(u))
    Phi = _monomial_values(mono, M, N).T  # (N, K)
    s = _column_scale(Phi)
    coefs = []
    worst = 0.0
    for k in range(3):
        x, *_ = np.linalg.lstsq(Phi / s, target[k], rcond=None)
        x = x / s
        r = np.abs(Phi @ x - target[k]).max()
        worst = max(worst, r / (1.0 + np.abs(target[k]).max()))
        coefs.append(x)
    return np.concatenate(coefs), worst


def projection_residual(v: np.ndarray, basis: np.ndarray) -> float:
    """``|v - P v| / |v|`` with ``P`` the orthogonal projector onto ``span(basis)``."""
    n = np.linalg.norm(v)
    if n == 0:
        return 0.0
    w = v - basis @ (basis.T @ v) if basis.shape[1] else v
    return float(np.linalg.norm(w) / n)


# ---------------------------------------------------------------- driver


@dataclass
class FamilyMembership:
    family: str
    fit_residual: float
    in_ansatz: bool
    projection_residual: float | None
    jacobi_residual: float | None
    local_dimension: int | None = None
    note: str = ""


@dataclass
class DeriveReport:
    gid: str
    n_monomials: int
    n_unknowns: int
    n_pairs: int
    nullspace_dimension: int
    stability_angle: float
    jacobi: JacobiSummary
    jacobi_dimension: int | None
    families: list


FIT_TOL = 1e-8


def derive_group(gid: str, seed_value: int = 0, n_pairs: int | None = None, rho: float = 0.5, mu: float = 1.0,
                 sv_tol: float = SV_TOL, fam_draws: int = 3) -> DeriveReport:
    """Assemble, solve and check the Ansatz for one group."""
    g = get_group(gid, rho=rho, mu=mu)
    rng = np.random.default_rng(seed_value)
    mono = monomial_basis(g, np.random.default_rng(seed_value + 1))
    K = len(mono)
    n_unknowns = 3 * K
    n_pairs = n_pairs or max(50, n_unknowns)
    up, uq = sample_pairs(g, rng, n_pairs)
    A = multiplicativity_matrix(g, up, uq, mono)
    N = ansatz_nullspace(A, sv_tol)
    up2, uq2 = sample_pairs(g, rng, n_pairs)
    N2 = ansatz_nullspace(multiplicativity_matrix(g, up2, uq2, mono), sv_tol)
    angle = subspace_angle(N, N2)
    jac = jacobi_filter(N, g, rng=rng, mono=mono)
    jdim = N.shape[1] if jac.full_span_passes else None

    from .families import FAMILIES, sample_params
    u = sample_points(g, rng, max(60, K + 20))
    fams = []
    for fam in FAMILIES[gid]:
        worst_fit, worst_proj, worst_jac = 0.0, 0.0, 0.0
        local_dims = []
        for _ in range(fam_draws):
            p = sample_params(fam, rng, g.params)
            v, fit = fit_family(g, fam, p, mono, u)
            worst_fit = max(worst_fit, fit)
            if fit <= FIT_TOL:
                worst_proj = max(worst_proj, projection_residual(v, N))
                jr, js = jacobi_on_vector(g, v, mono, u)
                worst_jac = max(worst_jac, jr / (1.0 + js))
                if N.shape[1]:
                    local_dims.append(jacobi_local_dimension(g, N, N.T @ v, mono, u))
        inside = bool(worst_fit <= FIT_TOL)
        note = "" if inside else "not expressible in the quadratic Ansatz"
        if not inside and not fam.quadratic:
            note = "outside the quadratic Ansatz (non-polynomial term)"
        fams.append(FamilyMembership(fam.name, worst_fit, inside,
                                     worst_proj if inside else None,
                                     worst_jac if inside else None,
                                     max(local_dims) if local_dims else None, note))
    if jdim is None:
        # the variety through the printed families (generic members are smooth points)
        dims = [f.local_dimension for f in fams if f.local_dimension is not None]
        jdim = max(dims) if dims else None
    return DeriveReport(gid, K, n_unknowns, n_pairs, N.shape[1], angle, jac, jdim, fams)


def derive_report_dict(rep: DeriveReport) -> dict:
    return {
        "group": rep.gid,
        "monomials": rep.n_monomials,
        "unknowns": rep.n_unknowns,
        "sample_pairs": rep.n_pairs,
        "nullspace_dimension": rep.nullspace_dimension,
        "stability_angle": rep.stability_angle,
        "jacobi": {
            "full_span_passes": rep.jacobi.full_span_passes,
            "quadratic_constraints": rep.jacobi.n_quadratic_constraints,
            "max_form": rep.jacobi.max_form,
            "scale": rep.jacobi.scale,
        },
        "jacobi_dimension": rep.jacobi_dimension,
        "families": [
            {
                "family": f.family,
                "fit_residual": f.fit_residual,
                "in_ansatz": f.in_ansatz,
                "projection_residual": f.projection_residual,
                "jacobi_residual": f.jacobi_residual,
                "local_dimension": f.local_dimension,
                "note": f.note,
            }
            for f in rep.families
        ],
    }


__all__ = [
    "ANSATZ_ENTRIES",
    "AnsatzCoefficients",
    "DeriveReport",
    "FamilyMembership",
    "JacobiSummary",
    "Monomials",
    "UsageError",
    "ansatz_nullspace",
    "derive_group",
    "derive_report_dict",
    "family_in_ansatz",
    "fit_family",
    "jacobi_filter",
    "jacobi_forms",
    "jacobi_local_dimension",
    "monomial_basis",
    "multiplicativity_matrix",
    "nullspace",
    "projection_residual",
    "sample_pairs",
    "sample_points",
    "subspace_angle",
]
