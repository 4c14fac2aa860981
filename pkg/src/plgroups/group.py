"""Charts, matrix group elements, multiplication and invariant vector fields.

Three coordinate systems appear for every group:

* lower coordinates ``(x, y, z)``: ``M = exp(z e1) exp(y e2) exp(x e3)``;
* upper coordinates: the capital-letter matrix-entry coordinates in which the
  Poisson brackets are written (``(X, Y, Z)``, ``(C, S, Y, Z)`` for A3_6/A3_7,
  ``(X, Y, Z, W)`` for A3_8, and the angles themselves for A3_9);
* local coordinates: an unconstrained 3-dimensional parameterisation used for
  all differentiation. It coincides with the upper coordinates except for
  A3_6/A3_7 (angle, Y, Z) and A3_8 ((X, Y, Z) with ``W = (1 + XZ)/Y``).

Every chart map accepts floats, arrays (batched) or :class:`Jet` values.
Matrices are nested lists so that entries may be jets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import DomainError, MatrixRep, StructureConstants, lie_algebra
from .jet import Jet, seed, value

HALF_PI = np.pi / 2
ANGLE_BOX = (-HALF_PI + 0.1, HALF_PI - 0.1)
POS_BOX = (0.2, 5.0)
LIN_BOX = (-2.0, 2.0)


def matmul(a, b):
    n, m, k = len(a), len(b), len(b[0])
    return [[sum(a[i][l] * b[l][j] for l in range(m)) for j in range(k)] for i in range(n)]


@dataclass(frozen=True)
class Chart:
    upper_names: tuple
    local_names: tuple
    local_box: tuple
    lower_to_matrix: Callable
    lower_to_upper: Callable
    upper_to_lower: Callable
    upper_to_matrix: Callable
    matrix_to_upper: Callable
    local_to_upper: Callable
    upper_to_local: Callable
    # d(local)/d(upper) as rows; None means the identity
    local_jacobian: Callable | None = None
    # functions of upper coords that vanish on the group
    constraints: tuple = ()
    # raises DomainError when an upper point leaves the chart
    check_domain: Callable | None = None

    @property
    def n_upper(self) -> int:
        return len(self.upper_names)

    def local_jac(self, U):
        if self.local_jacobian is None:
            n = self.n_upper
            return [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
        return self.local_jacobian(U)


@dataclass(frozen=True)
class GroupSpec:
    gid: str
    sc: StructureConstants
    rep: MatrixRep
    chart: Chart
    params: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.rep.dim

    def identity_upper(self):
        return tuple(float(v) for v in self.chart.lower_to_upper(0.0, 0.0, 0.0))

    def sample_local(self, rng: np.random.Generator, n: int) -> np.ndarray:
        box = self.chart.local_box
        return np.stack([rng.uniform(lo, hi, n) for lo, hi in box])

    def point(self, *upper) -> GroupPoint:
        return make_point(self, upper)

    def point_from_lower(self, x, y, z) -> GroupPoint:
        return make_point(self, self.chart.lower_to_upper(x, y, z))

    def point_from_local(self, *u) -> GroupPoint:
        return make_point(self, self.chart.local_to_upper(*u))

    def identity(self) -> GroupPoint:
        return make_point(self, self.identity_upper())


@dataclass(frozen=True)
class GroupPoint:
    group: GroupSpec = field(repr=False, compare=False)
    coords: tuple
    matrix: np.ndarray = field(repr=False, compare=False)

    @property
    def gid(self) -> str:
        return self.group.gid


def make_point(g: GroupSpec, upper) -> GroupPoint:
    upper = tuple(float(v) for v in upper)
    if g.chart.check_domain is not None:
        g.chart.check_domain(upper)
    m = np.array(g.chart.upper_to_matrix(upper), dtype=float)
    return GroupPoint(g, upper, m)


# --------------------------------------------------------------------------
# chart definitions


def _rowsum_domain(pred, msg):
    def check(U):
        if not pred(*[value(u) for u in U]):
            raise DomainError(msg)

    return check


def _chart_a31():
    return Chart(
        upper_names=("X", "Y", "Z"),
        local_names=("X", "Y", "Z"),
        local_box=(LIN_BOX, LIN_BOX, LIN_BOX),
        lower_to_matrix=lambda x, y, z: [[1.0, y, x * y + z], [0.0, 1.0, x], [0.0, 0.0, 1.0]],
        lower_to_upper=lambda x, y, z: (x, y, x * y + z),
        upper_to_lower=lambda X, Y, Z: (X, Y, Z - X * Y),
        upper_to_matrix=lambda U: [[1.0, U[1], U[2]], [0.0, 1.0, U[0]], [0.0, 0.0, 1.0]],
        matrix_to_upper=lambda M: (M[1][2], M[0][1], M[0][2]),
        local_to_upper=lambda X, Y, Z: (X, Y, Z),
        upper_to_local=lambda U: tuple(U),
    )


_X_POSITIVE = _rowsum_domain(lambda X, *rest: np.all(X > 0), "chart requires X > 0")


def _chart_triangular(upper_to_matrix, lower_to_upper, upper_to_lower):
    """Shared shape of the A3_2 ... A3_5 charts: X = M11 > 0, Y = M23, Z = M13."""
    return Chart(
        upper_names=("X", "Y", "Z"),
        local_names=("X", "Y", "Z"),
        local_box=(POS_BOX, LIN_BOX, LIN_BOX),
        lower_to_matrix=lambda x, y, z: upper_to_matrix(lower_to_upper(x, y, z)),
        lower_to_upper=lower_to_upper,
        upper_to_lower=upper_to_lower,
        upper_to_matrix=upper_to_matrix,
        matrix_to_upper=lambda M: (M[0][0], M[1][2], M[0][2]),
        local_to_upper=lambda X, Y, Z: (X, Y, Z),
        upper_to_local=lambda U: tuple(U),
        check_domain=_X_POSITIVE,
    )


def _chart_a32():
    return _chart_triangular(
        lambda U: [[U[0], U[0] * np.log(U[0]), U[2]], [0.0, U[0], U[1]], [0.0, 0.0, 1.0]],
        lambda x, y, z: (np.exp(-x), y, y + z),
        lambda X, Y, Z: (-np.log(X), Y, Z - Y),
    )


def _chart_a33():
    return _chart_triangular(
        lambda U: [[U[0], 0.0, U[2]], [0.0, U[0], U[1]], [0.0, 0.0, 1.0]],
        lambda x, y, z: (np.exp(-x), y, z),
        lambda X, Y, Z: (-np.log(X), Y, Z),
    )


def _chart_a34():
    return _chart_triangular(
        lambda U: [[U[0], 0.0, U[2]], [0.0, 1.0 / U[0], U[1]], [0.0, 0.0, 1.0]],
        lambda x, y, z: (np.exp(-x), -y, z),
        lambda X, Y, Z: (-np.log(X), -Y, Z),
    )


def _chart_a35(rho):
    return _chart_triangular(
        lambda U: [[U[0], 0.0, U[2]], [0.0, U[0] ** rho, U[1]], [0.0, 0.0, 1.0]],
        lambda x, y, z: (np.exp(-x), rho * y, z),
        lambda X, Y, Z: (-np.log(X), Y / rho, Z),
    )


def _rotation_jacobian(U):
    C, S = U[0], U[1]
    r2 = C * C + S * S
    return [[-S / r2, C / r2, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]


def _chart_a36():
    return Chart(
        upper_names=("C", "S", "Y", "Z"),
        local_names=("x", "Y", "Z"),
        local_box=(ANGLE_BOX, LIN_BOX, LIN_BOX),
        lower_to_matrix=lambda x, y, z: [
            [np.cos(x), -np.sin(x), y], [np.sin(x), np.cos(x), -z], [0.0, 0.0, 1.0]],
        lower_to_upper=lambda x, y, z: (np.cos(x), np.sin(x), y, -z),
        upper_to_lower=lambda C, S, Y, Z: (np.arctan2(S, C), Y, -Z),
        upper_to_matrix=lambda U: [[U[0], -U[1], U[2]], [U[1], U[0], U[3]], [0.0, 0.0, 1.0]],
        matrix_to_upper=lambda M: (M[0][0], M[1][0], M[0][2], M[1][2]),
        local_to_upper=lambda t, Y, Z: (np.cos(t), np.sin(t), Y, Z),
        upper_to_local=lambda U: (np.arctan2(U[1], U[0]), U[2], U[3]),
        local_jacobian=_rotation_jacobian,
        constraints=(lambda C, S, Y, Z: C * C + S * S - 1.0,),
    )


def _chart_a37(mu):
    def l2u(x, y, z):
        r = np.exp(-mu * x)
        return (r * np.cos(x), r * np.sin(x), y + mu * z, mu * y - z)

    def u2l(C, S, Y, Z):
        return (np.arctan2(S, C), (Y + mu * Z) / (1 + mu * mu), (mu * Y - Z) / (1 + mu * mu))

    return Chart(
        upper_names=("C", "S", "Y", "Z"),
        local_names=("x", "Y", "Z"),
        local_box=(ANGLE_BOX, LIN_BOX, LIN_BOX),
        lower_to_matrix=lambda x, y, z: _chart_a36().upper_to_matrix(l2u(x, y, z)),
        lower_to_upper=l2u,
        upper_to_lower=u2l,
        upper_to_matrix=lambda U: [[U[0], -U[1], U[2]], [U[1], U[0], U[3]], [0.0, 0.0, 1.0]],
        matrix_to_upper=lambda M: (M[0][0], M[1][0], M[0][2], M[1][2]),
        local_to_upper=lambda t, Y, Z: (np.exp(-mu * t) * np.cos(t), np.exp(-mu * t) * np.sin(t), Y, Z),
        upper_to_local=lambda U: (np.arctan2(U[1], U[0]), U[2], U[3]),
        local_jacobian=_rotation_jacobian,
        constraints=(
            lambda C, S, Y, Z: C * C + S * S - np.exp(-2 * mu * np.arctan2(S, C)),
        ),
    )


def _chart_a38():
    def l2u(x, y, z):
        h = np.exp(y / 2)
        return (x * h, h, z * h, x * z * h + 1.0 / h)

    return Chart(
        upper_names=("X", "Y", "Z", "W"),
        local_names=("X", "Y", "Z"),
        local_box=(LIN_BOX, POS_BOX, LIN_BOX),
        lower_to_matrix=lambda x, y, z: [[l2u(x, y, z)[1], l2u(x, y, z)[0]],
                                         [l2u(x, y, z)[2], l2u(x, y, z)[3]]],
        lower_to_upper=l2u,
        upper_to_lower=lambda X, Y, Z, W: (X / Y, 2 * np.log(Y), Z / Y),
        upper_to_matrix=lambda U: [[U[1], U[0]], [U[2], U[3]]],
        matrix_to_upper=lambda M: (M[0][1], M[0][0], M[1][0], M[1][1]),
        local_to_upper=lambda X, Y, Z: (X, Y, Z, (1.0 + X * Z) / Y),
        upper_to_local=lambda U: (U[0], U[1], U[2]),
        local_jacobian=lambda U: [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]],
        constraints=(lambda X, Y, Z, W: Y * W - X * Z - 1.0,),
        check_domain=_rowsum_domain(lambda X, Y, Z, W: np.all(Y > 0), "chart requires Y > 0"),
    )


def so3_matrix(x, y, z):
    cx, sx, cy, sy, cz, sz = np.cos(x), np.sin(x), np.cos(y), np.sin(y), np.cos(z), np.sin(z)
    return [
        [cx * cy, -sx * cy, sy],
        [cx * sy * sz + sx * cz, -sx * sy * sz + cx * cz, -cy * sz],
        [-cx * sy * cz + sx * sz, sx * sy * cz + cx * sz, cy * cz],
    ]


def _so3_angles(M):
    return (np.arctan2(-M[0][1], M[0][0]), np.arcsin(M[0][2]), np.arctan2(-M[1][2], M[2][2]))


def _so3_domain(U):
    if not np.all(np.abs(np.cos(value(U[1]))) > 1e-9):
        raise DomainError("Euler chart requires cos(y) != 0")


def _chart_a39():
    return Chart(
        upper_names=("x", "y", "z"),
        local_names=("x", "y", "z"),
        local_box=(ANGLE_BOX, ANGLE_BOX, ANGLE_BOX),
        lower_to_matrix=so3_matrix,
        lower_to_upper=lambda x, y, z: (x, y, z),
        upper_to_lower=lambda x, y, z: (x, y, z),
        upper_to_matrix=lambda U: so3_matrix(*U),
        matrix_to_upper=_so3_angles,
        local_to_upper=lambda x, y, z: (x, y, z),
        upper_to_local=lambda U: tuple(U),
        check_domain=_so3_domain,
    )


_CHARTS = {
    "A3_1": lambda p: _chart_a31(),
    "A3_2": lambda p: _chart_a32(),
    "A3_3": lambda p: _chart_a33(),
    "A3_4": lambda p: _chart_a34(),
    "A3_5": lambda p: _chart_a35(p["rho"]),
    "A3_6": lambda p: _chart_a36(),
    "A3_7": lambda p: _chart_a37(p["mu"]),
    "A3_8": lambda p: _chart_a38(),
    "A3_9": lambda p: _chart_a39(),
}

_GROUP_CACHE: dict = {}


def get_group(gid: str, rho: float = 0.5, mu: float = 1.0) -> GroupSpec:
    """The group ``gid``; ``rho`` (A3_5) and ``mu`` (A3_7) are frozen per instance."""
    if gid not in _CHARTS:
        raise KeyError(f"unknown group id {gid!r}")
    params = {"A3_5": {"rho": rho}, "A3_7": {"mu": mu}}.get(gid, {})
    key = (gid, tuple(sorted(params.items())))
    if key not in _GROUP_CACHE:
        sc, rep = lie_algebra(gid, rho=rho, mu=mu)
        _GROUP_CACHE[key] = GroupSpec(gid, sc, rep, _CHARTS[gid](params), params)
    return _GROUP_CACHE[key]


# --------------------------------------------------------------------------
# batched chart helpers (arrays or jets)


def local_matrix(g: GroupSpec, u):
    return g.chart.upper_to_matrix(g.chart.local_to_upper(*u))


def product_upper(g: GroupSpec, Mp, Mq):
    """Upper coordinates of ``Mp @ Mq`` (nested-list matrices, jets allowed)."""
    return g.chart.matrix_to_upper(matmul(Mp, Mq))


def in_chart(g: GroupSpec, U, margin: float = 0.0) -> np.ndarray:
    """Boolean mask of batched upper points that are safely inside the chart."""
    U = [np.asarray(value(u)) for u in U]
    shape = np.broadcast_shapes(*(u.shape for u in U))
    ok = np.ones(shape, dtype=bool)
    gid = g.gid
    if gid in ("A3_2", "A3_3", "A3_4", "A3_5"):
        ok &= U[0] > margin
    elif gid == "A3_8":
        ok &= U[1] > margin
    elif gid == "A3_9":
        ok &= np.cos(U[1]) > max(margin, 1e-9)
    return ok


# --------------------------------------------------------------------------
# operations on points


def multiply(p: GroupPoint, q: GroupPoint) -> GroupPoint:
    if p.gid != q.gid:
        raise ValueError(f"cannot multiply points of {p.gid} and {q.gid}")
    g = p.group
    M = p.matrix @ q.matrix
    U = g.chart.matrix_to_upper(M.tolist())
    if g.gid == "A3_9" and np.sqrt(M[0, 0] ** 2 + M[0, 1] ** 2) < 1e-9:
        raise DomainError("Euler chart requires cos(y) != 0 for the product")
    return make_point(g, U)


def coordinate_function(g: GroupSpec, name: str) -> Callable:
    """Function of upper coordinates returning the named upper or lower coordinate."""
    if name in g.chart.upper_names:
        k = g.chart.upper_names.index(name)
        return lambda U: U[k]
    lower = ("x", "y", "z")
    if name in lower:
        k = lower.index(name)
        return lambda U: g.chart.upper_to_lower(*U)[k]
    raise KeyError(f"{g.gid} has no coordinate {name!r}")


def coproduct_eval(f, p: GroupPoint, q: GroupPoint) -> float:
    """``Delta(f)(p (x) q) = f(p q)``; ``f`` is a coordinate name or a callable on upper coords."""
    pq = multiply(p, q)
    if isinstance(f, str):
        f = coordinate_function(p.group, f)
    return float(f(pq.coords))


def invariant_field(side: str, i: int, f, p: GroupPoint, g: GroupSpec | None = None) -> float:
    """Left (``p exp(t e_i)``) or right (``exp(t e_i) p``) derivative of ``f`` at ``p``.

    ``i`` is 1-based. ``f`` is a coordinate name or a callable on upper coordinates.
    """
    g = g or p.group
    if isinstance(f, str):
        f = coordinate_function(g, f)
    vals = invariant_fields(g, side, f, [np.array(c) for c in p.coords])
    return float(vals[i - 1])


def invariant_fields(g: GroupSpec, side: str, f, U) -> np.ndarray:
    """All three fields applied to ``f`` at batched upper points ``U``; shape ``(3,) + batch``.

    The perturbation ``exp(t e_i)`` enters as ``I + t rho(e_i)``, exact to first order.
    """
    U = [np.asarray(u, dtype=float) for u in U]
    shape = np.broadcast_shapes(*(u.shape for u in U))
    M = g.chart.upper_to_matrix(U)
    t = seed([np.zeros(shape)] * 3)
    n = g.dim
    E = [[(1.0 if a == b else 0.0) + sum(t[k] * g.rep[k][a, b] for k in range(3))
          for b in range(n)] for a in range(n)]
    if side == "left":
        Mt = matmul(M, E)
    elif side == "right":
        Mt = matmul(E, M)
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    out = f(g.chart.matrix_to_upper(Mt))
    if not isinstance(out, Jet):
        return np.zeros((3,) + shape)
    return np.broadcast_to(out.grad, (3,) + shape)


# --------------------------------------------------------------------------
# printed coproducts of the coordinate functions


def printed_coproduct(g: GroupSpec) -> Callable:
    """The closed-form Delta of the upper coordinates, ``(Up, Uq) -> U(pq)``.

    For A3_9 the angle formulas use ``cos(Delta y) = sqrt(1 - sin^2(Delta y))``
    and are valid for x, z in (0, pi).
    """
    gid = g.gid
    if gid == "A3_1":
        return lambda P, Q: (P[0] + Q[0], P[1] + Q[1], P[2] + Q[2] + P[1] * Q[0])
    if gid == "A3_2":
        return lambda P, Q: (P[0] * Q[0], P[0] * Q[1] + P[1],
                             P[0] * Q[2] + P[0] * np.log(P[0]) * Q[1] + P[2])
    if gid == "A3_3":
        return lambda P, Q: (P[0] * Q[0], P[0] * Q[1] + P[1], P[0] * Q[2] + P[2])
    if gid == "A3_4":
        return lambda P, Q: (P[0] * Q[0], Q[1] / P[0] + P[1], P[0] * Q[2] + P[2])
    if gid == "A3_5":
        rho = g.params["rho"]
        return lambda P, Q: (P[0] * Q[0], P[0] ** rho * Q[1] + P[1], P[0] * Q[2] + P[2])
    if gid in ("A3_6", "A3_7"):
        return lambda P, Q: (
            P[0] * Q[0] - P[1] * Q[1],
            P[1] * Q[0] + P[0] * Q[1],
            P[0] * Q[2] - P[1] * Q[3] + P[2],
            P[1] * Q[2] + P[0] * Q[3] + P[3],
        )
    if gid == "A3_8":
        # upper order (X, Y, Z, W)
        return lambda P, Q: (
            P[0] * Q[3] + P[1] * Q[0],
            P[1] * Q[1] + P[0] * Q[2],
            P[2] * Q[1] + P[3] * Q[2],
            P[2] * Q[0] + P[3] * Q[3],
        )
    if gid == "A3_9":
        return _so3_printed_coproduct
    raise KeyError(gid)


def _so3_printed_coproduct(P, Q, literal=False):
    cx1, sx1, cy1, sy1, cz1, sz1 = (np.cos(P[0]), np.sin(P[0]), np.cos(P[1]),
                                    np.sin(P[1]), np.cos(P[2]), np.sin(P[2]))
    cx2, sx2, cy2, sy2, cz2, sz2 = (np.cos(Q[0]), np.sin(Q[0]), np.cos(Q[1]),
                                    np.sin(Q[1]), np.cos(Q[2]), np.sin(Q[2]))
    dy = np.arcsin(cx1 * cy1 * sy2 + sx1 * cy1 * cy2 * sz2 + sy1 * cy2 * cz2)
    den = np.sqrt(1 - np.sin(dy)) if literal else np.sqrt(1 - np.sin(dy) ** 2)
    num_x = (-cx1 * cy1 * cx2 * cy2 + sx1 * cy1 * cx2 * sy2 * sz2 + sx1 * cy1 * sx2 * cz2
             + sy1 * cx2 * sy2 * cz2 - sy1 * sx2 * sz2)
    num_z = (cx1 * sy1 * cz1 * sy2 - sx1 * sz1 * sy2 + sx1 * sy1 * cz1 * cy2 * sz2
             + cx1 * sz1 * cy2 * sz2 - cy1 * cz1 * cy2 * cz2)
    with np.errstate(invalid="ignore"):
        dx = np.pi - np.arccos(num_x / den)
        dz = np.pi - np.arccos(num_z / den)
    return (dx, dy, dz)


def so3_coproduct_as_printed(P, Q):
    """A3_9 closed-form Delta read literally, with ``sqrt(1 - sin(Delta y))``."""
    return _so3_printed_coproduct(P, Q, literal=True)
