"""The nine real three-dimensional Lie algebras A3_1 ... A3_9.

Basis order is (e1, e2, e3); tensors are 0-indexed internally.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class DomainError(ValueError):
    """A point or input lies outside the region where an operation is defined."""


@dataclass(frozen=True)
class StructureConstants:
    """``c[i, j, k]`` with ``[e_i, e_j] = sum_k c[i, j, k] e_k``."""

    c: np.ndarray
    params: dict = field(default_factory=dict)

    def antisymmetry_residual(self) -> float:
        return float(np.abs(self.c + self.c.transpose(1, 0, 2)).max())

    def jacobi_residual(self) -> float:
        c = self.c
        t = (
            np.einsum("ijm,mkl->ijkl", c, c)
            + np.einsum("jkm,mil->ijkl", c, c)
            + np.einsum("kim,mjl->ijkl", c, c)
        )
        return float(np.abs(t).max())


@dataclass(frozen=True)
class MatrixRep:
    mats: tuple

    @property
    def dim(self) -> int:
        return self.mats[0].shape[0]

    def __getitem__(self, i):
        return self.mats[i]


def structure_constants(relations: dict, **params) -> StructureConstants:
    """Build ``c`` from ``{(i, j): (c1, c2, c3)}`` with 1-based generator labels."""
    c = np.zeros((3, 3, 3))
    for (i, j), coeffs in relations.items():
        c[i - 1, j - 1] = coeffs
        c[j - 1, i - 1] = -np.asarray(coeffs, dtype=float)
    return StructureConstants(c, dict(params))


def algebra_bracket(a, b, sc: StructureConstants) -> np.ndarray:
    """Bracket of two coefficient triples."""
    return np.einsum("i,j,ijk->k", np.asarray(a, float), np.asarray(b, float), sc.c)


def rep_residual(rep: MatrixRep, sc: StructureConstants) -> float:
    worst = 0.0
    for i in range(3):
        for j in range(3):
            lhs = rep[i] @ rep[j] - rep[j] @ rep[i]
            rhs = sum(sc.c[i, j, k] * rep[k] for k in range(3))
            worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


def check_rep(rep: MatrixRep, sc: StructureConstants, tol: float = 1e-14) -> bool:
    return rep_residual(rep, sc) <= tol


def matrix_exp(m, tol: float = 1e-15) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring with a truncated Taylor series.

    Used as an independent oracle for the closed-form group elements.
    """
    m = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix_exp: non-finite entries")
    norm = np.abs(m).sum(axis=1).max() if m.size else 0.0
    s = max(0, int(np.ceil(np.log2(norm / 0.5))) if norm > 0.5 else 0)
    a = m / 2.0**s
    out = np.eye(m.shape[0])
    term = np.eye(m.shape[0])
    # ||a|| <= 1/2, so the tail after a term below tol/2 is below tol
    for k in range(1, 60):
        term = term @ a / k
        out = out + term
        if np.abs(term).max() < tol * 1e-2:
            break
    for _ in range(s):
        out = out @ out
    return out


def _mat(rows, scale=1.0):
    return np.array(rows, dtype=float) * scale


def _build():
    out = {}
    def e(i, j, v=1.0, n=3):
        m = np.zeros((n, n))
        m[i - 1, j - 1] = v
        return m

    # A3_1 (Heisenberg)
    out["A3_1"] = (
        structure_constants({(2, 3): (1, 0, 0)}),
        MatrixRep((e(1, 3), e(1, 2), e(2, 3))),
    )
    # A3_2
    out["A3_2"] = (
        structure_constants({(1, 3): (1, 0, 0), (2, 3): (1, 1, 0)}),
        MatrixRep((e(1, 3), e(1, 3) + e(2, 3), _mat([[-1, -1, 0], [0, -1, 0], [0, 0, 0]]))),
    )
    # A3_3 (book algebra)
    out["A3_3"] = (
        structure_constants({(1, 3): (1, 0, 0), (2, 3): (0, 1, 0)}),
        MatrixRep((e(1, 3), e(2, 3), _mat([[-1, 0, 0], [0, -1, 0], [0, 0, 0]]))),
    )
    # A3_4 ((1+1) Poincare)
    out["A3_4"] = (
        structure_constants({(1, 3): (1, 0, 0), (2, 3): (0, -1, 0)}),
        MatrixRep((e(1, 3), e(2, 3, -1.0), _mat([[-1, 0, 0], [0, 1, 0], [0, 0, 0]]))),
    )
    return out


_FIXED = _build()


def lie_algebra(gid: str, rho: float = 0.5, mu: float = 1.0) -> tuple[StructureConstants, MatrixRep]:
    """Structure constants and faithful representation of algebra ``gid``.

    ``rho`` only affects A3_5 (``0 < |rho| < 1``), ``mu`` only A3_7 (``mu > 0``).
    """
    if gid in _FIXED:
        return _FIXED[gid]
    if gid == "A3_5":
        if not 0 < abs(rho) < 1:
            raise ValueError(f"A3_5 requires 0 < |rho| < 1, got rho={rho}")
        sc = structure_constants({(1, 3): (1, 0, 0), (2, 3): (0, rho, 0)}, rho=rho)
        rep = MatrixRep((
            _mat([[0, 0, 1], [0, 0, 0], [0, 0, 0]]),
            _mat([[0, 0, 0], [0, 0, rho], [0, 0, 0]]),
            _mat([[-1, 0, 0], [0, -rho, 0], [0, 0, 0]]),
        ))
        return sc, rep
    if gid == "A3_6":
        sc = structure_constants({(1, 3): (0, -1, 0), (2, 3): (1, 0, 0)})
        rep = MatrixRep((
            _mat([[0, 0, 0], [0, 0, -1], [0, 0, 0]]),
            _mat([[0, 0, 1], [0, 0, 0], [0, 0, 0]]),
            _mat([[0, -1, 0], [1, 0, 0], [0, 0, 0]]),
        ))
        return sc, rep
    if gid == "A3_7":
        if not mu > 0:
            raise ValueError(f"A3_7 requires mu > 0, got mu={mu}")
        sc = structure_constants({(1, 3): (mu, -1, 0), (2, 3): (1, mu, 0)}, mu=mu)
        rep = MatrixRep((
            _mat([[0, 0, mu], [0, 0, -1], [0, 0, 0]]),
            _mat([[0, 0, 1], [0, 0, mu], [0, 0, 0]]),
            _mat([[-mu, -1, 0], [1, -mu, 0], [0, 0, 0]]),
        ))
        return sc, rep
    if gid == "A3_8":
        sc = structure_constants({(1, 3): (0, -2, 0), (1, 2): (1, 0, 0), (2, 3): (0, 0, 1)})
        rep = MatrixRep((
            _mat([[0, 0], [1, 0]]),
            _mat([[1, 0], [0, -1]], 0.5),
            _mat([[0, 1], [0, 0]]),
        ))
        return sc, rep
    if gid == "A3_9":
        sc = structure_constants({(1, 2): (0, 0, 1), (2, 3): (1, 0, 0), (3, 1): (0, 1, 0)})
        rep = MatrixRep((
            _mat([[0, 0, 0], [0, 0, -1], [0, 1, 0]]),
            _mat([[0, 0, 1], [0, 0, 0], [-1, 0, 0]]),
            _mat([[0, -1, 0], [1, 0, 0], [0, 0, 0]]),
        ))
        return sc, rep
    raise KeyError(f"unknown group id {gid!r}")


GROUP_IDS = tuple(f"A3_{i}" for i in range(1, 10))
