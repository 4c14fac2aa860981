import dataclasses

import numpy as np
import pytest

from plgroups.algebra import GROUP_IDS, DomainError
from plgroups.families import (
    CASIMIRS,
    FAMILIES,
    BracketFamily,
    BranchError,
    CasimirBranch,
    ParameterError,
    applicable_branches,
    get_family,
    printed_a37_casimir_1,
    printed_a37_casimir_2,
    sample_params,
)
from plgroups.group import get_group, local_matrix
from plgroups.jet import seed, value
from plgroups.poisson import (
    bivector_eval,
    casimir_batch,
    casimir_points,
    casimir_residual,
    casimir_value,
    jacobiator,
    jacobiator_batch,
    local_bivector,
    multiplicativity_batch,
    multiplicativity_residual,
)

ALL_FAMILIES = [f for gid in GROUP_IDS for f in FAMILIES[gid]]
ALL_BRANCHES = [b for gid in GROUP_IDS for b in CASIMIRS[gid]]


def rel(res, scale):
    return float(np.max(res / (1 + scale)))


def upper_at(g, u):
    return [float(value(v)) for v in g.chart.local_to_upper(*u)]


def test_sixteen_families():
    assert len(ALL_FAMILIES) == 16


@pytest.mark.parametrize("fam", ALL_FAMILIES, ids=lambda f: f.name)
def test_family_core_properties(fam, rng):
    g = get_group(fam.gid)
    for _ in range(5):
        p = sample_params(fam, rng, g.params)
        P = bivector_eval(fam, p, g.identity_upper(), g)
        assert np.abs(P).max() <= 1e-12
        assert np.array_equal(P, -P.T)
        res, scale = jacobiator_batch(g, fam, p, g.sample_local(rng, 50))
        assert rel(res, scale) <= 1e-9
        res, scale = multiplicativity_batch(g, fam, p, g.sample_local(rng, 50), g.sample_local(rng, 50))
        assert rel(res, scale) <= 1e-9


def test_a32_hand_values():
    fam = get_family("A3_2", 1)
    P = bivector_eval(fam, {"a": 1.0, "b": 1.0, "c": 1.0}, (2.0, 1.0, 0.0))
    assert P[0, 1] == 0.0
    assert P[0, 2] == 0.0
    assert P[1, 2] == pytest.approx(-1.5, abs=1e-15)


def test_a32_sklyanin_parameters(rng):
    fam = get_family("A3_2", 1)
    r12, r13 = 0.8, -1.3
    for X, Y, Z in rng.uniform([0.2, -2, -2], [5, 2, 2], size=(10, 3)):
        P = bivector_eval(fam, {"a": -r13, "b": 0.0, "c": r12}, (X, Y, Z))
        assert P[0, 2] == pytest.approx(r13 * X * (X - 1), abs=1e-13)
        assert P[1, 2] == pytest.approx(-r12 * (X * X - 1) - r13 * Y, abs=1e-13)


def test_parameter_errors():
    with pytest.raises(ParameterError):
        bivector_eval(get_family("A3_1", 1), {"a": 1, "b": 0, "c": 1, "d": 1}, (0.1, 0.2, 0.3))
    with pytest.raises(ParameterError):
        bivector_eval(get_family("A3_2", 1), {"a": 1}, (1.0, 0.2, 0.3))
    with pytest.raises(ValueError):
        bivector_eval(get_family("A3_2", 1), {"a": 1, "b": 0, "c": 0}, (1.0, 0.2))


def _fd_bivector_gradient(g, fam, p, u, h=1e-5):
    """d P^{ab}/d u^k by central differences in local coordinates, shape (3, 3, 3)."""
    out = np.zeros((3, 3, 3))
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        plus = np.array([[float(value(v)) for v in row] for row in local_bivector(g, fam, p, list(u + e))])
        minus = np.array([[float(value(v)) for v in row] for row in local_bivector(g, fam, p, list(u - e))])
        out[:, :, k] = (plus - minus) / (2 * h)
    return out


def _fd_jacobiator(g, fam, p, u):
    P = np.array([[float(value(v)) for v in row] for row in local_bivector(g, fam, p, list(u))])
    dP = _fd_bivector_gradient(g, fam, p, u)
    t = (np.einsum("da,bcd->abc", P, dP) + np.einsum("db,cad->abc", P, dP)
         + np.einsum("dc,abd->abc", P, dP))
    return float(np.abs(t).max())


def test_a31_family1_jacobiator_with_finite_difference_oracle():
    fam = get_family("A3_1", 1)
    p = {"a": 1.0, "b": 2.0, "c": 0.5, "d": -1.0}
    coords = (0.3, 0.7, -0.4)
    assert jacobiator(fam, p, coords) <= 1e-10
    assert _fd_jacobiator(get_group("A3_1"), fam, p, np.array(coords)) <= 1e-5


def test_zero_bivector_has_zero_jacobiator():
    fam = get_family("A3_2", 1)
    assert jacobiator(fam, {"a": 0.0, "b": 0.0, "c": 0.0}, (1.3, 0.2, -0.5)) == 0.0


@pytest.mark.parametrize("gid", GROUP_IDS)
def test_jet_derivatives_match_finite_differences(gid, rng):
    g = get_group(gid)
    for k in range(20):
        fam = FAMILIES[gid][k % len(FAMILIES[gid])]
        p = sample_params(fam, rng, g.params)
        u = g.sample_local(rng, 1)[:, 0]
        jets = seed(list(u))
        Pj = local_bivector(g, fam, p, jets)
        grad = np.zeros((3, 3, 3))
        for a in range(3):
            for b in range(3):
                v = Pj[a][b]
                grad[a, b] = v.grad if hasattr(v, "grad") else 0.0
        assert np.allclose(grad, _fd_bivector_gradient(g, fam, p, u), atol=1e-5, rtol=1e-5)


def test_multiplicativity_single_pair_and_identity(rng):
    fam = get_family("A3_2", 1)
    g = get_group("A3_2")
    p = {"a": 0.4, "b": -1.2, "c": 0.9}
    P, Q = g.point(1.7, 0.3, -0.8), g.point(0.6, -1.1, 0.5)
    assert multiplicativity_residual(fam, p, P, Q) <= 1e-9
    assert multiplicativity_residual(fam, p, P, g.identity()) <= 1e-12
    with pytest.raises(ValueError):
        multiplicativity_residual(fam, p, P, get_group("A3_3").identity())


def _fd_multiplicativity(g, fam, p, up, uq, h=1e-6):
    """Multiplicativity residual with the product Jacobian taken by central differences."""
    def product(v):
        Mp = np.array(local_matrix(g, list(v[:3])), float)
        Mq = np.array(local_matrix(g, list(v[3:])), float)
        return np.array(g.chart.matrix_to_upper((Mp @ Mq).tolist()), float)

    v0 = np.concatenate([up, uq])
    G = np.zeros((g.chart.n_upper, 6))
    for k in range(6):
        e = np.zeros(6)
        e[k] = h
        G[:, k] = (product(v0 + e) - product(v0 - e)) / (2 * h)

    def local_values(u):
        return np.array([[float(value(x)) for x in row] for row in local_bivector(g, fam, p, list(u))])

    lhs = G[:, :3] @ local_values(up) @ G[:, :3].T + G[:, 3:] @ local_values(uq) @ G[:, 3:].T
    rhs = bivector_eval(fam, p, product(v0), g)
    return float(np.abs(lhs - rhs).max())


def test_a36_family2_multiplicativity_with_oracle(rng):
    fam = get_family("A3_6", 2)
    g = get_group("A3_6")
    p = {"a": 0.0, "b": 0.0, "c": 1.0}
    up, uq = g.sample_local(rng, 50), g.sample_local(rng, 50)
    res, scale = multiplicativity_batch(g, fam, p, up, uq)
    assert rel(res, scale) <= 1e-9
    for k in range(5):
        assert _fd_multiplicativity(g, fam, p, up[:, k], uq[:, k]) <= 1e-6


def test_printed_arccos_term_is_not_multiplicative(rng):
    g = get_group("A3_6")
    good = get_family("A3_6", 2)

    def printed(U, p, gp):
        out = good.bivector(U, p, gp)
        C, S, Y, Z = U
        out[(2, 3)] = p["a"] * Z + p["b"] * Y + p["c"] * np.arccos(C)
        return out

    fam = dataclasses.replace(good, bivector=printed)
    p = {"a": 0.0, "b": 0.0, "c": 1.0}
    up, uq = g.sample_local(rng, 100), g.sample_local(rng, 100)
    res, scale = multiplicativity_batch(g, fam, p, up, uq)
    assert rel(res, scale) > 1e-3


def test_printed_a37_bracket_sign_is_not_multiplicative(rng):
    g = get_group("A3_7")
    good = get_family("A3_7", 2)

    def printed(U, p, gp):
        out = good.bivector(U, p, gp)
        out[(2, 3)] = -out[(2, 3)]
        return out

    fam = dataclasses.replace(good, bivector=printed)
    res, scale = multiplicativity_batch(g, fam, {"a": 1.0}, g.sample_local(rng, 50), g.sample_local(rng, 50))
    assert rel(res, scale) > 1e-2


@pytest.mark.parametrize("branch", ALL_BRANCHES, ids=lambda b: b.name)
def test_casimir_branches(branch, rng):
    g = get_group(branch.gid)
    for _ in range(3):
        p = branch.sample(rng, g.params)
        assert branch.guard(p, g.params)
        u = casimir_points(g, branch, p, rng, 100)
        assert u.shape[1] == 100
        res, scale = casimir_batch(g, branch, p, u)
        assert rel(res, scale) <= 1e-8


def test_a32_casimir_value():
    (branch,) = CASIMIRS["A3_2"]
    p = {"a": 1.0, "b": 1.0, "c": 1.0}
    assert casimir_value(branch, p, (2.0, 1.0, 0.0)) == pytest.approx(4.5, abs=1e-14)
    assert casimir_residual(branch, p, (2.0, 1.0, 0.0)) <= 1e-10


def test_constant_casimir_has_zero_residual(rng):
    (branch,) = CASIMIRS["A3_2"]
    const = dataclasses.replace(branch, func=lambda U, p, gp: 7.0)
    res, _ = casimir_batch(get_group("A3_2"), const, {"a": 1.0, "b": 2.0, "c": 3.0},
                           get_group("A3_2").sample_local(rng, 10))
    assert np.all(res == 0)


def test_a38_branches(rng):
    g = get_group("A3_8")
    by_label = {b.label: b for b in CASIMIRS["A3_8"]}
    p_ab = {"a": 0.0, "b": 0.0, "c": 1.0}
    assert by_label["C.a=b=0"] in applicable_branches("A3_8", 1, p_ab, {})
    p_ac = {"a": 0.0, "b": 1.0, "c": 0.0}
    assert applicable_branches("A3_8", 1, p_ac, {}) == (by_label["C.a=c=0"],)
    for p, label in ((p_ab, "C.a=b=0"), (p_ac, "C.a=c=0")):
        u = casimir_points(g, by_label[label], p, rng, 20)
        for k in range(u.shape[1]):
            assert casimir_residual(by_label[label], p, upper_at(g, u[:, k])) <= 1e-10


def test_branch_guard_and_singular_errors():
    branch = CASIMIRS["A3_1"][0]
    with pytest.raises(BranchError):
        casimir_residual(branch, {"a": 1, "b": 0, "c": 1, "d": 1}, (0.1, 0.2, 0.3))
    with pytest.raises(DomainError):
        # a X + b Y = 0 is singular for the A3_1 family-1 Casimir
        casimir_residual(branch, {"a": 1.0, "b": 1.0, "c": 1.0, "d": 1.0}, (0.5, -0.5, 0.3))


def test_a31_degenerate_c_zero_branch_is_needed():
    p = {"a": -0.5, "b": 0.0, "c": 0.0, "d": -1.0}
    labels = [b.label for b in applicable_branches("A3_1", 2, p, {})]
    assert labels == ["C2.c=0,a!=d"]


def _branch_with(func, label):
    base = next(b for b in CASIMIRS["A3_7"] if b.label == label)
    return dataclasses.replace(base, func=func)


def test_printed_a37_casimirs_fail(rng):
    g = get_group("A3_7")
    b1 = _branch_with(printed_a37_casimir_1, "C1")
    p = {"a": 0.7, "b": -1.1, "c": 0.4}
    res, scale = casimir_batch(g, b1, p, casimir_points(g, b1, p, rng, 50))
    assert rel(res, scale) > 1e-3
    b2 = _branch_with(printed_a37_casimir_2, "C2")
    res, scale = casimir_batch(g, b2, {"a": 1.0}, casimir_points(g, b2, {"a": 1.0}, rng, 50))
    assert rel(res, scale) > 1e-3


def test_casimir_is_constant_along_flows(rng):
    """A finite-difference check that does not use jets: C is unchanged along a Hamiltonian step."""
    g = get_group("A3_3")
    (branch,) = CASIMIRS["A3_3"]
    fam = get_family("A3_3", 1)
    p = sample_params(fam, rng, g.params)
    U = np.array([1.3, 0.4, -0.7])
    P = bivector_eval(fam, p, U, g)
    for H in range(3):
        step = 1e-6 * P[:, H]  # flow of the coordinate function U^H
        dC = (casimir_value(branch, p, U + step, g) - casimir_value(branch, p, U - step, g)) / 2e-6
        assert abs(dC) <= 1e-6


def test_family_dataclass_names():
    fam = get_family("A3_4", 2)
    assert isinstance(fam, BracketFamily)
    assert fam.name == "A3_4/2" and not fam.quadratic
    assert isinstance(CASIMIRS["A3_9"][0], CasimirBranch)
    with pytest.raises(KeyError):
        get_family("A3_2", 2)
