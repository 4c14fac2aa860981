import numpy as np
import pytest

from plgroups.algebra import GROUP_IDS
from plgroups.derive import (
    AnsatzCoefficients,
    UsageError,
    ansatz_nullspace,
    derive_group,
    derive_report_dict,
    fit_family,
    jacobi_filter,
    jacobi_local_dimension,
    jacobi_on_vector,
    monomial_basis,
    multiplicativity_matrix,
    nullspace,
    projection_residual,
    sample_pairs,
    sample_points,
    subspace_angle,
)
from plgroups.families import FAMILIES, get_family
from plgroups.group import get_group


@pytest.fixture(scope="module")
def a32():
    g = get_group("A3_2")
    rng = np.random.default_rng(7)
    mono = monomial_basis(g, np.random.default_rng(8))
    up, uq = sample_pairs(g, rng, 50)
    N = ansatz_nullspace(multiplicativity_matrix(g, up, uq, mono))
    u = sample_points(g, rng, 60)
    gens = []
    for p in ({"a": 1.0, "b": 0.0, "c": 0.0}, {"a": 0.0, "b": 1.0, "c": 0.0}, {"a": 0.0, "b": 0.0, "c": 1.0}):
        v, fit = fit_family(g, get_family("A3_2", 1), p, mono, u)
        assert fit <= 1e-10
        gens.append(v)
    return g, mono, N, u, np.array(gens).T


@pytest.fixture(scope="module")
def reports():
    return {gid: derive_group(gid, seed_value=0) for gid in GROUP_IDS}


def test_nullspace_examples():
    assert nullspace(np.eye(3)).shape == (3, 0)
    N = nullspace(np.ones((3, 3)))
    assert N.shape == (3, 2)
    assert np.allclose(np.ones((3, 3)) @ N, 0, atol=1e-14)
    assert np.allclose(N.T @ N, np.eye(2), atol=1e-14)
    with pytest.raises(UsageError):
        nullspace(np.zeros((0, 3)))
    with pytest.raises(UsageError):
        nullspace(np.array([[np.inf, 1.0]]))


def test_nullspace_is_deterministic(rng):
    m = rng.standard_normal((4, 7))
    assert np.array_equal(nullspace(m), nullspace(m.copy()))


def test_multiplicativity_matrix_shape_and_errors(a32):
    g, mono, *_ = a32
    rng = np.random.default_rng(1)
    up, uq = sample_pairs(g, rng, 5)
    A = multiplicativity_matrix(g, up, uq, mono)
    assert A.shape == (15, 3 * len(mono))
    assert np.all(A @ np.zeros(A.shape[1]) == 0)
    with pytest.raises(UsageError):
        multiplicativity_matrix(g, up[:, :0], uq[:, :0], mono)


def test_a32_printed_family_in_nullspace(a32):
    g, mono, N, u, gens = a32
    for k in range(3):
        assert projection_residual(gens[:, k], N) <= 1e-8
    # the span of the three generators lies inside the nullspace
    Q, _ = np.linalg.qr(gens)
    assert np.linalg.norm(Q - N @ (N.T @ Q)) <= 1e-6


def test_a32_jacobi(a32):
    g, mono, N, u, gens = a32
    # the printed three-parameter family satisfies Jacobi identically
    Q, _ = np.linalg.qr(gens)
    assert jacobi_filter(Q, g, rng=np.random.default_rng(3), mono=mono).full_span_passes
    # the full nullspace carries one extra direction that Jacobi removes
    summary = jacobi_filter(N, g, rng=np.random.default_rng(3), mono=mono)
    assert not summary.full_span_passes
    assert summary.n_quadratic_constraints == 1
    lam = N.T @ (gens @ np.array([0.3, -0.8, 1.1]))
    assert jacobi_local_dimension(g, N, lam, mono, u) == 3


def test_jacobi_filter_empty_basis(a32):
    g, mono, *_ = a32
    assert jacobi_filter(np.zeros((3 * len(mono), 0)), g, mono=mono).full_span_passes


def test_ansatz_coefficients_round_trip(a32):
    _, mono, N, *_ = a32
    v = N[:, 0]
    c = AnsatzCoefficients.from_vector(v, mono)
    assert np.array_equal(c.vector(), v)
    assert np.array_equal(c.c, -c.c.transpose(1, 0, 2))
    assert mono.label(0) == "1"


def test_a31_families_pass_jacobi():
    g = get_group("A3_1")
    rng = np.random.default_rng(4)
    mono = monomial_basis(g, np.random.default_rng(5))
    u = sample_points(g, rng, 60)
    for fam in FAMILIES["A3_1"]:
        from plgroups.families import sample_params

        v, fit = fit_family(g, fam, sample_params(fam, rng, g.params), mono, u)
        assert fit <= 1e-8
        res, scale = jacobi_on_vector(g, v, mono, u)
        assert res <= 1e-8 * (1 + scale)


def test_reported_dimensions(reports):
    assert reports["A3_2"].jacobi_dimension == 3
    assert reports["A3_3"].jacobi_dimension == 6


@pytest.mark.parametrize("gid", GROUP_IDS)
def test_printed_quadratic_families_project(reports, gid):
    rep = reports[gid]
    assert rep.stability_angle <= 1e-6
    for m in rep.families:
        fam = get_family(gid, int(m.family.split("/")[1]))
        if fam.quadratic:
            assert m.in_ansatz
            assert m.projection_residual <= 1e-8
            assert m.jacobi_residual <= 1e-8
        else:
            assert not m.in_ansatz
            assert "outside the quadratic Ansatz" in m.note


def test_non_quadratic_families_are_the_flagged_ones(reports):
    outside = sorted(m.family for rep in reports.values() for m in rep.families if not m.in_ansatz)
    assert outside == ["A3_4/2", "A3_6/2"]


def test_stability_between_sample_sets():
    g = get_group("A3_5")
    mono = monomial_basis(g, np.random.default_rng(2))
    rng = np.random.default_rng(9)
    a = ansatz_nullspace(multiplicativity_matrix(g, *sample_pairs(g, rng, 60), mono))
    b = ansatz_nullspace(multiplicativity_matrix(g, *sample_pairs(g, rng, 60), mono))
    assert subspace_angle(a, b) <= 1e-6


def test_report_dict_is_plain(reports):
    d = derive_report_dict(reports["A3_4"])
    assert d["group"] == "A3_4"
    assert isinstance(d["families"][1]["in_ansatz"], bool)
    assert d["families"][1]["projection_residual"] is None
