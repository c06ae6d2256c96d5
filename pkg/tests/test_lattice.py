import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matscale.lattice import (
    CeModel,
    Cluster,
    SymmetryGroup,
    apply_permutation,
    cluster_function,
    correlation,
    correlation_matrix,
    orbit,
    predict,
)


def full_symmetric_group(n):
    return SymmetryGroup(list(itertools.permutations(range(n))))


# --- types ------------------------------------------------------------------

def test_cluster_validation():
    Cluster(())
    Cluster((0, 2, 5))
    with pytest.raises(ValueError):
        Cluster((2, 1))
    with pytest.raises(ValueError):
        Cluster((1, 1))
    with pytest.raises(ValueError):
        Cluster((-1,))


def test_group_requires_identity_and_closure():
    with pytest.raises(ValueError, match="identity"):
        SymmetryGroup([[1, 0]])
    with pytest.raises(ValueError, match="closed"):
        SymmetryGroup([[0, 1, 2], [1, 2, 0]])  # missing the second rotation
    with pytest.raises(ValueError, match="bijection"):
        SymmetryGroup([[0, 0, 1]])
    SymmetryGroup([[0, 1, 2], [1, 2, 0], [2, 0, 1]])


def test_group_generate_closure():
    g = SymmetryGroup.generate([[1, 2, 3, 0]])
    assert len(g) == 4
    assert len(SymmetryGroup.generate([[1, 0, 2], [0, 2, 1]])) == 6  # S3


# --- cluster_function -------------------------------------------------------

def test_cluster_function_empty_cluster():
    assert cluster_function(Cluster(()), [1, -1, 1]) == 1


def test_cluster_function_pair():
    assert cluster_function(Cluster((0, 1)), [1, -1, 1]) == -1


def test_cluster_function_triple_by_hand():
    assert cluster_function(Cluster((0, 1, 2)), [-1, -1, 1]) == 1


def test_cluster_function_rejects_out_of_range():
    with pytest.raises(ValueError):
        cluster_function(Cluster((3,)), [1, -1])
    with pytest.raises(ValueError):
        cluster_function(Cluster((0,)), [1, 0, -1])


# --- orbit ------------------------------------------------------------------

def test_orbit_identity_group():
    c = Cluster((0, 2))
    assert orbit(c, SymmetryGroup.identity(4)) == {c}


def test_orbit_cyclic_singleton():
    got = orbit(Cluster((0,)), SymmetryGroup.cyclic(4))
    assert got == {Cluster((0,)), Cluster((1,)), Cluster((2,)), Cluster((3,))}


def test_orbit_swap_fixes_pair():
    g = SymmetryGroup([[0, 1], [1, 0]])
    assert orbit(Cluster((0, 1)), g) == {Cluster((0, 1))}


def test_orbit_size_divides_group_order():
    g = full_symmetric_group(4)
    for sites in [(), (0,), (0, 1), (0, 1, 2), (0, 1, 2, 3)]:
        assert len(g) % len(orbit(Cluster(sites), g)) == 0


# --- correlation ------------------------------------------------------------

def test_correlation_all_up_is_one():
    g = SymmetryGroup.cyclic(4)
    s = [1, 1, 1, 1]
    for sites in [(), (0,), (0, 1), (0, 2)]:
        assert correlation(Cluster(sites), g, s) == 1.0


def test_correlation_empty_cluster_is_one():
    assert correlation(Cluster(()), SymmetryGroup.cyclic(3), [-1, 1, -1]) == 1.0


def test_correlation_cyclic_half_filled():
    # orbit of {0} is all four sites: (1 + 1 - 1 - 1) / 4 = 0
    assert correlation(Cluster((0,)), SymmetryGroup.cyclic(4), [1, 1, -1, -1]) == 0.0


def test_correlation_bounded():
    rng = np.random.default_rng(0)
    g = SymmetryGroup.cyclic(6)
    for _ in range(50):
        s = rng.choice([-1, 1], size=6)
        c = Cluster(sorted(rng.choice(6, size=rng.integers(0, 4), replace=False)))
        assert abs(correlation(c, g, s)) <= 1.0


def test_correlation_invariant_under_group_action():
    groups = [
        SymmetryGroup.cyclic(6),
        full_symmetric_group(4),
        SymmetryGroup.generate([[1, 2, 3, 0, 4, 5], [0, 1, 2, 3, 5, 4]]),
    ]
    rng = np.random.default_rng(1)
    for g in groups:
        n = g.n_sites
        for _ in range(10):
            s = rng.choice([-1, 1], size=n)
            sites = sorted(rng.choice(n, size=int(rng.integers(0, 4)), replace=False))
            c = Cluster(sites)
            x = correlation(c, g, s)
            for p in g.permutations:
                assert correlation(c, g, apply_permutation(p, s)) == x


def test_flip_all_spins_parity():
    g = SymmetryGroup.cyclic(5)
    rng = np.random.default_rng(2)
    for _ in range(20):
        s = rng.choice([-1, 1], size=5)
        k = int(rng.integers(0, 4))
        c = Cluster(sorted(rng.choice(5, size=k, replace=False)))
        assert correlation(c, g, -s) == (-1) ** len(c) * correlation(c, g, s)


# --- correlation_matrix ------------------------------------------------------

def test_matrix_all_ones_config():
    g = SymmetryGroup.cyclic(3)
    m = correlation_matrix([[1, 1, 1]], [Cluster(()), Cluster((0,))], g)
    assert m.tolist() == [[1.0, 1.0]]


def test_matrix_matches_correlation_oracle():
    g = SymmetryGroup.cyclic(4)
    configs = [[1, -1, 1, -1], [-1, -1, 1, 1]]
    clusters = [Cluster((0,)), Cluster((0, 1))]
    m = correlation_matrix(configs, clusters, g)
    for i, s in enumerate(configs):
        for j, c in enumerate(clusters):
            assert m[i, j] == correlation(c, g, s)


def test_matrix_empty_cluster_column_is_ones():
    g = SymmetryGroup.identity(3)
    m = correlation_matrix([[1, -1, 1], [-1, -1, -1]], [Cluster(())], g)
    assert np.all(m == 1.0)


# --- predict ----------------------------------------------------------------

def test_predict_zero_coefficients_gives_intercept():
    g = SymmetryGroup.identity(3)
    model = CeModel([Cluster((0,)), Cluster((1,))], [0.0, 0.0], intercept=1.5)
    assert predict(model, [1, -1, 1], g) == 1.5


def test_predict_constant_term_model():
    g = SymmetryGroup.identity(2)
    model = CeModel([Cluster(())], [2.0], intercept=0.0)
    for s in ([1, 1], [-1, 1], [-1, -1]):
        assert predict(model, s, g) == 2.0


def test_predict_hand_dot_product():
    g = SymmetryGroup.identity(3)
    model = CeModel(
        [Cluster((0,)), Cluster((1, 2))], [2.0, -1.0], intercept=0.5
    )
    # s = (-1, 1, -1): X = (-1, -1); 0.5 + 2*(-1) + (-1)*(-1) = -0.5
    assert predict(model, [-1, 1, -1], g) == pytest.approx(-0.5)


def test_predict_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        CeModel([Cluster((0,))], [1.0, 2.0])


def test_predict_nonlinear_feature_map():
    from matscale.polyfeatures import enumerate_monomials, evaluate_features

    g = SymmetryGroup.identity(3)
    clusters = [Cluster((0,)), Cluster((1,))]
    fm = enumerate_monomials(2, 2)  # X1, X2, X1^2, X1X2, X2^2
    coeffs = np.array([0.5, -1.0, 0.0, 2.0, 0.25])
    model = CeModel(clusters, coeffs, intercept=1.0, feature_map=fm)
    s = [-1, 1, 1]
    x = correlation_matrix([s], clusters, g)[0]
    expected = 1.0 + float(coeffs @ evaluate_features(x, fm))
    assert predict(model, s, g) == pytest.approx(expected)
    # x = (-1, 1): features (-1, 1, 1, -1, 1) -> 1 + (-0.5 -1 +0 -2 +0.25)
    assert predict(model, s, g) == pytest.approx(-2.25)


def test_nonlinear_model_requires_matching_base_count():
    from matscale.polyfeatures import enumerate_monomials

    fm = enumerate_monomials(3, 2)
    with pytest.raises(ValueError, match="base correlations"):
        CeModel([Cluster((0,)), Cluster((1,))], np.zeros(9), feature_map=fm)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.data())
def test_orbit_always_contains_cluster(n, data):
    g = SymmetryGroup.cyclic(n)
    k = data.draw(st.integers(0, n))
    sites = tuple(sorted(data.draw(
        st.sets(st.integers(0, n - 1), min_size=k, max_size=k))))
    c = Cluster(sites)
    assert c in orbit(c, g)
