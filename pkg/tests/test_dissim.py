import itertools

import numpy as np
import pytest

from lart.core import Multiplex, build_supra, flat_index
from lart.dissim import (cross_layer_distance, cross_layer_terms, dissimilarity_matrix, distance,
                         same_layer_distance)
from lart.walk import walk

from conftest import copies, random_multiplex
from oracles import enumerate_walks, lart_distance, one_step, walktrap_distances


def _S(m, t, eps=1.0):
    return dissimilarity_matrix(walk(build_supra(m, eps), t)).values


def test_symmetric_zero_diagonal_nonnegative(rng):
    for _ in range(5):
        m = random_multiplex(rng, int(rng.integers(3, 20)), int(rng.integers(1, 5)), 0.3)
        S = _S(m, 2)
        assert np.array_equal(S, S.T)
        assert np.all(np.diag(S) == 0)
        assert S.min() >= 0


def test_matrix_agrees_with_pointwise_forms(rng):
    m = random_multiplex(rng, 6, 3, 0.4)
    tp = walk(build_supra(m), 3)
    S = dissimilarity_matrix(tp).values
    for a, b in itertools.combinations(range(18), 2):
        (i, k), (j, l) = divmod(a, 6)[::-1], divmod(b, 6)[::-1]
        assert S[a, b] == pytest.approx(distance(tp, i, k, j, l), abs=1e-12)


def test_distances_invariant_under_automorphism():
    # swapping the twins 0 and 1 of a star maps the multiplex onto itself
    m = Multiplex(5, 2, ([(0, 2), (1, 2), (2, 3), (3, 4)], [(0, 2), (1, 2), (0, 1), (2, 4)]))
    S = _S(m, 3)
    sigma = np.array([1, 0, 2, 3, 4])
    perm = np.concatenate([sigma, sigma + 5])
    np.testing.assert_allclose(S[np.ix_(perm, perm)], S, atol=1e-14)


def _oracle_check(m, t):
    layers = [sorted(e) for e in m.layers]
    P1, degree = one_step(m.num_nodes, layers)
    Pt = enumerate_walks(P1, t)
    S = _S(m, t)
    n, L = m.num_nodes, m.num_layers
    worst = 0.0
    for a, b in itertools.product(Pt, repeat=2):
        expect = lart_distance(Pt, degree, n, L, a, b)
        got = S[flat_index(*a, n), flat_index(*b, n)]
        worst = max(worst, abs(got - expect))
    return worst


@pytest.mark.parametrize("t", [1, 2, 3])
def test_enumeration_oracle_toy(toy, t):
    assert _oracle_check(toy, t) <= 1e-12


def test_enumeration_oracle_random(rng):
    # NL <= 12 so walk enumeration stays cheap
    for n, L in [(3, 3), (4, 3), (6, 2), (3, 4), (12, 1)]:
        m = random_multiplex(rng, n, L, 0.5)
        assert _oracle_check(m, int(rng.integers(1, 4))) <= 1e-12


def test_two_layers_have_no_third_term(rng):
    m = random_multiplex(rng, 7, 2, 0.4)
    tp = walk(build_supra(m), 4)
    for i in range(7):
        for j in range(7):
            assert cross_layer_terms(tp, i, 0, j, 1)[2] == 0.0


def test_cross_layer_requires_distinct_layers(toy):
    tp = walk(build_supra(toy), 2)
    with pytest.raises(ValueError):
        cross_layer_terms(tp, 0, 1, 1, 1)


@pytest.mark.parametrize("L", [2, 3, 4])
def test_identical_layers_replicas_coincide(rng, L):
    edges = random_multiplex(rng, 9, 1, 0.35).layers[0]
    m = copies(9, edges, L)
    tp = walk(build_supra(m), 3 * L)
    for i in range(9):
        for k, l in itertools.combinations(range(L), 2):
            assert cross_layer_distance(tp, i, k, i, l) <= 1e-12


def test_single_layer_reduces_to_walktrap(rng):
    for _ in range(10):
        n = int(rng.integers(2, 41))
        m = random_multiplex(rng, n, 1, float(rng.uniform(0.05, 0.4)))
        t = int(rng.integers(1, 6))
        expect = np.array(walktrap_distances(n, sorted(m.layers[0]), t))
        assert np.max(np.abs(_S(m, t) - expect)) <= 1e-12


def test_planted_communities_separate():
    # two 6-cliques joined by a single edge, replicated over two layers
    clique = lambda nodes: [(u, v) for u, v in itertools.combinations(nodes, 2)]
    edges = clique(range(6)) + clique(range(6, 12)) + [(5, 6)]
    m = copies(12, edges, 2)
    S = _S(m, 3)
    same = [S[a, b] for a, b in itertools.combinations(range(6), 2)]
    across = [S[a, b] for a in range(6) for b in range(6, 12)]
    assert max(same) < min(across)


def test_identity_walk_distance():
    # t = 0 is allowed at the library level; rows are indicator vectors
    m = copies(3, [(0, 1)], 2)
    sa = build_supra(m)
    S = dissimilarity_matrix(walk(sa, 0)).values
    expect = np.sqrt(1 / sa.degrees[0] + 1 / sa.degrees[1])
    assert S[0, 1] == pytest.approx(expect, abs=1e-15)


# --- triangle inequality --------------------------------------------------

def _max_violation(S):
    # S[x,z] - S[x,y] - S[y,z] over all triples
    return float(np.max(S[:, None, :] - S[:, :, None] - S[None, :, :]))


@pytest.mark.parametrize("L", [1, 2])
def test_triangle_inequality_up_to_two_layers(rng, L):
    # with at most two layers the swap is a fixed isometry, so S is a metric
    for _ in range(15):
        m = random_multiplex(rng, int(rng.integers(3, 12)), L, float(rng.uniform(0.1, 0.6)))
        for t in (1, 2, 3, 6):
            assert _max_violation(_S(m, t)) <= 1e-9


def test_triangle_inequality_default_walk_length(rng):
    for _ in range(10):
        L = int(rng.integers(3, 5))
        m = random_multiplex(rng, int(rng.integers(3, 10)), L, float(rng.uniform(0.1, 0.6)))
        assert _max_violation(_S(m, 3 * L)) <= 1e-9


def test_triangle_inequality_can_fail_for_four_layers_at_short_walks():
    # smallest counterexample found by search: node 2 in layers 0, 2 and 3.
    # the block swap differs per layer pair, so S is not a metric in general.
    tri = [(0, 1), (0, 2), (1, 2)]
    m = Multiplex(3, 4, (tri, tri, [(0, 1)], []))
    S = _S(m, 2)
    x, y, z = 2, 8, 11
    assert S[x, z] - S[x, y] - S[y, z] == pytest.approx(0.00116, abs=1e-5)
    assert _max_violation(_S(m, 12)) <= 1e-9


def test_cross_form_reduces_to_same_layer_form_on_doubled_layers(rng):
    # with two copies of one graph, (i, 0) vs (j, 1) sees the same walk as (i, 0) vs (j, 0)
    edges = random_multiplex(rng, 8, 1, 0.4).layers[0]
    tp = walk(build_supra(copies(8, edges, 2)), 4)
    for i, j in itertools.product(range(8), repeat=2):
        assert cross_layer_distance(tp, i, 0, j, 1) == pytest.approx(
            same_layer_distance(tp, i, j, 0), abs=1e-14)
