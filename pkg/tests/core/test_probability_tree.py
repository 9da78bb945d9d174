from itertools import product

import numpy as np
import pytest

from crowdtrack.core.feature_matrix import FeatureMatrix, build_possibility_matrix
from crowdtrack.core.probability_tree import (
    ProbabilityTree,
    assign,
    assign_pairs,
    build_probability_tree,
    pair_conditionals,
    pair_posteriors,
    posteriors,
    propagate_priors,
    update_priors,
)
from tests.conftest import observation


def random_tree(rng, max_blobs: int, scale: float = 1.0, integer_scores: bool = False):
    shape = tuple(int(n) for n in rng.integers(1, max_blobs + 1, size=3))
    if integer_scores:
        edge_scores = rng.integers(1, 4, size=shape[:2]).astype(float)
        leaf_scores = rng.integers(1, 4, size=shape).astype(float)
    else:
        edge_scores = rng.uniform(0.1, 4.0, size=shape[:2])
        leaf_scores = rng.uniform(0.1, 4.0, size=shape)
    edge_permitted = rng.random(shape[:2]) < 0.7
    leaf_permitted = rng.random(shape) < 0.7
    tree = ProbabilityTree.from_scores(scale * edge_scores, scale * leaf_scores, edge_permitted, leaf_permitted)
    priors = rng.dirichlet(np.ones(shape[0]))
    return tree, priors


def oracle_conditionals(edge_scores, leaf_scores, edge_permitted, leaf_permitted):
    n_i, n_j, n_k = np.shape(leaf_scores)
    edges = [(i, j) for i, j in product(range(n_i), range(n_j)) if edge_permitted[i][j]]
    leaves = [
        (i, j, k)
        for i, j, k in product(range(n_i), range(n_j), range(n_k))
        if edge_permitted[i][j] and leaf_permitted[i][j][k]
    ]
    edge_total = sum(edge_scores[i][j] for i, j in edges)
    root_totals = {root: sum(leaf_scores[i][j][k] for i, j, k in leaves if i == root) for root in range(n_i)}

    edge = np.zeros((n_i, n_j))
    leaf = np.zeros((n_i, n_j, n_k))
    for i, j in edges:
        edge[i, j] = edge_scores[i][j] / edge_total
    for i, j, k in leaves:
        if root_totals[i] > 0:
            leaf[i, j, k] = leaf_scores[i][j][k] / root_totals[i]
    return edge, leaf


def oracle_posteriors(edge, leaf, priors):
    n_i, n_j, n_k = leaf.shape
    products = {
        (i, j, k): edge[i, j] * leaf[i, j, k] * priors[i] for i, j, k in product(range(n_i), range(n_j), range(n_k))
    }
    total = sum(products.values())
    return {key: value / total for key, value in products.items()}


def oracle_assign(posterior: np.ndarray) -> list[tuple[int, int, int]]:
    leaves = sorted(
        ((float(posterior[i, j, k]), i, j, k) for i, j, k in np.ndindex(posterior.shape) if posterior[i, j, k] > 0),
        key=lambda leaf: (-leaf[0], leaf[1], leaf[2], leaf[3]),
    )
    used_i, used_j, used_k = set(), set(), set()
    matches = []
    for _, i, j, k in leaves:
        if i in used_i or j in used_j or k in used_k:
            continue
        matches.append((i, j, k))
        used_i.add(i)
        used_j.add(j)
        used_k.add(k)
    return matches


def test_single_chain():
    tree = ProbabilityTree.from_scores(np.array([[1.7]]), np.array([[[3.1]]]))

    assert tree.edge_conditionals()[0, 0] == 1.0
    assert tree.leaf_conditionals()[0, 0, 0] == 1.0

    tree = posteriors(tree, np.array([1.0]))
    assert tree.posterior()[0, 0, 0] == 1.0
    assert assign(tree) == [(0, 0, 0)]


def test_two_symmetric_leaves():
    tree = ProbabilityTree.from_scores(np.array([[2.0]]), np.array([[[1.5, 1.5]]]))

    assert tree.leaf_conditionals().tolist() == [[[0.5, 0.5]]]


def test_leaf_conditionals_sum_to_one_per_root(rng):
    for _ in range(200):
        tree, _ = random_tree(rng, 4)

        totals = tree.leaf_conditionals().sum(axis=(1, 2))
        has_leaves = tree.leaf_permitted().any(axis=(1, 2))

        assert totals[has_leaves] == pytest.approx(np.ones(int(has_leaves.sum())))
        assert np.all(totals[~has_leaves] == 0)


def test_crowded_root_does_not_outweigh_lone_root():
    edge_permitted = np.array([[True, False], [False, True]])
    leaf_scores = np.zeros((2, 2, 2))
    leaf_scores[0, 0, 0] = 1.0
    leaf_scores[1, 1, 0] = 1.2
    leaf_scores[1, 1, 1] = 1.2

    tree = ProbabilityTree.from_scores(np.ones((2, 2)), leaf_scores, edge_permitted, leaf_scores > 0)
    tree = posteriors(tree, np.array([0.5, 0.5]))

    assert tree.leaf_conditionals()[0, 0, 0] == 1.0
    assert tree.leaf_conditionals()[1, 1].tolist() == [0.5, 0.5]
    assert assign(tree) == [(0, 0, 0), (1, 1, 1)]


def test_priors_pass_through():
    tree = ProbabilityTree(np.array([[0.5], [0.5]]), np.array([[[0.5]], [[0.5]]]))

    tree = posteriors(tree, np.array([0.8, 0.2]))

    assert tree.posterior()[:, 0, 0] == pytest.approx([0.8, 0.2])


def test_hand_built_tree_matches_brute_force():
    edge_scores = [[1.9, 1.3], [0.0, 1.6]]
    leaf_scores = [[[2.8, 1.1], [1.4, 2.2]], [[0.0, 0.0], [2.5, 3.0]]]
    edge_permitted = [[True, True], [False, True]]
    leaf_permitted = [[[True, True], [True, True]], [[False, False], [True, True]]]
    priors = np.array([0.6, 0.4])

    tree = ProbabilityTree.from_scores(
        np.array(edge_scores), np.array(leaf_scores), np.array(edge_permitted), np.array(leaf_permitted)
    )
    tree = posteriors(tree, priors)

    edge, leaf = oracle_conditionals(edge_scores, leaf_scores, edge_permitted, leaf_permitted)
    assert np.max(np.abs(tree.edge_conditionals() - edge)) <= 1e-12
    assert np.max(np.abs(tree.leaf_conditionals() - leaf)) <= 1e-12
    for (i, j, k), value in oracle_posteriors(edge, leaf, priors).items():
        assert abs(tree.posterior()[i, j, k] - value) <= 1e-12
    assert len(tree.leaves()) == 6


def test_random_trees_match_brute_force(rng):
    for _ in range(200):
        tree, priors = random_tree(rng, 4)
        tree = posteriors(tree, priors)
        if tree.is_empty():
            continue

        edge = tree.edge_conditionals()
        leaf = tree.leaf_conditionals()
        for (i, j, k), value in oracle_posteriors(edge, leaf, priors).items():
            assert abs(tree.posterior()[i, j, k] - value) <= 1e-12


def test_posteriors_sum_to_one(rng):
    for _ in range(1000):
        tree, priors = random_tree(rng, 5)
        tree = posteriors(tree, priors)

        posterior = tree.posterior()
        assert np.all((posterior >= 0) & (posterior <= 1))
        assert np.all(posterior[~tree.leaf_permitted()] == 0)
        if not tree.is_empty():
            assert abs(posterior.sum() - 1.0) <= 1e-9


def test_scale_invariance():
    for seed in range(1000):
        tree, priors = random_tree(np.random.default_rng(seed), 5)
        scaled, _ = random_tree(np.random.default_rng(seed), 5, scale=7.3)

        tree = posteriors(tree, priors)
        scaled = posteriors(scaled, priors)

        assert np.allclose(tree.edge_conditionals(), scaled.edge_conditionals(), rtol=0, atol=1e-12)
        assert np.allclose(tree.leaf_conditionals(), scaled.leaf_conditionals(), rtol=0, atol=1e-12)
        assert np.allclose(tree.posterior(), scaled.posterior(), rtol=0, atol=1e-12)
        assert assign(tree) == assign(scaled)


def test_assign_matches_greedy_oracle(rng):
    for case in range(10000):
        tree, priors = random_tree(rng, 4, integer_scores=case % 2 == 0)
        tree = posteriors(tree, priors)

        matches = assign(tree)

        assert matches == oracle_assign(tree.posterior())
        for axis in range(3):
            indices = [match[axis] for match in matches]
            assert len(indices) == len(set(indices))


def test_assign_examples():
    posterior = np.zeros((2, 2, 2))
    posterior[0, 0, 0] = 0.6
    posterior[0, 0, 1] = 0.3
    posterior[1, 1, 1] = 0.1
    tree = ProbabilityTree(np.ones((2, 2)), np.ones((2, 2, 2)), posterior=posterior)

    assert assign(tree) == [(0, 0, 0), (1, 1, 1)]


def test_assign_tie_goes_to_lowest_index():
    posterior = np.zeros((2, 2, 2))
    posterior[1, 1, 1] = 0.5
    posterior[0, 0, 0] = 0.5
    tree = ProbabilityTree(np.ones((2, 2)), np.ones((2, 2, 2)), posterior=posterior)

    assert assign(tree) == [(0, 0, 0), (1, 1, 1)]


def test_assign_single_positive_leaf():
    posterior = np.zeros((1, 2, 3))
    posterior[0, 1, 2] = 1.0
    tree = ProbabilityTree(np.ones((1, 2)), np.ones((1, 2, 3)), posterior=posterior)

    assert assign(tree) == [(0, 1, 2)]


def test_zero_priors_give_empty_tree():
    tree = ProbabilityTree.from_scores(np.ones((2, 2)), np.ones((2, 2, 2)))

    tree = posteriors(tree, np.zeros(2))

    assert tree.is_empty()
    assert assign(tree) == []


def test_forbidden_edge_blocks_its_leaves():
    tree = ProbabilityTree.from_scores(
        np.ones((1, 2)), np.ones((1, 2, 1)), np.array([[True, False]]), np.ones((1, 2, 1), dtype=bool)
    )

    assert tree.leaves() == [(0, 0, 0)]
    assert tree.leaf_conditionals()[0, 1, 0] == 0.0
    assert tree.edge_conditionals().tolist() == [[1.0, 0.0]]


@pytest.mark.parametrize(
    ("edges", "expected"),
    [
        ([[1.0]], [1.0]),
        ([[0.5], [0.5]], [1.0]),
        ([[0.9, 0.7], [0.4, 0.0]], [0.65, 0.35]),
    ],
)
def test_propagate_priors(edges, expected):
    assert propagate_priors(np.array(edges)) == pytest.approx(expected)


def test_newborn_gets_smallest_prior():
    priors = propagate_priors(np.array([[0.6, 0.0, 0.4]]))

    assert priors == pytest.approx([0.6 / 1.4, 0.4 / 1.4, 0.4 / 1.4])


def test_priors_without_edges_are_uniform():
    assert propagate_priors(np.zeros((2, 4))) == pytest.approx([0.25] * 4)
    assert propagate_priors(np.zeros((0, 0))).size == 0


def test_update_priors_sums_to_one(rng):
    for _ in range(100):
        tree, _ = random_tree(rng, 5)

        priors = update_priors(tree)

        assert priors.shape == (tree.shape()[1],)
        assert priors.sum() == pytest.approx(1.0)
        assert np.all(priors > 0)


def test_build_tree_prefers_straight_path(feature_config):
    earlier = [observation(0, 10, 20)]
    previous = [observation(0, 15, 20)]
    current = [observation(0, 20, 20), observation(1, 14, 25)]
    fm_ij = FeatureMatrix.from_observations(earlier, previous, feature_config)
    fm_jk = FeatureMatrix.from_observations(previous, current, feature_config)

    tree = build_probability_tree(
        earlier,
        previous,
        current,
        fm_ij,
        fm_jk,
        build_possibility_matrix(fm_ij, feature_config),
        build_possibility_matrix(fm_jk, feature_config),
        feature_config,
    )
    tree = posteriors(tree, np.array([1.0]))

    assert tree.shape() == (1, 1, 2)
    assert tree.edge_conditionals()[0, 0] == 1.0
    assert tree.posterior()[0, 0, 0] > tree.posterior()[0, 0, 1]
    assert assign(tree) == [(0, 0, 0)]


def test_build_tree_orients_matrices(feature_config):
    earlier = [observation(0, 10, 10), observation(1, 200, 10)]
    previous = [observation(0, 204, 10)]
    current = [observation(0, 208, 10), observation(1, 400, 10), observation(2, 500, 10)]
    fm_ij = FeatureMatrix.from_observations(earlier, previous, feature_config)
    fm_jk = FeatureMatrix.from_observations(previous, current, feature_config)

    tree = build_probability_tree(
        earlier,
        previous,
        current,
        fm_ij,
        fm_jk,
        build_possibility_matrix(fm_ij, feature_config),
        build_possibility_matrix(fm_jk, feature_config),
        feature_config,
    )

    assert tree.shape() == (2, 1, 3)
    assert tree.leaves() == [(1, 0, 0)]


def test_pair_level_assignment():
    permitted = np.array([[True, True], [False, True]])
    conditionals = pair_conditionals(np.array([[2.0, 1.0], [5.0, 1.0]]), permitted)

    assert conditionals == pytest.approx(np.array([[0.5, 0.25], [0.0, 0.25]]))

    posterior = pair_posteriors(conditionals, np.array([0.5, 0.5]))
    assert posterior.sum() == pytest.approx(1.0)
    assert assign_pairs(posterior) == [(0, 0), (1, 1)]


def test_pair_level_without_mass():
    posterior = pair_posteriors(np.zeros((2, 2)), np.array([0.5, 0.5]))

    assert assign_pairs(posterior) == []
