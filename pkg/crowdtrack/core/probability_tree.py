from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from crowdtrack.core.features import FeatureVector, combined_score, normalize_feature
from crowdtrack.core.motion_segment import motion_residual, movement_angle, speed_feature

if TYPE_CHECKING:
    from crowdtrack.core.feature_matrix import FeatureMatrix, PossibilityMatrix
    from crowdtrack.core.features import BlobObservation, FeatureConfig

Match = tuple[int, int, int]
PairMatch = tuple[int, int]


def _normalized(scores: np.ndarray, permitted: np.ndarray) -> np.ndarray:
    masked = np.where(permitted, scores, 0.0)
    total = masked.sum()
    if total <= 0:
        return np.zeros_like(masked)
    return masked / total


def _normalized_per_root(scores: np.ndarray, permitted: np.ndarray) -> np.ndarray:
    masked = np.where(permitted, scores, 0.0)
    totals = masked.sum(axis=(1, 2), keepdims=True)
    return np.divide(masked, totals, out=np.zeros_like(masked), where=totals > 0)


class ProbabilityTree:
    """
    Three level tree over the blobs of frames t-2 (roots i), t-1 (j)
    and t (leaves k), kept as dense arrays:

    * ``edge_conditionals[i, j]``: P(j | i)
    * ``leaf_conditionals[i, j, k]``: P(k | i, j)
    * ``posterior[i, j, k]``: P(i | j, k), zero until ``posteriors`` runs

    Cells outside the permitted masks are always zero.
    """

    def __init__(
        self,
        edge_conditionals: np.ndarray,
        leaf_conditionals: np.ndarray,
        edge_permitted: np.ndarray | None = None,
        leaf_permitted: np.ndarray | None = None,
        posterior: np.ndarray | None = None,
    ) -> None:
        self.__edge_conditionals = np.asarray(edge_conditionals, dtype=np.float64)
        self.__leaf_conditionals = np.asarray(leaf_conditionals, dtype=np.float64)

        if edge_permitted is None:
            edge_permitted = self.__edge_conditionals > 0
        if leaf_permitted is None:
            leaf_permitted = self.__leaf_conditionals > 0

        self.__edge_permitted = np.asarray(edge_permitted, dtype=bool)
        self.__leaf_permitted = np.asarray(leaf_permitted, dtype=bool) & self.__edge_permitted[:, :, None]
        self.__posterior = (
            np.zeros_like(self.__leaf_conditionals) if posterior is None else np.asarray(posterior, dtype=np.float64)
        )

    @classmethod
    def from_scores(
        cls,
        edge_scores: np.ndarray,
        leaf_scores: np.ndarray,
        edge_permitted: np.ndarray | None = None,
        leaf_permitted: np.ndarray | None = None,
    ) -> ProbabilityTree:
        """
        Normalize raw similarity scores into conditionals. Edge scores are
        normalized over every permitted (i, j) edge. Leaf scores are
        normalized per root i over its permitted (j, k) leaves; a root
        without leaf mass keeps zero conditionals.
        """
        edge_scores = np.asarray(edge_scores, dtype=np.float64)
        leaf_scores = np.asarray(leaf_scores, dtype=np.float64)

        if edge_permitted is None:
            edge_permitted = np.ones(edge_scores.shape, dtype=bool)
        if leaf_permitted is None:
            leaf_permitted = np.ones(leaf_scores.shape, dtype=bool)

        edge_permitted = np.asarray(edge_permitted, dtype=bool)
        leaf_permitted = np.asarray(leaf_permitted, dtype=bool) & edge_permitted[:, :, None]

        return cls(
            _normalized(edge_scores, edge_permitted),
            _normalized_per_root(leaf_scores, leaf_permitted),
            edge_permitted,
            leaf_permitted,
        )

    def shape(self) -> tuple[int, int, int]:
        n_i, n_j, n_k = self.__leaf_conditionals.shape
        return int(n_i), int(n_j), int(n_k)

    def edge_conditionals(self) -> np.ndarray:
        return self.__edge_conditionals

    def leaf_conditionals(self) -> np.ndarray:
        return self.__leaf_conditionals

    def edge_permitted(self) -> np.ndarray:
        return self.__edge_permitted

    def leaf_permitted(self) -> np.ndarray:
        return self.__leaf_permitted

    def posterior(self) -> np.ndarray:
        return self.__posterior

    def leaves(self) -> list[Match]:
        return [(int(i), int(j), int(k)) for i, j, k in np.argwhere(self.__leaf_permitted)]

    def is_empty(self) -> bool:
        return not np.any(self.__posterior > 0)

    def with_posterior(self, posterior: np.ndarray) -> ProbabilityTree:
        return ProbabilityTree(
            self.__edge_conditionals,
            self.__leaf_conditionals,
            self.__edge_permitted,
            self.__leaf_permitted,
            posterior,
        )


def leaf_scores(
    earlier: list[BlobObservation],
    previous: list[BlobObservation],
    current: list[BlobObservation],
    fm_jk: FeatureMatrix,
    leaf_permitted: np.ndarray,
    config: FeatureConfig,
) -> np.ndarray:
    """
    Similarity of every permitted chain i -> j -> k: the normalized pair
    features of (j, k) together with the turning, speed-change and
    motion residual features of the three centroids, weighted and summed.
    """
    weights = config.weights()
    caps = config.caps()
    entropy_diff = fm_jk.entropy_diff().T
    distance = fm_jk.distance().T

    scores = np.zeros((len(earlier), len(previous), len(current)), dtype=np.float64)
    for i, j, k in np.argwhere(leaf_permitted):
        x_i, x_j, x_k = earlier[i].centroid, previous[j].centroid, current[k].centroid
        triple = FeatureVector(
            float(entropy_diff[j, k]),
            float(distance[j, k]),
            normalize_feature(movement_angle(x_i, x_j, x_k, config.w1), caps.angle),
            normalize_feature(speed_feature(x_i, x_j, x_k, config.w2), caps.speed),
            normalize_feature(motion_residual(x_i, x_j, x_k), caps.motion),
        )
        scores[i, j, k] = combined_score(triple, weights)

    return scores


def build_probability_tree(
    earlier: list[BlobObservation],
    previous: list[BlobObservation],
    current: list[BlobObservation],
    fm_ij: FeatureMatrix,
    fm_jk: FeatureMatrix,
    pm_ij: PossibilityMatrix,
    pm_jk: PossibilityMatrix,
    config: FeatureConfig,
) -> ProbabilityTree:
    # matrices are indexed [higher, lower], the tree [lower, higher]
    edge_permitted = pm_ij.cells().T
    leaf_permitted = edge_permitted[:, :, None] & pm_jk.cells().T[None, :, :]

    edge_scores = fm_ij.scores(config.weights()).T
    scores = leaf_scores(earlier, previous, current, fm_jk, leaf_permitted, config)

    return ProbabilityTree.from_scores(edge_scores, scores, edge_permitted, leaf_permitted)


def posteriors(tree: ProbabilityTree, priors: np.ndarray) -> ProbabilityTree:
    """
    Bayes update of every leaf: P(j|i) * P(k|i,j) * P(i) divided by the
    sum of that product over all leaves. A zero denominator leaves every
    posterior at zero, i.e. an empty tree.
    """
    priors = np.asarray(priors, dtype=np.float64)
    products = tree.edge_conditionals()[:, :, None] * tree.leaf_conditionals() * priors[:, None, None]
    products = np.where(tree.leaf_permitted(), products, 0.0)

    total = products.sum()
    if total <= 0:
        return tree.with_posterior(np.zeros_like(products))

    return tree.with_posterior(products / total)


def propagate_priors(edge_conditionals: np.ndarray) -> np.ndarray:
    """
    Prior of each blob j for the next step: the sum of its incoming
    conditionals, renormalized. Blobs without incoming mass get the
    smallest positive prior (uniform when there is none).
    """
    raw = np.asarray(edge_conditionals, dtype=np.float64).sum(axis=0)
    if raw.size == 0:
        return raw

    positive = raw[raw > 0]
    newborn = positive.min() if positive.size else 1.0
    raw = np.where(raw > 0, raw, newborn)

    return raw / raw.sum()


def update_priors(tree: ProbabilityTree) -> np.ndarray:
    return propagate_priors(tree.edge_conditionals())


def assign(tree: ProbabilityTree) -> list[Match]:
    """
    Greedy maximum posterior assignment. Each pick removes every leaf
    sharing its i, j or k. Ties go to the lowest (i, j, k).
    """
    remaining = tree.posterior().copy()
    matches: list[Match] = []

    while remaining.size and remaining.max() > 0:
        i, j, k = np.unravel_index(int(np.argmax(remaining)), remaining.shape)
        matches.append((int(i), int(j), int(k)))
        remaining[i, :, :] = 0.0
        remaining[:, j, :] = 0.0
        remaining[:, :, k] = 0.0

    return matches


def pair_conditionals(scores: np.ndarray, permitted: np.ndarray) -> np.ndarray:
    """Two level version of the edge conditionals, indexed [lower, higher]."""
    return _normalized(np.asarray(scores, dtype=np.float64), np.asarray(permitted, dtype=bool))


def pair_posteriors(conditionals: np.ndarray, priors: np.ndarray) -> np.ndarray:
    products = np.asarray(conditionals, dtype=np.float64) * np.asarray(priors, dtype=np.float64)[:, None]
    total = products.sum()
    if total <= 0:
        return np.zeros_like(products)
    return products / total


def assign_pairs(posterior: np.ndarray) -> list[PairMatch]:
    remaining = np.array(posterior, dtype=np.float64)
    matches: list[PairMatch] = []

    while remaining.size and remaining.max() > 0:
        low, high = np.unravel_index(int(np.argmax(remaining)), remaining.shape)
        matches.append((int(low), int(high)))
        remaining[low, :] = 0.0
        remaining[:, high] = 0.0

    return matches
