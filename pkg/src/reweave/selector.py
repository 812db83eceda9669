"""Least-squares selectors shared by schema choice and fragment choice.

Training: stack the records' multi-hot feature vectors into K (N x M), give
every candidate item its 0/1 indicator over the records, and solve
K p_i = s_i for each item by minimum-norm least squares (one factorization,
reused for all items). Selection: the weight of item i for a query vector k*
is the dot product k* . p_i; items are ranked descending, ties by training
order. Raw weights may leave [0, 1]; clamping happens only where
appropriation weights are assembled.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Feature, FeatureCollection
from .errors import ValidationFailure

# singular values below RCOND * largest are treated as zero in the solve
RCOND = 1e-10


class FeatureIndex:
    """Bijective attr=value key <-> column mapping, fixed at training time."""

    def __init__(self, keys):
        self.keys = []
        self._pos = {}
        for k in keys:
            if k not in self._pos:
                self._pos[k] = len(self.keys)
                self.keys.append(k)

    def __len__(self):
        return len(self.keys)

    def encode(self, cc) -> tuple[np.ndarray, int]:
        """Multi-hot vector for a feature collection; unseen features are
        ignored and counted."""
        vec = np.zeros(len(self.keys))
        ignored = 0
        for f in cc:
            key = f.key if isinstance(f, Feature) else str(f)
            pos = self._pos.get(key)
            if pos is None:
                ignored += 1
            else:
                vec[pos] = 1.0
        return vec, ignored


@dataclass
class Selector:
    index: FeatureIndex
    items: list  # opaque candidate ids, training order
    vectors: np.ndarray  # (n_items, M); row i is the mapping vector p_i

    def weights(self, kstar: np.ndarray) -> np.ndarray:
        return self.vectors @ kstar

    def select(self, kstar: np.ndarray, top_n: int | None = None):
        """Ranked (item position, weight) pairs, descending weight, ties by
        training order."""
        w = self.weights(kstar)
        order = np.argsort(-w, kind="stable")
        ranked = [(int(i), float(w[i])) for i in order]
        return ranked if top_n is None else ranked[:top_n]


def train_selector(records, index: FeatureIndex) -> Selector:
    """Fit one mapping vector per distinct item.

    records: sequence of (item, FeatureCollection). Identical items are
    collapsed into one candidate whose indicator is the union of its rows.
    """
    if not records:
        raise ValidationFailure("cannot train a selector on an empty dataset")
    items = []
    item_pos = {}
    for item, _ in records:
        if item not in item_pos:
            item_pos[item] = len(items)
            items.append(item)
    K = np.zeros((len(records), len(index)))
    S = np.zeros((len(records), len(items)))
    for r, (item, cc) in enumerate(records):
        vec, _ = index.encode(cc)
        K[r] = vec
        S[r, item_pos[item]] = 1.0
    if not K.any():
        raise ValidationFailure("no informative features: design matrix is all zeros")
    solution, *_ = np.linalg.lstsq(K, S, rcond=RCOND)
    return Selector(index=index, items=items, vectors=solution.T)
