"""Clustering evaluation metrics: ARI, NMI, BCubed precision/recall/F1, and
best-permutation accuracy (ACC).

All metrics compare a predicted integer labeling against a reference labeling
of the same elements and are invariant under relabeling of cluster ids.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass(frozen=True)
class ClusteringResult:
    """A predicted labeling paired with the reference labeling it is scored against."""

    predicted: tuple[int, ...]
    reference: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "predicted", tuple(int(x) for x in self.predicted))
        object.__setattr__(self, "reference", tuple(int(x) for x in self.reference))
        if len(self.predicted) != len(self.reference):
            raise ValueError(
                "predicted and reference labelings differ in length: "
                f"{len(self.predicted)} vs {len(self.reference)}"
            )
        if any(x < 0 for x in self.predicted) or any(x < 0 for x in self.reference):
            raise ValueError("cluster labels must be non-negative integers")

    @property
    def n(self) -> int:
        return len(self.predicted)


def _contingency(r: ClusteringResult) -> np.ndarray:
    """Reference-by-predicted count matrix over the distinct labels present."""
    ref_ids = sorted(set(r.reference))
    pred_ids = sorted(set(r.predicted))
    ref_pos = {c: i for i, c in enumerate(ref_ids)}
    pred_pos = {c: j for j, c in enumerate(pred_ids)}
    m = np.zeros((len(ref_ids), len(pred_ids)), dtype=np.int64)
    for y_star, y in zip(r.reference, r.predicted):
        m[ref_pos[y_star], pred_pos[y]] += 1
    return m


def _comb2(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.float64)
    return x * (x - 1.0) / 2.0


def ari(r: ClusteringResult) -> float:
    """Adjusted Rand index via contingency-table pair counting.

    When both partitions are trivial in the same way (all singletons, or one
    cluster each) the correction denominator vanishes and the partitions are
    necessarily identical; 1.0 is returned by convention.
    """
    if r.n < 2:
        raise ValueError("ARI needs at least two elements")
    m = _contingency(r)
    sum_cells = _comb2(m).sum()
    sum_ref = _comb2(m.sum(axis=1)).sum()
    sum_pred = _comb2(m.sum(axis=0)).sum()
    total_pairs = r.n * (r.n - 1) / 2.0
    expected = sum_ref * sum_pred / total_pairs
    max_index = (sum_ref + sum_pred) / 2.0
    denom = max_index - expected
    if denom == 0.0:
        return 1.0
    return float((sum_cells - expected) / denom)


def nmi(r: ClusteringResult) -> float:
    """Normalized mutual information, 2*MI / (H(reference) + H(predicted)).

    Natural-log entropies (the ratio is base-invariant). Two single-cluster
    partitions carry no information but agree perfectly; defined as 1.0.
    """
    if r.n < 1:
        raise ValueError("NMI needs at least one element")
    joint = _contingency(r).astype(np.float64) / r.n
    p_ref = joint.sum(axis=1)
    p_pred = joint.sum(axis=0)
    h_ref = float(-np.sum(p_ref * np.log(p_ref)))
    h_pred = float(-np.sum(p_pred * np.log(p_pred)))
    if h_ref == 0.0 and h_pred == 0.0:
        return 1.0
    nz = joint > 0
    outer = np.outer(p_ref, p_pred)
    mi = float(np.sum(joint[nz] * (np.log(joint[nz]) - np.log(outer[nz]))))
    mi = max(mi, 0.0)  # guard float round-off on independent labelings
    return float(min(1.0, max(0.0, 2.0 * mi / (h_ref + h_pred))))


def bcubed_f1(r: ClusteringResult) -> tuple[float, float, float]:
    """Element-averaged BCubed (precision, recall, F1).

    For each element, precision is the fraction of its predicted cluster that
    shares its reference cluster; recall is the dual.
    """
    if r.n < 1:
        raise ValueError("BCubed needs at least one element")
    m = _contingency(r)
    ref_ids = sorted(set(r.reference))
    pred_ids = sorted(set(r.predicted))
    ref_pos = {c: i for i, c in enumerate(ref_ids)}
    pred_pos = {c: j for j, c in enumerate(pred_ids)}
    ref_sizes = m.sum(axis=1)
    pred_sizes = m.sum(axis=0)
    precision = 0.0
    recall = 0.0
    for y_star, y in zip(r.reference, r.predicted):
        joint = m[ref_pos[y_star], pred_pos[y]]
        precision += joint / pred_sizes[pred_pos[y]]
        recall += joint / ref_sizes[ref_pos[y_star]]
    precision /= r.n
    recall /= r.n
    f1 = 2.0 * precision * recall / (precision + recall)
    return float(precision), float(recall), float(f1)


def acc(r: ClusteringResult) -> float:
    """Best label-permutation accuracy between equal-cardinality labelings.

    Computed exactly by maximum-weight bipartite matching on the contingency
    matrix, which equals the exhaustive search over label permutations.
    Raises ValueError when the two labelings use different numbers of
    distinct clusters (the permutation is undefined then).
    """
    if r.n < 1:
        raise ValueError("ACC needs at least one element")
    m = _contingency(r)
    if m.shape[0] != m.shape[1]:
        raise ValueError(
            f"ACC requires equal cluster counts; got {m.shape[0]} reference "
            f"vs {m.shape[1]} predicted clusters"
        )
    rows, cols = linear_sum_assignment(-m)
    return float(m[rows, cols].sum() / r.n)


def metrics_report(r: ClusteringResult) -> dict:
    """All metrics as a flat JSON-ready mapping; ACC is None on cluster-count mismatch."""
    p, rec, f1 = bcubed_f1(r)
    report = {
        "ari": ari(r),
        "nmi": nmi(r),
        "bcubed_p": p,
        "bcubed_r": rec,
        "bcubed_f1": f1,
    }
    try:
        report["acc"] = acc(r)
    except ValueError:
        report["acc"] = None
    return report
