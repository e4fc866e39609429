"""Restrictions, shattering and VC-dimension, plus the balanced-split greedy.

The greedy shattered-set construction exploits near-balanced splits: an
example is kept as a candidate only while it splits every current hypothesis
part close to in half; picking one such example per round keeps all parts
non-empty, so the selected examples realize every label pattern and the
returned set is shattered by construction.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Optional

import numpy as np

from .errors import CapacityError, InputError

__all__ = [
    "ShatterCertificate",
    "VCResult",
    "GreedyStep",
    "GreedyShatterResult",
    "restriction",
    "shatters",
    "vc_dim_exact",
    "balanced_split_exceptions",
    "greedy_shattered_set",
]


@dataclass(frozen=True)
class ShatterCertificate:
    """Example set, the label patterns realized on it, and the verdict.

    ``shattered`` iff all 2^|example_set| patterns are realized.  The
    patterns follow the order of ``example_set``, so the certificate can be
    re-checked directly against the class.
    """

    example_set: tuple
    realized_patterns: frozenset
    shattered: bool

    def to_json_dict(self):
        return {
            "example_set": list(self.example_set),
            "num_patterns": len(self.realized_patterns),
            "patterns": sorted("".join(str(b) for b in pat)
                               for pat in self.realized_patterns),
            "shattered": self.shattered,
        }


def _normalize_example_set(cls, example_set, allow_empty=False):
    idx = [int(j) for j in example_set]
    if not idx and not allow_empty:
        raise InputError("example set must be non-empty")
    if len(set(idx)) != len(idx):
        raise InputError("example set contains duplicate indices")
    for j in idx:
        if not 0 <= j < cls.num_examples:
            raise InputError(f"example index {j} out of range [0, {cls.num_examples})")
    return idx


def restriction(cls, example_set):
    """Distinct label patterns the hypotheses induce on the given examples.

    Patterns are tuples in the given example order.
    """
    idx = _normalize_example_set(cls, example_set)
    sub = cls.labels[:, idx]
    return {tuple(int(v) for v in row) for row in sub}


def empty_set_certificate():
    """The vacuous certificate: the empty set realizes its single pattern."""
    return ShatterCertificate((), frozenset({()}), True)


def shatters(cls, example_set):
    """Certificate stating whether all 2^|S| patterns appear on S."""
    idx = _normalize_example_set(cls, example_set)
    patterns = restriction(cls, idx)
    return ShatterCertificate(tuple(idx), frozenset(patterns),
                              len(patterns) == 2 ** len(idx))


@dataclass(frozen=True)
class VCResult:
    dimension: int
    witness: tuple  # lexicographically smallest maximal shattered set

    def to_json_dict(self):
        return {"dimension": self.dimension, "witness": list(self.witness)}


def vc_dim_exact(cls, work_cap=5_000_000):
    """Exact VC-dimension with a maximal shattered witness set.

    Enumerates candidate sizes ascending with two cutoffs: no size beyond
    floor(log2 |H|) can be shattered, and enumeration stops at the first
    size where no set shatters.  Raises :class:`CapacityError` when the
    worst-case number of candidate sets exceeds ``work_cap``.
    """
    h, x = cls.shape
    kmax = min(x, h.bit_length() - 1)  # 2^k <= |H| needed to shatter k points
    if sum(comb(x, k) for k in range(1, kmax + 1)) > work_cap:
        raise CapacityError(
            f"VC enumeration over |X|={x} up to size {kmax} exceeds the work cap")
    M = cls.labels.astype(np.int64)
    dim, witness = 0, ()
    for k in range(1, kmax + 1):
        weights = 1 << np.arange(k, dtype=np.int64)
        found = None
        for combo in combinations(range(x), k):
            codes = M[:, combo] @ weights
            if len(np.unique(codes)) == 1 << k:
                found = combo
                break
        if found is None:
            break
        dim, witness = k, found
    return VCResult(dim, tuple(witness))


def _side_subset(cls, side, subset):
    if side not in ("hypotheses", "examples"):
        raise InputError(f"side must be 'hypotheses' or 'examples', got {side!r}")
    limit = cls.num_hypotheses if side == "hypotheses" else cls.num_examples
    idx = sorted(set(int(i) for i in subset))
    if not idx:
        raise InputError("subset must be non-empty")
    if idx[0] < 0 or idx[-1] >= limit:
        raise InputError(f"subset index out of range [0, {limit})")
    return idx


def balanced_split_exceptions(cls, side, subset, epsilon):
    """Opposite-side vertices whose edge count into the subset is unbalanced.

    Returns all vertices a with | |neighbors(a) in T| - |T|/2 | > eps*|T|
    (strict), T being ``subset`` on ``side``.  The comparison is exact:
    |2c - t| > 2*eps*t in integer arithmetic for rational eps.
    """
    eps = Fraction(epsilon) if not isinstance(epsilon, Fraction) else epsilon
    if not 0 < eps < 1:
        raise InputError(f"epsilon must be in (0, 1), got {epsilon}")
    idx = _side_subset(cls, side, subset)
    t = len(idx)
    M = cls.labels.astype(np.int64)
    counts = M[idx].sum(axis=0) if side == "hypotheses" else M[:, idx].sum(axis=1)
    # |c - t/2| > eps*t  <=>  den*|2c - t| > 2*num*t
    lhs = eps.denominator * np.abs(2 * counts - t)
    rhs = 2 * eps.numerator * t
    return tuple(int(v) for v in np.nonzero(lhs > rhs)[0])


@dataclass(frozen=True)
class GreedyStep:
    chosen_example: int
    max_relative_imbalance: float
    removed_candidates: int
    removal_bound_theory: Optional[float]
    part_sizes: tuple

    def to_json_dict(self):
        return {
            "chosen_example": self.chosen_example,
            "max_relative_imbalance": self.max_relative_imbalance,
            "removed_candidates": self.removed_candidates,
            "removal_bound_theory": self.removal_bound_theory,
            "part_sizes": list(self.part_sizes),
        }


@dataclass(frozen=True)
class GreedyShatterResult:
    certificate: ShatterCertificate
    selected: tuple  # in selection order
    trace: tuple     # of GreedyStep

    def to_json_dict(self):
        return {
            "certificate": self.certificate.to_json_dict(),
            "selected": list(self.selected),
            "trace": [step.to_json_dict() for step in self.trace],
        }


def greedy_shattered_set(cls, epsilon=Fraction(1, 4), d=None):
    """Grow a shattered example set by repeated near-balanced splits.

    Maintains a partition of the hypotheses (initially one part).  Each
    round drops every candidate example that is an exception (unbalanced
    beyond ``epsilon``) for any current part, then picks the surviving
    example minimizing the maximum relative imbalance across parts (ties to
    the lowest index) and splits every part by its labels.  Stops when no
    candidate survives or a split would empty a part.

    ``d`` (any valid upper bound on the mixing parameter) is only used to
    record the per-round theoretical removal bound
    2^(i+1) * d^2 * 4^i / (|H| eps^2) in the trace.

    The returned set is shattered by construction (all parts stay
    non-empty); the certificate re-verifies this.  An empty selection is a
    valid outcome and yields the vacuous certificate.
    """
    eps = Fraction(epsilon) if not isinstance(epsilon, Fraction) else epsilon
    if not 0 < eps < Fraction(1, 2):
        raise InputError(f"epsilon must be in (0, 1/2), got {epsilon}")
    h, x = cls.shape
    M = cls.labels.astype(np.int64)
    parts = [np.arange(h)]
    pool = np.ones(x, dtype=bool)
    selected = []
    steps = []

    while True:
        cand = np.nonzero(pool)[0]
        if cand.size == 0:
            break
        sizes = np.array([p.size for p in parts], dtype=np.int64)
        counts = np.stack([M[np.ix_(p, cand)].sum(axis=0) for p in parts])
        # exact exception test per part: den*|2c - |P|| > 2*num*|P|
        dev = np.abs(2 * counts - sizes[:, None])
        exception = (eps.denominator * dev > 2 * eps.numerator * sizes[:, None]).any(axis=0)
        removed = int(exception.sum())
        pool[cand[exception]] = False
        surviving = cand[~exception]
        if surviving.size == 0:
            break
        rel = (dev[:, ~exception] / (2.0 * sizes[:, None])).max(axis=0)
        pick = int(surviving[int(np.argmin(rel))])  # argmin ties to lowest index
        ones = M[:, pick]
        new_parts = []
        for p in parts:
            mask = ones[p] == 1
            hi, lo_ = p[mask], p[~mask]
            if hi.size == 0 or lo_.size == 0:
                new_parts = None
                break
            new_parts.extend((hi, lo_))
        if new_parts is None:
            break
        i = len(selected) + 1
        theory = None if d is None else float(
            2 ** (i + 1) * float(d) ** 2 * 4**i / (h * float(eps) ** 2))
        selected.append(pick)
        pool[pick] = False
        parts = new_parts
        steps.append(GreedyStep(
            chosen_example=pick,
            max_relative_imbalance=float(rel.min()),
            removed_candidates=removed,
            removal_bound_theory=theory,
            part_sizes=tuple(int(p.size) for p in parts),
        ))

    if selected:
        cert = shatters(cls, sorted(selected))
    else:
        cert = empty_set_certificate()
    return GreedyShatterResult(cert, tuple(selected), tuple(steps))
