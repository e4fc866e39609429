"""Sufficient partitions: example groupings every hypothesis is constant on.

Two examples are interchangeable exactly when all hypotheses agree on them,
so grouping identical label columns yields the unique coarsest sufficient
partition.  A small part count certifies structure: the class's mixing
complexity is then at most 2*sqrt(2r).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .mixing import HALF, d_min_exact

__all__ = [
    "SufficientPartition",
    "PartitionBoundReport",
    "coarsest_partition",
    "verify_partition",
    "check_partition_mc_bound",
]


@dataclass(frozen=True)
class SufficientPartition:
    """Disjoint non-empty example parts covering the domain."""

    parts: tuple

    @property
    def r(self):
        return len(self.parts)

    def to_json_dict(self):
        return {"r": self.r, "parts": [list(p) for p in self.parts]}


def coarsest_partition(cls):
    """Group examples by identical label columns.

    This is the unique minimal-r sufficient partition.  Parts are ordered by
    their smallest member; indices inside a part ascend.
    """
    cols = cls.labels.T
    _, inverse = np.unique(cols, axis=0, return_inverse=True)
    groups = {}
    for j, g in enumerate(inverse.tolist()):
        groups.setdefault(g, []).append(j)
    parts = sorted(groups.values(), key=lambda p: p[0])
    return SufficientPartition(tuple(tuple(p) for p in parts))


def verify_partition(cls, partition):
    """True iff every hypothesis is constant on every part.

    Raises :class:`InputError` if the candidate is not a partition of the
    example indices.
    """
    parts = partition.parts if isinstance(partition, SufficientPartition) else partition
    seen = []
    for part in parts:
        if len(part) == 0:
            raise InputError("partition contains an empty part")
        seen.extend(int(j) for j in part)
    if sorted(seen) != list(range(cls.num_examples)):
        raise InputError("parts do not partition the example indices")
    labels = cls.labels
    for part in parts:
        idx = [int(j) for j in part]
        sub = labels[:, idx]
        if not (sub == sub[:, :1]).all():
            return False
    return True


@dataclass(frozen=True)
class PartitionBoundReport:
    r: int
    d_min: float
    mixing_complexity: float
    bound: float  # 2*sqrt(2r)
    holds: bool

    def to_json_dict(self):
        return {
            "r": self.r,
            "d_min": self.d_min,
            "mc": self.mixing_complexity,
            "bound": self.bound,
            "holds": self.holds,
        }


def check_partition_mc_bound(cls, baseline=HALF, max_enum=22):
    """Check MC <= 2*sqrt(2r) with r from the coarsest partition.

    The constant comes from the witness chain: some part has at least
    |X|/r examples, at least half the hypotheses give it one common label,
    and that pair already forces d >= sqrt(|H||X|/(2r))/2.  Uses the exact
    engine; propagates its capacity error.
    """
    r = coarsest_partition(cls).r
    report = d_min_exact(cls, baseline=baseline, max_enum=max_enum)
    bound = 2.0 * math.sqrt(2.0 * r)
    mc = report.mixing_complexity
    return PartitionBoundReport(
        r=r,
        d_min=report.d_value,
        mixing_complexity=mc,
        bound=bound,
        holds=bool(mc <= bound * (1 + 1e-12)),
    )
