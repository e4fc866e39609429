"""Label perturbations and the robustness of the mixing parameter.

Flipping ``b`` incidence cells moves any subset pair's edge count by at most
min(b, s*t), so the mixing parameter moves by at most sqrt(b).  The checkers
here verify that bound empirically, and the randomization experiment sweeps
corruption levels from intact to fully random labels.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._util import rng_from
from .errors import InputError
from .hypothesis_graph import HypothesisClass
from .mixing import HALF, d_min_exact, d_spectral_bound

__all__ = [
    "flip_labels",
    "sample_flip_cells",
    "PerturbationReport",
    "check_perturbation_bound",
    "RandomizationLevel",
    "RandomizationReport",
    "randomization_experiment",
]

# Absolute slack for comparing float d-values against the sqrt(b) bound; the
# underlying inequality is exact, this only absorbs sqrt rounding.
_BOUND_SLACK = 1e-9


def _draw_cells(cls, count, rng):
    h, x = cls.shape
    count = int(count)
    if not 0 <= count <= h * x:
        raise InputError(f"flip count must be in [0, {h * x}], got {count}")
    flat = rng.choice(h * x, size=count, replace=False, shuffle=False)
    return tuple((int(c) // x, int(c) % x) for c in sorted(flat.tolist()))


def sample_flip_cells(cls, count, seed):
    """``count`` distinct (hypothesis, example) cells, drawn uniformly."""
    return _draw_cells(cls, count, rng_from(seed))


def flip_labels(cls, flips=None, *, count=None, seed=None):
    """Complement the given cells (or ``count`` random ones) of the matrix.

    Exactly one of ``flips`` (explicit distinct (h, x) pairs) and ``count``
    (with ``seed``) must be supplied.  The input class is untouched.
    """
    if (flips is None) == (count is None):
        raise InputError("provide exactly one of flips= or count=")
    if flips is None:
        if seed is None:
            raise InputError("random flips need a seed")
        flips = sample_flip_cells(cls, count, seed)
    cells = [(int(i), int(j)) for i, j in flips]
    if len(set(cells)) != len(cells):
        raise InputError("flip positions must be distinct")
    h, x = cls.shape
    for i, j in cells:
        if not (0 <= i < h and 0 <= j < x):
            raise InputError(f"flip position ({i}, {j}) out of range for {h}x{x}")
    labels = cls.labels.copy()
    for i, j in cells:
        labels[i, j] ^= 1
    return HypothesisClass(labels, name=cls.name)


@dataclass(frozen=True)
class PerturbationReport:
    b: int
    trials: int
    method: str
    d_before: float
    d_after: tuple
    bound: float       # d_before + sqrt(b)
    max_gap: float     # max over trials of d_after - d_before
    holds: bool        # every trial satisfied d_after <= bound

    def to_json_dict(self):
        return {
            "b": self.b,
            "trials": self.trials,
            "method": self.method,
            "d_before": self.d_before,
            "d_after": list(self.d_after),
            "bound": self.bound,
            "max_gap": self.max_gap,
            "holds": self.holds,
        }


def _engine_for(cls, method):
    """Resolve a d engine; None picks exact when feasible, else spectral."""
    if method is None:
        method = "exact" if min(cls.shape) <= 16 else "spectral"
    if method == "exact":
        return method, lambda c: d_min_exact(c)
    if method == "spectral":
        return method, lambda c: d_spectral_bound(c)
    raise InputError(f"method must be 'exact', 'spectral' or None, got {method!r}")


def check_perturbation_bound(cls, b, trials, seed, method="exact", baseline=HALF):
    """Assert d_min(perturbed) <= d_min(original) + sqrt(b) over random flips.

    Runs ``trials`` seeded perturbations of exactly ``b`` random cells each
    (trial k draws from the derived stream (seed, k)) and reports the worst
    observed gap.  The spectral proxy obeys the same bound: flipping b cells
    perturbs the centered matrix by at most sqrt(b) in operator norm.
    """
    if trials < 1:
        raise InputError("trials must be >= 1")
    if method == "exact":
        engine = lambda c: d_min_exact(c, baseline=baseline)
    elif method == "spectral":
        engine = lambda c: d_spectral_bound(c, baseline=baseline)
    else:
        raise InputError(f"method must be 'exact' or 'spectral', got {method!r}")
    d0 = engine(cls).d_value
    bound = d0 + math.sqrt(b)
    d_after = []
    for k in range(int(trials)):
        cells = _draw_cells(cls, b, rng_from(seed, k))
        d_after.append(engine(flip_labels(cls, cells)).d_value)
    max_gap = max((dv - d0 for dv in d_after), default=0.0)
    holds = all(dv <= bound + _BOUND_SLACK for dv in d_after)
    return PerturbationReport(
        b=int(b), trials=int(trials), method=method, d_before=d0,
        d_after=tuple(d_after), bound=bound, max_gap=max_gap, holds=bool(holds))


@dataclass(frozen=True)
class RandomizationLevel:
    level: int
    trial: int
    fraction: float
    cells_randomized: int
    cells_flipped: int
    d_value: float
    mixing_complexity: float
    claim_bound: float   # d_level <= d_0 + sqrt(cells_flipped)
    bound_holds: bool

    def to_json_dict(self):
        return {
            "level": self.level,
            "trial": self.trial,
            "fraction": self.fraction,
            "cells_randomized": self.cells_randomized,
            "cells_flipped": self.cells_flipped,
            "d_value": self.d_value,
            "mc": self.mixing_complexity,
            "claim_bound": self.claim_bound,
            "bound_holds": self.bound_holds,
        }


@dataclass(frozen=True)
class RandomizationReport:
    method: str
    trials: int
    rows: tuple  # RandomizationLevel, ordered by (level, trial)

    def to_json_dict(self):
        return {
            "method": self.method,
            "trials": self.trials,
            "levels": [row.to_json_dict() for row in self.rows],
        }


def randomization_experiment(cls, levels, trials=1, seed=0, method=None):
    """Sweep label corruption from none to total and track the mixing value.

    At level i (0..levels), a fraction i/levels of cells is selected and
    re-drawn uniformly at random; the cells whose redrawn bit differs are
    applied via :func:`flip_labels` (so full corruption yields a uniformly
    random class, not the complement).  Per level and trial the report
    carries d, the mixing complexity, and whether the perturbation bound
    d_level <= d_0 + sqrt(b_level) held for the actual flip count b_level.

    ``method`` is `exact`, `spectral`, or None for automatic choice (exact
    when the smaller side is at most 16; the spectral value is an upper
    bound on d, hence its mixing complexity is a lower bound).
    """
    if levels < 1:
        raise InputError("levels must be >= 1")
    if trials < 1:
        raise InputError("trials must be >= 1")
    method, engine = _engine_for(cls, method)

    h, x = cls.shape
    d0 = engine(cls).d_value
    rows = []
    for level in range(levels + 1):
        fraction = level / levels
        num_cells = round(fraction * h * x)
        for trial in range(int(trials)):
            rng = rng_from(seed, level, trial)
            flat = rng.choice(h * x, size=num_cells, replace=False, shuffle=False)
            new_bits = rng.integers(0, 2, size=num_cells, dtype=np.uint8)
            flips = sorted(
                (int(c) // x, int(c) % x)
                for c, bit in zip(flat.tolist(), new_bits.tolist())
                if int(cls.labels[int(c) // x, int(c) % x]) != bit)
            perturbed = flip_labels(cls, flips) if flips else cls
            rep = engine(perturbed)
            b = len(flips)
            bound = d0 + math.sqrt(b)
            rows.append(RandomizationLevel(
                level=level,
                trial=trial,
                fraction=fraction,
                cells_randomized=int(num_cells),
                cells_flipped=b,
                d_value=rep.d_value,
                mixing_complexity=rep.mixing_complexity,
                claim_bound=bound,
                bound_holds=bool(rep.d_value <= bound + _BOUND_SLACK),
            ))
    return RandomizationReport(method=method, trials=int(trials), rows=tuple(rows))
