"""Mixing parameter of a hypothesis class: exact value, bounds and verdicts.

The mixing parameter ``d_min`` is the largest normalized subset discrepancy
``|e(T, S) - p*s*t| / sqrt(s*t)`` over all non-empty hypothesis subsets T and
example subsets S (baseline ``p`` defaults to 1/2).  Mixing complexity is
``sqrt(|H||X|) / d_min``; a class counts as mixing when
``d_min <= c * sqrt(|X|)``.

Four engines are provided:

* :func:`d_min_exact` - exact maximization, enumerating all subsets of the
  smaller side and using sorted prefix sums for the other side.
* :func:`d_min_bruteforce_oracle` - double enumeration over both sides, used
  to validate the exact engine on tiny classes.
* :func:`d_spectral_bound` - upper bound via the largest singular value of
  the centered incidence matrix (power iteration on the Gram operator).
* :func:`d_search_lower_bound` - seeded hill-climbing lower bound for
  classes too large to enumerate.

Exact engines compare candidates in exact rational arithmetic (the float
scan only pre-screens inside a generous relative window), so reported maxima
and ties are decided exactly.
"""

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from ._util import rng_from
from .errors import CapacityError, ConvergenceError, InputError
from .hypothesis_graph import HypothesisClass, SubsetPair, density

__all__ = [
    "MixingReport",
    "Theorem1Report",
    "discrepancy",
    "discrepancy_squared_exact",
    "d_min_exact",
    "d_min_bruteforce_oracle",
    "d_spectral_bound",
    "d_search_lower_bound",
    "compute_mixing_report",
    "mixing_complexity",
    "is_mixing",
    "check_theorem1_preconditions",
]

HALF = Fraction(1, 2)

# Relative window for the float pre-screen around the running maximum.  Float
# errors are ~1e-15 relative, so no exact maximizer can fall outside it.
_SCREEN_REL = 1e-6

# Fixed entropy for the spectral start vector; documented, not configurable.
_SPECTRAL_SEED = 0x5D1C7


def as_baseline(cls, baseline):
    """Normalize a baseline spec ('half', 'density', number) to a Fraction."""
    if baseline is None or baseline == "half":
        return HALF
    if baseline == "density":
        return density(cls)
    p = Fraction(baseline).limit_denominator(10**12) if isinstance(baseline, float) \
        else Fraction(baseline)
    if not 0 <= p <= 1:
        raise InputError(f"baseline must be in [0, 1], got {p}")
    return p


def _d_cap(cls, p):
    """Universal upper bound on d_min: max(p, 1-p) * sqrt(|H||X|)."""
    h, x = cls.shape
    return float(max(p, 1 - p)) * math.sqrt(h * x)


@dataclass
class MixingReport:
    """Result of one mixing-parameter computation.

    ``bounds`` are valid (lower, upper) bounds on the true d_min implied by
    the method; ``mc_kind`` says how ``mixing_complexity`` relates to the
    true mixing complexity (exact / lower_bound / upper_bound).
    """

    method: str
    d_value: float
    mixing_complexity: float
    density_baseline: float
    is_mixing: bool
    mixing_constant: float
    witness: Optional[SubsetPair]
    bounds: tuple
    mc_kind: str
    d_squared_exact: Optional[Fraction] = None

    def to_json_dict(self):
        return {
            "method": self.method,
            "d_value": self.d_value,
            "mc": self.mixing_complexity,
            "mc_kind": self.mc_kind,
            "density_baseline": self.density_baseline,
            "is_mixing": self.is_mixing,
            "mixing_constant": self.mixing_constant,
            "witness": None if self.witness is None else {
                "T": list(self.witness.hyp_subset),
                "S": list(self.witness.ex_subset),
            },
            "bounds": {"lower": self.bounds[0], "upper": self.bounds[1]},
        }


def _make_report(cls, method, d2_exact, d_value, witness, p, mixing_constant,
                 bounds, mc_kind):
    h, x = cls.shape
    mc = math.inf if d_value == 0 else math.sqrt(h * x) / d_value
    return MixingReport(
        method=method,
        d_value=d_value,
        mixing_complexity=mc,
        density_baseline=float(p),
        is_mixing=bool(d_value <= float(mixing_constant) * math.sqrt(x)),
        mixing_constant=float(mixing_constant),
        witness=witness,
        bounds=bounds,
        mc_kind=mc_kind,
        d_squared_exact=d2_exact,
    )


def discrepancy(cls, pair, baseline=HALF):
    """|e(T, S) - p*s*t| / sqrt(s*t) for one non-empty subset pair."""
    return math.sqrt(float(discrepancy_squared_exact(cls, pair, baseline)))


def discrepancy_squared_exact(cls, pair, baseline=HALF):
    """Squared discrepancy as an exact Fraction (p must be rational)."""
    from .hypothesis_graph import _check_pair, edge_count

    _check_pair(cls, pair, require_nonempty=True)
    p = as_baseline(cls, baseline)
    s = len(pair.ex_subset)
    t = len(pair.hyp_subset)
    e = edge_count(cls, pair)
    return (Fraction(e) - p * s * t) ** 2 / (s * t)


def _candidates_from_block(q, threshold):
    rows, cols = np.nonzero(q >= threshold)
    return rows, cols


def _exact_value(e, s, t, p):
    return (Fraction(int(e)) - p * int(s) * int(t)) ** 2 / (int(s) * int(t))


class _Best:
    """Tracks the exact maximum with lexicographic (T, S) tie-breaking."""

    def __init__(self):
        self.d2 = None
        self.hyps = None
        self.exs = None

    def offer(self, d2, hyps, exs):
        if self.d2 is None or d2 > self.d2 or (
            d2 == self.d2 and (hyps, exs) < (self.hyps, self.exs)
        ):
            self.d2 = d2
            self.hyps = hyps
            self.exs = exs

    def report(self, cls, method, p, mixing_constant):
        d2 = self.d2 if self.d2 is not None else Fraction(0)
        if self.hyps is None:
            # degenerate: discrepancy vanishes on every pair
            witness = SubsetPair((0,), (0,))
        else:
            witness = SubsetPair(self.hyps, self.exs)
        d = math.sqrt(float(d2))
        return _make_report(cls, method, d2, d, witness, p, mixing_constant,
                            bounds=(d, d), mc_kind="exact")


def d_min_exact(cls, baseline=HALF, mixing_constant=1.0, max_enum=22,
                block_size=None):
    """Exact mixing parameter with a maximizing witness pair.

    Enumerates every non-empty subset of the smaller side (ties pick
    hypotheses).  For a fixed subset with per-opposite-vertex neighbor
    counts c_v, the discrepancy at size s is maximized by the s largest or
    s smallest counts (|v - p*s*t| is convex in the achieved sum v), so both
    extremes are evaluated from sorted prefix sums.  Cost is
    O(2^min * max * log max).

    Raises :class:`CapacityError` when min(|H|, |X|) exceeds ``max_enum``.
    """
    p = as_baseline(cls, baseline)
    a, b = p.numerator, p.denominator
    h, x = cls.shape
    enum_rows = h <= x
    k, m = (h, x) if enum_rows else (x, h)
    if k > max_enum:
        raise CapacityError(
            f"min side {k} exceeds enumeration cap {max_enum}; "
            "use d_spectral_bound (upper) or d_search_lower_bound (lower)")
    if block_size is None:
        block_size = max(256, min(8192, (1 << 21) // max(m, 1)))

    Mi = (cls.labels if enum_rows else cls.labels.T).astype(np.int64)
    bits = np.arange(k, dtype=np.int64)
    sizes = np.arange(1, m + 1, dtype=np.int64)
    qstar = 0.0
    cands = []  # (subset_id, s, take_largest) surviving the float screen

    for lo in range(1, 1 << k, block_size):
        ids = np.arange(lo, min(lo + block_size, 1 << k), dtype=np.int64)
        ind = (ids[:, None] >> bits[None, :]) & 1
        t = ind.sum(axis=1)
        counts = ind @ Mi
        counts.sort(axis=1)
        vmin = np.cumsum(counts, axis=1)
        vmax = np.cumsum(counts[:, ::-1], axis=1)
        st = sizes[None, :] * t[:, None]
        qhi = (b * vmax - a * st).astype(np.float64) ** 2 / st
        qlo = (b * vmin - a * st).astype(np.float64) ** 2 / st
        bmax = max(qhi.max(), qlo.max())
        if bmax <= 0.0:
            continue
        qstar = max(qstar, bmax)
        thr = qstar * (1.0 - _SCREEN_REL)
        for q, largest in ((qhi, True), (qlo, False)):
            rows, cols = _candidates_from_block(q, thr)
            for r, c in zip(rows.tolist(), cols.tolist()):
                cands.append((int(ids[r]), c + 1, largest))

    best = _Best()
    if qstar > 0.0:
        idx = np.arange(m)
        for subset_id, s, largest in cands:
            tidx = [i for i in range(k) if (subset_id >> i) & 1]
            c = Mi[tidx].sum(axis=0)
            order = np.lexsort((idx, -c if largest else c))
            chosen = order[:s]
            e = int(c[chosen].sum())
            t = len(tidx)
            d2 = _exact_value(e, s, t, p)
            sel = tuple(sorted(int(v) for v in chosen))
            enum_side = tuple(tidx)
            hyps, exs = (enum_side, sel) if enum_rows else (sel, enum_side)
            best.offer(d2, hyps, exs)
    return best.report(cls, "exact", p, mixing_constant)


def d_min_bruteforce_oracle(cls, baseline=HALF, mixing_constant=1.0):
    """Exact mixing parameter by double enumeration of both sides.

    Validation oracle for :func:`d_min_exact`; limited to |H| <= 12 and
    |X| <= 12.  The witness is the globally lexicographically smallest
    maximizer.
    """
    h, x = cls.shape
    if h > 12 or x > 12:
        raise CapacityError(f"oracle caps are 12x12, got {h}x{x}")
    p = as_baseline(cls, baseline)
    a, b = p.numerator, p.denominator
    Mi = cls.labels.astype(np.int64)

    xids = np.arange(1, 1 << x, dtype=np.int64)
    SI = (xids[:, None] >> np.arange(x, dtype=np.int64)[None, :]) & 1
    ssz = SI.sum(axis=1)
    hbits = np.arange(h, dtype=np.int64)

    qstar = 0.0
    cands = []  # (hyp_id, ex_id)
    block = max(64, min(2048, (1 << 22) // (1 << x)))
    for lo in range(1, 1 << h, block):
        tids = np.arange(lo, min(lo + block, 1 << h), dtype=np.int64)
        TI = (tids[:, None] >> hbits[None, :]) & 1
        t = TI.sum(axis=1)
        E = (TI @ Mi) @ SI.T
        st = t[:, None] * ssz[None, :]
        q = (b * E - a * st).astype(np.float64) ** 2 / st
        bmax = q.max()
        if bmax <= 0.0:
            continue
        qstar = max(qstar, bmax)
        rows, cols = _candidates_from_block(q, qstar * (1.0 - _SCREEN_REL))
        for r, c in zip(rows.tolist(), cols.tolist()):
            cands.append((int(tids[r]), int(xids[c])))

    best = _Best()
    if qstar > 0.0:
        for tid, sid in cands:
            hyps = tuple(i for i in range(h) if (tid >> i) & 1)
            exs = tuple(j for j in range(x) if (sid >> j) & 1)
            e = sum(int(Mi[i, j]) for i in hyps for j in exs)
            d2 = _exact_value(e, len(exs), len(hyps), p)
            best.offer(d2, hyps, exs)
    return best.report(cls, "oracle", p, mixing_constant)


def d_spectral_bound(cls, baseline=HALF, tol=1e-9, max_iters=10000,
                     mixing_constant=1.0):
    """Upper bound on d_min: top singular value of the centered matrix.

    For any pair, |1_T' (M - pJ) 1_S| <= sigma_max(M - pJ) * sqrt(s*t), so
    sigma_max bounds every normalized discrepancy.  Computed by power
    iteration on the Gram operator of the smaller side with a fixed seeded
    start vector; converged when successive Rayleigh quotients agree to
    relative ``tol``.  Scales to thousands of rows and columns.
    """
    p = as_baseline(cls, baseline)
    h, x = cls.shape
    A = cls.labels.astype(np.float64) - float(p)
    fro2 = float((A * A).sum())
    if fro2 == 0.0:
        return _make_report(cls, "spectral", None, 0.0, None, p,
                            mixing_constant, bounds=(0.0, 0.0),
                            mc_kind="lower_bound")
    n = min(h, x)
    matvec = (lambda v: A @ (A.T @ v)) if h <= x else (lambda v: A.T @ (A @ v))

    rng = rng_from(_SPECTRAL_SEED, h, x)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam_prev = None
    for _ in range(int(max_iters)):
        w = matvec(v)
        lam = float(v @ w)
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0.0:
            v = rng.standard_normal(n)  # restarted: start vector was in the kernel
            v /= np.linalg.norm(v)
            lam_prev = None
            continue
        v = w / norm_w
        if lam_prev is not None and abs(lam - lam_prev) <= tol * abs(lam):
            sigma = math.sqrt(max(lam, 0.0))
            upper = min(sigma * (1.0 + tol), _d_cap(cls, p))
            return _make_report(cls, "spectral", None, sigma, None, p,
                                mixing_constant, bounds=(0.0, upper),
                                mc_kind="lower_bound")
        lam_prev = lam
    raise ConvergenceError(
        f"power iteration did not converge in {max_iters} iterations",
        last_value=math.sqrt(max(lam, 0.0)),
        residual=abs(lam - (lam_prev if lam_prev is not None else 0.0)))


def d_search_lower_bound(cls, baseline=HALF, seed=0, restarts=16, budget=10000,
                         mixing_constant=1.0):
    """Lower bound on d_min by steepest-ascent search over subset pairs.

    Each start draws a random non-empty pair, then repeatedly applies the
    best single-element toggle (add/remove one hypothesis or example) while
    it improves the discrepancy, up to ``budget`` accepted moves.  The best
    pair over ``restarts + 1`` starts is returned; with ``restarts=0`` and
    ``budget=0`` this is just the seeded initial pair.  Always a valid lower
    bound, and deterministic given the seed.
    """
    if restarts < 0 or budget < 0:
        raise InputError("restarts and budget must be >= 0")
    p = as_baseline(cls, baseline)
    pf = float(p)
    h, x = cls.shape
    Mi = cls.labels.astype(np.int64)
    best = _Best()

    for start in range(int(restarts) + 1):
        rng = rng_from(seed, start)
        T = rng.integers(0, 2, size=h).astype(bool)
        S = rng.integers(0, 2, size=x).astype(bool)
        if not T.any():
            T[int(rng.integers(0, h))] = True
        if not S.any():
            S[int(rng.integers(0, x))] = True
        cT = Mi[T].sum(axis=0)          # per-example neighbor counts in T
        cS = Mi[:, S].sum(axis=1)       # per-hypothesis neighbor counts in S
        t, s = int(T.sum()), int(S.sum())
        e = int(cT[S].sum())

        def q(e_, s_, t_):
            return (e_ - pf * s_ * t_) ** 2 / (s_ * t_)

        for _ in range(int(budget)):
            sign_h = 1 - 2 * T.astype(np.int64)      # +1 = add, -1 = remove
            new_t = t + sign_h
            new_e_h = e + sign_h * cS
            ok_h = new_t >= 1
            q_h = np.where(
                ok_h, (new_e_h - pf * s * new_t) ** 2 / np.maximum(s * new_t, 1), -1.0)
            sign_x = 1 - 2 * S.astype(np.int64)
            new_s = s + sign_x
            new_e_x = e + sign_x * cT
            ok_x = new_s >= 1
            q_x = np.where(
                ok_x, (new_e_x - pf * new_s * t) ** 2 / np.maximum(new_s * t, 1), -1.0)

            cur = q(e, s, t)
            ih = int(np.argmax(q_h))
            ix = int(np.argmax(q_x))
            if max(q_h[ih], q_x[ix]) <= cur * (1 + 1e-12) + 1e-15:
                break
            if q_h[ih] >= q_x[ix]:
                add = not T[ih]
                T[ih] = add
                cT = cT + (Mi[ih] if add else -Mi[ih])
                e = int(new_e_h[ih])
                t = int(new_t[ih])
            else:
                add = not S[ix]
                S[ix] = add
                cS = cS + (Mi[:, ix] if add else -Mi[:, ix])
                e = int(new_e_x[ix])
                s = int(new_s[ix])

        hyps = tuple(int(i) for i in np.nonzero(T)[0])
        exs = tuple(int(j) for j in np.nonzero(S)[0])
        d2 = _exact_value(e, s, t, p)
        best.offer(d2, hyps, exs)

    d = math.sqrt(float(best.d2))
    witness = SubsetPair(best.hyps, best.exs)
    return _make_report(cls, "search", best.d2, d, witness, p, mixing_constant,
                        bounds=(d, _d_cap(cls, p)), mc_kind="upper_bound")


_ENGINES = {
    "exact": d_min_exact,
    "oracle": d_min_bruteforce_oracle,
    "spectral": d_spectral_bound,
    "search": d_search_lower_bound,
}


def compute_mixing_report(cls, method="exact", **kwargs):
    """Dispatch to one of the engines by name."""
    try:
        engine = _ENGINES[method]
    except KeyError:
        raise InputError(f"unknown method {method!r}; choose from {sorted(_ENGINES)}")
    return engine(cls, **kwargs)


def mixing_complexity(cls, method="exact", **kwargs):
    """sqrt(|H||X|) / d for the chosen method's d.

    Exact for the exact/oracle engines; a lower bound on the true mixing
    complexity with the spectral method and an upper bound with search (see
    the report's ``mc_kind``).  Returns +inf when d is 0.
    """
    mc = compute_mixing_report(cls, method=method, **kwargs).mixing_complexity
    if math.isinf(mc):
        warnings.warn("d is 0; mixing complexity is infinite", RuntimeWarning)
    return mc


def is_mixing(cls, method="exact", mixing_constant=1.0, **kwargs):
    """Whether d <= mixing_constant * sqrt(|X|) under the chosen method."""
    report = compute_mixing_report(cls, method=method,
                                   mixing_constant=mixing_constant, **kwargs)
    return report.is_mixing


@dataclass
class Theorem1Report:
    """Preconditions and memory bound of the bounded-memory lower bound.

    Checks, for supplied exponents ``a`` and ``s`` and a mixing value ``d``:
    (i) d^2 <= |X| * |H|^a, (ii) the near-balanced density condition
    |e(H,X)/|H| - |X|/2| <= d * sqrt(|X|/|H|), and reports the memory-state
    budget |H|^(1.25 - s - 3a) plus whether a < 1/12 (the regime where the
    bound beats the trivial |H|-state counting argument).
    """

    a: float
    s: float
    d: float
    mixing_strength_ok: bool
    density_ok: bool
    memory_state_bound: float
    interesting: bool

    def to_json_dict(self):
        return {
            "a": self.a,
            "s": self.s,
            "d": self.d,
            "mixing_strength_ok": self.mixing_strength_ok,
            "density_ok": self.density_ok,
            "memory_state_bound": self.memory_state_bound,
            "interesting": self.interesting,
        }


def check_theorem1_preconditions(cls, a, s, d):
    """Evaluate the unlearnability theorem's preconditions for this class."""
    a = float(a)
    s = float(s)
    d = float(d)
    if not 0 <= a <= 1:
        raise InputError(f"a must be in [0, 1], got {a}")
    if not 0 < s < 1:
        raise InputError(f"s must be in (0, 1), got {s}")
    h, x = cls.shape
    e_total = int(cls.labels.sum(dtype=np.int64))
    mixing_strength_ok = d * d <= x * h**a
    density_ok = abs(e_total / h - x / 2) <= d * math.sqrt(x / h)
    return Theorem1Report(
        a=a, s=s, d=d,
        mixing_strength_ok=bool(mixing_strength_ok),
        density_ok=bool(density_ok),
        memory_state_bound=float(h) ** (1.25 - s - 3 * a),
        interesting=bool(a < 1 / 12),
    )
