"""Finite-state learners over labeled example streams, and their simulation.

A learner is a finite automaton: states are memory configurations, the
transition consumes one labeled example, and each state outputs a hypothesis
index of the class under study.  Targets are always drawn from the class
itself (realizable setting), examples arrive i.i.d. from an explicit
distribution, and success means the output hypothesis reaches test error at
most epsilon.

Included learners:

* :func:`threshold_interval_learner` - tracks a (lo, hi) consistency
  interval for the threshold ladder family; O(|X|^2) states.
* :func:`version_space_learner` - one state per subset of still-consistent
  hypotheses (2^|H| states, deliberately memory-hungry baseline).
* :func:`table_learner` - explicit transition/output tables from a file.
"""

import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from ._util import rng_from
from .errors import CapacityError, InputError, ParseError

__all__ = [
    "FiniteStateLearner",
    "SimulationConfig",
    "TrialOutcome",
    "SimulationOutcome",
    "test_error",
    "training_error",
    "run_learner",
    "sample_complexity",
    "threshold_interval_learner",
    "version_space_learner",
    "make_table_learner",
    "random_table_learner",
    "table_learner",
    "write_table_learner",
]


@dataclass(frozen=True)
class FiniteStateLearner:
    """Automaton over memory states with a hypothesis output per state.

    ``transition(state, example_index, label_bit) -> state`` and
    ``output(state) -> hypothesis_index`` must be total on their domains.
    ``num_examples`` pins the example domain size when the learner is
    domain-specific (None means any domain).
    """

    num_states: int
    initial_state: int
    transition: Callable
    output: Callable
    name: str = ""
    num_examples: Optional[int] = None

    def __post_init__(self):
        if self.num_states < 1:
            raise InputError("num_states must be >= 1")
        if not 0 <= self.initial_state < self.num_states:
            raise InputError("initial_state out of range")

    @property
    def memory_bits(self):
        """ceil(log2(num_states)): tape bits needed to hold the state."""
        return max(1, (self.num_states - 1).bit_length())


@dataclass(frozen=True)
class SimulationConfig:
    """Accuracy targets, example distribution, budgets and seeding.

    ``distribution`` is an explicit probability vector over examples (None
    means uniform).  ``reuse_epochs`` switches from i.i.d. draws to cycling
    random permutations of the domain -- deliberate example reuse, outside
    the i.i.d. assumptions the unlearnability result needs.
    """

    epsilon: float = 0.25
    delta: float = 0.25
    distribution: Optional[tuple] = None
    max_examples: int = 1000
    trials: int = 1
    seed: int = 0
    reuse_epochs: bool = False

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise InputError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise InputError(f"delta must be in (0, 1), got {self.delta}")
        if self.max_examples < 0:
            raise InputError("max_examples must be >= 0")
        if self.trials < 1:
            raise InputError("trials must be >= 1")

    def resolved_distribution(self, num_examples):
        if self.distribution is None:
            return None
        dist = np.asarray(self.distribution, dtype=np.float64)
        if dist.shape != (num_examples,):
            raise InputError(
                f"distribution has length {dist.shape}, expected {num_examples}")
        if (dist < 0).any():
            raise InputError("distribution entries must be non-negative")
        if abs(float(dist.sum()) - 1.0) > 1e-12:
            raise InputError("distribution must sum to 1 within 1e-12")
        return dist


def _check_hyp(cls, idx, what="hypothesis"):
    if not 0 <= int(idx) < cls.num_hypotheses:
        raise InputError(f"{what} index {idx} out of range [0, {cls.num_hypotheses})")
    return int(idx)


def test_error(cls, h, f, distribution=None):
    """Probability under the distribution that hypotheses h and f disagree."""
    h = _check_hyp(cls, h)
    f = _check_hyp(cls, f)
    diff = cls.labels[h] != cls.labels[f]
    if distribution is None:
        return float(diff.mean())
    dist = SimulationConfig(distribution=tuple(distribution)).resolved_distribution(
        cls.num_examples)
    return float(dist @ diff)


def training_error(cls, h, sample):
    """Fraction of the labeled sample that hypothesis h gets wrong."""
    h = _check_hyp(cls, h)
    sample = list(sample)
    if not sample:
        raise InputError("sample must be non-empty")
    wrong = 0
    for x, y in sample:
        x = int(x)
        if not 0 <= x < cls.num_examples:
            raise InputError(f"example index {x} out of range")
        wrong += int(cls.labels[h, x]) != int(y)
    return wrong / len(sample)


@dataclass(frozen=True)
class TrialOutcome:
    """One simulated trial: examples consumed until success, or exhaustion."""

    target: int
    steps_to_success: Optional[int]
    exhausted: bool
    final_error: float
    examples_seen: int
    states: Optional[tuple] = None  # trajectory incl. initial state
    errors: Optional[tuple] = None  # output test error after each step

    @property
    def succeeded(self):
        return self.steps_to_success is not None

    def to_json_dict(self):
        return {
            "target": self.target,
            "steps_to_success": self.steps_to_success,
            "succeeded": self.succeeded,
            "exhausted": self.exhausted,
            "final_error": self.final_error,
            "examples_seen": self.examples_seen,
        }


def _error_table(cls, f, dist):
    diffs = (cls.labels != cls.labels[f])
    if dist is None:
        return diffs.mean(axis=1)
    return diffs @ dist


def _draws(rng, num_examples, count, dist, reuse_epochs):
    if count == 0:
        return np.empty(0, dtype=np.int64)
    if reuse_epochs:
        if dist is not None:
            raise InputError("reuse_epochs supports only the uniform distribution")
        epochs = []
        drawn = 0
        while drawn < count:
            epochs.append(rng.permutation(num_examples))
            drawn += num_examples
        return np.concatenate(epochs)[:count]
    return rng.choice(num_examples, size=count, p=dist)


def run_learner(learner, cls, f, config, record_trajectory=True, rng=None):
    """Feed one seeded example stream labeled by target f through the learner.

    The trial succeeds at the first step (possibly step 0, before any
    example) where the output hypothesis has test error at most epsilon; it
    stops there.  If the budget runs out first, the outcome is flagged
    exhausted.  Deterministic given (learner, f, config.seed).
    """
    f = _check_hyp(cls, f, "target")
    if learner.num_examples is not None and learner.num_examples != cls.num_examples:
        raise InputError(
            f"learner expects {learner.num_examples} examples, class has {cls.num_examples}")
    dist = config.resolved_distribution(cls.num_examples)
    if rng is None:
        rng = rng_from(config.seed)
    errors_by_hyp = _error_table(cls, f, dist)
    row_f = cls.labels[f]

    state = learner.initial_state
    out = _check_hyp(cls, learner.output(state), "output hypothesis")
    err = float(errors_by_hyp[out])
    states = [state]
    errs = [err]
    steps_to_success = 0 if err <= config.epsilon else None
    seen = 0
    if steps_to_success is None:
        stream = _draws(rng, cls.num_examples, config.max_examples, dist,
                        config.reuse_epochs)
        for x in stream.tolist():
            state = learner.transition(state, x, int(row_f[x]))
            out = _check_hyp(cls, learner.output(state), "output hypothesis")
            err = float(errors_by_hyp[out])
            seen += 1
            if record_trajectory:
                states.append(state)
                errs.append(err)
            if err <= config.epsilon:
                steps_to_success = seen
                break
    return TrialOutcome(
        target=f,
        steps_to_success=steps_to_success,
        exhausted=steps_to_success is None,
        final_error=err,
        examples_seen=seen,
        states=tuple(states) if record_trajectory else None,
        errors=tuple(errs) if record_trajectory else None,
    )


@dataclass(frozen=True)
class SimulationOutcome:
    """Aggregate over targets and trials, worst case over targets.

    ``m_hat`` is the smallest example count m such that every tested target
    reached error <= epsilon within m examples in at least
    ceil((1-delta)*trials) of its trials; None when some target missed that
    even at the full budget.
    """

    m_hat: Optional[int]
    success_frequency: float
    required_successes: int
    trials: int
    max_examples: int
    per_target: dict  # target -> tuple of steps_to_success (None = exhausted)

    def trial_rows(self):
        rows = []
        for f in sorted(self.per_target):
            for k, steps in enumerate(self.per_target[f]):
                rows.append({
                    "target": f,
                    "trial": k,
                    "steps_to_success": steps,
                    "succeeded": steps is not None,
                })
        return rows

    def to_json_dict(self):
        return {
            "m_hat": self.m_hat,
            "success_frequency": self.success_frequency,
            "required_successes": self.required_successes,
            "trials": self.trials,
            "max_examples": self.max_examples,
            "per_target": {str(f): [s for s in steps]
                           for f, steps in sorted(self.per_target.items())},
        }


def sample_complexity(learner, cls, config, targets=None):
    """Estimate the worst-case-over-targets sample complexity empirically.

    Runs ``config.trials`` trials per target (trial k of target f draws its
    stream from the derived seed (seed, f, k)).  ``targets`` defaults to all
    hypotheses when |H| <= 64, else a seeded sample of 16 distinct ones.
    """
    h = cls.num_hypotheses
    if targets is None:
        if h <= 64:
            targets = range(h)
        else:
            targets = sorted(
                int(v) for v in
                rng_from(config.seed, 0xA11).choice(h, size=16, replace=False))
    targets = [_check_hyp(cls, f, "target") for f in targets]
    if not targets:
        raise InputError("need at least one target")

    per_target = {}
    successes = 0
    for f in targets:
        steps = []
        for k in range(config.trials):
            outcome = run_learner(learner, cls, f, config,
                                  record_trajectory=False,
                                  rng=rng_from(config.seed, f, k))
            steps.append(outcome.steps_to_success)
            successes += outcome.succeeded
        per_target[f] = tuple(steps)

    needed = math.ceil((1 - config.delta) * config.trials)
    worst = 0
    m_hat = None
    complete = True
    for f, steps in per_target.items():
        finite = sorted(s for s in steps if s is not None)
        if len(finite) < needed:
            complete = False
            break
        worst = max(worst, finite[needed - 1])
    if complete:
        m_hat = worst
    return SimulationOutcome(
        m_hat=m_hat,
        success_frequency=successes / (len(targets) * config.trials),
        required_successes=needed,
        trials=config.trials,
        max_examples=config.max_examples,
        per_target=per_target,
    )


def threshold_interval_learner(num_examples):
    """Consistency-interval learner for the threshold ladder class.

    The state is a pair (lo, hi) of grid indices, lo, hi in {-1, ..., n-1}
    with lo <= hi + 1; consistent hypotheses are exactly indices
    lo+1 ... hi+1.  A label-1 example raises lo, a label-0 example lowers
    hi, and the output is the middle consistent hypothesis (rounded down).
    The initial state is the full interval (-1, n-1).  (n+1)^2 states.
    """
    n = int(num_examples)
    if n < 2:
        raise InputError("threshold interval learner needs num_examples >= 2")
    width = n + 1

    def encode(lo, hi):
        return (lo + 1) * width + (hi + 1)

    def transition(state, x, label):
        lo = state // width - 1
        hi = state % width - 1
        if label:
            lo = max(lo, x)
        else:
            hi = min(hi, x - 1)
        if lo > hi + 1:  # contradictory stream; canonicalize to empty interval
            hi = lo - 1
        return encode(lo, hi)

    def output(state):
        lo = state // width - 1
        hi = state % width - 1
        return (lo + hi) // 2 + 1

    return FiniteStateLearner(
        num_states=width * width,
        initial_state=encode(-1, n - 1),
        transition=transition,
        output=output,
        name=f"threshold_interval[x={n}]",
        num_examples=n,
    )


def version_space_learner(cls):
    """Elimination learner: state = bitmask of still-consistent hypotheses.

    Uses 2^|H| memory states (capped at |H| <= 20) and outputs the
    lowest-index surviving hypothesis; under realizability the target always
    survives.  The deliberately unbounded-memory baseline.
    """
    h, x = cls.shape
    if h > 20:
        raise CapacityError(f"version space learner caps |H| at 20, got {h}")
    full = (1 << h) - 1
    consistent = [[0, 0] for _ in range(x)]
    for j in range(x):
        col = cls.labels[:, j]
        ones = 0
        for i in range(h):
            if col[i]:
                ones |= 1 << i
        consistent[j][1] = ones
        consistent[j][0] = full & ~ones

    def transition(state, xj, label):
        nxt = state & consistent[xj][label]
        return nxt  # empties only on non-realizable streams

    def output(state):
        if state == 0:
            return 0
        return (state & -state).bit_length() - 1

    return FiniteStateLearner(
        num_states=1 << h,
        initial_state=full,
        transition=transition,
        output=output,
        name=f"version_space[h={h}]",
        num_examples=x,
    )


def make_table_learner(transitions, outputs, initial_state=0, name="table",
                       num_hypotheses=None):
    """Learner backed by explicit arrays.

    ``transitions`` has shape (num_states, num_examples, 2) of state ids and
    ``outputs`` shape (num_states,) of hypothesis indices.
    """
    transitions = np.asarray(transitions, dtype=np.int64)
    outputs = np.asarray(outputs, dtype=np.int64)
    if transitions.ndim != 3 or transitions.shape[2] != 2:
        raise InputError("transitions must have shape (states, examples, 2)")
    n_states, n_examples, _ = transitions.shape
    if outputs.shape != (n_states,):
        raise InputError("outputs must have shape (num_states,)")
    if (transitions < 0).any() or (transitions >= n_states).any():
        raise InputError("transition targets out of state range")
    if (outputs < 0).any():
        raise InputError("output hypothesis indices must be >= 0")
    if num_hypotheses is not None and (outputs >= num_hypotheses).any():
        raise InputError("output hypothesis indices out of range")

    def transition(state, x, label):
        return int(transitions[state, x, label])

    def output(state):
        return int(outputs[state])

    return FiniteStateLearner(
        num_states=int(n_states),
        initial_state=int(initial_state),
        transition=transition,
        output=output,
        name=name,
        num_examples=int(n_examples),
    )


def random_table_learner(num_states, num_examples, num_hypotheses, seed):
    """Uniformly random table learner (for baseline families)."""
    rng = rng_from(seed)
    transitions = rng.integers(0, num_states, size=(num_states, num_examples, 2))
    outputs = rng.integers(0, num_hypotheses, size=num_states)
    return make_table_learner(transitions, outputs, initial_state=0,
                              name=f"random_table[s={num_states},seed={seed}]",
                              num_hypotheses=num_hypotheses)


# --- table-learner file format ---------------------------------------------
#
#   line 1: FSL1
#   line 2: states=<n> init=<id> examples=<x>
#   one line per (state, example, label):  <state> <ex> <0|1> -> <state>
#   one line per state:                    out <state> <hyp>
#
# Every (state, example, label) triple and every state's output must be
# present exactly once.

_FSL_HEADER_RE = re.compile(r"^states=(\d+) init=(\d+) examples=(\d+)$")
_FSL_TRANS_RE = re.compile(r"^(\d+) (\d+) ([01]) -> (\d+)$")
_FSL_OUT_RE = re.compile(r"^out (\d+) (\d+)$")


def write_table_learner(learner, dest):
    """Materialize a learner's tables into the text format."""
    if learner.num_examples is None:
        raise InputError("learner must declare num_examples to be tabled")
    n, x = learner.num_states, learner.num_examples
    lines = [f"FSL1\nstates={n} init={learner.initial_state} examples={x}\n"]
    for state in range(n):
        for ex in range(x):
            for label in (0, 1):
                lines.append(f"{state} {ex} {label} -> "
                             f"{learner.transition(state, ex, label)}\n")
    for state in range(n):
        lines.append(f"out {state} {learner.output(state)}\n")
    data = "".join(lines)
    if hasattr(dest, "write"):
        dest.write(data)
    else:
        Path(dest).write_text(data, encoding="ascii", newline="")


def table_learner(src, name="table"):
    """Parse a table learner file, validating totality of both tables."""
    if hasattr(src, "read"):
        text = src.read()
    else:
        text = Path(src).read_text(encoding="ascii")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != "FSL1":
        raise ParseError("expected FSL1 magic", line=1)
    if len(lines) < 2:
        raise ParseError("missing header", line=2)
    m = _FSL_HEADER_RE.match(lines[1])
    if not m:
        raise ParseError(f"expected 'states=<n> init=<id> examples=<x>', got {lines[1]!r}",
                         line=2)
    n_states, init, n_examples = (int(g) for g in m.groups())
    if n_states < 1 or n_examples < 1:
        raise ParseError("states and examples must be >= 1", line=2)
    if not 0 <= init < n_states:
        raise ParseError(f"init state {init} out of range", line=2)

    transitions = np.full((n_states, n_examples, 2), -1, dtype=np.int64)
    outputs = np.full(n_states, -1, dtype=np.int64)
    for idx in range(2, len(lines)):
        line = lines[idx]
        if not line.strip():
            continue
        tm = _FSL_TRANS_RE.match(line)
        if tm:
            s, e, lab, target = (int(g) for g in tm.groups())
            if s >= n_states or target >= n_states:
                raise ParseError(f"state id out of range in {line!r}", line=idx + 1)
            if e >= n_examples:
                raise ParseError(f"example id out of range in {line!r}", line=idx + 1)
            if transitions[s, e, lab] != -1:
                raise ParseError(f"duplicate transition {line!r}", line=idx + 1)
            transitions[s, e, lab] = target
            continue
        om = _FSL_OUT_RE.match(line)
        if om:
            s, hyp = (int(g) for g in om.groups())
            if s >= n_states:
                raise ParseError(f"state id out of range in {line!r}", line=idx + 1)
            if outputs[s] != -1:
                raise ParseError(f"duplicate output for state {s}", line=idx + 1)
            outputs[s] = hyp
            continue
        raise ParseError(f"unrecognized line {line!r}", line=idx + 1)

    missing = np.argwhere(transitions == -1)
    if missing.size:
        s, e, lab = missing[0]
        raise ParseError(f"missing transition for state={s} example={e} label={lab}")
    missing_out = np.nonzero(outputs == -1)[0]
    if missing_out.size:
        raise ParseError(f"missing output for state={missing_out[0]}")
    return make_table_learner(transitions, outputs, initial_state=init, name=name)
