"""Discrepancy engines: exactness, bounds, invariances and the verdicts."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixlab import (CapacityError, ConvergenceError, HypothesisClass,
                    InputError, SubsetPair, check_theorem1_preconditions,
                    d_min_bruteforce_oracle, d_min_exact, d_search_lower_bound,
                    d_spectral_bound, discrepancy, discrepancy_squared_exact,
                    gen_parity, gen_random, gen_threshold, is_mixing,
                    mixing_complexity)

from test_hypothesis_graph import classes_strategy


# --- discrepancy -------------------------------------------------------------

def test_discrepancy_halfgraph_empty_block():
    cls = gen_threshold(8)
    pair = SubsetPair.make(range(5), range(4, 8))  # low thresholds vs high examples
    from mixlab import edge_count
    assert edge_count(cls, pair) == 0
    assert discrepancy(cls, pair) == pytest.approx(math.sqrt(20) / 2)


def test_discrepancy_matching_baseline_is_zero():
    cls = gen_random(5, 6, seed=4)
    pair = SubsetPair.make([0, 2, 3], [1, 4, 5])
    from mixlab import edge_count
    e = edge_count(cls, pair)
    p = Fraction(e, 9)
    assert discrepancy_squared_exact(cls, pair, baseline=p) == 0


def test_discrepancy_single_hypothesis():
    cls = HypothesisClass([[1, 1]])
    pair = SubsetPair.make([0], [0, 1])
    assert discrepancy(cls, pair) == pytest.approx(math.sqrt(2) / 2)


def test_discrepancy_rejects_empty_subsets():
    cls = gen_threshold(4)
    with pytest.raises(InputError):
        discrepancy(cls, SubsetPair.make([], [0]))
    with pytest.raises(InputError):
        discrepancy(cls, SubsetPair.make([0], []))


# --- exact engine vs oracle --------------------------------------------------

def test_parity2_exact_value_and_witness():
    rep = d_min_exact(gen_parity(2))
    assert rep.d_squared_exact == Fraction(3, 4)
    assert rep.d_value == pytest.approx(math.sqrt(3) / 2)
    assert rep.witness == SubsetPair((0, 1, 2), (0,))
    assert rep.mixing_complexity == pytest.approx(4.0)


def test_oracle_small_cases():
    assert d_min_bruteforce_oracle(HypothesisClass([[1]])).d_squared_exact \
        == Fraction(1, 4)
    assert d_min_bruteforce_oracle(gen_parity(2)).d_squared_exact == Fraction(3, 4)


@pytest.mark.parametrize("seed", range(100))
def test_exact_equals_oracle_on_random_6x6(seed):
    cls = gen_random(6, 6, seed=seed)
    assert d_min_exact(cls).d_squared_exact \
        == d_min_bruteforce_oracle(cls).d_squared_exact


def test_exact_equals_oracle_rectangular_and_tall():
    for seed in range(20):
        cls = gen_random(10, 6, seed=seed)  # enumeration flips to the example side
        assert d_min_exact(cls).d_squared_exact \
            == d_min_bruteforce_oracle(cls).d_squared_exact
    for seed in range(20):
        cls = gen_random(4, 11, seed=seed)
        assert d_min_exact(cls).d_squared_exact \
            == d_min_bruteforce_oracle(cls).d_squared_exact


def test_exact_single_all_ones_hypothesis():
    rep = d_min_exact(HypothesisClass([[1, 1]]))
    assert rep.d_value == pytest.approx(math.sqrt(2) / 2)


def test_threshold_lower_bound_via_half_blocks():
    rep = d_min_exact(gen_threshold(8))
    assert rep.d_value >= math.sqrt(4 * 4) / 2


def test_capacity_errors():
    with pytest.raises(CapacityError) as err:
        d_min_exact(gen_random(8, 8, seed=0), max_enum=4)
    assert "spectral" in str(err.value)
    with pytest.raises(CapacityError):
        d_min_bruteforce_oracle(gen_random(13, 4, seed=0))


def test_witness_reproduces_d_value():
    for seed in range(10):
        cls = gen_random(7, 9, seed=seed)
        rep = d_min_exact(cls)
        assert discrepancy(cls, rep.witness) == pytest.approx(rep.d_value, abs=1e-12)
        assert discrepancy_squared_exact(cls, rep.witness) == rep.d_squared_exact


def test_non_half_baseline_against_oracle():
    for seed in range(10):
        cls = gen_random(6, 7, seed=seed)
        p = Fraction(2, 3)
        assert d_min_exact(cls, baseline=p).d_squared_exact \
            == d_min_bruteforce_oracle(cls, baseline=p).d_squared_exact


def test_density_baseline_degenerate_class():
    ones = HypothesisClass(np.ones((3, 4), dtype=np.uint8))
    rep = d_min_exact(ones, baseline="density")
    assert rep.d_value == 0.0
    assert rep.mixing_complexity == math.inf


# --- invariances -------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(classes_strategy(max_h=5, max_x=5), st.randoms(use_true_random=False))
def test_dmin_invariant_under_permutation_and_complement(cls, rnd):
    base = d_min_exact(cls).d_squared_exact
    hperm = list(range(cls.num_hypotheses))
    xperm = list(range(cls.num_examples))
    rnd.shuffle(hperm)
    rnd.shuffle(xperm)
    permuted = HypothesisClass(cls.labels[hperm][:, xperm])
    complemented = HypothesisClass(1 - cls.labels)
    assert d_min_exact(permuted).d_squared_exact == base
    assert d_min_exact(complemented).d_squared_exact == base


@settings(max_examples=40, deadline=None)
@given(classes_strategy(max_h=5, max_x=5))
def test_dmin_universal_upper_bound(cls):
    h, x = cls.shape
    rep = d_min_exact(cls)
    assert rep.d_value <= math.sqrt(h * x) / 2 + 1e-12
    assert rep.d_squared_exact <= Fraction(h * x, 4)


def test_threshold_half_half_lower_bound_many_sizes():
    for n in range(2, 17):
        rep = d_min_exact(gen_threshold(n))
        lb = math.sqrt(((n + 1) // 2) * (n // 2)) / 2
        assert rep.d_value >= lb - 1e-12


# --- spectral ----------------------------------------------------------------

def test_spectral_single_row():
    assert d_spectral_bound(HypothesisClass([[1, 1]])).d_value \
        == pytest.approx(math.sqrt(2) / 2)


@pytest.mark.parametrize("n", [2, 3, 4, 6, 8])
def test_spectral_parity_hits_hadamard_value(n):
    rep = d_spectral_bound(gen_parity(n))
    assert rep.d_value <= math.sqrt(2 ** n) / 2 + 1e-6
    assert rep.d_value == pytest.approx(math.sqrt(2 ** n) / 2, rel=1e-7)


def test_spectral_dominates_exact():
    for seed in range(15):
        cls = gen_random(12, 12, seed=seed)
        exact = d_min_exact(cls).d_value
        spect = d_spectral_bound(cls)
        assert exact <= spect.d_value * (1 + 1e-9) + 1e-12
        assert spect.bounds[1] >= exact - 1e-12


def test_spectral_convergence_error_reports_state():
    with pytest.raises(ConvergenceError) as err:
        d_spectral_bound(gen_random(10, 10, seed=0), max_iters=1)
    assert err.value.last_value is not None


def test_spectral_zero_matrix():
    zeros = HypothesisClass(np.zeros((3, 3), dtype=np.uint8))
    assert d_spectral_bound(zeros, baseline=Fraction(0)).d_value == 0.0


# --- search ------------------------------------------------------------------

def test_search_is_lower_bound():
    for seed in range(10):
        cls = gen_random(8, 8, seed=seed)
        assert d_search_lower_bound(cls, seed=seed).d_value \
            <= d_min_exact(cls).d_value + 1e-12


def test_search_finds_halfgraph_structure():
    rep = d_search_lower_bound(gen_threshold(32), seed=0)
    assert rep.d_value >= 8.0


def test_search_no_moves_reports_initial_pair():
    cls = gen_random(6, 6, seed=3)
    rep = d_search_lower_bound(cls, seed=5, restarts=0, budget=0)
    assert rep.d_value == pytest.approx(discrepancy(cls, rep.witness))


def test_search_deterministic():
    cls = gen_random(20, 20, seed=1)
    a = d_search_lower_bound(cls, seed=9)
    b = d_search_lower_bound(cls, seed=9)
    assert a.d_value == b.d_value and a.witness == b.witness


# --- mixing complexity & verdict ----------------------------------------------

def test_mixing_complexity_examples():
    assert mixing_complexity(gen_parity(2)) == pytest.approx(4.0)
    for n in range(4, 17):
        assert mixing_complexity(gen_threshold(n)) <= 4.0
    assert mixing_complexity(HypothesisClass([[1, 1]])) == pytest.approx(2.0)


def test_mixing_complexity_infinite_warns():
    ones = HypothesisClass(np.ones((2, 2), dtype=np.uint8))
    with pytest.warns(RuntimeWarning):
        assert mixing_complexity(ones, baseline="density") == math.inf


def test_is_mixing_verdicts():
    assert is_mixing(gen_parity(2)) is True
    assert is_mixing(gen_threshold(16)) is False
    for seed in range(5):
        cls = gen_random(6, 9, seed=seed)
        c = math.sqrt(cls.num_hypotheses) / 2
        assert is_mixing(cls, mixing_constant=c) is True


def test_mc_kind_labels():
    cls = gen_random(9, 9, seed=2)
    assert d_min_exact(cls).mc_kind == "exact"
    assert d_spectral_bound(cls).mc_kind == "lower_bound"
    assert d_search_lower_bound(cls, seed=0).mc_kind == "upper_bound"


def test_report_json_shape():
    rep = d_min_exact(gen_parity(2))
    payload = rep.to_json_dict()
    assert set(payload) == {"method", "d_value", "mc", "mc_kind",
                            "density_baseline", "is_mixing", "mixing_constant",
                            "witness", "bounds"}
    assert payload["witness"] == {"T": [0, 1, 2], "S": [0]}
    assert payload["bounds"]["lower"] == payload["bounds"]["upper"]


# --- theorem preconditions ----------------------------------------------------

def test_theorem1_parity4_holds_at_a0():
    cls = gen_parity(4)
    d = math.sqrt(cls.num_examples)  # d^2 = |X| exactly
    rep = check_theorem1_preconditions(cls, a=0.0, s=0.1, d=d)
    assert rep.mixing_strength_ok and rep.density_ok
    assert rep.memory_state_bound == pytest.approx(15 ** 1.15)
    assert rep.interesting is True


def test_theorem1_trivial_bound_fails_strength():
    # at the universal cap d = sqrt(|H||X|)/2, condition (i) needs
    # |H|^(1-a) <= 4; with |H| = 8 that fails strictly below a = 1/3
    cls = gen_random(8, 8, seed=0)
    d = math.sqrt(64) / 2
    for a in (0.0, 0.2, 0.3):
        rep = check_theorem1_preconditions(cls, a=a, s=0.1, d=d)
        assert rep.mixing_strength_ok is False
    assert check_theorem1_preconditions(cls, a=1.0, s=0.1, d=d).mixing_strength_ok


def test_theorem1_threshold_not_close_to_random():
    # the threshold ladder's d grows like sqrt(|H||X|), so from |X|=16 on
    # even a=0's allowance |X| is exceeded
    cls = gen_threshold(16)
    d = d_min_exact(cls).d_value
    rep = check_theorem1_preconditions(cls, a=0.0, s=0.1, d=d)
    assert rep.mixing_strength_ok is False


def test_theorem1_validates_ranges():
    cls = gen_parity(2)
    with pytest.raises(InputError):
        check_theorem1_preconditions(cls, a=1.5, s=0.1, d=1.0)
    with pytest.raises(InputError):
        check_theorem1_preconditions(cls, a=0.0, s=1.0, d=1.0)
