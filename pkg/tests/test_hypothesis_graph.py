"""Generators, edge counts, density, canonicalization and serialization."""

import io
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixlab import (HypothesisClass, InputError, ParseError, SubsetPair,
                    canonicalize, density, edge_count, gen_parity,
                    gen_partitioned, gen_random, gen_threshold, read_class,
                    threshold_values, write_class)


def classes_strategy(max_h=6, max_x=6):
    return st.integers(1, max_h).flatmap(
        lambda h: st.integers(1, max_x).flatmap(
            lambda x: st.lists(
                st.lists(st.integers(0, 1), min_size=x, max_size=x),
                min_size=h, max_size=h))).map(
        lambda rows: HypothesisClass(np.array(rows, dtype=np.uint8)))


# --- threshold family -------------------------------------------------------

def threshold_labels_oracle(n):
    """Direct evaluation of h_b(x) = [x <= b] on the rational grid."""
    grid = [Fraction(j, n - 1) for j in range(n)]
    return [[1 if x <= b else 0 for x in grid] for b in threshold_values(n)]


@pytest.mark.parametrize("n", [2, 3, 4, 7, 16])
def test_threshold_matches_direct_evaluation(n):
    assert gen_threshold(n).labels.tolist() == threshold_labels_oracle(n)


def test_threshold_shapes_and_row_counts():
    cls = gen_threshold(4)
    assert cls.shape == (5, 4)
    assert cls.labels.sum(axis=1).tolist() == [0, 1, 2, 3, 4]
    assert gen_threshold(2).shape == (3, 2)
    assert int(gen_threshold(2).labels.sum()) == 3


@pytest.mark.parametrize("n", list(range(2, 65)))
def test_threshold_total_edges(n):
    assert int(gen_threshold(n).labels.sum()) == n * (n + 1) // 2


def test_threshold_rejects_tiny_domain():
    with pytest.raises(InputError):
        gen_threshold(1)


# --- parity family -----------------------------------------------------------

def parity_labels_oracle(n):
    """Enumerate subsets of {1..n} and XOR the selected coordinates."""
    points = [[(j >> i) & 1 for i in range(n)] for j in range(2 ** n)]
    rows = []
    for size in range(1, n + 1):
        for subset in combinations(range(n), size):
            rows.append([sum(p[i] for i in subset) % 2 for p in points])
    return rows


@pytest.mark.parametrize("n", [1, 2, 3])
def test_parity_matches_subset_xor_oracle(n):
    got = {tuple(row) for row in gen_parity(n).labels.tolist()}
    want = {tuple(row) for row in parity_labels_oracle(n)}
    assert got == want
    assert gen_parity(n).shape == (2 ** n - 1, 2 ** n)


def test_parity_small_facts():
    p2 = gen_parity(2)
    assert p2.labels.sum(axis=1).tolist() == [2, 2, 2]
    assert gen_parity(1).shape == (1, 2)
    assert int(gen_parity(1).labels.sum()) == 1
    # the all-zeros point gets label 0 from every parity
    assert p2.labels[:, 0].tolist() == [0, 0, 0]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_parity_density_exactly_half(n):
    cls = gen_parity(n)
    assert density(cls) == Fraction(1, 2)
    assert (cls.labels.sum(axis=1) == 2 ** (n - 1)).all()


def test_parity_range_check():
    with pytest.raises(InputError):
        gen_parity(0)
    with pytest.raises(InputError):
        gen_parity(21)


# --- random / partitioned ----------------------------------------------------

def test_random_is_seed_deterministic():
    assert gen_random(4, 4, seed=7) == gen_random(4, 4, seed=7)
    assert gen_random(1, 1, seed=3).shape == (1, 1)


def test_random_density_concentrates():
    ok = sum(
        0.4 <= float(density(gen_random(64, 64, seed=s))) <= 0.6
        for s in range(100))
    assert ok >= 95


def test_partitioned_structure():
    cls = gen_partitioned(8, 16, 4, seed=2)
    # contiguous parts of size 4, constant per hypothesis
    for p in range(4):
        block = cls.labels[:, 4 * p:4 * (p + 1)]
        assert (block == block[:, :1]).all()
    flat = gen_partitioned(5, 6, 1, seed=0)
    assert all(len(set(row)) == 1 for row in flat.labels.tolist())
    assert gen_partitioned(6, 6, 6, seed=9) == gen_random(6, 6, seed=9)
    with pytest.raises(InputError):
        gen_partitioned(4, 4, 5, seed=0)
    with pytest.raises(InputError):
        gen_partitioned(4, 4, 0, seed=0)


# --- edge_count / density ----------------------------------------------------

def test_edge_count_examples():
    th4 = gen_threshold(4)
    assert edge_count(th4, SubsetPair.make([4], [0])) == 1  # top threshold
    assert edge_count(th4, SubsetPair.make(range(5), range(4))) == 10
    assert edge_count(gen_parity(2), SubsetPair.make(range(3), range(4))) == 6
    assert edge_count(th4, SubsetPair.make([], [0, 1])) == 0
    with pytest.raises(InputError):
        edge_count(th4, SubsetPair.make([9], [0]))
    with pytest.raises(InputError):
        edge_count(th4, SubsetPair.make([0], [4]))


def test_density_examples():
    ones = HypothesisClass(np.ones((3, 5), dtype=np.uint8))
    assert density(ones) == 1
    assert density(gen_threshold(4)) == Fraction(1, 2)


@settings(max_examples=60, deadline=None)
@given(classes_strategy(), st.data())
def test_edge_count_monotone_and_additive(cls, data):
    h, x = cls.shape
    T1 = data.draw(st.sets(st.integers(0, h - 1)))
    T2 = data.draw(st.sets(st.integers(0, h - 1)))
    S1 = data.draw(st.sets(st.integers(0, x - 1)))
    S2 = data.draw(st.sets(st.integers(0, x - 1)))
    small = edge_count(cls, SubsetPair.make(T1, S1))
    big = edge_count(cls, SubsetPair.make(T1 | T2, S1 | S2))
    assert small <= big
    # additivity over a disjoint example split
    S_all = sorted(S1 | S2)
    left, right = set(S_all[::2]), set(S_all[1::2])
    assert (edge_count(cls, SubsetPair.make(T1, left))
            + edge_count(cls, SubsetPair.make(T1, right))
            == edge_count(cls, SubsetPair.make(T1, left | right)))


# --- canonicalize ------------------------------------------------------------

def test_canonicalize():
    cls = HypothesisClass([[1, 0], [1, 0], [0, 1]])
    canon = canonicalize(cls)
    assert canon.labels.tolist() == [[0, 1], [1, 0]]
    assert canonicalize(canon) == canon
    assert canonicalize(gen_parity(2)).num_hypotheses == 3


# --- serialization -----------------------------------------------------------

def roundtrip(cls, fmt="text"):
    buf = io.StringIO()
    write_class(cls, buf, fmt=fmt)
    return read_class(io.StringIO(buf.getvalue()))


@pytest.mark.parametrize("fmt", ["text", "csv"])
def test_roundtrip_generated(fmt):
    for cls in (gen_threshold(5), gen_parity(3), gen_random(7, 3, seed=1)):
        assert roundtrip(cls, fmt) == cls


def test_roundtrip_many_random_classes():
    rngs = range(1000)
    for s in rngs:
        cls = gen_random(1 + s % 7, 1 + (s * 13) % 9, seed=s)
        assert roundtrip(cls) == cls


def test_text_format_bytes():
    buf = io.StringIO()
    write_class(HypothesisClass([[1, 0], [0, 1]]), buf)
    assert buf.getvalue() == "HCLS1\nh=2 x=2\n10\n01\n"


def test_text_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as err:
        read_class(io.StringIO("HCLS1\nh=3 x=2\n10\n01\n"))
    assert "3 rows" in str(err.value)
    with pytest.raises(ParseError) as err:
        read_class(io.StringIO("HCLS1\nh=1 x=2\n1x\n"))
    assert err.value.line == 3
    with pytest.raises(ParseError) as err:
        read_class(io.StringIO("HCLS1\nh=1 x=2\n101\n"))
    assert err.value.line == 3
    with pytest.raises(ParseError) as err:
        read_class(io.StringIO("HCLS1\nbad header\n"))
    assert err.value.line == 2


def test_csv_with_header_matches_text():
    text = read_class(io.StringIO("HCLS1\nh=2 x=3\n101\n010\n"))
    csv = read_class(io.StringIO("a,b,c\n1,0,1\n0,1,0\n"))
    csv_bare = read_class(io.StringIO("1,0,1\n0,1,0\n"))
    assert csv == text
    assert csv_bare == text
    with pytest.raises(ParseError):
        read_class(io.StringIO("a,b\n1,2\n"))
    with pytest.raises(ParseError):
        read_class(io.StringIO("1,0\n1,0,1\n"))


def test_file_roundtrip(tmp_path):
    path = tmp_path / "c.hcls"
    cls = gen_random(5, 5, seed=11)
    write_class(cls, path)
    assert read_class(path) == cls


# --- class construction ------------------------------------------------------

def test_class_validation():
    with pytest.raises(InputError):
        HypothesisClass(np.zeros((0, 3)))
    with pytest.raises(InputError):
        HypothesisClass([[0, 2]])
    with pytest.raises(InputError):
        HypothesisClass([1, 0])


def test_row_masks_popcount():
    cls = HypothesisClass([[1, 0, 1], [0, 1, 1]])
    assert cls.row_masks == (0b101, 0b110)
    assert cls.labels.flags.writeable is False
