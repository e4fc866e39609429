"""Finite hypothesis classes as bipartite 0/1 incidence structures.

A class is a ``|H| x |X|`` bit matrix: rows are hypotheses, columns are
examples, and ``labels[h, x] == 1`` means hypothesis ``h`` labels example
``x`` positively (an edge in the bipartite view).  That orientation is fixed
globally: every subset operation takes hypothesis subsets ``T`` (rows) and
example subsets ``S`` (columns).

Generators for the stock families live here (threshold ladder, parities,
uniform random, planted-partition), together with bit-exact text/CSV
serialization.
"""

import io
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from ._util import rng_from
from .errors import InputError, ParseError

__all__ = [
    "HypothesisClass",
    "SubsetPair",
    "edge_count",
    "density",
    "gen_threshold",
    "gen_parity",
    "gen_random",
    "gen_partitioned",
    "canonicalize",
    "read_class",
    "write_class",
    "threshold_values",
]


class HypothesisClass:
    """Immutable 0/1 label matrix with bit-packed row access.

    Rows are hypotheses, columns are examples.  Duplicate rows are allowed;
    use :func:`canonicalize` to remove them.  The underlying array is made
    read-only, so instances are safe to share between threads.
    """

    __slots__ = ("_labels", "_name", "_row_masks")

    def __init__(self, labels, name=None):
        arr = np.asarray(labels)
        if arr.ndim != 2:
            raise InputError(f"labels must be a 2-D matrix, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError(f"need at least one hypothesis and one example, got {arr.shape}")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise InputError("labels must contain only 0/1 entries")
        arr = arr.astype(np.uint8, copy=True)
        arr.setflags(write=False)
        self._labels = arr
        self._name = name
        self._row_masks = None

    @property
    def labels(self):
        return self._labels

    @property
    def name(self):
        return self._name

    @property
    def num_hypotheses(self):
        return self._labels.shape[0]

    @property
    def num_examples(self):
        return self._labels.shape[1]

    @property
    def shape(self):
        return self._labels.shape

    @property
    def row_masks(self):
        """Rows packed as Python ints; bit ``x`` set iff ``labels[h, x] == 1``.

        This is the popcount-friendly internal representation used by the
        subset enumeration engines.
        """
        if self._row_masks is None:
            packed = np.packbits(self._labels, axis=1, bitorder="little")
            self._row_masks = tuple(
                int.from_bytes(packed[h].tobytes(), "little")
                for h in range(self._labels.shape[0])
            )
        return self._row_masks

    def with_name(self, name):
        return HypothesisClass(self._labels, name=name)

    def __eq__(self, other):
        if not isinstance(other, HypothesisClass):
            return NotImplemented
        return self._labels.shape == other._labels.shape and bool(
            (self._labels == other._labels).all()
        )

    def __hash__(self):
        return hash((self._labels.shape, self._labels.tobytes()))

    def __repr__(self):
        h, x = self._labels.shape
        tag = f" {self._name!r}" if self._name else ""
        return f"<HypothesisClass{tag} {h}x{x}>"


@dataclass(frozen=True)
class SubsetPair:
    """A pair (T, S): hypothesis row indices and example column indices."""

    hyp_subset: tuple
    ex_subset: tuple

    @classmethod
    def make(cls, hyps, exs):
        return cls(tuple(sorted(set(int(i) for i in hyps))),
                   tuple(sorted(set(int(j) for j in exs))))


def _check_pair(cls, pair, require_nonempty=False):
    h, x = cls.shape
    for i in pair.hyp_subset:
        if not 0 <= i < h:
            raise InputError(f"hypothesis index {i} out of range [0, {h})")
    for j in pair.ex_subset:
        if not 0 <= j < x:
            raise InputError(f"example index {j} out of range [0, {x})")
    if require_nonempty and (not pair.hyp_subset or not pair.ex_subset):
        raise InputError("both subsets must be non-empty")


def edge_count(cls, pair):
    """Number of edges e(T, S): pairs (h, x) with h in T, x in S, h(x)=1."""
    _check_pair(cls, pair)
    mask = 0
    for j in pair.ex_subset:
        mask |= 1 << j
    rows = cls.row_masks
    return sum((rows[i] & mask).bit_count() for i in set(pair.hyp_subset))


def density(cls):
    """Edge density e(H, X) / (|H| |X|) as an exact rational."""
    total = int(cls.labels.sum(dtype=np.int64))
    return Fraction(total, cls.num_hypotheses * cls.num_examples)


def threshold_values(num_examples):
    """The threshold parameters of the ladder family, for documentation.

    Grid points are i/(n-1); thresholds sit below the grid, between
    consecutive points, and above the grid, so row ``i`` of
    :func:`gen_threshold` labels exactly the first ``i`` grid points 1.
    """
    n = num_examples
    mids = [Fraction(2 * k + 1, 2 * (n - 1)) for k in range(n - 1)]
    return [Fraction(-1)] + mids + [Fraction(n, n - 1)]


def gen_threshold(num_examples):
    """Threshold ladder class: n+1 hypotheses over an n-point ordered grid.

    Row ``i`` labels the ``i`` smallest examples 1 (row edge counts are
    0, 1, ..., n; total edge count n(n+1)/2).  Labels depend only on the
    grid order; the rational grid/threshold values are documentation
    (:func:`threshold_values`).
    """
    n = int(num_examples)
    if n < 2:
        raise InputError(f"threshold family needs num_examples >= 2, got {n}")
    labels = (np.arange(n)[None, :] < np.arange(n + 1)[:, None]).astype(np.uint8)
    return HypothesisClass(labels, name=f"threshold[x={n}]")


def gen_parity(n):
    """Parity class on n bits: one hypothesis per non-empty index subset.

    Examples are all 2^n binary strings; column ``j`` is the string whose
    i-th coordinate is bit (i-1) of ``j``.  Row ``c-1`` (``1 <= c < 2^n``)
    computes the XOR of the coordinates selected by mask ``c``, so
    ``labels[c-1, j] = popcount(c & j) mod 2`` and |H| = 2^n - 1 = |X| - 1.
    """
    n = int(n)
    if not 1 <= n <= 20:
        raise InputError(f"parity family needs 1 <= n <= 20, got {n}")
    size = 1 << n
    masks = np.arange(1, size, dtype=np.uint64)[:, None]
    points = np.arange(size, dtype=np.uint64)[None, :]
    labels = (np.bitwise_count(masks & points) & 1).astype(np.uint8)
    return HypothesisClass(labels, name=f"parity[n={n}]")


def gen_random(num_hypotheses, num_examples, seed):
    """Uniform random class: each bit is an independent fair coin.

    PRNG is PCG64 seeded via SeedSequence([seed]); identical seeds give
    bit-identical classes.
    """
    h, x = int(num_hypotheses), int(num_examples)
    if h < 1 or x < 1:
        raise InputError(f"dimensions must be >= 1, got {h}x{x}")
    labels = rng_from(seed).integers(0, 2, size=(h, x), dtype=np.uint8)
    return HypothesisClass(labels, name=f"random[{h}x{x},seed={seed}]")


def gen_partitioned(num_hypotheses, num_examples, r, seed):
    """Random class that is constant on r contiguous near-equal example parts.

    Each hypothesis draws r independent fair part-labels, so the result has
    an r-sufficient partition by construction (the detected minimal one may
    be coarser when part label columns collide).
    """
    h, x, r = int(num_hypotheses), int(num_examples), int(r)
    if h < 1 or x < 1:
        raise InputError(f"dimensions must be >= 1, got {h}x{x}")
    if not 1 <= r <= x:
        raise InputError(f"need 1 <= r <= num_examples, got r={r}, x={x}")
    base, extra = divmod(x, r)
    sizes = [base + 1 if i < extra else base for i in range(r)]
    part_labels = rng_from(seed).integers(0, 2, size=(h, r), dtype=np.uint8)
    labels = np.repeat(part_labels, sizes, axis=1)
    return HypothesisClass(labels, name=f"partitioned[{h}x{x},r={r},seed={seed}]")


def canonicalize(cls):
    """Remove duplicate rows and sort rows lexicographically. Idempotent."""
    unique = np.unique(cls.labels, axis=0)
    return HypothesisClass(unique, name=cls.name)


# --- serialization ---------------------------------------------------------
#
# Text format (bit-exact):
#   line 1: HCLS1
#   line 2: h=<int> x=<int>
#   then h lines of exactly x characters from {0,1}; newlines are LF.
#
# CSV format: optional header row, then one row per hypothesis of
# comma-separated 0/1 values.

_HEADER_RE = re.compile(r"^h=(\d+) x=(\d+)$")


def write_class(cls, dest, fmt="text"):
    """Write a class to a path or text stream in `text` or `csv` format."""
    if fmt not in ("text", "csv"):
        raise InputError(f"unknown format {fmt!r}")
    if fmt == "text":
        h, x = cls.shape
        lines = [f"HCLS1\nh={h} x={x}\n"]
        lines += ["".join("1" if v else "0" for v in row) + "\n" for row in cls.labels]
    else:
        x = cls.num_examples
        lines = [",".join(f"x{j}" for j in range(x)) + "\n"]
        lines += [",".join(str(int(v)) for v in row) + "\n" for row in cls.labels]
    data = "".join(lines)
    if hasattr(dest, "write"):
        dest.write(data)
    else:
        Path(dest).write_text(data, encoding="ascii", newline="")


def read_class(src):
    """Read a class from a path or text stream; format is sniffed.

    A first line equal to ``HCLS1`` selects the text format, anything else
    is parsed as CSV.  Malformed input raises :class:`ParseError` carrying
    the offending line number.
    """
    if hasattr(src, "read"):
        text = src.read()
    else:
        text = Path(src).read_text(encoding="ascii")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("empty input", line=1)
    if lines[0] == "HCLS1":
        return _read_text(lines)
    return _read_csv(lines)


def _read_text(lines):
    if len(lines) < 2:
        raise ParseError("missing dimension header", line=2)
    m = _HEADER_RE.match(lines[1])
    if not m:
        raise ParseError(f"expected 'h=<int> x=<int>', got {lines[1]!r}", line=2)
    h, x = int(m.group(1)), int(m.group(2))
    if h < 1 or x < 1:
        raise ParseError(f"dimensions must be >= 1, got h={h} x={x}", line=2)
    if len(lines) != 2 + h:
        raise ParseError(f"header declares {h} rows but file has {len(lines) - 2}",
                         line=min(len(lines), 2 + h) + 1)
    rows = np.empty((h, x), dtype=np.uint8)
    for i in range(h):
        line = lines[2 + i]
        if len(line) != x:
            raise ParseError(f"row has {len(line)} characters, expected {x}", line=3 + i)
        if line.strip("01"):
            raise ParseError("row contains characters outside {0,1}", line=3 + i)
        rows[i] = np.frombuffer(line.encode("ascii"), dtype=np.uint8) - ord("0")
    return HypothesisClass(rows)


def _read_csv(lines):
    rows = []
    start = 0
    first = [c.strip() for c in lines[0].split(",")]
    if any(c not in ("0", "1") for c in first):
        start = 1  # header row
    if start == len(lines):
        raise ParseError("CSV has a header but no data rows", line=2)
    width = None
    for i in range(start, len(lines)):
        cells = [c.strip() for c in lines[i].split(",")]
        if any(c not in ("0", "1") for c in cells):
            raise ParseError("CSV cell outside {0,1}", line=i + 1)
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise ParseError(f"row has {len(cells)} columns, expected {width}", line=i + 1)
        rows.append([int(c) for c in cells])
    return HypothesisClass(np.array(rows, dtype=np.uint8))
