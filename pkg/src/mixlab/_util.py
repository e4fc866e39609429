"""Shared helpers: deterministic RNG construction and canonical JSON output.

All randomness in mixlab flows through :func:`rng_from`, which builds a
NumPy ``Generator`` backed by PCG64 seeded with ``SeedSequence``.  Derived
streams (per-trial, per-level, ...) append integer keys to the entropy
sequence, so ``rng_from(seed, k)`` is the documented splitting rule
"seed + stream key".  Identical keys always reproduce identical streams.
"""

import json
import math
import os

import numpy as np

from .errors import InputError


def rng_from(seed, *stream):
    """Deterministic PCG64 generator for ``seed`` plus optional stream keys."""
    entropy = [int(seed), *[int(k) for k in stream]]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def worker_cap():
    """Worker-count cap from MIXLAB_THREADS (0 or unset = auto).

    Engines are vectorized and run in-process; the cap is honoured in the
    sense that no engine ever spawns more workers than this value.
    """
    raw = os.environ.get("MIXLAB_THREADS", "0")
    try:
        cap = int(raw)
    except ValueError:
        raise InputError(f"MIXLAB_THREADS must be an integer, got {raw!r}")
    if cap < 0:
        raise InputError("MIXLAB_THREADS must be >= 0")
    return cap if cap > 0 else os.cpu_count() or 1


def _round_floats(obj):
    if isinstance(obj, float):
        if math.isinf(obj):
            return "+inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return _round_floats(float(obj))
    if isinstance(obj, np.ndarray):
        return _round_floats(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def json_dumps(obj, indent=None):
    """Canonical JSON: sorted keys, floats at 12 significant digits.

    Non-finite floats are encoded as the strings "+inf"/"-inf"/"nan" so the
    output is strict JSON.  Byte-identical for identical inputs.
    """
    return json.dumps(_round_floats(obj), sort_keys=True, indent=indent)
