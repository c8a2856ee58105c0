import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from setsize import _fallback, kernels

compiled = pytest.importorskip("setsize._kernels")

keys = st.integers(0, (1 << 64) - 1)


def bitmap_for(n, elements):
    bm = np.zeros(n + 1, dtype=np.uint8)
    bm[list(elements)] = 1
    return bm


def test_mix64_reference_values():
    # splitmix64 from seed 0: the first outputs are well known
    assert kernels.stream_value(0, 0) == 0xE220A8397B1DCDAF
    assert kernels.stream_value(0, 1) == 0x6E789E6AA1B965F4


@given(keys, st.integers(0, 1 << 40), st.integers(1, 1 << 26))
@settings(max_examples=300)
def test_scalar_probe_matches_vector(key, counter, n):
    idx = _fallback.probe_indices(key, counter, 1, n)[0]
    assert idx == kernels.probe_index(key, counter, n)
    assert 1 <= idx <= n


@given(keys, st.integers(0, 1000), st.integers(0, 3000), st.integers(1, 500),
       st.sets(st.integers(1, 500), max_size=40))
@settings(max_examples=200, deadline=None)
def test_probe_kernels_agree(key, start, count, n, elements):
    elements = {e for e in elements if e <= n}
    bm = bitmap_for(n, elements)
    a = compiled.count_probe_hits(bm, n, key, start, count)
    b = _fallback.count_probe_hits(bm, n, key, start, count)
    assert a == b
    assert compiled.first_probe_hit(bm, n, key, start, count) == _fallback.first_probe_hit(bm, n, key, start, count)


@given(keys, st.integers(0, 1000), st.integers(0, 300),
       st.sets(st.integers(1, 10_000), max_size=30), st.floats(0.001, 0.9))
@settings(max_examples=200, deadline=None)
def test_hashed_kernels_agree(key, start, count, elements, p):
    xs = np.array(sorted(elements), dtype=np.int64)
    thr = kernels.threshold_for(p)
    a = compiled.count_hashed_negatives(xs, key, start, count, thr)
    b = _fallback.count_hashed_negatives(xs, key, start, count, thr)
    assert a == b


@given(keys, st.integers(0, 100), st.sets(st.integers(1, 200), min_size=1, max_size=10),
       st.floats(0.01, 0.9))
@settings(max_examples=200, deadline=None)
def test_hashed_negatives_match_scalar_membership(key, start, elements, p):
    thr = kernels.threshold_for(p)
    xs = np.array(sorted(elements), dtype=np.int64)
    expected = sum(
        not any(kernels.hashed_member(kernels.subset_key(key, c), int(x), thr) for x in xs)
        for c in range(start, start + 20)
    )
    assert kernels.count_hashed_negatives(xs, key, start, 20, thr) == expected


def test_first_probe_hit_is_first():
    n = 1000
    bm = bitmap_for(n, [17, 500])
    first = kernels.first_probe_hit(bm, n, 99, 0, 1 << 16)
    idx = _fallback.probe_indices(99, 0, first + 1, n)
    assert idx[-1] in (17, 500) and not np.isin(idx[:-1], [17, 500]).any()
    assert kernels.first_probe_hit(bitmap_for(n, []), n, 99, 0, 5000) == -1


def test_probe_indices_uniform():
    counts = np.bincount(_fallback.probe_indices(5, 0, 70_000, 7), minlength=8)[1:]
    assert counts.min() > 9_500 and counts.max() < 10_500


def test_threshold():
    assert kernels.threshold_for(0.5) == 1 << 63
    assert kernels.threshold_for(0.0) == 0


def test_pure_mode_selected_by_environment():
    code = "from setsize import kernels; print(kernels.BACKEND)"
    env = {**os.environ, "SETSIZE_PURE": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert kernels.BACKEND == "compiled"


def test_pure_mode_same_estimates():
    code = (
        "import numpy as np\n"
        "from setsize.bench import BenchConfig, run_trials\n"
        "for est in ('unrestricted-a', 'interval-sample-a', 'collision'):\n"
        "    cfg = BenchConfig(est, w=[50], eps=[1.0], trials=3, seed=4, n=4096)\n"
        "    print([(r.w_hat, r.queries, r.samples) for r in run_trials(cfg)])\n"
    )
    runs = []
    for pure in ("", "1"):
        env = {k: v for k, v in os.environ.items() if k != "SETSIZE_PURE"}
        if pure:
            env["SETSIZE_PURE"] = pure
        runs.append(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                   text=True, check=True).stdout)
    assert runs[0] == runs[1]
