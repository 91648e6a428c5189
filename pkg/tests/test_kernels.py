import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxbounds import _kernels_py as py
from maxbounds import kernels

compiled = pytest.importorskip("maxbounds._kernels")


def random_paths(seed, m=200, n=65, integer=False):
    rng = np.random.default_rng(seed)
    if integer:
        return np.ascontiguousarray(rng.integers(-3, 4, size=(m, n)).astype(np.float64))
    return np.ascontiguousarray(np.cumsum(rng.standard_normal((m, n)), axis=1) * 0.2)


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")
    assert set(kernels.backends()) >= {"python"}


@pytest.mark.parametrize("integer", [False, True])
def test_integer_results_agree_exactly(integer):
    x = random_paths(1, integer=integer)
    for a, b in [(-0.1, 0.1), (-1.0, 1.0), (0.0, 2.0)]:
        np.testing.assert_array_equal(compiled.upcross_counts(x, a, b), py.upcross_counts(x, a, b))
        for row in x[:50]:
            np.testing.assert_array_equal(compiled.upcross_times(row, a, b), py.upcross_times(row, a, b))
        assert compiled.lemma3_check_rows(x, a, b, 2) == py.lemma3_check_rows(x, a, b, 2)
    np.testing.assert_array_equal(compiled.abs_max_rows(x), py.abs_max_rows(x))


def test_pair_means_agree_to_rounding():
    x = random_paths(2, m=300, n=17)
    for p in (1.0, 2.0, 4.0, 2.7):
        np.testing.assert_allclose(compiled.pair_moment_means(x, p), py.pair_moment_means(x, p), rtol=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(-4, 4), min_size=1, max_size=80), st.floats(-2, 1), st.floats(0.01, 2))
def test_scan_agrees_on_arbitrary_paths(values, a, width):
    y = np.asarray(values, dtype=np.float64)
    b = a + width
    np.testing.assert_array_equal(compiled.upcross_times(y, a, b), py.upcross_times(y, a, b))
    block = np.ascontiguousarray(y[None, :])
    assert compiled.lemma3_check_rows(block, a, b, 3) == py.lemma3_check_rows(block, a, b, 3)


def test_lemma3_kernel_reports_no_violations_and_counts_checks():
    x = random_paths(3)
    checks, bad, first = compiled.lemma3_check_rows(x, -0.1, 0.1, 2)
    u = compiled.upcross_counts(x, -0.1, 0.1)
    assert checks == int(np.sum(u + 2)) and bad == 0 and first == -1


def test_pure_python_fallback_selected_by_environment():
    code = "import maxbounds.kernels as k; print(k.BACKEND)"
    env = dict(os.environ, MAXBOUNDS_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
