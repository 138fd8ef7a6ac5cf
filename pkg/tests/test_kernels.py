import os
import subprocess
import sys

import numpy as np
import pytest

from halo import _kernels_py as pure
from halo import kernels

compiled = pytest.importorskip("halo._kernels") if kernels.COMPILED else None


def test_fallback_selected_by_environment():
    code = "import halo.kernels as k; print(k.COMPILED)"
    env = dict(os.environ, HALO_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"


def test_pure_rational_blocks_match_the_word_algorithm():
    from fractions import Fraction

    from halo.words import rational_word

    for p, q in [(7, 5), (41, 29), (13, 4)]:
        for l1 in range(1, q + 1):
            assert tuple(pure.rational_blocks(p, q, l1, q)) == rational_word(Fraction(p, q), l1).blocks


@pytest.mark.skipif(not kernels.COMPILED, reason="compiled kernels not built")
def test_compiled_matches_pure():
    rng = np.random.default_rng(0)
    phis = rng.uniform(0, 2 * np.pi, 5000)
    assert np.allclose(compiled.crossing_rates(phis, 1.7, 2.0, 3.0), pure.crossing_rates(phis, 1.7, 2.0, 3.0), rtol=1e-15)
    assert np.array_equal(compiled.rational_blocks(577, 408, 5, 2000), pure.rational_blocks(577, 408, 5, 2000))
    ds, eps, betas = rng.uniform(0, 2, 300), rng.uniform(0, 1e-4, 300), rng.uniform(0, 1e-3, 300)
    for a, b in zip(compiled.roof_chain(1.0, ds, eps, betas), pure.roof_chain(1.0, ds, eps, betas)):
        assert np.allclose(a, b, rtol=1e-13, equal_nan=True)


def test_huge_inputs_route_to_python():
    out = kernels.rational_blocks(2**70 + 1, 2**69, 1, 5)
    assert set(out.tolist()) <= {2, 3}
