"""Shared fixtures.

The covariant-vector run at the reference chaotic point is session
scoped because several modules inspect the same frames; everything
else builds its own (cheap) data.
"""

import numpy as np
import pytest

from shimor import dynsys, lyap
from shimor.integrate import separatrix_seed

REF_ALPHA, REF_LAM = 0.4, 0.9


@pytest.fixture(scope="session")
def ref_params():
    return dynsys.sm(REF_ALPHA, REF_LAM)


@pytest.fixture(scope="session")
def clv_run_ref(ref_params):
    """Stride-mode covariant vectors at (0.4, 0.9).

    T = 2500 with 500-unit transients on both ends and a 0.5 renorm
    grid retains frames on [500, 2000]: 3001 of them.
    """
    s0 = separatrix_seed(ref_params, "plus")
    return lyap.covariant_vectors(
        ref_params, s0, T=2500.0, transient_fwd=500.0, transient_bwd=500.0,
        frame_mode="stride", renorm_interval=0.5,
        q0=dynsys.saddle_frame(REF_ALPHA, REF_LAM))
