"""Kernel selection: compiled extension when importable, numpy fallback otherwise.

Set ``RELAYLAB_PURE=1`` in the environment to force the fallback.
"""

import os

from . import _fallback

BACKEND = "python"
kernels = _fallback

if not os.environ.get("RELAYLAB_PURE"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        kernels = _compiled
        BACKEND = "compiled"

segment_shot_noise = kernels.segment_shot_noise
polar_shot_noise = kernels.polar_shot_noise
kl_bernoulli = kernels.kl_bernoulli
kl_ucb_bound = kernels.kl_ucb_bound
