"""Monte-Carlo replicate kernels.

Both kernels draw the same Beta variates from the same per-replicate
bit-generator stream in the same order, so their outputs are bit-identical;
which one runs is a packaging concern, not a semantic one. The compiled
kernel is preferred when built. Set STORMFLUX_KERNEL=python or =compiled
to force a choice.
"""

from __future__ import annotations

import os

import numpy as np

from ..errors import ValidationError
from . import python_kernel

try:
    from . import _ckernel
except ImportError:
    _ckernel = None

KERNEL_ENV = "STORMFLUX_KERNEL"


def available_kernels() -> tuple[str, ...]:
    if _ckernel is not None:
        return ("python", "compiled")
    return ("python",)


def active_kernel_name() -> str:
    forced = os.environ.get(KERNEL_ENV)
    if forced:
        if forced not in ("python", "compiled"):
            raise ValidationError(
                f"{KERNEL_ENV}={forced!r}; expected 'python' or 'compiled'"
            )
        if forced == "compiled" and _ckernel is None:
            raise ValidationError(
                f"{KERNEL_ENV}=compiled but the compiled kernel is not built"
            )
        return forced
    return "compiled" if _ckernel is not None else "python"


def draw_evacuees(a, b, persons, county_of, n_counties, replicates, seed,
                  kernel=None) -> np.ndarray:
    """Per-replicate evacuee counts by county.

    Replicate r draws one Beta(a_i, b_i) participation rate per block group
    from PCG64 seeded with (seed, r), multiplies by that block group's
    population, and sums into its county. Returns replicates x n_counties.
    """
    name = kernel or active_kernel_name()
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    persons = np.ascontiguousarray(persons, dtype=np.float64)
    county_of = np.ascontiguousarray(county_of, dtype=np.int64)
    if not (a.shape == b.shape == persons.shape == county_of.shape) or a.ndim != 1:
        raise ValidationError("kernel inputs must be equal-length 1-d arrays")
    if replicates < 1:
        raise ValidationError(f"replicates must be >= 1, got {replicates}")
    if n_counties < 1:
        raise ValidationError(f"n_counties must be >= 1, got {n_counties}")
    if a.size:
        if np.min(a) <= 0.0 or np.min(b) <= 0.0:
            raise ValidationError("Beta parameters must be positive")
        lo, hi = int(county_of.min()), int(county_of.max())
        if lo < 0 or hi >= n_counties:
            raise ValidationError("county index out of range")
    if name == "compiled":
        return _ckernel.draw_evacuees(a, b, persons, county_of,
                                      int(n_counties), int(replicates), int(seed))
    return python_kernel.draw_evacuees(a, b, persons, county_of,
                                       int(n_counties), int(replicates), int(seed))
