"""Reference replicate kernel on numpy primitives.

Generator.beta with array arguments calls the same C sampler elementwise in
array order, and bincount accumulates weights in index order, so the compiled
kernel can reproduce this exactly.
"""

from __future__ import annotations

import numpy as np
from numpy.random import PCG64, Generator, SeedSequence


def draw_evacuees(a, b, persons, county_of, n_counties, replicates, seed):
    evac = np.empty((replicates, n_counties), dtype=np.float64)
    for r in range(replicates):
        gen = Generator(PCG64(SeedSequence((seed, r))))
        rates = gen.beta(a, b) if a.size else np.empty(0)
        evac[r] = np.bincount(county_of, weights=rates * persons,
                              minlength=n_counties)
    return evac
