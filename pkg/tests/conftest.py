"""Shared helpers for the test suite."""

import numpy as np

from ouprocess import random_admissible_kappa


def separated_random_kappa(rng, p, min_sep=0.02, repeat_prob=0.25):
    """Random admissible kappa whose *distinct* roots are >= min_sep apart.

    Near-degenerate (but not exactly equal) roots make any partial-fraction
    representation ill-conditioned in double precision, so closed-form vs
    oracle comparisons sample away from them.  With probability
    ``repeat_prob`` an exactly repeated real root is forced instead, which
    exercises the grouped (higher-multiplicity) branch.
    """
    for _ in range(200):
        if p >= 2 and rng.random() < repeat_prob:
            lam = rng.uniform(0.05, 3.0)
            rest = random_admissible_kappa(rng, p - 2) if p > 2 else []
            kap = np.concatenate([[lam, lam], np.asarray(rest, dtype=complex)])
        else:
            kap = np.asarray(random_admissible_kappa(rng, p), dtype=complex)
        d = np.abs(kap[:, None] - kap[None, :])
        iu = np.triu_indices(p, k=1)
        off = d[iu]
        if np.all((off == 0.0) | (off >= min_sep)):
            return kap
    raise RuntimeError("could not sample a well-separated kappa")
