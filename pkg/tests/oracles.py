"""Independent reference computations used by the tests.

Nothing here calls into enose.classifier; predictions come straight from the
SensorSpec coefficients.
"""
import numpy as np

ORACLE_POINTS = 1_000_000


def oracle_log_ratio_table(specs, species, ppm):
    """log(Rs/Ro), shape (len(ppm), len(specs)), evaluated term by term."""
    cols = []
    for spec in specs:
        a, alpha = spec.sensitivity[int(species)]
        cols.append(-np.log(1.0 + a * (ppm / spec.c_ref) ** alpha))
    return np.column_stack(cols)


class GridOracle:
    """Exhaustive log-spaced grid minimiser of the log-space misfit."""

    def __init__(self, specs, species, lo=1e-1, hi=1e5, points=ORACLE_POINTS):
        self.ppm = np.geomspace(lo, hi, points)
        self.table = oracle_log_ratio_table(specs, species, self.ppm)

    def fit(self, observed):
        diff = self.table - np.log(np.asarray(observed))
        loss = np.einsum("ij,ij->i", diff, diff)
        i = int(np.argmin(loss))
        return self.ppm[i], float(np.sqrt(loss[i] / diff.shape[1]))


def brute_force_classify(specs, observed, oracles):
    """Species with the smallest grid-oracle residual (lowest code on ties)."""
    best = None
    for species, oracle in oracles.items():
        c, res = oracle.fit(observed)
        if best is None or res < best[2]:
            best = (species, c, res)
    return best
