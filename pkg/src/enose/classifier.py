"""Gas identification by fitting each species' array response curve.

For every candidate gas the concentration is the 1-D least-squares fit, in
log space, of the predicted Rs/Ro vector to the observed one.  The candidate
with the smallest misfit wins.  The search for each fit is a log-spaced
coarse grid followed by golden-section refinement around the best grid point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import MalformedVector
from .gas_model import GasSpecies, N_SPECIES, SensorSpec

# c_max of the search; the coarse grid spans [GRID_LOW, C_MAX]
C_MAX = 1e5
GRID_LOW = 1e-1
GRID_POINTS = 241
REL_TOL = 1e-6

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class _Unknown:
    """Sentinel species for rejected classifications."""

    code = 255
    label = "Unknown"

    def __repr__(self):
        return "UNKNOWN"

    def __reduce__(self):
        return "UNKNOWN"


UNKNOWN = _Unknown()


@dataclass(frozen=True)
class FingerprintLibrary:
    """Response-curve coefficients of an array, as ``(sensor, species)`` matrices."""

    specs: tuple[SensorSpec, ...]

    def __post_init__(self):
        specs = tuple(self.specs)
        if len(specs) != 5:
            raise ValueError(f"library needs 5 sensors, got {len(specs)}")
        object.__setattr__(self, "specs", specs)
        gain = np.array([[a for a, _ in s.sensitivity] for s in specs])
        expo = np.array([[alpha for _, alpha in s.sensitivity] for s in specs])
        c_ref = np.array([s.c_ref for s in specs])
        for arr in (gain, expo, c_ref):
            arr.setflags(write=False)
        object.__setattr__(self, "gain", gain)
        object.__setattr__(self, "exponent", expo)
        object.__setattr__(self, "c_ref", c_ref)

    @property
    def sensor_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.specs)

    def log_ratios(self, species: GasSpecies, c) -> np.ndarray:
        """log(Rs/Ro) per sensor; ``c`` may be an array, giving shape (len(c), 5)."""
        c = np.asarray(c, dtype=float)
        sp = int(species)
        scaled = np.divide.outer(c, self.c_ref)
        excess = self.gain[:, sp] * scaled ** self.exponent[:, sp]
        return -np.log1p(excess)


@dataclass(frozen=True)
class ClassificationResult:
    species: GasSpecies | _Unknown
    concentration: float
    residual: float
    confidence: float

    @property
    def is_unknown(self) -> bool:
        return self.species is UNKNOWN

    @property
    def species_code(self) -> int:
        return self.species.code if self.is_unknown else int(self.species)

    @property
    def label(self) -> str:
        return self.species.label

    def csv_row(self) -> str:
        return f"{self.label},{self.concentration:.6g},{self.residual:.6g},{self.confidence:.6g}"


CSV_HEADER = "species,concentration_ppm,residual,confidence"


@dataclass(frozen=True)
class ClassifierOptions:
    residual_threshold: float = 0.15
    c_min: float = 10.0
    residual_scale: float = 0.05


def predict_ratios(lib: FingerprintLibrary, species: GasSpecies, c: float) -> np.ndarray:
    """Steady-state Rs/Ro of each sensor in a single-gas atmosphere."""
    if c < 0:
        raise ValueError("concentration must be >= 0")
    return np.exp(lib.log_ratios(species, c))


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float) -> float:
    """Minimise a unimodal ``f`` on [a, b] until the bracket is narrower than ``tol``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _loss_factory(lib, species, log_obs):
    def loss_log_c(u):
        diff = log_obs - lib.log_ratios(species, math.exp(u))
        return float(diff @ diff)
    return loss_log_c


def fit_concentration(lib: FingerprintLibrary, species: GasSpecies, observed: Sequence[float],
                      c_max: float = C_MAX) -> tuple[float, float]:
    """Best-fit concentration of ``species`` and the RMS log-space misfit.

    Searches c in [0, c_max].  c = 0 (clean air) is checked explicitly so an
    all-ones observation fits exactly at the lower bound.
    """
    log_obs = np.log(np.asarray(observed, dtype=float))
    grid = np.geomspace(GRID_LOW, c_max, GRID_POINTS)
    diffs = log_obs - lib.log_ratios(species, grid)
    losses = np.einsum("ij,ij->i", diffs, diffs)
    loss_zero = float(log_obs @ log_obs)
    i = int(np.argmin(losses))
    if loss_zero <= losses[i]:
        return 0.0, math.sqrt(loss_zero / N_SPECIES)

    u = np.log(grid)
    lo, hi = u[max(i - 1, 0)], u[min(i + 1, len(u) - 1)]
    loss = _loss_factory(lib, species, log_obs)
    # an absolute tolerance in ln c is a relative tolerance in c
    u_best = golden_section(loss, lo, hi, REL_TOL)
    best = loss(u_best)
    if best > losses[i]:
        u_best, best = u[i], float(losses[i])
    return math.exp(u_best), math.sqrt(best / N_SPECIES)


def _validate(observed):
    obs = np.asarray(observed, dtype=float)
    if obs.shape != (N_SPECIES,):
        raise MalformedVector(f"expected {N_SPECIES} ratios, got shape {obs.shape}")
    if not np.all((obs > 0) & (obs <= 1)):
        raise MalformedVector(f"ratios must lie in (0, 1], got {obs.tolist()}")
    return obs


def classify(lib: FingerprintLibrary, observed: Sequence[float],
             opts: ClassifierOptions = ClassifierOptions()) -> ClassificationResult:
    obs = _validate(observed)
    best_sp, best_c, best_res = None, 0.0, math.inf
    for sp in GasSpecies:
        c, res = fit_concentration(lib, sp, obs)
        # strict < keeps the lowest species code on ties
        if res < best_res:
            best_sp, best_c, best_res = sp, c, res
    confidence = math.exp(-best_res / opts.residual_scale)
    if best_res > opts.residual_threshold or best_c < opts.c_min:
        return ClassificationResult(UNKNOWN, 0.0, best_res, confidence)
    return ClassificationResult(best_sp, best_c, best_res, confidence)
