"""Acquisition side: ADC quantisation, measurement noise, baseline and features.

Response and recovery times use the t90 convention: the time for the
resistance to cover 90 % of the span between baseline and steady state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidParameter, NoSteadyState, OutOfRange, WindowTooLong
from .gas_model import SensorTrace

T90_FRACTION = 0.9
STEADY_FRACTION = 0.1
# relative spans below this count as "no response"
ZERO_SPAN = 1e-9


@dataclass(frozen=True)
class AdcConfig:
    bits: int = 10
    v_ref: float = 5.0

    def __post_init__(self):
        if not (isinstance(self.bits, int) and 8 <= self.bits <= 16):
            raise InvalidParameter(f"ADC bits must be an integer in [8, 16], got {self.bits!r}")
        if not self.v_ref > 0:
            raise InvalidParameter(f"ADC v_ref must be > 0, got {self.v_ref!r}")

    @property
    def full_scale(self) -> int:
        return (1 << self.bits) - 1

    @property
    def lsb(self) -> float:
        return self.v_ref / self.full_scale


@dataclass(frozen=True)
class NoiseConfig:
    resistance_sigma: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.resistance_sigma) and self.resistance_sigma >= 0):
            raise InvalidParameter(f"resistance_sigma must be >= 0, got {self.resistance_sigma!r}")


def quantize(v, cfg: AdcConfig):
    """ADC code for voltage ``v``: round(v / v_ref * (2**bits - 1)), half to even."""
    arr = np.asarray(v, dtype=float)
    if np.any(~((arr >= 0) & (arr <= cfg.v_ref))):
        raise OutOfRange(f"voltage {v!r} outside [0, {cfg.v_ref}]")
    codes = np.rint(arr / cfg.v_ref * cfg.full_scale).astype(np.int64)
    return int(codes) if codes.ndim == 0 else codes


def dequantize(code, cfg: AdcConfig):
    v = np.asarray(code, dtype=float) * cfg.lsb
    return float(v) if v.ndim == 0 else v


def apply_noise(trace: SensorTrace, cfg: NoiseConfig, stream: int = 0) -> SensorTrace:
    """Multiply each resistance by (1 + N(0, sigma)); voltages follow through the divider.

    The generator is rebuilt from ``(cfg.seed, stream)`` on every call, so the
    result depends only on its arguments.  Give each sensor its own ``stream``.
    """
    if cfg.resistance_sigma == 0:
        return trace
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, stream]))
    factor = 1.0 + cfg.resistance_sigma * rng.standard_normal(len(trace))
    # keep resistances physical under extreme sigma
    factor = np.maximum(factor, 1e-6)
    return trace.with_resistance(trace.resistance * factor)


def calibrate_baseline(trace: SensorTrace, window: float) -> float:
    """Mean resistance over the final ``window`` seconds of a clean-air trace."""
    if not window > 0:
        raise InvalidParameter("baseline window must be > 0")
    if len(trace) == 0 or trace.duration + 1e-9 < window:
        raise WindowTooLong(f"trace spans {trace.duration:g} s, window is {window:g} s")
    tail = trace.resistance[trace.t >= trace.t[-1] - window - 1e-9]
    return float(np.mean(tail))


@dataclass(frozen=True)
class SensorFeatures:
    sensor_id: str
    steady_ratio: float
    response_time_t90: float
    recovery_time_t90: float
    baseline_r0: float

    def csv_row(self) -> str:
        return (f"{self.sensor_id},{self.steady_ratio:.9g},{self.response_time_t90:.6g},"
                f"{self.recovery_time_t90:.6g},{self.baseline_r0:.9g}")


FEATURE_HEADER = "sensor,steady_ratio,response_t90_s,recovery_t90_s,baseline_r0_ohm"


def _steady_window(trace):
    n = len(trace)
    k = max(1, int(math.ceil(STEADY_FRACTION * n)))
    return trace.t[-k:], trace.resistance[-k:]


def _relative_drift(t, r):
    """Least-squares change across the window relative to its mean."""
    if len(t) < 2:
        return 0.0
    slope = np.polyfit(t - t[0], r, 1)[0]
    return abs(slope * (t[-1] - t[0])) / float(np.mean(r))


def _t90(trace, start_level, end_level):
    span = end_level - start_level
    if abs(span) <= ZERO_SPAN * abs(start_level):
        return 0.0
    covered = (trace.resistance - start_level) / span
    hits = np.nonzero(covered >= T90_FRACTION)[0]
    if len(hits) == 0:
        return float(trace.t[-1] - trace.t[0])
    return float(trace.t[hits[0]] - trace.t[0])


def extract_features(exposure_trace: SensorTrace, recovery_trace: SensorTrace, baseline: float,
                     flatness: float = 0.01) -> SensorFeatures:
    """Steady Rs/Ro and t90 response/recovery times for one sensor.

    ``exposure_trace`` runs from gas onset to the end of measurement,
    ``recovery_trace`` from the start of the purge.  Raises NoSteadyState when
    the last 10 % of the exposure still drifts by more than ``flatness``.
    """
    if not baseline > 0:
        raise InvalidParameter("baseline must be > 0")
    if len(exposure_trace) == 0 or len(recovery_trace) == 0:
        raise InvalidParameter("feature extraction needs nonempty traces")
    t_win, r_win = _steady_window(exposure_trace)
    drift = _relative_drift(t_win, r_win)
    if drift > flatness:
        raise NoSteadyState(f"{exposure_trace.sensor_id or 'sensor'}: still drifting "
                            f"{drift:.2%} across the steady-state window")
    steady = float(np.mean(r_win))
    ratio = min(steady / baseline, 1.0)
    return SensorFeatures(
        sensor_id=exposure_trace.sensor_id,
        steady_ratio=ratio,
        response_time_t90=_t90(exposure_trace, baseline, steady),
        recovery_time_t90=_t90(recovery_trace, steady, baseline),
        baseline_r0=baseline,
    )


def feature_csv(features: Sequence[SensorFeatures]) -> str:
    return "\n".join([FEATURE_HEADER] + [f.csv_row() for f in features]) + "\n"


TRACE_COLUMNS = "t_s,resistance_ohm,v_rl_volt,adc_code"


def trace_csv(trace: SensorTrace, adc: AdcConfig, meta: dict[str, object] | None = None) -> str:
    """Trace as CSV with ``#`` metadata lines above the column header."""
    codes = quantize(np.minimum(trace.v_out, adc.v_ref), adc)
    lines = [f"# sensor={trace.sensor_id}",
             f"# sample_period_s={trace.sample_period!r}",
             f"# r_load_ohm={trace.circuit.r_load!r}",
             f"# v_bias_volt={trace.circuit.v_bias!r}",
             f"# adc_bits={adc.bits}",
             f"# adc_v_ref_volt={adc.v_ref!r}"]
    for key, value in (meta or {}).items():
        lines.append(f"# {key}={value}")
    lines.append(TRACE_COLUMNS)
    for t, r, v, code in zip(trace.t, trace.resistance, trace.v_out, codes):
        lines.append(f"{t:.3f},{r:.6f},{v:.9f},{code}")
    return "\n".join(lines) + "\n"


def read_trace_csv(text: str) -> tuple[dict[str, str], np.ndarray]:
    """Parse `trace_csv` output into (metadata, array of rows)."""
    meta, rows = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key] = value
        elif line and line != TRACE_COLUMNS:
            rows.append([float(x) for x in line.split(",")])
    return meta, np.array(rows)
