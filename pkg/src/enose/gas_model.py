"""Physics of a single metal-oxide (SnO2) gas sensor.

The steady-state law is a sum of power laws in conductance,

    Ro/Rs = 1 + sum_g A_g * (C_g / c_ref) ** alpha_g

so clean air sits exactly at Rs/Ro = 1 and every gas pulls the ratio down
along a straight line on log-log axes once its term dominates.  Transients
are a first-order relaxation toward the current steady-state resistance with
separate time constants for adsorption (falling R) and recovery (rising R).
The sensor sits in the low side of a divider with a load resistor; the
voltage across the load is what the ADC sees.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidParameter, InvalidSchedule, NonPositiveVoltage, OverBias

__all__ = [
    "GasSpecies", "GasMixture", "SensorSpec", "DividerCircuit", "EnvConditions",
    "SensorTrace", "Segment", "REFERENCE_ENV", "REFERENCE_TEMPERATURE",
    "REFERENCE_HUMIDITY", "steady_state_ratio", "steady_state_resistance",
    "divider_output", "resistance_from_output", "drift_adjusted_r0",
    "step_response", "normalize_schedule",
]

REFERENCE_TEMPERATURE = 20.0  # °C
REFERENCE_HUMIDITY = 50.0  # %RH
# drift is never allowed to push Ro below this fraction of its nominal value
MIN_DRIFT_FACTOR = 0.1


class GasSpecies(enum.IntEnum):
    """Target gases; the integer value is the wire code used on the CAN bus."""

    METHANE = 0
    ETHANOL = 1
    PROPANE = 2
    ISOBUTANE = 3
    HYDROGEN = 4

    @property
    def label(self) -> str:
        return self.name.capitalize()

    @classmethod
    def parse(cls, text: str) -> "GasSpecies":
        key = text.strip().upper()
        aliases = {"CH4": "METHANE", "C2H5OH": "ETHANOL", "C3H8": "PROPANE",
                   "C4H10": "ISOBUTANE", "H2": "HYDROGEN", "H": "HYDROGEN"}
        key = aliases.get(key, key)
        try:
            return cls[key]
        except KeyError:
            raise InvalidParameter(f"unknown gas species {text!r}") from None


N_SPECIES = len(GasSpecies)


def _check_finite_nonneg(name, value):
    if not math.isfinite(value) or value < 0:
        raise InvalidParameter(f"{name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class GasMixture:
    """Concentration in ppm of each species, indexed by species code."""

    ppm: tuple[float, ...] = (0.0,) * N_SPECIES

    def __post_init__(self):
        ppm = tuple(float(c) for c in self.ppm)
        if len(ppm) != N_SPECIES:
            raise InvalidParameter(f"mixture needs {N_SPECIES} concentrations, got {len(ppm)}")
        for sp, c in zip(GasSpecies, ppm):
            _check_finite_nonneg(f"{sp.label} concentration", c)
        object.__setattr__(self, "ppm", ppm)

    @classmethod
    def clean_air(cls) -> "GasMixture":
        return cls()

    @classmethod
    def of(cls, concentrations: Mapping[GasSpecies | str, float] | None = None, **kw) -> "GasMixture":
        """Build from a mapping, e.g. ``GasMixture.of(methane=500)``."""
        ppm = [0.0] * N_SPECIES
        items = dict(concentrations or {})
        items.update(kw)
        for key, c in items.items():
            sp = key if isinstance(key, GasSpecies) else GasSpecies.parse(key)
            ppm[sp] += float(c)
        return cls(tuple(ppm))

    @classmethod
    def single(cls, species: GasSpecies, c: float) -> "GasMixture":
        return cls.of({species: c})

    def __getitem__(self, species: GasSpecies) -> float:
        return self.ppm[int(species)]

    @property
    def is_clean(self) -> bool:
        return not any(self.ppm)

    def nonzero(self) -> dict[GasSpecies, float]:
        return {sp: c for sp, c in zip(GasSpecies, self.ppm) if c > 0}


@dataclass(frozen=True)
class SensorSpec:
    """Parameters of one MOX sensor.

    ``sensitivity`` holds one ``(A, alpha)`` pair per species, in species-code
    order.  ``temp_coeff`` and ``humidity_coeff`` are fractional drifts of Ro
    per °C and per %RH away from the 20 °C / 50 %RH reference.
    """

    id: str
    r0_clean_air: float
    sensitivity: tuple[tuple[float, float], ...]
    tau_rise: float
    tau_fall: float
    c_ref: float = 100.0
    heater_voltage: float = 5.0
    operating_temp: float = 300.0
    temp_coeff: float = 0.0
    humidity_coeff: float = 0.0

    def __post_init__(self):
        pairs = tuple((float(a), float(alpha)) for a, alpha in self.sensitivity)
        object.__setattr__(self, "sensitivity", pairs)
        if len(pairs) != N_SPECIES:
            raise InvalidParameter(f"{self.id}: need {N_SPECIES} sensitivity pairs, got {len(pairs)}")
        if not self.r0_clean_air > 0:
            raise InvalidParameter(f"{self.id}: r0_clean_air must be > 0")
        for sp, (a, alpha) in zip(GasSpecies, pairs):
            if not (math.isfinite(a) and a >= 0):
                raise InvalidParameter(f"{self.id}: gain A for {sp.label} must be >= 0")
            if not (math.isfinite(alpha) and alpha > 0):
                raise InvalidParameter(f"{self.id}: exponent alpha for {sp.label} must be > 0")
        for name in ("tau_rise", "tau_fall", "c_ref"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameter(f"{self.id}: {name} must be > 0, got {value!r}")

    def gain(self, species: GasSpecies) -> float:
        return self.sensitivity[int(species)][0]

    def exponent(self, species: GasSpecies) -> float:
        return self.sensitivity[int(species)][1]


@dataclass(frozen=True)
class DividerCircuit:
    r_load: float = 10_000.0
    v_bias: float = 5.0

    def __post_init__(self):
        if not self.r_load > 0:
            raise InvalidParameter(f"r_load must be > 0, got {self.r_load!r}")
        if not self.v_bias > 0:
            raise InvalidParameter(f"v_bias must be > 0, got {self.v_bias!r}")


@dataclass(frozen=True)
class EnvConditions:
    temperature: float = REFERENCE_TEMPERATURE
    relative_humidity: float = REFERENCE_HUMIDITY

    def __post_init__(self):
        if not 0.0 <= self.relative_humidity <= 100.0:
            raise InvalidParameter(f"relative humidity must be in [0, 100], got {self.relative_humidity!r}")
        if not math.isfinite(self.temperature):
            raise InvalidParameter("temperature must be finite")


REFERENCE_ENV = EnvConditions()


def steady_state_ratio(spec: SensorSpec, mix: GasMixture) -> float:
    """Rs/Ro for a sensor held in ``mix`` long enough to settle."""
    return 1.0 / (1.0 + _conductance_excess(spec, mix))


def _conductance_excess(spec, mix):
    total = 0.0
    for (a, alpha), c in zip(spec.sensitivity, mix.ppm):
        if c > 0 and a > 0:
            total += a * (c / spec.c_ref) ** alpha
    return total


def drift_adjusted_r0(spec: SensorSpec, env: EnvConditions = REFERENCE_ENV) -> float:
    factor = ((1.0 + spec.temp_coeff * (env.temperature - REFERENCE_TEMPERATURE))
              * (1.0 + spec.humidity_coeff * (env.relative_humidity - REFERENCE_HUMIDITY)))
    return spec.r0_clean_air * max(factor, MIN_DRIFT_FACTOR)


def steady_state_resistance(spec: SensorSpec, mix: GasMixture, env: EnvConditions = REFERENCE_ENV) -> float:
    return drift_adjusted_r0(spec, env) * steady_state_ratio(spec, mix)


def divider_output(rs, circuit: DividerCircuit):
    """Voltage across the load resistor; accepts scalars or arrays."""
    return circuit.v_bias * circuit.r_load / (rs + circuit.r_load)


def resistance_from_output(v_rl, circuit: DividerCircuit):
    """Invert `divider_output`.  Raises on voltages the divider cannot produce."""
    v = np.asarray(v_rl, dtype=float)
    if np.any(~(v > 0)):
        raise NonPositiveVoltage(f"output voltage must be > 0, got {v_rl!r}")
    if np.any(v > circuit.v_bias):
        raise OverBias(f"output voltage {v_rl!r} exceeds bias {circuit.v_bias!r}")
    rs = circuit.r_load * (circuit.v_bias - v) / v
    return float(rs) if rs.ndim == 0 else rs


@dataclass(frozen=True)
class Segment:
    """Constant exposure over ``[start, end)`` seconds."""

    start: float
    end: float
    mixture: GasMixture = field(default_factory=GasMixture)


def normalize_schedule(exposure: Iterable[Segment], duration: float) -> list[Segment]:
    """Validate a piecewise-constant exposure and return it as a tiling of [0, duration].

    An empty schedule means clean air throughout.  Segments must start at 0,
    abut exactly and reach ``duration``; zero-length segments are dropped.
    """
    segments = list(exposure)
    if not segments:
        return [Segment(0.0, float(duration))]
    out = []
    cursor = 0.0
    for seg in segments:
        if seg.start < 0 or seg.end < 0:
            raise InvalidSchedule(f"negative time in segment {seg}")
        if seg.end < seg.start:
            raise InvalidSchedule(f"segment ends before it starts: {seg}")
        if seg.start != cursor:
            raise InvalidSchedule(f"schedule gap or overlap at t={cursor} (next segment starts at {seg.start})")
        cursor = seg.end
        if seg.end > seg.start:
            out.append(seg)
    if cursor < duration:
        raise InvalidSchedule(f"schedule ends at {cursor} s, before duration {duration} s")
    return out


@dataclass(frozen=True, eq=False)
class SensorTrace:
    """Uniformly sampled resistance and divider voltage of one sensor."""

    sample_period: float
    t: np.ndarray
    resistance: np.ndarray
    v_out: np.ndarray
    circuit: DividerCircuit = DividerCircuit()
    sensor_id: str = ""

    def __post_init__(self):
        for name in ("t", "resistance", "v_out"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = len(self.t)
        if not (len(self.resistance) == n and len(self.v_out) == n):
            raise InvalidParameter("trace columns differ in length")
        if not self.sample_period > 0:
            raise InvalidParameter("sample_period must be > 0")
        if n > 1:
            steps = np.diff(self.t)
            if np.any(steps <= 0) or np.any(np.abs(steps - self.sample_period) > 1e-6 * self.sample_period):
                raise InvalidParameter("trace timestamps must be uniformly spaced by sample_period")
        if np.any(self.resistance <= 0):
            raise InvalidParameter("trace resistances must be > 0")

    def __len__(self):
        return len(self.t)

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0]) if len(self.t) else 0.0

    def between(self, start: float, end: float) -> "SensorTrace":
        """Samples with ``start <= t <= end`` (1e-9 s slack at both edges)."""
        mask = (self.t >= start - 1e-9) & (self.t <= end + 1e-9)
        return SensorTrace(self.sample_period, self.t[mask], self.resistance[mask],
                           self.v_out[mask], self.circuit, self.sensor_id)

    def with_resistance(self, resistance: np.ndarray) -> "SensorTrace":
        resistance = np.asarray(resistance, dtype=float)
        return SensorTrace(self.sample_period, self.t, resistance,
                           divider_output(resistance, self.circuit), self.circuit, self.sensor_id)


def step_response(spec: SensorSpec, exposure: Sequence[Segment], env: EnvConditions = REFERENCE_ENV,
                  sample_period: float = 0.1, duration: float | None = None,
                  circuit: DividerCircuit = DividerCircuit()) -> SensorTrace:
    """Sample the sensor's response to a piecewise-constant exposure.

    Each segment is solved in closed form from the resistance reached at its
    start, so a sample's value depends only on its timestamp and never on
    ``sample_period``.  The trace starts at the drift-adjusted Ro; ``duration``
    defaults to the end of the last segment.
    """
    if not sample_period > 0:
        raise InvalidParameter("sample_period must be > 0")
    segments = list(exposure)
    if duration is None:
        if not segments:
            raise InvalidSchedule("duration is required for an empty schedule")
        duration = segments[-1].end
    if duration < sample_period:
        raise InvalidParameter("duration must be at least one sample period")
    segments = normalize_schedule(segments, duration)

    n = int(math.floor(duration / sample_period + 1e-9)) + 1
    t = np.arange(n) * sample_period
    r = np.empty(n)
    r_start = drift_adjusted_r0(spec, env)
    lo = 0
    for i, seg in enumerate(segments):
        last = i == len(segments) - 1
        hi = n if last else int(np.searchsorted(t, seg.end, side="left"))
        target = steady_state_resistance(spec, seg.mixture, env)
        tau = spec.tau_rise if target < r_start else spec.tau_fall
        gap = r_start - target
        # math.exp per sample keeps values independent of array position
        for k in range(lo, hi):
            r[k] = target + gap * math.exp(-(t[k] - seg.start) / tau)
        r_start = target + gap * math.exp(-(seg.end - seg.start) / tau)
        lo = hi
    return SensorTrace(sample_period, t, r, divider_output(r, circuit), circuit, spec.id)
