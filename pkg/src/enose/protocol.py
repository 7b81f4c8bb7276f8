"""Chamber sampling procedure as a state machine.

One run walks Idle -> Evacuate -> Intake -> Stabilize -> Measure -> Purge ->
Idle.  Every phase except Measure ends by itself once its configured duration
has elapsed; Measure is held open until the caller ends it.  Valve and pump
settings are a fixed function of the phase.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Iterator, Mapping

from .errors import ActuatorMismatch, IllegalTransition, InvalidParameter, NegativeFlow, NotIdle
from .gas_model import GasMixture, GasSpecies, Segment

# slack when comparing accumulated phase time against a duration
TIME_EPS = 1e-9


class ProtocolPhase(enum.Enum):
    IDLE = "Idle"
    EVACUATE = "Evacuate"
    INTAKE = "Intake"
    STABILIZE = "Stabilize"
    MEASURE = "Measure"
    PURGE = "Purge"


NEXT_PHASE = {
    ProtocolPhase.IDLE: ProtocolPhase.EVACUATE,
    ProtocolPhase.EVACUATE: ProtocolPhase.INTAKE,
    ProtocolPhase.INTAKE: ProtocolPhase.STABILIZE,
    ProtocolPhase.STABILIZE: ProtocolPhase.MEASURE,
    ProtocolPhase.MEASURE: ProtocolPhase.PURGE,
    ProtocolPhase.PURGE: ProtocolPhase.IDLE,
}


@dataclass(frozen=True)
class Actuators:
    valve1_open: bool
    valve2_open: bool
    pump_on: bool


# valve 1: chamber inlet; valve 2: between chamber and vacuum pump
ACTUATORS = {
    ProtocolPhase.IDLE: Actuators(False, False, False),
    ProtocolPhase.EVACUATE: Actuators(False, True, True),
    ProtocolPhase.INTAKE: Actuators(True, False, False),
    ProtocolPhase.STABILIZE: Actuators(False, False, False),
    ProtocolPhase.MEASURE: Actuators(False, False, False),
    # clean air in through valve 1, odour drawn out through valve 2
    ProtocolPhase.PURGE: Actuators(True, True, True),
}


@dataclass(frozen=True)
class PhaseDurations:
    evacuate: float = 10.0
    intake: float = 10.0
    stabilize: float = 60.0
    purge: float = 120.0

    def __post_init__(self):
        for name in ("evacuate", "intake", "stabilize", "purge"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameter(f"phase duration {name} must be > 0, got {value!r}")

    def of(self, phase: ProtocolPhase) -> float | None:
        """Scripted length of ``phase``; None for the open-ended Idle and Measure."""
        return {ProtocolPhase.EVACUATE: self.evacuate, ProtocolPhase.INTAKE: self.intake,
                ProtocolPhase.STABILIZE: self.stabilize, ProtocolPhase.PURGE: self.purge}.get(phase)

    @property
    def scripted_total(self) -> float:
        return self.evacuate + self.intake + self.stabilize + self.purge


@dataclass(frozen=True)
class ChamberState:
    phase: ProtocolPhase = ProtocolPhase.IDLE
    valve1_open: bool = False
    valve2_open: bool = False
    pump_on: bool = False
    phase_elapsed: float = 0.0
    sample_mixture: GasMixture = field(default_factory=GasMixture)

    def __post_init__(self):
        expected = ACTUATORS[self.phase]
        actual = Actuators(self.valve1_open, self.valve2_open, self.pump_on)
        if actual != expected:
            raise ActuatorMismatch(f"{self.phase.value} requires {expected}, got {actual}")
        if not self.phase_elapsed >= 0:
            raise InvalidParameter(f"phase_elapsed must be >= 0, got {self.phase_elapsed!r}")

    @classmethod
    def in_phase(cls, phase: ProtocolPhase, elapsed: float = 0.0,
                 mixture: GasMixture | None = None) -> "ChamberState":
        act = ACTUATORS[phase]
        return cls(phase, act.valve1_open, act.valve2_open, act.pump_on, elapsed,
                   mixture if mixture is not None else GasMixture())

    @property
    def actuators(self) -> Actuators:
        return Actuators(self.valve1_open, self.valve2_open, self.pump_on)


def transition(state: ChamberState, target: ProtocolPhase) -> ChamberState:
    """Move to ``target`` with actuators set for it; only the successor phase is legal."""
    if NEXT_PHASE[state.phase] is not target:
        raise IllegalTransition(f"{state.phase.value} -> {target.value} is not allowed")
    mixture = state.sample_mixture if target is not ProtocolPhase.IDLE else GasMixture()
    return ChamberState.in_phase(target, 0.0, mixture)


def start_run(state: ChamberState, mix: GasMixture) -> ChamberState:
    if state.phase is not ProtocolPhase.IDLE:
        raise NotIdle(f"cannot start a run while in {state.phase.value}")
    return replace(transition(state, ProtocolPhase.EVACUATE), sample_mixture=mix)


def end_measurement(state: ChamberState) -> ChamberState:
    if state.phase is not ProtocolPhase.MEASURE:
        raise IllegalTransition(f"no measurement to end in {state.phase.value}")
    return transition(state, ProtocolPhase.PURGE)


def advance(state: ChamberState, durations: PhaseDurations, dt: float) -> ChamberState:
    """Let ``dt`` seconds pass, crossing as many timed phase boundaries as it covers."""
    if not dt > 0:
        raise InvalidParameter(f"dt must be > 0, got {dt!r}")
    remaining = dt
    while True:
        limit = durations.of(state.phase)
        elapsed = state.phase_elapsed + remaining
        if limit is None or elapsed < limit - TIME_EPS:
            return replace(state, phase_elapsed=elapsed)
        remaining = elapsed - limit
        state = transition(state, NEXT_PHASE[state.phase])
        if remaining <= TIME_EPS:
            return state


@dataclass(frozen=True)
class MfcConfig:
    max_flow: tuple[float, ...] = (200.0,) * len(GasSpecies)

    def __post_init__(self):
        flows = tuple(float(f) for f in self.max_flow)
        if len(flows) != len(GasSpecies) or not all(f > 0 for f in flows):
            raise InvalidParameter(f"need {len(GasSpecies)} positive max flows, got {flows}")
        object.__setattr__(self, "max_flow", flows)

    @classmethod
    def from_mapping(cls, flows: Mapping[GasSpecies, float]) -> "MfcConfig":
        return cls(tuple(flows[sp] for sp in GasSpecies))


def clamp_flow(cfg: MfcConfig, species: GasSpecies, requested: float) -> float:
    """Limit a requested flow (sccm) to the controller's maximum for that gas."""
    if not math.isfinite(requested):
        raise InvalidParameter(f"requested flow must be finite, got {requested!r}")
    if requested < 0:
        raise NegativeFlow(f"requested flow {requested} sccm is negative")
    return min(float(requested), cfg.max_flow[int(species)])


def exposure_schedule(durations: PhaseDurations, mix: GasMixture, measure: float = 0.0) -> list[Segment]:
    """Gas seen by the sensors over one run, as segments tiling [0, total].

    Clean air while the chamber is evacuated, the sample from the start of
    intake to the end of measurement, clean air again during purge.
    """
    if measure < 0:
        raise InvalidParameter("measure duration must be >= 0")
    t_intake = durations.evacuate
    t_purge = t_intake + durations.intake + durations.stabilize + measure
    total = t_purge + durations.purge
    if mix.is_clean:
        return [Segment(0.0, total, GasMixture())]
    return [Segment(0.0, t_intake, GasMixture()),
            Segment(t_intake, t_purge, mix),
            Segment(t_purge, total, GasMixture())]


@dataclass(frozen=True)
class TransitionRecord:
    t: float
    phase: ProtocolPhase
    actuators: Actuators

    def csv_row(self) -> str:
        a = self.actuators
        return f"{self.t:.3f},{self.phase.value},{int(a.valve1_open)},{int(a.valve2_open)},{int(a.pump_on)}"


RUN_LOG_HEADER = "t_s,phase,valve1,valve2,pump"


def run_protocol(mix: GasMixture, durations: PhaseDurations = PhaseDurations(),
                 measure: float = 0.0, dt: float = 0.1) -> list[TransitionRecord]:
    """Drive one full run tick by tick; return the transition log (first row: start)."""
    state = start_run(ChamberState(), mix)
    log = [TransitionRecord(0.0, state.phase, state.actuators)]
    for k, new in _ticks(state, durations, measure, dt):
        log.append(TransitionRecord(k * dt, new.phase, new.actuators))
    return log


def _ticks(state, durations, measure, dt) -> Iterator[tuple[int, ChamberState]]:
    k = 0
    while True:
        k += 1
        prev = state.phase
        state = advance(state, durations, dt)
        if state.phase is ProtocolPhase.MEASURE and state.phase_elapsed >= measure - TIME_EPS:
            if prev is not ProtocolPhase.MEASURE:
                yield k, state
            state = end_measurement(state)
        if state.phase is not prev:
            yield k, state
        if state.phase is ProtocolPhase.IDLE:
            return


def phase_time(log: list[TransitionRecord]) -> dict[ProtocolPhase, float]:
    """Seconds spent in each phase between consecutive records of a run log."""
    spent: dict[ProtocolPhase, float] = {}
    for rec, nxt in zip(log, log[1:]):
        spent[rec.phase] = spent.get(rec.phase, 0.0) + (nxt.t - rec.t)
    return spent


def run_log_csv(log: list[TransitionRecord]) -> str:
    return "\n".join([RUN_LOG_HEADER] + [rec.csv_row() for rec in log]) + "\n"
