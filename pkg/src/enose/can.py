"""CAN telemetry: frame codec and a simulated bus with ID-priority arbitration.

Frame layouts (all multi-byte fields big-endian):

    id 0x080        Alert           [species, level]
    id 0x100 + s    Reading         [sensor, seq, adc_hi, adc_lo, r3, r2, r1, r0]
    id 0x200        Classification  [species, confidence, c3, c2, c1, c0, 0, 0]

Species code 255 means "unknown gas".  Lower ids win arbitration, so alerts
always go out before readings and classifications queued in the same tick.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .classifier import ClassificationResult
from .errors import BadLength, FieldOverflow, InvalidSpeciesCode, ParseError, UnknownId
from .gas_model import GasSpecies

ALERT_ID = 0x080
READING_BASE_ID = 0x100
CLASSIFICATION_ID = 0x200
N_SENSORS = 5
UNKNOWN_CODE = 255
U32_MAX = 2**32 - 1


@dataclass(frozen=True)
class CanFrame:
    id: int
    data: bytes = b""

    def __post_init__(self):
        object.__setattr__(self, "data", bytes(self.data))
        if not 0 <= self.id < 2048:
            raise FieldOverflow(f"CAN id {self.id:#x} does not fit in 11 bits")
        if len(self.data) > 8:
            raise FieldOverflow(f"CAN payload of {len(self.data)} bytes exceeds 8")

    @property
    def dlc(self) -> int:
        return len(self.data)


@dataclass(frozen=True)
class Reading:
    sensor_index: int
    seq: int
    adc_code: int
    resistance: int


@dataclass(frozen=True)
class Classification:
    species_code: int
    confidence_byte: int
    concentration: int

    @classmethod
    def from_result(cls, result: ClassificationResult) -> "Classification":
        c = result.concentration
        conc = U32_MAX if not math.isfinite(c) else min(int(round(c)), U32_MAX)
        return cls(result.species_code, int(round(result.confidence * 255)), conc)


@dataclass(frozen=True)
class Alert:
    species_code: int
    level: int


TelemetryMessage = Union[Reading, Classification, Alert]


def _check(name, value, lo, hi):
    if not isinstance(value, int) or isinstance(value, bool) or not lo <= value <= hi:
        raise FieldOverflow(f"{name}={value!r} outside [{lo}, {hi}]")


def _check_species(value):
    _check("species_code", value, 0, UNKNOWN_CODE)
    if 5 <= value < UNKNOWN_CODE:
        raise FieldOverflow(f"species_code={value} is not a gas code")


def encode(msg: TelemetryMessage) -> CanFrame:
    if isinstance(msg, Reading):
        _check("sensor_index", msg.sensor_index, 0, N_SENSORS - 1)
        _check("seq", msg.seq, 0, 255)
        _check("adc_code", msg.adc_code, 0, 0xFFFF)
        _check("resistance", msg.resistance, 0, U32_MAX)
        payload = struct.pack(">BBHI", msg.sensor_index, msg.seq, msg.adc_code, msg.resistance)
        return CanFrame(READING_BASE_ID + msg.sensor_index, payload)
    if isinstance(msg, Classification):
        _check_species(msg.species_code)
        _check("confidence_byte", msg.confidence_byte, 0, 255)
        if isinstance(msg.concentration, int) and msg.concentration > U32_MAX:
            conc = U32_MAX
        else:
            _check("concentration", msg.concentration, 0, U32_MAX)
            conc = msg.concentration
        payload = struct.pack(">BBIxx", msg.species_code, msg.confidence_byte, conc)
        return CanFrame(CLASSIFICATION_ID, payload)
    if isinstance(msg, Alert):
        _check_species(msg.species_code)
        _check("level", msg.level, 1, 3)
        return CanFrame(ALERT_ID, bytes([msg.species_code, msg.level]))
    raise TypeError(f"not a telemetry message: {msg!r}")


def _species_byte(code):
    if 5 <= code < UNKNOWN_CODE:
        raise InvalidSpeciesCode(f"species code {code} is reserved")
    return code


def decode(frame: CanFrame) -> TelemetryMessage:
    fid, data = frame.id, frame.data
    if fid == ALERT_ID:
        if len(data) != 2:
            raise BadLength(f"alert frame needs 2 bytes, got {len(data)}")
        level = data[1]
        if not 1 <= level <= 3:
            raise FieldOverflow(f"alert level {level} outside [1, 3]")
        return Alert(_species_byte(data[0]), level)
    if READING_BASE_ID <= fid < READING_BASE_ID + N_SENSORS:
        if len(data) != 8:
            raise BadLength(f"reading frame needs 8 bytes, got {len(data)}")
        sensor, seq, adc, res = struct.unpack(">BBHI", data)
        if sensor != fid - READING_BASE_ID:
            raise FieldOverflow(f"reading frame {fid:#x} carries sensor index {sensor}")
        return Reading(sensor, seq, adc, res)
    if fid == CLASSIFICATION_ID:
        if len(data) != 8:
            raise BadLength(f"classification frame needs 8 bytes, got {len(data)}")
        species, conf, conc = struct.unpack(">BBIxx", data)
        return Classification(_species_byte(species), conf, conc)
    raise UnknownId(f"no telemetry schema for id {fid:#05x}")


def message_kind(msg: TelemetryMessage) -> str:
    return type(msg).__name__.lower()


def alert_policy(result: ClassificationResult, thresholds: Sequence[float]) -> Alert | None:
    """Alert level from how far the concentration exceeds its species' threshold.

    1 at >= 1x, 2 at >= 2x, 3 at >= 5x; unknown gases never alert.
    """
    if result.is_unknown:
        return None
    threshold = thresholds[result.species_code]
    ratio = result.concentration / threshold
    if ratio >= 5:
        level = 3
    elif ratio >= 2:
        level = 2
    elif ratio >= 1:
        level = 1
    else:
        return None
    return Alert(result.species_code, level)


# --- simulated bus -------------------------------------------------------

@dataclass(frozen=True)
class LogEntry:
    tick: int
    frame: CanFrame
    sender: str

    def format(self) -> str:
        payload = " ".join(f"{b:02X}" for b in self.frame.data)
        parts = [str(self.tick), f"{self.frame.id:03X}", str(self.frame.dlc)]
        if payload:
            parts.append(payload)
        parts.append(self.sender)
        return " ".join(parts)


BusLog = tuple[LogEntry, ...]
Pending = tuple[tuple[str, CanFrame], ...]


def _priority(item):
    node, frame = item
    return frame.id, node


def bus_step(pending: Iterable[tuple[str, CanFrame]], log: BusLog, tick: int) -> tuple[BusLog, Pending]:
    """Arbitrate one tick: the lowest id (then lowest node id) transmits.

    Returns the extended log and the frames still waiting.
    """
    queue = sorted(pending, key=_priority)
    if not queue:
        return tuple(log), ()
    node, frame = queue[0]
    return tuple(log) + (LogEntry(tick, frame, node),), tuple(queue[1:])


def run_bus(schedule: Iterable[tuple[int, str, TelemetryMessage]], start_tick: int = 0) -> BusLog:
    """Replay ``(ready_tick, node, message)`` submissions until the bus drains."""
    submissions = sorted(((tick, node, encode(msg)) for tick, node, msg in schedule),
                         key=lambda s: (s[0], s[2].id, s[1]))
    log: BusLog = ()
    pending: Pending = ()
    tick = start_tick
    i = 0
    while i < len(submissions) or pending:
        while i < len(submissions) and submissions[i][0] <= tick:
            pending += ((submissions[i][1], submissions[i][2]),)
            i += 1
        log, pending = bus_step(pending, log, tick)
        tick += 1
    return log


def format_log(log: BusLog) -> str:
    return "".join(entry.format() + "\n" for entry in log)


def parse_log(text: str) -> BusLog:
    """Parse the bus log text format; errors name the offending line."""
    entries = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        tokens = line.split()
        try:
            if len(tokens) < 4:
                raise ValueError("too few fields")
            tick = int(tokens[0])
            if len(tokens[1]) != 3:
                raise ValueError(f"id {tokens[1]!r} is not 3 hex digits")
            fid = int(tokens[1], 16)
            dlc = int(tokens[2])
            if not 0 <= dlc <= 8:
                raise ValueError(f"dlc {dlc} outside [0, 8]")
            body = tokens[3:-1]
            if len(body) != dlc:
                raise ValueError(f"dlc {dlc} but {len(body)} payload bytes")
            payload = []
            for tok in body:
                if len(tok) != 2:
                    raise ValueError(f"bad hex byte {tok!r}")
                payload.append(int(tok, 16))
            frame = CanFrame(fid, bytes(payload))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        entries.append(LogEntry(tick, frame, tokens[-1]))
    return tuple(entries)


def describe(msg: TelemetryMessage) -> str:
    if isinstance(msg, Reading):
        return (f"Reading sensor={msg.sensor_index} seq={msg.seq} adc={msg.adc_code} "
                f"resistance_ohm={msg.resistance}")
    species = _species_label(msg.species_code)
    if isinstance(msg, Classification):
        return (f"Classification species={species} confidence={msg.confidence_byte / 255:.3f} "
                f"concentration_ppm={msg.concentration}")
    return f"Alert species={species} level={msg.level}"


def _species_label(code):
    return "Unknown" if code == UNKNOWN_CODE else GasSpecies(code).label
