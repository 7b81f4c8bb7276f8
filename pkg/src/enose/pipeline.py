"""End-to-end runs: one chamber measurement, and steady-state sensitivity sweeps."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import can, svg
from .classifier import CSV_HEADER, ClassificationResult, FingerprintLibrary, classify
from .config import RunConfig
from .daq import SensorFeatures, apply_noise, calibrate_baseline, extract_features, feature_csv, quantize, trace_csv
from .errors import BadRange
from .gas_model import (GasMixture, GasSpecies, SensorTrace, divider_output, drift_adjusted_r0,
                        steady_state_ratio, step_response)
from .protocol import TransitionRecord, exposure_schedule, run_log_csv, run_protocol

CLASSIFIER_NODE = "n5"


def sensor_node(index: int) -> str:
    return f"n{index}"


@dataclass(frozen=True)
class SimulationResult:
    config: RunConfig
    mixture: GasMixture
    traces: tuple[SensorTrace, ...]
    features: tuple[SensorFeatures, ...]
    classification: ClassificationResult
    alert: can.Alert | None
    bus_log: can.BusLog
    protocol_log: tuple[TransitionRecord, ...]

    @property
    def ratios(self) -> np.ndarray:
        return np.array([f.steady_ratio for f in self.features])

    def outputs(self) -> dict[str, str]:
        """File name -> contents for everything a run writes."""
        files = {}
        meta = {"noise_sigma": repr(self.config.noise.resistance_sigma), "seed": self.config.noise.seed}
        for trace in self.traces:
            files[f"trace_{trace.sensor_id}.csv"] = trace_csv(trace, self.config.adc, meta)
        files["traces.svg"] = svg.line_chart(
            [(t.sensor_id, t.t, t.resistance / 1000.0) for t in self.traces],
            title="Sensor resistance over one sampling run", xlabel="time (s)", ylabel="Rs (kOhm)")
        files["features.csv"] = feature_csv(self.features)
        files["classification.csv"] = CSV_HEADER + "\n" + self.classification.csv_row() + "\n"
        files["bus.log"] = can.format_log(self.bus_log)
        files["protocol.csv"] = run_log_csv(list(self.protocol_log))
        return files

    def write(self, out_dir) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        for name, text in self.outputs().items():
            path = out / name
            path.write_text(text, encoding="utf-8", newline="\n")
            paths.append(path)
        return paths


def simulate(cfg: RunConfig, mixture: GasMixture, seq: int = 0) -> SimulationResult:
    """Run one sample through the chamber, the array, the classifier and the bus."""
    d = cfg.durations
    schedule = exposure_schedule(d, mixture, cfg.measure)
    t_intake = d.evacuate
    t_purge = schedule[-1].end - d.purge
    total = schedule[-1].end

    traces, features = [], []
    for i, (spec, circuit) in enumerate(zip(cfg.specs, cfg.circuits)):
        clean = step_response(spec, schedule, cfg.env, cfg.sample_period, total, circuit)
        trace = apply_noise(clean, cfg.noise, stream=i)
        baseline = calibrate_baseline(trace.between(0.0, t_intake), cfg.baseline_window)
        features.append(extract_features(trace.between(t_intake, t_purge), trace.between(t_purge, total),
                                         baseline, cfg.flatness))
        traces.append(trace)

    lib = FingerprintLibrary(cfg.specs)
    result = classify(lib, [f.steady_ratio for f in features], cfg.classifier)
    alert = can.alert_policy(result, cfg.alert_ppm)

    messages = []
    for i, trace in enumerate(traces):
        k = int(np.searchsorted(trace.t, t_purge - 1e-9))
        k = min(k, len(trace) - 1)
        code = quantize(min(trace.v_out[k], cfg.adc.v_ref), cfg.adc)
        resistance = min(int(round(trace.resistance[k])), can.U32_MAX)
        messages.append((0, sensor_node(i), can.Reading(i, seq % 256, code, resistance)))
    # the verdict is ready once every reading has crossed the bus
    ready = len(messages)
    messages.append((ready, CLASSIFIER_NODE, can.Classification.from_result(result)))
    if alert is not None:
        messages.append((ready, CLASSIFIER_NODE, alert))
    bus_log = can.run_bus(messages)

    return SimulationResult(cfg, mixture, tuple(traces), tuple(features), result, alert, bus_log,
                            tuple(run_protocol(mixture, d, cfg.measure, cfg.sample_period)))


@dataclass(frozen=True)
class SweepTable:
    species: GasSpecies
    sensor_ids: tuple[str, ...]
    ppm: np.ndarray
    ratio: np.ndarray  # (points, sensors) Rs/Ro
    v_rl: np.ndarray  # (points, sensors) volts
    rs: np.ndarray  # (points, sensors) ohms

    def csv(self) -> str:
        header = (["ppm"] + [f"rs_ro_{s}" for s in self.sensor_ids]
                  + [f"v_rl_{s}" for s in self.sensor_ids])
        lines = [",".join(header)]
        for c, ratios, volts in zip(self.ppm, self.ratio, self.v_rl):
            lines.append(",".join(repr(float(v)) for v in (c, *ratios, *volts)))
        return "\n".join(lines) + "\n"

    def svg_ratio(self) -> str:
        return svg.line_chart([(s, self.ppm, self.ratio[:, i]) for i, s in enumerate(self.sensor_ids)],
                              title=f"Sensitivity to {self.species.label} (Rs/Ro)", xlabel="concentration (ppm)",
                              ylabel="Rs/Ro", logx=True, logy=True)

    def svg_voltage(self) -> str:
        return svg.line_chart([(s, self.ppm, self.v_rl[:, i]) for i, s in enumerate(self.sensor_ids)],
                              title=f"Sensitivity to {self.species.label} (V_RL)", xlabel="concentration (ppm)",
                              ylabel="V_RL (V)", logx=True)


def sweep(cfg: RunConfig, species: GasSpecies, c_min: float, c_max: float, points: int) -> SweepTable:
    """Steady-state Rs/Ro and V_RL of every sensor on a log-spaced concentration grid."""
    if not (0 < c_min < c_max) or not np.isfinite(c_max):
        raise BadRange(f"need 0 < c_min < c_max, got {c_min!r}, {c_max!r}")
    if points < 2:
        raise BadRange(f"need at least 2 points, got {points}")
    ppm = np.geomspace(c_min, c_max, points)
    ppm[0], ppm[-1] = c_min, c_max
    ratio = np.array([[steady_state_ratio(spec, GasMixture.single(species, c)) for spec in cfg.specs]
                      for c in ppm])
    r0 = np.array([drift_adjusted_r0(spec, cfg.env) for spec in cfg.specs])
    rs = ratio * r0
    v_rl = np.column_stack([divider_output(rs[:, i], circ) for i, circ in enumerate(cfg.circuits)])
    return SweepTable(species, tuple(s.id for s in cfg.specs), ppm, ratio, v_rl, rs)


def read_sweep_csv(text: str) -> tuple[list[str], np.ndarray]:
    lines = text.strip().splitlines()
    return lines[0].split(","), np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
