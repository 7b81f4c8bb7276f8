"""Run configuration and its text format.

The file is INI-style: ``[section]`` headers, ``key = value`` lines and
full-line ``#`` comments.  `serialize` writes the canonical form, including
the field documentation as comments, and ``default.conf`` shipped with the
package is exactly ``serialize(RunConfig.default())``.
"""
from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, replace
from importlib import resources

from .classifier import ClassifierOptions
from .daq import AdcConfig, NoiseConfig
from .errors import ConfigError, EnoseError
from .gas_model import DividerCircuit, EnvConditions, GasSpecies, SensorSpec
from .pack import SENSOR_IDS, default_pack
from .protocol import MfcConfig, PhaseDurations

SPECIES_KEYS = tuple(sp.name.lower() for sp in GasSpecies)
DEFAULT_ALERT_PPM = (1000.0, 500.0, 1000.0, 1000.0, 1000.0)


@dataclass(frozen=True)
class RunConfig:
    specs: tuple[SensorSpec, ...]
    circuits: tuple[DividerCircuit, ...]
    durations: PhaseDurations = PhaseDurations()
    measure: float = 10.0
    sample_period: float = 0.1
    baseline_window: float = 5.0
    flatness: float = 0.01
    adc: AdcConfig = AdcConfig()
    noise: NoiseConfig = NoiseConfig(0.01, 42)
    env: EnvConditions = EnvConditions()
    mfc: MfcConfig = MfcConfig()
    alert_ppm: tuple[float, ...] = DEFAULT_ALERT_PPM
    classifier: ClassifierOptions = field(default_factory=ClassifierOptions)

    def __post_init__(self):
        if len(self.specs) != 5 or len(self.circuits) != 5:
            raise ConfigError("the array needs exactly 5 sensors, each with a circuit")
        for name in ("measure", "baseline_window"):
            if getattr(self, name) < 0:
                raise ConfigError(f"[run] {name} must be >= 0")
        if not self.sample_period > 0:
            raise ConfigError("[run] sample_period must be > 0")
        if len(self.alert_ppm) != 5 or not all(a > 0 for a in self.alert_ppm):
            raise ConfigError("[alert] needs a positive threshold for each of the 5 gases")

    @classmethod
    def default(cls) -> "RunConfig":
        return cls(specs=default_pack(), circuits=(DividerCircuit(),) * 5)

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, noise=replace(self.noise, seed=seed))

    @property
    def run_duration(self) -> float:
        return self.durations.scripted_total + self.measure


def _fmt(x) -> str:
    return repr(float(x)) if not isinstance(x, int) else str(x)


def serialize(cfg: RunConfig) -> str:
    d, o = cfg.durations, cfg.classifier
    out = [
        "# enose run configuration.",
        "# The sensor gains and exponents are synthetic, not datasheet values.",
        "",
        "[run]",
        "# seconds between trace samples",
        f"sample_period = {_fmt(cfg.sample_period)}",
        "# seconds the Measure phase is held open before the purge",
        f"measure = {_fmt(cfg.measure)}",
        "# seconds of clean air at the end of Evacuate averaged for the baseline",
        f"baseline_window = {_fmt(cfg.baseline_window)}",
        "# maximum relative drift across the steady-state window",
        f"flatness = {_fmt(cfg.flatness)}",
        "",
        "[protocol]",
        "# phase lengths in seconds",
        f"evacuate = {_fmt(d.evacuate)}",
        f"intake = {_fmt(d.intake)}",
        f"stabilize = {_fmt(d.stabilize)}",
        f"purge = {_fmt(d.purge)}",
        "",
        "[env]",
        "# chamber temperature (degC) and relative humidity (%)",
        f"temperature = {_fmt(cfg.env.temperature)}",
        f"relative_humidity = {_fmt(cfg.env.relative_humidity)}",
        "",
        "[adc]",
        "# resolution in bits (8..16) and reference voltage",
        f"bits = {cfg.adc.bits}",
        f"v_ref = {_fmt(cfg.adc.v_ref)}",
        "",
        "[noise]",
        "# multiplicative Gaussian noise on resistance; seed of the generator",
        f"resistance_sigma = {_fmt(cfg.noise.resistance_sigma)}",
        f"seed = {cfg.noise.seed}",
        "",
        "[classifier]",
        "# misfit above which, or concentration (ppm) below which, the result is Unknown",
        f"residual_threshold = {_fmt(o.residual_threshold)}",
        f"c_min = {_fmt(o.c_min)}",
        "# confidence = exp(-residual / residual_scale)",
        f"residual_scale = {_fmt(o.residual_scale)}",
        "",
        "[mfc]",
        "# maximum flow per gas, sccm",
    ]
    out += [f"{k} = {_fmt(v)}" for k, v in zip(SPECIES_KEYS, cfg.mfc.max_flow)]
    out += ["", "[alert]", "# level-1 alert threshold per gas, ppm"]
    out += [f"{k} = {_fmt(v)}" for k, v in zip(SPECIES_KEYS, cfg.alert_ppm)]
    for spec, circuit in zip(cfg.specs, cfg.circuits):
        out += [
            "",
            f"[sensor.{spec.id}]",
            "# clean-air resistance (ohm) and reference concentration (ppm)",
            f"r0_clean_air = {_fmt(spec.r0_clean_air)}",
            f"c_ref = {_fmt(spec.c_ref)}",
            "# first-order time constants (s) for adsorption and recovery",
            f"tau_rise = {_fmt(spec.tau_rise)}",
            f"tau_fall = {_fmt(spec.tau_fall)}",
            "# heater supply (V) and operating temperature (degC)",
            f"heater_voltage = {_fmt(spec.heater_voltage)}",
            f"operating_temp = {_fmt(spec.operating_temp)}",
            "# fractional Ro drift per degC and per %RH from 20 degC / 50 %RH",
            f"temp_coeff = {_fmt(spec.temp_coeff)}",
            f"humidity_coeff = {_fmt(spec.humidity_coeff)}",
            "# divider: load resistor (ohm) and bias voltage (V)",
            f"r_load = {_fmt(circuit.r_load)}",
            f"v_bias = {_fmt(circuit.v_bias)}",
            "# per gas: gain A, exponent alpha of A * (C / c_ref) ** alpha",
        ]
        out += [f"{k} = {_fmt(a)}, {_fmt(alpha)}" for k, (a, alpha) in zip(SPECIES_KEYS, spec.sensitivity)]
    return "\n".join(out) + "\n"


class _Reader:
    """Typed access to a parsed file, raising ConfigError with line numbers."""

    def __init__(self, text):
        self.text = text
        self.cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#",),
                                            inline_comment_prefixes=None, empty_lines_in_values=False)
        try:
            self.cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"config syntax error: {exc}") from None
        self.used: set[tuple[str, str]] = set()

    def line_of(self, section, key=None):
        in_section = False
        for n, line in enumerate(self.text.splitlines(), start=1):
            stripped = line.strip()
            if stripped.startswith("["):
                in_section = stripped == f"[{section}]"
                if in_section and key is None:
                    return n
            elif in_section and key is not None and re.match(rf"{re.escape(key)}\s*[=:]", stripped):
                return n
        return None

    def fail(self, section, key, msg):
        n = self.line_of(section, key)
        where = f"line {n}: " if n else ""
        field_name = f"[{section}] {key}" if key else f"[{section}]"
        raise ConfigError(f"{where}{field_name}: {msg}")

    def raw(self, section, key):
        if not self.cp.has_section(section):
            raise ConfigError(f"missing section [{section}]")
        if not self.cp.has_option(section, key):
            self.fail(section, None, f"missing field {key!r}")
        self.used.add((section, key))
        return self.cp.get(section, key)

    def number(self, section, key, kind=float):
        text = self.raw(section, key)
        try:
            return kind(text)
        except ValueError:
            self.fail(section, key, f"expected {kind.__name__}, got {text!r}")

    def pair(self, section, key):
        parts = [p.strip() for p in self.raw(section, key).split(",")]
        try:
            a, alpha = (float(p) for p in parts)
        except ValueError:
            self.fail(section, key, "expected 'A, alpha'")
        return a, alpha

    def build(self, section, key, factory, *args, **kw):
        try:
            return factory(*args, **kw)
        except EnoseError as exc:
            msg = str(exc)
            if key is None and self.cp.has_section(section):
                key = next((k for k in self.cp.options(section) if re.search(rf"\b{k}\b", msg)), None)
            self.fail(section, key, msg)

    def check_unused(self):
        for section in self.cp.sections():
            for key in self.cp.options(section):
                if (section, key) not in self.used:
                    self.fail(section, key, "unknown field")


def parse(text: str) -> RunConfig:
    r = _Reader(text)
    run = dict(
        sample_period=r.number("run", "sample_period"),
        measure=r.number("run", "measure"),
        baseline_window=r.number("run", "baseline_window"),
        flatness=r.number("run", "flatness"),
    )
    durations = r.build("protocol", None, PhaseDurations,
                        **{k: r.number("protocol", k) for k in ("evacuate", "intake", "stabilize", "purge")})
    env = r.build("env", None, EnvConditions, r.number("env", "temperature"),
                  r.number("env", "relative_humidity"))
    adc = r.build("adc", None, AdcConfig, r.number("adc", "bits", int), r.number("adc", "v_ref"))
    noise = r.build("noise", None, NoiseConfig, r.number("noise", "resistance_sigma"),
                    r.number("noise", "seed", int))
    opts = ClassifierOptions(r.number("classifier", "residual_threshold"),
                             r.number("classifier", "c_min"),
                             r.number("classifier", "residual_scale"))
    mfc = r.build("mfc", None, MfcConfig, tuple(r.number("mfc", k) for k in SPECIES_KEYS))
    alert_ppm = tuple(r.number("alert", k) for k in SPECIES_KEYS)

    sensor_sections = [s for s in r.cp.sections() if s.startswith("sensor.")]
    ids = tuple(s.split(".", 1)[1] for s in sensor_sections)
    if sorted(ids) != sorted(SENSOR_IDS):
        raise ConfigError(f"sensor sections must be exactly {', '.join(SENSOR_IDS)}; got {', '.join(ids) or 'none'}")
    specs, circuits = [], []
    for section, sid in zip(sensor_sections, ids):
        num = lambda k: r.number(section, k)
        sensitivity = tuple(r.pair(section, k) for k in SPECIES_KEYS)
        specs.append(r.build(section, None, SensorSpec, id=sid, r0_clean_air=num("r0_clean_air"),
                             sensitivity=sensitivity, tau_rise=num("tau_rise"), tau_fall=num("tau_fall"),
                             c_ref=num("c_ref"), heater_voltage=num("heater_voltage"),
                             operating_temp=num("operating_temp"), temp_coeff=num("temp_coeff"),
                             humidity_coeff=num("humidity_coeff")))
        circuits.append(r.build(section, None, DividerCircuit, num("r_load"), num("v_bias")))
    r.check_unused()
    try:
        return RunConfig(specs=tuple(specs), circuits=tuple(circuits), durations=durations, adc=adc,
                         noise=noise, env=env, mfc=mfc, alert_ppm=alert_ppm, classifier=opts, **run)
    except EnoseError as exc:
        raise ConfigError(str(exc)) from None


def load(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def default_text() -> str:
    return resources.files("enose").joinpath("default.conf").read_text(encoding="utf-8")
