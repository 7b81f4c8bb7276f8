"""Default five-sensor array.

SYNTHETIC NUMBERS, NOT DATASHEET VALUES.  The gains and exponents below were
chosen so that each sensor's strongest responses follow its nominal
specialty (TGS2602 air contaminants, TGS822 organic solvent vapour, TGS825
H2S / hydrogen, TGS813 combustible gases, TGS880 cooking / oil vapour) and so
that the five gases leave clearly different fingerprints across the array.
They are meant for simulation and testing only.

Each entry is ``(A, alpha)``: the term ``A * (C / 100 ppm) ** alpha`` added to
Ro/Rs.  All exponents are >= 0.5 so the log-log tail reaches its asymptotic
slope within a couple of decades.
"""
from .gas_model import SensorSpec

SENSOR_IDS = ("TGS2602", "TGS822", "TGS825", "TGS813", "TGS880")

#            methane       ethanol       propane       isobutane     hydrogen
_SENSITIVITY = {
    "TGS2602": ((0.15, 0.50), (2.50, 0.70), (0.40, 0.55), (0.60, 0.60), (3.00, 0.85)),
    "TGS822":  ((0.30, 0.55), (6.00, 0.75), (1.20, 0.60), (1.00, 0.65), (0.40, 0.50)),
    "TGS825":  ((0.10, 0.50), (0.80, 0.55), (0.25, 0.50), (0.30, 0.55), (2.00, 0.75)),
    "TGS813":  ((3.00, 0.60), (0.90, 0.50), (2.20, 0.70), (2.60, 0.55), (1.20, 0.65)),
    "TGS880":  ((0.25, 0.50), (1.80, 0.60), (0.60, 0.90), (2.40, 0.80), (0.30, 0.55)),
}

_R0 = {"TGS2602": 20_000.0, "TGS822": 15_000.0, "TGS825": 40_000.0,
       "TGS813": 10_000.0, "TGS880": 25_000.0}
# (tau_rise, tau_fall) in seconds
_TAU = {"TGS2602": (5.0, 22.0), "TGS822": (6.0, 24.0), "TGS825": (4.0, 20.0),
        "TGS813": (3.5, 18.0), "TGS880": (6.5, 24.0)}
# fractional Ro drift per °C and per %RH
_DRIFT = {"TGS2602": (-0.004, -0.002), "TGS822": (-0.005, -0.003),
          "TGS825": (-0.003, -0.002), "TGS813": (-0.005, -0.002),
          "TGS880": (-0.004, -0.003)}


def default_pack() -> tuple[SensorSpec, ...]:
    specs = []
    for sid in SENSOR_IDS:
        tau_rise, tau_fall = _TAU[sid]
        temp_coeff, humidity_coeff = _DRIFT[sid]
        specs.append(SensorSpec(
            id=sid,
            r0_clean_air=_R0[sid],
            sensitivity=_SENSITIVITY[sid],
            tau_rise=tau_rise,
            tau_fall=tau_fall,
            c_ref=100.0,
            heater_voltage=5.0,
            operating_temp=300.0,
            temp_coeff=temp_coeff,
            humidity_coeff=humidity_coeff,
        ))
    return tuple(specs)
