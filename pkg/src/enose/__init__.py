"""Electronic-nose simulator: MOX sensor array, sampling protocol, DAQ,
gas classification and CAN telemetry."""
from .classifier import (UNKNOWN, ClassificationResult, ClassifierOptions, FingerprintLibrary,
                         classify, fit_concentration, predict_ratios)
from .config import RunConfig
from .gas_model import (DividerCircuit, EnvConditions, GasMixture, GasSpecies, SensorSpec, SensorTrace,
                        Segment, divider_output, drift_adjusted_r0, resistance_from_output,
                        steady_state_ratio, steady_state_resistance, step_response)
from .pack import SENSOR_IDS, default_pack
from .pipeline import simulate, sweep

__version__ = "0.1.0"
