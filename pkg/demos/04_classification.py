"""Identify gases from five-sensor fingerprints, with and without noise.

Run:  python demos/04_classification.py
"""
import numpy as np

from enose.classifier import FingerprintLibrary, classify, predict_ratios
from enose.gas_model import GasSpecies
from enose.pack import default_pack

lib = FingerprintLibrary(default_pack())
rng = np.random.default_rng(3)

print("truth                 ->  verdict")
for species, ppm in [(GasSpecies.METHANE, 500), (GasSpecies.ETHANOL, 120), (GasSpecies.HYDROGEN, 3000),
                     (GasSpecies.PROPANE, 60), (GasSpecies.ISOBUTANE, 900)]:
    clean = predict_ratios(lib, species, ppm)
    noisy = np.minimum(clean * (1 + 0.02 * rng.standard_normal(5)), 1.0)
    for tag, obs in (("clean", clean), ("2% noise", noisy)):
        r = classify(lib, obs)
        print(f"{species.label:>9} {ppm:5d} ppm {tag:<8} -> {r.label:<9} {r.concentration:8.1f} ppm"
              f"  residual {r.residual:.4f}  confidence {r.confidence:.2f}")

print("clean air           ->", classify(lib, np.ones(5)).label)
print("no single gas fits  ->", classify(lib, [0.05, 1.0, 1.0, 1.0, 0.05]).label)
