"""A full simulated run, then the frames it put on the CAN bus.

Run:  python demos/05_can_telemetry.py [gas=ppm]
"""
import sys

from enose import GasMixture, GasSpecies, RunConfig, can
from enose.pipeline import simulate

gas, _, ppm = (sys.argv[1] if len(sys.argv) > 1 else "ethanol=2000").partition("=")
mix = GasMixture.single(GasSpecies.parse(gas), float(ppm))

result = simulate(RunConfig.default(), mix)
print("classification:", result.classification.csv_row())
print()
print("raw bus log:")
print(can.format_log(result.bus_log), end="")
print()
print("decoded:")
for entry in result.bus_log:
    print(f"  tick {entry.tick}  {entry.sender}  {can.describe(can.decode(entry.frame))}")
