"""Steady-state sensitivity curves for every sensor against one gas.

Writes sweep_<gas>.csv plus two SVG charts into the chosen directory.

Run:  python demos/03_sensitivity_sweep.py [gas] [out_dir]
"""
import sys
from pathlib import Path

import numpy as np

from enose import GasSpecies, RunConfig
from enose.pipeline import sweep

species = GasSpecies.parse(sys.argv[1] if len(sys.argv) > 1 else "isobutane")
out = Path(sys.argv[2] if len(sys.argv) > 2 else "demo_out")
out.mkdir(parents=True, exist_ok=True)

cfg = RunConfig.default()
table = sweep(cfg, species, 50.0, 10_000.0, 40)
name = species.name.lower()
(out / f"sweep_{name}.csv").write_text(table.csv())
(out / f"sweep_{name}_rs_ro.svg").write_text(table.svg_ratio())
(out / f"sweep_{name}_v_rl.svg").write_text(table.svg_voltage())

# the local log-log slope over the top decade
top = table.ppm >= 1000.0
for i, sensor in enumerate(table.sensor_ids):
    slope = np.polyfit(np.log(table.ppm[top]), np.log(table.ratio[top, i]), 1)[0]
    print(f"{sensor}: Rs/Ro {table.ratio[0, i]:.3f} -> {table.ratio[-1, i]:.3f}, slope above 1000 ppm {slope:+.3f}")
print("wrote", sorted(p.name for p in out.glob(f"sweep_{name}*")))
