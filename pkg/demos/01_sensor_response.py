"""One sensor, one gas: the resistance dip during exposure and the slow climb back.

Run:  python demos/01_sensor_response.py
"""
import math

from enose import GasMixture, Segment, step_response
from enose.daq import extract_features
from enose.pack import default_pack

spec = default_pack()[3]  # the methane-leaning sensor
mix = GasMixture.of(methane=1000)

# 60 s of sample, then 120 s of clean air
trace = step_response(spec, [Segment(0.0, 60.0, mix), Segment(60.0, 180.0)], sample_period=0.1)
print(f"{spec.id}: R0 = {spec.r0_clean_air:.0f} ohm, tau rise/fall = {spec.tau_rise}/{spec.tau_fall} s")

for t in (0, 5, 10, 30, 59.9, 70, 100, 179.9):
    k = int(round(t / trace.sample_period))
    print(f"  t = {trace.t[k]:6.1f} s   Rs = {trace.resistance[k]:9.1f} ohm   V_RL = {trace.v_out[k]:.4f} V")

feats = extract_features(trace.between(0.0, 60.0), trace.between(60.0, 180.0), spec.r0_clean_air)
print(f"steady Rs/Ro               {feats.steady_ratio:.4f}")
print(f"response t90  {feats.response_time_t90:6.2f} s  (tau ln10 = {spec.tau_rise * math.log(10):.2f} s)")
print(f"recovery t90  {feats.recovery_time_t90:6.2f} s  (tau ln10 = {spec.tau_fall * math.log(10):.2f} s)")
