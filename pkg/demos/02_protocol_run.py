"""Walk the sampling chamber through one complete run and print the valve log.

Run:  python demos/02_protocol_run.py
"""
from enose import GasMixture
from enose.errors import IllegalTransition
from enose.protocol import ChamberState, MfcConfig, ProtocolPhase, clamp_flow, phase_time, run_protocol, transition
from enose.gas_model import GasSpecies

log = run_protocol(GasMixture.of(propane=800), measure=10.0, dt=0.1)
print("   t (s)  phase       v1 v2 pump")
for rec in log:
    a = rec.actuators
    print(f"{rec.t:8.1f}  {rec.phase.value:<10}  {int(a.valve1_open)}  {int(a.valve2_open)}  {int(a.pump_on)}")

print()
for phase, seconds in phase_time(log).items():
    print(f"{phase.value:<10} {seconds:6.1f} s")

# skipping a phase is refused
try:
    transition(ChamberState(), ProtocolPhase.MEASURE)
except IllegalTransition as err:
    print("\nrefused:", err)

mfc = MfcConfig()
print("requesting 350 sccm of hydrogen ->", clamp_flow(mfc, GasSpecies.HYDROGEN, 350.0), "sccm")
