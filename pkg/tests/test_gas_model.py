import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from enose.errors import InvalidParameter, InvalidSchedule, NonPositiveVoltage, OverBias
from enose.gas_model import (DividerCircuit, EnvConditions, GasMixture, GasSpecies, Segment, SensorSpec,
                             divider_output, drift_adjusted_r0, resistance_from_output, steady_state_ratio,
                             steady_state_resistance, step_response)
from enose.pack import default_pack

CIRCUIT = DividerCircuit(10_000.0, 5.0)


def single_gas_spec(a=1.0, alpha=1.0, r0=10_000.0, tau_rise=5.0, tau_fall=20.0, **kw):
    pairs = [(0.0, 1.0)] * 5
    pairs[GasSpecies.METHANE] = (a, alpha)
    return SensorSpec("TGS813", r0, tuple(pairs), tau_rise, tau_fall, **kw)


def test_species_codes_are_stable():
    assert [int(s) for s in GasSpecies] == [0, 1, 2, 3, 4]
    assert [s.label for s in GasSpecies] == ["Methane", "Ethanol", "Propane", "Isobutane", "Hydrogen"]
    assert GasSpecies.parse("propane") is GasSpecies.PROPANE
    assert GasSpecies.parse("CH4") is GasSpecies.METHANE


def test_mixture_rejects_negative_and_nonfinite():
    with pytest.raises(InvalidParameter):
        GasMixture.of(methane=-1)
    with pytest.raises(InvalidParameter):
        GasMixture.of(ethanol=float("nan"))
    assert GasMixture().is_clean
    assert GasMixture.of(hydrogen=5)[GasSpecies.HYDROGEN] == 5


@pytest.mark.parametrize("field,value", [("r0_clean_air", 0.0), ("tau_rise", 0.0), ("tau_fall", -1.0),
                                         ("c_ref", 0.0)])
def test_spec_invariants(field, value):
    kw = dict(id="TGS813", r0_clean_air=1e4, sensitivity=((1.0, 0.5),) * 5, tau_rise=5.0, tau_fall=20.0)
    kw[field] = value
    with pytest.raises(InvalidParameter):
        SensorSpec(**kw)


def test_spec_rejects_bad_sensitivity():
    with pytest.raises(InvalidParameter):
        single_gas_spec(alpha=0.0)
    with pytest.raises(InvalidParameter):
        single_gas_spec(a=-0.1)


def test_ratio_examples():
    assert steady_state_ratio(single_gas_spec(), GasMixture()) == 1.0
    assert steady_state_ratio(single_gas_spec(1.0, 1.0), GasMixture.of(methane=100)) == pytest.approx(0.5, rel=1e-15)
    assert steady_state_ratio(single_gas_spec(9.0, 0.5), GasMixture.of(methane=100)) == pytest.approx(0.1, rel=1e-15)


def test_ratio_mixture_adds_conductance_terms():
    spec = default_pack()[3]
    mix = GasMixture.of(methane=300, hydrogen=700)
    one = 1 / steady_state_ratio(spec, GasMixture.of(methane=300)) - 1
    two = 1 / steady_state_ratio(spec, GasMixture.of(hydrogen=700)) - 1
    assert 1 / steady_state_ratio(spec, mix) - 1 == pytest.approx(one + two, rel=1e-12)


def test_resistance_examples():
    spec = single_gas_spec(temp_coeff=-0.005)
    assert steady_state_resistance(spec, GasMixture(), EnvConditions()) == 10_000.0
    assert steady_state_resistance(spec, GasMixture.of(methane=100)) == pytest.approx(5_000.0)
    assert steady_state_resistance(spec, GasMixture(), EnvConditions(30.0, 50.0)) == pytest.approx(9_500.0)


def test_drift_examples():
    spec = single_gas_spec(temp_coeff=-0.005, humidity_coeff=0.002)
    assert drift_adjusted_r0(spec, EnvConditions(20.0, 50.0)) == spec.r0_clean_air
    assert drift_adjusted_r0(spec, EnvConditions(30.0, 50.0)) == pytest.approx(0.95 * spec.r0_clean_air)
    flat = single_gas_spec()
    assert drift_adjusted_r0(flat, EnvConditions(-10.0, 95.0)) == flat.r0_clean_air


def test_drift_is_clamped():
    spec = single_gas_spec(temp_coeff=-0.05)
    assert drift_adjusted_r0(spec, EnvConditions(60.0, 50.0)) == pytest.approx(0.1 * spec.r0_clean_air)


def test_env_humidity_range():
    with pytest.raises(InvalidParameter):
        EnvConditions(20.0, 101.0)


def test_divider_examples():
    assert divider_output(10_000.0, CIRCUIT) == 2.5
    assert divider_output(0.0, CIRCUIT) == 5.0
    assert divider_output(40_000.0, CIRCUIT) == pytest.approx(1.0)


def test_inverse_divider_examples():
    assert resistance_from_output(2.5, CIRCUIT) == pytest.approx(10_000.0)
    assert resistance_from_output(5.0, CIRCUIT) == 0.0
    with pytest.raises(NonPositiveVoltage):
        resistance_from_output(0.0, CIRCUIT)
    with pytest.raises(OverBias):
        resistance_from_output(5.01, CIRCUIT)


@given(st.floats(1.0, 1e7), st.floats(100.0, 1e6), st.floats(0.5, 24.0))
def test_divider_round_trip(rs, r_load, v_bias):
    circuit = DividerCircuit(r_load, v_bias)
    back = resistance_from_output(divider_output(rs, circuit), circuit)
    assert abs(back - rs) / rs < 1e-9


@st.composite
def specs(draw):
    pairs = tuple((draw(st.floats(0.01, 50.0)), draw(st.floats(0.1, 1.5))) for _ in range(5))
    return SensorSpec("TGS822", draw(st.floats(1e3, 1e6)), pairs, 1.0, 2.0, c_ref=draw(st.floats(1.0, 1e3)))


@given(specs(), st.sampled_from(list(GasSpecies)), st.floats(0.0, 1e5), st.floats(1.001, 10.0))
def test_ratio_strictly_decreasing(spec, species, c, factor):
    lo = steady_state_ratio(spec, GasMixture.single(species, c))
    hi = steady_state_ratio(spec, GasMixture.single(species, c * factor + 1e-3))
    assert hi < lo <= 1.0


@given(specs())
def test_clean_air_is_exactly_one(spec):
    assert steady_state_ratio(spec, GasMixture()) == 1.0


@pytest.mark.parametrize("a,alpha", [(0.3, 0.5), (2.0, 0.7), (9.0, 1.2)])
def test_log_log_tail_slope(a, alpha):
    spec = single_gas_spec(a, alpha)
    knee = spec.c_ref * a ** (-1 / alpha)
    c = np.geomspace(1e3 * knee, 1e5 * knee, 40)
    r = [steady_state_ratio(spec, GasMixture.of(methane=x)) for x in c]
    slope = np.polyfit(np.log(c), np.log(r), 1)[0]
    assert abs(slope + alpha) / alpha < 0.02


@given(st.floats(1e2, 1e6), st.floats(1e2, 1e6))
def test_voltage_rises_as_resistance_falls(r_hi, r_lo):
    if r_lo >= r_hi:
        r_lo, r_hi = r_hi, r_lo
    if r_lo == r_hi:
        return
    assert divider_output(r_lo, CIRCUIT) > divider_output(r_hi, CIRCUIT)


# --- dynamics ---------------------------------------------------------------

def test_flat_trace_for_clean_air():
    spec = single_gas_spec()
    trace = step_response(spec, [], sample_period=0.5, duration=30.0, circuit=CIRCUIT)
    assert len(trace) == 61
    assert np.all(trace.resistance == spec.r0_clean_air)
    assert np.allclose(trace.v_out, 2.5)


def test_exponential_example():
    # Ro = 100 kOhm relaxing toward 20 kOhm (ratio 0.2 -> A = 4 at c_ref)
    spec = single_gas_spec(4.0, 1.0, r0=100_000.0, tau_rise=5.0)
    trace = step_response(spec, [Segment(0.0, 60.0, GasMixture.of(methane=100))], sample_period=0.1,
                          circuit=CIRCUIT)
    k = int(round(5.0 / 0.1))
    expected = 20_000.0 + 80_000.0 * math.exp(-1.0)
    assert trace.t[k] == pytest.approx(5.0)
    assert trace.resistance[k] == pytest.approx(expected, rel=1e-12)
    assert trace.resistance[k] == pytest.approx(49_430.35, abs=0.01)


def test_settles_within_e_minus_10():
    # ratio 0.5: the initial gap equals the target, so the residual is e^-10 of R*
    spec = single_gas_spec(1.0, 1.0, tau_rise=3.0)
    trace = step_response(spec, [Segment(0.0, 30.0, GasMixture.of(methane=100))], sample_period=0.1)
    target = spec.r0_clean_air * 0.5
    assert abs(trace.resistance[-1] - target) / target < 5e-5


def test_residual_after_ten_tau_is_e_minus_10_of_span():
    spec = single_gas_spec(4.0, 1.0, tau_rise=3.0)
    trace = step_response(spec, [Segment(0.0, 30.0, GasMixture.of(methane=100))], sample_period=0.1)
    target = spec.r0_clean_air * 0.2
    span = spec.r0_clean_air - target
    assert abs(trace.resistance[-1] - target) / span == pytest.approx(math.exp(-10.0), rel=1e-6)


def test_recovery_uses_fall_constant():
    spec = single_gas_spec(4.0, 1.0, tau_rise=2.0, tau_fall=10.0)
    sched = [Segment(0.0, 40.0, GasMixture.of(methane=100)), Segment(40.0, 50.0)]
    trace = step_response(spec, sched, sample_period=0.25)
    r_40 = 2_000.0 + 8_000.0 * math.exp(-20.0)
    expected = 10_000.0 + (r_40 - 10_000.0) * math.exp(-1.0)
    assert trace.resistance[-1] == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("bad", [
    [Segment(1.0, 10.0)],
    [Segment(0.0, 4.0), Segment(5.0, 10.0)],
    [Segment(0.0, 6.0), Segment(5.0, 10.0)],
    [Segment(0.0, 5.0)],
    [Segment(-1.0, 10.0)],
])
def test_invalid_schedules(bad):
    with pytest.raises(InvalidSchedule):
        step_response(single_gas_spec(), bad, sample_period=0.1, duration=10.0)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([0.1, 0.2, 0.25, 0.5, 1.0]), st.integers(1, 4))
def test_refinement_leaves_shared_samples_identical(dt, segs_per_10):
    spec = default_pack()[0]
    mix = GasMixture.of(ethanol=400, hydrogen=50)
    sched, t = [], 0.0
    for i in range(segs_per_10 * 3):
        sched.append(Segment(t, t + 10.0 / segs_per_10, mix if i % 2 == 0 else GasMixture()))
        t += 10.0 / segs_per_10
    coarse = step_response(spec, sched, sample_period=dt)
    fine = step_response(spec, sched, sample_period=dt / 2)
    assert np.array_equal(coarse.t, fine.t[::2])
    assert np.array_equal(coarse.resistance, fine.resistance[::2])


def test_exposure_then_purge_shape():
    spec = default_pack()[3]
    sched = [Segment(0.0, 60.0, GasMixture.of(propane=800)), Segment(60.0, 60.0 + 5 * spec.tau_fall)]
    trace = step_response(spec, sched, sample_period=0.1)
    exposure = trace.between(0.0, 60.0).resistance
    recovery = trace.between(60.0, sched[-1].end).resistance
    assert np.all(np.diff(exposure) <= 0)
    assert np.all(np.diff(recovery) >= 0)
    assert abs(recovery[-1] - spec.r0_clean_air) / spec.r0_clean_air < 0.05


def test_trace_voltage_inside_bias():
    trace = step_response(default_pack()[1], [Segment(0.0, 20.0, GasMixture.of(ethanol=5000))],
                          sample_period=0.1, circuit=CIRCUIT)
    assert np.all((trace.v_out > 0) & (trace.v_out < CIRCUIT.v_bias))
