import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ferrosim.pattern import ActuationPattern
from ferrosim.plant import (
    CALIBRATION_CURRENT_A,
    ParticleState,
    Plant,
    PlantParams,
    VelocityModel,
    actuation_speed,
    current_scale,
    make_model,
    superposed_velocity,
)
from ferrosim.workspace import SolenoidClass, default_rig

SHORT = SolenoidClass.SHORT


class TestActuationSpeed:
    def test_near_distance_matches_fit_and_measurement(self, unit_model):
        v = actuation_speed(unit_model, 2.7, SHORT)
        assert v == pytest.approx(3.17 / 2.7 + 0.03, rel=1e-12)
        assert abs(v - 1.18) <= 0.05  # the reported measurement band

    def test_far_distance_matches_fit_and_measurement(self, unit_model):
        v = actuation_speed(unit_model, 7.0, SHORT)
        assert v == pytest.approx(3.17 / 7.0 + 0.03, rel=1e-12)
        assert abs(v - 0.49) <= 0.05

    def test_reference_current_is_unity_scale(self, unit_model):
        assert current_scale(unit_model, CALIBRATION_CURRENT_A) == 1.0

    def test_current_composition(self, unit_model):
        # both fits composed through the normalisation at the reference current
        expected = (0.66 * 0.72 - 0.05) / (0.66 * 1.43 - 0.05) * (3.17 / 3.8 + 0.03)
        v = actuation_speed(unit_model, 3.8, SHORT, current=0.72)
        assert v == pytest.approx(expected, rel=1e-12)
        assert v == pytest.approx(0.4110, abs=2e-4)

    def test_nonpositive_distance_rejected(self, unit_model):
        with pytest.raises(ValueError):
            actuation_speed(unit_model, 0.0, SHORT)
        with pytest.raises(ValueError):
            actuation_speed(unit_model, -1.0, SHORT)

    def test_clamped_below_tenth_millimetre(self, unit_model):
        assert actuation_speed(unit_model, 0.01, SHORT) == actuation_speed(unit_model, 0.1, SHORT)

    def test_low_current_clamps_to_zero(self, unit_model):
        assert actuation_speed(unit_model, 3.0, SHORT, current=0.0) == 0.0

    @pytest.mark.parametrize("law", ["inverse", "linear", "inverse_square"])
    def test_monotone_decreasing_over_measured_range(self, law):
        model = make_model("unit", law)
        rhos = np.linspace(2.7, 7.0, 50)
        speeds = [actuation_speed(model, r, SHORT) for r in rhos]
        assert all(a > b for a, b in zip(speeds, speeds[1:]))

    def test_increasing_law_rejected(self):
        with pytest.raises(ValueError):
            VelocityModel(law="inverse", a=-1.0)
        with pytest.raises(ValueError):
            VelocityModel(law="linear", a=0.2)


class TestSuperposedVelocity:
    def test_all_off_is_zero(self, rig, unit_model):
        v = superposed_velocity(ParticleState(), ActuationPattern.all_off(), rig, unit_model)
        assert v == pytest.approx((0.0, 0.0))

    def test_single_short_at_centre_matches_measurement(self, rig, fig2d_model):
        v = superposed_velocity(
            ParticleState(), ActuationPattern.from_indices([0]), rig, fig2d_model
        )
        speed = math.hypot(*v)
        assert speed == pytest.approx(0.767 * (3.17 / 5.1 + 0.03), rel=1e-12)
        assert abs(speed - 0.50) <= 0.02

    def test_single_long_at_centre_matches_measurement(self, rig, fig2d_model):
        v = superposed_velocity(
            ParticleState(), ActuationPattern.from_indices([1]), rig, fig2d_model
        )
        assert abs(math.hypot(*v) - 0.36) <= 0.04

    def test_adjacent_pair_vector_sum(self, rig, fig2d_model):
        # independent oracle: explicit vector sum of the two radial pushes
        centre_speed = 3.17 / 5.1 + 0.03
        va = 0.767 * centre_speed * np.array([-1.0, 0.0])
        vb = 0.552 * centre_speed * np.array(
            [-math.cos(math.pi / 4), -math.sin(math.pi / 4)]
        )
        expected = va + vb
        v = superposed_velocity(
            ParticleState(), ActuationPattern.from_indices([0, 1]), rig, fig2d_model
        )
        assert v == pytest.approx(tuple(expected), rel=1e-12)
        assert abs(math.hypot(*v) - 0.82) / 0.82 < 0.15

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=255), st.data())
    def test_superposition_linearity_for_disjoint_patterns(self, code, data):
        rig = default_rig()
        model = make_model()
        other = data.draw(st.integers(min_value=0, max_value=255))
        a, b = code, other & ~code  # force disjoint
        state = ParticleState(position=(1.3, -0.7))
        va = superposed_velocity(state, ActuationPattern.from_int(a), rig, model)
        vb = superposed_velocity(state, ActuationPattern.from_int(b), rig, model)
        vab = superposed_velocity(state, ActuationPattern.from_int(a | b), rig, model)
        np.testing.assert_allclose(vab, va + vb, rtol=0, atol=1e-12)


class TestStep:
    def test_no_forcing_no_motion(self, rig, unit_model):
        plant = Plant(rig, unit_model, PlantParams(drift_rms=0.0, seed=0))
        before = plant.state.position
        plant.step(ActuationPattern.all_off(), 1 / 30)
        assert plant.state.position == before

    def test_lag_free_step_is_exact_euler(self, rig, unit_model, quiet_params):
        state = ParticleState(position=(1.0, 0.5))
        plant = Plant(rig, unit_model, quiet_params, state=state)
        v = superposed_velocity(state, ActuationPattern.from_indices([3]), rig, unit_model)
        dt = 1 / 30
        plant.step(ActuationPattern.from_indices([3]), dt)
        expected = (state.position[0] + dt * v[0], state.position[1] + dt * v[1])
        assert plant.state.position == pytest.approx(expected, rel=1e-15)

    def test_seeded_trajectories_bitwise_identical(self, rig, unit_model):
        def run():
            plant = Plant(rig, unit_model, PlantParams(seed=42))
            pattern = ActuationPattern.from_indices([2, 6])
            return [plant.step(pattern, 1 / 30).position for _ in range(100)]

        assert run() == run()

    def test_pure_function_without_noise(self, rig, unit_model, quiet_params):
        def run(seed):
            plant = Plant(
                rig,
                unit_model,
                PlantParams(lag_tau=0.0, drift_rms=0.0, seed=seed),
                state=ParticleState(position=(0.2, -1.0)),
            )
            return [plant.step(ActuationPattern.from_int(5), 1 / 30).position for _ in range(50)]

        assert run(1) == run(999)  # seed is irrelevant once noise is off

    def test_single_solenoid_repels(self, rig, unit_model, quiet_params):
        plant = Plant(
            rig, unit_model, quiet_params, state=ParticleState(position=(2.0, 0.3))
        )
        tip = np.array([5.1, 0.0])
        pattern = ActuationPattern.from_indices([0])
        dist = np.hypot(*(np.array(plant.state.position) - tip))
        for _ in range(200):
            plant.step(pattern, 1 / 30)
            new_dist = np.hypot(*(np.array(plant.state.position) - tip))
            assert new_dist > dist
            dist = new_dist

    def test_boundary_clamp(self, rig, unit_model, quiet_params):
        plant = Plant(
            rig, unit_model, quiet_params, state=ParticleState(position=(3.9, 0.0))
        )
        pattern = ActuationPattern.from_indices([4])  # pushes +x, towards the rim
        for _ in range(300):
            plant.step(pattern, 1 / 30)
            assert math.hypot(*plant.state.position) <= rig.workspace_radius + 1e-12

    def test_drift_stationary_rms(self, rig, unit_model):
        params = PlantParams(lag_tau=0.0, drift_rms=0.05, drift_corr_time=2.0, seed=7)
        plant = Plant(rig, unit_model, params)
        off = ActuationPattern.all_off()
        dt = 1 / 30
        sq = 0.0
        n = 100_000
        for _ in range(n):
            state = plant.step(off, dt)
            sq += state.velocity[0] ** 2 + state.velocity[1] ** 2
        rms = math.sqrt(sq / n)
        assert abs(rms - params.drift_rms) / params.drift_rms < 0.10

    def test_bad_dt_rejected(self, rig, unit_model, quiet_params):
        plant = Plant(rig, unit_model, quiet_params)
        with pytest.raises(ValueError):
            plant.step(ActuationPattern.all_off(), 0.0)


class TestPattern:
    @given(st.integers(min_value=0, max_value=255))
    def test_int_round_trip(self, code):
        assert ActuationPattern.from_int(code).code == code

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            ActuationPattern.from_int(256)
        with pytest.raises(ValueError):
            ActuationPattern(bits=(True,) * 7)

    def test_indices(self):
        p = ActuationPattern.from_indices([0, 2])
        assert p.code == 0b101
        assert p.on_count == 2
