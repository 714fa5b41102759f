import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from overlaplab import models
from overlaplab.models import (Coupling, Family, ModelSpec, PhaseState,
                               energy, saddle_grid, saddle_levels,
                               saddle_linearization, separatrix_level,
                               vector_field, velocity, wrap_angle)
from overlaplab.trig import TrigSum, parse_trig_sum

from conftest import cubic_spec, torus_spec


class TestEnergy:
    def test_cubic_saddle_level(self):
        assert energy(cubic_spec(1.0), math.pi, 0.0) == pytest.approx(
            1 / 12, abs=1e-15)

    def test_cubic_upper_saddle_reconnection(self):
        # equality of the two levels is the eps = 1 reconnection
        assert energy(cubic_spec(1.0), 0.0, 1.0) == pytest.approx(
            1 / 12, abs=1e-15)

    def test_torus_corner(self):
        assert energy(torus_spec(0.5), 0.0, 0.0) == pytest.approx(0.5)

    @pytest.mark.parametrize("eps", [0.3, 1.0, 1.7])
    def test_torus_odd_saddle(self, eps):
        assert energy(torus_spec(eps), math.pi, math.pi) == pytest.approx(
            eps - 1.0)

    def test_mu_zero_time_independent(self):
        spec = torus_spec(0.8)
        assert energy(spec, 0.3, 0.4, 0.0) == energy(spec, 0.3, 0.4, 1.7)

    def test_coupling_factor(self):
        f = TrigSum.default()
        mu_only = ModelSpec(Family.TORUS, 0.5, 0.2, f, Coupling.MU_ONLY)
        eps_mu = ModelSpec(Family.TORUS, 0.5, 0.2, f, Coupling.EPS_MU)
        x, y, t = 0.3, 0.7, 0.9
        base = energy(torus_spec(0.5), x, y, t)
        assert energy(mu_only, x, y, t) == pytest.approx(
            base + 0.2 * f.value(x, y, t))
        assert energy(eps_mu, x, y, t) == pytest.approx(
            base + 0.5 * 0.2 * f.value(x, y, t))


class TestVectorField:
    def test_cubic_lower_center_is_equilibrium(self):
        assert vector_field(cubic_spec(1.0), PhaseState(0.0, 0.0)) == (0, 0)

    @pytest.mark.parametrize("eps", [0.25, 1.0, 2.0])
    def test_cubic_saddle_equilibrium(self, eps):
        xd, yd = vector_field(cubic_spec(eps), PhaseState(math.pi, 0.0))
        assert abs(xd) < 1e-15 and abs(yd) < 1e-15

    @pytest.mark.parametrize("pt", [(0.0, 0.0), (math.pi, math.pi)])
    def test_torus_saddle_equilibria(self, pt):
        xd, yd = vector_field(torus_spec(1.3), PhaseState(*pt))
        assert abs(xd) < 1e-15 and abs(yd) < 1e-15

    def test_finite_difference_consistency(self):
        rng = np.random.default_rng(7)
        h = 1e-6
        for family, mk in ((Family.CUBIC, cubic_spec),
                           (Family.TORUS, torus_spec)):
            spec = mk(0.9, 0.15)
            x = rng.uniform(-math.pi, math.pi, 500)
            y = rng.uniform(-1.5, 2.0, 500)
            t = rng.uniform(0, 2 * math.pi, 500)
            xd, yd = velocity(spec, x, y, t)
            fd_hy = (np.asarray(energy(spec, x, y + h, t))
                     - np.asarray(energy(spec, x, y - h, t))) / (2 * h)
            fd_hx = (np.asarray(energy(spec, x + h, y, t))
                     - np.asarray(energy(spec, x - h, y, t))) / (2 * h)
            scale = np.maximum(1.0, np.abs(xd) + np.abs(yd))
            assert np.max(np.abs(xd - fd_hy) / scale) < 1e-6
            assert np.max(np.abs(yd + fd_hx) / scale) < 1e-6

    def test_hessian_finite_differences(self):
        spec = torus_spec(0.7, 0.1)
        h = 1e-5
        x, y, t = 0.37, -0.81, 2.2
        hxx, hxy, hyy = models.hessian(spec, x, y, t)
        fd_xx = (energy(spec, x + h, y, t) - 2 * energy(spec, x, y, t)
                 + energy(spec, x - h, y, t)) / h ** 2
        fd_yy = (energy(spec, x, y + h, t) - 2 * energy(spec, x, y, t)
                 + energy(spec, x, y - h, t)) / h ** 2
        fd_xy = (energy(spec, x + h, y + h, t) - energy(spec, x + h, y - h, t)
                 - energy(spec, x - h, y + h, t)
                 + energy(spec, x - h, y - h, t)) / (4 * h ** 2)
        assert hxx == pytest.approx(fd_xx, abs=1e-5)
        assert hyy == pytest.approx(fd_yy, abs=1e-5)
        assert hxy == pytest.approx(fd_xy, abs=1e-5)


class TestSaddleGrid:
    def test_cubic_single_cell(self):
        pts = saddle_grid(cubic_spec(1.0), [0])
        assert [(p.x, p.y) for p in pts] == [(math.pi, 0.0), (0.0, 1.0)]

    def test_torus_single_cell(self):
        pts = saddle_grid(torus_spec(1.0), [0], [0])
        assert [(p.x, p.y) for p in pts] == [(0.0, 0.0),
                                             (math.pi, math.pi)]

    def test_torus_two_cells(self):
        pts = saddle_grid(torus_spec(1.0), [-1, 0], [0])
        assert [(p.x, p.y) for p in pts] == [
            (-2 * math.pi, 0.0), (0.0, 0.0),
            (-math.pi, math.pi), (math.pi, math.pi)]

    def test_empty_range(self):
        assert saddle_grid(cubic_spec(1.0), []) == []

    def test_all_saddles_are_equilibria(self):
        for mk in (cubic_spec, torus_spec):
            spec = mk(0.7)
            for p in saddle_grid(spec, range(-2, 3), range(-2, 3)):
                xd, yd = vector_field(spec, p)
                assert abs(xd) < 1e-12 and abs(yd) < 1e-12


class TestSeparatrixLevel:
    def test_cubic_values(self):
        spec = cubic_spec(1.0)
        assert separatrix_level(spec, PhaseState(math.pi, 0.0)) == \
            pytest.approx(1 / 12, abs=1e-16)
        assert separatrix_level(torus_spec(1.0), PhaseState(0.0, 0.0)) == 0.0

    def test_cubic_half_eps_levels_differ(self):
        spec = cubic_spec(0.5)
        lo = separatrix_level(spec, PhaseState(math.pi, 0.0))
        hi = separatrix_level(spec, PhaseState(0.0, 1.0))
        assert lo == pytest.approx(1 / 24)
        assert hi == pytest.approx(1 / 6 - 1 / 24)
        assert abs(lo - hi) > 1e-3

    def test_rejects_non_saddle(self):
        with pytest.raises(ValueError, match="not an unperturbed saddle"):
            separatrix_level(cubic_spec(1.0), PhaseState(0.3, 0.1))
        with pytest.raises(ValueError, match="not an unperturbed saddle"):
            separatrix_level(cubic_spec(1.0), PhaseState(0.0, 0.0))

    def test_mu_ignored(self):
        spec = cubic_spec(1.0, 0.3)
        assert separatrix_level(spec, PhaseState(math.pi, 0.0)) == \
            pytest.approx(1 / 12, abs=1e-16)

    @pytest.mark.parametrize("mk", [cubic_spec, torus_spec])
    def test_reconnection_iff_eps_one(self, mk):
        for eps, equal in ((1.0, True), (1.0 + 5e-13, False),
                           (0.97, False), (1.5, False)):
            a, b = saddle_levels(mk(eps))
            assert (abs(a - b) < 1e-14) is equal


class TestSymmetries:
    def test_torus_half_cell_negation(self):
        spec = torus_spec(0.8)
        xs = np.linspace(-math.pi, math.pi, 100)
        ys = np.linspace(-math.pi, math.pi, 100)
        xg, yg = np.meshgrid(xs, ys)
        lhs = np.asarray(energy(spec, xg, yg))
        rhs = -np.asarray(energy(spec, xg + math.pi, yg + math.pi))
        assert np.max(np.abs(lhs - rhs)) < 1e-14

    def test_cubic_even_in_x(self):
        spec = cubic_spec(1.3)
        xs = np.linspace(-math.pi, math.pi, 100)
        ys = np.linspace(-1.0, 2.0, 100)
        xg, yg = np.meshgrid(xs, ys)
        assert np.max(np.abs(np.asarray(energy(spec, xg, yg))
                             - np.asarray(energy(spec, -xg, yg)))) < 1e-14


class TestLinearization:
    def test_cubic_rate(self):
        nu, v_u, v_s = saddle_linearization(cubic_spec(1.0),
                                            PhaseState(math.pi, 0.0))
        assert nu == pytest.approx(math.sqrt(1 / 12))
        assert v_u[1] > 0 > v_s[1]

    def test_torus_rate(self):
        nu, v_u, _ = saddle_linearization(torus_spec(0.49),
                                          PhaseState(0.0, 0.0))
        assert nu == pytest.approx(0.7)
        assert v_u[1] < 0   # heads toward (pi, -pi)


class TestSpecValidation:
    def test_epsilon_range(self):
        with pytest.raises(ValueError):
            cubic_spec(0.0)
        with pytest.raises(ValueError):
            cubic_spec(2.5)

    def test_negative_mu(self):
        with pytest.raises(ValueError):
            cubic_spec(1.0, -0.1)


@given(st.floats(-50, 50, allow_nan=False))
@settings(max_examples=80, deadline=None)
def test_wrap_agrees_modulo_two_pi(v):
    w = float(wrap_angle(v))
    assert -math.pi <= w < math.pi
    assert math.isclose(math.cos(w), math.cos(v), abs_tol=1e-9)
    assert math.isclose(math.sin(w), math.sin(v), abs_tol=1e-9)


def test_phase_state_wrapped_views():
    s = PhaseState(3 * math.pi + 0.1, -2 * math.pi - 0.2, 5 * math.pi)
    assert s.x_wrapped == pytest.approx(-math.pi + 0.1)
    assert s.y_wrapped == pytest.approx(-0.2)
    assert s.t_wrapped == pytest.approx(math.pi)
