import math

import numpy as np
import pytest

from overlaplab import fixedpoints as fp
from overlaplab.errors import NoConvergence, NotHyperbolic
from overlaplab.models import PhaseState

from conftest import cubic_spec, torus_spec


class TestRefine:
    def test_exact_saddle_at_mu_zero(self):
        orbit = fp.refine_fixed_point(cubic_spec(1.3), PhaseState(math.pi, 0))
        assert math.hypot(orbit.base.x - math.pi, orbit.base.y) <= 1e-12
        assert orbit.residual <= 1e-10
        assert orbit.lambda_u > 1.0

    def test_torus_perturbed_fixed_point(self):
        spec = torus_spec(1.0, 0.01)
        orbit = fp.refine_fixed_point(spec, PhaseState(0.0, 0.0))
        assert math.hypot(orbit.base.x, orbit.base.y) <= 0.1
        assert orbit.lambda_u > 1.0
        assert orbit.residual <= 1e-10
        assert abs(orbit.lambda_u * orbit.lambda_s - 1.0) <= 1e-8

    def test_elliptic_seed_rejected(self):
        with pytest.raises(NotHyperbolic):
            fp.refine_fixed_point(cubic_spec(1.0), PhaseState(0.0, 0.0))

    def test_eigenvalue_matches_flow_rate(self):
        orbit = fp.refine_fixed_point(torus_spec(0.64), PhaseState(0.0, 0.0))
        assert orbit.lambda_u == pytest.approx(
            math.exp(2 * math.pi * 0.8), rel=1e-9)

    def test_export_dict(self):
        orbit = fp.refine_fixed_point(cubic_spec(1.0), PhaseState(math.pi, 0))
        d = orbit.to_dict()
        assert d["eigenvalues"]["unstable"] > 1
        assert d["spec"]["family"] == "cubic"
        assert d["residual"] <= 1e-10


class TestMuCloseness:
    @pytest.mark.parametrize("mu", [1e-3, 1e-2])
    def test_distance_scales_with_mu(self, mu):
        for mk, saddle in ((torus_spec, PhaseState(0.0, 0.0)),
                           (cubic_spec, PhaseState(math.pi, 0.0))):
            orbit = fp.continue_from_saddle(mk(1.0, mu), saddle)
            assert orbit.saddle_distance() <= 10 * mu

    def test_strongly_hyperbolic_needs_ramping(self):
        # direct Newton from the saddle jumps to another fixed point
        # at mu = 0.1 on the torus; the ramped path stays on branch
        orbit = fp.continue_from_saddle(torus_spec(1.0, 0.1),
                                        PhaseState(0.0, 0.0))
        assert orbit.saddle_distance() <= 1.0


class TestContinuation:
    def test_zero_steps_returns_start(self):
        orbit = fp.refine_fixed_point(cubic_spec(1.0), PhaseState(math.pi, 0))
        res = fp.continue_orbit(cubic_spec(1.0), orbit, 0.05, 0)
        assert res.orbits == [orbit]
        assert res.failure is None

    def test_mu_chain_converges(self):
        spec = cubic_spec(1.0)
        orbit = fp.refine_fixed_point(spec, PhaseState(math.pi, 0))
        res = fp.continue_orbit(spec, orbit, 0.05, 10, parameter="mu")
        assert res.failure is None
        assert len(res.orbits) == 11
        assert all(o.residual <= 1e-10 for o in res.orbits)
        dists = [o.saddle_distance() for o in res.orbits]
        assert dists == sorted(dists)   # drift grows with mu

    def test_eps_chain_keeps_saddle_fixed(self):
        # saddle locations do not depend on eps at mu = 0
        spec = cubic_spec(1.0)
        orbit = fp.refine_fixed_point(spec, PhaseState(math.pi, 0))
        res = fp.continue_orbit(spec, orbit, 2.0, 5, parameter="epsilon")
        assert res.failure is None
        for o in res.orbits:
            assert math.hypot(o.base.x - math.pi, o.base.y) <= 1e-12

    def test_rejects_unknown_parameter(self):
        orbit = fp.refine_fixed_point(cubic_spec(1.0), PhaseState(math.pi, 0))
        with pytest.raises(ValueError):
            fp.continue_orbit(cubic_spec(1.0), orbit, 0.1, 3, parameter="nu")
