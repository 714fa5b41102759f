import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from overlaplab import models, regimes as rg
from overlaplab.models import PhaseState
from overlaplab.regimes import Verdict

from conftest import cubic_spec, torus_spec

TWO_PI = 2 * math.pi


class TestSeeding:
    def test_gap_seeds_live_between_the_rows(self):
        spec = torus_spec(0.5, 0.01)
        pts = rg.gap_seeds(spec, (0.0, math.pi), 32)
        assert pts.shape[0] >= 16
        assert np.all(pts[:, 1] > 0.0) and np.all(pts[:, 1] < math.pi)
        # seeds start on unperturbed rotational levels inside the gap
        levels = np.asarray(models.energy(spec.unperturbed(),
                                          pts[:, 0], pts[:, 1]))
        assert np.all(levels > -0.5) and np.all(levels < 0.5)

    def test_gap_empty_at_reconnection(self):
        assert rg.gap_seeds(torus_spec(1.0, 0.01), (0.0, math.pi), 16).size \
            == 0

    def test_layer_seeds_near_saddles(self):
        pts = rg.layer_seeds(torus_spec(1.0, 0.01), [0.0, math.pi], 16)
        assert pts.shape[0] >= 8
        dist0 = np.hypot(models.wrap_angle(pts[:, 0]), pts[:, 1])
        distpi = np.hypot(pts[:, 0] - math.pi, pts[:, 1] - math.pi)
        assert np.all(np.minimum(dist0, distpi) < 0.1)

    def test_band_must_contain_both_families(self):
        with pytest.raises(ValueError):
            rg.confinement_test(torus_spec(0.5, 0.01), (0.1, 3.0),
                                n_orbits=4, n_strobe=10)


class TestConfinement:
    def test_kam_blocked_cell(self):
        res = rg.confinement_test(torus_spec(0.5, 0.01), (0.0, math.pi),
                                  n_orbits=16, n_strobe=400,
                                  candidate_strobes=500)
        assert res.verdict is Verdict.CONFINED
        assert res.crossing is None
        assert res.curves and res.curves[0].residual <= 0.05
        # curve evidence separates the rows
        ys = res.curves[0].points[:, 1]
        assert ys.min() > 0.0 and ys.max() < math.pi

    def test_overlapped_cell_has_witness(self):
        res = rg.confinement_test(torus_spec(1.0, 0.01), (0.0, math.pi),
                                  n_orbits=16, n_strobe=400)
        assert res.verdict is Verdict.OVERLAPPED
        assert res.crossing is not None
        ys = res.crossing.iterates[:, 1]
        assert ys.min() < 0.0 or ys.max() > math.pi

    def test_unperturbed_confined_below_reconnection(self):
        res = rg.confinement_test(torus_spec(0.8), (0.0, math.pi),
                                  n_orbits=8, n_strobe=200,
                                  candidate_strobes=400)
        assert res.verdict is Verdict.CONFINED

    def test_verdict_reproducible(self):
        kw = dict(n_orbits=8, n_strobe=200, candidate_strobes=300)
        a = rg.confinement_test(torus_spec(0.5, 0.01), (0.0, math.pi), **kw)
        b = rg.confinement_test(torus_spec(0.5, 0.01), (0.0, math.pi), **kw)
        assert a.verdict is b.verdict
        assert np.array_equal(a.curves[0].points, b.curves[0].points)


class TestRotationNumber:
    def test_matches_period_integral_on_level_curve(self):
        # mu = 0 cubic orbit high above the eyes: the x-advance rate is
        # the level curve's mean of y (1 - y), computable by quadrature
        spec = cubic_spec(1.0)
        y0, x0 = 2.0, 0.0
        level = float(models.energy(spec, x0, y0))

        def y_of_x(x):
            g = lambda y: y * y / 2 - y ** 3 / 3 \
                - (spec.epsilon / 12) * math.cos(x) - level
            return brentq(g, 1.5, 3.0, xtol=1e-14)

        # time to advance one 2*pi cell in x (negative direction)
        t_cell, _ = quad(lambda x: 1.0 / abs(y_of_x(x) * (1 - y_of_x(x))),
                         0.0, TWO_PI, limit=200)
        expected = -TWO_PI * (TWO_PI / t_cell)
        res = rg.rotation_number(spec, PhaseState(x0, y0), n_strobe=1500)
        assert res.is_circle
        assert res.value == pytest.approx(expected, abs=1e-4)
        assert res.convergence_error < 1e-6

    def test_librational_orbit_flagged(self):
        res = rg.rotation_number(cubic_spec(1.0), PhaseState(0.0, 0.25),
                                 n_strobe=300)
        assert res.librational
        assert not res.is_circle

    def test_chaotic_orbit_not_circle(self):
        res = rg.rotation_number(torus_spec(1.0, 0.1), PhaseState(0.0, 0.01),
                                 n_strobe=400)
        assert not res.is_circle
        assert res.y_spread > 0.05


class TestExcursions:
    def test_integrable_run_stays_bounded(self):
        spec = torus_spec(0.9)
        recs = rg.excursion_stats(spec, [PhaseState(0.0, 1.2)], 300.0,
                                  (-TWO_PI, TWO_PI))
        assert recs[0].first_passage is None
        assert recs[0].amplitude < TWO_PI

    def test_overlapped_run_escapes(self, torus_fig_spec):
        recs = rg.excursion_stats(torus_fig_spec, [PhaseState(0.0, 0.01)],
                                  500.0, (-TWO_PI, TWO_PI))
        assert recs[0].amplitude >= TWO_PI

    def test_first_passage_monotone_in_threshold(self):
        spec = torus_spec(1.0, 0.01)
        seeds = rg.diagonal_layer_seeds(4)
        near = rg.excursion_stats(spec, seeds, 4000.0, (0.0, TWO_PI))
        far = rg.excursion_stats(spec, seeds, 4000.0, (0.0, 2 * TWO_PI))
        for a, b in zip(near, far):
            if a.first_passage is not None and b.first_passage is not None:
                assert b.first_passage >= a.first_passage

    def test_thresholds_validated(self):
        with pytest.raises(ValueError):
            rg.excursion_stats(torus_spec(1.0, 0.01), [PhaseState(0, 0)],
                               10.0, (1.0, -1.0))

    def test_diagonal_seeds_on_layer(self):
        pts = rg.diagonal_layer_seeds(8)
        spec = torus_spec(1.0)
        lv = np.asarray(models.energy(spec, pts[:, 0], pts[:, 1]))
        assert np.max(np.abs(lv)) < 1e-12   # exactly on the saddle level
        assert np.all(pts[:, 1] < 0)


class TestItinerary:
    def test_trapped_orbit_has_trivial_itinerary(self):
        iti = rg.itinerary(torus_spec(0.5, 0.001), PhaseState(math.pi, 0.3),
                           200.0)
        assert len(iti) <= 1

    def test_overlapped_orbit_walks_the_lattice(self, torus_fig_spec):
        iti = rg.itinerary(torus_fig_spec, PhaseState(0.0, 0.01), 500.0)
        assert len(iti) >= 4
        assert iti.opposite_corner_count == 0
        for sym in iti.symbols:
            assert (sym[0] + sym[1]) % 2 == 0   # saddle lattice parity

    def test_symbol_times_ordered(self, torus_fig_spec):
        iti = rg.itinerary(torus_fig_spec, PhaseState(0.0, 0.01), 300.0)
        assert iti.entries == sorted(iti.entries)
        for t_in, t_out in zip(iti.entries, iti.exits):
            assert t_out >= t_in

    def test_requires_torus_family(self):
        with pytest.raises(ValueError):
            rg.itinerary(cubic_spec(1.0, 0.01), PhaseState(0, 0), 10.0)

    def test_r_cell_bounds(self):
        with pytest.raises(ValueError):
            rg.itinerary(torus_spec(1.0, 0.01), PhaseState(0, 0), 10.0,
                         r_cell=1.0)

    def test_adjacency_classifier(self):
        iti = rg.itinerary_from_samples(
            [0.0, 1.0, 2.0],
            np.array([0.0, math.pi, 0.0]),
            np.array([0.0, math.pi, TWO_PI]),
            r_cell=0.3)
        assert iti.symbols == [(0, 0), (1, 1), (0, 2)]
        assert iti.violations == []
        corner = rg.itinerary_from_samples(
            [0.0, 1.0],
            np.array([math.pi, -math.pi]),
            np.array([math.pi, -math.pi]),
            r_cell=0.3)
        assert corner.opposite_corner_count == 1
        assert corner.violations == [1]


class TestSweep:
    def test_degenerate_single_cell(self):
        rmap = rg.sweep(torus_spec(1.0, 0.01), [0.5], [0.01],
                        budget=rg.SweepBudget(n_orbits=8, n_strobe=150,
                                              n_candidates=6,
                                              candidate_strobes=300))
        assert rmap.verdicts.shape == (1, 1)
        assert rmap.verdicts[0, 0] is Verdict.CONFINED
        assert rmap.boundary == [(0.01, None)]
        assert rmap.c2_hat is None

    def test_small_grid_boundary_and_fit(self):
        rmap = rg.sweep(torus_spec(1.0, 0.01), [0.5, 1.0], [0.01],
                        budget=rg.SweepBudget(n_orbits=8, n_strobe=150,
                                              n_candidates=6,
                                              candidate_strobes=300))
        assert rmap.verdicts[0, 0] is Verdict.CONFINED
        assert rmap.verdicts[0, 1] is Verdict.OVERLAPPED
        assert rmap.boundary == [(0.01, 1.0)]
        assert rmap.c2_hat == pytest.approx(0.0)
        assert rmap.monotonicity_violations == []

    def test_cells_never_abort(self):
        # an invalid band raises inside the worker; the sweep records
        # UNDETERMINED instead of propagating
        rmap = rg.sweep(torus_spec(1.0, 0.01), [0.5], [0.01],
                        band=(0.1, 3.0),
                        budget=rg.SweepBudget(n_orbits=4, n_strobe=50))
        assert rmap.verdicts[0, 0] is Verdict.UNDETERMINED
