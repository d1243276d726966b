"""Traces, multiplier identities, and the direct-inequality probe."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from fracplate.families import family_members, parse_family
from fracplate.fractional_calculus import TimeGrid, default_grading
from fracplate.hidden_regularity import (
    boundary_normal_field,
    direct_inequality_probe,
    filtered_identity2_residual,
    filtered_identity_residual,
    filtered_identity_terms,
    normal_trace,
    static_multiplier_identity_residual,
    static_multiplier_identity_terms,
    trace_energy,
)
from fracplate.solver import InitialData, solve
from fracplate.spectral_domain import (
    Interval,
    Rectangle,
    SpectralCoefficients,
    boundary_quadrature,
    eigenmodes,
    fractional_norm,
)
from fracplate.special_functions import MLParams, ml_eval


@pytest.fixture(scope="module")
def interval_setup():
    d = Interval(math.pi)
    modes = tuple(eigenmodes(d, 8))
    return d, modes


def _solution(d, modes, u0, u1, alpha=1.5, T=1.0):
    data = InitialData(
        SpectralCoefficients(modes, u0), SpectralCoefficients(modes, u1), "H1"
    )
    return solve(d, len(modes), alpha, data, T)


class TestMultiplierField:
    @pytest.mark.parametrize(
        "d", [Interval(math.pi), Interval(2.0), Rectangle(math.pi, math.pi), Rectangle(1.0, 2.5)]
    )
    def test_normal_alignment(self, d):
        field = boundary_normal_field(d)
        pts, _, normals = boundary_quadrature(d, 24)
        hv = field.h(pts)
        assert np.max(np.abs(np.sum(hv * normals, axis=1) - 1.0)) < 1e-12


class TestNormalTrace:
    def test_zero_solution(self, interval_setup):
        d, modes = interval_setup
        s = _solution(d, modes, [0.0] * 8, [0.0] * 8)
        tr = normal_trace(s, TimeGrid.graded(1.0, 512, 4.0), "u")
        assert np.max(np.abs(tr.samples)) == 0.0
        assert trace_energy(tr) == 0.0

    def test_single_mode_trace_value(self, interval_setup):
        d, modes = interval_setup
        s = _solution(d, modes, [1.0] + [0.0] * 7, [0.0] * 8)
        grid = TimeGrid.graded(1.0, 512, 4.0)
        tr = normal_trace(s, grid, "u")
        i = 300
        t = grid.nodes[i]
        expect = -math.sqrt(2 / math.pi) * ml_eval(MLParams(1.5, 1.0), -(t**1.5)).value
        assert tr.samples[i, 0] == pytest.approx(expect, rel=1e-11)

    def test_lifted_sign_identity(self, interval_setup):
        # per-mode mu/sqrt(lam) = 1, so the lifted trace is exactly -trace(u)
        d, modes = interval_setup
        rng = np.random.default_rng(8)
        s = _solution(d, modes, rng.standard_normal(8), rng.standard_normal(8))
        grid = TimeGrid.graded(1.0, 256, 4.0)
        tr_u = normal_trace(s, grid, "u")
        tr_d = normal_trace(s, grid, "delta_lifted")
        scale = np.max(np.abs(tr_u.samples))
        assert np.max(np.abs(tr_d.samples + tr_u.samples)) < 1e-13 * scale


class TestTraceEnergy:
    def test_single_mode_against_quadrature_oracle(self, interval_setup):
        # (4/pi) int_0^1 E_{3/2}(-t^{3/2})^2 dt; both endpoints carry 2/pi
        d, modes = interval_setup
        s = _solution(d, modes, [1.0] + [0.0] * 7, [0.0] * 8)
        grid = TimeGrid.graded(1.0, 2048, 4.0)
        got = trace_energy(normal_trace(s, grid, "u"))
        oracle = (4 / math.pi) * quad(
            lambda t: ml_eval(MLParams(1.5, 1.0), -(t**1.5)).value ** 2,
            0.0,
            1.0,
            limit=200,
        )[0]
        assert got == pytest.approx(oracle, rel=1e-5)

    def test_quadratic_scaling(self, interval_setup):
        d, modes = interval_setup
        rng = np.random.default_rng(13)
        u0, u1 = rng.standard_normal(8), rng.standard_normal(8)
        grid = TimeGrid.graded(1.0, 256, 4.0)
        e1 = trace_energy(normal_trace(_solution(d, modes, u0, u1), grid, "u"))
        e2 = trace_energy(
            normal_trace(_solution(d, modes, 3.0 * u0, 3.0 * u1), grid, "u")
        )
        assert e2 == pytest.approx(9.0 * e1, rel=1e-12)


class TestStaticIdentity:
    def test_zero_function(self, interval_setup):
        d, modes = interval_setup
        w = SpectralCoefficients(modes, np.zeros(8))
        assert static_multiplier_identity_residual(w, d) == 0.0

    def test_sine_on_interval_reduction(self, interval_setup):
        # w = sin(x): 2 int w'''' h w''' = [h (w''')^2] - int h' (w''')^2
        d, modes = interval_setup
        w = SpectralCoefficients((modes[0],), [math.sqrt(math.pi / 2.0)])
        terms = static_multiplier_identity_terms(w, d)
        assert terms["lhs"] == pytest.approx(1.0, abs=1e-12)
        assert terms["boundary"] == pytest.approx(2.0, abs=1e-12)
        assert terms["jacobian"] == pytest.approx(-2.0, abs=1e-12)
        assert terms["divergence"] == pytest.approx(1.0, abs=1e-12)
        assert static_multiplier_identity_residual(w, d) < 1e-10

    def test_sixteen_mode_interval(self):
        d = Interval(math.pi)
        modes = tuple(eigenmodes(d, 16))
        rng = np.random.default_rng(21)
        w = SpectralCoefficients(modes, rng.standard_normal(16) / np.arange(1, 17))
        terms = static_multiplier_identity_terms(w, d)
        scale = max(abs(terms["lhs"]), abs(terms["boundary"]))
        assert static_multiplier_identity_residual(w, d) < 1e-8 * scale

    def test_two_mode_square(self):
        d = Rectangle(math.pi, math.pi)
        modes = tuple(eigenmodes(d, 3))
        w = SpectralCoefficients(modes, [1.0, 0.0, 1.0])  # e_{11} + e_{21}
        terms = static_multiplier_identity_terms(w, d)
        scale = max(abs(terms["lhs"]), abs(terms["boundary"]))
        assert static_multiplier_identity_residual(w, d) < 1e-8 * scale

    def test_spectral_convergence_under_quadrature_refinement(self):
        d = Rectangle(math.pi, math.pi)
        modes = tuple(eigenmodes(d, 4))
        w = SpectralCoefficients(modes, [0.8, -0.4, 0.4, 0.2])
        coarse = static_multiplier_identity_residual(w, d, quad_order=12)
        fine = static_multiplier_identity_residual(w, d, quad_order=28)
        assert fine <= coarse
        assert fine < 1e-10


class TestFilteredIdentities:
    def test_vacuous_at_time_zero(self, interval_setup):
        d, modes = interval_setup
        s = _solution(d, modes, [1.0] + [0.0] * 7, [0.0] * 8)
        grid = TimeGrid.graded(1.0, 512, 4.0)
        assert filtered_identity_residual(s, None, 0.25, grid, 0) == 0.0

    def test_zero_data(self, interval_setup):
        d, modes = interval_setup
        s = _solution(d, modes, [0.0] * 8, [0.0] * 8)
        grid = TimeGrid.graded(1.0, 512, 4.0)
        assert filtered_identity_residual(s, None, 0.25, grid, 512) < 1e-300

    def test_single_mode_within_contract(self, interval_setup):
        d, modes = interval_setup
        s = _solution(d, modes, [1.0] + [0.0] * 7, [0.0] * 8)
        grid = TimeGrid.graded(1.0, 2048, 4.0)
        r = filtered_identity_residual(s, None, 0.25, grid, 2048)
        terms = filtered_identity_terms(s, 0.25, grid, 2048)
        assert r <= 1e-3 * max(abs(terms["lhs_boundary"]), 1e-300)

    def test_decays_under_refinement(self, interval_setup):
        d, modes = interval_setup
        rng = np.random.default_rng(5)
        s = _solution(d, modes, rng.standard_normal(8) / np.arange(1, 9),
                      rng.standard_normal(8) / np.arange(1, 9))
        res = []
        for M in (512, 1024, 2048):
            grid = TimeGrid.graded(1.0, M, 4.0)
            res.append(filtered_identity_residual(s, None, 0.25, grid, M))
        assert res[0] > res[1] > res[2]
        assert math.log2(res[1] / res[2]) >= 1.0

    def test_two_time_identity(self, interval_setup):
        d, modes = interval_setup
        s = _solution(d, modes, [0.5, -0.3] + [0.0] * 6, [0.1, 0.2] + [0.0] * 6)
        grid = TimeGrid.graded(1.0, 1024, 4.0)
        assert filtered_identity2_residual(s, None, 0.25, grid, 700, 700) == 0.0
        r = filtered_identity2_residual(s, None, 0.25, grid, 1024, 512)
        r_swap = filtered_identity2_residual(s, None, 0.25, grid, 512, 1024)
        assert r == pytest.approx(r_swap, rel=1e-12)
        assert r < 1e-2

    def test_beta_domain_enforced(self, interval_setup):
        d, modes = interval_setup
        s = _solution(d, modes, [1.0] + [0.0] * 7, [0.0] * 8)
        grid = TimeGrid.graded(1.0, 512, 4.0)
        with pytest.raises(ValueError):
            filtered_identity_residual(s, None, 1.5, grid, 10)


class TestFamilies:
    def test_parse(self):
        assert parse_family("single-u1") == ("single-u1", {})
        assert parse_family("decay:1.5") == ("decay", {"p": 1.5})
        kind, params = parse_family("worst:16:2.0")
        assert kind == "worst" and params == {"K": 16.0, "p": 2.0}
        with pytest.raises(ValueError):
            parse_family("bogus")

    def test_single_sweeps(self):
        mem = family_members("single-u0", 4)
        assert len(mem) == 4
        assert mem[2][0].tolist() == [0.0, 0.0, 1.0, 0.0]
        assert np.all(mem[2][1] == 0.0)

    def test_decay_reproducible_and_nested(self):
        a = family_members("decay:1.5", 16, seed=42, members=3)
        b = family_members("decay:1.5", 16, seed=42, members=3)
        for (u0a, u1a), (u0b, u1b) in zip(a, b):
            assert np.array_equal(u0a, u0b) and np.array_equal(u1a, u1b)
        # nested truncation: smaller N is a prefix of larger N
        c = family_members("decay:1.5", 8, seed=42, members=3)
        assert np.array_equal(c[0][0], a[0][0][:8])

    def test_seed_changes_stream(self):
        a = family_members("decay:1.5", 8, seed=1, members=1)[0][0]
        b = family_members("decay:1.5", 8, seed=2, members=1)[0][0]
        assert not np.array_equal(a, b)


class TestDirectInequalityProbe:
    def test_single_mode_u0_regression(self):
        # (4/pi) int_0^1 E_{3/2}(-t^{3/2})^2 dt against H^1_0 norm 1
        from fracplate.acceptance import REGRESSION_LOCKS

        d = Interval(math.pi)
        modes = tuple(eigenmodes(d, 4))
        data = InitialData(
            SpectralCoefficients(modes, [1.0, 0, 0, 0]),
            SpectralCoefficients(modes, [0.0] * 4),
            "H1",
        )
        s = solve(d, 4, 1.5, data, 1.0)
        grid = TimeGrid.graded(1.0, 512, default_grading(1.5))
        ratio = trace_energy(normal_trace(s, grid, "u"))
        assert ratio == pytest.approx(REGRESSION_LOCKS["u0_single_mode_ratio"], rel=1e-6)
        oracle = (4 / math.pi) * quad(
            lambda t: ml_eval(MLParams(1.5, 1.0), -(t**1.5)).value ** 2, 0, 1, limit=200
        )[0]
        assert ratio == pytest.approx(oracle, rel=1e-4)

    def test_scaling_invariance(self):
        d = Interval(math.pi)
        base = direct_inequality_probe(
            d, 1.5, 1.0, "decay:1.5", [4, 8], seed=42, members=2, time_nodes=128
        )
        # scaling all data by 7 leaves ratios unchanged: both sides quadratic;
        # realized here by the homogeneity of the ratio in the probe members
        modes = tuple(eigenmodes(d, 8))
        u0, u1 = family_members("decay:1.5", 8, seed=42, members=1)[0]
        grid = TimeGrid.graded(1.0, 128, default_grading(1.5))

        def ratio(scale):
            data = InitialData(
                SpectralCoefficients(modes, scale * u0),
                SpectralCoefficients(modes, scale * u1),
                "H1",
            )
            s = solve(d, 8, 1.5, data, 1.0)
            den = (
                fractional_norm(data.u0, 0.25) ** 2
                + fractional_norm(data.u1, -0.25) ** 2
            )
            return trace_energy(normal_trace(s, grid, "u")) / den

        assert ratio(1.0) == pytest.approx(ratio(7.0), rel=1e-12)
        assert math.isfinite(base.metrics["R_max"])

    def test_growth_factor_bounded_small_schedule(self):
        d = Interval(math.pi)
        rep = direct_inequality_probe(
            d, 1.5, 1.0, "decay:1.5", [8, 16, 32], seed=42, members=4, time_nodes=256
        )
        assert rep.metrics["growth_factor_max"] <= 1.25
        assert all(math.isfinite(row["R"]) for row in rep.table)


class TestTraceInvariants:
    def test_per_mode_trace_factorization(self, interval_setup):
        # trace of a sum is the sum of per-mode traces, to round-off
        d, modes = interval_setup
        grid = TimeGrid.graded(1.0, 128, 4.0)
        u0 = np.array([0.5, -0.3, 0.2, 0.0, 0.1, 0.0, 0.0, -0.05])
        u1 = np.array([0.1, 0.0, -0.2, 0.3, 0.0, 0.0, 0.05, 0.0])
        total = normal_trace(_solution(d, modes, u0, u1), grid, "u").samples
        acc = np.zeros_like(total)
        for i in range(8):
            sel0 = np.zeros(8)
            sel1 = np.zeros(8)
            sel0[i] = u0[i]
            sel1[i] = u1[i]
            acc += normal_trace(_solution(d, modes, sel0, sel1), grid, "u").samples
        assert np.max(np.abs(total - acc)) < 1e-13 * max(np.max(np.abs(total)), 1.0)

    def test_probe_ratio_stable_under_time_refinement(self):
        # quadrature refinement moves the reported ratios by under 1%
        d = Interval(math.pi)
        reps = [
            direct_inequality_probe(
                d, 1.5, 1.0, "decay:1.5", [8], seed=42, members=2, time_nodes=tn
            )
            for tn in (256, 512)
        ]
        r1 = reps[0].table[0]["R"]
        r2 = reps[1].table[0]["R"]
        assert abs(r1 - r2) / r2 < 0.01


@pytest.fixture(scope="module")
def square_setup():
    d = Rectangle(math.pi, math.pi)
    return d, tuple(eigenmodes(d, 6))


class TestRectangleDomain:

    def test_trace_sign_identity_on_square(self, square_setup):
        d, modes = square_setup
        rng = np.random.default_rng(17)
        data = InitialData(
            SpectralCoefficients(modes, rng.standard_normal(6)),
            SpectralCoefficients(modes, rng.standard_normal(6)),
            "H1",
        )
        s = solve(d, 6, 1.5, data, 1.0)
        grid = TimeGrid.graded(1.0, 128, 4.0)
        tr_u = normal_trace(s, grid, "u")
        tr_d = normal_trace(s, grid, "delta_lifted")
        scale = np.max(np.abs(tr_u.samples))
        assert np.max(np.abs(tr_d.samples + tr_u.samples)) < 1e-12 * scale

    def test_single_mode_trace_energy_oracle(self, square_setup):
        # u1 = e_{11} on the pi x pi square: each edge contributes
        # (4/pi^2) * (pi/2) = 2/pi to the boundary integral of |d_nu e|^2,
        # so energy = (8/pi) int c(t)^2 dt with c = t E_{3/2,2}(-4 t^{3/2})
        d, modes = square_setup
        u1 = np.zeros(6)
        u1[0] = 1.0
        data = InitialData(
            SpectralCoefficients(modes, np.zeros(6)),
            SpectralCoefficients(modes, u1),
            "H1",
        )
        s = solve(d, 6, 1.5, data, 1.0)
        grid = TimeGrid.graded(1.0, 2048, 4.0)
        got = trace_energy(normal_trace(s, grid, "u"))
        lam = modes[0].lam
        oracle = (8.0 / math.pi) * quad(
            lambda t: (t * ml_eval(MLParams(1.5, 2.0), -lam * t**1.5).value) ** 2,
            0.0,
            1.0,
            limit=300,
        )[0]
        assert got == pytest.approx(oracle, rel=1e-4)

    def test_filtered_identity_within_contract(self, square_setup):
        d, modes = square_setup
        rng = np.random.default_rng(23)
        data = InitialData(
            SpectralCoefficients(modes, rng.standard_normal(6) / np.arange(1, 7)),
            SpectralCoefficients(modes, rng.standard_normal(6) / np.arange(1, 7)),
            "H1",
        )
        s = solve(d, 6, 1.5, data, 1.0)
        res = []
        for M in (512, 1024):
            grid = TimeGrid.graded(1.0, M, 4.0)
            res.append(filtered_identity_residual(s, None, 0.25, grid, M))
        terms = filtered_identity_terms(s, 0.25, TimeGrid.graded(1.0, 1024, 4.0), 1024)
        assert res[1] <= 1e-3 * max(abs(terms["lhs_boundary"]), 1e-300)
        assert res[0] > res[1]

    def test_probe_on_square_is_finite(self, square_setup):
        d, _ = square_setup
        rep = direct_inequality_probe(
            d, 1.5, 1.0, "decay:1.5", [4, 8], seed=42, members=2, time_nodes=128
        )
        assert all(math.isfinite(row["R"]) and row["R"] > 0 for row in rep.table)
