# tests/test_testkit.py
"""
Tests for the oracle suite, the finite-difference oracle and the
redirection benchmark.

Tests verify:
  - Each oracle check passes on the synthetic model.
  - Unknown check names select nothing.
  - oracle_fd agrees with the closed form of a prior term.
  - Cumulative error curves, gaze sampling and the TSV table layout.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from eyewarp.config import EnergyWeights, RenderOptions
from eyewarp.constants import BENCH_MIN_CHANGE_DEG, BENCH_PITCH_RANGE_DEG, BENCH_YAW_RANGE_DEG
from eyewarp.energy.objective import Objective
from eyewarp.energy.terms import Observation, synth_landmarks
from eyewarp.model.params import FIELD_SLICES, ParameterVector
from eyewarp.model.scene import pose_scene
from eyewarp.models import RedirectMode, RedirectRequest
from eyewarp.render.renderer import render
from eyewarp.testkit.benchmark import (
    BenchmarkRow,
    BenchmarkTable,
    benchmark_redirection,
    cumulative_error_curve,
    pair_error,
    sample_gazes,
)
from eyewarp.testkit.oracles import oracle_fd
from eyewarp.testkit.selftest import CHECKS, check_depth, check_flow, check_kabsch, check_loop, run_selftest

FAST = RenderOptions(subdivide=False, refraction=False, ambient_occlusion=False)


def make_row(pair: int, none: float, eyeballs: float, full: float) -> BenchmarkRow:
    return BenchmarkRow(pair=pair, pitch_deg=3.0, yaw_deg=4.0, none=none, eyeballs=eyeballs, full=full)


class TestOracleChecks:
    @pytest.mark.parametrize("check", [check_loop, check_depth, check_flow, check_kabsch])
    def test_check_passes(self, model, camera, check):
        passed, detail = check(model, camera)
        assert passed, detail

    def test_run_selected_checks(self, model, camera):
        results = run_selftest(model, camera, only=["kabsch", "loop_subdivision"])
        assert [r.name for r in results] == ["loop_subdivision", "kabsch"]
        assert all(r.passed for r in results)
        assert all(r.elapsed_ms >= 0 for r in results)

    def test_unknown_name_selects_nothing(self, model, camera):
        assert run_selftest(model, camera, only=["no_such_check"]) == []

    def test_every_check_is_named(self):
        assert set(CHECKS) == {
            "loop_subdivision",
            "depth_buffer",
            "eyelid_flow",
            "prior_gradient",
            "kabsch",
            "identity_locality",
            "reflection_maps",
        }

    @pytest.mark.slow
    def test_full_suite(self, model, camera):
        failed = [(r.name, r.detail) for r in run_selftest(model, camera) if not r.passed]
        assert not failed


class TestFiniteDifferenceOracle:
    def test_matches_pose_prior_gradient(self, model, camera):
        truth = ParameterVector()
        image = render(pose_scene(truth, model), camera, options=FAST).color
        objective = Objective(
            model,
            Observation(image, synth_landmarks(truth, model, camera)),
            camera,
            weights=EnergyWeights(image=0.0, ldmks=0.0),
            render_options=FAST,
        )
        params = ParameterVector.create(theta_lid=0.2)
        # d/dlid of 0.1·(pitch − lid)² at pitch 0
        expected = 2.0 * 0.1 * 0.2
        assert oracle_fd(objective, params, FIELD_SLICES["theta_lid"].start) == pytest.approx(expected, rel=1e-6)


class TestBenchmarkTable:
    def test_cumulative_curve(self):
        curve = cumulative_error_curve([0.1, 0.2, 0.3, 0.4], [0.0, 0.2, 0.35, 1.0])
        np.testing.assert_allclose(curve, [0.0, 0.5, 0.75, 1.0])

    def test_cumulative_curve_empty(self):
        np.testing.assert_array_equal(cumulative_error_curve([], [0.1, 0.2]), [0.0, 0.0])

    def test_empty_table(self):
        table = BenchmarkTable()
        assert len(table) == 0
        assert all(math.isnan(v) for v in table.means().values())
        assert math.isnan(table.fraction_ordered)
        assert table.to_tsv() == "pair\tpitch_deg\tyaw_deg\tnone\teyeballs\tfull\n"

    def test_means_and_ordering(self):
        table = BenchmarkTable(rows=[make_row(0, 0.3, 0.2, 0.1), make_row(1, 0.1, 0.2, 0.3)])
        assert table.means() == pytest.approx({"none": 0.2, "eyeballs": 0.2, "full": 0.2})
        assert table.fraction_ordered == 0.5
        assert table.rows[0].magnitude_deg == pytest.approx(5.0)
        assert table.rows[1].error(RedirectMode.FULL) == 0.3

    def test_tsv_rows(self):
        lines = BenchmarkTable(rows=[make_row(0, 0.3, 0.2, 0.1)]).to_tsv().splitlines()
        assert len(lines) == 2
        assert lines[1].split("\t") == ["0", "3.000", "4.000", "0.300000", "0.200000", "0.100000"]


class TestGazeSampling:
    def test_range_and_minimum_change(self):
        gazes = sample_gazes(50, seed=3)
        assert len(gazes) == 50
        for pitch, yaw in gazes:
            assert abs(pitch) <= BENCH_PITCH_RANGE_DEG
            assert abs(yaw) <= BENCH_YAW_RANGE_DEG
            assert math.hypot(pitch, yaw) >= BENCH_MIN_CHANGE_DEG

    def test_seeded(self):
        assert sample_gazes(5, seed=1) == sample_gazes(5, seed=1)
        assert sample_gazes(5, seed=1) != sample_gazes(5, seed=2)

    def test_zero(self):
        assert sample_gazes(0) == []


class TestBenchmark:
    def test_no_change_costs_nothing_without_redirection(self, model, camera):
        errors = pair_error(model, camera, ParameterVector(), RedirectRequest.angles(0.0, 0.0), render_options=FAST)
        assert errors[RedirectMode.NONE] == 0.0
        assert set(errors) == {RedirectMode.NONE, RedirectMode.EYEBALLS, RedirectMode.FULL}

    def test_empty_benchmark(self, model, camera):
        table = benchmark_redirection(model, camera, 0)
        assert len(table) == 0

    @pytest.mark.slow
    def test_more_parts_give_less_error(self, model, camera):
        table = benchmark_redirection(model, camera, 50, seed=1)
        assert len(table) == 50
        assert table.fraction_ordered >= 0.95
        means = table.means()
        assert means["full"] <= means["eyeballs"] <= means["none"]
        assert means["full"] < means["none"]
