# tests/test_params.py
"""
Unit tests for ParameterVector and the flat parameter layout.

Tests verify the 50-entry layout, array conversion, validation errors,
masks, bounds and the record types built on top of Φ.
"""

from __future__ import annotations

import numpy as np
import pytest

from eyewarp.exceptions import InvalidParameters
from eyewarp.model.params import (
    FIELD_SLICES,
    LOWER_BOUNDS,
    PARAM_COUNT,
    UPPER_BOUNDS,
    VIDEO_MASK,
    ParameterVector,
    flat_names,
    mask_indices,
)
from eyewarp.models import EnergyBreakdown, FitTrace, RedirectRequest, TraceEntry


class TestLayout:
    def test_fifty_parameters(self):
        assert PARAM_COUNT == 50
        assert len(flat_names()) == 50

    def test_slices_tile_the_vector(self):
        covered = np.zeros(PARAM_COUNT, dtype=int)
        for s in FIELD_SLICES.values():
            covered[s] += 1
        assert np.all(covered == 1)

    def test_flat_names_are_indexed(self):
        names = flat_names()
        assert names[0] == "beta_face[0]"
        assert names[FIELD_SLICES["theta_T"].start + 2] == "theta_T[2]"
        assert names[FIELD_SLICES["theta_lid"].start] == "theta_lid"


class TestParameterVector:
    def test_defaults_face_the_camera(self):
        p = ParameterVector()
        assert p.theta_T[2] < 0
        assert p.theta_p == p.theta_y == p.theta_v == p.theta_lid == 0.0

    def test_array_round_trip(self):
        rng = np.random.default_rng(1)
        x = ParameterVector().to_array()
        x[FIELD_SLICES["beta_face"]] = rng.normal(size=16)
        x[FIELD_SLICES["theta_p"]] = 0.1
        p = ParameterVector.from_array(x)
        np.testing.assert_array_equal(p.to_array(), x)

    def test_wrong_length_rejected(self):
        with pytest.raises(InvalidParameters):
            ParameterVector.from_array(np.zeros(49))

    def test_wrong_beta_length_rejected(self):
        with pytest.raises(InvalidParameters):
            ParameterVector.create(beta_face=(0.0,) * 15)

    def test_color_out_of_range_rejected(self):
        with pytest.raises(InvalidParameters):
            ParameterVector.create(tau_iris=(1.2, 0.5, 0.5))

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidParameters):
            ParameterVector.create(theta_T=(0.0, float("nan"), -500.0))

    def test_replace_validates(self):
        p = ParameterVector()
        assert p.replace(theta_p=0.2).theta_p == 0.2
        with pytest.raises(InvalidParameters):
            p.replace(iota_amb=(-1.0, 0.0, 0.0))

    def test_frozen(self):
        with pytest.raises(Exception):
            ParameterVector().theta_p = 1.0  # type: ignore[misc]

    def test_eye_yaws_split_vergence(self):
        p = ParameterVector.create(theta_y=0.1, theta_v=0.04)
        left, right = p.eye_yaws
        assert left == pytest.approx(0.12)
        assert right == pytest.approx(0.08)
        assert left - right == pytest.approx(p.theta_v)

    def test_differing_fields(self):
        a = ParameterVector()
        b = a.replace(theta_p=0.1, theta_lid=0.1)
        assert a.differing_fields(b) == ["theta_p", "theta_lid"]


class TestMasks:
    def test_none_is_everything(self):
        np.testing.assert_array_equal(mask_indices(None), np.arange(PARAM_COUNT))

    def test_video_mask_excludes_identity(self):
        idx = mask_indices(VIDEO_MASK)
        assert FIELD_SLICES["beta_face"].start not in idx
        assert FIELD_SLICES["theta_lid"].start in idx
        assert len(idx) == 3 + 3 + 1 + 4

    def test_unknown_field(self):
        with pytest.raises(InvalidParameters):
            mask_indices(["theta_q"])

    def test_empty_mask(self):
        with pytest.raises(InvalidParameters):
            mask_indices([])

    def test_bounds_contain_defaults(self):
        x = ParameterVector().to_array()
        assert np.all(x >= LOWER_BOUNDS)
        assert np.all(x <= UPPER_BOUNDS)


class TestRecords:
    def make_energy(self, **kw):
        values = dict(e_img=1.0, e_ldmks=0.5, e_stats=0.25, e_pose=0.25, foreground=10)
        values.update(kw)
        return EnergyBreakdown(**values)

    def test_total_is_sum(self):
        e = self.make_energy()
        assert e.total == pytest.approx(2.0)
        assert e.data == pytest.approx(1.5)
        assert e.summary()["total"] == pytest.approx(2.0)

    def test_negative_term_rejected(self):
        with pytest.raises(Exception):
            self.make_energy(e_img=-1.0)

    def test_trace_best_and_records(self):
        p = ParameterVector()
        trace = FitTrace(
            entries=[
                TraceEntry(iteration=0, energy=self.make_energy(), params=p),
                TraceEntry(iteration=1, energy=self.make_energy(e_img=0.1), params=p, eta=1.0),
            ]
        )
        assert trace.iterations == 1
        assert trace.best().iteration == 1
        rows = trace.to_records(frame=3)
        assert rows[1]["frame"] == 3
        assert rows[1]["total"] == pytest.approx(1.1)

    def test_request_needs_exactly_one_form(self):
        with pytest.raises(Exception):
            RedirectRequest()
        with pytest.raises(Exception):
            RedirectRequest(target=(0.0, 0.0, 0.0), pitch=0.0, yaw=0.0, vergence=0.0)
        with pytest.raises(Exception):
            RedirectRequest(pitch=0.1)
        assert RedirectRequest.at(0.0, 0.0, 0.0).target == (0.0, 0.0, 0.0)
        assert RedirectRequest.angles(0.1, 0.2).vergence == 0.0
