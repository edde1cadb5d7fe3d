import io
import json

import numpy as np
import pytest

from spincat.channel import ChannelParams
from spincat.grids import RECORD_COLUMNS, GridSpec
from spincat.states import CatParams
from spincat.sweep import (
    evaluate_grid,
    preset_names,
    read_csv,
    run_preset,
    serialize_csv,
    serialize_json,
)
from spincat.wigner import PhasePoint, WignerConvention, wigner_closed_half, wigner_gaussian_half

HALF_CAT = CatParams(0.5, np.pi, 0.0, 0.0, 2 * np.pi)


class TestGridSpec:
    def test_rejects_no_axes(self):
        with pytest.raises(ValueError):
            GridSpec(axes=())

    def test_rejects_three_axes(self):
        with pytest.raises(ValueError):
            GridSpec(axes=(("q1", 0, 1, 3), ("q2", 0, 1, 3), ("p1", 0, 1, 3)))

    def test_rejects_bad_bounds(self):
        with pytest.raises(ValueError):
            GridSpec(axes=(("q1", 1.0, 0.0, 5),))

    def test_rejects_single_count_with_span(self):
        with pytest.raises(ValueError):
            GridSpec(axes=(("q1", 0.0, 1.0, 1),))

    def test_allows_degenerate_single_point(self):
        g = GridSpec(axes=(("q1", 0.5, 0.5, 1),))
        assert g.n_points == 1
        assert g.coordinates()[0] == pytest.approx([0.5, 0, 0, 0])

    def test_rejects_unknown_axis(self):
        with pytest.raises(ValueError):
            GridSpec(axes=(("q3", 0, 1, 5),))

    def test_rejects_duplicate_axis(self):
        with pytest.raises(ValueError):
            GridSpec(axes=(("q1", 0, 1, 5), ("q1", 0, 1, 5)))

    def test_rejects_swept_and_fixed(self):
        with pytest.raises(ValueError):
            GridSpec(axes=(("q1", 0, 1, 5),), fixed={"q1": 0.0})

    def test_row_major_coordinates(self):
        g = GridSpec(axes=(("q1", 0.0, 1.0, 2), ("p2", 0.0, 1.0, 2)), fixed={"q2": 0.3})
        coords = g.coordinates()
        assert coords[:, 0] == pytest.approx([0, 0, 1, 1])
        assert coords[:, 3] == pytest.approx([0, 1, 0, 1])
        assert coords[:, 2] == pytest.approx([0.3] * 4)
        assert coords[:, 1] == pytest.approx([0.0] * 4)


class TestEvaluateGrid:
    def test_record_count_and_budget_identity(self):
        grid = GridSpec(axes=(("q1", -1.0, 1.0, 5), ("q2", -1.0, 1.0, 5)))
        res = evaluate_grid(HALF_CAT, grid)
        assert res.records.shape == (25, 8)
        assert np.allclose(res.column("budget"), 1.0, atol=1e-8)
        assert np.allclose(res.column("W2"), res.column("W") ** 2, atol=1e-14)

    def test_single_point_matches_point_operation(self):
        grid = GridSpec(axes=(("q1", 0.5, 0.5, 1),), fixed={"q2": 0.5})
        res = evaluate_grid(HALF_CAT, grid)
        pt = PhasePoint.from_quadratures(0.5, 0, 0.5, 0)
        assert res.column("W")[0] == pytest.approx(wigner_closed_half(HALF_CAT, pt), abs=1e-12)

    def test_kernel_evaluator_agrees_with_closed(self):
        grid = GridSpec(axes=(("q1", -1.0, 1.0, 3), ("q2", -1.0, 1.0, 3)))
        a = evaluate_grid(HALF_CAT, grid, evaluator="closed")
        b = evaluate_grid(HALF_CAT, grid, evaluator="kernel")
        assert np.abs(a.column("W") - b.column("W")).max() < 1e-8

    def test_gaussian_evaluator_uses_surrogate_w_and_true_skew(self):
        grid = GridSpec(axes=(("q1", 0.9, 0.9, 1),), fixed={"q2": 0.4})
        res = evaluate_grid(HALF_CAT, grid, evaluator="gaussian")
        pt = PhasePoint.from_quadratures(0.9, 0, 0.4, 0)
        assert res.column("W")[0] == pytest.approx(wigner_gaussian_half(HALF_CAT, pt), abs=1e-12)
        w_true = wigner_closed_half(HALF_CAT, pt)
        assert res.column("I")[0] == pytest.approx(1.0 - w_true**2, abs=1e-8)

    def test_channel_budget_below_one(self):
        grid = GridSpec(axes=(("q1", -1.0, 1.0, 5),))
        res = evaluate_grid(HALF_CAT, grid, channel=ChannelParams(1.0))
        assert (res.column("budget") <= 1.0 + 1e-8).all()
        assert res.meta["channel"]["s"] == 1.0

    def test_density_convention_column(self):
        grid = GridSpec(axes=(("q1", 0.5, 0.5, 1),))
        km = evaluate_grid(HALF_CAT, grid, conv=WignerConvention.KERNEL_MEAN)
        dens = evaluate_grid(HALF_CAT, grid, conv=WignerConvention.DENSITY)
        assert dens.column("W")[0] == pytest.approx(km.column("W")[0] / np.pi**2, rel=1e-12)

    def test_unknown_evaluator_rejected(self):
        grid = GridSpec(axes=(("q1", 0.0, 1.0, 2),))
        with pytest.raises(ValueError):
            evaluate_grid(HALF_CAT, grid, evaluator="magic")

    def test_threads_env_does_not_change_output(self, monkeypatch):
        grid = GridSpec(axes=(("q1", -2.0, 2.0, 21), ("q2", -2.0, 2.0, 21)))
        monkeypatch.setenv("SPINCAT_THREADS", "1")
        a = evaluate_grid(HALF_CAT, grid)
        monkeypatch.setenv("SPINCAT_THREADS", "4")
        b = evaluate_grid(HALF_CAT, grid)
        assert np.array_equal(a.records, b.records)


class TestSerialization:
    def test_csv_layout(self):
        res = evaluate_grid(HALF_CAT, GridSpec(axes=(("q1", -1.0, 1.0, 3),)))
        buf = io.StringIO()
        serialize_csv(res, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0].startswith("# meta: ")
        assert lines[1] == ",".join(RECORD_COLUMNS)
        assert len(lines) == 2 + 3

    def test_csv_numbers_have_17_significant_digits(self):
        res = evaluate_grid(HALF_CAT, GridSpec(axes=(("q1", 1 / 3, 1 / 3, 1),)))
        buf = io.StringIO()
        serialize_csv(res, buf)
        row = buf.getvalue().splitlines()[2].split(",")
        assert row[0] == f"{1/3:.17g}"

    def test_negative_zero_normalized(self):
        from spincat.sweep import _fmt

        assert _fmt(-0.0) == "0"
        assert _fmt(0.0) == "0"

    def test_csv_roundtrip_and_budget_identity(self, tmp_path):
        res = evaluate_grid(HALF_CAT, GridSpec(axes=(("q1", -2.0, 2.0, 11),)))
        path = tmp_path / "out.csv"
        serialize_csv(res, path)
        meta, rows = read_csv(path)
        assert meta == json.loads(json.dumps(res.meta))
        cols = {name: rows[:, i] for i, name in enumerate(RECORD_COLUMNS)}
        assert np.abs(cols["budget"] - (cols["I"] + cols["W2"])).max() < 1e-15

    def test_csv_deterministic(self):
        bufs = []
        for _ in range(2):
            buf = io.StringIO()
            serialize_csv(evaluate_grid(HALF_CAT, GridSpec(axes=(("q1", -1, 1, 9),))), buf)
            bufs.append(buf.getvalue())
        assert bufs[0] == bufs[1]

    def test_json_mirrors_csv(self, tmp_path):
        res = evaluate_grid(HALF_CAT, GridSpec(axes=(("q1", -1.0, 1.0, 3),)))
        path = tmp_path / "out.json"
        serialize_json(res, path)
        payload = json.loads(path.read_text())
        assert payload["meta"] == json.loads(json.dumps(res.meta))
        assert len(payload["records"]) == 3
        assert set(payload["records"][0]) == set(RECORD_COLUMNS)
        assert payload["records"][1]["W"] == pytest.approx(res.column("W")[1], rel=1e-15)


class TestPresets:
    def test_registry_contents(self):
        names = preset_names()
        for expected in ("fig1a", "fig1h", "fig2-q1", "fig3a", "fig4-q1", "fig5a",
                         "fig5e", "origin-check"):
            assert expected in names

    def test_unknown_preset(self):
        with pytest.raises(ValueError):
            run_preset("fig99")

    def test_fig1a_grid_shape(self):
        res = run_preset("fig1a")
        assert len(res.records) == 101 * 101
        assert res.meta["preset"] == "fig1a"
        assert res.meta["params"]["theta1"] == pytest.approx(np.pi)
        assert res.meta["params"]["phi2"] == pytest.approx(2 * np.pi)

    def test_fig2_slice_with_spin_override(self):
        res = run_preset("fig2-q1", j=0.5)
        assert len(res.records) == 201
        assert res.meta["params"]["j"] == 0.5
        coords = res.column("q1")
        assert coords[0] == -10.0 and coords[-1] == 10.0

    def test_origin_check_single_record(self):
        res = run_preset("origin-check")
        assert len(res.records) == 1
        pt = PhasePoint(0j, 0j)
        assert res.column("W")[0] == pytest.approx(wigner_closed_half(HALF_CAT, pt), abs=1e-12)
        assert res.column("budget")[0] == pytest.approx(1.0, abs=1e-10)

    def test_fig5_overrides(self):
        res = run_preset("fig5e", j=0.5, s=2.0)
        assert res.meta["channel"]["s"] == 2.0
        assert res.meta["params"]["j"] == 0.5

    def test_fig1a_csv_loads_in_external_tool_with_expected_surface(self, tmp_path):
        pd = pytest.importorskip("pandas")
        path = tmp_path / "fig1a.csv"
        serialize_csv(run_preset("fig1a"), path)
        df = pd.read_csv(path, comment="#")
        assert list(df.columns) == list(RECORD_COLUMNS)
        assert len(df) == 10201
        # exact kernel-mean surface: W^2 in [0, 1], peak value 1 at the
        # origin, even under (q1, q2) -> (-q1, -q2)
        assert df.W2.between(-1e-12, 1 + 1e-9).all()
        origin = df[(df.q1 == 0) & (df.q2 == 0)]
        assert origin.W2.iloc[0] == pytest.approx(1.0, abs=1e-10)
        flipped = df.sort_values(["q1", "q2"]).W2.to_numpy()
        assert np.abs(flipped - flipped[::-1]).max() < 1e-10

        # the Gaussian-branch surface carries the plotted asymmetry: its
        # peak sits in the positive quadrant
        path_g = tmp_path / "fig1a_gaussian.csv"
        serialize_csv(run_preset("fig1a", evaluator="gaussian"), path_g)
        dg = pd.read_csv(path_g, comment="#")
        peak = dg.loc[dg.W2.idxmax()]
        assert peak.q1 > 0 and peak.q2 > 0
