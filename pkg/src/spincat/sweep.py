"""Grid sweeps, figure-regime presets, and deterministic CSV/JSON output.

A sweep evaluates one configured cat state (optionally behind the noise
channel) over a GridSpec and emits one record per point:

    q1, p1, q2, p2, W, W2, I, budget

W is the Wigner value in the requested convention, I the skew information of
the underlying state, budget = I + W^2.  For pure states evaluated in
kernel-mean convention the budget column is identically 1; after the channel
it stays below 1.  With the "gaussian" evaluator, W comes from the
Gaussian-branch surrogate while I still belongs to the true state, so the
budget column is diagnostic only.

CSV output is bit-deterministic: a single '# meta: {json}' comment line with
sorted keys, a fixed header, and numbers rendered with 17 significant digits.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import __version__
from .channel import ChannelParams, apply_channel_density, channel_wigner_convolution
from .grids import RECORD_COLUMNS, GridSpec, SweepResult
from .skewinfo import SkewEvaluator, pure_point_values
from .states import CatParams, cat_state, density_from_vector
from .wigner import (
    PhasePoint,
    WignerConvention,
    wigner_closed_general,
    wigner_closed_half,
    wigner_gaussian_general,
    wigner_gaussian_half,
    wigner_kernel_trace,
)

__all__ = [
    "EVALUATORS",
    "evaluate_grid",
    "run_preset",
    "preset_names",
    "serialize_csv",
    "serialize_json",
    "read_csv",
]

EVALUATORS = ("closed", "kernel", "gaussian")
THREADS_ENV = "SPINCAT_THREADS"


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        requested = int(raw)
    except ValueError:
        requested = 0
    if requested <= 0:
        return min(4, os.cpu_count() or 1)
    return min(requested, os.cpu_count() or 1)


def _closed_point(params: CatParams, pt: PhasePoint, conv: WignerConvention) -> float:
    if params.twoj == 1:
        return wigner_closed_half(params, pt, conv)
    return wigner_closed_general(params, pt, conv)


def _gaussian_point(params: CatParams, pt: PhasePoint, conv: WignerConvention) -> float:
    if params.twoj == 1:
        return wigner_gaussian_half(params, pt, conv)
    return wigner_gaussian_general(params, pt, conv)


def _map_points(fn: Callable[[int], None], n: int) -> None:
    """Apply fn to every point index; output arrays are written by index, so
    results are identical for any worker count."""
    workers = _worker_count()
    if workers <= 1 or n < 64:
        for i in range(n):
            fn(i)
        return
    chunk = max(32, n // (workers * 8))

    def run_chunk(start: int) -> None:
        for i in range(start, min(start + chunk, n)):
            fn(i)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(run_chunk, range(0, n, chunk)))


def evaluate_grid(params: CatParams, grid: GridSpec, evaluator: str = "closed",
                  conv: WignerConvention = WignerConvention.KERNEL_MEAN,
                  channel: ChannelParams | None = None,
                  audit_seed: int = 0, meta_extra: dict | None = None) -> SweepResult:
    """Evaluate W and skew information over a grid; see module docstring."""
    if evaluator not in EVALUATORS:
        raise ValueError(f"unknown evaluator {evaluator!r}; expected one of {EVALUATORS}")
    coords = grid.coordinates()
    n = len(coords)
    points = [PhasePoint.from_quadratures(*row) for row in coords]
    w = np.zeros(n)
    skew = np.zeros(n)

    psi = cat_state(params)
    if channel is None:
        kernel_mean = np.zeros(n)

        if evaluator == "kernel":
            rho = density_from_vector(psi)

            def eval_point(i: int) -> None:
                kernel_mean[i] = wigner_kernel_trace(rho, points[i])
                w[i] = conv.factor * kernel_mean[i]
        elif evaluator == "closed":

            def eval_point(i: int) -> None:
                kernel_mean[i] = _closed_point(params, points[i], WignerConvention.KERNEL_MEAN)
                w[i] = conv.factor * kernel_mean[i]
        else:

            def eval_point(i: int) -> None:
                kernel_mean[i] = _closed_point(params, points[i], WignerConvention.KERNEL_MEAN)
                w[i] = _gaussian_point(params, points[i], conv)

        _map_points(eval_point, n)
        skew[:] = 1.0 - kernel_mean**2
        # spot-audit the pure-state fast path against the commutator route
        rng = np.random.default_rng(audit_seed)
        for i in rng.choice(n, size=min(5, n), replace=False):
            w_ref, skew_ref = pure_point_values(psi, points[i])
            if abs(skew_ref - skew[i]) > 1e-7 or abs(w_ref - kernel_mean[i]) > 1e-7:
                raise RuntimeError(
                    f"pure-state audit failed at {points[i]}: fast (W={kernel_mean[i]}, "
                    f"I={skew[i]}) vs commutator (W={w_ref}, I={skew_ref})"
                )
        cutoff_used = psi.cutoff
    else:
        rho = apply_channel_density(density_from_vector(psi), channel)
        engine = SkewEvaluator(rho)

        def eval_point(i: int) -> None:
            pt = points[i]
            _, _, skew[i] = engine.values(pt)
            if evaluator == "kernel":
                w[i] = wigner_kernel_trace(rho, pt, conv)
            elif evaluator == "closed":
                w[i] = channel_wigner_convolution(params, channel, pt, conv, form="closed")
            else:
                w[i] = channel_wigner_convolution(params, channel, pt, conv, form="gaussian")

        _map_points(eval_point, n)
        cutoff_used = rho.cutoff

    records = np.column_stack([coords, w, w**2, skew, skew + w**2])
    meta = {
        "spincat_version": __version__,
        "evaluator": evaluator,
        "convention": conv.value,
        "params": {
            "j": params.j,
            "theta1": params.theta1,
            "theta2": params.theta2,
            "phi1": params.phi1,
            "phi2": params.phi2,
        },
        "channel": None
        if channel is None
        else {
            "s": channel.s,
            "quad_order": channel.quad_order,
            "quad_radius_sigmas": channel.quad_radius_sigmas,
        },
        "grid": {
            "axes": [list(ax) for ax in grid.axes],
            "fixed": dict(sorted(grid.fixed.items())),
        },
        "cutoff": {"n1_max": cutoff_used.n1_max, "n2_max": cutoff_used.n2_max},
    }
    if meta_extra:
        meta.update(meta_extra)
    return SweepResult(meta=meta, records=records)


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

_HALF_CAT = dict(theta1=np.pi, theta2=0.0, phi1=0.0, phi2=2 * np.pi)
_GENERAL_CAT = dict(theta1=np.pi / 3, theta2=np.pi / 2, phi1=0.0, phi2=2 * np.pi)

_SLICES = {
    "a": ("q1", "q2"),
    "b": ("p1", "p2"),
    "c": ("q1", "p2"),
    "d": ("p1", "q2"),
}


@dataclass(frozen=True)
class _Preset:
    description: str
    build: Callable[[float | None, float | None], tuple[CatParams, ChannelParams | None, GridSpec]]
    default_j: float | None = None
    default_s: float | None = None


def _grid2(ax1: str, ax2: str, lo: float, hi: float, count: int) -> GridSpec:
    return GridSpec(axes=((ax1, lo, hi, count), (ax2, lo, hi, count)))


def _grid1(ax: str, lo: float, hi: float, count: int) -> GridSpec:
    return GridSpec(axes=((ax, lo, hi, count),))


def _build_presets() -> dict[str, _Preset]:
    presets: dict[str, _Preset] = {}

    def half_params(_j):
        return CatParams(j=0.5, **_HALF_CAT)

    def general_params(j):
        return CatParams(j=j, **_GENERAL_CAT)

    # fig1: spin-1/2 cat surfaces over the four quadrature-pair slices;
    # panels e-h plot the skew column of the same grids as a-d.
    for panel, twin in zip("abcd", "efgh"):
        ax1, ax2 = _SLICES[panel]
        def build(j=None, s=None, ax1=ax1, ax2=ax2):
            return half_params(j), None, _grid2(ax1, ax2, -2.0, 2.0, 101)
        p = _Preset(f"spin-1/2 cat, {ax1}-{ax2} plane in [-2,2]^2, others 0", build)
        presets[f"fig1{panel}"] = p
        presets[f"fig1{twin}"] = _Preset(p.description + " (skew panel)", build)

    # fig2: general-spin cat, 201-point slices over [-10, 10]; j selectable.
    for ax in ("q1", "p1", "q2", "p2"):
        def build(j=None, s=None, ax=ax):
            jv = 0.5 if j is None else j
            return general_params(jv), None, _grid1(ax, -10.0, 10.0, 201)
        presets[f"fig2-{ax}"] = _Preset(
            f"spin-j cat (theta = pi/3, pi/2), {ax} slice over [-10,10]",
            build, default_j=0.5,
        )

    # fig3: fig1 slices behind the noise channel, s selectable (default 1).
    for panel, twin in zip("abcd", "efgh"):
        ax1, ax2 = _SLICES[panel]
        def build(j=None, s=None, ax1=ax1, ax2=ax2):
            sv = 1.0 if s is None else s
            return half_params(j), ChannelParams(sv), _grid2(ax1, ax2, -2.0, 2.0, 101)
        p = _Preset(
            f"spin-1/2 cat after noise (s default 1), {ax1}-{ax2} plane", build,
            default_s=1.0,
        )
        presets[f"fig3{panel}"] = p
        presets[f"fig3{twin}"] = _Preset(p.description + " (skew panel)", build)

    # fig4: noise-strength study on 1-D slices, s selectable.
    for ax in ("q1", "p1", "q2", "p2"):
        def build(j=None, s=None, ax=ax):
            sv = 1.0 if s is None else s
            return half_params(j), ChannelParams(sv), _grid1(ax, -4.0, 4.0, 201)
        presets[f"fig4-{ax}"] = _Preset(
            f"spin-1/2 cat after noise, {ax} slice over [-4,4], s selectable",
            build, default_s=1.0,
        )

    # fig5: general-spin cat behind the channel; a-d at s=1, e-h at s=2.
    for panels, s_val in (("abcd", 1.0), ("efgh", 2.0)):
        for panel, ax in zip(panels, ("q1", "p1", "q2", "p2")):
            def build(j=None, s=None, ax=ax, s_val=s_val):
                jv = 1.0 if j is None else j
                sv = s_val if s is None else s
                return general_params(jv), ChannelParams(sv), _grid1(ax, -10.0, 10.0, 201)
            presets[f"fig5{panel}"] = _Preset(
                f"spin-j cat after noise (s = {s_val}), {ax} slice over [-10,10]",
                build, default_j=1.0, default_s=s_val,
            )

    def origin(j=None, s=None):
        return half_params(j), None, GridSpec(axes=(("q1", 0.0, 0.0, 1),))

    presets["origin-check"] = _Preset("single point at the phase-space origin", origin)
    return presets


PRESETS = _build_presets()


def preset_names() -> list[str]:
    return sorted(PRESETS)


def run_preset(name: str, j: float | None = None, s: float | None = None,
               evaluator: str = "closed",
               conv: WignerConvention = WignerConvention.KERNEL_MEAN) -> SweepResult:
    """Run a named preset; fig2/fig5 accept a spin override, fig3/fig4/fig5 a
    noise override.  Output is deterministic for a fixed configuration."""
    try:
        preset = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; known: {', '.join(preset_names())}")
    params, channel, grid = preset.build(j, s)
    return evaluate_grid(
        params, grid, evaluator=evaluator, conv=conv, channel=channel,
        meta_extra={"preset": name, "description": preset.description},
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _fmt(v: float) -> str:
    if v == 0.0:
        v = 0.0  # normalize -0.0
    return f"{v:.17g}"


def serialize_csv(result: SweepResult, destination) -> None:
    """Write '# meta: {json}', a fixed header, and one row per record with 17
    significant digits.  ``destination`` is a path or a text file object."""
    own = isinstance(destination, (str, os.PathLike))
    f = open(destination, "w", encoding="utf-8", newline="\n") if own else destination
    try:
        f.write("# meta: " + json.dumps(result.meta, sort_keys=True) + "\n")
        f.write(",".join(RECORD_COLUMNS) + "\n")
        for row in result.records:
            f.write(",".join(_fmt(v) for v in row) + "\n")
    finally:
        if own:
            f.close()


def serialize_json(result: SweepResult, destination) -> None:
    """JSON mirror of the CSV: a meta object plus a records array with the
    same field names as the CSV header."""
    payload = {
        "meta": result.meta,
        "records": [dict(zip(RECORD_COLUMNS, map(float, row))) for row in result.records],
    }
    own = isinstance(destination, (str, os.PathLike))
    f = open(destination, "w", encoding="utf-8", newline="\n") if own else destination
    try:
        json.dump(payload, f, sort_keys=True)
        f.write("\n")
    finally:
        if own:
            f.close()


def read_csv(source) -> tuple[dict, np.ndarray]:
    """Parse a sweep CSV back into (meta, records)."""
    own = isinstance(source, (str, os.PathLike))
    f = open(source, "r", encoding="utf-8") if own else source
    try:
        meta = {}
        header = None
        rows = []
        for line in f:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("# meta:"):
                    meta = json.loads(line[len("# meta:"):])
                continue
            if header is None:
                header = line.split(",")
                if tuple(header) != RECORD_COLUMNS:
                    raise ValueError(f"unexpected CSV header {header}")
                continue
            rows.append([float(v) for v in line.split(",")])
        return meta, np.array(rows)
    finally:
        if own:
            f.close()
