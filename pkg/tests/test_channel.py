import numpy as np
import pytest

import spincat.channel as channel_mod
from spincat.channel import (
    ChannelParams,
    apply_channel_density,
    channel_wigner_convolution,
    channel_wigner_quadrature,
    gaussian_measure_nodes,
    required_mode1_growth,
)
from spincat.fockspace import FockCutoff
from spincat.states import CatParams, cat_state, density_from_vector
from spincat.wigner import PhasePoint, wigner_closed_half, wigner_gaussian_general, wigner_kernel_trace

RNG = np.random.default_rng(99)

HALF_CAT = CatParams(0.5, np.pi, 0.0, 0.0, 2 * np.pi)


def random_point(radius=2.0):
    r = radius * np.sqrt(RNG.uniform(size=2))
    ang = RNG.uniform(0, 2 * np.pi, 2)
    return PhasePoint(complex(r[0] * np.exp(1j * ang[0])), complex(r[1] * np.exp(1j * ang[1])))


def random_params(j):
    return CatParams(j, RNG.uniform(0.05, np.pi - 0.05), RNG.uniform(0.05, np.pi - 0.05),
                     RNG.uniform(0, 2 * np.pi), RNG.uniform(0, 2 * np.pi))


class TestChannelParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            ChannelParams(0.0)
        with pytest.raises(ValueError):
            ChannelParams(-1.0)
        with pytest.raises(ValueError):
            ChannelParams(1.0, quad_order=4)
        with pytest.raises(ValueError):
            ChannelParams(1.0, quad_radius_sigmas=0.0)


class TestMeasureNodes:
    def test_plain_weights_integrate_one(self):
        for s in (0.5, 1.0, 2.0):
            _, ws = gaussian_measure_nodes(s, 24)
            assert abs(ws.sum() - 1.0) < 1e-12

    def test_tuned_nodes_integrate_gaussian_exactly(self):
        # integral exp(-2|z - c|^2) dmu_s(z) = exp(-2|c|^2/(2s+1)) / (2s+1)
        s, c = 1.3, 0.7 - 0.4j
        zs, ws = gaussian_measure_nodes(s, 24, envelope=2.0)
        val = np.sum(ws * np.exp(-2 * np.abs(zs - c) ** 2))
        expected = np.exp(-2 * abs(c) ** 2 / (2 * s + 1)) / (2 * s + 1)
        assert val == pytest.approx(expected, rel=1e-12)

    def test_mean_square_displacement(self):
        _, ws = gaussian_measure_nodes(1.7, 32)
        zs, _ = gaussian_measure_nodes(1.7, 32)
        assert np.sum(ws * np.abs(zs) ** 2) == pytest.approx(1.7, rel=1e-10)


class TestApplyChannelDensity:
    def test_identity_limit(self):
        rho = density_from_vector(cat_state(HALF_CAT))
        out = apply_channel_density(rho, ChannelParams(1e-6))
        d1 = rho.cutoff.dim1
        diff = np.abs(out.as_modes()[:d1, :, :d1, :] - rho.as_modes()).max()
        assert diff < 1e-5

    def test_vacuum_mean_photon_number(self):
        # random displacement of the vacuum: <n1> = E|z|^2 = s
        cut = FockCutoff(0, 0)
        from spincat.fockspace import DensityMatrix

        vac = DensityMatrix(cut, np.array([[1.0 + 0j]]))
        s = 1.0
        out = apply_channel_density(vac, ChannelParams(s))
        n1 = np.arange(out.cutoff.dim1)
        mean_n = np.real(np.einsum("a,axax->", n1.astype(float), out.as_modes()))
        assert mean_n == pytest.approx(s, abs=1e-4)

    def test_mean_displacement_derivation_by_monte_carlo(self):
        # E|z|^2 under exp(-|z|^2/s) d^2z/(pi s) is s: verified by sampling
        s, n_samples = 1.0, 100_000
        rng = np.random.default_rng(7)
        z = rng.normal(scale=np.sqrt(s / 2), size=(n_samples, 2))
        est = np.mean(z[:, 0] ** 2 + z[:, 1] ** 2)
        stderr = s / np.sqrt(n_samples)
        assert abs(est - s) < 5 * stderr

    def test_trace_preserved(self):
        rho = density_from_vector(cat_state(random_params(1.0)))
        out = apply_channel_density(rho, ChannelParams(1.5))
        assert abs(np.real(out.entries.trace()) - 1.0) < 1e-12
        assert out.tail_defect < 1e-8

    def test_purity_strictly_decreases(self):
        rho = density_from_vector(cat_state(HALF_CAT))
        for s in (1e-6, 0.5, 2.0):
            out = apply_channel_density(rho, ChannelParams(s))
            assert out.purity() < rho.purity() - 1e-10

    def test_two_order_convergence(self):
        rho = density_from_vector(cat_state(HALF_CAT))
        a = apply_channel_density(rho, ChannelParams(1.0, quad_order=24))
        b = apply_channel_density(rho, ChannelParams(1.0, quad_order=32))
        d1 = min(a.cutoff.dim1, b.cutoff.dim1)
        assert np.abs(a.as_modes()[:d1, :, :d1, :] - b.as_modes()[:d1, :, :d1, :]).max() < 1e-8

    def test_semigroup_property(self):
        for _ in range(5):
            s1, s2 = RNG.uniform(0.2, 0.6, 2)
            rho = density_from_vector(cat_state(random_params(0.5)))
            two_step = apply_channel_density(
                apply_channel_density(rho, ChannelParams(s1)), ChannelParams(s2)
            )
            one_step = apply_channel_density(rho, ChannelParams(s1 + s2))
            d1 = min(two_step.cutoff.dim1, one_step.cutoff.dim1)
            diff = np.abs(
                two_step.as_modes()[:d1, :, :d1, :] - one_step.as_modes()[:d1, :, :d1, :]
            ).max()
            assert diff < 1e-6

    def test_inadequate_cutoff_aborts(self, monkeypatch):
        monkeypatch.setattr(channel_mod, "required_mode1_growth", lambda s, tail=0: 1)
        rho = density_from_vector(cat_state(HALF_CAT))
        with pytest.raises(ValueError, match="trace drift"):
            apply_channel_density(rho, ChannelParams(2.0))

    def test_growth_rule_monotone_in_s(self):
        assert required_mode1_growth(2.0) > required_mode1_growth(0.5)

    def test_both_modes_flag(self):
        rho = density_from_vector(cat_state(HALF_CAT))
        out = apply_channel_density(rho, ChannelParams(0.8), both_modes=True)
        # both cutoffs grow, the state mixes more than mode-1-only noise
        assert out.cutoff.n2_max > rho.cutoff.n2_max
        mode1_only = apply_channel_density(rho, ChannelParams(0.8))
        assert out.purity() < mode1_only.purity()
        # mode-2 marginal picks up the noise photons: <n2> = <n2>_in + s
        n2 = np.arange(out.cutoff.dim2, dtype=float)
        mean_n2 = np.real(np.einsum("y,ayay->", n2, out.as_modes()))
        in_n2 = np.real(np.einsum(
            "y,ayay->", np.arange(rho.cutoff.dim2, dtype=float), rho.as_modes()
        ))
        assert mean_n2 == pytest.approx(in_n2 + 0.8, abs=1e-4)


class TestWignerRoutes:
    def test_identity_limit_of_convolution(self):
        ch = ChannelParams(1e-6)
        for _ in range(5):
            pt = random_point()
            assert channel_wigner_convolution(HALF_CAT, ch, pt) == pytest.approx(
                wigner_closed_half(HALF_CAT, pt), abs=1e-5
            )

    def test_convolution_matches_kraus_route(self):
        ch = ChannelParams(1.0)
        rho = apply_channel_density(density_from_vector(cat_state(HALF_CAT)), ch)
        for _ in range(5):
            pt = random_point()
            assert channel_wigner_convolution(HALF_CAT, ch, pt) == pytest.approx(
                wigner_kernel_trace(rho, pt), abs=1e-5
            )

    def test_quadrature_agrees_with_convolution(self):
        for _ in range(20):
            s = float(RNG.choice([0.5, 1.0, 2.0]))
            j = float(RNG.choice([0.5, 1.0]))
            params = random_params(j)
            ch = ChannelParams(s)
            pt = random_point()
            assert channel_wigner_quadrature(params, ch, pt) == pytest.approx(
                channel_wigner_convolution(params, ch, pt), abs=1e-6
            )

    def test_gaussian_form_routes_agree(self):
        for _ in range(20):
            s = float(RNG.choice([0.5, 1.0, 2.0]))
            params = random_params(float(RNG.choice([0.5, 1.0])))
            ch = ChannelParams(s)
            pt = random_point()
            ana = channel_wigner_convolution(params, ch, pt, form="gaussian")
            quad = channel_wigner_quadrature(params, ch, pt, form="gaussian")
            assert ana == pytest.approx(quad, abs=1e-6)

    def test_gaussian_form_identity_limit(self):
        ch = ChannelParams(1e-6)
        p = random_params(1.0)
        for _ in range(5):
            pt = random_point()
            assert channel_wigner_convolution(p, ch, pt, form="gaussian") == pytest.approx(
                wigner_gaussian_general(p, pt), abs=1e-5
            )

    def test_unknown_form_rejected(self):
        with pytest.raises(ValueError):
            channel_wigner_convolution(HALF_CAT, ChannelParams(1.0), PhasePoint(0j, 0j),
                                       form="nope")

    def test_flattening_monotone_in_noise(self):
        qs = np.linspace(-4, 4, 21)
        for form in ("closed", "gaussian"):
            prev = None
            for s in (0.5, 1.0, 2.0, 4.0):
                ch = ChannelParams(s)
                mx = max(
                    channel_wigner_convolution(
                        HALF_CAT, ch, PhasePoint(q / np.sqrt(2) + 0j, 0j), form=form
                    ) ** 2
                    for q in qs
                )
                assert prev is None or mx <= prev + 1e-12
                prev = mx

    def test_budget_strictly_mixed_after_noise(self):
        from spincat.skewinfo import SkewEvaluator

        ch = ChannelParams(1.0)
        rho = apply_channel_density(density_from_vector(cat_state(HALF_CAT)), ch)
        engine = SkewEvaluator(rho)
        for _ in range(5):
            w, _, skew = engine.values(random_point())
            assert skew + w * w <= 1.0 + 1e-8
            assert skew + w * w < 1.0 - 1e-6
