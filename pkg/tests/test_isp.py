from pathlib import Path

import numpy as np
import pytest

from fixtures import golden_mosaic_8x8, mosaic_6x6
from reference_impls import bilinear_reference, malvar_reference

from rgbwforge.core import PHASE_GRIDS, BayerImage, ImagePlane, RgbImage
from rgbwforge.errors import ConfigError
from rgbwforge.isp import (
    IspConfig,
    apply_ccm,
    apply_gamma,
    black_level_correct,
    demosaic,
    run_isp,
    white_balance,
)

GOLDEN_DIR = Path(__file__).parent / "golden"


def _bayer(data, phase="RGGB", black=0.0, white=1.0):
    return BayerImage(ImagePlane(data), phase, black, white)


class TestIspConfig:
    def test_default_is_valid(self):
        cfg = IspConfig()
        assert cfg.gamma == "srgb"
        assert cfg.demosaic_method == "malvar"

    def test_rejects_bad_ccm_rows(self):
        with pytest.raises(ConfigError):
            IspConfig(ccm=((1.0, 0.1, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)))

    def test_rejects_bad_gains(self):
        with pytest.raises(ConfigError):
            IspConfig(wb_gains=(0.0, 1.0, 1.0))

    def test_rejects_bad_gamma_and_method(self):
        with pytest.raises(ConfigError):
            IspConfig(gamma="rec709")
        with pytest.raises(ConfigError):
            IspConfig(gamma=-2.2)
        with pytest.raises(ConfigError):
            IspConfig(demosaic_method="ahd")


class TestBlackLevelCorrect:
    def test_black_and_white_points(self):
        codes = np.full((2, 2), 64.0)
        codes[1, 1] = 1023.0
        out = black_level_correct(_bayer(codes, black=64, white=1023))
        assert out.plane.data[0, 0] == 0.0
        assert out.plane.data[1, 1] == 1.0
        assert out.black_level == 0.0 and out.white_level == 1.0

    def test_idempotent_on_normalized(self):
        rng = np.random.default_rng(0)
        bayer = _bayer(rng.random((4, 4)))
        once = black_level_correct(bayer)
        twice = black_level_correct(once)
        assert np.array_equal(once.plane.data, bayer.plane.data)
        assert np.array_equal(twice.plane.data, once.plane.data)


class TestWhiteBalance:
    def test_unit_gains_identity(self):
        rng = np.random.default_rng(1)
        bayer = _bayer(rng.random((4, 4)))
        out = white_balance(bayer, (1.0, 1.0, 1.0))
        assert np.array_equal(out.plane.data, bayer.plane.data)

    def test_red_gain_on_red_site(self):
        data = np.full((2, 2), 0.3)
        out = white_balance(_bayer(data), (2.0, 1.0, 1.0))
        assert out.plane.data[0, 0] == pytest.approx(0.6, abs=1e-15)
        assert out.plane.data[0, 1] == pytest.approx(0.3, abs=1e-15)

    def test_gray_world_recovery(self):
        # cast a (2, 1, 1.5)^-1 illuminant over a neutral mosaic, then undo it
        neutral = np.full((4, 4), 0.3)
        cast = np.array([[1 / 2.0, 1.0], [1.0, 1 / 1.5]])
        lit = neutral * np.tile(cast, (2, 2))
        out = white_balance(_bayer(lit), (2.0, 1.0, 1.5))
        assert np.allclose(out.plane.data, 0.3, atol=1e-6)

    def test_respects_phase(self):
        data = np.full((2, 2), 0.2)
        out = white_balance(_bayer(data, phase="BGGR"), (3.0, 1.0, 2.0))
        assert out.plane.data[0, 0] == pytest.approx(0.4, abs=1e-15)  # B site
        assert out.plane.data[1, 1] == pytest.approx(0.6, abs=1e-15)  # R site

    def test_clamps(self):
        out = white_balance(_bayer(np.full((2, 2), 0.9)), (2.0, 1.0, 1.0))
        assert out.plane.data[0, 0] == 1.0


class TestDemosaic:
    @pytest.mark.parametrize("method", ["bilinear", "malvar"])
    def test_constant_in_constant_out_exact(self, method):
        c = 1.0 / 3.0  # not a dyadic value
        out = demosaic(_bayer(np.full((6, 6), c)), method)
        assert np.all(out.data == c)

    @pytest.mark.parametrize("method", ["bilinear", "malvar"])
    @pytest.mark.parametrize("phase", ["RGGB", "GRBG", "GBRG", "BGGR"])
    def test_native_sites_preserved(self, method, phase):
        rng = np.random.default_rng(2)
        mosaic = rng.random((6, 6))
        out = demosaic(_bayer(mosaic, phase=phase), method)
        grid = PHASE_GRIDS[phase]
        names = ("R", "G", "B")
        for i in range(6):
            for j in range(6):
                ch = names.index(grid[i % 2][j % 2])
                assert out.data[i, j, ch] == mosaic[i, j]

    def test_bilinear_green_is_cross_mean(self):
        rng = np.random.default_rng(3)
        mosaic = rng.random((6, 6))
        out = demosaic(_bayer(mosaic), "bilinear")
        want = (mosaic[1, 2] + mosaic[3, 2] + mosaic[2, 1] + mosaic[2, 3]) / 4.0
        assert out.data[2, 2, 1] == pytest.approx(want, abs=1e-15)  # (2,2) is R

    @pytest.mark.parametrize("phase", ["RGGB", "GRBG", "GBRG", "BGGR"])
    def test_malvar_matches_scalar_reference(self, phase):
        mosaic = mosaic_6x6(seed=4)
        out = demosaic(_bayer(mosaic, phase=phase), "malvar")
        want = malvar_reference(mosaic, PHASE_GRIDS[phase])
        assert np.abs(out.data - want).max() < 1e-9

    @pytest.mark.parametrize("phase", ["RGGB", "GBRG"])
    def test_bilinear_matches_scalar_reference(self, phase):
        mosaic = mosaic_6x6(seed=5)
        out = demosaic(_bayer(mosaic, phase=phase), "bilinear")
        want = bilinear_reference(mosaic, PHASE_GRIDS[phase])
        assert np.abs(out.data - want).max() < 1e-12

    def test_unknown_method(self):
        with pytest.raises(ConfigError):
            demosaic(_bayer(np.zeros((4, 4))), "vng")


class TestApplyCcm:
    def test_identity(self):
        rng = np.random.default_rng(5)
        rgb = RgbImage(rng.random((4, 4, 3)))
        out = apply_ccm(rgb, np.eye(3))
        assert np.allclose(out.data, rgb.data, atol=1e-15)

    def test_gray_preserved(self):
        rgb = RgbImage(np.full((4, 4, 3), 0.42))
        out = apply_ccm(rgb, ((1.41, -0.33, -0.08), (-0.24, 1.36, -0.12), (-0.05, -0.41, 1.46)))
        assert np.allclose(out.data, 0.42, atol=1e-6)

    def test_saturating_red_clamps(self):
        ccm = ((1.5, -0.3, -0.2), (-0.2, 1.4, -0.2), (-0.1, -0.3, 1.4))
        rgb = RgbImage(np.tile(np.array([1.0, 0.0, 0.0]), (2, 2, 1)))
        out = apply_ccm(rgb, ccm)
        # direct product: (1.5, -0.2, -0.1), clamped into [0, 1]
        assert np.allclose(out.data[0, 0], [1.0, 0.0, 0.0], atol=1e-15)

    def test_row_sum_violation(self):
        with pytest.raises(ConfigError):
            apply_ccm(RgbImage(np.zeros((2, 2, 3))), ((1.1, 0.0, 0.0),) * 3)


class TestApplyGamma:
    @pytest.mark.parametrize("gamma", [2.2, 1.0, "srgb"])
    def test_fixed_points(self, gamma):
        rgb = RgbImage(np.tile(np.array([0.0, 1.0, 0.5]), (2, 1, 1)).reshape(2, 1, 3))
        out = apply_gamma(rgb, gamma)
        assert out.data[0, 0, 0] == 0.0
        assert out.data[0, 0, 1] == 1.0

    def test_gamma_one_identity(self):
        rng = np.random.default_rng(6)
        rgb = RgbImage(rng.random((3, 3, 3)))
        assert np.allclose(apply_gamma(rgb, 1.0).data, rgb.data, atol=1e-15)

    def test_power_law_value(self):
        rgb = RgbImage(np.full((1, 1, 3), 0.5))
        out = apply_gamma(rgb, 2.2)
        assert out.data[0, 0, 0] == pytest.approx(0.5 ** (1 / 2.2), abs=1e-12)
        assert out.data[0, 0, 0] == pytest.approx(0.72974, abs=1e-5)

    def test_srgb_reference_value(self):
        rgb = RgbImage(np.full((1, 1, 3), 0.5))
        out = apply_gamma(rgb, "srgb")
        assert out.data[0, 0, 0] == pytest.approx(1.055 * 0.5 ** (1 / 2.4) - 0.055, abs=1e-12)

    def test_srgb_linear_segment(self):
        rgb = RgbImage(np.full((1, 1, 3), 0.001))
        out = apply_gamma(rgb, "srgb")
        assert out.data[0, 0, 0] == pytest.approx(12.92 * 0.001, abs=1e-15)

    @pytest.mark.parametrize("gamma", [2.2, "srgb"])
    def test_strictly_increasing_inside_unit_interval(self, gamma):
        grid = np.linspace(0.001, 0.999, 257)
        rgb = RgbImage(np.stack([grid, grid, grid], -1)[None, :, :])
        out = apply_gamma(rgb, gamma).data[0, :, 0]
        assert np.all(np.diff(out) > 0.0)


class TestRunIsp:
    def test_matches_manual_stage_chain(self):
        rng = np.random.default_rng(7)
        bayer = _bayer(rng.random((8, 8)))
        cfg = IspConfig()
        a = run_isp(bayer, cfg)
        stage = black_level_correct(bayer)
        stage = white_balance(stage, cfg.wb_gains)
        rgb = demosaic(stage, cfg.demosaic_method)
        rgb = apply_ccm(rgb, cfg.ccm)
        b = apply_gamma(rgb, cfg.gamma)
        assert np.array_equal(a.data, b.data)

    def test_neutral_constant_with_identity_config(self):
        cfg = IspConfig(wb_gains=(1.0, 1.0, 1.0), ccm=np.eye(3), gamma=1.0)
        out = run_isp(_bayer(np.full((8, 8), 0.37)), cfg)
        assert np.all(out.data == 0.37)

    def test_gray_preservation_through_default_ccm(self):
        cfg = IspConfig(wb_gains=(1.0, 1.0, 1.0))
        out = run_isp(_bayer(np.full((8, 8), 0.5)), cfg)
        assert np.abs(out.data - out.data[:, :, :1]).max() < 1e-6

    def test_golden_fixture(self):
        golden = np.load(GOLDEN_DIR / "run_isp_8x8.npy")
        out = run_isp(_bayer(golden_mosaic_8x8()), IspConfig())
        assert np.abs(out.data - golden).max() < 1e-9

    def test_bit_identical_across_runs(self):
        rng = np.random.default_rng(8)
        bayer = _bayer(rng.random((16, 16)))
        a = run_isp(bayer, IspConfig())
        b = run_isp(bayer, IspConfig())
        assert np.array_equal(a.data, b.data)
