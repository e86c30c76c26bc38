import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rgbwforge.core import (
    CANONICAL_RGBW_LAYOUT,
    BayerImage,
    ImagePlane,
    RgbImage,
    RgbwImage,
    RgbwLayout,
    denormalize,
    depth_to_space,
    normalize,
    space_to_depth,
)
from rgbwforge.errors import ConfigError, ShapeError


class TestImagePlane:
    def test_rejects_nan_and_inf(self):
        with pytest.raises(ConfigError):
            ImagePlane([[0.0, np.nan]])
        with pytest.raises(ConfigError):
            ImagePlane([[np.inf, 0.0]])

    def test_rejects_wrong_rank(self):
        with pytest.raises(ShapeError):
            ImagePlane(np.zeros(4))
        with pytest.raises(ShapeError):
            ImagePlane(np.zeros((2, 2, 2)))

    def test_immutable_and_decoupled_from_source(self):
        src = np.zeros((2, 2))
        plane = ImagePlane(src)
        src[0, 0] = 5.0
        assert plane.data[0, 0] == 0.0
        with pytest.raises(ValueError):
            plane.data[0, 0] = 1.0


class TestContainers:
    def test_bayer_requires_even_dims(self):
        with pytest.raises(ShapeError):
            BayerImage(ImagePlane(np.zeros((3, 4))), "RGGB")

    def test_bayer_requires_known_phase(self):
        with pytest.raises(ConfigError):
            BayerImage(ImagePlane(np.zeros((4, 4))), "RGRG")

    def test_bayer_levels_ordered(self):
        with pytest.raises(ConfigError):
            BayerImage(ImagePlane(np.zeros((4, 4))), "RGGB", 1.0, 1.0)

    def test_rgbw_requires_multiple_of_four(self):
        with pytest.raises(ShapeError):
            RgbwImage(ImagePlane(np.zeros((6, 8))), CANONICAL_RGBW_LAYOUT)

    def test_rgb_range_checked(self):
        with pytest.raises(ConfigError):
            RgbImage(np.full((2, 2, 3), 1.5))
        with pytest.raises(ShapeError):
            RgbImage(np.zeros((2, 2, 4)))


class TestRgbwLayout:
    def test_canonical_phase_is_rggb(self):
        assert CANONICAL_RGBW_LAYOUT.bayer_phase == "RGGB"
        assert CANONICAL_RGBW_LAYOUT.to_string() == "WRWG/RWGW/WGWB/GWBW"

    def test_anti_diagonal_white_accepted(self):
        layout = RgbwLayout.from_string("RWGW/WRWG/GWBW/WGWB")
        assert layout.bayer_phase == "RGGB"

    def test_grbg_quad(self):
        layout = RgbwLayout.from_string("WGWR/GWRW/WBWG/BWGW")
        assert layout.bayer_phase == "GRBG"

    def test_rejects_mixed_colors_in_cell(self):
        with pytest.raises(ConfigError):
            RgbwLayout.from_string("WRWG/BWGW/WGWB/GWBW")

    def test_rejects_missing_white_diagonal(self):
        with pytest.raises(ConfigError):
            RgbwLayout.from_string("RRWG/RWGW/WGWB/GWBW")

    def test_rejects_non_bayer_quad(self):
        # every cell red: not a Bayer quad
        with pytest.raises(ConfigError):
            RgbwLayout.from_string("WRWR/RWRW/WRWR/RWRW")

    def test_white_mask(self):
        mask = CANONICAL_RGBW_LAYOUT.white_mask()
        assert mask.sum() == 8
        assert mask[0, 0] and mask[1, 1] and not mask[0, 1]


class TestNormalize:
    def test_black_point_maps_to_zero(self):
        assert normalize(np.full((1, 1), 64.0), 64, 1023).data[0, 0] == 0.0

    def test_white_point_maps_to_one(self):
        assert normalize(np.full((1, 1), 1023.0), 64, 1023).data[0, 0] == 1.0

    def test_midpoint(self):
        # direct evaluation of the affine map: (543.5 - 64) / 959 == 0.5
        out = normalize(np.full((1, 1), 543.5), 64, 1023)
        assert out.data[0, 0] == pytest.approx(0.5, abs=1e-15)

    def test_clamps_out_of_window(self):
        out = normalize(np.array([[0.0, 2000.0]]), 64, 1023)
        assert out.data[0, 0] == 0.0 and out.data[0, 1] == 1.0

    def test_rejects_bad_levels(self):
        with pytest.raises(ConfigError):
            normalize(np.zeros((1, 1)), 1023, 64)
        with pytest.raises(ConfigError):
            normalize(np.zeros((1, 1)), 64, 64)

    @given(st.lists(st.integers(min_value=0, max_value=1023), min_size=2, max_size=32))
    def test_monotone(self, codes):
        values = np.sort(np.array(codes, dtype=np.float64))[None, :]
        out = normalize(values, 64, 1023).data[0]
        assert np.all(np.diff(out) >= 0.0)


class TestDenormalize:
    def test_black_and_white_points(self):
        plane = ImagePlane([[0.0, 1.0]])
        codes = denormalize(plane, 64, 1023)
        assert codes.dtype == np.uint16
        assert codes[0, 0] == 64 and codes[0, 1] == 1023

    def test_round_half_away_from_zero(self):
        # 0.25 of a 10-wide range is 2.5, which must round to 3 (not
        # banker's 2), and 0.35 -> 3.5 -> 4
        plane = ImagePlane([[0.25, 0.35]])
        codes = denormalize(plane, 0, 10)
        assert codes[0, 0] == 3 and codes[0, 1] == 4

    def test_clamps_to_container(self):
        plane = ImagePlane([[1.0]])
        assert denormalize(plane, 0, 70000)[0, 0] == 65535

    @given(st.lists(st.integers(min_value=64, max_value=1023), min_size=1, max_size=64))
    @settings(max_examples=50)
    def test_roundtrip_identity_on_code_lattice(self, codes):
        arr = np.array(codes, dtype=np.float64)[None, :]
        back = denormalize(normalize(arr, 64, 1023), 64, 1023)
        assert np.array_equal(back, arr.astype(np.uint16))


class TestPacking:
    def test_origin_definition(self):
        plane = ImagePlane(np.arange(16, dtype=np.float64).reshape(4, 4))
        planes = space_to_depth(plane, 2)
        assert len(planes) == 4
        assert all(p.data.shape == (2, 2) for p in planes)
        assert planes[0].data[0, 0] == plane.data[0, 0]

    def test_phase_separation_of_labeled_mosaic(self):
        # label each pixel by CFA site: R=0, Gr=1, Gb=2, B=3 on an RGGB grid
        labels = np.zeros((6, 6))
        labels[0::2, 1::2] = 1.0
        labels[1::2, 0::2] = 2.0
        labels[1::2, 1::2] = 3.0
        planes = space_to_depth(ImagePlane(labels), 2)
        for idx, value in enumerate((0.0, 1.0, 2.0, 3.0)):
            assert np.all(planes[idx].data == value)

    def test_roundtrip_random(self):
        rng = np.random.default_rng(0)
        plane = ImagePlane(rng.random((8, 8)))
        back = depth_to_space(space_to_depth(plane, 2), 2)
        assert np.array_equal(back.data, plane.data)

    def test_sum_preserved_exactly(self):
        rng = np.random.default_rng(1)
        plane = ImagePlane(rng.random((12, 8)))
        planes = space_to_depth(plane, 2)
        assert sum(float(p.data.sum()) for p in planes) == pytest.approx(
            float(plane.data.sum()), abs=1e-9
        )

    def test_smallest_merge(self):
        planes = [ImagePlane([[v]]) for v in (1.0, 2.0, 3.0, 4.0)]
        merged = depth_to_space(planes, 2)
        assert np.array_equal(merged.data, [[1.0, 2.0], [3.0, 4.0]])

    def test_factor_one_identity(self):
        plane = ImagePlane(np.arange(6, dtype=np.float64).reshape(2, 3))
        assert np.array_equal(depth_to_space([plane], 1).data, plane.data)
        assert np.array_equal(space_to_depth(plane, 1)[0].data, plane.data)

    def test_shape_errors(self):
        plane = ImagePlane(np.zeros((5, 4)))
        with pytest.raises(ShapeError):
            space_to_depth(plane, 2)
        with pytest.raises(ShapeError):
            depth_to_space([ImagePlane(np.zeros((2, 2)))] * 3, 2)
        with pytest.raises(ShapeError):
            depth_to_space(
                [ImagePlane(np.zeros((2, 2))), ImagePlane(np.zeros((2, 3)))] * 2, 2
            )

    @given(st.integers(min_value=0, max_value=2**32 - 1), st.sampled_from([2, 3, 4]))
    @settings(max_examples=25, deadline=None)
    def test_roundtrip_property(self, seed, factor):
        rng = np.random.default_rng(seed)
        plane = ImagePlane(rng.random((factor * 3, factor * 2)))
        back = depth_to_space(space_to_depth(plane, factor), factor)
        assert np.array_equal(back.data, plane.data)
