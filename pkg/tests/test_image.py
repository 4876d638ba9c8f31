import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pixmim import (
    CropRect,
    ImageTensor,
    PatchGrid,
    crop,
    patchify,
    reflect_pad,
    resize,
    shorter_edge_dims,
    unpatchify,
)

from conftest import random_image


class TestImageTensor:
    def test_rejects_nan(self):
        bad = np.ones((1, 4, 4))
        bad[0, 1, 2] = np.nan
        with pytest.raises(ValueError, match="finite"):
            ImageTensor(bad)

    def test_rejects_bad_channel_count(self):
        with pytest.raises(ValueError, match="channels"):
            ImageTensor(np.zeros((2, 4, 4)))

    def test_from_interleaved_uint8(self):
        arr = np.zeros((2, 3, 3), dtype=np.uint8)
        arr[0, 0, 0] = 255
        img = ImageTensor.from_interleaved(arr)
        assert img.data.shape == (3, 2, 3)
        assert img.data[0, 0, 0] == 1.0

    def test_data_is_immutable(self):
        img = random_image(0, 4, 4)
        with pytest.raises(ValueError):
            img.data[0, 0, 0] = 2.0


class TestPatchify:
    def test_224_grid_arithmetic(self):
        img = random_image(1, 224, 224, 3)
        grid = PatchGrid.for_image(img, 16)
        patches = patchify(img, grid)
        assert patches.shape == (196, 768)

    def test_constant_single_patch(self):
        img = ImageTensor(np.full((1, 16, 16), 0.5))
        patches = patchify(img, PatchGrid(16, 1, 1))
        assert patches.shape == (1, 256)
        assert (patches == 0.5).all()

    def test_pixel_multiset_preserved(self):
        # brute-force accounting: patches hold exactly the image's pixels
        img = random_image(2, 32, 32)
        patches = patchify(img, PatchGrid(16, 2, 2))
        assert np.array_equal(np.sort(patches.ravel()), np.sort(img.data.ravel()))

    def test_grid_mismatch_rejected(self):
        img = random_image(3, 32, 48)
        with pytest.raises(ValueError, match="tile"):
            patchify(img, PatchGrid(16, 2, 2))

    def test_unpatchify_shape_checks(self):
        grid = PatchGrid(16, 1, 1)
        with pytest.raises(ValueError, match="patches"):
            unpatchify(np.zeros((2, 256)), grid, 1)
        with pytest.raises(ValueError, match="length"):
            unpatchify(np.zeros((1, 100)), grid, 1)

    def test_single_patch_roundtrip(self):
        img = unpatchify(np.arange(256, dtype=float)[None, :], PatchGrid(16, 1, 1), 1)
        assert img.data.shape == (1, 16, 16)
        assert img.data[0, 0, 1] == 1.0

    def test_rgb_roundtrip_exact(self):
        img = random_image(4, 224, 224, 3)
        grid = PatchGrid.for_image(img, 16)
        back = unpatchify(patchify(img, grid), grid, 3)
        assert np.abs(back.data - img.data).max() == 0.0

    @given(
        rows=st.integers(1, 4),
        cols=st.integers(1, 4),
        p=st.sampled_from([1, 2, 3, 5, 8]),
        channels=st.sampled_from([1, 3]),
        seed=st.integers(0, 10_000),
    )
    @settings(max_examples=40, deadline=None)
    def test_roundtrip_property(self, rows, cols, p, channels, seed):
        img = random_image(seed, rows * p, cols * p, channels)
        grid = PatchGrid(p, rows, cols)
        back = unpatchify(patchify(img, grid), grid, channels)
        assert np.array_equal(back.data, img.data)


class TestResize:
    def test_constant_invariance(self):
        img = ImageTensor(np.full((1, 375, 500), 0.3))
        out = resize(img, 224, 299)
        assert out.data.shape == (1, 224, 299)
        assert np.abs(out.data - 0.3).max() < 1e-6

    @pytest.mark.parametrize("mode", ["bilinear", "bicubic"])
    def test_identity_is_bitwise(self, mode):
        img = random_image(5, 17, 23, 3)
        out = resize(img, 17, 23, mode)
        assert np.array_equal(out.data, img.data)

    def test_hand_evaluated_bilinear_kernel(self):
        # half-pixel centers, edge clamp: output centers 0.5,1.5,2.5,3.5 map
        # to source coords -0.25, 0.25, 0.75, 1.25 -> values 0, .25, .75, 1
        img = ImageTensor(np.array([[[0.0, 1.0], [0.0, 1.0]]]))
        out = resize(img, 2, 4)
        expected = np.array([0.0, 0.25, 0.75, 1.0])
        assert np.abs(out.data[0, 0] - expected).max() < 1e-12
        assert np.abs(out.data[0, 1] - expected).max() < 1e-12

    def test_bilinear_preserves_value_range(self):
        img = random_image(6, 21, 34)
        out = resize(img, 55, 13)
        assert out.data.min() >= img.data.min() - 1e-6
        assert out.data.max() <= img.data.max() + 1e-6

    def test_rejects_bad_dims(self):
        img = random_image(7, 8, 8)
        with pytest.raises(ValueError, match="positive"):
            resize(img, 0, 8)

    def test_rejects_unknown_mode(self):
        with pytest.raises(ValueError, match="mode"):
            resize(random_image(8, 8, 8), 4, 4, "nearest")

    def test_shorter_edge_dims(self):
        assert shorter_edge_dims(375, 500, 224) == (224, 299)
        assert shorter_edge_dims(500, 375, 224) == (299, 224)
        assert shorter_edge_dims(224, 224, 224) == (224, 224)


class TestReflectPad:
    def test_pad_zero_identity(self):
        img = random_image(9, 6, 7)
        assert np.array_equal(reflect_pad(img, 0).data, img.data)

    def test_pad_four_dims(self):
        img = random_image(10, 224, 224, 3)
        assert reflect_pad(img, 4).data.shape == (3, 232, 232)

    def test_hand_computed_reflection(self):
        # row [a, b, c] padded by 1 mirrors without repeating the edge
        img = ImageTensor(np.array([[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]]]))
        out = reflect_pad(img, 1)
        assert np.array_equal(out.data[0, 1], np.array([2.0, 1.0, 2.0, 3.0, 2.0]))

    def test_center_block_preserved(self):
        img = random_image(11, 10, 12)
        out = reflect_pad(img, 3)
        assert np.array_equal(out.data[:, 3:13, 3:15], img.data)

    def test_pad_too_large_rejected(self):
        with pytest.raises(ValueError, match="pad"):
            reflect_pad(random_image(12, 4, 9), 4)

    @given(pad=st.integers(0, 5), seed=st.integers(0, 1000))
    @settings(max_examples=25, deadline=None)
    def test_center_block_property(self, pad, seed):
        img = random_image(seed, 6, 8)
        out = reflect_pad(img, pad)
        assert np.array_equal(out.data[:, pad : pad + 6, pad : pad + 8], img.data)


class TestCrop:
    def test_full_rect_identity(self):
        img = random_image(13, 9, 11)
        out = crop(img, CropRect(0, 0, 9, 11))
        assert np.array_equal(out.data, img.data)

    def test_single_pixel(self):
        img = random_image(14, 9, 11)
        out = crop(img, CropRect(0, 0, 1, 1))
        assert out.data[0, 0, 0] == img.data[0, 0, 0]

    def test_matches_indexing_oracle(self, rng):
        img = random_image(15, 40, 50)
        for _ in range(20):
            t = int(rng.integers(0, 30))
            l = int(rng.integers(0, 40))
            h = int(rng.integers(1, 40 - t + 1))
            w = int(rng.integers(1, 50 - l + 1))
            out = crop(img, CropRect(t, l, h, w))
            for _ in range(5):
                y = int(rng.integers(0, h))
                x = int(rng.integers(0, w))
                assert out.data[0, y, x] == img.data[0, t + y, l + x]

    def test_out_of_bounds_rejected(self):
        img = random_image(16, 8, 8)
        with pytest.raises(ValueError, match="inside"):
            crop(img, CropRect(4, 4, 8, 8))

    @given(
        a_top=st.integers(0, 5), a_left=st.integers(0, 5),
        b_top=st.integers(0, 3), b_left=st.integers(0, 3),
        seed=st.integers(0, 100),
    )
    @settings(max_examples=25, deadline=None)
    def test_crop_composition(self, a_top, a_left, b_top, b_left, seed):
        img = random_image(seed, 20, 20)
        a = CropRect(a_top, a_left, 10, 10)
        b = CropRect(b_top, b_left, 5, 5)
        nested = crop(crop(img, a), b)
        composed = crop(img, CropRect(a.top + b.top, a.left + b.left, 5, 5))
        assert np.array_equal(nested.data, composed.data)
