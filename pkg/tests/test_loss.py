import math

import numpy as np
import pytest

from pixmim import (
    ImageTensor,
    LossSpec,
    PatchGrid,
    low_freq_target,
    masked_loss,
    normalize_patches,
    patchify,
    random_mask,
    target_patches,
)

from conftest import cosine_image, random_image

RAW = LossSpec(distance="l2", normalize_per_patch=False)


def two_patch_image() -> ImageTensor:
    # patch 0 is [[0,1],[2,3]], patch 1 is [[1,3],[5,7]] under a 2px grid
    return ImageTensor(np.array([[[0.0, 1.0, 1.0, 3.0], [2.0, 3.0, 5.0, 7.0]]]))


class TestMaskedLoss:
    def test_perfect_reconstruction_zero(self):
        img = random_image(0, 32, 32)
        grid = PatchGrid(16, 2, 2)
        m = random_mask(grid, 0.5, seed=1)
        patches = patchify(img, grid)
        assert masked_loss(patches, img, m, RAW) == 0.0
        assert masked_loss(patches, img, m, LossSpec("l1", False)) == 0.0
        normalized = normalize_patches(patches)
        assert masked_loss(normalized, img, m, LossSpec("l2", True)) == 0.0

    def test_constant_offset_quarter(self):
        img = ImageTensor(np.zeros((1, 16, 16)))
        grid = PatchGrid(16, 1, 1)
        m = random_mask(grid, 1.0, seed=2)
        pred = np.full((1, 256), 0.5)
        assert masked_loss(pred, img, m, RAW) == pytest.approx(0.25, abs=1e-12)

    def test_hand_normalized_two_patch_oracle(self):
        # oracle arithmetic written out longhand, independent of the library
        img = two_patch_image()
        grid = PatchGrid(2, 1, 2)
        m = random_mask(grid, 1.0, seed=3)  # both patches masked
        eps = 1e-6
        t0 = [0.0, 1.0, 2.0, 3.0]
        t1 = [1.0, 3.0, 5.0, 7.0]
        mu0, mu1 = 1.5, 4.0
        sd0 = math.sqrt(sum((x - mu0) ** 2 for x in t0) / 4)
        sd1 = math.sqrt(sum((x - mu1) ** 2 for x in t1) / 4)
        n0 = [(x - mu0) / (sd0 + eps) for x in t0]
        n1 = [(x - mu1) / (sd1 + eps) for x in t1]
        pred = np.array([[0.1, -0.2, 0.4, 1.0], [1.0, 1.2, -0.3, 0.8]])
        expected = (
            sum((p - t) ** 2 for p, t in zip(pred[0], n0)) / 4
            + sum((p - t) ** 2 for p, t in zip(pred[1], n1)) / 4
        ) / 2
        got = masked_loss(pred, img, m, LossSpec("l2", True))
        assert abs(got - expected) < 1e-9

    def test_l1_distance(self):
        img = ImageTensor(np.zeros((1, 16, 16)))
        m = random_mask(PatchGrid(16, 1, 1), 1.0, seed=4)
        pred = np.full((1, 256), -0.5)
        assert masked_loss(pred, img, m, LossSpec("l1", False)) == pytest.approx(0.5)

    def test_bit_invariant_to_visible_positions(self):
        img = random_image(5, 64, 64)
        grid = PatchGrid(16, 4, 4)
        m = random_mask(grid, 0.75, seed=6)
        pred = np.random.default_rng(7).random((16, 256))
        base = masked_loss(pred, img, m, RAW)
        perturbed = pred.copy()
        perturbed[m.visible_indices] = 1e9
        assert masked_loss(perturbed, img, m, RAW) == base

    def test_zero_masked_patches_rejected(self):
        img = random_image(8, 32, 32)
        m = random_mask(PatchGrid(16, 2, 2), 0.0, seed=9)
        with pytest.raises(ValueError, match="zero masked"):
            masked_loss(np.zeros((4, 256)), img, m)

    def test_shape_mismatch_rejected(self):
        img = random_image(10, 32, 32)
        m = random_mask(PatchGrid(16, 2, 2), 0.5, seed=11)
        with pytest.raises(ValueError, match="cover"):
            masked_loss(np.zeros((3, 256)), img, m)

    def test_l2_nonnegative_and_zero_iff_match(self):
        img = random_image(12, 32, 32)
        grid = PatchGrid(16, 2, 2)
        m = random_mask(grid, 0.5, seed=13)
        pred = normalize_patches(patchify(img, grid))
        assert masked_loss(pred, img, m) == 0.0
        pred2 = pred.copy()
        pred2[m.masked_indices[0], 0] += 1e-3
        assert masked_loss(pred2, img, m) > 0.0

    def test_target_scale_invariance_under_normalization(self):
        # standardization removes the target's scale: at the loss minimum the
        # eps guard contributes only a second-order term
        img = random_image(14, 64, 64)
        grid = PatchGrid(16, 4, 4)
        m = random_mask(grid, 0.75, seed=15)
        pred = normalize_patches(patchify(img, grid))
        base = masked_loss(pred, img, m, LossSpec("l2", True))
        assert base == 0.0
        for c in [0.5, 0.8, 1.3, 2.0]:
            scaled = ImageTensor(img.data * c)
            got = masked_loss(pred, scaled, m, LossSpec("l2", True))
            assert abs(got - base) < 1e-6


class TestTargetPatches:
    def test_pass_through_is_raw_patchify(self):
        img = random_image(17, 64, 64, 3)
        grid = PatchGrid(16, 4, 4)
        assert np.array_equal(target_patches(img, None, grid), patchify(img, grid))

    def test_constant_image_any_bandwidth(self):
        img = ImageTensor(np.full((1, 32, 32), 0.25))
        grid = PatchGrid(16, 2, 2)
        for r in [0.0, 5.0, 16.0]:
            t = target_patches(img, r, grid)
            assert np.abs(t - 0.25).max() < 1e-9

    def test_commutes_with_filtering(self):
        img = random_image(18, 224, 224, 3)
        grid = PatchGrid(16, 14, 14)
        via_patches = target_patches(img, 40.0, grid)
        direct = patchify(low_freq_target(img, 40.0), grid)
        assert np.array_equal(via_patches, direct)

    def test_filtering_shifts_loss_by_out_of_band_energy(self):
        # a pure out-of-band cosine target: raw-pixel loss carries its full
        # energy, low-pass-filtered loss drops it
        img = cosine_image(64, 64, 20, 0, amplitude=0.3)
        grid = PatchGrid(16, 4, 4)
        m = random_mask(grid, 1.0, seed=19)
        pred = np.zeros((16, 256))
        raw_loss = masked_loss(pred, img, m, RAW)
        filtered_img = low_freq_target(img, 8.0)
        filt_loss = masked_loss(pred, filtered_img, m, RAW)
        energy_term = float((img.data**2).mean())
        assert abs((raw_loss - filt_loss) - energy_term) < 1e-9
