import numpy as np
import pytest

from reposeg.errors import NoValidMask
from reposeg.providers import CandidateSet
from reposeg.selection import SelectorConfig, select_mask, white_ratio


def mask_with_ratio(ratio: float, side: int = 20) -> np.ndarray:
    count = round(ratio * side * side)
    flat = np.zeros(side * side, bool)
    flat[:count] = True
    return flat.reshape(side, side)


def test_white_ratio_extremes_and_fraction():
    assert white_ratio(np.ones((4, 4), bool)) == 1.0
    assert white_ratio(np.zeros((4, 4), bool)) == 0.0
    five = np.zeros((5, 5), bool)
    five.ravel()[:5] = True
    assert white_ratio(five) == 0.2


def test_select_prefers_highest_valid_ratio():
    cands = CandidateSet(masks=[mask_with_ratio(r) for r in (0.02, 0.35, 0.85)])
    result = select_mask(cands, SelectorConfig(r_max=0.5))
    assert result.selected_index == 1
    assert result.valid == [True, True, False]
    assert result.used_fallback is False
    assert result.ratios == pytest.approx([0.02, 0.35, 0.85])


def test_select_strict_raises_when_nothing_valid():
    cands = CandidateSet(masks=[mask_with_ratio(0.7), mask_with_ratio(0.9)])
    with pytest.raises(NoValidMask):
        select_mask(cands, SelectorConfig(r_max=0.5))


def test_select_tie_breaks_to_lowest_index():
    cands = CandidateSet(masks=[mask_with_ratio(0.3), mask_with_ratio(0.3),
                                mask_with_ratio(0.1)])
    assert select_mask(cands, SelectorConfig(r_max=0.5)).selected_index == 0


def test_select_fallback_takes_smallest_ratio():
    cands = CandidateSet(masks=[mask_with_ratio(0.9), mask_with_ratio(0.7)])
    result = select_mask(cands, SelectorConfig(r_max=0.5, fallback_policy="smallest_ratio"))
    assert result.selected_index == 1
    assert result.used_fallback is True
    assert result.valid == [False, False]


def test_selected_ratio_never_exceeds_r_max_without_fallback():
    rng = np.random.default_rng(13)
    config = SelectorConfig(r_max=0.5, fallback_policy="smallest_ratio")
    for _ in range(100):
        masks = [rng.random((8, 8)) < rng.uniform(0.05, 0.95)
                 for _ in range(int(rng.integers(1, 4)))]
        result = select_mask(CandidateSet(masks=masks), config)
        if not result.used_fallback:
            assert result.ratios[result.selected_index] <= 0.5


def test_permutation_equivariance():
    rng = np.random.default_rng(29)
    config = SelectorConfig(r_max=0.5, fallback_policy="smallest_ratio")
    for _ in range(50):
        ratios = rng.choice(np.arange(1, 16) / 20.0, size=3, replace=False)
        masks = [mask_with_ratio(float(r)) for r in ratios]
        base = select_mask(CandidateSet(masks=masks), config)
        perm = rng.permutation(3)
        permuted = select_mask(CandidateSet(masks=[masks[i] for i in perm]), config)
        # the same mask content is chosen regardless of order
        assert (masks[base.selected_index]
                == [masks[i] for i in perm][permuted.selected_index]).all()


def test_scale_invariance_under_integer_upscaling():
    masks = [mask_with_ratio(r) for r in (0.12, 0.4, 0.73)]
    base = select_mask(CandidateSet(masks=masks), SelectorConfig(r_max=0.5))
    for factor in (2, 3):
        scaled = [np.kron(m, np.ones((factor, factor), bool)) for m in masks]
        result = select_mask(CandidateSet(masks=scaled), SelectorConfig(r_max=0.5))
        assert result.ratios == base.ratios
        assert result.selected_index == base.selected_index


def test_gate_is_monotone_in_r_max():
    rng = np.random.default_rng(41)
    for _ in range(50):
        masks = [rng.random((10, 10)) < rng.uniform(0.1, 0.9) for _ in range(3)]
        cands = CandidateSet(masks=masks)
        config_hi = SelectorConfig(r_max=0.6, fallback_policy="smallest_ratio")
        config_lo = SelectorConfig(r_max=0.3, fallback_policy="smallest_ratio")
        valid_hi = select_mask(cands, config_hi).valid
        valid_lo = select_mask(cands, config_lo).valid
        for lo, hi in zip(valid_lo, valid_hi):
            assert not (lo and not hi)  # lowering r_max never validates a mask


def test_selector_config_validation():
    with pytest.raises(ValueError):
        SelectorConfig(r_max=0.0)
    with pytest.raises(ValueError):
        SelectorConfig(fallback_policy="random")
    with pytest.raises(ValueError):
        select_mask(CandidateSet(masks=[]), SelectorConfig())
