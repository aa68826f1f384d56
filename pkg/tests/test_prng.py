import pytest

from backend.tools.prng import SplitMix64


def test_reference_stream_for_seed_zero():
    rng = SplitMix64(0)
    assert rng.next_u64() == 0xE220A8397B1DCDAF
    assert rng.next_u64() == 0x6E789E6AA1B965F4


def test_same_seed_same_stream():
    a, b = SplitMix64(2024), SplitMix64(2024)
    assert [a.next_u64() for _ in range(20)] == [b.next_u64() for _ in range(20)]


def test_below_and_between_stay_in_range():
    rng = SplitMix64(5)
    draws = [rng.below(7) for _ in range(500)]
    assert set(draws) == set(range(7))
    assert all(3 <= rng.between(3, 5) <= 5 for _ in range(100))
    with pytest.raises(ValueError):
        rng.below(0)


def test_shuffle_is_a_permutation():
    xs = list(range(30))
    SplitMix64(9).shuffle(xs)
    assert sorted(xs) == list(range(30))
    ys = list(range(30))
    SplitMix64(9).shuffle(ys)
    assert xs == ys


def test_sample_distinct():
    picked = SplitMix64(3).sample(range(10), 4)
    assert len(picked) == len(set(picked)) == 4
