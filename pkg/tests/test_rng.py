from fractions import Fraction

from clusterdouble.rng import SplitMix64

MASK = (1 << 64) - 1


def test_reference_vectors():
    rng = SplitMix64(1234567)
    assert [rng.next_u64() for _ in range(5)] == [
        6457827717110365317,
        3203168211198807973,
        9817491932198370423,
        4593380528125082431,
        16408922859458223821,
    ]


def test_derived_draws_follow_documented_reductions():
    a, b = SplitMix64(42), SplitMix64(42)
    assert a.randint(-2, 2) == -2 + b.next_u64() % 5
    p, q, sign = b.next_u64() % 9 + 1, b.next_u64() % 9 + 1, b.next_u64() & 1
    assert a.rational() == Fraction(-p if sign else p, q)
    assert a.rational(positive=True) > 0


def test_seed_is_reduced_mod_2_64():
    assert SplitMix64(-1).next_u64() == SplitMix64(MASK).next_u64()


def test_fork_is_deterministic():
    assert SplitMix64(3).fork().next_u64() == SplitMix64(3).fork().next_u64()
