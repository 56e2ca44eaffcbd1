"""Seeded random rational points for the verification suites.

Coordinates are exact rationals with magnitude in [0.1, 10] and random sign,
respecting the nonvanishing hypothesis and keeping numeric work well
conditioned.  Everything is driven by ``random.Random(seed)`` so identical
seeds give identical points on any platform.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .symbolic import PointState


def rational_coord(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(10, 1000), 100) * rng.choice((-1, 1))


def _triple(rng: random.Random) -> tuple:
    return tuple(rational_coord(rng) for _ in range(3))


def random_point(rng: random.Random, jets: bool = True,
                 second_jets: bool = True) -> PointState:
    u = _triple(rng)
    v = _triple(rng)
    du = _triple(rng) if jets else (0, 0, 0)
    dv = _triple(rng) if jets else (0, 0, 0)
    ddu = _triple(rng) if second_jets else (0, 0, 0)
    ddv = _triple(rng) if second_jets else (0, 0, 0)
    return PointState(u, v, du, dv, ddu, ddv)


def random_vector6(rng: random.Random) -> tuple:
    return tuple(rational_coord(rng) for _ in range(6))


def seeded_points(seed: int, count: int, jets: bool = True,
                  second_jets: bool = True) -> list:
    rng = random.Random(seed)
    return [random_point(rng, jets, second_jets) for _ in range(count)]
