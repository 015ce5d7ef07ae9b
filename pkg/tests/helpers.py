"""Random fixture generators shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction

from pwperiod.potential import PiecewiseSystem, Potential, Topology


def rand_q(rng: random.Random, lo: float, hi: float, den: int = 16) -> Fraction:
    return Fraction(rng.randint(int(lo * den), int(hi * den)), den)


def random_tail(rng: random.Random, start: int, max_deg: int, size: float = 1.0, even_only: bool = False) -> dict:
    out = {}
    for k in range(start, max_deg + 1):
        if even_only and k % 2:
            continue
        out[k] = rand_q(rng, -size, size)
    return out


def random_center(rng, max_deg=6, even_only=False) -> Potential:
    coeffs = {2: rand_q(rng, 0.5, 2.0)}
    coeffs.update(random_tail(rng, 3, max_deg, even_only=even_only))
    return Potential.from_mapping(coeffs)


def random_tangency(rng, sign: int, max_deg=5) -> Potential:
    coeffs = {1: sign * rand_q(rng, 0.5, 2.0)}
    coeffs.update(random_tail(rng, 2, max_deg))
    return Potential.from_mapping(coeffs)


def random_system(rng, case: str) -> PiecewiseSystem:
    if case == "i":
        return PiecewiseSystem(Topology.VERTICAL, random_center(rng), random_center(rng))
    if case == "iv":
        return PiecewiseSystem(Topology.VERTICAL, random_tangency(rng, -1), random_tangency(rng, +1))
    if case == "v":
        return PiecewiseSystem(Topology.VERTICAL, random_center(rng), random_tangency(rng, +1))
    if case == "v_even":
        return PiecewiseSystem(Topology.VERTICAL, random_center(rng, even_only=True), random_tangency(rng, +1))
    if case == "theorem_a":
        return PiecewiseSystem(Topology.HORIZONTAL_MIXED, random_tangency(rng, -1), random_center(rng))
    raise ValueError(case)


def P(mapping) -> Potential:
    return Potential.from_mapping(mapping)


def vertical(vm, vp) -> PiecewiseSystem:
    return PiecewiseSystem(Topology.VERTICAL, P(vm), P(vp))
