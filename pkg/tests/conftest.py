"""Shared test helpers: seeded generators for behaviors and strategy mixtures."""

import json
import random
from fractions import Fraction
from pathlib import Path

import pytest

from threebox.behavior import CELLS, Behavior, parse_fraction
from threebox.feasibility import enumerate_strategies, mixture_behavior

DATA_DIR = Path(__file__).parent / "data"


def load_oracle_table():
    """The hand-expanded joint table committed as a fixture.

    Derivation, with rho the all-1/3 density matrix of the (1,1,1)/sqrt(3)
    pre-state and F the projector onto (1,1,-1)/sqrt(3): for choice k, the
    found branch collapses to (1/3)|k><k| which has overlap 1/3 with F, so
    P(1,1)=1/9 and P(1,0)=2/9 for every k.  The not-found branch collapses
    to (1/3)(e_a+e_b)(e_a+e_b)^T over the other two boxes; its overlap with
    F is |<psi|(e_a+e_b)>|^2/3, which is 0 for k=1,2 (amplitudes 1 and -1
    cancel) and 4/9 for k=3 (amplitudes 1 and 1 add), leaving P(0,0) as the
    2/3 remainder minus that.
    """
    raw = json.loads((DATA_DIR / "three_box_joint_oracle.json").read_text())
    table = {}
    for key, column in raw.items():
        k = int(key.removeprefix("C="))
        for i, j in CELLS:
            table[i, j, k] = parse_fraction(column[f"{i}{j}"])
    return table


def random_behavior(rng: random.Random, choices=(1, 2, 3), max_numerator=9) -> Behavior:
    """Exact random behavior: each column is integers over their sum."""
    table = {}
    for k in choices:
        while True:
            nums = [rng.randint(0, max_numerator) for _ in range(4)]
            if sum(nums) > 0:
                break
        total = sum(nums)
        for (i, j), n in zip(CELLS, nums):
            table[i, j, k] = Fraction(n, total)
    return Behavior(choices=tuple(choices), table=table)


def random_mixture_behavior(rng: random.Random, variant, choices):
    """A behavior guaranteed feasible for ``variant``: a sparse random mixture."""
    space = enumerate_strategies(variant, choices)
    count = rng.randint(1, min(5, len(space.strategies)))
    picks = rng.sample(range(len(space.strategies)), count)
    nums = [rng.randint(1, 9) for _ in picks]
    total = sum(nums)
    weights = [Fraction(n, total) for n in nums]
    strategies = [space.strategies[i] for i in picks]
    return mixture_behavior(strategies, weights, choices)


@pytest.fixture
def rng():
    return random.Random(20260810)
