from typing import List, Tuple

import numpy as np

from orlicz_kit.errors import DimensionError
from orlicz_kit.luxemburg import LuxemburgSpace, OrliczVector

# stay strictly inside the [4/5, 5/4] band
ADMISSIBLE_SCALES = (0.82, 1.22)


def rng_for(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def trial_generators(seed: int, trials: int) -> List[np.random.Generator]:
    """One independent generator per trial, derived from a single seed."""
    children = np.random.SeedSequence(seed).spawn(trials)
    return [np.random.default_rng(child) for child in children]


def random_vector(rng: np.random.Generator, dim: int, scale: float = 1.0) -> OrliczVector:
    return OrliczVector(rng.normal(scale=scale, size=dim))


def random_unit_vector(space: LuxemburgSpace, rng: np.random.Generator) -> OrliczVector:
    f = random_vector(rng, space.dim)
    while f.is_zero():
        f = random_vector(rng, space.dim)
    return space.normalize(f)


def random_admissible_pair(
    space: LuxemburgSpace, rng: np.random.Generator
) -> Tuple[OrliczVector, OrliczVector]:
    """f, g with norms drawn uniformly inside the band [4/5, 5/4]."""
    lo, hi = ADMISSIBLE_SCALES
    f = random_unit_vector(space, rng) * rng.uniform(lo, hi)
    g = random_unit_vector(space, rng) * rng.uniform(lo, hi)
    return f, g


def random_disjoint_unit_pair(
    space: LuxemburgSpace, rng: np.random.Generator
) -> Tuple[OrliczVector, OrliczVector]:
    if space.dim < 2:
        raise DimensionError("Disjoint pairs need dimension >= 2")
    order = rng.permutation(space.dim)
    cut = int(rng.integers(1, space.dim))
    coords = rng.normal(size=space.dim)
    u = OrliczVector(coords).restrict(order[:cut])
    v = OrliczVector(coords).restrict(order[cut:])
    return space.normalize(u), space.normalize(v)


def dominant_sphere_vector(
    space: LuxemburgSpace, rng: np.random.Generator, h: float
) -> Tuple[OrliczVector, int]:
    """A vector in the unit ball with one coordinate of modulus in (1-h, 1].

    Returns the vector and the index of the dominant coordinate.
    """
    index = int(rng.integers(space.dim))
    sign = rng.choice([-1.0, 1.0])
    coords = rng.normal(scale=h, size=space.dim)
    coords[index] = sign * rng.uniform(1.0 - h, 1.0)
    tail = np.ones(space.dim, dtype=bool)
    tail[index] = False
    while space.modular(OrliczVector(coords), 1.0) > 1.0:
        coords[tail] *= 0.5
    return OrliczVector(coords), index
