"""Shared instance generators."""
import numpy as np

from domkit import CredenceFunction


def random_credence(rng, n, low=-0.5, high=1.5):
    return CredenceFunction(rng.uniform(low, high, size=1 << n))


def noisy_probability(rng, space, scale):
    v = rng.dirichlet(np.ones(space.n))
    c = space.membership().astype(float) @ v
    return CredenceFunction(c + rng.normal(0.0, scale, size=c.size))
