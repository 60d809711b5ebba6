"""Shared fixtures: reference configurations and random admissible draws."""

import numpy as np
import pytest

from rwkit.config import ModuliConfig
from rwkit.theta import TorusParam, lattice_distance


def make_config(n=3, tau=1j, lam=0.23 + 0.37j, seed=None):
    """A fixed, generically admissible configuration."""
    if n == 3:
        t = (0.11 + 0.13j, 0.52 + 0.21j, 0.31 + 0.64j)
        c = (0.31 + 0.05j, 0.42 - 0.11j, -0.73 + 0.06j)
    elif n == 4:
        t = (0.11 + 0.13j, 0.52 + 0.21j, 0.31 + 0.64j, 0.78 + 0.42j)
        c = (0.31 + 0.05j, 0.42 - 0.11j, -0.35 + 0.02j, -0.38 + 0.04j)
    elif n == 2:
        t = (0.11 + 0.13j, 0.52 + 0.21j)
        c = (0.31 + 0.05j, -0.31 - 0.05j)
    else:
        raise ValueError(n)
    return ModuliConfig(TorusParam(tau), n, t, 0.15 - 0.08j, c, lam)


def random_config(rng, n=3, tau=1j, lam_zero=False, real_c=False):
    """Draw an admissible configuration: distinct punctures in the cell,
    exponents away from the integers summing to zero, twist away from the
    lattice and from the degeneracy loci of the dual families."""
    tp = TorusParam(tau)
    while True:
        t = tuple(complex(0.08 + 0.84 * rng.random()
                          + (0.08 + 0.84 * rng.random()) * tau)
                  for _ in range(n))
        if min(abs(a - b) for i, a in enumerate(t)
               for b in t[i + 1:]) < 0.08:
            continue
        c = []
        for _ in range(n - 1):
            re = rng.uniform(0.15, 0.85) * rng.choice([1, -1])
            im = 0.0 if real_c else rng.uniform(-0.2, 0.2)
            c.append(complex(re, im))
        last = -sum(c)
        c.append(last)
        if any(abs(v.real - round(v.real)) < 0.1 and abs(v.imag) < 0.05
               for v in c):
            continue
        c0 = complex(rng.uniform(-0.5, 0.5),
                     0.0 if real_c else rng.uniform(-0.2, 0.2))
        lam = 0.0 if lam_zero else complex(
            0.1 + 0.8 * rng.random() + (0.1 + 0.8 * rng.random()) * tau)
        cfg = ModuliConfig(tp, n, t, c0, tuple(c), lam)
        if not lam_zero:
            ok = True
            for p in range(1, n + 1):
                for q in range(1, n + 1):
                    if p == q:
                        continue
                    d = cfg.t_of(p) - cfg.t_of(q)
                    for s in (lam, -lam):
                        if lattice_distance(d + s, tau) < 0.05:
                            ok = False
            if not ok:
                continue
        return cfg


@pytest.fixture
def cfg3():
    return make_config(3)


@pytest.fixture
def cfg4():
    return make_config(4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
