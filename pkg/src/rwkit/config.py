"""Parameter set for the torus integrals and its validity invariants."""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvariantViolation
from .theta import TorusParam, lattice_distance

#: |sum c_j| above this violates the exponent-sum constraint
SUM_TOL = 1e-12
#: punctures closer than this (mod lattice) count as coinciding
DISTINCT_TOL = 1e-8
#: |c_j - integer| below this flags a degenerate exponent
INTEGER_C_TOL = 1e-8


@dataclass(frozen=True)
class ModuliConfig:
    """Full parameter set: tau, punctures t_1..t_n, exponents c_0, c_1..c_n,
    twist lambda, and the derived exponent at the lattice direction.

    Invariants enforced on construction:
      * Im(tau) > 0 and n >= 2 with matching list lengths;
      * c_1 + ... + c_n = 0 (to SUM_TOL);
      * the t_j are pairwise distinct modulo the lattice;
      * lambda is not a nonzero lattice point (lambda = 0 is the special
        zero-twist family and is allowed).

    c_j close to an integer is recorded in integer_c_indices rather than
    rejected, since some closed forms specialize there.
    """

    tp: TorusParam
    n: int
    t: tuple
    c0: complex
    c: tuple
    lam: complex

    def __post_init__(self):
        if self.n < 2:
            raise InvariantViolation("n >= 2", f"need n >= 2, got {self.n}")
        object.__setattr__(self, "t", tuple(complex(v) for v in self.t))
        object.__setattr__(self, "c", tuple(complex(v) for v in self.c))
        object.__setattr__(self, "c0", complex(self.c0))
        object.__setattr__(self, "lam", complex(self.lam))
        if len(self.t) != self.n:
            raise InvariantViolation("length of t",
                                     f"expected {self.n} punctures, got {len(self.t)}")
        if len(self.c) != self.n:
            raise InvariantViolation("length of c",
                                     f"expected {self.n} exponents, got {len(self.c)}")
        s = sum(self.c)
        if abs(s) > SUM_TOL:
            raise InvariantViolation("sum of c",
                                     f"c_1+...+c_n = {s}, expected 0")
        tau = self.tp.tau
        for j in range(self.n):
            for k in range(j + 1, self.n):
                if lattice_distance(self.t[j] - self.t[k], tau) < DISTINCT_TOL:
                    raise InvariantViolation(
                        "distinct punctures",
                        f"t_{j+1} and t_{k+1} coincide modulo the lattice")
        if self.lam != 0 and lattice_distance(self.lam, tau) < DISTINCT_TOL:
            raise InvariantViolation("lambda on lattice",
                                     f"lambda = {self.lam} lies on the lattice")

    # --- derived data ----------------------------------------------------

    @property
    def tau(self) -> complex:
        return self.tp.tau

    @cached_property
    def c_inf(self) -> complex:
        """Derived exponent: -lambda - c0*tau - sum_j c_j t_j."""
        return -self.lam - self.c0 * self.tau - sum(cj * tj for cj, tj
                                                    in zip(self.c, self.t))

    @cached_property
    def integer_c_indices(self) -> tuple:
        out = []
        for j, cj in enumerate(self.c, start=1):
            if abs(cj.imag) < INTEGER_C_TOL and \
                    abs(cj.real - round(cj.real)) < INTEGER_C_TOL:
                out.append(j)
        return tuple(out)

    @property
    def lambda_is_zero(self) -> bool:
        return self.lam == 0

    def t_of(self, j: int) -> complex:
        """Puncture t_j, 1-indexed."""
        return self.t[j - 1]

    def c_of(self, j: int) -> complex:
        """Exponent c_j, 1-indexed."""
        return self.c[j - 1]

    # --- parameter symmetries --------------------------------------------

    def dual(self) -> "ModuliConfig":
        """Negate every exponent and the twist; punctures are unchanged."""
        return ModuliConfig(self.tp, self.n, self.t, -self.c0,
                            tuple(-cj for cj in self.c), -self.lam)

    def shift_pq(self, p: int, q: int) -> "ModuliConfig":
        """Contiguity shift (c_p, c_q, lambda) -> (c_p+1, c_q-1,
        lambda - t_p + t_q); keeps the derived lattice exponent fixed."""
        if not (1 <= p <= self.n and 1 <= q <= self.n and p != q):
            raise InvariantViolation("shift indices",
                                     f"need distinct p, q in 1..{self.n}")
        c = list(self.c)
        c[p - 1] += 1
        c[q - 1] -= 1
        return ModuliConfig(self.tp, self.n, self.t, self.c0, tuple(c),
                            self.lam - self.t_of(p) + self.t_of(q))

    def shift_c_inf_by(self, p: int) -> complex:
        """c_inf after the translation-by-1 move of t_p."""
        return self.c_inf + self.c_of(p)

    # --- bridges to the symbolic layer ------------------------------------

    def exp_values(self) -> dict:
        """Variable assignment x_j = e^{2 pi i c_j} (x_inf from the derived
        exponent) for SymRat evaluation."""
        vals = {f"x{j}": cmath.exp(2j * cmath.pi * self.c_of(j))
                for j in range(1, self.n)}
        vals["x0"] = cmath.exp(2j * cmath.pi * self.c0)
        vals["xinf"] = cmath.exp(2j * cmath.pi * self.c_inf)
        return vals

    def min_puncture_gap(self, l: int) -> float:
        """Distance from t_l to the nearest other singularity of the local
        system data: other punctures modulo the lattice, and the nonzero
        lattice translates of t_l itself."""
        tl = self.t_of(l)
        gaps = [1.0, self.tau.imag, abs(self.tau), abs(1 + self.tau),
                abs(1 - self.tau)]
        for j in range(1, self.n + 1):
            if j == l:
                continue
            d = self.t_of(j) - tl
            for a in (-1, 0, 1):
                for b in (-1, 0, 1):
                    gaps.append(abs(d + a + b * self.tau))
        return min(gaps)
