"""Numeric Riemann-Wirtinger integrals over open segments.

The multivalued weight T(u) = e^{2 pi i c_0 u} prod_j theta1(u - t_j)^{c_j}
is continued along a polyline by per-factor continuous logarithms anchored
at the path midpoint.  Integration uses double-exponential (tanh-sinh)
quadrature, which absorbs the algebraic endpoint singularities
(u - t)^{c}, Re c > -1, without subtracting them.

Node positions are kept as stable pairs (s, 1-s) so distances to the
endpoint punctures are formed without cancellation; tanh-sinh pushes
nodes exponentially close to the endpoints and naive u - t_a subtraction
would destroy the singular factors there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import ModuliConfig
from .cohomology import CocycleExpr
from .errors import (DivergentEndpoint, PathTooCloseToPuncture,
                     QuadratureStall, RefinementLimit, ShiftBreaksConvergence)
from .theta import lattice_distance, theta1

TWO_PI_I = 2j * np.pi

#: interior path points closer than this to a puncture copy are rejected
CLEARANCE_TOL = 1e-7
#: refinement cap for branch tracking
MAX_BRANCH_STEPS = 1 << 16
#: endpoint exponents with real part at or below -1 + this margin diverge
DIVERGENCE_MARGIN = 1e-9


@dataclass(frozen=True)
class SegmentPath:
    """Open path between two punctures, optionally via waypoints."""

    start_index: int
    end_index: int
    waypoints: tuple = ()
    steps: int = 256

    def points(self, cfg: ModuliConfig) -> list:
        return [cfg.t_of(self.start_index), *map(complex, self.waypoints),
                cfg.t_of(self.end_index)]


@dataclass
class BranchData:
    """Continuous per-factor logarithms log theta1(z - t_j) along the path,
    principal value at the (global) midpoint sample."""

    path: SegmentPath
    cfg: ModuliConfig
    steps: int
    seg_params: list = field(default_factory=list)   # per segment, in (0,1)
    seg_points: list = field(default_factory=list)
    seg_values: list = field(default_factory=list)   # (n, M) theta values
    seg_logs: list = field(default_factory=list)     # (n, M) continuous logs

    def factor_log(self, seg: int, s: np.ndarray, diffs: dict) -> np.ndarray:
        """log theta1(u - t_j) for every factor j at path points of one
        segment, branch-matched to the tracked samples.

        diffs maps j -> (u - t_j) arrays; entries for the endpoint
        punctures are supplied in stable form by the quadrature."""
        params = self.seg_params[seg]
        idx = np.clip(np.searchsorted(params, s), 1, len(params) - 1)
        idx -= (s - params[idx - 1]) < (params[idx] - s)
        n = self.cfg.n
        out = np.empty((n, len(s)), dtype=complex)
        for j in range(1, n + 1):
            vals = theta1(diffs[j], self.cfg.tp)
            base_val = self.seg_values[seg][j - 1][idx]
            base_log = self.seg_logs[seg][j - 1][idx]
            out[j - 1] = base_log + np.log(vals / base_val)
        return out

    def log_weight(self, seg: int, s: np.ndarray, u: np.ndarray,
                   diffs: dict) -> np.ndarray:
        """log T(u) along one segment with the tracked branch."""
        cfg = self.cfg
        logs = self.factor_log(seg, s, diffs)
        out = TWO_PI_I * cfg.c0 * u
        for j in range(1, cfg.n + 1):
            out = out + cfg.c_of(j) * logs[j - 1]
        return out


def _clearance_check(z: np.ndarray, cfg: ModuliConfig, endpoints: tuple) -> None:
    tau = cfg.tau
    for j in range(1, cfg.n + 1):
        d = lattice_distance(z - cfg.t_of(j), tau)
        if j in endpoints:
            # the segment legitimately approaches this puncture itself;
            # only its nonzero lattice translates are obstacles
            direct = np.abs(z - cfg.t_of(j))
            translates = np.full(z.shape, np.inf)
            for a in (-1, 0, 1):
                for b in (-1, 0, 1):
                    if a == b == 0:
                        continue
                    translates = np.minimum(
                        translates, np.abs(z - cfg.t_of(j) - a - b * tau))
            bad = (translates < CLEARANCE_TOL)
        else:
            bad = d < CLEARANCE_TOL
        if np.any(bad):
            raise PathTooCloseToPuncture(
                f"path passes within {CLEARANCE_TOL} of puncture {j} "
                "(or a lattice translate)")


def track_branch(path: SegmentPath, cfg: ModuliConfig) -> BranchData:
    """Continue log theta1(. - t_j) for every factor along the path.

    Samples each segment at interior points, fixes the principal logarithm
    at the midpoint sample of the whole path, and walks outward; steps are
    doubled until every increment's imaginary part stays below 0.9 pi."""
    pts = path.points(cfg)
    endpoints = (path.start_index, path.end_index)
    steps = path.steps
    while True:
        seg_params, seg_points, seg_values = [], [], []
        for a, b in zip(pts[:-1], pts[1:]):
            s = (np.arange(steps) + 0.5) / steps
            z = a + (b - a) * s
            seg_params.append(s)
            seg_points.append(z)
            seg_values.append(np.stack([
                np.asarray(theta1(z - cfg.t_of(j), cfg.tp))
                for j in range(1, cfg.n + 1)]))
        allz = np.concatenate(seg_points)
        _clearance_check(allz, cfg, endpoints)
        flat = [np.concatenate([sv[j] for sv in seg_values])
                for j in range(cfg.n)]
        anchor = len(allz) // 2
        ok = True
        flat_logs = []
        for vals in flat:
            ratios = vals[1:] / vals[:-1]
            inc = np.log(ratios)
            if np.max(np.abs(inc.imag)) > 0.9 * np.pi:
                ok = False
                break
            cum = np.concatenate(([0.0 + 0.0j], np.cumsum(inc)))
            logs = np.log(vals[anchor]) + cum - cum[anchor]
            flat_logs.append(logs)
        if ok:
            data = BranchData(path, cfg, steps, seg_params, seg_points,
                              seg_values)
            offset = 0
            for z in seg_points:
                m = len(z)
                data.seg_logs.append(np.stack(
                    [fl[offset:offset + m] for fl in flat_logs]))
                offset += m
            return data
        steps *= 2
        if steps > MAX_BRANCH_STEPS:
            raise RefinementLimit(
                "branch tracking exceeded the step budget; the path runs "
                "too close to a zero of some theta factor")


# ---------------------------------------------------------------------------
# tanh-sinh quadrature
# ---------------------------------------------------------------------------

def _tanh_sinh_nodes(level: int, t_max: float = 6.5):
    """Nodes on (0, 1) as stable pairs (s, 1-s) plus weights ds/dt * h."""
    h = 0.5 ** level
    k = np.arange(-int(t_max / h), int(t_max / h) + 1)
    t = k * h
    w = 0.5 * np.pi * np.sinh(t)
    with np.errstate(over="ignore"):
        # s = (1+tanh(w))/2 = 1/(1+e^{-2w}), computed without cancellation;
        # overflow just flushes the far tail to 0 before the filter
        s = 1.0 / (1.0 + np.exp(-2.0 * w))
        one_minus_s = 1.0 / (1.0 + np.exp(2.0 * w))
        weight = h * 0.25 * np.pi * np.cosh(t) / np.cosh(w) ** 2
    keep = (s > 1e-250) & (one_minus_s > 1e-250) & (weight > 1e-300)
    return s[keep], one_minus_s[keep], weight[keep]


def _endpoint_exponent(cfg: ModuliConfig, puncture: int, phi: CocycleExpr,
                       ratio_shift: int = 0) -> complex:
    return cfg.c_of(puncture) + ratio_shift + phi.ord_at(puncture)


def _check_convergence(cfg: ModuliConfig, path: SegmentPath,
                       phi: CocycleExpr, ratio: tuple | None = None,
                       err=DivergentEndpoint) -> None:
    for puncture in (path.start_index, path.end_index):
        shift = 0
        if ratio is not None:
            p, q = ratio
            shift = (1 if puncture == p else 0) - (1 if puncture == q else 0)
        kappa = _endpoint_exponent(cfg, puncture, phi, shift)
        if kappa.real <= -1.0 + DIVERGENCE_MARGIN:
            raise err(
                f"exponent {kappa} at puncture {puncture} makes the "
                "improper integral divergent")


def _segment_value(branch: BranchData, seg: int, a: complex, b: complex,
                   phis: list, level: int,
                   first: bool, last: bool, ratio: tuple | None) -> np.ndarray:
    """One tanh-sinh pass over one segment for all integrands at once."""
    cfg = branch.cfg
    path = branch.path
    s, oms, wts = _tanh_sinh_nodes(level)
    u = a + (b - a) * s
    diffs = {j: u - cfg.t_of(j) for j in range(1, cfg.n + 1)}
    if first:
        diffs[path.start_index] = (b - a) * s
    if last:
        diffs[path.end_index] = -(b - a) * oms
    log_t = branch.log_weight(seg, s, u, diffs)
    if ratio is not None:
        p, q = ratio
        log_t = log_t + np.log(theta1(diffs[p], cfg.tp)) \
            - np.log(theta1(diffs[q], cfg.tp))
    tvals = np.exp(log_t)
    out = []
    for phi in phis:
        integrand = tvals * phi.values(u, diffs=diffs)
        out.append((b - a) * np.sum(wts * integrand))
    return np.array(out)


def _integrate_many(path: SegmentPath, phis: list, cfg: ModuliConfig,
                    branch: BranchData | None = None,
                    ratio: tuple | None = None, quad_tol: float = 1e-10,
                    min_level: int = 6, max_level: int = 12) -> np.ndarray:
    """Adaptive tanh-sinh integration of T(u) phi (optionally times the
    single-valued theta ratio) for several integrands over one path."""
    if branch is None:
        branch = track_branch(path, cfg)
    pts = path.points(cfg)
    prev = None
    for level in range(min_level, max_level + 1):
        total = np.zeros(len(phis), dtype=complex)
        for seg, (a, b) in enumerate(zip(pts[:-1], pts[1:])):
            total += _segment_value(branch, seg, a, b, phis, level,
                                    first=(seg == 0),
                                    last=(seg == len(pts) - 2), ratio=ratio)
        if prev is not None:
            err = float(np.max(np.abs(total - prev)))
            if err <= quad_tol * max(1.0, float(np.max(np.abs(total)))):
                return total
        prev = total
    raise QuadratureStall(
        f"quadrature did not reach tol={quad_tol} by level {max_level}")


def rw_integral(path: SegmentPath, phi: CocycleExpr, cfg: ModuliConfig,
                quad_tol: float = 1e-10, min_level: int = 6,
                max_level: int = 12,
                branch: BranchData | None = None) -> complex:
    """Integral of T(u) phi over the open segment with tracked branch.

    Requires Re(c + ord(phi)) > -1 at both endpoint punctures; the pairing
    against the regularized cycle equals this convergent improper
    integral."""
    _check_convergence(cfg, path, phi)
    vals = _integrate_many(path, [phi], cfg, branch=branch,
                           quad_tol=quad_tol, min_level=min_level,
                           max_level=max_level)
    return complex(vals[0])


def f_vector(path: SegmentPath, cfg: ModuliConfig, quad_tol: float = 1e-10,
             branch: BranchData | None = None,
             max_level: int = 12) -> np.ndarray:
    """The n pairings against the simple-pole basis over one path, sharing
    a single branch continuation."""
    from .cohomology import psi_form
    phis = [psi_form(j, cfg) for j in range(1, cfg.n + 1)]
    for phi in phis:
        _check_convergence(cfg, path, phi)
    if branch is None:
        branch = track_branch(path, cfg)
    return _integrate_many(path, phis, cfg, branch=branch, quad_tol=quad_tol,
                           max_level=max_level)


def verify_contiguity_integral(p: int, q: int, path: SegmentPath,
                               cfg: ModuliConfig, quad_tol: float = 1e-10,
                               max_level: int = 12) -> float:
    """End-to-end check of the exponent-shift relation on real integrals.

    Computes f at cfg and the shifted vector with the same branch rule
    (the shifted weight is T times the single-valued theta ratio), and
    returns ||f_shifted - S f|| / ||f_shifted||."""
    from .cohomology import contiguity_matrix, psi_form
    shifted = cfg.shift_pq(p, q)
    phis = [psi_form(j, cfg) for j in range(1, cfg.n + 1)]
    phis_shift = [psi_form(j, shifted) for j in range(1, cfg.n + 1)]
    for phi in phis:
        _check_convergence(cfg, path, phi)
    for phi in phis_shift:
        _check_convergence(cfg, path, phi, ratio=(p, q),
                           err=ShiftBreaksConvergence)
    branch = track_branch(path, cfg)
    f = _integrate_many(path, phis, cfg, branch=branch, quad_tol=quad_tol,
                        max_level=max_level)
    f_shift = _integrate_many(path, phis_shift, cfg, branch=branch,
                              ratio=(p, q), quad_tol=quad_tol,
                              max_level=max_level)
    s_mat = contiguity_matrix(p, q, cfg)
    return float(np.linalg.norm(f_shift - s_mat @ f)
                 / np.linalg.norm(f_shift))
