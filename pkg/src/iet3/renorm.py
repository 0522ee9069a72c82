"""Flat-torus observables along the diagonal flow.

The torus attached to the rotation has lattice basis (1, 0), (-alpha, 1);
the flow scales coordinates by (e^t, e^-t).  Systoles and marked-point
separations feed threshold checks with explicit slacks, so this module
works in floating point (holonomies are first computed exactly, then
rounded once); every comparison carries a stated tolerance.  The
marked-point approach time, which must be exact, stays in the field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import FieldElement
from .circle import circle_distance

REDUCTION_SLACK = 1e-9


@dataclass(frozen=True)
class Lattice:
    """Planar lattice with basis columns v1, v2 (floats)."""

    v1: tuple
    v2: tuple

    def det(self):
        return self.v1[0] * self.v2[1] - self.v1[1] * self.v2[0]

    def flow(self, t):
        a, b = math.exp(t), math.exp(-t)
        return Lattice((self.v1[0] * a, self.v1[1] * b), (self.v2[0] * a, self.v2[1] * b))


@dataclass(frozen=True)
class MarkedTorus:
    lattice: Lattice
    p1: tuple
    p2: tuple


def torus_from_alpha(alpha, z=None):
    """Unit-area torus with basis (1,0), (-alpha,1); optional marked pair
    at (0,0) and (z,0).  alpha and z may be FieldElements or floats."""
    a = float(alpha)
    marked2 = (float(z), 0.0) if z is not None else None
    lat = Lattice((1.0, 0.0), (-a, 1.0))
    return MarkedTorus(lat, (0.0, 0.0), marked2)


def gauss_reduce(lattice, max_iter=256):
    """Two-dimensional (Lagrange) reduction; returns (Lattice, ok)."""
    v1 = list(lattice.v1)
    v2 = list(lattice.v2)

    def dot(u, w):
        return u[0] * w[0] + u[1] * w[1]

    if dot(v1, v1) > dot(v2, v2):
        v1, v2 = v2, v1
    for _ in range(max_iter):
        mu = round(dot(v1, v2) / dot(v1, v1))
        v2 = [v2[0] - mu * v1[0], v2[1] - mu * v1[1]]
        if dot(v2, v2) >= dot(v1, v1):
            return Lattice(tuple(v1), tuple(v2)), True
        v1, v2 = v2, v1
    return Lattice(tuple(v1), tuple(v2)), False


def systole(lattice):
    """Length of the shortest nonzero vector (via reduction)."""
    red, ok = gauss_reduce(lattice)
    if not ok:
        raise ArithmeticError("reduction failed to converge")
    return math.hypot(*red.v1)


def systole_exhaustive(lattice, box=50):
    """Oracle: shortest vector over integer combinations |a|,|b| <= box."""
    a = np.arange(-box, box + 1)
    coeffs = np.stack(np.meshgrid(a, a), axis=-1).reshape(-1, 2)
    coeffs = coeffs[np.any(coeffs != 0, axis=1)]
    basis = np.array([lattice.v1, lattice.v2])
    vecs = coeffs @ basis
    return float(np.sqrt(np.min(np.sum(vecs * vecs, axis=1))))


def _holonomy_candidates(cf, k_hi):
    """Primitive vectors (h, n) of the rotation lattice that can realize
    the systole along the flow: convergents, intermediate fractions, and
    the horizontal unit vector."""
    out = [(1.0, 0.0)]
    k_hi = min(k_hi, cf.depth)
    for j in range(0, k_hi + 1):
        out.append((float(cf.signed_qnorm(j)), float(cf.q[j])))
        if j + 1 <= cf.depth:
            for t in range(1, cf.digit(j + 1)):
                m = cf.p[j - 1] + t * cf.p[j] if j >= 1 else 1 + t * 0
                n = (cf.q[j - 1] if j >= 1 else 0) + t * cf.q[j]
                h = float(n * cf.alpha - m)
                out.append((h, float(n)))
    return out


def flow_systole(cf, t, k_hi=None):
    """systole(g_t X) for the torus of this rotation, at time t."""
    if k_hi is None:
        k_hi = cf.denominator_index(int(math.exp(t) * 4) + 2) + 2
    best = None
    for h, n in _holonomy_candidates(cf, k_hi):
        val = (math.exp(t) * h) ** 2 + (math.exp(-t) * n) ** 2
        best = val if best is None else min(best, val)
    return math.sqrt(best)


def marked_separation(cf, z, t, k_hi=None):
    """Shortest flowed connection between the two marked points."""
    alpha = float(cf.alpha)
    zf = float(z)
    if k_hi is None:
        k_hi = cf.denominator_index(int(math.exp(t) * 4) + 2) + 2
    ns = {0}
    k_hi = min(k_hi, cf.depth)
    for j in range(0, k_hi + 1):
        ns.add(cf.q[j])
        if j >= 1 and j + 1 <= cf.depth:
            for tt in range(1, cf.digit(j + 1)):
                ns.add(cf.q[j - 1] + tt * cf.q[j])
    et, emt = math.exp(t), math.exp(-t)
    best = None
    for n in ns:
        base = n * alpha - zf
        for m in (math.floor(base), math.floor(base) + 1):
            val = (et * (zf + m - n * alpha)) ** 2 + (emt * n) ** 2
            best = val if best is None else min(best, val)
    return math.sqrt(best)


def scale_index(cf, t):
    """f(t) = max{j : q_j <= e^t} (requires t >= 0)."""
    j = 0
    while j + 1 <= cf.depth and math.log(cf.q[j + 1]) <= t:
        j += 1
    return j


@dataclass
class GeodesicProfile:
    t: np.ndarray
    systole: np.ndarray
    separation: np.ndarray
    f: np.ndarray
    windows: list  # dicts per window k


def geodesic_profile(cf, z, k_lo, k_hi, step=1e-3, deltas=(0.9,)):
    """Sampled flow observables plus per-window super-level statistics.

    Windows are [log q_k, log q_{k+1}); for each delta the time measure
    of {t in window : systole >= delta} is computed with linear
    interpolation at the grid crossings.
    """
    if k_hi + 1 > cf.depth:
        raise ValueError("expansion too shallow")
    t0, t1 = math.log(cf.q[k_lo]), math.log(cf.q[k_hi + 1])
    n = int(math.ceil((t1 - t0) / step)) + 1
    ts = t0 + step * np.arange(n)
    cand = _holonomy_candidates(cf, k_hi + 2)
    hs = np.array([c[0] for c in cand])
    qs = np.array([c[1] for c in cand])
    et = np.exp(ts)
    lengths = np.sqrt(
        (et[:, None] * hs[None, :]) ** 2 + (qs[None, :] / et[:, None]) ** 2
    )
    sys_vals = lengths.min(axis=1)
    sep_vals = np.array([marked_separation(cf, z, float(t), k_hi + 2) for t in ts])
    f_vals = np.array([scale_index(cf, float(t)) for t in ts])

    def superlevel_measure(lo, hi, delta):
        # integrate the indicator {systole >= delta} over [lo, hi) with
        # linear interpolation of crossings and exact window clipping
        total = 0.0
        v = sys_vals
        first = max(0, int(math.floor((lo - t0) / step)))
        last = min(n - 2, int(math.ceil((hi - t0) / step)))
        for i in range(first, last + 1):
            a, b = v[i], v[i + 1]
            seg_lo, seg_hi = ts[i], ts[i + 1]
            if a >= delta and b >= delta:
                piece_lo, piece_hi = seg_lo, seg_hi
            elif a >= delta:
                cross = seg_lo + step * (a - delta) / (a - b)
                piece_lo, piece_hi = seg_lo, cross
            elif b >= delta:
                cross = seg_lo + step * (delta - a) / (b - a)
                piece_lo, piece_hi = cross, seg_hi
            else:
                continue
            piece_lo, piece_hi = max(piece_lo, lo), min(piece_hi, hi)
            if piece_hi > piece_lo:
                total += piece_hi - piece_lo
        return total

    windows = []
    for k in range(k_lo, k_hi + 1):
        lo, hi = math.log(cf.q[k]), math.log(cf.q[k + 1])
        row = {"k": k, "log_qk": lo, "window_length": hi - lo}
        for delta in deltas:
            row[f"compact_time_{delta}"] = superlevel_measure(lo, hi, delta)
        windows.append(row)
    return GeodesicProfile(ts, sys_vals, sep_vals, f_vals, windows)


def vertical_approach(cf, z, k, horizon=None):
    """Minimal j >= 1 with the orbit of one marked point entering the
    convergent-norm neighbourhood of the other (both directions), exact.

    Returns (j_min, j_zero_to_z, j_z_to_zero, c4_witness) where
    c4_witness = q_k / j_min; a direction with no approach within the
    horizon reports horizon + 1 (which still certifies the condition
    for any constant at least q_k / horizon).
    """
    cf.require_irrational()
    if horizon is None:
        horizon = 4 * cf.q[k]
    radius = cf.qnorm(k)
    alpha = cf.alpha
    d = alpha.d
    zero = FieldElement.rational(0, 1, d)
    z = z.mod1()
    j_fwd = j_bwd = horizon + 1
    x = zero
    y = z
    for j in range(1, horizon + 1):
        x = (x + alpha).mod1()
        y = (y + alpha).mod1()
        if j_fwd > horizon and circle_distance(x, z) <= radius:
            j_fwd = j
        if j_bwd > horizon and circle_distance(y, zero) <= radius:
            j_bwd = j
        if j_fwd <= horizon and j_bwd <= horizon:
            break
    j_min = min(j_fwd, j_bwd)
    from fractions import Fraction

    return j_min, j_fwd, j_bwd, Fraction(cf.q[k], j_min)
