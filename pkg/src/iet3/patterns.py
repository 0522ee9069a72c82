"""Patterned (alpha, z) pairs and power-disjointness witness sets.

alpha has the purely periodic expansion with period
(10m, 10m, 4m, 10m, 10m, 4m, 10m, 10m) and z is the value of the
periodic digit stream (0,0,1,0,0,1,0,0) in the signed numeration, summed
in closed form through the period contraction factor.  The witness sets
are level sets of counting functions at the scale q_{l+2}; for the
first pattern occurrence they are explicit finite unions of orbit
translates of the sliver J minus its truncation, with exact measures.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import fsum

from .field import FieldElement
from .cf import ContinuedFraction, cf_from_periodic
from .circle import (
    Interval,
    IntervalUnion,
    hit_count_fast,
    psi_level_measures,
)


def _pattern_periods(m):
    a_period = (10 * m, 10 * m, 4 * m, 10 * m, 10 * m, 4 * m, 10 * m, 10 * m)
    b_period = (0, 0, 1, 0, 0, 1, 0, 0)
    return a_period, b_period


@dataclass(frozen=True)
class PatternPair:
    m: int
    cf: ContinuedFraction
    z: FieldElement
    b_period: tuple
    shift: int
    ell: int
    standing: bool  # z >= max(alpha, 1 - alpha)
    contraction: FieldElement  # beta_{period-1}: one-period norm contraction

    def b_digit(self, i):
        """Digit b_i (i >= 1) of the periodic stream."""
        return self.b_period[(i - 1) % len(self.b_period)]

    def to_json_dict(self):
        return {
            "m": self.m,
            "alpha_exact": self.cf.alpha.exact_str(),
            "z_exact": self.z.exact_str(),
            "z_decimal": self.z.decimal_str(),
            "a_period": list(self.cf.digits[: len(self.b_period)]),
            "b_period": list(self.b_period),
            "ell": self.ell,
            "shift": self.shift,
            "standing_assumption": self.standing,
        }


def _pair_from_shift(m, shift, depth):
    a_period, b_period = _pattern_periods(m)
    n = len(a_period)
    a_rot = a_period[shift:] + a_period[:shift]
    b_rot = b_period[shift:] + b_period[:shift]
    alpha = cf_from_periodic([], a_rot)
    cf = ContinuedFraction.expand(alpha, depth)
    if tuple(cf.digits[:n]) != a_rot:
        raise AssertionError("periodic expansion round trip failed")
    # z = sum of b_i <<q_{i-1} alpha>> over one period, summed as a
    # geometric series: norms contract by eps = ||q_{n-1} alpha|| per period
    eps = cf.qnorm(n - 1)
    s_period = FieldElement.rational(0, 1, alpha.d)
    for i, b in enumerate(b_rot, start=1):
        if b:
            s_period = s_period + b * cf.signed_qnorm(i - 1)
    z = s_period / (1 - eps)
    return cf, z, b_rot, eps


def construct_pair(m, depth=26):
    """The canonical pattern pair for a given m >= 2.

    Locates the first index l with the marked 4-tuple of (digit, code)
    pairs at l+1..l+4 and l+2 even.  The standing arrangement
    z >= max(alpha, 1-alpha) is tested; when it fails the rotated
    patterns are retried, and since the code digits force z below every
    rotation's alpha-scale, the canonical shift 0 is kept and the
    failure is reported in the pair.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    a_period, b_period = _pattern_periods(m)
    n = len(a_period)
    chosen = None
    for shift in range(n):
        cf, z, b_rot, eps = _pair_from_shift(m, shift, depth)
        alpha = cf.alpha
        standing = z >= alpha and z >= 1 - alpha
        if chosen is None:
            chosen = (shift, cf, z, b_rot, eps, standing)
        if standing:
            chosen = (shift, cf, z, b_rot, eps, standing)
            break
    shift, cf, z, b_rot, eps, standing = chosen
    target = ((10 * m, 0), (10 * m, 0), (4 * m, 1), (10 * m, 0))
    ell = None
    for cand in range(0, depth - 4):
        if (cand + 2) % 2 != 0:
            continue
        window = tuple(
            (cf.digit(cand + i), b_rot[(cand + i - 1) % n]) for i in range(1, 5)
        )
        if window == target:
            ell = cand
            break
    if ell is None:
        raise AssertionError("pattern not found in the periodic stream")
    for i in range(1, n + 1):
        if b_rot[(i - 1) % n] > cf.digit(i) - 1:
            raise AssertionError("code digit without strict slack")
    return PatternPair(m, cf, z, tuple(b_rot), shift, ell, standing, eps)


@dataclass
class CountLevels:
    """Level structure of the q_{l+2}-step count of the truncated piece."""

    ell: int
    truncation: FieldElement  # the truncated endpoint w
    r: int  # orbit index with w = r*alpha mod 1
    values: dict  # level -> exact measure
    majority: int
    minority_measure: FieldElement
    minority_base: Interval | None
    minority_translates: int


def pattern_count_levels(pair, ell=None):
    """Exact level structure of phi(x) = hits of [0, w) over q_{l+2}
    rotation steps, where w is the digit truncation at index l.

    For r = 0 (no earlier nonzero digits) phi is constant; otherwise it
    takes exactly two consecutive values and the minority carrier is the
    disjoint union of the first r forward translates of the width
    ||q_{l+2} alpha|| interval left of 0, of exact total measure
    r * ||q_{l+2} alpha||.
    """
    cf = pair.cf
    ell = pair.ell if ell is None else ell
    if ell + 2 > cf.depth - 2:
        raise ValueError("index beyond the expansion depth")
    if (ell + 2) % 2:
        raise ValueError("need l + 2 even")
    alpha = cf.alpha
    d = alpha.d
    zero = FieldElement.rational(0, 1, d)
    w = zero
    r = 0
    for i in range(1, ell + 1):
        b = pair.b_digit(i)
        if b:
            w = w + b * cf.signed_qnorm(i - 1)
            r += b * cf.q[i - 1]
    if (r * alpha).mod1() != w.mod1():
        raise AssertionError("truncation is not the expected orbit point")
    if ell >= 1 and not r < cf.q[ell]:
        raise AssertionError("orbit index exceeds the scale denominator")
    big_q = cf.q[ell + 2]
    delta = cf.qnorm(ell + 2)
    if r == 0:
        return CountLevels(ell, w, 0, {0: FieldElement.rational(1, 1, d)}, 0,
                           zero, None, 0)
    # separation of the first r translates must dominate the width
    k_star = 0
    while cf.q[k_star] <= r:
        k_star += 1
    if not cf.qnorm(k_star - 1) >= delta:
        raise AssertionError("translate disjointness fails")
    minority_measure = r * delta
    base = Interval.make(-delta, zero)
    # values at one exact sample of each part
    maj_sample = (w + 3 * delta / 2).mod1()
    # ensure the sample avoids every translate i=1..r of the base
    inside = hit_count_fast((maj_sample - r * alpha).mod1(), base, r, alpha)
    if inside:
        raise AssertionError("majority sample landed in the minority carrier")
    window = Interval.make(zero, w)
    maj = hit_count_fast(maj_sample, window, big_q, alpha)
    min_sample = (alpha - delta / 2).mod1()
    minv = hit_count_fast(min_sample, window, big_q, alpha)
    if abs(maj - minv) != 1:
        raise AssertionError("levels are not consecutive")
    one = FieldElement.rational(1, 1, d)
    values = {maj: one - minority_measure, minv: minority_measure}
    return CountLevels(ell, w, r, values, maj, minority_measure, base, r)


@dataclass
class PowerWitness:
    n: int
    m: int
    j: int
    f_level: int
    g_level: int
    f_measure: FieldElement
    g_measure: FieldElement
    f_set: IntervalUnion | None
    g_set: IntervalUnion | None
    c: FieldElement
    scale_bound_ok: bool  # q_{l+2} ||q_{l+2} alpha|| > 1/(10m+3)
    inequality_ok: bool  # 1 - lam(F) < lam(G) - c
    displacement: FieldElement  # d(R^{n q_{l+2}} x, x), constant in x
    sliver_measure: FieldElement
    sliver_sandwich_ok: bool


def power_witness_sets(pair, n_pow, m_pow=None):
    """Witness sets F (count = n*j) and G (count = m*j + 1) for the
    power pair (n, m) at the pattern scale, with the exact separation
    constant c.

    Measures come from the closed-form level computation; when the
    truncation index is 0 the sets themselves are materialized as exact
    unions of orbit translates of the sliver and cross-checked against
    the closed form.
    """
    m_pow = pair.m if m_pow is None else m_pow
    if not 0 < n_pow < m_pow:
        raise ValueError("need 0 < n < m")
    cf = pair.cf
    ell = pair.ell
    alpha = cf.alpha
    d = alpha.d
    zero = FieldElement.rational(0, 1, d)
    one = FieldElement.rational(1, 1, d)
    levels = pattern_count_levels(pair)
    j = levels.majority
    big_q = cf.q[ell + 2]
    delta = cf.qnorm(ell + 2)
    w = levels.truncation
    z = pair.z
    sliver = Interval.make(w, z)
    zeta = sliver.measure()
    lo = delta * (10 * pair.m - 1) * Fraction(1, 10 * pair.m)
    hi = delta * (10 * pair.m + 1) * Fraction(1, 10 * pair.m)
    sandwich = lo < zeta < hi
    J = Interval.make(zero, z)

    f_meas_map = psi_level_measures(n_pow * big_q, J, cf)
    g_meas_map = psi_level_measures(m_pow * big_q, J, cf)
    f_level, g_level = n_pow * j, m_pow * j + 1
    f_measure = f_meas_map.get(f_level, zero)
    g_measure = g_meas_map.get(g_level, zero)

    f_set = g_set = None
    if levels.r == 0:
        # sliver translates are disjoint (width below the separation of
        # the orbit out to m*big_q steps): materialize the exact sets
        k_star = 0
        while cf.q[k_star] <= m_pow * big_q:
            k_star += 1
        if not cf.qnorm(k_star - 1) >= zeta:
            raise AssertionError("sliver translates are not separated")
        g_set = IntervalUnion(
            [piece for i in range(m_pow * big_q)
             for piece in sliver.translate((-i * alpha).mod1()).pieces()]
        )
        hit_union = IntervalUnion(
            [piece for i in range(n_pow * big_q)
             for piece in sliver.translate((-i * alpha).mod1()).pieces()]
        )
        f_set = hit_union.complement(d)
        if f_set.measure_or_zero(d) != f_measure:
            raise AssertionError("materialized F measure disagrees with closed form")
        if g_set.measure_or_zero(d) != g_measure:
            raise AssertionError("materialized G measure disagrees with closed form")

    # the separation constant, from exact norms
    coeff = Fraction(m_pow - n_pow) - Fraction(m_pow + n_pow, 10 * pair.m)
    c_val = coeff * big_q * delta - Fraction(2, 100 * pair.m * pair.m)
    scale_ok = big_q * delta > Fraction(1, 10 * pair.m + 3)
    lhs = one - f_measure
    rhs = g_measure - c_val
    # constant displacement of the n*big_q rotation power
    disp = (n_pow * cf.signed_qnorm(ell + 2)).mod1()
    disp = min(disp, 1 - disp)
    return PowerWitness(
        n=n_pow,
        m=m_pow,
        j=j,
        f_level=f_level,
        g_level=g_level,
        f_measure=f_measure,
        g_measure=g_measure,
        f_set=f_set,
        g_set=g_set,
        c=c_val,
        scale_bound_ok=scale_ok,
        inequality_ok=lhs < rhs,
        displacement=disp,
        sliver_measure=zeta,
        sliver_sandwich_ok=sandwich,
    )


def empirical_disjointness(imap, n_pow, m_pow, f, g, x0, y0, count):
    """|avg_k f(T^{nk} x0) g(T^{mk} y0) - (avg f)(avg g)| with power-of-ten
    checkpoints; a finite correlation proxy, observational only."""
    if count < 1:
        raise ValueError("count must be >= 1")
    fx, gy, prod = [], [], []
    x, y = x0.mod1(), y0.mod1()
    rows = []
    mark = 10
    for k in range(1, count + 1):
        for _ in range(n_pow):
            x = imap.apply(x)
        for _ in range(m_pow):
            y = imap.apply(y)
        fv, gv = f(float(x)), g(float(y))
        fx.append(fv)
        gy.append(gv)
        prod.append(fv * gv)
        if k == mark or k == count:
            dev = abs(fsum(prod) / k - (fsum(fx) / k) * (fsum(gy) / k))
            rows.append((k, dev))
            mark *= 10
    return rows[-1][1], rows
