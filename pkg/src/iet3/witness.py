"""Exact witness constructions for powers of the induced map.

Everything here is an exact set computation: partitions of the circle
into level sets of differenced counting functions, window searches over
orbit translates, tower selections inside level sets, and exact hitting
frequencies.  No Monte Carlo anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .field import FieldElement
from .circle import (
    Interval,
    IntervalUnion,
    StepFunction,
    critical_interval,
    hit_count_fast,
    psi_partition,
)


@dataclass(frozen=True)
class PowerParams:
    """Derived scale data tying the power triple (n, m, m') to a
    convergent index k via the counting lengths r_k, w_k."""

    n: int
    m: int
    m_prime: int
    c: Fraction
    length: int  # L
    r_k: int
    w_k: int
    k: int

    @property
    def w_diff(self):
        """(m - m') * w_k, the differenced window width."""
        return (self.m - self.m_prime) * self.w_k


def derive_parameters(n, m, m_prime, z, length, cf):
    """Exact floors r_k = floor(z L / n), w_k = floor(r_k / z) and the
    index k with (m - m') w_k in [q_{k-1}, q_k).

    Raises ValueError when m = m' or when no convergent bracket holds.
    """
    if not (0 < m_prime < m < n):
        raise ValueError("need 0 < m' < m < n")
    cf.require_irrational()
    c = Fraction(m - m_prime, n)
    r_k = (z * length * Fraction(1, n)).floor()
    if r_k < 1:
        raise ValueError("z*L/n must be at least 1")
    w_k = (r_k / z).floor()
    wd = (m - m_prime) * w_k
    k = None
    for kk in range(1, cf.depth + 1):
        if cf.q[kk - 1] <= wd < cf.q[kk]:
            k = kk
            break
    if k is None:
        raise ValueError(f"(m-m')w = {wd} not bracketed by computed convergents")
    return PowerParams(n, m, m_prime, c, length, r_k, w_k, k)


def hit_difference(y, width_count, k, z, cf):
    """Difference of orbit hit counts of the two parity-correct critical
    intervals of width ||q_k alpha||, over width_count rotation steps.

    In range {-1, 0, 1} whenever width_count < q_k (each count is then
    at most 1 by the three-gap separation).
    """
    c_zero = critical_interval(k, "zero", cf)
    c_z = critical_interval(k, "z", cf, z=z)
    a = hit_count_fast(y, c_zero, width_count, cf.alpha)
    b = hit_count_fast(y, c_z, width_count, cf.alpha)
    return a - b


def _difference_step_function(width_count, k, z, cf, extra_shift=0):
    """StepFunction of x -> hits(critical zero) - hits(critical z) over
    width_count steps, with orbit start shifted by extra_shift steps."""
    alpha = cf.alpha
    c_zero = critical_interval(k, "zero", cf)
    c_z = critical_interval(k, "z", cf, z=z)
    events = []
    for ell in range(width_count):
        shift = (-(ell + extra_shift) * alpha).mod1()
        events.append(((c_zero.left + shift).mod1(), 1))
        events.append(((c_zero.right + shift).mod1(), -1))
        events.append(((c_z.left + shift).mod1(), -1))
        events.append(((c_z.right + shift).mod1(), 1))
    pts = sorted({p for p, _ in events})
    x0 = pts[0]
    anchor = hit_difference((x0 + extra_shift * alpha).mod1(), width_count, k, z, cf)
    return StepFunction.from_events(events, anchor, alpha.d)


@dataclass
class DifferencePartition:
    """The differenced counting function, its +-1 region, and the best
    (interval, window) pair found by exhaustive search."""

    step: StepFunction  # the pulled-back difference function
    pm1_region: IntervalUnion
    interval: IntervalUnion  # components admissible for the best window
    window_start: int
    window_length: int
    interval_measure: FieldElement
    ratio_bound: FieldElement  # lambda(I) / ||q_k alpha||


def difference_partition(params, z, cf, window_scan=None):
    """Exact level structure of the differenced counting function and an
    exhaustive search for the longest translate window.

    The function on the circle equals the critical-interval hit
    difference pulled back by w = m'*w_k rotation steps; the search
    maximizes the window length |E| over start indices e such that
    intersecting R^{-i}(pm1 region) over i in E leaves an interval.
    """
    wd = params.w_diff
    k = params.k
    if wd >= cf.q[k]:
        raise ValueError("window width must stay below q_k for the range guarantee")
    alpha = cf.alpha
    pull = params.m_prime * params.w_k
    base = _difference_step_function(wd, k, z, cf)
    # pull back by R^{pull}: G(x) = F(R^pull x): breakpoints shift by -pull*alpha
    shift = (-pull * alpha).mod1()
    pulled = StepFunction([(b + shift).mod1() for b in base.breakpoints], list(base.values))
    order = sorted(range(len(pulled.breakpoints)), key=lambda i: pulled.breakpoints[i])
    pulled = StepFunction(
        [pulled.breakpoints[i] for i in order], [pulled.values[i] for i in order]
    )
    vals = set(base.values)
    if not vals <= {-1, 0, 1}:
        raise AssertionError(f"difference function out of range: {sorted(vals)}")
    region = base.level_set(1).union(base.level_set(-1))
    if region.is_empty():
        return DifferencePartition(pulled, region, region, 0, 0,
                                   FieldElement.rational(0, 1, alpha.d),
                                   FieldElement.rational(0, 1, alpha.d))
    if window_scan is None:
        window_scan = cf.q[k + 1] + cf.q[k] if k + 1 <= cf.depth else 4 * cf.q[k]
    # the running intersection over a window {e, ..., e+len-1} is the
    # rotation by -e of the window at 0, so the maximal length and the
    # component sizes are independent of the start: one chain suffices
    cur = region
    length = 1
    chain = [cur]
    while length < window_scan:
        nxt = cur.intersection(region.translate((-length * alpha).mod1()))
        if nxt.is_empty():
            break
        cur = nxt
        chain.append(cur)
        length += 1
    e_best, len_best, core = 0, length, cur
    d = alpha.d
    if core.is_empty():
        lam = FieldElement.rational(0, 1, d)
    else:
        lam = max(core.component_lengths())
    return DifferencePartition(
        pulled,
        region,
        core,
        e_best,
        len_best,
        lam,
        lam / cf.qnorm(k),
    )


@dataclass
class ShiftLevelResult:
    m_hat: int
    d: int
    level_set: IntervalUnion
    measure: FieldElement
    n_components: int
    component_bound: int
    value_range: tuple
    step: StepFunction


def shift_level_search(params, z, cf):
    """Level sets of the q_k-shifted count difference
    count(R^{q_k} x side) - count(x side) over m_hat*w_k steps, for both
    m_hat candidates; returns the nonzero level of maximal measure with
    its exact component count.

    The orientation is chosen so the level value equals the exponent
    discovered by commutation_check on the refined set.  All attained
    values must lie in {-4..4}; raises otherwise.
    """
    alpha = cf.alpha
    d = alpha.d
    k = params.k
    q_k = cf.q[k]
    J = Interval.make(FieldElement.rational(0, 1, d), z)
    best = None
    for m_hat in (params.m, params.m_prime):
        s = m_hat * params.w_k
        events = []
        for ell in range(s):
            sh1 = (-ell * alpha).mod1()
            sh2 = (-(ell + q_k) * alpha).mod1()
            events.append(((J.left + sh1).mod1(), -1))
            events.append(((J.right + sh1).mod1(), 1))
            events.append(((J.left + sh2).mod1(), 1))
            events.append(((J.right + sh2).mod1(), -1))
        pts = sorted({p for p, _ in events})
        x0 = pts[0]
        anchor = hit_count_fast((x0 + q_k * alpha).mod1(), J, s, alpha) - hit_count_fast(
            x0, J, s, alpha
        )
        sf = StepFunction.from_events(events, anchor, d)
        lo, hi = sf.value_range()
        if lo < -4 or hi > 4:
            raise AssertionError(f"shifted count difference out of range: [{lo},{hi}]")
        for val, meas in sf.level_measures().items():
            if val == 0:
                continue
            if best is None or meas > best[2]:
                best = (m_hat, val, meas, sf)
    if best is None:
        raise ValueError("both candidates concentrate on level 0")
    m_hat, val, meas, sf = best
    level = sf.level_set(val)
    return ShiftLevelResult(
        m_hat,
        val,
        level,
        meas,
        level.n_components(),
        4 * q_k + 1,
        sf.value_range(),
        sf,
    )


def halve_by_component_size(union):
    """Keep the components of length >= measure/(2 * count); the kept set
    retains at least half the measure (the discarded pieces are each
    shorter than measure/(2*count) and there are at most count of them)."""
    if union.is_empty():
        return union
    total = union.measure()
    n = len(union.pieces)
    kept = [(l, r) for l, r in union.pieces if 2 * n * (r - l) >= total]
    return IntervalUnion(kept, already_normal=True)


@dataclass
class RefinedLevelSet:
    tilde: IntervalUnion
    measure: FieldElement
    visit_span: tuple  # (min N(x), max N(x)) over the scanned cells
    removed_measure: FieldElement


def tilde_refine(params, shift_result, z, cf, imap):
    """The stable subset of the shifted-count level set.

    Removes the conservative exceptional region (translates of the two
    critical intervals over the range of visit-time discrepancies) where
    the windowed count difference could change between the m_hat*w_k
    window and the exact visit-time window, then halves by component
    size so the remaining pieces are long.
    """
    alpha = cf.alpha
    d = alpha.d
    k = params.k
    m_hat = shift_result.m_hat
    target_visits = m_hat * params.r_k
    width = m_hat * params.w_k
    zero = FieldElement.rational(0, 1, d)
    a_prime = halve_by_component_size(shift_result.level_set)
    a_prime = a_prime.intersection(IntervalUnion.from_interval(imap.domain))
    if a_prime.is_empty():
        return RefinedLevelSet(a_prime, zero, (0, 0), zero)
    # N(x) = time of the target_visits-th visit is piecewise constant on
    # cells cut by the backward orbit translates of the J endpoints;
    # refine a_prime against those cuts so each cell has one N value
    slack = 16 + width // 4
    while True:
        t_max = width + slack
        cuts = set()
        for t in range(t_max + 1):
            shift = (-t * alpha).mod1()
            cuts.add(shift)
            cuts.add((z + shift).mod1())
        refined = []
        bounds = sorted(cuts)
        lo_n = hi_n = None
        ok = True
        for l, r in a_prime.pieces:
            from bisect import bisect_left, bisect_right
            local = [l] + [b for b in bounds[bisect_right(bounds, l):bisect_left(bounds, r)]] + [r]
            for a0, b0 in zip(local, local[1:]):
                if not a0 < b0:
                    continue
                n_x = imap._kth_visit_time((a0 + b0) / 2, target_visits)
                if n_x >= t_max - 1:
                    ok = False
                    break
                lo_n = n_x if lo_n is None else min(lo_n, n_x)
                hi_n = n_x if hi_n is None else max(hi_n, n_x)
            if not ok:
                break
        if ok:
            break
        slack *= 2
    if lo_n is None:
        return RefinedLevelSet(IntervalUnion.empty(), zero, (0, 0), zero)
    j_lo, j_hi = min(lo_n, width), max(hi_n, width) + 1
    # strips where a single term chi_J(R^i x) vs chi_J(R^i R^{q_k} x)
    # can differ: the symmetric difference of J with its q_k-shift
    J_set = IntervalUnion.from_interval(Interval.make(zero, z))
    J_shift = J_set.translate((-cf.signed_qnorm(k)).mod1())
    crit = J_set.subtract(J_shift).union(J_shift.subtract(J_set))
    bad = IntervalUnion.empty()
    for j in range(j_lo, j_hi + 1):
        bad = bad.union(crit.translate((-j * alpha).mod1()))
    kept = halve_by_component_size(a_prime.subtract(bad))
    removed = a_prime.measure() - kept.measure_or_zero(d)
    return RefinedLevelSet(kept, kept.measure_or_zero(d), (lo_n, hi_n), removed)


def commutation_check(imap, x, m_hat, r_k, q_k, d=None):
    """Exact test of R^{q_k} T^{m_hat r_k} x == T^d T^{m_hat r_k} R^{q_k} x.

    With d given returns a bool; with d None (discovery mode) returns the
    unique d in {-3..3} satisfying it, or None.
    """
    alpha = imap.alpha
    x = x.mod1()
    if not imap.domain.contains(x):
        raise ValueError("x not in J")
    y = (x + q_k * alpha).mod1()
    if not imap.domain.contains(y):
        raise ValueError("R^{q_k} x not in J")
    lhs = (imap.power(x, m_hat * r_k) + q_k * alpha).mod1()
    base = imap.power(y, m_hat * r_k)
    if d is not None:
        return imap.power(base, d) == lhs if d else base == lhs
    found = None
    for cand in range(-3, 4):
        rhs = imap.power(base, cand) if cand else base
        if rhs == lhs:
            if found is not None:
                raise AssertionError("commutation exponent not unique")
            found = cand
    return found


def hitting_frequency(target, m_hat, y, count, imap):
    """Exact frequency (1/count) * #{i < count : T^{i m_hat} y in target}."""
    if count < 1:
        raise ValueError("count must be >= 1")
    y = y.mod1()
    hits = 0
    cur = y
    for i in range(count):
        if target.contains(cur):
            hits += 1
        if i + 1 < count:
            for _ in range(m_hat):
                cur = imap.apply(cur)
    return Fraction(hits, count)


@dataclass
class TowerResult:
    base: IntervalUnion  # V
    height: int
    union_measure: FieldElement
    level_measure: FieldElement
    covered_fraction: Fraction | None
    meets_half: bool


def tower_decomposition(level_set, stride, cf):
    """Select V inside a level set so the stride-many forward rotation
    translates of V are pairwise disjoint, stay in the level set, and
    cover more than half of it (when possible).

    V takes every stride-th point of each maximal orbit run through the
    level set; translate disjointness then follows and is re-verified
    exactly through measure additivity.
    """
    alpha = cf.alpha
    d = alpha.d
    zero = FieldElement.rational(0, 1, d)
    if level_set.is_empty():
        return TowerResult(IntervalUnion.empty(), stride, zero, zero, None, False)
    lam_s = level_set.measure()
    # W = points whose next `stride` rotation steps all stay in the set
    W = level_set
    for j in range(1, stride):
        W = W.intersection(level_set.translate((-j * alpha).mod1()))
        if W.is_empty():
            break
    if W.is_empty():
        return TowerResult(IntervalUnion.empty(), stride, zero, lam_s, Fraction(0), False)
    start = W.subtract(W.translate(alpha.mod1()))
    V = IntervalUnion.empty()
    block = start
    guard = 0
    while not block.is_empty():
        V = V.union(block)
        block = block.translate((stride * alpha).mod1()).intersection(W)
        guard += 1
        if guard > 100_000:
            raise RuntimeError("tower selection failed to terminate")
    union = IntervalUnion.empty()
    for j in range(stride):
        union = union.union(V.translate((j * alpha).mod1()))
    union_measure = union.measure_or_zero(d)
    v_measure = V.measure_or_zero(d)
    # disjointness of the translates, exactly, via additivity
    disjoint = union_measure == stride * v_measure
    if not disjoint:
        raise AssertionError("tower translates are not disjoint")
    # containment: every translate inside the level set
    if not union.subtract(level_set).is_empty():
        raise AssertionError("tower translate escapes the level set")
    frac = None
    half = (2 * union_measure - lam_s).sign() > 0
    return TowerResult(V, stride, union_measure, lam_s, frac, half)


def stability_excursion_measure(length, interval, r, cf, cap=None):
    """Exact measure of {x : the count over `length` steps changes within
    r further rotation steps}, i.e. union over 0 < j < r of the one-step
    change sets.  Returns (measure, change_set)."""
    alpha = cf.alpha
    d = alpha.d
    sf = psi_partition(length, interval, cf) if cap is None else psi_partition(
        length, interval, cf, cap=cap
    )
    # one-step change set: refine the partition with its -alpha translate
    pts = set(sf.breakpoints)
    pts.update(((b - alpha).mod1() for b in sf.breakpoints))
    pts = sorted(pts)
    changed = []
    for i, p in enumerate(pts):
        qn = pts[(i + 1) % len(pts)]
        width = (qn - p).mod1()
        if width.sign() == 0:
            continue
        mid = p + width / 2
        if sf.value_at(mid) != sf.value_at((mid + alpha).mod1()):
            changed.append((p, p + width))
    change1 = IntervalUnion(changed)
    total = change1
    for j in range(1, r - 1):
        total = total.union(change1.translate((-j * alpha).mod1()))
    return total.measure_or_zero(d), change1
