"""Exact circle rotation dynamics.

Points are FieldElements reduced mod 1.  Intervals are half open
[left, right) and may wrap through 0; IntervalUnion normalizes to
sorted disjoint non-wrapping pieces; StepFunction is an integer-valued
piecewise constant function on an exact partition of the circle.

The counting function psi_L(x) = #{l < L : x + l*alpha mod 1 in J} is
available three ways: by breakpoint sweep (psi_partition, the oracle,
O(L log L)), pointwise in O(log L) exact steps (psi_value, via the
continued-fraction floor-sum descent), and, for L = i*q_k, with exact
level measures in closed form (psi_level_measures) from the three-gap
chord structure of the orbit.
"""

from __future__ import annotations

from dataclasses import dataclass

from .field import FieldElement, floor_sum

SWEEP_CAP = 2_000_000  # breakpoints; beyond this only pointwise/structured


def circle_distance(x, y):
    """d(x, y) = min(|x - y|, 1 - |x - y|) on the circle, exact."""
    delta = abs((x - y).mod1() if isinstance(x - y, FieldElement) else (x - y))
    delta = delta.mod1()
    return min(delta, 1 - delta)


def rotate(x, n, cf):
    """x + n*alpha mod 1, exact for any integer n."""
    return (x + n * cf.alpha).mod1()


@dataclass(frozen=True)
class Interval:
    """Half-open arc [left, right); wraps through 0 when right <= left.

    Equal endpoints denote the full circle (measure 1).
    """

    left: FieldElement
    right: FieldElement

    @staticmethod
    def make(left, right):
        return Interval(left.mod1(), right.mod1())

    @property
    def wraps(self):
        return self.right <= self.left

    def measure(self):
        m = (self.right - self.left).mod1()
        return m if m.sign() != 0 else FieldElement.rational(1, 1, self.left.d)

    def contains(self, x):
        x = x.mod1()
        if self.left == self.right:
            return True
        if not self.wraps:
            return self.left <= x < self.right
        return x >= self.left or x < self.right

    def pieces(self):
        """Non-wrapping pieces [(l, r)] with 0 <= l < r <= 1."""
        one = FieldElement.rational(1, 1, self.left.d)
        zero = FieldElement.rational(0, 1, self.left.d)
        if self.left == self.right:
            return [(zero, one)]
        if not self.wraps:
            return [(self.left, self.right)]
        out = []
        if self.left < 1:
            out.append((self.left, one))
        if zero < self.right:
            out.append((zero, self.right))
        return out

    def translate(self, theta):
        return Interval((self.left + theta).mod1(), (self.right + theta).mod1())


class IntervalUnion:
    """Finite union of half-open arcs, kept sorted, disjoint, non-wrapping."""

    __slots__ = ("pieces",)

    def __init__(self, pieces=(), already_normal=False):
        if already_normal:
            self.pieces = list(pieces)
            return
        flat = []
        for piece in pieces:
            if isinstance(piece, Interval):
                flat.extend(piece.pieces())
            else:
                l, r = piece
                if l < r:
                    flat.append((l, r))
        flat.sort(key=lambda pr: pr[0])
        merged = []
        for l, r in flat:
            if merged and l <= merged[-1][1]:
                if r > merged[-1][1]:
                    merged[-1] = (merged[-1][0], r)
            else:
                merged.append((l, r))
        self.pieces = merged

    @staticmethod
    def empty():
        return IntervalUnion(())

    @staticmethod
    def from_interval(iv):
        return IntervalUnion(iv.pieces())

    def is_empty(self):
        return not self.pieces

    def measure(self):
        if not self.pieces:
            return None  # caller supplies the zero of its own field
        total = self.pieces[0][1] - self.pieces[0][0]
        for l, r in self.pieces[1:]:
            total = total + (r - l)
        return total

    def measure_or_zero(self, d):
        m = self.measure()
        return FieldElement.rational(0, 1, d) if m is None else m

    def contains(self, x):
        x = x.mod1()
        return any(l <= x < r for l, r in self.pieces)

    def n_components(self, circular=True):
        """Component count; with circular=True a piece ending at 1 and a
        piece starting at 0 are one arc."""
        n = len(self.pieces)
        if circular and n >= 2:
            first, last = self.pieces[0], self.pieces[-1]
            if first[0].sign() == 0 and last[1] == 1:
                n -= 1
        return n

    def component_lengths(self):
        return [r - l for l, r in self.pieces]

    def union(self, other):
        return IntervalUnion(self.pieces + other.pieces)

    def intersection(self, other):
        a, b = self.pieces, other.pieces
        if len(a) > len(b):
            a, b = b, a
        # when one operand is much smaller, bisect each small piece into
        # the big one instead of the linear two-pointer merge
        if b and len(a) * 8 < len(b):
            from bisect import bisect_right

            starts = [piece[0] for piece in b]
            out = []
            for l, r in a:
                j = max(0, bisect_right(starts, l) - 1)
                while j < len(b) and b[j][0] < r:
                    lo = max(l, b[j][0])
                    hi = min(r, b[j][1])
                    if lo < hi:
                        out.append((lo, hi))
                    j += 1
            return IntervalUnion(out, already_normal=True)
        out = []
        i = j = 0
        while i < len(a) and j < len(b):
            l = max(a[i][0], b[j][0])
            r = min(a[i][1], b[j][1])
            if l < r:
                out.append((l, r))
            if a[i][1] <= b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalUnion(out, already_normal=True)

    def complement(self, d):
        zero = FieldElement.rational(0, 1, d)
        one = FieldElement.rational(1, 1, d)
        out = []
        prev = zero
        for l, r in self.pieces:
            if prev < l:
                out.append((prev, l))
            prev = r
        if prev < one:
            out.append((prev, one))
        return IntervalUnion(out, already_normal=True)

    def subtract(self, other):
        if not self.pieces:
            return IntervalUnion.empty()
        d = self.pieces[0][0].d
        return self.intersection(other.complement(d))

    def translate(self, theta):
        out = []
        for l, r in self.pieces:
            out.extend(Interval((l + theta).mod1(), ((r + theta).mod1())).pieces()
                       if ((l + theta).mod1() >= (r + theta).mod1())
                       else [((l + theta).mod1(), (l + theta).mod1() + (r - l))])
        return IntervalUnion(out)

    def sample_points(self):
        """One interior point (the midpoint) per piece."""
        return [(l + r) / 2 for l, r in self.pieces]

    def __repr__(self):
        ps = ", ".join(f"[{float(l):.6f},{float(r):.6f})" for l, r in self.pieces)
        return f"IntervalUnion({ps})"


class StepFunction:
    """Integer-valued step function on an exact circular partition.

    breakpoints are sorted distinct points; cell i is
    [breakpoints[i], breakpoints[i+1]) with the last cell wrapping to
    breakpoints[0].
    """

    __slots__ = ("breakpoints", "values")

    def __init__(self, breakpoints, values):
        if len(breakpoints) != len(values):
            raise ValueError("need one value per cell")
        self.breakpoints = list(breakpoints)
        self.values = list(values)

    @staticmethod
    def from_events(events, anchor_value, d):
        """Build from (point, delta) events; anchor_value is the function
        value on the cell that starts at the smallest event point."""
        bag = {}
        for pt, delta in events:
            key = pt.mod1()
            bag[key] = bag.get(key, 0) + delta
        pts = sorted(bag)
        vals = []
        for i, p in enumerate(pts):
            vals.append(anchor_value if i == 0 else vals[-1] + bag[p])
        sf = StepFunction(pts, vals)
        sf._merge_equal()
        return sf

    def _merge_equal(self):
        if len(self.breakpoints) <= 1:
            return
        pts, vals = [], []
        for p, v in zip(self.breakpoints, self.values):
            if vals and vals[-1] == v:
                continue
            pts.append(p)
            vals.append(v)
        if len(vals) >= 2 and vals[0] == vals[-1]:
            # wrap-equal cells: drop the first breakpoint into the last cell
            pass
        self.breakpoints, self.values = pts, vals

    def value_at(self, x):
        x = x.mod1()
        pts = self.breakpoints
        lo, hi = 0, len(pts) - 1
        if x < pts[0]:
            return self.values[-1]
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if pts[mid] <= x:
                lo = mid
            else:
                hi = mid - 1
        return self.values[lo]

    def cells(self):
        """Yield (left, right, value) with the wrap cell split at 1."""
        n = len(self.breakpoints)
        d = self.breakpoints[0].d
        one = FieldElement.rational(1, 1, d)
        zero = FieldElement.rational(0, 1, d)
        for i in range(n):
            l = self.breakpoints[i]
            if i + 1 < n:
                yield l, self.breakpoints[i + 1], self.values[i]
            else:
                if l < one:
                    yield l, one, self.values[i]
                if zero < self.breakpoints[0]:
                    yield zero, self.breakpoints[0], self.values[i]

    def level_set(self, j):
        return IntervalUnion([(l, r) for l, r, v in self.cells() if v == j])

    def level_measures(self):
        out = {}
        for l, r, v in self.cells():
            out[v] = out.get(v, r - l) if v not in out else out[v] + (r - l)
        return out

    def value_range(self):
        return min(self.values), max(self.values)

    def csv_rows(self):
        """Rows (level, left_exact, right_exact, left_dec, right_dec,
        measure_dec) sorted by left endpoint."""
        rows = []
        for l, r, v in self.cells():
            rows.append((
                v,
                l.exact_str(),
                r.exact_str(),
                l.decimal_str(),
                r.decimal_str(),
                (r - l).decimal_str(),
            ))
        rows.sort(key=lambda row: row[3])
        return rows


# -- orbit statistics ---------------------------------------------------


def hit_count(x, interval, n, cf):
    """Number of i < n with x + i*alpha mod 1 in the interval (direct)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    count = 0
    y = x.mod1()
    alpha = cf.alpha
    for _ in range(n):
        if interval.contains(y):
            count += 1
        y = (y + alpha).mod1()
    return count


def hit_count_fast(x, interval, n, alpha):
    """Same count in O(log n) exact steps via floor-sum descent."""
    if n <= 0:
        return 0
    h = interval.measure()
    u = interval.left
    base = (x - u).mod1()
    return floor_sum(n, alpha, base) - floor_sum(n, alpha, base - h)


def psi_value(x, length, interval, cf):
    """psi_length(x): hits of [x, x+alpha, ...] (length terms) in interval."""
    return hit_count_fast(x, interval, length, cf.alpha)


def gap_audit(x, k, cf):
    """(min_gap, max_gap) of the sorted orbit {x + i*alpha}_{i<q_k}.

    Verifies the classical three-gap bounds: max <= 2||q_{k-1} a|| and
    min >= ||q_{k-1} a||, exactly.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    cf.require_irrational()
    n = cf.q[k]
    pts = sorted(rotate(x, i, cf) for i in range(n))
    if n == 1:
        one = FieldElement.rational(1, 1, cf.alpha.d)
        return one, one
    gaps = [pts[i + 1] - pts[i] for i in range(n - 1)]
    gaps.append(pts[0] + 1 - pts[-1])
    lo, hi = min(gaps), max(gaps)
    bound = cf.qnorm(k - 1)
    if hi > 2 * bound or lo < bound:
        raise AssertionError("three-gap bounds violated (internal error)")
    return lo, hi


def critical_interval(k, side, cf, z=None):
    """The parity-correct critical interval of width ||q_k alpha||.

    side 'zero': [-w, 0) for k odd, [0, w) for k even.
    side 'z':    [z-w, z) for k odd, [z, z+w) for k even.
    """
    w = cf.qnorm(k)
    zero = FieldElement.rational(0, 1, cf.alpha.d)
    if side == "zero":
        anchor = zero
    elif side == "z":
        if z is None:
            raise ValueError("side 'z' needs the endpoint z")
        anchor = z
    else:
        raise ValueError("side must be 'zero' or 'z'")
    if k % 2 == 1:
        return Interval.make(anchor - w, anchor)
    return Interval.make(anchor, anchor + w)


def return_partition(interval, cf, max_time=None):
    """First-return decomposition of the interval under the rotation.

    Returns {return_time: IntervalUnion}; by Kac the times weighted by
    measures sum to exactly 1.  max_time guards the scan (default is a
    generous multiple of 1/measure).
    """
    cf.require_irrational()
    d = cf.alpha.d
    base = IntervalUnion.from_interval(interval)
    if max_time is None:
        inv = 1 / interval.measure()
        max_time = 8 * (inv.floor() + 1)
    uncovered = base
    out = {}
    n = 0
    while not uncovered.is_empty():
        n += 1
        if n > max_time:
            raise RuntimeError(f"no full return by time {max_time}")
        preimage = IntervalUnion.from_interval(interval.translate(-n * cf.alpha))
        got = uncovered.intersection(preimage)
        if not got.is_empty():
            out[n] = got
            uncovered = uncovered.subtract(preimage)
    return out


# -- psi partitions ------------------------------------------------------


def psi_partition(length, interval, cf, cap=SWEEP_CAP):
    """Exact level sets of psi_length as a StepFunction (breakpoint sweep).

    Needs 2*length breakpoints; lengths above the cap must go through
    psi_level_measures or psi_value instead.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if 2 * length > cap:
        raise ValueError(f"{2 * length} breakpoints exceed the sweep cap {cap}")
    alpha = cf.alpha
    events = []
    for ell in range(length):
        shift = (-ell * alpha).mod1()
        events.append(((interval.left + shift).mod1(), 1))
        events.append(((interval.right + shift).mod1(), -1))
    # anchor: direct membership count at the first breakpoint
    pts = sorted({p for p, _ in events})
    anchor_pt = pts[0]
    anchor = sum(
        1 for ell in range(length) if interval.contains((anchor_pt + ell * alpha).mod1())
    )
    sf = StepFunction.from_events(events, anchor, alpha.d)
    return sf


def _structured_index(cf, length):
    """If length = i*q_k is usable for the closed form, return (i, k).

    Picks the largest convergent denominator dividing length such that
    the jittered grid clusters cannot interleave: 2*i*||q_k a|| < 1/q_k.
    """
    cf.require_irrational()
    for k in range(cf.depth, 0, -1):
        q = cf.q[k]
        if q < 2 or q > length or length % q:
            continue
        i = length // q
        if 2 * i * q * cf.qnorm(k) < 1:
            return i, k
    return None


def psi_level_measures(length, interval, cf, cap=SWEEP_CAP):
    """Exact measures {value: measure} of the level sets of psi_length.

    Uses the closed-form three-gap computation when length = i*q_k (any
    size), otherwise falls back to the breakpoint sweep under the cap.
    """
    idx = _structured_index(cf, length)
    if idx is not None:
        return _structured_level_measures(idx[0], idx[1], cf, interval.measure())
    sf = psi_partition(length, interval, cf, cap=cap)
    return sf.level_measures()


def _structured_level_measures(i, k, cf, width):
    """Level measures of the count of {x + l a}_{l < i q_k} in an arc.

    The i*q_k orbit points split into q_k grid clusters of i points with
    explicit jitters; spacings between sorted points s and s+step take
    O(1) values with arithmetic multiplicities, and the measure of
    {count >= j} is a sum over sliding-window arcs with both endpoints
    moving monotonically.
    """
    alpha = cf.alpha
    d = alpha.d
    q, p = cf.q[k], cf.p[k]
    delta = cf.signed_qnorm(k)  # q*alpha - p, signed
    if 2 * i * q * abs(delta) >= 1:
        raise ValueError("cluster condition fails; use the sweep")
    total = i * q
    sigma = pow(p % q, -1, q)  # p inverse mod q
    zero = FieldElement.rational(0, 1, d)
    one = FieldElement.rational(1, 1, d)

    def ellp(tcell):
        return (-tcell * sigma) % q

    def e_of(r):
        return (i - 1 - r) if delta.sign() > 0 else r

    def pos(s):
        """Sorted point s as a real (s in [0, total), increasing)."""
        tcell, r = divmod(s, i)
        return FieldElement.rational(tcell, q, d) - (
            FieldElement.rational(ellp(tcell) + e_of(r) * q, q, d) * delta
        )

    def spacing(s, step):
        """pos(s+step) - pos(s), cyclically (adds 1 per full wrap)."""
        s2 = s + step
        wraps, s2 = divmod(s2, total)
        return pos(s2) + wraps - pos(s)

    def mu_at_least(j):
        """Measure of {x : count(x) >= j} for j >= 1."""
        # contribution at sorted index s:  (min(width - D_{j-1}(s), D_1(s-1)))^+
        # where D_m(s) = pos(s+m) - pos(s).  Group indices by
        # (r = s mod i, cluster wrap cases); within a group both spacings
        # are constant, so evaluate on one representative and multiply.
        jm1 = j - 1
        tau, rho = divmod(jm1, i)
        acc = zero
        for r in range(i):
            count_check = 0
            cy = 1 if (r + rho) >= i else 0
            dcell = tau + cy  # cells advanced by j-1 steps
            w_fwd = (dcell * sigma) % q  # forward wrap threshold on ell'
            cy1 = 1 if r == 0 else 0  # D_1(s-1) crosses a cell iff r = 0
            w_bck = (cy1 * sigma) % q
            # ell'(t') ranges: split at w_fwd and q - w_bck (when active)
            cuts = {0, q}
            cuts.add(w_fwd % q)
            if cy1:
                cuts.add((q - w_bck) % q)
            cuts = sorted(c for c in cuts if 0 <= c <= q)
            for lo, hi in zip(cuts, cuts[1:]):
                if lo >= hi:
                    continue
                n_ell = hi - lo
                ell_rep = lo
                tcell_rep = (-ell_rep * p) % q  # inverse of ellp
                # choose representative away from tcell wrap issues: the
                # formulas are cyclic, any representative works.
                s_rep = tcell_rep * i + r
                d_fwd = spacing(s_rep, jm1) if jm1 else zero
                d_bck = spacing((s_rep - 1) % total, 1)
                contrib = min(width - d_fwd, d_bck)
                if contrib.sign() > 0:
                    acc = acc + n_ell * contrib
                count_check += n_ell
            if count_check != q:
                raise AssertionError("multiplicity bookkeeping error")
        return acc

    # attained levels cluster around total*width
    center = (total * width).floor()
    lo_j = max(0, center - 2 * i - 2)
    hi_j = center + 2 * i + 2
    cum = {}
    prev = one
    for j in range(lo_j + 1, hi_j + 2):
        m = mu_at_least(j)
        m = m if m.sign() > 0 else zero
        if m > prev:
            raise AssertionError("mu_{>=j} must be non-increasing")
        cum[j] = m
        prev = m
        if m.sign() == 0:
            break
    cum[lo_j] = one
    out = {}
    js = sorted(cum)
    for a, b in zip(js, js[1:]):
        diff = cum[a] - cum[b]
        if diff.sign() > 0:
            out[a] = diff
    last = js[-1]
    if cum[last].sign() > 0:
        out[last] = cum[last]
    # exact self-checks: total mass 1 and mean = length * width
    mass = zero
    mean = zero
    for j, m in out.items():
        mass = mass + m
        mean = mean + j * m
    if mass != one:
        raise AssertionError("level measures do not sum to 1")
    if mean != total * width:
        raise AssertionError("level mean does not equal length * width")
    return out
