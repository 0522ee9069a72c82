"""3-interval exchange maps realized as induced maps of circle rotations.

The induced (first-return) map of the rotation by alpha on J = [0, z)
is computed exactly from the return-time decomposition of J, which by
the three-gap theorem has at most three branches.  The standing
arrangement z >= max(alpha, 1 - alpha) (equivalent to: the complement
of J returns in one step) is required by IETSystem but not by the raw
InducedMap, which works for any subinterval.
"""

from __future__ import annotations

from dataclasses import dataclass

from .field import FieldElement, floor_sum
from .circle import Interval, IntervalUnion, return_partition, hit_count_fast

DIRECT_POWER_LIMIT = 1000  # above this, T^k goes through the counting identity


class StandingAssumptionError(ValueError):
    """z violates z >= max(alpha, 1 - alpha)."""


@dataclass(frozen=True)
class LengthData:
    """Exchange data (l1, l2, l3) for the permutation (3 2 1)."""

    l1: FieldElement
    l2: FieldElement
    l3: FieldElement

    def __post_init__(self):
        for ell in (self.l1, self.l2, self.l3):
            if ell.sign() <= 0:
                raise ValueError("lengths must be positive")

    def total(self):
        return self.l1 + self.l2 + self.l3


def lengths_to_rotation(lengths):
    """(alpha, z) of the rotation whose induced map exchanges the lengths.

    With tau = l1 + 2*l2 + l3: alpha = (l2 + l3)/tau and z = (l1+l2+l3)/tau;
    the returned pair automatically satisfies z >= max(alpha, 1 - alpha).
    Raises ValueError when alpha is rational (degenerate rotation).
    """
    tau = lengths.l1 + 2 * lengths.l2 + lengths.l3
    alpha = (lengths.l2 + lengths.l3) / tau
    z = lengths.total() / tau
    if alpha.is_rational:
        raise ValueError("degenerate data: rotation number is rational")
    return alpha, z


def rotation_to_lengths(alpha, z):
    """Inverse of lengths_to_rotation on normalized data (circle length 1)."""
    one = FieldElement.rational(1, 1, alpha.d)
    l1 = z - alpha
    l2 = one - z
    l3 = alpha - (one - z)
    if l1.sign() == 0 or l3.sign() == 0:
        raise ValueError("degenerate: an exchanged interval has length zero")
    if l1.sign() < 0 or l3.sign() < 0:
        raise StandingAssumptionError("need z >= max(alpha, 1 - alpha)")
    return LengthData(l1, l2, l3)


class InducedMap:
    """First-return map of the rotation by alpha to J = [0, z), exact.

    Branches are precomputed: on piece_i the map is x -> x + t_i*alpha
    mod 1 with return time t_i.  Works for any z in (0, 1); at most
    three branches by the three-gap theorem.
    """

    def __init__(self, cf, z):
        cf.require_irrational()
        self.cf = cf
        self.alpha = cf.alpha
        self.z = z
        d = self.alpha.d
        zero = FieldElement.rational(0, 1, d)
        if not (zero < z < 1):
            raise ValueError("z must lie in (0, 1)")
        self.domain = Interval.make(zero, z)
        self._branches = self._build(self.alpha)
        self._inverse_branches = self._build((1 - self.alpha).mod1())
        if len(self._branches) > 3:
            raise AssertionError("more than three return branches")

    def _build(self, step):
        """Return-time pieces for the rotation x -> x + step."""
        # reuse return_partition against a temporary one-step rotation
        d = step.d
        zero = FieldElement.rational(0, 1, d)
        base = IntervalUnion.from_interval(self.domain)
        uncovered = base
        branches = []
        n = 0
        inv = 1 / self.domain.measure()
        cap = 16 * (inv.floor() + 2)
        while not uncovered.is_empty():
            n += 1
            if n > cap:
                raise RuntimeError("return-time scan exceeded cap")
            pre = IntervalUnion.from_interval(self.domain.translate(-n * step))
            got = uncovered.intersection(pre)
            if not got.is_empty():
                branches.append((n, got, (n * step).mod1()))
                uncovered = uncovered.subtract(pre)
        return branches

    def branch_lengths(self):
        """The exchanged lengths, left to right on the domain."""
        cuts = []
        for _, piece, _ in self._branches:
            cuts.extend(piece.pieces)
        cuts.sort(key=lambda pr: pr[0])
        return [r - l for l, r in cuts]

    def return_times(self):
        return sorted(t for t, _, _ in self._branches)

    def _step(self, x, branches):
        for t, piece, offset in branches:
            if piece.contains(x):
                return (x + offset).mod1(), t
        raise ValueError("point outside the induced domain")

    def apply(self, x):
        if not self.domain.contains(x):
            raise ValueError("x not in J")
        return self._step(x, self._branches)[0]

    def apply_inverse(self, x):
        if not self.domain.contains(x):
            raise ValueError("x not in J")
        return self._step(x, self._inverse_branches)[0]

    def visit_count(self, x, m):
        """psi_m(x): visits of x, Rx, ..., R^{m-1}x to J, in O(log m)."""
        return hit_count_fast(x, self.domain, m, self.alpha)

    def _kth_visit_time(self, x, k):
        """Smallest t with R^t x in J and exactly k visits before t."""
        lo, hi = 0, 8 * (k + 2) * (1 + (1 / self.z).floor())
        while self.visit_count(x, hi + 1) < k + 1:
            hi *= 2
        # smallest t with visit_count(t+1) >= k+1
        while lo < hi:
            mid = (lo + hi) // 2
            if self.visit_count(x, mid + 1) >= k + 1:
                hi = mid
            else:
                lo = mid + 1
        return lo

    def power(self, x, k):
        """T^k x, exact; direct iteration for small |k|, else through the
        visit-counting identity S^{psi_M(x)} x = R^M x."""
        if not self.domain.contains(x):
            raise ValueError("x not in J")
        if k == 0:
            return x.mod1()
        if abs(k) <= DIRECT_POWER_LIMIT:
            y = x.mod1()
            stepper = self.apply if k > 0 else self.apply_inverse
            for _ in range(abs(k)):
                y = stepper(y)
            return y
        if k > 0:
            t = self._kth_visit_time(x, k)
            return (x + t * self.alpha).mod1()
        # negative power: count visits of the backward orbit
        back = (1 - self.alpha).mod1()
        count = 0
        y = x.mod1()
        # backward k-th visit via doubling + bisection on the reversed rotation
        kk = -k
        lo, hi = 1, 8 * (kk + 2) * (1 + (1 / self.z).floor())
        def back_visits(m):
            # visits of x - alpha, ..., x - m*alpha to J
            return hit_count_fast((x - self.alpha).mod1(), self.domain, m, back)
        while back_visits(hi) < kk:
            hi *= 2
        while lo < hi:
            mid = (lo + hi) // 2
            if back_visits(mid) >= kk:
                hi = mid
            else:
                lo = mid + 1
        return (x - lo * self.alpha).mod1()

    def orbit(self, x, count):
        """x, Tx, ..., T^{count-1}x by direct iteration."""
        out = []
        y = x.mod1()
        for _ in range(count):
            out.append(y)
            y = self.apply(y)
        return out


@dataclass(frozen=True)
class IETSystem:
    """Rotation data (alpha via cf, z) under the standing arrangement."""

    cf: object
    z: FieldElement

    def __post_init__(self):
        self.cf.require_irrational()
        alpha = self.cf.alpha
        if self.z < alpha or self.z < 1 - alpha:
            raise StandingAssumptionError(
                "need z >= max(alpha, 1 - alpha); use InducedMap for general z"
            )
        if self.z >= 1:
            raise ValueError("z must lie in (0, 1)")

    @property
    def alpha(self):
        return self.cf.alpha

    def induced_map(self):
        return InducedMap(self.cf, self.z)

    def lengths(self):
        return rotation_to_lengths(self.alpha, self.z)

    def to_json_dict(self):
        ld = self.lengths()
        return {
            "alpha_exact": self.alpha.exact_str(),
            "z_exact": self.z.exact_str(),
            "d": self.alpha.d,
            "lengths_decimal": [
                float(ld.l1),
                float(ld.l2),
                float(ld.l3),
            ],
        }


def iet_apply(system, x, k=1):
    """T^k x for the system's induced map (x must lie in J)."""
    imap = system.induced_map() if isinstance(system, IETSystem) else system
    return imap.power(x, k)


def induced_identity_check(system, x, m):
    """Exact check of T^{psi_m(x)} x == R^m x.

    Preconditions x in J and R^m x in J are reported via ValueError, not
    as a failure of the identity.  The left side iterates the induced
    map directly; the right side is a single exact rotation.
    """
    imap = system.induced_map() if isinstance(system, IETSystem) else system
    x = x.mod1()
    if not imap.domain.contains(x):
        raise ValueError("x not in J")
    target = (x + m * imap.alpha).mod1()
    if not imap.domain.contains(target):
        raise ValueError("R^m x not in J")
    if m == 0:
        return True
    k = imap.visit_count(x, m)
    y = x
    for _ in range(k):
        y = imap.apply(y)
    return y == target
