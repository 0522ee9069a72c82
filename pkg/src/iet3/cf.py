"""Continued fractions, convergents, and Ostrowski numeration.

Digits are indexed a_1, a_2, ... with a_0 = 0 fixed for alpha in (0,1).
Convergents use q_{-1} = 0, q_0 = 1; the signed error <<q_k alpha>> is
q_k*alpha - p_k, which equals (-1)^k * |q_k alpha - p_k| exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from sympy import factorint

from .field import FieldElement


class RationalAlphaError(ValueError):
    """Operation requires an irrational rotation number."""


def square_free_split(n):
    """n = s^2 * d with d square-free; returns (s, d)."""
    if n <= 0:
        raise ValueError("need a positive integer")
    s, d = 1, 1
    for p, e in factorint(n).items():
        s *= p ** (e // 2)
        if e % 2:
            d *= p
    return s, d


def cf_expand(alpha, depth):
    """Gauss-map digits a_1..a_depth of alpha in (0,1), exactly.

    Returns (digits, terminated); terminated is True when alpha is
    rational and the expansion ended before reaching depth.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if not (FieldElement.rational(0, 1, alpha.d) < alpha < 1):
        raise ValueError("alpha must lie in (0, 1)")
    digits = []
    x = alpha
    for _ in range(depth):
        if x.sign() == 0:
            return digits, True
        inv = 1 / x
        a = inv.floor()
        digits.append(a)
        x = inv - a
    return digits, x.sign() == 0


@dataclass(frozen=True)
class ContinuedFraction:
    """alpha together with digits, convergents and exact norms."""

    alpha: FieldElement
    digits: tuple
    terminated: bool
    p: tuple  # p_0 .. p_K
    q: tuple  # q_0 .. q_K

    @staticmethod
    def expand(alpha, depth=60):
        digits, terminated = cf_expand(alpha, depth)
        if not digits:
            raise ValueError("empty digit sequence")
        p = [0, 1]  # p_0, p_1 seeds: p_{-1}=1 folded in below
        q = [1]
        pm1, p0 = 1, 0  # p_{-1}, p_0
        qm1, q0 = 0, 1
        ps, qs = [p0], [q0]
        for a in digits:
            pm1, p0 = p0, a * p0 + pm1
            qm1, q0 = q0, a * q0 + qm1
            ps.append(p0)
            qs.append(q0)
        return ContinuedFraction(alpha, tuple(digits), terminated, tuple(ps), tuple(qs))

    @property
    def depth(self):
        return len(self.digits)

    @property
    def is_rational(self):
        return self.terminated

    def require_irrational(self):
        if self.terminated:
            raise RationalAlphaError("alpha is rational")

    def digit(self, k):
        """Partial quotient a_k (k >= 1)."""
        return self.digits[k - 1]

    def signed_qnorm(self, k):
        """<<q_k alpha>> = q_k*alpha - p_k, exact (sign (-1)^k)."""
        return self.q[k] * self.alpha - self.p[k]

    def qnorm(self, k):
        """||q_k alpha|| = |q_k alpha - p_k|, exact."""
        return abs(self.signed_qnorm(k))

    def convergent_rows(self, upto=None):
        """Rows (k, p_k, q_k, ||q_k a||, <<q_k a>>) for k = 0..upto."""
        upto = self.depth if upto is None else upto
        rows = []
        for k in range(upto + 1):
            s = self.signed_qnorm(k)
            rows.append((k, self.p[k], self.q[k], abs(s), s))
        return rows

    def denominator_index(self, bound):
        """Largest k with q_k <= bound (bound >= 1)."""
        k = 0
        while k + 1 <= self.depth and self.q[k + 1] <= bound:
            k += 1
        return k


def convergents(alpha, depth=60):
    """Convenience wrapper: expand alpha and return the table rows."""
    cf = ContinuedFraction.expand(alpha, depth)
    return cf.convergent_rows()


def cf_from_periodic(preperiod, period):
    """The alpha in (0,1) whose expansion is preperiod then period forever.

    All digits must be >= 1; the result is an exact quadratic irrational
    (its defining polynomial is solved in integers, the radicand is made
    square-free by factorization).
    """
    period = list(period)
    preperiod = list(preperiod)
    if not period:
        raise ValueError("period must be nonempty")
    if any(a < 1 for a in preperiod + period):
        raise ValueError("all digits must be >= 1")
    # y = 1/(a1 + 1/(a2 + ... + 1/(an + y)));  each step is the matrix
    # [[0, 1], [1, a]] acting projectively, composed outermost-first, so
    # the cycle map is (A y + B)/(C y + D) with the product built from
    # the innermost digit outward.
    A, B, C, D = 1, 0, 0, 1
    for a in reversed(period):
        A, B, C, D = C, D, A + a * C, B + a * D
    # y = (A y + B)/(C y + D)  =>  C y^2 + (D - A) y - B = 0
    disc = (D - A) * (D - A) + 4 * B * C
    s, d = square_free_split(disc)
    if d == 1:
        raise ValueError("period describes a rational value")
    y = FieldElement(A - D, s, 2 * C, d)
    if not (FieldElement.rational(0, 1, d) < y < 1):
        y = FieldElement(A - D, -s, 2 * C, d)
    for a in reversed(preperiod):
        y = 1 / (a + y)
    return y


@dataclass(frozen=True)
class OstrowskiCode:
    """Digits b_1..b_K of x = sum b_i <<q_{i-1} alpha>>."""

    digits: tuple

    def __post_init__(self):
        if any(b < 0 for b in self.digits):
            raise ValueError("digits must be non-negative")

    def validate(self, cf):
        """Check b_i <= a_i and the no-consecutive-max rule."""
        if len(self.digits) > cf.depth:
            raise ValueError("code longer than expansion depth")
        for i, b in enumerate(self.digits, start=1):
            if b > cf.digit(i):
                raise ValueError(f"digit b_{i}={b} exceeds a_{i}={cf.digit(i)}")
            if b == cf.digit(i) and i < len(self.digits) and self.digits[i] != 0:
                raise ValueError(f"b_{i} maximal but b_{i + 1} nonzero")
        return self

    def orbit_index(self, cf):
        """r = sum b_i q_{i-1}: the code decodes to the orbit point r*alpha."""
        return sum(b * cf.q[i - 1] for i, b in enumerate(self.digits, start=1))


def ostrowski_decode(code, cf):
    """Exact value sum b_i <<q_{i-1} alpha>> of an admissible code."""
    code.validate(cf)
    val = FieldElement.rational(0, 1, cf.alpha.d)
    for i, b in enumerate(code.digits, start=1):
        if b:
            val = val + b * cf.signed_qnorm(i - 1)
    return val


def _tail_bounds(cf, depth):
    """Valid remainder intervals [lo_i, hi_i] for tails starting at digit i.

    Computed by backward induction over levels with the coupled
    digit-max rule; index i runs 1..depth+1 (the last entry bounds the
    truncation remainder itself).
    """
    zero = FieldElement.rational(0, 1, cf.alpha.d)
    # state: (lo_free, hi_free) when digit i is unconstrained,
    #        tails from beyond the expansion bounded by +-||q_{depth} a||.
    tailcap = cf.qnorm(depth)
    lo = [zero] * (depth + 2)
    hi = [zero] * (depth + 2)
    lo[depth + 1] = -tailcap
    hi[depth + 1] = tailcap
    for i in range(depth, 0, -1):
        t = cf.signed_qnorm(i - 1)
        a = cf.digit(i)
        cands = [lo[i + 1], hi[i + 1], a * t + lo[i + 1], a * t + hi[i + 1]]
        lo[i] = min(cands)
        hi[i] = max(cands)
    return lo, hi


def ostrowski_encode(x, cf, depth=None):
    """Admissible digits b_1..b_depth whose decode is within ||q_K alpha|| of x.

    x must lie in [0, 1); the greedy digit at each level is pinned by the
    exact remainder-range invariant, so the result is deterministic.
    """
    cf.require_irrational()
    depth = cf.depth if depth is None else depth
    if depth > cf.depth:
        raise ValueError("depth exceeds expansion depth")
    zero = FieldElement.rational(0, 1, cf.alpha.d)
    if not (zero <= x < 1):
        raise ValueError("x must lie in [0, 1)")
    lo, hi = _tail_bounds(cf, depth)
    digits = []
    rem = x
    forced_zero = False
    for i in range(1, depth + 1):
        t = cf.signed_qnorm(i - 1)
        a = cf.digit(i)
        if forced_zero:
            b = 0
        else:
            # pick the admissible b with rem - b*t inside the next range
            b = None
            # |t| scale estimate first, then exact fix-up over candidates
            guess = (rem / abs(t)).floor()
            for cand in range(max(0, guess - 2), min(a, guess + 2) + 1):
                nxt = rem - cand * t
                if lo[i + 1] <= nxt <= hi[i + 1]:
                    b = cand
                    break
            if b is None:
                raise ArithmeticError(f"no admissible digit at level {i}")
        digits.append(b)
        rem = rem - b * t
        forced_zero = (b == a) and not forced_zero
    return OstrowskiCode(tuple(digits))
