"""Mobius function sieve, correlation sums, and additive-function
variance diagnostics.

The sieve is a vectorized multiplicative sieve cross-validated against
trial factorization; correlation sums accumulate with math.fsum so the
result is correctly rounded; the variance inequality is evaluated in
exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


def _primes_upto(n):
    if n < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def mobius_sieve(n):
    """MobiusTable of mu(1..n) (vectorized multiplicative sieve)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    mu = np.ones(n + 1, dtype=np.int8)
    for p in _primes_upto(n):
        mu[p::p] *= -1
        p2 = p * p
        if p2 <= n:
            mu[p2::p2] = 0
    mu[0] = 0
    return MobiusTable(int(n), mu)


def mobius_by_factorization(n):
    """mu(n) by trial division; the independent oracle for the sieve."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out, m, count = 1, n, 0
    p = 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            count += 1
        p += 1
    if m > 1:
        count += 1
    return -1 if count % 2 else 1


@dataclass(frozen=True)
class MobiusTable:
    n: int
    values: np.ndarray  # int8, index 0 unused

    def mu(self, k):
        return int(self.values[k])

    def mertens(self, k):
        return int(self.values[1 : k + 1].astype(np.int64).sum())


def correlation_sum(samples, table, checkpoints=True):
    """(1/N) sum_{n=1..N} mu(n) * samples[n-1], with power-of-ten partials.

    samples is a sequence of float values f(T^n x) for n = 1..N. Returns
    (normalized_value, [(n_checkpoint, partial_sum, normalized)]).
    """
    samples = np.asarray(samples, dtype=np.float64)
    n = len(samples)
    if n < 1:
        raise ValueError("need at least one sample")
    if table.n < n:
        raise ValueError("Mobius table too short for the sample length")
    mu = table.values[1 : n + 1].astype(np.float64)
    terms = mu * samples
    rows = []
    if checkpoints:
        mark = 10
        while mark <= n:
            part = math.fsum(terms[:mark])
            rows.append((mark, part, part / mark))
            mark *= 10
    total = math.fsum(terms)
    if not rows or rows[-1][0] != n:
        rows.append((n, total, total / n))
    return total / n, rows


def omega_small_primes(n, prime_cutoff):
    """Array w[0..n]: number of distinct prime divisors <= prime_cutoff."""
    w = np.zeros(n + 1, dtype=np.int64)
    for p in _primes_upto(prime_cutoff):
        w[p::p] += 1
    return w


@dataclass(frozen=True)
class TKReport:
    n: int
    prime_cutoff: int
    mu_tau: Fraction
    variance: Fraction
    bound: Fraction

    @property
    def holds(self):
        return self.variance <= self.bound

    def to_json_dict(self):
        return {
            "N": self.n,
            "prime_cutoff": self.prime_cutoff,
            "mu_tau": str(self.mu_tau),
            "variance": str(self.variance),
            "bound": str(self.bound),
            "variance_le_bound": self.holds,
        }


def tk_stats(n, prime_cutoff):
    """Exact variance of the small-prime divisor count against its mean.

    Returns TKReport with mu_tau = sum_{p <= P} 1/p, the exact variance
    V = sum_{m <= n} (w(m) - mu_tau)^2 and the exact proof-side bound
    B = sum_{p,q <= P} floor(n/pq) - n*mu_tau^2 + n*mu_tau + 2*mu_tau*pi(P).
    """
    if prime_cutoff < 2 or n < 1:
        raise ValueError("need prime_cutoff >= 2 and n >= 1")
    primes = [int(p) for p in _primes_upto(prime_cutoff)]
    mu_tau = sum((Fraction(1, p) for p in primes), Fraction(0))
    w = omega_small_primes(n, prime_cutoff)[1:]
    s1 = int(w.sum())
    s2 = int((w.astype(object) ** 2).sum()) if n > 2**31 else int((w * w).sum())
    variance = Fraction(s2) - 2 * mu_tau * s1 + n * mu_tau * mu_tau
    pair_sum = sum(n // (p * q) for p in primes for q in primes)
    bound = pair_sum - n * mu_tau * mu_tau + n * mu_tau + 2 * mu_tau * len(primes)
    return TKReport(n, prime_cutoff, mu_tau, variance, bound)


def bilinear_diagnostic(samples, prime_cutoff, table):
    """Observational dyadic-block bilinear sums.

    samples[m-1] = f-value at m, for m = 1..N.  For each dyadic block
    2^j <= k < 2^{j+1} reports sum_k |mu(k)| * |sum_{p <= min(P, N/k)}
    mu(p) f(pk)| plus the diagonal / off-diagonal split of the squared
    inner sums.
    """
    samples = np.asarray(samples, dtype=np.float64)
    n = len(samples)
    primes = [int(p) for p in _primes_upto(prime_cutoff)]
    rows = []
    j = 0
    while 2**j <= n:
        lo, hi = 2**j, min(2 ** (j + 1), n + 1)
        block = 0.0
        diag = 0.0
        off = 0.0
        for k in range(lo, hi):
            if table.mu(k) == 0:
                continue
            inner = [
                table.mu(p) * samples[p * k - 1] for p in primes if p * k <= n
            ]
            s = math.fsum(inner)
            block += abs(s)
            dterm = math.fsum(v * v for v in inner)
            diag += dterm
            off += s * s - dterm
        rows.append({"j": j, "block_sum": block, "diagonal": diag, "off_diagonal": off})
        j += 1
    return rows
