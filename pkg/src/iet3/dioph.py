"""Checker and witness search for the diophantine conditions on (alpha, z).

The ten conditions (indexed A0..A9) are first-order statements about
exact quantities: convergent brackets, digit bounds, orbit approach
times between the marked points, dominance of an extreme level of the
counting function, displacement smallness, scale separation, bounded
value range, and the admissible-length form.  The checker scans
admissible lengths, keeps the candidates satisfying everything, and
reports the minimal constants validated by those witnesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .field import FieldElement
from .circle import Interval, psi_level_measures
from .renorm import vertical_approach

ETA_MAX = Fraction(1, 96 * 25)


@dataclass(frozen=True)
class AssumptionConfig:
    eta: Fraction = Fraction(1, 2400)
    ell: int = 2
    c: Fraction = Fraction(1, 5)
    k_max: int = 15
    witness_count: int = 5
    a6_threshold: Fraction = Fraction(1, 1000)
    c4_cap: Fraction = Fraction(64)
    approach_horizon_factor: int = 4

    def __post_init__(self):
        if not (0 < self.eta <= ETA_MAX):
            raise ValueError(f"eta must lie in (0, {ETA_MAX}]")
        if not (0 < self.c):
            raise ValueError("c must be positive")


@dataclass
class Witness:
    length: int  # L_i
    k: int  # k_i from the convergent bracket
    v: int  # q_v <= L < q_{v+1}
    p: int  # L = p * q_v
    u: int  # dominant level of the counting function
    s: float  # snap offset log(L) - t when driven by a time t (else 0)
    dominant_mass: FieldElement
    tail_mass: FieldElement
    tail_side: str  # 'below' or 'above'
    a6_value: FieldElement  # ||L alpha||
    approach_steps: int  # minimal marked-point approach time
    c4_needed: Fraction
    digits: tuple  # (a_k, a_{k+1}, a_{k+2})
    value_range: tuple


@dataclass
class AssumptionReport:
    alpha_exact: str
    z_exact: str
    config: AssumptionConfig
    verdicts: dict
    witnesses: list
    constants: dict
    notes: list = field(default_factory=list)

    @property
    def all_true(self):
        return all(v is True for v in self.verdicts.values())

    def to_json_dict(self):
        return {
            "alpha": self.alpha_exact,
            "z": self.z_exact,
            "config": {
                "eta": str(self.config.eta),
                "ell": self.config.ell,
                "c": str(self.config.c),
                "k_max": self.config.k_max,
                "witness_count": self.config.witness_count,
                "a6_threshold": str(self.config.a6_threshold),
                "c4_cap": str(self.config.c4_cap),
            },
            "verdicts": {k: (v if isinstance(v, str) else bool(v))
                         for k, v in self.verdicts.items()},
            "witnesses": [
                {
                    "L": w.length,
                    "k": w.k,
                    "v": w.v,
                    "p": w.p,
                    "u": w.u,
                    "s": w.s,
                    "dominant_mass": w.dominant_mass.exact_str(),
                    "tail_mass": w.tail_mass.exact_str(),
                    "tail_side": w.tail_side,
                    "displacement": w.a6_value.exact_str(),
                    "approach_steps": w.approach_steps,
                    "c4_needed": str(w.c4_needed),
                    "digits": list(w.digits),
                    "value_range": list(w.value_range),
                }
                for w in self.witnesses
            ],
            "constants": {
                k: (
                    v.exact_str()
                    if isinstance(v, FieldElement)
                    else (v if isinstance(v, (int, float)) else str(v))
                )
                for k, v in self.constants.items()
            },
            "notes": self.notes,
        }


def admissible_length(cf, t):
    """An admissible length L with |log L - t| <= 2.

    L is either a convergent denominator q_j, or p*q_j with
    p <= floor(a_{j+1}/4) when a_{j+1} > 4; among the admissible
    candidates the one with the smallest snap |log L - t| wins.
    Returns (L, s, v, p) with s = log(L) - t.
    """
    cf.require_irrational()
    if t <= 0:
        raise ValueError("t must be positive")
    et = math.exp(t)
    j = cf.denominator_index(int(et) + 1)
    while j + 1 <= cf.depth and cf.q[j] <= et and math.log(cf.q[j + 1]) <= t:
        j += 1
    if j + 1 > cf.depth:
        raise ValueError("expansion too shallow for this t")
    candidates = [(cf.q[j], j, 1), (cf.q[j + 1], j + 1, 1)]
    a_next = cf.digit(j + 1)
    if a_next > 4:
        for p in range(2, a_next // 4 + 1):
            candidates.append((p * cf.q[j], j, p))
    best = None
    for length, v, p in candidates:
        s = math.log(length) - t
        if abs(s) <= 2 and (best is None or abs(s) < abs(best[1])):
            best = (length, s, v, p)
    if best is None:
        raise ArithmeticError("no admissible length within the snap window")
    return best


def _dominant_extreme_level(measures, eta):
    """Pick the extreme-end level per the three-extreme-mass recipe.

    Scans the three smallest and three largest attained levels; for each
    candidate u the outer tail (strictly beyond u on its side) must be
    smaller than eta times the mass of u.  Ties break toward the
    smaller tail.  Returns (u, mass, tail, side) or None.
    """
    levels = sorted(measures)
    zero_like = None
    best = None
    for side, cand in (("below", levels[:3]), ("above", levels[-3:])):
        for u in cand:
            mass = measures[u]
            if side == "below":
                outer = [measures[j] for j in levels if j < u]
            else:
                outer = [measures[j] for j in levels if j > u]
            tail = None
            for t in outer:
                tail = t if tail is None else tail + t
            if tail is None:
                tail = mass - mass  # exact zero in the right field
            if tail < eta * mass:
                key = (tail, -float(mass))
                if best is None or key < best[0]:
                    best = (key, u, mass, tail, side)
    if best is None:
        return None
    _, u, mass, tail, side = best
    return u, mass, tail, side


def check_assumptions(cf, z, config=None):
    """Scan admissible lengths and certify the ten conditions on (alpha, z).

    Existence-style conditions report True when enough witnesses are
    found, the string 'not established in range' when the scan ran out,
    and False only when the condition itself rejected otherwise-valid
    candidates (the approach condition can genuinely fail, e.g. when a
    marked point lies on the orbit of the other).
    """
    config = config or AssumptionConfig()
    cf.require_irrational()
    d = cf.alpha.d
    z = z.mod1()
    J = Interval.make(FieldElement.rational(0, 1, d), z)
    eta = config.eta
    names = [f"A{i}" for i in range(10)]
    rejected_by = {nm: 0 for nm in names}
    candidates_seen = 0
    witnesses = []
    notes = []

    # candidate lengths of the admissible form, ascending
    cands = []
    for v in range(1, cf.depth):
        cands.append((cf.q[v], v, 1))
        if cf.digit(v + 1) > 4:
            for p in range(2, cf.digit(v + 1) // 4 + 1):
                cands.append((p * cf.q[v], v, p))
    cands.sort()

    prev_a6 = None
    for length, v, p in cands:
        cl = config.c * length
        k = None
        for kk in range(1, min(cf.depth, config.k_max) + 1):
            if cf.q[kk - 1] < cl < cf.q[kk]:
                k = kk
                break
        if k is None:
            continue  # A0 bracket not available in range
        if k + max(2, config.ell) > cf.depth:
            break
        candidates_seen += 1
        reasons = []

        digits = (cf.digit(k), cf.digit(k + 1), cf.digit(k + 2))

        # approach condition between the marked points at scale k
        horizon = config.approach_horizon_factor * cf.q[k]
        j_min, _, _, _ = vertical_approach(cf, z, k, horizon)
        c4_needed = Fraction(cf.q[k], j_min)
        if c4_needed > config.c4_cap:
            reasons.append("A4")

        # dominant extreme level of the counting function
        measures = psi_level_measures(length, J, cf)
        picked = _dominant_extreme_level(measures, eta)
        if picked is None:
            reasons.append("A5")
            u = mass = tail = side = None
        else:
            u, mass, tail, side = picked

        # displacement smallness along the witness sequence
        a6 = cf.qnorm(v) if p == 1 else abs(length * cf.alpha - (length * cf.alpha).floor())
        a6 = min(a6, 1 - a6)
        if not (a6 <= config.a6_threshold):
            reasons.append("A6")
        elif prev_a6 is not None and not (a6 < prev_a6):
            reasons.append("A6")

        # scale separation
        if not (length > cf.q[k + config.ell]):
            reasons.append("A7")

        # bounded value range
        vr = (min(measures), max(measures))
        k_c_bound = 5 + 2 * (p - 1)
        if not (vr[1] - vr[0] < k_c_bound):
            reasons.append("A8")

        if reasons:
            for nm in reasons:
                rejected_by[nm] += 1
            continue
        prev_a6 = a6
        witnesses.append(
            Witness(
                length=length,
                k=k,
                v=v,
                p=p,
                u=u,
                s=0.0,
                dominant_mass=mass,
                tail_mass=tail,
                tail_side=side,
                a6_value=a6,
                approach_steps=j_min,
                c4_needed=c4_needed,
                digits=digits,
                value_range=vr,
            )
        )
        if len(witnesses) >= config.witness_count:
            break

    enough = len(witnesses) >= min(config.witness_count, 1)
    full = len(witnesses) >= config.witness_count

    def existence_verdict():
        if full:
            return True
        return "not established in range"

    verdicts = {}
    verdicts["A0"] = existence_verdict() if candidates_seen else "not established in range"
    for nm, idx in (("A1", 0), ("A2", 1), ("A3", 2)):
        verdicts[nm] = existence_verdict()
    if rejected_by["A4"] and not full:
        verdicts["A4"] = False
        notes.append("approach condition rejected candidates "
                     f"({rejected_by['A4']} of them); first rejection is decisive")
    else:
        verdicts["A4"] = existence_verdict()
    for nm in ("A5", "A6", "A7", "A8", "A9"):
        verdicts[nm] = existence_verdict()

    constants = {}
    if enough:
        constants["C1"] = max(w.digits[0] for w in witnesses) + 1
        constants["C2"] = max(w.digits[1] for w in witnesses) + 1
        constants["C3"] = max(w.digits[2] for w in witnesses) + 1
        constants["C4"] = max(w.c4_needed for w in witnesses)
        constants["c_hat_eta"] = min(w.dominant_mass for w in witnesses)
        constants["k_c"] = max(5 + 2 * (w.p - 1) for w in witnesses)
    constants["eta"] = eta
    constants["ell"] = config.ell
    constants["c"] = config.c

    # global dominance: every witness tail must be below eta * c_hat_eta
    if enough and "c_hat_eta" in constants:
        c_hat = constants["c_hat_eta"]
        for w in witnesses:
            if not (w.tail_mass < eta * c_hat):
                verdicts["A5"] = False
                notes.append("a witness tail exceeds eta * c_hat_eta")
                break

    return AssumptionReport(
        alpha_exact=cf.alpha.exact_str(),
        z_exact=z.exact_str(),
        config=config,
        verdicts=verdicts,
        witnesses=witnesses,
        constants=constants,
        notes=notes,
    )
