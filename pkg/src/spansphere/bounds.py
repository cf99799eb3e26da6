"""Closed-form bounds and constants for random spanning spheres.

Everything with factorials or large powers is evaluated in log space with
``math.lgamma``.  Rational inputs to :func:`uniform_sum_tail` and the
rational constants are also available exactly as :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

ALPHA = math.sqrt(27 / (64 * math.e))
GAMMA = Fraction(256, 27)
EDGE_LOWER = 9 / (4 ** (4 / 3) * math.e ** (2 / 3))
BETA3 = Fraction(8, 21)
GAMMA_D = {3: Fraction(1, 3), 4: Fraction(3, 4)}


def p_c(n: int) -> float:
    """Threshold ``sqrt(e / (gamma n))``."""
    return math.sqrt(math.e / (float(GAMMA) * n))


def named_constants(beta_d=None, d: int = 3) -> dict:
    """Table of the named constants.

    ``beta_d`` defaults to 8/21 (the d=3 entropy exponent), giving the
    exponents ``1 - beta = 13/21`` and ``1 - 1/d = 2/3``.
    """
    beta = BETA3 if beta_d is None else Fraction(beta_d)
    return {
        "alpha": ALPHA,
        "e_alpha_over_2": math.e * ALPHA / 2,
        "gamma": GAMMA,
        "edge_lower": EDGE_LOWER,
        "p_c": p_c,
        "exponent_upper": Fraction(d - 1, d),
        "exponent_lower": 1 - beta,
        "exponent_13_21": 1 - BETA3,
        "exponent_2_3": Fraction(2, 3),
    }


@dataclass(frozen=True)
class TailBound:
    exact_bound: float
    stirling_bound: float
    exact: Fraction | None = None
    log_exact: float = field(default=0.0, repr=False)
    log_stirling: float = field(default=0.0, repr=False)


def uniform_sum_tail(L, m: int) -> TailBound:
    """Upper bounds ``L^m / m!`` and ``(L e / m)^m`` on ``Pr(U_1+..+U_m <= L)``.

    The first is the exact probability when ``L <= 1``.  A rational ``L``
    (``int`` or ``Fraction``) also yields the exact rational value.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if L < 0:
        raise ValueError(f"L must be >= 0, got {L}")
    exact = None
    if isinstance(L, (int, Fraction)):
        exact = Fraction(L) ** m / math.factorial(m)
    if L == 0:
        return TailBound(0.0, 0.0, exact, -math.inf, -math.inf)
    lf = float(L)
    log_exact = m * math.log(lf) - math.lgamma(m + 1)
    log_st = m * (math.log(lf) + 1 - math.log(m))
    return TailBound(math.exp(log_exact), math.exp(log_st), exact, log_exact, log_st)


@dataclass(frozen=True)
class TutteCounts:
    n: int
    log_B: float
    log_A_upper: float
    indicative: bool  # the asymptotic formula is only indicative at small n


def tutte_counts(n: int) -> TutteCounts:
    """Natural logs of the asymptotic count of rooted triangulations
    ``sqrt(3 pi / 2) / 16 * n^(-5/2) * (256/27)^(n+1)`` and of the labelled
    upper bound ``(256 n / (27 e))^n``."""
    if n < 4:
        raise ValueError(f"n must be >= 4, got {n}")
    g = math.log(256 / 27)
    log_b = math.log(math.sqrt(3 * math.pi / 2) / 16) - 2.5 * math.log(n) + (n + 1) * g
    log_a = n * (math.log(256 * n / 27) - 1)
    return TutteCounts(n, log_b, log_a, n < 20)


@dataclass(frozen=True)
class BoundsParams:
    d: int
    n: int
    beta: Fraction | float = BETA3
    b: float = 1.0
    c: float = 1.0
    delta: float = 0.5


@dataclass(frozen=True)
class Threshold:
    m0: int
    L: float
    exponent: Fraction | float
    route: str


def first_moment_threshold(p: BoundsParams) -> Threshold:
    """``m0 = d n - (d-1)(d+2)`` and ``L = delta / (e b) * m0^(1 - beta)``.

    For ``d = 2`` the count comes from Tutte's formula instead of a generic
    entropy exponent; the calculator still evaluates the generic route for
    the supplied ``beta`` and labels it.
    """
    if not 0 < p.beta <= 1:
        raise ValueError(f"beta must lie in (0, 1], got {p.beta}")
    if p.b <= 0:
        raise ValueError(f"b must be positive, got {p.b}")
    if not 0 < p.delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {p.delta}")
    m0 = p.d * p.n - (p.d - 1) * (p.d + 2)
    if m0 < 1:
        raise ValueError(f"m0 = {m0} is not positive for d={p.d}, n={p.n}")
    exponent = 1 - p.beta
    L = p.delta / (math.e * p.b) * m0 ** float(exponent)
    return Threshold(m0, L, exponent, "generic")


def tutte_lower_threshold(n: int) -> float:
    """The d=2 route: cost level ``alpha sqrt(n)`` below which the expected
    number of cheap labelled spheres vanishes."""
    return ALPHA * math.sqrt(n)


def report(d: int, n: int, beta=None, b: float = 1.0, delta: float = 0.5) -> dict:
    """Key/value summary used by the command line."""
    if beta is None:
        beta = Fraction(1, 2) if d == 2 else BETA3
    beta = Fraction(beta) if isinstance(beta, (int, str, Fraction)) else beta
    th = first_moment_threshold(BoundsParams(d, n, beta, b, 1.0, delta))
    out = {
        "d": d,
        "n": n,
        "alpha": ALPHA,
        "gamma": f"{GAMMA.numerator}/{GAMMA.denominator}",
        "edge_lower": EDGE_LOWER,
        "p_c": p_c(n),
        "m0": th.m0,
        "beta": str(beta),
        "exponent": str(th.exponent),
        "L": th.L,
        "route": th.route,
    }
    if d == 2:
        t = tutte_counts(n) if n >= 4 else None
        if t is not None:
            out["ln_B"] = t.log_B
            out["ln_A_upper"] = t.log_A_upper
            out["tutte_indicative"] = t.indicative
        out["tutte_L"] = tutte_lower_threshold(n)
    return out
