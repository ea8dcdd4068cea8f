"""Decay-rate engine: the three-term radius bound and its optimizer.

For radius R >= 1 and time t > 0, the contour machinery yields

    bound_B(t, R) = 10 C / R + M(R) / (t R^3) + 2 R M(R)^2 e^{-t / (2 M(R))}.

The first and third terms balance exactly at R_opt = m_log_inverse(t / 4),
which is where the bound is used unless the cutoff rule caps the radius first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .growth import CutoffRule, GrowthBound, m_log_inverse

BRANCH_OPT_INSIDE = "opt_inside"
BRANCH_CUTOFF_LIMITED = "cutoff_limited"


@dataclass(frozen=True)
class RateInputs:
    C: float
    M: GrowthBound
    T: float = 0.0
    R_rule: CutoffRule = field(default_factory=CutoffRule.infinite)

    def __post_init__(self) -> None:
        if not (self.C > 0 and math.isfinite(self.C)):
            raise ValueError("C must be positive and finite")
        if not (self.T >= 0 and math.isfinite(self.T)):
            raise ValueError("T must be finite and >= 0")


@dataclass(frozen=True)
class RateResult:
    t: float
    R_opt: float
    R_rule_t: float
    R_used: float
    bound: float
    branch: str
    rate_shape: float
    T_prime: float
    K_prime: float | None


def bound_B(inputs: RateInputs, t: float, R: float) -> float:
    """The three-term bound at time t and radius R (requires t > 0, R >= 1)."""
    if not t > 0:
        raise ValueError("bound_B needs t > 0")
    if not R >= 1:
        raise ValueError("bound_B needs R >= 1")
    MR = float(inputs.M(R))
    return (10.0 * inputs.C / R
            + MR / (t * R ** 3)
            + 2.0 * R * MR * MR * math.exp(-t / (2.0 * MR)))


def r_opt(inputs: RateInputs, t: float, balance_tol: float = 1e-6) -> float:
    """Radius balancing the first and third terms: m_log_inverse(t / 4).

    The balance 10 C / R = 2 R M(R)^2 e^{-t/(2M(R))} is re-verified as a
    postcondition (in log space, so huge/tiny terms don't poison the check).
    """
    if not t > 0:
        raise ValueError("r_opt needs t > 0")
    a = m_log_inverse(inputs.M, inputs.C, t / 4.0)
    if not math.isfinite(a):
        raise ArithmeticError(f"optimal radius exceeds float range at t = {t!r}")
    Ma = float(inputs.M(a))
    log_first = math.log(10.0 * inputs.C) - math.log(a)
    log_third = math.log(2.0) + math.log(a) + 2.0 * math.log(Ma) - t / (2.0 * Ma)
    if abs(log_first - log_third) > balance_tol:
        raise ArithmeticError(
            f"balance postcondition failed at t = {t!r}: |log-gap| = "
            f"{abs(log_first - log_third):.3e}")
    return a


def t_prime(inputs: RateInputs) -> float:
    """Threshold time max{T, 4 M(1) (log M(1) - 0.5 log(5C))}, clamped at 0."""
    return max(inputs.T, max(0.0, _t_prime_second_term(inputs)))


def _t_prime_second_term(inputs: RateInputs) -> float:
    M1 = float(inputs.M(1.0))
    return 4.0 * M1 * (math.log(M1) - 0.5 * math.log(5.0 * inputs.C))


def t_prime_second_term_clamped(inputs: RateInputs) -> bool:
    """True when the growth term of the threshold was negative and clamped."""
    return _t_prime_second_term(inputs) < 0.0


def k_prime(inputs: RateInputs) -> float | None:
    """Leading constant 1 / (log M(1) - log sqrt(5C)); None when undefined.

    Only meaningful when M(1) > sqrt(5C); otherwise the constant from this
    recipe is not positive and no number is reported.
    """
    M1 = float(inputs.M(1.0))
    gap = math.log(M1) - 0.5 * math.log(5.0 * inputs.C)
    if gap <= 0.0:
        return None
    return 1.0 / gap


def decay_rate(inputs: RateInputs, t: float) -> RateResult:
    """Evaluate the decay bound at time t > T'.

    branch is cutoff_limited exactly when R_opt exceeds the cutoff R_rule(t);
    the bound is then evaluated at the cutoff radius instead.
    """
    threshold = t_prime(inputs)
    if not t > threshold:
        raise ValueError(f"decay_rate needs t > T' = {threshold!r}, got t = {t!r}")
    R_o = r_opt(inputs, t)
    R_r = float(inputs.R_rule(t))
    if R_o > R_r:
        branch = BRANCH_CUTOFF_LIMITED
        R_used = R_r
    else:
        branch = BRANCH_OPT_INSIDE
        R_used = R_o
    bound = bound_B(inputs, t, R_used)
    rate_shape = max(1.0 / R_o, 1.0 / R_r if math.isfinite(R_r) else 0.0)
    return RateResult(t=t, R_opt=R_o, R_rule_t=R_r, R_used=R_used, bound=bound,
                      branch=branch, rate_shape=rate_shape,
                      T_prime=threshold, K_prime=k_prime(inputs))
