"""Growth bounds on the analytic extension and the cutoff rule for the x-range.

A growth bound M is a continuous nondecreasing function with M(s) >= 1 drawn
from a preset family.  The decay machinery needs the reweighted function

    m_log(a) = M(a) * (log a + log M(a) - 0.5 log(5C)),   a >= 1,

and its inverse on the branch where it increases.  m_log may be negative near
a = 1 when 5C > M(1)^2; it crosses zero at the unique a with a M(a) = sqrt(5C)
and increases from there, which is the branch the inverse uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GROWTH_KINDS = ("constant", "affine", "power", "log", "exp")
CUTOFF_KINDS = ("exp_t", "constant", "infinite")

_CERT_GRID = np.concatenate(([0.0], np.geomspace(1e-6, 1e6, 9_999)))


class GrowthDomainError(ValueError):
    pass


@dataclass(frozen=True)
class GrowthBound:
    """Preset nondecreasing M with M >= 1; monotonicity certified on a grid."""

    kind: str
    c: float
    alpha: float = 0.0
    beta: float = 0.0
    kappa: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in GROWTH_KINDS:
            raise ValueError(f"unknown growth kind {self.kind!r}; expected one of {GROWTH_KINDS}")
        if not (self.c >= 1.0):
            raise ValueError(f"growth scale c must be >= 1 so that M >= 1, got {self.c}")
        if self.kind == "power" and not (self.alpha > 0):
            raise ValueError("power growth needs alpha > 0")
        if self.kind == "log" and not (self.beta > 0):
            raise ValueError("log growth needs beta > 0")
        if self.kind == "exp" and not (self.kappa > 0):
            raise ValueError("exp growth needs kappa > 0")
        self._certify()

    # presets ------------------------------------------------------------------

    @classmethod
    def constant(cls, c: float) -> "GrowthBound":
        return cls("constant", c)

    @classmethod
    def affine(cls, c: float) -> "GrowthBound":
        return cls("affine", c)

    @classmethod
    def power(cls, c: float, alpha: float) -> "GrowthBound":
        return cls("power", c, alpha=alpha)

    @classmethod
    def log_power(cls, c: float, beta: float) -> "GrowthBound":
        return cls("log", c, beta=beta)

    @classmethod
    def exponential(cls, c: float, kappa: float) -> "GrowthBound":
        return cls("exp", c, kappa=kappa)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        with np.errstate(over="ignore"):
            if self.kind == "constant":
                out = np.full_like(s, self.c)
            elif self.kind == "affine":
                out = self.c * (1.0 + s)
            elif self.kind == "power":
                out = self.c * np.power(1.0 + s, self.alpha)
            elif self.kind == "log":
                out = self.c * np.power(np.log(math.e + s), self.beta)
            else:
                out = self.c * np.exp(self.kappa * s)
        return out if out.ndim else float(out)

    def _certify(self) -> None:
        # belt-and-braces check of the contract on a fixed grid; presets are
        # monotone analytically, so a failure here means bad parameters
        vals = np.asarray(self(_CERT_GRID))
        if np.any(np.isnan(vals)):
            raise ValueError(f"growth bound produced nan on the certification grid ({self.kind})")
        finite = np.isfinite(vals)
        if np.any(~finite):
            first_bad = int(np.argmax(~finite))
            # overflow must be a suffix: once M leaves float range it stays out
            if not np.all(~finite[first_bad:]):
                raise ValueError("growth bound overflowed non-monotonically on the certification grid")
        fv = vals[finite]
        if fv.size and (np.min(fv) < 1.0 - 1e-12 or np.any(np.diff(fv) < -1e-9 * np.abs(fv[:-1]))):
            raise ValueError(f"growth bound violates M >= 1 nondecreasing on the grid ({self.kind})")

    def describe(self) -> str:
        params = {"constant": f"c={self.c}", "affine": f"c={self.c}",
                  "power": f"c={self.c}, alpha={self.alpha}",
                  "log": f"c={self.c}, beta={self.beta}",
                  "exp": f"c={self.c}, kappa={self.kappa}"}[self.kind]
        return f"{self.kind}({params})"


@dataclass(frozen=True)
class CutoffRule:
    """Upper limit R(t) of the admissible x-range; infinity is its own kind."""

    kind: str
    value: float = math.nan

    def __post_init__(self) -> None:
        if self.kind not in CUTOFF_KINDS:
            raise ValueError(f"unknown cutoff kind {self.kind!r}; expected one of {CUTOFF_KINDS}")
        if self.kind == "constant" and not (self.value >= 1.0 and math.isfinite(self.value)):
            raise ValueError("constant cutoff must be a finite value >= 1")

    @classmethod
    def exp_of_t(cls) -> "CutoffRule":
        return cls("exp_t")

    @classmethod
    def constant(cls, value: float) -> "CutoffRule":
        return cls("constant", value)

    @classmethod
    def infinite(cls) -> "CutoffRule":
        return cls("infinite")

    @property
    def is_infinite(self) -> bool:
        return self.kind == "infinite"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "exp_t":
            with np.errstate(over="ignore"):
                out = np.exp(t)
        elif self.kind == "constant":
            out = np.full_like(t, self.value)
        else:
            out = np.full_like(t, math.inf)
        return out if out.ndim else float(out)

    def describe(self) -> str:
        if self.kind == "constant":
            return f"constant({self.value})"
        return "exp(t)" if self.kind == "exp_t" else "infinite"


def m_log(M: GrowthBound, C: float, a) -> float | np.ndarray:
    """M(a) * (log a + log M(a) - 0.5 log(5C)) for a >= 1."""
    a_arr = np.asarray(a, dtype=float)
    if np.any(a_arr < 1.0):
        raise GrowthDomainError("m_log is defined for a >= 1")
    if not C > 0:
        raise ValueError("C must be positive")
    Ma = np.asarray(M(a_arr), dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        out = Ma * (np.log(a_arr) + np.log(Ma) - 0.5 * math.log(5.0 * C))
    out = np.where(np.isinf(Ma), math.inf, out)
    return out if np.ndim(a) else float(out)


def branch_start(M: GrowthBound, C: float) -> float:
    """Left end of the increasing branch: a = 1, or the root of a M(a) = sqrt(5C)."""

    def h(a: float) -> float:
        return math.log(a) + math.log(float(M(a))) - 0.5 * math.log(5.0 * C)

    if h(1.0) >= 0.0:
        return 1.0
    lo, hi = 1.0, 2.0
    for _ in range(600):
        if h(hi) >= 0.0:
            break
        lo = hi
        hi *= 2.0
    else:
        raise GrowthDomainError("could not bracket the zero-crossing of m_log")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if h(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return 0.5 * (lo + hi)


def m_log_inverse(M: GrowthBound, C: float, y: float,
                  residual_tol: float = 1e-10) -> float:
    """Inverse of m_log on its increasing branch.

    Bisection with geometric upper-bracket expansion.  Postcondition:
    |m_log(a) - y| <= residual_tol * max(1, |y|).
    """
    bs = branch_start(M, C)
    m_min = float(m_log(M, C, bs))
    tol = residual_tol * max(1.0, abs(y))
    if y < m_min - tol:
        raise GrowthDomainError(
            f"target {y!r} is below the branch minimum m_log({bs!r}) = {m_min!r}")
    if y <= m_min:
        return bs

    def f(a: float) -> float:
        return float(m_log(M, C, a))

    lo, hi = bs, max(2.0 * bs, 2.0)
    for _ in range(1100):
        fh = f(hi)
        if fh >= y or math.isinf(fh):
            break
        if hi >= 8.9e307:
            # doubling once more would overflow: no representable radius works
            raise GrowthDomainError(
                f"no radius in float range reaches m_log = {y!r}; "
                f"m_log({hi:.4g}) = {fh:.4g}")
        lo = hi
        hi *= 2.0
    else:
        raise GrowthDomainError(f"could not bracket m_log = {y!r} from above")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) < y:
            lo = mid
        else:
            hi = mid
    a = 0.5 * (lo + hi)
    if abs(f(a) - y) > tol:
        raise ArithmeticError(
            f"m_log inversion stalled: residual {abs(f(a) - y):.3e} at a = {a!r} "
            f"exceeds tolerance {tol:.3e}")
    return a
