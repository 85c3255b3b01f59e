"""Closed-form generalisation bounds and cost counts.

Every evaluator returns a :class:`Bound`, a ``float`` that also reports
whether it is vacuous (above 1).  Values are returned unclipped.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

from .booster import combination_size, count_combinations, schedule_params
from .errors import ParameterError
from .vclab import average_class_vc_bound


class ExistentialConstantsWarning(UserWarning):
    """Raised when lower-bound constants are left at their placeholder value."""


class Bound(float):
    """A bound value; ``vacuous`` when it exceeds 1."""

    @property
    def vacuous(self) -> bool:
        return self > 1.0

    def __repr__(self):
        return f"Bound({float(self)!r})"


def Ln(x: float) -> float:
    """``ln(max(x, e))``."""
    return math.log(max(x, math.e))


def _check_prob(name, v, *, open_low=False):
    lo_ok = v > 0 if open_low else v >= 0
    if not (lo_ok and v <= 1):
        raise ParameterError(f"{name} must lie in {'(0' if open_low else '[0'}, 1], got {v!r}")


def _check_pos(name, v):
    if v < 1:
        raise ParameterError(f"{name} must be >= 1, got {v!r}")


@dataclass(frozen=True)
class BoundInput:
    n: int
    d: int
    d_star: int
    theta: float
    delta: float
    err_star: float = 0.0
    L_emp: float = 0.0
    L_pop: float = 0.0

    def __post_init__(self):
        _check_pos("n", self.n)
        _check_pos("d", self.d)
        _check_pos("d_star", self.d_star)
        if not 0 < self.theta < 0.5:
            raise ParameterError("theta must lie in (0, 1/2)")
        _check_prob("delta", self.delta, open_low=True)
        for name in ("err_star", "L_emp", "L_pop"):
            _check_prob(name, getattr(self, name))


def maurer_pontil_bound(L_emp: float, d: int, n: int, delta: float) -> Bound:
    """Uniform empirical-Bernstein style bound over a VC-``d`` class."""
    _check_prob("L_emp", L_emp)
    _check_pos("d", d)
    _check_pos("n", n)
    _check_prob("delta", delta, open_low=True)
    c = d * Ln(20 * math.e * n / d) - math.log(delta)
    return Bound(max(0.0, L_emp + math.sqrt(18 * L_emp * c / n) + 15 * c / n))


def bernstein_bound(L_pop: float, n: int, delta: float) -> Bound:
    """Single-hypothesis Bernstein bound on the empirical loss."""
    _check_prob("L_pop", L_pop)
    _check_pos("n", n)
    _check_prob("delta", delta, open_low=True)
    c = -math.log(delta)
    return Bound(L_pop + math.sqrt(2 * L_pop * c / (3 * n)) + 2 * c / n)


def uniform_convergence_bound(d: int, n: int, delta: float) -> Bound:
    _check_pos("d", d)
    _check_pos("n", n)
    _check_prob("delta", delta, open_low=True)
    return Bound(62 * math.sqrt((2 * d + 1) / n) + math.sqrt(-2 * math.log(delta) / n))


def rademacher_vc_bound(d: int, n: int) -> Bound:
    _check_pos("d", d)
    _check_pos("n", n)
    return Bound(31 * math.sqrt(d / n))


class MainBound(NamedTuple):
    value: Bound
    T: int
    d_prime: float

    @property
    def vacuous(self) -> bool:
        return self.value.vacuous


def main_theorem_bound(
    err_star: float, d: int, d_star: int, theta: float, n: int, delta: float
) -> MainBound:
    """Error bound of the boosted voter, with the ``T`` and ``d'`` it uses.

    ``T`` is the booster's combination size and ``d' = 4 T d ln(4 e T)``.
    """
    BoundInput(n=n, d=d, d_star=d_star, theta=theta, delta=delta, err_star=err_star)
    T = combination_size(n, theta, d_star)
    dp = average_class_vc_bound(T, d)
    c = math.log(5 / delta)
    lin = dp * Ln(10 * math.e * n / dp)
    value = err_star + 10 * math.sqrt(err_star * (lin + c) / n) + 182 * (lin + 4 * c) / n
    return MainBound(Bound(value), T, dp)


def weak_call_count(n: int, m0: int, theta: float, delta: float, delta0: float) -> int:
    """``R * M * (n/2)**m0`` as an exact integer."""
    if m0 < 1:
        raise ParameterError("m0 must be >= 1")
    s = schedule_params(n, theta, delta, delta0, 1)
    return s.R * s.M * (n // 2) ** m0


def combo_count(pool: int, T: int) -> int:
    """``C(pool + T - 1, T)`` as an exact integer."""
    if pool < 1 or T < 1:
        raise ParameterError("pool and T must be >= 1")
    return count_combinations(pool, T)


class LowerBound(NamedTuple):
    min_m: float
    excess: float


def lower_bound_eval(
    d: int, gamma0: float, L: float, m: int, C3: float | None = None, C4: float | None = None
) -> LowerBound:
    """Sample-size threshold and excess-error floor of the lower bound, at ``err* = L``.

    The constants only exist in principle; no numeric value is known.  Both
    default to 1 with an :class:`ExistentialConstantsWarning`, so results
    are meaningful only up to those constants.
    """
    if C3 is None or C4 is None:
        warnings.warn(
            "lower-bound constants are existential; defaulting unset ones to 1",
            ExistentialConstantsWarning,
            stacklevel=2,
        )
        C3 = 1.0 if C3 is None else C3
        C4 = 1.0 if C4 is None else C4
    if not 0 < L < 0.5:
        raise ParameterError(f"L must lie in (0, 1/2), got {L!r}")
    if not 0 < gamma0 < 1:
        raise ParameterError("gamma0 must lie in (0, 1)")
    _check_pos("d", d)
    _check_pos("m", m)
    min_m = C3 * d / (gamma0**2 * L * (1 - 2 * L) ** 2)
    excess = math.sqrt(C4 * L * d / (gamma0**2 * m * math.log(2 / gamma0)))
    return LowerBound(min_m, excess)
