"""Estimation-error bound calculators for the empirical WIPM optimizer.

chi1(w) = w / sqrt(n_p) + 1 / sqrt(n_u)
chi2(w) = 2 (w / n_p + 1 / n_u)

Only the RKHS-ball bound is fully explicit; for a general hypothesis space
the Rademacher expectations are not computable, so only the constants of the
general bound are exposed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from pywmmd.domain.types import check_prior
from pywmmd.errors import InvalidInputError


@dataclass(frozen=True, slots=True, kw_only=True)
class BoundInputs:
    n_p: int
    n_u: int
    pi_plus: float
    nu: float = 1.0
    rho: float = 1.0
    tau: float = 1.0
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if self.n_p < 1 or self.n_u < 1:
            raise InvalidInputError("sample sizes must be positive")
        check_prior(self.pi_plus)
        if not (0.0 < self.nu <= 1.0):
            raise InvalidInputError(f"nu must lie in (0, 1], got {self.nu}")
        if self.rho < 0:
            raise InvalidInputError(f"rho must be >= 0, got {self.rho}")
        if self.tau <= 0 or self.alpha <= 0:
            raise InvalidInputError("tau and alpha must be positive")

    @property
    def weight(self) -> float:
        return 2.0 * self.pi_plus


def _check_sizes(w: float, n_p: int, n_u: int) -> None:
    if n_p < 1 or n_u < 1:
        raise InvalidInputError("sample sizes must be positive")
    if w < 0:
        raise InvalidInputError(f"weight must be >= 0, got {w}")


def chi1(w: float, n_p: int, n_u: int) -> float:
    _check_sizes(w, n_p, n_u)
    return w / math.sqrt(n_p) + 1.0 / math.sqrt(n_u)


def chi2(w: float, n_p: int, n_u: int) -> float:
    _check_sizes(w, n_p, n_u)
    return 2.0 * (w / n_p + 1.0 / n_u)


def c_alpha(alpha: float) -> float:
    return 4.0 * (1.0 + alpha)


def c1_tau_rho(tau: float, rho: float) -> float:
    return 2.0 * math.sqrt(2.0 * tau * rho * rho)


def c2_tau_nu_alpha(tau: float, nu: float, alpha: float) -> float:
    return 2.0 * tau * nu * (2.0 / 3.0 + 1.0 / alpha)


def explicit_estimation_bound(b: BoundInputs) -> float:
    """Estimation-error bound of the WMMD optimizer over the RKHS ball of radius r_1."""
    x1 = chi1(b.weight, b.n_p, b.n_u)
    x2 = chi2(b.weight, b.n_p, b.n_u)
    return (c_alpha(b.alpha) + c1_tau_rho(b.tau, b.rho)) * x1 + c2_tau_nu_alpha(
        b.tau, b.nu, b.alpha
    ) * x2


def mcdiarmid_estimation_bound(b: BoundInputs, delta: float = 0.0) -> float:
    """Earlier McDiarmid-type bound on the same RKHS ball, for comparison.

    8 * chi1 + (1 + nu) * sqrt(2 tau) * chi1 + delta
    """
    x1 = chi1(b.weight, b.n_p, b.n_u)
    return 8.0 * x1 + (1.0 + b.nu) * math.sqrt(2.0 * b.tau) * x1 + delta


def bound_comparison_condition(b: BoundInputs) -> bool:
    """True when the explicit bound is sharper than the McDiarmid-type bound."""
    x1 = chi1(b.weight, b.n_p, b.n_u)
    x2 = chi2(b.weight, b.n_p, b.n_u)
    lhs = (1.0 + b.nu) / 2.0 - 5.0 * math.sqrt(2.0 * b.tau) * x2 * b.nu / (6.0 * x1)
    return lhs >= b.rho
