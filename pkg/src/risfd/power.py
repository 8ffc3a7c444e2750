"""Closed-form per-subcarrier power allocation for a fixed reflection vector.

One fractional-programming round replaces each power ratio
(b_m p_m + s2)/(v_m p_m + s2) by its quadratic transform with auxiliary
q_m, then solves the resulting concave separable problem in closed form:

    p_m = max(a_m - s2/b_m, 0),   a_m = q_m^2 b_m / (lam + q_m^2 v_m)^2,

where the multiplier lam >= 0 is zero when the unconstrained solution fits
the budget and otherwise is found by bisection on the monotone total-power
curve. Subcarriers with b_m = 0 gain nothing from power and get none.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError
from .system import PowerAllocation, residual_si_gains
from .validation import as_float_vector, check_positive

# Budget matching tolerance (relative) and bisection iteration cap.
BISECT_RTOL = 1e-12
BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class RatioTerms:
    """Per-subcarrier numerator/denominator gains of the cancellation ratios.

    b: pre-cancellation interference power gains |si_m|^2.
    v: post-cancellation gains |si_m + reflect_si_m^H phi|^2.
    noise_power: receiver noise power in watts.
    """

    b: np.ndarray
    v: np.ndarray
    noise_power: float

    def __post_init__(self):
        b = as_float_vector(self.b, name="b", nonnegative=True)
        v = as_float_vector(self.v, n=b.shape[0], name="v", nonnegative=True)
        check_positive(self.noise_power, "noise_power")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "v", v)

    @classmethod
    def from_channels(cls, channels, phi, noise_power):
        phi = getattr(phi, "values", phi)
        return cls(
            b=np.abs(channels.si_gain) ** 2,
            v=residual_si_gains(channels, phi),
            noise_power=noise_power,
        )


def ratio_objective(power, terms):
    """Sum of the per-subcarrier cancellation ratios for an allocation."""
    p = power.values if isinstance(power, PowerAllocation) else np.asarray(power)
    s2 = terms.noise_power
    return float(np.sum((terms.b * p + s2) / (terms.v * p + s2)))


def auxiliary_q(power, terms):
    """Optimal quadratic-transform auxiliaries for a fixed allocation."""
    p = power.values if isinstance(power, PowerAllocation) else np.asarray(power)
    s2 = terms.noise_power
    return np.sqrt(terms.b * p + s2) / (terms.v * p + s2)


def transformed_objective(power, q, terms):
    """Quadratic-transform surrogate value; equals the ratio sum at optimal q."""
    p = power.values if isinstance(power, PowerAllocation) else np.asarray(power)
    s2 = terms.noise_power
    return float(
        np.sum(2.0 * q * np.sqrt(terms.b * p + s2) - q**2 * (terms.v * p + s2))
    )


def allocation_for_multiplier(q, terms, lam):
    """Stationary allocation for a given budget multiplier ``lam`` >= 0.

    Entries with b_m = 0 are pinned to zero; a zero denominator (lam = 0 and
    v_m = 0 on a live subcarrier) yields an unbounded entry, reported as inf
    so the caller can tell the budget must bind.
    """
    b, v, s2 = terms.b, terms.v, terms.noise_power
    q = np.asarray(q, dtype=float)
    live = b > 0.0
    denom = lam + q**2 * v
    with np.errstate(divide="ignore"):
        a = np.where(denom > 0.0, q**2 * b / np.where(denom > 0.0, denom, 1.0) ** 2, np.inf)
        floor = np.where(live, s2 / np.where(live, b, 1.0), 0.0)
    return np.where(live, np.maximum(a - floor, 0.0), 0.0)


def waterfill(q, terms, budget):
    """Solve the budgeted concave allocation for fixed auxiliaries ``q``.

    Returns a PowerAllocation whose total equals min(budget, unconstrained
    total) up to the bisection tolerance; the multiplier search is a plain
    bisection, valid because the total is nonincreasing in the multiplier.
    """
    m = terms.b.shape[0]
    q = as_float_vector(q, n=m, name="q")
    if np.any((terms.b > 0) & (q <= 0)):
        raise ConfigurationError("q must be positive on subcarriers with b > 0")
    if budget <= 0:
        return PowerAllocation(values=np.zeros(m), budget=max(budget, 0.0))

    p0 = allocation_for_multiplier(q, terms, 0.0)
    total0 = p0.sum()
    if np.isfinite(total0) and total0 <= budget:
        return PowerAllocation(values=p0, budget=budget)

    live = terms.b > 0
    lam_hi = float(
        np.max(q[live] * np.sqrt(terms.b[live]) / np.sqrt(terms.noise_power))
    )
    lam_hi = max(lam_hi, 1.0)
    while allocation_for_multiplier(q, terms, lam_hi).sum() > budget:
        lam_hi *= 2.0
    lam_lo = 0.0
    # Track the feasible-side allocation so the result never overshoots.
    p = allocation_for_multiplier(q, terms, lam_hi)
    for _ in range(BISECT_MAX_ITER):
        lam = 0.5 * (lam_lo + lam_hi)
        p_mid = allocation_for_multiplier(q, terms, lam)
        total = p_mid.sum()
        if total > budget:
            lam_lo = lam
        else:
            lam_hi = lam
            p = p_mid
            if budget - total <= BISECT_RTOL * budget:
                break
    return PowerAllocation(values=p, budget=budget)


def saturating_allocation(q, terms, budget):
    """Water-level allocation that always pours the whole budget.

    Same stationarity form as :func:`waterfill`, but the multiplier is
    allowed to go negative so the total equals the budget even when the
    sign-constrained optimum is interior (or all-zero). Used to seed the
    reflection step when the constrained optimum carries no power; it is
    not a KKT point of the budgeted problem in that regime.
    """
    m = terms.b.shape[0]
    q = as_float_vector(q, n=m, name="q")
    live = terms.b > 0
    if budget <= 0 or not np.any(live):
        return PowerAllocation(values=np.zeros(m), budget=max(budget, 0.0))
    # Total power is decreasing in the level and diverges at the pole
    # -min(q^2 v) over live subcarriers.
    lam_lo = -float(np.min(q[live] ** 2 * terms.v[live]))
    lam_hi = float(
        np.max(q[live] * np.sqrt(terms.b[live]) / np.sqrt(terms.noise_power))
    )
    lam_hi = max(lam_hi, lam_lo + 1.0)
    while allocation_for_multiplier(q, terms, lam_hi).sum() > budget:
        lam_hi = lam_lo + 2.0 * (lam_hi - lam_lo)
    p = allocation_for_multiplier(q, terms, lam_hi)
    for _ in range(BISECT_MAX_ITER):
        lam = 0.5 * (lam_lo + lam_hi)
        p_mid = allocation_for_multiplier(q, terms, lam)
        total = p_mid.sum()
        if not np.isfinite(total) or total > budget:
            lam_lo = lam
        else:
            lam_hi = lam
            p = p_mid
            if budget - total <= BISECT_RTOL * budget:
                break
    return PowerAllocation(values=p, budget=budget)
