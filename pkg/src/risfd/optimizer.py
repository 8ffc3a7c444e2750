"""Alternating optimization of transmit power and reflection coefficients.

One iteration updates, in order: the power-side auxiliaries, the power
allocation (closed-form water-filling), the reflection-side auxiliaries,
and the reflection vector with the solver matching the constraint case.
Both half-steps are exact maximizations of their fractional-programming
surrogates, so the ratio-sum objective is monotone nondecreasing for the
ideal and continuous cases.

The discrete case projects the converged continuous solution onto the
phase grid once and then re-optimizes only the power allocation, and the
random benchmark draws a fixed unit-modulus vector and optimizes only the
power allocation; both therefore settle in one or two iterations.

``SicOptimizer`` wraps the driver in a scikit-learn style estimator:
hyperparameters in ``__init__``, ``fit`` on a ChannelSet, fitted state in
trailing-underscore attributes.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .exceptions import ConfigurationError, NumericalError
from .power import (
    RatioTerms,
    auxiliary_q,
    ratio_objective,
    saturating_allocation,
    waterfill,
)
from .reflection import (
    assemble_quadratic,
    auxiliary_l,
    npp_project,
    random_rc,
    rcg_minimize,
    solve_ideal,
)
from .system import (
    ChannelSet,
    FeasibleSet,
    PowerAllocation,
    RcVector,
    sic_capability,
)

AO_CASES = ("ideal", "continuous", "discrete", "random")

# Inner auxiliary/allocation rounds allowed inside one power-allocation pass.
_POWER_ROUNDS_PER_PASS = 4


@dataclass(frozen=True)
class OptResult:
    """Outcome of one alternating-optimization run."""

    final_phi: RcVector
    final_p: PowerAllocation
    objective_trace: np.ndarray
    sic_db_trace: np.ndarray
    iterations: int
    converged: bool


def _check_finite_objective(value, iteration):
    if not np.isfinite(value):
        raise NumericalError(
            f"objective became non-finite ({value}) at iteration {iteration}"
        )
    return float(value)


def _finish(rc, power, trace, converged):
    trace = np.asarray(trace, dtype=float)
    return OptResult(
        final_phi=rc,
        final_p=power,
        objective_trace=trace,
        sic_db_trace=10.0 * np.log10(trace),
        iterations=len(trace) - 1,
        converged=converged,
    )


def _power_only(channels, rc, budget, noise_power, tol, max_iter, start=None):
    """One power-allocation pass for a fixed reflection vector.

    Solves the power subproblem by alternating its auxiliary update and the
    closed-form allocation until the relative change drops below ``tol``;
    the whole pass counts as a single driver iteration, so the trace is
    [zero-power value, converged value]. ``start`` warm-starts the
    auxiliaries (the discrete case re-optimizes from the continuous run's
    allocation).
    """
    terms = RatioTerms.from_channels(channels, rc.values, noise_power)
    m = channels.n_subcarriers
    zero = PowerAllocation(values=np.zeros(m), budget=max(budget, 0.0))
    power = zero if start is None else start
    objective = ratio_objective(power, terms)
    converged = False
    for round_index in range(1, max_iter * _POWER_ROUNDS_PER_PASS + 1):
        q = auxiliary_q(power, terms)
        power = waterfill(q, terms, budget)
        previous = objective
        objective = _check_finite_objective(ratio_objective(power, terms), round_index)
        if abs(objective - previous) <= tol * abs(previous):
            converged = True
            break
    trace = [ratio_objective(zero, terms), objective]
    return _finish(rc, power, trace, converged)


def alternate_optimize(
    channels,
    *,
    case="ideal",
    tau=None,
    budget=1e-3,
    noise_power=1e-14,
    tol=1e-6,
    max_iter=50,
    grad_tol=1e-7,
    rcg_max_iter=1000,
    rng=None,
):
    """Run the alternating optimization for one constraint case.

    Args:
        channels: ChannelSet of one realization.
        case: "ideal", "continuous", "discrete" (requires tau) or "random"
            (requires rng; the reflection vector is drawn once and fixed).
        budget: total transmit power in watts.
        noise_power: receiver noise power in watts.
        tol: relative objective change that counts as converged.
        max_iter: cap on alternating iterations.
        grad_tol: squared-gradient-norm stop for the continuous-case solver.
        rcg_max_iter: iteration cap of the continuous-case solver.
        rng: numpy Generator, consumed only by the random case.

    Returns:
        OptResult; the objective trace starts at the all-zero allocation,
        whose ratio sum equals the number of subcarriers.
    """
    if not isinstance(channels, ChannelSet):
        raise ConfigurationError("channels must be a ChannelSet")
    if case not in AO_CASES:
        raise ConfigurationError(f"unknown case {case!r}, expected one of {AO_CASES}")
    if max_iter < 1:
        raise ConfigurationError("max_iter must be >= 1")
    n = channels.n_cells
    m = channels.n_subcarriers

    if case == "random":
        if rng is None:
            raise ConfigurationError("the random case requires a seeded generator")
        return _power_only(channels, random_rc(n, rng), budget, noise_power, tol, max_iter)

    if case == "discrete":
        if tau is None or int(tau) < 2:
            raise ConfigurationError("the discrete case requires tau >= 2")
        continuous = alternate_optimize(
            channels,
            case="continuous",
            budget=budget,
            noise_power=noise_power,
            tol=tol,
            max_iter=max_iter,
            grad_tol=grad_tol,
            rcg_max_iter=rcg_max_iter,
        )
        projected = npp_project(continuous.final_phi, tau)
        return _power_only(
            channels,
            projected,
            budget,
            noise_power,
            tol,
            max_iter,
            start=continuous.final_p,
        )

    feasible = FeasibleSet.IDEAL if case == "ideal" else FeasibleSet.CONTINUOUS
    phi = np.ones(n, dtype=complex)
    rc = RcVector(values=phi, case=feasible, tau=None)
    power = PowerAllocation(values=np.zeros(m), budget=max(budget, 0.0))
    terms = RatioTerms.from_channels(channels, phi, noise_power)
    trace = [ratio_objective(power, terms)]
    if budget <= 0:
        # Every allocation is the zero allocation and every ratio is one;
        # nothing to optimize.
        trace.append(trace[0])
        return _finish(rc, power, trace, True)
    converged = False
    prev_phi = None
    for iteration in range(1, max_iter + 1):
        terms = RatioTerms.from_channels(channels, phi, noise_power)
        q = auxiliary_q(power, terms)
        power = waterfill(q, terms, budget)
        # An all-zero allocation (the prescribed start, kept whenever the
        # current reflection vector amplifies interference on every
        # subcarrier) makes the reflection subproblem vacuous: every phi is
        # optimal. Break the tie with the always-pour water level so the
        # reflection step still reduces the residual and later iterations
        # can allocate power.
        weights = power if power.total > 0 else saturating_allocation(q, terms, budget)
        l = auxiliary_l(phi, channels, weights, noise_power)
        qf = assemble_quadratic(l, weights, channels)
        if case == "ideal":
            rc = solve_ideal(qf, phi0=phi)
        else:
            rc = rcg_minimize(qf, phi, grad_tol=grad_tol, max_iter=rcg_max_iter).rc
        phi = rc.values
        terms = RatioTerms.from_channels(channels, phi, noise_power)
        objective = _check_finite_objective(ratio_objective(power, terms), iteration)
        trace.append(objective)
        if power.total > 0:
            if abs(objective - trace[-2]) <= tol * abs(trace[-2]):
                converged = True
                break
        elif prev_phi is not None and np.array_equal(phi, prev_phi):
            # Degenerate fixed point: no reflection vector makes any
            # subcarrier worth powering.
            converged = True
            break
        prev_phi = phi
    return _finish(rc, power, trace, converged)


class SicOptimizer(BaseEstimator):
    """Estimator that fits transmit power and reflection coefficients to a
    channel realization so as to maximize the cancellation capability.

    Parameters mirror :func:`alternate_optimize`; ``random_state`` seeds the
    reflection draw of the random benchmark case.

    Attributes (after ``fit``):
        phi_: fitted RcVector.
        power_: fitted PowerAllocation.
        objective_trace_, sic_db_trace_: per-iteration objective history.
        n_iter_: alternating iterations performed.
        converged_: whether the relative-change test was met.
        sic_db_: cancellation capability (dB) on the training channels.
    """

    def __init__(
        self,
        case="ideal",
        tau=None,
        budget=1e-3,
        noise_power=1e-14,
        tol=1e-6,
        max_iter=50,
        grad_tol=1e-7,
        rcg_max_iter=1000,
        random_state=None,
    ):
        self.case = case
        self.tau = tau
        self.budget = budget
        self.noise_power = noise_power
        self.tol = tol
        self.max_iter = max_iter
        self.grad_tol = grad_tol
        self.rcg_max_iter = rcg_max_iter
        self.random_state = random_state

    def fit(self, X, y=None):
        """Optimize for the ChannelSet ``X``; ``y`` is ignored."""
        result = alternate_optimize(
            X,
            case=self.case,
            tau=self.tau,
            budget=self.budget,
            noise_power=self.noise_power,
            tol=self.tol,
            max_iter=self.max_iter,
            grad_tol=self.grad_tol,
            rcg_max_iter=self.rcg_max_iter,
            rng=np.random.default_rng(self.random_state),
        )
        self.result_ = result
        self.phi_ = result.final_phi
        self.power_ = result.final_p
        self.objective_trace_ = result.objective_trace
        self.sic_db_trace_ = result.sic_db_trace
        self.n_iter_ = result.iterations
        self.converged_ = result.converged
        self.sic_db_ = float(result.sic_db_trace[-1])
        return self

    def score(self, X, y=None):
        """Cancellation capability (dB) of the fitted configuration on ``X``."""
        if not hasattr(self, "phi_"):
            raise NotFittedError("SicOptimizer must be fitted before scoring")
        return sic_capability(X, self.phi_, self.power_, self.noise_power)
