"""Reflection-coefficient optimization for a fixed power allocation.

For fixed fractional-programming auxiliaries the reflection subproblem is a
complex quadratic form

    g(phi) = w phi + phi^H c + phi^H A phi,   A Hermitian PSD, w = c^H,

minimized over one of three feasible sets: the unit disk per element
(closed-form KKT solve with per-element multipliers), the unit circle per
element (Riemannian conjugate gradient on the complex circle manifold with
Armijo backtracking, Polak-Ribiere directions, projection retraction and
projection vector transport), or an equispaced discrete phase grid (nearest
point projection of the continuous solution, with an exhaustive search kept
alongside as a small-instance reference).

Manifold points and tangent vectors are plain complex ndarrays; tangency
means Re(mu * conj(phi)) = 0 elementwise.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, NumericalError
from .system import FeasibleSet, PowerAllocation, RcVector, residual_si_gains
from .validation import as_complex_vector, check_unit_modulus

ARMIJO_INITIAL_STEP = 1.0
ARMIJO_CONTRACTION = 0.5
ARMIJO_SLOPE = 1e-4
ARMIJO_MAX_BACKTRACKS = 50

BRUTE_FORCE_CANDIDATE_CAP = 2**24


@dataclass(frozen=True)
class QuadraticForm:
    """The triple (w, c, A) of the reflection objective.

    w is the linear row term, c the linear column term (w must equal c^H),
    and A the Hermitian PSD quadratic term.
    """

    w: np.ndarray
    c: np.ndarray
    A: np.ndarray

    def __post_init__(self):
        c = as_complex_vector(self.c, name="c")
        n = c.shape[0]
        w = as_complex_vector(self.w, n=n, name="w")
        a = np.asarray(self.A, dtype=complex)
        if a.shape != (n, n):
            raise ConfigurationError(f"A must have shape ({n}, {n}), got {a.shape}")
        scale = max(np.max(np.abs(a)), 1.0)
        if np.max(np.abs(a - a.conj().T)) > 1e-12 * scale:
            raise ConfigurationError("A must be Hermitian")
        cscale = max(np.max(np.abs(c)), 1.0) if n else 1.0
        if np.max(np.abs(w - c.conj())) > 1e-12 * cscale:
            raise ConfigurationError("w must equal the conjugate transpose of c")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", a)

    @property
    def size(self):
        return self.c.shape[0]

    def evaluate(self, phi):
        """Objective value; real for any phi since w = c^H and A is Hermitian."""
        phi = np.asarray(phi, dtype=complex)
        return float(
            np.real(self.w @ phi + phi.conj() @ self.c + phi.conj() @ (self.A @ phi))
        )


def auxiliary_l(phi, channels, power, noise_power):
    """Optimal quadratic-transform auxiliaries of the reflection subproblem."""
    phi = getattr(phi, "values", phi)
    p = power.values if isinstance(power, PowerAllocation) else np.asarray(power)
    b = np.abs(channels.si_gain) ** 2
    v = residual_si_gains(channels, phi)
    return np.sqrt(b * p + noise_power) / (v * p + noise_power)


def assemble_quadratic(l, power, channels):
    """Build the reflection quadratic form for fixed auxiliaries ``l``.

    Weights each subcarrier's reflected-leakage outer product by l_m^2 p_m;
    the linear terms couple the reflected path to the direct leakage.
    """
    p = power.values if isinstance(power, PowerAllocation) else np.asarray(power)
    coef = np.asarray(l) ** 2 * p
    hr = channels.reflect_si
    c = (coef * channels.si_gain) @ hr
    a = (hr * coef[:, None]).T @ hr.conj()
    a = 0.5 * (a + a.conj().T)
    return QuadraticForm(w=c.conj(), c=c, A=a)


def disk_multipliers(qf, phi):
    """Multiplier estimates and the relative KKT residual of a disk-feasible
    point: nu is nonzero only on saturated elements, where it is the radial
    component of the negative gradient."""
    phi = np.asarray(phi, dtype=complex)
    rhs = 0.5 * (qf.c + qf.w.conj())
    grad = 2.0 * (qf.A @ phi + rhs)
    mags = np.abs(phi)
    active = mags >= 1.0 - 1e-10
    nu = np.where(active, np.maximum(0.0, -np.real(grad * phi.conj()) / 2.0), 0.0)
    scale = max(float(np.linalg.norm(2.0 * rhs)), np.finfo(float).tiny)
    residual = float(np.linalg.norm(grad + 2.0 * nu * phi)) / scale
    return nu, residual


def _clip_to_disk(phi):
    mags = np.abs(phi)
    return np.where(mags > 1.0, phi / np.where(mags > 0, mags, 1.0), phi)


def _newton_multiplier_stage(qf, rhs, max_outer):
    """Active-set Newton iteration on the saturation multipliers.

    Solves |phi_i(nu)|^2 = 1 on the working set, where
    phi(nu) = -(A + ridge I + diag(nu))^{-1} rhs; returns the (possibly
    slightly infeasible) primal point, or None when a linear solve fails.
    """
    n = qf.size
    trace = max(float(np.real(np.trace(qf.A))), 0.0)
    base = qf.A + (1e-12 * trace / n) * np.eye(n)
    nu = np.zeros(n)
    phi = None
    try:
        for _ in range(max_outer):
            minv = np.linalg.inv(base + np.diag(nu))
            minv = 0.5 * (minv + minv.conj().T)
            phi = -minv @ rhs
            gap = np.abs(phi) ** 2 - 1.0
            working = np.where((gap > 1e-14) | (nu > 0))[0]
            if working.size == 0 or np.max(np.abs(gap[working])) < 1e-12:
                break
            scaled = np.diag(phi[working].conj())
            jac = -2.0 * np.real(
                scaled @ minv[np.ix_(working, working)] @ scaled.conj().T
            )
            step = np.linalg.solve(jac, -gap[working])
            merit0 = np.linalg.norm(
                np.concatenate([np.maximum(gap, 0.0), np.where(nu > 0, gap, 0.0)])
            )
            size = 1.0
            for _ in range(30):
                nu_try = nu.copy()
                nu_try[working] = np.maximum(nu[working] + size * step, 0.0)
                phi_try = -np.linalg.solve(base + np.diag(nu_try), rhs)
                gap_try = np.abs(phi_try) ** 2 - 1.0
                merit = np.linalg.norm(
                    np.concatenate(
                        [np.maximum(gap_try, 0.0), np.where(nu_try > 0, gap_try, 0.0)]
                    )
                )
                if merit <= merit0 * (1.0 - 1e-4 * size) or merit < 1e-15:
                    nu = nu_try
                    break
                size *= 0.5
            else:
                break
    except np.linalg.LinAlgError:
        return phi
    return phi


def _coordinate_descent_stage(qf, rhs, phi, kkt_tol, max_sweeps):
    """Cyclic exact per-element minimization over the disk.

    Feasible and monotone by construction; stops at the KKT tolerance or at
    a fixed point of the sweep (coordinatewise optimal, hence optimal for
    this convex problem at working precision).
    """
    a = qf.A
    diag = np.real(np.diag(a))
    grad_lin = a @ phi
    for _ in range(max_sweeps):
        moved = 0.0
        for i in range(len(phi)):
            z = rhs[i] + grad_lin[i] - diag[i] * phi[i]
            if diag[i] > 0.0:
                new = -z / diag[i]
                mag = abs(new)
                if mag > 1.0:
                    new = new / mag
            else:
                mag = abs(z)
                new = -z / mag if mag > 0.0 else phi[i]
            delta = new - phi[i]
            step = abs(delta)
            if step > 0.0:
                grad_lin = grad_lin + a[:, i] * delta
                phi[i] = new
                moved = max(moved, step)
        _, residual = disk_multipliers(qf, phi)
        if residual <= kkt_tol or moved <= 1e-15:
            break
        grad_lin = a @ phi
    return phi


def solve_ideal(qf, phi0=None, kkt_tol=1e-8, max_newton=50, max_sweeps=5000):
    """Minimize the quadratic form over the per-element unit disk.

    Stationarity gives phi = -(A + diag(nu))^{-1} (c + w^H)/2 with
    multipliers nu >= 0 active only on saturated elements. An active-set
    Newton iteration on the multipliers supplies a near-optimal point
    quickly; cyclic per-element minimization then restores exact
    feasibility and drives the KKT residual down. When a warm start
    ``phi0`` is supplied the polish begins from whichever candidate has the
    lower objective, so the result never exceeds the warm start's value.
    Returns an ideal-case RcVector.
    """
    n = qf.size
    rhs = 0.5 * (qf.c + qf.w.conj())
    if not np.any(rhs):
        return RcVector(values=np.zeros(n, dtype=complex), case=FeasibleSet.IDEAL)
    candidates = []
    newton_phi = _newton_multiplier_stage(qf, rhs, max_newton)
    if newton_phi is not None and np.all(np.isfinite(newton_phi)):
        candidates.append(_clip_to_disk(newton_phi))
    if phi0 is not None:
        candidates.append(_clip_to_disk(np.asarray(phi0, dtype=complex)))
    if not candidates:
        candidates.append(np.zeros(n, dtype=complex))
    start = min(candidates, key=qf.evaluate)
    phi = _coordinate_descent_stage(qf, rhs, start.copy(), kkt_tol, max_sweeps)
    if not np.all(np.isfinite(phi)):
        raise NumericalError("disk-constrained solve produced non-finite values")
    return RcVector(values=phi, case=FeasibleSet.IDEAL)


def euclidean_gradient(phi, qf):
    """Gradient 2 A phi + c + w^H of the quadratic objective."""
    phi = np.asarray(phi, dtype=complex)
    return 2.0 * (qf.A @ phi) + qf.c + qf.w.conj()


def riemannian_gradient(phi, egrad):
    """Project a Euclidean gradient onto the tangent space at ``phi``."""
    phi = np.asarray(phi, dtype=complex)
    egrad = np.asarray(egrad, dtype=complex)
    return egrad - np.real(egrad * phi.conj()) * phi


def retract(phi, step, direction):
    """Map a scaled tangent step back onto the unit-modulus manifold."""
    moved = phi + step * np.asarray(direction, dtype=complex)
    mags = np.abs(moved)
    if np.any(mags == 0.0):
        raise NumericalError("retraction hit a zero element; shrink the step")
    return moved / mags


def transport(direction, dest):
    """Carry a tangent vector to the tangent space at ``dest`` by projection."""
    direction = np.asarray(direction, dtype=complex)
    dest = np.asarray(dest, dtype=complex)
    return direction - np.real(direction * dest.conj()) * dest


@dataclass(frozen=True)
class RcgResult:
    rc: RcVector
    converged: bool
    iterations: int
    objective_trace: np.ndarray


def rcg_minimize(qf, phi0, grad_tol=1e-7, max_iter=1000):
    """Riemannian conjugate gradient descent on the complex circle manifold.

    Runs until the squared norm of the Riemannian gradient drops to
    ``grad_tol``, Armijo backtracking can no longer find a decrease (the
    iterate is stationary at working precision), or ``max_iter`` steps.
    The objective trace is monotone nonincreasing and the last iterate is
    returned; ``converged`` reports only the gradient test.
    """
    phi = as_complex_vector(getattr(phi0, "values", phi0), name="phi0").copy()
    check_unit_modulus(phi, name="phi0")
    g = riemannian_gradient(phi, euclidean_gradient(phi, qf))
    direction = -g
    f_cur = qf.evaluate(phi)
    objective_trace = [f_cur]
    converged = False
    iterations = 0
    for _ in range(max_iter):
        gnorm2 = float(np.real(np.vdot(g, g)))
        if gnorm2 <= grad_tol:
            converged = True
            break
        slope = float(np.real(np.vdot(g, direction)))
        if slope >= 0.0:  # not a descent direction: restart on the gradient
            direction = -g
            slope = -gnorm2
        step = ARMIJO_INITIAL_STEP
        accepted = False
        for _ in range(ARMIJO_MAX_BACKTRACKS):
            try:
                cand = retract(phi, step, direction)
            except NumericalError:
                step *= ARMIJO_CONTRACTION
                continue
            f_cand = qf.evaluate(cand)
            if f_cand <= f_cur + ARMIJO_SLOPE * step * slope:
                accepted = True
                break
            step *= ARMIJO_CONTRACTION
        if not accepted:
            break
        g_new = riemannian_gradient(cand, euclidean_gradient(cand, qf))
        beta = np.real(np.vdot(g_new, g_new - transport(g, cand)))
        beta = max(0.0, beta / max(gnorm2, np.finfo(float).tiny))
        direction = -g_new + beta * transport(direction, cand)
        phi, g, f_cur = cand, g_new, f_cand
        iterations += 1
        objective_trace.append(f_cur)
    else:
        gnorm2 = float(np.real(np.vdot(g, g)))
        converged = gnorm2 <= grad_tol
    return RcgResult(
        rc=RcVector(values=phi, case=FeasibleSet.CONTINUOUS),
        converged=converged,
        iterations=iterations,
        objective_trace=np.asarray(objective_trace),
    )


def npp_project(rc, tau):
    """Quantize a continuous-phase vector to the nearest of tau grid phases.

    Distances are circular; exact midpoints resolve to the smaller grid
    angle (with the wrap-around midpoint resolving to angle zero).
    """
    if not isinstance(rc, RcVector) or rc.case is not FeasibleSet.CONTINUOUS:
        raise ConfigurationError("npp_project expects a continuous-case RcVector")
    tau = int(tau)
    if tau < 2:
        raise ConfigurationError("tau must be >= 2")
    step = 2.0 * np.pi / tau
    theta = np.mod(np.angle(rc.values), 2.0 * np.pi)
    ratio = theta / step
    k_floor = np.floor(ratio)
    frac = ratio - k_floor
    k = np.where(frac > 0.5, k_floor + 1.0, k_floor)
    tie = frac == 0.5
    if np.any(tie):
        lower = k_floor.astype(int) % tau
        upper = (k_floor.astype(int) + 1) % tau
        k = np.where(tie, np.minimum(lower, upper), k)
    k = k.astype(int) % tau
    return RcVector(values=np.exp(1j * step * k), case=FeasibleSet.DISCRETE, tau=tau)


def random_rc(n, rng):
    """Unit-modulus vector with i.i.d. uniform phases."""
    phases = rng.uniform(0.0, 2.0 * np.pi, int(n))
    return RcVector(values=np.exp(1j * phases), case=FeasibleSet.CONTINUOUS)


def _evaluate_batch(qf, candidates):
    lin = 2.0 * np.real(candidates.conj() @ qf.c)
    quad = np.real(np.sum((candidates.conj() @ qf.A) * candidates, axis=1))
    return lin + quad


def brute_force_discrete(qf, tau):
    """Exact minimizer over all tau^N discrete-phase vectors (small N only)."""
    n = qf.size
    tau = int(tau)
    if tau < 1:
        raise ConfigurationError("tau must be >= 1")
    total = tau**n
    if total > BRUTE_FORCE_CANDIDATE_CAP:
        raise ConfigurationError(
            f"search space tau^N = {total} exceeds the cap {BRUTE_FORCE_CANDIDATE_CAP}"
        )
    alphabet = np.exp(2j * np.pi * np.arange(tau) / tau)
    radix = tau ** np.arange(n)
    best_val = np.inf
    best = None
    chunk = 1 << 14
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        digits = (idx[:, None] // radix[None, :]) % tau
        candidates = alphabet[digits]
        values = _evaluate_batch(qf, candidates)
        i = int(np.argmin(values))
        if values[i] < best_val:
            best_val = float(values[i])
            best = candidates[i]
    return RcVector(values=best, case=FeasibleSet.DISCRETE, tau=tau)
