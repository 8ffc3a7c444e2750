"""Experiment drivers: single runs, parameter sweeps and convergence traces.

Every trial draws its channels from ``seed + trial_index``, runs the
alternating optimization for the configured case, and evaluates the
metrics. The remote device mirrors the local one, so for the optimized
cases its reflection vector solves the identical cancellation problem and
the local solution is reused; the random benchmark draws an independent
remote vector. The remote transmit power is spread uniformly across
subcarriers when evaluating capacities.
"""

from dataclasses import dataclass, replace

import numpy as np

from .exceptions import NumericalError, RisfdError
from .optimizer import alternate_optimize
from .reflection import random_rc
from .scenario import dbm_to_watts, snap_to_square
from .system import PowerAllocation, fd_capacity, hd_capacity
from .scenario import build_channel_set

SWEEP_AXES = ("n", "p", "b", "tau")

SWEEP_COLUMNS = (
    "axis",
    "case",
    "mean_sic_db",
    "std_sic_db",
    "mean_cfd",
    "mean_chd",
    "gain",
    "iters",
    "error",
)

RUN_COLUMNS = (
    "case",
    "tau",
    "trials",
    "mean_sic_db",
    "std_sic_db",
    "mean_cfd",
    "std_cfd",
    "mean_chd",
    "std_chd",
    "gain",
    "mean_iters",
)

CONVERGENCE_COLUMNS = ("iteration", "case", "objective", "sic_db")


@dataclass(frozen=True)
class TrialOutcome:
    sic_db: float
    fd_bits: float
    hd_bits: float
    gain: float
    iterations: int
    converged: bool
    result: object


@dataclass(frozen=True)
class ScenarioReport:
    """Aggregate metrics of one scenario over its trials."""

    case: str
    tau: int | None
    trials: int
    mean_sic_db: float
    std_sic_db: float
    mean_cfd: float
    std_cfd: float
    mean_chd: float
    std_chd: float
    gain: float
    mean_iters: float


def run_trial(config, trial_index):
    """Run one seeded trial and evaluate all figures of merit."""
    rng = np.random.default_rng(config.seed + trial_index)
    channels = build_channel_set(config, rng)
    result = alternate_optimize(
        channels,
        case=config.case,
        tau=config.tau,
        budget=config.budget_watts,
        noise_power=config.noise_power,
        tol=config.ao_tol,
        max_iter=config.ao_max_iter,
        grad_tol=config.grad_tol,
        rcg_max_iter=config.rcg_max_iter,
        rng=rng,
    )
    if config.case == "random":
        remote_rc = random_rc(channels.n_cells, rng)
    else:
        remote_rc = result.final_phi
    m = channels.n_subcarriers
    remote_power = PowerAllocation(
        values=np.full(m, config.remote_budget_watts / m),
        budget=config.remote_budget_watts,
    )
    fd_bits = fd_capacity(
        channels,
        result.final_phi,
        remote_rc,
        result.final_p,
        remote_power,
        config.noise_power,
        config.cp_len,
    )
    hd_bits = hd_capacity(channels, remote_power, config.noise_power, config.cp_len)
    return TrialOutcome(
        sic_db=float(result.sic_db_trace[-1]),
        fd_bits=fd_bits,
        hd_bits=hd_bits,
        gain=fd_bits / hd_bits,
        iterations=result.iterations,
        converged=result.converged,
        result=result,
    )


def run_scenario(config):
    """Average the per-trial metrics of a validated scenario."""
    config = config.validated()
    outcomes = [run_trial(config, t) for t in range(config.trials)]
    sic = np.array([o.sic_db for o in outcomes])
    cfd = np.array([o.fd_bits for o in outcomes])
    chd = np.array([o.hd_bits for o in outcomes])
    gains = np.array([o.gain for o in outcomes])
    iters = np.array([o.iterations for o in outcomes], dtype=float)
    return ScenarioReport(
        case=config.case,
        tau=config.tau,
        trials=config.trials,
        mean_sic_db=float(sic.mean()),
        std_sic_db=float(sic.std()),
        mean_cfd=float(cfd.mean()),
        std_cfd=float(cfd.std()),
        mean_chd=float(chd.mean()),
        std_chd=float(chd.std()),
        gain=float(gains.mean()),
        mean_iters=float(iters.mean()),
    )


def convergence_trace(config):
    """Rows of the objective trajectory for a single trial (the base seed)."""
    config = config.validated()
    outcome = run_trial(config, 0)
    result = outcome.result
    rows = []
    for i, (objective, sic_db) in enumerate(
        zip(result.objective_trace, result.sic_db_trace)
    ):
        rows.append(
            {
                "iteration": i,
                "case": _case_label(config),
                "objective": float(objective),
                "sic_db": float(sic_db),
            }
        )
    return rows


def _case_label(config):
    if config.case == "discrete":
        return f"discrete:{config.tau}"
    return config.case


def apply_axis(config, axis, value):
    """Return a copy of ``config`` with one sweep axis applied."""
    if axis == "n":
        return replace(config, n_cells=snap_to_square(int(value)))
    if axis == "p":
        return replace(
            config, tx_power_dbm=float(value), remote_tx_power_dbm=float(value)
        )
    if axis == "b":
        return replace(config, bandwidth_hz=float(value))
    if axis == "tau":
        return replace(config, case="discrete", tau=int(value))
    raise RisfdError(f"unknown sweep axis {axis!r}")


def sweep(config, axis, values):
    """Run the scenario once per axis value; returns CSV-ready row dicts.

    Rows are ordered by axis value. A trial that fails numerically yields a
    row with empty metric cells and the reason in the error column, never a
    NaN.
    """
    if axis not in SWEEP_AXES:
        raise RisfdError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")
    if not values:
        raise RisfdError("sweep values must be nonempty")
    rows = []
    for value in sorted(values):
        swept = apply_axis(config, axis, value)
        base = {"axis": value, "case": _case_label(swept)}
        try:
            report = run_scenario(swept)
        except NumericalError as exc:
            rows.append(
                base
                | {
                    "mean_sic_db": None,
                    "std_sic_db": None,
                    "mean_cfd": None,
                    "mean_chd": None,
                    "gain": None,
                    "iters": None,
                    "error": str(exc),
                }
            )
            continue
        rows.append(
            base
            | {
                "mean_sic_db": report.mean_sic_db,
                "std_sic_db": report.std_sic_db,
                "mean_cfd": report.mean_cfd,
                "mean_chd": report.mean_chd,
                "gain": report.gain,
                "iters": report.mean_iters,
                "error": None,
            }
        )
    return rows
