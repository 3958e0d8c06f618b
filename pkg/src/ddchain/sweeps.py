"""Sweep jobs over the protocol parameter space.

Each study produces a plain table of results from a grid of independent
protocol runs. Cells are pure functions of their parameters, so grids
can be computed by a process pool in any order; results land in
preallocated slots by cell index and the output never depends on worker
count. Infeasible cells (pulse width exceeding the period) are kept in
the table as NaN sentinels rather than dropped.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._version import __version__
from .kernel import KernelTrace, correlation_kernel, solve_p_equation
from .model import (
    ChainSpec,
    PulseSpec,
    build_free_hamiltonian,
    environment_block,
    sample_static_disorder,
)
from .propagate import final_fidelity, run_protocol, site_amplitude_trace

INFEASIBLE = float("nan")


@dataclass(frozen=True)
class SweepGrid:
    """Two swept axes plus the fixed parameters of the job."""

    axis1_name: str
    axis1: np.ndarray
    axis2_name: str
    axis2: np.ndarray
    fixed: dict

    def __post_init__(self):
        for name, values in ((self.axis1_name, self.axis1), (self.axis2_name, self.axis2)):
            v = np.asarray(values, dtype=float)
            if v.ndim != 1 or len(v) == 0:
                raise ValueError(f"axis {name!r} must be a nonempty vector")
            if len(v) > 1 and not np.all(np.diff(v) > 0):
                raise ValueError(f"axis {name!r} must be strictly increasing")


@dataclass(frozen=True)
class SweepResult:
    grid: SweepGrid
    fidelities: np.ndarray  # shape (len(axis1), len(axis2)), NaN = infeasible
    metadata: dict


@dataclass(frozen=True)
class SizeSweep:
    n_values: np.ndarray
    free: np.ndarray
    controlled: np.ndarray


@dataclass(frozen=True)
class VariantTraces:
    """Fidelity time series for the five robustness variants."""

    times: np.ndarray
    free: np.ndarray
    constant: np.ndarray
    broadening: np.ndarray
    static_random: np.ndarray
    period_noise: np.ndarray


@dataclass(frozen=True)
class PqComparison:
    times: np.ndarray
    p_abs: np.ndarray
    direct: np.ndarray
    abs_error: np.ndarray


def _final_fidelity_cell(args) -> float:
    chain, pulse = args
    return final_fidelity(chain, pulse)


def _size_cell(args):
    chain, pulse_free, pulse_ctrl = args
    return final_fidelity(chain, pulse_free), final_fidelity(chain, pulse_ctrl)


def _pmap(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    chunk = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


def _chain(n, j, gamma, epsilon, eta, seed) -> ChainSpec:
    return ChainSpec(
        n_sites=n,
        coupling=j,
        static_coupling_disorder=gamma,
        band_broadening=epsilon,
        per_period_noise=eta,
        seed=seed,
    )


def sweep_delta_tau(
    psi: float,
    n: int,
    m: int,
    delta_values,
    tau_values,
    j: float = 1.0,
    gamma: float = 0.0,
    epsilon: float = 0.0,
    eta: float = 0.0,
    seed: int = 1,
    workers: int = 1,
) -> SweepResult:
    """Final fidelity over a (width, period) grid at fixed strength."""
    delta_values = np.asarray(delta_values, dtype=float)
    tau_values = np.asarray(tau_values, dtype=float)
    grid = SweepGrid(
        "delta", delta_values, "tau", tau_values,
        {"psi": psi, "n": n, "m": m, "j": j, "gamma": gamma,
         "epsilon": epsilon, "eta": eta, "seed": seed},
    )
    started = time.perf_counter()
    chain = _chain(n, j, gamma, epsilon, eta, seed)
    table = np.full((len(delta_values), len(tau_values)), INFEASIBLE)
    jobs, slots = [], []
    for a, delta in enumerate(delta_values):
        for b, tau in enumerate(tau_values):
            if delta > tau:
                continue  # sentinel stays in place
            jobs.append((chain, PulseSpec(psi, tau, delta, m)))
            slots.append((a, b))
    for (a, b), value in zip(slots, _pmap(_final_fidelity_cell, jobs, workers)):
        table[a, b] = value
    meta = {"seed": seed, "version": __version__,
            "wall_time_s": time.perf_counter() - started}
    return SweepResult(grid, table, meta)


def sweep_ratio_psi(
    delta: float,
    ratio_values,
    psi_values,
    n: int,
    m: int,
    j: float = 1.0,
    gamma: float = 0.0,
    epsilon: float = 0.0,
    eta: float = 0.0,
    seed: int = 1,
    workers: int = 1,
) -> SweepResult:
    """Final fidelity over (period/width ratio, strength) at fixed width."""
    ratio_values = np.asarray(ratio_values, dtype=float)
    psi_values = np.asarray(psi_values, dtype=float)
    if np.any(ratio_values < 1.0):
        raise ValueError("ratios must be >= 1 so the width fits in the period")
    grid = SweepGrid(
        "ratio", ratio_values, "psi", psi_values,
        {"delta": delta, "n": n, "m": m, "j": j, "gamma": gamma,
         "epsilon": epsilon, "eta": eta, "seed": seed},
    )
    started = time.perf_counter()
    chain = _chain(n, j, gamma, epsilon, eta, seed)
    jobs = [
        (chain, PulseSpec(psi, ratio * delta, delta, m))
        for ratio in ratio_values
        for psi in psi_values
    ]
    values = _pmap(_final_fidelity_cell, jobs, workers)
    table = np.asarray(values).reshape(len(ratio_values), len(psi_values))
    meta = {"seed": seed, "version": __version__,
            "wall_time_s": time.perf_counter() - started}
    return SweepResult(grid, table, meta)


def sweep_size(
    psi: float,
    delta: float,
    tau: float,
    m: int,
    n_values,
    j: float = 1.0,
    gamma: float = 0.0,
    epsilon: float = 0.0,
    eta: float = 0.0,
    seed: int = 1,
    workers: int = 1,
) -> SizeSweep:
    """Free and controlled final fidelity for each chain size."""
    n_values = np.asarray(n_values, dtype=int)
    pulse_free = PulseSpec(0.0, tau, delta, m)
    pulse_ctrl = PulseSpec(psi, tau, delta, m)
    jobs = [
        (_chain(int(n), j, gamma, epsilon, eta, seed), pulse_free, pulse_ctrl)
        for n in n_values
    ]
    pairs = _pmap(_size_cell, jobs, workers)
    free = np.array([p[0] for p in pairs])
    ctrl = np.array([p[1] for p in pairs])
    return SizeSweep(n_values, free, ctrl)


def trace_variants(
    psi: float,
    delta: float,
    tau: float,
    m: int,
    n: int,
    j: float = 1.0,
    gamma: float = 0.5,
    epsilon: float = 0.5,
    eta: float = 0.1,
    seed: int = 1,
    record_every: int = 1,
) -> VariantTraces:
    """Fidelity time series for free evolution and the four controlled
    variants: clean chain, site-energy broadening, static bond disorder,
    per-period bond noise.

    All variants draw from the streams of one seed, so each disorder
    amplitude perturbs the same underlying realization.
    """
    pulse_ctrl = PulseSpec(psi, tau, delta, m)
    runs = {
        "free": (PulseSpec(0.0, tau, delta, m), _chain(n, j, 0.0, 0.0, 0.0, seed)),
        "constant": (pulse_ctrl, _chain(n, j, 0.0, 0.0, 0.0, seed)),
        "broadening": (pulse_ctrl, _chain(n, j, 0.0, epsilon, 0.0, seed)),
        "static_random": (pulse_ctrl, _chain(n, j, gamma, 0.0, 0.0, seed)),
        "period_noise": (pulse_ctrl, _chain(n, j, 0.0, 0.0, eta, seed)),
    }
    records = {
        name: run_protocol(chain, pulse, record_every=record_every)
        for name, (pulse, chain) in runs.items()
    }
    times = records["free"].times
    return VariantTraces(times, *(records[k].fidelities for k in
                                  ("free", "constant", "broadening",
                                   "static_random", "period_noise")))


def kernel_study(
    chain: ChainSpec,
    dt: float,
    t_max: float,
    threshold: float = 0.02,
    hold: float = 0.5,
) -> KernelTrace:
    """Correlation kernel of the chain's environment block.

    Static disorder (bond and site) perturbs the environment block only;
    the qubit-bath coupling is kept at its nominal value so disordered
    traces remain normalized to J^2 at zero delay and are directly
    comparable to the clean one.
    """
    bond_off, site_off = sample_static_disorder(chain)
    env = environment_block(build_free_hamiltonian(chain, bond_off, site_off))
    return correlation_kernel(env, chain.coupling, dt, t_max, threshold, hold)


def pq_check(
    chain: ChainSpec, pulse: PulseSpec | None, dt: float, t_max: float
) -> PqComparison:
    """Solve the memory-kernel equation and compare |P(t)| against the
    qubit amplitude from full unitary propagation on the same grid.

    Exact for any static chain: the drive offset, qubit-bath coupling,
    and environment block are read off the built Hamiltonian, disorder
    included. Per-period noise makes the kernel time dependent and is
    rejected.
    """
    if chain.per_period_noise > 0.0:
        raise ValueError("the memory-kernel route requires a static environment")
    bond_off, site_off = sample_static_disorder(chain)
    h = build_free_hamiltonian(chain, bond_off, site_off)
    kernel = correlation_kernel(environment_block(h), h.off_diagonal[0], dt, t_max)
    p = solve_p_equation(kernel, pulse, t_max, dt, drive_offset=h.diagonal[0])
    direct = np.abs(site_amplitude_trace(chain, pulse, dt, t_max))
    p_abs = np.abs(p.values)
    times = np.arange(len(p_abs)) * dt
    return PqComparison(times, p_abs, direct, np.abs(p_abs - direct))
