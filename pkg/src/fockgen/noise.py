"""Fidelity loss from Gaussian jitter in the atom-field interaction times.

Atom ``i`` interacts for a time ``t_i ~ Normal(t_mean_i, gamma * t_mean_i)``
with ``t_mean_i = pi / (2 sqrt(i) lam)``, and the timings of different atoms
are independent. Noise is applied in the constant-coupling picture,
``theta_i = lam * t_i``, not through the Gaussian mode profile. Because every
``theta_i`` then has mean ``pi / (2 sqrt(i))`` and relative spread ``gamma``,
no result depends on ``lam``.

Three evaluations are offered: the closed form, a Gauss-Hermite average of
the emission channel for each atom chained from vacuum, and a seeded Monte Carlo
over sampled timings. The Gaussian is used over the whole real line,
negative times included; at gamma <= 0.1 that tail holds < 1e-23.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from fockgen.hilbert import (
    FieldDensityMatrix,
    emission_channel,
    emission_channel_populations,
    emission_probability,
    fock_fidelity,
    success_branch,
)
from fockgen.mode_profile import CavityParams

DEFAULT_LAMBDA = CavityParams().omega0
DEFAULT_QUAD_ORDER = 40
MIN_QUAD_ORDER = 10

# Monte Carlo draws come in fixed blocks; block b, atom i has its own stream.
MC_BLOCK = 4096

METHODS = ("analytic", "quadrature", "monte_carlo")


@dataclass(frozen=True)
class NoiseModel:
    gamma: float
    lam: float = DEFAULT_LAMBDA
    n_atoms: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ValueError(f"gamma must be finite and >= 0, got {self.gamma!r}")
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise ValueError(f"lam must be finite and > 0, got {self.lam!r}")
        if self.n_atoms < 0:
            raise ValueError("n_atoms must be >= 0")

    @property
    def mean_times(self) -> np.ndarray:
        i = np.arange(1, self.n_atoms + 1, dtype=float)
        return np.pi / (2.0 * np.sqrt(i) * self.lam)

    @property
    def spreads(self) -> np.ndarray:
        return self.gamma * self.mean_times


@dataclass(frozen=True)
class SimResult:
    fidelity: float
    success_rate: float
    per_step_probs: tuple[float, ...]
    mc_std_err: float
    method: str
    trials: int
    seed: int
    gamma: float
    n: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_step_probs"] = list(self.per_step_probs)
        return d


def timing_pdf(t, t_mean: float, gamma: float):
    """Gaussian density of the interaction time, std ``gamma * t_mean``.

    ``gamma = 0`` is the Dirac limit and has no density; callers take the
    ideal path instead.
    """
    if not gamma > 0:
        raise ValueError("timing_pdf needs gamma > 0; handle gamma = 0 as the noiseless case")
    if not t_mean > 0:
        raise ValueError("t_mean must be positive")
    sigma = gamma * t_mean
    z = (np.asarray(t, dtype=float) - t_mean) / sigma
    return np.exp(-0.5 * z * z) / (sigma * math.sqrt(2.0 * math.pi))


def per_step_probability(gamma: float) -> float:
    """Emission probability of one atom averaged over its timing jitter.

    ``<sin^2(pi/2 (1 + gamma z))>`` over ``z ~ N(0, 1)``; the same for
    every atom index and coupling.
    """
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    return 0.5 * (1.0 + math.exp(-0.5 * (gamma * math.pi) ** 2))


def analytic_fidelity(gamma: float, n: int) -> float:
    """Closed form ``[(1 + exp(-gamma^2 pi^2 / 2)) / 2] ** n``."""
    if n < 1:
        raise ValueError("N must be >= 1")
    return per_step_probability(gamma) ** n


def gauss_hermite_normal(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``E[f(z)]`` with ``z ~ N(0, 1)``."""
    x, w = np.polynomial.hermite.hermgauss(order)
    return math.sqrt(2.0) * x, w / math.sqrt(math.pi)


def _nodes(gamma: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    if gamma == 0:
        return np.zeros(1), np.ones(1)
    return gauss_hermite_normal(order)


def noise_averaged_field(
    gamma: float, n: int, order: int = DEFAULT_QUAD_ORDER, lam: float = DEFAULT_LAMBDA, channel=emission_channel
) -> tuple[FieldDensityMatrix, FieldDensityMatrix, tuple[float, ...]]:
    """Chain the timing-averaged channels from vacuum.

    Returns the field state, the unnormalised all-atoms-in-``|g>`` branch,
    and each atom's emission probability given that all earlier atoms
    emitted. Unlike :func:`quadrature_fidelity` any ``order >= 1`` is
    accepted, which convergence studies need. ``channel`` is exposed as a
    test seam.
    """
    if order < 1:
        raise ValueError("quadrature order must be >= 1")
    model = NoiseModel(gamma, lam, n)
    z, w = _nodes(gamma, order)
    rho = FieldDensityMatrix.vacuum(n)
    branch = FieldDensityMatrix.vacuum(n)
    steps = []
    for t_mean, sigma in zip(model.mean_times, model.spreads):
        thetas = lam * (t_mean + sigma * z)
        prev = branch.trace()
        rho = FieldDensityMatrix(sum(wk * channel(rho, th).rho for wk, th in zip(w, thetas)))
        branch = FieldDensityMatrix(sum(wk * success_branch(branch, th).rho for wk, th in zip(w, thetas)))
        steps.append(branch.trace() / prev if prev > 0 else 0.0)
    return rho, branch, tuple(steps)


def quadrature_fidelity(
    gamma: float, n: int, order: int = DEFAULT_QUAD_ORDER, lam: float = DEFAULT_LAMBDA
) -> SimResult:
    """Deterministic noise average by Gauss-Hermite quadrature of the given order."""
    if order < MIN_QUAD_ORDER:
        raise ValueError(f"quadrature order must be >= {MIN_QUAD_ORDER}, got {order}")
    if n < 1:
        raise ValueError("N must be >= 1")
    rho, branch, steps = noise_averaged_field(gamma, n, order, lam)
    return SimResult(
        fidelity=fock_fidelity(rho, n),
        success_rate=fock_fidelity(branch, n),
        per_step_probs=steps,
        mc_std_err=0.0,
        method="quadrature",
        trials=0,
        seed=0,
        gamma=gamma,
        n=n,
    )


def standard_normal_block(seed: int, block: int, atom: int) -> np.ndarray:
    """The ``MC_BLOCK`` normal draws for one (block, atom) pair."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(block, atom))
    return np.random.Generator(np.random.PCG64(ss)).standard_normal(MC_BLOCK)


def _mc_block(args):
    seed, block, size, model = args
    n = model.n_atoms
    z = np.empty((size, n))
    for i in range(n):
        z[:, i] = standard_normal_block(seed, block, i + 1)[:size]
    thetas = model.lam * (model.mean_times + model.spreads * z)
    pops = np.zeros((size, n + 1))
    pops[:, 0] = 1.0
    branch = pops.copy()
    for i in range(n):
        pops = emission_channel_populations(pops, thetas[:, i])
        branch = emission_channel_populations(branch, thetas[:, i], emit_only=True)
    step = emission_probability(np.arange(n)[None, :], thetas)
    return pops[:, n], branch[:, n], step


def _mean_and_stderr(x: np.ndarray) -> tuple[float, float]:
    # fsum is correctly rounded, so the result does not depend on how the
    # samples were partitioned among workers.
    count = x.shape[0]
    mean = math.fsum(x) / count
    if count < 2:
        return mean, math.nan
    var = math.fsum((x - mean) ** 2) / (count - 1)
    return mean, math.sqrt(var / count)


def monte_carlo_fidelity(
    gamma: float,
    n: int,
    trials: int,
    seed: int,
    lam: float = DEFAULT_LAMBDA,
    workers: int = 1,
) -> SimResult:
    """Average the exact channel chain over sampled interaction times.

    Draw ``(trial, atom)`` depends only on ``(seed, trial, atom)``. So results
    are bit-identical for any ``workers``, and a cell's samples are shared
    across ``gamma`` and ``N`` (common random numbers).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if n < 1:
        raise ValueError("N must be >= 1")
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")
    model = NoiseModel(gamma, lam, n)
    jobs = []
    for block, start in enumerate(range(0, trials, MC_BLOCK)):
        jobs.append((seed, block, min(MC_BLOCK, trials - start), model))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_mc_block, jobs))
    else:
        parts = [_mc_block(job) for job in jobs]

    fid = np.concatenate([p[0] for p in parts])
    succ = np.concatenate([p[1] for p in parts])
    step = np.concatenate([p[2] for p in parts])
    f_mean, f_err = _mean_and_stderr(fid)
    p_mean = math.fsum(succ) / trials
    per_step = tuple(math.fsum(step[:, i]) / trials for i in range(n))
    return SimResult(
        fidelity=min(1.0, max(0.0, f_mean)),
        success_rate=min(1.0, max(0.0, p_mean)),
        per_step_probs=per_step,
        mc_std_err=f_err,
        method="monte_carlo",
        trials=trials,
        seed=seed,
        gamma=gamma,
        n=n,
    )


def analytic_result(gamma: float, n: int) -> SimResult:
    """Closed form packaged as a :class:`SimResult`."""
    f = analytic_fidelity(gamma, n)
    p = per_step_probability(gamma)
    return SimResult(f, f, (p,) * n, 0.0, "analytic", 0, 0, gamma, n)
