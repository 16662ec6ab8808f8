"""Cross-module invariant checks run by ``fockgen validate``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from fockgen.hilbert import (
    EmissionChannelKraus,
    FieldDensityMatrix,
    JointState,
    emission_channel,
    fock_fidelity,
    jc_generator,
    jc_propagate,
    success_branch,
)
from fockgen.mode_profile import CavityParams, pulse_area_closed, pulse_area_numeric, solve_symmetric_window
from fockgen.noise import analytic_fidelity, monte_carlo_fidelity, noise_averaged_field
from fockgen.protocol import compile_schedule, target_area

GAMMA_GRID = tuple(k / 100 for k in range(1, 11))
N_GRID = tuple(range(1, 11))


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def random_joint_state(rng: np.random.Generator, n_max: int) -> JointState:
    """Normalised random state with ``|n_max, e>`` empty (cutoff headroom)."""
    e = rng.normal(size=n_max + 1) + 1j * rng.normal(size=n_max + 1)
    g = rng.normal(size=n_max + 1) + 1j * rng.normal(size=n_max + 1)
    e[-1] = 0.0
    norm = math.sqrt(np.sum(np.abs(e) ** 2) + np.sum(np.abs(g) ** 2))
    return JointState(e / norm, g / norm)


def random_density_matrix(rng: np.random.Generator, n_max: int) -> FieldDensityMatrix:
    """Random full-rank state supported on ``0..n_max-1`` (top level empty)."""
    dim = n_max + 1
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    a[-1, :] = 0.0
    rho = a @ a.conj().T
    return FieldDensityMatrix(rho / np.trace(rho).real)


def faulty_channel(rho: FieldDensityMatrix, theta: float) -> FieldDensityMatrix:
    """Emission channel with the sign of the emit Kraus term flipped (harness self-test)."""
    k = EmissionChannelKraus.build(theta, rho.n_max)
    return FieldDensityMatrix(k.stay @ rho.rho @ k.stay.conj().T - k.emit @ rho.rho @ k.emit.conj().T)


def quadrature_tolerance(order: int, gamma: float, n: int) -> float:
    """Allowed |quadrature - closed form| at a given Gauss-Hermite order.

    The ``order``-point rule on ``E[cos(pi + s z)]``, ``s = sqrt(2) pi
    gamma`` in Hermite variables, errs by at most
    ``order! / (2^order (2 order)!) * s^(2 order)``. Half of that is the
    error on one step's emission probability, and ``n`` steps multiply it
    by at most ``n``. The floor of 1e-8 is the order-40 target, far above
    round-off.
    """
    s = math.sqrt(2.0) * math.pi * gamma
    log_bound = (
        math.lgamma(order + 1) - order * math.log(2.0) - math.lgamma(2 * order + 1) + 2 * order * math.log(s)
        if s > 0
        else -math.inf
    )
    return max(1e-8, n * 0.5 * math.exp(log_bound))


def check_unitarity(rng, trials=200) -> CheckResult:
    worst = 0.0
    for _ in range(trials):
        n_max = int(rng.integers(1, 11))
        state = random_joint_state(rng, n_max)
        out = jc_propagate(state, float(rng.uniform(-10, 10)))
        worst = max(worst, abs(out.norm() - 1.0))
    return CheckResult("unitarity", worst < 1e-12, f"max |norm - 1| = {worst:.2e} (tol 1e-12)")


def check_composition(rng, trials=200) -> CheckResult:
    worst = 0.0
    for _ in range(trials):
        n_max = int(rng.integers(1, 11))
        state = random_joint_state(rng, n_max)
        t1, t2 = rng.uniform(-10, 10, size=2)
        two = jc_propagate(jc_propagate(state, t1), t2)
        one = jc_propagate(state, t1 + t2)
        worst = max(worst, float(np.max(np.abs(two.as_vector() - one.as_vector()))))
    return CheckResult("composition", worst < 1e-12, f"max |U(t2)U(t1) - U(t1+t2)| = {worst:.2e} (tol 1e-12)")


def check_kraus_completeness(rng, trials=200) -> CheckResult:
    worst = 0.0
    for _ in range(trials):
        n_max = int(rng.integers(1, 11))
        k = EmissionChannelKraus.build(float(rng.uniform(-10, 10)), n_max)
        worst = max(worst, float(np.max(np.abs(k.completeness() - np.eye(n_max)))))
    return CheckResult("kraus_completeness", worst < 1e-12, f"max |sum K^dag K - I| = {worst:.2e} (tol 1e-12)")


def check_matrix_exponential(rng, trials=100) -> CheckResult:
    worst = 0.0
    for _ in range(trials):
        n_max = int(rng.integers(0, 5))
        state = random_joint_state(rng, n_max) if n_max > 0 else JointState([0.0], [1.0])
        theta = float(rng.uniform(-10, 10))
        ref = expm(-1j * theta * jc_generator(n_max)) @ state.as_vector()
        worst = max(worst, float(np.max(np.abs(jc_propagate(state, theta).as_vector() - ref))))
    return CheckResult("matrix_exponential_oracle", worst < 1e-10, f"max deviation = {worst:.2e} (tol 1e-10)")


def check_success_equals_fidelity(params: CavityParams, order: int, channel=emission_channel) -> CheckResult:
    worst = 0.0
    for n in N_GRID:
        schedule = compile_schedule(params, n)
        rho = FieldDensityMatrix.vacuum(n)
        branch = FieldDensityMatrix.vacuum(n)
        for theta in schedule.delivered_areas:
            rho = channel(rho, theta)
            branch = success_branch(branch, theta)
        worst = max(worst, abs(fock_fidelity(rho, n) - fock_fidelity(branch, n)))
    ideal = worst
    for gamma in GAMMA_GRID:
        for n in N_GRID:
            rho, branch, _ = noise_averaged_field(gamma, n, order, channel=channel)
            worst = max(worst, abs(fock_fidelity(rho, n) - fock_fidelity(branch, n)))
    return CheckResult(
        "success_equals_fidelity",
        ideal < 1e-12 and worst < 1e-10,
        f"ideal max |P - F| = {ideal:.2e} (tol 1e-12), noisy max |P - F| = {worst:.2e} (tol 1e-10)",
    )


def check_trace_preservation(rng, trials=200, channel=emission_channel) -> CheckResult:
    worst = 0.0
    for _ in range(trials):
        n_max = int(rng.integers(1, 11))
        rho = random_density_matrix(rng, n_max)
        out = channel(rho, float(rng.uniform(-10, 10))).rho
        worst = max(worst, abs(np.trace(out).real - 1.0), float(np.max(np.abs(out - out.conj().T))))
    return CheckResult("trace_preservation", worst < 1e-12, f"max trace/Hermiticity defect = {worst:.2e} (tol 1e-12)")


def check_closed_form_vs_quadrature(order: int, channel=emission_channel) -> CheckResult:
    worst_ratio = 0.0
    worst = 0.0
    for gamma in GAMMA_GRID:
        for n in N_GRID:
            rho, _, _ = noise_averaged_field(gamma, n, order, channel=channel)
            err = abs(fock_fidelity(rho, n) - analytic_fidelity(gamma, n))
            worst = max(worst, err)
            worst_ratio = max(worst_ratio, err / quadrature_tolerance(order, gamma, n))
    bound = quadrature_tolerance(order, max(GAMMA_GRID), max(N_GRID))
    return CheckResult(
        "closed_form_vs_quadrature",
        worst_ratio < 1.0,
        f"order {order}: max |F_quad - F_closed| = {worst:.2e} (tol {bound:.1e} at the grid corner)",
    )


def check_lambda_invariance(params: CavityParams, order: int, seed: int) -> CheckResult:
    worst = 0.0
    for gamma in (0.03, 0.1):
        for n in (1, 5, 10):
            ref, _, _ = noise_averaged_field(gamma, n, order, params.omega0)
            for scale in (0.37, 2.0, 11.0):
                alt, _, _ = noise_averaged_field(gamma, n, order, scale * params.omega0)
                worst = max(worst, abs(fock_fidelity(ref, n) - fock_fidelity(alt, n)))
    mc_a = monte_carlo_fidelity(0.1, 10, 2000, seed, lam=params.omega0)
    mc_b = monte_carlo_fidelity(0.1, 10, 2000, seed, lam=2.0 * params.omega0)
    mc_same = mc_a.fidelity == mc_b.fidelity and mc_a.success_rate == mc_b.success_rate
    return CheckResult(
        "lambda_invariance",
        worst < 1e-10 and mc_same,
        f"quadrature max dF = {worst:.2e} (tol 1e-10); Monte Carlo lam -> 2 lam identical: {mc_same}",
    )


def check_window_round_trip(params: CavityParams, rng, trials=200) -> CheckResult:
    full = params.full_transit_area
    targets = [target_area(i) for i in N_GRID] + list(rng.uniform(1e-6, 0.999, size=trials) * full)
    worst = 0.0
    for i, theta in enumerate(targets, 1):
        w = solve_symmetric_window(params, i, float(theta))
        worst = max(worst, abs(pulse_area_closed(params, w.r_start, w.r_end) - theta) / theta)
    return CheckResult("window_round_trip", worst < 1e-10, f"max relative error = {worst:.2e} (tol 1e-10)")


def check_pulse_area_quadrature(params: CavityParams, rng, trials=100) -> CheckResult:
    worst = 0.0
    lim = 5.0 * params.waist
    for _ in range(trials):
        a, b = np.sort(rng.uniform(-lim, lim, size=2))
        closed = pulse_area_closed(params, a, b)
        numeric = pulse_area_numeric(params, a, b)
        worst = max(worst, abs(closed - numeric) / max(1.0, closed))
    return CheckResult(
        "pulse_area_closed_vs_quadrature",
        worst < 1e-10,
        f"max |closed - numeric| / max(1, area) = {worst:.2e} (tol 1e-10)",
    )


def run_all(params: CavityParams, order: int = 40, seed: int = 42, inject_fault: bool = False) -> list[CheckResult]:
    """Run every check in a fixed order; ``inject_fault`` swaps in :func:`faulty_channel`."""
    rng = np.random.default_rng(seed)
    channel = faulty_channel if inject_fault else emission_channel
    return [
        check_unitarity(rng),
        check_composition(rng),
        check_kraus_completeness(rng),
        check_matrix_exponential(rng),
        check_success_equals_fidelity(params, order, channel),
        check_trace_preservation(rng, channel=channel),
        check_closed_form_vs_quadrature(order, channel),
        check_lambda_invariance(params, order, seed),
        check_window_round_trip(params, rng),
        check_pulse_area_quadrature(params, rng),
    ]
