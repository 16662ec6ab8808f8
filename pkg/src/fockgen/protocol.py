"""Compile and run the N-atom Fock-state preparation sequence.

Atom ``i`` meets the field in ``|i-1>`` and must leave it in ``|i>``; the
block rotation angle is ``sqrt(i) * theta``, so its pulse area is set to
``pi / (2 sqrt(i))``. Atoms are serialised on a grid of slots of length
``tau_bar``: atom ``i`` enters as atom ``i-1`` exits. Each resonant
window is centred in its slot. Stark switching is treated as instantaneous,
and the compiler only checks that every transition has ``t_switch`` of room.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TextIO

from fockgen.errors import SlotOverflowError
from fockgen.hilbert import FieldDensityMatrix, emission_channel, fock_fidelity, success_branch
from fockgen.mode_profile import CavityParams, PulseWindow, pulse_area_closed, solve_symmetric_window

SCHEDULE_COLUMNS = ("atom_index", "theta_rad", "r_start_m", "r_end_m", "t_on_s", "t_off_s")


def target_area(atom_index: int) -> float:
    """Pulse area that moves ``|i-1>|e>`` fully into ``|i>|g>``."""
    return math.pi / (2.0 * math.sqrt(atom_index))


@dataclass(frozen=True)
class Schedule:
    params: CavityParams
    n_target: int
    windows: tuple[PulseWindow, ...]
    injection_times: tuple[float, ...]
    total_time: float

    def __post_init__(self):
        if len(self.windows) != self.n_target or len(self.injection_times) != self.n_target:
            raise ValueError("schedule needs one window and one injection time per atom")
        if any(b <= a for a, b in zip(self.injection_times, self.injection_times[1:])):
            raise ValueError("injection times must be strictly increasing")

    @property
    def t_on(self) -> tuple[float, ...]:
        """Absolute times at which each atom is switched into resonance."""
        slot = self.params.tau_bar
        return tuple(t0 + 0.5 * (slot - w.duration) for t0, w in zip(self.injection_times, self.windows))

    @property
    def t_off(self) -> tuple[float, ...]:
        return tuple(t + w.duration for t, w in zip(self.t_on, self.windows))

    @property
    def delivered_areas(self) -> tuple[float, ...]:
        """Pulse area each compiled window actually collects along the mode."""
        return tuple(pulse_area_closed(self.params, w.r_start, w.r_end) for w in self.windows)


@dataclass(frozen=True)
class BudgetReport:
    """Generation time set against the cavity lifetime shared by N photons."""

    total_time: float
    t_d: float
    margin: float
    feasible: bool
    switch_feasible: bool
    gaps: tuple[float, ...] = ()

    def summary(self) -> str:
        return (
            f"total_time = {self.total_time * 1e6:.6g} us\n"
            f"t_d = t_cav/N = {self.t_d * 1e3:.6g} ms\n"
            f"margin t_d/total = {self.margin:.6g}\n"
            f"feasible = {str(self.feasible).lower()}\n"
            f"switch_feasible = {str(self.switch_feasible).lower()}"
        )


def compile_schedule(params: CavityParams, n: int) -> Schedule:
    """Build windows and slot timing for preparing ``|n>``.

    Raises:
        InfeasibleTargetError: some atom's pulse area can't be reached.
        SlotOverflowError: a window plus two switching intervals exceeds ``tau_bar``.
    """
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    windows = []
    for i in range(1, n + 1):
        window = solve_symmetric_window(params, i, target_area(i))
        needed = window.duration + 2.0 * params.t_switch
        if needed > params.tau_bar:
            raise SlotOverflowError(
                f"atom {i}: window {window.duration * 1e6:.4g} us plus 2 x {params.t_switch * 1e6:.4g} us "
                f"switching needs {needed * 1e6:.4g} us, slot is {params.tau_bar * 1e6:.4g} us",
                atom_index=i,
            )
        windows.append(window)
    injection = tuple((i - 1) * params.tau_bar for i in range(1, n + 1))
    return Schedule(params, n, tuple(windows), injection, n * params.tau_bar)


@dataclass(frozen=True)
class IdealRun:
    """Outcome of the noise-free sequence; ``emission_probs[i]`` belongs to atom ``i+1``."""

    field: FieldDensityMatrix
    emission_probs: tuple[float, ...]

    @property
    def fidelity(self) -> float:
        return fock_fidelity(self.field, self.field.n_max)


def run_ideal(schedule: Schedule) -> IdealRun:
    """Apply each compiled window's pulse area to the field, starting from vacuum.

    The field is truncated at ``n_max = N``; one atom adds at most one photon.
    """
    rho = FieldDensityMatrix.vacuum(schedule.n_target)
    probs = []
    for theta in schedule.delivered_areas:
        probs.append(success_branch(rho, theta).trace())
        rho = emission_channel(rho, theta)
    return IdealRun(rho, tuple(probs))


def decoherence_budget(params: CavityParams, schedule: Schedule) -> BudgetReport:
    """Compare the total generation time to ``t_d = t_cav / N``.

    ``gaps`` lists the idle time before the first window, between
    successive windows, and after the last; each must hold one Stark switch.
    """
    n = max(schedule.n_target, 1)
    t_d = params.t_cav / n
    total = schedule.total_time
    edges = [0.0]
    for on, off in zip(schedule.t_on, schedule.t_off):
        edges.extend([on, off])
    edges.append(total)
    gaps = tuple(edges[k + 1] - edges[k] for k in range(0, len(edges), 2))
    # A few ulps of slack: gaps are differences of rounded times.
    slack = 1e-12 * max(total, params.tau_bar)
    switch_ok = all(g >= params.t_switch - slack for g in gaps)
    margin = t_d / total if total > 0 else math.inf
    return BudgetReport(total, t_d, margin, total < t_d, switch_ok, gaps)


def write_schedule(schedule: Schedule, fh: TextIO) -> None:
    """Write the flat text form: one ``#`` header with parameters, one line per window."""
    p = schedule.params
    fh.write(
        f"# omega0={p.omega0!r} waist={p.waist!r} velocity={p.velocity!r} t_cav={p.t_cav!r} "
        f"t_switch={p.t_switch!r} tau_bar={p.tau_bar!r} n_target={schedule.n_target} "
        f"total_time={schedule.total_time!r}\n"
    )
    fh.write("# " + " ".join(SCHEDULE_COLUMNS) + "\n")
    for w, on, off in zip(schedule.windows, schedule.t_on, schedule.t_off):
        fh.write(f"{w.atom_index} {w.target_area!r} {w.r_start!r} {w.r_end!r} {on!r} {off!r}\n")


def read_schedule(fh: TextIO) -> Schedule:
    """Inverse of :func:`write_schedule`."""
    header = None
    rows = []
    for line in fh:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body and header is None:
                header = dict(item.split("=", 1) for item in body.split())
            continue
        rows.append(line.split())
    if header is None:
        raise ValueError("schedule file has no parameter header")
    params = CavityParams(
        **{k: float(header[k]) for k in ("omega0", "waist", "velocity", "t_cav", "t_switch", "tau_bar")}
    )
    windows = []
    injection = []
    for row in rows:
        if len(row) != len(SCHEDULE_COLUMNS):
            raise ValueError(f"expected {len(SCHEDULE_COLUMNS)} columns, got {len(row)}: {row}")
        idx = int(row[0])
        theta, r0, r1, on, off = map(float, row[1:])
        windows.append(PulseWindow(idx, r0, r1, (r1 - r0) / params.velocity, theta))
        injection.append((idx - 1) * params.tau_bar)
    n = int(header["n_target"])
    return Schedule(params, n, tuple(windows), tuple(injection), float(header["total_time"]))
