"""Resonant Jaynes-Cummings dynamics in a truncated Fock space.

Full Hamiltonian, for reference only::

    H = (hbar w0 / 2) sz + hbar w a^dag a + hbar Omega(t) (a^dag s- + a s+)

On resonance, in the interaction picture only the last term survives. Its time
dependence sits in the scalar Omega(t), so the generator commutes with itself
at different times and the propagator is ``exp(-i theta V)`` where
``V = a^dag s- + a s+`` and ``theta`` is the pulse area. ``V`` couples
``|n-1, e>`` and ``|n, g>`` with strength ``sqrt(n)``, so each two-state
block rotates by ``sqrt(n) * theta``. The free-evolution frequencies never
enter any computed quantity and are not parameters here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fockgen.errors import TruncationError

# Occupation of the top Fock level tolerated before emission is refused.
HEADROOM_TOL = 1e-14


@dataclass(frozen=True)
class JointState:
    """Pure atom-field state ``sum_n amp_e[n] |n, e> + amp_g[n] |n, g>``."""

    amp_e: np.ndarray
    amp_g: np.ndarray

    def __post_init__(self):
        amp_e = np.asarray(self.amp_e, dtype=complex)
        amp_g = np.asarray(self.amp_g, dtype=complex)
        if amp_e.ndim != 1 or amp_e.shape != amp_g.shape:
            raise ValueError("amp_e and amp_g must be 1-D arrays of equal length")
        object.__setattr__(self, "amp_e", amp_e)
        object.__setattr__(self, "amp_g", amp_g)

    @property
    def n_max(self) -> int:
        return self.amp_e.shape[0] - 1

    @classmethod
    def excited_atom(cls, n_photons: int, n_max: int) -> "JointState":
        """Atom in ``|e>`` with the field in the Fock state ``|n_photons>``."""
        if not 0 <= n_photons <= n_max:
            raise ValueError(f"n_photons must lie in [0, {n_max}]")
        amp_e = np.zeros(n_max + 1, dtype=complex)
        amp_e[n_photons] = 1.0
        return cls(amp_e, np.zeros(n_max + 1, dtype=complex))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amp_e) ** 2) + np.sum(np.abs(self.amp_g) ** 2)))

    def as_vector(self) -> np.ndarray:
        """Stack as ``[amp_e, amp_g]``, i.e. atom (e, g) tensored with field."""
        return np.concatenate([self.amp_e, self.amp_g])

    def field_marginal(self) -> "FieldDensityMatrix":
        """Trace out the atom."""
        rho = np.outer(self.amp_e, self.amp_e.conj()) + np.outer(self.amp_g, self.amp_g.conj())
        return FieldDensityMatrix(rho)


@dataclass(frozen=True)
class FieldDensityMatrix:
    """Dense field density matrix in the Fock basis ``0..n_max``."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("rho must be a square matrix")
        object.__setattr__(self, "rho", rho)

    @property
    def n_max(self) -> int:
        return self.rho.shape[0] - 1

    @classmethod
    def fock(cls, n: int, n_max: int) -> "FieldDensityMatrix":
        if not 0 <= n <= n_max:
            raise ValueError(f"n must lie in [0, {n_max}]")
        rho = np.zeros((n_max + 1, n_max + 1), dtype=complex)
        rho[n, n] = 1.0
        return cls(rho)

    @classmethod
    def vacuum(cls, n_max: int) -> "FieldDensityMatrix":
        return cls.fock(0, n_max)

    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    def populations(self) -> np.ndarray:
        return self.rho.diagonal().real.copy()

    def check(self, atol: float = 1e-12, psd_floor: float = -1e-10) -> None:
        """Raise ``ValueError`` unless Hermitian, unit trace and PSD to tolerance."""
        if not np.allclose(self.rho, self.rho.conj().T, rtol=0.0, atol=atol):
            raise ValueError("density matrix is not Hermitian")
        if abs(self.trace() - 1.0) > atol:
            raise ValueError(f"density matrix trace is {self.trace()!r}, expected 1")
        lowest = np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))[0]
        if lowest < psd_floor:
            raise ValueError(f"density matrix has eigenvalue {lowest:.3e} below {psd_floor:.1e}")


@dataclass(frozen=True)
class EmissionChannelKraus:
    """Kraus pair for one excited atom crossing the field with pulse area ``theta``.

    ``stay`` keeps the atom in ``|e>`` and leaves the photon number alone;
    ``emit`` leaves the atom in ``|g>`` and adds one photon. The top level
    ``n_max`` has no emission target, so completeness holds on ``0..n_max-1``.
    """

    stay: np.ndarray
    emit: np.ndarray
    theta: float

    @classmethod
    def build(cls, theta: float, n_max: int) -> "EmissionChannelKraus":
        n = np.arange(n_max + 1)
        angles = np.sqrt(n + 1.0) * theta
        stay = np.diag(np.cos(angles)).astype(complex)
        emit = np.zeros((n_max + 1, n_max + 1), dtype=complex)
        emit[n[1:], n[:-1]] = -1j * np.sin(angles[:-1])
        return cls(stay, emit, float(theta))

    def completeness(self) -> np.ndarray:
        """``stay^dag stay + emit^dag emit`` restricted to levels ``0..n_max-1``."""
        full = self.stay.conj().T @ self.stay + self.emit.conj().T @ self.emit
        return full[:-1, :-1]


def emission_probability(n_photons, theta):
    """Probability that an excited atom emits into ``|n_photons>`` for pulse area ``theta``."""
    return np.sin(np.sqrt(np.asarray(n_photons) + 1.0) * theta) ** 2


def jc_propagate(state: JointState, theta: float) -> JointState:
    """Apply ``exp(-i theta V)`` block by block.

    The block ``(|n-1, e>, |n, g>)`` for ``n >= 1`` rotates as::

        e[n-1] <- cos(sqrt(n) theta) e[n-1] - i sin(sqrt(n) theta) g[n]
        g[n]   <- -i sin(sqrt(n) theta) e[n-1] + cos(sqrt(n) theta) g[n]

    and ``|0, g>`` is an eigenvector with eigenvalue zero.

    Raises:
        TruncationError: ``|n_max, e>`` is populated and ``theta != 0``; the
            partner ``|n_max + 1, g>`` lies outside the space.
    """
    if not np.isfinite(theta):
        raise ValueError("theta must be finite")
    if theta == 0:
        return JointState(state.amp_e.copy(), state.amp_g.copy())
    if state.amp_e[-1] != 0:
        raise TruncationError(
            f"|n_max={state.n_max}, e> is populated; evolving would leak past the photon cutoff"
        )
    n = np.arange(1, state.n_max + 1)
    c = np.cos(np.sqrt(n) * theta)
    s = np.sin(np.sqrt(n) * theta)
    e_lo = state.amp_e[:-1]
    g_hi = state.amp_g[1:]
    amp_e = state.amp_e.copy()
    amp_g = state.amp_g.copy()
    amp_e[:-1] = c * e_lo - 1j * s * g_hi
    amp_g[1:] = -1j * s * e_lo + c * g_hi
    return JointState(amp_e, amp_g)


def jc_generator(n_max: int) -> np.ndarray:
    """Matrix of ``V = a^dag s- + a s+`` on the ``[e-block, g-block]`` ordering."""
    dim = n_max + 1
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)
    ge = np.zeros((2, 2))
    ge[1, 0] = 1.0  # s- : |e> (index 0) -> |g> (index 1)
    lower = np.kron(ge, a.T)
    return (lower + lower.T).astype(complex)


def _require_headroom(rho: np.ndarray, theta: float) -> None:
    if theta != 0 and abs(rho[-1, -1]) > HEADROOM_TOL:
        raise TruncationError(
            f"top Fock level {rho.shape[0] - 1} is occupied ({abs(rho[-1, -1]):.3e}); "
            "an emission would exceed the photon cutoff"
        )


def emission_channel(rho: FieldDensityMatrix, theta: float) -> FieldDensityMatrix:
    """Field state after one fresh excited atom passes with pulse area ``theta``."""
    _require_headroom(rho.rho, theta)
    k = EmissionChannelKraus.build(theta, rho.n_max)
    out = k.stay @ rho.rho @ k.stay.conj().T + k.emit @ rho.rho @ k.emit.conj().T
    return FieldDensityMatrix(out)


def success_branch(rho: FieldDensityMatrix, theta: float) -> FieldDensityMatrix:
    """Unnormalised field state conditioned on the atom leaving in ``|g>``.

    The trace of the result is the emission probability for this step.
    """
    _require_headroom(rho.rho, theta)
    k = EmissionChannelKraus.build(theta, rho.n_max)
    return FieldDensityMatrix(k.emit @ rho.rho @ k.emit.conj().T)


def emission_channel_populations(pops: np.ndarray, thetas: np.ndarray, *, emit_only: bool = False) -> np.ndarray:
    """Batched channel on Fock-diagonal states.

    The channel maps diagonal density matrices to diagonal ones, so on
    states grown from vacuum it is exact to propagate populations only.
    ``pops`` has shape ``(batch, n_max + 1)`` and ``thetas`` shape
    ``(batch,)``. With ``emit_only`` the ``|e>`` outcome is dropped,
    which gives the success branch.
    """
    pops = np.asarray(pops, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    if np.any(thetas != 0) and np.any(np.abs(pops[:, -1]) > HEADROOM_TOL):
        raise TruncationError("top Fock level is occupied; an emission would exceed the photon cutoff")
    n = np.arange(pops.shape[1] - 1)
    p_emit = emission_probability(n[None, :], thetas[:, None])
    out = np.zeros_like(pops)
    if not emit_only:
        out[:, :-1] = pops[:, :-1] * (1.0 - p_emit)
        out[:, -1] = pops[:, -1]
    out[:, 1:] += pops[:, :-1] * p_emit
    return out


def fock_fidelity(rho: FieldDensityMatrix, n: int) -> float:
    """Population of ``|n>``, clamped to ``[0, 1]``."""
    if not 0 <= n <= rho.n_max:
        raise ValueError(f"N={n} outside the truncated space 0..{rho.n_max}")
    return float(min(1.0, max(0.0, rho.rho[n, n].real)))
