"""Repeated-measurement (quantum Zeno) protocols.

Covers the generic N-pulse survival probability, the neutron-spin model in
which a pi-pulse is chopped into N slices with the down component peeled off
at every step, the channel density matrices with and without intermediate
detectors, and the uncertainty-principle bound that caps the attainable N.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .finite import FiniteModel, survival_exact

PSD_FLOOR = -1e-10


def neutron_model(omega: float = 1.0) -> FiniteModel:
    """Two-level spin in a transverse field: H = (omega/2) sigma_1.

    omega = 2 mu B is the magnetic energy gap; the constant part of the free
    Hamiltonian is dropped (it only contributes a global phase).
    """
    return FiniteModel(h0_diag=[0.0, 0.0],
                       h_prime=[[0.0, omega / 2.0], [omega / 2.0, 0.0]], a=0)


@dataclass(frozen=True)
class ChannelDensityMatrix:
    """(N+1)-channel density matrix of the neutron + detectors system.

    Channel 0 is the surviving (spin-up) route; channel j >= 1 collects the
    component peeled off at step N - j + 1.  ``observed`` marks whether the
    intermediate detectors were present (which kills the off-diagonals).
    """

    n_measurements: int
    entries: np.ndarray
    observed: bool

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        size = self.n_measurements + 1
        if m.shape != (size, size):
            raise ValidationError("channel matrix has wrong shape")
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise ValidationError("channel matrix not Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-10:
            raise ValidationError("channel matrix trace differs from 1")
        if np.min(np.linalg.eigvalsh(m)) < PSD_FLOOR:
            raise ValidationError("channel matrix not positive semidefinite")
        if self.observed and m.size > 1:
            off = m - np.diag(np.diag(m))
            if np.max(np.abs(off)) > 1e-12:
                raise ValidationError("observed matrix must be diagonal")
        object.__setattr__(self, "entries", m)

    def to_dict(self) -> dict:
        return {
            "n_measurements": self.n_measurements,
            "observed": self.observed,
            "entries_re": self.entries.real.ravel().tolist(),
            "entries_im": self.entries.imag.ravel().tolist(),
        }


@dataclass(frozen=True)
class UncertaintyParams:
    """Magnetic energy gap and kinetic energy spread of the beam."""

    delta_em: float
    delta_ek: float

    def __post_init__(self):
        if self.delta_em <= 0 or self.delta_ek <= 0:
            raise ValidationError("energy scales must be strictly positive")

    @property
    def ratio(self) -> float:
        return self.delta_em / self.delta_ek


def pulsed_survival(model: FiniteModel, n: int, total_time: float,
                    keep: tuple[int, ...] | None = None) -> float:
    """Survival probability after N projective measurements in time T.

    With the default rank-one projector onto the initial level this is
    [P(T/N)]^N with P the exact single-interval survival probability; a
    subspace projector may be requested through ``keep`` (indices retained by
    the measurement), in which case the chain O U(T/N) O is multiplied out
    explicitly.
    """
    if n < 1:
        raise ValidationError("need at least one measurement")
    if total_time <= 0:
        raise ValidationError("total time must be positive")
    dt = total_time / n
    if keep is None:
        p1 = float(survival_exact(model, [dt]).probabilities[0])
        return p1 ** n
    keep = tuple(sorted(set(keep)))
    if model.a not in keep:
        raise ValidationError("projector must retain the initial level")
    proj = np.zeros((model.dim, model.dim), dtype=complex)
    for k in keep:
        proj[k, k] = 1.0
    vals, vecs = np.linalg.eigh(model.hamiltonian)
    u = vecs @ np.diag(np.exp(-1j * vals * dt)) @ vecs.conj().T
    step = proj @ u @ proj
    v = np.linalg.matrix_power(step, n)
    rho0 = np.zeros_like(proj)
    rho0[model.a, model.a] = 1.0
    return float(np.trace(v @ rho0 @ v.conj().T).real)


def neutron_survival_closed_form(n: int, m: int = 0) -> float:
    """[cos^2((2m+1) pi / 2N)]^N under the matching condition omega T = (2m+1) pi.

    Evaluated through log1p for stability at very large N.
    """
    if n < 1:
        raise ValidationError("need at least one measurement")
    phi = (2 * m + 1) * np.pi / (2 * n)
    s2 = np.sin(phi) ** 2
    if s2 >= 1.0:
        return 0.0
    return float(np.exp(n * np.log1p(-s2)))


def _channel_state(n: int) -> np.ndarray:
    """Final pure-state amplitudes of the (N+1)-channel unitary evolution.

    Step k rotates the surviving amplitude by pi/2N, feeding -i sin(pi/2N)
    times it into fresh channel k.  The returned vector uses the matrix
    ordering in which index j corresponds to detector N - j + 1.
    """
    c = np.cos(np.pi / (2 * n))
    s = np.sin(np.pi / (2 * n))
    surv = 1.0 + 0.0j
    peeled = []
    for _ in range(n):
        peeled.append(-1j * s * surv)
        surv = c * surv
    psi = np.empty(n + 1, dtype=complex)
    psi[0] = surv
    # detector k (peeled at step k) lands at matrix index N - k + 1
    for k, amp in enumerate(peeled, start=1):
        psi[n - k + 1] = amp
    return psi


def channel_matrix(n: int, observed: bool) -> ChannelDensityMatrix:
    """Final channel density matrix for N measurement steps.

    observed=True gives the diagonal matrix diag(c^2N, s^2 c^(2N-2), ..., s^2);
    observed=False keeps the full pure-state matrix including the i s c^(2N-j)
    first row.  Entry (0,0) is the same either way.
    """
    if n < 1:
        raise ValidationError("need at least one measurement")
    psi = _channel_state(n)
    if observed:
        entries = np.diag(np.abs(psi) ** 2).astype(complex)
    else:
        entries = np.outer(psi, psi.conj())
    return ChannelDensityMatrix(n_measurements=n, entries=entries,
                                observed=observed)


def limiting_channel_matrix(n: int) -> np.ndarray:
    """The N -> infinity limit: all weight frozen in the surviving channel."""
    m = np.zeros((n + 1, n + 1), dtype=complex)
    m[0, 0] = 1.0
    return m


@dataclass(frozen=True)
class DynamicalComparison:
    observed: ChannelDensityMatrix
    unobserved: ChannelDensityMatrix
    survival: float
    closed_form: float


def dynamical_vs_projective(n: int) -> DynamicalComparison:
    """Build both channel matrices and check their (0,0) entry.

    The unobserved matrix comes from the explicit (N+1)-channel unitary
    construction; its (0,0) entry must agree with the projective closed form
    to 1e-12 (it does exactly: same cosine product).
    """
    obs = channel_matrix(n, observed=True)
    unobs = channel_matrix(n, observed=False)
    p_dyn = float(unobs.entries[0, 0].real)
    p_proj = neutron_survival_closed_form(n)
    if abs(p_dyn - p_proj) > 1e-12:
        raise ValidationError(
            f"dynamical and projective survivals differ by {abs(p_dyn - p_proj):.3e}")
    return DynamicalComparison(observed=obs, unobserved=unobs,
                               survival=p_dyn, closed_form=p_proj)


def uncertainty_bounded_survival(params: UncertaintyParams, n: int) -> float:
    """Survival estimate with the tipping angle pinned at its lower bound.

    [1 - (1/32) (dEm/dEk)^2]^(2N).  This uses the bound-saturating estimate
    phi ~ phi_0; the true probability for larger phi is smaller still.
    Vanishes as N -> infinity at fixed ratio.
    """
    if n < 1:
        raise ValidationError("need at least one measurement")
    bracket = 1.0 - params.ratio ** 2 / 32.0
    if bracket <= 0.0:
        raise ValidationError(
            "bound formula outside small-angle regime (ratio >= sqrt(32))")
    return float(bracket ** (2 * n))


def n_for_half(params: UncertaintyParams) -> int:
    """Number of measurements at which the bounded survival drops to ~1/2."""
    return int(round(64.0 * np.log(2.0) / params.ratio ** 2))


def regime_crossover(tau_g: float, tau_e: float, n: int) -> float:
    """Total time T at which Gaussian-with-N-measurements and exponential
    suppressions coincide: T^2/(tau_G^2 N) = T/tau_E."""
    if tau_g <= 0 or tau_e <= 0 or n < 1:
        raise ValidationError("all crossover parameters must be positive")
    return float(n * tau_g ** 2 / tau_e)
