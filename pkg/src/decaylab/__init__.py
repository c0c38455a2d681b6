"""decaylab: the temporal anatomy of quantum survival probabilities.

A numerical laboratory for the full time course of the survival probability
of an unstable quantum state: the quadratic (Gaussian) onset and the quantum
Zeno effect under repeated measurement, the intermediate exponential era from
a second-sheet resonance pole, the long-time power tail from the branch
point, and an exactly solvable spin-array absorber model where the
exponential law holds at all times and every closed form is validated
against a brute-force unitary oracle.
"""

from .errors import NumericalError, ValidationError
from .series import AmplitudeSeries, HEISENBERG, INTERACTION
from .finite import (FiniteModel, ShortTimeCoefficients, evolve_unitary,
                     resolvent_amplitude, self_energy_series,
                     short_time_coefficients, survival_exact)
from .zeno import (ChannelDensityMatrix, DynamicalComparison,
                   UncertaintyParams, channel_matrix, dynamical_vs_projective,
                   limiting_channel_matrix, n_for_half, neutron_model,
                   neutron_survival_closed_form, pulsed_survival,
                   regime_crossover, uncertainty_bounded_survival)
from .spectral import (PoleSolution, SpectralModel, golden_rule_rate,
                       g_function, large_t_exponent, pole_solve,
                       self_energy_continuum, sigma_boundary, two_level_amplitude_floor,
                       two_level_exponent, two_level_model)
from .decomposition import (Decomposition, PaleyWienerReport, TailFit,
                            VanHoveReport, branch_cut_amplitude,
                            cumulant_survival, decompose_amplitude,
                            energy_density, fit_tail_exponent, memory_kernel,
                            paley_wiener_test, pole_amplitude,
                            survival_direct, survival_from_density,
                            tail_window_start, van_hove_rescale)
from .agbr import (AgBrConfig, FinalStateStats, WavePacket,
                   brute_force_oracle, diagonal_singularity_count,
                   entry_quadratic_residuum, exact_propagator_delta,
                   exponential_law, final_state, regime_label,
                   spin_flip_probability, square_potential_macroscopic,
                   square_potential_propagator, wavepacket_oracle,
                   wavepacket_propagator)

__version__ = "0.1.0"
