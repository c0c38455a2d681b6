"""Continuum-spectrum survival machinery: form factor, self-energy, pole.

The built-in form-factor family

    B(E) = lambda^2 (E - E_g)^delta exp(-(E - E_g)/E_c)   for E >= E_g

realizes the summed squared coupling density between the initial level and
the continuum.  Everything analytic about the survival amplitude flows
through the self-energy

    Sigma_I(E)  = int B(x)/(E - x) dx                (first sheet)
    Sigma_II(E) = Sigma_I(E) - 2 pi i B(E)           (second sheet, Im E < 0)

with B continued off the real axis on its principal branch.  The decay pole
solves E = E_a + Sigma_II(E) just below the cut; its real shift, width and
residue feed the pole/branch-cut decomposition of the amplitude.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericalError, ValidationError
from .finite import FiniteModel
from . import quadrature as qd

SUPPORT_DECADES = 45.0  # upper truncation at E_g + 45 E_c: B there ~ 1e-18
_NODE_ORDER = 24


@dataclass(frozen=True)
class SpectralModel:
    """Power-law-threshold, exponential-cutoff form factor on [e_g, inf)."""

    e_g: float
    e_a: float
    lam: float
    delta: float
    e_c: float
    form: str = "power_exp"

    def __post_init__(self):
        if self.e_a <= self.e_g:
            raise ValidationError("initial energy must sit above threshold")
        if self.lam <= 0 or self.delta <= 0 or self.e_c <= 0:
            raise ValidationError("coupling, threshold exponent, cutoff must be > 0")
        if self.form != "power_exp":
            raise ValidationError(f"unknown form-factor family {self.form!r}")

    @property
    def e_ag(self) -> float:
        return self.e_a - self.e_g

    @property
    def support_top(self) -> float:
        return self.e_g + SUPPORT_DECADES * self.e_c

    def b(self, e):
        """Form factor on the real axis (vanishes below threshold)."""
        e = np.asarray(e, dtype=float)
        u = e - self.e_g
        out = np.zeros_like(u)
        pos = u > 0
        out[pos] = self.lam ** 2 * u[pos] ** self.delta * np.exp(-u[pos] / self.e_c)
        return out if out.ndim else float(out)

    def b_scalar(self, e: float) -> float:
        u = e - self.e_g
        if u <= 0:
            return 0.0
        return self.lam ** 2 * u ** self.delta * np.exp(-u / self.e_c)

    def b_prime(self, e):
        """dB/dE on the open support (analytic form)."""
        e = np.asarray(e, dtype=float)
        u = e - self.e_g
        out = np.zeros_like(u)
        pos = u > 0
        up = u[pos]
        out[pos] = (self.lam ** 2 * np.exp(-up / self.e_c)
                    * (self.delta * up ** (self.delta - 1)
                       - up ** self.delta / self.e_c))
        return out if out.ndim else float(out)

    def b_analytic(self, e: complex) -> complex:
        """Principal-branch continuation of the form factor off the axis.

        For Im E < 0 this is the continuation reached clockwise through the
        cut from above, which is the branch the second sheet needs.
        """
        u = complex(e) - self.e_g
        return self.lam ** 2 * u ** self.delta * np.exp(-u / self.e_c)

    def b_analytic_prime(self, e: complex) -> complex:
        u = complex(e) - self.e_g
        return (self.lam ** 2 * np.exp(-u / self.e_c)
                * (self.delta * u ** (self.delta - 1) - u ** self.delta / self.e_c))

    def to_dict(self) -> dict:
        return {"e_g": self.e_g, "e_a": self.e_a, "lambda": self.lam,
                "delta": self.delta, "e_c": self.e_c, "form": self.form}

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralModel":
        return cls(e_g=float(d["e_g"]), e_a=float(d["e_a"]),
                   lam=float(d["lambda"]), delta=float(d["delta"]),
                   e_c=float(d["e_c"]), form=d.get("form", "power_exp"))


@lru_cache(maxsize=64)
def _support_panels_cached(e_g: float, e_c: float, top: float) -> tuple:
    inner = qd.geometric_refine(e_g, e_g + e_c, toward=e_g,
                                smallest=1e-8 * e_c, ratio=1.8)
    mid = np.arange(e_g + e_c, e_g + 10 * e_c + 0.25 * e_c, 0.25 * e_c)
    outer = qd.geometric_refine(e_g + 10 * e_c, top, toward=e_g + 10 * e_c,
                                smallest=0.5 * e_c, ratio=1.5)
    return tuple(qd.merge_breakpoints(inner, mid, outer))


def support_panels(model: SpectralModel) -> np.ndarray:
    """Panel decomposition of the form-factor support, graded at threshold."""
    return np.asarray(_support_panels_cached(model.e_g, model.e_c,
                                             model.support_top))


def _support_nodes(model: SpectralModel, n: int = _NODE_ORDER):
    nodes, weights = qd.panel_grid(support_panels(model), n)
    return nodes.ravel(), weights.ravel()


def sigma_first(model: SpectralModel, e: complex) -> complex:
    """First-sheet self-energy at a probe off the cut.

    Real probes (on or below threshold, or above the support top) are fine;
    probes lying exactly on the open cut must come with an explicit side, see
    sigma_boundary.
    """
    z = complex(e)
    if z.imag == 0.0:
        if model.e_g < z.real < model.support_top:
            raise ValidationError(
                "probe on the branch cut: use sigma_boundary(E, side)")
        x, w = _support_nodes(model)
        return complex(np.sum(w * model.b(x) / (z.real - x)))
    return _cauchy_offaxis(model, z, power=1)


def _cauchy_offaxis(model: SpectralModel, z: complex, power: int) -> complex:
    """int B(x)/(z - x)^power dx with panels refined near Re z at scale |Im z|."""
    base = support_panels(model)
    scale = abs(z.imag)
    x0 = z.real
    if model.e_g < x0 < model.support_top and scale < model.e_c:
        lo = max(model.e_g, x0 - 8 * model.e_c)
        hi = min(model.support_top, x0 + 8 * model.e_c)
        smallest = max(scale / 4, 1e-13 * model.e_c)
        left = qd.geometric_refine(lo, x0, toward=x0, smallest=smallest)
        right = qd.geometric_refine(x0, hi, toward=x0, smallest=smallest)
        panels = qd.merge_breakpoints(base, left, right)
    else:
        panels = base
    nodes, weights = qd.panel_grid(panels, _NODE_ORDER)
    x = nodes.ravel()
    w = weights.ravel()
    return complex(np.sum(w * model.b(x) / (z - x) ** power))


def sigma_first_prime(model: SpectralModel, e: complex) -> complex:
    """d Sigma_I / dE off the cut, by differentiating the quadrature kernel."""
    z = complex(e)
    if z.imag == 0.0:
        if model.e_g < z.real < model.support_top:
            raise ValidationError("derivative on the cut needs a side")
        x, w = _support_nodes(model)
        return complex(-np.sum(w * model.b(x) / (z.real - x) ** 2))
    return -_cauchy_offaxis(model, z, power=2)


def sigma_pv(model: SpectralModel, e_values) -> np.ndarray:
    """Principal value of the self-energy on the cut, vectorized over probes."""
    probes = np.atleast_1d(np.asarray(e_values, dtype=float))
    out = qd.pv_cauchy_grid(model.b, model.b_prime, model.e_g,
                            model.support_top, probes,
                            support_panels(model), n=_NODE_ORDER)
    return out


def sigma_boundary(model: SpectralModel, e: float, side: int = +1) -> complex:
    """Boundary value Sigma_I(E + i0*side) on the cut: PV -/+ i pi B(E)."""
    pv = float(sigma_pv(model, [e])[0])
    return pv - 1j * np.pi * side * model.b_scalar(e)


def sigma_pv_prime(model: SpectralModel, e: float) -> float:
    """Principal value of int B'(x)/(E - x) dx (the derivative of the PV part).

    Valid because B vanishes at both support edges, so differentiation under
    the principal value is an exact integration by parts.
    """
    def bp(x):
        return model.b_prime(x)

    def bpp(x):
        x = np.asarray(x, dtype=float)
        u = x - model.e_g
        d, ec, lam = model.delta, model.e_c, model.lam
        out = np.zeros_like(u)
        pos = u > 0
        up = u[pos]
        out[pos] = lam ** 2 * np.exp(-up / ec) * (
            d * (d - 1) * up ** (d - 2) - 2 * d * up ** (d - 1) / ec
            + up ** d / ec ** 2)
        return out

    val = qd.pv_cauchy_grid(bp, bpp, model.e_g, model.support_top,
                            np.asarray([e]), support_panels(model),
                            n=_NODE_ORDER)
    return float(val[0])


def sigma_boundary_prime(model: SpectralModel, e: float, side: int = +1) -> complex:
    return sigma_pv_prime(model, e) - 1j * np.pi * side * model.b_prime(e)


def sigma_second(model: SpectralModel, e: complex) -> complex:
    """Second-sheet self-energy, reached from above through the cut."""
    z = complex(e)
    if z.imag >= 0.0:
        raise ValidationError("second sheet is the lower half-plane (Im E < 0)")
    return sigma_first(model, z) - 2j * np.pi * model.b_analytic(z)


def sigma_second_prime(model: SpectralModel, e: complex) -> complex:
    z = complex(e)
    if z.imag >= 0.0:
        raise ValidationError("second sheet is the lower half-plane (Im E < 0)")
    return sigma_first_prime(model, z) - 2j * np.pi * model.b_analytic_prime(z)


def self_energy_continuum(model: SpectralModel, e: complex,
                          sheet: str = "first") -> complex:
    """Self-energy on either Riemannian sheet at a complex probe."""
    if abs(complex(e) - model.e_g) < 1e-14:
        raise ValidationError("probe energy collides with the branch point")
    if sheet == "first":
        return sigma_first(model, e)
    if sheet == "second":
        return sigma_second(model, e)
    raise ValidationError(f"unknown sheet {sheet!r}")


def golden_rule_rate(model: SpectralModel) -> float:
    """Lowest-order decay rate Gamma = 2 pi B(E_a)."""
    if model.e_a <= model.e_g:
        raise ValidationError("below threshold: no decay channel")
    return float(2.0 * np.pi * model.b_scalar(model.e_a))


@dataclass(frozen=True)
class PoleSolution:
    """Second-sheet pole data: level shift, width, residue."""

    delta_e: float
    gamma: float
    residue_z: complex
    iterations: int
    residual: float

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValidationError("pole width must be positive")
        if self.residual > 1e-10:
            raise ValidationError(
                f"pole residual {self.residual:.3e} above 1e-10")


def pole_solve(model: SpectralModel, tol: float = 1e-10,
               max_iter: int = 100) -> PoleSolution:
    """Damped Newton solve of E = E_a + Sigma_II(E) on the second sheet.

    Starts from the Weisskopf-Wigner guess E_a + Sigma_I(E_a + i0); the width
    gamma = -2 Im(E), the shift delta_e = Re(E) - E_a and the residue
    Z = 1/(1 - Sigma_II'(E)).  Written with the plus sign that makes the
    resolvent 1/(E - E_a - Sigma(E)) actually vanish at the pole and hands
    back the golden-rule width (with its correct sign) at weak coupling.
    """
    if golden_rule_rate(model) <= 0:
        raise ValidationError("no decay channel: golden-rule rate is zero")
    e = model.e_a + sigma_boundary(model, model.e_a, side=+1)

    def h(z):
        return z - model.e_a - sigma_second(model, z)

    hv = h(e)
    it = 0
    while abs(hv) > tol:
        it += 1
        if it > max_iter:
            raise NumericalError(
                f"pole Newton did not converge: residual {abs(hv):.3e} after "
                f"{max_iter} iterations")
        hp = 1.0 - sigma_second_prime(model, e)
        step = -hv / hp
        lam = 1.0
        while lam > 1e-6:
            trial = e + lam * step
            if trial.imag >= 0.0:
                lam *= 0.5
                continue
            tv = h(trial)
            if abs(tv) < abs(hv):
                e, hv = trial, tv
                break
            lam *= 0.5
        else:
            raise NumericalError(
                f"pole Newton stalled at residual {abs(hv):.3e}")
    if e.imag >= 0.0:
        raise NumericalError("pole drifted onto the first sheet (Im >= 0)")
    z_res = 1.0 / (1.0 - sigma_second_prime(model, e))
    return PoleSolution(delta_e=float(e.real - model.e_a),
                        gamma=float(-2.0 * e.imag),
                        residue_z=complex(z_res),
                        iterations=it,
                        residual=float(abs(hv)))


def _restricted_sigma(model: FiniteModel, e: complex) -> complex:
    """Discrete self-energy sum for a restricted-interaction finite model."""
    a = model.a
    idx = np.arange(model.dim) != a
    w = np.abs(model.h_prime[a, idx]) ** 2
    return complex(np.sum(w / (e - model.h0_diag[idx])))


def _check_restricted(model: FiniteModel) -> None:
    mask = np.ones(model.dim, dtype=bool)
    mask[model.a] = False
    block = model.h_prime[np.ix_(mask, mask)]
    if np.max(np.abs(block)) > 1e-14:
        raise ValidationError(
            "model couples continuum states among themselves: the "
            "Laplace-domain construction needs the restricted interaction")


def g_function(model, s: complex, t: float) -> complex:
    """Laplace-domain function g(s, t) = s + i t Sigma(E_a + i s/t).

    The sheet follows the sign of Re(s): the analytic continuation into the
    left half s-plane crosses the cut and picks up the extra -2 pi i B term.
    Accepts a SpectralModel or a restricted-interaction FiniteModel (whose
    discrete sum needs no sheet structure).
    """
    if t <= 0:
        raise ValidationError("g(s, t) is defined for t > 0")
    s = complex(s)
    if isinstance(model, FiniteModel):
        _check_restricted(model)
        e = model.e_a + 1j * s / t
        return s + 1j * t * _restricted_sigma(model, e)
    branch_point = 1j * t * (model.e_a - model.e_g)
    if abs(s - branch_point) < 1e-12 * max(1.0, abs(branch_point)):
        raise ValidationError("s collides with the branch point i t (E_a - E_g)")
    e = model.e_a + 1j * s / t
    if s.real < 0:
        sigma = sigma_second(model, e)
    elif s.real > 0 or e.imag > 0:
        sigma = sigma_first(model, e)
    else:
        sigma = sigma_boundary(model, e.real, side=+1 if e.imag >= 0 else -1)
    return s + 1j * t * sigma


def large_t_exponent(model) -> complex:
    """Decay exponent Lambda from the 1/t expansion of g(s, t).

    Lambda = i Sigma(E_a + i0) / (1 - Sigma'(E_a + i0)); purely imaginary for
    a discrete nondegenerate model, Re Lambda -> Gamma/2 at weak coupling in
    the continuum.  Raises when the defining integrals do not converge
    (degenerate discrete level with nonzero coupling) or when the denominator
    vanishes.
    """
    if isinstance(model, FiniteModel):
        a = model.a
        e0 = model.h0_diag
        w = np.abs(model.h_prime[a, :]) ** 2
        degen = (np.abs(e0 - model.e_a) < 1e-9) & (np.arange(model.dim) != a)
        if np.any(w[degen] > 0):
            raise NumericalError(
                "defining integrals do not converge: level degenerate with "
                "coupled states (discrete spectrum has no decay continuum)")
        idx = (np.arange(model.dim) != a) & ~degen
        num = 1j * np.sum(w[idx] / (model.e_a - e0[idx]))
        den = 1.0 + np.sum(w[idx] / (model.e_a - e0[idx]) ** 2)
    else:
        num = 1j * sigma_boundary(model, model.e_a, side=+1)
        den = 1.0 - sigma_boundary_prime(model, model.e_a, side=+1)
    if abs(den) < 1e-10:
        raise NumericalError(f"exponent denominator {abs(den):.3e} below 1e-10")
    return complex(num / den)


def two_level_exponent(mu_b0: float, mu_b: float) -> complex:
    """Closed-form oscillation exponent of the two-level transverse-field model.

    H0 = mu B0 sigma_3, H' = mu B sigma_1 started spin-up: the exponent is
    purely imaginary, i mu B0 B^2 / (2 B0^2 + B^2) -- an oscillation, never a
    decay, as must happen with a finite number of levels.
    """
    if mu_b0 <= 0 or mu_b <= 0:
        raise ValidationError("field scales must be positive")
    # with mu folded into the field scales: mu*B0 = mu_b0, mu*B = mu_b
    return 1j * mu_b0 * mu_b ** 2 / (2.0 * mu_b0 ** 2 + mu_b ** 2)


def two_level_model(mu_b0: float, mu_b: float) -> FiniteModel:
    """The discrete two-level model H = mu B0 sigma_3 + mu B sigma_1."""
    return FiniteModel(h0_diag=[mu_b0, -mu_b0],
                       h_prime=[[0.0, mu_b], [mu_b, 0.0]], a=0)


def two_level_amplitude_floor(mu_b0: float, mu_b: float) -> float:
    """Analytic lower bound of the survival amplitude modulus.

    |A(t)|^2 = cos^2(Omega t) + (B0^2/(B0^2+B^2)) sin^2(Omega t)
    never drops below B0/sqrt(B0^2 + B^2).
    """
    return float(mu_b0 / np.hypot(mu_b0, mu_b))
