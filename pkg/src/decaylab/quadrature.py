"""Quadrature engines shared across the library.

Three workhorses live here:

* a panel-based Filon scheme for Fourier-type integrals int f(E) exp(-iEt) dE.
  On each panel the smooth factor f is expanded in Legendre polynomials and the
  oscillatory moments int P_k(x) exp(-i w x) dx = 2 (-i)^k j_k(w) are evaluated
  exactly through spherical Bessel functions, so the panel count is set by the
  smoothness of f alone and never by t;
* graded panel builders (geometric refinement toward branch points, resonance
  peaks, contour offsets);
* Cauchy-kernel integrals int B(x)/(E - x) dx, vectorized over many probe
  energies at once, with principal-value subtraction on the real axis.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import spherical_in, spherical_jn


@lru_cache(maxsize=32)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of n-point Gauss-Legendre quadrature on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@lru_cache(maxsize=32)
def _legendre_projection(n: int) -> np.ndarray:
    """Matrix M with M[k, i] = (2k+1)/2 * w_i * P_k(x_i).

    Applying M to samples f(x_i) at the n Gauss-Legendre nodes yields the
    Legendre coefficients c_k of the degree-(n-1) interpolant of f.
    """
    x, w = gauss_legendre(n)
    # P[k, i] = P_k(x_i) via the three-term recurrence
    p = np.zeros((n, n))
    p[0] = 1.0
    if n > 1:
        p[1] = x
    for k in range(1, n - 1):
        p[k + 1] = ((2 * k + 1) * x * p[k] - k * p[k - 1]) / (k + 1)
    scale = (2 * np.arange(n) + 1) / 2.0
    return scale[:, None] * p * w[None, :]


def panel_grid(panels: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Map GL nodes/weights onto every panel.

    ``panels`` is an array of breakpoints of shape (m+1,).  Returns nodes and
    weights of shape (m, n); weights include the half-width Jacobian.
    """
    x, w = gauss_legendre(n)
    lo = panels[:-1]
    hi = panels[1:]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = mid[:, None] + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    return nodes, weights


def geometric_refine(a: float, b: float, toward: float, smallest: float,
                     ratio: float = 2.0) -> np.ndarray:
    """Breakpoints on [a, b] whose widths grow geometrically away from ``toward``.

    ``toward`` must be one of the endpoints; the first panel adjacent to it has
    width ``smallest``.
    """
    span = b - a
    if span <= 0:
        raise ValueError("empty interval")
    smallest = min(smallest, span / 4)
    widths = [smallest]
    while sum(widths) < span:
        widths.append(widths[-1] * ratio)
    # rescale the last width so the panels exactly tile the interval
    overshoot = sum(widths) - span
    widths[-1] -= overshoot
    if widths[-1] <= 0:
        widths.pop()
        widths[-1] = span - sum(widths[:-1])
    cuts = np.concatenate([[0.0], np.cumsum(widths)])
    if toward == a:
        return a + cuts
    return b - cuts[::-1]


def merge_breakpoints(*arrays: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Union of breakpoint arrays with near-duplicates removed."""
    allpts = np.sort(np.concatenate(arrays))
    span = allpts[-1] - allpts[0]
    keep = [allpts[0]]
    for p in allpts[1:]:
        if p - keep[-1] > rtol * max(span, 1.0):
            keep.append(p)
    return np.asarray(keep)


class FilonTransform:
    """Precomputed Filon data for f on a fixed panel decomposition.

    The expensive part -- evaluating f at all panel nodes and projecting onto
    Legendre coefficients -- happens once; each subsequent time point costs a
    handful of spherical Bessel evaluations per panel.
    """

    def __init__(self, f, panels: np.ndarray, n: int = 20):
        self.panels = np.asarray(panels, dtype=float)
        self.n = n
        nodes, _ = panel_grid(self.panels, n)
        self.mid = 0.5 * (self.panels[:-1] + self.panels[1:])
        self.half = 0.5 * (self.panels[1:] - self.panels[:-1])
        fvals = np.asarray(f(nodes.ravel()), dtype=complex).reshape(nodes.shape)
        proj = _legendre_projection(n)
        # coeff[m, k]: Legendre coefficients of f on panel m
        self.coeff = fvals @ proj.T
        # truncation estimate: magnitude of the trailing coefficients times the
        # moment bound |m_k| <= 2, summed over panels
        tail = np.abs(self.coeff[:, -3:]).max(axis=1)
        self.err_bound = float(np.sum(2.0 * self.half * tail))

    def __call__(self, t, chunk: int = 512) -> np.ndarray:
        """Evaluate int f(E) exp(-i E t) dE for scalar or array t."""
        tarr = np.atleast_1d(np.asarray(t, dtype=float))
        k = np.arange(self.n)
        out = np.empty(tarr.shape, dtype=complex)
        for lo in range(0, tarr.size, chunk):
            tj = tarr[lo:lo + chunk]                       # (T,)
            w = tj[:, None] * self.half[None, :]           # (T, M)
            jn = spherical_jn(k[None, None, :], np.abs(w)[:, :, None])
            # moments = int P_k(x) exp(-i w x) dx = 2 (-i)^k j_k(w);
            # j_k(-w) = (-1)^k j_k(w) flips the sign of i for negative t
            sign = np.where(tj >= 0, -1j, 1j)[:, None, None] ** k[None, None, :]
            moments = 2.0 * sign * jn
            phase = np.exp(-1j * np.outer(tj, self.mid))   # (T, M)
            panel_vals = np.einsum("mk,tmk->tm", self.coeff, moments)
            out[lo:lo + chunk] = np.sum(phase * self.half[None, :] * panel_vals,
                                        axis=1)
        if np.isscalar(t):
            return out[0]
        return out


def _scaled_spherical_in(k: np.ndarray, c: np.ndarray) -> np.ndarray:
    """exp(-c) * i_k(c) for c >= 0 without overflow.

    Below c = 35 the library function is safe; above, the exact finite-sum
    representation of i_k is used with the exp(-2c) branch dropped (it is
    below 1e-30 there).
    """
    k = np.asarray(k)
    c = np.asarray(c, dtype=float)
    kk, cc = np.broadcast_arrays(k, c)
    out = np.empty(kk.shape, dtype=float)
    small = cc < 35.0
    if np.any(small):
        with np.errstate(over="ignore"):
            out[small] = spherical_in(kk[small], cc[small]) * np.exp(-cc[small])
    big = ~small
    if np.any(big):
        kb = kk[big]
        cb = cc[big]
        total = np.ones(kb.shape)
        term = np.ones(kb.shape)
        kmax = int(kb.max()) if kb.size else 0
        for m in range(kmax):
            ratio = -(kb + m + 1.0) * (kb - m) / ((m + 1.0) * 2.0 * cb)
            ratio[kb <= m] = 0.0
            term = term * ratio
            total += term
        out[big] = total / (2.0 * cb)
    return out


class LaplaceTransform:
    """Precomputed panel data for int_0^inf f(v) exp(-s v) dv, s > 0.

    Same Legendre-coefficient idea as FilonTransform, with the exact
    exponential moments int P_k(x) exp(-c x) dx = 2 (-1)^k i_k(c) evaluated
    in scaled form so arbitrarily stiff s never overflows.  The panel set
    must cover the region where exp(-s_min v) is non-negligible.
    """

    def __init__(self, f, panels: np.ndarray, n: int = 20):
        self.panels = np.asarray(panels, dtype=float)
        self.n = n
        nodes, _ = panel_grid(self.panels, n)
        self.left = self.panels[:-1]
        self.half = 0.5 * (self.panels[1:] - self.panels[:-1])
        fvals = np.asarray(f(nodes.ravel()), dtype=complex).reshape(nodes.shape)
        proj = _legendre_projection(n)
        self.coeff = fvals @ proj.T
        tail = np.abs(self.coeff[:, -3:]).max(axis=1)
        self.err_bound = float(np.sum(2.0 * self.half * tail))

    def __call__(self, s, chunk: int = 256) -> np.ndarray:
        sarr = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(sarr <= 0):
            raise ValueError("Laplace parameter must be positive")
        k = np.arange(self.n)
        signs = (-1.0) ** k
        out = np.empty(sarr.shape, dtype=complex)
        for lo in range(0, sarr.size, chunk):
            sj = sarr[lo:lo + chunk]                       # (S,)
            c = sj[:, None] * self.half[None, :]           # (S, M)
            scaled = _scaled_spherical_in(k[None, None, :], c[:, :, None])
            with np.errstate(under="ignore"):
                damp = np.exp(np.maximum(-np.outer(sj, self.left), -745.0))
            panel_vals = np.einsum("mk,smk->sm",
                                   self.coeff * 2.0 * signs[None, :], scaled)
            out[lo:lo + chunk] = np.sum(damp * self.half[None, :] * panel_vals,
                                        axis=1)
        if np.isscalar(s):
            return out[0]
        return out


def fourier_integral(f, panels: np.ndarray, t, n: int = 20):
    """One-shot int f(E) exp(-iEt) dE over the panel decomposition.

    Returns (values, error_bound).
    """
    ft = FilonTransform(f, panels, n=n)
    return ft(t), ft.err_bound


def cauchy_integral(bvals: np.ndarray, weights: np.ndarray, nodes: np.ndarray,
                    e: complex) -> complex:
    """Sum w_i B(x_i) / (e - x_i) for a probe energy off the real support."""
    return complex(np.sum(weights * bvals / (e - nodes)))


def pv_cauchy_grid(b, bprime_at, lo: float, hi: float, probes: np.ndarray,
                   panels: np.ndarray, n: int = 20) -> np.ndarray:
    """Principal value of int_lo^hi B(x)/(E - x) dx for many real probes E.

    Uses singularity subtraction: the divided difference (B(x) - B(E))/(E - x)
    is smooth wherever B is, and the subtracted kernel integrates to
    B(E) log((E - lo)/(hi - E)) in closed form.  ``bprime_at`` supplies the
    limiting value -B'(E) used when a node collides with a probe.
    """
    probes = np.asarray(probes, dtype=float)
    nodes, weights = panel_grid(panels, n)
    xf = nodes.ravel()
    wf = weights.ravel()
    bx = np.asarray(b(xf), dtype=float)
    be = np.asarray(b(probes), dtype=float)
    diff = probes[:, None] - xf[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        kern = (bx[None, :] - be[:, None]) / diff
    collide = np.abs(diff) < 1e-300
    if np.any(collide):
        rows = np.nonzero(collide)[0]
        kern[collide] = -np.asarray(bprime_at(probes[rows]), dtype=float)
    smooth = kern @ wf
    inside = (probes > lo) & (probes < hi)
    logterm = np.zeros_like(probes)
    logterm[inside] = be[inside] * np.log((probes[inside] - lo) / (hi - probes[inside]))
    outside = ~inside
    if np.any(outside):
        # no singularity on the path: the plain closed form applies
        logterm[outside] = be[outside] * np.log(
            np.abs((probes[outside] - lo) / (probes[outside] - hi)))
    return smooth + logterm


def adaptive_panel_integral(f, a: float, b: float, tol: float = 1e-10,
                            n: int = 15, max_depth: int = 30):
    """Adaptive Gauss-Legendre integration of a (possibly complex) integrand.

    Panel halving with an (n vs 2x half-panel) comparison; returns
    (value, error_estimate).
    """
    x, w = gauss_legendre(n)

    def panel_value(lo, hi):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        return half * np.sum(w * np.asarray(f(mid + half * x), dtype=complex))

    total = 0.0 + 0.0j
    err = 0.0
    stack = [(a, b, panel_value(a, b), 0)]
    while stack:
        lo, hi, coarse, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = panel_value(lo, mid)
        right = panel_value(mid, hi)
        fine = left + right
        disc = abs(fine - coarse)
        if disc < tol or depth >= max_depth:
            total += fine
            err += disc
        else:
            stack.append((lo, mid, left, depth + 1))
            stack.append((mid, hi, right, depth + 1))
    return total, err
