"""Named acceptance bundles: one per quantitative exit criterion.

Each suite runs its measurements, compares against the pinned tolerances and
returns a machine-readable record {suite, criterion, passed, runtime_s,
checks, notes}.  The CLI ``verify`` verb serializes these records; the
acceptance test module asserts them.

One criterion is recorded as failing by design: the closed-form Zeno
survival at N = 10^4 is exp(-pi^2/4e4) = 0.9997533, which sits below the
pinned 0.9999 threshold no matter how it is computed; the suite reports the
measured value and keeps the (true) monotone-approach-to-1 property as its
own check.
"""

from __future__ import annotations

import time

import numpy as np

from . import agbr, decomposition as dc, finite, spectral, zeno
from .series import AmplitudeSeries


def _check(name: str, passed: bool, value, target: str) -> dict:
    return {"name": name, "passed": bool(passed), "value": value,
            "target": target}


def _record(name: str, number: int, checks: list[dict], t0: float,
            notes: str = "") -> dict:
    return {
        "suite": name,
        "criterion": number,
        "passed": all(c["passed"] for c in checks),
        "runtime_s": round(time.perf_counter() - t0, 3),
        "checks": checks,
        "notes": notes,
    }


def random_models(count: int = 10, max_dim: int = 8, seed: int = 20260810
                  ) -> list[finite.FiniteModel]:
    """Deterministic batch of random Hermitian models for the short-time law."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        dim = int(rng.integers(3, max_dim + 1))
        h0 = np.sort(rng.normal(scale=1.0, size=dim))
        raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        hp = 0.5 * (raw + raw.conj().T)
        np.fill_diagonal(hp, 0.0)
        out.append(finite.FiniteModel(h0_diag=h0, h_prime=hp,
                                      a=int(rng.integers(0, dim))))
    return out


def suite_zeno_closed_form() -> dict:
    t0 = time.perf_counter()
    p1 = zeno.neutron_survival_closed_form(1)
    p2 = zeno.neutron_survival_closed_form(2)
    p4 = zeno.neutron_survival_closed_form(10 ** 4)
    grid = np.unique(np.geomspace(2, 10 ** 6, 200).astype(int))
    vals = np.array([zeno.neutron_survival_closed_form(int(n)) for n in grid])
    checks = [
        _check("P(1) = 0", abs(p1) < 1e-15, p1, "0"),
        _check("P(2) = 0.25", abs(p2 - 0.25) < 1e-12, p2, "0.25"),
        _check("P(10^4) >= 0.9999", p4 >= 0.9999, p4,
               ">= 0.9999 [unattainable: exact value is exp(-pi^2/4e4)]"),
        _check("strictly increasing for N >= 2",
               bool(np.all(np.diff(vals) > 0)), float(vals[-1]),
               "monotone on log grid to 1e6"),
        _check("1 - P(N) ~ pi^2/4N approach to 1",
               abs((1 - p4) * 4 * 10 ** 4 / np.pi ** 2 - 1) < 1e-3,
               1 - p4, "limit P -> 1 with pi^2/4N defect"),
    ]
    return _record("zeno-closed-form", 1, checks, t0,
                   notes="third check pinned to the stated 0.9999; the "
                         "closed form provably gives 0.9997533 at N=1e4")


def suite_zeno_channels() -> dict:
    t0 = time.perf_counter()
    checks = []
    agree = True
    for n in range(1, 65):
        obs = zeno.channel_matrix(n, observed=True)
        unobs = zeno.channel_matrix(n, observed=False)
        if abs(obs.entries[0, 0] - unobs.entries[0, 0]) > 1e-12:
            agree = False
    checks.append(_check("(0,0) agreement, N in 1..64", agree, None, "1e-12"))
    dists = []
    for n in (1, 2, 4, 8, 16, 32, 64):
        lim = zeno.limiting_channel_matrix(n)
        d = max(np.max(np.abs(zeno.channel_matrix(n, o).entries - lim))
                for o in (True, False))
        dists.append(d)
    checks.append(_check("entrywise distance to limit at N=64 < 0.05",
                         dists[-1] < 0.05, dists[-1], "< 0.05"))
    checks.append(_check("distance monotone on doubling grid",
                         bool(np.all(np.diff(dists) < 0)), dists,
                         "decreasing"))
    return _record("zeno-channels", 2, checks, t0)


def suite_zeno_bound() -> dict:
    t0 = time.perf_counter()
    params = zeno.UncertaintyParams(delta_em=0.0666, delta_ek=1.0)
    n_half = zeno.n_for_half(params)
    checks = [_check("n_for_half(0.0666) in [0.9e4, 1.1e4]",
                     0.9e4 <= n_half <= 1.1e4, n_half, "~1e4")]
    fixed = zeno.UncertaintyParams(delta_em=0.5, delta_ek=1.0)
    seq = [zeno.uncertainty_bounded_survival(fixed, n)
           for n in (100, 200, 400, 800, 1600)]
    checks.append(_check("bounded survival -> 0 under N-doubling",
                         bool(np.all(np.diff(seq) < 0)) and seq[-1] < seq[0] / 10,
                         seq, "strictly decreasing toward 0"))
    return _record("zeno-bound", 3, checks, t0)


def suite_short_time() -> dict:
    t0 = time.perf_counter()
    worst = 0.0
    for model in random_models():
        coeff = finite.short_time_coefficients(model)
        t = 0.01 * coeff.tau_gaussian
        p = float(finite.survival_exact(model, [t]).probabilities[0])
        worst = max(worst, abs(p - (1.0 - t ** 2 / coeff.tau_gaussian ** 2)))
    checks = [_check("|P(t) - (1 - t^2/tau_G^2)| < 1e-6 at t = 0.01 tau_G",
                     worst < 1e-6, worst, "< 1e-6 over 10 random models")]
    return _record("short-time", 4, checks, t0)


def suite_discrete_oscillation() -> dict:
    t0 = time.perf_counter()
    lam = spectral.two_level_exponent(1.0, 1.0)
    checks = [
        _check("Lambda purely imaginary", abs(lam.real) < 1e-10, str(lam),
               "Re = 0"),
        _check("Lambda = i/3 at unit fields", abs(lam - 1j / 3) < 1e-10,
               str(lam), "i/3 within 1e-10"),
    ]
    integral = spectral.large_t_exponent(spectral.two_level_model(1.0, 1.0))
    checks.append(_check("integral-route exponent purely imaginary",
                         abs(integral.real) < 1e-10, str(integral), "Re = 0"))
    model = spectral.two_level_model(1.0, 1.0)
    times = np.linspace(0.0, 100.0, 4001)
    amp = np.abs(finite.survival_exact(model, times).amplitudes)
    floor = spectral.two_level_amplitude_floor(1.0, 1.0)
    checks.append(_check("|amplitude| never below the analytic floor",
                         bool(np.all(amp >= floor - 1e-9)),
                         float(amp.min()), f">= {floor:.6f} - 1e-9"))
    return _record("discrete-oscillation", 5, checks, t0)


def suite_golden_rule_pole() -> dict:
    t0 = time.perf_counter()
    lams = (0.2, 0.1, 0.05)
    resid = []
    for lam in lams:
        m = spectral.SpectralModel(e_g=0.0, e_a=1.0, lam=lam, delta=1.0,
                                   e_c=1.0)
        resid.append(abs(spectral.pole_solve(m).gamma
                         - spectral.golden_rule_rate(m)))
    slope = np.polyfit(np.log(lams), np.log(resid), 1)[0]
    checks = [
        _check("|gamma - 2 pi B(e_a)| decreasing in lambda",
               resid[0] > resid[1] > resid[2], resid, "decreasing"),
        _check("residual scaling O(lambda^4)", slope >= 3.5, float(slope),
               "log-log slope >= 3.5 (expect ~4)"),
    ]
    return _record("golden-rule-pole", 6, checks, t0)


CANONICAL = spectral.SpectralModel(e_g=0.0, e_a=1.0, lam=0.1, delta=1.0,
                                   e_c=1.0)


def suite_three_era_decomposition() -> dict:
    t0 = time.perf_counter()
    gamma = spectral.pole_solve(CANONICAL).gamma
    grid = np.geomspace(0.5 / gamma, 20.0 / gamma, 25)
    dec = dc.decompose_amplitude(CANONICAL, grid)
    checks = [_check("direct vs pole+cut within 1% on [0.5/g, 20/g]",
                     dec.max_rel_deviation < 0.01, dec.max_rel_deviation,
                     "< 0.01")]
    early = np.array([0.005 / gamma, 0.01 / gamma])
    d = dc.survival_direct(CANONICAL, early).amplitudes
    p = dc.pole_amplitude(CANONICAL, early, dec.pole_data)
    log_dev = np.abs(np.abs(np.log(np.abs(p))) / np.abs(np.log(np.abs(d))) - 1)
    checks.append(_check(
        "Gaussian era (t < 0.05/g): pole-only suppression off by > 10%",
        bool(np.all(log_dev > 0.10)), log_dev.tolist(),
        "log-amplitude deviation > 0.10"))
    late = np.array([60.0 / gamma])
    d2 = dc.survival_direct(CANONICAL, late).amplitudes
    p2 = dc.pole_amplitude(CANONICAL, late, dec.pole_data)
    rel_late = float(np.abs(p2 - d2)[0] / np.abs(d2)[0])
    checks.append(_check("power era (beyond crossover): pole-only off by > 10%",
                         rel_late > 0.10, rel_late, "> 0.10"))
    return _record("three-era-decomposition", 7, checks, t0,
                   notes="Gaussian-era clause measured on the decay "
                         "suppression |ln|A||; amplitudes themselves tend to "
                         "1 there for every route")


def suite_tail_exponents() -> dict:
    t0 = time.perf_counter()
    checks = []
    for delta, expect in ((0.5, 1.5), (1.0, 2.0)):
        m = spectral.SpectralModel(e_g=0.0, e_a=1.0, lam=0.1, delta=delta,
                                   e_c=1.0)
        gamma = spectral.pole_solve(m).gamma
        start = dc.tail_window_start(m, gamma)
        grid = np.geomspace(start, 30 * start, 40)
        cut = dc.branch_cut_amplitude(m, grid)
        fit = dc.fit_tail_exponent(cut, expected=1 + delta, window_start=start)
        ok = abs(fit.exponent - (1 + delta)) / (1 + delta) < 0.05
        checks.append(_check(f"delta={delta}: exponent = {1 + delta} within 5%",
                             ok, fit.exponent,
                             f"{1 + delta} +- 5% (r^2 = {fit.r_squared:.6f})"))
    return _record("tail-exponents", 8, checks, t0)


def suite_paley_wiener() -> dict:
    t0 = time.perf_counter()
    grid = np.geomspace(0.1, 100.0, 400)
    exp_series = AmplitudeSeries(times=grid, amplitudes=np.exp(-grid / 2))
    pow_series = AmplitudeSeries(times=grid, amplitudes=(1 + grid) ** -2.0)
    v_exp = dc.paley_wiener_test(exp_series, 100.0).divergence_verdict
    v_pow = dc.paley_wiener_test(pow_series, 100.0).divergence_verdict
    spec_grid = np.geomspace(1.0, 1e4, 120)
    ser = dc.survival_direct(CANONICAL, spec_grid)
    v_model = dc.paley_wiener_test(ser, 1e4).divergence_verdict
    checks = [
        _check("exp(-t/2) -> divergent-trend", v_exp == "divergent-trend",
               v_exp, "divergent-trend"),
        _check("(1+t)^-2 -> convergent-trend", v_pow == "convergent-trend",
               v_pow, "convergent-trend"),
        _check("bounded-below spectral amplitude -> convergent-trend",
               v_model == "convergent-trend", v_model, "convergent-trend"),
    ]
    return _record("paley-wiener", 9, checks, t0)


def suite_van_hove() -> dict:
    t0 = time.perf_counter()
    lams = (0.2, 0.1, 0.05)
    family = [spectral.SpectralModel(e_g=0.0, e_a=1.0, lam=lam, delta=1.0,
                                     e_c=1.0) for lam in lams]
    rep = dc.van_hove_rescale(family, taus=[0.25, 0.5, 1.0])
    ratio = rep.cut_magnitudes / np.asarray(lams) ** 2
    slope = np.polyfit(np.log(lams), np.log(rep.cut_magnitudes), 1)[0]
    checks = [
        _check("deviation from pure exponential monotone in lambda",
               bool(np.all(np.diff(rep.deviations) < 0)),
               rep.deviations.tolist(), "decreasing"),
        _check("cut magnitude at fixed tau scales at least like lambda^2",
               bool(np.all(np.diff(ratio) < 0)) and slope >= 2.0,
               {"|X_C|/lambda^2": ratio.tolist(),
                "log-log slope": float(slope)},
               "ratio decreasing, slope >= 2 (measured ~ 4 + 2 delta)"),
    ]
    return _record("van-hove", 10, checks, t0)


def suite_agbr_oracle() -> dict:
    t0 = time.perf_counter()
    checks = []
    for n in (8, 10, 12):
        cfg = agbr.AgBrConfig(n_spins=n, x1=1.0, spacing=0.5, coupling=0.3)
        grid = np.linspace(0.0, cfg.x_last + 1.0, 50)
        worst = 0.0
        for t in grid:
            closed = agbr.exact_propagator_delta(cfg, t)
            full = agbr.brute_force_oracle(cfg, t, mode="full_hilbert")
            worst = max(worst, abs(closed - full))
        checks.append(_check(f"N={n}: closed form vs 2^N oracle on 50 points",
                             worst < 1e-10, worst, "< 1e-10"))
    return _record("agbr-oracle", 11, checks, t0)


def _agbr_canonical(n: int, nbar: float = 2.0) -> agbr.AgBrConfig:
    return agbr.AgBrConfig(n_spins=n, x1=3.0, spacing=0.1,
                           coupling=float(np.arcsin(np.sqrt(nbar / n))))


def suite_agbr_exponential() -> dict:
    t0 = time.perf_counter()
    cfg = _agbr_canonical(10 ** 4)
    inside = np.linspace(cfg.x1 + 1.0, cfg.x_last - 1.0, 400)
    logg = np.log([abs(agbr.exact_propagator_delta(cfg, t)) for t in inside])
    slope = np.polyfit(inside, logg, 1)[0]
    target = -cfg.n_bar / (2 * cfg.length)
    checks = [_check("ln|G| affine with slope -nbar c/2L within 1e-3 relative",
                     abs(slope / target - 1) < 1e-3, float(slope),
                     f"{target:.6e}")]

    def max_dev(n):
        c = _agbr_canonical(n)
        ts = np.linspace(c.x1 + 1.0, c.x_last - 1.0, 600)
        return max(abs(abs(agbr.exact_propagator_delta(c, t))
                       - agbr.exponential_law(c, t)) for t in ts)

    d1, d2 = max_dev(10 ** 4), max_dev(2 * 10 ** 4)
    checks.append(_check("deviation from the exponential halves as N doubles",
                         abs(d2 / d1 - 0.5) < 0.05, {"ratio": d2 / d1},
                         "ratio 0.5 within 0.05"))
    wcfg = agbr.AgBrConfig(n_spins=10 ** 4, x1=3.0, spacing=0.1,
                           coupling=float(np.arcsin(np.sqrt(2.0 / 10 ** 4))),
                           wave_packet=agbr.WavePacket(size=2.0))
    a = wcfg.wave_packet.size
    jumps = []
    for bp in (wcfg.x1 - a / 2, wcfg.x1 + a / 2, wcfg.x_last - a / 2,
               wcfg.x_last + a / 2):
        eps = 1e-13 * max(1.0, bp)
        jumps.append(abs(agbr.wavepacket_propagator(wcfg, bp + eps)
                         - agbr.wavepacket_propagator(wcfg, bp - eps)))
    checks.append(_check("wave-packet propagator continuous at breakpoints",
                         max(jumps) < 1e-12, max(jumps), "< 1e-12"))
    diffs = []
    for p in (2e-2, 1e-2, 5e-3):
        g1 = agbr.wavepacket_propagator(wcfg, wcfg.x1 - a / 2 + p)
        diffs.append(abs(g1.real - agbr.entry_quadratic_residuum(wcfg, p)))
    ratios = [diffs[i + 1] / diffs[i] for i in range(2)]
    checks.append(_check("entry branch matches quadratic residuum to O(p^3)",
                         all(abs(r - 0.125) < 0.03 for r in ratios),
                         {"halving ratios": ratios}, "~ 1/8 per p-halving"))
    return _record("agbr-exponential", 12, checks, t0)


def suite_agbr_statistics() -> dict:
    t0 = time.perf_counter()
    nbar = 2.0
    devs = []
    for n in (8, 16, 32, 64, 128, 256, 512, 1024):
        cfg = _agbr_canonical(n, nbar)
        devs.append(abs(agbr.final_state(cfg).visibility - np.exp(-nbar / 2)))
    checks = [_check("visibility -> exp(-nbar/2) under N-doubling",
                     bool(np.all(np.diff(devs) < 0)), devs, "decreasing")]
    cfg = agbr.AgBrConfig(n_spins=10, x1=1.0, spacing=0.5,
                          coupling=float(np.arcsin(np.sqrt(0.3))))
    stats = agbr.final_state(cfg)
    j = np.arange(cfg.n_spins + 1)
    pj = np.abs(stats.coefficients) ** 2
    mean = float(np.sum(pj * j))
    fluct = float(np.sqrt(np.sum(pj * j ** 2) - mean ** 2))
    checks.append(_check("mean energy matches binomial oracle to 1e-12",
                         abs(stats.mean_energy - mean) < 1e-12,
                         {"closed": stats.mean_energy, "oracle": mean},
                         "q N"))
    checks.append(_check("fluctuation matches binomial oracle to 1e-12",
                         abs(stats.energy_fluctuation - fluct) < 1e-12,
                         {"closed": stats.energy_fluctuation, "oracle": fluct},
                         "sqrt(q(1-q)N)"))
    return _record("agbr-statistics", 13, checks, t0)


def suite_diagonal_singularity() -> dict:
    t0 = time.perf_counter()
    checks = []
    for n in (4, 6, 8):
        cfg = agbr.AgBrConfig(n_spins=n, x1=1.0, spacing=1.0, coupling=0.3)
        rec = agbr.diagonal_singularity_count(cfg)
        ok = (rec["diagonal_terms"] == n and rec["max_offdiagonal_terms"] == 2
              and rec["method"] == "enumeration")
        checks.append(_check(f"N={n}: counts (N, 2) by enumeration", ok, rec,
                             f"({n}, 2)"))
    return _record("diagonal-singularity", 14, checks, t0)


SUITES = {
    "zeno-closed-form": suite_zeno_closed_form,
    "zeno-channels": suite_zeno_channels,
    "zeno-bound": suite_zeno_bound,
    "short-time": suite_short_time,
    "discrete-oscillation": suite_discrete_oscillation,
    "golden-rule-pole": suite_golden_rule_pole,
    "three-era-decomposition": suite_three_era_decomposition,
    "tail-exponents": suite_tail_exponents,
    "paley-wiener": suite_paley_wiener,
    "van-hove": suite_van_hove,
    "agbr-oracle": suite_agbr_oracle,
    "agbr-exponential": suite_agbr_exponential,
    "agbr-statistics": suite_agbr_statistics,
    "diagonal-singularity": suite_diagonal_singularity,
}


def list_suites() -> list[str]:
    return list(SUITES)


def run_suite(name: str) -> dict:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name]()
