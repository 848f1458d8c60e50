"""Figure-reproduction sweeps, the validation suite and CSV emission."""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional, Sequence

import numpy as np
from scipy.stats import norm

from . import __version__
from .analytic import (
    LinkBudget,
    ergodic_capacity,
    ergodic_capacity_high_snr,
    gamma_cdf,
    gamma_pdf,
    outage_probability,
    zf_sinr_params,
    zf_sum_rate_approx,
    zf_sum_rate_exact,
)
from .config import RunConfig
from .errors import ConfigError, InfeasibleError
from .montecarlo import (
    interference_residuals,
    layered_coefficients,
    lemma1_oracle,
    sample_zf_sinr,
    simulate_capacity,
    simulate_outage,
    simulate_sum_rate,
)
from .stats import (
    KS_CRITICAL_1PCT,
    KS_CRITICAL_5PCT,
    KS_MARGIN,
    Ecdf,
    ecdf_eval,
    histogram_density,
    ks_statistic,
    ks_threshold,
    mean_confidence_interval,
)
from .surface import (
    RelaySpec,
    SurfaceConfig,
    SurfaceImpedanceSpec,
    SurfaceWaveParams,
    effective_noise_variance,
    omega_eq,
    omega_sw,
    propagation_constant,
    surface_wave_envelope,
)

OUTAGE_COLUMNS = ("snr_db", "omega_sw", "omega_eq", "pout_analytic", "pout_mc", "pout_stderr", "trials")
CAPACITY_COLUMNS = ("snr_db", "omega_sw", "cap_analytic", "cap_mc", "cap_stderr", "cap_asymptote")
ZF_DIST_COLUMNS = ("bin_center", "pdf_emp", "pdf_analytic", "cdf_emp", "cdf_analytic")
SUMRATE_COLUMNS = ("vary_value", "snr_db", "m", "k", "rate_mc", "rate_stderr", "rate_approx_eq44", "rate_exact")
PHYSICAL_COLUMNS = ("z_sur_re", "z_sur_im", "freq_ghz", "d", "alpha", "beta", "k0", "hsw_re", "hsw_im",
                    "hsw_abs", "omega_sw", "beta_dl", "omega_eq", "sigma_eff2")


@dataclass
class CsvTable:
    command: str
    columns: Sequence[str]
    rows: list[tuple] = field(default_factory=list)
    trailer: Optional[str] = None

    def column(self, name: str) -> np.ndarray:
        i = list(self.columns).index(name)
        return np.array([r[i] for r in self.rows], dtype=float)


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def metadata_lines(cfg: RunConfig, command: str) -> list[str]:
    lines = [f"# efas-mimo {__version__}", f"# command: {command}", f"# seed: {cfg.seed}"]
    lines += [f"# {k} = {v}" for k, v in cfg.resolved_items()]
    return lines


def render_csv(table: CsvTable, cfg: RunConfig) -> str:
    out = io.StringIO()
    for line in metadata_lines(cfg, table.command):
        out.write(line + "\n")
    out.write(",".join(table.columns) + "\n")
    for row in table.rows:
        out.write(",".join(_cell(v) for v in row) + "\n")
    if table.trailer:
        out.write(table.trailer + "\n")
    return out.getvalue()


def write_output(text: str, path: Optional[str]) -> None:
    if path:
        Path(path).write_text(text)
    else:
        print(text, end="")


# ------------------------------------------------------------ single user

def _single_user(cfg: RunConfig, omega_sw_value: float, snr_db: float):
    base = cfg.override_scenario(omega_sw_value, k_users=1, precoding="isotropic")
    return base.with_snr_db(snr_db)


def run_fig_outage(cfg: RunConfig) -> CsvTable:
    """Outage probability, closed form and Monte Carlo, over SNR x Omega_sw."""
    if not cfg.snr_grid_db or not cfg.omega_sw_list:
        raise ConfigError("fig-outage needs non-empty snr_grid_db and omega_sw_list")
    table = CsvTable("fig-outage", OUTAGE_COLUMNS)
    settings = cfg.settings()
    for snr in cfg.snr_grid_db:
        for osw in cfg.omega_sw_list:
            scn = _single_user(cfg, osw, snr)
            oeq = float(scn.omega_eq()[0])
            analytic = outage_probability(LinkBudget.from_rate(scn.rho, oeq, cfg.r0))
            est = simulate_outage(scn, cfg.r0, cfg.n_single, settings)
            table.rows.append((snr, osw, oeq, analytic, est.mean, est.std_err, est.n))
    return table


def run_fig_capacity(cfg: RunConfig) -> CsvTable:
    if not cfg.snr_grid_db or not cfg.omega_sw_list:
        raise ConfigError("fig-capacity needs non-empty snr_grid_db and omega_sw_list")
    table = CsvTable("fig-capacity", CAPACITY_COLUMNS)
    settings = cfg.settings()
    for snr in cfg.snr_grid_db:
        for osw in cfg.omega_sw_list:
            scn = _single_user(cfg, osw, snr)
            oeq = float(scn.omega_eq()[0])
            est = simulate_capacity(scn, cfg.n_single, settings)
            table.rows.append((snr, osw, ergodic_capacity(scn.rho, oeq), est.mean, est.std_err,
                               ergodic_capacity_high_snr(scn.rho, oeq)))
    return table


# --------------------------------------------------------------- multiuser

def zf_sinr_fit(cfg: RunConfig):
    """SINR samples, fitted gamma law and KS distance at the configured point."""
    scn = cfg.scenario
    oeq = float(scn.omega_eq()[0])
    samples = sample_zf_sinr(scn, oeq, cfg.n_multi, cfg.settings()).samples
    gp = zf_sinr_params(scn, oeq)
    d = ks_statistic(samples, lambda x: gamma_cdf(x, gp))
    return samples, gp, d


def run_fig_zf_dist(cfg: RunConfig) -> CsvTable:
    samples, gp, d = zf_sinr_fit(cfg)
    hist = histogram_density(samples, cfg.bins)
    centers = hist.bin_centers
    ecdf = Ecdf.from_samples(samples)
    table = CsvTable("fig-zf-dist", ZF_DIST_COLUMNS)
    pdf_a = gamma_pdf(centers, gp)
    cdf_e = ecdf_eval(ecdf, centers)
    cdf_a = gamma_cdf(centers, gp)
    for row in zip(centers, hist.densities, pdf_a, cdf_e, cdf_a):
        table.rows.append(row)
    table.trailer = f"summary,ks_d={d!r},n={samples.size}"
    return table


def sumrate_points(cfg: RunConfig, vary: str) -> list[tuple[float, float, int, int]]:
    """(vary_value, snr_db, M, K) for every point of the requested sweep."""
    if vary == "snr":
        pts = [(s, s, cfg.m_antennas, cfg.k_users) for s in cfg.snr_grid_db]
    elif vary == "k":
        pts = [(k, s, cfg.m_antennas, k) for s in cfg.snr_grid_db for k in cfg.k_grid]
    elif vary == "m":
        pts = [(m, cfg.snr_db, m, k) for m in cfg.m_grid for k in cfg.k_grid]
    else:
        raise ConfigError(f"unknown sweep {vary!r}")
    if not pts:
        raise ConfigError(f"empty grid for --vary {vary}")
    bad = [(m, k) for _, _, m, k in pts if k > m or k < 1]
    if bad:
        raise InfeasibleError(f"grid contains points with K > M: {bad[:5]}")
    return pts


def run_fig_sumrate(cfg: RunConfig, vary: Literal["snr", "k", "m"] = "snr") -> CsvTable:
    pts = sumrate_points(cfg, vary)
    table = CsvTable(f"fig-sumrate --vary {vary}", SUMRATE_COLUMNS)
    settings = cfg.settings()
    base = cfg.scenario
    for value, snr, m, k in pts:
        scn = base.with_users(k, m_antennas=m).with_snr_db(snr)
        oeq = float(scn.omega_eq()[0])
        est = simulate_sum_rate(scn, oeq, cfg.n_multi, settings)
        table.rows.append((value, snr, m, k, est.mean, est.std_err,
                           zf_sum_rate_approx(scn, oeq), zf_sum_rate_exact(scn, oeq)))
    return table


# ---------------------------------------------------------------- physical

def run_physical_omega(cfg: RunConfig) -> CsvTable:
    """gamma, H_sw(d), Omega_sw, Omega_eq and sigma_eff^2 for a physical surface."""
    spec = SurfaceImpedanceSpec.from_frequency_ghz(cfg.z_sur, cfg.freq_ghz)
    gamma = propagation_constant(spec)
    relay = (RelaySpec.identity(cfg.n_s, cfg.alpha_r) if cfg.n_s == cfg.n_l
             else RelaySpec(cfg.alpha_r, np.eye(cfg.n_l, cfg.n_s), "selection"))
    sigma_eff2 = effective_noise_variance(cfg.sigma2, cfg.sigma_r2, cfg.beta_lu, relay)
    table = CsvTable("physical-omega", PHYSICAL_COLUMNS)
    for d in cfg.d_grid:
        wave = SurfaceWaveParams(gamma=gamma, a0=cfg.a0, d=d)
        surface = SurfaceConfig(wave=wave, relay=relay)
        hsw = surface_wave_envelope(wave)
        osw = omega_sw(cfg.beta_bs, cfg.beta_lu, surface.h_sur, relay, cfg.m_antennas, cfg.normalization)
        table.rows.append((cfg.z_sur.real, cfg.z_sur.imag, cfg.freq_ghz, d, gamma.real, gamma.imag,
                           spec.k0, hsw.real, hsw.imag, abs(hsw), osw, cfg.beta_dl,
                           omega_eq(osw, cfg.beta_dl), sigma_eff2))
    return table


# -------------------------------------------------------------- validation

@dataclass
class Check:
    name: str
    passed: bool
    statistic: float
    threshold: float
    detail: str = ""

    @property
    def margin(self) -> float:
        """threshold - statistic; negative when the check fails on a <= test."""
        return self.threshold - self.statistic


@dataclass
class ValidationReport:
    checks: list[Check]
    cfg: RunConfig
    tables: dict[str, CsvTable] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def text(self) -> str:
        lines = metadata_lines(self.cfg, "validate")
        lines.append(f"# snr_grid_db: {list(self.cfg.snr_grid_db)}")
        lines.append(f"# omega_sw_list: {list(self.cfg.omega_sw_list)}")
        for c in self.checks:
            lines.append(f"{'PASS' if c.passed else 'FAIL'} {c.name}: statistic={c.statistic!r} "
                         f"threshold={c.threshold!r} margin={c.margin!r} {c.detail}".rstrip())
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} "
                     f"({sum(c.passed for c in self.checks)}/{len(self.checks)} checks)")
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        doc = {
            "version": __version__,
            "seed": self.cfg.seed,
            "config": dict(self.cfg.resolved_items()),
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "statistic": c.statistic,
                 "threshold": c.threshold, "margin": c.margin, "detail": c.detail}
                for c in self.checks
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def write(self, out_dir: Optional[str]) -> None:
        if not out_dir:
            print(self.text(), end="")
            return
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / "report.txt").write_text(self.text())
        (path / "summary.json").write_text(self.summary())
        for name, table in self.tables.items():
            (path / f"{name}.csv").write_text(render_csv(table, self.cfg))


def binomial_std_err(p: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Standard error of an event frequency under the hypothesised probability ``p``."""
    return np.sqrt(np.clip(p, 0.0, 1.0) * np.clip(1.0 - p, 0.0, 1.0) / n)


def grid_z_scores(table: CsvTable, mc: str, analytic: str, se: str) -> np.ndarray:
    diff = np.abs(table.column(mc) - table.column(analytic))
    if table.command == "fig-outage":
        err = binomial_std_err(table.column(analytic), table.column("trials"))
    else:
        err = table.column(se)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = diff / err
    return np.where(diff == 0, 0.0, z)


def _grid_check(name: str, table: CsvTable, mc: str, analytic: str, se: str) -> Check:
    z = grid_z_scores(table, mc, analytic, se)
    worst = int(np.argmax(z))
    n_bad = int(np.sum(z > 3.0))
    row = table.rows[worst]
    return Check(name, n_bad == 0, float(z[worst]), 3.0,
                 f"worst at snr_db={row[0]!r} omega_sw={row[1]!r}; {n_bad}/{len(z)} points beyond 3 SE")


def layered_checks(cfg: RunConfig) -> list[Check]:
    """Lemma normalization, variance match and Gaussianity of the layered channel."""
    settings = cfg.settings()
    scn = cfg.identity_surface_scenario()
    checks = []

    rec = lemma1_oracle(scn.replace(beta_dl=(0.0,)), cfg.n_single, settings)
    decisive = rec.verdict in ("paper", "unnormalized")
    checks.append(Check(
        "lemma1-normalization", decisive and rec.verdict == cfg.normalization,
        rec.empirical_mean_power, rec.unnormalized_value if cfg.normalization == "unnormalized"
        else rec.paper_value,
        f"verdict={rec.verdict} configured={cfg.normalization} se={rec.std_err!r} "
        f"paper={rec.paper_value!r} unnormalized={rec.unnormalized_value!r}"))

    h = layered_coefficients(scn, cfg.n_multi, settings)
    target = float(scn.omega_eq()[0])
    power = mean_confidence_interval(np.abs(h) ** 2, cfg.confidence)
    z = abs(power.z_score(target))
    checks.append(Check("layered-variance-match", z <= 3.0, z, 3.0,
                        f"mean|h|^2={power.mean!r} omega_eq={target!r} se={power.std_err!r}"))

    limit = ks_threshold(h.size, KS_CRITICAL_1PCT)
    half = math.sqrt(target / 2.0)
    for part, values in (("real", h.real), ("imag", h.imag)):
        d = ks_statistic(values, lambda x: norm.cdf(x, scale=half))
        checks.append(Check(f"layered-gaussian-{part}", d <= limit, d, limit, f"n={h.size}"))
    d = ks_statistic(np.abs(h) ** 2, lambda x: -np.expm1(-np.clip(x, 0, None) / target))
    checks.append(Check("layered-exponential-power", d <= limit, d, limit, f"n={h.size}"))
    return checks


def run_validate(cfg: RunConfig) -> ValidationReport:
    checks = layered_checks(cfg)
    settings = cfg.settings()

    outage = run_fig_outage(cfg)
    capacity = run_fig_capacity(cfg)
    checks.append(_grid_check("outage-grid", outage, "pout_mc", "pout_analytic", "pout_stderr"))
    checks.append(_grid_check("capacity-grid", capacity, "cap_mc", "cap_analytic", "cap_stderr"))

    samples, gp, d = zf_sinr_fit(cfg)
    limit = ks_threshold(samples.size, KS_CRITICAL_5PCT, KS_MARGIN)
    checks.append(Check("zf-sinr-gamma-ks", d <= limit, d, limit,
                        f"m={gp.shape} theta={gp.scale!r} n={samples.size}"))
    est = mean_confidence_interval(samples, cfg.confidence)
    z = abs(est.z_score(gp.mean))
    checks.append(Check("zf-sinr-mean", z <= 3.0, z, 3.0, f"mean={est.mean!r} m*theta={gp.mean!r}"))

    scn = cfg.scenario
    res = interference_residuals(scn, cfg.n_residual, settings)
    worst = float(np.max(res))
    checks.append(Check("zf-interference-residual", worst < 1e-10, worst, 1e-10, f"trials={res.size}"))

    oeq = float(scn.omega_eq()[0])
    rate = simulate_sum_rate(scn, oeq, cfg.n_multi, settings)
    exact = zf_sum_rate_exact(scn, oeq)
    z = abs(rate.z_score(exact))
    checks.append(Check("zf-sum-rate-exact", z <= 3.0, z, 3.0, f"mc={rate.mean!r} exact={exact!r}"))

    return ValidationReport(checks=checks, cfg=cfg, tables={"outage_grid": outage, "capacity_grid": capacity})
