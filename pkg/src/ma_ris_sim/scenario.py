"""Experiment assembly: configuration, single-point pipeline and the sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from . import channel as ch
from . import geometry as geo
from . import performance as perf
from .geometry import Layout, Mobility, Vec3

SPEED_OF_LIGHT = 299_792_458.0

VARIANTS = ("MA-1D", "MA-2D", "FPA-1D", "FPA-2D")

REFERENCE_TARGETS = {
    "outage_improvement_pct": 24.0,
    "element_saving_pct": 25.0,
    "snr_gap_1d_db": 3.0,
    "snr_gap_2d_db": 2.5,
}


def _variant(tag: str) -> tuple[Mobility, Layout]:
    try:
        mob, lay = tag.split("-")
        return Mobility(mob), Layout(lay)
    except ValueError:
        raise ValueError(f"unknown variant {tag!r}; expected one of {VARIANTS}") from None


@dataclass(frozen=True)
class ScenarioConfig:
    """A complete experiment description in SI units, radians and linear ratios.

    Defaults reproduce the reference setup: Tx at (0, 0, 3) m, Rx at (10, 0, 0)
    m, a 1 m panel centred at x = 5 m and y = 15 m carrying 21 elements, 0.1 m/s
    element speed over 10 s, 4.25 GHz, -45 dBm noise and a 20 dB threshold.
    """

    tx: Vec3 = Vec3(0.0, 0.0, 3.0)
    rx: Vec3 = Vec3(10.0, 0.0, 0.0)
    panel_x: float = 5.0
    panel_z: float = 0.0
    y_s: float = 15.0
    panel_length: float = 1.0
    n_elements: int = 21
    n_x: int = 7
    n_y: int = 3
    element_size: tuple[float, float] | None = None  # None -> (lambda/2, lambda/2)
    hpbw: float = math.radians(13.8)
    carrier_freq: float = 4.25e9
    noise_power: float = perf.dbm_to_watts(-45.0)
    tx_power: float = perf.dbm_to_watts(-20.0)
    gamma_th: float = perf.from_db(20.0)
    speed: float = 0.1
    duration: int = 10
    mc_trials: int = 1_000_000
    seed: int = 42
    target_log10_outage: float = -70.0
    pt_range_dbm: tuple[float, ...] = tuple(float(p) for p in range(-40, 21, 5))
    n_range: tuple[int, ...] = tuple(range(1, 65))
    ys_range: tuple[float, ...] = tuple(float(y) for y in range(1, 16, 2))

    def __post_init__(self):
        if not self.carrier_freq > 0:
            raise ValueError("carrier_freq must be positive")
        if self.duration < 1:
            raise ValueError("duration must be >= 1")
        if not math.isfinite(self.gamma_th) or self.gamma_th <= 0:
            raise ValueError("gamma_th must be finite and positive")
        if not 0 < self.hpbw < math.pi / 2:
            raise ValueError("hpbw must be in (0, pi/2)")
        if self.n_elements < 1:
            raise ValueError("n_elements must be >= 1")
        if self.speed < 0:
            raise ValueError("speed must be non-negative")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq

    @property
    def fixed_spacing(self) -> float:
        return self.wavelength / 2.0

    @property
    def element_dims(self) -> tuple[float, float]:
        if self.element_size is not None:
            return self.element_size
        return (self.fixed_spacing, self.fixed_spacing)

    @property
    def panel_center(self) -> Vec3:
        return Vec3(self.panel_x, self.y_s, self.panel_z)

    def grid(self, n: int) -> tuple[int, int]:
        if n == self.n_elements and self.n_x * self.n_y == n:
            return self.n_x, self.n_y
        return geo.grid_shape(n)


@dataclass(frozen=True)
class SweepRow:
    name: str
    value: float
    variant: str
    n_eff: int
    p_r_dbm: float
    gamma_db: float
    log10_p_out: float
    t_index: int = 1
    trace: "PointTrace | None" = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class PointTrace:
    """Intermediate quantities of one pipeline evaluation."""

    spacing: float
    positions: list[Vec3]
    ellipse: geo.IlluminationEllipse | None
    footprint_unbounded: bool
    elements: list[ch.CascadedElement]
    coherent_amplitude: complex
    p_r: float
    snr: perf.SnrResult
    outage: perf.OutageResult | None


def _spacing(cfg: ScenarioConfig, mobility: Mobility, t_index: int) -> float:
    # A panel that never moves is a fixed panel, whatever its element type.
    if mobility is Mobility.FIXED or cfg.n_elements < 2 or cfg.speed == 0:
        return cfg.fixed_spacing
    return geo.ma_spacing(t_index, cfg.speed, cfg.n_elements, cfg.fixed_spacing)


def _cascade(cfg: ScenarioConfig, positions: Sequence[Vec3]) -> tuple[list[ch.CascadedElement], float, float]:
    lam = cfg.wavelength
    center = cfg.panel_center
    # Tx departure and Rx arrival directions, taken towards/from the panel center.
    rho_b = ch.path_difference(cfg.tx, geo.direction_angles(cfg.tx, center))
    rho_u = ch.path_difference(cfg.rx, geo.direction_angles(center, cfg.rx))
    order = sorted(range(len(positions)), key=lambda i: ((positions[i] - center).norm(), i))
    elements = []
    for i in order:
        r = positions[i]
        rho_r = ch.path_difference(r, geo.direction_angles(cfg.tx, r))
        rho_t = ch.path_difference(r, geo.direction_angles(r, cfg.rx))
        d1, d2 = geo.link_distances(cfg.tx, r, cfg.rx)
        elements.append(ch.CascadedElement(
            index=i,
            rx_phase=ch.PathPhase.from_path(rho_r, lam),
            tx_phase=ch.PathPhase.from_path(rho_t, lam),
            gains=ch.pattern_gains(r, center, cfg.rx, cfg.hpbw),
            d_n1=d1,
            d_n2=d2,
            applied_phase=ch.optimal_phase(rho_b, rho_r, rho_t, rho_u, lam),
        ))
    return elements, rho_b, rho_u


def evaluate_point(cfg: ScenarioConfig, variant: str, t_index: int | None = None) -> SweepRow:
    """Run the full link pipeline for one variant at one time step.

    ``t_index`` defaults to the end of the traversal.  A grazing-incidence
    footprint (the lobe edge never meets the panel plane) is treated as
    unbounded, so every element is illuminated.
    """
    mobility, layout = _variant(variant)
    t = cfg.duration if t_index is None else t_index
    if not 1 <= t <= cfg.duration:
        raise ValueError(f"t_index={t} outside [1, {cfg.duration}]")
    n = cfg.n_elements
    spacing = _spacing(cfg, mobility, t)
    n_x, n_y = cfg.grid(n) if layout is Layout.TWO_D else (n, 1)
    panel = geo.PanelGeometry(cfg.panel_center, cfg.panel_length, layout, n, n_x, n_y,
                              cfg.element_dims, mobility)
    positions = geo.element_positions(panel, geo.MovementState(t, cfg.speed, spacing))

    try:
        ellipse = geo.illumination_ellipse(cfg.tx, cfg.panel_center, cfg.hpbw)
    except geo.GrazingIncidence:
        ellipse = None
    if ellipse is None:
        n_eff = n
    elif layout is Layout.ONE_D:
        n_eff = geo.effective_count_1d(ellipse.semi_major, spacing, n)
    else:
        n_eff = geo.effective_count_2d(ellipse.area, spacing, n)

    elements, rho_b, rho_u = _cascade(cfg, positions)
    amp = ch.cascaded_amplitude(elements, [(1.0, 1.0)] * n, n_eff, rho_b, rho_u, cfg.wavelength)
    p_r = ch.received_power(cfg.tx_power, cfg.wavelength, cfg.element_dims, elements, n_eff)
    gamma_bar = perf.average_snr(p_r, cfg.noise_power)
    # The link budget already sums the array coherently, so the deterministic gamma is gamma_bar.
    snr = perf.SnrResult(gamma_bar, gamma_bar, gamma_bar)
    if gamma_bar > 0 and n_eff >= 1:
        outage = perf.outage_probability(cfg.gamma_th, gamma_bar, n_eff)
        log10_p = outage.log10
    else:
        outage, log10_p = None, 0.0
    trace = PointTrace(spacing, positions, ellipse, ellipse is None, elements, amp, p_r, snr, outage)
    return SweepRow("t_index", float(t), variant, n_eff, perf.watts_to_dbm(p_r),
                    snr.gamma_inst_db, log10_p, t, trace)


def _sweep(cfg: ScenarioConfig, name: str, values: Iterable, apply, variants=VARIANTS) -> list[SweepRow]:
    values = list(values)
    if not values:
        raise ValueError(f"empty {name} range")
    rows = []
    for tag in variants:
        for v in values:
            row = evaluate_point(apply(cfg, v), tag)
            rows.append(replace(row, name=name, value=v))
    return rows


def sweep_power(cfg: ScenarioConfig, p_t_range: Sequence[float] | None = None) -> list[SweepRow]:
    """Outage versus transmit power (dBm) at the configured panel height."""
    rng = cfg.pt_range_dbm if p_t_range is None else p_t_range
    return _sweep(cfg, "p_t_dbm", rng,
                  lambda c, p: replace(c, tx_power=perf.dbm_to_watts(p)))


def sweep_snr(cfg: ScenarioConfig, p_t_range: Sequence[float] | None = None) -> list[SweepRow]:
    """SNR versus transmit power; identical pipeline to :func:`sweep_power`."""
    return sweep_power(cfg, p_t_range)


def sweep_elements(cfg: ScenarioConfig, n_range: Sequence[int] | None = None) -> list[SweepRow]:
    rng = cfg.n_range if n_range is None else n_range
    if any(n < 1 for n in rng):
        raise ValueError("element counts must be >= 1")
    return _sweep(cfg, "n", rng, lambda c, n: replace(c, n_elements=int(n)))


def sweep_position(cfg: ScenarioConfig, y_s_range: Sequence[float] | None = None) -> list[SweepRow]:
    rng = cfg.ys_range if y_s_range is None else y_s_range
    if any(y <= 0 for y in rng):
        raise ValueError("panel heights y_s must be positive")
    return _sweep(cfg, "y_s_m", rng, lambda c, y: replace(c, y_s=float(y)))


def trajectory(cfg: ScenarioConfig, variant: str) -> list[SweepRow]:
    """One row per time step 1..T at the configured panel height."""
    return [evaluate_point(cfg, variant, t) for t in range(1, cfg.duration + 1)]


def argmax_snr(rows: Sequence[SweepRow]) -> dict[str, tuple[float, float]]:
    """Per-variant (independent value, gamma_db) at the SNR maximum; first wins ties."""
    best: dict[str, tuple[float, float]] = {}
    for r in rows:
        if r.variant not in best or r.gamma_db > best[r.variant][1]:
            best[r.variant] = (r.value, r.gamma_db)
    return best


def saturation_value(rows: Sequence[SweepRow], variant: str, n_total: int) -> float | None:
    """Smallest independent value at which ``variant`` reaches ``n_eff == n_total``."""
    hits = [r.value for r in rows if r.variant == variant and r.n_eff >= n_total]
    return min(hits) if hits else None


def elements_for_target(rows: Sequence[SweepRow], variant: str, target_log10: float) -> int | None:
    hits = [int(r.value) for r in rows if r.variant == variant and r.log10_p_out <= target_log10]
    return min(hits) if hits else None


def _by(rows, variant, value):
    for r in rows:
        if r.variant == variant and r.value == value:
            return r
    raise KeyError((variant, value))


@dataclass(frozen=True)
class Comparison:
    outage_improvement: float
    element_ratio: float | None
    snr_gap_1d_db: float
    snr_gap_2d_db: float
    elements_ma: int | None
    elements_fpa: int | None
    p_out_ma: float
    p_out_fpa: float

    @property
    def element_saving(self) -> float | None:
        return None if self.element_ratio is None else 1.0 - self.element_ratio

    def records(self) -> list[tuple[str, float | None, float, str]]:
        """(metric, value, reference value, unit) tuples."""
        pct = lambda v: None if v is None else 100.0 * v
        return [
            ("outage_improvement_2d", pct(self.outage_improvement),
             REFERENCE_TARGETS["outage_improvement_pct"], "percent"),
            ("element_saving", pct(self.element_saving),
             REFERENCE_TARGETS["element_saving_pct"], "percent"),
            ("snr_gap_1d", self.snr_gap_1d_db, REFERENCE_TARGETS["snr_gap_1d_db"], "dB"),
            ("snr_gap_2d", self.snr_gap_2d_db, REFERENCE_TARGETS["snr_gap_2d_db"], "dB"),
        ]


def compare_ma_fpa(cfg: ScenarioConfig, ma: str = "MA", fpa: str = "FPA",
                   outage_pt_dbm: float = -20.0, snr_pt_dbm: float = 0.0) -> Comparison:
    """Headline MA-vs-FPA metrics.

    * relative outage improvement ``(P_fpa - P_ma) / P_fpa`` for 2D at
      ``outage_pt_dbm``;
    * element ratio ``N_ma / N_fpa`` needed to reach ``cfg.target_log10_outage``
      (2D, at ``outage_pt_dbm``), ``None`` if either never reaches it;
    * SNR gaps ``gamma_ma - gamma_fpa`` in dB at ``snr_pt_dbm`` for 1D and 2D.

    Passing the same family for ``ma`` and ``fpa`` gives the identity result.
    """
    at_out = replace(cfg, tx_power=perf.dbm_to_watts(outage_pt_dbm))
    r_ma = evaluate_point(at_out, f"{ma}-2D")
    r_fpa = evaluate_point(at_out, f"{fpa}-2D")
    ln_ma = r_ma.log10_p_out * math.log(10.0)
    ln_fpa = r_fpa.log10_p_out * math.log(10.0)
    improvement = -math.expm1(ln_ma - ln_fpa) if ln_fpa > -math.inf else 0.0

    el_rows = sweep_elements(at_out)
    n_ma = elements_for_target(el_rows, f"{ma}-2D", cfg.target_log10_outage)
    n_fpa = elements_for_target(el_rows, f"{fpa}-2D", cfg.target_log10_outage)
    ratio = n_ma / n_fpa if n_ma is not None and n_fpa is not None else None

    at_snr = replace(cfg, tx_power=perf.dbm_to_watts(snr_pt_dbm))
    gaps = []
    for lay in ("1D", "2D"):
        gaps.append(evaluate_point(at_snr, f"{ma}-{lay}").gamma_db
                    - evaluate_point(at_snr, f"{fpa}-{lay}").gamma_db)
    return Comparison(improvement, ratio, gaps[0], gaps[1], n_ma, n_fpa,
                      10.0 ** r_ma.log10_p_out, 10.0 ** r_fpa.log10_p_out)


# -- analytic vs Monte Carlo outage ----------------------------------------------

CHECK_N_EFF = (1, 4, 10, 21)
CHECK_LEVELS = (1e-3, 1e-2, 0.05, 0.2, 0.9)


@dataclass(frozen=True)
class OutageCheck:
    n_eff: int
    gamma_bar: float
    gamma_th: float
    analytic: float
    log10_analytic: float
    estimate: float
    std_error: float
    trials: int

    @property
    def tolerance(self) -> float:
        return max(3.0 * self.std_error, 0.02 * self.analytic)

    @property
    def agree(self) -> bool:
        return abs(self.estimate - self.analytic) <= self.tolerance


def threshold_for_outage(level: float, gamma_bar: float, n_eff: int) -> float:
    """Threshold ``gamma_th`` at which the analytic outage equals ``level``."""
    from scipy.optimize import brentq

    target = math.log(level)
    f = lambda lg: perf.outage_probability(math.exp(lg), gamma_bar, n_eff).log_p.ln_p - target
    lo, hi = math.log(gamma_bar) - 60.0, math.log(gamma_bar) + 60.0
    return math.exp(brentq(f, lo, hi, xtol=1e-14, rtol=1e-14))


def outage_check(cfg: ScenarioConfig, trials: int | None = None, seed: int | None = None,
                 n_effs: Sequence[int] = CHECK_N_EFF, levels: Sequence[float] = CHECK_LEVELS,
                 gamma_bar: float = 1.0, workers: int = 1) -> list[OutageCheck]:
    """Compare the gamma-approximation outage with a double-Rayleigh Monte Carlo.

    For each ``n_eff`` the thresholds are placed where the analytic outage
    equals each of ``levels``; all thresholds share one sample set.
    """
    trials = cfg.mc_trials if trials is None else trials
    seed = cfg.seed if seed is None else seed
    out = []
    for n in n_effs:
        ths = [threshold_for_outage(p, gamma_bar, n) for p in levels]
        mc = perf.outage_monte_carlo_many(ths, gamma_bar, n, trials, seed, workers)
        for th, (est, se) in zip(ths, mc):
            res = perf.outage_probability(th, gamma_bar, n)
            out.append(OutageCheck(n, gamma_bar, th, res.probability, res.log10, est, se, trials))
    return out
