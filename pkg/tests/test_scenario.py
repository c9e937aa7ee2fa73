import math
from dataclasses import replace

import pytest

from goldens import REFERENCE_POINT
from ma_ris_sim import performance as perf
from ma_ris_sim import scenario as sc


def test_defaults(cfg):
    assert cfg.wavelength == pytest.approx(0.0705394, rel=1e-6)
    assert cfg.n_x * cfg.n_y == cfg.n_elements == 21
    assert cfg.hpbw == pytest.approx(math.radians(13.8))
    assert perf.db(cfg.gamma_th) == pytest.approx(20.0)
    assert perf.watts_to_dbm(cfg.noise_power) == pytest.approx(-45.0)


def test_config_validation():
    with pytest.raises(ValueError):
        sc.ScenarioConfig(carrier_freq=0.0)
    with pytest.raises(ValueError):
        sc.ScenarioConfig(duration=0)
    with pytest.raises(ValueError):
        sc.ScenarioConfig(gamma_th=math.inf)


@pytest.mark.parametrize("variant", sc.VARIANTS)
def test_reference_point(cfg, variant):
    n_eff, g_db = REFERENCE_POINT[variant]
    row = sc.evaluate_point(cfg, variant)
    assert row.n_eff == n_eff
    assert row.gamma_db == pytest.approx(g_db, abs=1e-9)


def test_trace_consistency(cfg):
    row = sc.evaluate_point(cfg, "MA-2D")
    tr = row.trace
    assert tr.spacing == pytest.approx((1.0 - 20 * cfg.fixed_spacing) / 20)
    assert len(tr.positions) == 21
    assert tr.coherent_amplitude == pytest.approx(row.n_eff + 0j, abs=1e-9)
    assert perf.watts_to_dbm(tr.p_r) == pytest.approx(row.p_r_dbm)
    # illumination-ordered: nearest element to the center first
    d = [(tr.positions[e.index] - cfg.panel_center).norm() for e in tr.elements]
    assert d == sorted(d)


def test_unknown_variant(cfg):
    with pytest.raises(ValueError):
        sc.evaluate_point(cfg, "MA-3D")
    with pytest.raises(ValueError):
        sc.evaluate_point(cfg, "MA-1D", t_index=11)


def test_vanishing_beam(cfg):
    narrow = replace(cfg, hpbw=1e-9)
    for v in sc.VARIANTS:
        row = sc.evaluate_point(narrow, v)
        assert row.n_eff == 1
        el = row.trace.elements[0]
        single = (cfg.tx_power * cfg.wavelength ** 2 * cfg.element_dims[0] * cfg.element_dims[1]
                  * el.gains.product / (64 * math.pi ** 3 * el.d_n1 ** 2 * el.d_n2 ** 2))
        assert row.trace.p_r == pytest.approx(single, rel=1e-12)


def test_fixed_rows_time_invariant(cfg):
    for v in ("FPA-1D", "FPA-2D"):
        rows = sc.trajectory(cfg, v)
        first = rows[0]
        assert all((r.n_eff, r.p_r_dbm, r.gamma_db, r.log10_p_out) ==
                   (first.n_eff, first.p_r_dbm, first.gamma_db, first.log10_p_out) for r in rows)


def test_static_ma_is_fpa(cfg):
    still = replace(cfg, speed=0.0)
    for lay in ("1D", "2D"):
        ma = sc.evaluate_point(still, f"MA-{lay}")
        fpa = sc.evaluate_point(still, f"FPA-{lay}")
        assert (ma.n_eff, ma.p_r_dbm, ma.gamma_db, ma.log10_p_out) == \
               (fpa.n_eff, fpa.p_r_dbm, fpa.gamma_db, fpa.log10_p_out)


def test_grazing_footprint_unbounded(cfg):
    row = sc.evaluate_point(replace(cfg, y_s=1.0), "MA-1D")
    assert row.trace.footprint_unbounded and row.n_eff == cfg.n_elements


def test_zero_power_row(cfg):
    # elements far outside the incident lobe: U = 0 everywhere
    off = replace(cfg, hpbw=math.radians(0.5), panel_length=40.0, speed=0.0)
    row = sc.evaluate_point(off, "FPA-1D")
    assert row.trace.p_r == 0.0
    assert row.log10_p_out == 0.0 and row.gamma_db == -math.inf


class TestSweeps:
    def test_power(self, cfg):
        rng = [-30.0, -20.0, -10.0, 0.0, 10.0, 20.0, 40.0, 60.0]
        rows = sc.sweep_power(cfg, rng)
        assert len(rows) == 4 * len(rng)
        assert [r.variant for r in rows[::len(rng)]] == list(sc.VARIANTS)
        for v in sc.VARIANTS:
            p = [r.log10_p_out for r in rows if r.variant == v]
            assert all(b <= a for a, b in zip(p, p[1:]))
            assert all(x <= 0 for x in p)
            assert all(r.n_eff <= cfg.n_elements for r in rows)
            assert all(r.p_r_dbm <= r.value for r in rows if r.variant == v)

    def test_power_empty(self, cfg):
        with pytest.raises(ValueError):
            sc.sweep_power(cfg, [])

    def test_snr_slope_one(self, cfg):
        rows = sc.sweep_snr(cfg, [-10.0, 0.0, 10.0])
        for v in sc.VARIANTS:
            g = [r.gamma_db for r in rows if r.variant == v]
            assert g[1] - g[0] == pytest.approx(10.0, abs=1e-9)
            assert g[2] - g[1] == pytest.approx(10.0, abs=1e-9)

    def test_elements(self, cfg):
        rows = sc.sweep_elements(replace(cfg, tx_power=perf.dbm_to_watts(60.0)), [1, 2, 3, 5, 8, 13, 21])
        # a single element: layout is irrelevant, only the movement schedule differs
        for fam in ("MA", "FPA"):
            one = [r for r in rows if r.value == 1 and r.variant.startswith(fam)]
            assert len({(r.n_eff, r.gamma_db) for r in one}) == 1
        for v in sc.VARIANTS:
            p = [r.log10_p_out for r in rows if r.variant == v]
            assert all(b <= a + 1e-12 for a, b in zip(p, p[1:]))

    def test_elements_invalid(self, cfg):
        with pytest.raises(ValueError):
            sc.sweep_elements(cfg, [0, 3])

    def test_position(self, cfg):
        rows = sc.sweep_position(cfg, [7.0])
        assert len(rows) == 4
        best = sc.argmax_snr(sc.sweep_position(cfg))
        assert set(best) == set(sc.VARIANTS)
        with pytest.raises(ValueError):
            sc.sweep_position(cfg, [0.0])

    def test_saturation_helper(self, cfg):
        rows = sc.sweep_position(cfg)
        for v in sc.VARIANTS:
            assert sc.saturation_value(rows, v, cfg.n_elements) == 1.0

    def test_rerun_identical(self, cfg):
        assert sc.sweep_power(cfg) == sc.sweep_power(cfg)


class TestCompare:
    def test_identity(self, cfg):
        c = sc.compare_ma_fpa(replace(cfg, n_range=tuple(range(1, 30))), ma="FPA", fpa="FPA")
        assert c.outage_improvement == 0.0
        assert c.snr_gap_1d_db == 0.0 and c.snr_gap_2d_db == 0.0
        assert c.element_ratio in (None, 1.0)

    def test_records(self, cfg):
        c = sc.compare_ma_fpa(replace(cfg, n_range=(1, 21)))
        names = [r[0] for r in c.records()]
        assert names == ["outage_improvement_2d", "element_saving", "snr_gap_1d", "snr_gap_2d"]
        assert [r[2] for r in c.records()] == [24.0, 25.0, 3.0, 2.5]

    def test_element_ratio_reachable(self, cfg):
        hot = replace(cfg, n_range=tuple(range(1, 41)), target_log10_outage=-10.0)
        c = sc.compare_ma_fpa(hot, outage_pt_dbm=90.0)
        assert c.elements_ma is not None and c.elements_fpa is not None
        assert c.element_ratio == pytest.approx(c.elements_ma / c.elements_fpa)


class TestOutageCheck:
    def test_threshold_inversion(self):
        th = sc.threshold_for_outage(0.05, 2.0, 7)
        assert perf.outage_probability(th, 2.0, 7).probability == pytest.approx(0.05, rel=1e-10)

    def test_grid(self, cfg):
        checks = sc.outage_check(cfg, trials=20_000, n_effs=(21,), levels=(0.2, 0.9))
        assert len(checks) == 2
        assert all(c.agree for c in checks)
