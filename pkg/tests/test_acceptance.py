"""Exit criteria for the whole package, one test per criterion.

Run with ``pytest tests/test_acceptance.py``; a PASS/FAIL line per criterion
is printed in the terminal summary.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from pvrfid.energy_model import (
    CAPACITOR,
    ENTERED_BLACKOUT,
    PowerPath,
    PvCell,
    read_trace_csv,
    simulate,
    time_to_blackout,
    write_trace_csv,
)
from pvrfid.insolation import Sampled, Square
from pvrfid.interrogation import run_campaign
from pvrfid.link_budget import IcProfile, LinkParams, range_ratio, read_range, received_power
from pvrfid.scenario import load_scenario
from pvrfid.sizing import availability, min_capacitance

C_LIGHT = 299_792_458.0


def test_c1_operating_point(criterion):
    with criterion("C1 range at 4 W EIRP: semi-passive 46.81 +/- 0.05 m, passive 14.80 +/- 0.05 m") as rec:
        sc = load_scenario("fcc.scenario")
        t0 = time.perf_counter()
        d_semi = read_range(sc.link, sc.ic.sensitivity_semipassive_dbm)
        d_pass = read_range(sc.link, sc.ic.sensitivity_passive_dbm)
        elapsed = time.perf_counter() - t0
        rec["detail"] = f"semi {d_semi:.3f} m, passive {d_pass:.3f} m, {elapsed * 1e6:.0f} us"
        assert sc.link.eirp_mode
        assert sc.link.g_product == 0.8 and sc.link.tau == 0.8 and sc.link.frequency_hz == 915e6
        assert abs(d_semi - 46.81) <= 0.05
        assert 40.0 <= d_semi <= 50.0
        assert abs(d_pass - 14.80) <= 0.05
        assert elapsed < 1e-3


def test_c2_mode_ratio(criterion):
    with criterion("C2 range_ratio(-21, -31) = 3.16228 +/- 1e-5 under 100 link perturbations") as rec:
        t0 = time.perf_counter()
        ic = IcProfile(sensitivity_passive_dbm=-21, sensitivity_semipassive_dbm=-31)
        ratio = range_ratio(ic)
        assert abs(ratio - 3.16228) <= 1e-5
        rng = np.random.default_rng(2)
        worst = 0.0
        for _ in range(100):
            link = LinkParams(rng.uniform(0, 40), rng.uniform(0.05, 10), rng.uniform(0.01, 1), rng.uniform(3e8, 3e9))
            observed = read_range(link, -31) / read_range(link, -21)
            worst = max(worst, abs(observed - 3.16228))
        elapsed = time.perf_counter() - t0
        rec["detail"] = f"ratio {ratio:.6f}, worst link-derived deviation {worst:.2e}, {elapsed:.3f} s"
        assert worst <= 1e-5
        assert elapsed < 1.0


def test_c3_fig6_reproduction(criterion):
    with criterion("C3 fig6: three phases, 2.700 V plateau, linear decay, blackout < 1.5 V, dt 1 vs 0.1 < 0.5%") as rec:
        sc = load_scenario("fig6.scenario")
        assert sc.path.capacitance_f == 1.0 and sc.duration_s == 72 * 3600 and sc.v_initial == 0.0
        t0 = time.perf_counter()
        coarse = sc.run_simulation()
        fine = sc.with_overrides(dt_s=0.1).run_simulation()
        elapsed = time.perf_counter() - t0

        assert set(coarse.phase_labels()) == {"direct_solar", "capacitor", "blackout"}
        v, ph = coarse.v_cap, coarse.phase
        # plateau: every lit sample from charge-complete to lights-off sits at the clamp
        lit = coarse.irradiance > 0
        full = lit & (v >= 2.7)
        run_starts = np.flatnonzero(full[1:] & ~full[:-1]) + 1
        for k in run_starts:
            end = k + int(np.argmax(~lit[k:]))
            assert np.all(v[k:end] == 2.7)
        assert len(run_starts) == 3
        # linear decay while capacitor powered: constant slope, equal to the full load
        cap = np.flatnonzero((ph[:-1] == CAPACITOR) & (ph[1:] == CAPACITOR))
        slopes = np.diff(v)[cap]
        i_total = sc.path.i_leak + sc.ic.load_current
        assert np.allclose(slopes, -i_total / sc.path.capacitance_f, rtol=1e-9, atol=1e-15)
        # blackout strictly below threshold, and reached each night
        assert np.all(v[ph == 2] < 1.5) and np.all(v[ph != 2] >= 1.5)
        assert len(coarse.events_named(ENTERED_BLACKOUT)) == 3

        diff = np.max(np.abs(coarse.v_cap - fine.v_cap[::10]))
        rel = diff / sc.path.v_clamp
        rec["detail"] = f"max |dv| {diff:.2e} V ({rel * 100:.4f}% of clamp), {elapsed:.2f} s"
        assert rel < 0.005
        assert elapsed < 5.0


def _lights_off_blackout_delay(trace, lights_off):
    entries = [t for t in trace.events_named(ENTERED_BLACKOUT) if t > lights_off]
    return entries[0] - lights_off


def test_c4_one_millifarad_persistence(criterion):
    with criterion("C4 1 mF: blackout 902 s +/- 5% after lights-off at 1.33 uA; 109.1 s +/- 1% at 11 uA") as rec:
        sc = load_scenario("window1mf.scenario")
        i_eff = sc.path.i_leak + sc.ic.load_current
        assert i_eff == pytest.approx(1.33e-6, rel=1e-9)
        lights_off = sc.profile.day_start_s + sc.profile.day_length_s
        t0 = time.perf_counter()
        delay = _lights_off_blackout_delay(sc.run_simulation(), lights_off)

        ic_full = replace(sc.ic, duty_cycle=1.0)
        full_load = replace(sc, ic=ic_full, path=replace(sc.path, ic=ic_full))
        delay_full = _lights_off_blackout_delay(full_load.run_simulation(), lights_off)
        analytic_full = time_to_blackout(1e-3, 2.7, 1.5, 11e-6)
        elapsed = time.perf_counter() - t0
        rec["detail"] = (f"{delay:.0f} s at 1.33 uA (target ~15 min), {delay_full:.1f} s at 11 uA "
                         f"vs analytic {analytic_full:.2f} s, {elapsed:.2f} s")
        assert abs(delay - 902) <= 0.05 * 902
        assert abs(delay_full - analytic_full) <= 0.01 * analytic_full
        assert abs(analytic_full - 109.1) <= 0.01 * 109.1
        assert elapsed < 1.0


def test_c5_ten_farad_persistence(criterion):
    with criterion("C5 10 F: 72 h availability 100.0% after warmup; dark endurance 1.0909e6 s +/- 1%") as rec:
        sc = load_scenario("window10f.scenario").with_overrides(duration_s=72 * 3600, warmup_s=86400)
        t0 = time.perf_counter()
        rep = availability(sc.run_simulation(), sc.warmup_s)
        endurance = time_to_blackout(sc.path.capacitance_f, sc.path.v_clamp, sc.ic.v_readwrite,
                                     sc.path.i_leak + sc.ic.load_current)
        elapsed = time.perf_counter() - t0
        rec["detail"] = f"availability {rep.availability_fraction:.4f}, endurance {endurance:.5g} s, {elapsed:.2f} s"
        assert rep.availability_fraction == 1.0
        assert abs(endurance - 1.0909e6) <= 0.01 * 1.0909e6
        assert elapsed < 5.0


def test_c6_campaign(criterion):
    with criterion("C6 campaign 24 h @ 4 Hz, p=0.3875: within 3 sigma of 133,920; no blackout reads; "
                   "100-seed mean within 3 sigma/10") as rec:
        sc = load_scenario("window10f.scenario")
        t0 = time.perf_counter()
        trace = sc.run_simulation()
        assert np.all(trace.phase != 2)
        n = 24 * 3600 * 4
        expected = 0.3875 * n
        sigma = math.sqrt(n * 0.3875 * (1 - 0.3875))
        res = run_campaign(trace, sc.reader, sc.link)
        assert res.attempts == n
        assert res.expected_successes == pytest.approx(expected)
        assert abs(res.total_successes - expected) <= 3 * sigma
        assert res.per_phase["blackout"] == 0
        totals = [run_campaign(trace, replace(sc.reader, rng_seed=s), sc.link).total_successes for s in range(100)]
        mean = float(np.mean(totals))
        elapsed = time.perf_counter() - t0
        rec["detail"] = (f"{res.total_successes} reads (expected {expected:.0f}, sigma {sigma:.0f}, "
                         f"measured 133,911); 100-seed mean {mean:.1f}; {elapsed:.2f} s")
        assert abs(mean - expected) <= 3 * sigma / 10
        assert elapsed < 30.0


def test_c7_capacitor_sizing(criterion):
    with criterion("C7 sizing: 0.396 F +/- 5% at 11 uA; 2.16 F +/- 5% at 60 uA, inside 1-10 F") as rec:
        sc = load_scenario("budget12h.scenario")
        assert sc.path.i_leak + sc.ic.load_current == pytest.approx(11e-6)
        t0 = time.perf_counter()
        c_small = min_capacitance(sc, 1.0, 1e-3, 100.0, rel_tol=1e-3)
        leaky = replace(sc, path=replace(sc.path, i_leak=50e-6))
        c_leaky = min_capacitance(leaky, 1.0, 1e-3, 100.0, rel_tol=1e-3)
        elapsed = time.perf_counter() - t0
        rec["detail"] = f"{c_small:.4f} F and {c_leaky:.4f} F, {elapsed:.2f} s"
        assert abs(c_small - 0.396) <= 0.05 * 0.396
        assert abs(c_leaky - 2.16) <= 0.05 * 2.16
        assert 1.0 <= c_leaky <= 10.0
        assert elapsed < 60.0


def test_c8_property_suites(criterion, tmp_path):
    with criterion("C8 properties: link round-trip 1e-9 dB, brute-force range 2 mm x 50, charge "
                   "conservation, clamp fuzz 1000 steps x 100, CSV determinism") as rec:
        t0 = time.perf_counter()
        rng = np.random.default_rng(8)

        worst_db = 0.0
        for _ in range(1000):
            link = LinkParams(rng.uniform(0, 40), rng.uniform(0.05, 10), rng.uniform(0.01, 1), rng.uniform(3e8, 3e9))
            s = rng.uniform(-40, -5)
            worst_db = max(worst_db, abs(received_power(link, read_range(link, s)) - s))
        assert worst_db <= 1e-9

        worst_mm = 0.0
        grid = 0.01 + 1e-3 * np.arange(200_000)
        for _ in range(50):
            p, g, tau, f, s = (rng.uniform(20, 36), rng.uniform(0.3, 2), rng.uniform(0.3, 1),
                               rng.uniform(8e8, 1e9), rng.uniform(-31, -15))
            p_rx = p + 10 * np.log10(g * tau) - 20 * np.log10(4 * np.pi * grid * f / C_LIGHT)
            oracle = grid[np.flatnonzero(p_rx >= s)[-1]]
            worst_mm = max(worst_mm, 1e3 * abs(read_range(LinkParams(p, g, tau, f), s) - oracle))
        assert worst_mm <= 2.0

        worst_q = 0.0
        for _ in range(100):
            path = PowerPath(
                pv=PvCell(rng.uniform(0.5, 20), rng.uniform(1e-4, 1e-2), rng.uniform(1, 6)),
                v_diode=rng.uniform(0, 0.7), v_clamp=rng.uniform(1.6, 3.3),
                capacitance_f=10 ** rng.uniform(-6, 1), i_leak=rng.uniform(0, 60e-6),
                ic=IcProfile(i_operating=rng.uniform(0, 1e-4), duty_cycle=rng.uniform(0, 1)),
            )
            dt = 10 ** rng.uniform(-2, 1.5)
            if rng.random() < 0.5:
                period = dt * rng.integers(20, 400)
                profile = Square(rng.uniform(0, 1200), rng.uniform(0, period), rng.uniform(0, period), period)
            else:
                ts = np.unique(rng.uniform(0, 1000 * dt, 8))
                profile = Sampled(tuple(ts), tuple(rng.uniform(0, 1200, len(ts))))
            tr = simulate(path, profile, 1000 * dt, dt, rng.uniform(0, path.v_clamp))
            assert len(tr) == 1001
            assert np.all(tr.v_cap >= 0) and np.all(tr.v_cap <= path.v_clamp)
            assert np.all(tr.i_pv >= 0)
            assert np.array_equal(tr.phase == 2, tr.v_cap < path.ic.v_readwrite)
            stored = path.capacitance_f * (tr.v_cap[-1] - tr.v_cap[0])
            flowed = float(np.sum(tr.i_pv[1:] - tr.i_load[1:]) * dt)
            quantum = dt * (path.pv.i_sc_stc * 1.2 + path.i_leak + path.ic.load_current)
            worst_q = max(worst_q, abs(stored - flowed) / quantum)
            assert abs(stored - flowed) <= quantum

        sc = load_scenario("fig6.scenario").with_overrides(duration_s=86400)
        write_trace_csv(sc.run_simulation(), tmp_path / "a.csv")
        write_trace_csv(sc.run_simulation(), tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        back = read_trace_csv(tmp_path / "a.csv")
        write_trace_csv(back, tmp_path / "c.csv")
        assert (tmp_path / "c.csv").read_bytes() == (tmp_path / "a.csv").read_bytes()

        elapsed = time.perf_counter() - t0
        rec["detail"] = (f"round-trip {worst_db:.1e} dB, oracle {worst_mm:.2f} mm, "
                         f"charge residual {worst_q:.1e} quanta, {elapsed:.1f} s")
        assert elapsed < 120.0
