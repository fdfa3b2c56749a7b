"""Acceptance gate: one test per release criterion, each recording a
[PASS]/[FAIL] summary line with its measured values and pinned tolerances."""

import dataclasses
import json
import time

import numpy as np

from conftest import REPO, record_acceptance
from stormflux.evacmodel import (
    BetaEvacModel,
    EvacObservation,
    SourceKind,
    _arrays,
    _objective_factory,
    fit,
    load_observations,
    predict_rate,
)
from stormflux.odchoice import ChoiceCoefficients, od_probabilities
from stormflux.scenario import result_to_dict, run_scenario
from test_odchoice import FRIENDS_W, HOTEL_W, five_counties, reference_probs
from test_scenario import toy_brute_force


def test_gradient_matches_finite_differences():
    # analytic gradient vs central differences at 20 random points over the
    # bundled 45-entry corpus; componentwise rel 1e-5 (abs floor 1e-7); < 1 s
    obs = load_observations(REPO / "data" / "evac_observations.csv")
    y, w, z, h = _arrays(obs)
    zfree = sorted({int(v) for v in z} - {0})
    hfree = sorted({int(v) for v in h} - {0})
    objective = _objective_factory(y, w, z, h, zfree, hfree)
    n_params = 1 + len(zfree) + len(hfree) + 1
    rng = np.random.default_rng(42)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        p = np.concatenate([rng.uniform(-2.0, 2.0, size=n_params - 1),
                            [np.log(rng.uniform(5.0, 30.0))]])
        _, grad = objective(p)
        fd = np.empty_like(p)
        h = 1e-6
        for i in range(p.size):
            up, dn = p.copy(), p.copy()
            up[i] += h
            dn[i] -= h
            fd[i] = (objective(up)[0] - objective(dn)[0]) / (2.0 * h)
        err = np.abs(grad - fd) / np.maximum(np.abs(fd), 1e-7)
        err[np.abs(grad - fd) <= 1e-7] = 0.0
        worst = max(worst, float(err.max()))
    elapsed = time.perf_counter() - start
    passed = worst < 1e-5 and elapsed < 1.0
    record_acceptance(
        "gradient-correctness",
        passed,
        f"max rel err {worst:.2e} (limit 1e-5) over 20 points, "
        f"{elapsed:.2f}s (budget 1s)")
    assert worst < 1e-5
    assert elapsed < 1.0


def test_generate_and_refit_recovers_cell_means():
    # 10,000 synthetic draws from known parameters; the refit must land
    # every (zone, category) cell mean within +/-0.02; < 10 s
    truth = BetaEvacModel(
        alpha=-1.1,
        beta_zone=(0.0, -0.3, -0.8, -1.3, -1.8, -2.3),
        beta_intensity=(0.0, 0.9, 1.7, 2.6, 3.4, 3.9),
        lam=14.0)
    cells = [(z, c) for z in range(6) for c in range(6)]
    rng = np.random.default_rng(20200826)
    observations = []
    n_total = 10_000
    for i in range(n_total):
        z, c = cells[i % len(cells)]
        mu = predict_rate(truth, z, c)
        draw = float(np.clip(rng.beta(mu * truth.lam, (1.0 - mu) * truth.lam),
                             1e-9, 1.0 - 1e-9))
        observations.append(EvacObservation(
            rate=draw, zone=z, intensity=c,
            source_kind=SourceKind.OBSERVED, weight=1.0))

    start = time.perf_counter()
    fitted = fit(observations)
    elapsed = time.perf_counter() - start
    worst = max(abs(predict_rate(fitted, z, c) - predict_rate(truth, z, c))
                for z, c in cells)
    passed = worst <= 0.02 and elapsed < 10.0
    record_acceptance(
        "generate-and-refit",
        passed,
        f"N=10,000, max cell-mean dev {worst:.4f} (limit 0.02), "
        f"fit {elapsed:.2f}s (budget 10s)")
    assert worst <= 0.02
    assert elapsed < 10.0


def test_predicted_rate_trends(snapshot_model):
    # rates non-increasing in risk zone and non-decreasing in category,
    # asserted over every adjacent cell pair of the bundled fit
    ok = True
    for c in range(6):
        for z in range(5):
            ok &= predict_rate(snapshot_model, z, c) >= \
                predict_rate(snapshot_model, z + 1, c)
    for z in range(6):
        for c in range(5):
            ok &= predict_rate(snapshot_model, z, c) <= \
                predict_rate(snapshot_model, z, c + 1)
    record_acceptance(
        "trend-reproduction",
        bool(ok),
        "exact ordering over all 60 adjacent cell pairs of the bundled fit")
    assert ok


def test_od_matrix_properties():
    # row-stochasticity 1e-9, utility-shift invariance 1e-12, IIA ratio
    # preservation, and oracle equivalence on random 5x5 instances; < 1 s
    start = time.perf_counter()
    friends = ChoiceCoefficients("friends", FRIENDS_W)
    hotel = ChoiceCoefficients("hotel", HOTEL_W)
    worst_row = worst_oracle = worst_shift = worst_iia = 0.0
    for seed in range(5):
        rng = np.random.default_rng(seed)
        counties = five_counties(rng)
        for coeffs, kind in ((friends, "friends"), (hotel, "hotel")):
            od = od_probabilities(counties, counties, coeffs)
            worst_row = max(worst_row,
                            float(np.max(np.abs(od.probs.sum(axis=1) - 1.0))))
            want = np.array(reference_probs(counties, coeffs.weights, kind))
            worst_oracle = max(worst_oracle,
                               float(np.max(np.abs(od.probs - want))))
        # marking every destination threatened shifts each row's utilities
        # by the same constant, which the softmax must cancel
        all_off = [dataclasses.replace(c, threatened_flag=False) for c in counties]
        all_on = [dataclasses.replace(c, threatened_flag=True) for c in counties]
        a = od_probabilities(all_off, all_off, friends).probs
        b = od_probabilities(all_on, all_on, friends).probs
        worst_shift = max(worst_shift, float(np.max(np.abs(a - b))))
        # dropping the last destination renormalizes without moving ratios
        full = od_probabilities(counties, counties, friends)
        part = od_probabilities(counties[:1], counties[:4], friends)
        for j in (1, 2, 3):
            for m in (1, 2, 3):
                ratio_full = full.probs[0, j] / full.probs[0, m]
                ratio_part = part.probs[0, j] / part.probs[0, m]
                worst_iia = max(worst_iia,
                                abs(ratio_part / ratio_full - 1.0))
    elapsed = time.perf_counter() - start
    passed = (worst_row <= 1e-9 and worst_shift <= 1e-12
              and worst_oracle <= 1e-12 and worst_iia <= 1e-10
              and elapsed < 1.0)
    record_acceptance(
        "od-properties",
        passed,
        f"row-sum dev {worst_row:.1e} (1e-9), shift dev {worst_shift:.1e} "
        f"(1e-12), oracle dev {worst_oracle:.1e}, IIA dev {worst_iia:.1e}, "
        f"{elapsed:.2f}s (budget 1s)")
    assert passed


def test_toy_world_end_to_end(toy_scenario, toy_datasets, toy_model, toy_coeffs):
    # full pipeline on the 3-county world vs a scalar-python brute force
    result = run_scenario(toy_scenario, toy_datasets, toy_model, toy_coeffs,
                          point_rates=True)
    want = toy_brute_force()
    devs = []

    def rel(got, expected):
        return abs(got - expected) / max(abs(expected), 1e-300)

    devs.append(rel(result.county("01001").evacuees.mid, want["evac_01001"]))
    devs.append(rel(result.county("01001").exportations.mid, want["exports_mid"]))
    for fips in ("01003", "01005"):
        devs.append(rel(result.county(fips).receptions.mid,
                        want["receptions"][fips]))
        devs.append(rel(result.county(fips).importations.mid,
                        want["importations"][fips]))
    devs.append(rel(result.totals["evacuees"].mid, want["evac_01001"]))
    devs.append(rel(result.totals["importations"].mid, want["exports_mid"]))
    worst = max(devs)
    record_acceptance(
        "toy-world-oracle",
        worst <= 1e-9,
        f"max relative dev {worst:.2e} (limit 1e-9) across "
        f"evacuees/exportations/receptions/importations")
    assert worst <= 1e-9


def test_detection_bound_ratios(toy_scenario, toy_datasets, toy_model,
                                toy_coeffs, laura_scenario, snapshot_datasets,
                                snapshot_model, snapshot_coeffs):
    # point rates isolate the detection branches: high/mid doubles exactly
    # (binary-exact: the rate pair is a power of two apart) and low/mid is
    # 3/5 to within one ulp of 0.6
    results = [
        run_scenario(toy_scenario, toy_datasets, toy_model, toy_coeffs,
                     point_rates=True),
        run_scenario(laura_scenario, snapshot_datasets, snapshot_model,
                     snapshot_coeffs, point_rates=True),
    ]
    worst_low = 0.0
    high_exact = True
    checked = 0
    for res in results:
        intervals = [c.exportations for c in res.counties] + \
            [c.importations for c in res.counties] + \
            [res.totals["exportations"], res.totals["importations"]]
        for ci in intervals:
            if ci.mid == 0.0:
                continue
            checked += 1
            high_exact &= (ci.high / ci.mid) == 2.0
            worst_low = max(worst_low, abs(ci.low / ci.mid - 0.6))
    passed = high_exact and worst_low <= 1e-12 and checked > 0
    record_acceptance(
        "detection-bound-ratios",
        passed,
        f"high/mid == 2.0 bitwise on all {checked} nonzero intervals, "
        f"max |low/mid - 0.6| = {worst_low:.1e} (limit 1e-12)")
    assert passed


def test_conservation_and_determinism(toy_scenario, toy_datasets, toy_model,
                                      toy_coeffs, laura_scenario,
                                      snapshot_datasets, snapshot_model,
                                      snapshot_coeffs, laura_result):
    def conservation_dev(res):
        evac = sum(c.evacuees.mid for c in res.counties)
        recep = sum(c.receptions.mid for c in res.counties)
        exported = sum(c.exportations.mid for c in res.counties)
        imported = sum(c.importations.mid for c in res.counties)
        scale = max(1.0, evac)
        return max(abs(evac - recep), abs(exported - imported)) / scale

    toy_a = run_scenario(toy_scenario, toy_datasets, toy_model, toy_coeffs)
    toy_b = run_scenario(toy_scenario, toy_datasets, toy_model, toy_coeffs)
    laura_again = run_scenario(laura_scenario, snapshot_datasets,
                               snapshot_model, snapshot_coeffs)

    worst_dev = max(conservation_dev(r)
                    for r in (toy_a, laura_result, laura_again))
    deterministic = (
        json.dumps(result_to_dict(toy_a), sort_keys=True)
        == json.dumps(result_to_dict(toy_b), sort_keys=True)
        and json.dumps(result_to_dict(laura_again), sort_keys=True)
        == json.dumps(result_to_dict(laura_result), sort_keys=True))
    passed = worst_dev <= 1e-6 and deterministic
    record_acceptance(
        "conservation-and-determinism",
        passed,
        f"max relative flow imbalance {worst_dev:.1e} (limit 1e-6); "
        f"repeat runs bit-identical: {deterministic}")
    assert worst_dev <= 1e-6
    assert deterministic


def test_bundled_snapshot_regression(laura_scenario, snapshot_datasets,
                                     snapshot_model, snapshot_coeffs,
                                     rita_result):
    # paper-scale targets on the bundled snapshot, timed at 2,000 replicates
    start = time.perf_counter()
    laura = run_scenario(laura_scenario, snapshot_datasets, snapshot_model,
                         snapshot_coeffs)
    elapsed = time.perf_counter() - start

    evac = laura.totals["evacuees"].mid
    evac_ok = abs(evac - 499_500.0) <= 0.10 * 499_500.0

    exports = laura.totals["exportations"].mid
    exports_ok = abs(exports - 2_900.0) <= 0.20 * 2_900.0

    shares = [(c.receptions.mid / evac, c.name) for c in laura.counties]
    max_share, max_share_name = max(shares)
    share_ok = max_share <= 0.025 + 0.005

    rates = [(c.evac_rate.mid, c.name) for c in laura.counties]
    top_rate, top_rate_name = max(rates)
    orange_ok = top_rate_name == "Orange" and abs(top_rate - 0.80) <= 0.05

    rita_evac = rita_result.totals["evacuees"].mid
    rita_ok = abs(rita_evac - 1_054_500.0) <= 0.10 * 1_054_500.0

    metro = sum(rita_result.district(d).receptions.mid
                for d in ("Austin", "San Antonio", "Dallas", "Fort Worth"))
    metro_share = metro / rita_result.totals["receptions"].mid
    metro_ok = abs(metro_share - 0.30) <= 0.05

    time_ok = elapsed < 60.0
    passed = (evac_ok and exports_ok and share_ok and orange_ok and rita_ok
              and metro_ok and time_ok)
    record_acceptance(
        "snapshot-regression",
        passed,
        f"evacuees {evac:,.0f} (499,500 +/-10%), exportations {exports:,.1f} "
        f"(2,900 +/-20%), max destination share {max_share:.3%} "
        f"({max_share_name}, limit 3.0%), top rate {top_rate:.3f} in "
        f"{top_rate_name} (Orange, 0.80 +/-0.05), counterfactual evacuees "
        f"{rita_evac:,.0f} (1,054,500 +/-10%), metro reception share "
        f"{metro_share:.1%} (30% +/-5pp), run {elapsed:.1f}s (budget 60s)")
    assert evac_ok, f"evacuees {evac}"
    assert exports_ok, f"exportations {exports}"
    assert share_ok, f"max share {max_share} ({max_share_name})"
    assert orange_ok, f"top rate {top_rate} in {top_rate_name}"
    assert rita_ok, f"counterfactual evacuees {rita_evac}"
    assert metro_ok, f"metro share {metro_share}"
    assert time_ok, f"{elapsed}s"
