"""Acceptance gate: one test per criterion, each printing a PASS line.

Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion
lines; every criterion asserts its stated tolerance and its runtime bound.
"""

import json
import math
import time

import numpy as np
import pytest
from scipy.integrate import quad

import singlet_frame as sf
from singlet_frame.cli import cmd_posterior_family, cmd_run
from singlet_frame.config import parse_config
from conftest import random_direction, tilted_pole

Z = sf.Direction(0.0, 0.0, 1.0)


class _Timer:
    def __init__(self, limit_s):
        self.limit_s = limit_s

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        return False


def _report(num: int, timer: _Timer, detail: str):
    print(f"[acceptance] criterion {num:02d} PASS ({timer.elapsed:.2f}s / limit {timer.limit_s:.0f}s): {detail}")
    assert timer.elapsed < timer.limit_s


def test_criterion_01_analytic_mi_endpoints_and_shape():
    with _Timer(1.0) as t:
        assert sf.analytic_mutual_information(1.0) == 1.0
        assert sf.analytic_mutual_information(-1.0) == 1.0
        assert sf.analytic_mutual_information(0.0) == 0.0
        theta = np.linspace(0.0, math.pi, 10_000)
        vals = sf.analytic_mutual_information(np.cos(theta))
        np.testing.assert_allclose(vals, vals[::-1], atol=1e-12)  # even about pi/2
        half = vals[: 5_000]
        assert np.all(np.diff(half) <= 0.0)  # nonincreasing on [0, pi/2]
    _report(1, t, "endpoints exact, curve even and nonincreasing at 1e4 points")


def test_criterion_02_cross_formula_oracle():
    with _Timer(1.0) as t:
        grid = np.linspace(-1.0, 1.0, 1002)[1:-1]
        worst = 0.0
        for c in grid:
            closed = sf.analytic_mutual_information(float(c))
            tabulated = sf.mutual_information_from_joint(sf.singlet_joint_distribution(float(c)))
            worst = max(worst, abs(closed - tabulated))
        assert worst < 1e-10
    _report(2, t, f"closed form vs 2x2 evaluation, worst |diff| = {worst:.2e}")


def test_criterion_03_sampler_fidelity():
    with _Timer(5.0) as t:
        m = 100_000
        for idx, c in enumerate((-0.9, 0.0, 0.5, 0.7)):
            y = sf.Direction(math.sqrt(1.0 - c * c), 0.0, c)
            rec = sf.run_measurement_batch(Z, y, m, sf.SamplerConfig(2000 + idx))
            dist = sf.singlet_joint_distribution(c)
            for a in (-1, 1):
                for b in (-1, 1):
                    p = dist.prob(a, b)
                    freq = np.count_nonzero((rec.a == a) & (rec.b == b)) / m
                    se = math.sqrt(p * (1.0 - p) / m)
                    assert abs(freq - p) <= 5.0 * se
            mean_ab = float(np.mean(rec.products()))
            se_ab = math.sqrt((1.0 - c * c) / m) if abs(c) < 1.0 else 1.0 / math.sqrt(m)
            assert abs(mean_ab + c) <= 5.0 * se_ab
            se_half = 0.5 / math.sqrt(m)
            assert abs(np.count_nonzero(rec.a == 1) / m - 0.5) <= 5.0 * se_half
            assert abs(np.count_nonzero(rec.b == 1) / m - 0.5) <= 5.0 * se_half
    _report(3, t, "joint freqs, E[ab], and marginals within 5 SE at M=1e5")


def test_criterion_04_plug_in_convergence():
    with _Timer(30.0) as t:
        c = 0.9
        truth = sf.analytic_mutual_information(c)
        y = sf.Direction(math.sqrt(1.0 - c * c), 0.0, c)
        medians = []
        for m in (1_000, 10_000, 100_000):
            errs = [
                abs(
                    sf.estimate_mutual_information(
                        sf.tally(sf.run_measurement_batch(Z, y, m, sf.SamplerConfig(3000 + s)))
                    )
                    - truth
                )
                for s in range(30)
            ]
            medians.append(float(np.median(errs)))
        assert medians[0] < 0.05
        assert medians[2] < 0.01
        assert medians[0] >= medians[1] >= medians[2]
    _report(4, t, f"median errors {medians[0]:.4f} -> {medians[1]:.4f} -> {medians[2]:.4f}")


def test_criterion_05_normalization_oracle():
    with _Timer(10.0) as t:
        worst = 0.0
        for n_plus in range(0, 101):
            for n_minus in range(0, 101):
                oracle, _ = quad(
                    lambda g: (1.0 - g) ** n_plus * (1.0 + g) ** n_minus,
                    -1.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200,
                )
                closed = math.exp(sf.log_normalization_d(sf.SignTally(n_plus, n_minus)))
                worst = max(worst, abs(closed - oracle) / closed)
        assert worst < 1e-10

        rng = np.random.default_rng(11)
        for _ in range(20):
            tally = sf.SignTally(int(rng.integers(0, 80)), int(rng.integers(0, 80)))
            total, _ = quad(lambda c: sf.posterior_density(c, tally), -1.0, 1.0,
                            epsabs=0.0, epsrel=1e-12, limit=300)
            assert abs(8.0 * math.pi**2 * total - 1.0) < 1e-8
    _report(5, t, f"Beta form vs quadrature worst rel {worst:.2e}; 8pi^2 normalization on 20 tallies")


def test_criterion_06_map_formula():
    with _Timer(10.0) as t:
        rng = np.random.default_rng(13)
        grid = np.linspace(-1.0, 1.0, 100_001)
        step = grid[1] - grid[0]
        tallies = [sf.SignTally(5, 6), sf.SignTally(0, 100)]
        tallies += [
            sf.SignTally(int(rng.integers(0, 200)), int(rng.integers(0, 200)))
            for _ in range(50)
        ]
        for tally in tallies:
            if tally.n_total == 0:
                continue
            peak = sf.posterior_peak(tally)
            dens = sf.posterior_density(grid, tally)
            assert abs(grid[int(np.argmax(dens))] - peak) <= step
        assert sf.posterior_peak(sf.SignTally(5, 6)) == 1.0 / 11.0
        assert sf.posterior_peak(sf.SignTally(0, 100)) == 1.0  # relative angle 0
    _report(6, t, "grid argmax within one step of the MAP formula for 52 tallies")


def test_criterion_07_posterior_family_curves(tmp_path):
    with _Timer(5.0) as t:
        tallies = [sf.SignTally(5, 6), sf.SignTally(10, 12), sf.SignTally(20, 24), sf.SignTally(40, 48)]
        out = tmp_path / "family.csv"
        resolution = 4001
        cmd_posterior_family(tallies, out, resolution=resolution)
        curves = {}
        with open(out, encoding="utf-8") as fh:
            next(fh)
            for line in fh:
                npl, nmi, theta, dens = line.split(",")
                curves.setdefault((int(npl), int(nmi)), []).append((float(theta), float(dens)))
        step = 2.0 * math.pi / (resolution - 1)
        target = math.acos(1.0 / 11.0)
        widths = []
        for tally in tallies:
            curve = curves[(tally.n_plus, tally.n_minus)]
            thetas = np.array([c[0] for c in curve])
            dens = np.array([c[1] for c in curve])
            pos = thetas > 0
            tp, dp = thetas[pos], dens[pos]
            peak = int(np.argmax(dp))
            assert abs(tp[peak] - target) <= step
            neg_peak = thetas[int(np.argmax(np.where(thetas < 0, dens, -1.0)))]
            assert abs(neg_peak + target) <= step
            half = dp[peak] / 2.0
            left, right = peak, peak
            while left > 0 and dp[left] >= half:
                left -= 1
            while right < len(dp) - 1 and dp[right] >= half:
                right += 1
            widths.append(tp[right] - tp[left])
        assert widths == sorted(widths, reverse=True)
        assert len(set(widths)) == len(widths)
    _report(7, t, f"FWHM strictly decreasing {['%.3f' % w for w in widths]}, peaks at +/-arccos(1/11)")


def test_criterion_08_exact_mode_end_to_end():
    with _Timer(10.0) as t:
        rng = np.random.default_rng(17)
        worst = 0.0
        for i in range(100):
            truth = random_direction(rng)
            prior = sf.HemispherePrior.around(tilted_pole(truth, rng))
            params = sf.ProtocolParams(50, 1, 6, prior, mode="exact")
            res = sf.transfer_direction(truth, params)
            err = math.acos(sf.cos_angle(res.direction, truth))
            worst = max(worst, err)
            assert err <= params.resolution()
            if i < 5:  # determinism spot-check
                assert sf.transfer_direction(truth, params) == res
    _report(8, t, f"100 truths recovered, worst error {worst:.4f} <= cap {params.resolution():.4f}")


def test_criterion_09_sampled_mode_end_to_end():
    # observed on the build machine: 20/20 within 5 degrees (pinned bound: >= 18)
    with _Timer(120.0) as t:
        rng = np.random.default_rng(19)
        hits = 0
        errors = []
        for run in range(20):
            truth = random_direction(rng)
            prior = sf.HemispherePrior.around(tilted_pole(truth, rng))
            params = sf.ProtocolParams(
                50, 10_000, 3, prior, config=sf.SamplerConfig(4000 + run), mode="sampled",
            )
            res = sf.transfer_direction(truth, params)
            err_deg = math.degrees(math.acos(sf.cos_angle(res.direction, truth)))
            errors.append(err_deg)
            hits += err_deg < 5.0
        assert hits >= 18
    _report(9, t, f"{hits}/20 runs within 5 deg (median {np.median(errors):.2f} deg)")


def test_criterion_10_antipodal_ambiguity():
    with _Timer(10.0) as t:
        rng = np.random.default_rng(23)
        signs = set()
        for _ in range(50):
            truth = random_direction(rng)
            params = sf.ProtocolParams(50, 1, 6, sf.HemispherePrior.none(), mode="exact")
            res = sf.transfer_direction(truth, params)
            dot = sf.cos_angle(res.direction, truth)
            assert abs(dot) > math.cos(params.resolution())
            signs.add(1 if dot > 0 else -1)
        assert signs == {1, -1}
    _report(10, t, "50 truths recovered up to sign; both signs observed")


def test_criterion_11_run_report_determinism(tmp_path):
    with _Timer(60.0) as t:
        cfg = parse_config({
            "mode": "sampled",
            "alice_direction": {"theta": 1.1, "phi": 0.4},
            "trials": 50,
            "batch": 10_000,
            "refine_rounds": 3,
            "prior": {"enabled": True, "pole": {"theta": 0.8, "phi": 0.9}},
            "seed": 31,
        })
        r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
        cmd_run(cfg, r1)
        cmd_run(cfg, r2)
        b1, b2 = r1.read_bytes(), r2.read_bytes()
        assert b1 == b2
        json.loads(b1)  # also a valid JSON document
    _report(11, t, f"byte-identical {len(b1)}-byte reports across reruns")
