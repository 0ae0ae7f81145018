"""Acceptance gate: every criterion at its stated tolerance, one line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the PASS/FAIL line
per criterion.  All statistical criteria use the fixed default seed; the
finite-size bands were pinned from pilot runs recorded in the README.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

import hmt.volumes as volumes_module
from hmt.cli import DEFAULT_SEED, main
from hmt.ensembles import gaussian, markov_vertex_pairs, sample_matrix, shifted_gaussian
from hmt.limits import (
    cumulants_to_moments,
    free_cumulants,
    hankel_moment_matrix_det,
    limit_moment,
    moment_table,
    recorded_moment_table,
)
from hmt.rng import TAG_REPLICATE, mix
from hmt.spectra import (
    eigvalsh,
    empirical_spectrum,
    exact_trace_power,
    spectral_norm,
    trace_via_circuits,
)
from hmt.volumes import (
    build_system,
    eulerian_number,
    single_slab_system,
    slab_volume_integral,
    volume_exact,
    volume_mc,
)
from hmt.words import enumerate_words, delete_subword, double_factorial_odd, height, proper_subword_windows
from hmt.ensembles import row_sum_statistic

F = Fraction

pytestmark = pytest.mark.acceptance


def report(criterion: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"{criterion}: {detail}"


def test_criterion_1_toeplitz_fourth_moment_exact(tmp_path, capsys):
    out = tmp_path / "m4.csv"
    start = time.perf_counter()
    code = main(["moments", "--family", "toeplitz", "--order", "4",
                 "--method", "exact", "-o", str(out)])
    elapsed = time.perf_counter() - start
    row = out.read_text().strip().split("\n")[1].split(",")
    value = row[1]
    with capsys.disabled():
        report(
            "1 toeplitz m4",
            code == 0 and value == "8/3" and elapsed < 1.0,
            f"cli returned {value} in {elapsed:.3f}s (want 8/3 in < 1s)",
        )


def test_criterion_2_hankel_moments_exact(capsys):
    volumes_module._vol_memo.clear()
    start = time.perf_counter()
    table = moment_table("hankel", 8)
    elapsed = time.perf_counter() - start
    want = {4: F(2), 6: F(11, 2), 8: F(281, 15)}
    got = {order: table.entries[order] for order in want}
    with capsys.disabled():
        report(
            "2 hankel m4/m6/m8",
            got == want and elapsed < 30.0,
            f"got {[str(v) for v in got.values()]} in {elapsed:.2f}s "
            "(want ['2', '11/2', '281/15'] in < 30s)",
        )


def test_criterion_3_weighted_hankel_determinant(capsys):
    det = hankel_moment_matrix_det(moment_table("hankel", 8), 3, weighted=True)
    with capsys.disabled():
        report("3 weighted det", det == F(-73, 20), f"det = {det} (want -73/20)")


def test_criterion_4_markov_route_equivalence(capsys):
    cumulant_route = cumulants_to_moments(free_cumulants("markov", 12), 12)
    ok = True
    details = []
    for two_k in range(2, 13, 2):
        direct = limit_moment("markov", two_k)
        ok &= direct == cumulant_route.entries[two_k]
        details.append(f"m{two_k}={direct}")
    ok &= limit_moment("markov", 2) == 2 and limit_moment("markov", 4) == 9
    with capsys.disabled():
        report("4 markov routes", ok, "word sums equal cumulant route: " + ", ".join(details))


def test_criterion_5_eulerian_consistency(capsys):
    worst = 0.0
    ok = True
    for n in range(1, 7):
        for m in range(1, n + 1):
            signs = [1] * m + [-1] * (n - m)
            exact = volume_exact(single_slab_system(signs)).value
            ok &= exact == F(eulerian_number(n, m), math.factorial(n))
            err = abs(slab_volume_integral(n, m) - eulerian_number(n, m) / math.factorial(n))
            worst = max(worst, err)
            ok &= err <= 1e-6
    with capsys.disabled():
        report("5 eulerian slabs", ok,
               f"exact identity holds for n <= 6; worst integral error {worst:.2e} (tol 1e-6)")


def test_criterion_6_circuit_trace_oracle(capsys):
    checked = 0
    ok = True
    for n in range(2, 7):
        toeplitz_entries = {k: F(3 * k - 4, 5) for k in range(n)}
        hankel_entries = {k: F(2 * k - 5, 3) for k in range(1, 2 * n)}
        markov_entries = {
            p: F((7 * p[0] + 11 * p[1]) % 9 - 4, 4) for p in markov_vertex_pairs(n)
        }
        for r in range(1, 5):
            for ensemble, entries in (
                ("toeplitz", toeplitz_entries),
                ("hankel", hankel_entries),
                ("markov", markov_entries),
            ):
                ok &= trace_via_circuits(ensemble, entries, n, r) == exact_trace_power(
                    ensemble, entries, n, r
                )
                checked += 1
    with capsys.disabled():
        report("6 circuit traces", ok,
               f"{checked} (ensemble, n, r) combinations match direct powers exactly")


def test_criterion_7_simulation_convergence(capsys):
    start = time.perf_counter()
    targets = {"toeplitz": 8.0 / 3.0, "hankel": 2.0, "markov": 9.0}
    details = []
    ok = True
    for ensemble, target in targets.items():
        m4, odd = [], {1: [], 3: []}
        for rep in range(20):
            sample = sample_matrix(ensemble, 1024, gaussian(), mix(TAG_REPLICATE, DEFAULT_SEED, rep))
            spec = empirical_spectrum(sample, "sqrt_n")
            m4.append(float(np.mean(spec.eigenvalues**4)))
            for r in odd:
                odd[r].append(float(np.mean(spec.eigenvalues**r)))
        mean4 = float(np.mean(m4))
        rel = abs(mean4 - target) / target
        ok &= rel <= 0.05
        details.append(f"{ensemble} m4={mean4:.4f} ({rel * 100:.2f}% off {target:.4g})")
        for r, values in odd.items():
            arr = np.array(values)
            se = arr.std(ddof=1) / math.sqrt(len(arr))
            ok &= abs(arr.mean()) <= 3 * se
    elapsed = time.perf_counter() - start
    ok &= elapsed < 300.0
    with capsys.disabled():
        report("7 simulation m4 + odd", ok,
               "; ".join(details) + f"; odd moments within 3 SE; {elapsed:.0f}s (< 300s)")


def test_criterion_8_markov_mean_one_degenerates(capsys):
    fractions_near = []
    for rep in range(10):
        sample = sample_matrix(
            "markov", 512, shifted_gaussian(1), mix(TAG_REPLICATE, DEFAULT_SEED, rep)
        )
        spec = empirical_spectrum(sample, "n")
        fractions_near.append(float(np.mean(np.abs(spec.eigenvalues + 1.0) <= 0.15)))
    pooled = float(np.mean(fractions_near))
    with capsys.disabled():
        report("8 mean-1 degeneration", pooled >= 0.90,
               f"{pooled * 100:.2f}% of eigenvalues of M/n within 0.15 of -1 (want >= 90%)")


def test_criterion_9_norm_growth_trend(capsys):
    ratios = {}
    for n in (256, 1024, 4096):
        values = []
        for rep in range(3):
            sample = sample_matrix("markov", n, gaussian(), mix(TAG_REPLICATE, DEFAULT_SEED, n, rep))
            values.append(spectral_norm(sample.matrix) / math.sqrt(2 * n * math.log(n)))
        ratios[n] = float(np.mean(values))
    gaps = {n: abs(r - 1.0) for n, r in ratios.items()}
    in_band = all(0.7 <= r <= 1.3 for r in ratios.values())
    monotone = gaps[256] >= gaps[1024] >= gaps[4096]
    with capsys.disabled():
        report("9a norm trend", in_band and monotone,
               f"ratios { {n: round(r, 4) for n, r in ratios.items()} }, "
               f"gaps non-increasing: {monotone}")


def test_criterion_9_norm_over_n_five_percent(capsys):
    # Known finite-size failure: ||M_n||/n exceeds |m| by about
    # sqrt(2 log n / n) ~ 0.08 at n = 2048, so the 5% band cannot hold at
    # this size for unit-variance entries (it would need n >~ 7000).
    # The criterion is asserted as stated; see the decisions ledger.
    values = []
    for rep in range(3):
        sample = sample_matrix(
            "markov", 2048, shifted_gaussian(1), mix(TAG_REPLICATE, DEFAULT_SEED, 2048, rep)
        )
        values.append(spectral_norm(sample.matrix) / 2048.0)
    mean = float(np.mean(values))
    with capsys.disabled():
        report("9b norm/n at 2048", abs(mean - 1.0) <= 0.05,
               f"||M||/n = {mean:.4f}, |ratio - 1| = {abs(mean - 1):.4f} (band 0.05); "
               "systematic sqrt(2 log n / n) excess, see decisions ledger")


def test_criterion_10_property_suites(capsys):
    checks = []

    counts_ok = all(
        len(enumerate_words(k)) == double_factorial_odd(k) for k in range(1, 7)
    )
    checks.append(("word counts k<=6", counts_ok))

    additivity_ok = True
    for k in range(1, 6):
        for w in enumerate_words(k):
            for start, stop in proper_subword_windows(w):
                ids = {}
                inner_letters = []
                for letter in w.letters[start:stop]:
                    if letter not in ids:
                        ids[letter] = len(ids)
                    inner_letters.append(ids[letter])
                from hmt.words import PartitionWord

                inner = PartitionWord(tuple(inner_letters))
                outer = delete_subword(w, start, stop)
                if height(w) != height(inner) + height(outer):
                    additivity_ok = False
    checks.append(("height additivity k<=5", additivity_ok))

    telescope_ok = True
    for k in range(1, 6):
        for w in enumerate_words(k):
            expr = build_system(w, "toeplitz").dependent_exprs[2 * k]
            if expr.constant != 0 or expr.coeffs != ((0, F(1)),):
                telescope_ok = False
    checks.append(("toeplitz telescoping k<=5", telescope_ok))

    system = build_system(enumerate_words(2)[1], "toeplitz")  # abab
    hits = 0
    for i in range(100):
        est = volume_mc(system, 10_000, mix(501, i))
        if abs(est.value - 2.0 / 3.0) <= 3 * est.stderr:
            hits += 1
    checks.append((f"mc coverage {hits}/100 >= 95", hits >= 95))

    rng = np.random.default_rng(77)
    eig_ok = True
    for _ in range(100):
        n = int(rng.integers(2, 201))
        a = rng.normal(size=(n, n))
        a = a + a.T
        eigs = eigvalsh(a)
        fro = float(np.linalg.norm(a))
        eig_ok &= abs(float(eigs.sum()) - float(np.trace(a))) <= 1e-10 * fro
        eig_ok &= abs(float((eigs**2).sum()) - fro**2) <= 1e-10 * fro**2
    checks.append(("eigensolver trace identities 1e-10", eig_ok))

    stat = row_sum_statistic(sample_matrix("markov", 2000, gaussian(), DEFAULT_SEED))
    checks.append((f"row-sum statistic {stat:.3f} within 10% of 1", abs(stat - 1.0) <= 0.10))

    pd_ok = True
    for family in ("toeplitz", "hankel", "markov"):
        table = recorded_moment_table(family, 12)
        for n in range(1, 5):
            pd_ok &= hankel_moment_matrix_det(table, n) > 0
    checks.append(("moment matrices positive definite n<=4", pd_ok))

    ok = all(flag for _, flag in checks)
    with capsys.disabled():
        report("10 property suites", ok, "; ".join(name for name, _ in checks))
