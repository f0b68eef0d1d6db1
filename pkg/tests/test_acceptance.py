"""Acceptance suite: every criterion at its stated tolerance.

The heavy Monte Carlo criteria are asserted from the TestReports of a
full desk-preset run (the harness consumes only reports); the
deterministic criteria are additionally recomputed directly against the
library.  The desk run is executed twice into the same directory to
check byte-level reproducibility of the data files.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion.
"""

import math
import time

import pytest

from erwlab import cli, coeff, oracle

SEED = cli.DEFAULT_SEED


@pytest.fixture(scope="module")
def desk(tmp_path_factory):
    out = tmp_path_factory.mktemp("acceptance") / "desk"
    argv = ["test", "--experiment", "all", "--preset", "desk",
            "--seed", str(SEED), "--out-dir", str(out)]
    t0 = time.perf_counter()
    rc1 = cli.main(argv)
    t1 = time.perf_counter()
    snapshot = {f.name: f.read_bytes() for f in out.iterdir() if f.suffix != ".txt"}
    rc2 = cli.main(argv)
    reports = {r.name: r for r in cli.load_reports(out)}
    print(f"\n[desk preset: {t1 - t0:.0f}s per run, {len(reports)} reports]")
    return {"out": out, "rc1": rc1, "rc2": rc2, "snapshot": snapshot,
            "reports": reports}


def _get(desk, name):
    rep = desk["reports"].get(name)
    assert rep is not None, f"missing report {name}"
    return rep


def _criterion(cid, label, reps, extra=""):
    ok = all(r.passed for r in reps)
    detail = "; ".join(f"{r.name}={r.observed:.6g}" for r in reps)
    print(f"ACCEPTANCE {cid} {label}: {'PASS' if ok else 'FAIL'} ({detail}){extra}")
    return ok


def test_c01_martingale_identity(desk):
    reps = [_get(desk, f"oracle.mart_identity.p{p}_q{q}")
            for p in (0.3, 0.75, 0.9) for q in (0.5, 0.7)]
    t0 = time.perf_counter()
    for p in (0.3, 0.75, 0.9):
        tab = coeff.build_coeffs(p, 512)
        for q in (0.5, 0.7):
            assert oracle.martingale_identity_error(p, q, 512, tab) <= 1e-10
    dt = time.perf_counter() - t0
    assert _criterion("C1", "exact martingale identity", reps,
                      extra=f" [direct recompute {dt:.2f}s]")


def test_c02_second_moment_asymptotics(desk):
    reps = [_get(desk, f"oracle.second_moment.{k}")
            for k in ("diffusive", "critical", "superdiffusive")]
    m2 = oracle.exact_moment(oracle.exact_law(0.3, 0.5, 4096), 2)
    assert 0.98 <= m2 * 1.8 / 4096 <= 1.02
    m2 = oracle.exact_moment(oracle.exact_law(0.75, 0.5, 20_000), 2)
    assert 0.85 <= m2 / (20_000 * math.log(20_000)) <= 1.15
    m2 = oracle.exact_moment(oracle.exact_law(0.9, 0.5, 4096), 2)
    assert 0.90 <= m2 * 0.6 * coeff.gamma(1.6) / 4096**1.6 <= 1.10
    assert _criterion("C2", "growth-rate second moments", reps)


def test_c03_simulator_equivalence(desk):
    reps = [_get(desk, f"mode_equiv.tv.{mode}.p{p}_q{q}")
            for p, q in ((0.3, 0.7), (0.75, 0.5), (0.9, 0.2))
            for mode in ("history", "markov")]
    assert all(r.target == 0.01 for r in reps)
    assert _criterion("C3", "history/markov vs exact law (TV<=0.01)", reps)


def test_c04_diffusive_clt(desk):
    rep = _get(desk, "clt_diffusive.ks")
    assert rep.target == 0.02 and rep.n_samples == 200_000
    assert _criterion("C4", "diffusive CLT (KS vs N(0,1/1.8))", [rep])


def test_c05_superdiffusive_fclt_marginal(desk):
    var = _get(desk, "fclt_superdiffusive.var_t1")
    ks = _get(desk, "fclt_superdiffusive.ks_t1")
    target = (1.0 - 2.0 ** (-0.6)) / 0.6
    assert var.target == pytest.approx(target, rel=1e-12)
    assert var.tolerance == pytest.approx(0.05 * target, rel=1e-12)
    assert ks.target == 0.02
    assert _criterion("C5", "superdiffusive FCLT marginal at t=1", [var, ks])


def test_c06_critical_fclt_marginal(desk):
    reps = [_get(desk, "fclt_critical.var_t1.0"), _get(desk, "fclt_critical.var_t1.5")]
    for rep, t in zip(reps, (1.0, 1.5)):
        assert rep.target == t and rep.tolerance == pytest.approx(0.15 * t)
        assert rep.n_samples == 20_000
    assert _criterion("C6", "critical FCLT variance vs t (15%)", reps)


def test_c07_covariance_kernels(desk):
    walk_cov = _get(desk, "joint_cov.walk_cov_05_10")
    assert walk_cov.target == pytest.approx(0.5**1.4 / 1.8, rel=1e-12)
    shared = _get(desk, "joint_cov.shared_w_cross_11")
    assert shared.target == pytest.approx(1.0 / 1.8, rel=1e-12)
    # the walk's own joint coupling has vanishing cross-covariance at
    # (1,1) (martingale orthogonality); recorded alongside, not gated
    walk_cross = float(shared.metadata["walk_cross_cov_11"])
    assert abs(walk_cross) <= 0.02
    assert _criterion("C7", "covariance kernels (walk + shared-W joint)",
                      [walk_cov, shared],
                      extra=f" [ungated walk cross-cov {walk_cross:.2e}]")


def test_c08_stable_independence(desk):
    rep = _get(desk, "stable_indep.corr")
    assert rep.n_samples == 100_000
    assert rep.target == pytest.approx(2.58 / math.sqrt(100_000) + 0.01, rel=1e-9)
    control = _get(desk, "stable_indep.negative_control")
    assert control.observed == pytest.approx(1.0, abs=1e-9)
    assert _criterion("C8", "fluctuation independent of a.s. limit", [rep, control])


def test_c09_conditions_a_and_b(desk):
    v = _get(desk, "cond_a.V_t1.n10000")
    target = 1.0 - 2.0 ** (-0.6)
    assert v.target == pytest.approx(target, rel=1e-12)
    assert v.tolerance == pytest.approx(0.05 * target, rel=1e-12)
    lb = _get(desk, "cond_b.lindeberg_scaled.n100000")
    asym = 16 * 0.6**2 / (0.1**2 * 2.2)
    assert lb.target == pytest.approx(asym, rel=1e-12)
    assert lb.tolerance == pytest.approx(0.25 * asym, rel=1e-12)
    trend = [_get(desk, f"cond_a.trend_t{t}") for t in (0.5, 1.0, 2.0)]
    assert _criterion("C9", "FCLT conditions (a) and (b)", [v, lb] + trend)


def test_c10_deterministic_gap_checks(desk):
    reps = [_get(desk, f"coeff.ratio_gap_scaled.n{n}") for n in (1_000, 10_000)]
    reps += [_get(desk, f"coeff.clock_gap.n{n}") for n in (100, 10_000)]
    t0 = time.perf_counter()
    base = 100 * coeff.ratio_gap(0.9, 100, 2.0)
    for n in (1_000, 10_000):
        assert n * coeff.ratio_gap(0.9, n, 2.0) <= 1.5 * base
    for n in (100, 10_000):
        bound = max(math.log(2) / math.log(n), abs(math.log(1 - n**-2.0)) / math.log(n))
        assert coeff.log_clock_gap(n, 2.0) <= bound + 1e-12
    dt = time.perf_counter() - t0
    assert _criterion("C10", "a-ratio and log-clock gap bounds", reps,
                      extra=f" [direct recompute {dt:.2f}s]")


def test_c11_byte_identical_rerun(desk):
    assert desk["rc1"] == 0, "first desk run reported failures"
    assert desk["rc2"] == 0, "second desk run reported failures"
    out = desk["out"]
    current = {f.name: f.read_bytes() for f in out.iterdir() if f.suffix != ".txt"}
    assert set(current) == set(desk["snapshot"])
    diffs = [name for name, blob in current.items() if blob != desk["snapshot"][name]]
    ok = not diffs
    print(f"ACCEPTANCE C11 byte-identical rerun: {'PASS' if ok else 'FAIL'} "
          f"({len(current)} data files compared{'' if ok else ', diffs: ' + str(diffs)})")
    assert ok


def test_all_reports_green(desk):
    bad = [r.name for r in desk["reports"].values() if not r.passed]
    assert not bad, f"failing desk reports: {bad}"
