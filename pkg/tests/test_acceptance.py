"""Acceptance criteria. Each test prints one PASS/FAIL line (use ``pytest -s``)."""
import csv
import math
import random
import time
from pathlib import Path

import numpy as np
import pytest

from incsp.apsp import IncAPSP
from incsp.cli import BENCH_COLUMNS, bench
from incsp.dense import DenseAPSP
from incsp.graph import generate_random_sequence
from incsp.instance import Instance
from incsp.offline import OfflineSSSP
from incsp.oracle import (
    adaptive_adversary,
    check_certified,
    exact_sssp,
    floyd_warshall,
    verify_apsp,
    version_distances,
)
from incsp.propagate import relaxedness_violations, slack_violations
from incsp.sssp import SourceSSSP, default_xi

INF = math.inf
VERDICTS: list[str] = []  # echoed in the terminal summary by conftest
BENCH_DIR = Path(__file__).resolve().parent.parent / "bench"


def verdict(number, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    VERDICTS.append(line)
    print("\n" + line)
    assert ok, detail


# criteria 1-4 share one set of source-insertion runs ------------------------

SSSP_CONFIGS = [
    (n, W, eps, seed)
    for seed, (n, W, eps) in enumerate(
        (n, W, eps) for n in (32, 64, 128) for W in (10, 256) for eps in (0.1, 0.5)
    )
] + [(n, 256, 0.1, 12 + i) for i, n in enumerate((32, 64, 128, 32, 64, 128, 64, 128))]


@pytest.fixture(scope="module")
def sssp_runs():
    start = time.perf_counter()
    out = {"sandwich": 0, "checked": 0, "worst": 1.0, "relax_bad": 0, "pd_calls": 0,
           "rank_bad": 0, "syncs": 0, "drop_bad": 0, "inc_bad": 0, "pop_bad": 0, "pop_slack": INF}
    for n, W, eps, seed in SSSP_CONFIGS:
        m0, delta = 3 * n, 4 * n  # 7n real edges at the end
        g, ups = generate_random_sequence(n, m0, W, delta, seed, source=0)
        truth = g.copy()
        m = n + m0 + delta
        ds = SourceSSSP(g, 0, default_xi(eps, m), W=W)

        def on_propagate(touched, ds=ds):
            out["pd_calls"] += 1
            out["relax_bad"] += len(relaxedness_violations(ds.view, ds.d, touched))

        def on_synchronize(ds=ds):
            out["syncs"] += 1
            recount = [sum(ds.view.degree(v) for v in c) for c in ds.classes]
            suffix = [sum(recount[k + 1:]) for k in range(len(recount))]
            ok = (recount == ds.class_degree and ds.r <= math.log2(ds.m)
                  and all(recount[k] > suffix[k] for k in range(ds.r + 1)))
            out["rank_bad"] += not ok

        ds.on_propagate = on_propagate
        ds.on_synchronize = on_synchronize
        for upd in ups:
            truth.apply_update(upd)
            ds.source_insert(upd.head, upd.weight)
            dist = exact_sssp(truth, 0)
            for v in range(n):
                out["checked"] += 1
                if dist[v] == INF:
                    bad = ds.d[v] != INF
                else:
                    bad = not dist[v] <= ds.d[v] <= (1 + eps) * dist[v]
                    if dist[v] > 0:
                        out["worst"] = max(out["worst"], ds.d[v] / dist[v])
                out["sandwich"] += bad
            out["sandwich"] += len(slack_violations(ds.view, ds.d, ds.xi))
        ell = math.ceil(math.log(n * W) / math.log1p(ds.xi))
        for v in range(n):
            out["drop_bad"] += ds.est.drop_count[v] > ell
            out["inc_bad"] += ds.rank_increases[v] > ds.est.drop_count[v]
        pop_limit = 4 * (n * ell + ds.sync_inputs)
        out["pop_bad"] += ds.stats.pops > pop_limit
        out["pop_slack"] = min(out["pop_slack"], pop_limit / max(ds.stats.pops, 1))
    out["seconds"] = time.perf_counter() - start
    return out


def test_criterion_1_sssp_sandwich(sssp_runs):
    r = sssp_runs
    ok = r["sandwich"] == 0 and r["seconds"] < 120 and len(SSSP_CONFIGS) == 20
    verdict(1, ok, f"{len(SSSP_CONFIGS)} instances, {r['checked']} vertex checks, "
                   f"{r['sandwich']} violations, worst ratio {r['worst']:.4f}, {r['seconds']:.1f}s")


def test_criterion_2_relaxedness(sssp_runs):
    r = sssp_runs
    verdict(2, r["relax_bad"] == 0 and r["pd_calls"] > 0,
            f"{r['pd_calls']} propagation calls, {r['relax_bad']} unrelaxed edges inside touched sets")


def test_criterion_3_rank_bound(sssp_runs):
    r = sssp_runs
    verdict(3, r["rank_bad"] == 0 and r["syncs"] > 0,
            f"{r['syncs']} synchronize completions, {r['rank_bad']} rank-bound violations")


def test_criterion_4_work_accounting(sssp_runs):
    r = sssp_runs
    ok = r["drop_bad"] == r["inc_bad"] == r["pop_bad"] == 0
    verdict(4, ok, f"drop-count violations {r['drop_bad']}, rank-increase violations {r['inc_bad']}, "
                   f"pop-budget violations {r['pop_bad']} (tightest budget/pops {r['pop_slack']:.1f}x)")


# criteria 5 and 6: APSP runs ------------------------------------------------

APSP_CONFIGS = [(16 if i % 2 == 0 else 32, 300 + 30 * i, 100 + i) for i in range(10)]


@pytest.fixture(scope="module")
def apsp_runs():
    start = time.perf_counter()
    out = {"failures": [], "checks": 0, "worst": 1.0, "resets": 0, "reset_bad": 0}
    orig_reset = IncAPSP.reset_all

    # criterion 5: certify every structure right after each deterministic reset
    def reset_all(self):
        orig_reset(self)
        if self.variant == "det":
            out["resets"] += 1
            out["reset_bad"] += not all(check_certified(ds, 0) for ds in self.D + self.DR)

    IncAPSP.reset_all = reset_all
    try:
        for variant in ("det", "rand"):
            for n, delta, seed in APSP_CONFIGS:
                g, ups = generate_random_sequence(n, 2 * n, 100, delta, seed)
                rep = verify_apsp(g, ups, 0.5, variant=variant, seed=seed, check_every=1)
                sandwich = [c.observed for c in rep.checks if c.check == "apsp.sandwich"]
                out["checks"] += len(sandwich)
                out["worst"] = max([out["worst"]] + sandwich)
                if not rep.ok:
                    out["failures"].append((variant, n, seed, rep.first_failure))
    finally:
        IncAPSP.reset_all = orig_reset
    adv_checks = 0
    for seed in range(20):
        g, _ = generate_random_sequence(32, 64, 100, 0, 500 + seed)
        x = IncAPSP(g, 0.5, variant="rand", seed=seed, m_hint=64 + 100)
        rep = adaptive_adversary(x, 100, seed)
        adv_checks += len(rep.checks)
        out["worst"] = max([out["worst"]] + [c.observed for c in rep.checks])
        if not rep.ok:
            out["failures"].append(("adversary", 32, seed, rep.first_failure))
    out["adv_checks"] = adv_checks
    out["seconds"] = time.perf_counter() - start
    return out


def test_criterion_5_deterministic_reset(apsp_runs):
    r = apsp_runs
    verdict(5, r["reset_bad"] == 0 and r["resets"] > 0,
            f"{r['resets']} deterministic resets, {r['reset_bad']} with an uncertified structure")


def test_criterion_6_apsp_sandwich(apsp_runs):
    r = apsp_runs
    ok = not r["failures"] and r["seconds"] < 600 and r["adv_checks"] == 2000
    first = r["failures"][0] if r["failures"] else None
    verdict(6, ok, f"{r['checks']} per-update all-pairs checks over both variants, {r['adv_checks']} adversary "
                   f"rounds, worst ratio {r['worst']:.4f}, {r['seconds']:.1f}s, first failure {first}")


# criterion 7 -------------------------------------------------------------------

def test_criterion_7_randomized_reset():
    passed = before = trials = 0
    lam_used = set()
    for inst in range(5):
        g, ups = generate_random_sequence(32, 64, 100, 300, 700 + inst)
        x = IncAPSP(g, 0.5, variant="rand", seed=inst, m_hint=64 + 300)
        # stop right before the structures would be reset, when offsets are largest
        for upd in ups:
            x.update(upd)
        rng = random.Random(inst)
        for j, ds in enumerate(rng.sample(x.D + x.DR, 20)):
            lam = min(x.rho_star, ds.ell)
            lam_used.add(lam)
            before += check_certified(ds, lam)
            ds.rand_reset(lam, np.random.default_rng([inst, j]))
            passed += check_certified(ds, lam)
            trials += 1
    verdict(7, trials == 100 and passed >= 90,
            f"{passed}/{trials} certified after reset (lambda {sorted(lam_used)}; {before} already were before)")


# criterion 8 -------------------------------------------------------------------

OFFLINE_CONFIGS = [
    (64, 300, 0.1), (64, 300, 0.5), (64, 1000, 0.1), (64, 1000, 0.5), (128, 300, 0.1),
    (128, 300, 0.5), (128, 1000, 0.1), (128, 1000, 0.5), (64, 1000, 0.1), (128, 1000, 0.1),
]


def test_criterion_8_offline():
    W = 100
    bad = queries = 0
    cost_bad = size_bad = 0
    worst = 1.0
    peak = (0, 0.0)
    for i, (n, delta, eps) in enumerate(OFFLINE_CONFIGS):
        g, ups = generate_random_sequence(n, 3 * n, W, delta, 800 + i)
        o = OfflineSSSP.build(g, ups, eps)
        dists = version_distances(g, ups, 0)
        rng = random.Random(i)
        for _ in range(1000):
            v, j = rng.randrange(n), rng.randint(0, delta)
            est, dist = o.query(v, j), dists[j][v]
            queries += 1
            if dist == INF:
                bad += est != INF
            else:
                bad += not dist <= est <= (1 + eps) * dist
                if dist > 0:
                    worst = max(worst, est / dist)
        bound = (1 + math.log(n * W) / math.log1p(o.xi)) * math.log2(delta)
        cost_bad += sum(c > bound for c in o.costly)
        size_bad += sum(o.D.size(v) > bound + 2 for v in range(n))
        top = max(o.D.size(v) for v in range(n))
        if top / bound > peak[1]:
            peak = (top, top / bound)
    ok = bad == cost_bad == size_bad == 0
    verdict(8, ok, f"{queries} queries, {bad} outside (1+eps), worst ratio {worst:.4f}; costly-call violations "
                   f"{cost_bad}, size violations {size_bad} (largest collection {peak[0]} = {peak[1]:.3f} of bound)")


# criterion 9 -------------------------------------------------------------------

def test_criterion_9_dense():
    bad_exact = bad_approx = 0
    xi = 0.1
    for seed in range(50):
        rng = random.Random(900 + seed)
        a = DenseAPSP(16, xi)
        offered = []
        for _ in range(200):
            u, v = rng.sample(range(16), 2)
            w = float(rng.randint(0, 100))
            offered.append((u, v, w))
            a.update(u, v, w)
        accepted = [(u, v, a.accepted[u, v]) for u in range(16) for v in range(16) if a.accepted[u, v] < INF]
        bad_exact += not np.array_equal(a.est, floyd_warshall(16, accepted))
        exact = floyd_warshall(16, offered)
        fin = np.isfinite(exact)
        bad_approx += not (np.array_equal(fin, np.isfinite(a.est))
                           and np.all(exact[fin] <= a.est[fin])
                           and np.all(a.est[fin] <= (1 + xi) ** 2 * exact[fin]))
    verdict(9, bad_exact == bad_approx == 0,
            f"50 runs x 200 updates: {bad_exact} mismatches with Floyd-Warshall of accepted weights, "
            f"{bad_approx} outside (1+xi)^2 of unfiltered weights")


# criterion 10 ------------------------------------------------------------------

def test_criterion_10_scaling():
    BENCH_DIR.mkdir(exist_ok=True)
    path = BENCH_DIR / "scaling.csv"
    # single runs swing by about 40%, so each size aggregates five seeded workloads
    totals, rows = [], []
    for e in range(10, 15):
        m = 2**e
        n = delta = m // 8
        total = 0
        for seed in range(5):
            g, ups = generate_random_sequence(n, m - n - delta, 100, delta, 1000 * e + seed, source=0)
            inst = Instance(n, g.snapshot(), list(ups))
            run = bench("sssp", inst, 0.5, every=delta // 4)
            rows += [{"m": m, "seed": seed, **row} for row in run]
            total += run[-1]["queue_pops"]
        totals.append(total)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=["m", "seed"] + BENCH_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    growth = [b / a for a, b in zip(totals, totals[1:])]
    verdict(10, all(x <= 4 for x in growth),
            f"queue pops summed over 5 seeds {totals}, growth per doubling {[round(x, 2) for x in growth]}, CSV at {path}")
