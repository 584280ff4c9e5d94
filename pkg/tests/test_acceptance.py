"""The nine acceptance criteria, each at its stated tolerance.

Each test prints one ``criterion k: PASS/FAIL`` line; the same lines are
repeated in the terminal summary.  Run alone with
``pytest tests/test_acceptance.py -v``.
"""
import functools
import subprocess
import sys
import time
from fractions import Fraction as F
from pathlib import Path

import numpy as np

from tropicount import fixtures as fx
from tropicount import geometry as geo
from tropicount.counting import count_affine_pieces, count_boundary_pieces
from tropicount.network import net_eval, random_network
from tropicount.oracle import oracle_counts
from tropicount.training import moving_average, run_preset
from tropicount.tropical import dcpa_eval, dcpa_extract, dcpa_layers

SEEDS = range(5)
TREND_STRIDE = 500
TREND_WINDOW = 5


def test_criterion_1_five_function_reduction(criterion):
    t = time.perf_counter()
    reduced = geo.upper_hull_vertices(geo.PointSet(fx.FIVE_FUNCTIONS))
    elapsed = time.perf_counter() - t
    want = geo.PointSet([(-1, 3), (F(1, 2), 0), (1, -2)])
    ok = reduced == want and elapsed < 1
    assert criterion(1, ok, f"U* = {{{', '.join(f'({a}, {b})' for a, b in reduced)}}} in {elapsed:.3f}s")


def _layer_sets():
    states = dcpa_layers(fx.two_layer_network())
    return {"N1": states[1].N, "P1": states[1].P, "N2": states[2].N, "P2": states[2].P}


def test_criterion_2_two_layer_recursion(criterion):
    t = time.perf_counter()
    got = _layer_sets()
    elapsed = time.perf_counter() - t
    reference = fx.layer_sets(fx.TWO_LAYER_REFERENCE)
    wrong = [f"{k}[{i}]" for k in ("N1", "P1", "N2", "P2")
             for i, (a, b) in enumerate(zip(got[k], reference[k])) if not geo.same_function(a, b)]
    ok = not wrong and elapsed < 1
    detail = "all reference sets reproduced" if not wrong else f"differs from the reference sets at {', '.join(wrong)}"
    assert criterion(2, ok, f"{detail} ({elapsed:.3f}s)")


def test_two_layer_recursion_matches_corrected_sets():
    got = _layer_sets()
    want = fx.layer_sets(fx.TWO_LAYER_CORRECTED)
    for k in want:
        assert all(geo.same_function(a, b) for a, b in zip(got[k], want[k]))


def test_criterion_3_golden_counts(criterion):
    t = time.perf_counter()
    got = []
    for ex in (fx.DCPA_1D, fx.DCPA_2D):
        f = fx.dcpa(ex)
        got.append((count_boundary_pieces(f).boundary_piece_count, count_affine_pieces(f)))
    elapsed = time.perf_counter() - t
    ok = got == [fx.DCPA_1D_COUNTS, fx.DCPA_2D_COUNTS] and elapsed < 1
    assert criterion(3, ok, f"1D (boundary, affine) = {got[0]}, 2D = {got[1]} in {elapsed:.3f}s")


def test_criterion_4_representation_soundness(criterion):
    t = time.perf_counter()
    rng = np.random.default_rng(4)
    bad = 0
    for _ in range(50):
        net = random_network([2, 5, 5, 1], rng, denom=64)
        f = dcpa_extract(net)
        pts = rng.integers(-4096, 4097, (1000, 2))
        for a, b in pts.tolist():
            x = (F(a, 512), F(b, 512))
            bad += dcpa_eval(f, x) != net_eval(net, x)
    elapsed = time.perf_counter() - t
    ok = bad == 0 and elapsed < 120
    assert criterion(4, ok, f"{bad} discrepancies over 50 nets x 1000 points in {elapsed:.1f}s")


def test_criterion_5_oracle_equivalence(criterion):
    t = time.perf_counter()
    rng = np.random.default_rng(5)
    rows = []
    for k in range(50):
        widths = (2, int(rng.integers(3, 7)), int(rng.integers(3, 7)), 1)
        net = random_network(widths, rng)
        f = dcpa_extract(net)
        mine = (count_boundary_pieces(f).boundary_piece_count, count_affine_pieces(f))
        rows.append((k, widths, mine, oracle_counts(net)))
    elapsed = time.perf_counter() - t
    mism = [r for r in rows if r[2] != r[3]]
    for k, w, mine, orc in mism:
        print(f"  net {k} {'-'.join(map(str, w))}: (boundary, affine) = {mine}, oracle {orc}")
    ok = not mism and elapsed < 600
    assert criterion(5, ok, f"{50 - len(mism)}/50 exact matches "
                            f"({sum(r[2][0] != r[3][0] for r in rows)} boundary, "
                            f"{sum(r[2][1] != r[3][1] for r in rows)} affine mismatches) in {elapsed:.0f}s")


@functools.cache
def spiral_run(regime: str, seed: int):
    """Final record of a spiral preset run; CE runs also keep a full trend for criterion 8."""
    if regime == "ce":
        hist, *_ = run_preset("spiral", regime, seed, count="all", stride=TREND_STRIDE)
    else:
        hist, *_ = run_preset("spiral", regime, seed, count="last")
    return [rec for _, rec in hist]


def test_criterion_6_spiral_experiment(criterion):
    t = time.perf_counter()
    final = {r: [spiral_run(r, s)[-1] for s in SEEDS] for r in ("ce", "noisy", "adv")}
    elapsed = time.perf_counter() - t
    mb = {r: float(np.mean([x.boundary for x in v])) for r, v in final.items()}
    acc = {r: float(np.mean([x.test_acc for x in v])) for r, v in final.items()}
    fn = {r: float(np.mean([x.fnorm for x in v])) for r, v in final.items()}
    for r, v in final.items():
        print(f"  {r}: boundary {[x.boundary for x in v]}, total {[x.total for x in v]}, "
              f"test acc {[round(x.test_acc, 2) for x in v]}, F-norm {[round(x.fnorm) for x in v]}")
    parts = {
        "a": mb["adv"] < mb["noisy"] < mb["ce"],
        "b": 250 <= mb["ce"] <= 500 and 150 <= mb["adv"] <= 350,
        "c": acc["adv"] >= 97 and acc["noisy"] >= 97,
        "d": fn["adv"] > fn["ce"],
        "runtime": elapsed <= 3600,
    }
    detail = (f"mean #Boundary ce {mb['ce']:.1f}, noisy {mb['noisy']:.1f}, adv {mb['adv']:.1f}; "
              f"test acc noisy {acc['noisy']:.2f}, adv {acc['adv']:.2f}; F-norm ce {fn['ce']:.0f}, adv {fn['adv']:.0f}; "
              + " ".join(f"({k}) {'ok' if v else 'FAIL'}" for k, v in parts.items()) + f"; {elapsed:.0f}s")
    assert criterion(6, all(parts.values()), detail)


def test_criterion_7_gaussian_experiment(criterion):
    t = time.perf_counter()
    runs = {r: [[rec for _, rec in run_preset("gaussian", r, s, count="last")[0]] for s in SEEDS]
            for r in ("ce", "noisy", "adv")}
    elapsed = time.perf_counter() - t
    train_acc = {r: [h[-1].train_acc for h in v] for r, v in runs.items()}
    ce_b = float(np.mean([h[-1].boundary for h in runs["ce"]]))
    init_fn = float(np.mean([h[0].fnorm for h in runs["ce"]]))
    parts = {
        "all reach 100% train": all(a == 100.0 for v in train_acc.values() for a in v),
        "CE #Boundary in [25, 65]": 25 <= ce_b <= 65,
        "initial F-norm in [5.5, 8.5]": 5.5 <= init_fn <= 8.5,
        "runtime <= 15 min": elapsed <= 900,
    }
    print(f"  train acc {train_acc}; CE boundary {[h[-1].boundary for h in runs['ce']]}")
    detail = (f"CE mean #Boundary {ce_b:.1f}, initial F-norm {init_fn:.2f}, min train acc "
              f"{min(min(v) for v in train_acc.values()):.2f}; "
              + ", ".join(f"{k}: {'ok' if v else 'FAIL'}" for k, v in parts.items()) + f"; {elapsed:.0f}s")
    assert criterion(7, all(parts.values()), detail)


def test_criterion_8_trend_order(criterion):
    orders = []
    for s in SEEDS:
        recs = spiral_run("ce", s)
        its = [r.iteration for r in recs]
        peak = {k: its[int(np.argmax(moving_average([getattr(r, k) for r in recs], TREND_WINDOW)))]
                for k in ("fnorm", "total", "boundary")}
        orders.append(peak)
        print(f"  seed {s}: argmax F-norm {peak['fnorm']}, #Total {peak['total']}, #Boundary {peak['boundary']}")
    good = sum(p["fnorm"] <= p["total"] <= p["boundary"] for p in orders)
    assert criterion(8, good >= 4, f"{good}/5 seeds with argmax F-norm <= #Total <= #Boundary "
                                   f"(stride {TREND_STRIDE}, window {TREND_WINDOW})")


def test_criterion_9_property_suites(criterion):
    suite = Path(__file__).with_name("test_geometry_properties.py")
    t = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(suite)],
                          capture_output=True, text=True, cwd=suite.parent)
    elapsed = time.perf_counter() - t
    last = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    ok = proc.returncode == 0 and elapsed < 300
    assert criterion(9, ok, f"{last} ({elapsed:.0f}s)")
