"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line (visible with
``-s`` or in the captured output of ``pytest -v -rA``).
"""

import itertools
import math
import shutil
import time
from collections import Counter

import numpy as np
import pytest

from ptrclones.cfront import NodeKind, parse_translation_unit
from ptrclones.clonedet import (
    CloneConfig,
    FeatureVector,
    all_pairs,
    cluster_exact,
    cluster_lsh,
    distance_threshold,
    euclidean,
    threshold_from_sizes,
    tree_similarity,
    vectorize_kinds,
)
from ptrclones.feedback import apply_false_positive
from ptrclones.lcs import LcsDiff
from ptrclones.ptranalysis import pointer_related_vars, select_pointers
from ptrclones.pipeline import RunConfig, detect, load_benchmarks, loop, run_loop_cmd
from ptrclones.verifier import brute_force_equiv, check_equivalence, simplify, verify_fragments

from conftest import FIXTURES, load_fragment
from corpora import random_constraint_pair, vector_corpus, write_feedback_corpus
from test_slicer import SLICING, isolate_labeled


@pytest.fixture
def announce(capsys):
    def emit(n: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def test_criterion_1_worked_feedback_example(announce):
    t0 = time.perf_counter()
    a = FeatureVector(np.array([7, 2, 2, 2, 0, 1, 1, 1, 1]), 0, "paper9")
    b = FeatureVector(np.array([8, 1, 1, 2, 1, 1, 1, 1, 1]), 1, "paper9")
    d0, thr0 = euclidean(a, b), distance_threshold(0.75, a, b)
    clustered = d0 <= thr0 + 1e-9 and abs(d0 - 2.0) < 1e-9 and abs(thr0 - math.sqrt(8.5)) < 1e-9
    diff = LcsDiff((), Counter([NodeKind.Constant, NodeKind.ArrayRef, NodeKind.Assignment]),
                   Counter([NodeKind.ID, NodeKind.StructRef]), (), ())
    oa, ob = apply_false_positive(a, b, diff, 0.75, 2.0)
    exact = oa.counts.tolist() == [7, 3, 3, 3, 0, 1, 1, 1, 1] and ob.counts.tolist() == [9, 1, 1, 2, 2, 1, 1, 1, 1]
    d1, thr1 = euclidean(oa, ob), distance_threshold(0.75, oa, ob)
    declustered = abs(d1 - math.sqrt(17)) < 1e-9 and abs(thr1 - math.sqrt(9.5)) < 1e-9 and d1 > thr1
    elapsed = time.perf_counter() - t0
    ok = clustered and exact and declustered and elapsed < 1.0
    announce(1, ok, f"d={d0:.3f}<=thr={thr0:.3f}, after weighting d={d1:.3f}>thr={thr1:.3f}, {elapsed:.3f}s")


def test_criterion_2_motivating_examples(announce):
    t0 = time.perf_counter()
    (fa, ra), (fb, rb) = (load_fragment("fig1/dict2pid.c", "mdef->sseq", 1),
                          load_fragment("fig1/gc_closest.c", "gs->codeword", 2))
    r1 = verify_fragments(fa, ra, fb, rb)
    (fc, rc), (fd, rd) = (load_fragment("fig3/mgau_eval.c", "active", 3),
                          load_fragment("fig3/lextree_histbin.c", "list", 4))
    r3 = verify_fragments(fc, rc, fd, rd)
    elapsed = time.perf_counter() - t0
    eq1 = r1.constraints[0] == "{i < length(mdef->sseq)} ∧ {j < length(*mdef->sseq)}"
    ok = r1.verdict == "equivalent" and eq1 and r3.verdict == "different" and elapsed < 5.0
    announce(2, ok, f"fig1 {r1.verdict} [{r1.constraints[0]}], fig3 {r3.verdict} ({r3.reason}), {elapsed:.3f}s")


def test_criterion_3_equivalence_oracle_agreement(announce):
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240501)
    agree = decided = unknown = 0
    for _ in range(1000):
        a, b, m = random_constraint_pair(rng, max_vars=3, max_atoms=4)
        verdict = check_equivalence(a, b, m, (-8, 8)).verdict
        if verdict == "unknown":
            unknown += 1
            continue
        decided += 1
        oracle = brute_force_equiv(a, b, m, (-8, 8))
        agree += verdict == ("equivalent" if oracle.equivalent else "different")
    elapsed = time.perf_counter() - t0
    ok = agree == decided and unknown / 1000 < 0.05 and elapsed < 30.0
    announce(3, ok, f"{agree}/{decided} decided agree, unknown {unknown / 10:.1f}%, {elapsed:.2f}s")


def test_criterion_4_lsh_against_exact(announce):
    t0 = time.perf_counter()
    violations = 0
    recalls = []
    for seed in range(5):
        vs = vector_corpus(seed, n=200)
        cfg = CloneConfig(similarity=0.8, min_size=1, mode="lsh", lsh_tables=8, seed=seed)
        exact = all_pairs(cluster_exact(vs, cfg))
        approx = all_pairs(cluster_lsh(vs, cfg))
        violations += len(approx - exact)
        recalls.append(len(approx & exact) / len(exact) if exact else 1.0)
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and min(recalls) >= 0.95 and elapsed < 30.0
    announce(4, ok, f"violations {violations}, min recall {min(recalls):.3f}, {elapsed:.2f}s")


def test_criterion_5_slicing_exactness(announce):
    t0 = time.perf_counter()
    mismatches = []
    for path in SLICING:
        frag, want = isolate_labeled(path)
        got = [o.line_begin for o in frag.origin]
        if got != want:
            mismatches.append(f"{path.stem}: {got} != {want}")
    # taint of one function never names another function's locals
    src = (FIXTURES / "slicing/s07_function_boundary.c").read_text()
    tu = parse_translation_unit(src, "s07.c")
    first, second = tu.functions
    rec = next(r for r in select_pointers(tu.functions) if r.name == "a" and r.owning_function == "first")
    crossed = {"j"} & set(pointer_related_vars(first, rec).vars)
    elapsed = time.perf_counter() - t0
    ok = len(SLICING) >= 10 and not mismatches and not crossed and elapsed < 5.0
    announce(5, ok, f"{len(SLICING) - len(mismatches)}/{len(SLICING)} fixtures exact, "
                    f"boundary crossings {len(crossed)}, {elapsed:.3f}s {mismatches}")


def test_criterion_6_feedback_convergence(announce, tmp_path):
    t0 = time.perf_counter()
    kinds = write_feedback_corpus(tmp_path, n_fp=10, n_tp=10)
    cfg = RunConfig(tmp_path, similarity=0.7)
    fp_total = fp_gone = tp_kept = 0
    converged = True
    monotone = True
    per_iter: list[int] = []
    for bench in load_benchmarks(cfg):
        initial = detect(bench, cfg)
        res = loop(bench, cfg)
        st = res.state
        converged &= st.converged
        elim = [row["fp_eliminated"] for row in st.log]
        monotone &= all(x >= y for x, y in zip(elim, elim[1:])) and elim[-1] == 0
        for i, x in enumerate(elim):
            per_iter += [0] * (i + 1 - len(per_iter))
            per_iter[i] += x
        pairs_before = all_pairs(initial)
        pairs_after = all_pairs(res.clusters)
        if kinds[bench.name] == "fp":
            fp_total += len(pairs_before)
            fp_gone += len(pairs_before - pairs_after)
        else:
            for a, b in pairs_before:
                if (a, b) in pairs_after and euclidean(res.vectors[a], res.vectors[b]) == 0.0:
                    tp_kept += 1
    monotone &= all(x >= y for x, y in zip(per_iter, per_iter[1:]))
    elapsed = time.perf_counter() - t0
    ok = converged and fp_total == 10 and fp_gone == 10 and tp_kept == 10 and monotone and elapsed < 60.0
    announce(6, ok, f"FP eliminated {fp_gone}/{fp_total}, TP kept at distance 0 {tp_kept}/10, "
                    f"eliminated per iteration {per_iter}, {elapsed:.2f}s")


def test_criterion_7_similarity_relaxation(announce, tmp_path):
    write_feedback_corpus(tmp_path / "synthetic")
    for sub in ("fig1", "fig3", "slicing"):
        shutil.copytree(FIXTURES / sub, tmp_path / "figs" / sub)
    series = {}
    for name in ("synthetic", "figs"):
        counts = []
        for s in (1.0, 0.9, 0.8):
            rep = run_loop_cmd(RunConfig(tmp_path / name, similarity=s, min_size=5))
            counts.append(sum(b["feedback"]["true_clone_pairs"] for b in rep["benchmarks"]))
        series[name] = counts
    ok = all(c[0] <= c[1] <= c[2] for c in series.values())
    announce(7, ok, f"true clone pairs at S=1.0/0.9/0.8: {series}")


def test_criterion_8_invariant_suites(announce, tmp_path):
    rng = np.random.default_rng(8)
    failures = []
    kinds = list(NodeKind)
    for _ in range(200):
        a = [kinds[i] for i in rng.integers(0, len(kinds), rng.integers(0, 25))]
        b = [kinds[i] for i in rng.integers(0, len(kinds), rng.integers(1, 25))]
        if (vectorize_kinds(a + b).counts != (vectorize_kinds(a) + vectorize_kinds(b)).counts).any():
            failures.append("additivity")
        if tree_similarity(a, b) != tree_similarity(b, a) or tree_similarity(b, b) != 1.0:
            failures.append("similarity symmetry/identity")
    checked = 0
    while checked < 40:
        a, _, _ = random_constraint_pair(rng, max_vars=4, max_atoms=4)
        names = sorted(a.variables)
        lo, hi = (-8, 8) if len(names) <= 3 else (-4, 4)
        s = simplify(a)
        for combo in itertools.product(range(lo, hi + 1), repeat=len(names)):
            env = dict(zip(names, combo))
            if a.holds(env) != s.holds(env):
                failures.append(f"simplify at {env}")
                break
        checked += 1
    if abs(threshold_from_sizes(0.75, 17, 17) - math.sqrt(8.5)) > 1e-12:
        failures.append("threshold sqrt(8.5)")
    if abs(threshold_from_sizes(0.75, 16, 17) - math.sqrt(8.0)) > 1e-12:
        failures.append("threshold sqrt(8)")
    write_feedback_corpus(tmp_path / "c", n_fp=3, n_tp=3)
    reports = []
    for i in range(2):
        p = tmp_path / f"r{i}.json"
        run_loop_cmd(RunConfig(tmp_path / "c", seed=5, delta="random", report_path=p))
        reports.append(p.read_bytes())
    if reports[0] != reports[1]:
        failures.append("determinism")
    announce(8, not failures, f"additivity, similarity, simplify ({checked} sets), thresholds, determinism: "
                              f"{'all green' if not failures else failures[:5]}")
