"""Run detection plus the verify/re-weight loop on a tiny generated corpus."""

import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from corpora import write_feedback_corpus  # noqa: E402

from ptrclones.pipeline import RunConfig, run_loop_cmd  # noqa: E402

with tempfile.TemporaryDirectory() as tmp:
    write_feedback_corpus(Path(tmp), n_fp=2, n_tp=2)
    report = run_loop_cmd(RunConfig(Path(tmp), similarity=0.7))
    for b in report["benchmarks"]:
        fb = b["feedback"]
        print(f"{b['name']}: initial pairs {b['initial_clone_pairs']}, "
              f"FP eliminated {fb['fp_eliminated']}/{fb['fp_seen']}, "
              f"true clone pairs {fb['true_clone_pairs']}, converged at {fb['convergence_iteration']}")
