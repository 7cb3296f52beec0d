"""Corpus ingestion, end-to-end orchestration and the JSON report."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .cfront import FunctionDef, NodeKind, ParseError, UnsupportedConstruct, header_children, parse_translation_unit
from .clonedet import CloneCluster, CloneConfig, cluster, vector_map, vectorize_fragment
from .feedback import LoopResult, derive_seed, run_loop
from .ptranalysis import PointerRelatedVars, TargetNotUsed, pointer_related_vars, select_pointers, uses_target
from .slicer import EmptySlice, SliceFragment, dedupe, dump_fragments, isolate
from .verifier import VerdictRecord, sample_cluster, verify_fragments

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class EmptyCorpus(Exception):
    pass


class CorpusUnreadable(Exception):
    pass


class InvariantViolation(Exception):
    pass


@dataclass
class RunConfig:
    corpus_dir: Union[str, Path]
    similarity: float = 0.8
    delta: Union[float, str] = 2.0
    max_iters: int = 10
    min_size: int = 10
    preset: str = "full"
    mode: str = "exact"
    seed: int = 0
    report_path: Optional[Union[str, Path]] = None
    dump_slices: Optional[Union[str, Path]] = None

    def __post_init__(self):
        self.corpus_dir = Path(self.corpus_dir)
        if not self.corpus_dir.is_dir():
            raise CorpusUnreadable(f"{self.corpus_dir} is not a directory")
        if self.delta != "random":
            self.delta = float(self.delta)
            if not self.delta > 1.0:
                raise ValueError("delta must exceed 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        self.clone_config()  # range checks

    def clone_config(self) -> CloneConfig:
        return CloneConfig(similarity=self.similarity, min_size=self.min_size, preset=self.preset,
                           mode=self.mode, seed=self.seed)

    def to_json(self) -> dict:
        return {
            "similarity": self.similarity, "delta": self.delta, "max_iters": self.max_iters,
            "min_size": self.min_size, "preset": self.preset, "mode": self.mode, "seed": self.seed,
        }


@dataclass
class FragmentInfo:
    fragment: SliceFragment
    related: PointerRelatedVars
    file: str


@dataclass
class Benchmark:
    name: str
    files: list[str] = field(default_factory=list)
    program_lines: set[tuple[str, int]] = field(default_factory=set)
    functions: int = 0
    pointers: int = 0
    fragments: dict[int, FragmentInfo] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    clusters: list[CloneCluster] = field(default_factory=list)

    def sequences(self) -> dict:
        return {f: info.fragment.kind_sequence() for f, info in self.fragments.items()}


# ingestion -------------------------------------------------------------------


def _benchmark_files(root: Path) -> list[tuple[str, list[Path]]]:
    groups: dict[str, list[Path]] = {}
    for p in sorted(root.rglob("*.c")):
        rel = p.relative_to(root)
        name = rel.parts[0] if len(rel.parts) > 1 else root.name
        groups.setdefault(name, []).append(p)
    return sorted(groups.items())


def _fragments_for(fn: FunctionDef, records, next_id) -> list[tuple[SliceFragment, PointerRelatedVars]]:
    out = []
    for rec in records:
        if rec.owning_function not in (None, fn.name) or not uses_target(fn, rec):
            continue
        try:
            related = pointer_related_vars(fn, rec)
            frag = isolate(fn, rec, related, next_id())
        except (EmptySlice, TargetNotUsed):
            continue
        out.append((frag, related))
    return out


def load_benchmarks(config: RunConfig) -> list[Benchmark]:
    root = Path(config.corpus_dir)
    groups = _benchmark_files(root)
    if not groups:
        raise EmptyCorpus(f"no C files under {root}")
    benches = []
    for name, files in groups:
        bench = Benchmark(name)
        counter = iter(range(10**9))
        infos: list[tuple[SliceFragment, PointerRelatedVars, str]] = []
        for path in files:
            rel = path.relative_to(root).as_posix()
            bench.files.append(rel)
            try:
                text = path.read_text(errors="replace")
            except OSError as exc:
                bench.warnings.append(f"{rel}: unreadable ({exc.strerror})")
                continue
            for i, line in enumerate(text.splitlines(), 1):
                if line.strip():
                    bench.program_lines.add((rel, i))
            try:
                tu = parse_translation_unit(text, rel, on_unsupported="skip")
            except (ParseError, UnsupportedConstruct) as exc:
                bench.warnings.append(f"{rel}: {exc}")
                log.warning("skipping %s: %s", rel, exc)
                continue
            for exc in tu.skipped:
                bench.warnings.append(f"{rel}: skipped function ({exc})")
            records = select_pointers(tu.functions, tu.globals, tu.members)
            bench.functions += len(tu.functions)
            bench.pointers += len(records)
            for fn in tu.functions:
                for frag, related in _fragments_for(fn, records, lambda: next(counter)):
                    infos.append((frag, related, rel))
        kept = {f.fragment_id for f in dedupe(frag for frag, _, _ in infos)}
        for frag, related, rel in infos:
            if frag.fragment_id in kept:
                bench.fragments[frag.fragment_id] = FragmentInfo(frag, related, rel)
        benches.append(bench)
    if not any(b.functions for b in benches):
        raise EmptyCorpus(f"no parseable functions under {root}")
    return benches


# line accounting -------------------------------------------------------------


def fragment_lines(info: FragmentInfo) -> set[tuple[str, int]]:
    """Source lines a fragment accounts for; control statements count their header lines."""
    out = set()
    for stmt in info.fragment.statements:
        if stmt.kind in (NodeKind.For, NodeKind.While, NodeKind.If, NodeKind.Switch):
            heads = header_children(stmt)
            last = max([h.loc.line_end for h in heads] + [stmt.loc.line_begin])
            lines = range(stmt.loc.line_begin, last + 1)
        else:
            lines = range(stmt.loc.line_begin, stmt.loc.line_end + 1)
        out.update((info.file, ln) for ln in lines)
    return out


def _loc_stats(bench: Benchmark, clusters: list[CloneCluster]) -> dict:
    related: set = set()
    for info in bench.fragments.values():
        related |= fragment_lines(info)
    related &= bench.program_lines
    cloned: set = set()
    for c in clusters:
        for f in c.members:
            cloned |= fragment_lines(bench.fragments[f])
    cloned &= related
    stats = {"program": len(bench.program_lines), "pointer_related": len(related), "cloned": len(cloned)}
    if not stats["cloned"] <= stats["pointer_related"] <= stats["program"]:
        raise InvariantViolation(f"line counts out of order: {stats}")
    return stats


# stages ----------------------------------------------------------------------


def detect(bench: Benchmark, config: RunConfig) -> list[CloneCluster]:
    vectors = [vectorize_fragment(i.fragment, config.preset) for i in bench.fragments.values()]
    bench.clusters = cluster(vectors, config.clone_config())
    return bench.clusters


def _verifier(bench: Benchmark):
    def verify(a: int, b: int) -> VerdictRecord:
        fa, fb = bench.fragments[a], bench.fragments[b]
        return verify_fragments(fa.fragment, fa.related, fb.fragment, fb.related)
    return verify


def verify_clusters(bench: Benchmark, config: RunConfig, clusters: list[CloneCluster]) -> list[VerdictRecord]:
    verify = _verifier(bench)
    vmap = vector_map(vectorize_fragment(i.fragment, config.preset) for i in bench.fragments.values())
    records = {}
    for ci, c in enumerate(clusters):
        for a, b in sample_cluster(c, seed=derive_seed(config.seed, 0, ci), vectors=vmap):
            key = (min(a, b), max(a, b))
            if key not in records:
                records[key] = verify(*key)
    return [records[k] for k in sorted(records)]


def true_clone_pairs(clusters: list[CloneCluster], verdicts: dict, verify) -> int:
    """Direct clone pairs of the clusters whose constraints are equivalent."""
    count = 0
    for c in clusters:
        for a, b, _ in c.pairwise:
            key = (min(a, b), max(a, b))
            if key not in verdicts:
                verdicts[key] = verify(*key)
            v = verdicts[key]
            if (v if isinstance(v, str) else v.verdict) == "equivalent":
                count += 1
    return count


def loop(bench: Benchmark, config: RunConfig) -> LoopResult:
    return run_loop(bench.sequences(), _verifier(bench), config.clone_config(), config.delta,
                    config.max_iters, config.seed)


# report ----------------------------------------------------------------------


def _cluster_json(clusters: list[CloneCluster]) -> list[dict]:
    return [{"members": c.members, "pairs": [[a, b, round(d, 6)] for a, b, d in c.pairwise]} for c in clusters]


def _bench_json(bench: Benchmark, clusters: list[CloneCluster]) -> dict:
    frags = []
    for fid in sorted(bench.fragments):
        info = bench.fragments[fid]
        frags.append({
            "id": fid, "file": info.file, "function": info.fragment.function,
            "pointer": info.fragment.pointer.name,
            "lines": sorted(ln for _, ln in fragment_lines(info)),
        })
    return {
        "name": bench.name,
        "files": len(bench.files),
        "functions": bench.functions,
        "pointers": bench.pointers,
        "loc": _loc_stats(bench, clusters),
        "fragment_count": len(bench.fragments),
        "clone_pairs": sum(len(c.pairwise) for c in clusters),
        "cluster_count": len(clusters),
        "clusters": _cluster_json(clusters),
        "fragments": frags,
        "warnings": bench.warnings,
    }


def _envelope(command: str, config: RunConfig, benches: list[dict]) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "config": config.to_json(),
            "benchmarks": benches}


def write_report(report: dict, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report, indent=2) + "\n")
    logs = [dict(bench=b["name"], **row) for b in report["benchmarks"] for row in b.get("feedback", {}).get("iterations", [])]
    if logs:
        path.with_suffix(".iterations.jsonl").write_text("".join(json.dumps(r) + "\n" for r in logs))


def _finish(report: dict, config: RunConfig, benches: list[Benchmark]) -> dict:
    if config.dump_slices:
        for b in benches:
            dump_fragments((i.fragment for i in b.fragments.values()), Path(config.dump_slices) / b.name)
    if config.report_path:
        write_report(report, config.report_path)
    return report


def run_detect(config: RunConfig) -> dict:
    benches = load_benchmarks(config)
    out = [_bench_json(b, detect(b, config)) for b in benches]
    return _finish(_envelope("detect", config, out), config, benches)


def run_verify(config: RunConfig, benches: Optional[list[Benchmark]] = None) -> dict:
    benches = benches if benches is not None else load_benchmarks(config)
    out = []
    for b in benches:
        clusters = b.clusters or detect(b, config)
        doc = _bench_json(b, clusters)
        records = verify_clusters(b, config, clusters)
        doc["verdicts"] = [r.to_json() for r in records]
        doc["verdict_counts"] = {v: sum(r.verdict == v for r in records) for v in ("equivalent", "different", "unknown")}
        out.append(doc)
    return _finish(_envelope("verify", config, out), config, benches)


def run_loop_cmd(config: RunConfig) -> dict:
    benches = load_benchmarks(config)
    out = []
    for b in benches:
        initial = detect(b, config)
        res = loop(b, config)
        st = res.state
        if st.fp_eliminated > st.fp_seen:
            raise InvariantViolation("more false positives eliminated than seen")
        verdicts = dict(st.verdicts)
        tcp = true_clone_pairs(res.clusters, verdicts, _verifier(b))
        doc = _bench_json(b, res.clusters)
        doc["initial_clone_pairs"] = sum(len(c.pairwise) for c in initial)
        doc["initial_cluster_count"] = len(initial)
        doc["verdicts"] = [
            (v.to_json() if hasattr(v, "to_json") else {"pair": list(k), "verdict": v})
            for k, v in sorted(verdicts.items())
        ]
        doc["feedback"] = {
            "iterations": st.log,
            "fp_per_iteration": [row["fp"] for row in st.log],
            "fp_eliminated_per_iteration": [row["fp_eliminated"] for row in st.log],
            "fp_seen": st.fp_seen,
            "fp_eliminated": st.fp_eliminated,
            "unknown": st.unknown,
            "irreducible": [list(p) for p in st.irreducible],
            "converged": st.converged,
            "convergence_iteration": st.convergence_iteration,
            "true_clone_pairs": tcp,
            "overrides": {
                str(f): {"adjusted": [float(x) for x in o.adjusted.counts],
                         "provenance": [list(p) for p in o.provenance]}
                for f, o in sorted(st.overrides.items())
            },
        }
        out.append(doc)
    return _finish(_envelope("loop", config, out), config, benches)
