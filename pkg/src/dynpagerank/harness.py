"""Benchmark driver: runs the engines over temporal or random-batch
workloads, scores them against a fixed-length reference run, and writes
CSV/JSON reports.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import statistics
import time
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .engines import APPROACHES, power_iterate_fixed, run_approach, static_pagerank
from .errors import InputError
from .graph import BatchUpdate, CsrGraph, add_self_loops, apply_batch, build_csr, transpose
from .ranks import EngineConfig, l1_norm_delta
from .workload import (
    batch_size_for,
    generate_random_batch,
    load_matrix_market,
    load_temporal_edge_list,
    random_digraph,
    split_temporal,
)

log = logging.getLogger(__name__)

REFERENCE_ITERATIONS = 500
SUMMARY_INDEX = -1
DEFAULT_MAX_FILE_BYTES = 2 * 1024**3


@dataclass
class ExperimentRow:
    graph_name: str
    approach: str
    batch_size_spec: str
    batch_index: int
    runtime_millis: float
    iterations: float
    affected_vertex_iterations: float
    l1_error_vs_reference: float
    converged: bool


ROW_FIELDS = tuple(f.name for f in dataclasses.fields(ExperimentRow))


@dataclass
class ExperimentConfig:
    graphs: Sequence[str]
    mode: str = "temporal"
    batch_sizes: Sequence[str] = ("1e-3",)
    approaches: Sequence[str] = APPROACHES
    seed: int = 0
    reps: int = 1
    engine: EngineConfig = field(default_factory=EngineConfig)
    batch_count: int = 100
    base_fraction: float = 0.9
    insert_fraction: float = 0.8
    chain: str = "per-approach"
    mask_timing: bool = False
    max_file_bytes: int = DEFAULT_MAX_FILE_BYTES

    def __post_init__(self):
        if self.mode not in ("static", "temporal", "random"):
            raise InputError(f"unknown mode {self.mode!r}")
        unknown = [a for a in self.approaches if a not in APPROACHES]
        if unknown:
            raise InputError(f"unknown approaches {unknown}; expected a subset of {list(APPROACHES)}")
        if self.chain not in ("per-approach", "shared-reference"):
            raise InputError(f"unknown chain policy {self.chain!r}")
        if self.reps < 1:
            raise InputError("reps must be at least 1")
        for spec in self.batch_sizes:
            _parse_fraction(spec)


def _parse_fraction(spec: str) -> float:
    try:
        value = float(spec)
    except ValueError:
        raise InputError(f"batch size {spec!r} is not a number") from None
    if not 0.0 < value <= 1.0:
        raise InputError(f"batch size {spec!r} must be a fraction in (0, 1]")
    return value


def compute_reference_ranks(
    g_transpose: CsrGraph, g_forward: CsrGraph, cfg: EngineConfig = EngineConfig()
):
    """Static PageRank for exactly 500 sweeps with the tolerance check disabled.

    Returns the full result; ``converged`` tells whether the final sweep's
    change was within ``cfg.tolerance``.
    """
    ref_cfg = dataclasses.replace(cfg, max_iterations=REFERENCE_ITERATIONS)
    return power_iterate_fixed(g_transpose, g_forward, ref_cfg)


def geometric_mean(values: Iterable[float]) -> float:
    vals = [float(v) for v in values if not math.isnan(v)]
    if not vals:
        return math.nan
    if min(vals) == 0.0:
        return 0.0
    return statistics.geometric_mean(vals)


def summarize(rows: Sequence[ExperimentRow]) -> list[ExperimentRow]:
    """One geometric-mean row per (graph, approach, batch size), in first-seen order."""
    groups: dict[tuple[str, str, str], list[ExperimentRow]] = defaultdict(list)
    for r in rows:
        if r.batch_index != SUMMARY_INDEX:
            groups[(r.graph_name, r.approach, r.batch_size_spec)].append(r)
    out = []
    for (graph, approach, spec), members in groups.items():
        out.append(
            ExperimentRow(
                graph_name=graph,
                approach=approach,
                batch_size_spec=spec,
                batch_index=SUMMARY_INDEX,
                runtime_millis=geometric_mean(r.runtime_millis for r in members),
                iterations=geometric_mean(r.iterations for r in members),
                affected_vertex_iterations=geometric_mean(r.affected_vertex_iterations for r in members),
                l1_error_vs_reference=geometric_mean(r.l1_error_vs_reference for r in members),
                converged=all(r.converged for r in members),
            )
        )
    return out


def summarize_across_graphs(rows: Sequence[ExperimentRow], label: str = "*") -> list[ExperimentRow]:
    """Arithmetic mean within each graph, then geometric mean across graphs."""
    per_graph: dict[tuple[str, str], dict[str, list[ExperimentRow]]] = defaultdict(lambda: defaultdict(list))
    for r in rows:
        if r.batch_index != SUMMARY_INDEX:
            per_graph[(r.approach, r.batch_size_spec)][r.graph_name].append(r)

    def mean_of(members, attr):
        vals = [getattr(m, attr) for m in members if not math.isnan(getattr(m, attr))]
        return statistics.fmean(vals) if vals else math.nan

    out = []
    for (approach, spec), graphs in per_graph.items():
        metrics = {
            attr: geometric_mean(mean_of(m, attr) for m in graphs.values())
            for attr in ("runtime_millis", "iterations", "affected_vertex_iterations", "l1_error_vs_reference")
        }
        out.append(
            ExperimentRow(
                graph_name=label,
                approach=approach,
                batch_size_spec=spec,
                batch_index=SUMMARY_INDEX,
                converged=all(m.converged for ms in graphs.values() for m in ms),
                **metrics,
            )
        )
    return out


# --- running -------------------------------------------------------------------


def warm_up() -> None:
    """Trigger JIT compilation of every kernel so timings exclude it."""
    g = add_self_loops(build_csr(random_digraph(80, 400, seed=1, kind="powerlaw"), 80))
    gt = transpose(g)
    batch = generate_random_batch(g, 4, seed=1)
    g2 = apply_batch(g, batch)
    gt2 = transpose(g2)
    cfg = EngineConfig(low_degree_threshold=4)
    prev = static_pagerank(gt, g, cfg).ranks
    for strategy in ("dont-partition", "partition-transpose", "partition-both"):
        c = dataclasses.replace(cfg, partition_strategy=strategy)
        for approach in APPROACHES:
            run_approach(approach, g2, gt2, batch, prev, c)


def _check_dataset(path: str, max_bytes: int) -> None:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"dataset {path} does not exist")
    size = p.stat().st_size
    if size > max_bytes:
        raise InputError(f"dataset {path} is {size} bytes, above the {max_bytes}-byte budget")


def load_static_graph(path: str) -> CsrGraph:
    """Load ``.mtx`` or a temporal edge list (duplicates collapsed) with self-loops added."""
    if path.endswith(".mtx"):
        edges, n = load_matrix_market(path)
    else:
        t = load_temporal_edge_list(path)
        edges, n = t.edge_array(), t.vertex_count
    return add_self_loops(build_csr(edges, n))


class _Runner:
    def __init__(self, config: ExperimentConfig, graph_name: str):
        self.config = config
        self.graph_name = graph_name
        self.rows: list[ExperimentRow] = []

    def run_step(self, spec, index, g, gt, batch, previous: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
        """Score every approach on one updated graph against one shared reference."""
        cfg = self.config.engine
        ref = compute_reference_ranks(gt, g, cfg)
        if not ref.converged:
            log.warning("%s batch %s/%d: reference did not reach tolerance", self.graph_name, spec, index)
        out = {}
        for approach in self.config.approaches:
            start = time.perf_counter()
            res = run_approach(approach, g, gt, batch, previous.get(approach), cfg)
            elapsed = (time.perf_counter() - start) * 1e3
            error = l1_norm_delta(res.ranks, ref.ranks) if ref.converged else math.nan
            self.rows.append(
                ExperimentRow(
                    graph_name=self.graph_name,
                    approach=approach,
                    batch_size_spec=spec,
                    batch_index=index,
                    runtime_millis=0.0 if self.config.mask_timing else elapsed,
                    iterations=res.iterations,
                    affected_vertex_iterations=res.affected_vertex_iterations,
                    l1_error_vs_reference=error,
                    converged=res.converged,
                )
            )
            out[approach] = res.ranks
        out["__reference__"] = ref.ranks
        return out


def _next_previous(config: ExperimentConfig, step: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    if config.chain == "shared-reference":
        return {a: step["__reference__"] for a in config.approaches}
    return {a: step[a] for a in config.approaches}


def _run_temporal(config: ExperimentConfig, path: str, name: str) -> list[ExperimentRow]:
    t = load_temporal_edge_list(path)
    runner = _Runner(config, name)
    for spec in config.batch_sizes:
        size = batch_size_for(_parse_fraction(spec), len(t))
        base, batches = split_temporal(t, config.base_fraction, config.batch_count, size)
        for _ in range(config.reps):
            g = add_self_loops(build_csr(base, t.vertex_count))
            initial = static_pagerank(transpose(g), g, config.engine).ranks
            previous = {a: initial for a in config.approaches}
            for k, batch in enumerate(batches):
                g = apply_batch(g, batch)
                step = runner.run_step(spec, k, g, transpose(g), batch, previous)
                previous = _next_previous(config, step)
    return runner.rows


def _batch_seed(seed: int, spec_index: int, rep: int) -> int:
    return int(np.random.SeedSequence([seed, spec_index, rep]).generate_state(1, np.uint64)[0])


def _run_random(config: ExperimentConfig, path: str, name: str) -> list[ExperimentRow]:
    g0 = load_static_graph(path)
    initial = static_pagerank(transpose(g0), g0, config.engine).ranks
    previous = {a: initial for a in config.approaches}
    runner = _Runner(config, name)
    for i, spec in enumerate(config.batch_sizes):
        size = batch_size_for(_parse_fraction(spec), g0.edge_count)
        for rep in range(config.reps):
            batch = generate_random_batch(g0, size, config.insert_fraction, _batch_seed(config.seed, i, rep))
            g = apply_batch(g0, batch)
            runner.run_step(spec, rep, g, transpose(g), batch, previous)
    return runner.rows


def _run_static(config: ExperimentConfig, path: str, name: str) -> list[ExperimentRow]:
    g = load_static_graph(path)
    runner = _Runner(dataclasses.replace(config, approaches=("static",)), name)
    runner.run_step("0", 0, g, transpose(g), BatchUpdate(), {})
    return runner.rows


def run_experiment(config: ExperimentConfig) -> list[ExperimentRow]:
    """Run every graph in ``config`` and append geometric-mean summary rows.

    Per-graph rows are followed by that graph's summaries; with more than one
    graph, cross-graph summaries (graph name ``*``) close the list.
    """
    if not config.graphs:
        raise InputError("no dataset given")
    for path in config.graphs:
        _check_dataset(path, config.max_file_bytes)
    warm_up()
    run = {"temporal": _run_temporal, "random": _run_random, "static": _run_static}[config.mode]
    rows: list[ExperimentRow] = []
    detail: list[ExperimentRow] = []
    for path in config.graphs:
        name = Path(path).stem
        log.info("running %s mode on %s", config.mode, name)
        graph_rows = run(config, path, name)
        detail.extend(graph_rows)
        rows.extend(graph_rows)
        if config.mode != "static":
            rows.extend(summarize(graph_rows))
    if len(config.graphs) > 1 and config.mode != "static":
        rows.extend(summarize_across_graphs(detail))
    return rows


# --- reports -------------------------------------------------------------------


def _format_float(x: float) -> str | None:
    if math.isnan(x) or math.isinf(x):
        return None
    return format(x, ".17g")


def _cells(row: ExperimentRow) -> list[tuple[str, object]]:
    out = []
    for name in ROW_FIELDS:
        value = getattr(row, name)
        if isinstance(value, bool) or isinstance(value, str):
            out.append((name, value))
        elif isinstance(value, (int, np.integer)):
            out.append((name, int(value)))
        else:
            out.append((name, _format_float(float(value))))
    return out


def emit_report(rows: Sequence[ExperimentRow], fmt: str, path) -> None:
    """Write rows as CSV (header + one line per row) or a JSON array.

    Floats carry 17 significant digits; NaN becomes an empty CSV field or
    JSON ``null``.
    """
    if not rows:
        raise InputError("no rows to report")
    path = Path(path)
    if fmt == "csv":
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(ROW_FIELDS)
            for row in rows:
                writer.writerow(
                    "" if v is None else ("true" if v is True else "false" if v is False else v)
                    for _, v in _cells(row)
                )
    elif fmt == "json":
        objects = []
        for row in rows:
            parts = []
            for name, v in _cells(row):
                if v is None:
                    text = "null"
                elif isinstance(v, bool):
                    text = "true" if v else "false"
                elif isinstance(v, str) and name in ("graph_name", "approach", "batch_size_spec"):
                    text = json.dumps(v)
                else:
                    text = str(v)
                parts.append(f"{json.dumps(name)}: {text}")
            objects.append("  {" + ", ".join(parts) + "}")
        path.write_text("[\n" + ",\n".join(objects) + "\n]\n", encoding="utf-8")
    else:
        raise InputError(f"unknown report format {fmt!r}")


def _typed(name: str, raw):
    if name in ("graph_name", "approach", "batch_size_spec"):
        return str(raw)
    if name == "converged":
        return raw if isinstance(raw, bool) else raw == "true"
    if name == "batch_index":
        return int(raw)
    if raw is None or raw == "":
        return math.nan
    return float(raw)


def read_report(path) -> list[ExperimentRow]:
    """Parse a report written by :func:`emit_report` (format taken from the suffix)."""
    path = Path(path)
    if path.suffix == ".json":
        records = json.loads(path.read_text(encoding="utf-8"))
    else:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != ROW_FIELDS:
                raise InputError(f"unexpected CSV header {reader.fieldnames}")
            records = list(reader)
    return [ExperimentRow(**{k: _typed(k, rec[k]) for k in ROW_FIELDS}) for rec in records]
