"""Seeded benchmark runs over the synthetic scenarios."""
from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cluster import run_lart
from .metrics import fowlkes_mallows, nmi
from .synthgen import SCENARIOS, ScenarioConfig, generate, normalize_scenario

CSV_VERSION = 1
CSV_HEADER = ["scenario", "seed", "algorithm", "nmi", "fm", "runtime_ms", "num_communities", "q_m"]
ALGORITHMS = ("lart", "fixed")
FAILED = "FAILED"


def run_seed(master_seed: int, scenario: str, run: int) -> int:
    """Seed of run ``run``; independent of how many runs are requested."""
    ss = np.random.SeedSequence(entropy=int(master_seed),
                                spawn_key=(SCENARIOS.index(scenario), int(run)))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


@dataclass
class BenchRow:
    scenario: str
    seed: int
    algorithm: str
    nmi: float
    fm: float
    runtime_ms: float
    num_communities: int
    q_m: float
    timings: dict = field(default_factory=dict)


@dataclass
class BenchReport:
    rows: list[BenchRow]

    def aggregate(self) -> list[dict]:
        """Mean and population std per (scenario, algorithm), in first-seen order."""
        groups: dict[tuple[str, str], list[BenchRow]] = {}
        for r in self.rows:
            groups.setdefault((r.scenario, r.algorithm), []).append(r)
        out = []
        for (sc, alg), rows in groups.items():
            v = np.array([r.nmi for r in rows])
            f = np.array([r.fm for r in rows])
            out.append({
                "scenario": sc, "algorithm": alg, "runs": len(rows),
                "nmi_mean": float(v.mean()), "nmi_std": float(v.std()),
                "fm_mean": float(f.mean()), "fm_std": float(f.std()),
            })
        return out

    def mean_nmi(self, scenario, algorithm) -> float:
        for a in self.aggregate():
            if a["scenario"] == scenario and a["algorithm"] == algorithm:
                return a["nmi_mean"]
        raise KeyError((scenario, algorithm))


def _one_run(job):
    scenario, seed, algorithms, fixed_omega, gen_kwargs = job
    m, truth = generate(ScenarioConfig(scenario, seed, **gen_kwargs))
    rows = []
    for alg in algorithms:
        start = time.perf_counter()
        res = run_lart(m, fixed_omega=fixed_omega if alg == "fixed" else None)
        elapsed = (time.perf_counter() - start) * 1e3
        rows.append(BenchRow(
            scenario=scenario, seed=seed, algorithm=alg,
            nmi=nmi(truth.labels, res.partition),
            fm=fowlkes_mallows(truth.labels, res.partition),
            runtime_ms=elapsed,
            num_communities=res.partition.num_communities,
            q_m=res.q_m,
            timings=res.timings,
        ))
    return rows


def run_bench(scenarios, runs: int, master_seed: int, algorithms=("lart",),
              fixed_omega: float = 1.0, jobs: int = 1, on_rows=None, **gen_kwargs) -> BenchReport:
    """Run every algorithm on ``runs`` seeded instances of each scenario.

    ``on_rows`` is called with each run's rows in run order as they become
    available, so callers can stream results to disk.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    algorithms = tuple(algorithms)
    bad = [a for a in algorithms if a not in ALGORITHMS]
    if bad or not algorithms:
        raise ValueError(f"unknown algorithm(s) {bad}; choose from {', '.join(ALGORITHMS)}")
    scenarios = [normalize_scenario(s) for s in scenarios]
    work = [(sc, run_seed(master_seed, sc, r), algorithms, fixed_omega, gen_kwargs)
            for sc in scenarios for r in range(runs)]
    rows = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(_one_run, work)
            for run_rows in results:
                rows.extend(run_rows)
                if on_rows:
                    on_rows(run_rows)
    else:
        for job in work:
            run_rows = _one_run(job)
            rows.extend(run_rows)
            if on_rows:
                on_rows(run_rows)
    return BenchReport(rows)


def format_row(r: BenchRow, timing=False) -> list[str]:
    return [r.scenario, str(r.seed), r.algorithm, f"{r.nmi:.6f}", f"{r.fm:.6f}",
            f"{r.runtime_ms:.1f}" if timing else "", str(r.num_communities), f"{r.q_m:.6f}"]


def report_csv(report: BenchReport, timing=False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in report.rows:
        w.writerow(format_row(r, timing))
    return buf.getvalue()


def summary_csv(report: BenchReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scenario", "algorithm", "runs", "nmi_mean", "nmi_std", "fm_mean", "fm_std"])
    for a in report.aggregate():
        w.writerow([a["scenario"], a["algorithm"], a["runs"], f"{a['nmi_mean']:.6f}",
                    f"{a['nmi_std']:.6f}", f"{a['fm_mean']:.6f}", f"{a['fm_std']:.6f}"])
    return buf.getvalue()
