"""Instance generation, experiment orchestration and reporting.

Randomness is PCG64 with one stream per instance, derived as
``SeedSequence(seed, spawn_key=(index,))``, so every record is reproducible
from (spec, index) alone and runs are identical across machines.
"""

from __future__ import annotations

import csv
import json
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bounds as bounds_mod
from .errors import NoIntegralSolution
from .exactmath import Matrix, Rat, det, gram_det, gram_schmidt, rank
from .reformulate import FeasibilityInstance, from_eq1, nullspace, rangespace
from .reduction import DEFAULT_PARAMS, is_kz_reduced, is_lll_reduced
from .solve import bnb_with_order, reverse_bnb, width

FAMILIES = ("uniform_box", "marketshare_eq", "marketshare_ineq")


@dataclass
class GeneratorSpec:
    family: str
    m: int
    n: int
    M: int
    count: int
    seed: int
    box_max: int = 1  # uniform_box only

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if not (1 <= self.m < self.n):
            raise ValueError("need 1 <= m < n")
        if self.M < 1 or self.count < 1 or self.box_max < 1:
            raise ValueError("M, count and box_max must be positive")


@dataclass
class GeneratedInstance:
    index: int
    instance: FeasibilityInstance
    independent_rows: bool
    resamples: int


def _rng_for(spec: GeneratorSpec, index: int):
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(spec.seed, spawn_key=(index,))))


def _draw_matrix(rng, m, n, M) -> Matrix:
    return Matrix(rng.integers(1, M + 1, size=(m, n)).tolist())


def _independent_matrix(rng, m, n, M):
    """Resample until the rows are independent; returns (A, rejections)."""
    rejections = 0
    while True:
        A = _draw_matrix(rng, m, n, M)
        if rank(A.transpose()) == m:
            return A, rejections
        rejections += 1


def generate(spec: GeneratorSpec):
    """Deterministic instance list for a generator spec.

    marketshare families use b = floor(A e / 2) on a 0/1 box (equality or
    the one-slack inequality form) and resample A to independent rows;
    uniform_box draws a box of widths <= box_max and an equality right-hand
    side that is attainable for half of the instances and uniform in
    [0, A w2] for the rest.
    """
    out = []
    for idx in range(spec.count):
        rng = _rng_for(spec, idx)
        if spec.family in ("marketshare_eq", "marketshare_ineq"):
            A, rej = _independent_matrix(rng, spec.m, spec.n, spec.M)
            b = [sum(row) // 2 for row in A.data]
            zeros, ones = [0] * spec.n, [1] * spec.n
            if spec.family == "marketshare_eq":
                inst = from_eq1(A, b, b, zeros, ones)
            else:
                inst = from_eq1(A, [v - 1 for v in b], b, zeros, ones)
            out.append(GeneratedInstance(idx, inst, True, rej))
        else:
            A = _draw_matrix(rng, spec.m, spec.n, spec.M)
            indep = rank(A.transpose()) == spec.m
            w2 = rng.integers(1, spec.box_max + 1, size=spec.n).tolist()
            if rng.integers(0, 2) == 0:
                xhat = [int(rng.integers(0, w + 1)) for w in w2]
                b = A.mul_vec(xhat)
            else:
                top = A.mul_vec(w2)
                b = [int(rng.integers(0, t + 1)) for t in top]
            inst = from_eq1(A, b, b, [0] * spec.n, w2)
            out.append(GeneratedInstance(idx, inst, indep, 0))
    return out


def sample_matrices(m, n, M, count, seed, independent=False):
    """Plain matrix samples from G_{m,n}(M) (or G'): Monte Carlo helper."""
    spec = GeneratorSpec("uniform_box", m, n, M, count, seed)
    mats = []
    rejections = 0
    for idx in range(count):
        rng = _rng_for(spec, idx)
        if independent:
            A, rej = _independent_matrix(rng, m, n, M)
            rejections += rej
        else:
            A = _draw_matrix(rng, m, n, M)
        mats.append(A)
    return mats, rejections


@dataclass
class Pipeline:
    formulation: str = "original"   # original | rangespace | nullspace
    reduction: str = "kz"           # lll | kz | rkz
    order: str = "reverse"          # reverse | given
    count_all: bool = False
    verify: bool = True             # record certified-bound compliance


@dataclass
class ExperimentRecord:
    instance_id: int
    family: str
    m: int
    n: int
    M: int
    seed: int
    independent_rows: bool
    resamples: int
    formulation: str
    reduction: str
    order: str
    feasible: bool = None
    solved_at_root: bool = None
    total_nodes: int = None
    nodes_per_level: list = None
    node_bounds: list = None
    bounds_ok: bool = None
    width_last: str = ""
    width_bound: str = ""
    width_ok: bool = None
    lattice_ok: bool = None
    n_solutions: int = None
    error: str = ""
    wall_time: float = 0.0


CSV_FIELDS = [f for f in ExperimentRecord.__dataclass_fields__]
TIMING_FIELDS = ("wall_time",)


def _branch_order(r, order):
    return list(range(r - 1, -1, -1)) if order == "reverse" else list(range(r))


def _lemma_bounds_for_order(inst, order_name):
    """Per-depth node-count bounds from the GSO of the branched system."""
    r = inst.constraint.cols
    order = _branch_order(r, order_name)
    perm_cols = [order[r - 1 - j] for j in range(r)]
    mat = Matrix([[row[v] for v in perm_cols] for row in inst.constraint.data])
    gso = gram_schmidt(mat)
    per_var = bounds_mod.node_count_bounds_all(gso, inst.bounds_norm_sq())
    return [per_var[r - 1 - d] for d in range(r)]


def _verify_reformulation(gen: GeneratedInstance, ref, rec: ExperimentRecord,
                          target: FeasibilityInstance):
    """Certified invariants: reducedness, determinant identities, widths."""
    ok = True
    red = ref.instance.constraint
    if ref.reduction == "lll":
        ok = ok and is_lll_reduced(red)
    elif red.cols <= 12:
        ok = ok and is_kz_reduced(red, DEFAULT_PARAMS)
    A = gen.instance.a_block()
    AAt = A.mul(A.transpose())
    if ref.kind == "rangespace":
        eye = Matrix.identity(A.rows)
        plus = Matrix([[AAt.data[i][j] + eye.data[i][j] for j in range(A.rows)]
                       for i in range(A.rows)])
        ok = ok and gram_det(red) == det(plus)
    else:
        ok = ok and ref.gcd_a ** 2 * gram_det(ref.kernel) == det(AAt)
    rec.lattice_ok = ok
    r = target.constraint.cols
    e_last = [0] * r
    e_last[-1] = 1
    w = width(e_last, target)
    if w is not None:
        rec.width_last = str(w)
        wb = bounds_mod.width_upper_bound(ref)
        rec.width_bound = str(wb)
        rec.width_ok = (w <= wb) and bounds_mod.width_bound_holds(ref, w)


def run_single(gen: GeneratedInstance, pipeline: Pipeline,
               spec: GeneratorSpec) -> ExperimentRecord:
    rec = ExperimentRecord(
        instance_id=gen.index, family=spec.family, m=spec.m, n=spec.n,
        M=spec.M, seed=spec.seed, independent_rows=gen.independent_rows,
        resamples=gen.resamples, formulation=pipeline.formulation,
        reduction=pipeline.reduction, order=pipeline.order)
    t0 = time.perf_counter()
    try:
        ref = None
        if pipeline.formulation == "original":
            target = gen.instance
        elif pipeline.formulation == "rangespace":
            ref = rangespace(gen.instance, pipeline.reduction)
            target = ref.instance
        elif pipeline.formulation == "nullspace":
            try:
                ref = nullspace(gen.instance, pipeline.reduction)
            except NoIntegralSolution:
                # infeasibility certificate from the gcd conditions: the
                # search never opens a node
                r = gen.instance.split[1] - gen.instance.split[0]
                rec.feasible = False
                rec.solved_at_root = True
                rec.total_nodes = 0
                rec.nodes_per_level = [0] * r
                rec.node_bounds = []
                rec.bounds_ok = True
                rec.lattice_ok = True
                rec.n_solutions = 0 if pipeline.count_all else None
                rec.error = "no_integral_solution"
                rec.wall_time = time.perf_counter() - t0
                return rec
            target = ref.instance
        else:
            raise ValueError(f"unknown formulation {pipeline.formulation!r}")

        order = _branch_order(target.constraint.cols, pipeline.order)
        report = bnb_with_order(target, order, count_all=pipeline.count_all)
        rec.feasible = report.feasible
        rec.solved_at_root = report.solved_at_root
        rec.total_nodes = report.total_nodes
        rec.nodes_per_level = report.nodes_per_level
        rec.n_solutions = report.n_solutions
        if pipeline.verify:
            lemma = _lemma_bounds_for_order(target, pipeline.order)
            rec.node_bounds = lemma
            rec.bounds_ok = all(c <= b for c, b in
                                zip(report.nodes_per_level, lemma))
            if ref is not None:
                _verify_reformulation(gen, ref, rec, target)
            else:
                rec.lattice_ok = True
    except Exception as exc:  # recorded, run continues
        rec.error = f"{type(exc).__name__}: {exc}"
    rec.wall_time = time.perf_counter() - t0
    return rec


def _run_single_star(args):
    return run_single(*args)


def run_experiment(spec: GeneratorSpec, pipeline: Pipeline):
    """Run the pipeline over every generated instance; returns
    (records sorted by id, summary dict)."""
    instances = generate(spec)
    workers = int(os.environ.get("LATBNB_WORKERS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(
                _run_single_star,
                [(g, pipeline, spec) for g in instances]))
    else:
        records = [run_single(g, pipeline, spec) for g in instances]
    records.sort(key=lambda rec: rec.instance_id)
    return records, summarize(records)


def summarize(records):
    solved = [r for r in records if not r.error or
              r.error == "no_integral_solution"]
    nodes = [r.total_nodes for r in solved if r.total_nodes is not None]
    return {
        "records": len(records),
        "errors": sum(1 for r in records if r.error and
                      r.error != "no_integral_solution"),
        "feasible": sum(1 for r in solved if r.feasible),
        "infeasible": sum(1 for r in solved if r.feasible is False),
        "solved_at_root": sum(1 for r in solved if r.solved_at_root),
        "mean_nodes": statistics.mean(nodes) if nodes else None,
        "median_nodes": statistics.median(nodes) if nodes else None,
        "bound_violations": sum(1 for r in solved if r.bounds_ok is False),
        "width_violations": sum(1 for r in solved if r.width_ok is False),
        "lattice_violations": sum(1 for r in solved if r.lattice_ok is False),
    }


def _csv_value(v):
    if isinstance(v, (list, tuple)):
        return json.dumps(list(v))
    if v is None:
        return ""
    return v


def report(records, outdir):
    """Write records.csv, summary.json and a Table-2-style table.md.

    Raises ValueError on an empty record list; nothing is written then.
    """
    if not records:
        raise ValueError("no records to report")
    os.makedirs(outdir, exist_ok=True)
    records = sorted(records, key=lambda rec: (rec.family, rec.M, rec.instance_id))
    with open(os.path.join(outdir, "records.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for rec in records:
            row = asdict(rec)
            writer.writerow([_csv_value(row[f]) for f in CSV_FIELDS])
    summary = summarize(records)
    cells = {}
    for rec in records:
        cells.setdefault((rec.M, rec.family), []).append(rec)
    table = {}
    for (M, family), recs in sorted(cells.items()):
        table.setdefault(M, {})[family] = summarize(recs)["mean_nodes"]
    with open(os.path.join(outdir, "summary.json"), "w") as fh:
        json.dump({"summary": summary,
                   "mean_nodes_by_M": {str(m): fams for m, fams in table.items()}},
                  fh, indent=2, default=float)
    families = sorted({rec.family for rec in records})
    lines = ["| M | " + " | ".join(f.upper() for f in families) + " |",
             "|---" * (len(families) + 1) + "|"]
    for M in sorted(table):
        row = [str(M)]
        for fam in families:
            v = table[M].get(fam)
            row.append("" if v is None else f"{float(v):.2f}")
        lines.append("| " + " | ".join(row) + " |")
    with open(os.path.join(outdir, "table.md"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return summary
