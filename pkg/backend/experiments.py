# backend/experiments.py
"""
Experiment runner – sweeps generator specs × k (× epsilon) and composes a report.
- One row per (instance, k, epsilon); DomSet runs once per (instance, k)
- Oracle-sized rows (n <= oracle_cap) also get gamma_k, the ratio check and the
  approx audit inequality
- Up to containment_cap: U_k containment (plain-rule runs) and the ceilings on
  Voronoi cells built on the optimum; up to naive_cap: exhaustive gamma_k agreement
- Round limits and oracle budgets come from the config, never from .env
- Budget overruns are recorded in the row; every other failure marks the row failed
- Rows come back in config order whatever the worker count
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Any

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError

from backend.errors import BudgetExceeded, InputError, KdomError
from backend.tools.approx import (
    audit_inequality,
    bounded_degree_approx,
    c_gamma_bounded,
    degree_certificate,
    k_domset_approx,
)
from backend.tools.decomposition import to_fraction
from backend.tools.domset import check_u_containment, domset, verify_ratio
from backend.tools.generators import GeneratorSpec, diameter_gate, generate, t_family
from backend.tools.graph_core import diameter, q_path_bound, q_path_vertices, within_edge_bound
from backend.tools.oracle import gamma_k_exact, gamma_k_naive, has_k2t_minor, is_distance_k_dominating
from backend.tools.prng import SplitMix64, mix64
from backend.tools.voronoi import (
    border_bound,
    border_union,
    build_voronoi,
    cell_graph,
    max_intercell_edges,
    quotient_within_edge_bound,
    two_cluster_edge_bound,
)

log = logging.getLogger(__name__)


class ExperimentConfig(BaseModel):
    generators: list[GeneratorSpec] = Field(default_factory=list)
    ks: list[int] = Field(default_factory=lambda: [2])
    t: int | None = None
    epsilons: list[float] = Field(default_factory=list)
    alpha: float | None = None
    oracle_cap: int = 40
    approx_cap: int = 40
    minor_cap: int = 14
    containment_cap: int = 30
    naive_cap: int = 10
    q_path_samples: int = 0
    bounded_degree: bool = False
    bounded_max_degree: int = 4
    bounded_C: float | None = None
    oracle_budget: int = 2_000_000
    minor_budget: int = 5_000_000
    round_factor: int = 10
    seed: int = 0
    workers: int = 1
    out: str | None = None
    json_out: str | None = None


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return ExperimentConfig.model_validate_json(f.read())
    except ValidationError as e:
        raise InputError(f"{os.path.basename(path)}: invalid experiment config\n{e}") from None


@dataclass
class ResultRow:
    instance: str
    family: str
    n: int
    m: int
    t: int
    k: int
    epsilon: str = ""
    diameter: int | None = None
    gate: bool | None = None
    minor_free: bool | None = None
    edge_bound_ok: bool | None = None
    D: int | None = None
    rounds: int | None = None
    d_valid: bool | None = None
    rounds_ok: bool | None = None
    gamma: Any = None
    naive_ok: bool | None = None
    ratio: float | None = None
    ratio_ok: bool | None = None
    u_containment_violations: int | None = None
    q_path_violations: int | None = None
    quotient_edge_bound_ok: bool | None = None
    max_intercell: int | None = None
    intercell_ok: bool | None = None
    border_size: int | None = None
    border_ok: bool | None = None
    Q: int | None = None
    added: int | None = None
    boundary_lift: int | None = None
    boundary_cells: int | None = None
    blocks: int | None = None
    q_valid: bool | None = None
    audit_ok: bool | None = None
    cell_lift_ok: bool | None = None
    exact_ok: bool | None = None
    bd_Q: int | None = None
    bd_added: int | None = None
    bd_valid: bool | None = None
    bd_audit_ok: bool | None = None
    bd_transfer_ok: bool | None = None
    c_gamma_ok: bool | None = None
    error: str = ""
    passed: bool = True


COLUMNS: tuple[str, ...] = tuple(f.name for f in fields(ResultRow))

# flags where an explicit False fails the row; None means "not checked"
_GATING = (
    "minor_free", "edge_bound_ok", "d_valid", "rounds_ok", "naive_ok", "ratio_ok",
    "quotient_edge_bound_ok", "intercell_ok", "border_ok",
    "q_valid", "audit_ok", "exact_ok", "bd_valid", "bd_audit_ok", "bd_transfer_ok", "c_gamma_ok",
)


@dataclass
class ExperimentReport:
    rows: list[ResultRow]
    details: list[dict[str, Any]]

    @property
    def failures(self) -> int:
        return sum(1 for r in self.rows if not r.passed)

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(r) for r in self.rows], columns=list(COLUMNS))

    def summary(self) -> pd.DataFrame:
        return summarize(self.rows)


# -------- per-instance work --------

def _count_q_path_violations(g, t: int, samples: int, rng: SplitMix64) -> int:
    verts = sorted(g.vertices)
    bad = 0
    for _ in range(samples):
        size = rng.between(1, min(4, len(verts)))
        Q = rng.sample(verts, size)
        h = rng.between(0, 6)
        if len(q_path_vertices(g, Q, h)) > q_path_bound(h, t) * len(Q):
            bad += 1
    return bad


def _optimum_cell_columns(g, k: int, t: int, optimum) -> dict[str, Any]:
    """Cells built on an optimum M: pairwise crossing edges and |V*| against their ceilings."""
    cells = build_voronoi(g, optimum, k)
    crossing = max_intercell_edges(g, cells)
    border = len(border_union(cells))
    return {
        "max_intercell": crossing,
        "intercell_ok": crossing <= two_cluster_edge_bound(k, t),
        "border_size": border,
        "border_ok": border <= border_bound(k, t, len(cells.centers)),
    }


def _finish(row: ResultRow) -> ResultRow:
    flags = [getattr(row, name) for name in _GATING]
    row.passed = (
        all(f is not False for f in flags)
        and not row.u_containment_violations
        and not row.q_path_violations
        and not (row.error and not row.error.startswith("budget"))
    )
    return row


def _epsilon_slots(cfg: ExperimentConfig) -> list[tuple[str, dict[str, Any]]]:
    if cfg.epsilons:
        return [(str(to_fraction(e)), {"epsilon": e, "mode": "direct"}) for e in cfg.epsilons]
    if cfg.alpha is not None:
        return [(f"alpha={to_fraction(cfg.alpha)}", {"alpha": cfg.alpha, "mode": "theoretical"})]
    return [("", {})]


def _run_instance(cfg: ExperimentConfig, idx: int, spec: GeneratorSpec) -> list[tuple[ResultRow, dict]]:
    g = generate(spec)
    t = cfg.t if cfg.t is not None else t_family(spec.family)
    name = f"{idx:03d}-{spec.label}"
    diam = diameter(g)
    base = dict(instance=name, family=spec.family, n=g.n, m=g.m, t=t,
                diameter=int(diam), edge_bound_ok=within_edge_bound(g, t))

    minor_free = None
    qpath_viol = None
    if g.n <= cfg.minor_cap:
        try:
            minor_free = not has_k2t_minor(g, t, cfg.minor_budget)
        except BudgetExceeded:
            minor_free = None
        if minor_free and cfg.q_path_samples:
            rng = SplitMix64(mix64(cfg.seed ^ idx))
            qpath_viol = _count_q_path_violations(g, t, cfg.q_path_samples, rng)

    out = []
    for k in cfg.ks:
        gate = diameter_gate(g, k)
        common = dict(base, k=k, gate=gate, minor_free=minor_free, q_path_violations=qpath_viol)
        gamma_cert, gamma_note = None, "skipped: over cap"
        if g.n <= cfg.oracle_cap:
            try:
                gamma_cert = gamma_k_exact(g, k, cfg.oracle_budget)
            except BudgetExceeded as e:
                gamma_note = f"skipped: budget ({e.explored} nodes)"

        dom = None
        if gate or g.n <= cfg.approx_cap:
            dom = domset(g, k, max_rounds=cfg.round_factor * (k + 1), budget=cfg.oracle_budget)
            common.update(D=len(dom.dominators), rounds=dom.rounds,
                          d_valid=is_distance_k_dominating(g, dom.dominators, k),
                          rounds_ok=dom.rounds <= 2 * k + 2)
            common["quotient_edge_bound_ok"] = quotient_within_edge_bound(
                cell_graph(g, build_voronoi(g, dom.dominators, k)), t)
        if gamma_cert is not None:
            common["gamma"] = gamma_cert.size
            if g.n <= cfg.naive_cap:
                common["naive_ok"] = gamma_k_naive(g, k).dominators == gamma_cert.dominators
            if g.n <= cfg.containment_cap and minor_free is not False:
                common.update(_optimum_cell_columns(g, k, t, gamma_cert.dominators))
            if dom is not None:
                ratio_rep = verify_ratio(g, k, t, dom, gamma_cert.dominators)
                common["ratio"] = float(ratio_rep.ratio)
                if gate:
                    common["ratio_ok"] = ratio_rep.ratio_ok
            if dom is not None and g.n <= cfg.containment_cap and not dom.exact_vertices:
                common["u_containment_violations"] = sum(
                    len(v) for v in check_u_containment(g, k, dom, gamma_cert.dominators).values())
        else:
            common["gamma"] = gamma_note

        for eps_label, eps_args in _epsilon_slots(cfg):
            row = ResultRow(**common, epsilon=eps_label)
            detail: dict[str, Any] = {"instance": name, "k": k, "epsilon": eps_label}
            if dom is not None:
                detail["D"] = sorted(dom.dominators)
            if gamma_cert is not None:
                detail["gamma"] = gamma_cert.to_payload()
            if eps_args and g.n <= cfg.approx_cap:
                _approx_columns(cfg, g, k, t, dom, gamma_cert, eps_args, row, detail)
            out.append((_finish(row), detail))
            log.info("%s k=%d %s: |D|=%s gamma=%s |Q|=%s passed=%s",
                     name, k, eps_label or "-", row.D, row.gamma, row.Q, row.passed)
    return out


def _approx_columns(cfg, g, k, t, dom, gamma_cert, eps_args, row: ResultRow, detail: dict) -> None:
    try:
        run = k_domset_approx(g, k, t, seed=cfg.seed, workers=1, budget=cfg.oracle_budget,
                              max_rounds=cfg.round_factor * (k + 1), dom=dom, **eps_args)
        a = run.audit
        row.Q, row.added, row.boundary_lift = a.q_size, a.added_size, a.boundary_lift_size
        row.boundary_cells, row.blocks = a.boundary_cells, len(a.block_sizes)
        row.q_valid, row.cell_lift_ok = a.q_valid, a.cell_lift_ok
        row.quotient_edge_bound_ok = (row.quotient_edge_bound_ok is not False) and quotient_within_edge_bound(run.H, t)
        if gamma_cert is not None:
            row.audit_ok = audit_inequality(run, gamma_cert.size)
            if a.single_block:
                row.exact_ok = a.q_size == gamma_cert.size
        detail["approx"] = run.to_payload()

        if cfg.bounded_degree and g.max_degree() <= cfg.bounded_max_degree:
            C = cfg.bounded_C if cfg.bounded_C is not None else degree_certificate(g, k)
            bd = bounded_degree_approx(g, k, t, C, seed=cfg.seed, workers=1,
                                       budget=cfg.oracle_budget, max_rounds=cfg.round_factor * 2,
                                       **eps_args)
            row.bd_Q, row.bd_added = bd.audit.q_size, bd.audit.added_size
            row.bd_valid, row.bd_transfer_ok = bd.audit.q_valid, bd.audit.transfer_ok
            if gamma_cert is not None:
                row.bd_audit_ok = audit_inequality(bd, gamma_cert.size)
                row.c_gamma_ok = c_gamma_bounded(g, k, C, cfg.oracle_budget)
            detail["bounded_degree"] = bd.to_payload()
    except BudgetExceeded as e:
        row.error = f"budget: {e}"
    except KdomError as e:
        row.error = f"{type(e).__name__}: {e}"


# -------- sweep --------

def run_experiments(cfg: ExperimentConfig) -> ExperimentReport:
    specs = list(cfg.generators)
    log.info("experiment: %d instances, ks=%s, %d worker(s)", len(specs), cfg.ks, cfg.workers)

    def task(item):
        idx, spec = item
        try:
            return _run_instance(cfg, idx, spec)
        except BudgetExceeded as e:
            return _error_rows(cfg, idx, spec, f"budget: {e}")
        except KdomError as e:
            return _error_rows(cfg, idx, spec, f"{type(e).__name__}: {e}")

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(task, enumerate(specs)))
    else:
        chunks = [task(item) for item in enumerate(specs)]

    rows = [r for chunk in chunks for r, _ in chunk]
    details = [d for chunk in chunks for _, d in chunk]
    report = ExperimentReport(rows, details)
    log.info("experiment done: %d rows, %d failed", len(rows), report.failures)
    return report


def _error_rows(cfg: ExperimentConfig, idx: int, spec: GeneratorSpec, msg: str) -> list[tuple[ResultRow, dict]]:
    """One failed row per (k, epsilon) slot the instance would have produced."""
    t = cfg.t if cfg.t is not None else t_family(spec.family)
    name = f"{idx:03d}-{spec.label}"
    return [
        (_finish(ResultRow(instance=name, family=spec.family, n=spec.n, m=0, t=t, k=k,
                           epsilon=eps_label, error=msg)),
         {"instance": name, "k": k, "epsilon": eps_label, "error": msg})
        for k in cfg.ks
        for eps_label, _ in _epsilon_slots(cfg)
    ]


def summarize(rows: list[ResultRow]) -> pd.DataFrame:
    """Max/mean ratio and failure count per family."""
    cols = ["family", "rows", "failed", "ratio_max", "ratio_mean"]
    if not rows:
        return pd.DataFrame(columns=cols)
    out = []
    df = pd.DataFrame([asdict(r) for r in rows])
    for family, grp in df.groupby("family", sort=True):
        ratios = np.array([r for r in grp["ratio"] if r is not None and not pd.isna(r)], dtype=float)
        out.append({
            "family": family,
            "rows": len(grp),
            "failed": int((~grp["passed"].astype(bool)).sum()),
            "ratio_max": float(np.max(ratios)) if ratios.size else None,
            "ratio_mean": float(np.mean(ratios)) if ratios.size else None,
        })
    return pd.DataFrame(out, columns=cols)


# -------- output --------

def to_csv_text(report: ExperimentReport) -> str:
    return report.frame().to_csv(index=False, float_format="%.6f", lineterminator="\n")


def write_csv(report: ExperimentReport, path: str) -> None:
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(to_csv_text(report))


def write_json(report: ExperimentReport, path: str) -> None:
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    payload = {
        "rows": [asdict(r) for r in report.rows],
        "details": report.details,
        "summary": json.loads(report.summary().to_json(orient="records")),
        "failures": report.failures,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
