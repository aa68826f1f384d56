import json

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ValidationError

from backend import config
from backend.errors import BudgetExceeded, ContractFailure, InputError, KdomError
from backend.experiments import ExperimentConfig, run_experiments, to_csv_text
from backend.tools.approx import bounded_degree_approx, degree_certificate, k_domset_approx
from backend.tools.decomposition import low_boundary_partition, verify_partition
from backend.tools.domset import domset
from backend.tools.generators import Family, GeneratorSpec, generate, permute_ids
from backend.tools.graph_io import graph_from_payload, graph_to_payload
from backend.tools.oracle import gamma_k_exact, has_k2t_minor

config.setup_logging()

app = FastAPI(title="kdom workbench API", version="0.1")

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"], allow_credentials=True,
    allow_methods=["*"], allow_headers=["*"]
)


# -------- error mapping --------

def _fail(status: int, msg: str, **extra) -> JSONResponse:
    return JSONResponse(status_code=status, content={"ok": False, "msg": msg, **extra})


@app.exception_handler(InputError)
def _input_error(request: Request, exc: InputError):
    return _fail(400, str(exc))


@app.exception_handler(ValidationError)
def _bad_spec(request: Request, exc: ValidationError):
    return _fail(400, str(exc))


@app.exception_handler(ContractFailure)
def _contract_failure(request: Request, exc: ContractFailure):
    return _fail(422, str(exc), achieved=exc.achieved, radius_cap=exc.radius_cap)


@app.exception_handler(BudgetExceeded)
def _budget(request: Request, exc: BudgetExceeded):
    return _fail(503, str(exc), explored=exc.explored)


@app.exception_handler(KdomError)
def _kdom_error(request: Request, exc: KdomError):
    return _fail(500, str(exc))


# -------- request models --------

class GraphIn(BaseModel):
    vertices: list[int] | None = None
    edges: list[list[int]]

    def build(self):
        data = {"edges": self.edges}
        if self.vertices is not None:
            data["vertices"] = self.vertices
        return graph_from_payload(data)


class GenRequest(BaseModel):
    family: Family
    n: int
    seed: int = 0
    max_degree: int | None = None
    permute: int | None = None


class DomSetRequest(BaseModel):
    graph: GraphIn
    k: int
    exact_small: bool = True


class DecomposeRequest(BaseModel):
    graph: GraphIn
    epsilon: str
    seed: int | None = None
    radius_cap: int | None = None


class ApproxRequest(BaseModel):
    graph: GraphIn
    k: int
    t: int
    alpha: str | None = None
    epsilon: str | None = None
    variant: str = "voronoi"
    C: str | None = None
    seed: int | None = None


class GammaRequest(BaseModel):
    graph: GraphIn
    k: int
    budget: int | None = None


class MinorRequest(BaseModel):
    graph: GraphIn
    t: int
    budget: int | None = None


# -------- routes --------

@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/gen")
def gen(req: GenRequest):
    spec = GeneratorSpec(family=req.family, n=req.n, seed=req.seed, max_degree=req.max_degree)
    g = generate(spec)
    if req.permute is not None:
        g = permute_ids(g, req.permute)
    return {"ok": True, "label": spec.label, "graph": graph_to_payload(g)}


@app.post("/domset")
def run_domset(req: DomSetRequest):
    run = domset(req.graph.build(), req.k, exact_small=req.exact_small)
    return {"ok": True, **run.to_payload()}


@app.post("/decompose")
def decompose(req: DecomposeRequest):
    g = req.graph.build()
    p = low_boundary_partition(g, req.epsilon, seed=req.seed, radius_cap=req.radius_cap)
    report = verify_partition(g, p, req.epsilon)
    return {"ok": report.passed, "partition": p.to_payload(), "check": report.to_payload()}


@app.post("/approx")
def approx(req: ApproxRequest):
    g = req.graph.build()
    if (req.alpha is None) == (req.epsilon is None):
        raise InputError("give exactly one of alpha or epsilon")
    opts = dict(alpha=req.alpha, epsilon=req.epsilon, seed=req.seed)
    if req.variant == "bounded-degree":
        C = req.C if req.C is not None else degree_certificate(g, req.k)
        run = bounded_degree_approx(g, req.k, req.t, C, **opts)
    elif req.variant == "voronoi":
        run = k_domset_approx(g, req.k, req.t, **opts)
    else:
        raise InputError(f"unknown variant {req.variant!r}")
    return {"ok": run.audit.q_valid, **run.to_payload()}


@app.post("/oracle/gamma")
def oracle_gamma(req: GammaRequest):
    return {"ok": True, **gamma_k_exact(req.graph.build(), req.k, req.budget).to_payload()}


@app.post("/oracle/minor")
def oracle_minor(req: MinorRequest):
    return {"ok": True, "t": req.t, "has_minor": has_k2t_minor(req.graph.build(), req.t, req.budget)}


@app.post("/run")
def run(cfg: ExperimentConfig):
    # file outputs stay a CLI concern
    report = run_experiments(cfg.model_copy(update={"out": None, "json_out": None}))
    return {
        "ok": report.failures == 0,
        "failures": report.failures,
        "rows": json.loads(report.frame().to_json(orient="records")),
        "summary": json.loads(report.summary().to_json(orient="records")),
        "csv": to_csv_text(report),
    }
