"""HTTP service wrapping the verification lab.

Every scenario and generic run is reachable over JSON; responses carry the
full run report (deterministic payload plus wall-time metadata) and inline
CSV artifacts, so clients own all file writing.  Run with::

    uvicorn foliationlab.service:app
"""

from __future__ import annotations

from typing import Dict, List, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .errors import InputError, LabError
from .scenarios import (
    BUILTIN_MANIFEST,
    OPS,
    SCENARIOS,
    RunReport,
    evaluate_exit_code,
    run_manifest,
    run_scenario,
)

app = FastAPI(title="foliationlab", version=__version__,
              description="Numerical certification lab for vector-field foliations")


# --- models -------------------------------------------------------------------

class ReportModel(BaseModel):
    report: dict
    meta: dict
    artifacts: Dict[str, str] = Field(default_factory=dict)
    exit_code: int = 0


class ScenarioRequest(BaseModel):
    params: dict = Field(default_factory=dict)
    expected: Optional[dict] = None


class ManifestEntry(BaseModel):
    scenario: str
    params: dict = Field(default_factory=dict)
    expected: Optional[dict] = None


class ManifestRequest(BaseModel):
    entries: Optional[List[ManifestEntry]] = None   # None -> builtin manifest
    parallel: bool = False


class ManifestResponse(BaseModel):
    reports: List[ReportModel]
    exit_code: int


class ScenarioListResponse(BaseModel):
    scenarios: List[str]
    builtin_manifest: List[dict]


def _respond(report: RunReport, expected: Optional[dict]) -> ReportModel:
    d = report.to_dict()
    return ReportModel(report=d["report"], meta=d["meta"], artifacts=report.artifacts,
                       exit_code=evaluate_exit_code(report, expected))


# --- error mapping --------------------------------------------------------------

@app.exception_handler(InputError)
async def input_error_handler(_: Request, exc: InputError):
    return JSONResponse(status_code=400, content={"error": "input", "message": str(exc)})


@app.exception_handler(LabError)
async def lab_error_handler(_: Request, exc: LabError):
    return JSONResponse(status_code=422,
                        content={"error": type(exc).__name__, "message": str(exc)})


# --- endpoints --------------------------------------------------------------------

@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/scenarios", response_model=ScenarioListResponse)
def list_scenarios() -> ScenarioListResponse:
    return ScenarioListResponse(scenarios=sorted(SCENARIOS), builtin_manifest=BUILTIN_MANIFEST)


@app.post("/scenarios/{name}", response_model=ReportModel)
def run_named_scenario(name: str, req: ScenarioRequest) -> ReportModel:
    report = run_scenario(name, req.params)
    return _respond(report, req.expected)


@app.post("/run/{op}", response_model=ReportModel)
def run_operation(op: str, req: ScenarioRequest) -> ReportModel:
    """Generic operations: counterexample, thm51, classify, rectify, continue, linear."""
    if op not in OPS:
        raise InputError(f"unknown operation {op!r}; known: {sorted(OPS)}")
    report = OPS[op](req.params)
    return _respond(report, req.expected)


@app.post("/manifest", response_model=ManifestResponse)
def run_manifest_endpoint(req: ManifestRequest) -> ManifestResponse:
    entries = ([e.model_dump() for e in req.entries] if req.entries is not None
               else BUILTIN_MANIFEST)
    reports, exit_code = run_manifest(entries, parallel=req.parallel)
    out = []
    for entry, report in zip(entries, reports):
        out.append(_respond(report, entry.get("expected")))
    return ManifestResponse(reports=out, exit_code=exit_code)
