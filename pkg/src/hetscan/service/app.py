"""FastAPI application exposing the assessment pipeline over HTTP.

Bad input data or configuration maps to 400; numerical failures during
fitting or benchmarking map to 500.  Run with:

    uvicorn hetscan.service.app:app
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from hetscan import __version__
from hetscan.benchmark import BenchmarkError
from hetscan.config import ConfigError
from hetscan.data import DataError
from hetscan.gp import CholeskyError, ConvergenceError
from hetscan.service import handlers
from hetscan.service.schemas import (
    AssessRequest,
    AssessResponse,
    BenchmarkRequest,
    BenchmarkResponse,
    SimulateRequest,
    SimulateResponse,
    VerifyRequest,
    VerifyResponse,
)
from hetscan.tuning import OptimizationError

BAD_REQUEST = (DataError, ConfigError, ValueError)
NUMERIC_FAILURE = (OptimizationError, CholeskyError, ConvergenceError, BenchmarkError)


def _run(handler, request):
    try:
        return handler(request)
    except NUMERIC_FAILURE as err:
        raise HTTPException(status_code=500, detail=str(err)) from err
    except BAD_REQUEST as err:
        raise HTTPException(status_code=400, detail=str(err)) from err


def create_app() -> FastAPI:
    app = FastAPI(title="hetscan", version=__version__)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/assess", response_model=AssessResponse)
    def assess(request: AssessRequest) -> AssessResponse:
        return _run(handlers.handle_assess, request)

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(request: SimulateRequest) -> SimulateResponse:
        return _run(handlers.handle_simulate, request)

    @app.post("/benchmark", response_model=BenchmarkResponse)
    def benchmark(request: BenchmarkRequest) -> BenchmarkResponse:
        return _run(handlers.handle_benchmark, request)

    @app.post("/verify-derivatives", response_model=VerifyResponse)
    def verify(request: VerifyRequest) -> VerifyResponse:
        return _run(handlers.handle_verify, request)

    return app


app = create_app()
