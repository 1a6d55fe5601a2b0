"""HTTP face of the certification pipeline.

Thin by design: routes validate with the schema models, call the library
functions, and translate failures.  Input problems that pydantic cannot
see (an unrepresentable parity, a sampling budget below the seed count)
come back as 422 like the validation errors they are; a numerical stage
genuinely breaking inside the pipeline is a 500 carrying the stage name.
"""

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..certify import SCHEMA, Certificate, certify_dimension, table
from ..curvature import max_abs_curvature
from ..errors import BudgetTooSmall, InvalidSpec, PipelineError, UnrepresentableGenerator
from ..exactalg import PolySpec, build_polynomial
from ..solvgroup import assemble_generator
from ..spectra import (
    cross_check_roots,
    roots_closed_form,
    roots_iterative,
    verify_spectral_bound,
)
from .schemas import (
    CertificateResponse,
    CertifyRequest,
    CurvatureRequest,
    CurvatureResponse,
    HealthResponse,
    RootsRequest,
    RootsResponse,
    StageError,
    TableErrorResponse,
    TableRequest,
    TableResponse,
)

_CLIENT_FAULTS = (InvalidSpec, BudgetTooSmall, UnrepresentableGenerator)


def _cert_response(cert: Certificate) -> CertificateResponse:
    return CertificateResponse(**cert.to_json_dict(with_runtime=True))


def _raise_for(exc: PipelineError) -> None:
    cause = exc.__cause__
    if isinstance(cause, _CLIENT_FAULTS):
        raise HTTPException(status_code=422, detail=str(cause)) from exc
    raise HTTPException(
        status_code=500, detail={"stage": exc.stage, "message": str(exc)}
    ) from exc


def create_app() -> FastAPI:
    app = FastAPI(title="pinchcert", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/certify", response_model=CertificateResponse)
    def certify(req: CertifyRequest) -> CertificateResponse:
        try:
            cert = certify_dimension(
                req.n,
                budget=req.budget,
                seed=req.seed,
                t_grid=req.t_grid,
                paper_mode=req.paper_mode,
            )
        except PipelineError as exc:
            _raise_for(exc)
        return _cert_response(cert)

    @app.post("/table", response_model=TableResponse)
    def run_table(req: TableRequest) -> TableResponse:
        rows = table(
            req.dims,
            budget=req.budget,
            seed=req.seed,
            t_grid=req.t_grid,
            paper_mode=req.paper_mode,
            even_only=req.even_only,
        )
        out = [
            _cert_response(r)
            if isinstance(r, Certificate)
            else TableErrorResponse(
                schema_=SCHEMA, n=r.n, error=StageError(stage=r.stage, message=r.message)
            )
            for r in rows
        ]
        return TableResponse(schema_=SCHEMA, rows=out)

    @app.post("/roots", response_model=RootsResponse)
    def roots(req: RootsRequest) -> RootsResponse:
        try:
            spec = PolySpec.for_dimension(req.n)
            spectrum = roots_closed_form(spec)
            mismatch = cross_check_roots(spectrum, roots_iterative(build_polynomial(spec)))
        except _CLIENT_FAULTS as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        bound = verify_spectral_bound(spectrum)
        return RootsResponse(
            schema_=SCHEMA,
            cross_check_mismatch=mismatch,
            spectral_bound_holds=bound.holds,
            spectral_margin=bound.margin,
            **spectrum.to_json_dict(),
        )

    @app.post("/curvature", response_model=CurvatureResponse)
    def curvature(req: CurvatureRequest) -> CurvatureResponse:
        try:
            spectrum = roots_closed_form(PolySpec.for_dimension(req.n))
            report = max_abs_curvature(
                assemble_generator(spectrum), budget=req.budget, seed=req.seed
            )
        except _CLIENT_FAULTS as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return CurvatureResponse(schema_=SCHEMA, n=req.n, **report.to_json_dict())

    return app


app = create_app()
