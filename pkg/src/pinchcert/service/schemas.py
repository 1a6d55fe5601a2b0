"""Request and response models for the certification service.

Two response field names collide with Python or pydantic internals:
the document format tag is exposed as JSON key "schema" (shadowing the
BaseModel namespace) and a root's log-modulus as "lambda" (a keyword).
Both get safe Python names with serialization through aliases.
"""

from pydantic import BaseModel, ConfigDict, Field


class CertifyRequest(BaseModel):
    n: int = Field(ge=2, description="dimension of the construction")
    budget: int = Field(default=4096, ge=1)
    seed: int = 0
    t_grid: int = Field(default=64, ge=16)
    paper_mode: bool = False


class TableRequest(BaseModel):
    dims: list[int] = Field(min_length=1)
    budget: int = Field(default=4096, ge=1)
    seed: int = 0
    t_grid: int = Field(default=64, ge=16)
    paper_mode: bool = False
    even_only: bool = False


class RootsRequest(BaseModel):
    n: int = Field(ge=2)


class CurvatureRequest(BaseModel):
    n: int = Field(ge=2)
    budget: int = Field(default=1024, ge=1)
    seed: int = 0


class CertificateResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_: str = Field(alias="schema")
    n: int
    k: int
    sign: int
    odd_factor: bool
    lambda_max: float
    spectral_bound_holds: bool
    spectral_margin: float
    curv_bound: float
    curv_sampled_max: float
    h: int
    diam_upper: float
    diam_upper_paper: float
    product: float
    product_paper: float
    target: float
    passes: bool
    passes_paper_mode: bool
    not_nilcoverable_witness: float
    seed: int
    runtime_ms: float


class StageError(BaseModel):
    stage: str
    message: str


class TableErrorResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_: str = Field(alias="schema")
    n: int
    error: StageError


class TableResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_: str = Field(alias="schema")
    rows: list[CertificateResponse | TableErrorResponse]


class RootPair(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    log_modulus: float = Field(alias="lambda")
    phi: float


class RootsResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_: str = Field(alias="schema")
    n: int
    pairs: list[RootPair]
    reals: list[float]
    lambda_max: float
    spectral_bound_holds: bool
    spectral_margin: float
    cross_check_mismatch: float


class PlaneResponse(BaseModel):
    u: list[float]
    w: list[float]


class CurvatureResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_: str = Field(alias="schema")
    n: int
    max_abs: float
    argmax_plane: PlaneResponse
    analytic_bound: float
    samples_used: int
    seed: int


class HealthResponse(BaseModel):
    status: str
    version: str
