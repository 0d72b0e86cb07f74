"""HTTP service exposing the library; the CLI drives it in process.

Run standalone with:  uvicorn ehrfan.service:app

Every endpoint is a POST with a pydantic request model composing the
shared JSON documents.  Responses are canonical JSON (sorted keys,
big integers as decimal strings).  Domain errors return 422 with
{"error": {"code", "message", "witness"}}; malformed requests return 400
with code MALFORMED_INPUT.  A long-running server keeps certificate and
evaluation caches warm across requests.
"""

from __future__ import annotations

import json
from typing import Any, Literal, Union

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .errors import EhrfanError
from .ehrhart import (
    EhrhartFailure,
    ehrhart_polynomial,
    eval_chi,
    is_ehrhart,
    volume_eval,
)
from .fan import is_balanced, is_complete, product_fan, star_fan, stellar_subdivision
from .matroid import bergman_fan, chi_matroid
from .pering import chi_tilde, pe_normal_form, verify_maxmin_relation
from .polytope import chi_via_alternating_sum, count_lattice_points, polytope_from_pl
from .serialize import (
    big_safe,
    bergman_to_dict,
    fan_from_dict,
    fan_to_dict,
    matroid_from_dict,
    pe_from_dict,
    pe_to_dict,
    pl_from_dict,
    poly_to_dict,
    polytope_to_dict,
)


class CanonicalJSONResponse(JSONResponse):
    def render(self, content: Any) -> bytes:
        return json.dumps(big_safe(content), sort_keys=True,
                          separators=(",", ":")).encode("utf-8")


app = FastAPI(title="ehrfan", version=__version__,
              default_response_class=CanonicalJSONResponse)


@app.exception_handler(EhrfanError)
async def domain_error_handler(_request, exc: EhrfanError):
    return CanonicalJSONResponse({"error": exc.payload()}, status_code=422)


@app.exception_handler(RequestValidationError)
async def malformed_handler(_request, exc: RequestValidationError):
    details = [{"loc": [str(p) for p in e.get("loc", ())], "msg": str(e.get("msg", ""))}
               for e in exc.errors()]
    return CanonicalJSONResponse(
        {"error": {"code": "MALFORMED_INPUT", "message": "request failed validation",
                   "witness": details}},
        status_code=400,
    )


# -- request documents ---------------------------------------------------

Int = Union[int, str]  # decimal strings carry integers beyond 64 bits


class FanDoc(BaseModel):
    ambient_dim: int
    rays: list[list[Int]]
    maximal_cones: list[list[int]]


class PLDoc(BaseModel):
    values: list[Int]


class PEDocTerm(BaseModel):
    c: Int
    values: list[Int]


class PEDoc(BaseModel):
    terms: list[PEDocTerm]


class UniformMatroidDoc(BaseModel):
    type: Literal["uniform"]
    rank: int
    n: int


class BasesMatroidDoc(BaseModel):
    type: Literal["bases"]
    ground_size: int
    bases: list[list[int]]


class GraphicMatroidDoc(BaseModel):
    type: Literal["graphic"]
    vertices: int
    edges: list[list[int]]


MatroidDoc = Union[UniformMatroidDoc, BasesMatroidDoc, GraphicMatroidDoc]


class FanRequest(BaseModel):
    fan: FanDoc


class ConeRequest(BaseModel):
    fan: FanDoc
    cone: list[int]


class TwoFanRequest(BaseModel):
    fan: FanDoc
    fan2: FanDoc


class FanPLRequest(BaseModel):
    fan: FanDoc
    pl: PLDoc


class EvalRequest(BaseModel):
    fan: FanDoc
    pl: PLDoc
    acknowledge_choice_dependence: bool = False


class CountRequest(BaseModel):
    fan: FanDoc
    pl: PLDoc
    interior: bool = False


class AltsumRequest(BaseModel):
    fan: FanDoc
    pl: PLDoc
    max_shells: int = Field(default=64, ge=1)


class MatroidRequest(BaseModel):
    matroid: MatroidDoc = Field(discriminator="type")


class MatroidPLRequest(BaseModel):
    matroid: MatroidDoc = Field(discriminator="type")
    pl: PLDoc


class PERequest(BaseModel):
    fan: FanDoc
    pe: PEDoc


class MaxMinRequest(BaseModel):
    fan: FanDoc
    pl: PLDoc
    pl2: PLDoc


def _fan(doc: FanDoc, require_unimodular: bool = True):
    return fan_from_dict(doc.model_dump(), require_unimodular=require_unimodular)


# -- endpoints ------------------------------------------------------------


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/fan/validate")
def fan_validate(req: FanRequest):
    fan = _fan(req.fan, require_unimodular=False)
    balanced = None
    try:
        balanced = is_balanced(fan)
    except EhrfanError:
        pass  # purity failures just leave the field null
    return {
        "valid": True,
        "ambient_dim": fan.ambient_dim,
        "dim": fan.dim,
        "n_rays": fan.n_rays,
        "n_cones": len(fan.cones),
        "unimodular": fan.is_unimodular,
        "complete": is_complete(fan),
        "balanced": balanced,
    }


@app.post("/fan/star")
def fan_star(req: ConeRequest):
    fan = _fan(req.fan)
    star = star_fan(fan, tuple(req.cone))
    return {
        "fan": fan_to_dict(star.fan),
        "ray_lift": list(star.ray_lift),
        "projection": [list(r) for r in star.projection.entries],
    }


@app.post("/fan/subdivide")
def fan_subdivide(req: ConeRequest):
    fan = _fan(req.fan)
    sub = stellar_subdivision(fan, tuple(req.cone))
    return {"fan": fan_to_dict(sub.fan), "new_ray_index": sub.new_ray_index}


@app.post("/fan/product")
def fan_product(req: TwoFanRequest):
    fan = product_fan(_fan(req.fan), _fan(req.fan2))
    return {"fan": fan_to_dict(fan)}


@app.post("/ehrhart/check")
def ehrhart_check(req: FanRequest):
    fan = _fan(req.fan)
    result = is_ehrhart(fan)
    if isinstance(result, EhrhartFailure):
        raise EhrfanError("fan is not Ehrhart", code="NOT_EHRHART", witness=result.payload())
    return {"ehrhart": True, "polynomial": poly_to_dict(result.polynomial)}


@app.post("/ehrhart/poly")
def ehrhart_poly(req: FanRequest):
    fan = _fan(req.fan)
    return {"polynomial": poly_to_dict(ehrhart_polynomial(fan))}


@app.post("/ehrhart/eval")
def ehrhart_eval(req: EvalRequest):
    fan = _fan(req.fan)
    f = pl_from_dict(req.pl.model_dump(), fan)
    return {"chi": eval_chi(fan, f, acknowledge_choice_dependence=req.acknowledge_choice_dependence)}


@app.post("/volume/eval")
def volume_eval_endpoint(req: FanPLRequest):
    fan = _fan(req.fan)
    f = pl_from_dict(req.pl.model_dump(), fan)
    return {"volume": volume_eval(fan, f)}


@app.post("/polytope/count")
def polytope_count(req: CountRequest):
    fan = _fan(req.fan)
    f = pl_from_dict(req.pl.model_dump(), fan)
    poly, vertices = polytope_from_pl(fan, f)
    return {
        "count": count_lattice_points(poly, interior=req.interior),
        "polytope": polytope_to_dict(poly),
        "vertices": [list(v) for v in vertices],
    }


@app.post("/polytope/altsum")
def polytope_altsum(req: AltsumRequest):
    fan = _fan(req.fan)
    f = pl_from_dict(req.pl.model_dump(), fan)
    return {"chi": chi_via_alternating_sum(fan, f, max_shells=req.max_shells)}


@app.post("/matroid/bergman")
def matroid_bergman(req: MatroidRequest):
    bergman = bergman_fan(matroid_from_dict(req.matroid.model_dump()))
    return bergman_to_dict(bergman)


@app.post("/matroid/chi")
def matroid_chi(req: MatroidPLRequest):
    m = matroid_from_dict(req.matroid.model_dump())
    bergman = bergman_fan(m)
    f = pl_from_dict(req.pl.model_dump(), bergman.fan)
    return {"chi": chi_matroid(m, f, bergman=bergman)}


@app.post("/pe/normalform")
def pe_normalform(req: PERequest):
    fan = _fan(req.fan)
    element = pe_from_dict(req.pe.model_dump(), fan)
    return {"pe": pe_to_dict(pe_normal_form(element))}


@app.post("/pe/chi")
def pe_chi(req: PERequest):
    fan = _fan(req.fan)
    element = pe_from_dict(req.pe.model_dump(), fan)
    return {"chi": chi_tilde(element)}


@app.post("/pe/verify-maxmin")
def pe_verify_maxmin(req: MaxMinRequest):
    fan = _fan(req.fan)
    f = pl_from_dict(req.pl.model_dump(), fan)
    g = pl_from_dict(req.pl2.model_dump(), fan)
    return {"holds": verify_maxmin_relation(fan, f, g)}
