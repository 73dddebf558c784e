"""FastAPI service wrapping the core package.

One endpoint per workbench operation; every handler parses the wire
formats, calls the corresponding pure function and returns exact values as
strings.  Handlers hold no per-request state beyond the shared norm and
membership caches, which are idempotent, so the service scales to
concurrent clients.

Error mapping: precondition violations are 400 (usage), exhausted budgets
and searches are 409 (resource).  Mathematical "no" answers (a failed
verification, a failed separation step) are ordinary 200 responses with
the verdict in the body.
"""

from __future__ import annotations

from fractions import Fraction

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import PreconditionError, ResourceBudgetError, SearchExhaustedError
from ..ordinal import OrdinalError, assoc, classify, compare
from ..schreier import (
    DEFAULT_ENUM_WIDTH,
    ExplicitFamily,
    FinSet,
    SchreierFamily,
    enumerate_members,
    member,
    restrict_family,
    threshold,
)
from ..normmodel import DEFAULT_A1_BUDGET, a1_search, kpoints, norm
from ..blockcert import (
    DEFAULT_TAU_BUDGET,
    DEFAULT_VERIFY_BUDGET,
    chain_inequality_check,
    check_domination,
    dominated_chain_search,
    find_zero_eps_block,
    restrict_cert,
    tau_estimate,
    verify_alpha_eps,
    verify_chain,
)
from ..goodness import MPAbort, is_good, prop_mP_run, rho_norms_check
from .. import wire
from . import schemas as S

app = FastAPI(
    title="schreierlab",
    description="Exact-arithmetic workbench for Schreier families, "
    "Tsirelson-type norms, block certificates and norming measures",
    version="0.1.0",
)


@app.exception_handler(PreconditionError)
@app.exception_handler(OrdinalError)
async def _usage_error(request: Request, exc: Exception):
    return JSONResponse(
        status_code=400, content={"error": {"kind": "usage", "message": str(exc)}}
    )


@app.exception_handler(ResourceBudgetError)
@app.exception_handler(SearchExhaustedError)
async def _resource_error(request: Request, exc: Exception):
    detail = {"kind": "resource", "message": str(exc)}
    diagnostic = getattr(exc, "diagnostic", None)
    if diagnostic is not None:
        detail["diagnostic"] = _jsonable(diagnostic)
    return JSONResponse(status_code=409, content={"error": detail})


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, FinSet):
        return wire.finset_json(obj)
    if isinstance(obj, Fraction):
        return wire.frac_str(obj)
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    return str(obj)


# -- ordinal -------------------------------------------------------------------


@app.post("/ordinal/compare", response_model=S.OrdinalCompareResponse)
def ordinal_compare(req: S.OrdinalCompareRequest):
    order = compare(wire.parse_ordinal(req.a), wire.parse_ordinal(req.b))
    return S.OrdinalCompareResponse(order=order.value)


@app.post("/ordinal/classify", response_model=S.OrdinalClassifyResponse)
def ordinal_classify(req: S.OrdinalClassifyRequest):
    kind, pred = classify(wire.parse_ordinal(req.ordinal))
    return S.OrdinalClassifyResponse(
        kind=kind.value,
        predecessor=wire.ordinal_str(pred) if pred is not None else None,
    )


@app.post("/ordinal/assoc", response_model=S.OrdinalAssocResponse)
def ordinal_assoc(req: S.OrdinalAssocRequest):
    out = assoc(wire.parse_ordinal(req.ordinal), req.n)
    return S.OrdinalAssocResponse(result=wire.ordinal_str(out))


# -- schreier ------------------------------------------------------------------


@app.post("/schreier/member", response_model=S.MemberResponse)
def schreier_member(req: S.MemberRequest):
    return S.MemberResponse(
        member=member(wire.parse_finset(req.elements), wire.parse_ordinal(req.alpha))
    )


@app.post("/schreier/enum", response_model=S.EnumResponse)
def schreier_enum(req: S.EnumRequest):
    width = req.budget if req.budget is not None else DEFAULT_ENUM_WIDTH
    sets = enumerate_members(
        wire.parse_ordinal(req.alpha), req.lo, req.hi, maximal=req.maximal, max_width=width
    )
    return S.EnumResponse(sets=[wire.finset_json(f) for f in sets])


@app.post("/schreier/threshold", response_model=S.ThresholdResponse)
def schreier_threshold(req: S.ThresholdRequest):
    out = threshold(
        wire.parse_ordinal(req.from_level), wire.parse_ordinal(req.to_level), req.width
    )
    return S.ThresholdResponse(n=out.n, verified_up_to=out.verified_up_to)


@app.post("/schreier/restrict", response_model=S.RestrictFamilyResponse)
def schreier_restrict(req: S.RestrictFamilyRequest):
    fam = req.family
    if fam.get("kind") == "schreier":
        handle = SchreierFamily(wire.parse_ordinal(fam["alpha"]))
    elif fam.get("kind") == "explicit":
        handle = ExplicitFamily.closure(
            wire.parse_finset(m) for m in fam.get("members", [])
        )
    else:
        raise PreconditionError("family kind must be 'schreier' or 'explicit'")
    out = restrict_family(handle, wire.parse_finset(req.m), req.window)
    return S.RestrictFamilyResponse(
        members=[wire.finset_json(f) for f in out.sorted_members()]
    )


# -- norms ---------------------------------------------------------------------


@app.post("/norm/eval", response_model=S.NormEvalResponse)
def norm_eval(req: S.NormEvalRequest):
    model = wire.parse_model(req.model)
    value = norm(model, wire.parse_suppvec(req.vec))
    return S.NormEvalResponse(norm=wire.frac_str(value))


@app.post("/norm/a1-search", response_model=S.A1SearchResponse)
def norm_a1_search(req: S.A1SearchRequest):
    model = wire.parse_model(req.model)
    budget = req.budget if req.budget is not None else DEFAULT_A1_BUDGET
    res = a1_search(
        model, req.lo, req.hi, [wire.parse_frac(c) for c in req.coeff_grid], budget
    )
    return S.A1SearchResponse(
        worst_ratio=wire.frac_str(res.worst_ratio) if res.worst_ratio is not None else None,
        witness=(
            [wire.suppvec_json(b) for b in res.witness.blocks]
            if res.witness is not None
            else None
        ),
        evaluations=res.evaluations,
        partial=res.partial,
        violation=res.violation,
    )


@app.post("/norm/kpoints", response_model=S.KPointsResponse)
def norm_kpoints(req: S.KPointsRequest):
    model = wire.parse_model(req.model)
    pts = list(kpoints(model, req.lo, req.hi, req.depth))
    return S.KPointsResponse(points=[wire.kpoint_json(t) for t in pts])


# -- block certificates --------------------------------------------------------


@app.post("/block/find0", response_model=S.Find0Response)
def block_find0(req: S.Find0Request):
    model = wire.parse_model(req.model)
    budget = req.budget if req.budget is not None else DEFAULT_VERIFY_BUDGET
    res = find_zero_eps_block(
        model, req.lo, req.hi, wire.parse_radical(req.eps), verify_budget=budget
    )
    return S.Find0Response(
        cert=wire.cert_json(res.cert, verified=res.verdict.passed),
        verified=res.verdict.passed,
        tau_hat=wire.frac_str(res.tau_hat),
        delta=wire.frac_str(res.delta),
        eps0=wire.frac_str(res.eps0),
        m=res.m,
        m0=res.m0,
        proof_scale_m0=res.proof_scale_m0,
    )


@app.post("/block/verify", response_model=S.VerifyCertResponse)
def block_verify(req: S.VerifyCertRequest):
    cert = wire.parse_cert(req.cert)
    budget = req.budget if req.budget is not None else DEFAULT_VERIFY_BUDGET
    verdict = verify_alpha_eps(cert, budget=budget)
    return S.VerifyCertResponse(
        passed=verdict.passed,
        condition=verdict.condition,
        violating=wire.finset_json(verdict.violating) if verdict.violating else None,
    )


@app.post("/block/restrict", response_model=S.RestrictCertResponse)
def block_restrict(req: S.RestrictCertRequest):
    out = restrict_cert(wire.parse_cert(req.cert), wire.parse_finset(req.i0))
    return S.RestrictCertResponse(cert=wire.cert_json(out))


@app.post("/block/tau", response_model=S.TauResponse)
def block_tau(req: S.TauRequest):
    model = wire.parse_model(req.model)
    budget = req.budget if req.budget is not None else DEFAULT_TAU_BUDGET
    res = tau_estimate(model, req.lo, req.hi, budget=budget)
    return S.TauResponse(**wire.tau_json(res))


# -- chains --------------------------------------------------------------------


@app.post("/chain/search", response_model=S.ChainSearchResponse)
def chain_search(req: S.ChainSearchRequest):
    model = wire.parse_model(req.model)
    budget = req.budget if req.budget is not None else DEFAULT_VERIFY_BUDGET
    res = dominated_chain_search(
        model,
        req.lo,
        req.hi,
        wire.parse_frac(req.delta),
        req.length,
        alpha=wire.parse_ordinal(req.alpha),
        eps_seq=(
            tuple(wire.parse_frac(e) for e in req.eps_seq)
            if req.eps_seq is not None
            else None
        ),
        verify_budget=budget,
    )
    return S.ChainSearchResponse(
        chain=wire.chain_json(res.cert, verified=True),
        t0=wire.kpoint_json(res.t0),
        points=[wire.kpoint_json(p) for p in res.points],
        tau_hat=wire.frac_str(res.tau_hat),
        delta=wire.frac_str(res.delta),
    )


@app.post("/chain/verify", response_model=S.ChainVerifyResponse)
def chain_verify(req: S.ChainVerifyRequest):
    budget = req.budget if req.budget is not None else DEFAULT_VERIFY_BUDGET
    verdict = verify_chain(wire.parse_chain(req.chain), verify_budget=budget)
    return S.ChainVerifyResponse(
        passed=verdict.passed, condition=verdict.condition, detail=verdict.detail
    )


@app.post("/chain/check-l3", response_model=S.CheckL3Response)
def chain_check_l3(req: S.CheckL3Request):
    res = chain_inequality_check(
        wire.parse_chain(req.chain),
        [wire.parse_kpoint(p) for p in req.points],
        wire.parse_frac(req.tau_hat),
        wire.parse_frac(req.delta),
        wire.parse_finset(req.j),
    )
    return S.CheckL3Response(
        lhs=wire.frac_str(res.lhs), rhs=wire.frac_str(res.rhs), holds=res.holds
    )


@app.post("/chain/check-l4", response_model=S.CheckL4Response)
def chain_check_l4(req: S.CheckL4Request):
    res = check_domination(
        wire.parse_chain(req.chain),
        wire.parse_kpoint(req.t0),
        [wire.parse_kpoint(p) for p in req.points],
        wire.parse_frac(req.tau_hat),
        wire.parse_frac(req.delta),
    )
    return S.CheckL4Response(holds=res.holds, violations=list(res.violations))


# -- measure separation --------------------------------------------------------


@app.post("/msep/run", response_model=S.MsepRunResponse)
def msep_run(req: S.MsepRunRequest):
    family = wire.parse_family(req.family)
    kwargs = {}
    if req.q_max is not None:
        kwargs["q_max"] = req.q_max
    try:
        res = prop_mP_run(
            family,
            wire.parse_ordinal(req.alpha),
            wire.parse_frac(req.rho),
            wire.parse_eps_seq(req.eps_seq),
            wire.parse_finset(req.window),
            **kwargs,
        )
    except MPAbort as exc:
        return S.MsepRunResponse(
            ok=False,
            failing_step=exc.step,
            selected=[],
            image=[],
            transcript=(
                wire.transcript_json(exc.transcript) if exc.transcript else None
            ),
        )
    return S.MsepRunResponse(
        ok=res.ok,
        failing_step=res.failing_step,
        selected=wire.finset_json(res.selected),
        image=wire.finset_json(res.image),
        transcript=wire.transcript_json(res.transcript),
    )


@app.post("/msep/check-norming", response_model=S.CheckNormingResponse)
def msep_check_norming(req: S.CheckNormingRequest):
    family = wire.parse_family(req.family)
    res = rho_norms_check(
        family,
        wire.parse_finset(req.pool),
        [wire.parse_frac(c) for c in req.coeff_grid],
        wire.parse_frac(req.rho),
        max_support=req.max_support,
    )
    return S.CheckNormingResponse(
        passed=res.passed,
        worst=wire.frac_str(res.worst),
        witness=wire.suppvec_json(res.witness) if res.witness is not None else None,
        grid_size=res.grid_size,
        note=res.note,
    )


@app.post("/msep/good", response_model=S.GoodResponse)
def msep_good(req: S.GoodRequest):
    family = wire.parse_family(req.family)
    if not (0 <= req.measure_index < len(family.members)):
        raise PreconditionError("measure_index out of range")
    out = is_good(
        family.members[req.measure_index],
        wire.parse_finset(req.prefix),
        req.n,
        wire.parse_frac(req.rho),
        wire.parse_eps_seq(req.eps_seq),
    )
    return S.GoodResponse(good=out)
