"""Block certificates: level-threshold blocks, strong norming, restriction
permanence, the asymptotic-l1 modulus, chains, and block assembly.

A level certificate (AlphaEpsCert) packages a normalized positive block u,
a level ordinal alpha, a threshold eps and a point t0, and claims:

  (1) every restriction u|J with norm >= eps is (1+eps)-dominated by its
      pairing with t0, and
  (2) every restriction along a level-alpha set has norm < eps**2.

Verification is exhaustive over subsets J, never sampled; searches below
construct candidates and re-verify them through the same verifier (they
never self-certify).  Thresholds may be iterated square roots of rationals
(restriction halves the exponent), so comparisons go through Radical.

Verification visits subsets in lexicographic order and reports the first
violating J; a parallel scan must reduce to the same J, so results are
schedule-independent by construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import PreconditionError, ResourceBudgetError, SearchExhaustedError
from .ordinal import ZERO, Ordinal, assoc
from .radicals import Radical, le_scaled, lt_scaled, rational_sqrt
from .schreier import EMPTY, FinSet, _member, member, members_over
from .normmodel import (
    BlockSeq,
    KPoint,
    Leaf,
    Node,
    SetPoint,
    SpaceModel,
    SuppVec,
    TreePoint,
    eval_f,
    norm,
    validate_kpoint,
)

DEFAULT_VERIFY_BUDGET = 20  # largest support verified exhaustively (2**20 subsets)
DEFAULT_TAU_BUDGET = 5000  # norm evaluations per tau_estimate run
VERIFIER_VERSION = "1"


@dataclass(frozen=True)
class Block:
    """A normalized block with strictly positive coefficients."""

    vec: SuppVec
    model: SpaceModel

    def __post_init__(self):
        if self.vec.is_zero:
            raise PreconditionError("a block cannot be zero")
        if not self.vec.is_nonnegative():
            raise PreconditionError("block coefficients must be positive")
        if norm(self.model, self.vec) != 1:
            raise PreconditionError("blocks must be normalized exactly")

    def support(self) -> FinSet:
        return self.vec.support()


@dataclass(frozen=True)
class AlphaEpsCert:
    """Certificate data for a level-threshold block; see module docstring."""

    block: Block
    alpha: Ordinal
    eps: Radical
    t0: KPoint

    def __post_init__(self):
        object.__setattr__(self, "eps", Radical.of(self.eps))
        if not (self.eps.cmp_fraction(0) > 0 and self.eps.cmp_fraction(1) < 0):
            raise PreconditionError("eps must lie in (0,1)")

    @property
    def model(self) -> SpaceModel:
        return self.block.model


@dataclass(frozen=True)
class Verdict:
    passed: bool
    condition: Optional[int] = None  # 1 or 2
    violating: Optional[FinSet] = None

    def __str__(self):
        if self.passed:
            return "Pass"
        return f"Fail(condition {self.condition}, J={self.violating})"


_verdict_cache: Dict[AlphaEpsCert, Verdict] = {}


def verify_alpha_eps(cert: AlphaEpsCert, budget: int = DEFAULT_VERIFY_BUDGET) -> Verdict:
    """Exhaustive check of both certificate conditions over all subsets of
    the support; the lexicographically first violating J is reported.

    Subtrees that can satisfy neither condition are pruned: the coefficient
    sum bounds every restriction norm from above, so a branch whose total
    possible sum stays below eps cannot trigger condition 1, and supersets
    of a non-member set cannot trigger condition 2.  Completed verdicts are
    cached per certificate (idempotent, safe under concurrent insertion).
    """
    hit = _verdict_cache.get(cert)
    if hit is not None:
        return hit
    u, model, eps, t0 = cert.block.vec, cert.model, cert.eps, cert.t0
    supp = u.support()
    if len(supp) > budget:
        raise ResourceBudgetError(
            f"support size {len(supp)} exceeds the exhaustive verify budget {budget}",
            required=len(supp),
            budget=budget,
        )
    validate_kpoint(model, t0)
    elems = supp.elements
    coeffs = [u.coeff(i) for i in elems]
    fvals = [eval_f(model, t0, i) for i in elems]
    n = len(elems)
    suffix = [Fraction(0)] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + coeffs[i]
    eps2 = eps.squared()
    whole_in_family = member(supp, cert.alpha)
    schreier_flat = model.kind == "schreier" and member(supp, model.alpha)

    def restriction_norm(j: Tuple[int, ...], lam: Fraction) -> Fraction:
        if schreier_flat:
            return lam  # hereditary: every J is itself a norming set
        return norm(model, u.restrict(FinSet(j)))

    def visit(
        start: int, j: Tuple[int, ...], lam: Fraction, pair: Fraction, in_family: bool
    ) -> Optional[Verdict]:
        nrm: Optional[Fraction] = None
        if in_family and eps2.cmp_fraction(lam) <= 0:
            nrm = restriction_norm(j, lam)
            if eps2.cmp_fraction(nrm) <= 0:
                return Verdict(False, 2, FinSet(j))
        if eps.cmp_fraction(lam) <= 0:
            if nrm is None:
                nrm = restriction_norm(j, lam)
            if eps.cmp_fraction(nrm) <= 0 and not le_scaled(nrm, eps, pair):
                return Verdict(False, 1, FinSet(j))
        for i in range(start, n):
            child = j + (elems[i],)
            child_in_family = in_family and (
                whole_in_family or _member(child, cert.alpha)
            )
            reachable = eps.cmp_fraction(lam + suffix[i]) <= 0
            if child_in_family or reachable:
                bad = visit(
                    i + 1,
                    child,
                    lam + coeffs[i],
                    pair + coeffs[i] * fvals[i],
                    child_in_family,
                )
                if bad is not None:
                    return bad
        return None

    bad = visit(0, (), Fraction(0), Fraction(0), True)
    out = bad if bad is not None else Verdict(True)
    _verdict_cache[cert] = out
    return out


def cond1_holds_at(
    cert: AlphaEpsCert, j: FinSet, *, point: Optional[KPoint] = None
) -> bool:
    """Condition (1) at a single restriction J (vacuous below threshold)."""
    model, u, eps = cert.model, cert.block.vec, cert.eps
    t = point if point is not None else cert.t0
    nrm = norm(model, u.restrict(j))
    if eps.cmp_fraction(nrm) > 0:
        return True
    pair = sum((u.coeff(i) * eval_f(model, t, i) for i in j), Fraction(0))
    return le_scaled(nrm, eps, pair)


def strongly_norms(
    cert: AlphaEpsCert, point: KPoint, budget: int = DEFAULT_VERIFY_BUDGET
) -> Optional[FinSet]:
    """Exhaustively check that the point satisfies condition (1) for the
    certificate's block; returns a violating J or None."""
    if point == cert.t0:
        hit = _verdict_cache.get(cert)
        if hit is not None and hit.passed:
            return None
    supp = cert.block.support()
    if len(supp) > budget:
        raise ResourceBudgetError(
            f"support size {len(supp)} exceeds budget {budget}",
            required=len(supp),
            budget=budget,
        )
    u, model, eps = cert.block.vec, cert.model, cert.eps
    validate_kpoint(model, point)
    elems = supp.elements
    coeffs = [u.coeff(i) for i in elems]
    fvals = [eval_f(model, point, i) for i in elems]
    n = len(elems)
    suffix = [Fraction(0)] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + coeffs[i]
    schreier_flat = model.kind == "schreier" and member(supp, model.alpha)

    def visit(start, j, lam, pair) -> Optional[FinSet]:
        if eps.cmp_fraction(lam) <= 0:
            nrm = lam if schreier_flat else norm(model, u.restrict(FinSet(j)))
            if eps.cmp_fraction(nrm) <= 0 and not le_scaled(nrm, eps, pair):
                return FinSet(j)
        for i in range(start, n):
            if eps.cmp_fraction(lam + suffix[i]) <= 0:
                bad = visit(
                    i + 1,
                    j + (elems[i],),
                    lam + coeffs[i],
                    pair + coeffs[i] * fvals[i],
                )
                if bad is not None:
                    return bad
        return None

    return visit(0, (), Fraction(0), Fraction(0))


def restrict_cert(cert: AlphaEpsCert, i0: FinSet) -> AlphaEpsCert:
    """Restriction permanence: pass from (alpha, eps) to (alpha, sqrt(eps))
    on a restriction of significant norm, keeping the same norming point."""
    u, model = cert.block.vec, cert.model
    if not i0.issubset(cert.block.support()):
        raise PreconditionError("I0 must be a subset of the support")
    d = norm(model, u.restrict(i0))
    if cert.eps.sqrt().cmp_fraction(d) > 0:
        raise PreconditionError(
            f"restriction norm {d} is below sqrt(eps); the hypothesis fails"
        )
    v = u.restrict(i0).scale(Fraction(1) / d)
    return AlphaEpsCert(
        block=Block(v, model), alpha=cert.alpha, eps=cert.eps.sqrt(), t0=cert.t0
    )


# -- the modulus tau ----------------------------------------------------------


@dataclass(frozen=True)
class TauEstimate:
    lower: Fraction
    witness: Optional[FinSet]  # prefix L = (l_1 < ... < l_{l_1})
    window: Tuple[int, int]
    budget_spent: int
    partial: bool

    def recheck(self, model: SpaceModel) -> bool:
        """The witness must satisfy its defining inequality on recomputation."""
        if self.witness is None:
            return not self.partial
        l1 = self.witness.min()
        vec = SuppVec.of({i: 1 for i in self.witness})
        return len(self.witness) == l1 and norm(model, vec) >= self.lower * l1


def tau_estimate(
    model: SpaceModel, lo: int, hi: int, budget: int = DEFAULT_TAU_BUDGET
) -> TauEstimate:
    """Best lower bound for the modulus achieved by a prefix inside the
    window: max over L = (l_1 < ... < l_{l_1}) of ||sum_i f_{l_i}|| / l_1.

    With budget 0 (or a window too narrow for any prefix) falls back to the
    model's declared constant, flagged partial.
    """
    if lo > hi:
        raise PreconditionError("empty window")
    best: Optional[Fraction] = None
    witness: Optional[FinSet] = None
    evals = 0
    truncated = False
    for l1 in range(max(lo, 1), hi + 1):
        rest_pool = range(l1 + 1, hi + 1)
        if l1 - 1 > len(rest_pool):
            break
        for rest in itertools.combinations(rest_pool, l1 - 1):
            if evals >= budget:
                truncated = True
                break
            evals += 1
            prefix = FinSet((l1,) + rest)
            val = norm(model, SuppVec.of({i: 1 for i in prefix})) / l1
            if best is None or val > best:
                best, witness = val, prefix
            if best == 1:
                return TauEstimate(best, witness, (lo, hi), evals, False)
        if truncated:
            break
    if best is None:
        return TauEstimate(model.a1_constant, None, (lo, hi), evals, True)
    return TauEstimate(best, witness, (lo, hi), evals, truncated)


# -- the two counting claims --------------------------------------------------


def claim1_count(
    model: SpaceModel,
    m: int,
    t: KPoint,
    tau_hat: Fraction,
    delta: Fraction,
    lo: int,
    hi: int,
) -> int:
    """Cardinality of {n in window : n > m and f_n(t) >= tau_hat + 2 delta};
    the caller asserts < m - 1 on a window filtered for the modulus bound."""
    if not (m - 1) * (tau_hat + 2 * delta) > m * (tau_hat + delta):
        raise PreconditionError(
            "claim hypothesis (m-1)(tau+2d) > m(tau+d) fails for this m"
        )
    validate_kpoint(model, t)
    thr = tau_hat + 2 * delta
    return sum(
        1 for nn in range(lo, hi + 1) if nn > m and eval_f(model, t, nn) >= thr
    )


@dataclass(frozen=True)
class Claim2Witness:
    point: Optional[KPoint]
    indices: FinSet


def claim2_witness(
    model: SpaceModel,
    m: int,
    lo: int,
    hi: int,
    tau_hat: Fraction,
    delta: Fraction,
    *,
    max_attempts: int = 2000,
) -> Claim2Witness:
    """m indices above m inside the window and a point whose f-values on
    them all reach tau_hat - 2 delta; every inequality re-checked exactly."""
    if m == 0:
        return Claim2Witness(None, EMPTY)
    thr = tau_hat - 2 * delta
    pool = tuple(v for v in range(lo, hi + 1) if v > m)
    if len(pool) < m:
        raise SearchExhaustedError(
            f"window holds only {len(pool)} candidates above {m}, need {m}",
            diagnostic={"pool": len(pool), "needed": m},
        )
    attempts = 0
    for combo in itertools.combinations(pool, m):
        attempts += 1
        if attempts > max_attempts:
            break
        ns = FinSet(combo)
        point = _natural_point(model, ns)
        if point is None:
            continue
        if all(eval_f(model, point, i) >= thr for i in ns):
            return Claim2Witness(point, ns)
    raise SearchExhaustedError(
        "no point reaches the claim threshold on any index tuple; "
        "enlarge the window or lower delta",
        diagnostic={"threshold": str(thr), "attempts": attempts},
    )


def _natural_point(model: SpaceModel, ns: FinSet) -> Optional[KPoint]:
    """The canonical point supported exactly on ns, when admissible."""
    if model.kind == "schreier":
        return SetPoint(ns) if member(ns, model.alpha) else None
    if len(ns) == 1:
        return TreePoint(Leaf(ns.min(), 1))
    if not member(ns, model.alpha):
        return None
    return TreePoint(Node(tuple(Leaf(i, 1) for i in ns)))


# -- the constructive level-zero block ---------------------------------------


@dataclass(frozen=True)
class ZeroBlockResult:
    cert: AlphaEpsCert
    verdict: Verdict
    tau_hat: Fraction
    delta: Fraction
    eps0: Fraction
    m: int
    m0: int
    proof_scale_m0: int  # the a-priori bound; desk windows rarely afford it


def _feasible_delta_eps0(
    tau_hat: Fraction, eps: Radical, *, require_delta_lt_eps0_sq: bool = False
) -> Tuple[Fraction, Fraction]:
    """Deterministic grid scan for (delta, eps0) with
    (tau+2d) < (1+eps)(1-e0)(tau-2d), e0 < eps, 0 < d < tau/2."""
    for dk in range(3, 12):
        delta = tau_hat / 2**dk
        for ek in range(1, 12):
            eps0 = Fraction(1, 2**ek)
            if eps.cmp_fraction(eps0) <= 0:
                continue
            if require_delta_lt_eps0_sq and not delta < eps0 * eps0:
                continue
            lhs = tau_hat + 2 * delta
            scale = (1 - eps0) * (tau_hat - 2 * delta)
            if scale > 0 and lt_scaled(lhs, eps, scale):
                return delta, eps0
    raise PreconditionError(
        f"no (delta, eps0) satisfies the display inequality at tau={tau_hat}, eps={eps}"
    )


def find_zero_eps_block(
    model: SpaceModel,
    lo: int,
    hi: int,
    eps,
    *,
    delta: Optional[Fraction] = None,
    eps0: Optional[Fraction] = None,
    tau_budget: int = DEFAULT_TAU_BUDGET,
    verify_budget: int = DEFAULT_VERIFY_BUDGET,
) -> ZeroBlockResult:
    """Constructive level-zero certificate on the window, following the
    modulus argument: estimate tau, fix (delta, eps0) by the display
    inequality, take the least cardinality bound m, then grow the average
    size m0 until the exhaustive verifier passes.

    The a-priori size bound m < C eps0**2 m0 is reported but not imposed:
    it exceeds any desk window by orders of magnitude, and the exhaustive
    re-verification supplies what the counting claims guarantee at scale.
    """
    eps = Radical.of(eps)
    if not (eps.cmp_fraction(0) > 0 and eps.cmp_fraction(1) < 0):
        raise PreconditionError("eps must lie in (0,1)")
    tau = tau_estimate(model, lo, hi, budget=tau_budget)
    tau_hat = tau.lower
    if delta is None or eps0 is None:
        delta, eps0 = _feasible_delta_eps0(tau_hat, eps)
    m = int((tau_hat + 2 * delta) / delta) + 1  # least m with m*delta > tau+2*delta
    proof_scale_m0 = int(m / (model.a1_constant * eps0 * eps0)) + 1
    eps2 = eps.squared()
    capacity = sum(1 for v in range(lo, hi + 1))
    first_failure: Optional[Verdict] = None
    for m0 in range(2, capacity + 1):
        if m0 > verify_budget:
            raise ResourceBudgetError(
                f"required average size {m0} exceeds the verify budget {verify_budget}",
                required=m0,
                budget=verify_budget,
            )
        # a sound upper bound for the norm of the 0/1 average rules out
        # sizes whose largest coefficient cannot reach eps**2 yet, without
        # paying for an exact norm
        upper = (
            Fraction(m0)
            if model.kind == "schreier"
            else max(Fraction(1), model.theta * m0)
        )
        if eps2.cmp_fraction(Fraction(1) / upper) <= 0:
            continue
        try:
            witness = claim2_witness(model, m0, lo, hi, tau_hat, delta)
        except SearchExhaustedError:
            break
        ns = witness.indices
        total = SuppVec.of({i: 1 for i in ns})
        d = norm(model, total)
        if eps2.cmp_fraction(Fraction(1, 1) / d) <= 0:
            continue  # largest coefficient not yet below eps**2
        u = total.scale(Fraction(1) / d)
        cert = AlphaEpsCert(
            block=Block(u, model), alpha=ZERO, eps=eps, t0=witness.point
        )
        verdict = verify_alpha_eps(cert, budget=verify_budget)
        if verdict.passed:
            return ZeroBlockResult(
                cert=cert,
                verdict=verdict,
                tau_hat=tau_hat,
                delta=delta,
                eps0=eps0,
                m=m,
                m0=m0,
                proof_scale_m0=proof_scale_m0,
            )
        first_failure = first_failure or verdict
    required = _required_m0(model, eps)
    raise SearchExhaustedError(
        f"window [{lo},{hi}] cannot host the required average size {required}",
        diagnostic={
            "required_m0": required,
            "proof_scale_m0": proof_scale_m0,
            "capacity": capacity,
            "first_failure": str(first_failure) if first_failure else None,
        },
    )


def _required_m0(model: SpaceModel, eps: Radical) -> int:
    # smallest m0 with declared-floor normalization pushing coords below eps**2
    lower = model.a1_constant
    m0 = 2
    while eps.squared().cmp_fraction(Fraction(1) / (lower * m0)) <= 0:
        m0 += 1
        if m0 > 10**6:
            break
    return m0


# -- chains -------------------------------------------------------------------


@dataclass(frozen=True)
class ChainCert:
    """A finite admissible chain of level blocks.

    blocks are u_1 < ... < u_m with m = min supp u_1; each u_i (i >= 2) is
    certified at level (assoc(alpha, d_{i-1}) - 1) with threshold
    eps_seq[d_{i-1}], where d_i = max supp u_i.  eps_seq entries must be
    perfect squares of rationals so the square-root sum stays exact.
    """

    model: SpaceModel
    alpha: Ordinal
    blocks: Tuple[Block, ...]
    eps_seq: Tuple[Fraction, ...]
    d: Tuple[int, ...]
    sub_certs: Tuple[AlphaEpsCert, ...]


@dataclass(frozen=True)
class ChainVerdict:
    passed: bool
    condition: Optional[str] = None  # "1" | "2" | "3" | "eps"
    detail: str = ""

    def __str__(self):
        return "Pass" if self.passed else f"Fail({self.condition}: {self.detail})"


def chain_level(alpha: Ordinal, n: int) -> Ordinal:
    """The level alpha_n = assoc(alpha, n) - 1 used by chain condition 2."""
    return assoc(alpha, n).predecessor()


def verify_chain(cert: ChainCert, verify_budget: int = DEFAULT_VERIFY_BUDGET) -> ChainVerdict:
    blocks = cert.blocks
    m = len(blocks)
    # condition 1: shape
    if m < 2:
        return ChainVerdict(False, "1", f"chain needs m >= 2, got {m}")
    prev_max = 0
    for b in blocks:
        if b.model is not cert.model and b.model != cert.model:
            return ChainVerdict(False, "1", "blocks must share the chain's model")
        supp = b.support()
        if supp.min() <= prev_max:
            return ChainVerdict(False, "1", "block supports must be successive")
        prev_max = supp.max()
    if blocks[0].support().min() != m:
        return ChainVerdict(
            False, "1", f"m = {m} differs from min supp u_1 = {blocks[0].support().min()}"
        )
    if cert.d != tuple(b.support().max() for b in blocks):
        return ChainVerdict(False, "1", "d entries must equal the support maxima")
    # epsilon sequence
    needed = max(cert.d[:-1]) if m >= 2 else 0
    if len(cert.eps_seq) < needed:
        return ChainVerdict(
            False, "eps", f"eps_seq must reach index {needed}, has {len(cert.eps_seq)}"
        )
    roots: List[Fraction] = []
    prev = None
    for k, e in enumerate(cert.eps_seq, start=1):
        if e <= 0:
            return ChainVerdict(False, "eps", f"eps_{k} must be positive")
        r = rational_sqrt(e)
        if r is None:
            return ChainVerdict(
                False, "eps", f"eps_{k} = {e} is not a perfect square of a rational"
            )
        if prev is not None and e > prev:
            return ChainVerdict(False, "eps", "eps_seq must be non-increasing")
        prev = e
        roots.append(r)
    if sum(roots, Fraction(0)) >= 1:
        return ChainVerdict(
            False, "eps", f"sum of square roots is {sum(roots, Fraction(0))} >= 1"
        )
    # condition 2: sub-certificates
    if len(cert.sub_certs) != m - 1:
        return ChainVerdict(False, "2", "need one sub-certificate per block u_2..u_m")
    for i in range(2, m + 1):
        sub = cert.sub_certs[i - 2]
        want_level = chain_level(cert.alpha, cert.d[i - 2])
        want_eps = Radical.of(cert.eps_seq[cert.d[i - 2] - 1])
        if sub.block.vec != blocks[i - 1].vec:
            return ChainVerdict(False, "2", f"sub-certificate {i} covers a different block")
        if sub.alpha != want_level:
            return ChainVerdict(
                False, "2", f"u_{i} must be certified at level {want_level}, got {sub.alpha}"
            )
        if sub.eps != want_eps:
            return ChainVerdict(
                False, "2", f"u_{i} must use eps_{cert.d[i - 2]} = {want_eps}, got {sub.eps}"
            )
        verdict = verify_alpha_eps(sub, budget=verify_budget)
        if not verdict.passed:
            return ChainVerdict(False, "2", f"sub-certificate {i}: {verdict}")
    # condition 3: level compatibility on supports, checked exhaustively
    for i in range(2, m + 1):
        bad = chain_condition3_violation(cert.alpha, cert.d[i - 2], blocks[i - 1].support())
        if bad is not None:
            f, j = bad
            return ChainVerdict(
                False,
                "3",
                f"F={f} lies at level alpha_{j} but not alpha_{cert.d[i - 2]}",
            )
    return ChainVerdict(True)


def chain_condition3_violation(
    alpha: Ordinal, d_prev: int, supp: FinSet
) -> Optional[Tuple[FinSet, int]]:
    """Exhaustive witness search for chain condition 3: a subset of the
    support lying at some level alpha_j (j <= d_prev) but not at level
    alpha_{d_prev}; None when the containment holds throughout."""
    target = chain_level(alpha, d_prev)
    for j in range(1, d_prev + 1):
        low = chain_level(alpha, j)
        if low == target:
            continue
        for f in members_over(supp.elements, low):
            if not member(f, target):
                return f, j
    return None


@dataclass(frozen=True)
class L3Check:
    lhs: Fraction
    rhs: Fraction
    holds: bool


def chain_inequality_check(
    cert: ChainCert,
    points: Sequence[KPoint],
    tau_hat: Fraction,
    delta: Fraction,
    j_set: FinSet,
    *,
    verify_budget: int = DEFAULT_VERIFY_BUDGET,
) -> L3Check:
    """The domination inequality for the normalized chain sum:
    ||u|J|| <= delta + (tau+2delta) * sum_i (u|J cap supp u_i)(t_i),
    computed exactly and reported honestly (it may fail on unfiltered
    desk windows; the point selection lemma only guarantees it after
    window filtering)."""
    blocks = cert.blocks
    if len(points) != len(blocks) - 1:
        raise PreconditionError("need one strong-norming point per block u_2..u_m")
    union = EMPTY
    for b in blocks:
        union = union.union(b.support())
    if not j_set.issubset(union):
        raise PreconditionError("J must lie inside the union of the supports")
    for sub, point in zip(cert.sub_certs, points):
        bad = strongly_norms(sub, point, budget=verify_budget)
        if bad is not None:
            raise PreconditionError(
                f"point {point} does not strongly norm its block (J={bad})"
            )
    total = BlockSeq(tuple(b.vec for b in blocks)).total()
    dnorm = norm(cert.model, total)
    u = total.scale(Fraction(1) / dnorm)
    lhs = norm(cert.model, u.restrict(j_set))
    pair_total = Fraction(0)
    for b, point in zip(blocks[1:], points):
        overlap = j_set.intersect(b.support())
        pair_total += sum(
            (u.coeff(i) * eval_f(cert.model, point, i) for i in overlap), Fraction(0)
        )
    rhs = delta + (tau_hat + 2 * delta) * pair_total
    return L3Check(lhs=lhs, rhs=rhs, holds=lhs <= rhs)


@dataclass(frozen=True)
class DominationCheck:
    holds: bool
    violations: Tuple[Tuple[int, int], ...]  # (block index, coordinate)


def check_domination(
    cert: ChainCert,
    t0: KPoint,
    points: Sequence[KPoint],
    tau_hat: Fraction,
    delta: Fraction,
) -> DominationCheck:
    """f_j(t0) >= (tau - 2 delta) f_j(t_i) for every j in supp u_i, i >= 2;
    every inequality evaluated exactly."""
    if len(points) != len(cert.blocks) - 1:
        raise PreconditionError("need one point per block u_2..u_m")
    validate_kpoint(cert.model, t0)
    thr = tau_hat - 2 * delta
    bad: List[Tuple[int, int]] = []
    for i, (b, point) in enumerate(zip(cert.blocks[1:], points), start=2):
        for j in b.support():
            if eval_f(cert.model, t0, j) < thr * eval_f(cert.model, point, j):
                bad.append((i, j))
    return DominationCheck(holds=not bad, violations=tuple(bad))


@dataclass(frozen=True)
class ChainSearchResult:
    cert: ChainCert
    t0: KPoint
    points: Tuple[KPoint, ...]
    tau_hat: Fraction
    delta: Fraction


def default_chain_eps(upto: int, m: int) -> Tuple[Fraction, ...]:
    """Desk-scale epsilon sequence for chains of length m: square roots
    2^-k for k < m, then (99/100) 2^-(m-1) at index m (the only consumed
    entry for a 2-chain), then a geometric tail inside the leftover margin.
    Sum of roots stays below 1; all entries are perfect squares."""
    roots: List[Fraction] = []
    for k in range(1, min(m, upto) + 1):
        if k < m:
            roots.append(Fraction(1, 2**k))
        else:
            roots.append(Fraction(99, 100) * Fraction(1, 2 ** (m - 1)))
    margin = Fraction(1, 100) * Fraction(1, 2 ** (m - 1))
    for j in range(1, upto - m + 1):
        roots.append(margin * Fraction(99, 100) * Fraction(1, 2**j))
    return tuple(r * r for r in roots[:upto])


def dominated_chain_search(
    model: SpaceModel,
    lo: int,
    hi: int,
    delta: Fraction,
    length: int,
    *,
    alpha: Ordinal,
    eps_seq: Optional[Tuple[Fraction, ...]] = None,
    tau_budget: int = DEFAULT_TAU_BUDGET,
    verify_budget: int = DEFAULT_VERIFY_BUDGET,
) -> ChainSearchResult:
    """A verified chain plus a dominating point t0 and strong-norming
    points t_2..t_m; all domination inequalities re-checked exactly.

    Best-effort: sub-blocks are constructible only at level zero, so the
    search succeeds for successor alpha (level alpha - 1 = 0 when alpha = 1)
    and small lengths; anything deeper exhausts honestly with a diagnostic."""
    if length < 2:
        raise PreconditionError("a chain needs at least two blocks (m >= 2)")
    m = length
    if not (lo <= m <= hi):
        raise SearchExhaustedError(
            f"min supp u_1 must equal m={m}, which lies outside [{lo},{hi}]",
            diagnostic={"m": m},
        )
    tau = tau_estimate(model, lo, hi, budget=tau_budget)
    tau_hat = tau.lower
    blocks: List[Block] = [Block(SuppVec.unit(m), model)]
    sub_certs: List[AlphaEpsCert] = []
    points: List[KPoint] = []
    d: List[int] = [m]
    built_eps = eps_seq
    for i in range(2, m + 1):
        need_index = d[-1]
        if built_eps is None:
            seq = default_chain_eps(need_index, m)
        else:
            seq = built_eps
            if len(seq) < need_index:
                raise PreconditionError(
                    f"eps_seq must reach index {need_index}, has {len(seq)}"
                )
        level = chain_level(alpha, d[-1])
        if level != ZERO:
            raise SearchExhaustedError(
                f"u_{i} needs a level-{level} block; only level-zero blocks are "
                "constructible at desk scale",
                diagnostic={"largest_chain": i - 1, "blocks": [str(b.vec) for b in blocks]},
            )
        eps_i = seq[d[-1] - 1]
        try:
            sub = find_zero_eps_block(
                model,
                d[-1] + 1,
                hi,
                eps_i,
                tau_budget=tau_budget,
                verify_budget=verify_budget,
            )
        except (SearchExhaustedError, ResourceBudgetError) as exc:
            raise SearchExhaustedError(
                f"could not build the level-zero block u_{i}: {exc}",
                diagnostic={"largest_chain": i - 1, "blocks": [str(b.vec) for b in blocks]},
            ) from exc
        blocks.append(sub.cert.block)
        sub_certs.append(sub.cert)
        points.append(sub.cert.t0)
        d.append(sub.cert.block.support().max())
    final_eps = built_eps if built_eps is not None else default_chain_eps(max(d[:-1]), m)
    cert = ChainCert(
        model=model,
        alpha=alpha,
        blocks=tuple(blocks),
        eps_seq=tuple(final_eps),
        d=tuple(d),
        sub_certs=tuple(sub_certs),
    )
    verdict = verify_chain(cert, verify_budget=verify_budget)
    if not verdict.passed:
        raise SearchExhaustedError(
            f"constructed chain failed verification: {verdict}",
            diagnostic={"verdict": str(verdict)},
        )
    t0 = _dominating_point(model, cert, points, tau_hat, delta)
    if t0 is None:
        raise SearchExhaustedError(
            "no admissible point dominates the strong-norming points",
            diagnostic={"largest_chain": m, "blocks": [str(b.vec) for b in blocks]},
        )
    dom = check_domination(cert, t0, points, tau_hat, delta)
    assert dom.holds
    return ChainSearchResult(
        cert=cert, t0=t0, points=tuple(points), tau_hat=tau_hat, delta=delta
    )


def _dominating_point(
    model: SpaceModel,
    cert: ChainCert,
    points: Sequence[KPoint],
    tau_hat: Fraction,
    delta: Fraction,
) -> Optional[KPoint]:
    """Try the full support union first (it also strongly norms the
    assembled block), then the union of the normed parts."""
    full = EMPTY
    for b in cert.blocks:
        full = full.union(b.support())
    partial = EMPTY
    for b, point in zip(cert.blocks[1:], points):
        touched = FinSet(
            tuple(i for i in b.support() if eval_f(model, point, i) > 0)
        )
        partial = partial.union(touched)
    for candidate in (full, partial):
        point = _natural_point(model, candidate)
        if point is None:
            continue
        if check_domination(cert, point, points, tau_hat, delta).holds:
            return point
    return None


class AssembleVerificationError(SearchExhaustedError):
    """Assembly verification failed; carries the violating set."""

    def __init__(self, verdict: Verdict, cert: AlphaEpsCert):
        super().__init__(
            f"assembled block failed verification: {verdict}",
            diagnostic={"violating": verdict.violating, "condition": verdict.condition},
        )
        self.verdict = verdict
        self.cert = cert


def assemble_block(
    search: ChainSearchResult,
    eps,
    *,
    delta: Optional[Fraction] = None,
    eps0: Optional[Fraction] = None,
    verify_budget: int = DEFAULT_VERIFY_BUDGET,
) -> AlphaEpsCert:
    """The normalized chain sum as a level-alpha certificate, strongly
    normed by the chain's dominating point; re-verified exhaustively.

    On verification failure the violating J travels with the exception so
    callers can retry with a larger window."""
    eps = Radical.of(eps)
    chain_verdict = verify_chain(search.cert, verify_budget=verify_budget)
    if not chain_verdict.passed:
        raise PreconditionError(f"chain does not verify: {chain_verdict}")
    if delta is None or eps0 is None:
        delta, eps0 = _feasible_delta_eps0(
            search.tau_hat, eps, require_delta_lt_eps0_sq=True
        )
    elif not delta < eps0 * eps0:
        raise PreconditionError("parameters must satisfy delta < eps0**2")
    total = BlockSeq(tuple(b.vec for b in search.cert.blocks)).total()
    dnorm = norm(search.cert.model, total)
    u = total.scale(Fraction(1) / dnorm)
    cert = AlphaEpsCert(
        block=Block(u, search.cert.model),
        alpha=search.cert.alpha,
        eps=eps,
        t0=search.t0,
    )
    verdict = verify_alpha_eps(cert, budget=verify_budget)
    if not verdict.passed:
        raise AssembleVerificationError(verdict, cert)
    return cert
