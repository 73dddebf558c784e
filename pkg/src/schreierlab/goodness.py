"""Finite surrogate measure combinatorics and the constructive
measure-separation computation.

The infinite objects are replaced by finite stand-ins: a weak*-compact set
of positive measures becomes a finite list of finitely supported measures,
and an infinite index set becomes an even-length window.  Everything a
measure is asked (level-set masses, integrals of the coordinate functions,
pairings) is an exact rational sum over its support points.

The separation run (prop_mP_run) follows the constructive computation step
by step: pick the threshold parameter by a deterministic grid scan of the
feasibility inequality, build a strongly normed averaged block on the
even-indexed window, select the first measure attaining the pairing bound,
form the level sets, and evaluate the whole inequality chain in exact
arithmetic, aborting with the failing step identified whenever the
surrogate model cannot support a step.  The final membership check is
evaluated like every other step; a finite family of point masses at
hereditary family sets provably cannot pass it (the image of the selected
index set lies inside one family set), and the run reports exactly that
instead of succeeding silently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import PreconditionError, SchreierLabError
from .ordinal import ZERO, Ordinal
from .schreier import FinSet, member
from .normmodel import (
    KPoint,
    Leaf,
    Node,
    SetPoint,
    SpaceModel,
    SuppVec,
    TreePoint,
    norm,
    point_eval_e,
    validate_kpoint,
)
from .blockcert import AlphaEpsCert, Block, verify_alpha_eps

DEFAULT_EPS_DENOMINATOR_BOUND = 25


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise PreconditionError(f"expected a rational, got {type(x).__name__}")


@dataclass(frozen=True)
class EpsSeq:
    """A positive scalar sequence indexed from 1: either the default
    quarter-power decay or an explicit finite list."""

    kind: str = "quarter_powers"  # or "list"
    values: Tuple[Fraction, ...] = ()

    @classmethod
    def quarter_powers(cls) -> "EpsSeq":
        return cls("quarter_powers")

    @classmethod
    def from_list(cls, values: Iterable) -> "EpsSeq":
        vals = tuple(_frac(v) for v in values)
        if any(v <= 0 for v in vals):
            raise PreconditionError("sequence entries must be positive")
        return cls("list", vals)

    def at(self, n: int) -> Fraction:
        if n < 1:
            raise PreconditionError("sequence index must be >= 1")
        if self.kind == "quarter_powers":
            return Fraction(1, 4 ** (n + 1))
        if n > len(self.values):
            raise PreconditionError(
                f"sequence only has {len(self.values)} entries, needs index {n}"
            )
        return self.values[n - 1]


@dataclass(frozen=True)
class Measure:
    """A finitely supported positive measure of total mass at most 1."""

    model: SpaceModel
    weights: Tuple[Tuple[KPoint, Fraction], ...]

    def __post_init__(self):
        total = Fraction(0)
        for point, w in self.weights:
            if w < 0:
                raise PreconditionError("weights must be non-negative")
            validate_kpoint(self.model, point)
            total += w
        if total > 1:
            raise PreconditionError(f"total mass {total} exceeds 1")

    @classmethod
    def point_mass(cls, model: SpaceModel, point: KPoint, mass=Fraction(1)) -> "Measure":
        return cls(model, ((point, _frac(mass)),))

    def total_mass(self) -> Fraction:
        return sum((w for _, w in self.weights), Fraction(0))

    def _f(self, point: KPoint, n: int) -> Fraction:
        return abs(point_eval_e(self.model, point, n))

    def integral_f(self, n: int) -> Fraction:
        """Integral of the non-negative coordinate function f_n."""
        return sum((w * self._f(p, n) for p, w in self.weights), Fraction(0))

    def level_mass(self, n: int, threshold: Fraction) -> Fraction:
        """Mass of the level set [f_n >= threshold]."""
        return sum(
            (w for p, w in self.weights if self._f(p, n) >= threshold), Fraction(0)
        )

    def pairing_e(self, x: SuppVec) -> Fraction:
        """Signed integral of the function sum_n x_n e_n."""
        return sum(
            (
                w * sum((c * point_eval_e(self.model, p, i) for i, c in x.pairs), Fraction(0))
                for p, w in self.weights
            ),
            Fraction(0),
        )

    def integral_vec_f(self, x: SuppVec) -> Fraction:
        """Integral of sum_n x_n f_n for non-negative x."""
        return sum((c * self.integral_f(i) for i, c in x.pairs), Fraction(0))


@dataclass(frozen=True)
class MeasureFamily:
    members: Tuple[Measure, ...]

    def __post_init__(self):
        if not self.members:
            raise PreconditionError("a measure family cannot be empty")
        model = self.members[0].model
        if any(m.model != model for m in self.members):
            raise PreconditionError("all measures must live on the same model")

    @property
    def model(self) -> SpaceModel:
        return self.members[0].model


# -- the pairing combinatorics ------------------------------------------------


def even_part(a: FinSet) -> Tuple[FinSet, Dict[int, int]]:
    """Even-position elements of an even-cardinality set, with the map
    sending each of them to its immediate predecessor in the enumeration."""
    if len(a) % 2 != 0:
        raise PreconditionError(f"even cardinality required, got |A| = {len(a)}")
    elems = a.elements
    a2 = tuple(elems[i] for i in range(1, len(elems), 2))
    pred = {elems[i]: elems[i - 1] for i in range(1, len(elems), 2)}
    return FinSet(a2), pred


def predecessors_of(f: FinSet, a: FinSet) -> FinSet:
    """F^- = the predecessors inside A of the chosen even-position elements."""
    a2, pred = even_part(a)
    if not f.issubset(a2):
        raise PreconditionError(f"{f} is not a subset of the even part of {a}")
    return FinSet(tuple(sorted(pred[m] for m in f)))


@dataclass
class SpliceResult:
    core: FinSet  # F together with its predecessors
    l1: int
    l2: int
    tail: Iterator[int]  # the spliced-in tail, starting at l_3


def splice(f: FinSet, a: FinSet, l: Iterable[int]) -> SpliceResult:
    """The set F + F^- + {l_j : j >= 3}, returned as a finite core plus the
    tail iterator; the first two elements of L are consumed and reported."""
    fminus = predecessors_of(f, a)
    it = iter(l)
    try:
        l1 = next(it)
        l2 = next(it)
    except StopIteration:
        raise PreconditionError("L must have at least two elements")
    if not a.max() < l1:
        raise PreconditionError(f"max A = {a.max()} must be below l_1 = {l1}")
    if not l1 < l2:
        raise PreconditionError("L must be strictly increasing")
    return SpliceResult(core=f.union(fminus), l1=l1, l2=l2, tail=it)


def spliced_prefix(f: FinSet, a: FinSet, l_prefix: FinSet, length: int) -> FinSet:
    """First `length` elements of the spliced set when L is a finite prefix."""
    res = splice(f, a, iter(l_prefix.elements))
    seq = list(res.core.elements) + list(res.tail)
    if len(seq) < length:
        raise PreconditionError(
            f"spliced sequence has {len(seq)} elements, needs {length}"
        )
    return FinSet(tuple(seq[:length]))


def is_appropriate(f1: FinSet, f2: FinSet) -> bool:
    """F2 has even cardinality and F1 sits inside its even part."""
    if len(f2) % 2 != 0:
        return False
    a2, _ = even_part(f2)
    return f1.issubset(a2)


def is_good(
    mu: Measure,
    l_prefix: FinSet,
    n: int,
    rho: Fraction,
    eps_seq: EpsSeq,
) -> bool:
    """Whether each of the first n even-position level sets
    [f_{l_{2i}} >= eps_{l_{2i-1}}] carries mass at least rho."""
    if n < 0:
        raise PreconditionError("n must be >= 0")
    if len(l_prefix) < 2 * n:
        raise PreconditionError(f"prefix of length {len(l_prefix)} cannot cover n = {n}")
    elems = l_prefix.elements
    rho = _frac(rho)
    for i in range(1, n + 1):
        odd, even = elems[2 * i - 2], elems[2 * i - 1]
        if mu.level_mass(even, eps_seq.at(odd)) < rho:
            return False
    return True


def admissible_window(
    family: MeasureFamily,
    f1: FinSet,
    f2: FinSet,
    l_prefix: FinSet,
    n_max: int,
    rho: Fraction,
    eps_seq: EpsSeq,
    delta_seq: EpsSeq,
) -> bool:
    """Finite-window admissibility of L for the pair (F1, F2): every good
    measure must admit an equally good companion that is small on the
    unselected even-part coordinates and on f_{l_2}."""
    if not is_appropriate(f1, f2):
        raise PreconditionError(f"({f1}, {f2}) is not an appropriate pair")
    if l_prefix.is_empty or not f2.max() < l_prefix.min():
        raise PreconditionError("need max F2 < l_1")
    rho = _frac(rho)
    a2, pred = even_part(f2)
    unselected = [m for m in a2 if m not in f1]
    l1, l2 = l_prefix.elements[0], l_prefix.elements[1]
    for n in range(1, n_max + 1):
        spliced = spliced_prefix(f1, f2, l_prefix, 2 * n)
        for mu in family.members:
            if not is_good(mu, spliced, n, rho, eps_seq):
                continue
            found = False
            for nu in family.members:
                if not is_good(nu, spliced, n, rho, eps_seq):
                    continue
                if any(nu.integral_f(m) >= delta_seq.at(pred[m]) for m in unselected):
                    continue
                if nu.integral_f(l2) >= delta_seq.at(l1):
                    continue
                found = True
                break
            if not found:
                return False
    return True


def chebyshev_mass(mu: Measure, index: int, d: Fraction, delta_i: Fraction) -> Fraction:
    """Mass of [f_index >= d * delta_i]; at most 1/d by the integral bound."""
    d = _frac(d)
    delta_i = _frac(delta_i)
    if d <= 0:
        raise PreconditionError("the scale d must be positive")
    actual = mu.integral_f(index)
    if actual != delta_i:
        raise PreconditionError(
            f"delta_i = {delta_i} disagrees with the integral {actual} of f_{index}"
        )
    if delta_i == 0:
        raise PreconditionError(
            "index with zero integral is excluded; the level set degenerates"
        )
    mass = mu.level_mass(index, d * delta_i)
    assert mass <= 1 / d, "the integral bound cannot fail for a positive scale"
    return mass


# -- norming checks -----------------------------------------------------------


@dataclass(frozen=True)
class RhoNormsResult:
    passed: bool
    worst: Fraction
    witness: Optional[SuppVec]
    grid_size: int
    note: str = "soundness limited to the tested grid"


def rho_norms_check(
    family: MeasureFamily,
    pool: FinSet,
    coeff_grid: Sequence,
    rho,
    *,
    max_support: int = 2,
) -> RhoNormsResult:
    """Grid check that every normalized test vector has pairing at least
    rho with some family member.  Sound only for the tested grid; callers
    must treat a pass as evidence, not proof."""
    rho = _frac(rho)
    grid = tuple(sorted({_frac(c) for c in coeff_grid}))
    if not grid or any(c == 0 for c in grid):
        raise PreconditionError("coefficient grid must be nonzero and nonempty")
    model = family.model
    worst: Optional[Fraction] = None
    witness: Optional[SuppVec] = None
    count = 0
    for size in range(1, max_support + 1):
        for supp in itertools.combinations(pool.elements, size):
            for coeffs in itertools.product(grid, repeat=size):
                vec = SuppVec(tuple(zip(supp, coeffs)))
                nrm = norm(model, vec)
                unit = vec.scale(Fraction(1) / nrm)
                count += 1
                best = max(abs(mu.pairing_e(unit)) for mu in family.members)
                if worst is None or best < worst:
                    worst, witness = best, unit
    if worst is None:
        raise PreconditionError("empty grid: no test vectors were generated")
    return RhoNormsResult(
        passed=worst >= rho, worst=worst, witness=witness, grid_size=count
    )


# -- the separation run -------------------------------------------------------


@dataclass(frozen=True)
class MPStep:
    name: str
    lhs: Fraction
    rhs: Fraction
    holds: bool
    note: str = ""


@dataclass(frozen=True)
class MPIndexRow:
    i: int
    n_odd: int  # n_{2i-1}
    n_even: int  # n_{2i}
    a_i: Fraction  # block coefficient at n_{2i} (0 outside the support)
    delta_i: Fraction  # integral of f_{n_{2i}}
    phi_mass: Optional[Fraction]  # mass of [f >= D delta_i]; None when excluded
    level_threshold: Fraction  # eps_{n_{2i-1}}
    level_mass: Fraction  # mass of [f >= eps_{n_{2i-1}}]


@dataclass(frozen=True)
class MPTranscript:
    rho: Fraction
    eps: Fraction
    d_scale: Fraction  # D = (2+eps)/(rho-2eps), exact
    alpha: Ordinal
    window: FinSet
    block_cert: AlphaEpsCert  # certified at its structural level
    block_level_note: str
    mu_index: int
    rows: Tuple[MPIndexRow, ...]
    steps: Tuple[MPStep, ...]
    selected: FinSet  # the index set I
    image: FinSet  # {n_{2i} : i in I}
    norming_note: str

    def failing_steps(self) -> Tuple[str, ...]:
        return tuple(s.name for s in self.steps if not s.holds)


@dataclass(frozen=True)
class MPRunResult:
    ok: bool
    failing_step: Optional[str]
    selected: FinSet
    image: FinSet
    mu: Measure
    transcript: MPTranscript


class MPAbort(SchreierLabError):
    """The separation run could not complete; carries the failing step and
    whatever transcript material existed at that point."""

    def __init__(self, step: str, message: str, transcript: Optional[MPTranscript] = None):
        super().__init__(f"[{step}] {message}")
        self.step = step
        self.transcript = transcript


def feasible_eps(rho: Fraction, q_max: int = DEFAULT_EPS_DENOMINATOR_BOUND) -> Fraction:
    """Smallest denominator-bounded rational in (0, rho/2) satisfying the
    feasibility display ((rho-2e)/(2+e))**2 > e**2 + rho**2/5, scanned in
    increasing magnitude; deterministic.  Raises when the grid certifies
    infeasibility."""
    rho = _frac(rho)
    if rho <= 0:
        raise PreconditionError("rho must be positive")
    candidates = sorted(
        {
            Fraction(p, q)
            for q in range(1, q_max + 1)
            for p in range(1, q)
            if 0 < Fraction(p, q) < rho / 2
        }
    )
    for eps in candidates:
        if ((rho - 2 * eps) / (2 + eps)) ** 2 > eps * eps + rho * rho / 5:
            return eps
    raise MPAbort(
        "eps_feasibility",
        f"no rational with denominator <= {q_max} satisfies the display at rho={rho}",
    )


def _structural_block(
    model: SpaceModel, even_pool: Tuple[int, ...], eps: Fraction
) -> Tuple[AlphaEpsCert, str]:
    """A strongly normed uniform average on a prefix of the even-indexed
    window, certified at level zero.

    The norming equality is checked through its structural hypotheses
    rather than a subset scan: the support is a single family set covered
    by the point, so every restriction norm equals its pairing exactly
    (Schreier) or its theta-scaled pairing with singleton exemption
    (Tsirelson).  When the support fits the exhaustive budget the generic
    verifier is run as well."""
    cap = min(len(even_pool), even_pool[0] if even_pool else 0)
    if cap < 2:
        raise MPAbort("block_search", "even-indexed window too small for any average")
    eps2 = eps * eps
    chosen = None
    for m0 in range(2, cap + 1):
        prefix = FinSet(even_pool[:m0])
        total = SuppVec.of({i: 1 for i in prefix})
        dn = norm(model, total)
        if Fraction(1) / dn < eps2:
            chosen = (m0, prefix, total, dn)
            break
    genuine = chosen is not None
    if chosen is None:
        m0 = cap
        prefix = FinSet(even_pool[:m0])
        total = SuppVec.of({i: 1 for i in prefix})
        chosen = (m0, prefix, total, norm(model, total))
    m0, prefix, total, dn = chosen
    u = total.scale(Fraction(1) / dn)
    if model.kind == "schreier":
        if not member(prefix, model.alpha):
            raise MPAbort("block_search", f"prefix {prefix} is not a model family set")
        t0: KPoint = SetPoint(prefix)
    else:
        if not (len(prefix) <= prefix.min() and member(prefix, model.alpha)):
            raise MPAbort("block_search", f"prefix {prefix} is not admissible")
        if not Fraction(1) / dn < eps:
            # singleton restrictions would enter the norming condition with
            # value 1/dn against pairing theta/dn; no structural argument then
            raise MPAbort(
                "block_search",
                f"coordinate size 1/{dn} reaches eps = {eps}; "
                "no strongly normed average fits this window",
            )
        t0 = TreePoint(Node(tuple(Leaf(i, 1) for i in prefix)))
    cert = AlphaEpsCert(block=Block(u, model), alpha=ZERO, eps=eps, t0=t0)
    note = (
        f"uniform average of size {m0}; norming equality structural "
        f"(single family set covered by the point); "
        f"level-zero smallness {'holds' if genuine else 'NOT reached: window too small'}"
    )
    if m0 <= 16:
        verdict = verify_alpha_eps(cert)
        note += f"; exhaustive verifier: {verdict}"
    return cert, note


def prop_mP_run(
    family: MeasureFamily,
    alpha: Ordinal,
    rho,
    eps_seq: EpsSeq,
    window: FinSet,
    *,
    q_max: int = DEFAULT_EPS_DENOMINATOR_BOUND,
    norming_grid: Sequence = (1,),
    norming_max_support: int = 1,
) -> MPRunResult:
    """The constructive separation computation on a finite surrogate model.

    Returns the selected index set I (level-set mass at least rho**2/5),
    the selected measure and a transcript in which every inequality of the
    chain is evaluated exactly.  A failing pre-step aborts with MPAbort; a
    failing chain or membership step returns ok=False with the failing
    step named, diagnosing the surrogate model honestly.
    """
    rho = _frac(rho)
    model = family.model
    elems = window.elements
    if len(elems) < 4 or len(elems) % 2 != 0:
        raise PreconditionError("window must have even length >= 4")
    k_pairs = len(elems) // 2
    odd = tuple(elems[2 * i] for i in range(k_pairs))
    even = tuple(elems[2 * i + 1] for i in range(k_pairs))

    norming = rho_norms_check(
        family,
        window,
        norming_grid,
        rho,
        max_support=norming_max_support,
    )
    if not norming.passed:
        raise MPAbort(
            "norming_check",
            f"family only achieves worst pairing {norming.worst} < rho = {rho} "
            f"on the {norming.grid_size}-vector grid",
        )
    norming_note = (
        f"grid of {norming.grid_size} vectors, worst pairing {norming.worst}; "
        f"{norming.note}"
    )

    eps = feasible_eps(rho, q_max=q_max)
    steps: List[MPStep] = [
        MPStep(
            "eps_feasibility",
            ((rho - 2 * eps) / (2 + eps)) ** 2,
            eps * eps + rho * rho / 5,
            True,
            f"eps = {eps}",
        )
    ]

    tail_sum = sum((eps_seq.at(n) for n in odd), Fraction(0))
    if not tail_sum < eps:
        raise MPAbort(
            "eps_tail",
            f"sum of odd-indexed sequence entries {tail_sum} must stay below eps = {eps}",
        )
    steps.append(MPStep("eps_tail", tail_sum, eps, True))

    cert, block_note = _structural_block(model, even, eps)
    u = cert.block.vec
    supp_u = cert.block.support()

    d_scale = (2 + eps) / (rho - 2 * eps)

    mu_index = None
    for idx, mu in enumerate(family.members):
        if mu.integral_vec_f(u) >= rho:
            mu_index = idx
            break
    if mu_index is None:
        raise MPAbort(
            "norming_selection",
            f"no family member attains pairing {rho} against the block",
        )
    mu = family.members[mu_index]

    rows: List[MPIndexRow] = []
    i0: List[int] = []
    for i in range(1, k_pairs + 1):
        n_odd, n_even = odd[i - 1], even[i - 1]
        a_i = u.coeff(n_even)
        delta_i = mu.integral_f(n_even)
        in_i0 = a_i > 0 and delta_i > 0
        if in_i0:
            i0.append(i)
        phi_mass = (
            chebyshev_mass(mu, n_even, d_scale, delta_i) if in_i0 else None
        )
        thr = eps_seq.at(n_odd)
        rows.append(
            MPIndexRow(
                i=i,
                n_odd=n_odd,
                n_even=n_even,
                a_i=a_i,
                delta_i=delta_i,
                phi_mass=phi_mass,
                level_threshold=thr,
                level_mass=mu.level_mass(n_even, thr),
            )
        )
    by_i = {row.i: row for row in rows}

    cheb_ok = all(
        row.phi_mass is None or row.phi_mass <= 1 / d_scale for row in rows
    )
    worst_phi = max(
        (row.phi_mass for row in rows if row.phi_mass is not None),
        default=Fraction(0),
    )
    steps.append(
        MPStep("EmP2_chebyshev", worst_phi, 1 / d_scale, cheb_ok, "max over included i")
    )

    # masked decomposition, pointwise
    lhs_total = sum((by_i[i].a_i * by_i[i].delta_i for i in i0), Fraction(0))
    masked_integral = Fraction(0)  # integral of the masked values
    masked_norm_integral = Fraction(0)  # integral of the masked restriction norms
    k1_norm_integral = Fraction(0)
    cond1_ok = True
    pair_phi = Fraction(0)  # sum_i a_i f_{n_2i}(t0) * mass_{K1}(phi_i)
    t2 = Fraction(0)  # sum_i a_i * integral over [f < D delta_i]
    for point, w in mu.weights:
        if w == 0:
            continue
        masked = [
            i
            for i in i0
            if abs(point_eval_e(model, point, by_i[i].n_even))
            >= d_scale * by_i[i].delta_i
        ]
        value = sum(
            (
                by_i[i].a_i * abs(point_eval_e(model, point, by_i[i].n_even))
                for i in masked
            ),
            Fraction(0),
        )
        restriction = u.restrict(FinSet(tuple(sorted(by_i[i].n_even for i in masked))))
        masked_nrm = norm(model, restriction)
        masked_integral += w * value
        masked_norm_integral += w * masked_nrm
        for i in i0:
            ev = abs(point_eval_e(model, point, by_i[i].n_even))
            if ev < d_scale * by_i[i].delta_i:
                t2 += w * by_i[i].a_i * ev
        if masked_nrm >= eps:
            k1_norm_integral += w * masked_nrm
            pairing = sum(
                (
                    by_i[i].a_i * abs(point_eval_e(model, cert.t0, by_i[i].n_even))
                    for i in masked
                ),
                Fraction(0),
            )
            pair_phi += w * pairing
            if masked_nrm > (1 + eps) * pairing:
                cond1_ok = False

    steps.append(
        MPStep(
            "EmP3_decomposition",
            lhs_total,
            masked_norm_integral + t2,
            lhs_total == masked_integral + t2 and masked_integral <= masked_norm_integral,
            "exact split into masked and small parts",
        )
    )
    steps.append(
        MPStep(
            "EmP4_strong_norming",
            k1_norm_integral,
            (1 + eps) / d_scale,
            cond1_ok and k1_norm_integral <= (1 + eps) * pair_phi <= (1 + eps) / d_scale,
            "norming instances checked at every masked support point",
        )
    )
    steps.append(
        MPStep(
            "EmP5_masked_bound",
            masked_norm_integral,
            eps + (1 + eps) / d_scale,
            masked_norm_integral <= eps + (1 + eps) / d_scale,
        )
    )
    level_sum = sum(
        (by_i[i].a_i * by_i[i].delta_i * by_i[i].level_mass for i in i0), Fraction(0)
    )
    emp6_rhs = 2 * eps + (1 + eps) / d_scale + d_scale * level_sum
    steps.append(MPStep("EmP6_chain", rho, emp6_rhs, rho <= emp6_rhs))
    target = ((rho - 2 * eps) / (2 + eps)) ** 2
    assert rho - 2 * eps - (1 + eps) / d_scale == d_scale * target
    steps.append(MPStep("EmP7_level_mass", level_sum, target, level_sum >= target))

    bound = rho * rho / 5
    selected = FinSet(
        tuple(
            i
            for i in range(1, k_pairs + 1)
            if by_i[i].n_even in supp_u and by_i[i].level_mass >= bound
        )
    )
    image = FinSet(tuple(sorted(by_i[i].n_even for i in selected)))
    in_family = member(image, alpha)
    steps.append(
        MPStep(
            "image_not_in_family",
            Fraction(len(image)),
            Fraction(0),
            not in_family,
            f"image {image} {'lies inside' if in_family else 'escapes'} the level-{alpha} family",
        )
    )

    transcript = MPTranscript(
        rho=rho,
        eps=eps,
        d_scale=d_scale,
        alpha=alpha,
        window=window,
        block_cert=cert,
        block_level_note=block_note,
        mu_index=mu_index,
        rows=tuple(rows),
        steps=tuple(steps),
        selected=selected,
        image=image,
        norming_note=norming_note,
    )
    failing = transcript.failing_steps()
    return MPRunResult(
        ok=not failing,
        failing_step=failing[0] if failing else None,
        selected=selected,
        image=image,
        mu=mu,
        transcript=transcript,
    )


# -- bundled fixture families -------------------------------------------------


def maximal_superset(model: SpaceModel, seed: FinSet, window: FinSet) -> Optional[FinSet]:
    """Lexicographically least maximal-in-window family superset of seed,
    grown greedily by ascending elements; None if the seed is no member."""
    if not member(seed, model.alpha):
        return None
    current = seed
    changed = True
    while changed:
        changed = False
        for n in window:
            if n in current:
                continue
            cand = current.with_element(n)
            if member(cand, model.alpha):
                current = cand
                changed = True
                break
    return current


def point_mass_family(
    model: SpaceModel,
    window: FinSet,
    prefix_sizes: Optional[Sequence[int]] = None,
) -> MeasureFamily:
    """Point masses at maximal-in-window family sets: extensions of the
    even-indexed prefixes (powers of two plus the full prefix by default)
    together with a greedy cover of the window."""
    if model.kind != "schreier":
        raise PreconditionError("the bundled fixture family is Schreier-specific")
    elems = window.elements
    k_pairs = len(elems) // 2
    even = tuple(elems[2 * i + 1] for i in range(k_pairs))
    if prefix_sizes is None:
        prefix_sizes = range(1, k_pairs + 1)
    sets: List[FinSet] = []
    for k in prefix_sizes:
        if not (1 <= k <= len(even)):
            continue
        grown = maximal_superset(model, FinSet(even[:k]), window)
        if grown is not None and grown not in sets:
            sets.append(grown)
    covered = set()
    for s in sets:
        covered.update(s.elements)
    for n in elems:
        if n not in covered:
            grown = maximal_superset(model, FinSet((n,)), window)
            if grown is not None:
                if grown not in sets:
                    sets.append(grown)
                covered.update(grown.elements)
    return MeasureFamily(
        tuple(Measure.point_mass(model, SetPoint(s)) for s in sets)
    )
