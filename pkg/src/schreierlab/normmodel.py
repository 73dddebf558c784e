"""Concrete computable norm models with exact rational arithmetic.

Two bundled models realize the C(K) setting at desk scale:

  * SchreierSpace(alpha): ||x|| = max over family sets F of sum_{i in F} |x_i|;
    the norming points are the family sets themselves, evaluating the
    non-negative coordinate functions f_n as indicators.

  * Tsirelson(theta, alpha): the implicit recursion
    ||x|| = max(||x||_inf, theta * max sum_j ||E_j x||) over successive
    interval families whose minima form a family set; norming points are
    certified functional trees (leaves are signed unit functionals, inner
    nodes scale the sum of their children by theta).

Every norm value, evaluation and ratio below is an exact Fraction; there
is no floating point anywhere in this module.  The Tsirelson recursion is
memoized per model instance; insertion is idempotent, so the cache is safe
under concurrent readers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .errors import PreconditionError, ResourceBudgetError, SearchExhaustedError
from .ordinal import ONE, Ordinal
from .schreier import EMPTY, FinSet, enumerate_members, member

DEFAULT_KPOINT_WIDTH = 10  # widest window the Tsirelson tree stream accepts
DEFAULT_A1_BUDGET = 20000  # ratio evaluations before a1_search reports partial


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise PreconditionError(f"expected a rational, got {type(x).__name__}")


@dataclass(frozen=True)
class SuppVec:
    """Finitely supported vector with exact rational coefficients."""

    pairs: Tuple[Tuple[int, Fraction], ...] = ()

    def __post_init__(self):
        prev = 0
        for idx, coeff in self.pairs:
            if not isinstance(idx, int) or idx <= prev:
                raise PreconditionError("indices must be strictly increasing positive integers")
            if not isinstance(coeff, Fraction) or coeff == 0:
                raise PreconditionError("stored coefficients must be nonzero Fractions")
            prev = idx

    @classmethod
    def of(cls, coeffs) -> "SuppVec":
        if isinstance(coeffs, dict):
            items = coeffs.items()
        else:
            items = coeffs
        pairs = tuple(
            (int(i), _frac(c)) for i, c in sorted(items) if _frac(c) != 0
        )
        return cls(pairs)

    @classmethod
    def unit(cls, n: int) -> "SuppVec":
        return cls(((n, Fraction(1)),))

    def support(self) -> FinSet:
        return FinSet(tuple(i for i, _ in self.pairs))

    def coeff(self, i: int) -> Fraction:
        for j, c in self.pairs:
            if j == i:
                return c
            if j > i:
                break
        return Fraction(0)

    def restrict(self, j: FinSet) -> "SuppVec":
        allowed = set(j.elements)
        return SuppVec(tuple(p for p in self.pairs if p[0] in allowed))

    def scale(self, c) -> "SuppVec":
        c = _frac(c)
        if c == 0:
            return SuppVec()
        return SuppVec(tuple((i, coeff * c) for i, coeff in self.pairs))

    def add(self, other: "SuppVec") -> "SuppVec":
        acc: Dict[int, Fraction] = dict(self.pairs)
        for i, c in other.pairs:
            acc[i] = acc.get(i, Fraction(0)) + c
        return SuppVec.of(acc)

    @property
    def is_zero(self) -> bool:
        return not self.pairs

    def is_nonnegative(self) -> bool:
        return all(c > 0 for _, c in self.pairs)

    def sum_abs(self) -> Fraction:
        return sum((abs(c) for _, c in self.pairs), Fraction(0))

    def linf(self) -> Fraction:
        return max((abs(c) for _, c in self.pairs), default=Fraction(0))

    def __str__(self):
        return "+".join(f"{c}*e{i}" for i, c in self.pairs) or "0"


@dataclass(frozen=True)
class SpaceModel:
    """A bundled norm model together with its declared asymptotic-l1 floor.

    The declared a1_constant is a lower bound checked by property tests
    within budget; nothing in the package treats it as proved.
    """

    kind: str  # "schreier" | "tsirelson"
    alpha: Ordinal
    theta: Optional[Fraction]
    a1_constant: Fraction
    _norm_cache: dict = field(
        default_factory=dict, compare=False, repr=False, hash=False
    )

    def __post_init__(self):
        if self.kind not in ("schreier", "tsirelson"):
            raise PreconditionError(f"unknown model kind {self.kind!r}")
        if self.kind == "tsirelson":
            if self.theta is None or not (0 < self.theta < 1):
                raise PreconditionError("theta must lie in (0,1)")
        if not (0 < self.a1_constant <= 1):
            raise PreconditionError("a1_constant must lie in (0,1]")

    def describe(self) -> str:
        if self.kind == "schreier":
            return f"schreier(alpha={self.alpha})"
        return f"tsirelson(theta={self.theta}, alpha={self.alpha})"


_model_registry: Dict[tuple, SpaceModel] = {}


def schreier_space(alpha: Ordinal, a1_constant=None) -> SpaceModel:
    """Schreier-type model; alpha >= 1 (the level-0 family gives a sup-like
    norm with no positive asymptotic-l1 floor, so it is not bundled)."""
    if alpha < ONE:
        raise PreconditionError("SchreierSpace needs alpha >= 1")
    a1 = _frac(a1_constant) if a1_constant is not None else Fraction(1, 2)
    key = ("schreier", alpha, None, a1)
    if key not in _model_registry:
        _model_registry[key] = SpaceModel("schreier", alpha, None, a1)
    return _model_registry[key]


def tsirelson_space(theta=Fraction(1, 2), alpha: Ordinal = ONE, a1_constant=None) -> SpaceModel:
    theta = _frac(theta)
    a1 = _frac(a1_constant) if a1_constant is not None else theta
    key = ("tsirelson", alpha, theta, a1)
    if key not in _model_registry:
        _model_registry[key] = SpaceModel("tsirelson", alpha, theta, a1)
    return _model_registry[key]


# -- norming points -----------------------------------------------------------


@dataclass(frozen=True)
class SetPoint:
    """A point of K for the Schreier model: a family set evaluating
    f_n as its indicator."""

    elements: FinSet

    def encoding(self):
        return ("set", self.elements.elements)


@dataclass(frozen=True)
class Leaf:
    index: int
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise PreconditionError("leaf sign must be +1 or -1")
        if self.index < 1:
            raise PreconditionError("leaf index must be >= 1")


@dataclass(frozen=True)
class Node:
    children: Tuple["TreeNode", ...]

    def __post_init__(self):
        if not self.children:
            raise PreconditionError("node needs at least one child")


TreeNode = Union[Leaf, Node]


@dataclass(frozen=True)
class TreePoint:
    """A certified Tsirelson functional: the tree is validated against the
    model before every evaluation batch."""

    root: TreeNode

    def encoding(self):
        return ("tree", _encode_tree(self.root))


KPoint = Union[SetPoint, TreePoint]


def _encode_tree(node: TreeNode):
    if isinstance(node, Leaf):
        return ("leaf", node.index, 0 if node.sign > 0 else 1)
    return ("node", tuple(_encode_tree(c) for c in node.children))


def _tree_support(node: TreeNode) -> Tuple[int, ...]:
    if isinstance(node, Leaf):
        return (node.index,)
    out: Tuple[int, ...] = ()
    for c in node.children:
        out += _tree_support(c)
    return out


def _tree_depth(node: TreeNode) -> int:
    if isinstance(node, Leaf):
        return 0
    return 1 + max(_tree_depth(c) for c in node.children)


def validate_kpoint(model: SpaceModel, t: KPoint) -> None:
    """Reject invalid certificates; no-op when t is valid for the model."""
    if model.kind == "schreier":
        if not isinstance(t, SetPoint):
            raise PreconditionError("Schreier model points are family sets")
        if not member(t.elements, model.alpha):
            raise PreconditionError(f"{t.elements} is not a level-{model.alpha} set")
        return
    if not isinstance(t, TreePoint):
        raise PreconditionError("Tsirelson model points are functional trees")
    _validate_tree(model, t.root)


def _validate_tree(model: SpaceModel, node: TreeNode) -> None:
    if isinstance(node, Leaf):
        return
    prev_max = 0
    minima: List[int] = []
    for child in node.children:
        supp = _tree_support(child)
        if supp[0] <= prev_max:
            raise PreconditionError("child supports must be successive")
        minima.append(supp[0])
        prev_max = supp[-1]
        _validate_tree(model, child)
    if not member(FinSet(tuple(minima)), model.alpha):
        raise PreconditionError(
            f"child minima {minima} are not admissible at level {model.alpha}"
        )


def _tree_eval(node: TreeNode, n: int, theta: Fraction) -> Fraction:
    if isinstance(node, Leaf):
        return Fraction(node.sign) if node.index == n else Fraction(0)
    total = Fraction(0)
    for c in node.children:
        total += _tree_eval(c, n, theta)
    return theta * total


def point_eval_e(model: SpaceModel, t: KPoint, n: int) -> Fraction:
    """Signed evaluation e_n(t)."""
    if isinstance(t, SetPoint):
        return Fraction(1) if n in t.elements else Fraction(0)
    return _tree_eval(t.root, n, model.theta)


def eval_f(model: SpaceModel, t: KPoint, n: int) -> Fraction:
    """Value of the non-negative basis function f_n = |e_n| at the point t."""
    if n < 1:
        raise PreconditionError("index must be >= 1")
    validate_kpoint(model, t)
    return abs(point_eval_e(model, t, n))


# -- the norms ----------------------------------------------------------------


def norm(model: SpaceModel, x: SuppVec) -> Fraction:
    """Exact norm of x in the model; norm of the zero vector is 0."""
    if x.is_zero:
        return Fraction(0)
    key = x.pairs
    hit = model._norm_cache.get(key)
    if hit is not None:
        return hit
    if model.kind == "schreier":
        out = _schreier_norm(model, x)
    else:
        out = _tsirelson_norm(model, x.pairs)
    model._norm_cache[key] = out
    return out


def _schreier_norm(model: SpaceModel, x: SuppVec) -> Fraction:
    elems = tuple(i for i, _ in x.pairs)
    weights = {i: abs(c) for i, c in x.pairs}
    if member(FinSet(elems), model.alpha):
        return sum(weights.values(), Fraction(0))
    suffix = [Fraction(0)] * (len(elems) + 1)
    for i in range(len(elems) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + weights[elems[i]]
    best = Fraction(0)

    def rec(start: int, acc: Tuple[int, ...], acc_sum: Fraction):
        nonlocal best
        if acc_sum > best:
            best = acc_sum
        for i in range(start, len(elems)):
            if acc_sum + suffix[i] <= best:
                return
            cand = acc + (elems[i],)
            if member(FinSet(cand), model.alpha):
                rec(i + 1, cand, acc_sum + weights[elems[i]])

    rec(0, (), Fraction(0))
    return best


def _tsirelson_norm(model: SpaceModel, pairs: Tuple[Tuple[int, Fraction], ...]) -> Fraction:
    if not pairs:
        return Fraction(0)
    hit = model._norm_cache.get(pairs)
    if hit is not None:
        return hit
    best = max(abs(c) for _, c in pairs)
    theta = model.theta
    n = len(pairs)
    # successive interval families = full cut compositions of a suffix of the
    # support; middle and trailing gaps are absorbed into the previous piece
    # (the norm is support-monotone), so only prefix skips are enumerated.
    for start in range(0, n - 1):
        sub = pairs[start:]
        best_split = _best_admissible_split(model, sub)
        if best_split is not None:
            cand = theta * best_split
            if cand > best:
                best = cand
    model._norm_cache[pairs] = best
    return best


def _best_admissible_split(model: SpaceModel, sub) -> Optional[Fraction]:
    """Max of sum_j ||piece_j|| over cut compositions of sub into >= 2
    pieces whose minima form a family set; None when none is admissible."""
    n = len(sub)
    best: Optional[Fraction] = None

    def go(pos: int, minima: Tuple[int, ...], count: int, run: Fraction):
        nonlocal best
        new_minima = minima + (sub[pos][0],)
        if not member(FinSet(new_minima), model.alpha):
            return  # supersets of a non-member cannot be members
        for end in range(pos + 1, n + 1):
            if end == n:
                if count + 1 >= 2:
                    total = run + _tsirelson_norm(model, sub[pos:end])
                    if best is None or total > best:
                        best = total
            else:
                go(end, new_minima, count + 1, run + _tsirelson_norm(model, sub[pos:end]))

    go(0, (), 0, Fraction(0))
    return best


def norming_functional(model: SpaceModel, x: SuppVec) -> KPoint:
    """A point attaining max_t sum_n |x_n| f_n(t) = ||x|| (x arbitrary; the
    point is built sign-free and attains the norm of |x|)."""
    if x.is_zero:
        return SetPoint(EMPTY) if model.kind == "schreier" else TreePoint(Leaf(1, 1))
    if model.kind == "schreier":
        return SetPoint(_schreier_argmax(model, x))
    value, tree = _tsirelson_argmax(model, x.pairs)
    assert value == norm(model, x)
    return TreePoint(tree)


def _schreier_argmax(model: SpaceModel, x: SuppVec) -> FinSet:
    elems = tuple(i for i, _ in x.pairs)
    weights = {i: abs(c) for i, c in x.pairs}
    target = norm(model, x)

    best: Optional[Tuple[int, ...]] = None

    def rec(start: int, acc: Tuple[int, ...], acc_sum: Fraction) -> bool:
        nonlocal best
        if acc_sum == target:
            best = acc
            return True
        for i in range(start, len(elems)):
            cand = acc + (elems[i],)
            if member(FinSet(cand), model.alpha):
                if rec(i + 1, cand, acc_sum + weights[elems[i]]):
                    return True
        return False

    rec(0, (), Fraction(0))
    assert best is not None
    return FinSet(best)


def _tsirelson_argmax(model: SpaceModel, pairs) -> Tuple[Fraction, TreeNode]:
    # mirrors _tsirelson_norm but rebuilds the witness tree; leaf signs are
    # irrelevant for |t(n)| so leaves are built positive
    hit = model._norm_cache.get(("argmax", pairs))
    if hit is not None:
        return hit
    top = max(pairs, key=lambda p: (abs(p[1]), -p[0]))
    best: Tuple[Fraction, TreeNode] = (abs(top[1]), Leaf(top[0], 1))
    theta = model.theta
    n = len(pairs)

    def split_trees(sub) -> Optional[Tuple[Fraction, Tuple[TreeNode, ...]]]:
        m = len(sub)
        out: Optional[Tuple[Fraction, Tuple[TreeNode, ...]]] = None

        def go(pos, minima, pieces: Tuple[TreeNode, ...], run: Fraction):
            nonlocal out
            new_minima = minima + (sub[pos][0],)
            if not member(FinSet(new_minima), model.alpha):
                return
            for end in range(pos + 1, m + 1):
                if end == m:
                    if len(pieces) + 1 >= 2:
                        val, tree = _tsirelson_argmax(model, sub[pos:end])
                        total = run + val
                        if out is None or total > out[0]:
                            out = (total, pieces + (tree,))
                else:
                    val, tree = _tsirelson_argmax(model, sub[pos:end])
                    go(end, new_minima, pieces + (tree,), run + val)

        go(0, (), (), Fraction(0))
        return out

    for start in range(0, n - 1):
        found = split_trees(pairs[start:])
        if found is not None and theta * found[0] > best[0]:
            best = (theta * found[0], Node(found[1]))
    model._norm_cache[("argmax", pairs)] = best
    return best


def kpoints(
    model: SpaceModel,
    lo: int,
    hi: int,
    depth: Optional[int] = None,
    *,
    max_width: int = DEFAULT_KPOINT_WIDTH,
) -> Iterator[KPoint]:
    """Deterministic stream of all norming points supported in [lo, hi]
    (Tsirelson: trees of height <= depth, inner nodes with >= 2 children)."""
    if not (1 <= lo <= hi):
        raise PreconditionError("window must satisfy 1 <= lo <= hi")
    if hi - lo + 1 > max_width:
        raise ResourceBudgetError(
            f"window width {hi - lo + 1} exceeds kpoint budget {max_width}",
            required=hi - lo + 1,
            budget=max_width,
        )
    if model.kind == "schreier":
        for f in enumerate_members(model.alpha, lo, hi, max_width=max_width):
            yield SetPoint(f)
        return
    if depth is None:
        depth = hi - lo + 1
    support_pool = tuple(range(lo, hi + 1))
    seen = []
    for size in range(1, len(support_pool) + 1):
        for supp in itertools.combinations(support_pool, size):
            for tree in _trees_over(model, supp, depth):
                seen.append(TreePoint(tree))
    seen.sort(key=lambda t: t.encoding())
    yield from seen


def _trees_over(model: SpaceModel, supp: Tuple[int, ...], depth: int) -> Iterator[TreeNode]:
    if len(supp) == 1:
        yield Leaf(supp[0], 1)
        yield Leaf(supp[0], -1)
        return
    if depth < 1:
        return
    n = len(supp)

    def compositions(pos: int, minima: Tuple[int, ...], acc: Tuple[Tuple[int, ...], ...]):
        new_minima = minima + (supp[pos],)
        if not member(FinSet(new_minima), model.alpha):
            return
        for end in range(pos + 1, n + 1):
            piece = supp[pos:end]
            if end == n:
                if len(acc) + 1 >= 2:
                    yield acc + (piece,)
            else:
                yield from compositions(end, new_minima, acc + (piece,))

    for parts in compositions(0, (), ()):
        child_choices = [tuple(_trees_over(model, p, depth - 1)) for p in parts]
        for combo in itertools.product(*child_choices):
            yield Node(tuple(combo))


# -- block sequences and the asymptotic-l1 machinery -------------------------


@dataclass(frozen=True)
class BlockSeq:
    """Finitely many nonzero vectors with strictly successive supports."""

    blocks: Tuple[SuppVec, ...]

    def __post_init__(self):
        prev_max = 0
        for b in self.blocks:
            if b.is_zero:
                raise PreconditionError("blocks must be nonzero")
            supp = b.support()
            if supp.min() <= prev_max:
                raise PreconditionError("block supports must be successive")
            prev_max = supp.max()

    def __len__(self):
        return len(self.blocks)

    def total(self) -> SuppVec:
        acc = SuppVec()
        for b in self.blocks:
            acc = acc.add(b)
        return acc


@dataclass(frozen=True)
class A1Check:
    ratio: Fraction
    passed: bool


def check_a1(model: SpaceModel, seq: BlockSeq) -> A1Check:
    """Ratio ||sum u_i|| / sum ||u_i|| for an admissible block sequence."""
    if len(seq) == 0:
        raise PreconditionError("need at least one block")
    m = len(seq)
    if m > seq.blocks[0].support().min():
        raise PreconditionError(
            f"admissibility needs m <= min supp u_1, got m={m}, "
            f"min={seq.blocks[0].support().min()}"
        )
    denom = sum((norm(model, b) for b in seq.blocks), Fraction(0))
    ratio = norm(model, seq.total()) / denom
    return A1Check(ratio=ratio, passed=ratio >= model.a1_constant)


@dataclass(frozen=True)
class A1SearchResult:
    worst_ratio: Optional[Fraction]
    witness: Optional[BlockSeq]
    evaluations: int
    partial: bool
    violation: bool  # worst_ratio fell below the declared floor: model bug


def a1_search(
    model: SpaceModel,
    lo: int,
    hi: int,
    coeff_grid: Sequence,
    budget: int = DEFAULT_A1_BUDGET,
    *,
    min_blocks: int = 1,
) -> A1SearchResult:
    """Exhaustive (within budget) scan of admissible block sequences with
    supports in [lo, hi] and coefficients from the grid; reports the worst
    ratio found.  Deterministic enumeration order, no randomness."""
    grid = tuple(sorted({_frac(c) for c in coeff_grid}))
    if not grid or any(c == 0 for c in grid):
        raise PreconditionError("coefficient grid must be nonzero and nonempty")
    window = tuple(range(lo, hi + 1))
    worst: Optional[Fraction] = None
    witness: Optional[BlockSeq] = None
    evals = 0
    truncated = False

    def assignments(supports: List[Tuple[int, ...]]) -> Iterator[BlockSeq]:
        pools = [
            itertools.product(grid, repeat=len(supp)) for supp in supports
        ]
        for combo in itertools.product(*pools):
            yield BlockSeq(
                tuple(
                    SuppVec(tuple(zip(supp, coeffs)))
                    for supp, coeffs in zip(supports, combo)
                )
            )

    def skeletons(m: int) -> Iterator[List[Tuple[int, ...]]]:
        # choose successive supports F_1 < ... < F_m with m <= min F_1
        def rec(count: int, floor: int, acc: List[Tuple[int, ...]]):
            if count == m:
                yield list(acc)
                return
            lo_bound = max(floor, m if count == 0 else floor)
            pool = [v for v in window if v >= lo_bound]
            for supp in _nonempty_subsets(tuple(pool)):
                acc.append(supp)
                yield from rec(count + 1, supp[-1] + 1, acc)
                acc.pop()

        yield from rec(0, lo, [])

    for m in itertools.count(max(1, min_blocks)):
        if m > hi:
            break
        any_skeleton = False
        for supports in skeletons(m):
            any_skeleton = True
            for seq in assignments(supports):
                if evals >= budget:
                    truncated = True
                    break
                evals += 1
                check = check_a1(model, seq)
                if worst is None or check.ratio < worst:
                    worst, witness = check.ratio, seq
            if truncated:
                break
        if truncated or not any_skeleton:
            break
    violation = worst is not None and worst < model.a1_constant
    return A1SearchResult(
        worst_ratio=worst,
        witness=witness,
        evaluations=evals,
        partial=truncated,
        violation=violation,
    )


def _nonempty_subsets(pool: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
    def rec(start: int, acc: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
        for i in range(start, len(pool)):
            cand = acc + (pool[i],)
            yield cand
            yield from rec(i + 1, cand)

    yield from rec(0, ())


@dataclass(frozen=True)
class SignTransferResult:
    signed_blocks: Tuple[SuppVec, ...]
    points: Tuple[KPoint, ...]


def sign_transfer(model: SpaceModel, seq: BlockSeq) -> SignTransferResult:
    """Replace non-negative f-coordinate blocks u_i by signed e-coordinate
    blocks v_i with ||v_i|| = ||u_i||, witnessed by norming points; asserts
    ||sum v_i|| <= ||sum u_i|| exactly."""
    if len(seq) == 0:
        return SignTransferResult((), ())
    signed: List[SuppVec] = []
    points: List[KPoint] = []
    for u in seq.blocks:
        if not u.is_nonnegative():
            raise PreconditionError("sign transfer expects non-negative blocks")
        t = norming_functional(model, u)
        pairing = sum(
            (c * eval_f(model, t, i) for i, c in u.pairs), Fraction(0)
        )
        if pairing != norm(model, u):
            raise SearchExhaustedError(
                "norming point search failed to attain the norm",
                diagnostic={"block": str(u)},
            )
        sigs = tuple(
            (i, c if point_eval_e(model, t, i) >= 0 else -c) for i, c in u.pairs
        )
        v = SuppVec(sigs)
        assert norm(model, v) == norm(model, u)
        signed.append(v)
        points.append(t)
    total_u = seq.total()
    total_v = SuppVec()
    for v in signed:
        total_v = total_v.add(v)
    assert norm(model, total_v) <= norm(model, total_u)
    return SignTransferResult(tuple(signed), tuple(points))
