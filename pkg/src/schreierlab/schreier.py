"""Transfinite Schreier families: membership, maximality, enumeration,
restriction and inclusion thresholds.

The hierarchy is defined by recursion on the level ordinal:

  level 0          singletons and the empty set
  level 1          {F : |F| <= min F} plus the empty set
  successor z+1    unions of at most min F_1 many successive level-z pieces
  limit L          F belongs to level assoc(L, n) for some n <= min F

with the canonical associated sequences from the ordinal module.  All
families are hereditary (closed under subsets) and spreading (closed under
element-wise increase); both facts are exercised by the test suite rather
than assumed anywhere below.

Membership decisions go through a module-level memo table keyed by
(elements, level).  Insertions are idempotent, so concurrent use is safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union

from .errors import PreconditionError, ResourceBudgetError
from .ordinal import ONE, Order, Ordinal, OrdinalKind, assoc, compare

DEFAULT_ENUM_WIDTH = 20  # widest window enumerate() accepts by default


@dataclass(frozen=True, order=True)
class FinSet:
    """A finite, strictly increasing set of positive integers."""

    elements: Tuple[int, ...] = ()

    def __post_init__(self):
        prev = 0
        for x in self.elements:
            if not isinstance(x, int) or x <= prev:
                raise PreconditionError(
                    f"elements must be strictly increasing positive integers, got {self.elements}"
                )
            prev = x

    @classmethod
    def of(cls, xs: Iterable[int]) -> "FinSet":
        return cls(tuple(sorted(set(xs))))

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x: int) -> bool:
        return x in self.elements

    @property
    def is_empty(self) -> bool:
        return not self.elements

    def min(self) -> int:
        if not self.elements:
            raise PreconditionError("min of the empty set")
        return self.elements[0]

    def max(self) -> int:
        # paper convention max {} = 0
        return self.elements[-1] if self.elements else 0

    def union(self, other: "FinSet") -> "FinSet":
        return FinSet.of(self.elements + other.elements)

    def intersect(self, other: "FinSet") -> "FinSet":
        other_set = set(other.elements)
        return FinSet(tuple(x for x in self.elements if x in other_set))

    def issubset(self, other: "FinSet") -> bool:
        return set(self.elements) <= set(other.elements)

    def with_element(self, x: int) -> "FinSet":
        return FinSet.of(self.elements + (x,))

    def subsets(self) -> Iterator["FinSet"]:
        """All subsets in lexicographic (tuple) order, empty set first."""
        n = len(self.elements)

        def rec(start: int, acc: List[int]) -> Iterator[FinSet]:
            yield FinSet(tuple(acc))
            for i in range(start, n):
                acc.append(self.elements[i])
                yield from rec(i + 1, acc)
                acc.pop()

        return rec(0, [])

    def __str__(self):
        return "{" + ",".join(map(str, self.elements)) + "}"


EMPTY = FinSet()

_member_memo: Dict[Tuple[Tuple[int, ...], Ordinal], bool] = {}


def member(fin: FinSet, alpha: Ordinal) -> bool:
    """Decide membership of fin in the level-alpha family."""
    if fin.is_empty:
        return True
    return _member(fin.elements, alpha)


def _member(elems: Tuple[int, ...], alpha: Ordinal) -> bool:
    if not elems:
        return True
    key = (elems, alpha)
    hit = _member_memo.get(key)
    if hit is not None:
        return hit
    kind = alpha.kind()
    if kind is OrdinalKind.ZERO:
        out = len(elems) <= 1
    elif alpha == ONE:
        out = len(elems) <= elems[0]
    elif kind is OrdinalKind.SUCCESSOR:
        out = _member_successor(elems, alpha.predecessor())
    else:
        # limit level: some n <= min F admits F one level up the sequence
        out = any(_member(elems, assoc(alpha, n)) for n in range(1, elems[0] + 1))
    _member_memo[key] = out
    return out


def _member_successor(elems: Tuple[int, ...], zeta: Ordinal) -> bool:
    budget = elems[0]
    # greedy longest-valid-prefix pass; near-linear and usually enough
    count, rest = 0, elems
    while rest:
        j = _longest_prefix(rest, zeta)
        if j == 0:
            break
        count += 1
        rest = rest[j:]
        if count > budget:
            break
    if not rest and count <= budget:
        return True
    # safety net: exact minimum piece count over all splits
    return _min_pieces(elems, zeta, budget)


def _longest_prefix(elems: Tuple[int, ...], zeta: Ordinal) -> int:
    # prefix membership is downward closed (hereditary), so scan from the top
    for j in range(len(elems), 0, -1):
        if _member(elems[:j], zeta):
            return j
    return 0


def _min_pieces(elems: Tuple[int, ...], zeta: Ordinal, budget: int) -> bool:
    memo: Dict[Tuple[int, int], bool] = {}

    def ok(start: int, left: int) -> bool:
        if start == len(elems):
            return True
        if left == 0:
            return False
        key = (start, left)
        hit = memo.get(key)
        if hit is not None:
            return hit
        out = False
        for j in range(start + 1, len(elems) + 1):
            if _member(elems[start:j], zeta) and ok(j, left - 1):
                out = True
                break
        memo[key] = out
        return out

    return ok(0, budget)


class Maximality(Enum):
    NOT_MEMBER = "not_member"
    EXTENDABLE = "extendable"
    MAXIMAL = "maximal"


def is_maximal(fin: FinSet, alpha: Ordinal) -> Maximality:
    """Whether fin admits no extension past its maximum within the family.

    Testing the single extension max F + 1 suffices because membership of
    F + {k} for k > max F does not depend on k (spread-invariance; checked
    by a property test, not assumed silently elsewhere).
    """
    if fin.is_empty:
        raise PreconditionError("maximality of the empty set is not defined")
    if not member(fin, alpha):
        return Maximality.NOT_MEMBER
    if member(fin.with_element(fin.max() + 1), alpha):
        return Maximality.EXTENDABLE
    return Maximality.MAXIMAL


def members_over(candidates: Tuple[int, ...], alpha: Ordinal) -> Iterator[FinSet]:
    """All family members drawn from the given sorted candidate pool,
    in lexicographic order (empty set first).

    Prunes by hereditarity: once F is outside the family no superset can
    be inside, so the branch below F is dropped (siblings still run).
    """
    n = len(candidates)

    def rec(start: int, acc: List[int]) -> Iterator[FinSet]:
        yield FinSet(tuple(acc))
        for i in range(start, n):
            acc.append(candidates[i])
            if _member(tuple(acc), alpha):
                yield from rec(i + 1, acc)
            acc.pop()

    return rec(0, [])


def enumerate_members(
    alpha: Ordinal,
    lo: int,
    hi: int,
    *,
    maximal: bool = False,
    max_width: int = DEFAULT_ENUM_WIDTH,
) -> List[FinSet]:
    """Exactly the family members inside [lo, hi]; optionally only those
    maximal within the window."""
    if not (1 <= lo <= hi):
        raise PreconditionError(f"window must satisfy 1 <= lo <= hi, got [{lo},{hi}]")
    if hi - lo + 1 > max_width:
        raise ResourceBudgetError(
            f"window width {hi - lo + 1} exceeds the enumeration budget {max_width}",
            required=hi - lo + 1,
            budget=max_width,
        )
    candidates = tuple(range(lo, hi + 1))
    all_members = list(members_over(candidates, alpha))
    if not maximal:
        return all_members
    member_set = {m.elements for m in all_members}
    out = []
    for m in all_members:
        if m.is_empty:
            continue
        # hereditarity makes single-element extensions a complete test
        if any(
            k not in m and tuple(sorted(m.elements + (k,))) in member_set
            for k in candidates
        ):
            continue
        out.append(m)
    return out


@dataclass(frozen=True)
class SchreierFamily:
    alpha: Ordinal


@dataclass(frozen=True)
class ExplicitFamily:
    """A finite hereditary family given by an explicit member list."""

    members: frozenset

    def __post_init__(self):
        for t in self.members:
            for sub in FinSet(t).subsets():
                if sub.elements not in self.members:
                    raise PreconditionError(
                        f"explicit family is not hereditary: {sub} missing under {t}"
                    )

    @classmethod
    def closure(cls, sets: Iterable[FinSet]) -> "ExplicitFamily":
        """Hereditary closure of the given sets."""
        acc = {EMPTY.elements}
        for s in sets:
            for sub in s.subsets():
                acc.add(sub.elements)
        return cls(frozenset(acc))

    def __contains__(self, fin: FinSet) -> bool:
        return fin.elements in self.members

    def sorted_members(self) -> List[FinSet]:
        return [FinSet(t) for t in sorted(self.members)]


FamilyHandle = Union[SchreierFamily, ExplicitFamily]


def restrict_family(
    fam: FamilyHandle,
    m: FinSet,
    window: Optional[Tuple[int, int]] = None,
    *,
    max_width: int = DEFAULT_ENUM_WIDTH,
) -> ExplicitFamily:
    """The family {F intersect M}; hereditary whenever the input is."""
    if isinstance(fam, ExplicitFamily):
        restricted = frozenset(FinSet(t).intersect(m).elements for t in fam.members)
        out = ExplicitFamily(restricted)
    else:
        if window is None:
            raise PreconditionError(
                "restricting a Schreier family needs a window bound"
            )
        members = enumerate_members(fam.alpha, window[0], window[1], max_width=max_width)
        out = ExplicitFamily(frozenset(f.intersect(m).elements for f in members))
    assert _is_hereditary(out), "restriction must preserve hereditarity"
    return out


def _is_hereditary(fam: ExplicitFamily) -> bool:
    return all(
        sub.elements in fam.members
        for t in fam.members
        for sub in FinSet(t).subsets()
    )


@dataclass(frozen=True)
class ThresholdResult:
    n: int
    verified_up_to: int


def threshold(
    xi: Ordinal,
    eta: Ordinal,
    window_width: int,
    *,
    max_start: int = 64,
    max_width: int = DEFAULT_ENUM_WIDTH,
) -> ThresholdResult:
    """Least n such that every level-xi set inside [n, n + width] is also a
    level-eta set; sound only up to the reported verification bound."""
    if compare(xi, eta) is not Order.LT:
        raise PreconditionError(f"threshold needs {xi} < {eta}")
    if window_width < 0:
        raise PreconditionError("window width must be >= 0")
    if window_width + 1 > max_width:
        raise ResourceBudgetError(
            f"window width {window_width} exceeds budget {max_width}",
            required=window_width,
            budget=max_width,
        )
    for n in range(1, max_start + 1):
        candidates = tuple(range(n, n + window_width + 1))
        if all(member(f, eta) for f in members_over(candidates, xi)):
            return ThresholdResult(n=n, verified_up_to=n + window_width)
    raise ResourceBudgetError(
        f"no threshold found with start <= {max_start}",
        required=None,
        budget=max_start,
    )


def clear_member_memo() -> None:
    """Drop the shared membership cache (mainly for benchmarks)."""
    _member_memo.clear()
