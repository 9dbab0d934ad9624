"""
Interval exchange elements of [0, 1) with breakpoints and translations in Γ.

An element is stored in canonical form: pieces [cuts[i], cuts[i+1]) (the last
one ending at 1), each translated by shifts[i] with its image inside [0, 1).
Adjacent pieces with equal shift are merged, and the cut at 0 is always kept.
"""

import json
import math
import random
import warnings
from bisect import bisect_right
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import pairwise
from typing import Self

from sympy import factorint
from sympy.combinatorics import Permutation

from iexg.config import BUILTIN_SPECS, RuleType
from iexg.gamma import (
    AlgebraicGenerator,
    GammaElement,
    GammaSpec,
    MalformedSpec,
    MultiplierRule,
    SpecMismatch,
    floor_of,
    frac_of,
    make_element,
    make_spec,
    random_point,
    span_basis,
)
from iexg.logging import get_custom_logger
from iexg.utils import IexgError, IndexOutOfRange, require_key

logger = get_custom_logger(__name__)

# (start, length, shift) of an arc moved rigidly around the circle
Move = tuple[GammaElement, GammaElement, GammaElement]
# Corners of the range the generating set construction needs for its irrationals
GENERATOR_RANGE = (Fraction(2, 5), Fraction(1, 2))


class NotABijection(IexgError):
    def __init__(
        self,
        message: str = "The translated pieces do not tile [0, 1).",
    ) -> None:
        super().__init__(message)


class BadPartition(IexgError):
    def __init__(
        self,
        message: str = "Cuts must start at 0, increase strictly, stay below 1 "
        "and match the shifts one to one.",
    ) -> None:
        super().__init__(message)


class OutOfDomain(IexgError):
    def __init__(self, message: str = "Points must lie in [0, 1).") -> None:
        super().__init__(message)


class OverlappingIntervals(IexgError):
    def __init__(
        self,
        message: str = "The intervals to exchange are not disjoint.",
    ) -> None:
        super().__init__(message)


class IntervalMismatch(IexgError):
    def __init__(
        self,
        message: str = "The range of the first swap must be the source of the second.",
    ) -> None:
        super().__init__(message)


class GeneratorRangeError(IexgError):
    def __init__(
        self,
        message: str = "The irrational generators must increase strictly "
        "and lie in (2/5, 1/2).",
    ) -> None:
        super().__init__(message)


class NotGridAligned(IexgError):
    def __init__(
        self,
        message: str = "The element is not aligned with the requested grid.",
    ) -> None:
        super().__init__(message)


class NonRationalScale(IexgError):
    def __init__(
        self,
        message: str = "Groups can only be rescaled by nonzero rational elements.",
    ) -> None:
        super().__init__(message)


class WrongSpecKind(IexgError):
    def __init__(
        self,
        message: str = "The operation does not apply to this kind of group.",
    ) -> None:
        super().__init__(message)


class KTooSmall(UserWarning):
    """The rational denominator is outside the range where r_ka generators are guaranteed."""


class ConsistencyWarning(UserWarning):
    """Two grid levels disagree on the parity of an element."""


def shared_spec(items: Iterable) -> GammaSpec:
    specs = [item.spec for item in items]
    if any(s is not specs[0] and s != specs[0] for s in specs[1:]):
        raise SpecMismatch()
    return specs[0]


@dataclass(frozen=True)
class CircleSet:
    """
    Finite union of half-open arcs of the circle [0, 1), stored as disjoint,
    sorted, non-touching intervals [a, b) with 0 <= a < b <= 1.
    """

    spec: GammaSpec
    intervals: tuple[tuple[GammaElement, GammaElement], ...] = ()

    @classmethod
    def from_intervals(
        cls, spec: GammaSpec, intervals: Iterable[tuple[GammaElement, GammaElement]]
    ) -> Self:
        """Canonical set from intervals inside [0, 1], in any order."""
        merged: list[list[GammaElement]] = []
        for a, b in sorted((iv for iv in intervals if iv[0] < iv[1]), key=lambda iv: iv[0]):
            if merged and a <= merged[-1][1]:
                if b > merged[-1][1]:
                    merged[-1][1] = b
            else:
                merged.append([a, b])
        return cls(spec, tuple((a, b) for a, b in merged))

    @classmethod
    def arc(cls, spec: GammaSpec, start: GammaElement, length: GammaElement) -> Self:
        """
        The arc of the given length starting at `start` (mod 1).

        Args:
            spec: GammaSpec
                The group of the endpoints.
            start: GammaElement
                Start point, reduced mod 1.
            length: GammaElement
                Arc length. Non-positive lengths give the empty set, lengths of
                at least 1 the whole circle.

        Returns:
            CircleSet
                The arc, split at 0 if it wraps.
        """
        if length <= 0:
            return cls(spec)
        if length >= 1:
            return cls.full(spec)
        a = frac_of(start)
        b = a + length
        if b <= 1:
            return cls.from_intervals(spec, [(a, b)])
        return cls.from_intervals(spec, [(a, spec.one), (spec.zero, b - 1)])

    @classmethod
    def full(cls, spec: GammaSpec) -> Self:
        return cls(spec, ((spec.zero, spec.one),))

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def measure(self) -> GammaElement:
        """Total length."""
        return sum((b - a for a, b in self.intervals), self.spec.zero)

    def contains(self, t: GammaElement) -> bool:
        t = frac_of(t)
        return any(a <= t < b for a, b in self.intervals)

    def union(self, other: "CircleSet") -> Self:
        return self.from_intervals(self.spec, self.intervals + other.intervals)

    def intersection(self, other: "CircleSet") -> Self:
        pieces = []
        for a, b in self.intervals:
            for c, d in other.intervals:
                lo, hi = max(a, c), min(b, d)
                if lo < hi:
                    pieces.append((lo, hi))
        return self.from_intervals(self.spec, pieces)

    def complement(self) -> Self:
        gaps = []
        position = self.spec.zero
        for a, b in self.intervals:
            if position < a:
                gaps.append((position, a))
            position = b
        if position < 1:
            gaps.append((position, self.spec.one))
        return type(self)(self.spec, tuple(gaps))

    def translate(self, g: GammaElement) -> Self:
        """The set shifted by g around the circle."""
        result = type(self)(self.spec)
        for a, b in self.intervals:
            result = result.union(type(self).arc(self.spec, a + g, b - a))
        return result

    def isdisjoint(self, other: "CircleSet") -> bool:
        return self.intersection(other).is_empty

    def to_document(self) -> dict:
        return {
            "intervals": [[a.to_document(), b.to_document()] for a, b in self.intervals]
        }

    def __str__(self) -> str:
        if self.is_empty:
            return "∅"
        return " ∪ ".join(f"[{a}, {b})" for a, b in self.intervals)


@dataclass(frozen=True, eq=False)
class Iet:
    """An interval exchange element in canonical form."""

    spec: GammaSpec
    cuts: tuple[GammaElement, ...]
    shifts: tuple[GammaElement, ...]

    @property
    def pieces(self) -> list[tuple[GammaElement, GammaElement, GammaElement]]:
        """(start, end, shift) of every piece."""
        ends = self.cuts[1:] + (self.spec.one,)
        return list(zip(self.cuts, ends, self.shifts))

    @cached_property
    def canonical_key(self) -> str:
        """Serialized canonical cut/shift document, usable as an exact hash key."""
        return json.dumps(self.to_document(include_spec=False), sort_keys=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Iet):
            return NotImplemented
        return (
            self.cuts == other.cuts
            and self.shifts == other.shifts
            and (self.spec is other.spec or self.spec == other.spec)
        )

    def __hash__(self) -> int:
        return hash((self.cuts, self.shifts))

    def to_document(self, include_spec: bool = True) -> dict:
        document = {"spec": self.spec.to_document()} if include_spec else {}
        document["cuts"] = [c.to_document() for c in self.cuts]
        document["shifts"] = [s.to_document() for s in self.shifts]
        return document

    def __str__(self) -> str:
        pieces = ", ".join(f"[{a}, {b}) by {s}" for a, b, s in self.pieces)
        return f"Iet({pieces})"


def from_pieces(
    spec: GammaSpec,
    cuts: Sequence[GammaElement],
    shifts: Sequence[GammaElement],
) -> Iet:
    """
    Validate piece data and return the canonical element.

    Args:
        spec: GammaSpec
            The group of angles.
        cuts: Sequence of GammaElement
            Strictly increasing left endpoints in [0, 1), starting at 0.
        shifts: Sequence of GammaElement
            Translation of each piece, taken mod 1.

    Returns:
        Iet
            The canonical element.
    """
    cuts, shifts = tuple(cuts), tuple(shifts)
    if not cuts or len(cuts) != len(shifts):
        raise BadPartition(f"Got {len(cuts)} cuts and {len(shifts)} shifts.")
    if any(e.spec is not spec and e.spec != spec for e in cuts + shifts):
        raise SpecMismatch()
    if cuts[0] != 0:
        raise BadPartition(f"The first cut must be 0, got {cuts[0]}.")
    if any(not a < b for a, b in pairwise(cuts)) or not cuts[-1] < 1:
        raise BadPartition("Cuts must increase strictly and stay below 1.")

    split: list[tuple[GammaElement, GammaElement, GammaElement]] = []
    ends = cuts[1:] + (spec.one,)
    for start, end, shift in zip(cuts, ends, shifts):
        shift = shift - floor_of(start + shift)
        wrap = spec.one - shift
        if wrap < end:
            split += [(start, wrap, shift), (wrap, end, shift - 1)]
        else:
            split.append((start, end, shift))

    position = spec.zero
    for lo, hi in sorted(((a + s, b + s) for a, b, s in split), key=lambda iv: iv[0]):
        if lo != position:
            kind = "overlap" if lo < position else "gap"
            raise NotABijection(f"Image intervals {kind} at {position}.")
        position = hi
    if position != 1:
        raise NotABijection(f"Image intervals stop at {position} instead of 1.")

    canonical_cuts, canonical_shifts = [split[0][0]], [split[0][2]]
    for start, _, shift in split[1:]:
        if shift != canonical_shifts[-1]:
            canonical_cuts.append(start)
            canonical_shifts.append(shift)
    return Iet(spec, tuple(canonical_cuts), tuple(canonical_shifts))


def from_moves(spec: GammaSpec, moves: Iterable[Move]) -> Iet:
    """
    Element translating each given arc by its shift, identity elsewhere.

    Args:
        spec: GammaSpec
            The group of angles.
        moves: Iterable of (start, length, shift)
            Disjoint arcs of the circle and their translations.

    Returns:
        Iet
            The canonical element.
    """
    covered = CircleSet(spec)
    pieces = []
    for start, length, shift in moves:
        arc = CircleSet.arc(spec, start, length)
        if not covered.isdisjoint(arc):
            raise OverlappingIntervals(f"Arc {arc} meets another moved arc.")
        covered = covered.union(arc)
        pieces += [(a, shift) for a, _ in arc.intervals]
    pieces += [(a, spec.zero) for a, _ in covered.complement().intervals]
    pieces.sort(key=lambda piece: piece[0])
    return from_pieces(spec, [a for a, _ in pieces], [s for _, s in pieces])


def identity(spec: GammaSpec) -> Iet:
    return Iet(spec, (spec.zero,), (spec.zero,))


def rotation(spec: GammaSpec, c: GammaElement) -> Iet:
    """Rotation of the circle by c."""
    return from_pieces(spec, [spec.zero], [c])


def _shift_at(f: Iet, t: GammaElement) -> GammaElement:
    return f.shifts[bisect_right(f.cuts, t) - 1]


def apply(f: Iet, t: GammaElement) -> GammaElement:
    """
    Image of a point of [0, 1).

    Args:
        f: Iet
            The element.
        t: GammaElement
            A point with 0 <= t < 1.

    Returns:
        GammaElement
            f(t), in [0, 1).
    """
    shared_spec([f, t])
    if not (t >= 0 and t < 1):
        raise OutOfDomain(f"{t} is not in [0, 1).")
    return t + _shift_at(f, t)


def inverse(f: Iet) -> Iet:
    images = sorted(
        ((start + shift, -shift) for start, shift in zip(f.cuts, f.shifts)),
        key=lambda image: image[0],
    )
    return from_pieces(f.spec, [a for a, _ in images], [s for _, s in images])


def compose(f: Iet, g: Iet) -> Iet:
    """
    The product f∘g (g acts first).

    Args:
        f: Iet
            Applied second.
        g: Iet
            Applied first.

    Returns:
        Iet
            The canonical composition.
    """
    spec = shared_spec([f, g])
    g_inverse = inverse(g)
    points = set(g.cuts) | {apply(g_inverse, c) for c in f.cuts}
    cuts = sorted(points)
    shifts = [_shift_at(g, t) + _shift_at(f, apply(g, t)) for t in cuts]
    return from_pieces(spec, cuts, shifts)


def equals(f: Iet, g: Iet) -> bool:
    shared_spec([f, g])
    return f == g


def power(f: Iet, n: int) -> Iet:
    base = f if n >= 0 else inverse(f)
    result = identity(f.spec)
    for _ in range(abs(n)):
        result = compose(base, result)
    return result


def commutator(f: Iet, g: Iet) -> Iet:
    """The commutator in which f acts first: t ↦ g⁻¹(f⁻¹(g(f(t))))."""
    return compose(inverse(g), compose(inverse(f), compose(g, f)))


def order(f: Iet, bound: int = 1000) -> int | None:
    """Smallest n >= 1 with fⁿ = id, or None if there is none up to `bound`."""
    unit = identity(f.spec)
    current = f
    for n in range(1, bound + 1):
        if current == unit:
            return n
        current = compose(f, current)
    return None


def angles(f: Iet) -> frozenset[GammaElement]:
    """The distinct translation amounts of the element."""
    return frozenset(f.shifts)


def gamma_B(spec: GammaSpec, a: GammaElement, b: GammaElement, c: GammaElement) -> Iet:
    """
    Involution exchanging [a, b) and [a + c, b + c) (mod 1).

    Args:
        spec: GammaSpec
            The group of angles.
        a: GammaElement
            Left end of the first interval, in [0, 1).
        b: GammaElement
            Right end of the first interval, a < b <= 1.
        c: GammaElement
            Distance between the two intervals.

    Returns:
        Iet
            The involution, identity outside the two intervals.
    """
    if not (0 <= a < b <= 1):
        raise BadPartition(f"Expected 0 <= a < b <= 1, got a = {a}, b = {b}.")
    length = b - a
    source = CircleSet.arc(spec, a, length)
    target = CircleSet.arc(spec, a + c, length)
    if not source.isdisjoint(target):
        raise OverlappingIntervals(f"{source} and {target} intersect.")
    return from_moves(spec, [(a, length, c), (a + c, length, -c)])


def gamma_B1B2(
    spec: GammaSpec,
    first: tuple[GammaElement, GammaElement, GammaElement],
    second: tuple[GammaElement, GammaElement, GammaElement],
) -> Iet:
    """
    Order 3 cycle moving [a₁, b₁) to its translate by c₁, that translate by c₂,
    and the result back to [a₁, b₁).

    Args:
        spec: GammaSpec
            The group of angles.
        first: Tuple of GammaElement
            (a₁, b₁, c₁).
        second: Tuple of GammaElement
            (a₂, b₂, c₂) with a₂ = a₁ + c₁ and b₂ = b₁ + c₁ (mod 1).

    Returns:
        Iet
            The commutator of the two swaps, built directly.
    """
    (a1, b1, c1), (a2, b2, c2) = first, second
    length = b1 - a1
    if b2 - a2 != length or frac_of(a2) != frac_of(a1 + c1):
        raise IntervalMismatch(
            f"The range of the first swap starts at {frac_of(a1 + c1)} with length {length}, "
            f"but the second swap acts on [{a2}, {b2})."
        )
    arcs = [CircleSet.arc(spec, start, length) for start in (a1, a2, a2 + c2)]
    for i, j in ((0, 1), (0, 2), (1, 2)):
        if not arcs[i].isdisjoint(arcs[j]):
            raise OverlappingIntervals(f"{arcs[i]} and {arcs[j]} intersect.")
    return from_moves(spec, [(a1, length, c1), (a2, length, c2), (a2 + c2, length, -(c1 + c2))])


def _check_generator_range(spec: GammaSpec) -> None:
    if spec.is_rational:
        raise WrongSpecKind("The σ generators need irrational generators.")
    lower, upper = GENERATOR_RANGE
    previous = spec.rational(lower)
    for i in range(1, spec.d + 1):
        lam = spec.generator(i)
        if not previous < lam:
            raise GeneratorRangeError(f"λ{i} = {float(lam):.6f} breaks 2/5 < λ1 < ... < λd.")
        previous = lam
    if not previous < upper:
        raise GeneratorRangeError(f"λ{spec.d} = {float(previous):.6f} is not below 1/2.")


def sigma(spec: GammaSpec, i: int) -> Iet:
    """
    The order 3 generator σᵢ: moves [λ₁, 1−2λᵢ+λ₁) by λᵢ, [λ₁+λᵢ, 1+λ₁−λᵢ)
    by λᵢ−1 and [λ₁+2λᵢ−1, λ₁) by 1−2λᵢ.
    """
    _check_generator_range(spec)
    if not 1 <= i <= spec.d:
        raise IndexOutOfRange(f"Generator index {i} not in 1..{spec.d}.")
    one, lam1, lam = spec.one, spec.generator(1), spec.generator(i)
    length = one - 2 * lam
    return from_moves(
        spec,
        [
            (lam1, length, lam),
            (lam1 + lam, length, lam - one),
            (lam1 + 2 * lam - one, length, length),
        ],
    )


def sigma_hat(spec: GammaSpec, i: int) -> Iet:
    """
    The order 3 generator σ̂ᵢ: moves [0, 1−2λᵢ) and [λᵢ, 1−λᵢ) by λᵢ and
    [2λᵢ, 1) by −2λᵢ.
    """
    _check_generator_range(spec)
    if not 1 <= i <= spec.d:
        raise IndexOutOfRange(f"Generator index {i} not in 1..{spec.d}.")
    lam = spec.generator(i)
    length = spec.one - 2 * lam
    return from_moves(
        spec,
        [(spec.zero, length, lam), (lam, length, lam), (2 * lam, length, -2 * lam)],
    )


def r_ka(spec: GammaSpec, a: GammaElement) -> Iet:
    """
    Cycle of the three arcs of length 1/k starting at a: the first two move
    forward by 1/k, the third back by 2/k.

    Emits KTooSmall when k <= 9.
    """
    if spec.is_rational:
        raise WrongSpecKind("r_ka needs a finitely generated group with rational denominator k.")
    if spec.k <= 9:
        warnings.warn(
            KTooSmall(f"k = {spec.k} <= 9: r_ka is outside the range covered by the generating set."),
            stacklevel=2,
        )
    step = spec.rational(Fraction(1, spec.k))
    return from_moves(spec, [(a, 2 * step, step), (a + 2 * step, step, -2 * step)])


def r_ka_offsets(spec: GammaSpec) -> list[GammaElement]:
    """The starting points λ₁−1/k, λ₁−2/k, 1−2/k, 1−1/k of the r_ka generators."""
    step = spec.rational(Fraction(1, spec.k))
    lam1 = spec.generator(1)
    return [lam1 - step, lam1 - 2 * step, spec.one - 2 * step, spec.one - step]


def generating_set(spec: GammaSpec) -> list[Iet]:
    """
    Generators of the derived subgroup: σᵢ, σ̂ᵢ for each irrational, then the
    four r_ka when the rational denominator k exceeds 1.

    Args:
        spec: GammaSpec
            A finitely generated group with 2/5 < λ₁ < ... < λ_d < 1/2.

    Returns:
        List of Iet
            2d elements, or 2d + 4 when k > 1.
    """
    generators = []
    for i in range(1, spec.d + 1):
        generators += [sigma(spec, i), sigma_hat(spec, i)]
    if spec.k > 1:
        generators += [r_ka(spec, a) for a in r_ka_offsets(spec)]
    logger.debug(f"Built {len(generators)} generators for {spec}.")
    return generators


def _require_rational(spec: GammaSpec) -> None:
    if not spec.is_rational:
        raise WrongSpecKind("This operation needs a rational group given by a multiplier rule.")


def sigma_ij(spec: GammaSpec, n: int, i: int, j: int) -> Iet:
    """
    Transposition of the level-n grid intervals i and j (0-based).

    Args:
        spec: GammaSpec
            A rational group.
        n: Int
            The level; the grid has k(n) intervals.
        i: Int
            First interval index.
        j: Int
            Second interval index, i < j < k(n).

    Returns:
        Iet
            The swap of [i/k(n), (i+1)/k(n)) and [j/k(n), (j+1)/k(n)).
    """
    _require_rational(spec)
    size = spec.denominator(n)
    if not 0 <= i < j < size:
        raise IndexOutOfRange(f"Need 0 <= i < j < {size}, got i = {i}, j = {j}.")
    return gamma_B(spec, spec.at_level(n, i), spec.at_level(n, i + 1), spec.at_level(n, j - i))


def aligned_level(f: Iet) -> int:
    """Lowest level whose grid contains every cut and shift of f."""
    _require_rational(f.spec)
    return max(e.level for e in f.cuts + f.shifts)


def iota_embed(spec: GammaSpec, f: Iet, n: int) -> Iet:
    """
    View an element of the level-n permutation group at level n + 1. The
    element itself is unchanged; only alignment at level n is checked.
    """
    _require_rational(spec)
    if aligned_level(f) > n:
        raise NotGridAligned(f"Element needs level {aligned_level(f)}, not {n}.")
    return f


def embedding_check(spec: GammaSpec, n: int, i: int) -> bool:
    """
    Check that σⁿ_{i,i+1} equals the product over m = 0 .. k_{n+1}−1 of
    σⁿ⁺¹_{i·k_{n+1}+m, (i+1)·k_{n+1}+m}.
    """
    _require_rational(spec)
    if not 0 <= i < spec.denominator(n) - 1:
        raise IndexOutOfRange(f"Need 0 <= i < {spec.denominator(n) - 1}, got {i}.")
    multiplier = spec.rule.multiplier(n + 1)
    product = identity(spec)
    for m in range(multiplier):
        factor = sigma_ij(spec, n + 1, i * multiplier + m, (i + 1) * multiplier + m)
        product = compose(factor, product)
    return equals(iota_embed(spec, sigma_ij(spec, n, i, i + 1), n), product)


def as_permutation(spec: GammaSpec, f: Iet, n: int) -> Permutation:
    """
    The permutation of the k(n) level-n grid intervals induced by f.

    Args:
        spec: GammaSpec
            A rational group.
        f: Iet
            An element whose cuts and shifts are multiples of 1/k(n).
        n: Int
            The level.

    Returns:
        Permutation
            Grid interval j is sent to interval perm(j).
    """
    _require_rational(spec)
    shared_spec([f, spec.zero])
    if aligned_level(f) > n:
        raise NotGridAligned(f"Element needs level {aligned_level(f)}, not {n}.")
    size = spec.denominator(n)
    images = [
        int(apply(f, spec.at_level(n, j)).rational_value() * size) for j in range(size)
    ]
    return Permutation(images)


def sign_hom(
    spec: GammaSpec,
    f: Iet,
    level: int | None = None,
    check_next_level: bool = True,
) -> int:
    """
    Parity of the grid permutation of f.

    Args:
        spec: GammaSpec
            A rational group.
        f: Iet
            The element.
        level: Int
            Level to compute at. Defaults to the lowest aligned level.
        check_next_level: Bool
            Also compute at the next level and emit ConsistencyWarning on
            disagreement.

    Returns:
        Int
            0 or 1.
    """
    minimal = aligned_level(f)
    level = minimal if level is None else level
    if level < minimal:
        raise NotGridAligned(f"Element needs level {minimal}, not {level}.")
    parity = as_permutation(spec, f, level).parity()
    if check_next_level:
        following = as_permutation(spec, f, level + 1).parity()
        if following != parity:
            warnings.warn(
                ConsistencyWarning(
                    f"Parity {parity} at level {level} but {following} at level {level + 1} "
                    f"(multiplier {spec.rule.multiplier(level + 1)})."
                ),
                stacklevel=2,
            )
    return parity


def ambient_group(elements: Sequence[Iet]) -> list[GammaElement]:
    """
    Hermite normal form basis of the subgroup generated by 1 and every angle
    of the given elements.
    """
    spec = shared_spec(elements)
    generators = [spec.one] + [s for f in elements for s in f.shifts]
    return span_basis(generators)


def _scaled_generator(generator: AlgebraicGenerator, scale: Fraction) -> AlgebraicGenerator:
    # root of P(x/scale): coefficient j picks up (q/p)^j, cleared by p^deg
    p, q = scale.numerator, scale.denominator
    degree = len(generator.minpoly) - 1
    coeffs = [c * q**j * p ** (degree - j) for j, c in enumerate(generator.minpoly)]
    content = math.gcd(*coeffs)
    coeffs = [c // content for c in coeffs]
    lo, hi = (scale * v for v in generator.interval)
    return AlgebraicGenerator(tuple(coeffs), (min(lo, hi), max(lo, hi)))


def rescale_spec(spec: GammaSpec, x: GammaElement) -> GammaSpec:
    """
    The spec of (1/x)Γ for a nonzero rational x in Γ.

    Args:
        spec: GammaSpec
            The group Γ.
        x: GammaElement
            A nonzero rational element of Γ.

    Returns:
        GammaSpec
            The rescaled group; it contains 1 because x is in Γ.
    """
    shared_spec([x, spec.zero])
    if not x.is_rational or x.is_zero:
        raise NonRationalScale(f"Cannot rescale by {x}.")
    value = x.rational_value()
    if not spec.is_rational:
        # x = m/k, so (1/x)(1/k)Z = (1/m)Z and λ becomes (k/m)λ
        m = value.numerator * (spec.k // value.denominator)
        scale = Fraction(spec.k, m)
        return GammaSpec(
            spec.kind,
            k=abs(m),
            irrationals=tuple(_scaled_generator(g, scale) for g in spec.irrationals),
        )
    infinite = set(supernatural_exponents(spec.rule))
    primes = set(factorint(value.numerator)) | set(factorint(value.denominator))
    primes.discard(-1)
    if spec.rule.type is RuleType.FACTORIAL or primes <= infinite:
        return spec
    # (q/p)Γ is the union of (1/(p·k(n)/q))Z over the levels n where q divides k(n)
    p, q = abs(value.numerator), value.denominator
    level = next(n for n in range(64) if spec.denominator(n) % q == 0)
    base = p * spec.denominator(level) // q
    last = max(level + 1, len(spec.rule.multipliers))
    tail = [spec.rule.multiplier(j) for j in range(level + 1, last + 1)]
    multipliers = ([base] if base > 1 else []) + tail
    return GammaSpec(
        spec.kind,
        rule=MultiplierRule(RuleType.LIST, multipliers=tuple(multipliers), repeat_last=True),
    )


def rescale_element(
    spec: GammaSpec, rescaled: GammaSpec, x: GammaElement, element: GammaElement
) -> GammaElement:
    """The element y/x of the rescaled group, for y in Γ."""
    shared_spec([x, element, spec.zero])
    if not x.is_rational or x.is_zero:
        raise NonRationalScale(f"Cannot rescale by {x}.")
    if spec.is_rational:
        return rescaled.rational(element.rational_value() / x.rational_value())
    sign = 1 if x.rational_value() > 0 else -1
    return rescaled.element((sign * element.coeffs[0],) + element.coeffs[1:])


def supernatural_exponents(rule: MultiplierRule) -> dict[int, float]:
    """
    Primes with infinite exponent in the product of the multipliers.

    Factorial rules make every prime infinite and return an empty mapping; use
    `invariants.supernatural` for the complete description.
    """
    if rule.type is RuleType.CONSTANT:
        return {p: math.inf for p in factorint(rule.m)}
    if rule.type is RuleType.LIST:
        return {p: math.inf for p in factorint(rule.multipliers[-1])}
    return {}


def random_iet(spec: GammaSpec, rng: random.Random, max_pieces: int = 8) -> Iet:
    """
    A random element: [0, 1) is cut at random points of Γ and the pieces are
    laid back down in a random order.

    Args:
        spec: GammaSpec
            The group of angles.
        rng: random.Random
            Source of randomness.
        max_pieces: Int
            Upper bound on the number of pieces.

    Returns:
        Iet
            A valid element by construction.
    """
    points = {random_point(spec, rng) for _ in range(rng.randint(0, max_pieces - 1))}
    cuts = sorted(points | {spec.zero})
    ends = cuts[1:] + [spec.one]
    order = list(range(len(cuts)))
    rng.shuffle(order)
    shifts: list[GammaElement] = [spec.zero] * len(cuts)
    position = spec.zero
    for index in order:
        shifts[index] = position - cuts[index]
        position = position + (ends[index] - cuts[index])
    return from_pieces(spec, cuts, shifts)


def resolve_spec(reference: str | Mapping) -> GammaSpec:
    """
    A spec from a builtin name or an inline spec document.

    Args:
        reference: Str or Mapping
            Name in the builtin registry, or a spec document.

    Returns:
        GammaSpec
            The validated spec.
    """
    if isinstance(reference, str):
        if reference not in BUILTIN_SPECS:
            raise MalformedSpec(
                f"Unknown builtin spec {reference!r}. Available: {', '.join(BUILTIN_SPECS)}."
            )
        return make_spec(BUILTIN_SPECS[reference])
    return make_spec(reference)


def load_iet(document: Mapping, spec: GammaSpec | None = None) -> Iet:
    """
    Parse an element document, normalizing non-canonical input.

    Args:
        document: Mapping
            The element document. Its 'spec' field (builtin name or inline
            document) is used when `spec` is not given.
        spec: GammaSpec
            The group to read the document over.

    Returns:
        Iet
            The canonical element.
    """
    if spec is None:
        spec = resolve_spec(require_key(document, "spec", "interval exchange"))
    cuts = require_key(document, "cuts", "interval exchange")
    shifts = require_key(document, "shifts", "interval exchange")
    if not isinstance(cuts, list) or not isinstance(shifts, list):
        raise MalformedSpec("'cuts' and 'shifts' must be lists.")
    return from_pieces(
        spec,
        [make_element(spec, c) for c in cuts],
        [make_element(spec, s) for s in shifts],
    )
