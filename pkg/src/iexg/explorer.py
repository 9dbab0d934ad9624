"""
Desk-scale exploration of groups of interval exchanges: Cayley balls over
canonical forms, relation checks and witnesses for the dynamical properties of
the action (expansivity, minimality, freeness).
"""

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from iexg.config import DEFAULT_MAX_ELEMENTS, DEFAULT_RADIUS_CAP, DEFAULT_SEARCH_DEPTH
from iexg.gamma import GammaElement, GammaSpec, frac_of, span_basis
from iexg.iet import (
    Iet,
    ambient_group,
    apply,
    compose,
    generating_set,
    identity,
    inverse,
    shared_spec,
)
from iexg.logging import get_custom_logger
from iexg.subshift import Configuration, SubshiftContext, config_value
from iexg.utils import IexgError, IndexOutOfRange, InvalidArgument, format_rational

logger = get_custom_logger(__name__)

# (generator index, exponent +1 or -1)
Letter = tuple[int, int]
Word = tuple[Letter, ...]
# Finest width used to place an irrational point in a grid cell
CELL_PRECISION_BITS = 256


class BallCapExceeded(IexgError):
    def __init__(
        self,
        message: str = "The Cayley ball exceeds the configured radius or element cap.",
    ) -> None:
        super().__init__(message)


class NotFound(IexgError):
    def __init__(
        self,
        message: str = "No witness within the search depth. This is not a refutation.",
    ) -> None:
        super().__init__(message)


class SamePoint(IexgError):
    def __init__(self, message: str = "The two points are equal.") -> None:
        super().__init__(message)


def format_word(word: Word) -> str:
    """Readable form of a word, for example 'g0 g1^-1'."""
    if not word:
        return "e"
    return " ".join(f"g{i}" if e == 1 else f"g{i}^-1" for i, e in word)


@dataclass(frozen=True)
class BallReport:
    """The Cayley ball of a generator list."""

    radius: int
    element_count: int
    growth: tuple[int, ...]
    words: dict[str, Word] = field(compare=False)
    elements: tuple[Iet, ...] = field(compare=False, repr=False)

    @property
    def saturated(self) -> bool:
        """Whether the last sphere was empty, so the ball is the whole group."""
        return len(self.growth) > 1 and self.growth[-1] == self.growth[-2]

    def to_document(self, emit_words: bool = False) -> dict:
        document = {
            "radius": self.radius,
            "element_count": self.element_count,
            "growth": list(self.growth),
        }
        if emit_words:
            document["words"] = [
                {"word": format_word(self.words[f.canonical_key]), "element": f.to_document(include_spec=False)}
                for f in self.elements
            ]
        return document


def _letters(generators: Sequence[Iet]) -> list[tuple[Letter, Iet]]:
    letters = []
    for i, g in enumerate(generators):
        letters += [((i, 1), g), ((i, -1), inverse(g))]
    return letters


def cayley_ball(
    generators: Sequence[Iet],
    radius: int,
    *,
    spec: GammaSpec | None = None,
    radius_cap: int = DEFAULT_RADIUS_CAP,
    max_elements: int = DEFAULT_MAX_ELEMENTS,
) -> BallReport:
    """
    Breadth-first enumeration of the elements of word length at most `radius`.

    Words grow by appending letters on the right, letters ordered by generator
    index with the exponent +1 before -1. Every element keeps the first word
    that reaches it.

    Args:
        generators: Sequence of Iet
            The generators, all over one group.
        radius: Int
            Largest word length.
        spec: GammaSpec
            The group, needed when `generators` is empty.
        radius_cap: Int
            Largest radius accepted.
        max_elements: Int
            Largest ball size accepted.

    Returns:
        BallReport
            Cumulative counts per radius and a representative word per element.
    """
    if radius > radius_cap:
        raise BallCapExceeded(f"Radius {radius} exceeds the cap of {radius_cap}.")
    if generators:
        spec = shared_spec(generators)
    elif spec is None:
        raise InvalidArgument("A spec is required when there are no generators.")
    letters = _letters(generators)
    unit = identity(spec)
    words: dict[str, Word] = {unit.canonical_key: ()}
    elements = [unit]
    frontier: list[tuple[Iet, Word]] = [(unit, ())]
    growth = [1]
    for r in range(1, radius + 1):
        next_frontier = []
        for element, word in frontier:
            for letter, g in letters:
                product = compose(element, g)
                if product.canonical_key in words:
                    continue
                words[product.canonical_key] = word + (letter,)
                elements.append(product)
                next_frontier.append((product, word + (letter,)))
                if len(elements) > max_elements:
                    raise BallCapExceeded(
                        f"More than {max_elements} elements at radius {r}."
                    )
        frontier = next_frontier
        growth.append(len(elements))
        logger.debug(f"Radius {r}: {len(elements)} elements.")
    return BallReport(radius, len(elements), tuple(growth), words, tuple(elements))


def evaluate_word(
    generators: Sequence[Iet], word: Word, spec: GammaSpec | None = None
) -> Iet:
    """
    The product of a word, read left to right: (i₁, e₁)(i₂, e₂)... is
    g_{i₁}^{e₁} ∘ g_{i₂}^{e₂} ∘ ...

    Args:
        generators: Sequence of Iet
            The generator list the indices refer to.
        word: Word
            Letters (index, ±1).
        spec: GammaSpec
            The group, needed when `generators` is empty.

    Returns:
        Iet
            The canonical product.
    """
    spec = shared_spec(generators) if generators else spec
    result = identity(spec)
    for index, exponent in word:
        if not 0 <= index < len(generators) or exponent not in (1, -1):
            raise IndexOutOfRange(f"Invalid letter ({index}, {exponent}) for {len(generators)} generators.")
        g = generators[index]
        result = compose(result, g if exponent == 1 else inverse(g))
    return result


def verify_relation(
    generators: Sequence[Iet], word: Word, spec: GammaSpec | None = None
) -> bool:
    """Whether the word evaluates to the identity."""
    result = evaluate_word(generators, word, spec)
    return result == identity(result.spec)


def _vectors(dimension: int, norm: int) -> Iterator[tuple[int, ...]]:
    """Integer vectors with the given L1 norm, in a fixed order."""
    if dimension == 1:
        yield from ((norm,), (-norm,)) if norm else ((0,),)
        return
    for first in range(norm, -norm - 1, -1):
        for rest in _vectors(dimension - 1, norm - abs(first)):
            yield (first,) + rest


def _translation_generators(spec: GammaSpec, level: int = 0) -> list[GammaElement]:
    """Generators of Γ/ℤ used for searches."""
    if spec.is_rational:
        return [spec.at_level(level, 1)]
    generators = [spec.rational(Fraction(1, spec.k))] if spec.k > 1 else []
    return generators + [spec.generator(i) for i in range(1, spec.d + 1)]


def translations(
    spec: GammaSpec, depth: int, level: int = 0
) -> Iterator[GammaElement]:
    """
    Distinct elements of Γ/ℤ (reduced to [0, 1)), ordered by the L1 norm of their
    coefficients over the search generators.
    """
    generators = _translation_generators(spec, level)
    seen = set()
    for norm in range(depth + 1):
        for vector in _vectors(len(generators), norm):
            c = frac_of(sum((a * g for a, g in zip(vector, generators)), spec.zero))
            if c not in seen:
                seen.add(c)
                yield c


def separate_points(
    ctx: SubshiftContext,
    t: GammaElement,
    t_prime: GammaElement,
    depth: int = DEFAULT_SEARCH_DEPTH,
) -> GammaElement:
    """
    Find c in Γ/ℤ whose label differs between x_t and x_{t'}.

    Args:
        ctx: SubshiftContext
            The subshift.
        t: GammaElement
            First point of [0, 1).
        t_prime: GammaElement
            Second point of [0, 1), different from t.
        depth: Int
            Largest coefficient norm searched.

    Returns:
        GammaElement
            The first separating translation in search order.
    """
    if t == t_prime:
        raise SamePoint(f"Both points equal {t}.")
    first, second = Configuration(t), Configuration(t_prime)
    level = max(t.level, t_prime.level, ctx.lam.level) + 1
    for c in translations(ctx.spec, depth, level):
        if config_value(ctx, first, c) != config_value(ctx, second, c):
            logger.debug(f"{c} separates {t} and {t_prime}.")
            return c
    raise NotFound(f"No separating translation for {t} and {t_prime} within depth {depth}.")


def _cell_of(point: GammaElement, epsilon: Fraction, cells: int) -> int | None:
    if point.is_rational:
        return min(math.floor(point.rational_value() / epsilon), cells - 1)
    bits = 8
    while bits <= CELL_PRECISION_BITS:
        lo, hi = point.enclosure(bits)
        lo_cell, hi_cell = math.floor(lo / epsilon), math.floor(hi / epsilon)
        if lo_cell == hi_cell:
            return min(max(lo_cell, 0), cells - 1)
        bits *= 2
    return None


@dataclass(frozen=True)
class DensityReport:
    """Grid cells of width ε hit by an orbit."""

    dense: bool
    epsilon: Fraction
    cells: int
    witnesses: tuple[tuple[int, GammaElement], ...]
    missing: tuple[int, ...]

    def to_document(self) -> dict:
        return {
            "dense": self.dense,
            "epsilon": format_rational(self.epsilon),
            "cells": self.cells,
            "witnesses": [
                {"cell": cell, "point": point.to_document()} for cell, point in self.witnesses
            ],
            "missing": list(self.missing),
        }


def _orbit_points(spec: GammaSpec, t: GammaElement, depth: int) -> Iterator[GammaElement]:
    if not spec.is_rational:
        for c in translations(spec, depth):
            yield frac_of(t + c)
        return
    for level in range(depth + 1):
        for j in range(spec.denominator(level)):
            yield frac_of(t + spec.at_level(level, j))


def orbit_density(
    spec: GammaSpec,
    t: GammaElement,
    epsilon: Fraction,
    depth: int = DEFAULT_SEARCH_DEPTH,
) -> DensityReport:
    """
    Check that the Γ-orbit of t meets every cell [jε, (j+1)ε) of [0, 1).

    Finitely generated groups use the translations of coefficient norm at most
    `depth`; rational groups use the grid points of levels up to `depth`.

    Args:
        spec: GammaSpec
            The group.
        t: GammaElement
            Starting point.
        epsilon: Fraction
            Positive cell width.
        depth: Int
            Search depth.

    Returns:
        DensityReport
            dense is False only means that no witness was found at this depth.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise InvalidArgument(f"The cell width must be positive, got {epsilon}.")
    cells = max(math.ceil(1 / epsilon), 1)
    hits: dict[int, GammaElement] = {}
    for point in _orbit_points(spec, t, depth):
        cell = _cell_of(point, epsilon, cells)
        if cell is not None and cell not in hits:
            hits[cell] = point
            if len(hits) == cells:
                break
    missing = tuple(j for j in range(cells) if j not in hits)
    if missing:
        logger.debug(f"{len(missing)} of {cells} cells missed at depth {depth}.")
    return DensityReport(
        dense=not missing,
        epsilon=epsilon,
        cells=cells,
        witnesses=tuple(sorted(hits.items())),
        missing=missing,
    )


def find_fixed_point(f: Iet, points: Sequence[GammaElement]) -> GammaElement | None:
    """The first point fixed by f, or None if the action is free on them."""
    for point in points:
        if apply(f, point) == point:
            return point
    return None


def angle_span_check(spec: GammaSpec) -> bool:
    """Whether 1 and the angles of the generating set span all of Γ."""
    expected = [spec.rational(Fraction(1, spec.k))]
    expected += [spec.generator(i) for i in range(1, spec.d + 1)]
    return ambient_group(generating_set(spec)) == span_basis(expected)
