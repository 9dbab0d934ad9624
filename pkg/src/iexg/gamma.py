"""
Exact elements of a dense subgroup Γ of the reals containing 1.

Two kinds of groups are supported:

* finitely generated: Γ = (1/k)ℤ ⊕ λ₁ℤ ⊕ ... ⊕ λ_dℤ, where each λᵢ is a real
  algebraic number given by its minimal polynomial and an isolating interval.
  Elements are integer vectors (a₀, a₁, ..., a_d) meaning a₀/k + Σ aᵢλᵢ.
* rational: Γ = ⋃ₙ (1/k(n))ℤ where k(n) is the product of the first n
  multipliers of a rule. Elements are (level, numerator) pairs, kept at the
  lowest level that represents them.

Zero testing is symbolic. Signs of nonzero irrational elements are found by
refining rational enclosures of the generators, which is sound as long as the
declared generators are linearly independent over the rationals.
"""

import math
import random
import threading
from collections.abc import Mapping, Sequence
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator

from sympy import Poly, Rational, Symbol
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import hermite_normal_form

from iexg.config import (
    DEFAULT_PRECISION_BITS,
    MAX_INTERVAL_DENOMINATOR,
    RuleType,
    Sign,
    SpecKind,
)
from iexg.logging import get_custom_logger
from iexg.utils import (
    IexgError,
    IndexOutOfRange,
    InvalidArgument,
    MalformedDocument,
    format_rational,
    parse_rational,
    require_key,
)

logger = get_custom_logger(__name__)

X = Symbol("x")
INITIAL_BITS = 32
# Deepest level searched when writing a rational as an element of a rational group
LEVEL_SEARCH_LIMIT = 64


class RootCountError(IexgError):
    def __init__(
        self,
        message: str = "The isolating interval must contain exactly one root "
        "of the minimal polynomial.",
    ) -> None:
        super().__init__(message)


class DensityError(IexgError):
    def __init__(
        self,
        message: str = "The described group is not dense in the reals.",
    ) -> None:
        super().__init__(message)


class MalformedSpec(MalformedDocument):
    def __init__(
        self,
        message: str = "The group description is malformed.",
    ) -> None:
        super().__init__(message)


class SpecMismatch(IexgError):
    def __init__(
        self,
        message: str = "The elements belong to different groups.",
    ) -> None:
        super().__init__(message)


class PrecisionExhausted(IexgError):
    def __init__(
        self,
        message: str = "The sign could not be resolved within the bit budget. "
        "The declared generators are probably linearly dependent over the rationals.",
    ) -> None:
        super().__init__(message)


class NotInGamma(IexgError):
    def __init__(
        self,
        message: str = "The value is not an element of the group.",
    ) -> None:
        super().__init__(message)


_precision_bits: ContextVar[int] = ContextVar(
    "precision_bits", default=DEFAULT_PRECISION_BITS
)


@contextmanager
def precision(bits: int) -> Iterator[None]:
    """
    Set the default bit budget of sign determination within a block.

    Args:
        bits: Int
            Maximum number of bisection bits per generator.
    """
    token = _precision_bits.set(bits)
    try:
        yield
    finally:
        _precision_bits.reset(token)


def _bits_for(ratio: Fraction) -> int:
    """Smallest n >= 0 with 2**n >= ratio."""
    if ratio <= 1:
        return 0
    return (math.ceil(ratio) - 1).bit_length()


# Bisection trails of every generator seen so far. Entry n is the isolating
# interval after n halvings, so cached and fresh results coincide.
_trails: dict["AlgebraicGenerator", list[tuple[Fraction, Fraction]]] = {}
_trails_lock = threading.Lock()


@dataclass(frozen=True)
class AlgebraicGenerator:
    """
    A real algebraic irrational, given by its minimal polynomial (constant term
    first) and a rational interval isolating one of its real roots.
    """

    minpoly: tuple[int, ...]
    interval: tuple[Fraction, Fraction]

    def __post_init__(self) -> None:
        object.__setattr__(self, "minpoly", tuple(self.minpoly))
        object.__setattr__(self, "interval", tuple(Fraction(v) for v in self.interval))
        if not all(isinstance(c, int) and not isinstance(c, bool) for c in self.minpoly):
            raise MalformedSpec(f"Minimal polynomial coefficients must be integers: {self.minpoly!r}.")
        if len(self.minpoly) < 3 or self.minpoly[-1] == 0:
            raise MalformedSpec(
                "Irrational generators need a minimal polynomial of degree at least 2 "
                f"with nonzero leading coefficient, got {list(self.minpoly)}."
            )
        if len(self.interval) != 2:
            raise MalformedSpec(f"Isolating interval needs two endpoints, got {self.interval}.")
        lo, hi = self.interval
        if lo >= hi:
            raise MalformedSpec(f"Isolating interval must satisfy lo < hi, got {self.interval}.")
        if not self.poly.is_irreducible:
            raise MalformedSpec(f"Polynomial {self.poly.as_expr()} is not irreducible over the rationals.")
        lo_sign, hi_sign = self._sign_at(lo), self._sign_at(hi)
        roots = self.poly.count_roots(Rational(lo.numerator, lo.denominator), Rational(hi.numerator, hi.denominator))
        if lo_sign == 0 or hi_sign == 0 or lo_sign == hi_sign or roots != 1:
            raise RootCountError(
                f"Polynomial {self.poly.as_expr()} has {roots} roots in "
                f"[{format_rational(lo)}, {format_rational(hi)}], with endpoint signs "
                f"{lo_sign} and {hi_sign}; exactly one root and a strict sign change are required."
            )

    @cached_property
    def poly(self) -> Poly:
        return Poly(list(reversed(self.minpoly)), X, domain=ZZ)

    @cached_property
    def _lo_sign(self) -> int:
        return self._sign_at(self.interval[0])

    def _sign_at(self, value: Fraction) -> int:
        result = self.poly.eval(Rational(value.numerator, value.denominator))
        if result > 0:
            return 1
        return -1 if result < 0 else 0

    def _halve(self, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
        mid = (lo + hi) / 2
        if self._sign_at(mid) == self._lo_sign:
            return mid, hi
        return lo, mid

    def enclosure(self, bits: int) -> tuple[Fraction, Fraction]:
        """
        Rational interval of width at most 2**-bits containing the root.

        Args:
            bits: Int
                Requested precision in bits.

        Returns:
            Tuple of Fraction
                The interval endpoints (lo, hi).
        """
        lo, hi = self.interval
        steps = _bits_for((hi - lo) * 2**bits)
        with _trails_lock:
            trail = _trails.setdefault(self, [self.interval])
            while len(trail) <= steps:
                trail.append(self._halve(*trail[-1]))
            return trail[steps]

    def __float__(self) -> float:
        lo, hi = self.enclosure(60)
        return float((lo + hi) / 2)

    def to_document(self) -> dict:
        return {
            "minpoly": list(self.minpoly),
            "interval": [format_rational(v) for v in self.interval],
        }


# k(0), k(1), ... computed so far, per rule
_denominators: dict["MultiplierRule", list[int]] = {}
_denominators_lock = threading.Lock()


def _level_denominator(rule: "MultiplierRule", level: int) -> int:
    if level < 0:
        raise InvalidArgument(f"Levels start at 0, got {level}.")
    with _denominators_lock:
        products = _denominators.setdefault(rule, [1])
        for n in range(len(products), level + 1):
            products.append(products[-1] * rule.multiplier(n))
        return products[level]


@dataclass(frozen=True)
class MultiplierRule:
    """The multipliers k₁, k₂, ... whose partial products give k(n)."""

    type: RuleType
    m: int | None = None
    multipliers: tuple[int, ...] = ()
    repeat_last: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "multipliers", tuple(self.multipliers))
        if self.type is RuleType.CONSTANT:
            if not isinstance(self.m, int) or self.m < 2:
                raise MalformedSpec(f"Constant rule needs an integer m >= 2, got {self.m!r}.")
        elif self.type is RuleType.LIST:
            if not self.multipliers or any(
                not isinstance(v, int) or v < 2 for v in self.multipliers
            ):
                raise MalformedSpec(
                    f"List rule needs integer multipliers >= 2, got {list(self.multipliers)}."
                )
            if not self.repeat_last:
                raise DensityError(
                    "A finite list of multipliers only describes (1/k)Z for a fixed k, "
                    "which is not dense. Set repeat_last to extend the list forever."
                )

    def multiplier(self, n: int) -> int:
        """The multiplier k_n applied when going from level n-1 to level n."""
        if self.type is RuleType.CONSTANT:
            return self.m
        if self.type is RuleType.FACTORIAL:
            return n + 1
        return self.multipliers[min(n, len(self.multipliers)) - 1]

    def to_document(self) -> dict:
        if self.type is RuleType.CONSTANT:
            return {"type": str(self.type), "m": self.m}
        if self.type is RuleType.FACTORIAL:
            return {"type": str(self.type)}
        return {
            "type": str(self.type),
            "multipliers": list(self.multipliers),
            "repeat_last": self.repeat_last,
        }


@dataclass(frozen=True)
class GammaSpec:
    """A dense subgroup of the reals containing 1."""

    kind: SpecKind
    k: int = 1
    irrationals: tuple[AlgebraicGenerator, ...] = ()
    rule: MultiplierRule | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "irrationals", tuple(self.irrationals))
        if self.kind is SpecKind.FINITELY_GENERATED:
            if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 1:
                raise MalformedSpec(f"Rational denominator k must be a positive integer, got {self.k!r}.")
            if not self.irrationals:
                raise DensityError(
                    f"(1/{self.k})Z is not dense: at least one irrational generator is required."
                )
        elif self.rule is None:
            raise MalformedSpec("A rational group needs a multiplier rule.")

    @property
    def d(self) -> int:
        """Number of irrational generators."""
        return len(self.irrationals)

    @property
    def is_rational(self) -> bool:
        return self.kind is SpecKind.RATIONAL_RULE

    def denominator(self, level: int) -> int:
        """k(level) for rational groups, k otherwise."""
        if not self.is_rational:
            return self.k
        return _level_denominator(self.rule, level)

    def element(self, coeffs: Sequence[int]) -> "GammaElement":
        """Element of a finitely generated group from its coefficient vector."""
        return GammaElement(self, tuple(coeffs))

    def at_level(self, level: int, num: int) -> "GammaElement":
        """The element num/k(level) of a rational group, normalized."""
        if level < 0:
            raise NotInGamma(f"Levels are non-negative, got {level}.")
        while level > 0 and num % self.rule.multiplier(level) == 0:
            num //= self.rule.multiplier(level)
            level -= 1
        if num == 0:
            level = 0
        return GammaElement(self, (level, num))

    def rational(self, value: Fraction | int) -> "GammaElement":
        """
        The element equal to a given rational.

        Args:
            value: Fraction or Int
                The rational value.

        Returns:
            GammaElement
                The element, raising NotInGamma if the value is not in Γ.
        """
        value = Fraction(value)
        if not self.is_rational:
            scaled = value * self.k
            if scaled.denominator != 1:
                raise NotInGamma(f"{value} is not in (1/{self.k})Z.")
            return self.element((scaled.numerator,) + (0,) * self.d)
        for level in range(LEVEL_SEARCH_LIMIT + 1):
            scaled = value * self.denominator(level)
            if scaled.denominator == 1:
                return self.at_level(level, scaled.numerator)
        raise NotInGamma(f"{value} is not reached within {LEVEL_SEARCH_LIMIT} levels.")

    def generator(self, i: int) -> "GammaElement":
        """The irrational generator λᵢ (1-based)."""
        if not 1 <= i <= self.d:
            raise IndexOutOfRange(f"Generator index {i} out of range 1..{self.d}.")
        coeffs = [0] * (self.d + 1)
        coeffs[i] = 1
        return self.element(coeffs)

    @property
    def zero(self) -> "GammaElement":
        return self.rational(0)

    @property
    def one(self) -> "GammaElement":
        return self.rational(1)

    def to_document(self) -> dict:
        if self.is_rational:
            return {"kind": str(self.kind.value), "rule": self.rule.to_document()}
        return {
            "kind": str(self.kind.value),
            "k": self.k,
            "irrationals": [g.to_document() for g in self.irrationals],
        }

    def __str__(self) -> str:
        if self.is_rational:
            return f"rational group with {self.rule.type.value} rule"
        terms = [f"(1/{self.k})Z" if self.k > 1 else "Z"]
        terms += [f"λ{i}Z" for i in range(1, self.d + 1)]
        return " + ".join(terms)


@dataclass(frozen=True, eq=False)
class GammaElement:
    """An exact element of Γ."""

    spec: GammaSpec
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        expected = 2 if self.spec.is_rational else self.spec.d + 1
        if len(self.coeffs) != expected:
            raise MalformedSpec(
                f"Expected {expected} coefficients, got {len(self.coeffs)}."
            )

    @property
    def level(self) -> int:
        return self.coeffs[0] if self.spec.is_rational else 0

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs[1:]) if self.spec.is_rational else not any(self.coeffs)

    @property
    def is_rational(self) -> bool:
        return self.spec.is_rational or not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        """Exact value of an element without irrational part."""
        if self.spec.is_rational:
            level, num = self.coeffs
            return Fraction(num, self.spec.denominator(level))
        if not self.is_rational:
            raise NotInGamma(f"{self} is irrational.")
        return Fraction(self.coeffs[0], self.spec.k)

    # Group structure

    def _lift(self, other) -> "GammaElement":
        if isinstance(other, GammaElement):
            if other.spec is not self.spec and other.spec != self.spec:
                raise SpecMismatch()
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.spec.rational(other)
        return NotImplemented

    def _combine(self, other: "GammaElement", sign: int) -> "GammaElement":
        if self.spec.is_rational:
            level = max(self.level, other.level)
            a = self.coeffs[1] * (self.spec.denominator(level) // self.spec.denominator(self.level))
            b = other.coeffs[1] * (self.spec.denominator(level) // self.spec.denominator(other.level))
            return self.spec.at_level(level, a + sign * b)
        return GammaElement(
            self.spec, tuple(a + sign * b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __add__(self, other) -> "GammaElement":
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other) -> "GammaElement":
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self._combine(other, -1)

    def __rsub__(self, other) -> "GammaElement":
        return (-self) + other

    def __neg__(self) -> "GammaElement":
        return self * -1

    def __mul__(self, m) -> "GammaElement":
        if isinstance(m, bool) or not isinstance(m, int):
            return NotImplemented
        if self.spec.is_rational:
            return self.spec.at_level(self.level, self.coeffs[1] * m)
        return GammaElement(self.spec, tuple(m * a for a in self.coeffs))

    __rmul__ = __mul__

    # Exact equality and order

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            try:
                other = self.spec.rational(other)
            except NotInGamma:
                return False
        if not isinstance(other, GammaElement):
            return NotImplemented
        return self.coeffs == other.coeffs and (
            other.spec is self.spec or other.spec == self.spec
        )

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __lt__(self, other) -> bool:
        return sign_of(self - other) is Sign.NEGATIVE

    def __le__(self, other) -> bool:
        return sign_of(self - other) is not Sign.POSITIVE

    def __gt__(self, other) -> bool:
        return sign_of(self - other) is Sign.POSITIVE

    def __ge__(self, other) -> bool:
        return sign_of(self - other) is not Sign.NEGATIVE

    # Approximation

    def enclosure(self, bits: int) -> tuple[Fraction, Fraction]:
        """Interval containing the value, each generator refined to 2**-bits."""
        if self.is_rational:
            value = self.rational_value()
            return value, value
        lo = hi = Fraction(self.coeffs[0], self.spec.k)
        for a, generator in zip(self.coeffs[1:], self.spec.irrationals):
            if a == 0:
                continue
            g_lo, g_hi = generator.enclosure(bits)
            if a > 0:
                lo, hi = lo + a * g_lo, hi + a * g_hi
            else:
                lo, hi = lo + a * g_hi, hi + a * g_lo
        return lo, hi

    def value_enclosure(self, width: Fraction) -> tuple[Fraction, Fraction]:
        """
        Interval of width at most `width` containing the value.

        Args:
            width: Fraction
                Positive upper bound for the interval width.

        Returns:
            Tuple of Fraction
                The interval endpoints (lo, hi).
        """
        width = Fraction(width)
        if width <= 0:
            raise InvalidArgument(f"The enclosure width must be positive, got {width}.")
        if self.is_rational:
            return self.enclosure(0)
        total = sum(abs(a) for a in self.coeffs[1:])
        return self.enclosure(_bits_for(total / width))

    def __float__(self) -> float:
        lo, hi = self.value_enclosure(Fraction(1, 2**60))
        return float((lo + hi) / 2)

    def to_document(self) -> dict:
        if self.spec.is_rational:
            return {"level": self.coeffs[0], "num": self.coeffs[1]}
        return {"coeffs": list(self.coeffs)}

    def __repr__(self) -> str:
        return f"GammaElement({self})"

    def __str__(self) -> str:
        if self.spec.is_rational:
            return format_rational(self.rational_value())
        parts = []
        constant = Fraction(self.coeffs[0], self.spec.k)
        if constant or self.is_zero:
            parts.append(format_rational(constant))
        for i, a in enumerate(self.coeffs[1:], start=1):
            if a == 0:
                continue
            term = f"{'' if abs(a) == 1 else abs(a)}λ{i}"
            if not parts:
                parts.append(term if a > 0 else f"-{term}")
            else:
                parts.append(f"{'+' if a > 0 else '-'} {term}")
        return " ".join(parts)


def sign_of(x: GammaElement, precision_cap: int | None = None) -> Sign:
    """
    Exact sign of an element.

    Zero is decided on the coefficients. Otherwise every generator enclosure is
    refined (32, 64, 128, ... bits) until the interval sum excludes zero.

    Args:
        x: GammaElement
            The element.
        precision_cap: Int
            Bit budget per generator. Defaults to the current `precision` value.

    Returns:
        Sign
            The sign of x.
    """
    if precision_cap is None:
        cap = _precision_bits.get()
    elif precision_cap <= 0:
        raise InvalidArgument(f"The bit budget must be positive, got {precision_cap}.")
    else:
        cap = precision_cap
    if x.is_rational:
        value = x.rational_value()
        if value == 0:
            return Sign.ZERO
        return Sign.POSITIVE if value > 0 else Sign.NEGATIVE
    bits = min(INITIAL_BITS, cap)
    while True:
        lo, hi = x.enclosure(bits)
        if lo > 0:
            return Sign.POSITIVE
        if hi < 0:
            return Sign.NEGATIVE
        if bits >= cap:
            logger.warning(f"Sign of {x} still unresolved at {cap} bits.")
            raise PrecisionExhausted(
                f"Enclosure of {x} still contains 0 at {cap} bits. "
                "The declared generators are probably linearly dependent over the rationals."
            )
        logger.debug(f"Refining sign of {x} beyond {bits} bits.")
        bits = min(2 * bits, cap)


def cmp(a: GammaElement, b: GammaElement) -> Sign:
    """Sign of a - b."""
    return sign_of(a - b)


def floor_of(x: GammaElement) -> int:
    """
    The integer m with m <= x < m + 1.

    Args:
        x: GammaElement
            The element.

    Returns:
        Int
            The floor of x.
    """
    if x.is_rational:
        return math.floor(x.rational_value())
    lo, _ = x.value_enclosure(Fraction(1, 4))
    m = math.floor(lo)
    # lo <= x, so only the upper boundary needs resolving
    while sign_of(x - (m + 1)) is not Sign.NEGATIVE:
        m += 1
    return m


def frac_of(x: GammaElement) -> GammaElement:
    """x - floor(x), an element of [0, 1)."""
    return x - floor_of(x)


def _shared_spec(elements: Sequence[GammaElement]) -> GammaSpec:
    spec = elements[0].spec
    if any(e.spec is not spec and e.spec != spec for e in elements[1:]):
        raise SpecMismatch()
    return spec


def lattice_vectors(elements: Sequence[GammaElement]) -> list[tuple[int, ...]]:
    """
    Integer coordinate vectors of elements in a common coordinate system.

    Finitely generated groups use the coefficient vectors. Rational groups are
    brought to the largest level among the elements, giving 1-vectors.

    Args:
        elements: Sequence of GammaElement
            Non-empty list of elements of one group.

    Returns:
        List of tuples of Int
            One vector per element, in the same order.
    """
    spec = _shared_spec(elements)
    if not spec.is_rational:
        return [e.coeffs for e in elements]
    level = max(e.level for e in elements)
    top = spec.denominator(level)
    return [(e.coeffs[1] * (top // spec.denominator(e.level)),) for e in elements]


def hnf_basis(vectors: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """
    Hermite normal form basis of the lattice spanned by integer vectors.

    Args:
        vectors: Sequence of Sequence of Int
            Spanning vectors, all of one length.

    Returns:
        Tuple of tuples of Int
            The basis vectors (columns of the Hermite normal form).
    """
    nonzero = [tuple(v) for v in vectors if any(v)]
    if not nonzero:
        return ()
    dim = len(nonzero[0])
    matrix = DomainMatrix(
        [[ZZ(v[row]) for v in nonzero] for row in range(dim)],
        (dim, len(nonzero)),
        ZZ,
    )
    rows = hermite_normal_form(matrix).to_list()
    columns = len(rows[0]) if rows else 0
    return tuple(tuple(int(rows[r][c]) for r in range(dim)) for c in range(columns))


def lattice_membership(x: GammaElement, target: Sequence[GammaElement]) -> bool:
    """
    Whether x lies in the subgroup generated by `target`.

    Args:
        x: GammaElement
            The candidate element.
        target: Sequence of GammaElement
            Generators of the subgroup, over the same group as x.

    Returns:
        Bool
            True if x is an integer combination of the target elements.
    """
    _shared_spec([x, *target])
    if not target:
        return x.is_zero
    vectors = lattice_vectors([x, *target])
    return hnf_basis(vectors) == hnf_basis(vectors[1:])


def span_basis(elements: Sequence[GammaElement]) -> list[GammaElement]:
    """Elements forming the Hermite normal form basis of the span of `elements`."""
    spec = _shared_spec(elements)
    basis = hnf_basis(lattice_vectors(elements))
    if not spec.is_rational:
        return [spec.element(v) for v in basis]
    level = max(e.level for e in elements)
    return [spec.at_level(level, v[0]) for v in basis]


def make_generator(document: Mapping) -> AlgebraicGenerator:
    """Parse an irrational generator document."""
    minpoly = require_key(document, "minpoly", "irrational generator")
    interval = require_key(document, "interval", "irrational generator")
    if not isinstance(minpoly, list) or not isinstance(interval, list) or len(interval) != 2:
        raise MalformedSpec(
            "An irrational generator needs a 'minpoly' list and a two-entry 'interval'. "
            "Only algebraic generators are supported."
        )
    lo, hi = (parse_rational(v) for v in interval)
    if max(lo.denominator, hi.denominator) > MAX_INTERVAL_DENOMINATOR:
        raise MalformedSpec(
            f"Isolating interval denominators must not exceed {MAX_INTERVAL_DENOMINATOR}."
        )
    return AlgebraicGenerator(tuple(minpoly), (lo, hi))


def make_rule(document: Mapping) -> MultiplierRule:
    """Parse a multiplier rule document."""
    rule_type = require_key(document, "type", "multiplier rule")
    try:
        rule_type = RuleType(rule_type)
    except ValueError:
        raise MalformedSpec(f"Unknown multiplier rule {rule_type!r}.")
    if rule_type is RuleType.CONSTANT:
        return MultiplierRule(rule_type, m=require_key(document, "m", "constant rule"))
    if rule_type is RuleType.FACTORIAL:
        return MultiplierRule(rule_type)
    multipliers = require_key(document, "multipliers", "list rule")
    if not isinstance(multipliers, list):
        raise MalformedSpec("List rule multipliers must be a list.")
    return MultiplierRule(
        rule_type,
        multipliers=tuple(multipliers),
        repeat_last=bool(document.get("repeat_last", False)),
    )


def make_spec(description: Mapping) -> GammaSpec:
    """
    Validate a group description document and build the spec.

    Args:
        description: Mapping
            The spec document.

    Returns:
        GammaSpec
            The validated, immutable spec.
    """
    kind = require_key(description, "kind", "group description")
    try:
        kind = SpecKind(kind)
    except ValueError:
        raise MalformedSpec(f"Unknown group kind {kind!r}.")
    if kind is SpecKind.RATIONAL_RULE:
        return GammaSpec(kind, rule=make_rule(require_key(description, "rule", "rational group")))
    irrationals = description.get("irrationals", [])
    if not isinstance(irrationals, list):
        raise MalformedSpec("'irrationals' must be a list.")
    return GammaSpec(
        kind,
        k=description.get("k", 1),
        irrationals=tuple(make_generator(g) for g in irrationals),
    )


def make_element(spec: GammaSpec, document: Mapping) -> GammaElement:
    """Parse an element document over a given spec."""
    if spec.is_rational:
        level = require_key(document, "level", "element")
        num = require_key(document, "num", "element")
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in (level, num)):
            raise MalformedSpec("Element level and numerator must be integers.")
        return spec.at_level(level, num)
    coeffs = require_key(document, "coeffs", "element")
    if not isinstance(coeffs, list) or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in coeffs
    ):
        raise MalformedSpec("Element coefficients must be a list of integers.")
    return spec.element(coeffs)


def random_point(spec: GammaSpec, rng: random.Random, bound: int = 4) -> GammaElement:
    """
    A random element of Γ ∩ [0, 1).

    Args:
        spec: GammaSpec
            The group.
        rng: random.Random
            Source of randomness.
        bound: Int
            Bound on the irrational coefficients (finitely generated groups)
            or on the level (rational groups).

    Returns:
        GammaElement
            An element in [0, 1).
    """
    if spec.is_rational:
        level = rng.randint(0, bound)
        return spec.at_level(level, rng.randrange(spec.denominator(level)))
    coeffs = [rng.randrange(spec.k)] + [rng.randint(-bound, bound) for _ in range(spec.d)]
    return frac_of(spec.element(coeffs))
