"""
Closed-form invariants of IE(Γ) and of the groupoid it comes from: groupoid
homology, K-groups, abelianizations, rational homology, supernatural numbers
and the equality test that classifies the groups.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

from sympy import factorint
from termcolor import colored

from iexg.config import RuleType
from iexg.gamma import AlgebraicGenerator, GammaElement, GammaSpec, lattice_membership
from iexg.logging import get_custom_logger
from iexg.utils import IexgError

logger = get_custom_logger(__name__)

GAMMA_SYMBOL = "Γ"
K1_TENSION_NOTE = (
    "For d = 1 the groupoid algebra is a rotation algebra, whose K1 has rank 2, "
    "while the homology assembly gives K1 = Z. The homology formulas are reported as is."
)
RING_ABELIANIZATION_SYMBOL = "(Z[λ,λ^-1] ⊗ Z_2) ⊕ H_2(Z[λ,λ^-1])"


class UnsupportedSpec(IexgError):
    def __init__(
        self,
        message: str = "No closed form is known for this group.",
    ) -> None:
        super().__init__(message)


class NoCommonAmbient(IexgError):
    def __init__(
        self,
        message: str = "The groups are not described over a common ambient group.",
    ) -> None:
        super().__init__(message)


@dataclass(frozen=True)
class AbelianGroupDescriptor:
    """
    Z^free_rank ⊕ torsion, or Γ itself when free_rank is the symbol Γ.

    `exact` is False when only partial data is known; `symbol` overrides the
    rendering of the free part.
    """

    free_rank: int | str = 0
    torsion: tuple[int, ...] = ()
    exact: bool = True
    symbol: str = ""
    note: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "torsion", tuple(sorted(self.torsion)))

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion and not self.symbol

    def __str__(self) -> str:
        parts = []
        if self.symbol:
            parts.append(self.symbol)
        elif self.free_rank == GAMMA_SYMBOL:
            parts.append(GAMMA_SYMBOL)
        elif self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank:
            parts.append(f"Z^{self.free_rank}")
        for order in sorted(set(self.torsion)):
            count = self.torsion.count(order)
            parts.append(f"Z_{order}" + (f"^{count}" if count > 1 else ""))
        text = " ⊕ ".join(parts) or "0"
        return text if self.exact else f"{text} (partial)"

    def to_document(self) -> dict:
        document = {
            "free_rank": self.free_rank,
            "torsion": list(self.torsion),
            "exact": self.exact,
            "text": str(self),
        }
        if self.note:
            document["note"] = self.note
        return document


@dataclass(frozen=True)
class SupernaturalNumber:
    """Prime exponents of the product of the multipliers, math.inf for infinite."""

    exponents: dict[int, int | float] = field(default_factory=dict)
    universal: bool = False

    def __str__(self) -> str:
        if self.universal:
            return "∏ p^∞ (every prime)"
        return " · ".join(
            f"{p}^{'∞' if e == math.inf else e}" for p, e in sorted(self.exponents.items())
        )

    def to_document(self) -> dict:
        if self.universal:
            return {"universal": True, "exponents": {}}
        return {
            "universal": False,
            "exponents": {
                str(p): "inf" if e == math.inf else e for p, e in sorted(self.exponents.items())
            },
        }


def gamma_descriptor(spec: GammaSpec) -> AbelianGroupDescriptor:
    """Γ as an abelian group: Z^(d+1), or the symbol Γ for rational groups."""
    if not spec.is_rational:
        return AbelianGroupDescriptor(spec.d + 1)
    rule = spec.rule
    if rule.type is RuleType.CONSTANT:
        symbol = f"Z[1/{rule.m}]"
    elif rule.type is RuleType.FACTORIAL:
        symbol = "Q"
    else:
        symbol = GAMMA_SYMBOL
    return AbelianGroupDescriptor(GAMMA_SYMBOL, symbol=symbol)


def groupoid_homology(spec: GammaSpec, n: int) -> AbelianGroupDescriptor:
    """
    The n-th homology of the transformation groupoid, equal to H_{n+1}(Γ).

    Args:
        spec: GammaSpec
            The group Γ.
        n: Int
            The degree.

    Returns:
        AbelianGroupDescriptor
            Γ in degree 0 and 0 above for rational groups; Z^C(d+1, n+1) when
            Γ = Z^(d+1).
    """
    if n < 0:
        raise UnsupportedSpec(f"Homology degrees are non-negative, got {n}.")
    if spec.is_rational:
        return gamma_descriptor(spec) if n == 0 else AbelianGroupDescriptor()
    return AbelianGroupDescriptor(math.comb(spec.d + 1, n + 1))


def _top_degree(spec: GammaSpec) -> int:
    return 0 if spec.is_rational else spec.d


def k_groups(spec: GammaSpec) -> tuple[AbelianGroupDescriptor, AbelianGroupDescriptor]:
    """
    K₀ and K₁ assembled from the even and odd groupoid homology.

    Args:
        spec: GammaSpec
            The group Γ.

    Returns:
        Tuple of AbelianGroupDescriptor
            (K₀, K₁).
    """
    if spec.is_rational:
        return gamma_descriptor(spec), AbelianGroupDescriptor()
    ranks = [groupoid_homology(spec, n).free_rank for n in range(_top_degree(spec) + 1)]
    return (
        AbelianGroupDescriptor(sum(ranks[0::2])),
        AbelianGroupDescriptor(sum(ranks[1::2])),
    )


def abelianization(spec: GammaSpec) -> AbelianGroupDescriptor:
    """
    IE(Γ)_ab.

    Z_2 for rational groups, Z ⊕ Z_2^2 for d = 1 and Z ⊕ Z_2^3 for d = 2. For
    d >= 3 only the ingredients of the long exact sequence are known: the
    quotient of rank C(d+1, 3) and the Z_2^(d+1) term.
    """
    if spec.is_rational:
        return AbelianGroupDescriptor(0, (2,))
    d = spec.d
    if d in (1, 2):
        return AbelianGroupDescriptor(1, (2,) * (d + 1))
    logger.warning(f"Abelianization for d = {d} is only known up to an exact sequence.")
    return AbelianGroupDescriptor(
        math.comb(d + 1, 3),
        (2,) * (d + 1),
        exact=False,
        note=(
            f"Free rank is the rank C({d + 1}, 3) of the quotient of H_3(Γ); "
            f"torsion is the Z_2^{d + 1} input of the long exact sequence."
        ),
    )


def _poincare_series(
    exterior: Sequence[tuple[int, int]], symmetric: Sequence[tuple[int, int]], top: int
) -> list[int]:
    """Graded dimensions up to `top` of Ext(V) ⊗ Sym(W), given (degree, dimension) generators."""
    series = [1] + [0] * top
    for degree, dimension in exterior:
        for _ in range(dimension):
            series = [
                series[n] + (series[n - degree] if n >= degree else 0) for n in range(top + 1)
            ]
    for degree, dimension in symmetric:
        for _ in range(dimension):
            # dividing by 1 - x^degree
            for n in range(degree, top + 1):
                series[n] += series[n - degree]
    return series


def rational_homology(
    spec: GammaSpec, up_to_degree: int, derived: bool = False
) -> dict[int, int]:
    """
    Dimensions of H_n(IE(Γ), Q) for n up to `up_to_degree`.

    H_m(Γ, Q), of dimension C(d+1, m), contributes generators in degree m − 1
    for m >= 2: exterior ones for even m and symmetric ones for odd m. The
    derived subgroup drops the m = 2 generators. Rational groups are
    rationally acyclic.

    Args:
        spec: GammaSpec
            The group Γ.
        up_to_degree: Int
            Largest degree returned.
        derived: Bool
            Compute for the derived subgroup D(IE(Γ)).

    Returns:
        Dict
            Degree to dimension.
    """
    if up_to_degree < 0:
        raise UnsupportedSpec(f"Homology degrees are non-negative, got {up_to_degree}.")
    if spec.is_rational:
        return {n: int(n == 0) for n in range(up_to_degree + 1)}
    start = 3 if derived else 2
    exterior, symmetric = [], []
    for m in range(start, spec.d + 2):
        generator = (m - 1, math.comb(spec.d + 1, m))
        (exterior if m % 2 == 0 else symmetric).append(generator)
    series = _poincare_series(exterior, symmetric, up_to_degree)
    return dict(enumerate(series))


def supernatural(spec: GammaSpec) -> SupernaturalNumber:
    """
    The supernatural number ∏ kᵢ of a rational group.

    Args:
        spec: GammaSpec
            A rational group.

    Returns:
        SupernaturalNumber
            Primes of the repeated multiplier are infinite, primes that only
            occur in the finite prefix keep their finite exponents.
    """
    if not spec.is_rational:
        raise UnsupportedSpec("Supernatural numbers are defined for rational groups only.")
    rule = spec.rule
    if rule.type is RuleType.FACTORIAL:
        return SupernaturalNumber(universal=True)
    if rule.type is RuleType.CONSTANT:
        return SupernaturalNumber({p: math.inf for p in factorint(rule.m)})
    exponents: dict[int, int | float] = {}
    for multiplier in rule.multipliers[:-1]:
        for p, e in factorint(multiplier).items():
            exponents[p] = exponents.get(p, 0) + e
    for p in factorint(rule.multipliers[-1]):
        exponents[p] = math.inf
    return SupernaturalNumber(exponents)


def group_equal(
    first: GammaSpec | Sequence[GammaElement],
    second: GammaSpec | Sequence[GammaElement],
) -> bool:
    """
    Whether two subgroups of the reals are equal, which decides IE(Γ) ≅ IE(Γ').

    Args:
        first: GammaSpec or Sequence of GammaElement
            A rational group, or generators inside a common ambient group.
        second: GammaSpec or Sequence of GammaElement
            Of the same kind as `first`.

    Returns:
        Bool
            Element lists are compared by mutual lattice membership; rational
            groups by their supernatural numbers.
    """
    if isinstance(first, GammaSpec) and isinstance(second, GammaSpec):
        if first == second:
            return True
        if first.is_rational and second.is_rational:
            return supernatural(first) == supernatural(second)
        raise NoCommonAmbient("Finitely generated groups must be compared as element lists.")
    if isinstance(first, GammaSpec) or isinstance(second, GammaSpec):
        raise NoCommonAmbient("Cannot compare a group description with an element list.")
    first, second = list(first), list(second)
    specs = {id(e.spec): e.spec for e in first + second}
    if specs and any(s != next(iter(specs.values())) for s in specs.values()):
        raise NoCommonAmbient("The element lists live in different ambient groups.")
    return all(lattice_membership(x, first) for x in second) and all(
        lattice_membership(x, second) for x in first
    )


def ring_abelianization(generator: AlgebraicGenerator) -> AbelianGroupDescriptor:
    """Symbolic IE(Z[λ, λ⁻¹])_ab for a quadratic λ."""
    degree = len(generator.minpoly) - 1
    if degree != 2:
        raise UnsupportedSpec(
            f"The ring case is only described for quadratic λ, got degree {degree}."
        )
    return AbelianGroupDescriptor(
        GAMMA_SYMBOL,
        symbol=RING_ABELIANIZATION_SYMBOL,
        note=f"λ is the root of {generator.poly.as_expr()} in "
        f"[{generator.interval[0]}, {generator.interval[1]}].",
    )


@dataclass(frozen=True)
class InvariantReport:
    """Every invariant of one group."""

    spec: GammaSpec
    homology: dict[int, AbelianGroupDescriptor]
    k0: AbelianGroupDescriptor
    k1: AbelianGroupDescriptor
    abelianization: AbelianGroupDescriptor
    rational_homology: dict[int, int]
    derived_rational_homology: dict[int, int]
    supernatural: SupernaturalNumber | None = None
    notes: tuple[str, ...] = ()

    def to_document(self) -> dict:
        document = {
            "spec": self.spec.to_document(),
            "homology": {str(n): h.to_document() for n, h in self.homology.items()},
            "k0": self.k0.to_document(),
            "k1": self.k1.to_document(),
            "abelianization": self.abelianization.to_document(),
            "rational_homology": {str(n): v for n, v in self.rational_homology.items()},
            "derived_rational_homology": {
                str(n): v for n, v in self.derived_rational_homology.items()
            },
        }
        if self.supernatural is not None:
            document["supernatural"] = self.supernatural.to_document()
        document["notes"] = list(self.notes)
        return document

    def render_table(self) -> str:
        """Plain text table, with a colored title."""
        lines = [colored(f"Invariants of {self.spec}", attrs=["bold"])]
        lines += [f"  H{n} = {h}" for n, h in self.homology.items()]
        lines += [f"  K0 = {self.k0}", f"  K1 = {self.k1}", f"  IE_ab = {self.abelianization}"]
        dims = ", ".join(str(v) for v in self.rational_homology.values())
        derived = ", ".join(str(v) for v in self.derived_rational_homology.values())
        lines += [f"  dim H_n(IE, Q) = {dims}", f"  dim H_n(D(IE), Q) = {derived}"]
        if self.supernatural is not None:
            lines.append(f"  supernatural = {self.supernatural}")
        lines += [f"  note: {note}" for note in self.notes]
        return "\n".join(lines)


def invariant_report(spec: GammaSpec) -> InvariantReport:
    """
    Assemble every invariant of a group.

    Args:
        spec: GammaSpec
            The group Γ.

    Returns:
        InvariantReport
            Homology up to the top nonzero degree and rational homology up to
            degree d + 2.
    """
    top = _top_degree(spec)
    k0, k1 = k_groups(spec)
    notes = [K1_TENSION_NOTE] if not spec.is_rational and spec.d == 1 else []
    abelian = abelianization(spec)
    if abelian.note:
        notes.append(abelian.note)
    rational_top = top + 2
    return InvariantReport(
        spec=spec,
        homology={n: groupoid_homology(spec, n) for n in range(top + 1)},
        k0=k0,
        k1=k1,
        abelianization=abelian,
        rational_homology=rational_homology(spec, rational_top),
        derived_rational_homology=rational_homology(spec, rational_top, derived=True),
        supernatural=supernatural(spec) if spec.is_rational else None,
        notes=tuple(notes),
    )
