"""
The Γ/ℤ-subshift of rotation codings.

For t in [0, 1) the configuration x_t labels each b in Γ/ℤ with 1 if t + b
lands in [0, λ) mod 1 and 0 otherwise. The limit configurations x̂_t (t in
(0, 1] ∩ Γ) use the closed-on-the-right convention instead. Cylinder sets
of finite patches are computed as exact unions of circle arcs with endpoints in
Γ, and well-defined patches are realized as interval exchange elements.
"""

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from itertools import combinations, product

from iexg.config import DEFAULT_PATCH_DOMAIN_CAP
from iexg.gamma import GammaElement, GammaSpec, floor_of, frac_of, make_element
from iexg.iet import CircleSet, Iet, WrongSpecKind, from_moves
from iexg.logging import get_custom_logger
from iexg.utils import IexgError, MalformedDocument, require_key

logger = get_custom_logger(__name__)


class NotWellDefined(IexgError):
    def __init__(
        self,
        message: str = "The translates of the cylinder set are not pairwise disjoint.",
    ) -> None:
        super().__init__(message)


class DomainTooLarge(IexgError):
    def __init__(
        self,
        message: str = "The patch domain has too many keys to enumerate.",
    ) -> None:
        super().__init__(message)


class InvalidPatch(IexgError):
    def __init__(
        self,
        message: str = "Patches need distinct keys mod 1 and values in {0, 1}.",
    ) -> None:
        super().__init__(message)


class InvalidConfiguration(IexgError):
    def __init__(
        self,
        message: str = "Configurations x_t need t in [0, 1), limit configurations t in (0, 1].",
    ) -> None:
        super().__init__(message)


class CylinderSet(CircleSet):
    """The set of t in [0, 1) whose configuration x_t matches a patch."""


def frac_closed(x: GammaElement) -> GammaElement:
    """x reduced into (0, 1], integers going to 1."""
    return x - (floor_of(x) - 1 if frac_of(x).is_zero else floor_of(x))


@dataclass(frozen=True)
class SubshiftContext:
    """The subshift of a group Γ coded by the arc [0, λ)."""

    spec: GammaSpec
    lam: GammaElement

    def __post_init__(self) -> None:
        if self.lam.spec != self.spec:
            raise InvalidConfiguration("λ must be an element of the context group.")
        if not (self.lam > 0 and self.lam < 1):
            raise InvalidConfiguration(f"λ must lie in (0, 1), got {self.lam}.")

    @classmethod
    def for_spec(cls, spec: GammaSpec, lam: GammaElement | None = None) -> "SubshiftContext":
        """Context with λ defaulting to the first irrational generator."""
        if lam is None:
            if spec.is_rational:
                raise WrongSpecKind("Rational groups need an explicit λ.")
            lam = spec.generator(1)
        return cls(spec, lam)


@dataclass(frozen=True)
class Configuration:
    """The configuration x_t, or the limit configuration x̂_t when `hat` is set."""

    t: GammaElement
    hat: bool = False

    def __post_init__(self) -> None:
        if self.hat:
            if not (self.t > 0 and self.t <= 1):
                raise InvalidConfiguration(f"x̂_t needs t in (0, 1], got {self.t}.")
        elif not (self.t >= 0 and self.t < 1):
            raise InvalidConfiguration(f"x_t needs t in [0, 1), got {self.t}.")

    def to_document(self) -> dict:
        return {"t": self.t.to_document(), "hat": self.hat}

    def __str__(self) -> str:
        return f"{'x̂' if self.hat else 'x'}_{{{self.t}}}"


@dataclass(frozen=True)
class Patch:
    """
    A finite map from Γ/ℤ to {0, 1}. Keys are reduced to [0, 1) and kept in
    the order they were given.
    """

    entries: tuple[tuple[GammaElement, int], ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise InvalidPatch("A patch needs at least one key.")
        reduced = tuple((frac_of(key), value) for key, value in self.entries)
        keys = [key for key, _ in reduced]
        if len(set(keys)) != len(keys):
            raise InvalidPatch(f"Patch keys must be distinct mod 1: {[str(k) for k in keys]}.")
        if any(value not in (0, 1) or isinstance(value, bool) for _, value in reduced):
            raise InvalidPatch(f"Patch values must be 0 or 1, got {[v for _, v in reduced]}.")
        object.__setattr__(self, "entries", reduced)

    @classmethod
    def from_values(cls, keys: Sequence[GammaElement], values: Sequence[int]) -> "Patch":
        if len(keys) != len(values):
            raise InvalidPatch(f"Got {len(keys)} keys and {len(values)} values.")
        return cls(tuple(zip(keys, values)))

    @property
    def keys(self) -> list[GammaElement]:
        return [key for key, _ in self.entries]

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(value for _, value in self.entries)

    @property
    def spec(self) -> GammaSpec:
        return self.entries[0][0].spec

    def to_document(self) -> dict:
        return {
            "entries": [{"key": key.to_document(), "value": value} for key, value in self.entries]
        }

    def __str__(self) -> str:
        return "{" + ", ".join(f"{key}: {value}" for key, value in self.entries) + "}"


def config_value(ctx: SubshiftContext, c: Configuration, b: GammaElement) -> int:
    """
    The label of key b in configuration c.

    Args:
        ctx: SubshiftContext
            The subshift.
        c: Configuration
            x_t or x̂_t.
        b: GammaElement
            The key, taken mod 1.

    Returns:
        Int
            1 if t + b lies in [0, λ) mod 1 (in (0, λ] for x̂_t), else 0.
    """
    if c.hat:
        return int(frac_closed(c.t + b) <= ctx.lam)
    return int(frac_of(c.t + b) < ctx.lam)


def shift_config(ctx: SubshiftContext, c: Configuration, g: GammaElement) -> Configuration:
    """The shift by g: x_t to x_{t+g}, x̂_t to x̂_{t+g}."""
    if c.hat:
        return Configuration(frac_closed(c.t + g), hat=True)
    return Configuration(frac_of(c.t + g))


def _key_arc(ctx: SubshiftContext, key: GammaElement, value: int) -> CylinderSet:
    if value == 1:
        return CylinderSet.arc(ctx.spec, -key, ctx.lam)
    return CylinderSet.arc(ctx.spec, ctx.lam - key, ctx.spec.one - ctx.lam)


def cylinder_intervals(ctx: SubshiftContext, p: Patch) -> CylinderSet:
    """
    The points t in [0, 1) with x_t matching the patch.

    Args:
        ctx: SubshiftContext
            The subshift.
        p: Patch
            The patch.

    Returns:
        CylinderSet
            Intersection over the entries (b, v) of the arc [−b, λ−b) when
            v = 1 and its complement when v = 0.
    """
    result = CylinderSet.full(ctx.spec)
    for key, value in p.entries:
        result = result.intersection(_key_arc(ctx, key, value))
    return result


def is_T_well_defined(ctx: SubshiftContext, p: Patch) -> tuple[bool, str]:
    """
    Whether the patch defines a transformation T_π: the cylinder must be
    nonempty and its translates by the patch keys pairwise disjoint.

    Returns:
        Tuple of (Bool, Str)
            The answer and a diagnostic naming the emptiness or the first
            overlapping pair of keys.
    """
    if len(p.entries) < 2:
        return False, "A single key gives a single translate, so T_π moves nothing."
    cylinder = cylinder_intervals(ctx, p)
    if cylinder.is_empty:
        return False, "The cylinder set is empty."
    translates = [cylinder.translate(key) for key in p.keys]
    for (i, a), (j, b) in combinations(enumerate(translates), 2):
        if not a.isdisjoint(b):
            return False, (
                f"Translates by {p.keys[i]} and {p.keys[j]} overlap on {a.intersection(b)}."
            )
    return True, "Translates are nonempty and pairwise disjoint."


def enumerate_patches(
    ctx: SubshiftContext,
    domain: Sequence[GammaElement],
    cap: int = DEFAULT_PATCH_DOMAIN_CAP,
) -> list[tuple[Patch, bool]]:
    """
    Every {0, 1} labeling of the domain together with its well-definedness.

    Args:
        ctx: SubshiftContext
            The subshift.
        domain: Sequence of GammaElement
            Keys, distinct mod 1.
        cap: Int
            Largest domain size accepted.

    Returns:
        List of (Patch, Bool)
            2**len(domain) patches, labelings in lexicographic order.
    """
    if len(domain) > cap:
        raise DomainTooLarge(f"{len(domain)} keys exceed the cap of {cap}.")
    results = []
    for values in product((0, 1), repeat=len(domain)):
        patch = Patch.from_values(domain, values)
        well_defined, diagnostic = is_T_well_defined(ctx, patch)
        logger.debug(f"Patch {patch}: {diagnostic}")
        results.append((patch, well_defined))
    return results


def T_pi_as_iet(
    ctx: SubshiftContext,
    p: Patch,
    order: Sequence[GammaElement] | None = None,
) -> Iet:
    """
    Realize T_π as an interval exchange: the translate of the cylinder by sᵢ
    moves by s_{i+1} − sᵢ (cyclically), everything else is fixed.

    Args:
        ctx: SubshiftContext
            The subshift.
        p: Patch
            A well-defined patch.
        order: Sequence of GammaElement
            The cycle s₁, ..., s_n of patch keys. Defaults to ascending keys.

    Returns:
        Iet
            The canonical element.
    """
    well_defined, diagnostic = is_T_well_defined(ctx, p)
    if not well_defined:
        raise NotWellDefined(diagnostic)
    if order is None:
        cycle = sorted(p.keys)
    else:
        cycle = [frac_of(key) for key in order]
        if sorted(cycle) != sorted(p.keys):
            raise InvalidPatch("The cycle order must list every patch key exactly once.")
    cylinder = cylinder_intervals(ctx, p)
    moves = []
    for current, following in zip(cycle, cycle[1:] + cycle[:1]):
        for a, b in cylinder.translate(current).intervals:
            moves.append((a, b - a, following - current))
    return from_moves(ctx.spec, moves)


def load_patch(spec: GammaSpec, document: Mapping) -> Patch:
    """Parse a patch document {"entries": [{"key": ..., "value": 0|1}, ...]}."""
    entries = require_key(document, "entries", "patch")
    if not isinstance(entries, list):
        raise MalformedDocument("Patch entries must be a list.")
    return Patch(
        tuple(
            (
                make_element(spec, require_key(entry, "key", "patch entry")),
                require_key(entry, "value", "patch entry"),
            )
            for entry in entries
        )
    )


def load_configuration(spec: GammaSpec, document: Mapping) -> Configuration:
    """Parse a configuration document {"t": ..., "hat": bool}."""
    return Configuration(
        make_element(spec, require_key(document, "t", "configuration")),
        hat=bool(document.get("hat", False)),
    )


def translate_patch(p: Patch, g: GammaElement) -> Patch:
    """The patch with every key moved by g. Its cylinder is the old one moved by −g."""
    return Patch(tuple((key + g, value) for key, value in p.entries))


def patch_at(ctx: SubshiftContext, c: Configuration, keys: Iterable[GammaElement]) -> Patch:
    """The restriction of a configuration to finitely many keys."""
    keys = list(keys)
    return Patch.from_values(keys, [config_value(ctx, c, key) for key in keys])
