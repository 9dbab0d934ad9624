"""
Named consistency checks reproducing the computed results for interval
exchange groups: cylinder tables, patch classification, generating sets,
rational presentations, the sign homomorphism, group laws, dynamics witnesses,
invariant tables and the soundness tripwire of sign determination.
"""

import math
import random
from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from iexg.config import BUILTIN_SPECS, SettingsScheme
from iexg.explorer import (
    angle_span_check,
    cayley_ball,
    find_fixed_point,
    orbit_density,
    separate_points,
    verify_relation,
)
from iexg.gamma import (
    GammaSpec,
    PrecisionExhausted,
    frac_of,
    make_spec,
    precision,
    random_point,
    sign_of,
)
from iexg.iet import (
    BadPartition,
    IntervalMismatch,
    OverlappingIntervals,
    apply,
    commutator,
    compose,
    embedding_check,
    from_pieces,
    gamma_B,
    gamma_B1B2,
    generating_set,
    identity,
    inverse,
    order,
    r_ka,
    r_ka_offsets,
    random_iet,
    rotation,
    sigma,
    sigma_hat,
    sigma_ij,
    sign_hom,
)
from iexg.invariants import (
    abelianization,
    group_equal,
    groupoid_homology,
    k_groups,
    supernatural,
)
from iexg.logging import get_custom_logger
from iexg.subshift import (
    CylinderSet,
    Patch,
    SubshiftContext,
    T_pi_as_iet,
    cylinder_intervals,
    enumerate_patches,
    is_T_well_defined,
)
from iexg.utils import IexgError

logger = get_custom_logger(__name__)

GROUP_LAW_SAMPLES = 500
APPLY_SAMPLES = 100
COMMUTATOR_SAMPLES = 20
SEPARATION_SAMPLES = 50
FIXED_POINT_SAMPLES = 100
SIGN_WORDS = 100
SIGN_WORD_LENGTH = 20
SIGN_TRANSPOSITIONS = 10
SIGN_LEVEL = 3
DENSITY_EPSILON = Fraction(1, 100)
DENSITY_DEPTH = 200
MAX_ATTEMPTS = 1000


class CheckFailed(IexgError):
    def __init__(self, message: str = "The check failed.") -> None:
        super().__init__(message)


def expect(condition: bool, message: str) -> None:
    if not condition:
        raise CheckFailed(message)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def to_document(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class SuiteContext:
    """Inputs shared by the checks."""

    settings: SettingsScheme
    spec: GammaSpec
    rng: random.Random


def builtin(name: str) -> GammaSpec:
    return make_spec(BUILTIN_SPECS[name])


def _triple(spec: GammaSpec, i: int) -> list:
    lam = spec.generator(i)
    return [spec.zero, lam, -lam]


def check_cylinder_tables(ctx: SuiteContext) -> str:
    spec = builtin("rank2")
    sub = SubshiftContext.for_spec(spec)
    one, lam1 = spec.one, spec.generator(1)
    for i in (1, 2):
        keys, lam = _triple(spec, i), spec.generator(i)
        expected = {
            (1, 0, 0): [(spec.zero, lam1)],
            (0, 1, 0): [(lam1 + lam, one + lam1 - lam)],
            (0, 1, 1): [(one - lam, lam + lam1)],
            (0, 0, 1): [(lam, one - lam)],
        }
        for values, intervals in expected.items():
            cylinder = cylinder_intervals(sub, Patch.from_values(keys, values))
            target = CylinderSet.from_intervals(spec, intervals)
            expect(cylinder == target, f"i = {i}, π{values}: got {cylinder}, expected {target}.")
        empty = [(1, 1, 0), (1, 0, 1), (1, 1, 1)] + ([(0, 0, 0)] if i == 1 else [])
        for values in empty:
            cylinder = cylinder_intervals(sub, Patch.from_values(keys, values))
            expect(cylinder.is_empty, f"i = {i}, π{values} should be empty, got {cylinder}.")
        well_defined, diagnostic = is_T_well_defined(sub, Patch.from_values(keys, (0, 1, 1)))
        expect(not well_defined and "overlap" in diagnostic, f"i = {i}, π(0, 1, 1): {diagnostic}")
    return "Four interval formulas and the empty cylinders match for i = 1, 2."


def check_patch_classification(ctx: SuiteContext) -> str:
    spec = builtin("rank2")
    sub = SubshiftContext.for_spec(spec)
    for i in (1, 2):
        good = {p.values for p, ok in enumerate_patches(sub, _triple(spec, i)) if ok}
        expect(good == {(0, 1, 0), (0, 0, 1)}, f"i = {i}: well-defined patches {sorted(good)}.")
    return "Exactly (0, 1, 0) and (0, 0, 1) are well defined for i = 1, 2."


def check_generator_realization(ctx: SuiteContext) -> str:
    spec = builtin("rank2")
    sub = SubshiftContext.for_spec(spec)
    for i in (1, 2):
        keys = _triple(spec, i)
        realized = [T_pi_as_iet(sub, Patch.from_values(keys, v)) for v in ((0, 1, 0), (0, 0, 1))]
        expected = [sigma(spec, i), sigma_hat(spec, i)]
        expect(
            set(realized) == set(expected),
            f"i = {i}: realized elements differ from σ{i} and σ̂{i}.",
        )
        expect(all(order(f, 3) == 3 for f in realized), f"i = {i}: an element is not of order 3.")
    return "T_π of the two well-defined patches are σᵢ and σ̂ᵢ, of order 3."


def check_k11_generators(ctx: SuiteContext) -> str:
    spec = builtin("k11")
    sub = SubshiftContext.for_spec(spec)
    step = spec.rational(Fraction(1, spec.k))
    keys = [spec.zero, step, -step]
    empty, overlapping, realized = set(), set(), []
    for patch, ok in enumerate_patches(sub, keys):
        if ok:
            realized.append(T_pi_as_iet(sub, patch))
        elif cylinder_intervals(sub, patch).is_empty:
            empty.add(patch.values)
        else:
            overlapping.add(patch.values)
    expect(empty == {(1, 0, 0), (0, 1, 1)}, f"Empty cylinders {sorted(empty)}.")
    expect(overlapping == {(1, 1, 1), (0, 0, 0)}, f"Overlapping translates {sorted(overlapping)}.")
    expected = {r_ka(spec, a) for a in r_ka_offsets(spec)}
    expect(set(realized) == expected, "Realized patches differ from the four r_ka.")
    size = len(generating_set(spec))
    expect(size == 2 * spec.d + 4, f"Generating set has {size} elements.")
    return f"Two empty, two overlapping, four r_11,a recovered; {size} generators."


def check_rational_presentation(ctx: SuiteContext) -> str:
    spec = builtin("mixed23")
    expect(embedding_check(spec, 1, 0), "σ¹₀,₁ differs from σ²₀,₃ σ²₁,₄ σ²₂,₅.")
    size = spec.denominator(2)
    adjacent = [sigma_ij(spec, 2, i, i + 1) for i in range(size - 1)]
    for i in range(size - 1):
        expect(verify_relation(adjacent, ((i, 1), (i, 1))), f"σ²_{i},{i + 1} is not an involution.")
    for i, j in combinations(range(size - 1), 2):
        if j - i >= 2:
            word = ((i, 1), (j, 1), (i, -1), (j, -1))
            expect(verify_relation(adjacent, word), f"σ²_{i},{i + 1} and σ²_{j},{j + 1} do not commute.")
    for i in range(size - 2):
        word = ((i, 1), (i + 1, 1), (i, 1), (i + 1, -1), (i, -1), (i + 1, -1))
        expect(verify_relation(adjacent, word), f"Braid relation fails at i = {i}.")
    radius = math.comb(size, 2)
    ball = cayley_ball(adjacent, radius, radius_cap=radius, max_elements=ctx.settings["max_elements"])
    expect(ball.element_count == math.factorial(size), f"Ball has {ball.element_count} elements.")

    dyadic = builtin("dyadic")
    small = [sigma_ij(dyadic, 2, i, i + 1) for i in range(3)]
    small_ball = cayley_ball(small, math.comb(4, 2), radius_cap=math.comb(4, 2))
    expect(small_ball.element_count == 24, f"Dyadic level 2 ball has {small_ball.element_count} elements.")
    return f"Embedding, relations and saturation at {ball.element_count} and 24 elements hold."


def _random_sign_word(spec: GammaSpec, rng: random.Random):
    f = identity(spec)
    for _ in range(rng.randint(0, SIGN_WORD_LENGTH)):
        n = rng.randint(1, SIGN_LEVEL)
        i = rng.randrange(spec.denominator(n) - 1)
        f = compose(f, sigma_ij(spec, n, i, i + 1))
    return f


def check_sign_homomorphism(ctx: SuiteContext) -> str:
    spec = builtin("dyadic")
    for _ in range(SIGN_WORDS):
        f, g = _random_sign_word(spec, ctx.rng), _random_sign_word(spec, ctx.rng)
        signs = [sign_hom(spec, h, SIGN_LEVEL, check_next_level=False) for h in (f, g, compose(f, g))]
        expect(signs[2] == (signs[0] + signs[1]) % 2, f"Parity is not multiplicative: {signs}.")
    for _ in range(SIGN_TRANSPOSITIONS):
        n = ctx.rng.randint(1, SIGN_LEVEL)
        i = ctx.rng.randrange(spec.denominator(n) - 1)
        parity = sign_hom(spec, sigma_ij(spec, n, i, i + 1), check_next_level=False)
        expect(parity == 1, f"σ^{n}_{i},{i + 1} has parity {parity}.")
    triadic = builtin("triadic")
    product = compose(sigma_ij(triadic, 1, 0, 1), sigma_ij(triadic, 2, 0, 1))
    expect(sign_hom(triadic, product) == 0, "σ¹₀,₁ σ²₀,₁ is odd over Z[1/3].")
    return "Parity is multiplicative and odd on grid transpositions."


def check_group_law(ctx: SuiteContext) -> str:
    spec, rng = ctx.spec, ctx.rng
    for _ in range(GROUP_LAW_SAMPLES):
        f, g, h = (random_iet(spec, rng) for _ in range(3))
        expect(compose(compose(f, g), h) == compose(f, compose(g, h)), "Composition is not associative.")
        expect(compose(f, inverse(f)) == identity(spec), "f ∘ f⁻¹ is not the identity.")
        expect(compose(inverse(f), f) == identity(spec), "f⁻¹ ∘ f is not the identity.")
        expect(inverse(inverse(f)) == f, "Inverting twice does not give f back.")
        expect(from_pieces(spec, f.cuts, f.shifts) == f, "Normalization is not idempotent.")
    for _ in range(APPLY_SAMPLES):
        f, g, t = random_iet(spec, rng), random_iet(spec, rng), random_point(spec, rng)
        expect(apply(compose(f, g), t) == apply(f, apply(g, t)), f"apply disagrees with compose at {t}.")
    return f"{GROUP_LAW_SAMPLES} triples and {APPLY_SAMPLES} points pass."


def _random_disjoint_triple(spec: GammaSpec, rng: random.Random, length_bound: Fraction):
    for _ in range(MAX_ATTEMPTS):
        a1 = random_point(spec, rng)
        length = random_point(spec, rng)
        c1, c2 = random_point(spec, rng), random_point(spec, rng)
        if length.is_zero or length >= length_bound:
            continue
        a2 = frac_of(a1 + c1)
        try:
            first = (a1, a1 + length, c1)
            second = (a2, a2 + length, c2)
            result = gamma_B1B2(spec, first, second)
            expected = commutator(gamma_B(spec, *first), gamma_B(spec, *second))
        except (OverlappingIntervals, BadPartition, IntervalMismatch):
            continue
        return result, expected
    raise CheckFailed("No disjoint triple found.")


def check_commutator_identity(ctx: SuiteContext) -> str:
    for name in ("dyadic", "sqrt2"):
        spec = builtin(name)
        for _ in range(COMMUTATOR_SAMPLES):
            result, expected = _random_disjoint_triple(spec, ctx.rng, Fraction(1, 4))
            expect(result == expected, f"γ_B1B2 differs from the commutator over {name}.")
    return f"{COMMUTATOR_SAMPLES} triples over Z[1/8] and Z + λZ agree."


def _distinct_points(spec: GammaSpec, rng: random.Random):
    while True:
        t, t_prime = random_point(spec, rng), random_point(spec, rng)
        if t != t_prime:
            return t, t_prime


def check_dynamics_witnesses(ctx: SuiteContext) -> str:
    spec = ctx.spec if not ctx.spec.is_rational else builtin("sqrt2")
    sub = SubshiftContext.for_spec(spec)
    for _ in range(SEPARATION_SAMPLES):
        t, t_prime = _distinct_points(spec, ctx.rng)
        separate_points(sub, t, t_prime, ctx.settings["search_depth"])
    sqrt2 = builtin("sqrt2")
    report = orbit_density(sqrt2, sqrt2.zero, DENSITY_EPSILON, DENSITY_DEPTH)
    expect(report.dense, f"Cells {list(report.missing)} missed.")
    points = [random_point(sqrt2, ctx.rng) for _ in range(FIXED_POINT_SAMPLES)]
    fixed = find_fixed_point(rotation(sqrt2, sqrt2.generator(1)), points)
    expect(fixed is None, f"Rotation by λ1 fixes {fixed}.")
    return "Separation, ε-density and freeness witnesses found."


def check_invariant_tables(ctx: SuiteContext) -> str:
    for name in ("sqrt2", "rank2", "rank3"):
        spec = builtin(name)
        d = spec.d
        pascal = [1]
        for _ in range(d + 1):
            pascal = [a + b for a, b in zip([0] + pascal, pascal + [0])]
        for n in range(d + 3):
            expected = pascal[n + 1] if n + 1 < len(pascal) else 0
            rank = groupoid_homology(spec, n).free_rank
            expect(rank == expected, f"{name}: H{n} has rank {rank}, expected {expected}.")
        k0, k1 = k_groups(spec)
        ranks = [groupoid_homology(spec, n).free_rank for n in range(d + 1)]
        expect(
            (k0.free_rank, k1.free_rank) == (sum(ranks[0::2]), sum(ranks[1::2])),
            f"{name}: K-groups are not the parity sums.",
        )
    expect(str(abelianization(builtin("dyadic"))) == "Z_2", "Rational abelianization is not Z_2.")
    expect(str(abelianization(builtin("sqrt2"))) == "Z ⊕ Z_2^2", "d = 1 abelianization.")
    expect(str(abelianization(builtin("rank2"))) == "Z ⊕ Z_2^3", "d = 2 abelianization.")
    expect(supernatural(builtin("dyadic")).exponents == {2: math.inf}, "Dyadic supernatural number.")
    expect(supernatural(builtin("factorial")).universal, "Factorial supernatural number.")
    mixed = builtin("mixed23")
    halves = [mixed.one, mixed.rational(Fraction(1, 2)), mixed.rational(Fraction(1, 3))]
    expect(group_equal(halves, [mixed.rational(Fraction(1, 6))]), "⟨1, 1/2, 1/3⟩ ≠ ⟨1/6⟩.")
    sqrt2 = builtin("sqrt2")
    lam = sqrt2.generator(1)
    expect(not group_equal([sqrt2.one, lam], [sqrt2.one, 2 * lam]), "⟨1, λ⟩ = ⟨1, 2λ⟩.")
    expect(angle_span_check(builtin("rank2")), "Generator angles do not span Γ.")
    expect(angle_span_check(builtin("k11")), "Generator angles do not span Γ for k = 11.")
    return "Homology, K-groups, abelianizations, supernatural numbers and group equality match."


def check_soundness_tripwire(ctx: SuiteContext) -> str:
    spec = builtin("dependent")
    # 3·(√2/3) − (√2 − 1) − 1 is zero, but the declared generators claim independence
    x = spec.element((-1, -1, 3))
    bits = ctx.settings["precision_bits"]
    with precision(bits):
        try:
            sign = sign_of(x)
        except PrecisionExhausted:
            return f"PrecisionExhausted raised at {bits} bits."
    raise CheckFailed(f"sign_of returned {sign} on a zero combination.")


CHECKS: dict[str, Callable[[SuiteContext], str]] = {
    "commutator_identity": check_commutator_identity,
    "cylinder_tables": check_cylinder_tables,
    "dynamics_witnesses": check_dynamics_witnesses,
    "generator_realization": check_generator_realization,
    "group_law": check_group_law,
    "invariant_tables": check_invariant_tables,
    "k11_generators": check_k11_generators,
    "patch_classification": check_patch_classification,
    "rational_presentation": check_rational_presentation,
    "sign_homomorphism": check_sign_homomorphism,
    "soundness_tripwire": check_soundness_tripwire,
}


def run_suite(settings: SettingsScheme, spec: GammaSpec | None = None) -> list[CheckResult]:
    """
    Run every check, in name order.

    Args:
        settings: SettingsScheme
            Seed and limits.
        spec: GammaSpec
            Group used by the group law and dynamics checks. Defaults to the
            builtin 'sqrt2'.

    Returns:
        List of CheckResult
            One result per check. Domain errors inside a check count as a failure.
    """
    ctx = SuiteContext(settings, spec or builtin("sqrt2"), random.Random(settings["seed"]))
    results = []
    for name in sorted(CHECKS):
        try:
            detail = CHECKS[name](ctx)
            passed = True
        except IexgError as e:
            detail, passed = f"{type(e).__name__}: {e}", False
        log = logger.info if passed else logger.warning
        log(f"{'passed' if passed else 'FAILED'}. {detail}", extra={"subject": name})
        results.append(CheckResult(name, passed, detail))
    return results
