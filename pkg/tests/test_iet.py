import math
import random
import warnings
from fractions import Fraction

import pytest

from iexg.config import SQRT2_GENERATOR, SQRT2_THIRD_GENERATOR, SQRT21_GENERATOR
from iexg.gamma import MalformedSpec, SpecMismatch, make_spec, random_point
from iexg.iet import (
    BadPartition,
    CircleSet,
    ConsistencyWarning,
    GeneratorRangeError,
    IntervalMismatch,
    KTooSmall,
    NonRationalScale,
    NotABijection,
    NotGridAligned,
    OutOfDomain,
    OverlappingIntervals,
    WrongSpecKind,
    aligned_level,
    ambient_group,
    angles,
    apply,
    as_permutation,
    commutator,
    compose,
    embedding_check,
    equals,
    from_moves,
    from_pieces,
    gamma_B,
    gamma_B1B2,
    generating_set,
    identity,
    inverse,
    load_iet,
    order,
    power,
    r_ka,
    rescale_element,
    rescale_spec,
    resolve_spec,
    rotation,
    sigma,
    sigma_hat,
    sigma_ij,
    sign_hom,
    supernatural_exponents,
    random_iet,
)
from iexg.utils import IndexOutOfRange, MalformedDocument


@pytest.fixture
def q(dyadic):
    """Factory function for dyadic elements from rationals."""

    def _q(value):
        return dyadic.rational(Fraction(value))

    return _q


@pytest.fixture(scope="module")
def triadic():
    return resolve_spec("triadic")


def test_circle_set_arc(dyadic, q):
    """Test arcs wrapping around 0 and the set operations."""
    arc = CircleSet.arc(dyadic, q("3/4"), q("1/2"))
    assert arc.intervals == ((q(0), q("1/4")), (q("3/4"), q(1)))
    assert str(arc) == "[0, 1/4) ∪ [3/4, 1)"
    assert arc.measure() == q("1/2")
    assert arc.contains(q("7/8")) and arc.contains(q(0))
    assert not arc.contains(q("1/2"))
    assert arc.complement().intervals == ((q("1/4"), q("3/4")),)
    assert arc.translate(q("1/4")).intervals == ((q(0), q("1/2")),)
    assert arc.union(arc.complement()) == CircleSet.full(dyadic)
    assert arc.isdisjoint(arc.complement())
    assert CircleSet.arc(dyadic, q("1/2"), q(0)).is_empty
    assert str(CircleSet(dyadic)) == "∅"
    assert CircleSet.arc(dyadic, q("1/2"), q(2)) == CircleSet.full(dyadic)


def test_rotation(sqrt2):
    """Test the canonical form and dynamics of an irrational rotation."""
    lam = sqrt2.generator(1)
    r = rotation(sqrt2, lam)
    assert r.cuts == (sqrt2.zero, 1 - lam)
    assert r.shifts == (lam, lam - 1)
    assert apply(r, 1 - lam) == 0
    assert apply(r, 2 * lam) == 3 * lam - 1
    assert power(r, 3) == rotation(sqrt2, 3 * lam)
    assert power(r, -2) == inverse(compose(r, r))
    assert inverse(r) == rotation(sqrt2, -lam)
    assert order(r, bound=50) is None
    assert rotation(sqrt2, sqrt2.one) == identity(sqrt2)
    assert angles(r) == frozenset({lam, lam - 1})


def test_rotation_document(dyadic, q):
    """Test the document of the half-turn."""
    half_turn = rotation(dyadic, q("1/2"))
    assert half_turn.to_document(include_spec=False) == {
        "cuts": [{"level": 0, "num": 0}, {"level": 1, "num": 1}],
        "shifts": [{"level": 1, "num": 1}, {"level": 1, "num": -1}],
    }
    assert inverse(half_turn) == half_turn
    assert order(half_turn) == 2


def test_from_pieces_merges(dyadic, q):
    """Test adjacent pieces with equal shift are merged."""
    f = from_pieces(dyadic, [q(0), q("1/4"), q("1/2")], [q(0), q(0), q(0)])
    assert f == identity(dyadic)
    assert f.canonical_key == identity(dyadic).canonical_key


def test_from_pieces_reduces_shifts(dyadic, q):
    """Test shifts are taken mod 1."""
    f = from_pieces(dyadic, [q(0)], [q("5/2")])
    assert f == rotation(dyadic, q("1/2"))


@pytest.mark.parametrize(
    "cuts, shifts, error",
    [
        (["1/4"], ["0"], BadPartition),  # first_cut_not_zero
        (["0", "1/2", "1/4"], ["0", "0", "0"], BadPartition),  # decreasing_cuts
        (["0", "1/2"], ["0"], BadPartition),  # length_mismatch
        ([], [], BadPartition),  # empty
        (["0", "1/2"], ["1/2", "1/4"], NotABijection),  # overlap
        (["0", "1/2"], ["0", "1/4"], NotABijection),  # gap_and_overlap
    ],
    ids=[
        "first_cut_not_zero",
        "decreasing_cuts",
        "length_mismatch",
        "empty",
        "overlap",
        "gap_and_overlap",
    ],
)
def test_from_pieces_invalid(dyadic, q, cuts, shifts, error):
    """Test the from_pieces function rejects invalid piece data."""
    with pytest.raises(error):
        from_pieces(dyadic, [q(c) for c in cuts], [q(s) for s in shifts])


def test_apply_out_of_domain(dyadic, q):
    """Test the apply function outside [0, 1)."""
    with pytest.raises(OutOfDomain):
        apply(identity(dyadic), q(1))
    with pytest.raises(OutOfDomain):
        apply(identity(dyadic), q("-1/2"))


def test_spec_mismatch(sqrt2, dyadic):
    """Test elements over different groups cannot be combined."""
    with pytest.raises(SpecMismatch):
        equals(identity(sqrt2), identity(dyadic))
    with pytest.raises(SpecMismatch):
        apply(identity(sqrt2), dyadic.zero)


def test_gamma_B(dyadic, q):
    """Test the gamma_B involution."""
    swap = gamma_B(dyadic, q(0), q("1/4"), q("1/2"))
    assert apply(swap, q("1/8")) == q("5/8")
    assert apply(swap, q("5/8")) == q("1/8")
    assert apply(swap, q("3/8")) == q("3/8")
    assert order(swap) == 2
    # the second interval may wrap around 0
    wrapping = gamma_B(dyadic, q("1/4"), q("1/2"), q("5/8"))
    assert apply(wrapping, q("1/4")) == q("7/8")
    assert apply(wrapping, q("1/16")) == q("7/16")
    assert apply(wrapping, q("1/8")) == q("1/8")
    assert compose(wrapping, wrapping) == identity(dyadic)


@pytest.mark.parametrize(
    "a, b, c, error",
    [
        ("0", "1/2", "1/4", OverlappingIntervals),  # overlap
        ("1/2", "1/4", "1/4", BadPartition),  # reversed
        ("1/2", "1/2", "1/4", BadPartition),  # empty
    ],
    ids=[
        "overlap",
        "reversed",
        "empty",
    ],
)
def test_gamma_B_invalid(dyadic, q, a, b, c, error):
    """Test the gamma_B function rejects invalid intervals."""
    with pytest.raises(error):
        gamma_B(dyadic, q(a), q(b), q(c))


def test_commutator_is_three_cycle(dyadic, q):
    """Test the commutator of two swaps sharing an interval."""
    first = (q(0), q("1/4"), q("1/4"))
    second = (q("1/4"), q("1/2"), q("1/4"))
    cycle = gamma_B1B2(dyadic, first, second)
    assert commutator(gamma_B(dyadic, *first), gamma_B(dyadic, *second)) == cycle
    assert apply(cycle, q("1/8")) == q("3/8")
    assert apply(cycle, q("3/8")) == q("5/8")
    assert apply(cycle, q("5/8")) == q("1/8")
    assert order(cycle) == 3


def test_gamma_B1B2_invalid(dyadic, q):
    """Test the gamma_B1B2 function with mismatched or overlapping swaps."""
    with pytest.raises(IntervalMismatch):
        gamma_B1B2(dyadic, (q(0), q("1/4"), q("1/4")), (q("1/2"), q("3/4"), q("1/4")))
    with pytest.raises(OverlappingIntervals):
        gamma_B1B2(dyadic, (q(0), q("1/4"), q("1/4")), (q("1/4"), q("1/2"), q("-1/4")))


def test_from_moves_overlap(dyadic, q):
    """Test the from_moves function rejects overlapping arcs."""
    with pytest.raises(OverlappingIntervals):
        from_moves(dyadic, [(q(0), q("1/2"), q("1/2")), (q("1/4"), q("1/2"), q("1/2"))])


@pytest.mark.parametrize("name", ["sqrt2", "rank2", "k11"])
def test_generating_set_orders(name):
    """Test every σ and σ̂ generator has order 3, and r_ka too when k > 1."""
    spec = resolve_spec(name)
    generators = generating_set(spec)
    assert len(generators) == 2 * spec.d + (4 if spec.k > 1 else 0)
    for g in generators:
        assert order(g, bound=3) == 3


def test_sigma(sqrt2):
    """Test the arcs moved by σ₁ on Z + λZ."""
    lam = sqrt2.generator(1)
    s = sigma(sqrt2, 1)
    assert angles(s) == frozenset({sqrt2.zero, lam, lam - 1, 1 - 2 * lam})
    assert apply(s, lam) == 2 * lam
    assert apply(s, 2 * lam) == 3 * lam - 1
    assert apply(s, 3 * lam - 1) == lam
    assert apply(s, sqrt2.zero) == 0
    hat = sigma_hat(sqrt2, 1)
    assert apply(hat, sqrt2.zero) == lam
    assert apply(hat, lam) == 2 * lam
    assert apply(hat, 2 * lam) == 0


def test_sigma_second_generator():
    """Test σ₂ on (1/20)Z + λ₁Z + λ₂Z with λ₂ = √21/10 moves 9/20 by λ₂."""
    spec = make_spec(
        {"kind": "finitely_generated", "k": 20, "irrationals": [SQRT2_GENERATOR, SQRT21_GENERATOR]}
    )
    t = spec.rational(Fraction(9, 20))
    lam1, lam2 = spec.generator(1), spec.generator(2)
    assert lam1 < t < 1 - 2 * lam2 + lam1
    assert apply(sigma(spec, 2), t) == t + lam2


def test_sigma_invalid(sqrt2, dyadic):
    """Test the σ constructors reject bad indices and groups."""
    with pytest.raises(IndexOutOfRange):
        sigma(sqrt2, 2)
    with pytest.raises(IndexError):
        sigma_hat(sqrt2, 0)
    with pytest.raises(WrongSpecKind):
        sigma(dyadic, 1)
    decreasing = make_spec(
        {"kind": "finitely_generated", "irrationals": [SQRT2_THIRD_GENERATOR, SQRT2_GENERATOR]}
    )
    with pytest.raises(GeneratorRangeError):
        generating_set(decreasing)
    too_small = make_spec(
        {"kind": "finitely_generated", "irrationals": [{"minpoly": [-1, 0, 10], "interval": ["1/4", "1/2"]}]}
    )
    with pytest.raises(GeneratorRangeError):
        sigma_hat(too_small, 1)


def test_r_ka(k11):
    """Test the r_ka cycle of three arcs of length 1/k."""
    a = k11.rational(Fraction(1, 11))
    r = r_ka(k11, a)
    assert apply(r, a) == k11.rational(Fraction(2, 11))
    assert apply(r, k11.rational(Fraction(3, 11))) == a
    assert order(r) == 3


def test_r_ka_small_k(sqrt2):
    """Test the r_ka function warns for k <= 9 and rejects rational groups."""
    spec = make_spec({"kind": "finitely_generated", "k": 3, "irrationals": [SQRT2_GENERATOR]})
    with pytest.warns(KTooSmall):
        r_ka(spec, spec.zero)
    with pytest.raises(WrongSpecKind):
        r_ka(resolve_spec("dyadic"), resolve_spec("dyadic").zero)


def test_sigma_ij(dyadic, q):
    """Test the grid transpositions of a rational group."""
    half_swap = sigma_ij(dyadic, 1, 0, 1)
    assert half_swap == rotation(dyadic, q("1/2"))
    assert aligned_level(sigma_ij(dyadic, 2, 0, 3)) == 2
    with pytest.raises(IndexOutOfRange):
        sigma_ij(dyadic, 1, 1, 2)
    with pytest.raises(WrongSpecKind):
        sigma_ij(resolve_spec("sqrt2"), 1, 0, 1)


@pytest.mark.parametrize(
    "name, level, index",
    [
        ("dyadic", 1, 0),  # dyadic
        ("dyadic", 2, 2),  # dyadic_level_2
        ("triadic", 1, 1),  # triadic
        ("factorial", 2, 3),  # factorial
        ("mixed23", 1, 0),  # mixed
    ],
    ids=[
        "dyadic",
        "dyadic_level_2",
        "triadic",
        "factorial",
        "mixed",
    ],
)
def test_embedding_check(name, level, index):
    """Test a level-n transposition is the product of the level-(n+1) transpositions it refines."""
    assert embedding_check(resolve_spec(name), level, index)


def test_as_permutation(dyadic, q):
    """Test the grid permutations of rational elements."""
    quarter_turn = rotation(dyadic, q("1/4"))
    assert as_permutation(dyadic, quarter_turn, 2).array_form == [1, 2, 3, 0]
    assert as_permutation(dyadic, quarter_turn, 3).array_form == [2, 3, 4, 5, 6, 7, 0, 1]
    with pytest.raises(NotGridAligned):
        as_permutation(dyadic, quarter_turn, 1)


def test_sign_hom(triadic):
    """Test the sign of grid transpositions over a group with odd multiplier."""
    transposition = sigma_ij(triadic, 1, 0, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("error", ConsistencyWarning)
        assert sign_hom(triadic, transposition) == 1
        assert sign_hom(triadic, transposition, level=2) == 1
        assert sign_hom(triadic, compose(transposition, transposition)) == 0
    assert sign_hom(triadic, identity(triadic)) == 0
    with pytest.raises(NotGridAligned):
        sign_hom(triadic, sigma_ij(triadic, 2, 0, 1), level=1)


def test_sign_hom_even_multiplier(dyadic):
    """Test the sign is not stable under refinement when the multiplier is even."""
    transposition = sigma_ij(dyadic, 1, 0, 1)
    with pytest.warns(ConsistencyWarning):
        assert sign_hom(dyadic, transposition) == 1
    assert sign_hom(dyadic, transposition, level=2, check_next_level=False) == 0


def test_ambient_group(sqrt2):
    """Test the subgroup generated by 1 and the angles of the generators."""
    lam = sqrt2.generator(1)
    assert ambient_group(generating_set(sqrt2)) == ambient_group([rotation(sqrt2, lam)])
    assert ambient_group([identity(sqrt2)]) == [sqrt2.one]


def test_rescale_finitely_generated(sqrt2):
    """Test rescaling Z + λZ by 2."""
    two = sqrt2.rational(2)
    rescaled = rescale_spec(sqrt2, two)
    assert rescaled.k == 2
    assert float(rescaled.generator(1)) == pytest.approx((2**0.5 - 1) / 2)
    image = rescale_element(sqrt2, rescaled, two, sqrt2.generator(1) + 1)
    assert image == rescaled.generator(1) + rescaled.rational(Fraction(1, 2))
    with pytest.raises(NonRationalScale):
        rescale_spec(sqrt2, sqrt2.generator(1))
    with pytest.raises(NonRationalScale):
        rescale_spec(sqrt2, sqrt2.zero)


def test_rescale_half_integers():
    """Test rescaling (1/2)Z + λZ by 1/2 gives Z + 2λZ."""
    spec = make_spec({"kind": "finitely_generated", "k": 2, "irrationals": [SQRT2_GENERATOR]})
    half = spec.rational(Fraction(1, 2))
    rescaled = rescale_spec(spec, half)
    assert rescaled.k == 1
    assert rescaled.d == 1
    assert float(rescaled.generator(1)) == pytest.approx(2 * (2**0.5 - 1))
    assert rescale_element(spec, rescaled, half, spec.generator(1)) == rescaled.generator(1)
    assert rescale_element(spec, rescaled, half, half) == rescaled.one
    assert rescale_spec(spec, spec.one) == spec


def test_rescale_rational(dyadic, factorial):
    """Test rescaling rational groups."""
    assert rescale_spec(dyadic, dyadic.rational(Fraction(1, 2))) == dyadic
    assert rescale_spec(factorial, factorial.rational(7)) == factorial
    rescaled = rescale_spec(dyadic, dyadic.rational(3))
    assert [rescaled.denominator(n) for n in range(4)] == [1, 3, 6, 12]
    assert rescale_element(dyadic, rescaled, dyadic.rational(3), dyadic.rational(Fraction(1, 2))) == rescaled.rational(Fraction(1, 6))


def test_supernatural_exponents():
    """Test the primes with infinite exponent of each rule type."""
    assert supernatural_exponents(resolve_spec("dyadic").rule) == {2: math.inf}
    assert supernatural_exponents(resolve_spec("mixed23").rule) == {3: math.inf}
    assert supernatural_exponents(resolve_spec("factorial").rule) == {}


@pytest.mark.parametrize("name", ["sqrt2", "k11", "dyadic", "factorial"])
def test_random_iet_group_law(name):
    """Test inverse and associativity on random elements."""
    spec = resolve_spec(name)
    rng = random.Random(1)
    for _ in range(10):
        f, g, h = (random_iet(spec, rng, max_pieces=4) for _ in range(3))
        assert compose(f, inverse(f)) == identity(spec)
        assert compose(inverse(f), f) == identity(spec)
        assert compose(compose(f, g), h) == compose(f, compose(g, h))
        assert inverse(inverse(f)) == f
        for t in [spec.zero] + [random_point(spec, rng) for _ in range(5)]:
            assert apply(compose(f, g), t) == apply(f, apply(g, t))
            assert apply(inverse(f), apply(f, t)) == t


def test_load_iet(dyadic, q):
    """Test the load_iet function normalizes its input."""
    document = {
        "spec": "dyadic",
        "cuts": [{"level": 0, "num": 0}, {"level": 2, "num": 2}],
        "shifts": [{"level": 1, "num": 1}, {"level": 1, "num": 1}],
    }
    f = load_iet(document)
    assert f == rotation(dyadic, q("1/2"))
    assert load_iet(f.to_document()) == f
    assert load_iet(f.to_document(include_spec=False), dyadic) == f
    with pytest.raises(MalformedDocument):
        load_iet({"spec": "dyadic", "cuts": []})
    with pytest.raises(MalformedSpec):
        load_iet({"spec": "dyadic", "cuts": {}, "shifts": []})


def test_resolve_spec_unknown():
    """Test the resolve_spec function with an unknown builtin name."""
    with pytest.raises(MalformedSpec, match="Unknown builtin"):
        resolve_spec("sqrt3")
