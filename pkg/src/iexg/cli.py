"""Command-line interface of iexg."""

import argparse
import json
import sys
from collections.abc import Callable, Mapping
from pathlib import Path

from iexg.config import BUILTIN_SPECS, SettingsScheme, load_settings
from iexg.explorer import (
    cayley_ball,
    orbit_density,
    separate_points,
    verify_relation,
)
from iexg.gamma import (
    GammaSpec,
    floor_of,
    lattice_membership,
    make_element,
    make_generator,
    precision,
    sign_of,
)
from iexg.iet import (
    angles,
    apply,
    aligned_level,
    as_permutation,
    compose,
    equals,
    generating_set,
    inverse,
    load_iet,
    resolve_spec,
    sign_hom,
)
from iexg.invariants import invariant_report, ring_abelianization
from iexg.logging import get_custom_logger, set_package_log_level
from iexg.subshift import (
    SubshiftContext,
    T_pi_as_iet,
    config_value,
    cylinder_intervals,
    enumerate_patches,
    is_T_well_defined,
    load_configuration,
    load_patch,
)
from iexg.utils import (
    IexgError,
    MalformedDocument,
    dump_document,
    load_document,
    parse_rational,
    require_key,
)
from iexg.verify import run_suite

ENTRY_POINT_NAME = "iexg"
DEFAULT_SPEC = "sqrt2"
DEFAULT_EPSILON = "1/10"
EXIT_OK, EXIT_DOMAIN_ERROR, EXIT_USAGE = 0, 1, 2

logger = get_custom_logger(__name__)

Handler = Callable[[argparse.Namespace, SettingsScheme], dict | str]


class UsageError(Exception):
    """Bad command-line input, reported with exit code 2."""


def read_input(path: str | None, flag: str) -> object:
    """
    Read a JSON input document given on the command line.

    Args:
        path: Str
            Path passed to the flag.
        flag: Str
            Flag name, used in the error message.

    Returns:
        The parsed JSON document.
    """
    if path is None:
        raise UsageError(f"This command needs an input document ({flag} PATH).")
    try:
        return load_document(path)
    except OSError as e:
        raise UsageError(f"Cannot read {path!r}: {e.strerror or e}.")
    except json.JSONDecodeError as e:
        raise UsageError(f"{path!r} is not valid JSON: {e}.")


def get_spec(args: argparse.Namespace, document: object = None) -> GammaSpec:
    """
    The group of the command: --inline, then --spec (builtin name or path),
    then the 'spec' field of the input document, then the builtin 'sqrt2'.
    """
    if args.inline:
        try:
            return resolve_spec(json.loads(args.inline))
        except json.JSONDecodeError as e:
            raise UsageError(f"--inline is not valid JSON: {e}.")
    if args.spec:
        if args.spec in BUILTIN_SPECS:
            return resolve_spec(args.spec)
        return resolve_spec(read_input(args.spec, "--spec"))
    if isinstance(document, Mapping) and "spec" in document:
        return resolve_spec(document["spec"])
    return resolve_spec(DEFAULT_SPEC)


def _element_list(document: object, key: str) -> list:
    items = document if isinstance(document, list) else require_key(document, key)
    if not isinstance(items, list):
        raise MalformedDocument(f"Expected a list of {key}.")
    return items


def _iet_list(spec: GammaSpec, document: object) -> list:
    return [load_iet(item, spec) for item in _element_list(document, "generators")]


# gamma


def gamma_show(args, settings) -> dict:
    spec = get_spec(args)
    return {"spec": spec.to_document(), "description": str(spec), "kind": spec.kind.value, "d": spec.d}


def gamma_sign(args, settings) -> dict:
    document = read_input(args.f, "-f")
    spec = get_spec(args, document)
    x = make_element(spec, document)
    return {"element": x.to_document(), "sign": str(sign_of(x))}


def gamma_floor(args, settings) -> dict:
    document = read_input(args.f, "-f")
    spec = get_spec(args, document)
    x = make_element(spec, document)
    return {"element": x.to_document(), "floor": floor_of(x)}


def gamma_member(args, settings) -> dict:
    document = read_input(args.f, "-f")
    spec = get_spec(args, document)
    x = make_element(spec, document)
    target_document = read_input(args.g, "-g")
    target = [make_element(spec, e) for e in _element_list(target_document, "elements")]
    return {"element": x.to_document(), "member": lattice_membership(x, target)}


def builtin_specs() -> dict[str, GammaSpec]:
    """The named example groups, validated."""
    return {name: resolve_spec(name) for name in BUILTIN_SPECS}


def gamma_builtins(args, settings) -> dict:
    return {
        "builtins": {
            name: {"spec": spec.to_document(), "description": str(spec)}
            for name, spec in builtin_specs().items()
        }
    }


# iet


def _load_f(args) -> tuple:
    document = read_input(args.f, "-f")
    spec = get_spec(args, document)
    return spec, load_iet(document, spec)


def iet_normalize(args, settings) -> dict:
    _, f = _load_f(args)
    return f.to_document()


def iet_apply(args, settings) -> dict:
    spec, f = _load_f(args)
    t = make_element(spec, read_input(args.g, "-g"))
    return {"point": t.to_document(), "image": apply(f, t).to_document()}


def iet_compose(args, settings) -> dict:
    spec, f = _load_f(args)
    g = load_iet(read_input(args.g, "-g"), spec)
    return compose(f, g).to_document()


def iet_inverse(args, settings) -> dict:
    _, f = _load_f(args)
    return inverse(f).to_document()


def iet_equals(args, settings) -> dict:
    spec, f = _load_f(args)
    g = load_iet(read_input(args.g, "-g"), spec)
    return {"equal": equals(f, g)}


def iet_angles(args, settings) -> dict:
    _, f = _load_f(args)
    return {"angles": [a.to_document() for a in sorted(angles(f))]}


def iet_generators(args, settings) -> dict:
    spec = get_spec(args)
    return {
        "spec": spec.to_document(),
        "generators": [g.to_document(include_spec=False) for g in generating_set(spec)],
    }


def iet_permutation(args, settings) -> dict:
    spec, f = _load_f(args)
    level = aligned_level(f) if args.depth is None else args.depth
    return {"level": level, "permutation": as_permutation(spec, f, level).array_form}


def iet_sign(args, settings) -> dict:
    spec, f = _load_f(args)
    return {"sign": sign_hom(spec, f, args.depth)}


# subshift


def _context(args, document=None) -> SubshiftContext:
    return SubshiftContext.for_spec(get_spec(args, document))


def subshift_cylinder(args, settings) -> dict:
    document = read_input(args.f, "-f")
    ctx = _context(args, document)
    return cylinder_intervals(ctx, load_patch(ctx.spec, document)).to_document()


def subshift_classify(args, settings) -> dict:
    document = read_input(args.f, "-f")
    ctx = _context(args, document)
    keys = [make_element(ctx.spec, k) for k in _element_list(document, "keys")]
    results = []
    for patch, well_defined in enumerate_patches(ctx, keys, settings["patch_domain_cap"]):
        _, diagnostic = is_T_well_defined(ctx, patch)
        results.append(
            {"values": list(patch.values), "well_defined": well_defined, "diagnostic": diagnostic}
        )
    return {"keys": [k.to_document() for k in keys], "patches": results}


def subshift_realize(args, settings) -> dict:
    document = read_input(args.f, "-f")
    ctx = _context(args, document)
    return T_pi_as_iet(ctx, load_patch(ctx.spec, document)).to_document()


def subshift_value(args, settings) -> dict:
    document = read_input(args.f, "-f")
    ctx = _context(args, document)
    configuration = load_configuration(ctx.spec, document)
    key = make_element(ctx.spec, read_input(args.g, "-g"))
    return {"value": config_value(ctx, configuration, key)}


# explore


def explore_ball(args, settings) -> dict:
    if args.f:
        document = read_input(args.f, "-f")
        spec = get_spec(args, document)
        generators = _iet_list(spec, document)
    else:
        spec = get_spec(args)
        generators = generating_set(spec)
    radius = settings["radius_cap"] if args.radius is None else args.radius
    report = cayley_ball(
        generators,
        radius,
        spec=spec,
        radius_cap=settings["radius_cap"],
        max_elements=settings["max_elements"],
    )
    return report.to_document(emit_words=args.emit_words)


def explore_relation(args, settings) -> dict:
    document = read_input(args.f, "-f")
    spec = get_spec(args, document)
    generators = _iet_list(spec, document)
    word_document = read_input(args.g, "-g")
    letters = _element_list(word_document, "word")
    if not all(
        isinstance(letter, list) and len(letter) == 2 and all(isinstance(v, int) for v in letter)
        for letter in letters
    ):
        raise MalformedDocument("A word is a list of [generator index, ±1] pairs.")
    word = tuple((i, e) for i, e in letters)
    return {"holds": verify_relation(generators, word, spec)}


def explore_separate(args, settings) -> dict:
    document = read_input(args.f, "-f")
    ctx = _context(args, document)
    t = make_element(ctx.spec, document)
    t_prime = make_element(ctx.spec, read_input(args.g, "-g"))
    c = separate_points(ctx, t, t_prime, settings["search_depth"])
    return {"separator": c.to_document()}


def explore_density(args, settings) -> dict:
    document = read_input(args.f, "-f")
    spec = get_spec(args, document)
    t = make_element(spec, document)
    epsilon = parse_rational(args.epsilon)
    return orbit_density(spec, t, epsilon, settings["search_depth"]).to_document()


# invariants


def invariants_report(args, settings) -> str:
    return invariant_report(get_spec(args)).render_table()


def invariants_json(args, settings) -> dict:
    return invariant_report(get_spec(args)).to_document()


def invariants_ring(args, settings) -> dict:
    if args.f:
        generator = make_generator(read_input(args.f, "-f"))
    else:
        spec = get_spec(args)
        if not spec.irrationals:
            raise UsageError("The ring case needs an irrational generator (-f PATH).")
        generator = spec.irrationals[0]
    return {"generator": generator.to_document(), "abelianization": ring_abelianization(generator).to_document()}


# verify


def verify_paper_lemmas(args, settings) -> dict:
    spec = get_spec(args) if args.spec or args.inline else None
    results = run_suite(settings, spec)
    return {
        "passed": all(r.passed for r in results),
        "checks": [r.to_document() for r in results],
    }


COMMANDS: dict[str, dict[str, Handler]] = {
    "gamma": {
        "show": gamma_show,
        "sign": gamma_sign,
        "floor": gamma_floor,
        "member": gamma_member,
        "builtins": gamma_builtins,
    },
    "iet": {
        "normalize": iet_normalize,
        "apply": iet_apply,
        "compose": iet_compose,
        "inverse": iet_inverse,
        "equals": iet_equals,
        "angles": iet_angles,
        "generators": iet_generators,
        "permutation": iet_permutation,
        "sign": iet_sign,
    },
    "subshift": {
        "cylinder": subshift_cylinder,
        "classify": subshift_classify,
        "realize": subshift_realize,
        "value": subshift_value,
    },
    "explore": {
        "ball": explore_ball,
        "relation": explore_relation,
        "separate": explore_separate,
        "density": explore_density,
    },
    "invariants": {
        "report": invariants_report,
        "json": invariants_json,
        "ring": invariants_ring,
    },
    "verify": {
        "paper-lemmas": verify_paper_lemmas,
    },
}


def _common_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--spec", help="Builtin group name or path to a group document.")
    parser.add_argument("--inline", metavar="JSON", help="Group document given inline.")
    parser.add_argument("-f", metavar="PATH", help="First input document.")
    parser.add_argument("-g", metavar="PATH", help="Second input document.")
    parser.add_argument("-o", metavar="PATH", help="Write the output here instead of stdout.")
    parser.add_argument("--radius", type=int, help="Cayley ball radius.")
    parser.add_argument(
        "--depth",
        type=int,
        help="Search depth for explore commands, grid level for iet permutation and sign.",
    )
    parser.add_argument("--precision-bits", type=int, help="Bit budget of sign determination.")
    parser.add_argument("--max-elements", type=int, help="Largest Cayley ball accepted.")
    parser.add_argument("--epsilon", default=DEFAULT_EPSILON, help="Cell width for explore density.")
    parser.add_argument("--emit-words", action="store_true", help="Include a word per ball element.")
    parser.add_argument("--settings", metavar="PATH", help="YAML settings file.")
    parser.add_argument("--log-level", help="Log level of the iexg loggers.")
    return parser


def parse_args(argv: list[str]) -> argparse.Namespace:
    """
    Parse command-line arguments.

    Returns:
    argparse.Namespace
        Parsed arguments, with the handler of the selected command in `handler`.
    """
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog=ENTRY_POINT_NAME,
        description="Exact computations in groups of interval exchanges with angles in Γ.",
    )
    verbs = parser.add_subparsers(dest="verb", metavar="verb", required=True)
    for verb, subcommands in COMMANDS.items():
        verb_parser = verbs.add_parser(verb, help=f"{verb} commands")
        subverbs = verb_parser.add_subparsers(dest="subverb", metavar="subverb", required=True)
        for subverb, handler in subcommands.items():
            subparser = subverbs.add_parser(subverb, parents=[common], help=handler.__name__.replace("_", " "))
            subparser.set_defaults(handler=handler)
    return parser.parse_args(argv)


def write_output(output: dict | str, path: str | None) -> None:
    text = output if isinstance(output, str) else dump_document(output)
    if path:
        Path(path).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def run(argv: list[str]) -> int:
    """
    Run one command.

    Args:
        argv: List of Str
            Command-line arguments without the program name.

    Returns:
        Int
            0 on success, 1 on domain errors, 2 on usage errors.
    """
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    try:
        settings = load_settings(
            {
                "precision_bits": args.precision_bits,
                "max_elements": args.max_elements,
                "search_depth": args.depth if args.verb == "explore" else None,
                "log_level": args.log_level,
            },
            config_file=args.settings,
        )
        set_package_log_level(settings["log_level"])
        with precision(settings["precision_bits"]):
            output = args.handler(args, settings)
    except UsageError as e:
        logger.error(str(e))
        return EXIT_USAGE
    except IexgError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(dump_document(e.to_document()))
        return EXIT_DOMAIN_ERROR
    write_output(output, args.o)
    logger.info(f"'{args.verb} {args.subverb}' done.")
    if args.verb == "verify" and not output["passed"]:
        return EXIT_DOMAIN_ERROR
    return EXIT_OK


def main() -> None:
    """
    Main function to run the CLI.
    """
    sys.exit(run(sys.argv[1:]))
