import json
from unittest.mock import patch

import pytest

from iexg.cli import (
    EXIT_DOMAIN_ERROR,
    EXIT_OK,
    EXIT_USAGE,
    UsageError,
    builtin_specs,
    get_spec,
    parse_args,
    read_input,
    run,
)
from iexg.config import Sign
from iexg.iet import identity, rotation
from iexg.verify import CHECKS, CheckResult

ROTATION_BY_LAMBDA = {"spec": "sqrt2", "cuts": [{"coeffs": [0, 0]}], "shifts": [{"coeffs": [0, 1]}]}
QUARTER_TURN = {"cuts": [{"level": 0, "num": 0}], "shifts": [{"level": 2, "num": 1}]}


@pytest.fixture
def run_json(capsys):
    """Factory function to run a command and parse its JSON output."""

    def _run(argv, expected_code=EXIT_OK):
        assert run(argv) == expected_code
        return json.loads(capsys.readouterr().out)

    return _run


@pytest.mark.parametrize(
    "argv, expected_output",
    [
        (["--help"], EXIT_OK),  # help
        ([], EXIT_USAGE),  # no_verb
        (["gamma"], EXIT_USAGE),  # no_subverb
        (["gamma", "plot"], EXIT_USAGE),  # unknown_subverb
        (["explore", "ball", "--radius", "two"], EXIT_USAGE),  # bad_int
    ],
    ids=[
        "help",
        "no_verb",
        "no_subverb",
        "unknown_subverb",
        "bad_int",
    ],
)
def test_run_argument_errors(argv, expected_output):
    """Test the exit codes of argument parsing."""
    assert run(argv) == expected_output


def test_parse_args():
    """Test the parse_args function selects the handler and keeps the flags."""
    args = parse_args(["iet", "permutation", "--spec", "dyadic", "-f", "f.json", "--depth", "3"])
    assert (args.verb, args.subverb) == ("iet", "permutation")
    assert args.handler.__name__ == "iet_permutation"
    assert args.spec == "dyadic"
    assert args.depth == 3
    assert args.epsilon == "1/10"
    assert not args.emit_words


def test_read_input(write_json, tmp_path):
    """Test the read_input function."""
    assert read_input(write_json("a.json", {"x": 1}), "-f") == {"x": 1}
    with pytest.raises(UsageError):
        read_input(None, "-f")
    with pytest.raises(UsageError):
        read_input(str(tmp_path / "missing.json"), "-f")
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    with pytest.raises(UsageError):
        read_input(str(bad), "-f")


def test_get_spec_order(write_json, sqrt2, dyadic, k11):
    """Test the group is taken from --inline, --spec, the document, then the default."""
    inline = json.dumps({"kind": "rational_rule", "rule": {"type": "constant", "m": 2}})
    args = parse_args(["gamma", "show", "--inline", inline, "--spec", "k11"])
    assert get_spec(args, {"spec": "sqrt2"}) == dyadic
    args = parse_args(["gamma", "show", "--spec", "k11"])
    assert get_spec(args, {"spec": "sqrt2"}) == k11
    args = parse_args(["gamma", "show", "--spec", write_json("g.json", dyadic.to_document())])
    assert get_spec(args) == dyadic
    args = parse_args(["gamma", "show"])
    assert get_spec(args, {"spec": "dyadic"}) == dyadic
    assert get_spec(args, [1, 2]) == sqrt2
    with pytest.raises(UsageError):
        get_spec(parse_args(["gamma", "show", "--inline", "{"]))


def test_gamma_show(run_json):
    """Test the gamma show command."""
    output = run_json(["gamma", "show", "--spec", "k11"])
    assert output["description"] == "(1/11)Z + λ1Z + λ2Z"
    assert output["kind"] == "finitely_generated"
    assert output["d"] == 2
    assert list(output)[-1] == "schema"


def test_gamma_sign_floor_member(run_json, write_json):
    """Test the gamma commands on one element."""
    x = write_json("x.json", {"coeffs": [-1, 2]})
    assert run_json(["gamma", "sign", "-f", x])["sign"] == "negative"
    assert run_json(["gamma", "floor", "-f", x])["floor"] == -1
    lattice = write_json("lattice.json", {"elements": [{"coeffs": [1, 0]}, {"coeffs": [0, 2]}]})
    assert run_json(["gamma", "member", "-f", x, "-g", lattice])["member"] is True
    quarter = write_json("q.json", {"level": 2, "num": 1})
    assert run_json(["gamma", "floor", "--spec", "dyadic", "-f", quarter])["floor"] == 0


def test_builtin_specs(sqrt2, dyadic):
    """Test the builtin_specs function."""
    specs = builtin_specs()
    assert specs["sqrt2"] == sqrt2
    assert specs["dyadic"] == dyadic
    assert specs["rank2"].d == 2


def test_gamma_builtins(run_json):
    """Test the gamma builtins command lists the named groups."""
    builtins = run_json(["gamma", "builtins"])["builtins"]
    assert {"sqrt2", "k11", "dyadic", "factorial"} <= set(builtins)
    assert builtins["sqrt2"]["description"] == "Z + λ1Z"
    assert builtins["dyadic"]["spec"]["rule"] == {"type": "constant", "m": 2}


def test_iet_normalize_to_file(write_json, tmp_path, sqrt2, capsys):
    """Test the iet normalize command writes its output file."""
    output_path = tmp_path / "out.json"
    f = write_json("f.json", ROTATION_BY_LAMBDA)
    assert run(["iet", "normalize", "-f", f, "-o", str(output_path)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    document = json.loads(output_path.read_text(encoding="utf-8"))
    expected = rotation(sqrt2, sqrt2.generator(1)).to_document()
    assert {key: document[key] for key in expected} == expected


def test_iet_apply_and_inverse(run_json, write_json, sqrt2):
    """Test the iet apply, inverse, equals and compose commands."""
    f = write_json("f.json", ROTATION_BY_LAMBDA)
    zero = write_json("zero.json", {"coeffs": [0, 0]})
    assert run_json(["iet", "apply", "-f", f, "-g", zero])["image"] == {"coeffs": [0, 1]}
    inverse = run_json(["iet", "inverse", "-f", f])
    expected = rotation(sqrt2, -sqrt2.generator(1)).to_document()
    assert inverse["cuts"] == expected["cuts"]
    assert inverse["shifts"] == expected["shifts"]
    g = write_json("g.json", {**inverse, "spec": "sqrt2"})
    assert run_json(["iet", "equals", "-f", f, "-g", g])["equal"] is False
    assert run_json(["iet", "equals", "-f", f, "-g", f])["equal"] is True
    composed = run_json(["iet", "compose", "-f", f, "-g", g])
    unit = identity(sqrt2).to_document()
    assert (composed["cuts"], composed["shifts"]) == (unit["cuts"], unit["shifts"])


def test_iet_permutation(run_json, write_json):
    """Test the permutation of the grid intervals, at the aligned level and one level deeper."""
    f = write_json("f.json", QUARTER_TURN)
    assert run_json(["iet", "permutation", "--spec", "dyadic", "-f", f]) == {
        "level": 2,
        "permutation": [1, 2, 3, 0],
        "schema": "iexg/1",
    }
    deeper = run_json(["iet", "permutation", "--spec", "dyadic", "-f", f, "--depth", "3"])
    assert deeper["permutation"] == [2, 3, 4, 5, 6, 7, 0, 1]


def test_explore_ball(run_json, write_json):
    """Test the explore ball command on a rotation of order 4."""
    generators = write_json("gens.json", {"spec": "dyadic", "generators": [QUARTER_TURN]})
    output = run_json(["explore", "ball", "-f", generators, "--radius", "3", "--emit-words"])
    assert output["growth"] == [1, 3, 4, 4]
    assert [entry["word"] for entry in output["words"]] == ["e", "g0", "g0^-1", "g0 g0"]


def test_explore_relation(run_json, write_json):
    """Test the explore relation command and its word validation."""
    generators = write_json("gens.json", [QUARTER_TURN])
    fourth_power = write_json("w4.json", {"word": [[0, 1]] * 4})
    square = write_json("w2.json", [[0, 1], [0, 1]])
    assert run_json(["explore", "relation", "--spec", "dyadic", "-f", generators, "-g", fourth_power])["holds"]
    assert not run_json(["explore", "relation", "--spec", "dyadic", "-f", generators, "-g", square])["holds"]
    malformed = write_json("bad.json", {"word": ["g0"]})
    error = run_json(
        ["explore", "relation", "--spec", "dyadic", "-f", generators, "-g", malformed],
        expected_code=EXIT_DOMAIN_ERROR,
    )
    assert error["error"] == "MalformedDocument"


def test_explore_density(run_json, write_json):
    """Test the explore density command."""
    zero = write_json("zero.json", {"coeffs": [0, 0]})
    output = run_json(["explore", "density", "-f", zero, "--epsilon", "1/4"])
    assert output["dense"] is True
    assert output["epsilon"] == "1/4"


def test_invariants_report(capsys):
    """Test the invariants report command prints the table."""
    assert run(["invariants", "report", "--spec", "rank2"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert "  H0 = Z^3" in lines
    assert "  IE_ab = Z ⊕ Z_2^3" in lines


def test_invariants_json_and_ring(run_json):
    """Test the invariants json and ring commands."""
    assert run_json(["invariants", "json", "--spec", "dyadic"])["supernatural"]["exponents"] == {"2": "inf"}
    ring = run_json(["invariants", "ring"])
    assert ring["generator"]["minpoly"] == [-1, 2, 1]
    assert run(["invariants", "ring", "--spec", "dyadic"]) == EXIT_USAGE


@pytest.mark.parametrize(
    "argv, expected_output",
    [
        (["gamma", "sign"], EXIT_USAGE),  # missing_input
        (["gamma", "show", "--inline", "{"], EXIT_USAGE),  # bad_inline
        (["gamma", "show", "--spec", "nowhere.json"], EXIT_USAGE),  # missing_spec_file
        (["gamma", "show", "--precision-bits", "0"], EXIT_DOMAIN_ERROR),  # bad_setting
        (["gamma", "show", "--log-level", "LOUD"], EXIT_DOMAIN_ERROR),  # bad_log_level
    ],
    ids=[
        "missing_input",
        "bad_inline",
        "missing_spec_file",
        "bad_setting",
        "bad_log_level",
    ],
)
def test_run_errors(argv, expected_output):
    """Test the exit codes of usage and domain errors."""
    assert run(argv) == expected_output


def test_run_domain_error_document(run_json, write_json):
    """Test domain errors are reported as a document."""
    x = write_json("x.json", {"coeffs": [1, 2, 3]})
    error = run_json(["gamma", "sign", "-f", x], expected_code=EXIT_DOMAIN_ERROR)
    assert error["error"] == "MalformedSpec"
    assert error["schema"] == "iexg/1"


@pytest.mark.parametrize(
    "subverb, point, word, extra, expected_error",
    [
        ("density", {"spec": "dyadic", "level": 0, "num": 0}, None, ["--epsilon", "0"], "InvalidArgument"),  # zero_epsilon
        ("density", {"spec": "dyadic", "level": 0, "num": 0}, None, ["--epsilon=-1/4"], "InvalidArgument"),  # negative_epsilon
        ("relation", None, {"word": [[0, 1], [7, 1]]}, [], "IndexOutOfRange"),  # bad_generator_index
    ],
    ids=[
        "zero_epsilon",
        "negative_epsilon",
        "bad_generator_index",
    ],
)
def test_explore_invalid_arguments(run_json, write_json, example, subverb, point, word, extra, expected_error):
    """Test out of range explore arguments give an error document and exit code 1."""
    if subverb == "relation":
        argv = ["explore", "relation", "-f", example("adjacent_dyadic.json"), "-g", write_json("w.json", word)]
    else:
        argv = ["explore", subverb, "-f", write_json("t.json", point)]
    error = run_json(argv + extra, expected_code=EXIT_DOMAIN_ERROR)
    assert error["error"] == expected_error
    assert error["schema"] == "iexg/1"


def test_gamma_sign_deep_level(run_json, write_json):
    """Test elements of a deep level of a rational group."""
    x = write_json("x.json", {"spec": "dyadic", "level": 5000, "num": 1})
    output = run_json(["gamma", "sign", "-f", x])
    assert output["element"] == {"level": 5000, "num": 1}
    assert output["sign"] == str(Sign.POSITIVE)


@pytest.mark.parametrize(
    "passed, expected_output",
    [
        (True, EXIT_OK),  # passed
        (False, EXIT_DOMAIN_ERROR),  # failed
    ],
    ids=[
        "passed",
        "failed",
    ],
)
def test_verify_paper_lemmas(run_json, passed, expected_output):
    """Test the verify command reports the suite and fails when a check fails."""
    results = [CheckResult("group_law", True, "ok"), CheckResult("soundness_tripwire", passed, "detail")]
    with patch("iexg.cli.run_suite", return_value=results) as mock_run_suite:
        output = run_json(["verify", "paper-lemmas"], expected_code=expected_output)
    mock_run_suite.assert_called_once()
    assert output["passed"] is passed
    assert [check["name"] for check in output["checks"]] == ["group_law", "soundness_tripwire"]


@pytest.mark.slow
def test_verify_paper_lemmas_full_suite(run_json):
    """Test the whole verification suite passes from the command line."""
    output = run_json(["verify", "paper-lemmas"])
    failed = [check for check in output["checks"] if not check["passed"]]
    assert failed == []
    assert output["passed"] is True
    assert [check["name"] for check in output["checks"]] == sorted(CHECKS)


@pytest.fixture
def example(request):
    """Factory function to get the path of a bundled example document."""

    def _example(name):
        return str(request.path.parent.parent / "specs" / name)

    return _example


def test_example_documents(run_json, example, k11):
    """Test the bundled example documents."""
    assert run_json(["gamma", "show", "--spec", example("k11.json")])["description"] == str(k11)
    assert run_json(["gamma", "show", "--spec", example("mixed23.json")])["d"] == 0
    assert run_json(["iet", "angles", "-f", example("rotation.json")])["angles"] == [
        {"coeffs": [-1, 1]},
        {"coeffs": [0, 1]},
    ]
    assert run_json(["explore", "relation", "-f", example("adjacent_dyadic.json"), "-g", example("braid.json")])["holds"]
    realized = run_json(["subshift", "realize", "-f", example("swap_patch.json")])
    assert len(realized["cuts"]) == 3
    patches = run_json(["subshift", "classify", "-f", example("sigma_keys.json")])["patches"]
    assert [p["values"] for p in patches if p["well_defined"]] == [[0, 0, 1], [0, 1, 0]]


def test_example_report(example, capsys):
    """Test the invariant table of the bundled d = 1 group."""
    assert run(["invariants", "report", "--spec", example("d1.json")]) == EXIT_OK
    assert "  H0 = Z^2" in capsys.readouterr().out.splitlines()
