import json
import logging
from fractions import Fraction

import pytest

from iexg.iet import resolve_spec
from iexg.logging import set_package_log_level


@pytest.fixture(autouse=True)
def silence_logs():
    set_package_log_level(logging.CRITICAL)


@pytest.fixture(scope="session")
def sqrt2():
    """Γ = Z + λZ with λ = √2 − 1."""
    return resolve_spec("sqrt2")


@pytest.fixture(scope="session")
def rank2():
    return resolve_spec("rank2")


@pytest.fixture(scope="session")
def k11():
    return resolve_spec("k11")


@pytest.fixture(scope="session")
def dyadic():
    return resolve_spec("dyadic")


@pytest.fixture(scope="session")
def factorial():
    return resolve_spec("factorial")


@pytest.fixture
def element():
    """Factory function to build elements of a finitely generated group from a rational part and λ coefficients."""

    def _element(spec, rational=0, *lambdas):
        x = spec.rational(Fraction(rational))
        for i, a in enumerate(lambdas, start=1):
            x = x + a * spec.generator(i)
        return x

    return _element


@pytest.fixture
def write_json(tmp_path):
    """Factory function to write a JSON document and return its path."""

    def _write(name, document):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    return _write
