import os
from enum import StrEnum

from mkdocs.config import Config
from mkdocs.config import config_options as opt
from mkdocs.config.base import ValidationError
from mkdocs.exceptions import ConfigurationError

from iexg.utils import InvalidSettings

DEFAULT_PRECISION_BITS = 4096
DEFAULT_RADIUS_CAP = 8
DEFAULT_MAX_ELEMENTS = 1_000_000
DEFAULT_PATCH_DOMAIN_CAP = 16
DEFAULT_SEARCH_DEPTH = 20
DEFAULT_SEED = 0
DEFAULT_LOG_LEVEL = "INFO"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")
MAX_INTERVAL_DENOMINATOR = 10**6
SETTINGS_ENV_VARIABLE = "IEXG_SETTINGS_FILE"


class SpecKind(StrEnum):
    """Enum for the ways a group of angles can be described."""

    FINITELY_GENERATED = "finitely_generated"
    RATIONAL_RULE = "rational_rule"

    def __str__(self) -> str:
        if self is SpecKind.FINITELY_GENERATED:
            return "finitely generated"
        return "rational (multiplier rule)"


class RuleType(StrEnum):
    """Enum for the multiplier rules of a rational group of angles."""

    CONSTANT = "constant"
    FACTORIAL = "factorial"
    LIST = "list"


class Sign(StrEnum):
    NEGATIVE = "negative"
    ZERO = "zero"
    POSITIVE = "positive"


# Named example groups. Documents follow the format accepted by gamma.make_spec.
SQRT2_GENERATOR = {"minpoly": [-1, 2, 1], "interval": ["41/100", "42/100"]}
SQRT21_GENERATOR = {"minpoly": [-21, 0, 100], "interval": ["45/100", "46/100"]}
SQRT2_THIRD_GENERATOR = {"minpoly": [-2, 0, 9], "interval": ["47/100", "48/100"]}
CUBE_ROOT_GENERATOR = {"minpoly": [-2, 0, 0, 27], "interval": ["41/100", "43/100"]}

BUILTIN_SPECS = {
    "sqrt2": {
        "kind": "finitely_generated",
        "k": 1,
        "irrationals": [SQRT2_GENERATOR],
    },
    "rank2": {
        "kind": "finitely_generated",
        "k": 1,
        "irrationals": [SQRT2_GENERATOR, SQRT21_GENERATOR],
    },
    "rank3": {
        "kind": "finitely_generated",
        "k": 1,
        "irrationals": [SQRT2_GENERATOR, CUBE_ROOT_GENERATOR, SQRT21_GENERATOR],
    },
    "k11": {
        "kind": "finitely_generated",
        "k": 11,
        "irrationals": [SQRT2_GENERATOR, SQRT21_GENERATOR],
    },
    "dyadic": {"kind": "rational_rule", "rule": {"type": "constant", "m": 2}},
    "triadic": {"kind": "rational_rule", "rule": {"type": "constant", "m": 3}},
    "factorial": {"kind": "rational_rule", "rule": {"type": "factorial"}},
    "mixed23": {
        "kind": "rational_rule",
        "rule": {"type": "list", "multipliers": [2, 3], "repeat_last": True},
    },
    # Declares sqrt(2)-1 and sqrt(2)/3 as independent although they are not.
    "dependent": {
        "kind": "finitely_generated",
        "k": 1,
        "irrationals": [SQRT2_GENERATOR, SQRT2_THIRD_GENERATOR],
    },
}


class _PositiveInt(opt.Type):
    """Integer option that must be strictly positive."""

    def __init__(self, default: int):
        super().__init__(int, default=default)

    def run_validation(self, value):
        value = super().run_validation(value)
        if isinstance(value, bool) or value <= 0:
            raise ValidationError(f"Expected a positive integer, got {value!r}.")
        return value


class SettingsScheme(Config):
    """Tunable limits and defaults."""

    precision_bits = _PositiveInt(DEFAULT_PRECISION_BITS)
    radius_cap = _PositiveInt(DEFAULT_RADIUS_CAP)
    max_elements = _PositiveInt(DEFAULT_MAX_ELEMENTS)
    patch_domain_cap = _PositiveInt(DEFAULT_PATCH_DOMAIN_CAP)
    search_depth = _PositiveInt(DEFAULT_SEARCH_DEPTH)
    seed = opt.Type(int, default=DEFAULT_SEED)
    log_level = opt.Choice(LOG_LEVELS, default=DEFAULT_LOG_LEVEL)


def load_settings(
    overrides: dict | None = None,
    config_file: str | None = None,
) -> SettingsScheme:
    """
    Build the validated settings.

    Values are read from the YAML file (the argument, or the file named by the
    IEXG_SETTINGS_FILE environment variable), then overridden by the entries of
    `overrides` that are not None.

    Args:
        overrides: Dict
            Settings given explicitly, for example from command-line flags.
        config_file: Str
            Path to a YAML settings file.

    Returns:
        SettingsScheme
            The validated settings.
    """
    config_file = config_file or os.environ.get(SETTINGS_ENV_VARIABLE)
    settings = SettingsScheme(config_file_path=config_file)
    try:
        if config_file:
            with open(config_file, "rb") as f:
                settings.load_file(f)
        settings.load_dict(
            {key: value for key, value in (overrides or {}).items() if value is not None}
        )
    except (ConfigurationError, OSError) as e:
        raise InvalidSettings(f"Cannot load settings: {e}")
    errors, _ = settings.validate()
    if errors:
        details = "; ".join(f"{key}: {error}" for key, error in errors)
        raise InvalidSettings(f"Invalid settings: {details}")
    return settings
