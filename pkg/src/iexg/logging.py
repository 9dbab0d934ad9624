import logging

from mkdocs.__main__ import ColorFormatter
from termcolor import colored

PACKAGE_NAME = "iexg"


def get_custom_logger(name: str) -> logging.Logger:
    """
    Return a custom logger for a package component.

    Arguments:
        name: The dotted module name (for example `iexg.gamma`). The last part
            is used as the component shown in the colored prefix.

    Returns:
        A logging.Logger instance named `iexg.<component>`.
    """
    component = name.split(".")[-1]
    logger = logging.getLogger(f"{PACKAGE_NAME}.{component}")
    logger.propagate = False
    if not logger.handlers: # pragma no branch
        logger.setLevel(logging.INFO)
        handler = logging.StreamHandler()
        handler.setFormatter(CustomColorFormatter(component))
        logger.addHandler(handler)
    return logger


def set_package_log_level(level: str | int) -> None:
    """Apply a level to every logger created by `get_custom_logger`."""
    prefix = f"{PACKAGE_NAME}."
    for name, logger in logging.root.manager.loggerDict.items():
        if name.startswith(prefix) and isinstance(logger, logging.Logger):
            logger.setLevel(level)


class CustomColorFormatter(ColorFormatter):
    """
    Extend mkdocs' ColorFormatter with a colored `[component]` tag.

    Records logged with `extra={"subject": ...}` (a check name, for example)
    are tagged `[component:subject]`.
    """

    tag_color = "light_blue"

    def __init__(self, prefix: str):
        super().__init__()
        self.prefix = prefix

    def tag(self, record: logging.LogRecord) -> str:
        subject = getattr(record, "subject", None)
        return f"[{self.prefix}:{subject}]" if subject else f"[{self.prefix}]"

    def format(self, record):
        message = logging.Formatter().format(record)
        level_prefix = f"{record.levelname:<8}-  "
        tag = self.tag(record)
        body = f"{tag} {message}"
        if self.text_wrapper.width:
            # The wrapper indents every line, the first one included, by the level prefix width
            lines = self.text_wrapper.fill(body).splitlines()
            lines[0] = lines[0][len(level_prefix):]
            body = "\n".join(lines)
        body = body.replace(tag, colored(tag, self.tag_color), 1)
        if record.levelname in self.colors:
            level_prefix = colored(level_prefix, self.colors[record.levelname])
        return f"{level_prefix}{body}"
