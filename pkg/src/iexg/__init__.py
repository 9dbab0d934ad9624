from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("iexg")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0+unknown"
