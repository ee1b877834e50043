"""pvpop — p-values and posterior probabilities of the null, side by side."""

try:
    from importlib.metadata import version as _get_version

    __version__ = _get_version("pvpop")
except Exception:
    __version__ = "0.1.0"
