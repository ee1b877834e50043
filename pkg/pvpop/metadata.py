"""Output metadata: the resolved configuration and a command that reproduces the artefact."""

from __future__ import annotations

import copy
import os
import shlex

import yaml

from pvpop import __version__
from pvpop.config import RunConfig
from pvpop.csvio import atomic_write_text

RNG_DESCRIPTION = "PCG64; replication i uses SeedSequence(seed, spawn_key=(i,))"
QUADRATURE_DESCRIPTION = "Gauss-Legendre on the normal scale, u = Phi(t) for t in [-8, 8], over the narrower posterior"


def build_metadata(run_config: RunConfig, command: str, extra: dict | None = None) -> dict:
    """Metadata for one run. ``command`` is the reproduction command line."""
    meta = {
        "generated_by": f"pvpop v{__version__}",
        "command": command,
        "rng": RNG_DESCRIPTION,
        "quadrature": QUADRATURE_DESCRIPTION,
        "run": run_config.snapshot(),
    }
    if extra:
        meta.update(copy.deepcopy(extra))
    return meta


def _flag_value(value) -> str:
    if isinstance(value, (list, tuple, dict)):
        return yaml.safe_dump(value, default_flow_style=True, width=10_000).strip()
    return str(value)


def reproduce_command(
    subcommand: list[str], options: dict, overrides: dict | None = None
) -> str:
    """Build a ``pvpop ...`` command line.

    ``options`` maps long flag names (underscores allowed) to values; None
    and False are omitted, True becomes a bare flag and a list becomes one
    argument per item. ``overrides`` become ``--set KEY=VALUE`` pairs in key
    order.
    """
    parts = ["pvpop", *subcommand]
    for name, value in options.items():
        if value is None or value is False:
            continue
        flag = "--" + name.replace("_", "-")
        if value is True:
            parts.append(flag)
        elif isinstance(value, (list, tuple)):
            parts.append(flag)
            parts.extend(str(item) for item in value)
        else:
            parts.extend([flag, _flag_value(value)])
    for key in sorted(overrides or {}):
        parts.extend(["--set", f"{key}={_flag_value(overrides[key])}"])
    return shlex.join(parts)


def format_metadata_block(meta: dict) -> str:
    """Metadata as ``# ``-prefixed YAML lines under a ``# metadata`` header."""
    body = yaml.safe_dump(meta, sort_keys=True, default_flow_style=False, width=10_000)
    lines = ["# metadata"] + [f"# {line}" for line in body.splitlines()]
    return "\n".join(lines) + "\n"


def sidecar_path(path: str | os.PathLike) -> str:
    return os.fspath(path) + ".meta.yaml"


def write_sidecar(path: str | os.PathLike, meta: dict) -> str:
    """Write ``<path>.meta.yaml`` next to an output file and return its path."""
    target = sidecar_path(path)
    atomic_write_text(target, yaml.safe_dump(meta, sort_keys=True, default_flow_style=False))
    return target
