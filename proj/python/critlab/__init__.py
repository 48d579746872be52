"""Criticality analysis of discrete Schroedinger-type operators.

Thin wrapper over the compiled core.  A config is either a dict or a path to
a JSON file; relative field paths resolve next to the file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ._core import CritlabError, __version__, commands
from ._core import run as _run

__all__ = ["CritlabError", "Result", "run", "commands", "__version__"]


@dataclass
class Result:
    report: dict[str, Any]
    definitive: bool
    coords: np.ndarray  # (n, d) node coordinates of the outer domain
    index: np.ndarray  # grid index of each node
    fields: dict[str, np.ndarray] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    table: str = ""

    @property
    def result(self) -> dict[str, Any]:
        return self.report["result"]


def _load(config: dict | str | Path) -> tuple[str, str]:
    if isinstance(config, dict):
        return json.dumps(config), ""
    path = Path(config)
    return path.read_text(), str(path.parent)


def run(command: str, config: dict | str | Path, *, tol_overrides: dict | None = None,
        dump_fields: bool = False, levels: int | None = None) -> Result:
    text, base = _load(config)
    if levels is not None:
        cfg = json.loads(text)
        cfg.setdefault("exhaustion", {})["K"] = int(levels)
        text = json.dumps(cfg)
    out = _run(command, text, base, json.dumps(tol_overrides) if tol_overrides else "",
               dump_fields)
    return Result(report=json.loads(out["report"]), definitive=out["definitive"],
                  coords=out["coords"], index=out["index"], fields=dict(out["fields"]),
                  timings=json.loads(out["timings"]), table=out["table"])


def _command(name: str):
    def f(config, **kw) -> Result:
        return run(name, config, **kw)

    f.__name__ = name
    f.__doc__ = f"Run `{name}` on a config dict or JSON path."
    return f


classify = _command("classify")
groundstate = _command("groundstate")
nullseq = _command("nullseq")
gap = _command("gap")
poincare = _command("poincare")
refine = _command("refine")
__all__ += [c for c in ("classify", "groundstate", "nullseq", "gap", "poincare", "refine")]
