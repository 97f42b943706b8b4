"""Size caps for the exponential-time oracles and searches.

Defaults: oracle 10, cycle-rank 12, directed path-width 9, exact
recognition 10.  The environment variable TWINDH_SIZE_CAPS overrides them,
e.g. ``TWINDH_SIZE_CAPS="oracle=12,cyr=14,dpw=10,exact=12"``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

_DEFAULTS = {"oracle": 10, "cyr": 12, "dpw": 9, "exact": 10}


@dataclass(frozen=True)
class SizeCaps:
    oracle: int = 10
    cyr: int = 12
    dpw: int = 9
    exact: int = 10


def resolve_caps() -> SizeCaps:
    """Current caps, with any TWINDH_SIZE_CAPS entries applied."""
    values = dict(_DEFAULTS)
    raw = os.environ.get("TWINDH_SIZE_CAPS", "")
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        key, _, val = item.partition("=")
        key = key.strip()
        if key not in values:
            raise ValueError(f"unknown size cap {key!r} in TWINDH_SIZE_CAPS")
        try:
            values[key] = int(val)
        except ValueError:
            raise ValueError(f"bad value for size cap {key!r} in TWINDH_SIZE_CAPS")
    return SizeCaps(**values)
