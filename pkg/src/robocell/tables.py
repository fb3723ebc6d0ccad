"""Reference benchmark values for the uniform cell family.

The benchmark sweeps m in {4, 5, 6} and p in {0, 25, ..., 250} with
epsilon = 1 and delta = 2.  For every cell the reference records the
optimal cycle time, the big-M constant, and the LP relaxation value of
each formulation.  Reported solve times are hardware-bound and are
never part of any comparison, so they are not embedded here.

The raw block below is the single source of the values; its checksum is
pinned so accidental edits fail loudly rather than silently shifting
what the harness checks against.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional

__all__ = [
    "BENCH_DELTA",
    "BENCH_EPSILON",
    "BENCH_M_VALUES",
    "BENCH_P_VALUES",
    "ExpectedCell",
    "expected_cell",
    "expected_table",
    "table_checksum",
]

BENCH_EPSILON = 1
BENCH_DELTA = 2
BENCH_M_VALUES = (4, 5, 6)
BENCH_P_VALUES = tuple(range(0, 251, 25))

# columns: m, p, c_opt, big_m, mtz_lpr, vajda_lpr, flow_lpr
_RAW = """\
4,0,96,108,1.683,1.683,96
4,25,96,108,10.598,4.373,96
4,50,96,116,23.2,11.6,96
4,75,99,141,35.754,18.874,96
4,100,124,166,48.291,26.509,96
4,125,149,191,60.818,34.348,96
4,150,174,216,73.34,42.312,96
4,175,199,241,85.856,50.359,96
4,200,224,266,98.37,58.465,96
4,225,249,291,110.881,66.612,96
4,250,274,316,123.39,74.791,96
5,0,140,156,1.445,1.445,140
5,25,140,156,10.568,3.53,140
5,50,140,156,23.148,9.667,140
5,75,140,167,35.714,17.243,140
5,100,140,192,48.251,24.494,140
5,125,153,217,60.78,32.03,140
5,150,178,242,73.307,39.752,140
5,175,203,267,85.821,46.438,140
5,200,228,292,98.337,55.542,140
5,225,253,317,110.85,63.55,140
5,250,278,342,133.61,71.61,140
6,0,192,212,1.289,1.289,192
6,25,192,212,10.55,2.97,192
6,50,192,212,23.109,7.909,192
6,75,192,212,35.668,14.812,192
6,100,192,222,48.217,22.561,192
6,125,192,247,60.746,29.745,192
6,150,192,272,73.269,37.173,192
6,175,207,297,85.789,44.775,192
6,200,232,322,98.305,52.505,192
6,225,257,347,110.819,60.332,192
6,250,282,372,123.332,68.235,192
"""

_SHA256 = "04fc6b878510a3b6ecb692f1fa40d6acbb37fc0d4c8d911568dd3c5b57dfbb9a"

# the m=5 p=250 MTZ value breaks the otherwise ~12.5-per-step
# progression of its column (123.3x expected), so checks keep it but
# mark it for the reader
_NOTES = {(5, 250): "suspect transcription: mtz_lpr 133.61 breaks the "
                    "~12.5-per-step column progression (123.3x expected)"}


@dataclass(frozen=True)
class ExpectedCell:
    """One reference row: the checked values for a (m, p) cell."""

    m: int
    p: int
    c_opt: int
    big_m: int
    mtz_lpr: float
    vajda_lpr: float
    flow_lpr: float
    note: str = ""


def table_checksum() -> str:
    return hashlib.sha256(_RAW.encode("utf-8")).hexdigest()


def _parse() -> dict[tuple[int, int], ExpectedCell]:
    if table_checksum() != _SHA256:
        raise RuntimeError(
            "reference table corrupted: checksum "
            f"{table_checksum()} != pinned {_SHA256}")
    cells = {}
    for line in _RAW.splitlines():
        m_s, p_s, copt, bigm, mtz, vajda, flow = line.split(",")
        m, p = int(m_s), int(p_s)
        cells[(m, p)] = ExpectedCell(
            m=m, p=p, c_opt=int(copt), big_m=int(bigm),
            mtz_lpr=float(mtz), vajda_lpr=float(vajda),
            flow_lpr=float(flow), note=_NOTES.get((m, p), ""))
    return cells


_CELLS = _parse()


def expected_table() -> dict[tuple[int, int], ExpectedCell]:
    """All reference cells keyed by (m, p)."""
    return dict(_CELLS)


def expected_cell(m: int, p: int) -> Optional[ExpectedCell]:
    """The reference cell for (m, p), or None when outside the sweep."""
    return _CELLS.get((m, p))
