"""Canonical three-class label encoding used across the toolkit.

The integer codes are fixed (ordinal position matters: MAE and R2 on
labels, confusion-matrix row order, and report layouts all assume it).
"""

from __future__ import annotations

EXPERT = 0
NON_EXPERT = 1
OUT_OF_SCOPE = 2

CLASS_NAMES = ("expert", "non_expert", "out_of_scope")
N_CLASSES = 3

_ALIASES = {
    "expert": EXPERT,
    "e": EXPERT,
    "0": EXPERT,
    "non_expert": NON_EXPERT,
    "non-expert": NON_EXPERT,
    "nonexpert": NON_EXPERT,
    "n": NON_EXPERT,
    "1": NON_EXPERT,
    "out_of_scope": OUT_OF_SCOPE,
    "out-of-scope": OUT_OF_SCOPE,
    "outofscope": OUT_OF_SCOPE,
    "oos": OUT_OF_SCOPE,
    "o": OUT_OF_SCOPE,
    "2": OUT_OF_SCOPE,
}


def parse_class(value: int | str) -> int:
    """Map an integer code or a class name (several aliases) to 0/1/2."""
    if isinstance(value, bool):
        raise ValueError(f"not a class label: {value!r}")
    if isinstance(value, int):
        if value not in (EXPERT, NON_EXPERT, OUT_OF_SCOPE):
            raise ValueError(f"class code out of range: {value}")
        return value
    key = str(value).strip().lower()
    if key not in _ALIASES:
        raise ValueError(f"unknown class label: {value!r}")
    return _ALIASES[key]


def class_name(code: int) -> str:
    return CLASS_NAMES[parse_class(code)]
