"""Deliberate defects, switched on by the QDEFORM_FAULT environment variable.

They exist so the test suite can confirm that the verification suites catch a
wrong constant.  The variable is read once, at import.
"""

from __future__ import annotations

import os

ENV = "QDEFORM_FAULT"

KNOWN = {
    "dc-power": "d(c) carries an extra factor q",
}


ACTIVE = os.environ.get(ENV) or None


def validate() -> None:
    if ACTIVE is not None and ACTIVE not in KNOWN:
        raise ValueError(f"unknown fault {ACTIVE!r} in {ENV}; known: {', '.join(KNOWN)}")


def active(name: str) -> bool:
    return ACTIVE == name
