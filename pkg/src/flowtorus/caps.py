"""Size caps shared by the expensive operations.

Defaults can be overridden with the ``FLOWTORUS_CAP`` environment variable,
either a bare integer (the simple-cycle cap) or a comma separated list of
``name=value`` pairs, e.g. ``cycles=500,det=12``.
"""

from __future__ import annotations

import os

from .errors import ParseError

DEFAULTS = {
    "cycles": 10000,  # simple cycles enumerated per graph
    "det": 24,  # matrix size for the division-free determinant
    "dim": 8,  # ambient dimension of direction hulls
    "walks": 200000,  # primitive closed walks in the product oracle
    "period": 10**7,  # steps searched by find_mq
}


def parse_cap_spec(text: str) -> dict[str, int]:
    text = text.strip()
    if not text:
        return {}
    if text.isdigit():
        return {"cycles": int(text)}
    out = {}
    for part in text.split(","):
        name, sep, value = part.partition("=")
        name = name.strip()
        if not sep or name not in DEFAULTS or not value.strip().isdigit():
            raise ParseError(f"bad cap specification {part!r}")
        out[name] = int(value)
    return out


_overrides: dict[str, int] = {}


def set_caps(**values: int) -> None:
    for name, value in values.items():
        if name not in DEFAULTS:
            raise KeyError(name)
        _overrides[name] = int(value)


def reset_caps() -> None:
    _overrides.clear()


def cap(name: str) -> int:
    if name in _overrides:
        return _overrides[name]
    env = os.environ.get("FLOWTORUS_CAP")
    if env:
        spec = parse_cap_spec(env)
        if name in spec:
            return spec[name]
    return DEFAULTS[name]
