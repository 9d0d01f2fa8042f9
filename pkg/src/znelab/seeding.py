"""Stable seed derivation and config digests.

Seeds are the first 8 bytes (little endian) of BLAKE2b over the ASCII string
``"<part0>|<part1>|..."``, so they are reproducible in any language.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

import numpy as np


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def digest(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode("ascii")).hexdigest()


def derive_seed(*parts: Any) -> int:
    text = "|".join(str(p) for p in parts).encode("ascii")
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "little")


def derive_rng(*parts: Any) -> np.random.Generator:
    return np.random.default_rng(derive_seed(*parts))
