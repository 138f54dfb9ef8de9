"""Small shared helpers: stable seeding and bit-string conversions."""

import hashlib

__all__ = ["stable_seed", "bits_from_bytes", "bytes_from_bits"]


def stable_seed(*parts) -> int:
    """Derive a 64-bit seed deterministically from arbitrary hashable parts.

    Independent of PYTHONHASHSEED; the same parts always give the same seed,
    so parallel trials can use per-trial derived seeds reproducibly.
    """
    digest = hashlib.sha256(repr(parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def bits_from_bytes(data: bytes) -> str:
    """Big-endian bit string for a byte payload."""
    return "".join(f"{b:08b}" for b in data)


def bytes_from_bits(bits: str) -> bytes:
    """Inverse of :func:`bits_from_bytes`; the bit length must be a multiple of 8."""
    if len(bits) % 8 != 0:
        raise ValueError("bit length is not a multiple of 8")
    return bytes(int(bits[i : i + 8], 2) for i in range(0, len(bits), 8))
