"""Permutation-key encryption and segment-level document signatures.

The symmetric secret is, per character, a permutation of its glyph list:
embedding stores integer i as the glyph at the key's position i, so extraction
without the key sees uniformly scrambled integers.  Signatures split the
document into segments of at least ``segment_min_letters`` coded letters and
embed each segment's content hash into that segment, either under a private
permuted codebook (scheme 1) or as an asymmetric signature over the hash
embedded with the public codebook (scheme 2).  Verification recomputes the
hashes and localizes tampering to the segment level.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import sympy

from .codebook import Codebook
from .crc import encode_phi, ml_decode
from .errors import ContractViolation, KeyMismatchError, SigningError
from .pipeline import Block, EncodedDocument, letter_sequence, partition_blocks
from .util import stable_seed

__all__ = [
    "PermutationKey",
    "SignatureConfig",
    "Segment",
    "SegmentResult",
    "VerificationReport",
    "ToyRsaProvider",
    "keygen",
    "identity_key",
    "key_space_bits",
    "segment_text",
    "sign_scheme1",
    "sign_scheme2",
    "verify",
    "content_hash",
]


@dataclass(frozen=True)
class PermutationKey:
    """Per-character bijection over glyph indices."""

    key_id: str
    perms: dict[str, tuple[int, ...]]

    def __post_init__(self):
        for ch, perm in self.perms.items():
            if sorted(perm) != list(range(len(perm))):
                raise ContractViolation(f"mapping for {ch!r} is not a permutation")

    def _perm(self, character: str) -> tuple[int, ...]:
        try:
            return self.perms[character]
        except KeyError:
            raise KeyMismatchError(f"key has no entry for character {character!r}")

    def forward(self, character: str, value: int) -> int:
        perm = self._perm(character)
        if not (0 <= value < len(perm)):
            raise KeyMismatchError(
                f"integer {value} out of range for character {character!r}"
            )
        return perm[value]

    def inverse(self, character: str, value: int) -> int:
        perm = self._perm(character)
        if not (0 <= value < len(perm)):
            raise KeyMismatchError(
                f"glyph index {value} out of range for character {character!r}"
            )
        return perm.index(value)

    def inverse_row(self, character: str, row: np.ndarray) -> np.ndarray:
        """Reorder a per-glyph likelihood row into embedded-integer order."""
        perm = self._perm(character)
        row = np.asarray(row, dtype=float)
        if row.shape != (len(perm),):
            raise KeyMismatchError(
                f"likelihood row length {row.shape} does not match key for {character!r}"
            )
        return row[np.asarray(perm)]

    def inverted(self) -> "PermutationKey":
        perms = {}
        for ch, perm in self.perms.items():
            inv = [0] * len(perm)
            for i, p in enumerate(perm):
                inv[p] = i
            perms[ch] = tuple(inv)
        return PermutationKey(self.key_id + "-inv", perms)

    def compose(self, other: "PermutationKey") -> "PermutationKey":
        """self after other: value -> self.forward(other.forward(value))."""
        if set(self.perms) != set(other.perms):
            raise KeyMismatchError("keys cover different character sets")
        perms = {
            ch: tuple(self.perms[ch][v] for v in other.perms[ch]) for ch in self.perms
        }
        return PermutationKey(f"{self.key_id}*{other.key_id}", perms)

    def is_identity(self) -> bool:
        return all(perm == tuple(range(len(perm))) for perm in self.perms.values())


def keygen(codebook: Codebook, seed: int = 0, key_id: Optional[str] = None) -> PermutationKey:
    """Seeded Fisher-Yates permutation per character; reproducible."""
    perms: dict[str, tuple[int, ...]] = {}
    for ch in codebook.characters():
        n = codebook.capacity(ch)
        rng = np.random.default_rng(stable_seed(seed, "perm", ch))
        perm = list(range(n))
        for i in range(n - 1, 0, -1):
            j = int(rng.integers(0, i + 1))
            perm[i], perm[j] = perm[j], perm[i]
        perms[ch] = tuple(perm)
    return PermutationKey(key_id or f"key-{seed}", perms)


def identity_key(codebook: Codebook) -> PermutationKey:
    return PermutationKey(
        "identity",
        {ch: tuple(range(codebook.capacity(ch))) for ch in codebook.characters()},
    )


def key_space_bits(codebook: Codebook) -> float:
    """log2 of the number of distinct keys: sum over characters of log2(N_c!)."""
    return sum(
        math.lgamma(codebook.capacity(ch) + 1) / math.log(2)
        for ch in codebook.characters()
    )


def content_hash(text: str, hash_id: str = "md5") -> bytes:
    """Digest of a segment's character content."""
    return hashlib.new(hash_id, text.encode("utf-8")).digest()


@dataclass(frozen=True)
class SignatureConfig:
    hash_id: str = "md5"
    scheme: int = 1
    segment_min_letters: int = 80
    n: int = 5
    k: int = 3

    def __post_init__(self):
        if self.scheme not in (1, 2):
            raise ContractViolation("scheme must be 1 or 2")
        if self.segment_min_letters < 1:
            raise ContractViolation("segment_min_letters must be positive")
        hashlib.new(self.hash_id)  # fail early on unknown algorithms

    @property
    def digest_bits(self) -> int:
        return hashlib.new(self.hash_id).digest_size * 8


@dataclass(frozen=True)
class Segment:
    index: int
    blocks: tuple[Block, ...]
    seq_start: int  # letter-sequence index range covered, [start, end)
    seq_end: int

    @property
    def bit_width(self) -> int:
        return sum(b.bit_width for b in self.blocks)


@dataclass(frozen=True)
class SegmentResult:
    seq_start: int
    seq_end: int
    status: str  # match | mismatch
    note: str = ""


@dataclass(frozen=True)
class VerificationReport:
    per_segment: tuple[SegmentResult, ...]

    @property
    def overall(self) -> str:
        ok = all(s.status == "match" for s in self.per_segment)
        return "match" if ok else "mismatch"

    def as_text(self) -> str:
        lines = [f"overall: {self.overall}"]
        for s in self.per_segment:
            note = f" ({s.note})" if s.note else ""
            lines.append(f"letters [{s.seq_start}, {s.seq_end}): {s.status}{note}")
        return "\n".join(lines)


def segment_text(
    text: str,
    codebook: Codebook,
    config: SignatureConfig,
    payload_bits: Optional[int] = None,
) -> list[Segment]:
    """Greedy segmentation over the block partition.

    Blocks accumulate into the current segment until it spans at least
    ``segment_min_letters`` coded letters and can hold the payload; leftover
    trailing blocks (and trailing uncoded letters) join the last segment so
    every letter is covered by exactly one segment.
    """
    seq = letter_sequence(text, codebook)
    blocks = partition_blocks(seq, config.n, config.k)
    if not blocks:
        raise SigningError("document has zero complete blocks")
    need = config.digest_bits if payload_bits is None else payload_bits
    segments: list[Segment] = []
    cur: list[Block] = []
    start = 0
    for block in blocks:
        cur.append(block)
        end = max(max(b.member_indices + b.skipped_indices) for b in cur) + 1
        letters = end - start
        bits = sum(b.bit_width for b in cur)
        if letters >= config.segment_min_letters and bits >= need:
            segments.append(Segment(len(segments), tuple(cur), start, end))
            cur = []
            start = end
    if cur:
        if not segments:
            raise SigningError(
                f"segment 0 holds {sum(b.bit_width for b in cur)} bits, "
                f"payload needs {need}"
            )
        last = segments.pop()
        segments.append(
            Segment(last.index, last.blocks + tuple(cur), last.seq_start, len(seq.letters))
        )
    else:
        last = segments.pop()
        segments.append(Segment(last.index, last.blocks, last.seq_start, len(seq.letters)))
    return segments


def _digest_bits(digest: bytes) -> str:
    return "".join(format(b, "08b") for b in digest)


def _embed_segments(
    text: str,
    codebook: Codebook,
    payloads: Sequence[str],
    segments: Sequence[Segment],
    key: Optional[PermutationKey],
) -> EncodedDocument:
    seq = letter_sequence(text, codebook)
    indices = [0] * len(seq.letters)
    for payload, segment in zip(payloads, segments):
        bits = payload.ljust(segment.bit_width, "0")
        at = 0
        for block in segment.blocks:
            w = block.bit_width
            m = int(bits[at : at + w], 2) if w else 0
            at += w
            for i, residue in zip(block.member_indices, encode_phi(m, block.moduli)):
                indices[i] = residue
    if key is not None:
        indices = [key.forward(seq.letters[i], v) for i, v in enumerate(indices)]
    return EncodedDocument(text, tuple(indices), codebook.font_id)


def _segment_letters(text: str, codebook: Codebook, segment: Segment) -> str:
    seq = letter_sequence(text, codebook)
    return "".join(seq.letters[segment.seq_start : segment.seq_end])


def _extract_segment_bits(
    encoded: EncodedDocument,
    codebook: Codebook,
    segment: Segment,
    key: Optional[PermutationKey],
) -> Optional[str]:
    """Decode one segment's blocks; None when any block stays ambiguous."""
    seq = letter_sequence(encoded.text, codebook)
    bits = []
    for block in segment.blocks:
        vector = []
        rows = []
        for i in block.member_indices:
            v = encoded.glyph_indices[i]
            cap = seq.capacities[i]
            row = np.full(cap, 1.0 / cap)
            if key is not None:
                try:
                    v = key.inverse(seq.letters[i], v)
                except KeyMismatchError:
                    return None
                row = key.inverse_row(seq.letters[i], row)
            vector.append(v)
            rows.append(row)
        outcome = ml_decode(vector, block.moduli, g=rows)
        if outcome.m is None:
            return None
        bits.append(format(outcome.m, f"0{block.bit_width}b")[-block.bit_width :])
    return "".join(bits)


def sign_scheme1(
    text: str,
    codebook: Codebook,
    key: PermutationKey,
    config: SignatureConfig = SignatureConfig(),
) -> EncodedDocument:
    """Embed each segment's content hash into that segment under a private key."""
    segments = segment_text(text, codebook, config)
    payloads = [
        _digest_bits(content_hash(_segment_letters(text, codebook, s), config.hash_id))
        for s in segments
    ]
    for s in segments:
        if s.bit_width < config.digest_bits:
            raise SigningError(
                f"segment {s.index} holds {s.bit_width} bits, "
                f"hash needs {config.digest_bits}"
            )
    return _embed_segments(text, codebook, payloads, segments, key)


def sign_scheme2(
    text: str,
    codebook: Codebook,
    signer: "ToyRsaProvider",
    config: SignatureConfig = SignatureConfig(scheme=2),
) -> EncodedDocument:
    """Embed an asymmetric signature over each segment's hash, public codebook."""
    segments = segment_text(text, codebook, config, payload_bits=signer.signature_bits)
    payloads = []
    for s in segments:
        if s.bit_width < signer.signature_bits:
            raise SigningError(
                f"segment {s.index} holds {s.bit_width} bits, "
                f"signature needs {signer.signature_bits}"
            )
        digest = content_hash(_segment_letters(text, codebook, s), config.hash_id)
        payloads.append(signer.sign(digest))
    return _embed_segments(text, codebook, payloads, segments, key=None)


def verify(
    encoded: EncodedDocument,
    codebook: Codebook,
    config: SignatureConfig,
    key: Optional[PermutationKey] = None,
    verifier: Optional["ToyRsaProvider"] = None,
) -> VerificationReport:
    """Recompute per-segment hashes and compare against the embedded values."""
    if config.scheme == 1 and key is None:
        raise ContractViolation("scheme 1 verification needs the permutation key")
    if config.scheme == 2 and verifier is None:
        raise ContractViolation("scheme 2 verification needs the public key")
    payload_bits = (
        config.digest_bits if config.scheme == 1 else verifier.signature_bits
    )
    segments = segment_text(encoded.text, codebook, config, payload_bits=payload_bits)
    results: list[SegmentResult] = []
    for s in segments:
        digest = content_hash(
            _segment_letters(encoded.text, codebook, s), config.hash_id
        )
        bits = _extract_segment_bits(
            encoded, codebook, s, key if config.scheme == 1 else None
        )
        if bits is None:
            results.append(
                SegmentResult(s.seq_start, s.seq_end, "mismatch", "extraction-failed")
            )
            continue
        embedded = bits[:payload_bits]
        if config.scheme == 1:
            ok = embedded == _digest_bits(digest)[: len(embedded)]
        else:
            ok = verifier.check(digest, embedded)
        results.append(
            SegmentResult(s.seq_start, s.seq_end, "match" if ok else "mismatch")
        )
    return VerificationReport(tuple(results))


class ToyRsaProvider:
    """Deterministic textbook-RSA signature provider for tests and demos.

    Signs the digest reduced modulo a small modulus; nothing here is meant to
    be cryptographically strong, it only exercises the asymmetric-signature
    plumbing.  Real deployments plug in an actual cryptosystem behind the same
    sign/check surface.
    """

    def __init__(self, n: int, e: int, d: Optional[int] = None):
        self.n = n
        self.e = e
        self.d = d  # private exponent; None for a verify-only instance

    @classmethod
    def generate(cls, seed: int = 0, prime_bits: int = 32) -> "ToyRsaProvider":
        rng = np.random.default_rng(stable_seed(seed, "rsa"))
        p = sympy.nextprime(int(rng.integers(1 << (prime_bits - 1), 1 << prime_bits)))
        q = sympy.nextprime(int(rng.integers(1 << (prime_bits - 1), 1 << prime_bits)))
        while q == p:
            q = sympy.nextprime(q + 2)
        n = p * q
        e = 65537
        d = pow(e, -1, (p - 1) * (q - 1))
        return cls(n, e, d)

    def public(self) -> "ToyRsaProvider":
        return ToyRsaProvider(self.n, self.e)

    @property
    def signature_bits(self) -> int:
        return self.n.bit_length()

    def sign(self, digest: bytes) -> str:
        """Signature over the digest, as a bit string of ``signature_bits``."""
        if self.d is None:
            raise SigningError("verify-only provider has no private exponent")
        m = int.from_bytes(digest, "big") % self.n
        s = pow(m, self.d, self.n)
        return format(s, f"0{self.signature_bits}b")

    def check(self, digest: bytes, signature_bits: str) -> bool:
        if len(signature_bits) != self.signature_bits:
            return False
        s = int(signature_bits, 2)
        if s >= self.n:
            return False
        m = int.from_bytes(digest, "big") % self.n
        return pow(s, self.e, self.n) == m
