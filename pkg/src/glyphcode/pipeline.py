"""End-to-end message embedding and extraction.

A document's letters are partitioned left to right into blocks of n letters.
Each block gets pairwise-coprime moduli p_i <= s_i (s_i = the letter's glyph
count) chosen by depth-first search to maximize the product of the k smallest,
and carries floor(log2 M_t) message bits.  When no coprime assignment exists
the lowest-capacity letter is dropped from the block and the next letter is
pulled in; dropped and trailing letters carry the index-0 glyph and no
payload.  The block layout is a pure function of (text, codebook, n, k), so
the extractor recomputes it instead of transmitting it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .codebook import Codebook
from .crc import DecodeOutcome, ModuliSet, encode_phi, hamming_decode, ml_decode
from .errors import (
    CapacityExceededError,
    ContractViolation,
    CorruptFrameError,
    DocumentTooSmallError,
    PartialDecodeError,
    UnknownCharacterError,
)

__all__ = [
    "LetterSequence",
    "Block",
    "EncodedDocument",
    "letter_sequence",
    "choose_moduli",
    "partition_blocks",
    "frame_message",
    "unframe_message",
    "chunk_message",
    "embed",
    "extract",
    "capacity_report",
    "baseline_block_bits",
]

LENGTH_PREFIX_BITS = 32


@dataclass(frozen=True)
class LetterSequence:
    """The document's codebook-covered letters, in order."""

    letters: tuple[str, ...]
    capacities: tuple[int, ...]
    positions: tuple[int, ...]  # original document indices


@dataclass(frozen=True)
class Block:
    member_indices: tuple[int, ...]  # indices into the letter sequence
    skipped_indices: tuple[int, ...]
    moduli: ModuliSet

    @property
    def payload_bound(self) -> int:
        return self.moduli.payload_bound

    @property
    def bit_width(self) -> int:
        return self.payload_bound.bit_length() - 1  # floor(log2 M_t)


@dataclass(frozen=True)
class EncodedDocument:
    text: str
    glyph_indices: tuple[int, ...]  # one per codebook-covered letter, in order
    codebook_id: str


def letter_sequence(text: str, codebook: Codebook) -> LetterSequence:
    letters, caps, positions = [], [], []
    for pos, ch in enumerate(text):
        if ch in codebook.entries:
            letters.append(ch)
            caps.append(codebook.capacity(ch))
            positions.append(pos)
    return LetterSequence(tuple(letters), tuple(caps), tuple(positions))


def _kmin_product(values: Sequence[int], k: int) -> int:
    return math.prod(sorted(values)[:k])


def choose_moduli(capacities: Sequence[int], k: int) -> Optional[ModuliSet]:
    """Best pairwise-coprime assignment p_i <= s_i by pruned depth-first search.

    Maximizes the product of the k smallest p_i; candidates are explored in
    descending value order so the first assignment reaching the optimum is the
    lexicographically largest, which is the tie-break.  Returns None when no
    assignment with every p_i >= 2 exists.
    """
    caps = [int(c) for c in capacities]
    n = len(caps)
    if n < 2 or not (1 <= k < n):
        raise ContractViolation("need n >= 2 and 1 <= k < n")
    if any(c < 1 for c in caps):
        raise ContractViolation("capacities must be >= 1")
    best_obj = 0
    best: Optional[tuple[int, ...]] = None
    chosen: list[int] = []

    def dfs(i: int) -> None:
        nonlocal best_obj, best
        # optimistic bound: remaining positions take their full capacity
        bound = _kmin_product(chosen + caps[i:], k)
        if bound <= best_obj:
            return
        if i == n:
            best_obj = bound
            best = tuple(chosen)
            return
        for v in range(caps[i], 1, -1):
            if all(math.gcd(v, c) == 1 for c in chosen):
                chosen.append(v)
                dfs(i + 1)
                chosen.pop()

    dfs(0)
    if best is None:
        return None
    return ModuliSet(best, k)


@lru_cache(maxsize=200000)
def _choose_moduli_cached(capacities: tuple[int, ...], k: int) -> Optional[ModuliSet]:
    return choose_moduli(capacities, k)


def partition_blocks(seq: LetterSequence, n: int = 5, k: int = 3) -> list[Block]:
    """Greedy left-to-right block partition with the capacity-expansion rule."""
    if not seq.letters:
        raise ContractViolation("letter sequence is empty")
    blocks: list[Block] = []
    pool = list(range(len(seq.letters)))
    cursor = 0
    while True:
        window = pool[cursor : cursor + n]
        if len(window) < n:
            break  # trailing letters carry no payload
        skipped: list[int] = []
        while True:
            caps = tuple(seq.capacities[i] for i in window)
            moduli = _choose_moduli_cached(caps, k)
            if moduli is not None:
                blocks.append(Block(tuple(window), tuple(skipped), moduli))
                cursor += n + len(skipped)
                break
            # drop the (first) lowest-capacity letter, pull in the next one
            drop = min(range(n), key=lambda j: (caps[j], j))
            skipped.append(window[drop])
            del window[drop]
            nxt = cursor + n + len(skipped) - 1
            if nxt >= len(pool):
                window = []
                break
            window.append(pool[nxt])
        if not window and moduli is None:
            break  # pool exhausted during expansion; remainder is uncoded
    return blocks


def frame_message(bits: str, total_bits: int) -> str:
    """Length-prefix framing: 32-bit big-endian payload bit count, payload,
    zero padding out to the document's full coded width."""
    if any(b not in "01" for b in bits):
        raise ContractViolation("message must be a bit string of '0'/'1'")
    if len(bits) >= 1 << LENGTH_PREFIX_BITS:
        raise CapacityExceededError("message too long for the length prefix")
    framed = format(len(bits), f"0{LENGTH_PREFIX_BITS}b") + bits
    if len(framed) > total_bits:
        raise CapacityExceededError(
            f"framed message needs {len(framed)} bits, document holds {total_bits}"
        )
    return framed + "0" * (total_bits - len(framed))


def unframe_message(bits: str) -> str:
    if len(bits) < LENGTH_PREFIX_BITS:
        raise CorruptFrameError("fewer bits than the length prefix")
    length = int(bits[:LENGTH_PREFIX_BITS], 2)
    if length > len(bits) - LENGTH_PREFIX_BITS:
        raise CorruptFrameError(
            f"length prefix {length} exceeds available {len(bits) - LENGTH_PREFIX_BITS} bits"
        )
    return bits[LENGTH_PREFIX_BITS : LENGTH_PREFIX_BITS + length]


def chunk_message(framed: str, blocks: Sequence[Block]) -> list[int]:
    """Cut bit_width(t) bits per block, big-endian."""
    widths = [b.bit_width for b in blocks]
    if len(framed) > sum(widths):
        raise ContractViolation("framed message exceeds total block width")
    out: list[int] = []
    at = 0
    for w in widths:
        chunk = framed[at : at + w].ljust(w, "0")
        out.append(int(chunk, 2) if w else 0)
        at += w
    return out


def _check_text(text: str, codebook: Codebook) -> LetterSequence:
    seq = letter_sequence(text, codebook)
    if not seq.letters:
        raise DocumentTooSmallError("document contains no codebook letters")
    return seq


def embed(
    text: str,
    codebook: Codebook,
    bits: str,
    n: int = 5,
    k: int = 3,
    key=None,
) -> EncodedDocument:
    """Embed a bit string, returning per-letter glyph indices.

    Skipped and trailing uncoded letters carry integer 0 (the perceptually
    closest glyph).  With a permutation key, every embedded integer i is
    mapped to the glyph at the key's position i.
    """
    seq = _check_text(text, codebook)
    blocks = partition_blocks(seq, n, k)
    if not blocks:
        raise DocumentTooSmallError("document has zero complete blocks")
    framed = frame_message(bits, sum(b.bit_width for b in blocks))
    payloads = chunk_message(framed, blocks)
    indices = [0] * len(seq.letters)
    for block, m in zip(blocks, payloads):
        for i, residue in zip(block.member_indices, encode_phi(m, block.moduli)):
            indices[i] = residue
    if key is not None:
        indices = [
            key.forward(seq.letters[i], v) for i, v in enumerate(indices)
        ]
    return EncodedDocument(text, tuple(indices), codebook.font_id)


def _uniform_row(capacity: int) -> np.ndarray:
    return np.full(capacity, 1.0 / capacity)


def extract(
    encoded: EncodedDocument,
    codebook: Codebook,
    n: int = 5,
    k: int = 3,
    key=None,
    likelihoods: Optional[Sequence[np.ndarray]] = None,
) -> tuple[str, list[DecodeOutcome]]:
    """Recover the message and a per-block decode report.

    Blocks are recomputed from the text, decoded by Hamming distance with
    maximum-likelihood resolution of ties.  Without a channel trace the
    likelihood rows are uniform, which reduces the tie-break to smallest m.
    """
    seq = _check_text(encoded.text, codebook)
    if len(encoded.glyph_indices) != len(seq.letters):
        raise ContractViolation("glyph index stream does not match the letter count")
    blocks = partition_blocks(seq, n, k)
    if not blocks:
        raise DocumentTooSmallError("document has zero complete blocks")
    if likelihoods is not None and len(likelihoods) != len(seq.letters):
        raise ContractViolation("likelihood table does not match the letter count")

    indices = list(encoded.glyph_indices)
    rows: list[np.ndarray] = []
    for i, ch in enumerate(seq.letters):
        cap = seq.capacities[i]
        row = (
            np.asarray(likelihoods[i], dtype=float)
            if likelihoods is not None
            else _uniform_row(cap)
        )
        if row.shape != (cap,):
            raise ContractViolation(f"likelihood row {i} has wrong length")
        if key is not None:
            indices[i] = key.inverse(ch, indices[i])
            row = key.inverse_row(ch, row)
        rows.append(row)

    report: list[DecodeOutcome] = []
    bits = []
    for t, block in enumerate(blocks):
        vector = [indices[i] for i in block.member_indices]
        g = [rows[i] for i in block.member_indices]
        outcome = ml_decode(vector, block.moduli, g=g)
        report.append(outcome)
        if outcome.m is None:
            raise PartialDecodeError(t)
        bits.append(format(outcome.m, f"0{block.bit_width}b")[-block.bit_width :])
    return unframe_message("".join(bits)), report


def baseline_block_bits(capacities: Sequence[int]) -> int:
    """Information bits a block-coded baseline leaves after spending
    2*ceil(log2 max s) redundancy bits to correct one letter error."""
    total = sum(int(math.floor(math.log2(s))) for s in capacities)
    return total - 2 * math.ceil(math.log2(max(capacities)))


def capacity_report(
    codebook: Codebook,
    text: Optional[str] = None,
    n: int = 5,
    k: int = 3,
    frequencies: Optional[dict[str, float]] = None,
    sample_blocks: int = 100_000,
    seed: int = 0,
    target_bits: int = 128,
) -> dict:
    """Embedding capacity, either of a concrete text or Monte-Carlo sampled
    from a letter-frequency table."""
    if (text is None) == (frequencies is None):
        raise ContractViolation("provide exactly one of text or frequencies")
    if text is not None:
        seq = _check_text(text, codebook)
        blocks = partition_blocks(seq, n, k)
        total_bits = sum(b.bit_width for b in blocks)
        letters = len(seq.letters)
    else:
        chars = sorted(frequencies)
        weights = np.array([frequencies[c] for c in chars], dtype=float)
        weights = weights / weights.sum()
        rng = np.random.default_rng(seed)
        draws = rng.choice(len(chars), size=sample_blocks * (n + 4), p=weights)
        caps_by_char = {c: codebook.capacity(c) for c in chars}
        draw_caps = [caps_by_char[chars[i]] for i in draws]
        total_bits = 0
        letters = 0
        at = 0
        for _ in range(sample_blocks):
            window = draw_caps[at : at + n]
            at += n
            used = n
            while True:
                moduli = _choose_moduli_cached(tuple(window), k)
                if moduli is not None:
                    break
                if used - n > 64:
                    raise ContractViolation(
                        "codebook capacities cannot form coprime blocks"
                    )
                drop = min(range(len(window)), key=lambda j: (window[j], j))
                del window[drop]
                window.append(draw_caps[at % len(draw_caps)])
                at += 1
                used += 1
            total_bits += moduli.payload_bound.bit_length() - 1
            letters += used
    bits_per_letter = total_bits / letters if letters else 0.0
    letters_for_target = (
        math.ceil(target_bits / bits_per_letter) if bits_per_letter else math.inf
    )
    return {
        "total_bits": total_bits,
        "letters": letters,
        "bits_per_letter": bits_per_letter,
        "letters_for_128_bits": letters_for_target,
    }
