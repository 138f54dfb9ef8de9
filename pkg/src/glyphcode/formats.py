"""Line-oriented text formats for codebooks, keys, documents and traces.

Every file starts with a header line ``# glyphcode <version> <kind> <config>``
recording the tool version and the writer's resolved configuration.  Outline
coordinates are serialized as 6-decimal fixed point, so a write -> read ->
write cycle reproduces the file byte for byte.
"""

from __future__ import annotations

import json
from typing import Optional, Sequence, TextIO

import numpy as np

from .codebook import (
    CharacterEntry,
    Codebook,
    ManifoldPoint,
    PerturbedGlyphEntry,
)
from .crypto import PermutationKey
from .errors import FormatError
from .outline import GlyphOutline
from .perceptual import RaterReliabilities, Response, SimilarityScores
from .pipeline import EncodedDocument

__all__ = [
    "TOOL_VERSION",
    "write_codebook",
    "read_codebook",
    "write_key",
    "read_key",
    "write_document",
    "read_document",
    "write_trace",
    "read_trace",
    "write_responses",
    "read_responses",
    "write_scores",
    "read_scores",
    "write_message_bits",
    "read_message_bits",
]

TOOL_VERSION = "0.1.0"


def _header(kind: str, config: str = "") -> str:
    tail = f" {config}" if config else ""
    return f"# glyphcode {TOOL_VERSION} {kind}{tail}\n"


def _check_header(line: str, kind: str) -> None:
    parts = line.rstrip("\n").split()
    if len(parts) < 4 or parts[:2] != ["#", "glyphcode"] or parts[3] != kind:
        raise FormatError(f"not a glyphcode {kind} file: {line!r}")


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def write_codebook(cb: Codebook, fh: TextIO, config: str = "") -> None:
    fh.write(_header("codebook", config))
    fh.write(f"font_id {json.dumps(cb.font_id)}\n")
    fh.write(f"version {json.dumps(cb.version)}\n")
    fh.write(f"resample_count {cb.resample_count}\n")
    for ch in cb.characters():
        entry = cb.entries[ch]
        fh.write(f"character {json.dumps(ch)} glyphs {entry.capacity}\n")
        for tag, g in [("original", entry.original)] + [
            ("glyph", g) for g in entry.glyphs
        ]:
            coords = " ".join(_fmt(v) for v in g.outline.vertices.ravel())
            fh.write(
                f"{tag} {g.index} point {_fmt(g.point.x)} {_fmt(g.point.y)} "
                f"accuracy {_fmt(g.accuracy)} outline {coords}\n"
            )


def _parse_glyph(parts: list[str]) -> PerturbedGlyphEntry:
    try:
        index = int(parts[1])
        assert parts[2] == "point" and parts[5] == "accuracy" and parts[7] == "outline"
        point = ManifoldPoint(float(parts[3]), float(parts[4]))
        accuracy = float(parts[6])
        coords = np.array([float(t) for t in parts[8:]]).reshape(-1, 2)
    except (ValueError, AssertionError, IndexError) as exc:
        raise FormatError(f"bad glyph record: {' '.join(parts[:8])!r}") from exc
    return PerturbedGlyphEntry(index, point, GlyphOutline(coords), accuracy)


def read_codebook(fh: TextIO) -> Codebook:
    lines = fh.read().splitlines()
    if not lines:
        raise FormatError("empty codebook file")
    _check_header(lines[0], "codebook")
    try:
        font_id = json.loads(lines[1].split(None, 1)[1])
        version = json.loads(lines[2].split(None, 1)[1])
        resample_count = int(lines[3].split()[1])
    except (IndexError, ValueError, json.JSONDecodeError) as exc:
        raise FormatError("bad codebook preamble") from exc
    entries: dict[str, CharacterEntry] = {}
    i = 4
    while i < len(lines):
        parts = lines[i].split()
        if not parts:
            i += 1
            continue
        if parts[0] != "character":
            raise FormatError(f"expected character record at line {i + 1}")
        ch = json.loads(parts[1])
        count = int(parts[3])
        original = _parse_glyph(lines[i + 1].split())
        glyphs = tuple(
            _parse_glyph(lines[i + 2 + j].split()) for j in range(count)
        )
        entries[ch] = CharacterEntry(ch, original, glyphs)
        i += 2 + count
    return Codebook(font_id, entries, version, resample_count)


def write_key(key: PermutationKey, fh: TextIO, config: str = "") -> None:
    fh.write(_header("key", config))
    fh.write(f"key_id {json.dumps(key.key_id)}\n")
    for ch in sorted(key.perms):
        perm = " ".join(str(v) for v in key.perms[ch])
        fh.write(f"character {json.dumps(ch)} perm {perm}\n")


def read_key(fh: TextIO) -> PermutationKey:
    lines = fh.read().splitlines()
    if not lines:
        raise FormatError("empty key file")
    _check_header(lines[0], "key")
    try:
        key_id = json.loads(lines[1].split(None, 1)[1])
        perms = {}
        for line in lines[2:]:
            if not line.strip():
                continue
            parts = line.split()
            if parts[0] != "character" or parts[2] != "perm":
                raise FormatError(f"bad key record: {line!r}")
            perms[json.loads(parts[1])] = tuple(int(v) for v in parts[3:])
    except (IndexError, ValueError, json.JSONDecodeError) as exc:
        raise FormatError("bad key file") from exc
    return PermutationKey(key_id, perms)


def write_document(doc: EncodedDocument, fh: TextIO, config: str = "") -> None:
    fh.write(_header("document", config))
    fh.write(f"codebook_id {json.dumps(doc.codebook_id)}\n")
    fh.write(f"text {json.dumps(doc.text)}\n")
    fh.write("indices " + " ".join(str(v) for v in doc.glyph_indices) + "\n")


def read_document(fh: TextIO) -> EncodedDocument:
    lines = fh.read().splitlines()
    if not lines:
        raise FormatError("empty document file")
    _check_header(lines[0], "document")
    try:
        codebook_id = json.loads(lines[1].split(None, 1)[1])
        text = json.loads(lines[2].split(None, 1)[1])
        indices = tuple(int(v) for v in lines[3].split()[1:])
    except (IndexError, ValueError, json.JSONDecodeError) as exc:
        raise FormatError("bad document file") from exc
    return EncodedDocument(text, indices, codebook_id)


def write_trace(rows: Sequence[np.ndarray], fh: TextIO, config: str = "") -> None:
    """Channel trace: one line per coded letter with argmax and probabilities."""
    fh.write(_header("trace", config))
    for row in rows:
        row = np.asarray(row, dtype=float)
        fh.write(
            f"{int(np.argmax(row))} " + " ".join(repr(float(v)) for v in row) + "\n"
        )


def read_trace(fh: TextIO) -> list[np.ndarray]:
    lines = fh.read().splitlines()
    if not lines:
        raise FormatError("empty trace file")
    _check_header(lines[0], "trace")
    rows = []
    for line in lines[1:]:
        if not line.strip():
            continue
        try:
            rows.append(np.array([float(v) for v in line.split()[1:]]))
        except ValueError as exc:
            raise FormatError(f"bad trace row: {line!r}") from exc
    return rows


def write_responses(responses: Sequence[Response], fh: TextIO, config: str = "") -> None:
    fh.write(_header("responses", config))
    for r in responses:
        fh.write(json.dumps([str(r.glyph_i), str(r.glyph_j), str(r.rater), r.q]) + "\n")


def read_responses(fh: TextIO) -> list[Response]:
    lines = fh.read().splitlines()
    if not lines:
        raise FormatError("empty responses file")
    _check_header(lines[0], "responses")
    out = []
    for line in lines[1:]:
        if not line.strip():
            continue
        try:
            gi, gj, rater, q = json.loads(line)
            out.append(Response(gi, gj, rater, int(q)))
        except (ValueError, TypeError, json.JSONDecodeError) as exc:
            raise FormatError(f"bad response row: {line!r}") from exc
    return out


def write_scores(
    scores: SimilarityScores,
    fh: TextIO,
    reliabilities: Optional[RaterReliabilities] = None,
    config: str = "",
) -> None:
    fh.write(_header("scores", config))
    for g in sorted(scores.s, key=repr):
        fh.write(f"score {json.dumps(str(g))} {_fmt(scores.s[g])}\n")
    if reliabilities is not None:
        for u in sorted(reliabilities.r, key=repr):
            fh.write(f"reliability {json.dumps(str(u))} {_fmt(reliabilities.r[u])}\n")


def read_scores(fh: TextIO) -> tuple[SimilarityScores, RaterReliabilities]:
    lines = fh.read().splitlines()
    if not lines:
        raise FormatError("empty scores file")
    _check_header(lines[0], "scores")
    s, r = {}, {}
    for line in lines[1:]:
        if not line.strip():
            continue
        try:
            kind, name, value = line.split()
            target = s if kind == "score" else r
            if kind not in ("score", "reliability"):
                raise ValueError(kind)
            target[json.loads(name)] = float(value)
        except (ValueError, json.JSONDecodeError) as exc:
            raise FormatError(f"bad scores row: {line!r}") from exc
    return SimilarityScores(s), RaterReliabilities(r)


def write_message_bits(bits: str, fh: TextIO, config: str = "") -> None:
    fh.write(_header("message", config))
    fh.write(bits + "\n")


def read_message_bits(fh: TextIO) -> str:
    lines = fh.read().splitlines()
    if not lines:
        raise FormatError("empty message file")
    _check_header(lines[0], "message")
    bits = lines[1].strip() if len(lines) > 1 else ""
    if any(b not in "01" for b in bits):
        raise FormatError("message payload must be a bit string")
    return bits
