"""Glyph outline geometry: closed polylines, arc-length resampling, distances.

Outlines are closed polylines stored as an (V, 2) float array of vertices in
normalized units; the closing edge from the last vertex back to the first is
implicit.  All outlines inside one codebook share a vertex count, fixed by
resampling, so that vertex-wise distances are well defined.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, DegenerateGeometryError

__all__ = ["GlyphOutline", "resample_outline", "outline_distance", "scale_to_bbox"]


@dataclass(frozen=True, eq=False)
class GlyphOutline:
    """A closed glyph contour as an ordered vertex polyline."""

    vertices: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise ContractViolation("outline vertices must be an (V, 2) array")
        if v.shape[0] < 3:
            raise ContractViolation("outline needs at least 3 vertices")
        if not np.isfinite(v).all():
            raise ContractViolation("outline vertices must be finite")
        object.__setattr__(self, "vertices", v)

    @property
    def vertex_count(self) -> int:
        return self.vertices.shape[0]

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GlyphOutline):
            return NotImplemented
        return self.vertices.shape == other.vertices.shape and bool(
            np.array_equal(self.vertices, other.vertices)
        )


def resample_outline(outline: GlyphOutline, target_count: int) -> GlyphOutline:
    """Resample a closed outline to exactly ``target_count`` vertices.

    Vertices are placed uniformly by arc length along the closed polyline,
    starting from (and preserving) the first vertex.
    """
    if target_count < 3:
        raise ContractViolation("target_count must be >= 3")
    verts = outline.vertices
    closed = np.vstack([verts, verts[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    total = float(seg.sum())
    if total <= 0.0:
        raise DegenerateGeometryError("outline has zero total length")
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.arange(target_count) * (total / target_count)
    idx = np.searchsorted(cum, targets, side="right") - 1
    idx = np.clip(idx, 0, len(seg) - 1)
    local = (targets - cum[idx]) / np.where(seg[idx] > 0, seg[idx], 1.0)
    pts = closed[idx] + local[:, None] * (closed[idx + 1] - closed[idx])
    return GlyphOutline(pts)


def scale_to_bbox(outline: GlyphOutline, reference: GlyphOutline) -> GlyphOutline:
    """Affinely map ``outline``'s bounding box onto ``reference``'s."""
    lo_s, hi_s = outline.bounding_box()
    lo_r, hi_r = reference.bounding_box()
    span_s = hi_s - lo_s
    span_r = hi_r - lo_r
    # A degenerate axis (zero extent) keeps unit scale on that axis.
    scale = np.where(span_s > 0, span_r / np.where(span_s > 0, span_s, 1.0), 1.0)
    return GlyphOutline((outline.vertices - lo_s) * scale + lo_r)


def outline_distance(f: GlyphOutline, u: GlyphOutline) -> float:
    """Vertex-wise L2 distance between ``f`` and ``u``.

    ``u`` is first scaled so its bounding box matches ``f``'s, then the L2
    norm over corresponding vertex pairs is returned.  Zero iff the outlines
    coincide after scaling; uniform scaling of ``u`` therefore cancels.
    """
    if f.vertex_count != u.vertex_count:
        raise ContractViolation(
            f"vertex count mismatch: {f.vertex_count} vs {u.vertex_count}"
        )
    scaled = scale_to_bbox(u, f)
    return float(np.linalg.norm(f.vertices - scaled.vertices))
