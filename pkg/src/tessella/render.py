"""SVG output for patches.

Coordinates are written at the patch's stored (expanding-frame) scale; the
scale exponent goes into a comment so a reader can undo it.
"""

import colorsys
import math
from dataclasses import dataclass

import numpy as np

PALETTE = ["#e8c170", "#5b8bb5", "#c5644f", "#7fa86a", "#9c7bb5", "#d9a0b8", "#6fb7b0", "#b8a27f"]
MIRROR_FILL = ("#f0d9a8", "#4f6d8a")


@dataclass
class RenderSpec:
    color_by: str = "type"         # type | angle_hue | handedness
    stroke_width: float = None     # default: 1% of the smaller viewport side
    label_max: int = 0             # label tiles with their index when the patch is this small
    margin: float = 0.02

    def __post_init__(self):
        if self.color_by not in ("type", "angle_hue", "handedness"):
            raise ValueError(f"unknown color_by {self.color_by!r}")


def _fmt(x):
    # fixed precision keeps output byte-stable across platforms
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _fill(spec, typ, angle, reflect):
    if spec.color_by == "type":
        return PALETTE[typ % len(PALETTE)]
    if spec.color_by == "handedness":
        return MIRROR_FILL[1] if reflect else MIRROR_FILL[0]
    h = (angle % (2 * math.pi)) / (2 * math.pi)
    r, g, b = colorsys.hsv_to_rgb(h, 0.55, 0.9)
    return "#%02x%02x%02x" % (round(r * 255), round(g * 255), round(b * 255))


def viewport(verts, margin=0.0):
    allv = np.concatenate(verts) if verts else np.zeros((1, 2))
    lo, hi = allv.min(axis=0), allv.max(axis=0)
    pad = margin * float(max(hi - lo)) if len(verts) else 1.0
    return lo - pad, hi + pad


def render_svg(patch, rule, spec=None):
    """SVG text with one ``<path>`` per tile, in canonical tile order."""
    spec = spec or RenderSpec()
    verts = patch.float_vertices(rule)
    lo, hi = viewport(verts, spec.margin)
    w, h = hi - lo
    stroke = spec.stroke_width if spec.stroke_width is not None else 0.01 * float(min(w, h))
    angles = patch.angles()
    flags = patch.reflect_flags()
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<!-- tessella patch: tiles={len(patch)} seed_type={patch.seed_type} r={patch.r} '
           f'scale_exponent={patch.scale} rule_hash={patch.rule_hash} -->',
           # y axis flipped so the picture matches the usual math orientation
           f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(lo[0])} {_fmt(-hi[1])} '
           f'{_fmt(w)} {_fmt(h)}">',
           f'<g stroke="#222" stroke-width="{_fmt(stroke)}" stroke-linejoin="round">']
    for i, (poly, rec) in enumerate(zip(verts, patch.records)):
        d = "M" + " L".join(f"{_fmt(x)} {_fmt(-y)}" for x, y in poly) + " Z"
        out.append(f'<path d="{d}" fill="{_fill(spec, rec[0], angles[i], flags[i])}"/>')
    out.append("</g>")
    if spec.label_max and len(patch) <= spec.label_max:
        size = _fmt(0.3 * float(np.sqrt(w * h / max(len(patch), 1))))
        out.append(f'<g font-size="{size}" text-anchor="middle" font-family="sans-serif">')
        for i, poly in enumerate(verts):
            cx, cy = poly.mean(axis=0)
            out.append(f'<text x="{_fmt(cx)}" y="{_fmt(-cy)}">{i}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
