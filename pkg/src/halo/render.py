"""Static SVG figures: a cutting sequence drawn in the unit square, and a
chain of support-plane circles."""

from __future__ import annotations

import math
from typing import Sequence

from .numeric.quadratic import Real
from .words import cutting_sequence

_SIZE = 400


def _svg(body: list[str], width: float, height: float) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
            f'viewBox="0 0 {width:.3f} {height:.3f}">')
    return "\n".join([head, *body, "</svg>"]) + "\n"


def cutting_svg(theta: Real, start: Real, n: int) -> str:
    """The line of slope theta through (0, start), folded into the unit
    square, with the letters it reads along the bottom."""
    t, y0 = float(theta), float(start)
    S = _SIZE
    body = [f'<rect x="0" y="0" width="{S}" height="{S}" fill="none" stroke="black"/>']
    x, y = 0.0, y0
    letters = cutting_sequence(theta, start, n)
    for ch in letters:
        # run to the next side: the top (b) or the right (a)
        dx_top = (1.0 - y) / t
        dx_right = 1.0 - x
        step = dx_top if ch == "b" else dx_right
        x1, y1 = x + step, y + t * step
        body.append(f'<line x1="{x * S:.2f}" y1="{(1 - y) * S:.2f}" x2="{x1 * S:.2f}" '
                    f'y2="{(1 - y1) * S:.2f}" stroke="steelblue"/>')
        x, y = (x1, 0.0) if ch == "b" else (0.0, y1)
        x = x - math.floor(x) if ch == "b" else x
    body.append(f'<text x="4" y="{S + 16}" font-family="monospace" font-size="12">{letters}</text>')
    return _svg(body, S, S + 24)


def chain_svg(radii: Sequence[float]) -> str:
    """Circles of the given radii side by side, centres on one line."""
    finite = [r for r in radii if math.isfinite(r) and r > 0]
    if not finite:
        return _svg([], 10, 10)
    scale = 60.0 / max(finite)
    body, cx = [], 0.0
    for r in finite:
        R = r * scale
        cx += R + 4
        body.append(f'<circle cx="{cx:.3f}" cy="70" r="{R:.3f}" fill="none" stroke="firebrick"/>')
        cx += R
    return _svg(body, cx + 4, 140)
