"""Pure-Python versions of the compiled kernels (same signatures)."""

from __future__ import annotations

import math

import numpy as np


def crossing_rates(phis: np.ndarray, theta: float, kappa: float, t: float) -> np.ndarray:
    """I(t)/t for straight rays of length t in directions phis."""
    s = math.sqrt(1.0 + theta * theta)
    out = np.empty(len(phis))
    for i, phi in enumerate(phis):
        dx, dy = t * math.cos(phi), t * math.sin(phi)
        out[i] = kappa * abs(dy - theta * dx) / s / t
    return out


def rational_blocks(p: int, q: int, l1: int, count: int) -> np.ndarray:
    """First ``count`` blocks of the cyclic p/q-word started at l1."""
    n = p // q
    s, t = (n + 1) * q - p, p - n * q
    out = np.empty(count, dtype=np.int64)
    l = l1
    for j in range(count):
        out[j] = n + 1 if l <= t else n
        l = l + s if l <= t else l - t
    return out


def roof_chain(r1: float, ds: np.ndarray, eps: np.ndarray, betas: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Float roof recursion: radius, ridge radius and offset after each step.

    The ridge sits at r_G / (1 + eps e^{d + offset}); the next step starts on
    that ridge, offset arccosh(r / ridge) from the peak.
    """
    m = len(ds)
    r_out, rho_out, off_out = np.empty(m), np.empty(m), np.empty(m)
    r, rg, off = r1, r1, 0.0
    for i in range(m):
        x = eps[i] * math.exp(min(ds[i] + off, 700.0))
        rho = rg / (1.0 + x)
        b = betas[i]
        if b != 0.0:
            den = math.sqrt(max(0.0, r * r - rho * rho)) * math.sin(b) + rho * math.cos(b)
            r = r * rho / den if den > 0 else math.inf
        rg = min(rho, r)
        off = math.acosh(max(1.0, r / rho)) if math.isfinite(r) else math.inf
        r_out[i], rho_out[i], off_out[i] = r, rho, off
        if not math.isfinite(r):
            r_out[i + 1:] = math.inf
            rho_out[i + 1:] = rho
            off_out[i + 1:] = math.inf
            break
    return r_out, rho_out, off_out
