"""Composite Chebyshev panel grids on [0, Y_max].

A grid is a sequence of panels, each carrying p Chebyshev-Lobatto nodes.
Neighbouring panels share their endpoint node, so the global node array is
strictly increasing and starts at 0.  Differentiation and cumulative
integration act panel by panel with spectral accuracy, which lets the
critical-layer and sublayer scales be resolved by panel grading alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import chebyshev as C

__all__ = ["GridSpec", "ComplexField", "panel_grid", "wave_grid"]


@lru_cache(maxsize=8)
def _reference(p: int):
    """Lobatto nodes on [-1, 1] (ascending), differentiation and cumulative
    integration matrices."""
    x = -np.cos(np.pi * np.arange(p) / (p - 1))
    V = C.chebvander(x, p - 1)
    Vinv = np.linalg.inv(V)
    D = np.zeros((p, p))
    Q = np.zeros((p, p))
    for j in range(p):
        e = np.zeros(p)
        e[j] = 1.0
        D[:, j] = C.chebval(x, C.chebder(e))
        Q[:, j] = C.chebval(x, C.chebint(e, lbnd=-1.0))
    D = D @ Vinv
    Q = Q @ Vinv
    return x, D, Q, Vinv


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Panel grid; ``nodes`` is the flat strictly increasing node array."""

    breaks: np.ndarray
    p: int
    refinement_center: float = 0.0

    def __post_init__(self):
        x, D, Q, _ = _reference(self.p)
        b = np.asarray(self.breaks, dtype=float)
        if b[0] != 0.0 or np.any(np.diff(b) <= 0):
            raise ValueError("panel breaks must start at 0 and increase strictly")
        K = len(b) - 1
        half = 0.5 * np.diff(b)
        mid = 0.5 * (b[1:] + b[:-1])
        pts = mid[:, None] + half[:, None] * x[None, :]
        pts[:, 0] = b[:-1]
        pts[:, -1] = b[1:]
        idx = np.arange(K)[:, None] * (self.p - 1) + np.arange(self.p)[None, :]
        nodes = np.empty(K * (self.p - 1) + 1)
        nodes[idx] = pts
        object.__setattr__(self, "breaks", b)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "_idx", idx)
        object.__setattr__(self, "_half", half)
        object.__setattr__(self, "_D", D)
        object.__setattr__(self, "_Q", Q)
        counts = np.zeros(nodes.size)
        np.add.at(counts, idx.ravel(), 1.0)
        object.__setattr__(self, "_counts", counts)

    # -- basic facts ------------------------------------------------------
    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def y_max(self) -> float:
        return float(self.breaks[-1])

    @property
    def min_spacing(self) -> float:
        return float(np.min(np.diff(self.nodes)))

    def spacing_near(self, y: float, radius: float) -> float:
        """Largest node spacing within ``radius`` of ``y``."""
        n = self.nodes
        sel = (n[1:] >= y - radius) & (n[:-1] <= y + radius)
        return float(np.max(np.diff(n)[sel])) if np.any(sel) else np.inf

    # -- calculus ---------------------------------------------------------
    def deriv(self, f):
        f = np.asarray(f)
        loc = (f[self._idx] @ self._D.T) / self._half[:, None]
        out = np.zeros(f.shape, dtype=loc.dtype)
        np.add.at(out, self._idx.ravel(), loc.ravel())
        return out / self._counts

    def panel_integrals(self, f):
        f = np.asarray(f)
        return (f[self._idx] @ self._Q[-1]) * self._half

    def integrate(self, f) -> complex:
        return self.panel_integrals(f).sum()

    def cumint(self, f):
        """F(Y) = int_0^Y f."""
        f = np.asarray(f)
        loc = (f[self._idx] @ self._Q.T) * self._half[:, None]
        off = np.concatenate([[0.0], np.cumsum(loc[:, -1])[:-1]])
        out = np.zeros(f.shape, dtype=loc.dtype)
        out[self._idx] = loc + off[:, None]
        return out

    def tailint(self, f):
        """G(Y) = int_Y^{Y_max} f, accumulated from the right."""
        f = np.asarray(f)
        loc = (f[self._idx] @ self._Q.T) * self._half[:, None]
        tot = loc[:, -1]
        right = loc[:, -1:] - loc  # int over [y, panel end]
        off = np.concatenate([np.cumsum(tot[::-1])[::-1][1:], [0.0]])
        out = np.zeros(f.shape, dtype=loc.dtype)
        out[self._idx[::-1]] = (right + off[:, None])[::-1]
        return out

    def interp(self, f, y):
        """Evaluate the panel interpolant of f at points y."""
        f = np.asarray(f)
        y = np.atleast_1d(np.asarray(y, dtype=float))
        k = np.clip(np.searchsorted(self.breaks, y, side="right") - 1, 0, len(self.breaks) - 2)
        _, _, _, Vinv = _reference(self.p)
        coef = f[self._idx[k]] @ Vinv.T
        t = (y - 0.5 * (self.breaks[k] + self.breaks[k + 1])) / self._half[k]
        # Clenshaw recurrence, vectorized over points
        b1 = np.zeros(y.shape, dtype=coef.dtype)
        b2 = np.zeros_like(b1)
        for j in range(self.p - 1, 0, -1):
            b1, b2 = coef[:, j] + 2.0 * t * b1 - b2, b1
        return coef[:, 0] + t * b1 - b2


@dataclass
class ComplexField:
    """Complex samples of a function of Y on a grid."""

    values: np.ndarray
    grid: GridSpec
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.grid.nodes.shape:
            raise ValueError("field size does not match the grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")

    @property
    def nodes(self):
        return self.grid.nodes

    def at_wall(self) -> complex:
        return complex(self.values[0])


def panel_grid(
    width: Callable[[float], float],
    y_max: float,
    anchors: Sequence[float] = (),
    p: int = 16,
    center: float = 0.0,
) -> GridSpec:
    """Panels whose width follows ``width(y)``, with mandatory breaks at anchors."""
    marks = sorted({0.0, float(y_max), *[float(a) for a in anchors if 0.0 < a < y_max]})
    breaks = [0.0]
    for a, b in zip(marks[:-1], marks[1:]):
        # march from the end where panels are finest, then stretch to fit
        pts_a = [a]
        while pts_a[-1] < b:
            pts_a.append(pts_a[-1] + width(pts_a[-1]))
        pts_b = [b]
        while pts_b[-1] > a:
            pts_b.append(pts_b[-1] - width(pts_b[-1]))
        if len(pts_a) >= len(pts_b):
            s = np.array(pts_a) - a
        else:
            pos = np.array(pts_b[::-1])
            s = pos - pos[0]
        s = s / s[-1] * (b - a)
        breaks.extend((a + s[1:]).tolist())
    br = np.array(breaks)
    br[-1] = y_max
    return GridSpec(br, p, center)


def wave_grid(
    y_c: float,
    pole: float,
    sublayer: float,
    y_max: float = 40.0,
    seams: Sequence[float] = (),
    p: int = 16,
    far_width: float = 0.5,
    airy_extent: float = 40.0,
) -> GridSpec:
    """Grid graded toward the critical layer.

    ``pole`` is the distance of the complex critical point from the real axis
    (c_i/U'(Y_c)), ``sublayer`` the Airy length scale 1/kappa.
    """
    pole = max(pole, 1e-12)
    y_top = y_c + airy_extent * sublayer

    def width(y):
        d = abs(y - y_c)
        w = max(0.35 * d, 0.8 * pole)
        if y <= y_top:
            w = min(w, sublayer * min(1.0, 3.0 / np.sqrt(1.0 + d / sublayer)))
        return min(w, far_width)

    return panel_grid(width, y_max, anchors=[y_c, *seams], p=p, center=y_c)
