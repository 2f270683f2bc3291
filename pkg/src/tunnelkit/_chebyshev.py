"""Barycentric Chebyshev interpolation for smooth complex-valued tables."""

from __future__ import annotations

import numpy as np


class ChebyshevTable:
    """Interpolant of a complex function on [a, b] at Chebyshev-Lobatto nodes.

    Uses the barycentric formula of the second kind, which is stable for any
    degree used here. Built through :func:`build_verified` so a table is only
    returned once its error against direct evaluation is certified.
    """

    def __init__(self, a: float, b: float, values: np.ndarray):
        self.a = float(a)
        self.b = float(b)
        self.values = np.asarray(values, dtype=complex)
        n = self.values.size - 1
        theta = np.pi * np.arange(n + 1) / n
        self.nodes = 0.5 * (a + b) + 0.5 * (b - a) * np.cos(theta)[::-1]
        w = np.ones(n + 1)
        w[1::2] = -1.0
        w[0] *= 0.5
        w[-1] *= 0.5
        self._bary_w = w[::-1]

    @property
    def degree(self) -> int:
        return self.values.size - 1

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        diff = x[:, None] - self.nodes[None, :]
        exact = np.isclose(diff, 0.0, atol=0.0)
        diff = np.where(exact, 1.0, diff)
        ratio = self._bary_w[None, :] / diff
        out = (ratio @ self.values) / np.sum(ratio, axis=1)
        hit_row, hit_col = np.nonzero(exact)
        out[hit_row] = self.values[hit_col]
        return out


def build_verified(f, a: float, b: float, tol: float = 1e-9,
                   degrees=(16, 32, 64)) -> ChebyshevTable | None:
    """Fit f on [a, b], escalating degree until midpoint error < tol.

    Returns None when even the largest allowed degree fails verification
    (e.g. narrow resonances inside the window); callers then evaluate f
    directly. f must accept an array of points.
    """
    for n in degrees:
        theta = np.pi * np.arange(n + 1) / n
        nodes = 0.5 * (a + b) + 0.5 * (b - a) * np.cos(theta)[::-1]
        table = ChebyshevTable(a, b, np.asarray(f(nodes), dtype=complex))
        check = 0.5 * (nodes[1:] + nodes[:-1])
        direct = np.asarray(f(check), dtype=complex)
        scale = max(float(np.max(np.abs(direct))), 1e-300)
        if float(np.max(np.abs(table(check) - direct))) < tol * scale:
            return table
    return None
