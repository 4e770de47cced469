"""Globally adaptive Simpson quadrature with mandatory breakpoints."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple

import numpy as np

_EPS = np.finfo(float).eps


class QuadResult(NamedTuple):
    value: float
    error: float
    n_eval: int


class QuadratureError(RuntimeError):
    """Raised when the tolerance cannot be met; carries the best estimate."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message} (estimate={estimate!r}, error bound={error!r})")
        self.estimate = estimate
        self.error = error


@dataclass(order=True)
class _Panel:
    # heapq is a min-heap, so panels are ordered by negated error
    neg_err: float
    a: float
    b: float
    fa: float
    f1: float
    fm: float
    f3: float
    fb: float
    depth: int

    @property
    def coarse(self) -> float:
        return (self.b - self.a) / 6.0 * (self.fa + 4.0 * self.fm + self.fb)

    @property
    def fine(self) -> float:
        h = self.b - self.a
        return h / 12.0 * (self.fa + 4.0 * self.f1 + 2.0 * self.fm + 4.0 * self.f3 + self.fb)

    @property
    def value(self) -> float:
        fine = self.fine
        return fine + (fine - self.coarse) / 15.0

    @property
    def abs_mass(self) -> float:
        h = self.b - self.a
        return h / 12.0 * (abs(self.fa) + 4.0 * abs(self.f1) + 2.0 * abs(self.fm)
                           + 4.0 * abs(self.f3) + abs(self.fb))


def _make_panel(a, b, fa, f1, fm, f3, fb, depth) -> _Panel:
    p = _Panel(0.0, a, b, fa, f1, fm, f3, fb, depth)
    p.neg_err = -abs(p.fine - p.coarse) / 15.0
    return p


def quad_adaptive(
    f: Callable[[float], float],
    a: float,
    b: float,
    rtol: float = 1e-9,
    atol: float = 0.0,
    split_points: Iterable[float] = (),
    max_depth: int = 50,
    max_eval: int = 200_000,
) -> QuadResult:
    """Integrate a scalar function over ``[a, b]``.

    Simpson panels are refined, largest estimated error first, until the
    summed error estimate satisfies ``err <= max(atol, rtol * |result|)``.
    Every point of ``split_points`` inside ``(a, b)`` is a panel boundary, so
    kinks and jumps placed there never sit inside a panel; the integrand is
    sampled one ulp inside every cut.

    Raises :class:`QuadratureError` when a panel would be refined beyond
    ``max_depth`` halvings or the evaluation budget is exhausted.
    """
    if not a <= b:
        raise ValueError(f"need a <= b, got a={a}, b={b}")
    if rtol <= 0 and atol <= 0:
        raise ValueError("at least one of rtol, atol must be positive")
    if a == b:
        return QuadResult(0.0, 0.0, 0)

    cuts = sorted({a, b, *(float(s) for s in split_points if a < s < b)})
    n_eval = 0
    heap: list[_Panel] = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        h = hi - lo
        # one-sided limits at the cuts: a jump sitting on a cut belongs to
        # neither neighbouring panel
        xs = (math.nextafter(lo, hi), lo + 0.25 * h, lo + 0.5 * h, lo + 0.75 * h,
              math.nextafter(hi, lo))
        fs = [float(f(x)) for x in xs]
        n_eval += 5
        heapq.heappush(heap, _make_panel(lo, hi, *fs, 0))

    while True:
        total = math.fsum(p.value for p in heap)
        err = sum(-p.neg_err for p in heap)
        mass = math.fsum(p.abs_mass for p in heap)
        # below this the Simpson differences are rounding noise
        floor = 64.0 * _EPS * mass
        if err <= max(atol, rtol * abs(total), floor):
            return QuadResult(total, err, n_eval)

        worst = heapq.heappop(heap)
        if worst.depth >= max_depth or n_eval + 4 > max_eval:
            heapq.heappush(heap, worst)
            raise QuadratureError(
                f"quadrature did not converge on [{a}, {b}]",
                math.fsum(p.value for p in heap),
                sum(-p.neg_err for p in heap),
            )
        lo, hi = worst.a, worst.b
        h = hi - lo
        mid = lo + 0.5 * h
        x_l1, x_l3 = lo + 0.125 * h, lo + 0.375 * h
        x_r1, x_r3 = lo + 0.625 * h, lo + 0.875 * h
        fl1, fl3, fr1, fr3 = (float(f(x)) for x in (x_l1, x_l3, x_r1, x_r3))
        n_eval += 4
        d = worst.depth + 1
        heapq.heappush(heap, _make_panel(lo, mid, worst.fa, fl1, worst.f1, fl3, worst.fm, d))
        heapq.heappush(heap, _make_panel(mid, hi, worst.fm, fr1, worst.f3, fr3, worst.fb, d))


def cumulative_quad(
    f: Callable[[float], float],
    points,
    rtol: float = 1e-9,
    atol: float = 0.0,
    split_points: Iterable[float] = (),
) -> np.ndarray:
    """Running integral of ``f`` from ``points[0]`` to each of ``points``.

    ``points`` must be non-decreasing.  Each gap is integrated on its own,
    which keeps every piece free of interior kinks when the points bracket
    them.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 1:
        raise ValueError("points must be one-dimensional")
    if pts.size and np.any(np.diff(pts) < 0):
        raise ValueError("points must be non-decreasing")
    splits = sorted(float(s) for s in split_points)
    pieces = np.zeros(pts.size)
    for i in range(1, pts.size):
        lo, hi = pts[i - 1], pts[i]
        if hi == lo:
            continue
        inner = [s for s in splits if lo < s < hi]
        pieces[i] = quad_adaptive(f, lo, hi, rtol=rtol, atol=atol, split_points=inner).value
    return np.cumsum(pieces)
