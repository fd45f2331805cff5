"""Dominance, Pareto fronts and the hypervolume indicator (minimization)."""

from __future__ import annotations

import csv
import logging
from bisect import bisect_left
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_REF = 1.1
OBJECTIVE_COLUMNS = ("cost_usd", "carbon_kg", "water_l")


def dominates(a, b) -> bool:
    """True iff ``a`` is no worse than ``b`` everywhere and better somewhere."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("objective vectors differ in dimension")
    return bool(np.all(a <= b) and np.any(a < b))


def lexicographic_order(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if points.shape[0] == 0:
        return np.zeros(0, dtype=np.intp)
    return np.lexsort(points.T[::-1])


def nondominated_indices(points: np.ndarray) -> np.ndarray:
    """Indices of the non-dominated rows, in lexicographic objective order.

    Duplicated points are all kept (equal points do not dominate each other).
    """
    points = np.asarray(points, dtype=float)
    order = lexicographic_order(points)
    kept: list[int] = []
    for i in order:
        p = points[i]
        if kept:
            q = points[kept]
            if np.any(np.all(q <= p, axis=1) & np.any(q < p, axis=1)):
                continue
        kept.append(int(i))
    # a lexicographically earlier point can never be dominated by a later one
    return np.array(kept, dtype=np.intp)


def pareto_filter(points: np.ndarray) -> np.ndarray:
    """The maximal non-dominated subset of ``points``, lexicographically sorted."""
    points = np.asarray(points, dtype=float)
    return points[nondominated_indices(points)]


def nondominated_sort(points: np.ndarray) -> np.ndarray:
    """Front rank (0 = non-dominated) of every row."""
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    le = np.all(points[:, None, :] <= points[None, :, :], axis=2)
    lt = np.any(points[:, None, :] < points[None, :, :], axis=2)
    dom = le & lt  # dom[i, j]: i dominates j
    count = dom.sum(axis=0)
    rank = np.full(n, -1, dtype=int)
    current = np.flatnonzero(count == 0)
    r = 0
    while current.size:
        rank[current] = r
        count = count - dom[current].sum(axis=0)
        count[rank >= 0] = -1
        current = np.flatnonzero(count == 0)
        r += 1
    return rank


def crowding_distance(points: np.ndarray) -> np.ndarray:
    """NSGA-II crowding distance; boundary points get ``inf``."""
    points = np.asarray(points, dtype=float)
    n, m = points.shape
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for k in range(m):
        order = np.argsort(points[:, k], kind="stable")
        vals = points[order, k]
        span = vals[-1] - vals[0]
        dist[order[0]] = dist[order[-1]] = np.inf
        if span > 0:
            dist[order[1:-1]] += (vals[2:] - vals[:-2]) / span
    return dist


def phv(front: np.ndarray, ref=DEFAULT_REF) -> float:
    """Exact hypervolume dominated by ``front`` and bounded by ``ref``.

    Works for 1, 2 or 3 objectives. Points that do not strictly dominate the
    reference point enclose nothing and are dropped with a log message.
    """
    front = np.atleast_2d(np.asarray(front, dtype=float))
    if front.size == 0:
        return 0.0
    m = front.shape[1]
    ref = np.broadcast_to(np.asarray(ref, dtype=float), (m,))
    inside = np.all(front < ref, axis=1)
    if not np.all(inside):
        logger.debug("%d point(s) do not dominate the reference point; clipped",
                     int((~inside).sum()))
        front = front[inside]
    if front.shape[0] == 0:
        return 0.0
    if m == 1:
        return float(ref[0] - front[:, 0].min())
    if m == 2:
        return _hv2d(front, ref)
    if m == 3:
        return _hv3d(front, ref)
    raise ValueError(f"hypervolume supports 1-3 objectives, got {m}")


def _hv2d(front: np.ndarray, ref: np.ndarray) -> float:
    order = np.lexsort((front[:, 1], front[:, 0]))
    xs = front[order, 0]
    best_y = np.minimum.accumulate(front[order, 1])
    widths = np.diff(np.append(xs, ref[0]))
    return float(np.sum(widths * (ref[1] - best_y)))


def _hv3d(front: np.ndarray, ref: np.ndarray) -> float:
    """Sweep along the third axis, maintaining the 2-D staircase area."""
    order = np.argsort(front[:, 2], kind="stable")
    ref_x, ref_y, ref_z = (float(v) for v in ref)
    xs: list[float] = []
    ys: list[float] = []
    area = 0.0
    volume = 0.0
    z_prev = None
    for i in order:
        x, y, z = (float(v) for v in front[i])
        if z_prev is not None:
            volume += area * (z - z_prev)
        z_prev = z
        pos = bisect_left(xs, x)
        if pos > 0 and ys[pos - 1] <= y:
            continue
        if pos < len(xs) and xs[pos] == x and ys[pos] <= y:
            continue
        end = pos
        while end < len(ys) and ys[end] >= y:
            end += 1
        level = ys[pos - 1] if pos > 0 else ref_y
        cur = x
        for k in range(pos, end):
            area += (xs[k] - cur) * (level - y)
            cur = xs[k]
            level = ys[k]
        right = xs[end] if end < len(xs) else ref_x
        area += (right - cur) * (level - y)
        xs[pos:end] = [x]
        ys[pos:end] = [y]
    volume += area * (ref_z - z_prev)
    return float(volume)


def normalization_bounds(fronts: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    union = np.vstack([np.atleast_2d(np.asarray(f, dtype=float)) for f in fronts if len(f)])
    if union.size == 0:
        raise ValueError("cannot normalize an empty set of fronts")
    return union.min(axis=0), union.max(axis=0)


def apply_bounds(points: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Min-max scale with fixed bounds; constant objectives map to 0."""
    points = np.asarray(points, dtype=float)
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    return np.where(span > 0, (points - lo) / safe, 0.0)


def normalize(fronts: Sequence[np.ndarray]) -> tuple[list[np.ndarray], tuple[np.ndarray, np.ndarray]]:
    """Min-max normalize several fronts over the union of their points."""
    lo, hi = normalization_bounds(fronts)
    return [apply_bounds(f, lo, hi) if len(f) else np.asarray(f) for f in fronts], (lo, hi)


def efficient_corners(points: np.ndarray) -> tuple[int, ...]:
    """Row index of the best point per objective.

    Ties are broken by the remaining objectives in their natural order.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] == 0:
        raise ValueError("empty front has no corners")
    m = points.shape[1]
    out = []
    for k in range(m):
        keys = [points[:, k]] + [points[:, j] for j in range(m) if j != k]
        out.append(int(np.lexsort(keys[::-1])[0]))
    return tuple(out)


def best_compromise(points: np.ndarray, bounds: tuple[np.ndarray, np.ndarray] | None = None) -> int:
    """Row minimizing the sum of normalized objectives (lexicographic tie-break)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    lo, hi = bounds if bounds is not None else (points.min(axis=0), points.max(axis=0))
    score = apply_bounds(points, lo, hi).sum(axis=1)
    keys = [score] + [points[:, j] for j in range(points.shape[1])]
    return int(np.lexsort(keys[::-1])[0])


def cumulative_best(fronts: Sequence[np.ndarray],
                    bounds: tuple[np.ndarray, np.ndarray] | None = None
                    ) -> tuple[list[int], np.ndarray]:
    """Pick each epoch's best-compromise point and total them over the day.

    Every front is scored with the same ``bounds``, by default the min-max
    range over the union of all fronts. Returns the picked row per front and
    the summed raw objective vector.
    """
    if not fronts:
        raise ValueError("no fronts given")
    fronts = [np.atleast_2d(np.asarray(f, dtype=float)) for f in fronts]
    if bounds is None:
        bounds = normalization_bounds(fronts)
    picks = [best_compromise(f, bounds) for f in fronts]
    total = np.sum([f[k] for f, k in zip(fronts, picks)], axis=0)
    return picks, total


class ParetoArchive:
    """Unbounded set of mutually non-dominated evaluated points.

    Dominance is judged on the ``objective_idx`` columns; the full objective
    vector and the genome ride along.
    """

    def __init__(self, n_genes: int, objective_idx: Sequence[int] = (0, 1, 2), n_full: int = 3):
        self.objective_idx = tuple(objective_idx)
        self._sel = np.empty((64, len(self.objective_idx)))
        self._full = np.empty((64, n_full))
        self._genes = np.empty((64, n_genes))
        self.size = 0

    def add(self, full: np.ndarray, genome: np.ndarray) -> bool:
        """Insert a point unless an archived point weakly dominates it."""
        p = full[list(self.objective_idx)]
        n = self.size
        if n:
            sel = self._sel[:n]
            if np.any(np.all(sel <= p, axis=1)):
                return False
            beaten = np.all(p <= sel, axis=1)
            if np.any(beaten):
                keep = ~beaten
                m = int(keep.sum())
                self._sel[:m] = sel[keep]
                self._full[:m] = self._full[:n][keep]
                self._genes[:m] = self._genes[:n][keep]
                n = m
        if n == self._sel.shape[0]:
            self._sel = np.concatenate([self._sel, np.empty_like(self._sel)])
            self._full = np.concatenate([self._full, np.empty_like(self._full)])
            self._genes = np.concatenate([self._genes, np.empty_like(self._genes)])
        self._sel[n] = p
        self._full[n] = full
        self._genes[n] = genome
        self.size = n + 1
        return True

    @property
    def selected(self) -> np.ndarray:
        return self._sel[:self.size]

    @property
    def objectives(self) -> np.ndarray:
        return self._full[:self.size]

    @property
    def genomes(self) -> np.ndarray:
        return self._genes[:self.size]

    def front(self, gene_names: Sequence[str] = ()) -> "ParetoFront":
        order = lexicographic_order(self.selected)
        return ParetoFront(self._full[:self.size][order].copy(),
                           self._genes[:self.size][order].copy(),
                           self.objective_idx, tuple(gene_names))


@dataclass(frozen=True, eq=False)
class ParetoFront:
    """Non-dominated objective vectors with the genomes that produced them."""

    objectives: np.ndarray                 # (n, 3) raw cost, carbon, water
    genomes: np.ndarray                    # (n, G)
    objective_idx: tuple[int, ...] = (0, 1, 2)
    gene_names: tuple[str, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return self.objectives.shape[0]

    @property
    def selected(self) -> np.ndarray:
        """Objective columns the front was optimized on."""
        return self.objectives[:, list(self.objective_idx)]

    def pruned(self, cap: int) -> "ParetoFront":
        """At most ``cap`` points, dropping the most crowded ones first."""
        keep = np.arange(len(self))
        while keep.size > cap:
            dist = crowding_distance(self.selected[keep])
            keep = np.delete(keep, int(np.argmin(dist)))
        return ParetoFront(self.objectives[keep], self.genomes[keep], self.objective_idx,
                           self.gene_names)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(list(OBJECTIVE_COLUMNS) + list(self.gene_names))
            for obj, genes in zip(self.objectives, self.genomes):
                w.writerow([repr(float(v)) for v in obj] + [repr(float(v)) for v in genes])


def read_front_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Load ``(objectives, genomes, gene_names)`` from a front CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = rows[0]
    obj_cols = [i for i, name in enumerate(header) if name in OBJECTIVE_COLUMNS]
    if not obj_cols:
        raise ValueError(f"{path}: no objective columns ({', '.join(OBJECTIVE_COLUMNS)})")
    gene_cols = [i for i in range(len(header)) if i not in obj_cols]
    data = np.array([[float(v) for v in row] for row in rows[1:]], dtype=float)
    data = data.reshape(len(rows) - 1, len(header))
    return data[:, obj_cols], data[:, gene_cols], [header[i] for i in gene_cols]
