"""Per-generation haplotype container: a k-d tree of (point, count) nodes.

Each generation of a simulation stores its haplotypes (points in Z^r) with
positive counts.  Nodes cycle the split dimension with depth (depth mod r);
descent compares the split coordinate with ties going right, and every
visited node is first checked for full-vector equality so duplicate points
accumulate counts instead of creating new nodes.

Nodes live in flat numpy arrays and the insert/search walks are jitted with
numba: the simulation engine bulk-inserts every generation, so per-node cost
dominates overall runtime.  Trees are built fresh each generation, never
rebalanced, and frozen once their generation is complete.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .errors import InvalidParameterError

__all__ = ["KdCountTree"]

_NO_CHILD = -1


@njit(cache=True)
def _insert_rows(pts, cnt, left, right, n, rows, deltas):
    """Insert `rows` with `deltas` into the node arrays; returns new node count.

    Caller guarantees capacity >= n + rows.shape[0].
    """
    r = pts.shape[1]
    for i in range(rows.shape[0]):
        delta = deltas[i]
        if n == 0:
            for j in range(r):
                pts[0, j] = rows[i, j]
            cnt[0] = delta
            left[0] = _NO_CHILD
            right[0] = _NO_CHILD
            n = 1
            continue
        node = 0
        axis = 0
        while True:
            match = True
            for j in range(r):
                if rows[i, j] != pts[node, j]:
                    match = False
                    break
            if match:
                cnt[node] += delta
                break
            if rows[i, axis] < pts[node, axis]:
                child = left[node]
                if child == _NO_CHILD:
                    left[node] = n
                    child = -2
            else:
                child = right[node]
                if child == _NO_CHILD:
                    right[node] = n
                    child = -2
            if child == -2:
                for j in range(r):
                    pts[n, j] = rows[i, j]
                cnt[n] = delta
                left[n] = _NO_CHILD
                right[n] = _NO_CHILD
                n += 1
                break
            node = child
            axis += 1
            if axis == r:
                axis = 0
    return n


@njit(cache=True)
def _find(pts, left, right, n, query):
    """Return the node index holding `query`, or -1 if absent."""
    if n == 0:
        return -1
    r = pts.shape[1]
    node = 0
    axis = 0
    while True:
        match = True
        for j in range(r):
            if query[j] != pts[node, j]:
                match = False
                break
        if match:
            return node
        if query[axis] < pts[node, axis]:
            node = left[node]
        else:
            node = right[node]
        if node == _NO_CHILD:
            return -1
        axis += 1
        if axis == r:
            axis = 0


@njit(cache=True)
def _node_depths(left, right, n):
    """Depth of every node (root = 0), by iterative preorder walk."""
    depths = np.zeros(n, dtype=np.int64)
    if n == 0:
        return depths
    stack = np.empty(n, dtype=np.int64)
    dstack = np.empty(n, dtype=np.int64)
    top = 0
    stack[0] = 0
    dstack[0] = 0
    while top >= 0:
        node = stack[top]
        d = dstack[top]
        top -= 1
        depths[node] = d
        lc = left[node]
        if lc != _NO_CHILD:
            top += 1
            stack[top] = lc
            dstack[top] = d + 1
        rc = right[node]
        if rc != _NO_CHILD:
            top += 1
            stack[top] = rc
            dstack[top] = d + 1
    return depths


class KdCountTree:
    """Count store over haplotype points in Z^r.

    Counts are int64 and always >= 1 for stored points; inserting never
    removes nodes, and zero-count points are simply never created.  The
    `points()`/`counts()` views expose nodes in insertion order, which is
    the deterministic traversal order the simulation engine iterates in.
    """

    __slots__ = ("r", "_pts", "_cnt", "_left", "_right", "_n", "_total", "_frozen")

    def __init__(self, r: int, capacity: int = 16):
        if r < 1:
            raise InvalidParameterError(f"locus count must be >= 1, got {r}")
        capacity = max(int(capacity), 1)
        self.r = int(r)
        self._pts = np.empty((capacity, r), dtype=np.int32)
        self._cnt = np.empty(capacity, dtype=np.int64)
        self._left = np.empty(capacity, dtype=np.int32)
        self._right = np.empty(capacity, dtype=np.int32)
        self._n = 0
        self._total = 0
        self._frozen = False

    # -- capacity -----------------------------------------------------------

    def _reserve(self, extra: int) -> None:
        need = self._n + extra
        cap = self._pts.shape[0]
        if need <= cap:
            return
        new_cap = max(need, 2 * cap)
        for name in ("_pts", "_cnt", "_left", "_right"):
            old = getattr(self, name)
            shape = (new_cap,) + old.shape[1:]
            grown = np.empty(shape, dtype=old.dtype)
            grown[: self._n] = old[: self._n]
            setattr(self, name, grown)

    def _as_point(self, h) -> np.ndarray:
        q = np.asarray(h, dtype=np.int32)
        if q.shape != (self.r,):
            raise InvalidParameterError(
                f"haplotype must have length {self.r}, got shape {q.shape}"
            )
        return q

    # -- mutation -----------------------------------------------------------

    def insert_or_add(self, h, delta: int = 1) -> None:
        """Add `delta` to the count stored for `h`, creating the node if new."""
        delta = int(delta)
        if delta < 1:
            raise InvalidParameterError(f"delta must be >= 1, got {delta}")
        if self._frozen:
            raise InvalidParameterError("tree is frozen; per-generation trees are immutable once complete")
        row = self._as_point(h).reshape(1, self.r)
        self._reserve(1)
        self._n = _insert_rows(
            self._pts, self._cnt, self._left, self._right, self._n,
            row, np.array([delta], dtype=np.int64),
        )
        self._total += delta

    def add_rows(self, rows: np.ndarray, deltas: np.ndarray) -> None:
        """Bulk insert_or_add: one jitted pass over (m, r) rows with (m,) deltas."""
        if self._frozen:
            raise InvalidParameterError("tree is frozen; per-generation trees are immutable once complete")
        rows = np.ascontiguousarray(rows, dtype=np.int32)
        if rows.ndim != 2 or rows.shape[1] != self.r:
            raise InvalidParameterError(f"rows must have shape (m, {self.r})")
        deltas = np.ascontiguousarray(deltas, dtype=np.int64)
        if deltas.shape != (rows.shape[0],):
            raise InvalidParameterError("deltas must match rows")
        if rows.shape[0] == 0:
            return
        if np.any(deltas < 1):
            raise InvalidParameterError("all deltas must be >= 1")
        self._reserve(rows.shape[0])
        self._n = _insert_rows(
            self._pts, self._cnt, self._left, self._right, self._n, rows, deltas
        )
        self._total += int(deltas.sum())

    def freeze(self) -> "KdCountTree":
        """Mark the generation complete; later inserts raise."""
        self._frozen = True
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen

    # -- queries ------------------------------------------------------------

    def lookup(self, h) -> int:
        """Stored count for `h`, 0 if absent."""
        q = self._as_point(h)
        idx = _find(self._pts, self._left, self._right, self._n, q)
        return int(self._cnt[idx]) if idx >= 0 else 0

    @property
    def distinct_count(self) -> int:
        return self._n

    @property
    def total_count(self) -> int:
        return self._total

    def totals(self) -> tuple[int, int]:
        """(number of distinct haplotypes, total count = generation size)."""
        return self._n, self._total

    def points(self) -> np.ndarray:
        """(n, r) int32 view of stored points in insertion order."""
        return self._pts[: self._n]

    def counts(self) -> np.ndarray:
        """(n,) int64 view of stored counts, aligned with `points()`."""
        return self._cnt[: self._n]

    def collect_sorted(self) -> list[tuple[tuple[int, ...], int]]:
        """All (haplotype, count) pairs in lexicographic haplotype order."""
        n = self._n
        if n == 0:
            return []
        pts = self._pts[:n]
        order = np.lexsort(tuple(pts[:, j] for j in range(self.r - 1, -1, -1)))
        cnt = self._cnt[:n]
        return [
            (tuple(int(v) for v in pts[i]), int(cnt[i]))
            for i in order
        ]

    def depths(self) -> np.ndarray:
        """Depth of each node (root = 0); diagnostic for balance checks."""
        return _node_depths(self._left, self._right, self._n)

    def __len__(self) -> int:
        return self._n

    def __repr__(self) -> str:
        return f"KdCountTree(r={self.r}, distinct={self._n}, total={self._total})"
