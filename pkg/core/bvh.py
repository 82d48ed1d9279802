"""
Bounding volume hierarchy over link edges
Conservative pruning of edge quadruples that no line can meet
"""
import sys
from dataclasses import dataclass
from itertools import combinations, product
from pathlib import Path
from typing import Iterator, List, Tuple

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))


@dataclass
class BVHNode:
    """Axis-aligned box over the edges order[start:end]"""
    lo: np.ndarray
    hi: np.ndarray
    start: int
    end: int
    left: int = -1
    right: int = -1

    @property
    def is_leaf(self) -> bool:
        return self.left < 0

    @property
    def size(self) -> int:
        return self.end - self.start


# Corner pairs of four rectangles, reused by every stabbing test
_PAIRS = np.array(list(combinations(range(16), 2)), dtype=np.int64)
_RECT_CORNERS = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=np.int64)


def rectangles_admit_line(lo: np.ndarray, hi: np.ndarray, tol: float) -> bool:
    """
    Whether some 2D line meets all four axis-aligned rectangles.

    If any line transversal exists, one passes through two rectangle
    corners, so testing the lines through corner pairs is exact up to tol.

    Args:
        lo, hi: (4, 2) rectangle bounds
        tol: absolute slack on the side test
    """
    corners = np.empty((4, 4, 2))
    for k, (ix, iy) in enumerate(_RECT_CORNERS):
        corners[:, k, 0] = np.where(ix, hi[:, 0], lo[:, 0])
        corners[:, k, 1] = np.where(iy, hi[:, 1], lo[:, 1])
    flat = corners.reshape(16, 2)
    p, q = flat[_PAIRS[:, 0]], flat[_PAIRS[:, 1]]
    d = q - p
    normals = np.stack([-d[:, 1], d[:, 0]], axis=1)
    lengths = np.linalg.norm(normals, axis=1)
    valid = lengths > 0.0
    if not valid.any():
        return True  # every rectangle is the same point
    normals, p, lengths = normals[valid], p[valid], lengths[valid]
    offsets = np.einsum("ij,ij->i", normals, p)
    values = flat @ normals.T - offsets[None, :]           # (16, L)
    values = values.reshape(4, 4, -1)
    slack = tol * lengths[None, :]
    stabbed = (values.min(axis=1) <= slack) & (values.max(axis=1) >= -slack)  # (4, L)
    return bool(stabbed.all(axis=0).any())


def boxes_admit_transversal(lo: np.ndarray, hi: np.ndarray, tol: float) -> bool:
    """
    Necessary condition for a 3D line meeting four boxes: each of the three
    coordinate projections must admit a 2D line through the projected
    rectangles (a line parallel to the dropped axis projects to a point,
    which is covered by the same test).
    """
    for drop in range(3):
        keep = [i for i in range(3) if i != drop]
        if not rectangles_admit_line(lo[:, keep], hi[:, keep], tol):
            return False
    return True


class EdgeBVH:
    """
    Median-split hierarchy over edge boxes.

    Leaves cover contiguous ranges of `order`, so quadruples can be generated
    as strictly increasing positions in that order, each 4-set exactly once.
    """

    DEFAULT_LEAF_SIZE = 4

    def __init__(self, lo: np.ndarray, hi: np.ndarray, leaf_size: int = None, slack: float = 0.0):
        self.leaf_size = leaf_size or self.DEFAULT_LEAF_SIZE
        self.slack = slack
        self.box_lo = np.asarray(lo, dtype=np.float64) - slack
        self.box_hi = np.asarray(hi, dtype=np.float64) + slack
        self.order = np.arange(len(self.box_lo))
        self.nodes: List[BVHNode] = []
        self.tests = 0
        self.pruned = 0
        if len(self.order):
            self._build(0, len(self.order))

    def _build(self, start: int, end: int) -> int:
        idx = self.order[start:end]
        node = BVHNode(self.box_lo[idx].min(axis=0), self.box_hi[idx].max(axis=0), start, end)
        node_id = len(self.nodes)
        self.nodes.append(node)
        if end - start <= self.leaf_size:
            return node_id
        centers = (self.box_lo[idx] + self.box_hi[idx]) / 2.0
        axis = int(np.argmax(node.hi - node.lo))
        ranked = idx[np.argsort(centers[:, axis], kind="stable")]
        self.order[start:end] = ranked
        mid = (start + end) // 2
        node.left = self._build(start, mid)
        node.right = self._build(mid, end)
        return node_id

    def _admits(self, quad: Tuple[int, int, int, int]) -> bool:
        lo = np.stack([self.nodes[n].lo for n in quad])
        hi = np.stack([self.nodes[n].hi for n in quad])
        scale = max(1.0, float(np.abs(np.concatenate([lo, hi])).max()))
        self.tests += 1
        ok = boxes_admit_transversal(lo, hi, 1e-12 * scale)
        if not ok:
            self.pruned += 1
        return ok

    def _leaf_combos(self, quad) -> Iterator[Tuple[int, int, int, int]]:
        ranges = [range(self.nodes[n].start, self.nodes[n].end) for n in quad]
        for a, b, c, d in product(*ranges):
            if a < b < c < d:
                yield tuple(sorted(int(self.order[x]) for x in (a, b, c, d)))

    def candidate_quadruples(self) -> Iterator[Tuple[int, int, int, int]]:
        """Edge 4-sets (sorted edge ids) whose boxes some line might meet"""
        if len(self.order) < 4:
            return
        stack = [(0, 0, 0, 0)]
        while stack:
            quad = stack.pop()
            counts = {}
            for n in quad:
                counts[n] = counts.get(n, 0) + 1
            if any(self.nodes[n].size < k for n, k in counts.items()):
                continue
            if not self._admits(quad):
                continue
            inner = [n for n in quad if not self.nodes[n].is_leaf]
            if not inner:
                yield from self._leaf_combos(quad)
                continue
            target = max(inner, key=lambda n: (self.nodes[n].size, -n))
            node = self.nodes[target]
            positions = [i for i, n in enumerate(quad) if n == target]
            # children replace every occurrence at once, keeping the tuple ordered
            for k in range(len(positions), -1, -1):
                new = list(quad)
                for j, pos in enumerate(positions):
                    new[pos] = node.left if j < k else node.right
                stack.append(tuple(new))
