"""Binary-mask operations: connected-component labeling, largest-component
retention, pixel-exact area and centroid.

Masks are boolean numpy arrays of shape (height, width). Labeling is
two-pass union-find over row runs, with dense labels assigned in row-major
order of first appearance; that ordering fixes the tie-break for equal
largest components.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyMaskError


@dataclass(frozen=True)
class ComponentLabeling:
    """Result of connected-component labeling.

    ``labels`` holds 0 for background and dense labels 1..K for foreground;
    ``component_sizes[k]`` is the pixel count of component k+1.
    """

    labels: np.ndarray
    component_sizes: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.component_sizes)


def as_mask(array) -> np.ndarray:
    """Coerce any array-like to a 2-D boolean mask."""
    mask = np.asarray(array)
    if mask.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {mask.shape}")
    return mask.astype(bool, copy=False)


def _row_runs(row: np.ndarray) -> list[tuple[int, int]]:
    """Maximal foreground runs of one row as [start, end) column pairs."""
    padded = np.zeros(row.size + 2, dtype=bool)
    padded[1:-1] = row
    edges = np.flatnonzero(padded[1:] != padded[:-1])
    return list(zip(edges[0::2].tolist(), edges[1::2].tolist()))


def _find(parent: list[int], x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def label_components(mask, connectivity: int = 8) -> ComponentLabeling:
    """Label connected foreground regions of a binary mask.

    Two foreground pixels share a label iff they are connected under the
    chosen connectivity (4 = edge neighbors, 8 = edge + diagonal). Labels
    are dense 1..K in row-major order of each component's first pixel.
    """
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    m = as_mask(mask)
    height, width = m.shape

    # First pass: provisional label per run, unions against the previous row.
    # Unions keep the smaller root, so a component's root is always its
    # first-created (row-major first) run.
    parent: list[int] = []
    rows_runs: list[list[tuple[int, int, int]]] = []
    prev: list[tuple[int, int, int]] = []
    for i in range(height):
        current: list[tuple[int, int, int]] = []
        p = 0
        for s, e in _row_runs(m[i]):
            label = len(parent)
            parent.append(label)
            if connectivity == 4:
                while p < len(prev) and prev[p][1] <= s:
                    p += 1
                q = p
                while q < len(prev) and prev[q][0] < e:
                    _union_min(parent, label, prev[q][2])
                    q += 1
            else:
                while p < len(prev) and prev[p][1] < s:
                    p += 1
                q = p
                while q < len(prev) and prev[q][0] <= e:
                    _union_min(parent, label, prev[q][2])
                    q += 1
            current.append((s, e, label))
        rows_runs.append(current)
        prev = current

    # Second pass: dense renumbering by ascending root, then paint.
    dense_of_root: dict[int, int] = {}
    sizes: list[int] = []
    labels = np.zeros((height, width), dtype=np.int32)
    for i, runs in enumerate(rows_runs):
        for s, e, provisional in runs:
            root = _find(parent, provisional)
            dense = dense_of_root.get(root)
            if dense is None:
                dense = len(sizes) + 1
                dense_of_root[root] = dense
                sizes.append(0)
            labels[i, s:e] = dense
            sizes[dense - 1] += e - s

    return ComponentLabeling(labels=labels, component_sizes=tuple(sizes))


def _union_min(parent: list[int], a: int, b: int):
    ra, rb = _find(parent, a), _find(parent, b)
    if ra < rb:
        parent[rb] = ra
    elif rb < ra:
        parent[ra] = rb


def refine_main_mask(mask) -> np.ndarray:
    """Keep only the largest 8-connected component of the mask.

    Removes spurious fragments around the main region. Ties between equal
    largest components go to the component first encountered in row-major
    scan (the smallest label). Idempotent.
    """
    m = as_mask(mask)
    labeling = label_components(m, connectivity=8)
    if labeling.count == 0:
        raise EmptyMaskError("mask has no foreground pixels")
    sizes = labeling.component_sizes
    # index of the first maximal size == smallest label among ties
    keep = sizes.index(max(sizes)) + 1
    return labeling.labels == keep


def mask_area(mask) -> int:
    """Number of foreground pixels."""
    return int(np.count_nonzero(as_mask(mask)))


def mask_centroid(mask) -> tuple[float, float]:
    """Mean of foreground pixel centers in normalized page coordinates.

    Pixel (i, j) contributes ((j + 0.5) / W, (i + 0.5) / H); the result
    lies in [0,1]^2 and is unbiased for symmetric masks.
    """
    m = as_mask(mask)
    rows, cols = np.nonzero(m)
    if rows.size == 0:
        raise EmptyMaskError("centroid of an empty mask is undefined")
    height, width = m.shape
    n = rows.size
    x = (float(np.sum(cols)) + 0.5 * n) / (n * width)
    y = (float(np.sum(rows)) + 0.5 * n) / (n * height)
    return (x, y)
