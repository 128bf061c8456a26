"""Writes unstructured.mesh: Delaunay triangulation of the unit square from
equispaced boundary nodes and jittered interior nodes."""

import numpy as np
from scipy.spatial import Delaunay

N = 16
SEED = 7
JITTER = 0.3


def main():
    rng = np.random.default_rng(SEED)
    s = np.linspace(0.0, 1.0, N + 1)
    pts = [(x, 0.0) for x in s] + [(x, 1.0) for x in s]
    pts += [(0.0, y) for y in s[1:-1]] + [(1.0, y) for y in s[1:-1]]
    h = 1.0 / N
    for i in range(1, N):
        for j in range(1, N):
            dx, dy = rng.uniform(-JITTER, JITTER, 2) * h
            pts.append((i * h + dx, j * h + dy))
    pts = np.array(pts)
    tri = Delaunay(pts, qhull_options="QJ").simplices
    keep = []
    for a, b, c in tri:
        (xa, ya), (xb, yb), (xc, yc) = pts[a], pts[b], pts[c]
        area = 0.5 * ((xb - xa) * (yc - ya) - (xc - xa) * (yb - ya))
        if abs(area) < 1e-12:
            continue
        keep.append((a, b, c) if area > 0 else (a, c, b))
    with open("unstructured.mesh", "w") as f:
        f.write(f"# Delaunay mesh of the unit square, {len(pts)} vertices\n")
        f.write(f"{len(pts)} {len(keep)}\n")
        for x, y in pts:
            f.write(f"{x:.17e} {y:.17e}\n")
        for a, b, c in keep:
            f.write(f"{a} {b} {c}\n")


if __name__ == "__main__":
    main()
