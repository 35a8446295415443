import numpy as np
import pytest

from geoseg.evaluate import Shape, synth_image


@pytest.fixture(scope="session")
def disk_scene():
    """Clean bright disk on dark background, r=40 at the center of 128^2."""
    img, gt = synth_image([Shape("disk", (64, 64, 40.0), 0.8)], (128, 128),
                          background=0.2, smooth_sigma=1.0)
    return img, gt


@pytest.fixture(scope="session")
def crescent_scene():
    """C-shaped blob whose boundary crosses the negative axis of z=(64,64)
    three times (wide bay south-west of the landmark)."""
    shapes = [
        Shape("disk", (80, 64, 26.0), 0.85),
        Shape("capsule", (80, 64, 58, 92, 12.0), 0.85),
        Shape("capsule", (58, 92, 34, 84, 12.0), 0.85),
        Shape("capsule", (34, 84, 22, 64, 12.0), 0.85),
    ]
    img, gt = synth_image(shapes, (128, 128), background=0.15, smooth_sigma=1.0)
    return img, gt


def segment_crossings(verts, zx, zy, negative=True):
    """Transversal crossings of a polyline with the horizontal line y=zy,
    restricted to x < zx (negative) or x > zx; independent test helper."""
    events = []
    ys = verts[:, 1] - zy
    for i in range(len(verts) - 1):
        y1, y2 = ys[i], ys[i + 1]
        if y1 == 0 or y2 == 0:
            continue
        if (y1 > 0) != (y2 > 0):
            t = y1 / (y1 - y2)
            xc = verts[i, 0] + t * (verts[i + 1, 0] - verts[i, 0])
            if (xc < zx) if negative else (xc > zx):
                events.append((i + t, xc))
    return events


def polyline_is_simple(verts, tol=1e-9):
    """No transversal self-intersections (sharing endpoints is allowed)."""
    n = len(verts) - 1

    def seg(i):
        return verts[i], verts[i + 1]

    def cross2(u, v):
        return u[0] * v[1] - u[1] * v[0]

    def proper_cross(p1, p2, p3, p4):
        d1 = cross2(p4 - p3, p1 - p3)
        d2 = cross2(p4 - p3, p2 - p3)
        d3 = cross2(p2 - p1, p3 - p1)
        d4 = cross2(p2 - p1, p4 - p1)
        return ((d1 > tol and d2 < -tol) or (d1 < -tol and d2 > tol)) and \
               ((d3 > tol and d4 < -tol) or (d3 < -tol and d4 > tol))

    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue  # closing pair shares the wrap vertex
            p1, p2 = seg(i)
            p3, p4 = seg(j)
            if proper_cross(p1, p2, p3, p4):
                return False
    return True
