"""
Vectorized planar primitives: point-segment distances and projections,
closed segment intersection and the crossing-number polygon test.

.. moduleauthor:: qhgeo developers
"""

import numpy as np


def _as_points(points):
    return np.atleast_2d(np.asarray(points, dtype=float))


def segment_projection(points, a, b):
    """
    Projects points onto one closed segment.

    :param points: query points
    :type points: array of shape (N, 2)
    :param a: segment start
    :type a: array of shape (2,)
    :param b: segment end
    :type b: array of shape (2,)

    :returns: tuple (nearest points (N, 2), distances (N,))
    """
    points = _as_points(points)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ab = b - a
    denom = float(np.dot(ab, ab))

    if denom == 0.0:
        t = np.zeros(len(points))
    else:
        t = np.clip(((points - a) @ ab) / denom, 0.0, 1.0)

    nearest = a + t[:, None] * ab
    dist = np.hypot(points[:, 0] - nearest[:, 0], points[:, 1] - nearest[:, 1])

    return nearest, dist


def orientation(a, b, c):
    """
    Twice the signed area of the triangles (a, b, c); positive when c lies left of a->b.
    Every argument may be a single point or an array of points.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (c[..., 0] - a[..., 0]) * (b[..., 1] - a[..., 1])


def _within_box(p, q, r):
    """r lies in the bounding box of segment p-q (vectorized over p, q)."""
    return ((np.minimum(p[..., 0], q[..., 0]) <= r[..., 0]) & (r[..., 0] <= np.maximum(p[..., 0], q[..., 0])) &
            (np.minimum(p[..., 1], q[..., 1]) <= r[..., 1]) & (r[..., 1] <= np.maximum(p[..., 1], q[..., 1])))


def segments_intersect(P, Q, a, b):
    """
    Tests closed segments P[i]-Q[i] against the closed segment a-b.  Touching,
    grazing an endpoint and collinear overlap all count as intersection.

    :param P: segment starts
    :type P: array of shape (N, 2)
    :param Q: segment ends
    :type Q: array of shape (N, 2)
    :param a: boundary segment start
    :type a: array of shape (2,)
    :param b: boundary segment end
    :type b: array of shape (2,)

    :returns: bool array of shape (N,)
    """
    P = _as_points(P)
    Q = _as_points(Q)
    a = np.broadcast_to(np.asarray(a, dtype=float), P.shape)
    b = np.broadcast_to(np.asarray(b, dtype=float), P.shape)

    scale = np.hypot(*(Q - P).T) * np.hypot(*(b - a).T) + np.hypot(*(a - P).T) * np.hypot(*(b - a).T)
    eps = 1e-12 * scale + 1e-300

    d1 = orientation(a, b, P)
    d2 = orientation(a, b, Q)
    d3 = orientation(P, Q, a)
    d4 = orientation(P, Q, b)

    s1 = np.where(np.abs(d1) <= eps, 0, np.sign(d1))
    s2 = np.where(np.abs(d2) <= eps, 0, np.sign(d2))
    s3 = np.where(np.abs(d3) <= eps, 0, np.sign(d3))
    s4 = np.where(np.abs(d4) <= eps, 0, np.sign(d4))

    proper = (s1 * s2 < 0) & (s3 * s4 < 0)

    touching = (((s1 == 0) & _within_box(a, b, P)) |
                ((s2 == 0) & _within_box(a, b, Q)) |
                ((s3 == 0) & _within_box(P, Q, a)) |
                ((s4 == 0) & _within_box(P, Q, b)))

    return proper | touching


def segment_point_distance(P, Q, c):
    """
    Distance from a fixed point c to each segment P[i]-Q[i].

    :returns: float array of shape (N,)
    """
    P = _as_points(P)
    Q = _as_points(Q)
    c = np.asarray(c, dtype=float)
    pq = Q - P
    denom = np.einsum('ij,ij->i', pq, pq)

    with np.errstate(divide='ignore', invalid='ignore'):
        t = np.where(denom > 0, np.einsum('ij,ij->i', c - P, pq) / denom, 0.0)
    t = np.clip(t, 0.0, 1.0)

    nearest = P + t[:, None] * pq
    return np.hypot(nearest[:, 0] - c[0], nearest[:, 1] - c[1])


def points_in_polygon(points, vertices):
    """
    Crossing-number inclusion test for a simple polygon.  Points exactly on
    the polygon may land on either side; callers combine this with a boundary
    distance test.

    :param points: query points
    :type points: array of shape (N, 2)
    :param vertices: polygon vertices, not repeated at the end
    :type vertices: array of shape (M, 2)

    :returns: bool array of shape (N,)
    """
    points = _as_points(points)
    V = np.asarray(vertices, dtype=float)
    x = points[:, 0]
    y = points[:, 1]
    inside = np.zeros(len(points), dtype=bool)

    for i in range(len(V)):
        x0, y0 = V[i]
        x1, y1 = V[(i + 1) % len(V)]
        crossing = ((y0 <= y) & (y1 > y)) | ((y0 > y) & (y1 <= y))
        if not np.any(crossing):
            continue

        with np.errstate(divide='ignore', invalid='ignore'):
            vt = (y - y0) / (y1 - y0)
        x_cross = x0 + vt * (x1 - x0)
        inside ^= crossing & (x < x_cross)

    return inside


def polygon_area(vertices):
    """
    Signed shoelace area of a polygon.
    """
    V = np.asarray(vertices, dtype=float)
    x = V[:, 0]
    y = V[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
