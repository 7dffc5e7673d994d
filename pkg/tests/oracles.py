"""Brute-force reference implementations used only by the tests.

Deliberately dumb and structurally independent of the package: double loops,
gcd filters, float atan2 angles.  Float angle ties cannot bite because the
only coincident directions are identical vectors (deduplicated before
sorting) and the only half-turn gaps are exact antipodes, which the
completion oracle excludes with an explicit tolerance.
"""

import math

TWO_PI = 2.0 * math.pi


def angle(v) -> float:
    """Angle in [0, 2*pi), measured counter-clockwise from (1, 0)."""
    a = math.atan2(v[1], v[0])
    return a if a >= 0.0 else a + TWO_PI


def brute_rays(h):
    """All primitive vectors of sup-norm <= h, by scan + gcd + atan2 sort."""
    pts = [
        (x, y)
        for x in range(-h, h + 1)
        for y in range(-h, h + 1)
        if (x, y) != (0, 0) and math.gcd(x, y) == 1
    ]
    return sorted(pts, key=angle)


def naive_completion(vecs):
    """(sorted rays, cone vector pairs, cone indices) by float angles.

    A cyclically adjacent pair spans a cone iff its counter-clockwise gap is
    strictly between 0 and a half turn.
    """
    pts = sorted({(int(x), int(y)) for x, y in vecs}, key=angle)
    n = len(pts)
    cones, indices = [], []
    if n < 2:
        return pts, cones, indices
    for i in range(n):
        u = pts[i]
        v = pts[(i + 1) % n]
        gap = (angle(v) - angle(u)) % TWO_PI
        if 1e-12 < gap < math.pi - 1e-9:
            cones.append((u, v))
            indices.append(abs(u[0] * v[1] - u[1] * v[0]))
    return pts, cones, indices


def brute_blowdown(h, ray):
    """Index of the cone created by dropping one ray from the full fan."""
    ray = (int(ray[0]), int(ray[1]))
    pts = [p for p in brute_rays(h) if p != ray]
    _, _, indices = naive_completion(pts)
    merged = [i for i in indices if i != 1]
    if len(merged) > 1:
        raise AssertionError(f"removing {ray} broke more than one cone: {merged}")
    return merged[0] if merged else 1


def brute_epsilon(h) -> float:
    """Largest sup-norm gap between consecutive normalized rays."""
    pts = brute_rays(h)
    worst = 0.0
    for u, v in zip(pts, pts[1:] + pts[:1]):
        nu = max(abs(u[0]), abs(u[1]))
        nv = max(abs(v[0]), abs(v[1]))
        worst = max(worst, abs(u[0] / nu - v[0] / nv), abs(u[1] / nu - v[1] / nv))
    return worst


def totients(n):
    """phi(0..n) by sieve; phi(0) is set to 0."""
    phi = list(range(n + 1))
    for p in range(2, n + 1):
        if phi[p] == p:  # p prime
            for m in range(p, n + 1, p):
                phi[m] -= phi[m] // p
    phi[0] = 0
    return phi
