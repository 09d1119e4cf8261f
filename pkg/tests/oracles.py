"""Independent reference computations used only by the tests.

The forward model here avoids atan2 entirely (acos for azimuth, asin for
elevation) so it shares no code path with ``hybridloc.geometry``.
"""

import math

import numpy as np

S1 = np.array([0.0, 0.0, 0.0])
S2 = np.array([500.0, 100.0, 2000.0])
U1 = np.array([1000.0, 200.0, 100.0])


def forward(u, s1, s2):
    d = np.asarray(u, float) - s1
    rng1 = math.sqrt(float(d @ d))
    horiz = math.hypot(d[0], d[1])
    # inverse trig only where it is well conditioned (argument away from +-1)
    if abs(d[1]) <= abs(d[0]):
        phi = math.asin(d[1] / horiz)
        if d[0] < 0:
            phi = math.copysign(math.pi, d[1] if d[1] else 1.0) - phi
    else:
        phi = math.copysign(math.acos(d[0] / horiz), d[1])
    if abs(d[2]) <= horiz:
        theta = math.asin(d[2] / rng1)
    else:
        theta = math.copysign(math.acos(horiz / rng1), d[2])
    r = math.sqrt(float((u - s2) @ (u - s2))) - rng1
    return np.array([r, phi, theta])


def fd_jacobian(f, x, step):
    """Central differences of vector function ``f`` at ``x``; column k is d f / d x_k."""
    x = np.asarray(x, float)
    cols = []
    for k in range(len(x)):
        e = np.zeros_like(x)
        e[k] = step
        cols.append((f(x + e) - f(x - e)) / (2 * step))
    return np.column_stack(cols)


def pseudo_linear_error(m, u, s1, s2):
    """h - G u written out directly from the pseudo-linear equations."""
    r, phi, theta = m
    d = np.array([math.cos(theta) * math.cos(phi), math.cos(theta) * math.sin(phi), math.sin(theta)])
    alpha = np.array([math.sin(phi), -math.cos(phi), 0.0])
    beta = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), -math.cos(theta)])
    e_r = r * r + s1 @ s1 - s2 @ s2 + 2 * r * (d @ (u - s1)) + 2 * (u @ (s2 - s1))
    return np.array([e_r, alpha @ (s1 - u), beta @ (s1 - u)])


def oracle_crlb_rmse(u, s1, s2, sigmas, step=1e-3):
    J = fd_jacobian(lambda x: forward(x, s1, s2), u, step)
    fim = J.T @ np.diag(1.0 / np.asarray(sigmas, float) ** 2) @ J
    return math.sqrt(np.trace(np.linalg.inv(fim)))


def random_target(rng, s1=S1, s2=S2, half_width=2000.0, min_horiz=1.0, min_ray_deg=1.0):
    """Uniform target in a cube, rejecting the guard regions.

    Guards: within ``min_horiz`` m of the vertical through s1 (azimuth
    undefined), within 1 m of either sensor, and within ``min_ray_deg`` of
    the ray from s1 pointing away from s2, where the range difference is
    constant along the line of sight and the position is unobservable.
    """
    away = (s1 - s2) / np.linalg.norm(s1 - s2)
    while True:
        u = rng.uniform(-half_width, half_width, 3)
        d = u - s1
        if math.hypot(d[0], d[1]) < min_horiz or np.linalg.norm(d) < 1 or np.linalg.norm(u - s2) < 1:
            continue
        cosang = (d @ away) / np.linalg.norm(d)
        if cosang > math.cos(math.radians(min_ray_deg)):
            continue
        return u
