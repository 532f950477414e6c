"""Independent oracles used to freeze expected values.

These deliberately avoid the code paths they check: polynomial evaluation
sums explicit powers instead of Horner, and the winding oracle tracks
argument increments instead of integrating.
"""
import math

import numpy as np

from slicereg import Quaternion


def poly_eval_direct(coeffs, q, center=0.0):
    """sum_n (q - center)^n a_n via explicit repeated multiplication."""
    shifted = q - center
    total = Quaternion(0.0)
    power = Quaternion(1.0)
    for a in coeffs:
        total = total + power * a
        power = shifted * power
    return total


def winding_angle_sum(points, px, py):
    """Winding number of a closed polyline around (px, py), by summing the
    signed turn of consecutive direction vectors."""
    pts = np.asarray(points, dtype=float)
    if np.hypot(*(pts[0] - pts[-1])) > 1e-12:
        pts = np.vstack([pts, pts[0]])
    rel = pts - np.array([px, py])
    ang = np.arctan2(rel[:, 1], rel[:, 0])
    dturn = np.diff(ang)
    dturn = (dturn + math.pi) % (2.0 * math.pi) - math.pi
    return dturn.sum() / (2.0 * math.pi)
