"""Unit-quaternion and SO(3) tangent-space algebra.

Quaternions are stored scalar-first as numpy arrays ``[a, x, y, z]`` where
``a`` is the real part and ``(x, y, z)`` the imaginary 3-vector. All
functions accept a leading batch dimension unless noted otherwise.

The small-angle series branches kick in below ``SMALL_ANGLE`` (1e-6 rad),
which keeps the branch error below 1e-13 while avoiding 0/0.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError, SingularRotationError

SMALL_ANGLE = 1e-6
UNIT_NORM_TOL = 1e-6


def skew(p: np.ndarray) -> np.ndarray:
    """Skew-symmetric (cross-product) matrix of a 3-vector, batched."""
    p = np.asarray(p, dtype=float)
    out = np.zeros(p.shape[:-1] + (3, 3))
    out[..., 0, 1] = -p[..., 2]
    out[..., 0, 2] = p[..., 1]
    out[..., 1, 0] = p[..., 2]
    out[..., 1, 2] = -p[..., 0]
    out[..., 2, 0] = -p[..., 1]
    out[..., 2, 1] = p[..., 0]
    return out


def quat_normalize(u: np.ndarray) -> np.ndarray:
    """Rescale to unit norm; a^2 + |v|^2 = 1 within 1e-12 afterwards."""
    u = np.asarray(u, dtype=float)
    norm = np.linalg.norm(u, axis=-1, keepdims=True)
    if np.any(norm < 1e-12):
        raise InvalidInputError("cannot normalize a near-zero quaternion")
    return u / norm


def _check_unit(u: np.ndarray, name: str) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != 4:
        raise InvalidInputError(f"{name}: expected quaternion of length 4, got shape {u.shape}")
    err = np.abs(np.linalg.norm(u, axis=-1) - 1.0)
    if np.any(err > UNIT_NORM_TOL):
        raise InvalidInputError(f"{name}: quaternion norm deviates from 1 by {float(np.max(err)):.3g}")
    return u


def quat_multiply(u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
    """Hamilton product u1 * u2, batched."""
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    a1, v1 = u1[..., 0], u1[..., 1:]
    a2, v2 = u2[..., 0], u2[..., 1:]
    a = a1 * a2 - np.sum(v1 * v2, axis=-1)
    v = a1[..., None] * v2 + a2[..., None] * v1 + np.cross(v1, v2)
    return np.concatenate([a[..., None], v], axis=-1)


def quat_conjugate(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    out = u.copy()
    out[..., 1:] *= -1.0
    return out


def quat_relative(u_from: np.ndarray, u_to: np.ndarray) -> np.ndarray:
    """Relative rotation u_from^-1 * u_to encoding the shorter arc.

    When the 4D dot product of the inputs is negative, u_to is negated
    first (a quaternion and its negative are the same rotation), so the
    result's scalar part is always >= 0.
    """
    u_from = _check_unit(u_from, "u_from")
    u_to = _check_unit(u_to, "u_to")
    dot = np.sum(u_from * u_to, axis=-1, keepdims=True)
    u_to = np.where(dot < 0.0, -u_to, u_to)
    rel = quat_multiply(quat_conjugate(u_from), u_to)
    rel = np.where(rel[..., :1] < 0.0, -rel, rel)
    return quat_normalize(rel)


def quat_log_map(u: np.ndarray) -> np.ndarray:
    """Logarithmic map of a shortest-arc unit quaternion to a rotation vector.

    p = (2*acos(a) / sin(acos(a))) * v, with sin(acos(a)) = |v|. Below the
    small-angle threshold the arcsin series 2*v*(1 + |v|^2/6 + 3|v|^4/40)
    replaces the singular quotient. |p| equals the rotation angle.
    """
    u = _check_unit(u, "u")
    a = u[..., 0]
    if np.any(a < -1e-9):
        raise InvalidInputError("quat_log_map expects scalar part >= 0 (shortest arc)")
    v = u[..., 1:]
    s = np.linalg.norm(v, axis=-1)
    a_cl = np.clip(a, -1.0, 1.0)

    small = s < SMALL_ANGLE
    s_safe = np.where(small, 1.0, s)
    factor = 2.0 * np.arccos(a_cl) / s_safe
    s2 = s * s
    series = 2.0 * (1.0 + s2 / 6.0 + 3.0 * s2 * s2 / 40.0)
    factor = np.where(small, series, factor)
    return factor[..., None] * v


def inv_exp_jacobian(p: np.ndarray) -> np.ndarray:
    """Inverse of the exponential-map Jacobian, T^-1(p), batched.

    T^-1(p) = I - p~/2 + ((1 - gamma)/|p|^2) p~ p~  with
    gamma = (|p|/2) / tan(|p|/2); the Taylor limit I - p~/2 + p~p~/12 is
    used below the small-angle threshold. Valid for |p| < 2*pi.
    """
    p = np.asarray(p, dtype=float)
    theta = np.linalg.norm(p, axis=-1)
    if np.any(theta > 2.0 * np.pi - SMALL_ANGLE):
        raise SingularRotationError("inv_exp_jacobian: |p| within 1e-6 of the 2*pi singularity")
    ph = skew(p)
    ph2 = ph @ ph

    small = theta < SMALL_ANGLE
    half = 0.5 * np.where(small, 1.0, theta)
    gamma = half / np.tan(half)
    theta2 = np.where(small, 1.0, theta * theta)
    coeff = np.where(small, 1.0 / 12.0, (1.0 - gamma) / theta2)

    eye = np.broadcast_to(np.eye(3), ph.shape)
    return eye - 0.5 * ph + coeff[..., None, None] * ph2


def quat_to_matrix(u: np.ndarray) -> np.ndarray:
    """Rotation matrix of a unit quaternion, batched."""
    u = np.asarray(u, dtype=float)
    a, x, y, z = u[..., 0], u[..., 1], u[..., 2], u[..., 3]
    out = np.empty(u.shape[:-1] + (3, 3))
    out[..., 0, 0] = 1.0 - 2.0 * (y * y + z * z)
    out[..., 0, 1] = 2.0 * (x * y - a * z)
    out[..., 0, 2] = 2.0 * (x * z + a * y)
    out[..., 1, 0] = 2.0 * (x * y + a * z)
    out[..., 1, 1] = 1.0 - 2.0 * (x * x + z * z)
    out[..., 1, 2] = 2.0 * (y * z - a * x)
    out[..., 2, 0] = 2.0 * (x * z - a * y)
    out[..., 2, 1] = 2.0 * (y * z + a * x)
    out[..., 2, 2] = 1.0 - 2.0 * (x * x + y * y)
    return out


def matrix_to_quat(A: np.ndarray) -> np.ndarray:
    """Unit quaternion of a rotation matrix (Shepperd's method), batched.

    The sign is fixed so the scalar part is non-negative.
    """
    A = np.asarray(A, dtype=float)
    batch = A.shape[:-2]
    m00, m11, m22 = A[..., 0, 0], A[..., 1, 1], A[..., 2, 2]
    tr = m00 + m11 + m22

    # Four candidate constructions; the one with the largest pivot is exact.
    q = np.empty(batch + (4, 4))
    t0 = 1.0 + tr
    q[..., 0, 0] = t0
    q[..., 0, 1] = A[..., 2, 1] - A[..., 1, 2]
    q[..., 0, 2] = A[..., 0, 2] - A[..., 2, 0]
    q[..., 0, 3] = A[..., 1, 0] - A[..., 0, 1]
    t1 = 1.0 + m00 - m11 - m22
    q[..., 1, 0] = A[..., 2, 1] - A[..., 1, 2]
    q[..., 1, 1] = t1
    q[..., 1, 2] = A[..., 0, 1] + A[..., 1, 0]
    q[..., 1, 3] = A[..., 0, 2] + A[..., 2, 0]
    t2 = 1.0 - m00 + m11 - m22
    q[..., 2, 0] = A[..., 0, 2] - A[..., 2, 0]
    q[..., 2, 1] = A[..., 0, 1] + A[..., 1, 0]
    q[..., 2, 2] = t2
    q[..., 2, 3] = A[..., 1, 2] + A[..., 2, 1]
    t3 = 1.0 - m00 - m11 + m22
    q[..., 3, 0] = A[..., 1, 0] - A[..., 0, 1]
    q[..., 3, 1] = A[..., 0, 2] + A[..., 2, 0]
    q[..., 3, 2] = A[..., 1, 2] + A[..., 2, 1]
    q[..., 3, 3] = t3

    pivots = np.stack([t0, t1, t2, t3], axis=-1)
    best = np.argmax(pivots, axis=-1)
    idx = np.expand_dims(best, axis=(-2, -1))
    cand = np.take_along_axis(q, np.broadcast_to(idx, batch + (1, 4)), axis=-2)
    cand = np.squeeze(cand, axis=-2)
    out = quat_normalize(cand)
    return np.where(out[..., :1] < 0.0, -out, out)
