"""Unit-quaternion representation of the orientation matrix.

The quaternion evolution uses constraint damping: each component's rate
picks up -(eta/2) q_i C with C = |q|^2 - 1, so that C evolves along
dC/dt = 2 sum_i q_i dq_i/dt = -eta (C + 1) C and is driven to zero on
the 1/eta timescale without disturbing exact (C = 0) solutions.
"""

import numpy as np

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])


def constraint(q):
    """C = q0^2 + q1^2 + q2^2 + q3^2 - 1."""
    q = np.asarray(q, dtype=float)
    return float(q @ q - 1.0)


def renormalize(q):
    """Rescale q onto the unit three-sphere."""
    q = np.asarray(q, dtype=float)
    norm = np.linalg.norm(q)
    if norm == 0.0:
        raise ValueError("cannot renormalize a zero quaternion")
    return q / norm


def rotation_matrix(q):
    """3x3 rotation matrix of a unit quaternion (q0 scalar part)."""
    q0, q1, q2, q3 = (float(c) for c in q)
    return 2.0 * np.array([
        [q0 * q0 + q1 * q1 - 0.5, q1 * q2 - q0 * q3, q1 * q3 + q0 * q2],
        [q1 * q2 + q0 * q3, q0 * q0 + q2 * q2 - 0.5, q2 * q3 - q0 * q1],
        [q1 * q3 - q0 * q2, q2 * q3 + q0 * q1, q0 * q0 + q3 * q3 - 0.5],
    ])


def quaternion_rhs(q, omega, eta):
    """dq/dt for angular velocity omega with constraint damping rate eta."""
    q0, q1, q2, q3 = (float(c) for c in q)
    wx, wy, wz = (float(c) for c in omega)
    damp = 0.5 * eta * (q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3 - 1.0)
    return np.array([
        -0.5 * (wx * q1 + wy * q2 + wz * q3) - damp * q0,
        0.5 * (wx * q0 + wy * q3 - wz * q2) - damp * q1,
        0.5 * (-wx * q3 + wy * q0 + wz * q1) - damp * q2,
        0.5 * (wx * q2 - wy * q1 + wz * q0) - damp * q3,
    ])
