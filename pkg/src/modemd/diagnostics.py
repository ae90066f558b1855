"""Conservation monitors, trajectory error metrics, exponential-rate
fitting for chaotic divergence, and wall-clock capture."""

import time
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from . import potential

RATE_FLOOR_FACTOR = 10.0       # fit window starts above 10x the initial error
RATE_SATURATION_FRACTION = 0.1  # and ends below 10% of the saturation level
MIN_FIT_POINTS = 3


class RateFitError(RuntimeError):
    """No usable window of exponential growth in the error series."""


@dataclass(frozen=True)
class ConservedQuantities:
    energy: float
    momentum: np.ndarray          # (3,)
    angular_momentum: np.ndarray  # (3,) about the center of mass


def conserved_quantities(x, v, mol, params):
    """Total energy, linear momentum, and CM-frame angular momentum."""
    x = np.asarray(x).reshape(-1, 3)
    v = np.asarray(v).reshape(-1, 3)
    m = mol.masses
    kinetic = 0.5 * float(m @ np.einsum("ij,ij->i", v, v))
    energy = kinetic + potential.energy(x, mol, params)
    p = m @ v
    x_cm = m @ x / mol.total_mass
    v_cm = p / mol.total_mass
    j = (m[:, None] * np.cross(x - x_cm, v - v_cm)).sum(axis=0)
    return ConservedQuantities(energy, p, j)


def _relative(value, reference, label, zero_tol=1e-300):
    denom = np.linalg.norm(np.atleast_1d(reference))
    if denom < zero_tol:
        raise ZeroDivisionError(
            f"reference {label} is zero; relative error undefined")
    return float(np.linalg.norm(np.atleast_1d(value)
                                - np.atleast_1d(reference)) / denom)


def align_quaternion(q, q_ref):
    """Flip the sign of q if -q is closer to q_ref (q and -q are the same
    rotation)."""
    return -q if float(q @ q_ref) < 0.0 else q


@dataclass(frozen=True)
class ErrorMetrics:
    position: float       # RMS per-atom position deviation
    energy: float         # relative drift from the t = 0 value
    momentum: float
    angular_momentum: float
    x_cm: float           # absolute
    v_cm: float           # absolute
    omega: float          # relative
    quaternion: float


def position_rmsd(x, x_ref):
    """sqrt of the mean squared per-atom displacement."""
    d = np.asarray(x).reshape(-1, 3) - np.asarray(x_ref).reshape(-1, 3)
    return float(np.sqrt(np.einsum("ij,ij->i", d, d).mean()))


def quaternion_distance(q, q_ref):
    q = align_quaternion(np.asarray(q), np.asarray(q_ref))
    return 0.5 * float(np.linalg.norm(q - q_ref))


def error_metrics(x, v, cons, macro, *, x_ref, v_ref, cons0, macro_ref):
    """All eight per-sample error measures against a reference trajectory.

    ``cons``/``cons0`` are ConservedQuantities at the sample and at t = 0 of
    the same run; ``macro``/``macro_ref`` are (x_cm, v_cm, q, omega) tuples
    for the run and for the reference.
    """
    x_cm, v_cm, q, omega = macro
    x_cm_r, v_cm_r, q_r, omega_r = macro_ref
    return ErrorMetrics(
        position=position_rmsd(x, x_ref),
        energy=_relative(cons.energy, cons0.energy, "energy"),
        momentum=_relative(cons.momentum, cons0.momentum, "momentum"),
        angular_momentum=_relative(cons.angular_momentum,
                                   cons0.angular_momentum,
                                   "angular momentum"),
        x_cm=float(np.linalg.norm(x_cm - x_cm_r)),
        v_cm=float(np.linalg.norm(v_cm - v_cm_r)),
        omega=_relative(omega, omega_r, "angular velocity"),
        quaternion=quaternion_distance(q, q_r))


def fit_exponential_rate(times, errors):
    """Slope of log(error) vs time over the clean growth window.

    The window opens once the error exceeds RATE_FLOOR_FACTOR times its
    initial (nonzero) level and closes when it reaches
    RATE_SATURATION_FRACTION of the series maximum, which excludes both the
    integration-noise floor and the saturated regime.  Returns
    (rate, (i_lo, i_hi)).
    """
    times = np.asarray(times, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if times.shape != errors.shape or times.ndim != 1:
        raise ValueError("times and errors must be matching 1-d arrays")
    positive = errors > 0
    if not positive.any():
        raise RateFitError("error series is identically zero")
    floor = errors[positive][0] * RATE_FLOOR_FACTOR
    ceiling = errors.max() * RATE_SATURATION_FRACTION
    above = np.nonzero(errors > floor)[0]
    if len(above) == 0:
        raise RateFitError("error never leaves the noise floor")
    i_lo = above[0]
    past = np.nonzero(errors > ceiling)[0]
    i_hi = past[0] if len(past) else len(errors) - 1
    if i_hi <= i_lo:
        if int(np.argmax(errors)) < len(errors) - 2:
            raise RateFitError("error saturated before leaving the floor")
        # growth without a plateau: the whole remaining series is clean
        i_hi = len(errors) - 1
    if i_hi - i_lo + 1 < MIN_FIT_POINTS:
        raise RateFitError(
            f"growth window [{i_lo}, {i_hi}] has fewer than "
            f"{MIN_FIT_POINTS} samples")
    t = times[i_lo:i_hi + 1]
    log_e = np.log(errors[i_lo:i_hi + 1])
    rate = np.polyfit(t, log_e, 1)[0]
    return float(rate), (int(i_lo), int(i_hi))


@contextmanager
def timing_capture(result):
    """Store elapsed wall seconds into result['wall_seconds']."""
    start = time.perf_counter()
    try:
        yield
    finally:
        result["wall_seconds"] = time.perf_counter() - start
