"""Adaptive 8th-order Dormand-Prince integration of dY/dt = F(Y, t).

A step is accepted when the embedded truncation-error estimate satisfies
err <= eps_tau * (|Y| + 1), with |.| the RMS norm over state components.
The step controller is h_next = h * clip(safety * (tol/err)^(1/8), 0.2, 5).
Steps are shortened to land exactly on requested output times.
"""

from dataclasses import dataclass, field

import numpy as np

from ._dop853_tableau import A, B, C, E3, E5, N_STAGES

SAFETY = 0.9
FACTOR_MIN = 0.2
FACTOR_MAX = 5.0
ORDER_EXPONENT = 1.0 / 8.0


class IntegrationError(RuntimeError):
    """Step underflow or non-finite right-hand side."""


@dataclass(frozen=True)
class IntegratorConfig:
    eps_tau: float = 1e-10
    h_init: float = 1e-3
    h_min: float = 1e-12
    h_max: float = np.inf
    safety: float = SAFETY

    def __post_init__(self):
        if not 0.0 < self.eps_tau <= 1e-3:
            raise ValueError("eps_tau must lie in (0, 1e-3]")
        if not self.h_min < self.h_max:
            raise ValueError("h_min must be below h_max")


@dataclass
class Trajectory:
    times: np.ndarray             # (S,) internal time units
    states: np.ndarray            # (S, n)
    n_accepted: int = 0
    n_rejected: int = 0
    n_rhs_evals: int = 0
    wall_seconds: float = 0.0


def _rms(v):
    return float(np.sqrt(np.mean(v * v)))


def step_once(f, y, t, h, cfg):
    """One embedded 8(5,3) step.

    Returns (y_new or None, t_new, err, h_next); y_new is None when the
    step is rejected.  Thirteen rhs evaluations per call: twelve stages
    plus one at the trial endpoint for the stiffness-weighted error
    estimate.
    """
    n = len(y)
    K = np.empty((N_STAGES + 1, n))
    K[0] = f(y, t)
    for s in range(1, N_STAGES):
        ys = y + h * (K[:s].T @ A[s, :s])
        K[s] = f(ys, t + C[s] * h)
    y_new = y + h * (K[:N_STAGES].T @ B)
    K[N_STAGES] = f(y_new, t + h)
    if not np.all(np.isfinite(y_new)):
        raise IntegrationError(f"non-finite state at t={t + h:g}")

    err5 = K.T @ E5
    err3 = K.T @ E3
    r5 = _rms(err5)
    r3 = _rms(err3)
    denom = np.hypot(r5, 0.1 * r3)
    err = abs(h) * r5 * (r5 / denom) if denom > 0.0 else 0.0

    tol = cfg.eps_tau * (_rms(y) + 1.0)
    if err == 0.0:
        factor = FACTOR_MAX
    else:
        factor = np.clip(cfg.safety * (tol / err) ** ORDER_EXPONENT,
                         FACTOR_MIN, FACTOR_MAX)
    h_next = min(h * factor, cfg.h_max)
    if err <= tol:
        return y_new, t + h, err, h_next
    return None, t, err, h_next


def integrate(f, y0, t_end, out_interval, cfg):
    """Integrate from t=0 to t_end, sampling every out_interval.

    The wrapped rhs counts evaluations and checks finiteness.  Sample
    times are exact multiples of out_interval (the step is clipped at
    each output boundary); time is accumulated with compensated
    summation.
    """
    y = np.array(y0, dtype=float)
    traj = Trajectory(times=None, states=None)

    def rhs(yv, tv):
        traj.n_rhs_evals += 1
        out = np.asarray(f(yv, tv), dtype=float)
        if not np.all(np.isfinite(out)):
            bad = int(np.nonzero(~np.isfinite(out))[0][0])
            raise IntegrationError(
                f"rhs returned non-finite component {bad} at t={tv:g}")
        return out

    n_out = int(round(t_end / out_interval))
    out_times = out_interval * np.arange(n_out + 1)
    samples = [y.copy()]
    t = 0.0
    t_comp = 0.0  # Kahan compensation
    h = min(cfg.h_init, cfg.h_max)

    for target in out_times[1:]:
        while t < target - 1e-12 * max(1.0, target):
            h_try = min(h, target - t)
            y_new, t_new, err, h_next = step_once(rhs, y, t, h_try, cfg)
            if y_new is None:
                traj.n_rejected += 1
                if h_try <= cfg.h_min:
                    raise IntegrationError(
                        f"step size underflow at t={t:g} (err={err:g})")
                h = max(h_next, cfg.h_min)
                continue
            traj.n_accepted += 1
            y = y_new
            # compensated time accumulation
            dt = h_try - t_comp
            t_new = t + dt
            t_comp = (t_new - t) - dt
            t = t_new
            if h_try >= h:
                h = h_next
            # else: boundary-clipped step; keep the controller's h
        t = target  # snap off accumulated roundoff
        t_comp = 0.0
        samples.append(y.copy())

    traj.times = out_times
    traj.states = np.array(samples)
    return traj
