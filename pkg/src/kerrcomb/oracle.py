"""Independent verification engines for the production pipeline.

Everything here re-derives results by a different numerical route than
the production modules and shares no numerical code with them beyond the
domain types: the classical three-mode equations are integrated in time
(fixed-step RK4), the fluctuation generator is rebuilt by central finite
differences of that vector field, stationary covariances are estimated
by Euler-Maruyama sampling of the linear Langevin system, and the
entanglement witness is minimized by exhaustive grid scan. All of it is
deterministic given explicit seeds and step sizes.

The Langevin sampler works in the symmetric-ordering (Wigner) picture:
vacuum inputs become complex white noise of variance ½ per unit
normalized time, and the sampled moments estimate symmetrized quantum
expectations, which is exactly what the production quadrature
covariances are.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import NormalizedDrive
from .steady import SteadyState

__all__ = [
    "MeanFieldState",
    "NonFiniteError",
    "UnstableError",
    "mean_field_rhs",
    "integrate_mean_field",
    "relax_to_steady",
    "fd_jacobian",
    "langevin_covariance",
    "brute_force_duan",
]


class NonFiniteError(FloatingPointError):
    """Trajectory blew up (non-finite amplitude encountered)."""


class UnstableError(ValueError):
    """The linear system is not damped; no stationary statistics exist."""


@dataclass(frozen=True)
class MeanFieldState:
    """Classical amplitudes (pump, signal, idler), dimensionless."""

    alpha_p: complex
    alpha_minus: complex
    alpha_plus: complex

    def __post_init__(self) -> None:
        for v in (self.alpha_p, self.alpha_minus, self.alpha_plus):
            v = complex(v)
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError("amplitudes must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha_p, self.alpha_minus, self.alpha_plus],
                        dtype=complex)


def _rhs_detached(a_p, a_p_c, a_m, a_m_c, a_q, a_q_c, f_norm, dtp, dtl):
    """Three-mode vector field with conjugates as independent slots.

    Treating the conjugated amplitudes as separate inputs is what lets
    the finite-difference Jacobian probe the doubled (a, a†) space.
    """
    d_p = (-(1.0 + 1j * dtp) * a_p
           + 1j * (a_p_c * a_p + 2.0 * a_m_c * a_m + 2.0 * a_q_c * a_q) * a_p
           + 2j * a_p_c * a_m * a_q + f_norm)
    d_m = (-(1.0 + 1j * dtl) * a_m
           + 1j * (2.0 * a_p_c * a_p + a_m_c * a_m + 2.0 * a_q_c * a_q) * a_m
           + 1j * a_p * a_p * a_q_c)
    d_q = (-(1.0 + 1j * dtl) * a_q
           + 1j * (2.0 * a_p_c * a_p + 2.0 * a_m_c * a_m + a_q_c * a_q) * a_q
           + 1j * a_p * a_p * a_m_c)
    return d_p, d_m, d_q


def _rhs_detached_conj(a_p, a_p_c, a_m, a_m_c, a_q, a_q_c, dtl):
    """Detached conjugate equations for the pair modes only."""
    d_m_c = (-(1.0 - 1j * dtl) * a_m_c
             - 1j * (2.0 * a_p_c * a_p + a_m_c * a_m
                     + 2.0 * a_q_c * a_q) * a_m_c
             - 1j * a_p_c * a_p_c * a_q)
    d_q_c = (-(1.0 - 1j * dtl) * a_q_c
             - 1j * (2.0 * a_p_c * a_p + 2.0 * a_m_c * a_m
                     + a_q_c * a_q) * a_q_c
             - 1j * a_p_c * a_p_c * a_m)
    return d_m_c, d_q_c


def mean_field_rhs(amps: np.ndarray, drive: NormalizedDrive) -> np.ndarray:
    """d(α_p, α₋, α₊)/dτ of the noise-free three-mode system."""
    a_p, a_m, a_q = amps
    d_p, d_m, d_q = _rhs_detached(a_p, np.conj(a_p), a_m, np.conj(a_m),
                                  a_q, np.conj(a_q),
                                  drive.f_norm, drive.dtp, drive.dtl)
    return np.array([d_p, d_m, d_q])


def integrate_mean_field(init: MeanFieldState, drive: NormalizedDrive,
                         t_end: float, dt: float, sample_every: int = 1,
                         ) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step RK4 trajectory of the classical system.

    Returns (times, amplitudes[n, 3]). Raises NonFiniteError on blow-up,
    reporting the time reached.
    """
    if dt <= 0 or t_end <= 0:
        raise ValueError("dt and t_end must be positive")
    n_steps = int(round(t_end / dt))
    amps = init.as_array()
    times = [0.0]
    traj = [amps.copy()]
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(1, n_steps + 1):
            k1 = mean_field_rhs(amps, drive)
            k2 = mean_field_rhs(amps + 0.5 * dt * k1, drive)
            k3 = mean_field_rhs(amps + 0.5 * dt * k2, drive)
            k4 = mean_field_rhs(amps + dt * k3, drive)
            amps = amps + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(amps.view(float))):
                raise NonFiniteError(
                    f"trajectory diverged at t = {step * dt:g}")
            if step % sample_every == 0 or step == n_steps:
                times.append(step * dt)
                traj.append(amps.copy())
    return np.array(times), np.array(traj)


def mean_field_rhs_batch(amps: np.ndarray, f_norm: np.ndarray,
                         dtp: np.ndarray, dtl: np.ndarray) -> np.ndarray:
    """Vector field for a batch of systems; amps has shape (3, n)."""
    a_p, a_m, a_q = amps
    d_p, d_m, d_q = _rhs_detached(a_p, np.conj(a_p), a_m, np.conj(a_m),
                                  a_q, np.conj(a_q), f_norm, dtp, dtl)
    return np.stack([d_p, d_m, d_q])


def integrate_mean_field_batch(init: np.ndarray, f_norm: np.ndarray,
                               dtp: np.ndarray, dtl: np.ndarray,
                               t_end: float, dt: float) -> np.ndarray:
    """RK4 endpoint for a batch of independent drives (no sampling).

    init has shape (3, n); the drive arrays broadcast against it. Used
    by relaxation checks that push hundreds of perturbed states at once.
    """
    if dt <= 0 or t_end <= 0:
        raise ValueError("dt and t_end must be positive")
    amps = np.array(init, dtype=complex)
    for _ in range(int(round(t_end / dt))):
        k1 = mean_field_rhs_batch(amps, f_norm, dtp, dtl)
        k2 = mean_field_rhs_batch(amps + 0.5 * dt * k1, f_norm, dtp, dtl)
        k3 = mean_field_rhs_batch(amps + 0.5 * dt * k2, f_norm, dtp, dtl)
        k4 = mean_field_rhs_batch(amps + dt * k3, f_norm, dtp, dtl)
        amps = amps + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(amps.view(float))):
        raise NonFiniteError("batch integration diverged")
    return amps


def relax_to_steady(init: MeanFieldState, drive: NormalizedDrive,
                    t_end: float = 200.0, dt: float = 0.01,
                    settle_tol: float = 1e-10,
                    max_extensions: int = 20) -> np.ndarray:
    """Integrate until the vector field is numerically quiet.

    Finds attractors independently of the algebraic solver, extending
    the run in chunks when the field is still moving. Callers should
    re-check the residual if they need a hard guarantee.
    """
    _, traj = integrate_mean_field(init, drive, t_end, dt,
                                   sample_every=max(1, int(t_end / dt)))
    amps = traj[-1]
    for _ in range(max_extensions):
        if np.max(np.abs(mean_field_rhs(amps, drive))) < settle_tol:
            break
        _, tail = integrate_mean_field(MeanFieldState(*amps), drive,
                                       25.0, dt,
                                       sample_every=int(25.0 / dt))
        amps = tail[-1]
    return amps


def fd_jacobian(state: SteadyState, drive: NormalizedDrive,
                h: float = 1e-6) -> np.ndarray:
    """Finite-difference fluctuation generator in the rotated pair basis.

    Central differences of the signal/idler vector field around the
    steady state, with the pump held classical at its mean value and the
    basis rotated by the steady phases, directly comparable to the
    analytic 4×4 generator. The result is gauge independent, so the pump
    phase is fixed at zero and the pair phase split evenly.
    """
    if not 1e-8 <= h <= 1e-4:
        raise ValueError("h outside the trusted range [1e-8, 1e-4]")
    theta_pair = 0.5 * state.phi
    a_p = complex(math.sqrt(state.ap2))
    alpha = math.sqrt(state.a2) * np.exp(1j * theta_pair)
    rot = np.exp(1j * theta_pair)

    def field(delta: np.ndarray) -> np.ndarray:
        a_m = alpha + delta[0] * rot
        a_m_c = np.conj(alpha) + delta[1] * np.conj(rot)
        a_q = alpha + delta[2] * rot
        a_q_c = np.conj(alpha) + delta[3] * np.conj(rot)
        _, d_m, d_q = _rhs_detached(a_p, np.conj(a_p), a_m, a_m_c,
                                    a_q, a_q_c, drive.f_norm, drive.dtp,
                                    drive.dtl)
        d_m_c, d_q_c = _rhs_detached_conj(a_p, np.conj(a_p), a_m, a_m_c,
                                          a_q, a_q_c, drive.dtl)
        return np.array([d_m / rot, d_m_c / np.conj(rot),
                         d_q / rot, d_q_c / np.conj(rot)])

    jac = np.zeros((4, 4), dtype=complex)
    for k in range(4):
        e_k = np.zeros(4, dtype=complex)
        e_k[k] = h
        jac[:, k] = (field(e_k) - field(-e_k)) / (2.0 * h)
    return jac


def langevin_covariance(m: np.ndarray, intrinsic_fraction: float,
                        n_samples: int, t_end: float, dt: float,
                        seed: int, t_burn: float = 50.0,
                        n_batches: int = 25) -> tuple[np.ndarray, np.ndarray]:
    """Monte-Carlo estimate of the zero-frequency output covariance.

    Integrates d(δA) = M δA dτ + T_in dW_in + T_loss dW_loss by
    Euler-Maruyama in the Wigner picture (vacuum inputs are complex
    white noise of variance ½ per unit time), forms the output field
    −A_in + T_out δA and averages it over the window after t_burn;
    across trajectories the scaled second moment of the window mean
    converges to the symmetrized output spectral density at ω = 0,
    reported in the quadrature basis (X₁, Y₁, X₂, Y₂).

    Two exact reformulations keep the cost manageable without changing
    the sampled law. First, the linear Euler recursion over a chunk of
    steps collapses to matrix products against the stacked noise
    (propagator powers for the end state, partial-sum blocks for the sum
    of visited states). Second, only the combination
    n = T_in dW_in + T_loss dW_loss drives the state, and conditioned on
    n the input increment is dW_in = (T_in/2)·n + ξ with ξ independent
    white noise of variance (T_loss²/4)·dτ; since ξ enters the output
    only through its window sum, that sum is drawn as a single Gaussian
    per trajectory.

    Returns (covariance, standard_errors), both 4×4, from batch means
    over ``n_batches`` trajectory groups. Deterministic for a given
    seed; batch seeds are spawned up front so the result does not depend
    on how work is grouped.
    """
    if n_samples < 1000:
        raise ValueError("n_samples must be >= 1e3 for meaningful errors")
    if np.max(np.linalg.eigvals(m).real) >= 0.0:
        raise UnstableError("M is not Hurwitz")
    t_in = math.sqrt(2.0 * (1.0 - intrinsic_fraction))
    t_loss = math.sqrt(2.0 * intrinsic_fraction)
    t_out = t_in
    n_burn = int(round(t_burn / dt))
    n_obs = int(round((t_end - t_burn) / dt))
    if n_obs <= 0:
        raise ValueError("t_end must exceed t_burn")
    t_obs = n_obs * dt

    u_block = np.array([[1.0, 1.0], [-1.0j, 1.0j]]) / math.sqrt(2.0)
    u = np.zeros((4, 4), dtype=complex)
    u[:2, :2] = u_block
    u[2:, 2:] = u_block

    seeds = np.random.SeedSequence(seed).spawn(n_batches)
    per_batch = [n_samples // n_batches] * n_batches
    for i in range(n_samples % n_batches):
        per_batch[i] += 1

    stepper = np.eye(4, dtype=complex) + dt * m  # Euler one-step map
    gens = [np.random.default_rng(ss) for ss in seeds]
    edges = np.concatenate(([0], np.cumsum(per_batch)))
    n_total = int(edges[-1])

    span_max = 128
    a_pows = [np.eye(4, dtype=complex)]
    for _ in range(span_max):
        a_pows.append(stepper @ a_pows[-1])
    c_pows = [a_pows[0].copy()]
    for j in range(1, span_max + 1):
        c_pows.append(c_pows[-1] + a_pows[j])

    def stacked(span: int) -> tuple[np.ndarray, np.ndarray]:
        prop = np.hstack([a_pows[span - 1 - j] for j in range(span)])
        zero = np.zeros((4, 4), dtype=complex)
        summ = np.hstack([c_pows[span - 2 - j] if j < span - 1 else zero
                          for j in range(span)])
        return prop, summ

    def draw_state_noise(span: int, target: np.ndarray) -> None:
        """Fill target(span, 4, n_total) with n_k, ⟨n n†⟩ = dτ·I."""
        scale = math.sqrt(dt / 2.0)
        for b in range(n_batches):
            lo, hi = edges[b], edges[b + 1]
            raw = gens[b].standard_normal((span, 2, 2, hi - lo))
            z = (raw[:, :, 0, :] + 1j * raw[:, :, 1, :]) * scale
            target[:, 0, lo:hi] = z[:, 0]
            target[:, 1, lo:hi] = np.conj(z[:, 0])
            target[:, 2, lo:hi] = z[:, 1]
            target[:, 3, lo:hi] = np.conj(z[:, 1])

    state = np.zeros((4, n_total), dtype=complex)
    out_sum = np.zeros((4, n_total), dtype=complex)
    noise = np.empty((span_max, 4, n_total), dtype=complex)

    for phase_steps, observe in ((n_burn, False), (n_obs, True)):
        done = 0
        while done < phase_steps:
            span = min(span_max, phase_steps - done)
            draw_state_noise(span, noise[:span])
            flat = noise[:span].reshape(span * 4, n_total)
            if observe:
                prop, summ = stacked(span)
                out_sum += (t_out * dt) * (c_pows[span - 1] @ state
                                           + summ @ flat)
                out_sum -= (t_in / 2.0) * noise[:span].sum(axis=0)
                state = a_pows[span] @ state + prop @ flat
            else:
                prop, _ = stacked(span)
                state = a_pows[span] @ state + prop @ flat
            done += span

    # window sum of the state-independent input residue, drawn exactly
    xi_scale = (t_loss / 2.0) * math.sqrt(t_obs / 2.0)
    xi = np.empty((4, n_total), dtype=complex)
    for b in range(n_batches):
        lo, hi = edges[b], edges[b + 1]
        raw = gens[b].standard_normal((2, 2, hi - lo))
        z = (raw[:, 0, :] + 1j * raw[:, 1, :]) * xi_scale
        xi[0, lo:hi] = z[0]
        xi[1, lo:hi] = np.conj(z[0])
        xi[2, lo:hi] = z[1]
        xi[3, lo:hi] = np.conj(z[1])
    out_sum -= xi

    quad = (u @ (out_sum / t_obs)).real
    batch_covs = np.zeros((n_batches, 4, 4))
    for b in range(n_batches):
        q = quad[:, edges[b]:edges[b + 1]]
        est = t_obs * (q @ q.T) / per_batch[b]
        batch_covs[b] = 0.5 * (est + est.T)
    cov = batch_covs.mean(axis=0)
    se = batch_covs.std(axis=0, ddof=1) / math.sqrt(n_batches)
    return cov, se


def brute_force_duan(sigma: np.ndarray, grid_n: int = 1024,
                     ) -> tuple[float, tuple[float, float]]:
    """Exhaustive witness minimum over a grid_n × grid_n angle grid."""
    if grid_n < 64:
        raise ValueError("grid_n must be >= 64")
    v_xm = np.array([1.0, 0.0, -1.0, 0.0]) / math.sqrt(2.0)
    v_ym = np.array([0.0, 1.0, 0.0, -1.0]) / math.sqrt(2.0)
    v_xp = np.array([1.0, 0.0, 1.0, 0.0]) / math.sqrt(2.0)
    v_yp = np.array([0.0, 1.0, 0.0, 1.0]) / math.sqrt(2.0)
    thetas = np.linspace(0.0, 2.0 * math.pi, grid_n, endpoint=False)
    cos_t, sin_t = np.cos(thetas), np.sin(thetas)
    a_m = v_xm @ sigma @ v_xm
    b_m = v_ym @ sigma @ v_ym
    c_m = v_xm @ sigma @ v_ym
    var_m = cos_t ** 2 * a_m + sin_t ** 2 * b_m - 2.0 * sin_t * cos_t * c_m
    a_p = v_xp @ sigma @ v_xp
    b_p = v_yp @ sigma @ v_yp
    c_p = v_xp @ sigma @ v_yp
    var_p = cos_t ** 2 * b_p + sin_t ** 2 * a_p + 2.0 * sin_t * cos_t * c_p
    total = (var_p[:, None] + var_m[None, :]
             - np.abs(np.cos(thetas[:, None] - thetas[None, :])))
    i, j = np.unravel_index(int(np.argmin(total)), total.shape)
    return float(total[i, j]), (float(thetas[i]), float(thetas[j]))
