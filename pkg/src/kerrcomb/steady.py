"""Steady states of the pumped three-mode system (pump, signal, idler).

In normalized units (time in 1/Γ, photon-number amplitudes, detunings in
units of Γ) the mean-field equations have the steady solutions of two
kinds. With x = A_p² the intracavity pump and y = A² the common
signal/idler power, the full system reads

    x²  = 1 + (Δ̃_L − 2x − 3y)²                      (pair gain balance)
    F²  = x [ (1 + 2y/x)² + (Δ̃_p − x − (2y/x)(Δ̃_L − 3y))² ]
    sin φ = 1/x
    cos φ = (Δ̃_L − 3y − 2x)/x
    sin ψ = (√x/F) (Δ̃_p − x − (2y/x)(Δ̃_L − 3y))
    cos ψ = (√x/F) (1 + 2y/x)

with φ the locked pair-phase combination and ψ the pump phase lag behind
the drive. Setting y = 0 collapses the second line to the familiar Kerr
bistability cubic F² = x(1 + (Δ̃_p − x)²). Notes on the derivation of
this system from the mean-field equations live in docs/derivation.md.

The pair line forces x ≥ 1 on the nontrivial branch, and y > 0 is only
possible for Δ̃_L > √3, which is why instability and oscillation set in
past that detuning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "Branch",
    "SteadyState",
    "ThresholdReport",
    "NoConvergenceError",
    "pump_only_branches",
    "parametric_branch",
    "threshold",
    "bistability_turning_points",
    "full_jacobian",
    "fully_stable",
]

_RESIDUAL_TOL = 1e-9
_STEP_TOL = 1e-12
_MAX_ITER = 100


class NoConvergenceError(RuntimeError):
    """Root polishing failed to converge within the iteration cap."""


class Branch(Enum):
    PUMP_ONLY = "PumpOnly"
    PARAMETRIC = "Parametric"


@dataclass(frozen=True)
class SteadyState:
    """One steady solution: powers, locked phases, branch and stability.

    ap2 and a2 are the dimensionless intracavity pump and pair powers;
    phi is meaningful only on the parametric branch (stored as 0 below
    threshold, where the pair phase is undefined).
    """

    ap2: float
    a2: float
    phi: float
    psi: float
    branch: Branch
    stable: bool

    def __post_init__(self) -> None:
        if self.ap2 < 0 or self.a2 < 0:
            raise ValueError("powers must be nonnegative")


@dataclass(frozen=True)
class ThresholdReport:
    """Minimal drive F admitting a parametric solution, if any."""

    f_threshold: float
    exists: bool


def _cubic_roots(dtp: float, f_sq: float) -> list[float]:
    """Real nonnegative roots of x(1 + (dtp − x)²) = F², via Cardano.

    The cubic is x³ − 2·dtp·x² + (1 + dtp²)x − F² = 0. Roots are Newton
    polished against the monic cubic and deduplicated.
    """
    b = -2.0 * dtp
    c = 1.0 + dtp * dtp
    d = -f_sq
    if f_sq == 0.0:
        return [0.0]
    # depressed cubic t³ + pt + q with x = t − b/3
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    shift = -b / 3.0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc > 0.0:
        s = math.sqrt(disc)
        u = math.copysign(abs(-q / 2.0 + s) ** (1.0 / 3.0), -q / 2.0 + s)
        v = math.copysign(abs(-q / 2.0 - s) ** (1.0 / 3.0), -q / 2.0 - s)
        roots = [u + v + shift]
    elif p == 0.0:
        roots = [shift]
    else:
        # three real roots (trigonometric form)
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, 3.0 * q / (p * m)))
        theta = math.acos(arg) / 3.0
        roots = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) + shift
                 for k in range(3)]

    def poly(x: float) -> float:
        return ((x + b) * x + c) * x + d

    def dpoly(x: float) -> float:
        return (3.0 * x + 2.0 * b) * x + c

    polished = []
    for x in roots:
        for _ in range(40):
            fx, dfx = poly(x), dpoly(x)
            if dfx == 0.0:
                break
            step = fx / dfx
            x -= step
            if abs(step) < 1e-16 * max(1.0, abs(x)):
                break
        if x > -1e-12:
            polished.append(max(x, 0.0))
    polished.sort()
    out: list[float] = []
    for x in polished:
        if not out or abs(x - out[-1]) > 1e-9 * max(1.0, x):
            out.append(x)
    return out


def _pump_only_psi(dtp: float, x: float) -> float:
    """Pump phase lag: tan ψ = (Δ̃_p − x) with cos ψ ∝ 1."""
    return math.atan2(dtp - x, 1.0)


def pump_only_branches(f_norm: float, dtp: float) -> list[SteadyState]:
    """All pump-only steady states (y = 0), sorted by pump power.

    Between one and three roots exist; with three, the middle one is the
    unstable back-bend of the bistability curve. Stability here is the
    single-mode Kerr rule (slope of F² versus x); parametric instability
    of these states is the business of the fluctuation matrix.
    """
    if not (math.isfinite(f_norm) and math.isfinite(dtp)):
        raise ValueError("f_norm and dtp must be finite")
    if f_norm < 0:
        raise ValueError("f_norm must be nonnegative")
    roots = _cubic_roots(dtp, f_norm * f_norm)
    n = len(roots)
    states = []
    for i, x in enumerate(roots):
        stable = not (n == 3 and i == 1)
        if n == 2 and i == 1:
            stable = False  # fold point, marginal
        states.append(SteadyState(ap2=x, a2=0.0, phi=0.0,
                                  psi=_pump_only_psi(dtp, x),
                                  branch=Branch.PUMP_ONLY, stable=stable))
    return states


def bistability_turning_points(dtp: float) -> tuple[tuple[float, float],
                                                    tuple[float, float]]:
    """Fold points ((x−, F²−), (x+, F²+)) of the pump-only cubic.

    Valid for dtp ≥ √3; the folds merge at dtp = √3 where
    x = 2√3/3 and F² = 8√3/9.
    """
    if dtp * dtp < 3.0 - 1e-12:
        raise ValueError("no turning points below dtp = sqrt(3)")
    s = math.sqrt(max(dtp * dtp - 3.0, 0.0))
    out = []
    for sign in (+1.0, -1.0):
        x = (2.0 * dtp + sign * s) / 3.0
        out.append((x, x * (1.0 + (dtp - x) ** 2)))
    return out[1], out[0]


def full_jacobian(state: SteadyState, dtp: float, dtl: float) -> np.ndarray:
    """Classical 6×6 Jacobian of the three-mode system at a steady state.

    Doubled basis (a_p, a_p†, a₋, a₋†, a₊, a₊†) in the drive-phase-zero
    gauge. The pair-only 4×4 fluctuation matrix treats the pump as
    frozen and misses pump-mediated instabilities of oscillating
    states; branch stability uses this full linearization instead.
    """
    theta_p = -state.psi
    theta_pair = 0.5 * (state.phi + 2.0 * theta_p)
    a_p = math.sqrt(state.ap2) * np.exp(1j * theta_p)
    a_m = math.sqrt(state.a2) * np.exp(1j * theta_pair)
    a_q = a_m

    def pump_row(ap, apc, am, amc, aq, aqc):
        return (
            -(1.0 + 1j * dtp) + 1j * (2 * apc * ap + 2 * amc * am
                                      + 2 * aqc * aq),
            1j * ap * ap + 2j * am * aq,
            2j * amc * ap + 2j * apc * aq,
            2j * am * ap,
            2j * aqc * ap + 2j * apc * am,
            2j * aq * ap,
        )

    def pair_row(ap, apc, am, amc, aq, aqc, det):
        # derivative of the a_m equation; the a_q row follows by swap
        return (
            2j * apc * am + 2j * ap * aqc,
            2j * ap * am,
            -(1.0 + 1j * det) + 1j * (2 * apc * ap + 2 * amc * am
                                      + 2 * aqc * aq),
            1j * am * am,
            2j * aqc * am,
            2j * aq * am + 1j * ap * ap,
        )

    apc, amc, aqc = np.conj(a_p), np.conj(a_m), np.conj(a_q)
    rp = pump_row(a_p, apc, a_m, amc, a_q, aqc)
    rm = pair_row(a_p, apc, a_m, amc, a_q, aqc, dtl)
    rq_src = pair_row(a_p, apc, a_q, aqc, a_m, amc, dtl)
    # undo the m<->q argument swap in the column ordering
    rq = (rq_src[0], rq_src[1], rq_src[4], rq_src[5], rq_src[2], rq_src[3])
    jac = np.zeros((6, 6), dtype=complex)
    swap = (1, 0, 3, 2, 5, 4)
    for row, vals in ((0, rp), (2, rm), (4, rq)):
        jac[row] = vals
    for row in (0, 2, 4):
        for col in range(6):
            jac[row + 1, swap[col]] = np.conj(jac[row, col])
    return jac


def fully_stable(state: SteadyState, dtp: float, dtl: float,
                 tol: float = 1e-7) -> bool:
    """True stability under the complete three-mode linearization.

    Parametric states carry one exact zero mode (free signal/idler
    phase split); it is discarded before checking that everything else
    decays.
    """
    eigs = np.linalg.eigvals(full_jacobian(state, dtp, dtl))
    if state.branch is Branch.PARAMETRIC and state.a2 > 0:
        idx = int(np.argmin(np.abs(eigs)))
        if abs(eigs[idx]) < tol:
            eigs = np.delete(eigs, idx)
    return bool(np.max(eigs.real) < 0.0)


def _pair_residuals(x: float, y: float, f_norm: float,
                    dtp: float, dtl: float) -> tuple[float, float]:
    u = dtl - 2.0 * x - 3.0 * y
    r1 = x * x - 1.0 - u * u
    g = 1.0 + 2.0 * y / x
    h = dtp - x - (2.0 * y / x) * (dtl - 3.0 * y)
    r2 = x * (g * g + h * h) - f_norm * f_norm
    return r1, r2


def _polish_pair(x: float, y: float, f_norm: float, dtp: float,
                 dtl: float) -> tuple[float, float]:
    """Damped Newton on the two-equation residual."""
    for _ in range(_MAX_ITER):
        r1, r2 = _pair_residuals(x, y, f_norm, dtp, dtl)
        if abs(r1) < _RESIDUAL_TOL and abs(r2) < _RESIDUAL_TOL:
            return x, y
        u = dtl - 2.0 * x - 3.0 * y
        g = 1.0 + 2.0 * y / x
        h = dtp - x - (2.0 * y / x) * (dtl - 3.0 * y)
        j11 = 2.0 * x + 4.0 * u
        j12 = 6.0 * u
        dg_dx = -2.0 * y / (x * x)
        dg_dy = 2.0 / x
        dh_dx = -1.0 + (2.0 * y / (x * x)) * (dtl - 3.0 * y)
        dh_dy = -(2.0 / x) * (dtl - 3.0 * y) + (2.0 * y / x) * 3.0
        j21 = g * g + h * h + x * (2.0 * g * dg_dx + 2.0 * h * dh_dx)
        j22 = x * (2.0 * g * dg_dy + 2.0 * h * dh_dy)
        det = j11 * j22 - j12 * j21
        if det == 0.0 or not math.isfinite(det):
            break
        dx = (-r1 * j22 + r2 * j12) / det
        dy = (-j11 * r2 + j21 * r1) / det
        scale = 1.0
        while scale > 1e-4 and (x + scale * dx <= 1.0 or y + scale * dy <= 0.0):
            scale *= 0.5
        x += scale * dx
        y += scale * dy
        if math.hypot(scale * dx, scale * dy) < _STEP_TOL:
            break
    r1, r2 = _pair_residuals(x, y, f_norm, dtp, dtl)
    if abs(r1) < _RESIDUAL_TOL and abs(r2) < _RESIDUAL_TOL:
        return x, y
    raise NoConvergenceError(
        f"pair root polishing stalled at residuals ({r1:.3e}, {r2:.3e})")


def _branch_drive_curve(xs: np.ndarray, sign: float, dtp: float,
                        dtl: float) -> tuple[np.ndarray, np.ndarray]:
    """(y, F²) along one sign branch of the gain-balance line."""
    s = sign * np.sqrt(np.maximum(xs * xs - 1.0, 0.0))
    ys = (dtl - 2.0 * xs - s) / 3.0
    g = 1.0 + 2.0 * ys / xs
    h = dtp - xs - (2.0 * ys / xs) * (dtl - 3.0 * ys)
    return ys, xs * (g * g + h * h)


def parametric_branch(f_norm: float, dtp: float, dtl: float,
                      scan_points: int = 1200) -> list[SteadyState]:
    """All steady states with nonzero signal/idler power at this drive.

    The gain-balance line x² = 1 + (Δ̃_L − 2x − 3y)² is swept in x on
    both square-root branches; crossings of the drive equation are
    bracketed on the sweep and Newton polished. Stability comes from the
    eigenvalues of the fluctuation matrix (the exactly-zero mode along
    the free signal/idler phase split is disregarded).
    """
    if f_norm <= 0:
        return []
    if dtl <= math.sqrt(3.0):
        return []  # y > 0 requires dtl > sqrt(3)
    from .fluct import build_m, parametric_mode_stable

    # y > 0 confines x between roots of 3x² − 4·dtl·x + (dtl² + 1):
    # branch u = +√(x²−1) lives on [1, x_dn), branch u = −√(x²−1) on
    # (x_dn, x_up) for dtl ≤ 2 and [1, x_up) otherwise. Scanning exactly
    # these intervals keeps the resolution adaptive and catches
    # crossings that hug the y = 0 boundary.
    s3 = math.sqrt(dtl * dtl - 3.0)
    x_dn = (2.0 * dtl - s3) / 3.0
    x_up = (2.0 * dtl + s3) / 3.0
    x_cap = max(f_norm * f_norm, 1.0) + 1.0
    intervals = []
    if dtl > 2.0:
        intervals.append((+1.0, 1.0, min(x_dn, x_cap)))
        intervals.append((-1.0, 1.0, min(x_up, x_cap)))
    else:
        intervals.append((+1.0, 1.0, min(x_dn, x_cap)))
        intervals.append((-1.0, x_dn, min(x_up, x_cap)))

    solutions: list[tuple[float, float]] = []
    for sign, a, b in intervals:
        if not b > a:
            continue
        xs = np.linspace(a, b, scan_points)
        ys, f_sq = _branch_drive_curve(xs, sign, dtp, dtl)
        ok = ys > 0.0
        resid = f_sq - f_norm * f_norm
        for i in range(len(xs) - 1):
            if not (ok[i] and ok[i + 1]):
                continue
            if resid[i] == 0.0 or resid[i] * resid[i + 1] < 0.0:
                # bisect the bracket on this branch, then polish in 2-D
                lo, hi = xs[i], xs[i + 1]
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    _, fm = _branch_drive_curve(np.array([mid]), sign, dtp, dtl)
                    if (fm[0] - f_norm * f_norm) * resid[i] > 0.0:
                        lo = mid
                    else:
                        hi = mid
                x0 = 0.5 * (lo + hi)
                y0 = (dtl - 2.0 * x0
                      - sign * math.sqrt(max(x0 * x0 - 1.0, 0.0))) / 3.0
                if y0 <= 0.0:
                    continue
                try:
                    x, y = _polish_pair(x0, y0, f_norm, dtp, dtl)
                except NoConvergenceError:
                    continue
                if y > 0.0:
                    solutions.append((x, y))

    deduped: list[tuple[float, float]] = []
    for x, y in sorted(solutions):
        if not any(abs(x - a) < 1e-7 and abs(y - b) < 1e-7
                   for a, b in deduped):
            deduped.append((x, y))

    states = []
    for x, y in deduped:
        sin_phi = 1.0 / x
        cos_phi = (dtl - 3.0 * y - 2.0 * x) / x
        phi = math.atan2(sin_phi, cos_phi)
        sin_psi = (math.sqrt(x) / f_norm) * (
            dtp - x - (2.0 * y / x) * (dtl - 3.0 * y))
        cos_psi = (math.sqrt(x) / f_norm) * (1.0 + 2.0 * y / x)
        psi = math.atan2(sin_psi, cos_psi)
        state = SteadyState(ap2=x, a2=y, phi=phi, psi=psi,
                            branch=Branch.PARAMETRIC, stable=False)
        # pair-subspace stability (quantum-side gate) plus the full
        # three-mode linearization: the frozen-pump matrix alone misses
        # pump-mediated instabilities of oscillating states
        stable = (parametric_mode_stable(build_m(state, dtl))
                  and fully_stable(state, dtp, dtl))
        state = SteadyState(ap2=x, a2=y, phi=phi, psi=psi,
                            branch=Branch.PARAMETRIC, stable=stable)
        states.append(state)
    return states


def threshold(dtp: float, dtl: float, f_max: float = 20.0,
              scan_points: int = 20000) -> ThresholdReport:
    """Lowest drive F at which a parametric solution appears.

    The drive equation along the gain-balance line gives the attainable
    F² values directly, so the scan walks that curve (which never misses
    narrow existence windows, unlike probing F blindly), brackets its
    minimum, and a bisection on actual parametric_branch existence
    sharpens the edge. Reports exists = False when nothing oscillates up
    to f_max.
    """
    if dtl <= math.sqrt(3.0):
        return ThresholdReport(f_threshold=math.nan, exists=False)
    # y > 0 confines x between the roots of 3x² − 4·dtl·x + dtl² + 1
    x_top = (2.0 * dtl + math.sqrt(dtl * dtl - 3.0)) / 3.0
    xs = np.linspace(1.0, min(x_top + 1.0, f_max * f_max + 1.0), scan_points)
    best = math.inf
    for sign in (+1.0, -1.0):
        ys, f_sq = _branch_drive_curve(xs, sign, dtp, dtl)
        ok = (ys > 0.0) & (f_sq > 0.0)
        if ok.any():
            best = min(best, float(np.min(f_sq[ok])))
    if not math.isfinite(best) or best > f_max * f_max:
        return ThresholdReport(f_threshold=math.nan, exists=False)

    def exists_at(f: float) -> bool:
        return bool(parametric_branch(f, dtp, dtl))

    # The existence set in F² is bounded on both sides, so probe just
    # above the curve minimum on a geometric ladder (stepping too far up
    # can overshoot a narrow window entirely), then bisect the edge.
    hi = None
    for eps in (1e-12, 1e-9, 1e-6, 1e-4, 1e-3, 1e-2):
        cand = math.sqrt(best * (1.0 + eps))
        if exists_at(cand):
            hi = cand
            break
    if hi is None:
        return ThresholdReport(f_threshold=math.nan, exists=False)
    lo = math.sqrt(best) * (1.0 - 1e-6)
    for _ in range(60):
        if not exists_at(lo):
            break
        lo *= 1.0 - 1e-4
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if exists_at(mid):
            hi = mid
        else:
            lo = mid
    return ThresholdReport(f_threshold=hi, exists=True)
