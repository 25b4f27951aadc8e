"""Operating-regime classification and phase-diagram sweeps.

Each point of the (pump detuning, pump amplitude) plane is classified by
what the steady-state and fluctuation analysis finds there:

    MI  multiple pump-only roots, or a finite signal/idler solution, or
        a fluctuation eigenvalue with nonnegative real part: the point
        hosts modulation instability / oscillation and the below-threshold
        entanglement analysis does not apply;
    ET  a unique stable root whose minimized witness is meaningfully
        negative (entanglement, tunable with the pump);
    NE  a unique stable root with witness at or above the −ε boundary.

Classification is a pure function of the normalized drive, so sweeps
parallelize freely and assemble deterministically.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .duan import minimize_duan, quadrature_covariance
from .fluct import build_m, max_eigenvalue_real, noise_spectrum
from .model import ModalFamily, NormalizedDrive, OperatingPoint, normalize
from .steady import parametric_branch, pump_only_branches

__all__ = [
    "Phase",
    "PhasePoint",
    "SweepGrid",
    "JointPumpResult",
    "NoFeasiblePointError",
    "classify_drive",
    "classify_point",
    "sweep",
    "best_joint_pump",
    "EPSILON_NE",
    "MI_MARGIN_CELLS",
]

EPSILON_NE = 1e-3        # NE/ET boundary on the witness value
MI_MARGIN_CELLS = 2      # cells kept clear of MI when optimizing


class NoFeasiblePointError(ValueError):
    """No ET cell survives the MI-margin exclusion."""


class Phase(Enum):
    NE = "NE"
    ET = "ET"
    MI = "MI"


@dataclass(frozen=True)
class PhasePoint:
    """Classification record for one grid cell.

    c_min is NaN on MI cells, where the below-threshold witness is not
    defined. n_branches counts pump-only roots; max_eig_re is evaluated
    at the lowest stable root.
    """

    delta_p0: float      # Hz
    a_pin: float         # V/m
    phase: Phase
    c_min: float
    n_branches: int
    max_eig_re: float
    has_parametric: bool = False
    error: str = ""


@dataclass(frozen=True)
class SweepGrid:
    """Classified grid over (delta axis, amplitude axis) for one pair L."""

    family: str
    L: int
    delta_axis: np.ndarray      # Hz, strictly monotone
    amplitude_axis: np.ndarray  # V/m, strictly monotone
    points: tuple               # row-major: points[i][j] ~ (delta[i], amp[j])

    def __post_init__(self) -> None:
        for axis in (self.delta_axis, self.amplitude_axis):
            if len(axis) == 0 or np.any(np.diff(axis) <= 0):
                raise ValueError("axes must be non-empty, strictly increasing")
        if len(self.points) != len(self.delta_axis) or any(
                len(row) != len(self.amplitude_axis) for row in self.points):
            raise ValueError("points shape must match the axes")

    def phase_array(self) -> np.ndarray:
        return np.array([[p.phase.value for p in row] for row in self.points])

    def c_min_array(self) -> np.ndarray:
        return np.array([[p.c_min for p in row] for row in self.points])

    def count(self, phase: Phase) -> int:
        return sum(p.phase is phase for row in self.points for p in row)


def classify_drive(drive: NormalizedDrive, omega: float = 0.0,
                   epsilon_ne: float = EPSILON_NE,
                   intrinsic_fraction: float = 0.45,
                   delta_p0: float = 0.0,
                   a_pin: float = 0.0) -> PhasePoint:
    """Classify a normalized drive point (the sweep work-horse)."""
    try:
        pump_roots = pump_only_branches(drive.f_norm, drive.dtp)
        par = parametric_branch(drive.f_norm, drive.dtp, drive.dtl)
        n_roots = len(pump_roots)
        selected = next((s for s in pump_roots if s.stable), pump_roots[0])
        sys_sel = build_m(selected, drive.dtl,
                          intrinsic_fraction=intrinsic_fraction)
        eig_re = max_eigenvalue_real(sys_sel)
        if n_roots > 1 or par or eig_re >= 0.0:
            return PhasePoint(delta_p0=delta_p0, a_pin=a_pin, phase=Phase.MI,
                              c_min=math.nan, n_branches=n_roots,
                              max_eig_re=eig_re, has_parametric=bool(par))
        sigma = quadrature_covariance(noise_spectrum(sys_sel, omega))
        c_min = minimize_duan(sigma).c_min
        phase = Phase.ET if c_min < -epsilon_ne else Phase.NE
        return PhasePoint(delta_p0=delta_p0, a_pin=a_pin, phase=phase,
                          c_min=c_min, n_branches=n_roots, max_eig_re=eig_re)
    except Exception as exc:  # per-cell marker, the grid must complete
        return PhasePoint(delta_p0=delta_p0, a_pin=a_pin, phase=Phase.MI,
                          c_min=math.nan, n_branches=0, max_eig_re=math.nan,
                          error=f"{type(exc).__name__}: {exc}")


def classify_point(op: OperatingPoint, resonator, omega: float = 0.0,
                   epsilon_ne: float = EPSILON_NE,
                   truncation_order: int = 3) -> PhasePoint:
    """Classify a physical operating point."""
    drive = normalize(op, resonator, truncation_order)
    return classify_drive(drive, omega=omega, epsilon_ne=epsilon_ne,
                          intrinsic_fraction=op.family.intrinsic_fraction,
                          delta_p0=op.delta_p0, a_pin=op.a_pin)


def _sweep_row(args) -> tuple[int, list[PhasePoint]]:
    (i, family, resonator, L, delta, amps, omega, epsilon_ne, order) = args
    row = []
    for a_pin in amps:
        op = OperatingPoint(family=family, L=L, delta_p0=delta, a_pin=a_pin)
        row.append(classify_point(op, resonator, omega=omega,
                                  epsilon_ne=epsilon_ne,
                                  truncation_order=order))
    return i, row


def sweep(family: ModalFamily, resonator, L: int,
          delta_axis: np.ndarray, amplitude_axis: np.ndarray,
          omega: float = 0.0, epsilon_ne: float = EPSILON_NE,
          truncation_order: int = 3, workers: int = 1) -> SweepGrid:
    """Classify every cell of the (detuning, amplitude) grid for one L.

    Cells are independent; with workers > 1 rows are evaluated in a
    process pool and reassembled by index, so the output is identical
    for any worker count.
    """
    delta_axis = np.asarray(delta_axis, dtype=float)
    amplitude_axis = np.asarray(amplitude_axis, dtype=float)
    tasks = [(i, family, resonator, L, float(d), amplitude_axis,
              omega, epsilon_ne, truncation_order)
             for i, d in enumerate(delta_axis)]
    rows: list[list[PhasePoint] | None] = [None] * len(delta_axis)
    if workers <= 1:
        for task in tasks:
            i, row = _sweep_row(task)
            rows[i] = row
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, row in pool.map(_sweep_row, tasks, chunksize=1):
                rows[i] = row
    return SweepGrid(family=family.label, L=L, delta_axis=delta_axis,
                     amplitude_axis=amplitude_axis,
                     points=tuple(tuple(row) for row in rows))


def _mi_exclusion_mask(grids: list[SweepGrid], margin: int) -> np.ndarray:
    """Cells unusable for optimization: MI anywhere in the L stack, or
    within ``margin`` cells (Chebyshev) of such a cell."""
    shape = (len(grids[0].delta_axis), len(grids[0].amplitude_axis))
    mi = np.zeros(shape, dtype=bool)
    for grid in grids:
        mi |= grid.phase_array() == Phase.MI.value
    if margin <= 0:
        return mi
    padded = np.pad(mi, margin, constant_values=False)
    out = np.zeros_like(mi)
    for di in range(-margin, margin + 1):
        for dj in range(-margin, margin + 1):
            out |= padded[margin + di:margin + di + shape[0],
                          margin + dj:margin + dj + shape[1]]
    return out


@dataclass(frozen=True)
class JointPumpResult:
    """Shared-detuning optimum across modal families."""

    delta_p0: float                     # Hz, shared by all families
    amplitudes: dict[str, float]        # family -> V/m
    worst_c_min: float                  # max over families of their best
    per_family_c_min: dict[str, float]


def best_joint_pump(families: list[ModalFamily], resonator, Ls: list[int],
                    delta_axis: np.ndarray, amplitude_axis: np.ndarray,
                    omega: float = 0.0, epsilon_ne: float = EPSILON_NE,
                    margin: int = MI_MARGIN_CELLS, workers: int = 1,
                    truncation_order: int = 3,
                    ) -> tuple[JointPumpResult, dict[str, list[SweepGrid]]]:
    """Best single pump frequency with per-family amplitudes.

    All families share one detuning value (one laser pumps them all);
    each family chooses the amplitude minimizing its worst witness value
    across the requested pair indices, keeping ``margin`` cells away
    from anything MI. The detuning minimizing the worst family-best is
    returned together with all the sweeps behind the decision.
    """
    if not families:
        raise ValueError("at least one family required")
    sweeps: dict[str, list[SweepGrid]] = {}
    masks: dict[str, np.ndarray] = {}
    for fam in families:
        grids = [sweep(fam, resonator, L, delta_axis, amplitude_axis,
                       omega=omega, epsilon_ne=epsilon_ne,
                       truncation_order=truncation_order, workers=workers)
                 for L in Ls]
        sweeps[fam.label] = grids
        masks[fam.label] = _mi_exclusion_mask(grids, margin)

    best: JointPumpResult | None = None
    for i, delta in enumerate(delta_axis):
        amplitudes: dict[str, float] = {}
        per_family: dict[str, float] = {}
        feasible = True
        for fam in families:
            worst_by_amp = np.max(
                np.stack([g.c_min_array()[i] for g in sweeps[fam.label]]),
                axis=0)
            worst_by_amp = np.where(masks[fam.label][i], np.inf, worst_by_amp)
            j = int(np.argmin(worst_by_amp))
            val = float(worst_by_amp[j])
            if not math.isfinite(val) or val >= -epsilon_ne:
                feasible = False
                break
            amplitudes[fam.label] = float(amplitude_axis[j])
            per_family[fam.label] = val
        if not feasible:
            continue
        worst = max(per_family.values())
        if best is None or worst < best.worst_c_min:
            best = JointPumpResult(delta_p0=float(delta),
                                   amplitudes=amplitudes,
                                   worst_c_min=worst,
                                   per_family_c_min=per_family)
    if best is None:
        raise NoFeasiblePointError(
            "no shared detuning offers an ET cell outside the MI margin "
            "for every family")
    return best, sweeps
