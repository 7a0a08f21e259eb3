"""Spectral-topology invariants of the chain.

The braiding degree is the winding of ``det(H(k) - Tr H(k)/2)`` around the
origin over one momentum cycle; the point-gap winding number w(E0) is the
winding of ``det(H(k) - E0)``. Both are evaluated by accumulating phase
differences of the determinant samples (each step bounded by pi in
magnitude), which is exactly integer in the resolved limit and needs no
branch-cut bookkeeping.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import skin
from .errors import (
    GridTooCoarseError,
    NumericalError,
    OpenTrajectoryError,
    PhaseBoundaryError,
    ReferenceOnSpectrumError,
    ValidationError,
)
from .eigensolve import BandTrajectories
from .model import GaugeVector, ModelParams, analytic_eigenvalues, bloch_hamiltonian

DEFAULT_KPOINTS = 1024
REFINED_KPOINTS = 4096
MIN_KPOINTS = 64

#: Accepted distance of the raw winding from the nearest integer.
INTEGRALITY_TOL = 0.05

#: Relative floor below which a determinant sample counts as a zero hit.
DET_ZERO_TOL = 1e-12

#: Minimum distance of a reference energy from the spectral curve.
SPECTRUM_DISTANCE_TOL = 1e-9

#: Default relative tolerance for exceptional-point detection.
EP_TOL = 1e-3

#: Sentinel stored in phase-diagram cells where the braiding degree rejects.
NU_SENTINEL = 127

STANDARD_DL = GaugeVector(0.0, 0.0, 1.0)
STANDARD_DR = GaugeVector(1.0, 0.0, 0.0)


@dataclass(frozen=True)
class KGrid:
    """Uniform closed momentum grid: n points over [0, 2*pi), first point 0."""

    n_points: int = DEFAULT_KPOINTS

    def __post_init__(self):
        if self.n_points < 1:
            raise ValidationError(f"k grid needs at least 1 point, got {self.n_points}")

    @property
    def values(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_points) / self.n_points

    def refined(self) -> "KGrid":
        return KGrid(max(4 * self.n_points, REFINED_KPOINTS))


def _require_topology_grid(grid: KGrid) -> KGrid:
    if grid.n_points < MIN_KPOINTS:
        raise ValidationError(
            f"topology computations need >= {MIN_KPOINTS} k points, got {grid.n_points}"
        )
    return grid


def winding_number(values) -> float:
    """Raw winding of a closed loop of complex samples around the origin.

    Sums the phase increments between consecutive samples including the
    wrap-around step; every increment lies in (-pi, pi], so the loop must
    be sampled finely enough that the true phase never advances by more
    than pi per step.
    """
    v = np.asarray(values, dtype=complex)
    steps = np.angle(np.roll(v, -1) / v)
    return float(np.sum(steps) / (2.0 * np.pi))


def _guarded_integer_winding(det_samples: np.ndarray, what: str) -> int:
    mags = np.abs(det_samples)
    peak = mags.max()
    if peak == 0.0 or mags.min() < DET_ZERO_TOL * peak:
        raise PhaseBoundaryError(
            f"{what}: determinant vanishes on the grid (exceptional point hit)"
        )
    raw = winding_number(det_samples)
    if not np.isfinite(raw) or abs(raw - round(raw)) > INTEGRALITY_TOL:
        raise GridTooCoarseError(
            f"{what}: winding {raw:.4f} is not within {INTEGRALITY_TOL} of an integer; "
            "grid too coarse"
        )
    return int(round(raw))


def _det2(samples: np.ndarray) -> np.ndarray:
    return samples[..., 0, 0] * samples[..., 1, 1] - samples[..., 0, 1] * samples[..., 1, 0]


def braiding_degree_of_samples(H_samples) -> int:
    """Braiding degree from 2x2 matrix samples over one closed k loop.

    The trace is subtracted pointwise before taking the determinant, so any
    multiple of the identity added to the samples cancels. Useful when the
    loop comes from measured data rather than model parameters.
    """
    H = np.asarray(H_samples, dtype=complex)
    if H.ndim != 3 or H.shape[1:] != (2, 2):
        raise ValidationError(f"expected samples of shape (n, 2, 2), got {H.shape}")
    half_tr = 0.5 * (H[:, 0, 0] + H[:, 1, 1])
    shifted = H - half_tr[:, None, None] * np.eye(2)
    return _guarded_integer_winding(_det2(shifted), "braiding degree")


def braiding_degree(p: ModelParams, grid: KGrid | None = None) -> int:
    """Integer braiding degree of the two Bloch bands.

    On an integrality-guard trip the grid is refined once (to at least
    ``REFINED_KPOINTS``) before giving up; a determinant zero on the grid
    raises immediately since it signals a phase boundary, not a resolution
    problem.
    """
    grid = _require_topology_grid(grid or KGrid())
    H = bloch_hamiltonian(p, grid.values)
    try:
        return braiding_degree_of_samples(H)
    except GridTooCoarseError:
        if grid.n_points >= REFINED_KPOINTS:
            raise
    return braiding_degree_of_samples(bloch_hamiltonian(p, grid.refined().values))


def _check_reference_energy(p: ModelParams, E0: complex, grid: KGrid) -> None:
    e_plus, e_minus = analytic_eigenvalues(p, grid.values)
    dist = min(np.min(np.abs(e_plus - E0)), np.min(np.abs(e_minus - E0)))
    if dist < SPECTRUM_DISTANCE_TOL:
        raise ReferenceOnSpectrumError(
            f"reference energy {E0} lies on the spectrum (distance {dist:.2e})"
        )


def spectral_winding(p: ModelParams, E0: complex, grid: KGrid | None = None) -> int:
    """Point-gap winding number of the Bloch spectrum around ``E0``."""
    grid = _require_topology_grid(grid or KGrid())
    _check_reference_energy(p, E0, grid)
    H = bloch_hamiltonian(p, grid.values) - E0 * np.eye(2)
    try:
        return _guarded_integer_winding(_det2(H), "spectral winding")
    except GridTooCoarseError:
        if grid.n_points >= REFINED_KPOINTS:
            raise
    fine = grid.refined()
    H = bloch_hamiltonian(p, fine.values) - E0 * np.eye(2)
    return _guarded_integer_winding(_det2(H), "spectral winding")


def spectral_winding_profile(
    p: ModelParams,
    n_re: int = 20,
    n_im: int = 20,
    pad: float = 0.0,
    grid: KGrid | None = None,
    min_distance: float = 1e-6,
):
    """Winding numbers on a rectangular grid of reference energies.

    The grid spans the bounding box of the Bloch spectrum inflated by
    ``pad`` (a fraction of each box dimension). Probes closer than
    ``min_distance`` to the spectral curve are skipped. Returns a list of
    ``(E0, w)`` pairs with ``w = None`` for skipped probes.
    """
    grid = _require_topology_grid(grid or KGrid())
    e_plus, e_minus = analytic_eigenvalues(p, grid.values)
    spectrum = np.concatenate([e_plus, e_minus])
    re_lo, re_hi = spectrum.real.min(), spectrum.real.max()
    im_lo, im_hi = spectrum.imag.min(), spectrum.imag.max()
    re_pad = pad * (re_hi - re_lo)
    im_pad = pad * (im_hi - im_lo)
    out = []
    for re in np.linspace(re_lo - re_pad, re_hi + re_pad, n_re):
        for im in np.linspace(im_lo - im_pad, im_hi + im_pad, n_im):
            E0 = complex(re, im)
            if np.min(np.abs(spectrum - E0)) < max(min_distance, SPECTRUM_DISTANCE_TOL):
                out.append((E0, None))
                continue
            out.append((E0, spectral_winding(p, E0, grid)))
    return out


def band_resolved_winding(traj: BandTrajectories, E0: complex) -> list:
    """Winding of each closed band loop around ``E0``.

    Without a band swap each of the two trajectories is its own loop; with
    a swap the two trajectories concatenate into a single loop of period
    4 pi. The loop windings sum to the determinant-based spectral winding.
    """
    bands = np.asarray(traj.bands, dtype=complex)
    if traj.band_swap:
        loops = [np.concatenate([bands[0], bands[1]])]
    else:
        loops = [bands[0], bands[1]]
    out = []
    for loop in loops:
        gap = abs(loop[0] - loop[-1])
        steps = np.abs(np.diff(loop))
        tol = max(20.0 * np.median(steps), 1e-8 * np.max(np.abs(loop)))
        if gap > tol:
            raise OpenTrajectoryError(
                f"band trajectory does not close (gap {gap:.3e} vs step scale {np.median(steps):.3e})"
            )
        if np.min(np.abs(loop - E0)) < SPECTRUM_DISTANCE_TOL:
            raise ReferenceOnSpectrumError(f"reference energy {E0} lies on a band loop")
        out.append(int(round(winding_number(loop - E0))))
    return out


def phase_boundary_residual(tL: float, tR: float) -> float:
    """Residual of the exceptional-point boundary condition at t0 = 1.

    Zero crossings along a parameter path locate braiding phase
    boundaries. At ``tL**2 == tR**2`` the expression degenerates; callers
    treat that as on-boundary.
    """
    denom = tL * tL - tR * tR
    if denom == 0.0:
        raise PhaseBoundaryError(f"degenerate denominator: tL^2 == tR^2 at ({tL}, {tR})")
    s = tL * tL + tR * tR
    return 1.0 + s * (2.0 * tR * tR / denom**2 - 1.0) + 2.0 * tR * tR / denom


def exceptional_scan(p: ModelParams, grid: KGrid | None = None, tol: float = EP_TOL) -> np.ndarray:
    """Momentum points where the two eigenvalues nearly coalesce.

    A point qualifies when |E+ - E-| < tol * max_k |E+ - E-|. Inside an
    open phase region the scan comes back empty.
    """
    grid = grid or KGrid()
    e_plus, e_minus = analytic_eigenvalues(p, grid.values)
    gap = np.abs(e_plus - e_minus)
    scale = gap.max()
    if scale == 0.0:
        return grid.values.copy()
    return grid.values[gap < tol * scale]


@dataclass
class PhaseDiagram:
    """Braiding degree, boundary-density contrast and boundary residual on a grid.

    ``nu[i, j]`` belongs to ``(tL_axis[i], tR_axis[j])``; rejected cells
    carry ``NU_SENTINEL``. ``boundary_residual`` is NaN where the residual
    formula degenerates.
    """

    tL_axis: np.ndarray
    tR_axis: np.ndarray
    nu: np.ndarray
    gamma: np.ndarray
    boundary_residual: np.ndarray

    def nearest_cell(self, tL: float, tR: float) -> tuple:
        return int(np.argmin(np.abs(self.tL_axis - tL))), int(np.argmin(np.abs(self.tR_axis - tR)))


def compute_phase_diagram(
    t_range: tuple,
    resolution: int,
    chain_N: int,
    grid: KGrid | None = None,
    dL: GaugeVector = STANDARD_DL,
    dR: GaugeVector = STANDARD_DR,
    threads: int | None = None,
    progress=None,
) -> PhaseDiagram:
    """Sweep the (tL, tR) plane at t0 = 1.

    Each cell gets the braiding degree (sentinel on rejection), the
    boundary-density contrast of an open chain with ``chain_N`` sites, and
    the boundary residual (NaN at its poles). Cells are independent; they
    are dispatched to a thread pool and written back by index, so the
    output does not depend on scheduling order.
    """
    lo, hi = float(t_range[0]), float(t_range[1])
    if not lo >= 0.0 or hi <= lo:
        raise ValidationError(f"t range must satisfy 0 <= lo < hi, got ({lo}, {hi})")
    if resolution < 8:
        raise ValidationError(f"resolution must be >= 8, got {resolution}")
    grid = _require_topology_grid(grid or KGrid())
    axis = lo + (hi - lo) * (np.arange(resolution) + 1) / resolution

    nu = np.full((resolution, resolution), NU_SENTINEL, dtype=int)
    gam = np.full((resolution, resolution), np.nan)
    res = np.full((resolution, resolution), np.nan)

    def cell(idx):
        i, j = idx
        p = ModelParams(t0=1.0, tL=float(axis[i]), tR=float(axis[j]), dL=dL, dR=dR)
        try:
            nu_ij = braiding_degree(p, grid)
        except NumericalError:
            nu_ij = NU_SENTINEL
        try:
            res_ij = phase_boundary_residual(axis[i], axis[j])
        except PhaseBoundaryError:
            res_ij = np.nan
        try:
            states = skin.obc_eigenstates(p, chain_N)
            gam_ij = skin.gamma(states)
        except NumericalError:
            gam_ij = np.nan
        return i, j, nu_ij, gam_ij, res_ij

    indices = [(i, j) for i in range(resolution) for j in range(resolution)]
    if threads is not None and threads < 1:
        raise ValidationError(f"threads must be >= 1, got {threads}")
    done = 0
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for i, j, nu_ij, gam_ij, res_ij in pool.map(cell, indices):
            nu[i, j] = nu_ij
            gam[i, j] = gam_ij
            res[i, j] = res_ij
            done += 1
            if progress is not None and done % resolution == 0:
                progress(done // resolution, resolution)
    return PhaseDiagram(tL_axis=axis, tR_axis=axis.copy(), nu=nu, gamma=gam, boundary_residual=res)
