"""Command-line front end.

Four subcommands cover the analyses: ``spectrum`` (momentum-space band
loci or open-chain eigenvalues), ``phase-diagram`` (braiding degree,
boundary-density contrast and boundary residual over the hopping plane),
``skin`` (open-chain eigenstate densities and localization report) and
``measure`` (simulated admittance measurement with optional component
tolerances). Exit codes: 0 success, 2 config error, 3 numerical failure,
4 singular network.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import circuit as cct
from . import skin as sk
from . import topology as topo
from .config import RunConfig, load_config
from .errors import (
    ConfigError,
    NumericalError,
    SingularNetworkError,
    ValidationError,
)
from .eigensolve import eig_dense, sort_bands_by_continuity
from .model import BoundaryCondition, analytic_eigenvalues, real_space_hamiltonian
from .output import build_header, write_report, write_table

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_SINGULAR = 4


def _effective(cfg: RunConfig, command: str) -> dict:
    """Resolved run parameters that define the output (hashed for provenance)."""
    d: dict = {"command": command, "kpoints": cfg.kpoints, "boundary": cfg.boundary.value}
    if cfg.model is not None:
        d["model"] = cfg.model.to_dict()
    if cfg.circuit is not None:
        d["circuit"] = cfg.circuit.to_dict()
        d["zero_r0"] = cfg.zero_r0
    if cfg.chain_N is not None:
        d["chain_N"] = cfg.chain_N
    if command == "phase-diagram":
        d.update(t_min=cfg.t_min, t_max=cfg.t_max, resolution=cfg.resolution)
    if command in ("skin", "measure"):
        d.update(window_fraction=cfg.window_fraction, loc_threshold=cfg.loc_threshold)
    if command == "measure":
        d.update(noise_sigma=cfg.noise_sigma, seed=cfg.seed)
    if command == "spectrum":
        d["ep_tol"] = cfg.ep_tol
    return d


def _require_chain(cfg: RunConfig) -> int:
    if cfg.chain_N is None:
        raise ConfigError("key 'chain_N' is required for this command")
    return cfg.chain_N


def _eig_pairs(samples: np.ndarray) -> np.ndarray:
    """Closed-form eigenvalue pairs of stacked 2x2 matrices."""
    half_tr = 0.5 * (samples[:, 0, 0] + samples[:, 1, 1])
    det = samples[:, 0, 0] * samples[:, 1, 1] - samples[:, 0, 1] * samples[:, 1, 0]
    disc = np.sqrt(half_tr * half_tr - det)
    return np.column_stack([half_tr + disc, half_tr - disc])


def _canonical_order(values: np.ndarray) -> np.ndarray:
    return np.lexsort((values.imag, values.real))


def _band_rows(k_values, traj, raw_scale: complex | None):
    """Rows (k, band, re_E, im_E[, re_j_S, im_j_S]) in k-major order."""
    rows = []
    for j, k in enumerate(k_values):
        for b in (0, 1):
            e = traj.bands[b, j]
            row = [float(k), b, float(e.real), float(e.imag)]
            if raw_scale is not None:
                raw = e * raw_scale
                row += [float(raw.real), float(raw.imag)]
            rows.append(tuple(row))
    return rows


def run_spectrum(cfg: RunConfig, out: Path, fmt: str) -> None:
    eff = _effective(cfg, "spectrum")
    grid = topo.KGrid(cfg.kpoints)
    if cfg.model is not None:
        if cfg.boundary is BoundaryCondition.PBC:
            e_plus, e_minus = analytic_eigenvalues(cfg.model, grid.values)
            traj = sort_bands_by_continuity(grid.values, np.column_stack([e_plus, e_minus]))
            extra = {
                "kpoints": cfg.kpoints,
                "band_swap": traj.band_swap,
                "ep_tol": cfg.ep_tol,
                "exceptional_k": [float(k) for k in topo.exceptional_scan(cfg.model, grid, cfg.ep_tol)],
                "tolerances": {"integrality": topo.INTEGRALITY_TOL},
            }
            try:
                extra["nu"] = topo.braiding_degree(cfg.model, grid)
            except NumericalError as exc:
                extra["nu"] = None
                extra["nu_error"] = str(exc)
            header = build_header("spectrum", eff, **extra)
            write_table(out, fmt, header, ["k", "band", "re_E", "im_E"], _band_rows(grid.values, traj, None))
        else:
            N = _require_chain(cfg)
            spec = eig_dense(real_space_hamiltonian(cfg.model, N, BoundaryCondition.OBC), eigenvectors=False)
            order = _canonical_order(spec.eigenvalues)
            rows = [
                (int(i), float(spec.eigenvalues[j].real), float(spec.eigenvalues[j].imag))
                for i, j in enumerate(order)
            ]
            header = build_header("spectrum", eff, chain_N=N)
            write_table(out, fmt, header, ["index", "re_E", "im_E"], rows)
        return

    c = cfg.circuit
    drive = c.drive_frequency()
    include_r0 = not cfg.zero_r0
    norm = 1.0 / (1j * drive * cct.NF)
    if cfg.boundary is BoundaryCondition.PBC:
        loci = cct.admittance_bloch(c, drive, grid.values, include_r0=include_r0)
        traj = sort_bands_by_continuity(grid.values, _eig_pairs(loci * norm))
        extra = {"kpoints": cfg.kpoints, "omega_rad_s": drive, "band_swap": traj.band_swap,
                 "eigenvalue_units": "nF", "tolerances": {"integrality": topo.INTEGRALITY_TOL}}
        try:
            extra["nu"] = topo.braiding_degree_of_samples(loci)
        except NumericalError as exc:
            extra["nu"] = None
            extra["nu_error"] = str(exc)
        header = build_header("spectrum", eff, **extra)
        write_table(
            out,
            fmt,
            header,
            ["k", "band", "re_E", "im_E", "re_j_S", "im_j_S"],
            _band_rows(grid.values, traj, 1j * drive * cct.NF),
        )
    else:
        N = _require_chain(cfg)
        J = cct.circuit_chain(c, N, BoundaryCondition.OBC, omega=drive, include_r0=include_r0)
        spec = eig_dense(J, eigenvectors=False)
        normalized = spec.eigenvalues * norm
        order = _canonical_order(normalized)
        rows = [
            (
                int(i),
                float(normalized[j].real),
                float(normalized[j].imag),
                float(spec.eigenvalues[j].real),
                float(spec.eigenvalues[j].imag),
            )
            for i, j in enumerate(order)
        ]
        header = build_header("spectrum", eff, chain_N=N, omega_rad_s=drive, eigenvalue_units="nF")
        write_table(out, fmt, header, ["index", "re_E", "im_E", "re_j_S", "im_j_S"], rows)


def run_phase_diagram(cfg: RunConfig, out: Path, fmt: str) -> None:
    if cfg.model is None:
        raise ConfigError("phase-diagram needs a model block (the sweep varies tL and tR)")
    if cfg.model.t0 != 1.0:
        raise ConfigError("phase-diagram sweeps fix t0 = 1; set t0 = 1 in the config")
    chain_N = cfg.chain_N if cfg.chain_N is not None else 100
    eff = _effective(cfg, "phase-diagram")
    eff["chain_N"] = chain_N

    def progress(done: int, total: int) -> None:
        print(f"phase-diagram: row {done}/{total}", file=sys.stderr, flush=True)

    diagram = topo.compute_phase_diagram(
        (cfg.t_min, cfg.t_max),
        cfg.resolution,
        chain_N,
        topo.KGrid(cfg.kpoints),
        dL=cfg.model.dL,
        dR=cfg.model.dR,
        threads=cfg.threads,
        progress=progress,
    )
    rows = []
    for i, tL in enumerate(diagram.tL_axis):
        for j, tR in enumerate(diagram.tR_axis):
            rows.append(
                (
                    float(tL),
                    float(tR),
                    int(diagram.nu[i, j]),
                    float(diagram.gamma[i, j]),
                    float(diagram.boundary_residual[i, j]),
                )
            )
    header = build_header(
        "phase-diagram",
        eff,
        resolution=cfg.resolution,
        chain_N=chain_N,
        kpoints=cfg.kpoints,
        nu_sentinel=topo.NU_SENTINEL,
        tolerances={"integrality": topo.INTEGRALITY_TOL},
    )
    write_table(out, fmt, header, ["tL", "tR", "nu", "gamma", "boundary_residual"], rows)


def _states_rows(states: sk.EigenstateSet, eigenvalues: np.ndarray, order: np.ndarray):
    rows = []
    for idx, j in enumerate(order):
        e = eigenvalues[j]
        for site in range(states.n_sites):
            rows.append(
                (int(idx), float(e.real), float(e.imag), site + 1, float(states.densities[j, site]))
            )
    return rows


def _report_path(out: Path, tag: str) -> Path:
    return out.with_name(f"{out.stem}.{tag}.json")


def run_skin(cfg: RunConfig, out: Path, fmt: str) -> None:
    N = _require_chain(cfg)
    eff = _effective(cfg, "skin")
    if cfg.model is not None:
        states = sk.obc_eigenstates(cfg.model, N)
        shown = states.eigenvalues
        units = "dimensionless"
    else:
        drive = cfg.circuit.drive_frequency()
        J = cct.circuit_chain(cfg.circuit, N, BoundaryCondition.OBC, omega=drive, include_r0=not cfg.zero_r0)
        states = sk.eigenstates_from_matrix(J)
        shown = states.eigenvalues / (1j * drive * cct.NF)
        units = "nF"
    report = sk.classify_localization(states, cfg.window_fraction, cfg.loc_threshold)
    order = _canonical_order(shown)
    header = build_header(
        "skin",
        eff,
        chain_N=N,
        eigenvalue_units=units,
        gamma=report.gamma,
        bipolar=report.bipolar,
        window_fraction=cfg.window_fraction,
        loc_threshold=cfg.loc_threshold,
    )
    write_table(
        out, fmt, header, ["state_index", "re_E", "im_E", "site", "density"],
        _states_rows(states, shown, order),
    )
    payload = {
        "header": header,
        "gamma": report.gamma,
        "bipolar": report.bipolar,
        "counts": report.counts(),
        "states": [
            {
                "state_index": int(idx),
                "re_E": float(shown[j].real),
                "im_E": float(shown[j].imag),
                "class": report.classes[j],
                "w_left": float(report.w_left[j]),
                "w_right": float(report.w_right[j]),
            }
            for idx, j in enumerate(order)
        ],
    }
    write_report(_report_path(out, "report"), payload)


def run_measure(cfg: RunConfig, out: Path, fmt: str) -> None:
    if cfg.circuit is None:
        raise ConfigError("measure needs a circuit block")
    N = _require_chain(cfg)
    eff = _effective(cfg, "measure")
    protocol = (
        cct.MeasurementProtocol.PBC_UNIT_CELL
        if cfg.boundary is BoundaryCondition.PBC
        else cct.MeasurementProtocol.OBC_ALL_NODES
    )
    noise = None
    if cfg.noise_sigma is not None:
        noise = cct.MeasurementNoise(cfg.noise_sigma, cfg.seed if cfg.seed is not None else 0)
    drive = cfg.circuit.drive_frequency()
    try:
        J_rec = cct.simulated_measurement(
            cfg.circuit, N, protocol, noise=noise, include_r0=not cfg.zero_r0
        )
    except SingularNetworkError as exc:
        raise SingularNetworkError(f"{exc} (omega = {drive:.9e} rad/s)") from exc
    norm = 1.0 / (1j * drive * cct.NF)
    noise_meta = {
        "sigma": None if noise is None else noise.component_rel_sigma,
        "seed": None if noise is None else noise.seed,
    }

    grid = topo.KGrid(cfg.kpoints)
    if protocol is cct.MeasurementProtocol.PBC_UNIT_CELL:
        loci = cct.bloch_samples_from_chain(J_rec, grid.values)
        traj = sort_bands_by_continuity(grid.values, _eig_pairs(loci * norm))
        extra = {"kpoints": cfg.kpoints, "omega_rad_s": drive, "noise": noise_meta,
                 "protocol": protocol.value, "band_swap": traj.band_swap, "eigenvalue_units": "nF",
                 "tolerances": {"integrality": topo.INTEGRALITY_TOL}}
        try:
            extra["nu"] = topo.braiding_degree_of_samples(loci)
        except NumericalError as exc:
            extra["nu"] = None
            extra["nu_error"] = str(exc)
        header = build_header("measure", eff, **extra)
        write_table(
            out, fmt, header,
            ["k", "band", "re_E", "im_E", "re_j_S", "im_j_S"],
            _band_rows(grid.values, traj, 1j * drive * cct.NF),
        )
        states = sk.eigenstates_from_matrix(J_rec)
        shown = states.eigenvalues * norm
        sheader = build_header("measure", eff, chain_N=N, omega_rad_s=drive, noise=noise_meta,
                               protocol=protocol.value, eigenvalue_units="nF")
        write_table(
            _states_path(out, fmt), fmt, sheader,
            ["state_index", "re_E", "im_E", "site", "density"],
            _states_rows(states, shown, _canonical_order(shown)),
        )
    else:
        states = sk.eigenstates_from_matrix(J_rec)
        shown = states.eigenvalues * norm
        report = sk.classify_localization(states, cfg.window_fraction, cfg.loc_threshold)
        order = _canonical_order(shown)
        header = build_header(
            "measure", eff, chain_N=N, omega_rad_s=drive, noise=noise_meta,
            protocol=protocol.value, eigenvalue_units="nF",
            gamma=report.gamma, bipolar=report.bipolar,
        )
        rows = [
            (
                int(i),
                float(shown[j].real),
                float(shown[j].imag),
                float(states.eigenvalues[j].real),
                float(states.eigenvalues[j].imag),
            )
            for i, j in enumerate(order)
        ]
        write_table(out, fmt, header, ["index", "re_E", "im_E", "re_j_S", "im_j_S"], rows)
        write_table(
            _states_path(out, fmt), fmt, header,
            ["state_index", "re_E", "im_E", "site", "density"],
            _states_rows(states, shown, order),
        )


def _states_path(out: Path, fmt: str) -> Path:
    return out.with_name(out.stem + ".states." + fmt)


COMMANDS = {
    "spectrum": run_spectrum,
    "phase-diagram": run_phase_diagram,
    "skin": run_skin,
    "measure": run_measure,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nahn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="key-value or JSON config file")
        p.add_argument("--out", default=None, help="output path (default: <command>.<format>)")
        p.add_argument("--format", default="csv", choices=("csv", "json"))
        p.add_argument("--threads", type=int, default=None, help="sweep worker threads")
        p.add_argument("--seed", type=int, default=None, help="noise seed override")
        p.add_argument("--kpoints", type=int, default=None, help="momentum grid override")
        p.add_argument("--ep-tol", type=float, default=None, help="exceptional-point tolerance override")
        p.add_argument("--zero-r0", action="store_true", help="drop the resistive on-site shift")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.kpoints is not None:
            cfg.kpoints = args.kpoints
        if args.seed is not None:
            cfg.seed = args.seed
        if args.ep_tol is not None:
            cfg.ep_tol = args.ep_tol
        if args.threads is not None:
            cfg.threads = args.threads
        if args.zero_r0:
            cfg.zero_r0 = True
        out = Path(args.out) if args.out else Path(f"{args.command}.{args.format}")
        COMMANDS[args.command](cfg, out, args.format)
    except (ConfigError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SingularNetworkError as exc:
        print(f"singular network: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
