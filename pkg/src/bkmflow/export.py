"""Plot-ready CSV output and the on-disk solution bundle."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .flows import PhaseGrid
from .poly import Poly
from .synth import SolutionGrid

SOLUTION_FILE = "solution.npz"
SCENARIO_FILE = "scenario.json"
SUMMARY_FILE = "summary.json"
CSV_FILE = "solution.csv"
FRAMES_DIR = "frames"


def header(n: int) -> list[str]:
    return ["t", "x"] + [f"u_{k}" for k in range(1, n + 1)] + ["q"]


def _rows(sol: SolutionGrid, i: int):
    t = sol.t_nodes[i]
    for j, x in enumerate(sol.x_nodes):
        yield [repr(float(t)), repr(float(x))] + [repr(float(v)) for v in sol.u[:, i, j]] + [repr(float(sol.q[i, j]))]


def write_csv(sol: SolutionGrid, path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header(sol.n))
        for i in range(sol.t_nodes.size):
            out.writerows(_rows(sol, i))
    return path


def write_frames(sol: SolutionGrid, directory) -> list[Path]:
    """One CSV per t-node, named frame_0000.csv, frame_0001.csv, ..."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(sol.t_nodes.size):
        p = directory / f"frame_{i:04d}.csv"
        with p.open("w", newline="", encoding="utf-8") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(header(sol.n))
            out.writerows(_rows(sol, i))
        paths.append(p)
    return paths


def read_csv(path):
    with Path(path).open(encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def save_solution(sol: SolutionGrid, directory) -> Path:
    directory = Path(directory)
    ph = sol.phase
    path = directory / SOLUTION_FILE
    np.savez(
        path,
        t=sol.t_nodes,
        x=sol.x_nodes,
        u=sol.u,
        q=sol.q,
        c_new=sol.c_new.coeffs,
        a=np.nan if sol.a is None else sol.a,
        phase_t=ph.t_nodes,
        x_rows=ph.x_rows,
        w=ph.w,
        p=ph.p,
        drift=ph.drift,
        rho_cond=sol.rho_cond,
    )
    return path


def load_solution(directory, spec) -> SolutionGrid:
    """Rebuild a SolutionGrid (with its phase grid) from a run directory."""
    with np.load(Path(directory) / SOLUTION_FILE) as z:
        phase = PhaseGrid(
            t_nodes=z["phase_t"], x_rows=z["x_rows"], w=z["w"], p=z["p"], lam=spec.lam, drift=z["drift"]
        )
        a = float(z["a"])
        return SolutionGrid(
            t_nodes=z["t"],
            x_nodes=z["x"],
            u=z["u"],
            q=z["q"],
            spec=spec,
            c_new=Poly(z["c_new"]),
            N=phase.N,
            a=None if np.isnan(a) else a,
            phase=phase,
            rho_cond=z["rho_cond"],
        )


def write_json(obj, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n", encoding="utf-8")
    return path
