"""Built-in scenarios.

Root values and start points are implementer-chosen reconstructions of the
qualitative root patterns; only kb-exact (c = mu^6 - 2mu^4 + mu^2, start at
the origin) has a known closed-form solution. The KdV, Kaup-Boussinesq and soliton
presets use m = -1, the normalization under which the general construction
reproduces KdV and Kaup-Boussinesq with unit dispersion (see the README).
"""

from __future__ import annotations

import copy

from .errors import ConfigError
from .scenario import Scenario, parse_scenario

CHOSEN = "Root values and start data are implementer-chosen."

_PRESETS: dict[str, dict] = {
    "kb-exact": {
        "description": "Kaup-Boussinesq (n=2, N=2) with c = mu^6 - 2mu^4 + mu^2; exact solution known in closed form.",
        "notes": "c and start w = p = 0 match the closed-form solution; m = -1 normalization.",
        "bkm": {"n": 2, "m": [-1.0], "lam": "inf", "chart": "kb-form"},
        "reduction": {"N": 2, "c": [0.0, 0.0, 1.0, 0.0, -2.0, 0.0, 1.0]},
        "start": {"w": [0.0, 0.0], "p": [0.0, 0.0]},
        "grid": {"t": {"min": -1.0, "max": 1.0, "count": 41}, "x": {"min": -3.0, "max": 3.0, "count": 101}},
        "checks": {
            "level": 1e-9,
            "drift": 1e-7,
            "kb_closed_form": 1e-6,
            "consistency": 1e-9,
            "pde": 1e-3,
            "pde_constraint": 1e-8,
            "base": 1e-3,
            "solitonic": 1e-4,
            "separation": 1e-3,
        },
    },
    "kdv-cnoidal-n1": {
        "description": "KdV travelling cnoidal wave, n=1, N=1, c with three real roots and c_1 != 0.",
        "notes": CHOSEN,
        "bkm": {"n": 1, "m": [-1.0], "lam": "inf"},
        "reduction": {"N": 1, "c_roots": [-1.5, 0.2, 2.1]},
        "start": {"q": [0.2], "p_q_signs": [0.0]},
        "grid": {"t": {"min": -1.0, "max": 1.0, "count": 41}, "x": {"min": -6.0, "max": 6.0, "count": 241}},
        "flow": {"rel_tol": 1e-12, "abs_tol": 1e-14},
        "checks": {"level": 1e-9, "drift": 1e-7, "pde": 5e-3, "pde_constraint": 1e-9, "base": 1e-3, "consistency": 1e-9},
    },
    "kdv-cnoidal": {
        "description": "KdV cnoidal solution, n=1, N=2, five real simple roots; start at the 2nd and 4th root.",
        "notes": CHOSEN,
        "bkm": {"n": 1, "m": [-1.0], "lam": "inf"},
        "reduction": {"N": 2, "c_roots": [-1.5, -0.8, 0.1, 0.9, 1.6]},
        "start": {"q": [-0.8, 0.9], "p_q_signs": [0.0, 0.0]},
        "grid": {"t": {"min": -1.0, "max": 1.0, "count": 41}, "x": {"min": -6.0, "max": 6.0, "count": 241}},
        "flow": {"rel_tol": 1e-12, "abs_tol": 1e-14},
        "checks": {"level": 1e-9, "drift": 1e-7, "pde": 3e-3, "base": 2e-3, "consistency": 1e-9},
    },
    "kdv-2soliton": {
        "description": "KdV two-soliton, c = (mu-a)(mu-b)^2(mu-c)^2 with a + 2b + 2c = 0.",
        "notes": CHOSEN + " a=-0.5, b=-0.1, c=0.35.",
        "bkm": {"n": 1, "m": [-1.0], "lam": "inf"},
        "reduction": {"N": 2, "c_roots": [-0.5, -0.1, -0.1, 0.35, 0.35]},
        "start": {"q": [-0.5, 0.125], "p_q_signs": [0.0, 1.0]},
        "grid": {"t": {"min": -2.0, "max": 2.0, "count": 9}, "x": {"min": -15.0, "max": 15.0, "count": 121}},
        "flow": {"rel_tol": 1e-12, "abs_tol": 1e-14, "blowup_norm": 1e12},
        "checks": {"level": 1e-9, "drift": 1e-7, "asymptotics": 1e-3, "consistency": 1e-9},
    },
    "bkm-n2-cnoidal": {
        "description": "BKM IV n=2, N=3 cnoidal solution; eight real simple roots, start at the 3rd, 5th and 7th.",
        "notes": CHOSEN,
        "bkm": {"n": 2, "m": [-1.0], "lam": "inf", "chart": "kb-form"},
        "reduction": {"N": 3, "c_roots": [-1.6, -1.2, -0.7, -0.3, 0.1, 0.6, 1.0, 1.5]},
        "start": {"q": [-0.7, 0.1, 1.0], "p_q_signs": [0.0, 0.0, 0.0]},
        "grid": {"t": {"min": -1.0, "max": 1.0, "count": 21}, "x": {"min": -6.0, "max": 6.0, "count": 121}},
        "flow": {"rel_tol": 1e-12, "abs_tol": 1e-14},
        "checks": {"level": 1e-9, "drift": 1e-7, "consistency": 1e-9, "pde_constraint": 1e-8},
    },
    "bkm-n2-loop": {
        "description": "BKM IV n=2, N=2 soliton with equal limits at both ends (a loop in the (u1,u2)-plane).",
        "notes": CHOSEN,
        "bkm": {"n": 2, "m": [-1.0], "lam": "inf", "chart": "kb-form"},
        "reduction": {"N": 2, "c_roots": [-0.8, -0.8, -0.3, 0.2, 0.7, 0.7]},
        "start": {"q": [-0.3, 0.45], "p_q_signs": [0.0, 1.0]},
        "grid": {"t": {"min": -1.0, "max": 1.0, "count": 9}, "x": {"min": -15.0, "max": 15.0, "count": 121}},
        "flow": {"rel_tol": 1e-12, "abs_tol": 1e-14, "blowup_norm": 1e12},
        "checks": {"level": 1e-9, "drift": 1e-7, "asymptotics": 1e-3, "consistency": 1e-9},
    },
    "bkm-n2-skipping-rope": {
        "description": "BKM IV n=2, N=2 soliton joining two different constant states (three double roots).",
        "notes": CHOSEN,
        "bkm": {"n": 2, "m": [-1.0], "lam": "inf", "chart": "kb-form"},
        "reduction": {"N": 2, "c_roots": [-0.4, -0.4, 0.0, 0.0, 0.5, 0.5]},
        "start": {"q": [-0.2, 0.25], "p_q_signs": [1.0, -1.0]},
        "grid": {"t": {"min": -1.0, "max": 1.0, "count": 9}, "x": {"min": -12.0, "max": 12.0, "count": 97}},
        "flow": {"rel_tol": 1e-12, "abs_tol": 1e-14, "blowup_norm": 1e12},
        "checks": {"level": 1e-9, "drift": 1e-7, "consistency": 1e-9},
    },
    "bkm-finite-demo": {
        "description": "BKM I with n=2, m = -(mu^2 + 1/2), lambda = 3, N=2.",
        "notes": CHOSEN,
        "bkm": {"n": 2, "m": [-0.5, 0.0, -1.0], "lam": 3.0},
        "reduction": {"N": 2, "c_roots": [-1.6, -1.1, -0.2, 0.4, 0.9, 1.4]},
        "start": {"q": [-0.2, 0.9], "p_q_signs": [0.0, 0.0]},
        "grid": {"t": {"min": -0.2, "max": 0.2, "count": 21}, "x": {"min": -2.0, "max": 2.0, "count": 81}},
        "flow": {"rel_tol": 1e-12, "abs_tol": 1e-14},
        "checks": {"level": 1e-9, "drift": 1e-7, "pde": 1e-3, "pde_constraint": 1e-4, "base": 2e-2, "consistency": 1e-9},
    },
    "kdv-bkm2": {
        "description": "BKM II with n=1, m = mu - 2, lambda = 2 (a root of m), N=2.",
        "notes": CHOSEN,
        "bkm": {"n": 1, "m": [-2.0, 1.0], "lam": 2.0},
        "reduction": {"N": 2, "c_roots": [-1.5, -1.0, 0.0, 0.6, 1.2]},
        "start": {"q": [-1.0, 0.6], "p_q_signs": [0.0, 0.0]},
        "grid": {"t": {"min": -0.2, "max": 0.2, "count": 21}, "x": {"min": -2.0, "max": 2.0, "count": 81}},
        "flow": {"rel_tol": 1e-12, "abs_tol": 1e-14},
        "checks": {"level": 1e-9, "drift": 1e-7, "pde": 1e-3, "bkm2_q": 1e-6, "consistency": 1e-9},
    },
}


def names() -> list[str]:
    return sorted(_PRESETS)


def preset_dict(name: str) -> dict:
    if name not in _PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(names())}")
    d = copy.deepcopy(_PRESETS[name])
    d["name"] = name
    d["schema_version"] = 1
    return d


def preset(name: str) -> Scenario:
    return parse_scenario(preset_dict(name))
