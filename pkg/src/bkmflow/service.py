"""Operations shared by the HTTP API and the in-process CLI; all return plain dicts."""

from __future__ import annotations

from pathlib import Path

from . import export, presets
from .errors import ConfigError
from .pipeline import run_scenario, verify_dir
from .scenario import load_scenario, parse_scenario


def list_presets() -> list[dict]:
    out = []
    for name in presets.names():
        d = presets.preset_dict(name)
        out.append({"name": name, "description": d.get("description", ""), "notes": d.get("notes", "")})
    return out


def show_preset(name: str) -> dict:
    return presets.preset(name).model_dump(mode="json")


def resolve(target):
    """Scenario from a dict, a JSON file path or a preset name."""
    if isinstance(target, dict):
        return parse_scenario(target)
    path = Path(target)
    if path.is_file():
        return load_scenario(path)
    if target in presets.names():
        return presets.preset(target)
    raise ConfigError(f"{target!r} is neither a scenario file nor a preset name")


def run(target, out_dir=None, workers=None) -> dict:
    scn = resolve(target)
    res = run_scenario(scn, out_dir=out_dir, workers=workers)
    summary = res.summary()
    summary["out_dir"] = None if out_dir is None else str(Path(out_dir))
    return summary


def verify(directory) -> dict:
    res = verify_dir(directory)
    summary = res.summary()
    summary["out_dir"] = str(Path(directory))
    export.write_json(summary, Path(directory) / export.SUMMARY_FILE)
    return summary


def export_dir(directory, fmt: str) -> dict:
    directory = Path(directory)
    if fmt not in ("csv", "frames"):
        raise ConfigError(f"unknown export format {fmt!r}; use csv or frames")
    scn = load_scenario(directory / export.SCENARIO_FILE)
    if not (directory / export.SOLUTION_FILE).exists():
        raise ConfigError(f"no {export.SOLUTION_FILE} in {directory}")
    sol = export.load_solution(directory, scn.bkm_spec())
    if fmt == "csv":
        files = [export.write_csv(sol, directory / export.CSV_FILE)]
    else:
        files = export.write_frames(sol, directory / export.FRAMES_DIR)
    return {"format": fmt, "files": [str(f) for f in files]}
