"""Report bundles: JSON verdicts, CSV tracks, rendered figures, manifest.

A run writes into its output directory:

* ``<check>.json``          per-check verdict and scalar summary
* ``<check>_<track>.csv``   plot-ready track, header ``t,value,predicted``
* ``<check>_<track>.png``   log-log figure of the same track
* ``<check>_<profile>.csv`` profile overlays, header ``y,<curve labels>``
* ``manifest.json``         run metadata, config echo, file checksums

CSV content is deterministic for a fixed config (floats via repr, no
timestamps outside the manifest).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import __version__
from .config import ExperimentConfig
from .runner import CheckResult, Profile, Track

EXIT_OK = 0
EXIT_INCONSISTENT = 2
EXIT_DIVERGED = 3
EXIT_CONFIG = 4


@dataclass
class ReportBundle:
    directory: Path
    results: list[CheckResult]
    manifest: dict
    exit_code: int
    files: list[Path] = field(default_factory=list)


def _track_csv(track: Track) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "value", "predicted"])
    pred = track.predicted
    for i, (t, v) in enumerate(zip(track.times, track.values)):
        p = "" if pred is None else repr(float(pred[i]))
        w.writerow([repr(float(t)), repr(float(v)), p])
    return buf.getvalue()


def _profile_csv(profile: Profile) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    labels = list(profile.curves)
    w.writerow(["y"] + labels)
    for i, y in enumerate(profile.y):
        w.writerow([repr(float(y))] + [repr(float(profile.curves[l][i])) for l in labels])
    return buf.getvalue()


def _render_track(track: Track, title: str, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    keep = (track.values > 0) & np.isfinite(track.values)
    ax.loglog(track.times[keep], track.values[keep], "o-", ms=3, lw=1, label="measured")
    if track.predicted is not None:
        pk = (track.predicted > 0) & np.isfinite(track.predicted)
        ax.loglog(track.times[pk], track.predicted[pk], "--", lw=1, label="predicted rate")
    ax.set_xlabel("t")
    ax.set_ylabel("value")
    ax.set_title(title, fontsize=9)
    ax.legend(fontsize=7)
    ax.grid(True, which="both", alpha=0.25)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def _render_profile(profile: Profile, title: str, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    for label, vals in profile.curves.items():
        ax.semilogx(profile.y, vals, lw=1, label=label)
    ax.set_xlabel("y = r / sqrt(t)")
    ax.set_ylabel("rescaled profile")
    ax.set_title(title, fontsize=9)
    ax.legend(fontsize=7)
    ax.grid(True, which="both", alpha=0.25)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_json_safe(v) for v in obj.tolist()]
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    return str(obj)


def export_trajectory(traj, directory: str | Path) -> Path:
    """Write a solved trajectory as a directory of CSV snapshots plus a
    JSON manifest {times, norms, contraction_ratios, converged}."""
    outdir = Path(directory)
    outdir.mkdir(parents=True, exist_ok=True)
    width = max(4, len(str(len(traj.snapshots))))
    for i, snap in enumerate(traj.snapshots):
        (outdir / f"snapshot_{i:0{width}d}.csv").write_text(snap.to_csv())
    (outdir / "trajectory.json").write_text(
        json.dumps(_json_safe(traj.export_manifest()), indent=2, sort_keys=True) + "\n"
    )
    return outdir


def norm_record(idx, value: float) -> dict:
    """JSON record for a single norm evaluation."""
    def enc(v):
        return "inf" if isinstance(v, float) and math.isinf(v) else float(v)

    return {"space": {"s": enc(float(idx.s)), "q": enc(float(idx.q)), "r": enc(float(idx.r))},
            "value": value}


def write_bundle(
    cfg: ExperimentConfig,
    results: list[CheckResult],
    directory: str | Path | None = None,
    render: bool = True,
) -> ReportBundle:
    outdir = Path(directory if directory is not None else cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    files: list[Path] = []

    for res in results:
        payload = {
            "check": res.name,
            "verdict": res.verdict,
            "diverged": res.diverged,
            "parameters": {
                "d": cfg.model.d,
                "gamma": str(cfg.model.gamma),
                "alpha": str(cfg.model.alpha),
                "a": cfg.model.a,
            },
        }
        payload.update(_json_safe(res.summary))
        jpath = outdir / f"{res.name}.json"
        jpath.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        files.append(jpath)
        for tname, track in res.tracks.items():
            cpath = outdir / f"{res.name}_{tname}.csv"
            cpath.write_text(_track_csv(track))
            files.append(cpath)
            if render:
                ppath = outdir / f"{res.name}_{tname}.png"
                _render_track(track, f"{res.name}: {tname}", ppath)
                files.append(ppath)
        for pname, profile in res.profiles.items():
            cpath = outdir / f"{res.name}_{pname}.csv"
            cpath.write_text(_profile_csv(profile))
            files.append(cpath)
            if render:
                ppath = outdir / f"{res.name}_{pname}.png"
                _render_profile(profile, f"{res.name}: {pname}", ppath)
                files.append(ppath)

    if any(r.diverged for r in results):
        exit_code = EXIT_DIVERGED
    elif all(r.consistent for r in results):
        exit_code = EXIT_OK
    else:
        exit_code = EXIT_INCONSISTENT

    checksums = {}
    for f in files:
        checksums[f.name] = hashlib.sha256(f.read_bytes()).hexdigest()
    manifest = {
        "package": "hhlab",
        "version": __version__,
        "config": cfg.echo(),
        "verdicts": {r.name: r.verdict for r in results},
        "exit_code": exit_code,
        "files": checksums,
    }
    mpath = outdir / "manifest.json"
    mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    files.append(mpath)
    return ReportBundle(
        directory=outdir, results=results, manifest=manifest, exit_code=exit_code, files=files
    )
