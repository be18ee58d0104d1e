"""Snapshot files, CSV export, named initial profiles and run manifests.

Snapshot layout (little endian)::

    b"FCH1" | L: f64 | N: u64 | t: f64 | nu: f64 | N x f64 grid samples
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
import csv
import hashlib
import json
import os
from pathlib import Path
import struct

import numpy as np

from . import __version__
from .spectral import GridSpec, SpectralField, dealias, make_grid

__all__ = [
    "MAGIC",
    "write_snapshot",
    "read_snapshot",
    "write_field_csv",
    "fmt",
    "write_csv",
    "NamedProfile",
    "parse_profile",
    "profile_field",
    "RunManifest",
    "file_digest",
    "write_manifest",
]

MAGIC = b"FCH1"
_HEADER = struct.Struct("<4sdQdd")


def write_snapshot(path, u: SpectralField, t: float = 0.0, nu: float = 0.0) -> Path:
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, u.grid.L, u.grid.N, float(t), float(nu)))
        fh.write(np.asarray(u.values, dtype="<f8").tobytes())
    return path


def read_snapshot(path, dealias_fraction: float = 2.0 / 3.0) -> tuple[SpectralField, float, float]:
    """Return ``(field, t, nu)`` from a snapshot file."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValueError(f"{path}: file too short for a snapshot header")
    magic, L, N, t, nu = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    body = data[_HEADER.size:]
    if len(body) != 8 * N:
        raise ValueError(f"{path}: expected {N} samples, found {len(body) // 8}")
    values = np.frombuffer(body, dtype="<f8").astype(np.float64)
    return SpectralField(make_grid(L, int(N), dealias_fraction), values=values), t, nu


def fmt(x) -> str:
    """Locale-free round-trip formatting with 17 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_field_csv(path, u: SpectralField) -> Path:
    return write_csv(path, ("x", "u"), zip(u.grid.x, u.values))


# --------------------------------------------------------------------------
# named profiles

_KINDS = ("cosine", "gaussian", "sech", "snapshot")


@dataclass(frozen=True)
class NamedProfile:
    """Initial datum description: ``cosine:amp,k``, ``gaussian:amp,width``,
    ``sech:amp,width`` or a snapshot path."""

    kind: str
    params: tuple = ()
    path: str | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.kind == "snapshot":
            if not self.path:
                raise ValueError("snapshot profile needs a path")
            return
        if len(self.params) != 2:
            raise ValueError(f"{self.kind} profile takes two parameters, got {self.params}")
        if self.kind in ("gaussian", "sech") and not self.params[1] > 0:
            raise ValueError("width must be positive")


def parse_profile(text: str) -> NamedProfile:
    kind, sep, rest = text.partition(":")
    if sep and kind in ("cosine", "gaussian", "sech"):
        try:
            params = tuple(float(p) for p in rest.split(","))
        except ValueError as exc:
            raise ValueError(f"bad profile parameters in {text!r}") from exc
        return NamedProfile(kind, params)
    if sep and kind == "snapshot":
        return NamedProfile("snapshot", path=rest)
    if os.path.exists(text):
        return NamedProfile("snapshot", path=text)
    raise ValueError(f"cannot interpret profile {text!r}")


def profile_field(profile: NamedProfile | str, grid: GridSpec | None = None) -> SpectralField:
    """Evaluate a profile on ``grid`` from closed-form Fourier coefficients, dealiased.

    Gaussian and sech profiles are centred at ``L/2``; their coefficients
    are those of the periodized profile.  Snapshot profiles ignore ``grid``
    unless it is given, in which case the grids must match.
    """
    if isinstance(profile, str):
        profile = parse_profile(profile)
    if profile.kind == "snapshot":
        u, _, _ = read_snapshot(profile.path)
        if grid is not None and (u.grid.L, u.grid.N) != (grid.L, grid.N):
            raise ValueError("snapshot grid does not match the requested grid")
        return dealias(u if grid is None else SpectralField(grid, values=u.values))
    if grid is None:
        raise ValueError("a grid is needed to evaluate a named profile")
    amp, p = profile.params
    k = grid.rk
    c = np.zeros(k.size, dtype=complex)
    if profile.kind == "cosine":
        m = p / grid.dk
        if abs(m - round(m)) > 1e-9 or round(m) > grid.N // 2:
            raise ValueError(f"wavenumber {p} is not on the lattice of period {grid.L}")
        m = int(round(abs(m)))
        c[m] = amp if m in (0, grid.N // 2) else amp / 2
    else:
        shift = np.exp(-1j * k * grid.L / 2)
        if profile.kind == "gaussian":
            c = amp * np.sqrt(np.pi) * p / grid.L * np.exp(-(k * p) ** 2 / 4) * shift
        else:
            c = amp * np.pi * p / grid.L / np.cosh(np.pi * k * p / 2) * shift
        c[-1] = 0.0
    return dealias(SpectralField(grid, coeffs=c))


# --------------------------------------------------------------------------
# manifests

def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    flags: dict
    grid: dict | None = None
    params: dict | None = None
    version: str = __version__
    seed: int | None = None
    started: str = ""
    finished: str = ""
    outputs: list = field(default_factory=list)


def write_manifest(run_dir, manifest: RunManifest, name: str = "run.json") -> Path:
    """Digest every file in ``run_dir`` and append ``manifest`` to ``name``.

    The file holds ``{"runs": [...]}``; earlier entries are kept.
    """
    run_dir = Path(run_dir)
    target = run_dir / name
    outputs = []
    for p in sorted(run_dir.rglob("*")):
        if p.is_file() and p != target:
            outputs.append({"path": str(p.relative_to(run_dir)), "sha256": file_digest(p)})
    manifest.outputs = outputs
    runs = []
    if target.exists():
        runs = json.loads(target.read_text()).get("runs", [])
    runs.append(asdict(manifest))
    target.write_text(json.dumps({"runs": runs}, indent=2, sort_keys=True) + "\n")
    return target


def verify_manifest(run_dir, name: str = "run.json") -> list[str]:
    """Return the paths of the latest run whose file is missing or changed."""
    run_dir = Path(run_dir)
    runs = json.loads((run_dir / name).read_text())["runs"]
    bad = []
    for entry in runs[-1]["outputs"]:
        p = run_dir / entry["path"]
        if not p.exists() or file_digest(p) != entry["sha256"]:
            bad.append(entry["path"])
    return bad
