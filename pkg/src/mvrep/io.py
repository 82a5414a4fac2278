"""Point cloud and manifest I/O.

Text point sets use the room-scan convention of one point per line,
``x y z r g b`` with an optional trailing integer label column.  Coordinates
are metres, colors are integers in [0, 255].  Blank lines and ``#`` comments
are skipped.  PLY input supports ascii and binary_little_endian vertex
layouts with float/double x y z and optional uchar red green blue.

Manifests are canonical JSON: keys sorted, entries sorted by perspective id,
so semantically equal manifests serialize to identical bytes.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .geometry import Aabb, bounding_box

__all__ = [
    "S3DIS_CATEGORIES",
    "CloudFormatError",
    "Point",
    "PointCloud",
    "ManifestEntry",
    "MultiviewManifest",
    "parse_s3dis_room",
    "parse_ply",
    "write_partial_set",
    "write_manifest",
    "read_manifest",
    "partial_filename",
    "area_of",
]

# Native room-scan annotation categories; unknown object names map to clutter.
S3DIS_CATEGORIES = (
    "ceiling", "floor", "wall", "beam", "column", "window", "door",
    "table", "chair", "sofa", "bookcase", "board", "clutter",
)


class CloudFormatError(ValueError):
    """Malformed point cloud or manifest input."""


@dataclass(frozen=True)
class Point:
    """A single point, mostly useful for spot checks in tests."""

    position: tuple[float, float, float]
    color: tuple[int, int, int]
    label: int | None = None


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Immutable column-oriented point set.

    positions: (n, 3) float64, colors: (n, 3) uint8, labels: (n,) int32 or
    None.  ``bounds`` is computed on construction and always tight.
    """

    positions: np.ndarray
    colors: np.ndarray
    labels: np.ndarray | None
    room_id: str = "cloud"
    bounds: Aabb = field(init=False)

    def __post_init__(self) -> None:
        pos = np.asarray(self.positions, dtype=np.float64)
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] == 0:
            raise ValueError(f"positions must be a non-empty (n, 3) array, got {pos.shape}")
        if not np.isfinite(pos).all():
            raise ValueError("positions contain NaN or Inf")
        col = np.asarray(self.colors)
        if col.shape != pos.shape:
            raise ValueError(f"colors shape {col.shape} does not match positions {pos.shape}")
        if col.dtype != np.uint8:
            if np.any((col < 0) | (col > 255)) or np.any(col != np.floor(col)):
                raise ValueError("colors must be integers in [0, 255]")
            col = col.astype(np.uint8)
        lab = self.labels
        if lab is not None:
            lab = np.asarray(lab, dtype=np.int32)
            if lab.shape != (pos.shape[0],):
                raise ValueError(f"labels shape {lab.shape} does not match point count")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "colors", col)
        object.__setattr__(self, "labels", lab)
        object.__setattr__(self, "bounds", bounding_box(pos))

    def __len__(self) -> int:
        return self.positions.shape[0]

    def point(self, i: int) -> Point:
        lab = None if self.labels is None else int(self.labels[i])
        return Point(
            position=tuple(float(v) for v in self.positions[i]),
            color=tuple(int(v) for v in self.colors[i]),
            label=lab,
        )

    def subset(self, indices) -> "PointCloud":
        idx = np.asarray(indices)
        return PointCloud(
            positions=self.positions[idx],
            colors=self.colors[idx],
            labels=None if self.labels is None else self.labels[idx],
            room_id=self.room_id,
        )

    def with_room_id(self, room_id: str) -> "PointCloud":
        return replace(self, room_id=room_id)


def _load_numeric_lines(path: Path) -> np.ndarray:
    """Whitespace-separated numeric table; errors carry 1-based line numbers."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # loadtxt warns on empty input
            data = np.loadtxt(path, dtype=np.float64, ndmin=2)
    except (ValueError, UnicodeDecodeError):
        # Re-scan to pin malformed content to a line number.
        width = None
        with open(path, "r", errors="replace") as fh:
            for lineno, line in enumerate(fh, start=1):
                body = line.split("#", 1)[0].strip()
                if not body:
                    continue
                fields = body.split()
                if width is None:
                    width = len(fields)
                elif len(fields) != width:
                    raise CloudFormatError(
                        f"{path}: line {lineno}: expected {width} fields, got {len(fields)}"
                    ) from None
                for tok in fields:
                    try:
                        float(tok)
                    except ValueError:
                        raise CloudFormatError(
                            f"{path}: line {lineno}: unparsable field {tok!r}"
                        ) from None
        raise CloudFormatError(f"{path}: malformed numeric table") from None
    except OSError as exc:
        raise CloudFormatError(f"{path}: {exc}") from None
    if data.size == 0:
        raise CloudFormatError(f"{path}: no data lines")
    return data


def _cloud_from_table(
    data: np.ndarray, path: Path, with_labels: bool, room_id: str
) -> PointCloud:
    ncols = data.shape[1]
    if ncols not in (6, 7):
        raise CloudFormatError(
            f"{path}: expected 6 fields per line (x y z r g b), or 7 with a "
            f"label column, got {ncols}"
        )
    if with_labels and ncols != 7:
        raise CloudFormatError(f"{path}: labels requested but no 7th column present")
    bad = ~np.isfinite(data).all(axis=1)
    if bad.any():
        raise CloudFormatError(
            f"{path}: data line {int(np.flatnonzero(bad)[0]) + 1}: non-finite coordinate"
        )
    colors = data[:, 3:6]
    if np.any((colors < 0) | (colors > 255)) or np.any(colors != np.floor(colors)):
        bad_rows = np.flatnonzero(
            ((colors < 0) | (colors > 255) | (colors != np.floor(colors))).any(axis=1)
        )
        raise CloudFormatError(
            f"{path}: data line {int(bad_rows[0]) + 1}: color fields must be "
            "integers in [0, 255]"
        )
    labels = None
    if with_labels:
        raw = data[:, 6]
        if np.any(raw != np.floor(raw)):
            bad_rows = np.flatnonzero(raw != np.floor(raw))
            raise CloudFormatError(
                f"{path}: data line {int(bad_rows[0]) + 1}: label must be an integer"
            )
        labels = raw.astype(np.int32)
    return PointCloud(
        positions=data[:, :3],
        colors=colors.astype(np.uint8),
        labels=labels,
        room_id=room_id,
    )


def _room_id_for(path: Path) -> str:
    """Filesystem-safe room id; prepends the nearest Area_<n> ancestor if any."""
    base = path.stem if path.is_file() else path.name
    for parent in path.resolve().parents:
        if re.fullmatch(r"Area_\d+", parent.name):
            return f"{parent.name}_{base}"
    return base


def area_of(room_id: str) -> str:
    """Area grouping key encoded in a room id, e.g. Area_3_office_1 -> Area_3."""
    m = re.match(r"(Area_\d+)_", room_id)
    return m.group(1) if m else "ungrouped"


def parse_s3dis_room(path, with_labels: bool = False) -> PointCloud:
    """Load a room scan from text.

    ``path`` may be a single merged file (6 columns, or 7 when labels are
    wanted) or a room directory in the native layout, where per-object files
    under ``Annotations/`` carry the category in their filename.  Annotation
    files are concatenated in sorted filename order so loads are
    deterministic.
    """
    path = Path(path)
    if path.is_dir():
        ann = path / "Annotations"
        if ann.is_dir():
            files = sorted(ann.glob("*.txt"))
            if not files:
                raise CloudFormatError(f"{ann}: no annotation files")
            tables, labels = [], []
            for f in files:
                data = _load_numeric_lines(f)
                if data.shape[1] != 6:
                    raise CloudFormatError(
                        f"{f}: annotation files must have 6 columns, got {data.shape[1]}"
                    )
                tables.append(data)
                category = f.stem.split("_")[0].lower()
                cat_id = (
                    S3DIS_CATEGORIES.index(category)
                    if category in S3DIS_CATEGORIES
                    else S3DIS_CATEGORIES.index("clutter")
                )
                labels.append(np.full(data.shape[0], cat_id, dtype=np.int32))
            merged = np.vstack(tables)
            cloud = _cloud_from_table(merged, path, with_labels=False, room_id=_room_id_for(path))
            if with_labels:
                cloud = PointCloud(
                    positions=cloud.positions,
                    colors=cloud.colors,
                    labels=np.concatenate(labels),
                    room_id=cloud.room_id,
                )
            return cloud
        merged_file = path / f"{path.name}.txt"
        if not merged_file.is_file():
            raise CloudFormatError(
                f"{path}: neither an Annotations/ directory nor {merged_file.name} found"
            )
        path = merged_file
    if not path.is_file():
        raise CloudFormatError(f"{path}: no such file")
    data = _load_numeric_lines(path)
    return _cloud_from_table(data, path, with_labels=with_labels, room_id=_room_id_for(path))


_PLY_SCALARS = {
    "char": "i1", "int8": "i1", "uchar": "u1", "uint8": "u1",
    "short": "i2", "int16": "i2", "ushort": "u2", "uint16": "u2",
    "int": "i4", "int32": "i4", "uint": "u4", "uint32": "u4",
    "float": "f4", "float32": "f4", "double": "f8", "float64": "f8",
}


def parse_ply(path) -> PointCloud:
    """Load vertices from an ascii or binary_little_endian PLY file.

    Requires float/double x y z properties; uchar red/green/blue are used
    when all three are present, otherwise colors default to (0, 0, 0).
    Unsupported vertex layouts raise with the property list that was found.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise CloudFormatError(f"{path}: {exc}") from None
    end = raw.find(b"end_header\n")
    if not raw.startswith(b"ply") or end < 0:
        raise CloudFormatError(f"{path}: not a PLY file (missing header)")
    header = raw[:end].decode("ascii", errors="replace").splitlines()
    body = raw[end + len(b"end_header\n"):]

    fmt = None
    elements: list[tuple[str, int, list[tuple[str, str]]]] = []
    for line in header[1:]:
        fields = line.split()
        if not fields or fields[0] == "comment":
            continue
        if fields[0] == "format":
            if len(fields) < 2 or fields[1] not in ("ascii", "binary_little_endian"):
                raise CloudFormatError(f"{path}: unsupported format {line!r}")
            fmt = fields[1]
        elif fields[0] == "element":
            if len(fields) != 3 or not fields[2].isdigit():
                raise CloudFormatError(f"{path}: bad element line {line!r}")
            elements.append((fields[1], int(fields[2]), []))
        elif fields[0] == "property":
            if not elements:
                raise CloudFormatError(f"{path}: property before any element")
            if fields[1] == "list":
                elements[-1][2].append(("list", " ".join(fields[2:])))
            elif len(fields) == 3:
                elements[-1][2].append((fields[1], fields[2]))
            else:
                raise CloudFormatError(f"{path}: bad property line {line!r}")
    if fmt is None:
        raise CloudFormatError(f"{path}: header has no format line")

    vertex_props = None
    preceding: list[tuple[str, int, list[tuple[str, str]]]] = []
    vertex_count = 0
    for name, count, props in elements:
        if name == "vertex":
            vertex_props, vertex_count = props, count
            break
        preceding.append((name, count, props))
    if vertex_props is None:
        raise CloudFormatError(f"{path}: no vertex element")
    prop_names = [p[1] for p in vertex_props]

    def unsupported(reason: str) -> CloudFormatError:
        found = ", ".join(f"{t} {n}" for t, n in vertex_props)
        return CloudFormatError(f"{path}: {reason}; vertex properties found: {found}")

    if any(t == "list" for t, _ in vertex_props):
        raise unsupported("list property in vertex element")
    if len(set(prop_names)) != len(prop_names):
        raise unsupported("duplicate vertex property names")
    for axis in ("x", "y", "z"):
        if axis not in prop_names:
            raise unsupported(f"missing vertex property {axis}")
        t = vertex_props[prop_names.index(axis)][0]
        if t not in ("float", "float32", "double", "float64"):
            raise unsupported(f"vertex property {axis} has non-float type {t}")
    color_names = ("red", "green", "blue")
    n_colors = sum(1 for c in color_names if c in prop_names)
    has_color = n_colors == 3
    if 0 < n_colors < 3:
        raise unsupported("incomplete red/green/blue color triple")
    if has_color:
        for c in color_names:
            t = vertex_props[prop_names.index(c)][0]
            if t not in ("uchar", "uint8"):
                raise unsupported(f"vertex property {c} has non-uchar type {t}")
    if any(t not in _PLY_SCALARS for t, _ in vertex_props):
        raise unsupported("unknown property type")
    if vertex_count == 0:
        raise CloudFormatError(f"{path}: empty vertex element")

    if fmt == "binary_little_endian":
        for name, count, props in preceding:
            if any(t == "list" or t not in _PLY_SCALARS for t, _ in props):
                raise CloudFormatError(
                    f"{path}: cannot skip element {name!r} preceding the vertices"
                )
            body = body[count * sum(np.dtype("<" + _PLY_SCALARS[t]).itemsize for t, _ in props):]
        dtype = np.dtype(
            [(f"f{i}", "<" + _PLY_SCALARS[t]) for i, (t, _) in enumerate(vertex_props)]
        )
        if len(body) < vertex_count * dtype.itemsize:
            raise CloudFormatError(
                f"{path}: vertex element declares {vertex_count} entries but data is short"
            )
        packed = np.frombuffer(body, dtype=dtype, count=vertex_count)
        cols = {name: packed[f"f{i}"] for i, name in enumerate(prop_names)}
    else:
        lines = [ln for ln in body.decode("ascii", errors="replace").splitlines()
                 if ln.strip()]
        skip = sum(count for _, count, _ in preceding)
        lines = lines[skip:]
        if len(lines) < vertex_count:
            raise CloudFormatError(
                f"{path}: vertex element declares {vertex_count} lines, found {len(lines)}"
            )
        rows = []
        for lineno, ln in enumerate(lines[:vertex_count], start=1):
            fields = ln.split()
            if len(fields) != len(vertex_props):
                raise CloudFormatError(
                    f"{path}: vertex line {lineno}: expected {len(vertex_props)} "
                    f"fields, got {len(fields)}"
                )
            try:
                rows.append([float(tok) for tok in fields])
            except ValueError:
                raise CloudFormatError(
                    f"{path}: vertex line {lineno}: unparsable field"
                ) from None
        table = np.array(rows, dtype=np.float64)
        cols = {name: table[:, i] for i, name in enumerate(prop_names)}

    positions = np.column_stack(
        [cols["x"], cols["y"], cols["z"]]
    ).astype(np.float64)
    if not np.isfinite(positions).all():
        raise CloudFormatError(f"{path}: non-finite vertex coordinate")
    if has_color:
        colors = np.column_stack([cols[c] for c in color_names]).astype(np.uint8)
    else:
        colors = np.zeros((vertex_count, 3), dtype=np.uint8)
    return PointCloud(
        positions=positions, colors=colors, labels=None, room_id=_room_id_for(path)
    )


def write_partial_set(cloud: PointCloud, path) -> None:
    """Write ``x y z r g b [label]`` lines, coordinates with 6 decimals.

    Output bytes are a pure function of the cloud contents, so repeated
    writes of equal clouds are byte-identical.
    """
    path = Path(path)
    lines = []
    pos, col, lab = cloud.positions, cloud.colors, cloud.labels
    for i in range(len(cloud)):
        line = (
            f"{pos[i, 0]:.6f} {pos[i, 1]:.6f} {pos[i, 2]:.6f} "
            f"{col[i, 0]} {col[i, 1]} {col[i, 2]}"
        )
        if lab is not None:
            line += f" {lab[i]}"
        lines.append(line)
    path.write_text("\n".join(lines) + "\n")


def partial_filename(room_id: str, perspective_id: int, yaw_deg: float, pitch_deg: float) -> str:
    return f"{room_id}_v{perspective_id}_y{yaw_deg:g}_p{pitch_deg:g}.txt"


@dataclass(frozen=True)
class ManifestEntry:
    """One kept perspective of a generated multiview set."""

    perspective_id: int
    viewpoint: tuple[float, float, float]
    yaw_deg: float
    pitch_deg: float
    point_count: int
    file_path: str

    def to_dict(self) -> dict:
        return {
            "perspective_id": self.perspective_id,
            "viewpoint": list(self.viewpoint),
            "yaw_deg": self.yaw_deg,
            "pitch_deg": self.pitch_deg,
            "point_count": self.point_count,
            "file_path": self.file_path,
        }


@dataclass(frozen=True)
class MultiviewManifest:
    """Record of one room's multiview generation run.

    Besides the per-perspective entries this echoes the effective generation
    config (jobs and output paths excluded; they must not change results),
    the source path of the original scan, and the achieved point coverage.
    """

    room_id: str
    original_count: int
    entries: tuple[ManifestEntry, ...]
    generation_config_hash: str
    seed: int
    config: dict
    source_path: str = ""
    coverage: float = 0.0

    def to_dict(self) -> dict:
        entries = sorted(self.entries, key=lambda e: e.perspective_id)
        return {
            "room_id": self.room_id,
            "original_count": self.original_count,
            "entries": [e.to_dict() for e in entries],
            "generation_config_hash": self.generation_config_hash,
            "seed": self.seed,
            "config": self.config,
            "source_path": self.source_path,
            "coverage": self.coverage,
            "totals": {"original_sets": 1, "partial_sets": len(entries)},
        }


def write_manifest(manifest: MultiviewManifest, path) -> None:
    """Serialize a manifest as canonical JSON (sorted keys, sorted entries)."""
    ids = [e.perspective_id for e in manifest.entries]
    if len(set(ids)) != len(ids):
        raise ValueError(f"manifest for {manifest.room_id} has duplicate perspective ids")
    min_points = manifest.config.get("min_points")
    if min_points is not None:
        for e in manifest.entries:
            if e.point_count < int(min_points):
                raise ValueError(
                    f"manifest entry {e.perspective_id} has {e.point_count} points, "
                    f"below the configured minimum {min_points}"
                )
    Path(path).write_text(json.dumps(manifest.to_dict(), sort_keys=True, indent=2) + "\n")


def read_manifest(path) -> MultiviewManifest:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CloudFormatError(f"{path}: unreadable manifest: {exc}") from None
    try:
        entries = tuple(
            ManifestEntry(
                perspective_id=int(e["perspective_id"]),
                viewpoint=tuple(float(v) for v in e["viewpoint"]),
                yaw_deg=float(e["yaw_deg"]),
                pitch_deg=float(e["pitch_deg"]),
                point_count=int(e["point_count"]),
                file_path=str(e["file_path"]),
            )
            for e in doc["entries"]
        )
        return MultiviewManifest(
            room_id=str(doc["room_id"]),
            original_count=int(doc["original_count"]),
            entries=entries,
            generation_config_hash=str(doc["generation_config_hash"]),
            seed=int(doc["seed"]),
            config=dict(doc["config"]),
            source_path=str(doc.get("source_path", "")),
            coverage=float(doc.get("coverage", 0.0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CloudFormatError(f"{path}: malformed manifest: {exc}") from None
