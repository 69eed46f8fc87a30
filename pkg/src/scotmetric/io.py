"""Reading and writing footprint series, masks and score reports.

Layout: one GeoJSON FeatureCollection per month in a directory, with the
``YYYY_MM`` label somewhere in the file name. A sibling file whose stem
ends in ``<label>_UDM`` holds the unusable-data polygons for that month.
Coordinates are planar pixels.
"""
from __future__ import annotations

import json
import logging
import re
from dataclasses import asdict
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DuplicateLabel, EmptyDirectory, GeometryError, InvalidGeometry, IoFailure, MissingId
from .geometry import Polygon, validate
from .scot import AoiScore, MatchCounts, ScoreReport, ScotConfig, Summary
from .series import Footprint, Frame, TimeSeries

log = logging.getLogger(__name__)

LABEL_RE = re.compile(r"(\d{4}_\d{2})(_UDM)?$")
VECTOR_SUFFIXES = (".geojson", ".json")
MASK_SUFFIXES = (".png", ".tif", ".tiff", ".bmp")


def _label_of(path: Path) -> tuple[str, bool] | None:
    m = LABEL_RE.search(path.stem)
    if m is None:
        return None
    return m.group(1), m.group(2) is not None


def _read_json(path: Path) -> dict:
    try:
        return json.loads(path.read_text())
    except (OSError, ValueError) as e:
        raise IoFailure(f"{path}: {e}") from e


def _parse_polygon(geom: dict | None, where: str) -> Polygon:
    if not geom:
        raise InvalidGeometry(f"{where}: missing geometry")
    kind = geom.get("type")
    coords = geom.get("coordinates")
    if kind == "MultiPolygon" and coords is not None and len(coords) == 1:
        kind, coords = "Polygon", coords[0]
    if kind != "Polygon" or not coords:
        raise InvalidGeometry(f"{where}: expected a Polygon geometry, got {kind}")
    try:
        return validate(coords[0], coords[1:])
    except (GeometryError, TypeError, IndexError, ValueError) as e:
        raise InvalidGeometry(f"{where}: {e}") from e


def _read_features(path: Path) -> list[dict]:
    doc = _read_json(path)
    if doc.get("type") != "FeatureCollection":
        raise InvalidGeometry(f"{path}: not a FeatureCollection")
    return doc.get("features", [])


def read_frame(path: Path, label: str, id_property: str | None = "id") -> Frame:
    footprints = []
    for k, feat in enumerate(_read_features(path)):
        where = f"{path.name} feature {k}"
        props = feat.get("properties") or {}
        if id_property is not None:
            if id_property not in props or props[id_property] is None:
                raise MissingId(f"{where}: no {id_property!r} property")
            fid = str(props[id_property])
        else:
            fid = str(k)
        footprints.append(Footprint(fid, _parse_polygon(feat.get("geometry"), where)))
    return Frame(label, footprints)


def read_udm(path: Path) -> list[Polygon]:
    return [
        _parse_polygon(f.get("geometry"), f"{path.name} feature {k}") for k, f in enumerate(_read_features(path))
    ]


def load_series(path, id_property: str | None = "id", aoi_id: str | None = None) -> TimeSeries:
    """Load one AOI's frames from a directory of monthly vector files."""
    root = Path(path)
    if not root.is_dir():
        raise IoFailure(f"{root}: not a directory")
    frames: dict[str, Path] = {}
    udms: dict[str, Path] = {}
    for p in sorted(root.iterdir()):
        if p.suffix.lower() not in VECTOR_SUFFIXES:
            continue
        parsed = _label_of(p)
        if parsed is None:
            continue
        label, is_udm = parsed
        target = udms if is_udm else frames
        if label in target:
            raise DuplicateLabel(f"{root}: label {label} appears in {target[label].name} and {p.name}")
        target[label] = p
    if not frames:
        raise EmptyDirectory(f"{root}: no labeled vector files")
    out = []
    for label in sorted(frames):
        f = read_frame(frames[label], label, id_property)
        if label in udms:
            f = Frame(label, f.footprints, read_udm(udms[label]))
        out.append(f)
    return TimeSeries(aoi_id or root.name, tuple(out))


def is_series_dir(path) -> bool:
    return any(
        p.suffix.lower() in VECTOR_SUFFIXES and _label_of(p) for p in Path(path).iterdir() if p.is_file()
    )


def load_dataset(gt_dir, prop_dir, id_property: str = "id") -> list[tuple[TimeSeries, TimeSeries]]:
    """Pair gt and proposal series.

    Either both directories hold monthly files directly (a single AOI), or
    each holds one subdirectory per AOI with matching names. An AOI with no
    proposal directory is scored against empty proposals.
    """
    gt_dir, prop_dir = Path(gt_dir), Path(prop_dir)
    for d in (gt_dir, prop_dir):
        if not d.is_dir():
            raise IoFailure(f"{d}: not a directory")
    if is_series_dir(gt_dir):
        aoi = gt_dir.name
        gt = load_series(gt_dir, id_property, aoi)
        return [(gt, load_series(prop_dir, id_property, aoi))]
    subdirs = sorted(p for p in gt_dir.iterdir() if p.is_dir())
    if not subdirs:
        raise EmptyDirectory(f"{gt_dir}: no labeled vector files or AOI subdirectories")
    pairs = []
    for sub in subdirs:
        gt = load_series(sub, id_property)
        psub = prop_dir / sub.name
        if psub.is_dir():
            prop = load_series(psub, id_property)
        else:
            log.warning("no proposals for AOI %s; scoring against empty frames", sub.name)
            prop = TimeSeries(sub.name, ())
        pairs.append((gt, prop))
    return pairs


def _feature(poly: Polygon, props: dict) -> dict:
    return {"type": "Feature", "properties": props, "geometry": {"type": "Polygon", "coordinates": poly.to_coords()}}


def _dump(path: Path, doc, indent: int | None = None) -> None:
    try:
        path.write_text(json.dumps(doc, sort_keys=True, indent=indent))
    except OSError as e:
        raise IoFailure(f"{path}: {e}") from e


def write_series(series: TimeSeries, path, prefix: str | None = None) -> None:
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    stem = prefix if prefix is not None else series.aoi_id
    for f in series.frames:
        feats = [_feature(fp.geometry, {"id": fp.id}) for fp in f.footprints]
        _dump(root / f"{stem}_{f.label}.geojson", {"type": "FeatureCollection", "features": feats})
        if f.udm:
            ufeats = [_feature(u, {}) for u in f.udm]
            _dump(root / f"{stem}_{f.label}_UDM.geojson", {"type": "FeatureCollection", "features": ufeats})


def load_masks(path) -> list[tuple[str, np.ndarray]]:
    """8-bit single-band rasters, nonzero = foreground, sorted by label."""
    root = Path(path)
    if not root.is_dir():
        raise IoFailure(f"{root}: not a directory")
    found: dict[str, Path] = {}
    for p in sorted(root.iterdir()):
        if p.suffix.lower() not in MASK_SUFFIXES:
            continue
        parsed = _label_of(p)
        if parsed is None or parsed[1]:
            continue
        if parsed[0] in found:
            raise DuplicateLabel(f"{root}: label {parsed[0]} appears twice")
        found[parsed[0]] = p
    if not found:
        raise EmptyDirectory(f"{root}: no labeled mask rasters")
    out = []
    for label in sorted(found):
        try:
            with Image.open(found[label]) as im:
                arr = np.asarray(im)
        except OSError as e:
            raise IoFailure(f"{found[label]}: {e}") from e
        if arr.ndim == 3:
            arr = arr[..., 0]
        out.append((label, arr != 0))
    return out


def report_to_dict(report: ScoreReport) -> dict:
    return {
        "config": asdict(report.config),
        "per_aoi": {
            aoi: {
                "counts": asdict(s.counts),
                "f1": s.f1,
                "f_track": s.f_track,
                "f_change": s.f_change,
                "f_scot": s.f_scot,
                "mota": s.mota,
            }
            for aoi, s in report.per_aoi.items()
        },
        "dataset": {name: asdict(v) for name, v in report.dataset.items()},
        "n_aoi": len(report.per_aoi),
    }


def report_from_dict(doc: dict) -> ScoreReport:
    per_aoi = {
        aoi: AoiScore(
            aoi_id=aoi,
            counts=MatchCounts(**e["counts"]),
            f1=e["f1"],
            f_track=e["f_track"],
            f_change=e["f_change"],
            f_scot=e["f_scot"],
            mota=e["mota"],
        )
        for aoi, e in doc["per_aoi"].items()
    }
    dataset = {k: Summary(**v) for k, v in doc["dataset"].items()}
    return ScoreReport(config=ScotConfig(**doc["config"]), per_aoi=per_aoi, dataset=dataset)


def write_report(report: ScoreReport, path, extra_config: dict | None = None) -> None:
    """JSON with sorted keys; floats keep full repr precision."""
    doc = report_to_dict(report)
    if extra_config:
        doc["config"].update(extra_config)
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    _dump(p, doc, indent=2)


def read_report(path) -> ScoreReport:
    doc = _read_json(Path(path))
    cfg_keys = {"beta", "iou_threshold", "min_area"}
    doc["config"] = {k: v for k, v in doc["config"].items() if k in cfg_keys}
    return report_from_dict(doc)
