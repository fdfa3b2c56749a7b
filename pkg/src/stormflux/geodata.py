"""Geographic, demographic and infrastructure inputs.

Loads the county / census-block-group snapshot, validates referential
integrity, and provides the spatial primitives (great-circle distance,
threatened-area flags) everything downstream consumes. Loaded datasets are
immutable and safe for concurrent reads.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import (
    DataFormatError,
    DomainError,
    ReferentialIntegrityError,
    ValidationError,
)

EARTH_RADIUS_MILES = 3958.8

RISK_ZONES = (1, 2, 3, 4, 5)

CBG_HEADER = ["geoid", "county_fips", "population", "lat", "lon", "risk_zone"]
COUNTY_HEADER = [
    "fips", "name", "district_id", "population", "lat", "lon",
    "hotel_count", "msa_flag", "interstate_flag", "pct_white",
]
DISTRICT_HEADER = ["fips", "district_id"]


def _check_coord(lat: float, lon: float) -> None:
    if not (math.isfinite(lat) and math.isfinite(lon)):
        raise DomainError(f"non-finite coordinate ({lat}, {lon})")
    if not (-90.0 <= lat <= 90.0):
        raise DomainError(f"latitude {lat} outside [-90, 90]")
    if not (-180.0 <= lon <= 180.0):
        raise DomainError(f"longitude {lon} outside [-180, 180]")


@dataclass(frozen=True)
class CensusBlockGroup:
    """Smallest population unit; carries its surge risk zone (None = outside)."""

    geoid: str
    county_fips: str
    population: int
    centroid: tuple[float, float]  # (lat, lon) degrees
    risk_zone: int | None

    def __post_init__(self):
        if self.population < 0:
            raise ValidationError(f"CBG {self.geoid}: negative population")
        _check_coord(*self.centroid)
        if self.risk_zone is not None and self.risk_zone not in RISK_ZONES:
            raise ValidationError(
                f"CBG {self.geoid}: risk_zone {self.risk_zone} not in {RISK_ZONES}"
            )


@dataclass(frozen=True)
class County:
    fips: str
    name: str
    district_id: str
    population: int
    centroid: tuple[float, float]
    hotel_count: int
    msa_flag: bool
    interstate_flag: bool
    pct_white: float
    threatened_flag: bool = False

    def __post_init__(self):
        if self.population < 0:
            raise ValidationError(f"county {self.fips}: negative population")
        if self.hotel_count < 0:
            raise ValidationError(f"county {self.fips}: negative hotel_count")
        if not 0.0 <= self.pct_white <= 1.0:
            raise ValidationError(
                f"county {self.fips}: pct_white {self.pct_white} outside [0, 1]"
            )
        _check_coord(*self.centroid)


@dataclass(frozen=True)
class ForecastTrack:
    hurricane_name: str
    category_at_landfall: int
    warned_county_fips: frozenset[str]

    def __post_init__(self):
        if self.category_at_landfall not in range(6):
            raise ValidationError(
                f"category {self.category_at_landfall} not in 0..5"
            )
        object.__setattr__(self, "warned_county_fips", frozenset(self.warned_county_fips))


def great_circle_miles(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Haversine distance in miles on a sphere of radius 3,958.8 mi."""
    _check_coord(*a)
    _check_coord(*b)
    lat1, lon1 = math.radians(a[0]), math.radians(a[1])
    lat2, lon2 = math.radians(b[0]), math.radians(b[1])
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    s = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_MILES * math.asin(min(1.0, math.sqrt(s)))


def apply_track(counties: list[County], track: ForecastTrack) -> list[County]:
    """Return a new county list with threatened_flag set exactly on warned FIPS."""
    known = {c.fips for c in counties}
    unknown = sorted(track.warned_county_fips - known)
    if unknown:
        raise ReferentialIntegrityError(
            f"warned counties not in county table: {', '.join(unknown)}"
        )
    warned = track.warned_county_fips
    return [replace(c, threatened_flag=c.fips in warned) for c in counties]


# ---------------------------------------------------------------------------
# CSV / GeoJSON loaders
# ---------------------------------------------------------------------------

def _open_rows(path, expected_header):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(str(exc), path=str(path)) from exc
    reader = csv.reader(text.splitlines())
    try:
        header = next(reader)
    except StopIteration:
        raise DataFormatError("empty file, header row mandatory", path=str(path))
    if [h.strip() for h in header] != expected_header:
        raise DataFormatError(
            f"bad header {header!r}, expected {expected_header!r}",
            path=str(path), line=1,
        )
    return list(reader)


def _parse(value, kind, what, path, line):
    try:
        if kind is int:
            return int(value)
        if kind is float:
            return float(value)
        if kind is bool:
            v = value.strip().lower()
            if v in ("1", "true", "t", "yes"):
                return True
            if v in ("0", "false", "f", "no"):
                return False
            raise ValueError(value)
    except ValueError:
        raise DataFormatError(f"bad {what}: {value!r}", path=str(path), line=line) from None
    raise AssertionError(kind)


def load_block_groups(path, counties: list[County] | None = None) -> list[CensusBlockGroup]:
    """Load block groups from CSV. When a county table is supplied, every
    county_fips must resolve to it."""
    rows = _open_rows(path, CBG_HEADER)
    known = None if counties is None else {c.fips for c in counties}
    out: list[CensusBlockGroup] = []
    seen: set[str] = set()
    for i, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != len(CBG_HEADER):
            raise DataFormatError(
                f"expected {len(CBG_HEADER)} fields, got {len(row)}", path=str(path), line=i
            )
        geoid, fips, pop, lat, lon, zone = [v.strip() for v in row]
        if geoid in seen:
            raise DataFormatError(f"duplicate geoid {geoid}", path=str(path), line=i)
        seen.add(geoid)
        if known is not None and fips not in known:
            raise ReferentialIntegrityError(
                f"{path}:{i}: CBG {geoid} references unknown county {fips}"
            )
        try:
            cbg = CensusBlockGroup(
                geoid=geoid,
                county_fips=fips,
                population=_parse(pop, int, "population", path, i),
                centroid=(
                    _parse(lat, float, "lat", path, i),
                    _parse(lon, float, "lon", path, i),
                ),
                risk_zone=None if zone == "" else _parse(zone, int, "risk_zone", path, i),
            )
        except (ValidationError, DomainError) as exc:
            raise DataFormatError(str(exc), path=str(path), line=i) from exc
        out.append(cbg)
    return out


def _county_from_fields(fields: dict, path, line) -> County:
    try:
        return County(
            fips=str(fields["fips"]).strip(),
            name=str(fields["name"]).strip(),
            district_id=str(fields["district_id"]).strip(),
            population=_parse(str(fields["population"]), int, "population", path, line),
            centroid=(
                _parse(str(fields["lat"]), float, "lat", path, line),
                _parse(str(fields["lon"]), float, "lon", path, line),
            ),
            hotel_count=_parse(str(fields["hotel_count"]), int, "hotel_count", path, line),
            msa_flag=_parse(str(fields["msa_flag"]), bool, "msa_flag", path, line),
            interstate_flag=_parse(str(fields["interstate_flag"]), bool, "interstate_flag", path, line),
            pct_white=_parse(str(fields["pct_white"]), float, "pct_white", path, line),
        )
    except KeyError as exc:
        raise DataFormatError(f"missing field {exc.args[0]!r}", path=str(path), line=line)
    except (ValidationError, DomainError) as exc:
        raise ValidationError(f"{path}:{line}: {exc}") from exc


def load_counties(path) -> list[County]:
    """Load counties from CSV, or from a GeoJSON FeatureCollection whose
    feature properties carry the same field names."""
    path = Path(path)
    if path.suffix.lower() in (".geojson", ".json"):
        return _load_counties_geojson(path)
    rows = _open_rows(path, COUNTY_HEADER)
    out: list[County] = []
    seen: set[str] = set()
    for i, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != len(COUNTY_HEADER):
            raise DataFormatError(
                f"expected {len(COUNTY_HEADER)} fields, got {len(row)}", path=str(path), line=i
            )
        fields = dict(zip(COUNTY_HEADER, (v.strip() for v in row)))
        county = _county_from_fields(fields, path, i)
        if county.fips in seen:
            raise DataFormatError(f"duplicate county fips {county.fips}", path=str(path), line=i)
        seen.add(county.fips)
        out.append(county)
    return out


def _load_counties_geojson(path) -> list[County]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataFormatError(str(exc), path=str(path)) from exc
    if doc.get("type") != "FeatureCollection":
        raise DataFormatError("expected a GeoJSON FeatureCollection", path=str(path))
    out = []
    seen: set[str] = set()
    for i, feature in enumerate(doc.get("features", [])):
        props = dict(feature.get("properties") or {})
        if "lat" not in props or "lon" not in props:
            geom = feature.get("geometry") or {}
            if geom.get("type") == "Point":
                lon, lat = geom["coordinates"][:2]
                props.setdefault("lat", lat)
                props.setdefault("lon", lon)
        county = _county_from_fields(props, path, i)
        if county.fips in seen:
            raise DataFormatError(f"duplicate county fips {county.fips}", path=str(path))
        seen.add(county.fips)
        out.append(county)
    return out


def load_districts(path) -> dict[str, str]:
    """Static fips -> district_id mapping; districts are opaque labels."""
    rows = _open_rows(path, DISTRICT_HEADER)
    mapping: dict[str, str] = {}
    for i, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise DataFormatError("expected 2 fields", path=str(path), line=i)
        fips, district = (v.strip() for v in row)
        if fips in mapping:
            raise DataFormatError(f"duplicate fips {fips}", path=str(path), line=i)
        mapping[fips] = district
    return mapping


# ---------------------------------------------------------------------------
# Canonical writers (normalized form is byte-stable under load/save cycles)
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def save_block_groups(cbgs: list[CensusBlockGroup], path) -> None:
    lines = [",".join(CBG_HEADER)]
    for g in sorted(cbgs, key=lambda g: g.geoid):
        zone = "" if g.risk_zone is None else str(g.risk_zone)
        lines.append(
            f"{g.geoid},{g.county_fips},{g.population},"
            f"{_fmt(g.centroid[0])},{_fmt(g.centroid[1])},{zone}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def save_counties(counties: list[County], path) -> None:
    lines = [",".join(COUNTY_HEADER)]
    for c in sorted(counties, key=lambda c: c.fips):
        lines.append(
            f"{c.fips},{c.name},{c.district_id},{c.population},"
            f"{_fmt(c.centroid[0])},{_fmt(c.centroid[1])},{c.hotel_count},"
            f"{int(c.msa_flag)},{int(c.interstate_flag)},{_fmt(c.pct_white)}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def save_districts(mapping: dict[str, str], path) -> None:
    lines = [",".join(DISTRICT_HEADER)]
    for fips in sorted(mapping):
        lines.append(f"{fips},{mapping[fips]}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Snapshot bundle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Datasets:
    """A validated, immutable snapshot: counties, block groups, districts
    and the raw case series used for prevalence estimation."""

    counties: tuple[County, ...]
    block_groups: tuple[CensusBlockGroup, ...]
    districts: dict[str, str]
    cases_path: Path | None = None
    quality_warnings: tuple[str, ...] = field(default_factory=tuple)

    @property
    def county_index(self) -> dict[str, County]:
        return {c.fips: c for c in self.counties}

    def population_of(self, fips: str) -> int:
        return self.county_index[fips].population


def load_datasets(data_dir, pop_tolerance: float = 0.01) -> Datasets:
    """Load and cross-validate the bundled snapshot directory layout:
    cbg.csv, counties.csv, districts.csv, evac_observations.csv, cases.csv."""
    data_dir = Path(data_dir)
    counties = load_counties(data_dir / "counties.csv")
    cbgs = load_block_groups(data_dir / "cbg.csv", counties=counties)
    districts = load_districts(data_dir / "districts.csv")

    missing = sorted({c.fips for c in counties} - set(districts))
    if missing:
        raise ReferentialIntegrityError(
            f"counties without a district mapping: {', '.join(missing)}"
        )
    for c in counties:
        if districts[c.fips] != c.district_id:
            raise ReferentialIntegrityError(
                f"county {c.fips}: district {c.district_id!r} disagrees with "
                f"districts.csv {districts[c.fips]!r}"
            )

    sums: dict[str, int] = {}
    for g in cbgs:
        sums[g.county_fips] = sums.get(g.county_fips, 0) + g.population
    quality: list[str] = []
    for c in counties:
        s = sums.get(c.fips, 0)
        if c.population == 0:
            continue
        if abs(s - c.population) > pop_tolerance * c.population:
            msg = (
                f"county {c.fips} population {c.population} differs from "
                f"CBG sum {s} by more than {pop_tolerance:.0%}"
            )
            quality.append(msg)
            warnings.warn(msg, stacklevel=2)

    cases_path = data_dir / "cases.csv"
    return Datasets(
        counties=tuple(counties),
        block_groups=tuple(cbgs),
        districts=districts,
        cases_path=cases_path if cases_path.exists() else None,
        quality_warnings=tuple(quality),
    )
