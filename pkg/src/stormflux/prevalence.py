"""Active-prevalence bounds from reported case counts.

Reported cases are assumed to undercount true infections. Dividing a
trailing-window case total by a detection-rate assumption (1/3, 1/5, 1/10
by default) yields a low / mid / high prevalence bound per county,
expressed per 10,000 residents.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path

from .errors import DataFormatError, DomainError, MissingSeriesError, ValidationError

CASES_HEADER = ["fips", "date", "new_cases"]
ESTIMATE_HEADER = ["fips", "as_of", "per10k_low", "per10k_mid", "per10k_high"]

DEFAULT_WINDOW_DAYS = 10


@dataclass(frozen=True)
class DetectionRates:
    """Assumed fraction of infections that get reported. `low` is the rate
    that produces the LOW prevalence bound (fewest inferred infections)."""

    low: float = 1.0 / 3.0
    mid: float = 1.0 / 5.0
    high: float = 1.0 / 10.0

    def __post_init__(self):
        for name in ("low", "mid", "high"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise DomainError(f"detection rate {name}={v} outside (0, 1]")
        if not self.high <= self.mid <= self.low:
            raise ValidationError(
                "detection rates must satisfy high <= mid <= low "
                "(lower detection implies more inferred infections)"
            )


DEFAULT_DETECTION = DetectionRates()


@dataclass(frozen=True)
class PrevalenceEstimate:
    county_fips: str
    as_of: date
    per10k_low: float
    per10k_mid: float
    per10k_high: float

    def __post_init__(self):
        if not 0.0 <= self.per10k_low <= self.per10k_mid <= self.per10k_high:
            raise ValidationError(
                f"county {self.county_fips}: prevalence bounds out of order "
                f"({self.per10k_low}, {self.per10k_mid}, {self.per10k_high})"
            )
        if self.per10k_high > 10_000.0:
            raise ValidationError(
                f"county {self.county_fips}: prevalence above total population"
            )


def load_cases(path) -> dict[str, dict[date, int]]:
    """Read `fips,date,new_cases` into per-county daily series."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(str(exc), path=str(path)) from exc
    reader = csv.reader(text.splitlines())
    try:
        header = next(reader)
    except StopIteration:
        raise DataFormatError("empty file", path=str(path))
    if [h.strip() for h in header] != CASES_HEADER:
        raise DataFormatError(f"bad header {header!r}", path=str(path), line=1)
    series: dict[str, dict[date, int]] = {}
    for i, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise DataFormatError("expected 3 fields", path=str(path), line=i)
        fips, day_s, count_s = (v.strip() for v in row)
        try:
            day = date.fromisoformat(day_s)
            count = int(count_s)
        except ValueError as exc:
            raise DataFormatError(str(exc), path=str(path), line=i) from exc
        if count < 0:
            raise DataFormatError(f"negative case count {count}", path=str(path), line=i)
        per_county = series.setdefault(fips, {})
        if day in per_county:
            raise DataFormatError(f"duplicate date {day} for {fips}", path=str(path), line=i)
        per_county[day] = count
    return series


def window_total(series: dict[date, int], as_of: date, window_days: int) -> int:
    """Cases on days d with as_of - window_days < d <= as_of."""
    start = as_of - timedelta(days=window_days)
    return sum(count for day, count in series.items() if start < day <= as_of)


def estimate_prevalence(
    cases: dict[str, dict[date, int]],
    populations: dict[str, int],
    as_of: date,
    window_days: int = DEFAULT_WINDOW_DAYS,
    detection: DetectionRates = DEFAULT_DETECTION,
) -> list[PrevalenceEstimate]:
    """One estimate per county in `populations`; a county with no case
    records inside the window is an explicit gap, never a silent zero."""
    if window_days < 1:
        raise DomainError("window_days must be >= 1")
    inv_low = 1.0 / detection.low
    inv_mid = 1.0 / detection.mid
    inv_high = 1.0 / detection.high

    out: list[PrevalenceEstimate] = []
    start = as_of - timedelta(days=window_days)
    for fips in sorted(populations):
        pop = populations[fips]
        if pop <= 0:
            raise DomainError(f"county {fips}: population must be positive")
        series = cases.get(fips)
        if series is None:
            raise MissingSeriesError(f"no case series for county {fips}")
        in_window = [d for d in series if start < d <= as_of]
        if not in_window:
            raise MissingSeriesError(
                f"county {fips}: no case records in window ({start}, {as_of}]"
            )
        total = sum(series[d] for d in in_window)
        base = total / pop * 10_000.0
        out.append(PrevalenceEstimate(
            county_fips=fips,
            as_of=as_of,
            per10k_low=base * inv_low,
            per10k_mid=base * inv_mid,
            per10k_high=base * inv_high,
        ))
    return out


def load_precomputed(path) -> list[PrevalenceEstimate]:
    """Load externally produced estimates (`fips,as_of,per10k_low,mid,high`)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(str(exc), path=str(path)) from exc
    reader = csv.reader(text.splitlines())
    try:
        header = next(reader)
    except StopIteration:
        raise DataFormatError("empty file", path=str(path))
    if [h.strip() for h in header] != ESTIMATE_HEADER:
        raise DataFormatError(f"bad header {header!r}", path=str(path), line=1)
    out: list[PrevalenceEstimate] = []
    for i, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 5:
            raise DataFormatError("expected 5 fields", path=str(path), line=i)
        fips, as_of_s, lo, mi, hi = (v.strip() for v in row)
        try:
            est = PrevalenceEstimate(
                county_fips=fips,
                as_of=date.fromisoformat(as_of_s),
                per10k_low=float(lo),
                per10k_mid=float(mi),
                per10k_high=float(hi),
            )
        except ValueError as exc:
            raise DataFormatError(str(exc), path=str(path), line=i) from exc
        except ValidationError as exc:
            raise ValidationError(f"{path}:{i}: {exc}") from exc
        out.append(est)
    return out


def save_estimates(estimates: list[PrevalenceEstimate], path) -> None:
    lines = [",".join(ESTIMATE_HEADER)]
    for e in estimates:
        lines.append(
            f"{e.county_fips},{e.as_of.isoformat()},"
            f"{repr(e.per10k_low)},{repr(e.per10k_mid)},{repr(e.per10k_high)}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
