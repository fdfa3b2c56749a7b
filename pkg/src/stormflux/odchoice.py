"""Origin-destination choice: a multinomial logit per accommodation type.

P(dest j | origin i) = exp(w . x_ij) / sum_k exp(w . x_ik) over every county
in the region except the origin itself. Threatened counties stay in the
choice set and are penalized through the threatened indicator. Count
covariates (population, hotels) enter as log1p so utilities stay bounded;
the transform choice travels with the coefficient file.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DataFormatError,
    DegenerateChoiceSetError,
    DomainError,
    ValidationError,
)
from .geodata import County, great_circle_miles

FRIENDS = "friends"
HOTEL = "hotel"

FRIENDS_COVARIATES = ("distance", "log_population", "threatened", "msa", "pct_white")
HOTEL_COVARIATES = ("distance", "log_hotels", "threatened", "interstate", "pct_white")

DEFAULT_TRANSFORMS = {"distance": "miles", "population": "log1p", "hotels": "log1p"}


@dataclass(frozen=True)
class ChoiceCoefficients:
    accommodation: str
    weights: dict[str, float]

    def __post_init__(self):
        expected = covariate_names(self.accommodation)
        got = tuple(sorted(self.weights))
        if got != tuple(sorted(expected)):
            raise ValidationError(
                f"{self.accommodation} coefficients must name exactly {expected}, got {got}"
            )


@dataclass(frozen=True)
class AccommodationSplit:
    friends_share: float
    hotel_share: float

    def __post_init__(self):
        if self.friends_share < 0.0 or self.hotel_share < 0.0:
            raise ValidationError("accommodation shares must be non-negative")
        if abs(self.friends_share + self.hotel_share - 1.0) > 1e-9:
            raise ValidationError(
                f"accommodation shares must sum to 1, got "
                f"{self.friends_share} + {self.hotel_share}"
            )


DEFAULT_SPLIT = AccommodationSplit(friends_share=0.6, hotel_share=0.4)


def covariate_names(accommodation: str) -> tuple[str, ...]:
    if accommodation == FRIENDS:
        return FRIENDS_COVARIATES
    if accommodation == HOTEL:
        return HOTEL_COVARIATES
    raise DomainError(f"unknown accommodation type {accommodation!r}")


def load_coefficients(path) -> tuple[ChoiceCoefficients, ChoiceCoefficients, dict]:
    """Read config/od_coefficients.json: one weight block per accommodation
    plus the transforms block that records covariate scaling."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataFormatError(str(exc), path=str(path)) from exc
    try:
        friends = ChoiceCoefficients(FRIENDS, {k: float(v) for k, v in doc["friends"].items()})
        hotel = ChoiceCoefficients(HOTEL, {k: float(v) for k, v in doc["hotel"].items()})
    except KeyError as exc:
        raise DataFormatError(f"missing block {exc.args[0]!r}", path=str(path))
    transforms = dict(doc.get("transforms", DEFAULT_TRANSFORMS))
    for key, expected in DEFAULT_TRANSFORMS.items():
        if transforms.get(key) != expected:
            raise ValidationError(
                f"unsupported transform {key}={transforms.get(key)!r}; "
                f"this build implements {key}={expected!r}"
            )
    return friends, hotel, transforms


def feature_vector(origin: County, dest: County, accommodation: str) -> dict[str, float]:
    """Named covariate vector for one (origin, destination) pair."""
    if origin.fips == dest.fips:
        raise DomainError("origin county is never its own destination candidate")
    common = {
        "distance": great_circle_miles(origin.centroid, dest.centroid),
        "threatened": 1.0 if dest.threatened_flag else 0.0,
        "pct_white": dest.pct_white,
    }
    if accommodation == FRIENDS:
        common["log_population"] = math.log1p(dest.population)
        common["msa"] = 1.0 if dest.msa_flag else 0.0
    elif accommodation == HOTEL:
        common["log_hotels"] = math.log1p(dest.hotel_count)
        common["interstate"] = 1.0 if dest.interstate_flag else 0.0
    else:
        raise DomainError(f"unknown accommodation type {accommodation!r}")
    return common


@dataclass(frozen=True)
class ODMatrix:
    origins: tuple[str, ...]
    destinations: tuple[str, ...]
    probs: np.ndarray  # |origins| x |destinations|, rows sum to 1

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", p)
        p.setflags(write=False)
        if p.shape != (len(self.origins), len(self.destinations)):
            raise ValidationError("probability matrix shape mismatch")
        if np.any(p < 0.0) or np.any(p > 1.0):
            raise ValidationError("probabilities outside [0, 1]")
        rowsum = p.sum(axis=1)
        if np.any(np.abs(rowsum - 1.0) > 1e-9):
            bad = int(np.argmax(np.abs(rowsum - 1.0)))
            raise ValidationError(
                f"row {self.origins[bad]} sums to {rowsum[bad]!r}, not 1"
            )
        dest_pos = {f: j for j, f in enumerate(self.destinations)}
        for i, f in enumerate(self.origins):
            j = dest_pos.get(f)
            if j is not None and p[i, j] != 0.0:
                raise ValidationError(f"origin {f} assigns itself probability {p[i, j]}")

    def prob(self, origin_fips: str, dest_fips: str) -> float:
        i = self.origins.index(origin_fips)
        j = self.destinations.index(dest_fips)
        return float(self.probs[i, j])


def _utility_matrix(origins, destinations, coeffs: ChoiceCoefficients) -> np.ndarray:
    o_lat = np.radians([c.centroid[0] for c in origins])
    o_lon = np.radians([c.centroid[1] for c in origins])
    d_lat = np.radians([c.centroid[0] for c in destinations])
    d_lon = np.radians([c.centroid[1] for c in destinations])
    # vectorized haversine matching great_circle_miles
    dlat = d_lat[None, :] - o_lat[:, None]
    dlon = d_lon[None, :] - o_lon[:, None]
    s = (np.sin(dlat / 2.0) ** 2
         + np.cos(o_lat)[:, None] * np.cos(d_lat)[None, :] * np.sin(dlon / 2.0) ** 2)
    miles = 2.0 * 3958.8 * np.arcsin(np.minimum(1.0, np.sqrt(s)))

    w = coeffs.weights
    threatened = np.array([1.0 if c.threatened_flag else 0.0 for c in destinations])
    pct_white = np.array([c.pct_white for c in destinations])
    util = w["distance"] * miles
    util += w["threatened"] * threatened + w["pct_white"] * pct_white
    if coeffs.accommodation == FRIENDS:
        util += w["log_population"] * np.log1p([float(c.population) for c in destinations])
        util += w["msa"] * np.array([1.0 if c.msa_flag else 0.0 for c in destinations])
    else:
        util += w["log_hotels"] * np.log1p([float(c.hotel_count) for c in destinations])
        util += w["interstate"] * np.array([1.0 if c.interstate_flag else 0.0 for c in destinations])
    return util


def od_probabilities(origins: list[County], destinations: list[County],
                     coeffs: ChoiceCoefficients) -> ODMatrix:
    """Row-stochastic choice matrix; numerically stable softmax per row with
    the origin's own column forced to zero."""
    if not origins:
        raise ValidationError("no origin counties")
    dest_fips = tuple(c.fips for c in destinations)
    dest_pos = {f: j for j, f in enumerate(dest_fips)}
    for o in origins:
        n_alt = len(destinations) - (1 if o.fips in dest_pos else 0)
        if n_alt < 2:
            raise DegenerateChoiceSetError(
                f"origin {o.fips} has {n_alt} destination alternatives; need >= 2"
            )

    util = _utility_matrix(origins, destinations, coeffs)
    for i, o in enumerate(origins):
        j = dest_pos.get(o.fips)
        if j is not None:
            util[i, j] = -np.inf

    finite = np.isfinite(util)
    if not finite.any(axis=1).all():
        i = int(np.argmin(finite.any(axis=1)))
        raise DegenerateChoiceSetError(
            f"origin {origins[i].fips}: all destination utilities are -inf"
        )
    rowmax = np.max(np.where(finite, util, -np.inf), axis=1, keepdims=True)
    expu = np.exp(util - rowmax)
    expu[~finite] = 0.0
    probs = expu / expu.sum(axis=1, keepdims=True)
    return ODMatrix(tuple(o.fips for o in origins), dest_fips, probs)


def blend(od_friends: ODMatrix, od_hotel: ODMatrix, split: AccommodationSplit) -> ODMatrix:
    """Convex combination of the two accommodation matrices."""
    if od_friends.origins != od_hotel.origins or od_friends.destinations != od_hotel.destinations:
        raise ValidationError("OD matrices must share origin/destination orderings")
    probs = split.friends_share * od_friends.probs + split.hotel_share * od_hotel.probs
    return ODMatrix(od_friends.origins, od_friends.destinations, probs)


def od_to_csv(matrix: ODMatrix, path) -> None:
    """Export with origin FIPS rows and destination FIPS columns."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["origin", *matrix.destinations])
        for i, fips in enumerate(matrix.origins):
            writer.writerow([fips, *[repr(float(v)) for v in matrix.probs[i]]])
