"""End-to-end pipeline: participation rates to evacuees to exportations to
OD dispersion to receptions and importations, with Monte-Carlo credible
intervals and county/district aggregation.

Interval semantics: each replicate draws one Beta participation rate per
block group; "mid" is the per-county nearest-rank median across replicates,
propagated deterministically downstream (receptions and importations mids
are linear images of the evacuee mids), which makes mid-level flow
conservation exact by construction. Low/high endpoints are 5th/95th
nearest-rank percentiles of the per-replicate streams; exportation and
importation endpoints take the detection branch that widens them (low
detection-rate branch for the high endpoint and vice versa). Detection
branches rescale prevalence, never the evacuation draws, so evacuee bounds
reflect rate uncertainty only.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import warnings as _warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit

from . import mc
from .errors import (
    DataFormatError,
    MissingSeriesError,
    ReferentialIntegrityError,
    ValidationError,
)
from .evacmodel import BetaEvacModel
from .geodata import CensusBlockGroup, Datasets, ForecastTrack, apply_track
from .odchoice import (
    DEFAULT_SPLIT,
    AccommodationSplit,
    ChoiceCoefficients,
    blend,
    od_probabilities,
)
from .prevalence import (
    DEFAULT_DETECTION,
    DEFAULT_WINDOW_DAYS,
    DetectionRates,
    estimate_prevalence,
    load_cases,
    load_precomputed,
)

SCHEMA_VERSION = 1
DEFAULT_MC_SAMPLES = 2_000
DEFAULT_CI_LEVEL = 0.90

QUANTITIES = ("evac_rate", "evacuees", "exportations", "receptions",
              "importations", "importations_per10k")

COMPUTED = "computed"
PRECOMPUTED = "precomputed"


@dataclass(frozen=True)
class CredibleInterval:
    low: float
    mid: float
    high: float
    level: float = DEFAULT_CI_LEVEL

    def __post_init__(self):
        if not (np.isfinite(self.low) and np.isfinite(self.mid) and np.isfinite(self.high)):
            raise ValidationError("interval endpoints must be finite")
        if not self.low <= self.mid <= self.high:
            raise ValidationError(
                f"interval endpoints out of order: {self.low}, {self.mid}, {self.high}"
            )
        if not 0.0 < self.level < 1.0:
            raise ValidationError(f"interval level must be in (0, 1), got {self.level}")

    def as_dict(self) -> dict:
        return {"low": self.low, "mid": self.mid, "high": self.high}


@dataclass(frozen=True)
class PrevalenceSource:
    source: str
    as_of: dt.date | None = None
    window_days: int = DEFAULT_WINDOW_DAYS
    path: str | None = None
    detection: DetectionRates = DEFAULT_DETECTION

    def __post_init__(self):
        if self.source not in (COMPUTED, PRECOMPUTED):
            raise ValidationError(
                f"prevalence source must be {COMPUTED!r} or {PRECOMPUTED!r}, "
                f"got {self.source!r}"
            )
        if self.source == COMPUTED and self.as_of is None:
            raise ValidationError("computed prevalence requires an as_of date")
        if self.source == PRECOMPUTED and self.path is None:
            raise ValidationError("precomputed prevalence requires a path")
        if self.window_days < 1:
            raise ValidationError(f"window_days must be >= 1, got {self.window_days}")


@dataclass(frozen=True)
class Scenario:
    name: str
    track: ForecastTrack
    mandatory_fips: frozenset[str]
    voluntary_fips: frozenset[str]
    prevalence: PrevalenceSource
    split: AccommodationSplit = DEFAULT_SPLIT
    mc_samples: int = DEFAULT_MC_SAMPLES
    seed: int = 0
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not self.name:
            raise ValidationError("scenario name must be non-empty")
        if self.mc_samples < 1:
            raise ValidationError(f"mc_samples must be >= 1, got {self.mc_samples}")
        overlap = self.mandatory_fips & self.voluntary_fips
        if overlap:
            raise ValidationError(
                f"counties under both mandatory and voluntary orders: "
                f"{', '.join(sorted(overlap))}"
            )
        # orders outside the warned set are legal but worth flagging
        notes = list(self.warnings)
        outside = (self.mandatory_fips | self.voluntary_fips) - self.track.warned_county_fips
        if outside:
            notes.append(
                "ordered counties outside the warned set: " + ", ".join(sorted(outside))
            )
        object.__setattr__(self, "warnings", tuple(notes))

    @property
    def ordered_fips(self) -> frozenset[str]:
        return self.mandatory_fips | self.voluntary_fips


def _prevalence_from_dict(doc: dict, base_dir: Path | None) -> PrevalenceSource:
    source = doc.get("source")
    as_of = doc.get("as_of")
    if as_of is not None:
        try:
            as_of = dt.date.fromisoformat(as_of)
        except ValueError as exc:
            raise ValidationError(f"bad as_of date {doc['as_of']!r}") from exc
    path = doc.get("path")
    if path is not None and base_dir is not None:
        path = str((base_dir / path).resolve()) if not Path(path).is_absolute() else path
    detection_doc = doc.get("detection")
    try:
        detection = DEFAULT_DETECTION if detection_doc is None else DetectionRates(
            low=float(detection_doc["low"]),
            mid=float(detection_doc["mid"]),
            high=float(detection_doc["high"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(
            "detection needs numeric low/mid/high reporting rates"
        ) from exc
    return PrevalenceSource(
        source=source,
        as_of=as_of,
        window_days=int(doc.get("window_days", DEFAULT_WINDOW_DAYS)),
        path=path,
        detection=detection,
    )


def scenario_from_dict(doc: dict, base_dir=None) -> Scenario:
    base_dir = Path(base_dir) if base_dir is not None else None
    try:
        name = doc["name"]
        category = int(doc["category"])
        warned = frozenset(str(f) for f in doc["warned"])
        prevalence_doc = doc["prevalence"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"scenario is missing required key: {exc.args[0]!r}") from exc
    split_doc = doc.get("split")
    split = DEFAULT_SPLIT if split_doc is None else AccommodationSplit(
        friends_share=float(split_doc["friends"]), hotel_share=float(split_doc["hotel"])
    )
    return Scenario(
        name=str(name),
        track=ForecastTrack(hurricane_name=str(name), category_at_landfall=category,
                            warned_county_fips=warned),
        mandatory_fips=frozenset(str(f) for f in doc.get("mandatory", ())),
        voluntary_fips=frozenset(str(f) for f in doc.get("voluntary", ())),
        prevalence=_prevalence_from_dict(prevalence_doc, base_dir),
        split=split,
        mc_samples=int(doc.get("mc_samples", DEFAULT_MC_SAMPLES)),
        seed=int(doc.get("seed", 0)),
    )


def scenario_to_dict(scenario: Scenario) -> dict:
    prevalence = {"source": scenario.prevalence.source,
                  "window_days": scenario.prevalence.window_days}
    if scenario.prevalence.as_of is not None:
        prevalence["as_of"] = scenario.prevalence.as_of.isoformat()
    if scenario.prevalence.path is not None:
        prevalence["path"] = scenario.prevalence.path
    if scenario.prevalence.detection != DEFAULT_DETECTION:
        d = scenario.prevalence.detection
        prevalence["detection"] = {"low": d.low, "mid": d.mid, "high": d.high}
    return {
        "name": scenario.name,
        "category": scenario.track.category_at_landfall,
        "warned": sorted(scenario.track.warned_county_fips),
        "mandatory": sorted(scenario.mandatory_fips),
        "voluntary": sorted(scenario.voluntary_fips),
        "split": {"friends": scenario.split.friends_share,
                  "hotel": scenario.split.hotel_share},
        "prevalence": prevalence,
        "mc_samples": scenario.mc_samples,
        "seed": scenario.seed,
    }


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataFormatError(str(exc), path=str(path)) from exc
    if not isinstance(doc, dict):
        raise DataFormatError("scenario file must hold a JSON object", path=str(path))
    return scenario_from_dict(doc, base_dir=path.parent)


def save_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(
        json.dumps(scenario_to_dict(scenario), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def effective_category(cbg: CensusBlockGroup, scenario: Scenario) -> int | None:
    """Hurricane category a block group's residents respond to: the track
    category under a mandatory order, 0 under a voluntary order, None (no
    participation) when the county has no order or the block group carries
    no risk zone."""
    if cbg.risk_zone is None:
        return None
    if cbg.county_fips in scenario.mandatory_fips:
        return scenario.track.category_at_landfall
    if cbg.county_fips in scenario.voluntary_fips:
        return 0
    return None


@dataclass(frozen=True)
class CountyOutcome:
    fips: str
    name: str
    district_id: str
    population: int
    evac_rate: CredibleInterval
    evacuees: CredibleInterval
    exportations: CredibleInterval
    receptions: CredibleInterval
    importations: CredibleInterval
    importations_per10k: CredibleInterval

    def interval(self, quantity: str) -> CredibleInterval:
        if quantity not in QUANTITIES:
            raise ValidationError(f"unknown quantity {quantity!r}")
        return getattr(self, quantity)


@dataclass(frozen=True)
class DistrictOutcome:
    district_id: str
    population: int
    n_counties: int
    evac_rate: CredibleInterval
    evacuees: CredibleInterval
    exportations: CredibleInterval
    receptions: CredibleInterval
    importations: CredibleInterval
    importations_per10k: CredibleInterval

    def interval(self, quantity: str) -> CredibleInterval:
        if quantity not in QUANTITIES:
            raise ValidationError(f"unknown quantity {quantity!r}")
        return getattr(self, quantity)


@dataclass(frozen=True)
class ScenarioResult:
    scenario_name: str
    counties: tuple[CountyOutcome, ...]
    districts: tuple[DistrictOutcome, ...]
    totals: dict[str, CredibleInterval]
    meta: dict

    def __post_init__(self):
        evac = sum(c.evacuees.mid for c in self.counties)
        recep = sum(c.receptions.mid for c in self.counties)
        if abs(evac - recep) > 0.5:
            raise ValidationError(
                f"flow conservation violated: {evac} evacuees vs {recep} receptions"
            )
        exported = sum(c.exportations.mid for c in self.counties)
        imported = sum(c.importations.mid for c in self.counties)
        if abs(exported - imported) > 0.5:
            raise ValidationError(
                f"flow conservation violated: {exported} exportations vs "
                f"{imported} importations"
            )
        for c in self.counties:
            for q in QUANTITIES:
                if c.interval(q).low < 0.0:
                    raise ValidationError(f"negative {q} for county {c.fips}")

    def county(self, fips: str) -> CountyOutcome:
        for c in self.counties:
            if c.fips == fips:
                return c
        raise ValidationError(f"no county {fips} in result")

    def district(self, district_id: str) -> DistrictOutcome:
        for d in self.districts:
            if d.district_id == district_id:
                return d
        raise ValidationError(f"no district {district_id} in result")


def _tail_percents(level: float) -> tuple[int, int]:
    tails = round((1.0 - level) * 100.0)
    if abs((1.0 - level) * 100.0 - tails) > 1e-9 or tails % 2 or not 0 < tails < 100:
        raise ValidationError(
            f"interval level {level} does not split into whole-percent tails"
        )
    return tails // 2, 100 - tails // 2


def _rank_index(n: int, percent: int) -> int:
    # nearest-rank: 1-based rank ceil(percent/100 * n) in pure integers
    return max(1, (percent * n + 99) // 100) - 1


def _sorted_ranks(streams: np.ndarray, p_low: int, p_high: int):
    """5th/median/95th nearest-rank rows of a replicates x units array."""
    n = streams.shape[0]
    ordered = np.sort(streams, axis=0)
    return (ordered[_rank_index(n, p_low)],
            ordered[_rank_index(n, 50)],
            ordered[_rank_index(n, p_high)])


def _ci(low: float, mid: float, high: float, level: float) -> CredibleInterval:
    # propagated mids can sit ulps outside the sampled percentiles
    return CredibleInterval(min(float(low), float(mid)), float(mid),
                            max(float(high), float(mid)), level)


def _prevalence_columns(scenario, datasets, counties, origin_fips):
    """Per-10k prevalence bound arrays aligned to county order; zero for
    counties that never export. Missing series for an origin county is an
    error, never a silent zero."""
    src = scenario.prevalence
    k = len(counties)
    cols = {name: np.zeros(k) for name in ("low", "mid", "high")}
    if not origin_fips:
        return cols["low"], cols["mid"], cols["high"]
    if src.source == COMPUTED:
        if datasets.cases_path is None:
            raise MissingSeriesError("dataset directory carries no cases.csv")
        cases = load_cases(datasets.cases_path)
        populations = {c.fips: c.population for c in counties if c.fips in origin_fips}
        estimates = estimate_prevalence(cases, populations, src.as_of,
                                        window_days=src.window_days,
                                        detection=src.detection)
        by_fips = {e.county_fips: e for e in estimates}
    else:
        rows = load_precomputed(src.path)
        if src.as_of is not None:
            rows = [e for e in rows if e.as_of == src.as_of]
        by_fips = {e.county_fips: e for e in rows}
        missing = sorted(origin_fips - by_fips.keys())
        if missing:
            raise MissingSeriesError(
                f"no precomputed prevalence for counties: {', '.join(missing)}"
            )
    pos = {c.fips: i for i, c in enumerate(counties)}
    for fips in origin_fips:
        est = by_fips[fips]
        i = pos[fips]
        cols["low"][i] = est.per10k_low
        cols["mid"][i] = est.per10k_mid
        cols["high"][i] = est.per10k_high
    return cols["low"], cols["mid"], cols["high"]


def run_scenario(scenario: Scenario, datasets: Datasets, model: BetaEvacModel,
                 coeffs: tuple[ChoiceCoefficients, ChoiceCoefficients], *,
                 point_rates: bool = False, kernel: str | None = None,
                 level: float = DEFAULT_CI_LEVEL) -> ScenarioResult:
    """Execute the full pipeline for one scenario.

    point_rates swaps every Beta draw for its mean and collapses to a single
    replicate, which removes evacuation uncertainty while keeping the three
    detection branches; used for calibration checks and monotonicity probes.
    """
    if model is None:
        raise ValidationError("a fitted rate model is required")
    p_low_pct, p_high_pct = _tail_percents(level)

    counties = apply_track(datasets.counties, scenario.track)
    pos = {c.fips: i for i, c in enumerate(counties)}
    unknown = sorted(scenario.ordered_fips - pos.keys())
    if unknown:
        raise ReferentialIntegrityError(
            f"scenario orders reference unknown counties: {', '.join(unknown)}"
        )
    district_map = dict(datasets.districts)
    unmapped = sorted(set(pos) - district_map.keys())
    if unmapped:
        raise ReferentialIntegrityError(
            f"counties not mapped to a district: {', '.join(unmapped)}"
        )

    k = len(counties)
    county_pop = np.array([float(c.population) for c in counties])

    # per-block-group Beta parameters, in block-group order
    zones, cats, persons, county_of = [], [], [], []
    for cbg in datasets.block_groups:
        cat = effective_category(cbg, scenario)
        if cat is None or cbg.population == 0:
            continue
        zones.append(cbg.risk_zone)
        cats.append(cat)
        persons.append(float(cbg.population))
        county_of.append(pos[cbg.county_fips])
    n_active = len(persons)
    replicates = 1 if point_rates else scenario.mc_samples

    if n_active:
        bz = np.asarray(model.beta_zone)[np.asarray(zones)]
        bh = np.asarray(model.beta_intensity)[np.asarray(cats)]
        mu = expit(model.alpha + bz + bh)
        mu = np.clip(mu, 1e-12, 1.0 - 1e-12)
        persons = np.asarray(persons)
        county_of = np.asarray(county_of, dtype=np.int64)
        if point_rates:
            evac = np.bincount(county_of, weights=mu * persons,
                               minlength=k).reshape(1, k)
        else:
            evac = mc.draw_evacuees(mu * model.lam, (1.0 - mu) * model.lam,
                                    persons, county_of, k, replicates,
                                    scenario.seed, kernel=kernel)
    else:
        evac = np.zeros((replicates, k))

    origin_fips = {counties[i].fips for i in set(int(j) for j in county_of)} if n_active else set()
    per10k_low, per10k_mid, per10k_high = _prevalence_columns(
        scenario, datasets, counties, origin_fips)
    scale_low, scale_mid, scale_high = (per10k_low / 1e4, per10k_mid / 1e4,
                                        per10k_high / 1e4)

    if n_active:
        friends, hotel = coeffs
        od = blend(od_probabilities(counties, counties, friends),
                   od_probabilities(counties, counties, hotel),
                   scenario.split).probs
    else:
        od = np.zeros((k, k))

    # low/high detection branches feed the matching interval endpoints; the
    # mid branch enters only through the propagated medians below
    exports_low = evac * scale_low
    exports_high = evac * scale_high
    receptions = evac @ od
    imports_low = exports_low @ od
    imports_high = exports_high @ od

    # nearest-rank percentiles of the county streams
    evac_lo, evac_md, evac_hi = _sorted_ranks(evac, p_low_pct, p_high_pct)
    exp_lo = _sorted_ranks(exports_low, p_low_pct, p_high_pct)[0]
    exp_hi = _sorted_ranks(exports_high, p_low_pct, p_high_pct)[2]
    rec_lo, _, rec_hi = _sorted_ranks(receptions, p_low_pct, p_high_pct)
    imp_lo = _sorted_ranks(imports_low, p_low_pct, p_high_pct)[0]
    imp_hi = _sorted_ranks(imports_high, p_low_pct, p_high_pct)[2]

    # deterministic propagation of the county medians keeps mid-level flow
    # conservation exact
    evac_mid = evac_md
    exp_mid = evac_mid * scale_mid
    rec_mid = evac_mid @ od
    imp_mid = exp_mid @ od

    zero_pop = [c.fips for c in counties if c.population == 0]
    if zero_pop and n_active:
        _warnings.warn(
            "zero-population counties report rate 0: " + ", ".join(zero_pop),
            stacklevel=2,
        )

    county_outcomes = []
    for i, c in enumerate(counties):
        def rate(v, pop=county_pop[i]):
            return float(v) / pop if pop > 0.0 else 0.0

        def per10k(v, pop=county_pop[i]):
            return float(v) / pop * 1e4 if pop > 0.0 else 0.0

        county_outcomes.append(CountyOutcome(
            fips=c.fips, name=c.name, district_id=district_map[c.fips],
            population=c.population,
            evac_rate=_ci(rate(evac_lo[i]), rate(evac_mid[i]), rate(evac_hi[i]), level),
            evacuees=_ci(evac_lo[i], evac_mid[i], evac_hi[i], level),
            exportations=_ci(exp_lo[i], exp_mid[i], exp_hi[i], level),
            receptions=_ci(rec_lo[i], rec_mid[i], rec_hi[i], level),
            importations=_ci(imp_lo[i], imp_mid[i], imp_hi[i], level),
            importations_per10k=_ci(per10k(imp_lo[i]), per10k(imp_mid[i]),
                                    per10k(imp_hi[i]), level),
        ))

    district_ids = sorted(set(district_map.values()))
    members = {d: [i for i, c in enumerate(counties) if district_map[c.fips] == d]
               for d in district_ids}
    district_outcomes = []
    for d in district_ids:
        idx = members[d]
        pop = float(np.sum(county_pop[idx]))

        def rate(v, pop=pop):
            return float(v) / pop if pop > 0.0 else 0.0

        def per10k(v, pop=pop):
            return float(v) / pop * 1e4 if pop > 0.0 else 0.0

        ev = _sorted_ranks(evac[:, idx].sum(axis=1), p_low_pct, p_high_pct)
        ex_lo = _sorted_ranks(exports_low[:, idx].sum(axis=1), p_low_pct, p_high_pct)[0]
        ex_hi = _sorted_ranks(exports_high[:, idx].sum(axis=1), p_low_pct, p_high_pct)[2]
        rc = _sorted_ranks(receptions[:, idx].sum(axis=1), p_low_pct, p_high_pct)
        im_lo = _sorted_ranks(imports_low[:, idx].sum(axis=1), p_low_pct, p_high_pct)[0]
        im_hi = _sorted_ranks(imports_high[:, idx].sum(axis=1), p_low_pct, p_high_pct)[2]
        ev_mid = float(np.sum(evac_mid[idx]))
        ex_mid = float(np.sum(exp_mid[idx]))
        rc_mid = float(np.sum(rec_mid[idx]))
        im_mid = float(np.sum(imp_mid[idx]))
        district_outcomes.append(DistrictOutcome(
            district_id=d, population=int(round(pop)), n_counties=len(idx),
            evac_rate=_ci(rate(ev[0]), rate(ev_mid), rate(ev[2]), level),
            evacuees=_ci(ev[0], ev_mid, ev[2], level),
            exportations=_ci(ex_lo, ex_mid, ex_hi, level),
            receptions=_ci(rc[0], rc_mid, rc[2], level),
            importations=_ci(im_lo, im_mid, im_hi, level),
            importations_per10k=_ci(per10k(im_lo), per10k(im_mid), per10k(im_hi), level),
        ))

    t_evac = _sorted_ranks(evac.sum(axis=1), p_low_pct, p_high_pct)
    t_recep = _sorted_ranks(receptions.sum(axis=1), p_low_pct, p_high_pct)
    t_exp_lo = _sorted_ranks(exports_low.sum(axis=1), p_low_pct, p_high_pct)[0]
    t_exp_hi = _sorted_ranks(exports_high.sum(axis=1), p_low_pct, p_high_pct)[2]
    t_imp_lo = _sorted_ranks(imports_low.sum(axis=1), p_low_pct, p_high_pct)[0]
    t_imp_hi = _sorted_ranks(imports_high.sum(axis=1), p_low_pct, p_high_pct)[2]
    totals = {
        "evacuees": _ci(t_evac[0], float(np.sum(evac_mid)), t_evac[2], level),
        "exportations": _ci(t_exp_lo, float(np.sum(exp_mid)), t_exp_hi, level),
        "receptions": _ci(t_recep[0], float(np.sum(rec_mid)), t_recep[2], level),
        "importations": _ci(t_imp_lo, float(np.sum(imp_mid)), t_imp_hi, level),
    }

    meta = {
        "schema_version": SCHEMA_VERSION,
        "mc_samples": replicates,
        "seed": scenario.seed,
        "point_rates": point_rates,
        "level": level,
        "kernel": "point" if point_rates else (kernel or mc.active_kernel_name()),
        "warnings": list(scenario.warnings),
    }
    return ScenarioResult(scenario_name=scenario.name,
                          counties=tuple(county_outcomes),
                          districts=tuple(district_outcomes),
                          totals=totals, meta=meta)


def aggregate_county_rate(result: ScenarioResult, fips: str) -> float:
    """Population-weighted county participation rate: predicted evacuees
    over county population, with non-ordered block groups contributing 0."""
    c = result.county(fips)
    if c.population <= 0:
        _warnings.warn(f"county {fips} has zero population; rate reported as 0",
                       stacklevel=2)
        return 0.0
    return c.evacuees.mid / c.population


def aggregate_district(result: ScenarioResult, district_map: dict[str, str]) -> dict:
    """Mid-value district rollup recomputed from county records: sums of
    receptions/importations plus population-relative versions."""
    unmapped = sorted(c.fips for c in result.counties if c.fips not in district_map)
    if unmapped:
        raise ReferentialIntegrityError(
            f"counties not mapped to a district: {', '.join(unmapped)}"
        )
    rollup: dict[str, dict] = {}
    for d in sorted(set(district_map[c.fips] for c in result.counties)):
        members = [c for c in result.counties if district_map[c.fips] == d]
        pop = sum(c.population for c in members)
        receptions = float(np.sum([c.receptions.mid for c in members]))
        importations = float(np.sum([c.importations.mid for c in members]))
        rollup[d] = {
            "population": pop,
            "n_counties": len(members),
            "evacuees": float(np.sum([c.evacuees.mid for c in members])),
            "exportations": float(np.sum([c.exportations.mid for c in members])),
            "receptions": receptions,
            "importations": importations,
            "receptions_share_of_population": receptions / pop if pop else 0.0,
            "importations_per10k": importations / pop * 1e4 if pop else 0.0,
        }
    return rollup


@dataclass(frozen=True)
class ComparisonEntry:
    delta_mid: float
    a: CredibleInterval
    b: CredibleInterval


@dataclass(frozen=True)
class ScenarioComparison:
    name_a: str
    name_b: str
    counties: dict[str, dict[str, ComparisonEntry]]
    districts: dict[str, dict[str, ComparisonEntry]]
    totals: dict[str, ComparisonEntry]


def compare_scenarios(a: ScenarioResult, b: ScenarioResult) -> ScenarioComparison:
    """Per-county/district mid deltas (a minus b) with both intervals kept
    side by side; no interval arithmetic on the deltas."""
    fips_a = [c.fips for c in a.counties]
    fips_b = [c.fips for c in b.counties]
    if fips_a != fips_b:
        raise ValidationError("results cover different county universes")
    dist_a = [d.district_id for d in a.districts]
    if dist_a != [d.district_id for d in b.districts]:
        raise ValidationError("results cover different district universes")

    def entries(rec_a, rec_b):
        return {q: ComparisonEntry(rec_a.interval(q).mid - rec_b.interval(q).mid,
                                   rec_a.interval(q), rec_b.interval(q))
                for q in QUANTITIES}

    counties = {ca.fips: entries(ca, cb) for ca, cb in zip(a.counties, b.counties)}
    districts = {da.district_id: entries(da, db)
                 for da, db in zip(a.districts, b.districts)}
    totals = {q: ComparisonEntry(a.totals[q].mid - b.totals[q].mid,
                                 a.totals[q], b.totals[q])
              for q in a.totals}
    return ScenarioComparison(a.scenario_name, b.scenario_name,
                              counties, districts, totals)


def summary_dict(result: ScenarioResult) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "scenario": result.scenario_name,
        "level": result.meta["level"],
        "mc_samples": result.meta["mc_samples"],
        "seed": result.meta["seed"],
        "point_rates": result.meta["point_rates"],
        "totals": {name: ci.as_dict() for name, ci in result.totals.items()},
        "warnings": list(result.meta["warnings"]),
    }


def result_to_dict(result: ScenarioResult) -> dict:
    def record(rec, head: dict) -> dict:
        head.update({q: rec.interval(q).as_dict() for q in QUANTITIES})
        return head

    doc = summary_dict(result)
    doc["counties"] = [
        record(c, {"fips": c.fips, "name": c.name, "district_id": c.district_id,
                   "population": c.population})
        for c in result.counties
    ]
    doc["districts"] = [
        record(d, {"district_id": d.district_id, "population": d.population,
                   "n_counties": d.n_counties})
        for d in result.districts
    ]
    return doc


def _interval_columns() -> list[str]:
    return [f"{q}_{end}" for q in QUANTITIES for end in ("low", "mid", "high")]


def _interval_cells(rec) -> list[str]:
    cells = []
    for q in QUANTITIES:
        ci = rec.interval(q)
        cells.extend([repr(ci.low), repr(ci.mid), repr(ci.high)])
    return cells


def result_to_county_csv(result: ScenarioResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fips", "name", "district_id", "population",
                         *_interval_columns()])
        for c in result.counties:
            writer.writerow([c.fips, c.name, c.district_id, c.population,
                             *_interval_cells(c)])


def result_to_district_csv(result: ScenarioResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["district_id", "population", "n_counties",
                         *_interval_columns()])
        for d in result.districts:
            writer.writerow([d.district_id, d.population, d.n_counties,
                             *_interval_cells(d)])


def result_to_geojson(result: ScenarioResult, datasets: Datasets) -> dict:
    """FeatureCollection with county centroids as Point geometry and result
    fields flattened into properties, consumable by any mapping client."""
    index = datasets.county_index
    features = []
    for c in result.counties:
        county = index[c.fips]
        props = {"fips": c.fips, "name": c.name, "district_id": c.district_id,
                 "population": c.population}
        for q in QUANTITIES:
            ci = c.interval(q)
            props[f"{q}_low"] = ci.low
            props[f"{q}_mid"] = ci.mid
            props[f"{q}_high"] = ci.high
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point",
                         "coordinates": [county.centroid[1], county.centroid[0]]},
            "properties": props,
        })
    return {"type": "FeatureCollection",
            "name": result.scenario_name,
            "features": features}
