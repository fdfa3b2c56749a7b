"""Weighted Beta regression of evacuation rates on surge risk zone and
hurricane intensity.

The response is a rate in (0, 1) modeled as Beta(mu*lam, (1-mu)*lam) with
logit(mu) = alpha + beta_zone[z] + beta_intensity[h]. Level 0 of both factors
is the reference (coefficient pinned to 0). Observations from intention
surveys get half the weight of observed-compliance records; the weighted
log-likelihood is maximized by a deterministic quasi-Newton ascent (BFGS
warm start, Newton polish) so refits are bit-reproducible.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from scipy.optimize import minimize
from scipy.special import digamma, expit, gammaln, logit

from .errors import DataFormatError, DomainError, FitConvergenceError, ValidationError

N_LEVELS = 6  # factor levels 0..5 for both zone and intensity

OBSERVED_WEIGHT = 1.0
INTENDED_WEIGHT = 0.5
RATE_CLAMP = 1e-3

OBS_HEADER = ["study", "rate", "zone", "category", "source_kind"]


class SourceKind(str, Enum):
    OBSERVED = "observed"
    INTENDED = "intended"


@dataclass(frozen=True)
class EvacObservation:
    rate: float
    zone: int
    intensity: int
    source_kind: SourceKind
    weight: float

    def __post_init__(self):
        if not 0.0 < self.rate < 1.0:
            raise ValidationError(f"rate {self.rate} not strictly inside (0, 1)")
        if self.zone not in range(N_LEVELS):
            raise ValidationError(f"zone {self.zone} not in 0..5")
        if self.intensity not in range(N_LEVELS):
            raise ValidationError(f"intensity {self.intensity} not in 0..5")
        if self.weight <= 0.0:
            raise ValidationError(f"weight {self.weight} must be positive")


@dataclass(frozen=True)
class BetaEvacModel:
    """Fitted parameters; reference levels beta_*[0] are exactly 0."""

    alpha: float
    beta_zone: tuple[float, ...]
    beta_intensity: tuple[float, ...]
    lam: float
    fit_meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.lam <= 0.0:
            raise DomainError(f"precision lambda must be positive, got {self.lam}")
        if len(self.beta_zone) != N_LEVELS or len(self.beta_intensity) != N_LEVELS:
            raise ValidationError("beta vectors must have 6 levels")
        if self.beta_zone[0] != 0.0 or self.beta_intensity[0] != 0.0:
            raise ValidationError("reference levels must be pinned to 0")


def load_observations(path, intended_weight: float = INTENDED_WEIGHT,
                      clamp: float = RATE_CLAMP) -> list[EvacObservation]:
    """Read the observation CSV; boundary rates are clamped into
    [clamp, 1-clamp] since the Beta has open support."""
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
    if [h.strip() for h in header] != OBS_HEADER:
        raise DataFormatError(f"bad header {header!r}", path=str(path), line=1)

    out: list[EvacObservation] = []
    for i, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(OBS_HEADER):
            raise DataFormatError("expected 5 fields", path=str(path), line=i)
        _study, rate_s, zone_s, cat_s, kind_s = (v.strip() for v in row)
        try:
            rate = float(rate_s)
            zone = int(zone_s)
            cat = int(cat_s)
            kind = SourceKind(kind_s.lower())
        except ValueError as exc:
            raise DataFormatError(str(exc), path=str(path), line=i) from exc
        if not 0.0 <= rate <= 1.0:
            raise DataFormatError(f"rate {rate} outside [0, 1]", path=str(path), line=i)
        rate = min(max(rate, clamp), 1.0 - clamp)
        weight = OBSERVED_WEIGHT if kind is SourceKind.OBSERVED else intended_weight
        try:
            out.append(EvacObservation(rate, zone, cat, kind, weight))
        except ValidationError as exc:
            raise DataFormatError(str(exc), path=str(path), line=i) from exc
    return out


# ---------------------------------------------------------------------------
# Weighted log-likelihood and its gradient
# ---------------------------------------------------------------------------

def _arrays(obs: list[EvacObservation]):
    y = np.array([o.rate for o in obs], dtype=float)
    w = np.array([o.weight for o in obs], dtype=float)
    z = np.array([o.zone for o in obs], dtype=np.intp)
    h = np.array([o.intensity for o in obs], dtype=np.intp)
    return y, w, z, h


def _linear_predictor(alpha, beta_zone, beta_intensity, z, h):
    return alpha + np.asarray(beta_zone)[z] + np.asarray(beta_intensity)[h]


def _beta_loglik(y, w, mu, lam):
    a = mu * lam
    b = (1.0 - mu) * lam
    return float(np.sum(w * (
        gammaln(lam) - gammaln(a) - gammaln(b)
        + (a - 1.0) * np.log(y) + (b - 1.0) * np.log1p(-y)
    )))


def log_likelihood(model: BetaEvacModel, obs: list[EvacObservation]) -> float:
    """Sum of weight * log BetaPDF(y; mu*lam, (1-mu)*lam) over observations."""
    if model.lam <= 0.0:
        raise DomainError("lambda must be positive")
    if not obs:
        return 0.0
    y, w, z, h = _arrays(obs)
    mu = expit(_linear_predictor(model.alpha, model.beta_zone, model.beta_intensity, z, h))
    return _beta_loglik(y, w, mu, model.lam)


# Free parameter vector layout: [alpha, beta_zone[zfree...], beta_intensity[hfree...], log lam]

def _objective_factory(y, w, z, h, zfree, hfree):
    logy = np.log(y)
    log1my = np.log1p(-y)
    ystar = logy - log1my

    def value_and_grad(params):
        alpha = params[0]
        bz = np.zeros(N_LEVELS)
        bh = np.zeros(N_LEVELS)
        bz[zfree] = params[1:1 + len(zfree)]
        bh[hfree] = params[1 + len(zfree):1 + len(zfree) + len(hfree)]
        lam = math.exp(params[-1])

        eta = alpha + bz[z] + bh[h]
        mu = expit(eta)
        a = mu * lam
        b = (1.0 - mu) * lam

        ll = np.sum(w * (
            gammaln(lam) - gammaln(a) - gammaln(b)
            + (a - 1.0) * logy + (b - 1.0) * log1my
        ))

        # d ll / d mu_i, chained through the logit link
        dmu = w * lam * (ystar - digamma(a) + digamma(b))
        deta = dmu * mu * (1.0 - mu)

        grad = np.empty_like(params)
        grad[0] = deta.sum()
        for j, level in enumerate(zfree):
            grad[1 + j] = deta[z == level].sum()
        off = 1 + len(zfree)
        for j, level in enumerate(hfree):
            grad[off + j] = deta[h == level].sum()
        dlam = np.sum(w * (
            digamma(lam) - mu * digamma(a) - (1.0 - mu) * digamma(b)
            + mu * logy + (1.0 - mu) * log1my
        ))
        grad[-1] = dlam * lam  # log reparameterization
        return float(ll), grad

    return value_and_grad


def _boundary_warnings(obs, clamp=RATE_CLAMP):
    msgs = []
    for label, key in (("zone", lambda o: o.zone), ("intensity", lambda o: o.intensity)):
        for level in range(N_LEVELS):
            rates = [o.rate for o in obs if key(o) == level]
            if not rates:
                continue
            if all(r <= clamp for r in rates) or all(r >= 1.0 - clamp for r in rates):
                msgs.append(
                    f"{label} level {level}: all rates sit at one clamped boundary; "
                    "the fit for this level is degenerate"
                )
    return msgs


def fit(obs: list[EvacObservation], tol: float = 1e-8, max_iter: int = 500) -> BetaEvacModel:
    """Weighted maximum likelihood. Deterministic: fixed initialization,
    BFGS then Newton polish until the gradient max-norm is <= tol."""
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    if not obs:
        raise ValidationError("no observations")

    y, w, z, h = _arrays(obs)
    # Levels with no data carry no free parameter and stay at the reference 0.
    zfree = sorted({int(v) for v in z} - {0})
    hfree = sorted({int(v) for v in h} - {0})

    fun = _objective_factory(y, w, z, h, zfree, hfree)

    p0 = np.zeros(1 + len(zfree) + len(hfree) + 1)
    p0[0] = logit(np.average(y, weights=w))
    p0[-1] = math.log(10.0)

    def neg(params):
        ll, g = fun(params)
        return -ll, -g

    res = minimize(neg, p0, jac=True, method="BFGS",
                   options={"gtol": tol, "maxiter": max_iter, "norm": np.inf})
    params = res.x
    iterations = int(res.nit)

    # Newton polish: finite-difference Jacobian of the analytic gradient.
    ll, g = fun(params)
    polish = 0
    while np.max(np.abs(g)) > tol and polish < 50:
        n = len(params)
        H = np.empty((n, n))
        step = 1e-6
        for k in range(n):
            pp = params.copy(); pp[k] += step
            pm = params.copy(); pm[k] -= step
            H[:, k] = (fun(pp)[1] - fun(pm)[1]) / (2.0 * step)
        H = 0.5 * (H + H.T)
        try:
            delta = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            delta = np.linalg.lstsq(H, -g, rcond=None)[0]
        # Ascent safeguard: halve until the log-likelihood does not decrease.
        scale = 1.0
        for _ in range(40):
            cand = params + scale * delta
            ll_c, g_c = fun(cand)
            if ll_c >= ll - 1e-12 * max(1.0, abs(ll)):
                params, ll, g = cand, ll_c, g_c
                break
            scale *= 0.5
        else:
            break
        polish += 1
        if iterations + polish > max_iter:
            break

    gnorm = float(np.max(np.abs(g)))
    if gnorm > tol:
        raise FitConvergenceError(
            f"gradient max-norm {gnorm:.3e} did not reach tol {tol:.3e} "
            f"after {iterations + polish} iterations",
            last_params=params.copy(), gradient_norm=gnorm,
            iterations=iterations + polish,
        )

    bz = np.zeros(N_LEVELS)
    bh = np.zeros(N_LEVELS)
    bz[zfree] = params[1:1 + len(zfree)]
    bh[hfree] = params[1 + len(zfree):1 + len(zfree) + len(hfree)]

    meta = {
        "tol": tol,
        "iterations": iterations + polish,
        "gradient_norm": gnorm,
        "log_likelihood": float(ll),
        "n_observations": len(obs),
        "warnings": _boundary_warnings(obs),
    }
    for msg in meta["warnings"]:
        warnings.warn(msg, stacklevel=2)

    return BetaEvacModel(
        alpha=float(params[0]),
        beta_zone=tuple(float(v) for v in bz),
        beta_intensity=tuple(float(v) for v in bh),
        lam=float(math.exp(params[-1])),
        fit_meta=meta,
    )


def predict_rate(model: BetaEvacModel, zone: int, intensity: int) -> float:
    """Mean evacuation rate logit^-1(alpha + beta_zone[z] + beta_intensity[h])."""
    if zone not in range(N_LEVELS):
        raise DomainError(f"zone {zone} not in 0..5")
    if intensity not in range(N_LEVELS):
        raise DomainError(f"intensity {intensity} not in 0..5")
    return float(expit(model.alpha + model.beta_zone[zone] + model.beta_intensity[intensity]))


def sample_rate(model: BetaEvacModel, zone: int, intensity: int, rng, size=None):
    """Draw from the Beta predictive at (zone, intensity); reproducible per seed.

    rng may be an int seed or a numpy Generator. Var = mu(1-mu)/(lam+1).
    """
    mu = predict_rate(model, zone, intensity)
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    draw = gen.beta(mu * model.lam, (1.0 - mu) * model.lam, size=size)
    return float(draw) if size is None else draw


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def model_to_dict(model: BetaEvacModel) -> dict:
    return {
        "alpha": model.alpha,
        "beta_zone": list(model.beta_zone),
        "beta_intensity": list(model.beta_intensity),
        "lambda": model.lam,
        "fit_meta": model.fit_meta,
    }


def model_from_dict(doc: dict) -> BetaEvacModel:
    try:
        return BetaEvacModel(
            alpha=float(doc["alpha"]),
            beta_zone=tuple(float(v) for v in doc["beta_zone"]),
            beta_intensity=tuple(float(v) for v in doc["beta_intensity"]),
            lam=float(doc["lambda"]),
            fit_meta=dict(doc.get("fit_meta", {})),
        )
    except KeyError as exc:
        raise ValidationError(f"model document missing key {exc.args[0]!r}") from exc


def save_model(model: BetaEvacModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def load_model(path) -> BetaEvacModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataFormatError(str(exc), path=str(path)) from exc
    return model_from_dict(doc)
