"""Empirical moments, dataset ingestion, and parameter fitting.

Fitting strategy: per observed time, the empirical variance and the
spatial covariance at a ladder of angle lags are matched against the
model's analytic values, equally weighted after normalizing by the
empirical variance.  Optimization is a bounded derivative-free local
search (Nelder-Mead) restarted from a few quasi-random interior points;
the best run wins and the reported trace is the best objective seen so
far, which is non-increasing by construction.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
import numpy as np
import scipy.optimize

from .cyclic import TWO_PI, wrap
from .errors import (
    InfeasibleBounds,
    InsufficientData,
    MalformedFile,
    NonConvergence,
    NonPositiveRadius,
    NonUniformGrid,
    SingularCovariance,
)
from .fourier_radial import gaussian_loglik, radial_fourier
from .rngtools import mix_seed


# ---------------------------------------------------------------------------
# datasets
# ---------------------------------------------------------------------------


@dataclass
class ProfileDataset:
    """Radial profiles on a shared angular grid, replicate-major."""

    times: np.ndarray  # (n_times,)
    angles: np.ndarray  # (n_phi,)
    profiles: np.ndarray  # (n_reps, n_times, n_phi)

    @property
    def n_reps(self):
        return self.profiles.shape[0]

    @staticmethod
    def from_histories(histories):
        if not histories:
            raise InsufficientData("no histories given")
        t0 = histories[0].times
        a0 = histories[0].angles
        stack = np.stack([h.profiles for h in histories], axis=0)
        return ProfileDataset(np.asarray(t0, float), np.asarray(a0, float), stack)

    def to_csv(self, path, header_comment=None):
        with open(path, "w") as fh:
            if header_comment:
                fh.write(header_comment.rstrip("\n") + "\n")
            with_rep = self.n_reps > 1
            fh.write("t,phi,r,replicate\n" if with_rep else "t,phi,r\n")
            for r in range(self.n_reps):
                for i, t in enumerate(self.times):
                    for j, phi in enumerate(self.angles):
                        row = (
                            f"{float(t)!r},{float(phi)!r},"
                            f"{float(self.profiles[r, i, j])!r}"
                        )
                        fh.write(row + (f",{r}\n" if with_rep else "\n"))


def ingest_profiles(path, require_positive=False) -> ProfileDataset:
    """Read a (t, phi, r[, replicate]) CSV into a validated dataset.

    Angles are wrapped to [-pi, pi) and must form one uniform grid shared
    by every (time, replicate) block.
    """
    rows = []
    with open(path) as fh:
        # provenance comments may precede the header
        pos = fh.tell()
        line = fh.readline()
        while line.startswith("#"):
            pos = fh.tell()
            line = fh.readline()
        fh.seek(pos)
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedFile("empty file") from None
        cols = [c.strip().lower() for c in header]
        if cols[:3] != ["t", "phi", "r"] or len(cols) > 4 or (
            len(cols) == 4 and cols[3] != "replicate"
        ):
            raise MalformedFile(f"expected header t,phi,r[,replicate]; got {header}")
        has_rep = len(cols) == 4
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(cols):
                raise MalformedFile(f"line {lineno}: wrong field count")
            try:
                t = float(row[0])
                phi = float(row[1])
                r = float(row[2])
                rep = int(row[3]) if has_rep else 0
            except ValueError as exc:
                raise MalformedFile(f"line {lineno}: {exc}") from None
            rows.append((rep, t, phi, r))
    if not rows:
        raise MalformedFile("no data rows")
    reps = sorted({r[0] for r in rows})
    times = sorted({r[1] for r in rows})
    by_key = {}
    for rep, t, phi, r in rows:
        by_key.setdefault((rep, t), []).append((float(wrap(phi)), r))
    angles_ref = None
    n_phi = None
    for key, vals in by_key.items():
        vals.sort()
        a = np.array([v[0] for v in vals])
        if angles_ref is None:
            n_phi = a.size
            if n_phi < 2:
                raise NonUniformGrid("need at least two angles")
            d = np.diff(a)
            if np.any(np.abs(d - d[0]) > 1e-9) or abs(n_phi * d[0] - TWO_PI) > 1e-6:
                raise NonUniformGrid("angles are not one uniform grid over the circle")
            angles_ref = a
        else:
            if a.size != n_phi or np.any(np.abs(a - angles_ref) > 1e-9):
                raise NonUniformGrid(f"angle grid differs in block {key}")
    profiles = np.empty((len(reps), len(times), n_phi))
    for (rep, t), vals in by_key.items():
        profiles[reps.index(rep), times.index(t)] = [v[1] for v in vals]
    if require_positive and np.any(profiles <= 0):
        raise NonPositiveRadius("exponential-model fitting needs strictly positive radii")
    return ProfileDataset(np.asarray(times), angles_ref, profiles)


# ---------------------------------------------------------------------------
# empirical moments
# ---------------------------------------------------------------------------


@dataclass
class EmpiricalMoments:
    times: np.ndarray
    mean: np.ndarray  # (n_times,)
    variance: np.ndarray  # (n_times,)
    lags: np.ndarray  # (n_lags,) grid-aligned angle lags
    spatial_cov: np.ndarray  # (n_times, n_lags); lag 0 equals the variance
    time_pairs: list  # [(i, j), ...] with i < j
    temporal_cov: np.ndarray  # one value per pair


def empirical_moments(dataset: ProfileDataset, n_lags=16) -> EmpiricalMoments:
    """Moment estimates pooling replicates and angles.

    Centering uses the per-time global mean; with a single replicate the
    angular average is the only source of replication (valid under
    rotational stationarity).  Spatial covariances are circular lag
    products, so they are symmetric in the lag sign and the lag-0 entry is
    the variance by construction.
    """
    if dataset.profiles.size == 0:
        raise InsufficientData("dataset has no profiles")
    n_reps, n_times, n_phi = dataset.profiles.shape
    if n_reps * n_phi < 2:
        raise InsufficientData("need at least two observations per time")
    dphi = TWO_PI / n_phi
    lag_idx = np.unique(
        np.round(np.linspace(0.0, np.pi, n_lags) / dphi).astype(int) % n_phi
    )
    lags = lag_idx * dphi
    mean = dataset.profiles.mean(axis=(0, 2))
    centered = dataset.profiles - mean[None, :, None]
    spatial = np.empty((n_times, lag_idx.size))
    for li, lag in enumerate(lag_idx):
        rolled = np.roll(centered, -int(lag), axis=2)
        spatial[:, li] = np.mean(centered * rolled, axis=(0, 2))
    variance = spatial[:, 0].copy()
    pairs = [(i, j) for i in range(n_times) for j in range(i + 1, n_times)]
    temporal = np.array(
        [float(np.mean(centered[:, i] * centered[:, j])) for i, j in pairs]
    )
    return EmpiricalMoments(
        dataset.times, mean, variance, lags, spatial, pairs, temporal
    )


# ---------------------------------------------------------------------------
# bounded derivative-free fitting
# ---------------------------------------------------------------------------


@dataclass
class FitResult:
    params: dict
    objective: float
    trace: list
    converged: bool
    n_evaluations: int
    meta: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(
            {
                "params": self.params,
                "objective": self.objective,
                "converged": self.converged,
                "n_evaluations": self.n_evaluations,
                "trace": self.trace,
                "meta": self.meta,
            }
        )


def _check_bounds(bounds):
    names = list(bounds)
    lo = np.array([bounds[n][0] for n in names], dtype=float)
    hi = np.array([bounds[n][1] for n in names], dtype=float)
    if np.any(~(lo < hi)):
        raise InfeasibleBounds(f"empty bounds for {names}")
    return names, lo, hi


def minimize_bounded(objective, bounds, *, seed=0, n_starts=3, max_iter=400, xatol=1e-6):
    """Multi-start bounded Nelder-Mead; returns the best run.

    Start 0 is the box center; further starts are uniform interior points
    from the derived stream ``mix(seed, start_index)``.  The trace records
    the best objective after each evaluation.
    """
    names, lo, hi = _check_bounds(bounds)
    trace = []
    best = {"x": None, "f": math.inf, "converged": False, "nfev": 0}

    def wrapped(x):
        val = float(objective(dict(zip(names, x))))
        trace.append(min(val, trace[-1]) if trace else val)
        return val

    for start in range(n_starts):
        if start == 0:
            x0 = 0.5 * (lo + hi)
        else:
            rng = np.random.default_rng(mix_seed(seed, start))
            x0 = lo + (hi - lo) * rng.uniform(0.05, 0.95, size=lo.size)
        res = scipy.optimize.minimize(
            wrapped,
            x0,
            method="Nelder-Mead",
            bounds=list(zip(lo, hi)),
            options={"maxiter": max_iter, "xatol": xatol, "fatol": 1e-12},
        )
        best["nfev"] += res.nfev
        if res.fun < best["f"]:
            best.update(x=res.x, f=float(res.fun), converged=bool(res.success))
    if best["x"] is None or (not best["converged"] and best["f"] == math.inf):
        raise NonConvergence("no optimizer start produced a finite objective")
    return FitResult(
        params=dict(zip(names, map(float, best["x"]))),
        objective=best["f"],
        trace=trace,
        converged=best["converged"],
        n_evaluations=best["nfev"],
    )


def fit_moments(model_cov, dataset, bounds, *, seed=0, n_starts=3, max_iter=400, n_lags=16):
    """Method-of-moments fit against variance plus the spatial-lag ladder.

    ``model_cov(params, t, lags)`` must return the model's spatial
    covariance at the given angle lags (lag 0 is the variance).  The
    objective is the squared mismatch summed over times and lags, each
    time's row normalized by its empirical variance.  ``dataset`` may be a
    :class:`ProfileDataset` or precomputed :class:`EmpiricalMoments`.
    """
    if isinstance(dataset, EmpiricalMoments):
        emp = dataset
    else:
        emp = empirical_moments(dataset, n_lags=n_lags)
    weights = 1.0 / np.maximum(emp.variance, 1e-300) ** 2

    def objective(params):
        total = 0.0
        for i, t in enumerate(emp.times):
            model_vals = np.asarray(model_cov(params, float(t), emp.lags), dtype=float)
            total += weights[i] * float(np.sum((emp.spatial_cov[i] - model_vals) ** 2))
        return total

    result = minimize_bounded(
        objective, bounds, seed=seed, n_starts=n_starts, max_iter=max_iter
    )
    if not result.converged:
        raise NonConvergence("moment fit hit its iteration cap")
    result.meta["n_lags"] = int(emp.lags.size)
    result.meta["bounds"] = {k: list(v) for k, v in bounds.items()}
    return result


def rect_direct_cov_model(T, g):
    """Spatial covariance family of the cone-window direct Gaussian model.

    Parameters ``sigma2`` (basis variance density) and ``theta`` (constant
    angular half-width); at time ``t`` the covariance at angle lag ``d`` is
    ``sigma2 * arc_overlap(d, theta, theta) * int_{t - T(t)}^{t} g``.
    """
    from .cyclic import arc_overlap_length
    from .timefn import TimeFn

    T = TimeFn.of(T)

    def model_cov(params, t, lags):
        mass = float(g.integral(t - float(T(t)), t))
        return params["sigma2"] * arc_overlap_length(np.asarray(lags), params["theta"], params["theta"]) * mass

    return model_cov


def tumour_log_cov_model(T, t0, phi0, spot_var=1.0):
    """Log-radius spatial covariance family of the two-band tumour model.

    Free parameters ``alpha`` and ``beta``; the old full-angle band
    contributes ``alpha**2 * pi * (T - t0) * cos(d)`` and the shrinking
    cone (linear profile, unit control density) contributes
    ``beta**2 * t0 * (phi0 - d)**2 / (2 phi0)`` for lags below ``phi0``.
    The covariance ladder is even in both signs, so sign conventions must
    come from the caller's bounds.
    """

    def model_cov(params, t, lags):
        lags = np.asarray(lags, dtype=float)
        band1 = params["alpha"] ** 2 * math.pi * (T - t0) * np.cos(lags)
        u = np.maximum(phi0 - lags, 0.0)
        band2 = params["beta"] ** 2 * t0 * u * u / (2.0 * phi0)
        return spot_var * (band1 + band2)

    return model_cov


def fit_fourier_mle(dataset, tau_family, bounds, *, orders, seed=0, n_starts=3, max_iter=400):
    """Maximum likelihood over a parameterized coefficient-covariance family.

    ``tau_family(params)`` returns a callable ``tau(k, t1, t2)``.  The
    coefficient series of every replicate are scored jointly; orders are
    k >= 1.  A single observation time cannot identify more than one
    temporal parameter and raises :class:`NonConvergence` up front.
    """
    orders = list(orders)
    if any(k < 1 for k in orders):
        raise ValueError("likelihood orders must be >= 1")
    if dataset.times.size == 1 and len(bounds) > 1:
        raise NonConvergence(
            "one observation time cannot identify multiple temporal parameters"
        )
    k_max = max(orders)
    cos_all = np.empty((dataset.n_reps, dataset.times.size, k_max + 1))
    sin_all = np.empty_like(cos_all)
    for r in range(dataset.n_reps):
        for i in range(dataset.times.size):
            fs = radial_fourier(dataset.profiles[r, i], dataset.angles, k_max)
            cos_all[r, i] = fs.cos_coef
            sin_all[r, i] = fs.sin_coef

    def objective(params):
        tau = tau_family(params)
        try:
            ll = gaussian_loglik(dataset.times, cos_all, sin_all, tau, orders=orders)
        except SingularCovariance:
            return math.inf
        return -ll

    result = minimize_bounded(
        objective, bounds, seed=seed, n_starts=n_starts, max_iter=max_iter
    )
    if not math.isfinite(result.objective):
        raise SingularCovariance("likelihood undefined everywhere in bounds")
    if not result.converged:
        raise NonConvergence("likelihood fit hit its iteration cap")
    result.meta["orders"] = orders
    result.meta["bounds"] = {k: list(v) for k, v in bounds.items()}
    return result
