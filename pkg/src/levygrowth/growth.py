"""Radial growth simulation on an angle/time grid.

Model kinds
-----------
* ``rate_linear``: the growth *rate* is drift plus a weighted basis integral
  over the ambit set; the radius is simulated through the induced
  time-integrated form (accumulated drift, accumulated weight, one shared
  realization) rather than by stepping rates, which avoids compounding
  discretization error.
* ``direct`` / ``direct_scaled``: the radius itself is drift plus the ambit
  integral (optionally times an angular profile).
* ``rate_of_log``: the linear form drives ``log R``.
* ``exponential_tumour``: ``log R = mu_t + alpha(t) * (cosine band integral)
  + beta(t) * (shrinking band integral)`` over the two disjoint time bands
  of the tumour ambit family.

Evaluation conventions
----------------------
Cell-valued bases (Gaussian, Gamma, inverse Gaussian) are integrated on the
mesh: weights and memberships at cell midpoints, matching the analytic
engine in :mod:`levygrowth.moments`.  Poisson realizations are integrated
over their exact point pattern (unbiased against the continuum formulas)
whenever the weight is constant, harmonic, or the tumour weight; other
weight/family combinations fall back to the mesh path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import ambit as _ambit
from .ambit import AmbitFamily, FullAngle, Rectangular, Tumour, WedgeOverS
from .circle_cov import FourierWeight
from .cyclic import TWO_PI, cyc_dist, wrap
from .errors import (
    KumulantDomainError,
    NonFiniteValue,
    UnknownId,
    WrongBasisKind,
)
from .levy_core import (
    BasisSpec,
    ControlMeasure,
    GridSpec,
    SpotLaw,
    TimeDensity,
    config_hash,
    kumulant_domain_sup,
    sample_realization,
    spot_mean,
)
from .quadrature import adaptive_simpson
from .timefn import TimeFn

_EPS = 1e-12


# ---------------------------------------------------------------------------
# weights and drifts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantWeight:
    c: float = 1.0

    apex_dependent = False

    @property
    def constant_value(self):
        return self.c

    def value(self, t, theta, s, phi=0.0):
        return np.full(np.broadcast(np.asarray(theta), np.asarray(s)).shape, self.c)

    def describe(self):
        return {"weight": "constant", "c": self.c}


@dataclass(frozen=True)
class TumourWeight:
    """Cosine weight on the old full-angle band, flat weight on the recent cone."""

    family: Tumour
    alpha: TimeFn
    beta: TimeFn

    apex_dependent = True

    def value(self, t, theta, s, phi=0.0):
        lo, mid, hi = self.family.band_split(t)
        theta = np.asarray(theta, dtype=float)
        s = np.asarray(s, dtype=float)
        band1 = (s >= lo - _EPS) & (s <= mid + _EPS)
        band2 = (s > mid + _EPS) & (s <= hi + _EPS)
        hw = self.family.shrink_half_width(t, s)
        inside2 = band2 & (cyc_dist(theta, phi) <= hw + _EPS)
        return float(self.alpha(t)) * np.cos(theta - phi) * band1 + float(
            self.beta(t)
        ) * inside2

    def max_positive_value(self, t):
        a = abs(float(self.alpha(t)))
        b = float(self.beta(t))
        return max(a, b, 0.0)

    def describe(self):
        return {
            "weight": "tumour",
            "alpha": self.alpha.describe(),
            "beta": self.beta.describe(),
        }


@dataclass(frozen=True)
class Drift:
    """Deterministic drift: a rate for the rate models, a level for the
    direct and exponential models."""

    kind: str
    params: tuple = ()
    fn: Optional[Callable] = None

    @staticmethod
    def constant(c):
        return Drift("constant", (float(c),))

    @staticmethod
    def zero():
        return Drift.constant(0.0)

    @staticmethod
    def table(ts, values):
        return Drift("table", (tuple(map(float, ts)), tuple(map(float, values))))

    @staticmethod
    def step(ts, values):
        """Piecewise constant, holding each value from its abscissa onward."""
        return Drift("step", (tuple(map(float, ts)), tuple(map(float, values))))

    @staticmethod
    def gompertz(kappa0, eta, gamma):
        return Drift("gompertz", (float(kappa0), float(eta), float(gamma)))

    @staticmethod
    def of(x):
        if isinstance(x, Drift):
            return x
        if callable(x):
            return Drift("callable", (), x)
        return Drift.constant(x)

    def value(self, t, phi=0.0):
        t = float(t)
        if self.kind == "constant":
            return self.params[0]
        if self.kind == "table":
            ts, vs = self.params
            return float(np.interp(t, ts, vs))
        if self.kind == "step":
            ts, vs = self.params
            idx = int(np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(ts) - 1))
            return vs[idx]
        if self.kind == "gompertz":
            k0, eta, gam = self.params
            return k0 * math.exp((eta / gam) * (1.0 - math.exp(-gam * t))) * eta * math.exp(
                -gam * t
            )
        return float(self.fn(t, phi) if _wants_two_args(self.fn) else self.fn(t))

    def integral(self, t):
        """Integral of the rate from 0 to t."""
        t = float(t)
        if self.kind == "constant":
            return self.params[0] * t
        if self.kind == "gompertz":
            k0, eta, gam = self.params
            return k0 * (math.exp((eta / gam) * (1.0 - math.exp(-gam * t))) - 1.0)
        if self.kind in ("table", "step"):
            grid = np.linspace(0.0, t, 513)
            vals = np.array([self.value(u) for u in grid])
            return float(np.trapezoid(vals, grid))
        return adaptive_simpson(lambda u: self.value(u), 0.0, t, tol=1e-10 * (1 + abs(t)))

    def describe(self):
        if self.kind == "callable":
            return {"drift": "callable", "name": getattr(self.fn, "__name__", "fn")}
        return {"drift": self.kind, "params": self.params}


def _wants_two_args(fn):
    code = getattr(fn, "__code__", None)
    return bool(code) and code.co_argcount >= 2


# ---------------------------------------------------------------------------
# model specification and history
# ---------------------------------------------------------------------------

MODEL_KINDS = (
    "rate_linear",
    "direct",
    "direct_scaled",
    "rate_of_log",
    "exponential_tumour",
)


@dataclass(frozen=True)
class GrowthModelSpec:
    kind: str
    drift: Drift
    weight: object
    basis: BasisSpec
    ambit: AmbitFamily
    r0: object = 0.0  # constant or callable of angle, rate models only
    multiplier: Optional[Callable] = None  # angular profile, direct_scaled only
    center_stochastic_mean: bool = False

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind == "direct_scaled" and self.multiplier is None:
            raise ValueError("direct_scaled needs an angular multiplier")
        if self.kind == "exponential_tumour":
            if not isinstance(self.weight, TumourWeight):
                raise ValueError("exponential_tumour needs a TumourWeight")
            if not isinstance(self.ambit, Tumour):
                raise ValueError("exponential_tumour needs the tumour ambit family")

    def r0_profile(self, angles):
        if callable(self.r0):
            return np.asarray(self.r0(angles), dtype=float)
        return np.full(angles.shape, float(self.r0))

    def describe(self):
        return {
            "kind": self.kind,
            "drift": self.drift.describe(),
            "weight": self.weight.describe()
            if hasattr(self.weight, "describe")
            else repr(self.weight),
            "basis": self.basis.describe(),
            "ambit": self.ambit.describe(),
            "centered": self.center_stochastic_mean,
        }


@dataclass
class GrowthHistory:
    """Radial profiles on the angular grid at the requested times."""

    times: np.ndarray
    angles: np.ndarray
    profiles: np.ndarray  # (n_times, n_phi)
    seed: int
    grid: GridSpec
    spec_hash: str
    flags: dict = field(default_factory=dict)

    def provenance(self):
        from . import __version__

        return (
            f"# levygrowth v{__version__} config={self.spec_hash} seed={self.seed}"
        )

    def angular_mean(self):
        return self.profiles.mean(axis=1)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(self.provenance() + "\n")
            fh.write("t,phi,r\n")
            for i, t in enumerate(self.times):
                for j, phi in enumerate(self.angles):
                    fh.write(
                        f"{float(t)!r},{float(phi)!r},{float(self.profiles[i, j])!r}\n"
                    )

    def to_polyline_csv(self, path):
        with open(path, "w") as fh:
            fh.write(self.provenance() + "\n")
            fh.write("t,x,y\n")
            for i, t in enumerate(self.times):
                x = self.profiles[i] * np.cos(self.angles)
                y = self.profiles[i] * np.sin(self.angles)
                for xv, yv in zip(x, y):
                    fh.write(f"{float(t)!r},{float(xv)!r},{float(yv)!r}\n")


# ---------------------------------------------------------------------------
# kernel machinery (cell-valued bases)
# ---------------------------------------------------------------------------


def _correlate_rows(z_rows, kernel_rows, n_phi):
    """sum_l circular cross-correlation of data row l with kernel row l."""
    zf = np.fft.rfft(z_rows, axis=1)
    kf = np.fft.rfft(kernel_rows, axis=1)
    return np.fft.irfft((zf * np.conj(kf)).sum(axis=0), n=n_phi)


def _direct_kernel(spec, grid, t):
    """Mesh kernel K[l, m]: weight x membership at angular offset m."""
    theta = grid.phi_mids[None, :]
    phi0 = grid.phi_mids[0]
    s = grid.t_mids[:, None]
    member = spec.ambit.contains(t, phi0, theta, s)
    w = _weight_values(spec.weight, t, theta, s, phi0)
    return np.where(member, w, 0.0)


def _weight_values(weight, t, theta, s, phi):
    if hasattr(weight, "value"):
        return np.asarray(weight.value(t, theta, s, phi), dtype=float)
    if callable(weight):
        return np.asarray(weight(theta, s), dtype=float)
    return np.full(np.broadcast(np.asarray(theta), np.asarray(s)).shape, float(weight))


def _rate_kernel(spec, grid, t):
    fbar = _ambit.induced_weight(
        spec.ambit, spec.weight, t, phi=grid.phi_mids[0], step=grid.dt
    )
    return np.asarray(fbar(grid.phi_mids[None, :], grid.t_mids[:, None]), dtype=float)


# ---------------------------------------------------------------------------
# point machinery (Poisson realizations)
# ---------------------------------------------------------------------------


def _arc_add(profile, theta, widths, values, dphi):
    """Add ``values`` to all grid angles within ``widths`` of each point."""
    n = profile.size
    full = widths >= np.pi - _EPS
    if np.any(full):
        profile += float(np.sum(values[full]))
    theta = theta[~full]
    widths = widths[~full]
    values = values[~full]
    if theta.size == 0:
        return profile
    center = (theta + np.pi) / dphi - 0.5
    lo = np.ceil(center - (widths + _EPS) / dphi).astype(np.int64)
    hi = np.floor(center + (widths + _EPS) / dphi).astype(np.int64)
    length = np.clip(hi - lo + 1, 0, n)
    keep = length > 0
    lo, length, values = lo[keep] % n, length[keep], values[keep]
    diff = np.zeros(n + 1)
    end = lo + length
    wrap_over = end > n
    np.add.at(diff, lo, values)
    np.add.at(diff, np.where(wrap_over, n, end), -values)
    if np.any(wrap_over):
        np.add.at(diff, np.zeros(int(wrap_over.sum()), dtype=np.int64), values[wrap_over])
        np.add.at(diff, end[wrap_over] - n, -values[wrap_over])
    profile += np.cumsum(diff[:-1])
    return profile


def _poisson_supported(spec):
    if isinstance(spec.weight, (ConstantWeight, TumourWeight, float, int)):
        return True
    if isinstance(spec.weight, FourierWeight) and isinstance(spec.ambit, FullAngle):
        return True
    return False


def _poisson_direct_profile(spec, grid, realization, t):
    pts = realization.points()
    lo, hi = spec.ambit.window(t)
    keep = (pts.s >= lo - _EPS) & (pts.s <= hi + _EPS)
    theta, s = pts.theta[keep], pts.s[keep]
    profile = np.zeros(grid.n_phi)
    if theta.size == 0:
        return profile
    if isinstance(spec.weight, FourierWeight):
        return _harmonic_point_profile(spec.weight, grid, t, theta, s, profile)
    c = float(getattr(spec.weight, "constant_value", spec.weight))
    widths = np.asarray(spec.ambit.half_width(t, s), dtype=float)
    return _arc_add(profile, theta, widths, np.full(theta.shape, c), grid.dphi)


def _harmonic_point_profile(weight, grid, t, theta, s, profile):
    angles = grid.phi_mids
    for k in range(weight.k_max + 1):
        a = weight.coef(k, t, s)
        ck = float(np.sum(a * np.cos(k * theta)))
        sk = float(np.sum(a * np.sin(k * theta)))
        profile += np.cos(k * angles) * ck + np.sin(k * angles) * sk
    return profile


def _poisson_rate_profile(spec, grid, realization, t):
    pts = realization.points()
    keep = (pts.s <= t + _EPS) & (pts.s >= min(0.0, grid.t_min) - _EPS)
    theta, s = pts.theta[keep], pts.s[keep]
    profile = np.zeros(grid.n_phi)
    if theta.size == 0:
        return profile
    lengths = _ambit.window_length_in_union(spec.ambit, s, t)
    c = float(getattr(spec.weight, "constant_value", spec.weight))
    values = c * lengths
    live = values != 0.0
    widths = np.asarray(spec.ambit.half_width(t, s[live]), dtype=float)
    return _arc_add(profile, theta[live], widths, values[live], grid.dphi)


def _poisson_tumour_terms(spec, grid, realization, t):
    pts = realization.points()
    lo, mid, hi = spec.ambit.band_split(t)
    in1 = (pts.s >= lo - _EPS) & (pts.s <= mid + _EPS)
    in2 = (pts.s > mid + _EPS) & (pts.s <= hi + _EPS)
    angles = grid.phi_mids
    b1 = np.cos(angles) * float(np.sum(np.cos(pts.theta[in1]))) + np.sin(
        angles
    ) * float(np.sum(np.sin(pts.theta[in1])))
    b2 = np.zeros(grid.n_phi)
    widths = spec.ambit.shrink_half_width(t, pts.s[in2])
    b2 = _arc_add(b2, pts.theta[in2], widths, np.ones(int(in2.sum())), grid.dphi)
    return b1, b2


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------


def _stochastic_term(spec, grid, realization, t, mode):
    """Profile of the ambit integral at time t, all grid angles."""
    point_exact = realization.kind == "poisson" and _poisson_supported(spec)
    if point_exact and mode == "rate" and not spec.ambit.factorizes:
        point_exact = False  # apex-dependent cones need the mesh path
    if point_exact:
        if mode == "direct":
            return _poisson_direct_profile(spec, grid, realization, t)
        return _poisson_rate_profile(spec, grid, realization, t)
    kernel = (
        _direct_kernel(spec, grid, t) if mode == "direct" else _rate_kernel(spec, grid, t)
    )
    return _correlate_rows(realization.increments, kernel, grid.n_phi)


def _mesh_ambit_measure(spec, grid, t):
    kernel = _direct_kernel(replace(spec, weight=ConstantWeight(1.0)), grid, t)
    mu_rows = grid.cell_mu(spec.basis.control)
    return float(np.sum(kernel.sum(axis=1) * mu_rows))


def _center_shift(spec, grid, realization, t):
    """Mean of the ambit integral, matching the evaluation path in use."""
    if not spec.center_stochastic_mean:
        return 0.0
    mz = spot_mean(spec.basis.spot)
    if realization.kind == "poisson" and _poisson_supported(spec):
        return mz * spec.ambit.measure(t, spec.basis.control)
    return mz * _mesh_ambit_measure(spec, grid, t)


def _check_exponential_domain(spec, t):
    spot = spec.basis.spot
    sup = kumulant_domain_sup(spot)
    if math.isinf(sup):
        return
    peak = spec.weight.max_positive_value(t)
    if peak >= sup:
        raise KumulantDomainError(
            f"tumour weight peak {peak} at t={t} reaches the "
            f"{spot.kind} kumulant bound {sup}; exponential moments diverge"
        )


def simulate(spec: GrowthModelSpec, grid: GridSpec, seed: int, times) -> GrowthHistory:
    """Simulate the model at the requested times from one shared realization.

    Deterministic in (spec, grid, seed).  Negative radii under signed bases
    are kept and counted in ``flags['nonpositive_values']`` rather than
    clamped, so moment checks stay unbiased.
    """
    times = np.sort(np.asarray(times, dtype=float))
    support_lo = spec.basis.control.g.support_lo
    for t in times:
        if spec.kind in ("rate_linear", "rate_of_log"):
            lo = max(support_lo, min(spec.ambit.window(0.0)[0], 0.0))
        else:
            lo = max(spec.ambit.window(t)[0], support_lo)
        if not grid.covers(lo, t):
            raise ValueError(f"grid window does not cover the model at t={t}")
    realization = sample_realization(spec.basis, grid, seed)
    angles = grid.phi_mids
    profiles = np.empty((times.size, grid.n_phi))
    for i, t in enumerate(times):
        if spec.kind in ("direct", "direct_scaled"):
            term = _stochastic_term(spec, grid, realization, t, "direct")
            level = spec.drift.value(t) - _center_shift(spec, grid, realization, t)
            row = level + term
            if spec.kind == "direct_scaled":
                row = np.asarray(spec.multiplier(angles), dtype=float) * row
        elif spec.kind in ("rate_linear", "rate_of_log"):
            term = _stochastic_term(spec, grid, realization, t, "rate")
            accumulated = spec.drift.integral(t)
            if spec.kind == "rate_linear":
                row = spec.r0_profile(angles) + accumulated + term
            else:
                row = spec.r0_profile(angles) * np.exp(accumulated + term)
        else:  # exponential_tumour
            _check_exponential_domain(spec, t)
            if realization.kind == "poisson":
                b1, b2 = _poisson_tumour_terms(spec, grid, realization, t)
            else:
                b1, b2 = _tumour_cell_terms(spec, grid, realization, t)
            w = spec.weight
            row = np.exp(
                spec.drift.value(t)
                + float(w.alpha(t)) * b1
                + float(w.beta(t)) * b2
            )
        profiles[i] = row
    if not np.all(np.isfinite(profiles)):
        raise NonFiniteValue("simulation produced non-finite radii")
    flags = {"nonpositive_values": int(np.sum(profiles <= 0.0))}
    return GrowthHistory(
        times=times,
        angles=angles,
        profiles=profiles,
        seed=int(seed),
        grid=grid,
        spec_hash=config_hash(spec, grid),
        flags=flags,
    )


def _tumour_cell_terms(spec, grid, realization, t):
    lo, mid, hi = spec.ambit.band_split(t)
    s = grid.t_mids
    rows1 = (s >= lo - _EPS) & (s <= mid + _EPS)
    rows2 = (s > mid + _EPS) & (s <= hi + _EPS)
    angles = grid.phi_mids
    z1 = realization.increments[rows1]
    # band 1: cosine harmonic of the increments
    ck = float(np.sum(z1 * np.cos(angles)[None, :]))
    sk = float(np.sum(z1 * np.sin(angles)[None, :]))
    b1 = np.cos(angles) * ck + np.sin(angles) * sk
    # band 2: shrinking-cone indicator kernel
    kernel = np.zeros((int(rows2.sum()), grid.n_phi))
    hw = spec.ambit.shrink_half_width(t, s[rows2])
    d = cyc_dist(angles, angles[0])
    kernel[:, :] = d[None, :] <= hw[:, None] + _EPS
    b2 = _correlate_rows(realization.increments[rows2], kernel, grid.n_phi)
    return b1, b2


def simulate_replicates(spec, grid, seed, times, n_replicates, keep="profiles"):
    """Histories for replicates r = 0..n-1 with derived seeds mix(seed, r).

    ``keep='profiles'`` returns an array (n_replicates, n_times, n_phi).
    """
    from .rngtools import mix_seed

    out = []
    for r in range(n_replicates):
        h = simulate(spec, grid, mix_seed(seed, r), times)
        out.append(h.profiles if keep == "profiles" else h)
    return np.asarray(out) if keep == "profiles" else out


# ---------------------------------------------------------------------------
# Poisson outburst view
# ---------------------------------------------------------------------------


@dataclass
class OutburstView:
    points_cyl: np.ndarray  # (n, 2): angle, arrival time
    points_xy: Optional[np.ndarray]  # embedded positions, when a history is given
    rate_terms: np.ndarray  # (n_phi,): sum of weights over covered points


def poisson_outburst_view(spec, grid, seed, t, history=None):
    """Outburst points arrived by ``t`` and per-direction rate sums.

    The rate term at each grid angle is the sum of the instantaneous weight
    over the points inside that direction's ambit set; it equals the
    stochastic part of the growth rate evaluated by
    :func:`levygrowth.levy_core.integrate` on the same realization.
    """
    if spec.basis.spot.kind != "poisson":
        raise WrongBasisKind("outburst view requires a Poisson basis")
    realization = sample_realization(spec.basis, grid, seed)
    pts = realization.points()
    arrived = pts.s <= t + _EPS
    theta, s = pts.theta[arrived], pts.s[arrived]
    angles = grid.phi_mids
    terms = np.zeros(grid.n_phi)
    chunk = max(1, int(2e6 // max(theta.size, 1)))
    for start in range(0, grid.n_phi, chunk):
        sl = slice(start, min(start + chunk, grid.n_phi))
        member = spec.ambit.contains(t, angles[sl, None], theta[None, :], s[None, :])
        w = _weight_values(spec.weight, t, theta[None, :], s[None, :], angles[sl, None])
        terms[sl] = np.sum(np.where(member, w, 0.0), axis=1)
    points_xy = None
    if history is not None:
        from .ambit import _radius_lookup

        r = _radius_lookup(history, theta, np.minimum(s, history.times[-1]))
        points_xy = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1)
    return OutburstView(
        points_cyl=np.stack([theta, s], axis=1), points_xy=points_xy, rate_terms=terms
    )


# ---------------------------------------------------------------------------
# moment matching
# ---------------------------------------------------------------------------


def moment_match_gamma(mu_t, sigma2, beta, ambit_measure):
    """Gamma parameters reproducing a centered Gaussian model's mean/variance.

    Returns ``(shifted_drift, alpha)`` with ``alpha = sqrt(beta / sigma2)``
    and the drift lowered by the Gamma integral's mean
    ``sigma * sqrt(beta) * ambit_measure``.
    """
    if sigma2 <= 0 or beta <= 0 or ambit_measure <= 0:
        raise ValueError("sigma2, beta and the ambit measure must be positive")
    sigma = math.sqrt(sigma2)
    return mu_t - sigma * math.sqrt(beta) * ambit_measure, math.sqrt(beta / sigma2)


def moment_match_ig(target_mean, target_var, ambit_measure):
    """Inverse Gaussian spot parameters hitting a target integral mean/variance.

    For ``Z(A) ~ IG(eta * m, gamma)`` with ``m = ambit_measure``:
    ``gamma = sqrt(mean / var)`` and ``eta = mean * gamma / m``.
    """
    if target_mean <= 0 or target_var <= 0 or ambit_measure <= 0:
        raise ValueError("target mean/variance and the ambit measure must be positive")
    gamma = math.sqrt(target_mean / target_var)
    eta = target_mean * gamma / ambit_measure
    return eta, gamma


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Preset:
    name: str
    spec: GrowthModelSpec
    grid: GridSpec
    times: tuple


TUMOUR_ROWS = (
    # t, T(t), t0(t), alpha(t), beta(t), phi0(t)
    (21.0, 21.0, 19.0, 0.04, -0.033, 0.19),
    (25.0, 25.0, 17.0, 0.02, -0.033, 0.19),
    (55.0, 18.0, 4.0, 0.01, -0.067, 0.23),
)


@dataclass(frozen=True)
class TumourParams:
    """Per-time tumour model parameters plus the log-scale drift levels."""

    rows: tuple = TUMOUR_ROWS
    mu: tuple = ((21.0, 5.0), (25.0, 5.2), (55.0, 5.8))

    def __post_init__(self):
        for t, T, t0, _, _, phi0 in self.rows:
            if not (0.0 < t0 <= T <= t):
                raise ValueError("tumour rows need 0 < t0(t) <= T(t) <= t")
            if not (0.0 < phi0 <= TWO_PI):
                raise ValueError("phi0(t) must lie in (0, 2*pi]")

    def _col(self, i):
        ts = tuple(r[0] for r in self.rows)
        vs = tuple(r[i] for r in self.rows)
        return ts, vs

    def family(self):
        ts, Ts = self._col(1)
        _, t0s = self._col(2)
        _, phi0s = self._col(5)
        return Tumour(
            TimeFn("step", (ts, Ts)),
            TimeFn("step", (ts, t0s)),
            TimeFn("step", (ts, phi0s)),
        )

    def weight(self):
        ts, alphas = self._col(3)
        _, betas = self._col(4)
        return TumourWeight(
            self.family(), TimeFn("step", (ts, alphas)), TimeFn("step", (ts, betas))
        )

    def drift(self):
        ts = tuple(p[0] for p in self.mu)
        vs = tuple(p[1] for p in self.mu)
        return Drift.step(ts, vs)


def asymmetry_profile(angles):
    """Angular multiplier favoring the direction opposite to pi."""
    return 0.35 * np.exp(cyc_dist(angles, np.pi) / np.pi)


def example_preset(preset_id, **overrides) -> Preset:
    """Built-in demonstration parameterizations.

    ``ex3``: Poisson basis, growth-rate model with unit weight over a
    1/s-wedge (theta = 1/2, lag 1) and density g(s) = 10 s.
    ``ex4``: Gaussian basis (unit variance, Lebesgue control), radius =
    drift + ambit integral over a cone of half-width theta (default
    pi/100, override with ``theta=...``) and lag T(t) = t/5; drift levels
    16 / 24 / 32 at t = 20 / 45 / 80.
    ``ex5``: as ex4 with a Gamma basis (beta = 1, alpha = 1), recentered so
    mean and variance match the Gaussian run.
    ``ex6``: as ex4 with the asymmetric angular multiplier
    0.35 * exp(d(phi, pi) / pi).
    ``tumour``: exponential two-band model with the built-in reference
    parameter rows at t = 21 / 25 / 55 (drift levels are synthetic
    placeholders; override with ``mu=((t, value), ...)``).
    """
    pid = str(preset_id).lower()
    if pid == "ex3":
        spec = GrowthModelSpec(
            kind="rate_linear",
            drift=Drift.zero(),
            weight=ConstantWeight(1.0),
            basis=BasisSpec(
                SpotLaw.poisson(), ControlMeasure(TimeDensity.linear(10.0))
            ),
            ambit=WedgeOverS(theta=0.5, T=1.0),
            r0=0.0,
        )
        grid = GridSpec(TWO_PI / 400, 0.25, 0.0, 125.0)
        return Preset("ex3", spec, grid, (75.0, 100.0, 125.0))
    if pid in ("ex4", "ex5", "ex6"):
        theta = float(overrides.pop("theta", math.pi / 100))
        drift = Drift.table((20.0, 45.0, 80.0), (16.0, 24.0, 32.0))
        ambit_family = Rectangular.of(theta, TimeFn.proportional(0.2))
        if pid == "ex5":
            basis = BasisSpec(SpotLaw.gamma_law(1.0, 1.0), ControlMeasure.lebesgue())
        else:
            basis = BasisSpec(SpotLaw.gaussian(0.0, 1.0), ControlMeasure.lebesgue())
        spec = GrowthModelSpec(
            kind="direct_scaled" if pid == "ex6" else "direct",
            drift=drift,
            weight=ConstantWeight(1.0),
            basis=basis,
            ambit=ambit_family,
            multiplier=asymmetry_profile if pid == "ex6" else None,
            center_stochastic_mean=(pid == "ex5"),
        )
        grid = GridSpec(TWO_PI / 1000, 1.0, 0.0, 80.0)
        if overrides:
            raise UnknownId(f"unsupported overrides {sorted(overrides)} for {pid}")
        return Preset(pid, spec, grid, (20.0, 45.0, 80.0))
    if pid == "tumour":
        params = TumourParams(mu=tuple(overrides.pop("mu", TumourParams().mu)))
        if overrides:
            raise UnknownId(f"unsupported overrides {sorted(overrides)} for tumour")
        spec = GrowthModelSpec(
            kind="exponential_tumour",
            drift=params.drift(),
            weight=params.weight(),
            basis=BasisSpec(SpotLaw.gaussian(0.0, 1.0), ControlMeasure.lebesgue()),
            ambit=params.family(),
        )
        grid = GridSpec(TWO_PI / 1000, 1.0, 0.0, 55.0)
        return Preset("tumour", spec, grid, (21.0, 25.0, 55.0))
    raise UnknownId(f"unknown preset {preset_id!r}")
