"""Loschmidt-echo analytics and post-processing.

Closed-form single-mode echo, the Gaussian-to-power-law envelope model and
its fit, time rescaling by the critical-mode frequency, minimum extraction,
the echo-minimum law, and multi-series collapse checks.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .errors import DomainError, FitError, InputError
from .squeeze import SqueezeMap


def _as_time_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise InputError("time grid must be a 1-d array with at least 2 samples")
    if t[0] != 0.0:
        raise InputError("time grid must start at 0")
    if np.any(np.diff(t) <= 0):
        raise InputError("time grid must be strictly ascending")
    if not np.all(np.isfinite(t)):
        raise InputError("time grid must be finite")
    return t


@dataclass(frozen=True)
class EchoSeries:
    """Sampled echo M(t) with the companion rescaled grid tau = omega1 * t."""

    t: np.ndarray
    tau: np.ndarray
    echo: np.ndarray
    omega1: float
    meta: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not (len(self.t) == len(self.tau) == len(self.echo)):
            raise InputError("t, tau and echo must have equal length")
        if abs(self.echo[0] - 1.0) > 1e-10:
            raise InputError("echo must start at 1")
        if np.max(np.abs(self.tau - self.omega1 * self.t)) > 1e-12 * max(1.0, abs(self.omega1) * self.t[-1]):
            raise InputError("tau grid is not omega1 * t")
        if np.min(self.echo) < -1e-12 or np.max(self.echo) > 1.0 + 1e-10:
            raise InputError("echo values leave [0, 1]")


def survival_closed(map: SqueezeMap, delta1: float, t_grid, *,
                    meta: dict | None = None) -> EchoSeries:
    """Closed-form single-mode echo for a squeezed initial vacuum.

    The even-state expansion with phases advancing as 2 n delta1 t resums to
    M(t) = (1 - q^2) / sqrt((1 - q^2)^2 + 4 q^2 sin^2(delta1 t)), q = tanh r.
    Periodic with period pi / delta1; minimum (1 - q^2)/(1 + q^2).
    """
    t = _as_time_grid(t_grid)
    q = map.q
    if not abs(q) < 1.0:
        raise InputError("|tanh r| must be below 1")
    if not (math.isfinite(delta1) and delta1 >= 0):
        raise InputError("delta1 must be finite and nonnegative")
    if delta1 == 0.0 and q != 0.0:
        warnings.warn("zero gap: echo series is constant", stacklevel=2)
    one_minus_q2 = 1.0 / math.cosh(map.r) ** 2
    m = one_minus_q2 / np.sqrt(one_minus_q2**2
                               + 4.0 * q * q * np.sin(delta1 * t) ** 2)
    period = math.pi / delta1 if delta1 > 0 else math.inf
    info = {
        "q": q,
        "delta1": delta1,
        "period": period,
        "covers_period": bool(math.isfinite(period) and t[-1] >= period * (1 - 1e-12)),
    }
    if meta:
        info.update(meta)
    return EchoSeries(t=t, tau=delta1 * t, echo=m, omega1=delta1, meta=info)


@dataclass(frozen=True)
class SemiclassicalParams:
    """Parameters of the Gaussian-then-power-law echo envelope.

    ``gamma`` (1/time^2) drives the initial Gaussian decay, ``xi`` (1/time)
    the crossover to the 1/(xi t) tail; ``b0`` is an amplitude of order 1.
    ``g_rescaled`` and ``f_rescaled`` are the dimensionless combinations
    gamma / omega1^2 and xi / omega1.
    """

    gamma: float
    xi: float
    b0: float = 1.0
    omega1: float = 1.0

    def __post_init__(self):
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise InputError("gamma must be finite and nonnegative")
        if not (self.xi >= 0 and math.isfinite(self.xi)):
            raise InputError("xi must be finite and nonnegative")
        if not 0.0 < self.b0 <= 1.2:
            raise InputError("b0 must lie in (0, 1.2]")
        if not self.omega1 > 0:
            raise InputError("omega1 must be positive")

    @property
    def g_rescaled(self) -> float:
        return self.gamma / self.omega1**2

    @property
    def f_rescaled(self) -> float:
        return self.xi / self.omega1


def semiclassical_envelope(params: SemiclassicalParams, t):
    """Envelope b0 (1 + xi^2 t^2)^{-1/2} exp(-gamma t^2 / (1 + xi^2 t^2))."""
    t_in = np.asarray(t, dtype=float)
    if np.any(t_in < 0):
        raise InputError("t must be nonnegative")
    den = 1.0 + (params.xi * t_in) ** 2
    out = params.b0 / np.sqrt(den) * np.exp(-params.gamma * t_in**2 / den)
    if t_in.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class EnvelopeFit:
    """Fitted envelope parameters plus log-domain residual diagnostics."""

    params: SemiclassicalParams
    max_log_residual: float
    rms_log_residual: float
    n_samples: int
    window: tuple[float, float]


def fit_envelope(series: EchoSeries, window: tuple[float, float], *,
                 min_samples: int = 10) -> EnvelopeFit:
    """Least-squares fit of the envelope to ln M over a time window.

    The window should stay inside the first echo period and hold at least
    ``min_samples`` samples.  Raises FitError when no start converges.
    """
    lo, hi = float(window[0]), float(window[1])
    if not hi > lo:
        raise InputError("window must satisfy hi > lo")
    mask = (series.t >= lo) & (series.t <= hi)
    n_in = int(np.count_nonzero(mask))
    if n_in < min_samples:
        raise InputError(f"window holds {n_in} samples; need at least {min_samples}")
    tt = series.t[mask]
    mm = series.echo[mask]
    if np.any(mm <= 0):
        raise InputError("echo must stay positive for a log-domain fit")
    y = np.log(mm)

    def residual(p):
        g, x, b = p
        den = 1.0 + (x * tt) ** 2
        return math.log(b) - 0.5 * np.log(den) - g * tt**2 / den - y

    t_end = tt[-1]
    drop = max(-float(y[-1]), 1e-8)
    starts = [
        (drop / t_end**2, 1.0 / t_end, 1.0),
        (1e-8, math.sqrt(2.0 * drop) / t_end, 1.0),
        (0.5 * drop / t_end**2, 4.0 / t_end, 1.0),
    ]
    best = None
    trace = []
    for x0 in starts:
        try:
            res = scipy.optimize.least_squares(
                residual, x0, bounds=([0.0, 0.0, 1e-6], [np.inf, np.inf, 1.2]))
        except Exception as err:  # scipy raises ValueError on pathological input
            trace.append(f"start {x0}: {err}")
            continue
        trace.append(f"start {x0}: cost {res.cost:.3e}, success {res.success}")
        if res.success and (best is None or res.cost < best.cost):
            best = res
    if best is None:
        raise FitError("envelope fit did not converge; " + "; ".join(trace))
    g, x, b = (float(v) for v in best.x)
    fitted = SemiclassicalParams(gamma=g, xi=x, b0=b,
                                 omega1=series.omega1 if series.omega1 > 0 else 1.0)
    r = residual(best.x)
    return EnvelopeFit(params=fitted,
                       max_log_residual=float(np.max(np.abs(r))),
                       rms_log_residual=float(np.sqrt(np.mean(r**2))),
                       n_samples=n_in,
                       window=(lo, hi))


def rescale_time(series: EchoSeries, omega1: float) -> EchoSeries:
    """Replace the rescaled grid with tau = omega1 * t; echo values unchanged."""
    if not (math.isfinite(omega1) and omega1 > 0):
        raise InputError("omega1 must be positive and finite")
    return EchoSeries(t=series.t, tau=omega1 * series.t, echo=series.echo,
                      omega1=float(omega1), meta=dict(series.meta))


def min_echo(series: EchoSeries) -> float:
    """Global echo minimum over the grid, refined parabolically.

    Requires the series to cover at least one full period (meta flag
    ``covers_period`` set by the series builders).
    """
    if series.meta.get("covers_period") is not True:
        raise DomainError("series does not cover a full echo period")
    m = series.echo
    if float(np.max(m) - np.min(m)) < 1e-13:
        return float(np.min(m))
    k = int(np.argmin(m))
    if k == 0 or k == m.size - 1:
        return float(m[k])
    x = series.t[k - 1:k + 2]
    y = m[k - 1:k + 2]
    coef = np.polyfit(x - x[1], y, 2)
    if coef[0] <= 0:
        return float(m[k])
    vertex = float(coef[2] - coef[1] ** 2 / (4.0 * coef[0]))
    return vertex


def mp_scaling(eta: float) -> float:
    """Echo minimum as a function of the critical-distance ratio:
    2 sqrt(eta) / (1 + eta).  Symmetric under eta -> 1/eta; equals 1 at eta = 1."""
    if not (math.isfinite(eta) and eta > 0):
        raise InputError("eta must be positive and finite")
    return 2.0 * math.sqrt(eta) / (1.0 + eta)


_MEMBER_KEYS = ("lambda1", "lambda2", "h1", "h2", "scale", "eta")


@dataclass(frozen=True)
class GroupCollapse:
    """Collapse diagnostics for one group of echo series at equal eta."""

    eta: float
    n_members: int
    members: tuple[dict, ...]
    tau_lo: float
    tau_hi: float
    spread: float
    deviations: tuple[tuple[float, float], ...]
    trend_decreasing: bool | None


@dataclass(frozen=True)
class CollapseReport:
    groups: tuple[GroupCollapse, ...]


def collapse_check(groups) -> CollapseReport:
    """Pointwise spread of echo curves on their common rescaled-time window.

    ``groups`` is an iterable of (eta, [EchoSeries, ...]).  Members are
    linearly interpolated onto the intersection of their tau ranges; the
    spread is the largest pointwise gap between members.  When every member
    carries a ``scale`` meta key, per-member deviations from the
    smallest-scale member are reported together with a flag stating whether
    they shrink as the scale does.
    """
    out = []
    for eta, members in groups:
        members = list(members)
        if not members:
            raise InputError("collapse group has no member series")
        lo = max(float(s.tau[0]) for s in members)
        hi = min(float(s.tau[-1]) for s in members)
        if not hi > lo:
            raise InputError(f"no overlapping rescaled-time window for eta={eta}")
        n = max(len(s.tau) for s in members)
        grid = np.linspace(lo, hi, n)
        curves = np.vstack([np.interp(grid, s.tau, s.echo) for s in members])
        spread = float(np.max(curves.max(axis=0) - curves.min(axis=0)))
        scales = [s.meta.get("scale") for s in members]
        deviations: tuple = ()
        trend = None
        if len(members) > 1 and all(sc is not None for sc in scales):
            order = sorted(range(len(members)), key=lambda i: -scales[i])
            ref = curves[order[-1]]
            devs = [(float(scales[i]), float(np.max(np.abs(curves[i] - ref))))
                    for i in order]
            deviations = tuple(devs)
            gaps = [d for _, d in devs[:-1]]
            trend = all(gaps[i] >= gaps[i + 1] for i in range(len(gaps) - 1)) if len(gaps) > 1 else None
        descriptors = tuple({k: s.meta[k] for k in _MEMBER_KEYS if k in s.meta}
                            for s in members)
        out.append(GroupCollapse(eta=float(eta), n_members=len(members),
                                 members=descriptors, tau_lo=lo, tau_hi=hi,
                                 spread=spread, deviations=deviations,
                                 trend_decreasing=trend))
    return CollapseReport(groups=tuple(out))
