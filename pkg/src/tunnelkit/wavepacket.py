"""Wave packets, detectors, and the arrival density P(L, t).

The arrival amplitude is the oscillatory momentum integral

    A(L, t) = int_0^inf dk/(2pi) sqrt(alpha(k) v_k) A_k psi0(k) e^{ikL - iE_k t}

evaluated over the packet window [max(0, p - 8 sigma_p), p + 8 sigma_p] with
adaptive Gauss-Kronrod panels. A time grid shares one per-k table of the
detection amplitude A_k across all samples.

Normalization: int |psi0(k)|^2 dk/(2pi) = 1, so the time-integrated density
is a genuine detection probability (<= 1 for alpha <= 1).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _chebyshev, _quadrature
from .errors import NumericsError, PhysicsDomainError, warn_regime
from .scattering import PotentialProfile, detection_amplitude_scan, detection_phase_derivative

_KWINDOW_SIGMAS = 8.0
_MIN_L_OVER_D = 10.0
_WARN_L_OVER_D = 50.0


# ---------------------------------------------------------------------------
# packets


@dataclass(frozen=True)
class WavePacketSpec:
    """Initial single-particle packet centered at x = -x0, momentum p.

    shape is "gaussian" or "lorentzian"; sigma_p < p/3 keeps the packet on
    positive momenta to within 3 sigma.
    """

    shape: str
    p: float
    sigma_p: float
    x0: float

    def __post_init__(self):
        if self.shape not in ("gaussian", "lorentzian"):
            raise PhysicsDomainError(f"unknown packet shape {self.shape!r}")
        if not (self.p > 0 and math.isfinite(self.p)):
            raise PhysicsDomainError(f"mean momentum must be positive, got {self.p}")
        if not (self.sigma_p > 0 and math.isfinite(self.sigma_p)):
            raise PhysicsDomainError(f"momentum spread must be positive, got {self.sigma_p}")
        if self.sigma_p >= self.p / 3.0:
            raise PhysicsDomainError(
                f"sigma_p = {self.sigma_p} >= p/3 = {self.p / 3.0}: packet would "
                "leak onto negative momenta")
        if not (self.x0 > 0 and math.isfinite(self.x0)):
            raise PhysicsDomainError(f"emission center x0 must be positive, got {self.x0}")

    @property
    def sigma_x(self) -> float:
        """Position spread: 1/(2 sigma_p) for Gaussian (minimum-uncertainty),
        1/(sqrt(2) sigma_p) for the Lorentzian shape."""
        if self.shape == "gaussian":
            return 0.5 / self.sigma_p
        return 1.0 / (math.sqrt(2.0) * self.sigma_p)

    @property
    def k_window(self) -> tuple[float, float]:
        lo = max(self.p - _KWINDOW_SIGMAS * self.sigma_p, 1e-12 * self.p)
        return (lo, self.p + _KWINDOW_SIGMAS * self.sigma_p)

    def envelope(self, k) -> np.ndarray:
        """Real envelope u~0(k - p), normalized to int |.|^2 dk/(2pi) = 1."""
        q = np.asarray(k, dtype=float) - self.p
        if self.shape == "gaussian":
            c = (2.0 * math.pi / self.sigma_p ** 2) ** 0.25
            return c * np.exp(-q * q / (4.0 * self.sigma_p ** 2))
        c = 2.0 / math.sqrt(self.sigma_p)
        return c / (1.0 + (q / self.sigma_p) ** 2)

    def momentum_amplitude(self, k) -> np.ndarray:
        """psi0(k) = u~0(k - p) e^{i k x0}."""
        k = np.asarray(k, dtype=float)
        return self.envelope(k) * np.exp(1j * k * self.x0)

    def position_envelope(self, x) -> np.ndarray:
        """u0(x) = int dk/(2pi) e^{-ikx} u~0(k); real and even."""
        x = np.asarray(x, dtype=float)
        if self.shape == "gaussian":
            c = (2.0 / math.pi) ** 0.25 * math.sqrt(self.sigma_p)
            return c * np.exp(-self.sigma_p ** 2 * x * x)
        return math.sqrt(self.sigma_p) * np.exp(-self.sigma_p * np.abs(x))


def packet_momentum_amplitude(spec: WavePacketSpec, k):
    """Momentum-space amplitude of the initial packet at k (scalar or array)."""
    if np.ndim(k) == 0:
        if not math.isfinite(float(k)):
            raise PhysicsDomainError(f"momentum must be finite, got {k}")
        return complex(spec.momentum_amplitude(float(k)))
    return spec.momentum_amplitude(k)


# ---------------------------------------------------------------------------
# detectors


def _pchip_slopes(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # Fritsch-Carlson monotone slopes
    h = np.diff(x)
    delta = np.diff(y) / h
    d = np.zeros_like(y)
    if y.size == 2:
        d[:] = delta[0]
        return d
    same = np.sign(delta[:-1]) * np.sign(delta[1:]) > 0
    w1 = 2 * h[1:] + h[:-1]
    w2 = h[1:] + 2 * h[:-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        harm = (w1 + w2) / (w1 / delta[:-1] + w2 / delta[1:])
    d[1:-1] = np.where(same, harm, 0.0)
    for idx, h0, h1, d0, d1 in ((0, h[0], h[1], delta[0], delta[1]),
                                (-1, h[-1], h[-2], delta[-1], delta[-2])):
        slope = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1)
        if np.sign(slope) != np.sign(d0):
            slope = 0.0
        elif np.sign(d0) != np.sign(d1) and abs(slope) > 3 * abs(d0):
            slope = 3 * d0
        d[idx] = slope
    return d


@dataclass(frozen=True)
class DetectorSpec:
    """Detector at x = L with absorption coefficient alpha(k) in [0, 1].

    absorption is a constant, or a (k_points, values) table interpolated by a
    monotone cubic so alpha never overshoots its samples.
    """

    position: float
    absorption: object = 1.0

    def __post_init__(self):
        if not (self.position > 0 and math.isfinite(self.position)):
            raise PhysicsDomainError(f"detector position must be positive, got {self.position}")
        if np.ndim(self.absorption) == 0:
            a = float(self.absorption)
            if not (0.0 <= a <= 1.0):
                raise PhysicsDomainError(f"absorption must lie in [0, 1], got {a}")
        else:
            kt, at = self.absorption
            kt = np.asarray(kt, float)
            at = np.asarray(at, float)
            if kt.ndim != 1 or kt.shape != at.shape or kt.size < 2 or np.any(np.diff(kt) <= 0):
                raise PhysicsDomainError("tabulated absorption needs increasing k samples")
            if np.any(at < 0) or np.any(at > 1):
                raise PhysicsDomainError("absorption samples must lie in [0, 1]")

    def absorption_at(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        if np.ndim(self.absorption) == 0:
            return np.full(k.shape, float(self.absorption))
        kt = np.asarray(self.absorption[0], float)
        at = np.asarray(self.absorption[1], float)
        d = _pchip_slopes(kt, at)
        kk = np.clip(k, kt[0], kt[-1])
        i = np.clip(np.searchsorted(kt, kk) - 1, 0, kt.size - 2)
        h = kt[i + 1] - kt[i]
        s = (kk - kt[i]) / h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return h00 * at[i] + h10 * h * d[i] + h01 * at[i + 1] + h11 * h * d[i + 1]

    def check_far_field(self, profile: PotentialProfile | None) -> None:
        d = profile.width if profile is not None else 0.0
        if d == 0.0:
            return
        if self.position < _MIN_L_OVER_D * d:
            raise PhysicsDomainError(
                f"detector at L = {self.position} violates the far-field "
                f"requirement L >= {_MIN_L_OVER_D} d = {_MIN_L_OVER_D * d}")
        if self.position < _WARN_L_OVER_D * d:
            warn_regime("far_field_marginal",
                        f"L = {self.position} below {_WARN_L_OVER_D} d: "
                        "signal-only formula is marginal",
                        L=self.position, d=d)


# ---------------------------------------------------------------------------
# arrival distribution container


@dataclass
class ArrivalDistribution:
    """P(L, t) sampled on a uniform time grid, with run metadata."""

    times: np.ndarray
    density: np.ndarray
    metadata: dict = field(default_factory=dict)

    def total_mass(self) -> float:
        return float(np.trapezoid(self.density, self.times))

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write("t,P\n")
            for t, p in zip(self.times, self.density):
                f.write(f"{t:.17g},{p:.17g}\n")

    def write_sidecar(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.metadata, f, indent=2, sort_keys=True, default=_json_default)
            f.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


# ---------------------------------------------------------------------------
# the oscillatory integral engine


class _IntegrandTable:
    """Per-k factors of the arrival integrand, shared across the time grid.

    The detection amplitude A_k is tabulated on a verified Chebyshev grid
    when the window is smooth enough (degree <= 64, error < 1e-9), otherwise
    evaluated directly per node (narrow resonances defeat interpolation).
    """

    def __init__(self, spec: WavePacketSpec, profile: PotentialProfile | None,
                 detector_alpha, mass: float, amplitude_override=None):
        self.spec = spec
        self.profile = profile
        self.alpha = detector_alpha
        self.mass = mass
        self.override = amplitude_override
        lo, hi = spec.k_window
        self.k_lo, self.k_hi = lo, hi
        self.table = None
        if amplitude_override is not None:
            self.mode = "override"
        elif profile is not None and profile.segments:
            self.table = _chebyshev.build_verified(
                lambda kk: detection_amplitude_scan(profile, kk), lo, hi, tol=1e-9)
            self.mode = f"chebyshev:{self.table.degree}" if self.table else "direct"
        else:
            self.mode = "free"

    def detection_amplitude(self, k: np.ndarray) -> np.ndarray:
        if self.override is not None:
            return np.asarray(self.override(k), dtype=complex)
        if self.profile is None or not self.profile.segments:
            return np.ones_like(k, dtype=complex)
        if self.table is not None:
            return self.table(k)
        return detection_amplitude_scan(self.profile, k)

    def smooth_part(self, k: np.ndarray) -> np.ndarray:
        """sqrt(alpha v) A_k psi0(k): everything except e^{ikL - iE_k t}."""
        E = np.hypot(k, self.mass)
        v = k / E
        return (np.sqrt(self.alpha(k) * v) * self.detection_amplitude(k)
                * self.spec.momentum_amplitude(k))


def _alpha_callable(detector: DetectorSpec | None, alpha):
    if detector is not None:
        return detector.absorption_at
    if alpha is None:
        return lambda k: np.ones_like(np.asarray(k, float))
    if callable(alpha):
        return lambda k: np.asarray(alpha(np.asarray(k, float)), float)
    a = float(alpha)
    if not (0.0 <= a <= 1.0):
        raise PhysicsDomainError(f"absorption must lie in [0, 1], got {a}")
    return lambda k: np.full(np.asarray(k, float).shape, a)


def resolve_mass(profile: PotentialProfile | None, mass: float | None = None) -> float:
    """Mass from the profile, or the explicit value for free runs (default 1,
    i.e. everything expressed in units of the particle mass)."""
    if profile is not None:
        if mass is not None and mass != profile.mass:
            raise PhysicsDomainError(
                f"explicit mass {mass} contradicts profile mass {profile.mass}")
        return profile.mass
    return 1.0 if mass is None else float(mass)


def stationary_phase_time(spec: WavePacketSpec, profile: PotentialProfile | None,
                          L: float, mass: float | None = None) -> float:
    """Peak-time estimate (x0 + L + theta'_p)/v_p from the stationary phase.

    For a symmetric double barrier the anchor is the first-detection time
    (twice the single-barrier phase derivative), not the composite-amplitude
    derivative, which oscillates through the resonances.
    """
    p = spec.p
    E = math.hypot(p, resolve_mass(profile, mass))
    v = p / E
    dbl = profile.as_symmetric_double() if profile is not None else None
    if dbl is not None:
        v0, a, _ = dbl
        single = PotentialProfile.square(profile.mass, v0, a)
        theta_prime = 2.0 * detection_phase_derivative(single, p)
    else:
        theta_prime = detection_phase_derivative(profile, p)
    return (spec.x0 + L + theta_prime) / v


def _initial_edges(table: _IntegrandTable, X: float, t_lo: float, t_hi: float):
    lo, hi = table.k_lo, table.k_hi
    vs = [k / math.hypot(k, table.mass) for k in (lo, hi)]
    rate = max(abs(X - v * t) for v in vs for t in (t_lo, t_hi)) + 1.0
    edges = _quadrature.phase_panels(lo, hi, rate)
    if edges.size - 1 < 32:  # resolve the packet envelope even when slow
        edges = np.linspace(lo, hi, 33)
    return edges


def arrival_amplitude(L: float, t: float, spec: WavePacketSpec,
                      profile: PotentialProfile | None, alpha=None,
                      rel_tol: float = 1e-8, mass: float | None = None,
                      detection_amplitude=None) -> complex:
    """Arrival amplitude A(L, t) at a single detection time.

    ``detection_amplitude`` substitutes a model A_k (callable of a momentum
    array) for the profile-derived one, e.g. a Lorentzian resonance
    approximation; the profile then only supplies geometry.
    """
    mass = resolve_mass(profile, mass)
    table = _IntegrandTable(spec, profile, _alpha_callable(None, alpha), mass,
                            amplitude_override=detection_amplitude)
    edges = _initial_edges(table, L + spec.x0, t, t)

    def f(k):
        E = np.hypot(k, mass)
        return table.smooth_part(k) * np.exp(1j * (k * L - E * t))

    val, _ = _quadrature.adaptive_complex_quad(f, table.k_lo, table.k_hi,
                                               rel_tol=rel_tol, initial_edges=edges)
    return val / (2.0 * math.pi)


def _shared_panel_amplitudes(table: _IntegrandTable, L: float, times: np.ndarray,
                             rel_tol: float, max_panels: int = 60000):
    """Amplitudes on a whole time grid from one adaptively refined panel set."""
    t_lo, t_hi = float(times[0]), float(times[-1])
    edges = _initial_edges(table, L + table.spec.x0, t_lo, t_hi)
    lo = edges[:-1].copy()
    hi = edges[1:].copy()
    n_rep = min(24, times.size)
    rep = times[np.unique(np.linspace(0, times.size - 1, n_rep).astype(int))]

    def panel_sums(plo, phi_):
        x, wk, wg = _quadrature.panel_nodes(plo, phi_)
        s = table.smooth_part(x.ravel()).reshape(x.shape)
        E = np.hypot(x, table.mass)
        base = s * np.exp(1j * x * L)
        kern = np.exp(-1j * E[:, :, None] * rep[None, None, :])
        k15 = np.einsum("pn,pnt->pt", wk * base, kern)
        g7 = np.einsum("pn,pnt->pt", wg * base, kern)
        return k15, g7

    k15, g7 = panel_sums(lo, hi)
    refinements = 0
    for _ in range(60):
        err = np.max(np.abs(k15 - g7), axis=1)
        scale = max(float(np.max(np.abs(np.sum(k15, axis=0)))), 1e-300)
        if float(np.sum(err)) <= rel_tol * scale:
            break
        if lo.size >= max_panels:
            worst = int(np.argmax(err))
            raise NumericsError(
                "time-grid quadrature failed to converge",
                diagnostics={"panels": int(lo.size),
                             "total_error": float(np.sum(err)),
                             "tolerance": float(rel_tol * scale),
                             "worst_panel": (float(lo[worst]), float(hi[worst]),
                                             float(err[worst]))})
        bad = err > max(rel_tol * scale / max(lo.size, 1), float(np.max(err)) * 0.25)
        if not np.any(bad):
            bad = err == np.max(err)
        mid = 0.5 * (lo[bad] + hi[bad])
        nk15, ng7 = panel_sums(np.concatenate([lo[bad], mid]),
                               np.concatenate([mid, hi[bad]]))
        k15 = np.concatenate([k15[~bad], nk15])
        g7 = np.concatenate([g7[~bad], ng7])
        lo, hi = (np.concatenate([lo[~bad], lo[bad], mid]),
                  np.concatenate([hi[~bad], mid, hi[bad]]))
        refinements += 1

    err = np.max(np.abs(k15 - g7), axis=1)
    diagnostics = {"panels": int(lo.size), "refinement_rounds": refinements,
                   "error_estimate": float(np.sum(err)),
                   "table_mode": table.mode}

    # final pass over the full grid, chunked to bound memory
    x, wk, _ = _quadrature.panel_nodes(lo, hi)
    s = table.smooth_part(x.ravel()).reshape(x.shape)
    coeff = (wk * s * np.exp(1j * x * L)).ravel()
    E = np.hypot(x, table.mass).ravel()
    amps = np.empty(times.size, dtype=complex)
    chunk = max(1, int(4e6 // max(E.size, 1)))
    for i in range(0, times.size, chunk):
        tt = times[i:i + chunk]
        amps[i:i + chunk] = coeff @ np.exp(-1j * E[:, None] * tt[None, :])
    return amps / (2.0 * math.pi), diagnostics


def arrival_density(times, spec: WavePacketSpec, profile: PotentialProfile | None,
                    detector: DetectorSpec, rel_tol: float = 1e-8,
                    mass: float | None = None,
                    detection_amplitude=None) -> ArrivalDistribution:
    """Sample P(L, t) = |A(L, t)|^2 on a uniform time grid.

    One detection-amplitude table and one refined panel set are shared by
    every grid point; ``detection_amplitude`` substitutes a model A_k as in
    arrival_amplitude. The grid should span the expected peak by +-10
    sigma_x/v_p; a narrower grid is accepted with a structured warning.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 4 or np.any(np.diff(times) <= 0):
        raise PhysicsDomainError("need an increasing time grid with >= 4 points")
    detector.check_far_field(profile)
    mass = resolve_mass(profile, mass)
    L = detector.position

    if detection_amplitude is None:
        t_bar = stationary_phase_time(spec, profile, L, mass)
    else:
        t_bar = (spec.x0 + L) / (spec.p / math.hypot(spec.p, mass))
    vp = spec.p / math.hypot(spec.p, mass)
    span = 10.0 * spec.sigma_x / vp
    if times[0] > t_bar - span or times[-1] < t_bar + span:
        warn_regime("grid_span",
                    f"time grid [{times[0]}, {times[-1]}] does not cover the "
                    f"recommended window around the expected peak t = {t_bar}",
                    t_peak=t_bar, recommended_halfspan=span)

    table = _IntegrandTable(spec, profile, detector.absorption_at, mass,
                            amplitude_override=detection_amplitude)
    if np.all(table.alpha(np.linspace(table.k_lo, table.k_hi, 33)) == 0.0):
        amps = np.zeros(times.size, dtype=complex)
        diagnostics = {"panels": 0, "table_mode": table.mode, "note": "alpha = 0"}
    else:
        amps, diagnostics = _shared_panel_amplitudes(table, L, times, rel_tol)
    density = np.abs(amps) ** 2
    meta = {
        "packet": {"shape": spec.shape, "p": spec.p, "sigma_p": spec.sigma_p,
                   "x0": spec.x0},
        "profile": profile.to_dict() if profile is not None else None,
        "detector": {"position": L},
        "quadrature": diagnostics,
        "t_peak_estimate": t_bar,
    }
    return ArrivalDistribution(times=times, density=density, metadata=meta)


def total_transmission(spec: WavePacketSpec, profile: PotentialProfile | None,
                       alpha=None, rel_tol: float = 1e-10,
                       mass: float | None = None) -> float:
    """int dk/(2pi) alpha(k) |A_k|^2 |u~0(k - p)|^2 (no time integral)."""
    mass = resolve_mass(profile, mass)
    table = _IntegrandTable(spec, profile, _alpha_callable(None, alpha), mass)

    def f(k):
        amp = table.detection_amplitude(k)
        return table.alpha(k) * np.abs(amp) ** 2 * table.spec.envelope(k) ** 2

    val, _ = _quadrature.adaptive_complex_quad(
        f, table.k_lo, table.k_hi, rel_tol=rel_tol,
        initial_edges=np.linspace(table.k_lo, table.k_hi, 65))
    return float(val.real) / (2.0 * math.pi)
