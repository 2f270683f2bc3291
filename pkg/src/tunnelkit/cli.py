"""Scenario-driven command line: parse a JSON config, run one task, emit CSV
artifacts plus a JSON run manifest.

    tunnelkit run <config.json> [--out DIR] [--threads N]
    tunnelkit validate <config.json>

Exit codes: 0 success, 1 config error, 2 numeric failure, 3 I/O error.
All quantities in the config are in mass units (momenta/energies in m,
lengths/times in 1/m). Runs are deterministic: identical configs produce
byte-identical CSVs.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, analysis
from .errors import ConfigError, NumericsError, PhysicsDomainError, RegimeWarning, TunnelKitError
from .scattering import PotentialProfile, amplitude_scan, piecewise_amplitudes, tunneling_window
from .wavepacket import DetectorSpec, WavePacketSpec, arrival_density

TASK_KINDS = ("transmission-scan", "arrival-density", "tunneling-time-scan",
              "resonance-scan", "decay-fit", "regime-compare")


# ---------------------------------------------------------------------------
# config parsing with field-path errors


def _expect(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise ConfigError(message, path=path)


def _get(d: dict, key: str, path: str, required: bool = True, default=None):
    if key not in d:
        _expect(not required, f"{path}.{key}" if path else key, "missing required field")
        return default
    return d[key]


def _num(value, path: str, positive: bool = False, nonneg: bool = False) -> float:
    _expect(isinstance(value, (int, float)) and not isinstance(value, bool),
            path, f"expected a number, got {value!r}")
    v = float(value)
    _expect(math.isfinite(v), path, "must be finite")
    if positive:
        _expect(v > 0, path, f"must be positive, got {v}")
    if nonneg:
        _expect(v >= 0, path, f"must be >= 0, got {v}")
    return v


def _int(value, path: str, minimum: int = 1) -> int:
    _expect(isinstance(value, int) and not isinstance(value, bool),
            path, f"expected an integer, got {value!r}")
    _expect(value >= minimum, path, f"must be >= {minimum}, got {value}")
    return value


def _parse_barrier(data: dict, path: str = "barrier") -> PotentialProfile:
    _expect(isinstance(data, dict), path, "expected an object")
    mass = _num(_get(data, "mass", path), f"{path}.mass", positive=True)
    segs = _get(data, "segments", path)
    _expect(isinstance(segs, list), f"{path}.segments", "expected a list")
    parsed = []
    for i, seg in enumerate(segs):
        spath = f"{path}.segments[{i}]"
        _expect(isinstance(seg, dict), spath, "expected an object")
        v = _num(_get(seg, "v", spath), f"{spath}.v", nonneg=True)
        w = _num(_get(seg, "w", spath), f"{spath}.w")
        _expect(w > 0, f"{spath}.w", f"width must be positive, got {w}")
        _expect(v < mass, f"{spath}.v",
                f"height {v} must be below the mass {mass}")
        parsed.append((v, w))
    try:
        return PotentialProfile(mass, tuple(parsed))
    except PhysicsDomainError as exc:  # anything the field checks missed
        raise ConfigError(str(exc), path=path) from exc


def _parse_packet(data: dict, path: str = "packet") -> WavePacketSpec:
    _expect(isinstance(data, dict), path, "expected an object")
    shape = _get(data, "shape", path, required=False, default="gaussian")
    _expect(shape in ("gaussian", "lorentzian"), f"{path}.shape",
            f"must be 'gaussian' or 'lorentzian', got {shape!r}")
    p = _num(_get(data, "p", path), f"{path}.p", positive=True)
    sigma_p = _num(_get(data, "sigma_p", path), f"{path}.sigma_p", positive=True)
    x0 = _num(_get(data, "x0", path), f"{path}.x0", positive=True)
    try:
        return WavePacketSpec(shape=shape, p=p, sigma_p=sigma_p, x0=x0)
    except PhysicsDomainError as exc:
        raise ConfigError(str(exc), path=path) from exc


def _parse_detector(data: dict, path: str = "detector") -> DetectorSpec:
    _expect(isinstance(data, dict), path, "expected an object")
    pos = _num(_get(data, "position", path), f"{path}.position", positive=True)
    absorption = _get(data, "absorption", path, required=False, default=1.0)
    if isinstance(absorption, dict):
        ks = _get(absorption, "k", f"{path}.absorption")
        al = _get(absorption, "alpha", f"{path}.absorption")
        _expect(isinstance(ks, list) and isinstance(al, list)
                and len(ks) == len(al) and len(ks) >= 2,
                f"{path}.absorption", "need parallel lists 'k' and 'alpha' (>= 2 points)")
        absorption = (np.asarray(ks, float), np.asarray(al, float))
    else:
        absorption = _num(absorption, f"{path}.absorption", nonneg=True)
    try:
        return DetectorSpec(position=pos, absorption=absorption)
    except PhysicsDomainError as exc:
        raise ConfigError(str(exc), path=path) from exc


@dataclass
class Scenario:
    name: str
    task: dict
    barrier: PotentialProfile | None
    packet: WavePacketSpec | None
    detector: DetectorSpec | None
    out_dir: Path
    raw: dict


_TASK_NEEDS = {
    "transmission-scan": ("barrier",),
    "arrival-density": ("packet", "detector"),
    "tunneling-time-scan": (),
    "resonance-scan": ("barrier",),
    "decay-fit": ("barrier", "packet", "detector"),
    "regime-compare": ("barrier", "packet", "detector"),
}


def parse_scenario(config: dict, out_override: str | None = None) -> Scenario:
    _expect(isinstance(config, dict), "", "config root must be a JSON object")
    name = _get(config, "name", "")
    _expect(isinstance(name, str) and name != "", "name", "must be a non-empty string")
    task = _get(config, "task", "")
    _expect(isinstance(task, dict), "task", "expected an object")
    kind = _get(task, "kind", "task")
    _expect(kind in TASK_KINDS, "task.kind",
            f"must be one of {', '.join(TASK_KINDS)}; got {kind!r}")

    barrier = packet = detector = None
    if "barrier" in config and config["barrier"] is not None:
        barrier = _parse_barrier(config["barrier"])
    if "packet" in config and config["packet"] is not None:
        packet = _parse_packet(config["packet"])
    if "detector" in config and config["detector"] is not None:
        detector = _parse_detector(config["detector"])
    for need in _TASK_NEEDS[kind]:
        _expect({"barrier": barrier, "packet": packet, "detector": detector}[need]
                is not None, need, f"required by task kind {kind!r}")
    if kind in ("resonance-scan", "decay-fit", "regime-compare"):
        _expect(barrier.as_symmetric_double() is not None, "barrier",
                f"task {kind!r} requires a symmetric double barrier "
                "(segments [barrier, gap, barrier])")
    if barrier is not None and detector is not None and barrier.segments:
        _expect(detector.position >= 10.0 * barrier.width, "detector.position",
                f"detector at {detector.position} violates the far-field "
                f"requirement L >= 10 d = {10.0 * barrier.width}")

    out = out_override or (config.get("output") or {}).get("dir") or "."
    scenario = Scenario(name=name, task=task, barrier=barrier, packet=packet,
                        detector=detector, out_dir=Path(out), raw=config)
    _validate_task_params(scenario)
    return scenario


def _validate_task_params(sc: Scenario) -> None:
    t = sc.task
    kind = t["kind"]
    if kind == "transmission-scan":
        k_min = _num(_get(t, "k_min", "task"), "task.k_min", positive=True)
        k_max = _num(_get(t, "k_max", "task"), "task.k_max", positive=True)
        _expect(k_max > k_min, "task.k_max", "must exceed task.k_min")
        _int(_get(t, "n_k", "task", required=False, default=200), "task.n_k", 2)
    elif kind == "arrival-density":
        if "t_min" in t or "t_max" in t:
            t_min = _num(_get(t, "t_min", "task"), "task.t_min")
            t_max = _num(_get(t, "t_max", "task"), "task.t_max")
            _expect(t_max > t_min, "task.t_max", "must exceed task.t_min")
        else:
            _num(_get(t, "span_sigmas", "task", required=False, default=10.0),
                 "task.span_sigmas", positive=True)
        _int(_get(t, "n_t", "task", required=False, default=1000), "task.n_t", 4)
    elif kind == "tunneling-time-scan":
        _num(_get(t, "mass", "task", required=False, default=1.0), "task.mass",
             positive=True)
        _num(_get(t, "d", "task"), "task.d", positive=True)
        v0s = _get(t, "v0_values", "task")
        _expect(isinstance(v0s, list) and len(v0s) >= 1, "task.v0_values",
                "need a non-empty list of barrier heights")
        mass = float(t.get("mass", 1.0))
        for i, v0 in enumerate(v0s):
            vv = _num(v0, f"task.v0_values[{i}]", positive=True)
            _expect(vv < mass, f"task.v0_values[{i}]",
                    f"height {vv} must be below the mass {mass}")
        _int(_get(t, "n_p", "task", required=False, default=200), "task.n_p", 2)
    elif kind == "resonance-scan":
        if "k_min" in t or "k_max" in t:
            k_min = _num(_get(t, "k_min", "task"), "task.k_min", positive=True)
            k_max = _num(_get(t, "k_max", "task"), "task.k_max", positive=True)
            _expect(k_max > k_min, "task.k_max", "must exceed task.k_min")
    elif kind == "decay-fit":
        _int(_get(t, "n_peaks", "task", required=False, default=15), "task.n_peaks", 4)
        _int(_get(t, "samples_per_peak", "task", required=False, default=12),
             "task.samples_per_peak", 4)
    elif kind == "regime-compare":
        regime = _get(t, "regime", "task")
        _expect(regime in ("peaks", "continuum", "resonance"), "task.regime",
                "must be 'peaks', 'continuum' or 'resonance'")
        _int(_get(t, "n_t", "task", required=False, default=1500), "task.n_t", 16)
    if "rel_tol" in t:
        _num(t["rel_tol"], "task.rel_tol", positive=True)


# ---------------------------------------------------------------------------
# CSV helpers


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(x) for x in row) + "\n")


def _write_kv_csv(path: Path, pairs) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write("quantity,value\n")
        for key, value in pairs:
            f.write(f"{key},{_fmt(value)}\n")


# ---------------------------------------------------------------------------
# task runners (each returns artifact paths + diagnostics dict)


def _threaded_map(func, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def _auto_double_grid(sc: Scenario, n_peaks: int, samples_per_peak: int):
    v0, a, r = sc.barrier.as_symmetric_double()
    m = sc.barrier.mass
    rep = analysis.double_barrier_report(sc.packet.p, v0, a, r, m,
                                         L=sc.detector.position, x0=sc.packet.x0,
                                         sigma_p=sc.packet.sigma_p)
    n_t = max((n_peaks + 3) * samples_per_peak, 64)
    times = np.linspace(rep.t0 - 2.0 * rep.dt, rep.t0 + (n_peaks + 0.5) * rep.dt, n_t)
    return times, rep


def _run_transmission_scan(sc: Scenario, threads: int) -> tuple[list[Path], dict]:
    t = sc.task
    k = np.linspace(t["k_min"], t["k_max"], int(t.get("n_k", 200)))
    chunks = np.array_split(k, max(1, min(threads, k.size)))
    parts = _threaded_map(lambda kk: amplitude_scan(sc.barrier, kk), chunks, threads)
    T = np.concatenate([p.T for p in parts])
    R = np.concatenate([p.R for p in parts])
    A = np.concatenate([np.atleast_1d(p.A) for p in parts])
    path = sc.out_dir / f"{sc.name}_transmission_scan.csv"
    _write_csv(path, ["k", "TkRe", "TkIm", "RkRe", "RkIm", "absA2"],
               zip(k, T.real, T.imag, R.real, R.imag, np.abs(A) ** 2))
    return [path], {"n_k": int(k.size)}


def _run_arrival_density(sc: Scenario, threads: int) -> tuple[list[Path], dict]:
    t = sc.task
    n_t = int(t.get("n_t", 1000))
    if "t_min" in t:
        times = np.linspace(t["t_min"], t["t_max"], n_t)
    else:
        from .wavepacket import stationary_phase_time
        t_bar = stationary_phase_time(sc.packet, sc.barrier, sc.detector.position)
        vp = sc.packet.p / math.hypot(sc.packet.p,
                                      sc.barrier.mass if sc.barrier else 1.0)
        span = float(t.get("span_sigmas", 10.0)) * sc.packet.sigma_x / vp
        times = np.linspace(t_bar - span, t_bar + span, n_t)
    dist = arrival_density(times, sc.packet, sc.barrier, sc.detector,
                           rel_tol=float(t.get("rel_tol", 1e-8)))
    path = sc.out_dir / f"{sc.name}_arrival_density.csv"
    dist.write_csv(path)
    sidecar = sc.out_dir / f"{sc.name}_arrival_density.json"
    dist.metadata["config"] = sc.raw
    dist.write_sidecar(sidecar)
    return [path, sidecar], {"quadrature": dist.metadata["quadrature"],
                             "total_mass": dist.total_mass()}


def _run_tunneling_time_scan(sc: Scenario, threads: int) -> tuple[list[Path], dict]:
    t = sc.task
    m = float(t.get("mass", 1.0))
    d = float(t["d"])
    n_p = int(t.get("n_p", 200))
    paths = []

    def scan(v0: float):
        k_hi = tunneling_window(v0, m)[1]
        ps = np.linspace(k_hi * 1e-3, k_hi * (1.0 - 1e-9), n_p)
        taus = [analysis.square_barrier_tunneling_time(p, v0, d, m) for p in ps]
        return ps, np.asarray(taus)

    results = _threaded_map(scan, [float(v) for v in t["v0_values"]], threads)
    for v0, (ps, taus) in zip(t["v0_values"], results):
        path = sc.out_dir / f"{sc.name}_tunneling_time_V0_{float(v0)!r}.csv"
        _write_csv(path, ["p", "tau"], zip(ps, taus))
        paths.append(path)
    return paths, {"n_curves": len(paths), "n_p": n_p}


def _run_resonance_scan(sc: Scenario, threads: int) -> tuple[list[Path], dict]:
    v0, a, r = sc.barrier.as_symmetric_double()
    m = sc.barrier.mass
    t = sc.task
    window = None
    if "k_min" in t or "k_max" in t:
        window = (float(t["k_min"]), float(t["k_max"]))
    ks = analysis.find_resonances(v0, a, r, m, k_window=window)
    profile = sc.barrier
    absT = [abs(piecewise_amplitudes(profile, float(k)).T) for k in ks]
    path = sc.out_dir / f"{sc.name}_resonance_scan.csv"
    _write_csv(path, ["n", "k_n", "absT"],
               ((i, k, t_) for i, (k, t_) in enumerate(zip(ks, absT))))
    return [path], {"n_resonances": int(ks.size)}


def _run_decay_fit(sc: Scenario, threads: int) -> tuple[list[Path], dict]:
    t = sc.task
    v0, a, r = sc.barrier.as_symmetric_double()
    m = sc.barrier.mass
    times, rep = _auto_double_grid(sc, int(t.get("n_peaks", 15)),
                                   int(t.get("samples_per_peak", 12)))
    dist = arrival_density(times, sc.packet, sc.barrier, sc.detector,
                           rel_tol=float(t.get("rel_tol", 1e-7)))
    peaks = analysis.detect_peaks(dist)
    fit = analysis.fit_exponential(dist, (rep.t0 - 0.5 * rep.dt, times[-1]),
                                   on_peaks=True)
    spacing = float(np.mean(np.diff([tp for tp, _ in peaks]))) if len(peaks) > 1 else float("nan")
    first_peak = peaks[0][0] if peaks else float("nan")
    path = sc.out_dir / f"{sc.name}_decay_fit.csv"
    _write_kv_csv(path, [("t0", first_peak), ("dt", spacing),
                         ("gamma_fit", fit.rate), ("gamma_formula", rep.gamma_p),
                         ("r2", fit.r_squared)])
    dens_path = sc.out_dir / f"{sc.name}_decay_fit_density.csv"
    dist.write_csv(dens_path)
    return [path, dens_path], {"quadrature": dist.metadata["quadrature"],
                               "n_peaks_found": len(peaks),
                               "report": rep.to_dict()}


def _run_regime_compare(sc: Scenario, threads: int) -> tuple[list[Path], dict]:
    t = sc.task
    regime = t["regime"]
    v0, a, r = sc.barrier.as_symmetric_double()
    m = sc.barrier.mass
    spec = sc.packet
    L = sc.detector.position
    n_t = int(t.get("n_t", 1500))
    rel_tol = float(t.get("rel_tol", 1e-7))
    rep = analysis.double_barrier_report(spec.p, v0, a, r, m, L=L, x0=spec.x0,
                                         sigma_p=spec.sigma_p)
    vp = spec.p / math.hypot(spec.p, m)
    diagnostics: dict = {"regime": regime, "report": rep.to_dict()}
    substitution = None

    if regime == "peaks":
        n_peaks = int(t.get("n_peaks", 10))
        times = np.linspace(rep.t0 - 2.0 * rep.dt, rep.t0 + (n_peaks + 0.5) * rep.dt,
                            max(n_t, (n_peaks + 3) * 12))
        model = analysis.peak_series_density(times, spec, L, v0, a, r, m)
    elif regime == "continuum":
        trans = 1.0 / (spec.sigma_p * vp)
        t_hi = rep.t0 + float(t.get("decay_spans", 3.0)) / rep.gamma_p
        times = np.linspace(rep.t0 - 4.0 * trans, t_hi, n_t)
        model = analysis.continuum_density(times, spec, L, v0, a, r, m)
    else:
        k0 = t.get("k0")
        if k0 is None:
            res = analysis.find_resonances(v0, a, r, m)
            if res.size == 0:
                raise NumericsError("no resonances inside the tunneling window")
            k0 = float(res[int(np.argmin(np.abs(res - spec.p)))])
        k0 = float(k0)
        gamma_k0 = analysis.decay_rate(k0, v0, a, r, m)
        trans = 1.0 / (spec.sigma_p * vp)
        t_hi = rep.t0 + float(t.get("decay_spans", 2.5)) / gamma_k0
        times = np.linspace(rep.t0 - 3.0 * trans, t_hi, n_t)
        model = analysis.resonance_density(times, spec, L, k0, v0, a, r, m)
        diagnostics["k0"] = k0
        diagnostics["gamma_k0"] = gamma_k0
        if t.get("substitute_lorentzian", True):
            from .analysis import _single_barrier_phase
            v_k0 = k0 / math.hypot(k0, m)

            def substitution(k, _k0=k0, _g=gamma_k0, _vk0=v_k0):
                phi = _single_barrier_phase(k, v0, a, m)
                return np.exp(2j * phi) / (1 - 1j * (2 * _vk0 / _g) * (k - _k0))

    direct = arrival_density(times, spec, sc.barrier, sc.detector, rel_tol=rel_tol,
                             detection_amplitude=substitution)
    peak = float(np.max(direct.density))
    floor = 1e-12 * peak
    rel = np.abs(direct.density - model.density) / np.maximum(direct.density, floor)
    ts_path = sc.out_dir / f"{sc.name}_regime_compare.csv"
    _write_csv(ts_path, ["t", "P_direct", "P_model", "rel_diff"],
               zip(times, direct.density, model.density, rel))

    pairs = [("t0_formula", rep.t0), ("dt_formula", rep.dt),
             ("gamma_formula", rep.gamma_p),
             ("t0_direct", times[int(np.argmax(direct.density))]),
             ("t0_model", times[int(np.argmax(model.density))])]
    if regime == "peaks":
        for label, dist in (("direct", direct), ("model", model)):
            pk = analysis.detect_peaks(dist)
            if len(pk) >= 4:
                pairs.append((f"dt_{label}", float(np.mean(np.diff([x for x, _ in pk])))))
                fit = analysis.fit_exponential(dist, (rep.t0 - 0.5 * rep.dt, times[-1]),
                                               on_peaks=True)
                pairs += [(f"gamma_{label}", fit.rate), (f"r2_{label}", fit.r_squared)]
    else:
        gamma_ref = diagnostics.get("gamma_k0", rep.gamma_p)
        trans = 1.0 / (spec.sigma_p * vp)
        # past the transient, but leave a usable stretch of tail to fit
        start = rep.t0 + min(8.0 * trans, 0.4 * (float(times[-1]) - rep.t0))
        window = (start, float(times[-1]))
        for label, dist in (("direct", direct), ("model", model)):
            fit = analysis.fit_exponential(dist, window)
            pairs += [(f"gamma_{label}", fit.rate), (f"r2_{label}", fit.r_squared)]
        pairs.append(("gamma_reference", gamma_ref))
    sm_path = sc.out_dir / f"{sc.name}_regime_summary.csv"
    _write_kv_csv(sm_path, pairs)
    diagnostics["quadrature"] = direct.metadata["quadrature"]
    return [ts_path, sm_path], diagnostics


_RUNNERS = {
    "transmission-scan": _run_transmission_scan,
    "arrival-density": _run_arrival_density,
    "tunneling-time-scan": _run_tunneling_time_scan,
    "resonance-scan": _run_resonance_scan,
    "decay-fit": _run_decay_fit,
    "regime-compare": _run_regime_compare,
}


# ---------------------------------------------------------------------------
# entry points


def run_scenario(sc: Scenario, threads: int = 1) -> dict:
    """Execute one scenario; returns the manifest dict (also written to disk)."""
    sc.out_dir.mkdir(parents=True, exist_ok=True)
    captured: list[dict] = []
    start = time.perf_counter()
    with warnings.catch_warnings(record=True) as wrec:
        warnings.simplefilter("always")
        artifacts, diagnostics = _RUNNERS[sc.task["kind"]](sc, threads)
        for w in wrec:
            if isinstance(w.message, RegimeWarning):
                captured.append(w.message.payload())
            else:
                captured.append({"code": "generic", "message": str(w.message),
                                 "context": {}})
    elapsed = time.perf_counter() - start
    manifest = {
        "name": sc.name,
        "tunnelkit_version": __version__,
        "config": sc.raw,
        "task": sc.task["kind"],
        "artifacts": [p.name for p in artifacts],
        "timings": {"total_s": elapsed},
        "diagnostics": diagnostics,
        "warnings": captured,
    }
    manifest_path = sc.out_dir / f"{sc.name}_manifest.json"
    with open(manifest_path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True, default=_json_default)
        f.write("\n")
    return manifest


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}", path=path) from exc


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="tunnelkit",
        description="Arrival-time densities for relativistic tunneling "
                    "(all quantities in particle-mass units)")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a scenario config")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None, help="output directory override")
    p_run.add_argument("--threads", type=int, default=1)
    p_val = sub.add_parser("validate", help="schema-check a scenario config")
    p_val.add_argument("config")
    args = parser.parse_args(argv)

    try:
        config = _load_config(args.config)
        scenario = parse_scenario(config,
                                  out_override=getattr(args, "out", None))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3

    if args.command == "validate":
        print(f"ok: {scenario.name} ({scenario.task['kind']})")
        return 0

    try:
        manifest = run_scenario(scenario, threads=max(1, args.threads))
    except (NumericsError, PhysicsDomainError, TunnelKitError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {len(manifest['artifacts'])} artifacts + manifest to "
          f"{scenario.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
