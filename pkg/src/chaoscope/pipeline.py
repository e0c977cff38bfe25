"""Run configuration, eigen-decomposition caching, parameter sweeps, and
dataset persistence behind the command line."""

from __future__ import annotations

import hashlib
import json
import os
import struct
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dynamics, stats, unfolding
from .models import Model, ModelParams, Sector, build_hamiltonian, build_liouvillian, \
    critical_couplings, liouvillian_weak_parity_block, parity_project, \
    tc_sector_hamiltonian
from .spectra import ComplexSpectrum, RealSpectrum, central_window, \
    convergence_filter, eig_general, eig_symmetric, exclude_zero_modes, \
    liouvillian_window

ARTIFACT_VERSION = 1

INDICATORS = ("nnsd", "eta", "rk", "csr", "sff", "dsff", "dspf")

WORKER_ENV = "CHAOSCOPE_MAX_WORKERS"


class ConfigError(ValueError):
    pass


class ResourceCapError(MemoryError):
    pass


def _floats(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(",", " ").split()]


def _ints(text: str) -> list[int]:
    return [int(tok) for tok in text.replace(",", " ").split()]


@dataclass
class RunConfig:
    """Resolved configuration for one run or sweep."""

    model: Model
    omega: float
    omega0: float
    g_values: list[float]
    gamma_values: list[float]
    j: float
    cutoffs: list[int]
    sector: Sector
    q_max: int
    open_system: bool
    indicators: list[str]
    k_values: list[int]
    bins: int = 40
    convergence_tol: float | None = None
    window_fraction: float = 0.6
    alpha: float = 0.5
    exclude_zero_mode: bool = True
    degree: int = 10
    sigma_factor: float = 4.5
    t_min: float = 1e-2
    t_max: float = 1e4
    t_points: int = 2000
    win: float = 0.5
    phi: float = 3 * np.pi / 4
    dphi: float = np.pi / 16
    n_phi: int = 8
    beta: float = 0.0
    n_traj: int = 100
    seed: int = 0
    workers: int = 1
    output_dir: Path = Path("chaoscope_out")
    cache_dir: Path | None = None

    def __post_init__(self):
        if not self.indicators:
            raise ConfigError("indicators: at least one indicator is required")
        for ind in self.indicators:
            if ind not in INDICATORS:
                raise ConfigError(f"indicators: unknown indicator {ind!r}")
        if not self.g_values:
            raise ConfigError("g: list must be non-empty")
        if self.cutoffs != sorted(self.cutoffs):
            raise ConfigError("cutoffs: list must be ascending")
        if self.cache_dir is None:
            self.cache_dir = Path(self.output_dir) / "cache"
        cap = os.environ.get(WORKER_ENV)
        if cap:
            self.workers = min(self.workers, int(cap))

    def params(self, g: float, gamma: float) -> ModelParams:
        return ModelParams(self.omega, self.omega0, g, self.j,
                           self.cutoffs[-1], gamma=gamma, model=self.model,
                           sector=self.sector)


def load_config(path) -> RunConfig:
    """Parse the flat key = value config file."""
    import configparser

    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    read = cp.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")

    def get(section, key, default=None):
        if cp.has_option(section, key):
            return cp.get(section, key)
        return default

    try:
        model = Model(get("model", "kind", "dicke"))
        sector = Sector(get("model", "sector", "full"))
        open_system = get("model", "open", "false").lower() in ("1", "true", "yes")
        gammas = _floats(get("model", "gamma", "0"))
        if open_system and any(g <= 0 for g in gammas):
            raise ConfigError("gamma: open runs need gamma > 0")
        g_values = _floats(get("model", "g", ""))
        g_scale = get("model", "g_scale", "none")
        omega = float(get("model", "omega", "1"))
        omega0 = float(get("model", "omega0", "1"))
        j = float(get("model", "j", "1"))
        cfg = RunConfig(
            model=model,
            omega=omega,
            omega0=omega0,
            g_values=g_values,
            gamma_values=gammas,
            j=j,
            cutoffs=_ints(get("model", "cutoffs", "20")),
            sector=sector,
            q_max=int(get("model", "q_max", "300")),
            open_system=open_system,
            indicators=[tok.strip() for tok in
                        get("indicators", "indicators", "").replace(",", " ").split()],
            k_values=_ints(get("indicators", "k", "1")),
            bins=int(get("indicators", "bins", "40")),
            convergence_tol=(float(get("spectra", "convergence_tol"))
                             if get("spectra", "convergence_tol") else None),
            window_fraction=float(get("spectra", "window_fraction", "0.6")),
            alpha=float(get("spectra", "alpha", "0.5")),
            exclude_zero_mode=get("spectra", "exclude_zero_mode",
                                  "true").lower() in ("1", "true", "yes"),
            degree=int(get("unfolding", "degree", "10")),
            sigma_factor=float(get("unfolding", "sigma_factor", "4.5")),
            t_min=float(get("time", "t_min", "1e-2")),
            t_max=float(get("time", "t_max", "1e4")),
            t_points=int(get("time", "t_points", "2000")),
            win=float(get("time", "win", "0.5")),
            phi=float(get("time", "phi", repr(3 * np.pi / 4))),
            dphi=float(get("time", "dphi", repr(np.pi / 16))),
            n_phi=int(get("time", "n_phi", "8")),
            beta=float(get("run", "beta", "0")),
            n_traj=int(get("run", "n_traj", "100")),
            seed=int(get("run", "seed", "0")),
            workers=int(get("run", "workers", "1")),
            output_dir=Path(get("run", "output_dir", "chaoscope_out")),
        )
        if g_scale not in ("none", "gc", "gcgamma"):
            raise ConfigError("g_scale: must be none, gc, or gcgamma")
        cfg._g_scale = g_scale
        return cfg
    except ConfigError:
        raise
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc


def resolved_g(cfg: RunConfig, g_in: float, gamma: float) -> float:
    scale = getattr(cfg, "_g_scale", "none")
    if scale == "none":
        return g_in
    gc, gcg = critical_couplings(
        ModelParams(cfg.omega, cfg.omega0, 0.0, cfg.j, cfg.cutoffs[-1],
                    gamma=gamma, model=cfg.model))
    return g_in * (gc if scale == "gc" else gcg)


# ---------------------------------------------------------------------------
# Spectrum cache: one-line JSON header + raw little-endian float64 payload.


def cache_key(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:32]


def cache_store(path: Path, values: np.ndarray, header: dict):
    arr = np.asarray(values)
    is_complex = np.iscomplexobj(arr)
    flat = (np.column_stack([arr.real, arr.imag]).ravel() if is_complex
            else arr.astype(float))
    head = dict(header)
    head.update(count=int(arr.size), complex=bool(is_complex))
    blob = json.dumps(head, sort_keys=True).encode() + b"\n"
    payload = struct.pack(f"<{flat.size}d", *flat.tolist())
    tmp = path.with_suffix(path.suffix + f".tmp{os.getpid()}")
    with open(tmp, "wb") as f:
        f.write(blob)
        f.write(payload)
    os.replace(tmp, path)


def cache_load(path: Path):
    with open(path, "rb") as f:
        head = json.loads(f.readline().decode())
        raw = np.frombuffer(f.read(), dtype="<f8")
    if head["complex"]:
        raw = raw.reshape(-1, 2)
        return raw[:, 0] + 1j * raw[:, 1], head
    return raw.copy(), head


@dataclass
class SolveTask:
    """One eigensolve: a parameter point at one cutoff."""

    omega: float
    omega0: float
    g: float
    gamma: float
    j: float
    cutoff: int
    model: str
    sector: str
    open_system: bool
    q_max: int
    cache_dir: str

    def key_payload(self) -> dict:
        d = {k: getattr(self, k) for k in
             ("omega", "omega0", "g", "gamma", "j", "cutoff", "model",
              "sector", "open_system")}
        if self.model == Model.TAVIS_CUMMINGS.value and not self.open_system:
            d["q_max"] = self.q_max
        return d

    def cache_path(self) -> Path:
        return Path(self.cache_dir) / (cache_key(self.key_payload()) + ".spec")


def solve_task(task: SolveTask) -> bool:
    """Compute one spectrum into the cache.  Returns True on a cache hit."""
    path = task.cache_path()
    if path.exists():
        return True
    path.parent.mkdir(parents=True, exist_ok=True)
    mp = ModelParams(task.omega, task.omega0, task.g, task.j, task.cutoff,
                     gamma=task.gamma, model=Model(task.model))
    if task.open_system:
        liou = build_liouvillian(mp)
        if task.sector in (Sector.EVEN.value, Sector.ODD.value):
            # weak-parity block: spacing statistics are only meaningful
            # within one symmetry sector of the superoperator
            liou = liouvillian_weak_parity_block(liou, Sector(task.sector))
        vals = eig_general(liou).points
    elif mp.model is Model.TAVIS_CUMMINGS:
        blocks = [eig_symmetric(tc_sector_hamiltonian(mp, q)).levels
                  for q in range(task.q_max + 1)]
        vals = np.sort(np.concatenate(blocks))
    else:
        h = build_hamiltonian(mp)
        if task.sector in (Sector.EVEN.value, Sector.ODD.value):
            h = parity_project(h, Sector(task.sector))
        vals = eig_symmetric(h).levels
    cache_store(path, vals, task.key_payload())
    return False


def point_tasks(cfg: RunConfig, g: float, gamma: float) -> list[SolveTask]:
    cutoffs = cfg.cutoffs
    if cfg.model is Model.TAVIS_CUMMINGS and not cfg.open_system:
        cutoffs = cutoffs[-1:]  # sector assembly carries no cutoff error
    return [SolveTask(cfg.omega, cfg.omega0, g, gamma, cfg.j, m,
                      cfg.model.value, cfg.sector.value, cfg.open_system,
                      cfg.q_max, str(cfg.cache_dir))
            for m in cutoffs]


def load_point_spectrum(cfg: RunConfig, g: float, gamma: float):
    """Assemble the converged, windowed spectrum of one parameter point
    from cached eigensolves."""
    tasks = point_tasks(cfg, g, gamma)
    spectra = []
    for t in tasks:
        vals, head = cache_load(t.cache_path())
        meta = {"g": g, "gamma": gamma, "cutoff": t.cutoff}
        spectra.append(ComplexSpectrum(vals, meta) if head["complex"]
                       else RealSpectrum(vals.real, meta))
    if len(spectra) > 1:
        tol = cfg.convergence_tol
        if tol is None:
            tol = 1e-4 * gamma if cfg.open_system else 1e-6
        spec = convergence_filter(spectra, tol)
    else:
        spec = spectra[-1]
    if cfg.open_system:
        spec = liouvillian_window(spec, cfg.alpha, gamma, cfg.cutoffs[-1])
        if cfg.exclude_zero_mode:
            spec = exclude_zero_modes(spec)
    else:
        spec = central_window(spec, cfg.window_fraction)
    return spec


# ---------------------------------------------------------------------------
# CSV + manifest output


def _write_csv(path: Path, header: list[str], rows):
    with open(path, "w", newline="") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(x) for x in row) + "\n")


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float) or isinstance(x, np.floating):
        return repr(float(x))
    return str(x)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _grid(cfg: RunConfig) -> np.ndarray:
    return dynamics.log_time_grid(cfg.t_min, cfg.t_max, cfg.t_points)


def _point_dir(cfg: RunConfig, g_in: float, gamma: float) -> Path:
    d = Path(cfg.output_dir) / f"gamma_{gamma:g}" / f"g_{g_in:g}"
    d.mkdir(parents=True, exist_ok=True)
    return d


def run_point_indicators(cfg: RunConfig, g_in: float, gamma: float) -> dict:
    """All requested indicators for one (g, gamma) point; returns a result
    record with output files and headline numbers."""
    g = resolved_g(cfg, g_in, gamma)
    spec = load_point_spectrum(cfg, g, gamma)
    out = _point_dir(cfg, g_in, gamma)
    files = []
    record = {"g_input": g_in, "g": g, "gamma": gamma, "kept": spec.count}
    mp0 = ModelParams(cfg.omega, cfg.omega0, max(g, 0.0), cfg.j,
                      cfg.cutoffs[-1], gamma=gamma, model=cfg.model)
    gc, gcg = critical_couplings(mp0)
    record["g_over_gc"] = g / gc
    if gcg:
        record["g_over_gcgamma"] = g / gcg

    hist = None
    if "nnsd" in cfg.indicators or "eta" in cfg.indicators:
        if cfg.open_system:
            u = unfolding.rescale_complex_spacings(spec, cfg.sigma_factor)
        else:
            u = unfolding.unfold_real(spec, cfg.degree)
        hist = stats.nnsd(u, cfg.bins)
        p = out / "nnsd.csv"
        _write_csv(p, ["bin_center", "pdf"], zip(hist.centers, hist.pdf))
        files.append(p)
    if "eta" in cfg.indicators:
        kind = stats.GINUE if cfg.open_system else stats.GOE
        record["eta"] = stats.eta(hist, kind)
        p = out / "eta.csv"
        _write_csv(p, ["g", "eta", "bins"], [(g, record["eta"], cfg.bins)])
        files.append(p)
    if "rk" in cfg.indicators:
        rows = []
        for k in cfg.k_values:
            r = stats.spacing_ratio_k(spec, k)
            rows.append((k, r.r_mean, r.r_sem, r.count))
        record["rk"] = {k: row[1] for k, row in zip(cfg.k_values, rows)}
        p = out / "ratios.csv"
        _write_csv(p, ["k", "r_mean", "r_sem", "count"], rows)
        files.append(p)
    if "csr" in cfg.indicators:
        r = stats.complex_spacing_ratio(spec)
        record["csr"] = {"r_mean": r.r_mean, "cos_mean": r.cos_mean}
        p = out / "csr.csv"
        _write_csv(p, ["r_mean", "cos_mean", "count"],
                   [(r.r_mean, r.cos_mean, r.count)])
        files.append(p)
    if "sff" in cfg.indicators:
        u = unfolding.unfold_real(spec, cfg.degree)
        curve = dynamics.moving_average(dynamics.sff(u, _grid(cfg)), cfg.win)
        p = out / "sff.csv"
        _write_csv(p, ["t", "raw", "smoothed"],
                   zip(curve.abscissa, curve.raw, curve.smoothed))
        files.append(p)
    if "dsff" in cfg.indicators:
        u = unfolding.power_map_unfold(spec)
        curve = dynamics.dsff(u, _grid(cfg), cfg.phi, cfg.dphi, cfg.n_phi)
        p = out / "dsff.csv"
        _write_csv(p, ["tau", "value"], zip(curve.abscissa, curve.raw))
        files.append(p)
    if "dspf" in cfg.indicators:
        curve = dynamics.dspf(mp0, cfg.beta, _grid(cfg), n_traj=cfg.n_traj,
                              seed=cfg.seed)
        sem = curve.sem if curve.sem is not None else np.zeros_like(curve.raw)
        p = out / "dspf.csv"
        _write_csv(p, ["t", "mean", "sem"], zip(curve.abscissa, curve.raw, sem))
        files.append(p)
        meta_p = out / "dspf.meta.json"
        with open(meta_p, "w") as f:
            json.dump({"beta": cfg.beta, "gamma": gamma, "n_traj": cfg.n_traj,
                       "seed": cfg.seed, "backend": curve.meta.get("backend")},
                      f, indent=1, sort_keys=True)
        files.append(meta_p)
    record["files"] = [str(f) for f in files]
    return record


def execute(cfg: RunConfig, aggregate: bool = False) -> dict:
    """Run the pipeline; with ``aggregate`` also emit sweep scan files.

    Eigensolves for all (g, gamma, cutoff) points run in the worker pool;
    indicator evaluation and aggregation are single-threaded and
    order-fixed, so outputs do not depend on the worker count.
    """
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    Path(cfg.cache_dir).mkdir(parents=True, exist_ok=True)

    tasks = []
    for gamma in cfg.gamma_values:
        for g_in in cfg.g_values:
            tasks.extend(point_tasks(cfg, resolved_g(cfg, g_in, gamma), gamma))
    t0 = time.time()
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            hits = list(pool.map(solve_task, tasks))
    else:
        hits = [solve_task(t) for t in tasks]
    solve_wall = time.time() - t0

    records = []
    failures = []
    for gamma in cfg.gamma_values:
        for g_in in cfg.g_values:
            t0 = time.time()
            try:
                rec = run_point_indicators(cfg, g_in, gamma)
                rec["wall_time"] = time.time() - t0
                records.append(rec)
            except (ValueError, RuntimeError, FloatingPointError) as exc:
                failures.append({"g_input": g_in, "gamma": gamma,
                                 "error": str(exc)})

    scan_files = []
    if aggregate:
        scan_files = _write_scans(cfg, records)

    manifest = {
        "artifact_version": ARTIFACT_VERSION,
        "config": _config_dict(cfg),
        "eigensolves": {"total": len(tasks), "cache_hits": int(sum(hits)),
                        "wall_time": solve_wall},
        "points": records,
        "failures": failures,
        "hashes": {},
    }
    all_files = [f for rec in records for f in rec["files"]] + \
        [str(f) for f in scan_files]
    for f in all_files:
        manifest["hashes"][os.path.relpath(f, out_dir)] = _sha256(Path(f))
    mpath = out_dir / "manifest.json"
    with open(mpath, "w") as f:
        json.dump(manifest, f, indent=1, sort_keys=True)
    return manifest


def _write_scans(cfg: RunConfig, records: list[dict]) -> list[Path]:
    out_dir = Path(cfg.output_dir)
    files = []
    if "eta" in cfg.indicators and not cfg.open_system:
        p = out_dir / "eta_scan.csv"
        _write_csv(p, ["g_over_gc", "eta"],
                   [(r["g_over_gc"], r["eta"]) for r in records if "eta" in r])
        files.append(p)
    if "rk" in cfg.indicators:
        p = out_dir / "rk_scan.csv"
        rows = [(r["g"], k, v) for r in records if "rk" in r
                for k, v in r["rk"].items()]
        _write_csv(p, ["g", "k", "r_mean"], rows)
        files.append(p)
    if "csr" in cfg.indicators:
        for gamma in cfg.gamma_values:
            p = out_dir / (f"csr_scan_gamma_{gamma:g}.csv"
                           if len(cfg.gamma_values) > 1 else "csr_scan.csv")
            rows = [(r["g_over_gcgamma"], r["csr"]["r_mean"], r["csr"]["cos_mean"])
                    for r in records if "csr" in r and r["gamma"] == gamma]
            _write_csv(p, ["g_over_gcgamma", "r_mean", "cos_mean"], rows)
            files.append(p)
    if "eta" in cfg.indicators and cfg.open_system:
        for gamma in cfg.gamma_values:
            p = out_dir / (f"eta_scan_gamma_{gamma:g}.csv"
                           if len(cfg.gamma_values) > 1 else "eta_scan.csv")
            rows = [(r["g_over_gcgamma"], r["eta"]) for r in records
                    if "eta" in r and r["gamma"] == gamma]
            _write_csv(p, ["g_over_gcgamma", "eta"], rows)
            files.append(p)
    return files


def _config_dict(cfg: RunConfig) -> dict:
    d = {}
    for k, v in vars(cfg).items():
        if isinstance(v, Path):
            d[k] = str(v)
        elif isinstance(v, (Model, Sector)):
            d[k] = v.value
        else:
            d[k] = v
    d["g_scale"] = getattr(cfg, "_g_scale", "none")
    return d


def report(run_dir) -> dict:
    """Condense a run directory's manifest into headline statistics."""
    mpath = Path(run_dir) / "manifest.json"
    if not mpath.exists():
        raise FileNotFoundError(f"no manifest.json under {run_dir}")
    with open(mpath) as f:
        manifest = json.load(f)
    summary = {
        "artifact_version": manifest["artifact_version"],
        "n_points": len(manifest["points"]),
        "n_failures": len(manifest["failures"]),
        "points": [],
    }
    for rec in manifest["points"]:
        entry = {k: rec[k] for k in ("g", "gamma", "kept") if k in rec}
        for k in ("eta", "rk", "csr", "g_over_gc", "g_over_gcgamma"):
            if k in rec:
                entry[k] = rec[k]
        summary["points"].append(entry)
    return summary
