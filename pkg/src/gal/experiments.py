"""Workflows behind the command line: predict, simulate, compare, sweep, plan."""

from __future__ import annotations

import dataclasses
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import analytic
from .analytic import ProbabilityProfile, SpectralParams
from .core import InitialMoments, SearchInstance, instance_with_last, moments_of
from .distributions import GENERATOR_NAME, DistributionSpec, Kind, generate
from .errors import ToleranceExceeded
from .io import SCHEMA_VERSION, SWEEP_COLUMNS, TRAJECTORY_COLUMNS, InstanceFile, SweepSpec, complex_to_json
from .planner import MeasurementPlan, TwoTimePlan, optimal_measurement_times, robust_two_time_plan
from .statevector import DiffusionMethod, SimConfig, Simulator, global_phase

log = logging.getLogger(__name__)

FIXED_HORIZON = 64
NAN = float("nan")


@dataclass
class RunRecord:
    rows: list[tuple] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "summary": self.summary,
            "columns": list(TRAJECTORY_COLUMNS),
            "rows": [[_json_cell(v) for v in r] for r in self.rows],
        }


def _json_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    return None if math.isnan(v) else v


@dataclass(frozen=True)
class Analysis:
    instance: SearchInstance
    moments: InitialMoments
    spectral: SpectralParams
    profile: ProbabilityProfile


def analyse(instance: SearchInstance, init) -> Analysis:
    moments = moments_of(init, instance)
    spectral = analytic.compute_spectral(instance, moments)
    profile = analytic.probability_profile(instance, moments, spectral)
    return Analysis(instance, moments, spectral, profile)


def default_horizon(spectral: SpectralParams) -> int:
    if not spectral.regime.oscillates:
        return FIXED_HORIZON
    return math.ceil(2 * math.pi / spectral.omega)


def fit_probability_sinusoid(p: np.ndarray, omega: float) -> tuple[float, float]:
    """Least-squares fit of ``A + B cos 2ωt + C sin 2ωt`` to ``p[t]``.

    Returns ``(A, sqrt(B² + C²))``: the mean level and the swing, so the
    continuous peak is their sum.  Only ``ω`` enters, so a trajectory from
    the simulator yields a peak estimate independent of any moment formula.
    """
    t = np.arange(p.size, dtype=float)
    design = np.column_stack([np.ones_like(t), np.cos(2 * omega * t), np.sin(2 * omega * t)])
    (a, b, c), *_ = np.linalg.lstsq(design, p, rcond=None)
    return float(a), float(math.hypot(b, c))


def plan_to_json(plan: MeasurementPlan | TwoTimePlan) -> dict[str, Any]:
    out = dataclasses.asdict(plan)
    if isinstance(plan, MeasurementPlan):
        out["strategy"] = plan.strategy.value
    return out


def summary_of(a: Analysis, spec: DistributionSpec, plan: MeasurementPlan) -> dict[str, Any]:
    sp, pr = a.spectral, a.profile
    return {
        "n": a.instance.n,
        "r": a.instance.r,
        "omega": sp.omega,
        "phi": complex_to_json(sp.phi),
        "alpha": complex_to_json(sp.alpha),
        "f_plus0": complex_to_json(sp.f_plus0),
        "f_minus0": complex_to_json(sp.f_minus0),
        "regime": sp.regime.value,
        "sigma_k_sq": a.moments.sigma_k_sq,
        "sigma_l_sq": a.moments.sigma_l_sq,
        "p_av": pr.p_av,
        "delta_p": pr.delta_p,
        "p_max": pr.p_max,
        "p_min": pr.p_min,
        "period": pr.period,
        "plan": plan_to_json(plan),
        "init_kind": spec.kind.value,
        "seed": int(spec.seed),
        "generator": GENERATOR_NAME,
    }


def _analytic_columns(a: Analysis, t_max: int):
    ts = np.arange(t_max + 1)
    k, l = analytic.mean_trajectory(a.spectral, a.instance, ts)
    k[0], l[0] = a.spectral.k_bar0, a.spectral.l_bar0
    p = analytic.probability_trajectory(a.instance, a.moments, a.spectral, ts, a.profile)
    p[0] = analytic.success_probability(a.instance, a.moments, a.spectral, 0)
    return p, k, l


def _simulate(instance: SearchInstance, init, t_max: int, config: SimConfig, on_step=None):
    sim = Simulator(instance, init, config)
    p = np.empty(t_max + 1)
    k = np.empty(t_max + 1, dtype=complex)
    l = np.empty(t_max + 1, dtype=complex)
    drift = np.empty(t_max + 1)

    def record(t, buf):
        p[t] = sim.marked_probability()
        k[t], l[t] = sim.means()
        drift[t] = sim.norm_drift()
        if on_step is not None:
            on_step(t, buf)

    record(0, sim.buf)
    sim.run(t_max, record)
    return p, k, l, drift, sim


def predict(inst_file: InstanceFile, t_max: int | None = None, j_max: int = 2) -> RunRecord:
    started = time.perf_counter()
    init = generate(inst_file.init, inst_file.instance)
    a = analyse(inst_file.instance, init)
    t_max = default_horizon(a.spectral) if t_max is None else t_max
    p, k, l = _analytic_columns(a, t_max)
    rows = [(t, p[t], NAN, k[t].real, k[t].imag, l[t].real, l[t].imag, NAN, NAN, NAN, NAN, NAN)
            for t in range(t_max + 1)]
    plan = optimal_measurement_times(a.spectral, a.profile, j_max)
    summary = summary_of(a, inst_file.init, plan)
    summary["wall_time"] = time.perf_counter() - started
    return RunRecord(rows, summary)


def simulate(inst_file: InstanceFile, t_max: int | None = None,
             method: DiffusionMethod | str | None = None) -> RunRecord:
    started = time.perf_counter()
    instance = inst_file.instance
    config = inst_file.sim or SimConfig()
    if method is not None:
        config = dataclasses.replace(config, diffusion_method=DiffusionMethod(method))
    config.check(instance.n)
    init = generate(inst_file.init, instance)
    if t_max is None:
        t_max = default_horizon(analytic.compute_spectral(instance, moments_of(init, instance)))
    p, k, l, drift, sim = _simulate(instance, init, t_max, config)
    rows = [(t, NAN, p[t], NAN, NAN, NAN, NAN, k[t].real, k[t].imag, l[t].real, l[t].imag, drift[t])
            for t in range(t_max + 1)]
    summary = {
        "n": instance.n,
        "r": instance.r,
        "method": config.diffusion_method.value,
        "p_best": float(p.max()),
        "t_best": int(p.argmax()),
        "max_norm_drift": float(drift.max()),
        "init_kind": inst_file.init.kind.value,
        "seed": int(inst_file.init.seed),
        "generator": GENERATOR_NAME,
        "wall_time": time.perf_counter() - started,
    }
    return RunRecord(rows, summary)


def compare(inst_file: InstanceFile, t_max: int | None = None, tolerance: float | None = None,
            method: DiffusionMethod | str | None = None, omega_perturbation: float = 0.0,
            raise_on_failure: bool = True) -> RunRecord:
    """Run both engines and report their largest disagreement.

    ``omega_perturbation`` shifts the analytic engine's rotation angle and
    exists only as a negative control for the harness.
    """
    started = time.perf_counter()
    instance = inst_file.instance
    tolerance = inst_file.tol().compare if tolerance is None else tolerance
    config = inst_file.sim or SimConfig()
    if method is not None:
        config = dataclasses.replace(config, diffusion_method=DiffusionMethod(method))
    init = generate(inst_file.init, instance)
    a = analyse(instance, init)
    if omega_perturbation:
        spectral = dataclasses.replace(a.spectral, omega=a.spectral.omega + omega_perturbation)
        a = dataclasses.replace(a, spectral=spectral)
    t_max = default_horizon(a.spectral) if t_max is None else t_max

    p_a, k_a, l_a = _analytic_columns(a, t_max)
    worst_amp = 0.0

    def check_amplitudes(t, buf):
        nonlocal worst_amp
        predicted = analytic.reconstruct_vector(a.moments, instance, k_a[t], l_a[t], t)
        observed = buf
        if config.diffusion_method is DiffusionMethod.WALSH_HADAMARD:
            observed = np.exp(1j * global_phase(predicted, buf)) * buf
        worst_amp = max(worst_amp, float(np.max(np.abs(predicted - observed))))

    p_s, k_s, l_s, drift, _ = _simulate(instance, init, t_max, config, check_amplitudes)
    worst_p = float(np.max(np.abs(p_a - p_s)))
    rows = [(t, p_a[t], p_s[t], k_a[t].real, k_a[t].imag, l_a[t].real, l_a[t].imag,
             k_s[t].real, k_s[t].imag, l_s[t].real, l_s[t].imag, drift[t]) for t in range(t_max + 1)]
    summary = summary_of(a, inst_file.init, optimal_measurement_times(a.spectral, a.profile, 2))
    summary.update({
        "method": config.diffusion_method.value,
        "max_p_divergence": worst_p,
        "max_amplitude_divergence": worst_amp,
        "tolerance": tolerance,
        "passed": max(worst_p, worst_amp) <= tolerance,
        "wall_time": time.perf_counter() - started,
    })
    record = RunRecord(rows, summary)
    if raise_on_failure and not summary["passed"]:
        err = ToleranceExceeded(
            f"engines diverge: max |dP|={worst_p:.3e}, max |da|={worst_amp:.3e} > {tolerance:.1e}")
        err.record = record
        raise err
    return record


def plan(inst_file: InstanceFile, two_time: bool = False, j_max: int = 2) -> dict[str, Any]:
    init = generate(inst_file.init, inst_file.instance)
    a = analyse(inst_file.instance, init)
    if two_time:
        tt = robust_two_time_plan(a.spectral)
        return {"n": a.instance.n, "r": a.instance.r, "omega": a.spectral.omega,
                "strategy": "TwoTime", "two_time": plan_to_json(tt)}
    mp = optimal_measurement_times(a.spectral, a.profile, j_max)
    out = {"n": a.instance.n, "r": a.instance.r, "omega": a.spectral.omega,
           "regime": a.spectral.regime.value, "p_max": a.profile.p_max,
           **plan_to_json(mp)}
    out["two_time"] = plan_to_json(robust_two_time_plan(a.spectral, a.profile))
    return out


# noise sweep -----------------------------------------------------------------

def sweep_cell(n: int, r: int, noise_sigma: float, seed: int) -> tuple[float, float, float, float, int]:
    """One (noise level, seed) cell: ``(σ_l², predicted P_max, fitted peak, best integer P, t*)``."""
    instance = instance_with_last(n, r)
    init = generate(DistributionSpec(Kind.NOISY_UNIFORM, {"noise_sigma": noise_sigma}, seed), instance)
    a = analyse(instance, init)
    horizon = math.ceil(math.pi / a.spectral.omega) + 1
    p, *_ = _simulate(instance, init, horizon, SimConfig())
    p_av, swing = fit_probability_sinusoid(p, a.spectral.omega)
    return a.moments.sigma_l_sq, a.profile.p_max, p_av + swing, float(p.max()), int(p.argmax())


def sweep(spec: SweepSpec, jobs: int = 1) -> list[tuple]:
    """Aggregate one row per noise level, in the order the levels were given.

    A row agrees when the mean fitted peak lies within three standard errors
    of the mean predicted ``P_max``; a 1e-9 floor covers zero-spread levels.
    """
    cells = [(spec.n, spec.r, level, spec.base_seed + i)
             for level in spec.noise_levels for i in range(spec.seeds_per_level)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(sweep_cell, *zip(*cells), chunksize=8))
    else:
        results = [sweep_cell(*c) for c in cells]

    rows = []
    m = spec.seeds_per_level
    for li, level in enumerate(spec.noise_levels):
        block = np.array(results[li * m:(li + 1) * m], dtype=float)
        sig, pred, fitted, best_int, t_star = block.T
        ddof = 1 if m > 1 else 0
        se = fitted.std(ddof=ddof) / math.sqrt(m)
        agree = abs(fitted.mean() - pred.mean()) <= 3 * se + 1e-9
        rows.append((level, m, sig.mean(), sig.std(ddof=ddof), pred.mean(), pred.std(ddof=ddof),
                     fitted.mean(), fitted.std(ddof=ddof), best_int.mean(), t_star.mean(), agree))
        log.info("noise %.3g: P_max %.6f vs fitted %.6f (agree=%s)", level, pred.mean(), fitted.mean(), agree)
    return rows


__all__ = [
    "Analysis",
    "RunRecord",
    "SWEEP_COLUMNS",
    "analyse",
    "compare",
    "fit_probability_sinusoid",
    "plan",
    "predict",
    "simulate",
    "sweep",
    "sweep_cell",
]
