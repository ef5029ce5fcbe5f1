"""Femto-UE outage probability: closed form over fading draws, and direct
Monte Carlo.

The SIR uses interference only (no noise term).  Conditional on one draw of
the interferer fading, the outage probability has the closed form
1 - exp(-gamma * (I_f + I_m) / s_bar) because the desired fast fading Z_0 is
unit-mean exponential; ``estimate`` reports its Monte Carlo average over the
interferer fading as ``p_out_closed`` and a full Monte Carlo count (drawing
Z_0 too) as ``p_out_mc``.

Trials are split over a fixed number of shards with independent RNG streams
spawned from the seed, and shard results are merged in index order, so the
result is bit-identical for a given (seed, shard count) no matter how many
workers execute the shards.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import son
from .channel import PropagationParams, link_coefficients
from .spectrum import Band, FrequencyPlan, Scheme, UeRegion, base_allocation, build_plan
from .topology import (
    Deployment,
    DeploymentParams,
    Fap,
    NeighborGraph,
    Scenario,
    apply_plan,
    generate,
    neighbor_graph,
)

__all__ = [
    "OutageConfig",
    "OutageEstimate",
    "SweepRow",
    "conditional_outage",
    "density_sweep",
    "estimate",
    "sweep_csv_lines",
]

SWEEP_CSV_COLUMNS = "scheme,density,p_out_closed,p_out_mc,ci95,n_trials,seed"


@dataclass(frozen=True)
class OutageConfig:
    gamma_db: float = 9.0
    n_trials: int = 100_000
    ue_distance: float = 5.0  # m, UE to serving FAP
    ue_region: UeRegion = UeRegion.EDGE
    n_shards: int = 16
    ue_direction: str = "nearest"  # "nearest" (worst case) or "random"

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")
        if not math.isfinite(self.gamma_db):
            raise ValueError("gamma_db must be finite")
        if self.ue_distance <= 0:
            raise ValueError("ue_distance must be positive")
        if self.n_shards < 1:
            raise ValueError("n_shards must be >= 1")
        if self.ue_direction not in ("nearest", "random"):
            raise ValueError(f"unknown ue_direction {self.ue_direction!r}")

    @property
    def gamma_linear(self) -> float:
        return 10 ** (self.gamma_db / 10.0)


@dataclass(frozen=True)
class OutageEstimate:
    p_out_closed: float
    p_out_mc: float
    ci95_halfwidth: float  # 1.96 * sqrt(p_mc (1 - p_mc) / n)
    n_trials: int
    closed_form_se: float = 0.0  # standard error of the closed-form average


def conditional_outage(s_bar, total_interference, gamma_linear):
    """Outage probability conditional on the interference level:
    1 - exp(-gamma * I / s_bar).  Accepts scalars or arrays of I."""
    if s_bar <= 0:
        raise ValueError("s_bar must be positive")
    if gamma_linear <= 0:
        raise ValueError("gamma_linear must be positive")
    i = np.asarray(total_interference, dtype=float)
    if np.any(i < 0):
        raise ValueError("interference must be non-negative")
    p = -np.expm1(-gamma_linear * i / s_bar)
    return float(p) if p.ndim == 0 else p


def nearest_fap_angle(deployment: Deployment, ref) -> float:
    """Direction from the reference FAP toward its nearest other FAP (the
    worst-case UE bearing); 0 when there is no other FAP."""
    best, best_d = None, math.inf
    for f in deployment.faps:
        if f.id == ref.id:
            continue
        d = float(np.linalg.norm(f.position - ref.position))
        if d < best_d or (d == best_d and (best is None or f.id < best.id)):
            best, best_d = f, d
    if best is None:
        return 0.0
    delta = best.position - ref.position
    return math.atan2(delta[1], delta[0])


def _ue_position(deployment, ref, distance, direction, rng, angle=None) -> np.ndarray:
    """UE at ``distance`` from the serving FAP; by default on the ray toward
    the nearest other FAP (worst case)."""
    if angle is None:
        if direction == "random":
            angle = rng.uniform(0.0, 2.0 * math.pi)
        else:
            angle = nearest_fap_angle(deployment, ref)
    return ref.position + distance * np.array([math.cos(angle), math.sin(angle)])


def _run_shard(seed_seq, m, coeffs, macro_coeff, s_bar, gamma_linear):
    """One shard of trials; returns (sum p_t, sum p_t^2, outage count)."""
    rng = np.random.default_rng(seed_seq)
    k = len(coeffs)
    xi = rng.exponential(size=(m, k))
    z = rng.exponential(size=(m, k))
    xi_m = rng.exponential(size=m)
    z_m = rng.exponential(size=m)
    z0 = rng.exponential(size=m)
    i_total = (xi * z) @ coeffs + macro_coeff * xi_m * z_m
    p = conditional_outage(s_bar, i_total, gamma_linear)
    outages = int(np.count_nonzero(z0 < gamma_linear * i_total / s_bar))
    return float(p.sum()), float((p * p).sum()), outages


def estimate(
    deployment: Deployment,
    reference_fap: int,
    plan: FrequencyPlan,
    config: OutageConfig,
    params: PropagationParams,
    seed: int,
    n_workers: int = 1,
    ue_angle: float | None = None,
) -> OutageEstimate:
    """Estimate the outage probability of a UE of the reference FAP.

    ``p_out_closed`` averages the conditional closed form over fresh
    interferer-fading draws; ``p_out_mc`` additionally draws Z_0 each trial
    and counts SIR < gamma events.  Both use the same interference draws, so
    they agree within Monte Carlo noise by construction.  ``ue_angle``
    overrides the UE bearing (the density sweep pins it across snapshots of a
    growing network).
    """
    ref = deployment.fap_by_id(reference_fap)
    if config.ue_distance > ref.radius:
        raise ValueError(
            f"ue_distance {config.ue_distance} m exceeds the femto radius {ref.radius} m"
        )
    root = np.random.SeedSequence(seed)
    dir_seq, *shard_seqs = root.spawn(config.n_shards + 1)
    ue = _ue_position(
        deployment, ref, config.ue_distance, config.ue_direction,
        np.random.default_rng(dir_seq), angle=ue_angle,
    )
    _, coeffs, macro_coeff, s_bar = link_coefficients(
        deployment, ref, ue, plan, config.ue_region, params
    )

    n = config.n_trials
    base, extra = divmod(n, config.n_shards)
    sizes = [base + (1 if i < extra else 0) for i in range(config.n_shards)]
    gamma = config.gamma_linear

    def task(i):
        return _run_shard(shard_seqs[i], sizes[i], coeffs, macro_coeff, s_bar, gamma)

    indices = [i for i in range(config.n_shards) if sizes[i] > 0]
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(task, indices))
    else:
        results = [task(i) for i in indices]

    # fixed shard-merge order regardless of worker scheduling
    sum_p = 0.0
    sum_p2 = 0.0
    outages = 0
    for s, s2, c in results:
        sum_p += s
        sum_p2 += s2
        outages += c

    p_closed = sum_p / n
    var_p = max(sum_p2 / n - p_closed * p_closed, 0.0)
    closed_se = math.sqrt(var_p / n)
    p_mc = outages / n
    ci95 = 1.96 * math.sqrt(p_mc * (1.0 - p_mc) / n)
    return OutageEstimate(
        p_out_closed=p_closed,
        p_out_mc=p_mc,
        ci95_halfwidth=ci95,
        n_trials=n,
        closed_form_se=closed_se,
    )


@dataclass(frozen=True)
class SweepRow:
    scheme: Scheme
    density: int  # FAP count inside the macro disc
    estimate: OutageEstimate
    seed: int
    variant: str = ""  # e.g. a coloring mode in the SON ablation

    @property
    def label(self) -> str:
        return f"{self.scheme.value}:{self.variant}" if self.variant else self.scheme.value


def _seed_int(seed_seq: np.random.SeedSequence) -> int:
    return int(seed_seq.generate_state(1)[0])


def prepare_deployment(
    scheme: Scheme,
    plan: FrequencyPlan,
    dep_params: DeploymentParams,
    seed: int,
) -> Deployment:
    """Generate a dense deployment and configure allocations for one scheme
    (SON edge coloring runs only for dynamic re-use)."""
    dep = generate(Scenario.D, dep_params, seed)
    apply_plan(dep, plan)
    if scheme is Scheme.DYNAMIC_REUSE:
        graph = neighbor_graph(dep, dep_params.neighbor_radius_m)
        son.configure_frequencies(dep, graph, plan)
    return dep


def density_sweep(
    densities: list[int],
    schemes: list[Scheme],
    config: OutageConfig,
    params: PropagationParams,
    seed: int,
    dep_params: DeploymentParams = DeploymentParams(),
    total_band: Band = Band(0, 60_000_000),
    femto_fraction: float = 1.0 / 3.0,
    edge_split: float = 0.5,
    n_workers: int = 1,
) -> list[SweepRow]:
    """Outage estimates over a grid of FAP densities and allocation schemes.

    Each scheme's column is one network densifying in place: positions come
    from a single placement stream (lower densities are prefixes of higher
    ones), the dynamic scheme bootstraps its edge coloring at the lowest
    density and admits later FAPs through the SON admission path (existing
    colors never change), and the UE bearing is fixed once against the full
    final deployment.  Interferers therefore only accumulate as density
    grows, and schemes at one density share geometry and trial seeds (paired
    comparison).  Row order: densities outer (as given), schemes inner.
    """
    if not densities:
        raise ValueError("densities must be non-empty")
    if any(b <= a for a, b in zip(densities, densities[1:])):
        raise ValueError("densities must be strictly increasing")
    plans = {
        s: build_plan(
            s,
            total_band,
            dep_params.n_sectors,
            femto_fraction=femto_fraction if s in (Scheme.DEDICATED, Scheme.PARTIAL) else None,
            edge_split=edge_split,
        )
        for s in schemes
    }
    root = np.random.SeedSequence(seed)
    dep_seq, dir_seq, *trial_seqs = root.spawn(2 + len(densities))
    dep_seed = _seed_int(dep_seq)
    # the dense-threshold check is waived inside a sweep: low densities are the
    # same deployment at an earlier build-out stage
    full_params = replace(dep_params, n_faps=densities[-1], dense_threshold=0)
    full = generate(Scenario.D, full_params, dep_seed)
    ref = full.faps[0]
    if config.ue_direction == "random":
        ue_angle = float(np.random.default_rng(dir_seq).uniform(0.0, 2.0 * math.pi))
    else:
        ue_angle = nearest_fap_angle(full, ref)

    # per-scheme growing network (the snapshots share Fap objects, which is
    # safe because each scheme column owns its deployment)
    chains: dict[Scheme, Deployment] = {}
    for scheme in schemes:
        dp0 = replace(dep_params, n_faps=densities[0], dense_threshold=0)
        dep = Deployment(full.macro, list(full.faps[: densities[0]]), Scenario.D, dep_seed, dp0)
        dep = _copy_faps(dep)
        apply_plan(dep, plans[scheme])
        if scheme is Scheme.DYNAMIC_REUSE:
            graph = neighbor_graph(dep, dep_params.neighbor_radius_m)
            son.configure_frequencies(dep, graph, plans[scheme])
        chains[scheme] = dep

    radius_graph = NeighborGraph(adjacency={}, neighbor_radius=dep_params.neighbor_radius_m)
    rows = []
    prev_density = densities[0]
    for idx, density in enumerate(densities):
        trial_seed = _seed_int(trial_seqs[idx])
        for scheme in schemes:
            dep = chains[scheme]
            for f in full.faps[prev_density:density]:
                if scheme is Scheme.DYNAMIC_REUSE:
                    son.admit_fap(dep, f.position, plans[scheme], radius_graph)
                else:
                    new = Fap(
                        id=f.id, position=f.position.copy(), height=f.height,
                        tx_power=f.tx_power, radius=f.radius, sector_index=f.sector_index,
                    )
                    new.allocation = base_allocation(plans[scheme], new.sector_index)
                    dep.faps.append(new)
            dep.params = replace(dep.params, n_faps=density)
            est = estimate(
                dep, 0, plans[scheme], config, params, trial_seed, n_workers,
                ue_angle=ue_angle,
            )
            rows.append(SweepRow(scheme=scheme, density=density, estimate=est, seed=trial_seed))
        prev_density = density
    return rows


def _copy_faps(dep: Deployment) -> Deployment:
    dep.faps = [
        Fap(
            id=f.id, position=f.position.copy(), height=f.height, tx_power=f.tx_power,
            radius=f.radius, sector_index=f.sector_index, allocation=f.allocation,
        )
        for f in dep.faps
    ]
    return dep


def sweep_csv_lines(rows: list[SweepRow]) -> list[str]:
    """Plot-ready CSV body (no provenance header) for sweep results."""
    lines = [SWEEP_CSV_COLUMNS]
    for row in rows:
        e = row.estimate
        lines.append(
            f"{row.label},{row.density},{e.p_out_closed!r},{e.p_out_mc!r},"
            f"{e.ci95_halfwidth!r},{e.n_trials},{row.seed}"
        )
    return lines
