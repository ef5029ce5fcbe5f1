"""Deployment geometry: macro BS, random FAP placement, sectors, neighbor graph.

FAP positions are drawn uniformly over the macro disc by rejection sampling
from the bounding square, which makes the neighbor-count distribution of
interior FAPs converge to Poisson(density * pi * neighbor_radius^2).  The
reference FAP used by outage experiments is always FAP 0, pinned at the
configured distance from the macro BS on the +x axis; all other positions are
random.  Distances are 2-D horizontal; antenna heights only enter the
propagation constants.
"""

from __future__ import annotations

import ast
import io
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .spectrum import EdgeChoice, FemtoAllocation, FrequencyPlan, base_allocation

__all__ = [
    "Deployment",
    "DeploymentParams",
    "Fap",
    "MacroBs",
    "NeighborGraph",
    "PlacementError",
    "Scenario",
    "apply_plan",
    "deployment_from_csv",
    "deployment_to_csv",
    "generate",
    "neighbor_graph",
    "sector_of",
]

TWO_PI = 2.0 * math.pi


class Scenario(Enum):
    A = "A"  # single femtocell, no overlaid macrocell
    B = "B"  # discrete femtocells, pairwise non-neighboring
    C = "C"  # a few interfering femtocells
    D = "D"  # dense femtocells


class PlacementError(RuntimeError):
    """Raised when a scenario's geometric constraints cannot be satisfied."""


@dataclass(frozen=True)
class MacroBs:
    position: np.ndarray  # (2,) meters
    height: float  # m
    tx_power: float  # W
    radius: float  # m
    n_sectors: int

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        if self.radius <= 0 or self.tx_power <= 0:
            raise ValueError("macro radius and tx power must be positive")


@dataclass
class Fap:
    id: int
    position: np.ndarray  # (2,) meters
    height: float  # m
    tx_power: float  # W, mutable via SON
    radius: float  # m, mutable via SON
    sector_index: int
    allocation: FemtoAllocation | None = None

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)


@dataclass(frozen=True)
class NeighborGraph:
    adjacency: dict[int, set[int]]
    neighbor_radius: float

    def degree(self, fap_id: int) -> int:
        return len(self.adjacency[fap_id])

    def edges(self):
        """Undirected edges as (a, b) with a < b."""
        for a, nbrs in self.adjacency.items():
            for b in nbrs:
                if a < b:
                    yield a, b

    @property
    def n_edges(self) -> int:
        return sum(len(n) for n in self.adjacency.values()) // 2

    @property
    def mean_degree(self) -> float:
        n = len(self.adjacency)
        return 2.0 * self.n_edges / n if n else 0.0


@dataclass(frozen=True)
class DeploymentParams:
    """Geometry and radio defaults for one deployment (Table-2 style values)."""

    n_faps: int = 1000
    macro_radius_m: float = 1000.0
    femto_radius_m: float = 10.0
    neighbor_radius_m: float = 100.0
    reference_distance_m: float = 200.0
    macro_tx_power_w: float = 1.5
    fap_tx_power_w: float = 0.01
    macro_height_m: float = 50.0
    fap_height_m: float = 2.0
    n_sectors: int = 3
    dense_threshold: int = 1000  # scenario D minimum FAP count; 0 disables
    c_max_mean_degree: float = 2.0  # scenario C sparsity bound
    max_place_attempts: int = 1000  # per-FAP rejection budget (scenario B)
    max_layout_attempts: int = 200  # whole-layout budget (scenario C)


@dataclass
class Deployment:
    macro: MacroBs | None
    faps: list[Fap]
    scenario: Scenario
    rng_seed: int
    params: DeploymentParams

    def positions(self) -> np.ndarray:
        return np.array([f.position for f in self.faps])

    def fap_by_id(self, fap_id: int) -> Fap:
        for f in self.faps:
            if f.id == fap_id:
                return f
        raise ValueError(f"no FAP with id {fap_id}")


def sector_of(macro: MacroBs, position) -> int:
    """Angular sector index of a position: floor(angle / (2*pi/N))."""
    d = np.asarray(position, dtype=float) - macro.position
    if d[0] == 0.0 and d[1] == 0.0:
        raise ValueError("position coincides with the macro BS")
    angle = math.atan2(d[1], d[0]) % TWO_PI
    return min(int(angle // (TWO_PI / macro.n_sectors)), macro.n_sectors - 1)


def _sample_in_disc(rng: np.random.Generator, radius: float) -> np.ndarray:
    while True:
        p = rng.uniform(-radius, radius, 2)
        if p[0] * p[0] + p[1] * p[1] <= radius * radius:
            return p


def _make_fap(fap_id: int, position, macro: MacroBs | None, params: DeploymentParams) -> Fap:
    sector = sector_of(macro, position) if macro is not None else 0
    return Fap(
        id=fap_id,
        position=position,
        height=params.fap_height_m,
        tx_power=params.fap_tx_power_w,
        radius=params.femto_radius_m,
        sector_index=sector,
    )


def _random_positions(rng, macro, params, check=None) -> list[Fap]:
    """Reference FAP pinned at reference_distance on the +x axis, rest uniform."""
    faps = [_make_fap(0, np.array([params.reference_distance_m, 0.0]), macro, params)]
    for i in range(1, params.n_faps):
        for _ in range(params.max_place_attempts):
            p = _sample_in_disc(rng, params.macro_radius_m)
            if check is None or check(p, faps):
                faps.append(_make_fap(i, p, macro, params))
                break
        else:
            raise PlacementError(
                f"could not place FAP {i} after {params.max_place_attempts} attempts"
            )
    return faps


def generate(scenario: Scenario, params: DeploymentParams, seed: int) -> Deployment:
    """Generate a deployment for one scenario; identical (scenario, params,
    seed) triples produce bit-identical deployments."""
    rng = np.random.default_rng(seed)

    if scenario is Scenario.A:
        if params.n_faps != 1:
            raise ValueError("scenario A has exactly one FAP")
        fap = Fap(
            id=0,
            position=np.zeros(2),
            height=params.fap_height_m,
            tx_power=params.fap_tx_power_w,
            radius=params.femto_radius_m,
            sector_index=0,
        )
        return Deployment(None, [fap], scenario, seed, params)

    macro = MacroBs(
        position=np.zeros(2),
        height=params.macro_height_m,
        tx_power=params.macro_tx_power_w,
        radius=params.macro_radius_m,
        n_sectors=params.n_sectors,
    )
    if params.reference_distance_m > params.macro_radius_m:
        raise ValueError("reference FAP lies outside the macro disc")

    if scenario is Scenario.B:
        r = params.neighbor_radius_m

        def separated(p, placed):
            return all(np.linalg.norm(p - f.position) > r for f in placed)

        faps = _random_positions(rng, macro, params, check=separated)
        return Deployment(macro, faps, scenario, seed, params)

    if scenario is Scenario.C:
        for _ in range(params.max_layout_attempts):
            faps = _random_positions(rng, macro, params)
            dep = Deployment(macro, faps, scenario, seed, params)
            g = neighbor_graph(dep, params.neighbor_radius_m)
            if g.n_edges >= 1 and g.mean_degree < params.c_max_mean_degree:
                return dep
        raise PlacementError(
            f"no scenario-C layout found in {params.max_layout_attempts} attempts"
        )

    if scenario is Scenario.D:
        if params.dense_threshold and params.n_faps < params.dense_threshold:
            raise ValueError(
                f"scenario D needs >= {params.dense_threshold} FAPs, got {params.n_faps}"
            )
        faps = _random_positions(rng, macro, params)
        return Deployment(macro, faps, scenario, seed, params)

    raise ValueError(f"unknown scenario {scenario!r}")


def neighbor_graph(deployment: Deployment, radius: float) -> NeighborGraph:
    """Symmetric, irreflexive graph of FAP pairs within center-to-center
    ``radius`` (exact Euclidean distances)."""
    if radius <= 0:
        raise ValueError("neighbor radius must be positive")
    ids = [f.id for f in deployment.faps]
    pos = deployment.positions()
    adjacency: dict[int, set[int]] = {i: set() for i in ids}
    n = len(ids)
    r2 = radius * radius
    block = 512
    for start in range(0, n, block):
        stop = min(start + block, n)
        d2 = ((pos[start:stop, None, :] - pos[None, :, :]) ** 2).sum(axis=2)
        rows, cols = np.nonzero(d2 <= r2)
        for r_, c in zip(rows, cols):
            a, b = ids[start + r_], ids[c]
            if a != b:
                adjacency[a].add(b)
                adjacency[b].add(a)
    return NeighborGraph(adjacency=adjacency, neighbor_radius=radius)


def apply_plan(deployment: Deployment, plan: FrequencyPlan) -> Deployment:
    """Give every FAP its sector's base allocation (center band, no edge)."""
    for f in deployment.faps:
        f.allocation = base_allocation(plan, f.sector_index)
    return deployment


# --- CSV serialization ------------------------------------------------------
#
# Floats are written with repr() so a round trip is bit-exact.  Per-FAP radius
# and height are uniform at generation time and restored from the header; only
# tx_power and the edge color survive SON edits through a round trip.

_CSV_COLUMNS = "id,x,y,sector,tx_power,edge_choice"


def deployment_to_csv(deployment: Deployment) -> str:
    out = io.StringIO()
    out.write(f"# scenario={deployment.scenario.value}\n")
    out.write(f"# rng_seed={deployment.rng_seed}\n")
    p = deployment.params
    for name in DeploymentParams.__dataclass_fields__:
        out.write(f"# params.{name}={getattr(p, name)!r}\n")
    out.write(f"# macro={'1' if deployment.macro is not None else '0'}\n")
    out.write(_CSV_COLUMNS + "\n")
    for f in deployment.faps:
        if f.allocation is None:
            edge = "-"
        else:
            edge = f.allocation.edge_choice.value
        x, y = float(f.position[0]), float(f.position[1])
        out.write(f"{f.id},{x!r},{y!r},{f.sector_index},{float(f.tx_power)!r},{edge}\n")
    return out.getvalue()


def deployment_from_csv(text: str, plan: FrequencyPlan | None = None) -> Deployment:
    """Rebuild a deployment from :func:`deployment_to_csv` output.

    Allocations are restored only when ``plan`` is given (the CSV stores edge
    colors, not band edges)."""
    header: dict[str, str] = {}
    rows: list[str] = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            header[key.strip()] = value
        elif line != _CSV_COLUMNS:
            rows.append(line)

    kwargs = {
        name: ast.literal_eval(header[f"params.{name}"])
        for name in DeploymentParams.__dataclass_fields__
    }
    params = DeploymentParams(**kwargs)
    scenario = Scenario(header["scenario"])
    seed = int(header["rng_seed"])
    macro = None
    if header["macro"] == "1":
        macro = MacroBs(
            position=np.zeros(2),
            height=params.macro_height_m,
            tx_power=params.macro_tx_power_w,
            radius=params.macro_radius_m,
            n_sectors=params.n_sectors,
        )
    faps = []
    for row in rows:
        sid, x, y, sector, power, edge = row.split(",")
        fap = Fap(
            id=int(sid),
            position=np.array([float(x), float(y)]),
            height=params.fap_height_m,
            tx_power=float(power),
            radius=params.femto_radius_m,
            sector_index=int(sector),
        )
        if edge != "-" and plan is not None:
            fap.allocation = replace(
                base_allocation(plan, fap.sector_index), edge_choice=EdgeChoice(edge)
            )
        faps.append(fap)
    return Deployment(macro, faps, scenario, seed, params)
