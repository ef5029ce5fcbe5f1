"""SON coordinator: edge-band auto-configuration, interference-triggered power
and cell-size adjustment, and admission of newly installed FAPs.

The distributed FAP negotiation is modeled as a centralized deterministic pass
over the deployment; every state change is recorded in an append-only event
log so a pass can be audited and replayed.  The coordinator has exclusive
access to the deployment while it runs; outage evaluation and SON passes
alternate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .channel import PropagationParams, link_coefficients
from .spectrum import (
    EDGE_COLORS,
    EdgeChoice,
    FrequencyPlan,
    Scheme,
    UeRegion,
    base_allocation,
    cochannel,
)
from .topology import Deployment, Fap, NeighborGraph, sector_of

__all__ = [
    "ColoringState",
    "SonEvent",
    "SonEventKind",
    "SonEventLog",
    "UeContext",
    "admit_fap",
    "adjust_power",
    "assign_shared_edge",
    "assign_uniform_random_colors",
    "configure_frequencies",
    "noncochannel_fraction",
    "replay",
    "same_color_conflicts",
]


class SonEventKind(Enum):
    RECONFIGURE = "reconfigure"
    POWER_REQUEST = "power_request"
    NEW_FAP = "new_fap"
    COLOR_CONFLICT = "color_conflict"


@dataclass(frozen=True)
class SonEvent:
    seq: int
    kind: SonEventKind
    subject: int  # FAP id
    details: dict

    def to_line(self) -> str:
        return json.dumps(
            {"seq": self.seq, "kind": self.kind.value, "subject": self.subject,
             "details": self.details},
            sort_keys=True,
        )

    @staticmethod
    def from_line(line: str) -> "SonEvent":
        d = json.loads(line)
        return SonEvent(d["seq"], SonEventKind(d["kind"]), d["subject"], d["details"])


class SonEventLog:
    """Append-only event log with monotone sequence numbers."""

    def __init__(self):
        self.events: list[SonEvent] = []

    def append(self, kind: SonEventKind, subject: int, **details) -> SonEvent:
        ev = SonEvent(seq=len(self.events), kind=kind, subject=subject, details=details)
        self.events.append(ev)
        return ev

    def to_lines(self) -> list[str]:
        return [ev.to_line() for ev in self.events]

    @staticmethod
    def from_lines(lines) -> "SonEventLog":
        log = SonEventLog()
        log.events = [SonEvent.from_line(ln) for ln in lines if ln.strip()]
        return log


@dataclass
class ColoringState:
    colors: dict[int, EdgeChoice]
    conflicts: set[tuple[int, int]]  # adjacent same-color pairs, (a, b) with a < b


def same_color_conflicts(graph: NeighborGraph, colors: dict[int, EdgeChoice]) -> set[tuple[int, int]]:
    """Recompute from scratch the neighbor pairs sharing an edge color."""
    return {
        (a, b)
        for a, b in graph.edges()
        if colors.get(a, EdgeChoice.NONE) is colors.get(b, EdgeChoice.NONE)
        and colors.get(a, EdgeChoice.NONE) is not EdgeChoice.NONE
    }


def _set_edge_color(fap: Fap, plan: FrequencyPlan, color: EdgeChoice) -> None:
    fap.allocation = replace(base_allocation(plan, fap.sector_index), edge_choice=color)


def configure_frequencies(
    deployment: Deployment,
    graph: NeighborGraph,
    plan: FrequencyPlan,
    log: SonEventLog | None = None,
) -> ColoringState:
    """Assign every FAP one of the three edge colors by greedy coloring.

    FAPs are processed in descending neighbor-graph degree (ids break ties);
    each takes the globally least-used color not present among its already
    colored neighbors.  When neighbors cover all three colors, the color with
    the fewest same-colored neighbors is taken and a COLOR_CONFLICT event is
    recorded.  Greedy conflicts are never worse than uniform random assignment
    on average.
    """
    if plan.scheme is not Scheme.DYNAMIC_REUSE:
        raise ValueError(f"{plan.scheme.value} scheme has no edge bands to configure")
    missing = [f.id for f in deployment.faps if f.id not in graph.adjacency]
    if missing:
        raise ValueError(f"neighbor graph does not cover FAPs {missing}")

    by_id = {f.id: f for f in deployment.faps}
    order = sorted(graph.adjacency, key=lambda i: (-len(graph.adjacency[i]), i))
    colors: dict[int, EdgeChoice] = {}
    usage = {c: 0 for c in EDGE_COLORS}
    rank = {c: i for i, c in enumerate(EDGE_COLORS)}
    for fid in order:
        neigh = [colors[n] for n in graph.adjacency[fid] if n in colors]
        free = [c for c in EDGE_COLORS if c not in neigh]
        if free:
            color = min(free, key=lambda c: (usage[c], rank[c]))
        else:
            counts = {c: neigh.count(c) for c in EDGE_COLORS}
            color = min(EDGE_COLORS, key=lambda c: (counts[c], usage[c], rank[c]))
            if log is not None:
                partners = sorted(
                    n for n in graph.adjacency[fid] if colors.get(n) is color
                )
                log.append(
                    SonEventKind.COLOR_CONFLICT, fid,
                    color=color.value, partners=partners,
                )
        colors[fid] = color
        usage[color] += 1
        _set_edge_color(by_id[fid], plan, color)
        if log is not None:
            log.append(SonEventKind.RECONFIGURE, fid, color=color.value)
    return ColoringState(colors=colors, conflicts=same_color_conflicts(graph, colors))


def assign_uniform_random_colors(
    deployment: Deployment,
    graph: NeighborGraph,
    plan: FrequencyPlan,
    rng: np.random.Generator,
) -> ColoringState:
    """Uncoordinated baseline: every FAP picks an edge color at random."""
    colors = {}
    for f in deployment.faps:
        color = EDGE_COLORS[int(rng.integers(0, 3))]
        colors[f.id] = color
        _set_edge_color(f, plan, color)
    return ColoringState(colors=colors, conflicts=same_color_conflicts(graph, colors))


def assign_shared_edge(
    deployment: Deployment,
    graph: NeighborGraph,
    plan: FrequencyPlan,
    color: EdgeChoice = EdgeChoice.X,
) -> ColoringState:
    """Degenerate baseline: all FAPs share a single edge band."""
    colors = {}
    for f in deployment.faps:
        colors[f.id] = color
        _set_edge_color(f, plan, color)
    return ColoringState(colors=colors, conflicts=same_color_conflicts(graph, colors))


def noncochannel_fraction(
    deployment: Deployment,
    graph: NeighborGraph,
    plan: FrequencyPlan,
    ue_region: UeRegion = UeRegion.EDGE,
) -> float:
    """Fraction of ordered neighbor pairs whose interference indicator is 0,
    i.e. how often a neighbor does not reach the reference UE's band."""
    by_id = {f.id: f for f in deployment.faps}
    total = 0
    zero = 0
    for a, b in graph.edges():
        fa = by_id[a]
        fb = by_id[b]
        for ref, other in ((fa, fb), (fb, fa)):
            total += 1
            if not cochannel(plan, ref.allocation, ue_region, other.allocation):
                zero += 1
    return zero / total if total else 1.0


@dataclass(frozen=True)
class UeContext:
    """Radio situation of one victim UE for power adjustment."""

    position: np.ndarray  # (2,) meters
    serving_fap: int
    region: UeRegion
    plan: FrequencyPlan


def adjust_power(
    deployment: Deployment,
    victim_ue: UeContext,
    master: int,
    params: PropagationParams,
    gamma_db: float,
    margin_db: float = 3.0,
    step_db: float = 1.0,
    floor_w: float = 1e-4,
    log: SonEventLog | None = None,
) -> list[SonEvent]:
    """Lower co-channel interferer powers until the victim's fading-averaged
    SIR reaches gamma + margin or every interferer sits at the power floor.

    Each step reduces the strongest remaining interferer by ``step_db`` and
    shrinks its cell radius by 10^(-step / (10 * eta1)), the distance at which
    its edge receive power is unchanged.  Powers never increase.
    """
    if victim_ue.serving_fap != master:
        raise ValueError("victim UE is not attached to the master FAP")
    ref = deployment.fap_by_id(master)
    ids, coeffs, macro_coeff, s_bar = link_coefficients(
        deployment, ref, victim_ue.position, victim_ue.plan, victim_ue.region, params
    )
    events: list[SonEvent] = []
    local_log = log if log is not None else SonEventLog()
    coeffs = dict(zip(ids, coeffs))
    cochannel_ids = [i for i in ids if coeffs[i] > 0.0]
    if not cochannel_ids:
        return events

    target = 10 ** ((gamma_db + margin_db) / 10.0)
    factor = 10 ** (-step_db / 10.0)
    while True:
        total = sum(coeffs[i] for i in cochannel_ids) + macro_coeff
        if total <= 0.0 or s_bar / total >= target:
            break
        adjustable = [
            i for i in cochannel_ids if deployment.fap_by_id(i).tx_power > floor_w
        ]
        if not adjustable:
            break
        worst = max(adjustable, key=lambda i: (coeffs[i], -i))
        fap = deployment.fap_by_id(worst)
        old_power = fap.tx_power
        new_power = max(old_power * factor, floor_w)
        delta_db = 10.0 * math.log10(old_power / new_power)
        fap.tx_power = new_power
        fap.radius *= 10 ** (-delta_db / (10.0 * params.eta_desired))
        coeffs[worst] *= new_power / old_power
        ev = local_log.append(
            SonEventKind.POWER_REQUEST,
            worst,
            master=master,
            delta_db=delta_db,
            tx_power_w=fap.tx_power,
            radius_m=fap.radius,
        )
        events.append(ev)
    return events


def admit_fap(
    deployment: Deployment,
    position,
    plan: FrequencyPlan,
    graph: NeighborGraph,
    log: SonEventLog | None = None,
) -> tuple[Deployment, list[SonEvent]]:
    """Admit a newly installed FAP: sniff neighbors within the graph radius,
    pick an edge color absent among them (else their minority color), and
    append the FAP without touching existing colors."""
    if deployment.macro is None:
        raise ValueError("admission requires an overlaid macrocell")
    pos = np.asarray(position, dtype=float)
    if float(np.linalg.norm(pos - deployment.macro.position)) > deployment.macro.radius:
        raise ValueError("new FAP position lies outside the macro disc")
    sector = sector_of(deployment.macro, pos)
    if deployment.faps:
        dists = np.linalg.norm(deployment.positions() - pos, axis=1)
        sniffed = [f for f, d in zip(deployment.faps, dists) if d <= graph.neighbor_radius]
    else:
        sniffed = []
    neigh_colors = [
        f.allocation.edge_choice
        for f in sniffed
        if f.allocation is not None and f.allocation.edge_choice is not EdgeChoice.NONE
    ]
    rank = {c: i for i, c in enumerate(EDGE_COLORS)}
    absent = [c for c in EDGE_COLORS if c not in neigh_colors]
    if absent:
        color = absent[0]
    else:
        counts = {c: neigh_colors.count(c) for c in EDGE_COLORS}
        color = min(EDGE_COLORS, key=lambda c: (counts[c], rank[c]))

    new_id = max((f.id for f in deployment.faps), default=-1) + 1
    params = deployment.params
    fap = Fap(
        id=new_id,
        position=pos,
        height=params.fap_height_m,
        tx_power=params.fap_tx_power_w,
        radius=params.femto_radius_m,
        sector_index=sector,
    )
    _set_edge_color(fap, plan, color)
    deployment.faps.append(fap)

    local_log = log if log is not None else SonEventLog()
    events = [
        local_log.append(
            SonEventKind.NEW_FAP, new_id,
            x=float(pos[0]), y=float(pos[1]), sector=sector,
        ),
        local_log.append(SonEventKind.RECONFIGURE, new_id, color=color.value),
    ]
    return deployment, events


def replay(deployment: Deployment, events, plan: FrequencyPlan) -> Deployment:
    """Apply a SON event list to a deployment (normally a copy of the
    pre-pass state); reproduces the post-pass state bit-exactly."""
    params = deployment.params
    for ev in events:
        if ev.kind is SonEventKind.POWER_REQUEST:
            fap = deployment.fap_by_id(ev.subject)
            fap.tx_power = ev.details["tx_power_w"]
            fap.radius = ev.details["radius_m"]
        elif ev.kind is SonEventKind.NEW_FAP:
            fap = Fap(
                id=ev.subject,
                position=np.array([ev.details["x"], ev.details["y"]]),
                height=params.fap_height_m,
                tx_power=params.fap_tx_power_w,
                radius=params.femto_radius_m,
                sector_index=ev.details["sector"],
            )
            deployment.faps.append(fap)
        elif ev.kind is SonEventKind.RECONFIGURE:
            fap = deployment.fap_by_id(ev.subject)
            _set_edge_color(fap, plan, EdgeChoice(ev.details["color"]))
        # COLOR_CONFLICT carries no state change
    return deployment
