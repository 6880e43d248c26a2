"""Cluster-head election, cluster formation and TEEN-specific mechanics.

All four protocols elect CHs the same way: an eligible node draws a uniform
number and becomes CH when the draw falls below its threshold. They differ
in how the threshold probability is computed:

- LEACH / TEEN use a single probability p for every node.
- SEP splits p into class-weighted probabilities for normal and advanced
  nodes so advanced nodes take CH duty more often.
- DEEC scales each node's probability by its residual energy relative to
  the current network average, so depleted nodes skip CH duty.

A node that becomes CH leaves the eligibility set until its epoch
(round(1/p) rounds) wraps around; the set also refills whenever it runs
empty. TEEN additionally gates member transmissions behind hard/soft
sensing thresholds and forwards CH packets hop-by-hop toward the base
station instead of directly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .network import ADVANCED, NORMAL, Network, Node


@dataclass(frozen=True)
class Leach:
    p: float = 0.1
    name = "leach"


@dataclass(frozen=True)
class Teen:
    p: float = 0.1
    forwarding: bool = True     # hop CH packets through closer CHs
    name = "teen"


@dataclass(frozen=True)
class Sep:
    p_nrm: float
    p_adv: float
    name = "sep"


@dataclass(frozen=True)
class Deec:
    p_opt: float = 0.1
    m: float = 0.1
    alpha: float = 1.0
    name = "deec"


ProtocolKind = Union[Leach, Teen, Sep, Deec]

PROTOCOL_NAMES = ("leach", "teen", "sep", "deec")


def make_protocol(name: str, config) -> ProtocolKind:
    """Build a protocol with its parameters derived from the network config."""
    key = name.strip().lower()
    if key == "leach":
        return Leach(p=config.p_opt)
    if key == "teen":
        return Teen(p=config.p_opt)
    if key == "sep":
        p_nrm, p_adv = sep_probabilities(config.p_opt, config.adv_fraction,
                                         config.adv_energy_factor)
        return Sep(p_nrm=p_nrm, p_adv=p_adv)
    if key == "deec":
        return Deec(p_opt=config.p_opt, m=config.adv_fraction,
                    alpha=config.adv_energy_factor)
    raise ValueError(f"unknown protocol {name!r} (expected one of {PROTOCOL_NAMES})")


@dataclass
class ElectionOutcome:
    ch_ids: list[int]
    per_node_threshold: dict[int, float]
    draws: dict[int, float]


def _check_probability(p: float) -> None:
    if not (0 < p <= 1):
        raise ValueError(f"probability must lie in (0, 1], got {p!r}")


def epoch_length(p: float) -> int:
    """Rounds until a former CH becomes eligible again: round(1/p), at least 1."""
    _check_probability(p)
    return max(1, round(1.0 / p))


def leach_threshold(p: float, round_index: int, eligible: bool) -> float:
    """Election threshold T(n) = p / (1 - p * (r mod round(1/p))), 0 if ineligible.

    The threshold ramps up within an epoch so that nodes still waiting get
    elected with certainty by the epoch's final round. Clamped to 1.
    """
    _check_probability(p)
    if not eligible:
        return 0.0
    r_mod = round_index % epoch_length(p)
    return min(1.0, p / (1.0 - p * r_mod))


def sep_probabilities(p_opt: float, m: float, alpha: float) -> tuple[float, float]:
    """Class-weighted CH probabilities (p_nrm, p_adv).

    p_nrm = p_opt / (1 + alpha*m), p_adv = p_nrm * (1 + alpha); the
    population mix satisfies (1-m)*p_nrm + m*p_adv = p_opt.
    """
    _check_probability(p_opt)
    denom = 1.0 + alpha * m
    return p_opt / denom, p_opt * (1.0 + alpha) / denom


def sep_threshold(node_class: str, p_nrm: float, p_adv: float,
                  round_index: int, eligible: bool) -> float:
    """Per-class election threshold; epochs are class-specific."""
    p = p_adv if node_class == ADVANCED else p_nrm
    return leach_threshold(p, round_index, eligible)


def network_average_energy(nodes: list[Node]) -> float:
    """Mean residual energy over all deployed nodes; dead nodes count as zero."""
    if not nodes:
        raise ValueError("no nodes")
    return sum(n.residual_energy for n in nodes) / len(nodes)


def deec_probability(node: Node, p_opt: float, m: float, alpha: float,
                     avg_energy: float) -> float:
    """Residual-energy-weighted CH probability, clamped to (0, 1].

    Normal nodes get p_opt * E_i / ((1 + alpha*m) * E_avg); advanced nodes
    carry an extra (1 + alpha) factor. Values can exceed 1 late in life
    when a survivor holds far more energy than the network average.
    """
    if avg_energy <= 0:
        raise ValueError("network average energy must be positive")
    base = p_opt * node.residual_energy / ((1.0 + alpha * m) * avg_energy)
    if node.node_class == ADVANCED:
        base *= 1.0 + alpha
    return min(1.0, base)


def deec_reference_weight(alpha_values: list[float], p_opt: float) -> list[float]:
    """Multi-level heterogeneity reference probabilities.

    Node i gets p_opt * N * (1 + alpha_i) / (N + sum(alpha)); the weights
    average back to p_opt exactly.
    """
    n = len(alpha_values)
    if n < 1:
        raise ValueError("need at least one node")
    total = sum(alpha_values)
    return [p_opt * n * (1.0 + a) / (n + total) for a in alpha_values]


def _node_probability(node: Node, protocol: ProtocolKind,
                      avg_energy: Optional[float]) -> float:
    """The per-node election probability p used for threshold and epoch."""
    if isinstance(protocol, (Leach, Teen)):
        return protocol.p
    if isinstance(protocol, Sep):
        return protocol.p_adv if node.node_class == ADVANCED else protocol.p_nrm
    if isinstance(protocol, Deec):
        return deec_probability(node, protocol.p_opt, protocol.m, protocol.alpha,
                                avg_energy)
    raise TypeError(f"unknown protocol kind: {protocol!r}")


def elect_cluster_heads(network: Network, protocol: ProtocolKind,
                        round_index: int, rng: random.Random) -> ElectionOutcome:
    """Run one round of threshold-based CH election.

    Eligibility refills at each node's epoch boundary (and wholesale when
    the set runs empty); elected nodes leave the set for the rest of their
    epoch. An empty CH set is a legal outcome handled by the engine.
    """
    alive = [n for n in network.nodes if n.alive]
    avg_energy = None
    if isinstance(protocol, Deec):
        avg_energy = network_average_energy(network.nodes)

    # epoch-boundary refill, per node (epochs are per-class for SEP and
    # per-node for DEEC, so the wrap point differs between nodes)
    probs = [_node_probability(node, protocol, avg_energy) for node in alive]
    any_eligible = False
    for node, p in zip(alive, probs):
        if not node.eligible_for_ch and round_index % max(1, round(1.0 / p)) == 0:
            node.eligible_for_ch = True
        any_eligible = any_eligible or node.eligible_for_ch
    if alive and not any_eligible:
        for node in alive:
            node.eligible_for_ch = True

    ch_ids: list[int] = []
    thresholds: dict[int, float] = {}
    draws: dict[int, float] = {}
    for node, p in zip(alive, probs):
        if not node.eligible_for_ch:
            thresholds[node.id] = 0.0
            node.rounds_since_ch += 1
            continue
        r_mod = round_index % max(1, round(1.0 / p))
        threshold = min(1.0, p / (1.0 - p * r_mod))
        thresholds[node.id] = threshold
        u = rng.random()
        draws[node.id] = u
        if u < threshold:
            ch_ids.append(node.id)
            node.eligible_for_ch = False
            node.rounds_since_ch = 0
        else:
            node.rounds_since_ch += 1
    return ElectionOutcome(ch_ids=ch_ids, per_node_threshold=thresholds, draws=draws)


def form_clusters(network: Network, ch_ids: list[int]) -> dict[int, int]:
    """Assign every alive non-CH node to its nearest CH (ties: lowest CH id)."""
    if not ch_ids:
        raise ValueError("no cluster heads to form clusters around")
    chs = sorted(ch_ids)
    ch_set = set(chs)
    member_ids = [n.id for n in network.nodes if n.alive and n.id not in ch_set]
    if not member_ids:
        return {}
    # argmin returns the first minimum, so sorted CH columns break ties
    # toward the lowest CH id
    sub = network.dist_matrix[np.ix_(member_ids, chs)]
    nearest = sub.argmin(axis=1)
    return {m: chs[int(k)] for m, k in zip(member_ids, nearest)}


def teen_should_transmit(node: Node, sensed_value: float,
                         hard_threshold: float, soft_threshold: float) -> bool:
    """Reactive transmission gate; updates the node's last-sent value on send.

    A node reports only when the sensed attribute crosses the hard
    threshold, and then only if it moved by at least the soft threshold
    since the last report (first crossings always go out).
    """
    if sensed_value < hard_threshold:
        return False
    last = node.teen_last_sent_value
    if last is not None and abs(sensed_value - last) < soft_threshold:
        return False
    node.teen_last_sent_value = sensed_value
    return True


def teen_next_hop(ch: Node, all_chs: list[Node], network: Network) -> Optional[int]:
    """Next hop for a CH packet: nearest CH strictly closer to the BS, else BS.

    Returns the relay CH's id, or None when this CH tops its hierarchy and
    sends straight to the base station. Hop-by-hop distance to the BS
    strictly decreases, so forwarding can never cycle.
    """
    my_bs = network.bs_distance(ch.id)
    best_id: Optional[int] = None
    best_dist = float("inf")
    for other in all_chs:
        if other.id == ch.id:
            continue
        if network.bs_distance(other.id) < my_bs:
            d = network.node_distance(ch.id, other.id)
            if d < best_dist or (d == best_dist and (best_id is None or other.id < best_id)):
                best_dist = d
                best_id = other.id
    return best_id
