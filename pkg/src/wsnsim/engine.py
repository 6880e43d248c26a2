"""Round loop: CH election, cluster formation, steady-state data transfer.

Every joule leaving a node goes through `SimulationState._debit`, so the
per-round energy ledger closes exactly: the drop in total residual energy
equals the sum of debits applied that round. Control traffic
(advertisement, join, TDMA scheduling) is free; only data packets cost
energy. Deaths are checked at round end: a node may finish a round
slightly negative, in which case the overshoot is refunded to the ledger
and the residual floored at zero.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Optional, TextIO

from .energy_model import crossover_distance
from .network import Network, NetworkConfig, deploy
from .protocols import (
    ProtocolKind,
    Teen,
    elect_cluster_heads,
    form_clusters,
    teen_next_hop,
    teen_should_transmit,
)

TRACE_COLUMNS = ("round", "alive", "dead", "ch_count", "packets_to_bs",
                 "packets_to_ch", "total_residual_energy")


@dataclass
class RoundMetrics:
    round: int
    alive: int
    dead: int
    ch_count: int
    packets_to_bs: int
    packets_to_ch: int
    total_residual_energy: float


@dataclass
class SimulationResult:
    protocol: str
    seed: int
    n_nodes: int
    trace: list[RoundMetrics]
    round_debits: list[float]
    first_death_round: Optional[int]
    last_death_round: Optional[int]
    total_packets_to_bs: int
    censored: bool


class AllNodesDeadError(RuntimeError):
    pass


class SimulationState:
    """One protocol run over one deployed network."""

    def __init__(self, network: Network, protocol: ProtocolKind, seed: int):
        self.network = network
        self.config = network.config
        self.protocol = protocol
        self.rng = random.Random(f"protocol:{seed}")
        self.round = 0
        self.cumulative_packets_to_bs = 0
        self._round_debit = 0.0
        # radio constants folded with the packet size; the arithmetic below
        # reproduces tx/rx/aggregation_energy bit for bit
        radio = self.config.radio
        bits = self.config.packet_bits
        self._bits = bits
        self._e_fs = radio.e_fs
        self._e_mp = radio.e_mp
        self._d0 = crossover_distance(radio)
        self._elec = bits * radio.e_elec           # tx/rx electronics per packet
        self._agg_unit = bits * radio.e_da         # aggregation per report
        self._bs_dist = network.dist_to_bs.tolist()

    def _tx_cost(self, distance: float) -> float:
        d_sq = distance * distance
        if distance < self._d0:
            amp = self._e_fs * d_sq
        else:
            amp = self._e_mp * d_sq * d_sq
        return self._elec + self._bits * amp

    def run_round(self) -> RoundMetrics:
        """Advance the simulation by one round and record its metrics."""
        cfg = self.config
        net = self.network
        nodes = net.nodes
        alive = [n for n in nodes if n.alive]
        if not alive:
            raise AllNodesDeadError("cannot run a round with no alive nodes")
        round_debit = 0.0
        elec = self._elec
        tx_cost = self._tx_cost
        bs_dist = self._bs_dist

        outcome = elect_cluster_heads(net, self.protocol, self.round, self.rng)
        ch_ids = sorted(outcome.ch_ids)

        is_teen = isinstance(self.protocol, Teen)
        transmits: dict[int, bool] = {}
        if is_teen:
            # every alive node senses each round; the gate decides who reports
            uniform = self.rng.uniform
            lo, hi = cfg.teen_sense_min, cfg.teen_sense_max
            hard, soft = cfg.teen_hard_threshold, cfg.teen_soft_threshold
            for node in alive:
                transmits[node.id] = teen_should_transmit(node, uniform(lo, hi),
                                                          hard, soft)

        packets_to_bs = 0
        packets_to_ch = 0

        if ch_ids:
            assignment = form_clusters(net, ch_ids)
            member_ids = sorted(assignment)
            member_dists = net.dist_matrix[
                member_ids, [assignment[m] for m in member_ids]].tolist()

            # members report to their CH
            reports = dict.fromkeys(ch_ids, 0)
            for member_id, d in zip(member_ids, member_dists):
                if is_teen and not transmits[member_id]:
                    continue
                member = nodes[member_id]
                member.residual_energy -= (cost := tx_cost(d))
                round_debit += cost
                ch = nodes[assignment[member_id]]
                ch.residual_energy -= elec
                round_debit += elec
                reports[ch.id] += 1
                packets_to_ch += 1

            # CHs fuse what they heard (plus their own report) and send one
            # compressed packet up: straight to the BS, or for TEEN to the
            # next CH in the hierarchy, which folds it into its own packet
            if is_teen:
                own = {c: (1 if transmits[c] else 0) for c in ch_ids}
            else:
                own = dict.fromkeys(ch_ids, 1)
            agg_unit = self._agg_unit
            for ch_id in ch_ids:
                cost = agg_unit * (reports[ch_id] + own[ch_id])
                nodes[ch_id].residual_energy -= cost
                round_debit += cost

            forward = is_teen and self.protocol.forwarding
            # farthest-first order so relayed data is already in hand when a
            # CH transmits its own packet
            send_order = sorted(ch_ids, key=lambda c: (-bs_dist[c], c))
            received_forwards = dict.fromkeys(ch_ids, 0)
            ch_nodes = [nodes[c] for c in ch_ids]
            for ch_id in send_order:
                ch = nodes[ch_id]
                if is_teen and reports[ch_id] + own[ch_id] + received_forwards[ch_id] == 0:
                    continue
                next_id = teen_next_hop(ch, ch_nodes, net) if forward else None
                if next_id is None:
                    cost = tx_cost(bs_dist[ch_id])
                    ch.residual_energy -= cost
                    round_debit += cost
                    packets_to_bs += 1
                else:
                    cost = tx_cost(net.node_distance(ch_id, next_id))
                    ch.residual_energy -= cost
                    round_debit += cost
                    nodes[next_id].residual_energy -= elec
                    round_debit += elec
                    received_forwards[next_id] += 1
        else:
            # no CH elected this round: everyone with data reports straight
            # to the base station
            for node in alive:
                if is_teen and not transmits[node.id]:
                    continue
                cost = tx_cost(bs_dist[node.id])
                node.residual_energy -= cost
                round_debit += cost
                packets_to_bs += 1

        # deaths are assessed once the round completes; overshoot from a
        # node's final transmissions is refunded so the ledger stays exact
        alive_count = 0
        for node in alive:
            if node.residual_energy <= 0.0:
                round_debit += node.residual_energy
                node.residual_energy = 0.0
                node.alive = False
                node.eligible_for_ch = False
            else:
                alive_count += 1

        self._round_debit = round_debit
        self.cumulative_packets_to_bs += packets_to_bs
        metrics = RoundMetrics(
            round=self.round,
            alive=alive_count,
            dead=len(nodes) - alive_count,
            ch_count=len(ch_ids),
            packets_to_bs=packets_to_bs,
            packets_to_ch=packets_to_ch,
            total_residual_energy=net.total_residual_energy(),
        )
        self.round += 1
        return metrics

    @property
    def last_round_debit(self) -> float:
        return self._round_debit


def run_simulation(config: NetworkConfig, protocol: ProtocolKind,
                   seed: int) -> SimulationResult:
    """Run one protocol to network death or the round cap, deterministically."""
    config.validate()
    network = deploy(config, seed)
    state = SimulationState(network, protocol, seed)
    n = config.node_count

    trace: list[RoundMetrics] = []
    round_debits: list[float] = []
    first_death: Optional[int] = None
    last_death: Optional[int] = None
    for _ in range(config.max_rounds):
        metrics = state.run_round()
        trace.append(metrics)
        round_debits.append(state.last_round_debit)
        if first_death is None and metrics.dead > 0:
            first_death = metrics.round
        if metrics.dead == n:
            last_death = metrics.round
            break
    censored = last_death is None and len(trace) == config.max_rounds
    return SimulationResult(
        protocol=protocol.name,
        seed=seed,
        n_nodes=n,
        trace=trace,
        round_debits=round_debits,
        first_death_round=first_death,
        last_death_round=last_death,
        total_packets_to_bs=state.cumulative_packets_to_bs,
        censored=censored,
    )


def write_trace_csv(result: SimulationResult, stream: TextIO) -> None:
    """Emit the per-round trace with a fixed column order."""
    stream.write(",".join(TRACE_COLUMNS) + "\n")
    for m in result.trace:
        stream.write(f"{m.round},{m.alive},{m.dead},{m.ch_count},"
                     f"{m.packets_to_bs},{m.packets_to_ch},"
                     f"{m.total_residual_energy!r}\n")


def read_trace_csv(stream: TextIO) -> list[RoundMetrics]:
    header = stream.readline().strip().split(",")
    if tuple(header) != TRACE_COLUMNS:
        raise ValueError(f"unexpected trace header: {header}")
    out = []
    for line in stream:
        parts = line.strip().split(",")
        if not parts or parts == [""]:
            continue
        out.append(RoundMetrics(round=int(parts[0]), alive=int(parts[1]),
                                dead=int(parts[2]), ch_count=int(parts[3]),
                                packets_to_bs=int(parts[4]),
                                packets_to_ch=int(parts[5]),
                                total_residual_energy=float(parts[6])))
    return out


def summary_dict(result: SimulationResult) -> dict:
    return {
        "protocol": result.protocol,
        "seed": result.seed,
        "n_nodes": result.n_nodes,
        "rounds": len(result.trace),
        "first_death_round": result.first_death_round,
        "last_death_round": result.last_death_round,
        "total_packets_to_bs": result.total_packets_to_bs,
        "censored": result.censored,
    }


def write_summary_json(result: SimulationResult, stream: TextIO) -> None:
    json.dump(summary_dict(result), stream, indent=2)
    stream.write("\n")
