"""Node population, field deployment and geometry.

A deployed `Network` is a snapshot: node positions never change, so all
pairwise distances and distances to the base station are precomputed once.
Per-run mutable state (residual energy, liveness, CH eligibility) lives on
the `Node` objects.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from typing import Optional, TextIO

import numpy as np

from .energy_model import RadioParams

NORMAL = "normal"
ADVANCED = "advanced"

# accepted unit suffixes for energy values in config files / overrides
# (longest first so "nj" wins over "j"); decimal exponents so "50nJ"
# parses in one rounding step
_ENERGY_UNITS = (
    ("mj", "e-3"),
    ("uj", "e-6"),
    ("nj", "e-9"),
    ("pj", "e-12"),
    ("j", ""),
)


@dataclass(frozen=True)
class NetworkConfig:
    """Field geometry, population and protocol parameters.

    Defaults reproduce the standard 100-node / 100x100 m / 0.5 J setup with
    the base station at the field center. Energies are joules internally;
    `load_config` accepts nJ/pJ-suffixed values and normalizes on parse.
    """

    field_width: float = 100.0
    field_height: float = 100.0
    node_count: int = 100
    bs_position: tuple[float, float] = (50.0, 50.0)
    initial_energy: float = 0.5          # J, normal nodes
    p_opt: float = 0.1                   # desired CH fraction
    adv_fraction: float = 0.1            # fraction m of advanced nodes
    adv_energy_factor: float = 1.0       # alpha: advanced extra energy factor
    packet_bits: int = 4000
    radio: RadioParams = field(default_factory=RadioParams)
    teen_hard_threshold: float = 100.0
    teen_soft_threshold: float = 2.0
    teen_sense_min: float = 0.0
    teen_sense_max: float = 200.0
    max_rounds: int = 10000

    def validate(self) -> None:
        if self.node_count < 1:
            raise ValueError("node_count must be >= 1")
        if self.field_width <= 0 or self.field_height <= 0:
            raise ValueError("field dimensions must be positive")
        if not (0 < self.p_opt <= 1):
            raise ValueError("p_opt must lie in (0, 1]")
        if not (0 <= self.adv_fraction <= 1):
            raise ValueError("adv_fraction must lie in [0, 1]")
        if self.adv_energy_factor < 0:
            raise ValueError("adv_energy_factor must be >= 0")
        if self.initial_energy <= 0:
            raise ValueError("initial_energy must be positive")
        if self.packet_bits < 0:
            raise ValueError("packet_bits must be >= 0")
        # equality on the low side keeps the always-transmit degenerate case
        # (hard threshold at the sensing floor) expressible
        if not (self.teen_sense_min <= self.teen_hard_threshold < self.teen_sense_max):
            raise ValueError("require teen_sense_min <= teen_hard_threshold < teen_sense_max")
        if self.teen_soft_threshold < 0:
            raise ValueError("teen_soft_threshold must be >= 0")
        if self.max_rounds < 0:
            raise ValueError("max_rounds must be >= 0")


@dataclass
class Node:
    """One sensor node and its mutable per-run state."""

    id: int
    position: tuple[float, float]
    node_class: str                      # NORMAL or ADVANCED
    initial_energy: float
    residual_energy: float
    alive: bool = True
    eligible_for_ch: bool = True
    rounds_since_ch: int = 0
    teen_last_sent_value: Optional[float] = None


def distance(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Euclidean distance between two points."""
    return math.hypot(a[0] - b[0], a[1] - b[1])


class Network:
    """Deployed node population with precomputed geometry."""

    def __init__(self, config: NetworkConfig, nodes: list[Node]):
        self.config = config
        self.nodes = nodes
        self.bs_position = config.bs_position
        pos = np.array([n.position for n in nodes], dtype=float)
        diff = pos[:, None, :] - pos[None, :, :]
        self.dist_matrix = np.sqrt((diff ** 2).sum(axis=2))
        bs = np.array(config.bs_position, dtype=float)
        self.dist_to_bs = np.sqrt(((pos - bs) ** 2).sum(axis=1))

    def alive_nodes(self) -> list[Node]:
        return [n for n in self.nodes if n.alive]

    def node_distance(self, a: int, b: int) -> float:
        return float(self.dist_matrix[a, b])

    def bs_distance(self, node_id: int) -> float:
        return float(self.dist_to_bs[node_id])

    def total_residual_energy(self) -> float:
        return math.fsum(n.residual_energy for n in self.nodes)

    def write_topology_csv(self, stream: TextIO) -> None:
        """Export the deployment as CSV: id, x, y, class, initial_energy."""
        stream.write("id,x,y,class,initial_energy\n")
        for n in self.nodes:
            stream.write(f"{n.id},{n.position[0]!r},{n.position[1]!r},"
                         f"{n.node_class},{n.initial_energy!r}\n")


def deploy(config: NetworkConfig, seed: int) -> Network:
    """Scatter nodes uniformly over the field, deterministically per seed.

    The first floor(m*N) slots of a seeded shuffle become advanced nodes, so
    the advanced count is exact for every seed. The deployment PRNG stream
    is independent of the per-run protocol stream: identical seeds give
    identical topologies no matter which protocol later runs on them.
    """
    config.validate()
    rng = random.Random(f"deploy:{seed}")
    n = config.node_count
    positions = [(rng.uniform(0.0, config.field_width),
                  rng.uniform(0.0, config.field_height)) for _ in range(n)]
    order = list(range(n))
    rng.shuffle(order)
    n_advanced = math.floor(config.adv_fraction * n)
    advanced_ids = set(order[:n_advanced])

    nodes = []
    for i, pos in enumerate(positions):
        if i in advanced_ids:
            energy = config.initial_energy * (1.0 + config.adv_energy_factor)
            cls = ADVANCED
        else:
            energy = config.initial_energy
            cls = NORMAL
        nodes.append(Node(id=i, position=pos, node_class=cls,
                          initial_energy=energy, residual_energy=energy))
    return Network(config, nodes)


def _parse_scalar(key: str, raw: str):
    """Parse one config value; energy fields accept a unit suffix (nJ, pJ...)."""
    text = raw.strip()
    if key == "bs_position":
        parts = [p for p in text.replace(",", " ").split() if p]
        if len(parts) != 2:
            raise ValueError(f"bs_position needs two coordinates, got {raw!r}")
        return (float(parts[0]), float(parts[1]))
    if key in ("node_count", "packet_bits", "max_rounds"):
        return int(text)
    lowered = text.lower().replace(" ", "")
    for suffix, exponent in _ENERGY_UNITS:
        head = lowered[: -len(suffix)]
        if lowered.endswith(suffix) and head:
            if "e" in head and exponent:
                try:
                    return float(head) * float("1" + exponent)
                except ValueError:
                    break
            try:
                return float(head + exponent)
            except ValueError:
                break
    return float(text)


_CONFIG_KEYS = {
    "field_width", "field_height", "node_count", "bs_position",
    "initial_energy", "p_opt", "adv_fraction", "adv_energy_factor",
    "packet_bits", "teen_hard_threshold", "teen_soft_threshold",
    "teen_sense_min", "teen_sense_max", "max_rounds",
}
_RADIO_KEYS = {"e_elec", "e_fs", "e_mp", "e_da"}


def config_from_items(items: dict[str, str],
                      base: Optional[NetworkConfig] = None) -> NetworkConfig:
    """Build a NetworkConfig from flat key=value strings; unknown keys are errors."""
    cfg_kwargs = {}
    radio_kwargs = {}
    for key, raw in items.items():
        if key in _CONFIG_KEYS:
            cfg_kwargs[key] = _parse_scalar(key, raw)
        elif key in _RADIO_KEYS:
            radio_kwargs[key] = _parse_scalar(key, raw)
        else:
            raise ValueError(f"unknown config key: {key!r}")
    base = base if base is not None else NetworkConfig()
    if radio_kwargs:
        cfg_kwargs["radio"] = replace(base.radio, **radio_kwargs)
    cfg = replace(base, **cfg_kwargs)
    cfg.validate()
    return cfg


def load_config(path: str, base: Optional[NetworkConfig] = None) -> NetworkConfig:
    """Read a flat `key = value` config file (# starts a comment)."""
    items: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ValueError(f"{path}:{line_no}: expected key = value, got {line.rstrip()!r}")
            key, raw = stripped.split("=", 1)
            items[key.strip()] = raw
    return config_from_items(items, base=base)


def config_as_items(config: NetworkConfig) -> dict[str, str]:
    """Flatten a config back to the key=value form accepted by load_config."""
    out = {
        "field_width": repr(config.field_width),
        "field_height": repr(config.field_height),
        "node_count": str(config.node_count),
        "bs_position": f"{config.bs_position[0]!r},{config.bs_position[1]!r}",
        "initial_energy": repr(config.initial_energy),
        "p_opt": repr(config.p_opt),
        "adv_fraction": repr(config.adv_fraction),
        "adv_energy_factor": repr(config.adv_energy_factor),
        "packet_bits": str(config.packet_bits),
        "e_elec": repr(config.radio.e_elec),
        "e_fs": repr(config.radio.e_fs),
        "e_mp": repr(config.radio.e_mp),
        "e_da": repr(config.radio.e_da),
        "teen_hard_threshold": repr(config.teen_hard_threshold),
        "teen_soft_threshold": repr(config.teen_soft_threshold),
        "teen_sense_min": repr(config.teen_sense_min),
        "teen_sense_max": repr(config.teen_sense_max),
        "max_rounds": str(config.max_rounds),
    }
    return out
