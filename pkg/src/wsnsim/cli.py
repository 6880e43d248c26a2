"""Command-line interface: run / compare / bound subcommands.

All outputs are deterministic functions of (config, protocols, seeds):
rerunning a command reproduces byte-identical files. Topologies depend
only on the seed, never on the protocol, so protocols compared under the
same seed see the same field.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .engine import run_simulation, summary_dict, write_trace_csv
from .lifetime_bound import (
    InstanceTooLargeError,
    bound_for_simulated_network,
    instance_from_text,
    instance_to_text,
    schedule_to_text,
    solve_exact,
)
from .metrics import aggregate, network_lifetime, write_summary_stats_csv
from .network import NetworkConfig, config_as_items, config_from_items, deploy, load_config
from .protocols import PROTOCOL_NAMES, make_protocol


def parse_seeds(spec: str) -> list[int]:
    """Seed list syntax: `7`, `1,2,5`, or an inclusive range `1..20`."""
    seeds: list[int] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise ValueError(f"no seeds in {spec!r}")
    return seeds


def parse_protocols(spec: str) -> list[str]:
    names = [p.strip().lower() for p in spec.split(",") if p.strip()]
    for name in names:
        if name not in PROTOCOL_NAMES:
            raise ValueError(f"unknown protocol {name!r} (expected one of {PROTOCOL_NAMES})")
    if not names:
        raise ValueError("no protocols given")
    return names


def _load_effective_config(args) -> NetworkConfig:
    config = load_config(args.config) if args.config else NetworkConfig()
    if args.override:
        items = {}
        for entry in args.override:
            if "=" not in entry:
                raise ValueError(f"override must be key=value, got {entry!r}")
            key, value = entry.split("=", 1)
            items[key.strip()] = value
        config = config_from_items(items, base=config)
    if args.max_rounds is not None:
        config = replace(config, max_rounds=args.max_rounds)
    config.validate()
    return config


def _show_config(config: NetworkConfig) -> None:
    for key, value in config_as_items(config).items():
        print(f"{key} = {value}")


def _write_run_outputs(out_dir: Path, config: NetworkConfig, name: str,
                       seed: int, result) -> None:
    prefix = f"{name}_seed{seed}"
    with open(out_dir / f"{prefix}_trace.csv", "w", encoding="utf-8") as fh:
        write_trace_csv(result, fh)
    with open(out_dir / f"{prefix}_summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary_dict(result), fh, indent=2)
        fh.write("\n")
    with open(out_dir / f"{prefix}_topology.csv", "w", encoding="utf-8") as fh:
        deploy(config, seed).write_topology_csv(fh)


def cmd_run(args) -> int:
    config = _load_effective_config(args)
    if args.show_config:
        _show_config(config)
        return 0
    protocols = parse_protocols(args.protocol)
    seeds = parse_seeds(args.seeds)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    results = []
    for name in protocols:
        for seed in seeds:
            result = run_simulation(config, make_protocol(name, config), seed)
            _write_run_outputs(out_dir, config, name, seed, result)
            results.append(result)
    if len(results) > 1:
        with open(out_dir / "summary_stats.csv", "w", encoding="utf-8") as fh:
            write_summary_stats_csv(aggregate(results), fh)
    if args.require_termination and all(r.censored for r in results):
        print("error: every run was censored at max_rounds", file=sys.stderr)
        return 1
    return 0


def cmd_compare(args) -> int:
    config = _load_effective_config(args)
    if args.show_config:
        _show_config(config)
        return 0
    protocols = parse_protocols(args.protocol)
    if len(protocols) < 2:
        print("error: compare needs at least two protocols", file=sys.stderr)
        return 2
    seeds = parse_seeds(args.seeds)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    results = []
    for name in protocols:
        for seed in seeds:
            result = run_simulation(config, make_protocol(name, config), seed)
            _write_run_outputs(out_dir, config, name, seed, result)
            results.append(result)

    with open(out_dir / "comparison_long.csv", "w", encoding="utf-8") as fh:
        fh.write("round,protocol,metric,value,seed\n")
        for result in results:
            for m in result.trace:
                fh.write(f"{m.round},{result.protocol},alive,{m.alive},{result.seed}\n")
                fh.write(f"{m.round},{result.protocol},dead,{m.dead},{result.seed}\n")
                fh.write(f"{m.round},{result.protocol},ch_count,{m.ch_count},{result.seed}\n")
                fh.write(f"{m.round},{result.protocol},packets_to_bs,"
                         f"{m.packets_to_bs},{result.seed}\n")
                fh.write(f"{m.round},{result.protocol},packets_to_ch,"
                         f"{m.packets_to_ch},{result.seed}\n")
                fh.write(f"{m.round},{result.protocol},total_residual_energy,"
                         f"{m.total_residual_energy!r},{result.seed}\n")
    with open(out_dir / "summary_stats.csv", "w", encoding="utf-8") as fh:
        write_summary_stats_csv(aggregate(results), fh)
    if args.require_termination and all(r.censored for r in results):
        print("error: every run was censored at max_rounds", file=sys.stderr)
        return 1
    return 0


def cmd_bound(args) -> int:
    if args.instance:
        instance = instance_from_text(Path(args.instance).read_text(encoding="utf-8"))
    elif args.from_network:
        config = _load_effective_config(args)
        config = replace(config, node_count=args.nodes)
        config.validate()
        network = deploy(config, args.seed)
        instance = bound_for_simulated_network(network, k_max=args.k_max,
                                               max_range=args.max_range)
    else:
        print("error: give an instance file or --from-network", file=sys.stderr)
        return 2

    try:
        k_star, schedule = solve_exact(instance)
    except InstanceTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"K* = {k_star}")

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "bound_schedule.txt", "w", encoding="utf-8") as fh:
        fh.write(schedule_to_text(schedule))
    with open(out_dir / "bound_instance.txt", "w", encoding="utf-8") as fh:
        fh.write(instance_to_text(instance))

    if args.check_sim:
        if not args.from_network:
            print("error: --check-sim needs --from-network", file=sys.stderr)
            return 2
        result = run_simulation(config, make_protocol("leach", config), args.seed)
        if result.censored:
            print("error: simulation censored at max_rounds; raise it to "
                  "compare against the bound", file=sys.stderr)
            return 1
        lifetime = network_lifetime(result.trace, result.n_nodes)
        print(f"simulated lifetime = {lifetime}")
        if lifetime > k_star:
            print(f"error: simulated lifetime {lifetime} exceeds bound {k_star}",
                  file=sys.stderr)
            return 1
        print("bound dominance holds")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wsnsim",
                                     description="WSN clustering protocol simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value config file")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--max-rounds", type=int, default=None)
    common.add_argument("--override", action="append", default=[],
                        metavar="KEY=VALUE", help="config override (repeatable)")
    common.add_argument("--show-config", action="store_true",
                        help="print the effective config and exit")

    run_p = sub.add_parser("run", parents=[common], help="run one or more protocols")
    run_p.add_argument("--protocol", default="leach",
                       help="comma-separated protocol list")
    run_p.add_argument("--seeds", default="1", help="e.g. 7 or 1,2,5 or 1..20")
    run_p.add_argument("--require-termination", action="store_true",
                       help="fail if every run hits max_rounds with survivors")
    run_p.set_defaults(func=cmd_run)

    cmp_p = sub.add_parser("compare", parents=[common],
                           help="run several protocols on shared topologies")
    cmp_p.add_argument("--protocol", default="leach,teen,sep,deec")
    cmp_p.add_argument("--seeds", default="1")
    cmp_p.add_argument("--require-termination", action="store_true")
    cmp_p.set_defaults(func=cmd_compare)

    bound_p = sub.add_parser("bound", parents=[common],
                             help="solve the exact lifetime bound on a tiny instance")
    bound_p.add_argument("instance", nargs="?", help="instance file (matrix format)")
    bound_p.add_argument("--from-network", action="store_true",
                         help="build the instance from a deployed network")
    bound_p.add_argument("--nodes", type=int, default=4)
    bound_p.add_argument("--seed", type=int, default=1)
    bound_p.add_argument("--k-max", type=int, default=16)
    bound_p.add_argument("--max-range", type=float, default=None)
    bound_p.add_argument("--check-sim", action="store_true",
                         help="also run LEACH on the network and assert "
                              "lifetime <= K*")
    bound_p.set_defaults(func=cmd_bound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
