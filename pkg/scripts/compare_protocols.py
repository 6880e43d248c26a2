#!/usr/bin/env python3
"""Sweep all four protocols over shared topologies and print a summary table.

Thin wrapper over `wsnsim compare`: writes the long-format CSV, per-run
traces/summaries/topologies and aggregate stats, then prints the
per-protocol means from the aggregate on stdout.

    python scripts/compare_protocols.py --seeds 1..20 --out out/comparison
"""

import argparse
import csv
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from wsnsim.cli import build_parser, cmd_compare  # noqa: E402
from wsnsim.protocols import PROTOCOL_NAMES  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", default="1..20")
    parser.add_argument("--out", default="out/comparison")
    parser.add_argument("--max-rounds", type=int, default=None)
    args = parser.parse_args()

    argv = ["compare", "--protocol", ",".join(PROTOCOL_NAMES),
            "--seeds", args.seeds, "--out", args.out]
    if args.max_rounds is not None:
        argv += ["--max-rounds", str(args.max_rounds)]
    t0 = time.time()
    code = cmd_compare(build_parser().parse_args(argv))
    if code != 0:
        return code

    with open(Path(args.out) / "summary_stats.csv", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    print(f"\n{'protocol':8s} {'stability':>12s} {'lifetime':>12s} "
          f"{'packets':>12s} {'mean CHs':>9s}")
    for row in rows:
        print(f"{row['protocol']:8s} "
              f"{float(row['stability_period_mean']):12.1f} "
              f"{float(row['network_lifetime_mean']):12.1f} "
              f"{float(row['total_packets_to_bs_mean']):12.1f} "
              f"{float(row['mean_ch_count_mean']):9.2f}")
    print(f"\n({time.time() - t0:.1f}s; artifacts in {args.out}/)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
