#!/usr/bin/env python3
"""Single-codeword and whole-key error rate vs disagreement rate for both RM codes.

Usage:
  python3 scripts/consolidation_curves.py \
    --preset rm16 --preset rm32 \
    --eps-sweep 0.01:0.15:8 \
    --trials 2000 \
    --workers 4 \
    --out output/consolidation.csv \
    --plot output/consolidation.png
"""

import argparse
import sys
from pathlib import Path
from typing import List

import pandas as pd
from loguru import logger

from rkem.consolidation import consolidation_curve, parse_sweep
from rkem.errors import ParamError
from rkem.params import from_preset


def _plot(frame: pd.DataFrame, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for preset, group in frame.groupby("preset"):
        line = ax.semilogy(group["epsilon"], group["block_error_rate"].clip(lower=1e-7), marker="o", label=preset)
        if "oracle_block_error_rate" in group:
            ax.semilogy(group["epsilon"], group["oracle_block_error_rate"], linestyle="--", color=line[0].get_color())
    ax.set_xlabel("disagreement rate")
    ax.set_ylabel("single codeword error rate")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _main() -> int:
    p = argparse.ArgumentParser(description="Consolidation error curves")
    p.add_argument("--preset", action="append", help="Preset (repeatable; default rm16 and rm32)")
    p.add_argument("--eps-sweep", default="0.01:0.15:8", help="lo:hi:steps")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--w-inj", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="output/consolidation.csv")
    p.add_argument("--plot", default="", help="PNG path (needs matplotlib)")
    args = p.parse_args()

    try:
        eps_values = parse_sweep(args.eps_sweep)
    except ParamError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2
    frames: List[pd.DataFrame] = []
    for name in args.preset or ["rm16", "rm32"]:
        logger.info(f"sweeping {name} over {len(eps_values)} points")
        frame = consolidation_curve(
            from_preset(name), eps_values, trials=args.trials, w_inj=args.w_inj, seed=args.seed, workers=args.workers
        )
        frame.insert(0, "preset", name)
        frames.append(frame)
    result = pd.concat(frames, ignore_index=True)

    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    result.to_csv(out_path, index=False)
    print(f"Curve written to: {out_path}")

    if args.plot:
        _plot(result, Path(args.plot))
        print(f"Plot written to: {args.plot}")
    return 0


if __name__ == "__main__":
    sys.exit(_main())
