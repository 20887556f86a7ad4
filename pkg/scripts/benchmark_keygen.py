#!/usr/bin/env python3
"""Time keygen, encap and decap per preset.

Usage:
  python3 scripts/benchmark_keygen.py \
    --preset rm16 --preset rm32 \
    --repeat 3 \
    --out output/rkem-benchmark.jsonl
"""

import argparse
import json
import time
from pathlib import Path
from typing import Any, Dict, List

from rkem.kem import SharedKey, decapsulate, encapsulate
from rkem.keygen import keygen
from rkem.params import from_preset
from rkem.randomness import Stream, make_rng


def _timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    return time.perf_counter() - start, out


def _main() -> int:
    p = argparse.ArgumentParser(description="Benchmark rkem key generation and KEM operations")
    p.add_argument("--preset", action="append", help="Preset (repeatable; default rm16 and rm32)")
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="output/rkem-benchmark.jsonl")
    args = p.parse_args()

    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)

    records: List[Dict[str, Any]] = []
    for name in args.preset or ["rm16", "rm32"]:
        params = from_preset(name)
        for i in range(args.repeat):
            t_keygen, (pk, sk, _) = _timed(keygen, params, make_rng(args.seed, Stream.KEYGEN, i))
            rng = make_rng(args.seed, Stream.ENCAP, i)
            key = SharedKey.random(params, rng)
            t_encap, (ct, _) = _timed(encapsulate, pk, key, rng, None, params.t)
            t_decap, got = _timed(decapsulate, sk, ct)
            records.append(
                {
                    "preset": name,
                    "run": i,
                    "keygen_s": round(t_keygen, 4),
                    "encap_s": round(t_encap, 4),
                    "decap_s": round(t_decap, 4),
                    "roundtrip_ok": got == key,
                }
            )
            print(f"{name} run {i}: keygen {t_keygen:.3f}s encap {t_encap:.3f}s decap {t_decap:.3f}s")

    with out_path.open("w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")
    print(f"Benchmark written to: {out_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(_main())
