"""Command-line interface for rkem."""

import argparse
import sys
from pathlib import Path
from typing import Any, Dict, Optional

from loguru import logger

from . import __version__
from .config import Settings, get_settings
from .consolidation import (
    JITTER_FAMILIES,
    DelayModel,
    consolidation_curve,
    exchange_frame,
    parse_sweep,
    simulate_exchange,
)
from .errors import (
    AttackGuardError,
    BudgetError,
    DecapFailure,
    DimensionError,
    FormatError,
    ParamError,
    RkemError,
)
from .fileformat import (
    ciphertext_to_bytes,
    load_ciphertext,
    load_cr_bits,
    load_private_key,
    load_public_key,
    private_key_to_bytes,
    public_key_to_bytes,
    save_cr_bits,
    write_bytes,
)
from .formatter import format_table, to_json
from .kem import CommonRandomnessView, SharedKey, decapsulate, default_budget, encapsulate
from .keygen import CommonRandomnessConfig, keygen
from .params import PRESET_SPECS, ParamSet, from_preset
from .randomness import Stream, fresh_seed, make_rng
from .security import comparison_table
from .toy_attack import exhaustive_attack, make_instance

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DECAP = 3
EXIT_IO = 4


def _configure_logging(settings: Settings, verbosity: int) -> None:
    level = settings.log_level
    if verbosity == 1:
        level = "INFO"
    elif verbosity >= 2:
        level = "DEBUG"
    logger.remove()
    logger.add(sys.stderr, level=level, format="<level>{level: <8}</level> {message}")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    seed = fresh_seed()
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def _emit(args, payload: Dict[str, Any], text: str) -> None:
    print(to_json(payload) if args.json else text)


def _parse_key(params: ParamSet, text: str) -> SharedKey:
    try:
        return SharedKey.from_hex(params, text)
    except ValueError as exc:
        raise ParamError(f"--key must be hex below 2^{params.sec}, got {text!r}") from exc


# -- subcommands ----------------------------------------------------------


def cmd_keygen(args, settings: Settings) -> int:
    """Write a public and private key file for a preset."""
    params = from_preset(args.preset)
    seed = _seed(args)
    cr_config = CommonRandomnessConfig(r1_size=args.r1_size, r2_size=args.r2_size, full_mask=args.cr_full_mask)
    pk, sk, _ = keygen(params, make_rng(seed, Stream.KEYGEN), cr_config, max_retries=settings.resample_limit)
    write_bytes(args.out_pub, public_key_to_bytes(pk))
    write_bytes(args.out_priv, private_key_to_bytes(sk))
    _emit(
        args,
        {"preset": args.preset, "seed": seed, "pub": str(args.out_pub), "priv": str(args.out_priv),
         "R1": int(pk.R1.size), "R2": int(pk.R2.size)},
        f"Keys written to: {args.out_pub}, {args.out_priv}",
    )
    return EXIT_OK


def cmd_encap(args, settings: Settings) -> int:
    """Encapsulate a random or given key to a public key; prints the key as hex."""
    pk = load_public_key(args.pub)
    seed = _seed(args)
    cr = load_cr_bits(args.cr_bits, pk) if args.cr_bits else CommonRandomnessView.empty()
    rng = make_rng(seed, Stream.ENCAP)
    key = _parse_key(pk.params, args.key) if args.key else SharedKey.random(pk.params, rng)
    budget = default_budget(pk) if args.budget is None else args.budget
    ct, trace = encapsulate(pk, key, rng, cr, budget)
    write_bytes(args.ct, ciphertext_to_bytes(ct))
    logger.info(f"encapsulated with w={budget}, w1={trace.w1.tolist()}")
    _emit(args, {"key": key.hex(), "seed": seed, "budget": budget, "ct": str(args.ct)}, key.hex())
    return EXIT_OK


def cmd_decap(args, settings: Settings) -> int:
    sk = load_private_key(args.priv)
    ct = load_ciphertext(args.ct, sk)
    cr = load_cr_bits(args.cr_bits, sk) if args.cr_bits else CommonRandomnessView.empty()
    key = decapsulate(sk, ct, cr)
    _emit(args, {"key": key.hex()}, key.hex())
    return EXIT_OK


def cmd_analyze(args, settings: Settings) -> int:
    presets = args.preset or ["rm16", "rm32"]
    frame = comparison_table(presets)
    fmt = "json" if args.json else args.format
    print(format_table(frame, fmt))
    return EXIT_OK


def _delay_model(args, packets: int) -> DelayModel:
    return DelayModel(
        loops=args.loops,
        packets=packets,
        base_delay=args.base_delay,
        jitter=args.jitter,
        jitter_scale=args.jitter_scale,
        private_noise=args.private_noise,
    )


def cmd_simulate_rtt(args, settings: Settings) -> int:
    """Run the looped packet exchange.

    With --pub the exchange has |R1| + |R2| packets and each node's bits can be
    written as a cr-bits file. Otherwise the per-packet CSV goes to --out or stdout.
    """
    seed = _seed(args)
    key = load_public_key(args.pub) if args.pub else None
    packets = args.packets
    if key is not None:
        packets = max(2, int(key.R1.size + key.R2.size))
    samples, bits = simulate_exchange(_delay_model(args, packets), make_rng(seed, Stream.RTT))
    frame = exchange_frame(samples, bits)

    if key is not None:
        n1 = key.R1.size
        for path, arr in ((args.bits_a, bits.bits_a), (args.bits_b, bits.bits_b)):
            if path:
                save_cr_bits(path, CommonRandomnessView(bits_r1=arr[:n1], bits_r2=arr[n1:n1 + key.R2.size]))
    if args.out:
        Path(args.out).write_text(frame.to_csv(index=False), encoding="utf-8")

    summary = {"seed": seed, "packets": packets, "disagreement_rate": bits.disagreement_rate}
    if args.json:
        print(to_json(summary))
    elif args.out or key is not None:
        print(f"disagreement rate: {bits.disagreement_rate:.4f} over {packets} packets")
    else:
        print(format_table(frame, "csv"), end="")
    return EXIT_OK


def cmd_simulate_consolidation(args, settings: Settings) -> int:
    params = from_preset(args.preset)
    seed = _seed(args)
    workers = args.workers or settings.workers
    frame = consolidation_curve(
        params, parse_sweep(args.eps_sweep), trials=args.trials, w_inj=args.w_inj, seed=seed, workers=workers
    )
    if args.out:
        Path(args.out).write_text(frame.to_csv(index=False), encoding="utf-8")
    print(format_table(frame, "json" if args.json else "csv"), end="" if not args.json else "\n")
    return EXIT_OK


def cmd_attack_toy(args, settings: Settings) -> int:
    params = ParamSet.derive(args.sec, 3, strict=False)
    seed = _seed(args)
    budget = params.t if args.budget is None else args.budget
    cr_config = CommonRandomnessConfig(r1_size=args.r1_size, r2_size=args.r2_size)
    pk, _, ct, symbols = make_instance(params, seed, budget, cr_config)
    result = exhaustive_attack(
        pk,
        ct,
        budget,
        workers=args.workers or settings.workers,
        limit_log2=settings.attack_limit_log2,
        offset_limit_log2=settings.attack_offset_limit_log2,
    )
    payload = result.to_dict()
    payload.update(seed=seed, true_symbols=list(symbols), true_key_accepted=symbols in result.acceptors)
    print(to_json(payload))
    return EXIT_OK


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Machine-readable JSON on stdout")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug logging")

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=int, default=None, help="Master seed (default: fresh entropy, printed)")

    cr_sizes = argparse.ArgumentParser(add_help=False)
    cr_sizes.add_argument("--r1-size", type=int, default=0, help="|R1| common-randomness input positions")
    cr_sizes.add_argument("--r2-size", type=int, default=0, help="|R2| common-randomness output positions")

    presets = sorted(PRESET_SPECS)
    parser = argparse.ArgumentParser(
        prog="rkem",
        description="rkem: randomized code-based key encapsulation and consolidation",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s keygen --preset rm16 --seed 7 --out-pub k.pub --out-priv k.priv
  %(prog)s encap --pub k.pub --ct m.ct --seed 8
  %(prog)s decap --priv k.priv --ct m.ct
  %(prog)s analyze --preset rm16 --format csv
  %(prog)s simulate consolidation --preset rm16 --eps-sweep 0:0.1:5 --trials 200
  %(prog)s attack toy --sec 7 --seed 1
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", parents=[common, seeded, cr_sizes], help="Generate a key pair")
    p.add_argument("--preset", choices=presets, default="rm16")
    p.add_argument("--out-pub", required=True, type=Path)
    p.add_argument("--out-priv", required=True, type=Path)
    p.add_argument("--cr-full-mask", action="store_true", help="Put every input coordinate under R1")
    p.set_defaults(handler=cmd_keygen)

    p = sub.add_parser("encap", parents=[common, seeded], help="Encapsulate a key to a public key")
    p.add_argument("--pub", required=True, type=Path)
    p.add_argument("--ct", required=True, type=Path, help="Ciphertext output file")
    p.add_argument("--key", default=None, help="Key to send as hex (default: random)")
    p.add_argument("--budget", type=int, default=None, help="Injected error weight per block (default: t, 0 in full-mask mode)")
    p.add_argument("--cr-bits", type=Path, default=None, help="Bob's common-randomness bits")
    p.set_defaults(handler=cmd_encap)

    p = sub.add_parser("decap", parents=[common], help="Recover the key from a ciphertext")
    p.add_argument("--priv", required=True, type=Path)
    p.add_argument("--ct", required=True, type=Path)
    p.add_argument("--cr-bits", type=Path, default=None, help="Alice's common-randomness bits")
    p.set_defaults(handler=cmd_decap)

    p = sub.add_parser("analyze", parents=[common], help="Key size and security accounting")
    p.add_argument("--preset", action="append", choices=presets, help="Preset to report (repeatable; default rm16 and rm32)")
    p.add_argument("-f", "--format", choices=["text", "csv"], default="text")
    p.set_defaults(handler=cmd_analyze)

    sim = sub.add_parser("simulate", help="Round-trip-time and consolidation simulators")
    sim_sub = sim.add_subparsers(dest="simulation", required=True)

    p = sim_sub.add_parser("rtt", parents=[common, seeded], help="Looped packet exchange and bit extraction")
    p.add_argument("--packets", type=int, default=1000)
    p.add_argument("--loops", type=int, default=2)
    p.add_argument("--base-delay", type=float, default=10.0)
    p.add_argument("--jitter", choices=JITTER_FAMILIES, default="exponential")
    p.add_argument("--jitter-scale", type=float, default=1.0)
    p.add_argument("--private-noise", type=float, default=0.2)
    p.add_argument("--out", type=Path, default=None, help="Exchange CSV (default: stdout)")
    p.add_argument("--pub", type=Path, default=None, help="Size the exchange to this key's |R1| + |R2|")
    p.add_argument("--bits-a", type=Path, default=None, help="cr-bits file for node A (needs --pub)")
    p.add_argument("--bits-b", type=Path, default=None, help="cr-bits file for node B (needs --pub)")
    p.set_defaults(handler=cmd_simulate_rtt)

    p = sim_sub.add_parser("consolidation", parents=[common, seeded], help="Block and key error rate vs epsilon")
    p.add_argument("--preset", choices=presets, default="rm16")
    p.add_argument("--eps-sweep", default="0:0.1:5", help="lo:hi:steps")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--w-inj", type=int, default=0, help="Injected error weight per block")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", type=Path, default=None, help="Also write the curve CSV here")
    p.set_defaults(handler=cmd_simulate_consolidation)

    attack = sub.add_parser("attack", help="Attacks at toy scale")
    attack_sub = attack.add_subparsers(dest="attack", required=True)

    p = attack_sub.add_parser("toy", parents=[common, seeded, cr_sizes], help="Exhaustive codeword search")
    p.add_argument("--sec", type=int, default=7, help="Key length of the v=3 toy set")
    p.add_argument("--budget", type=int, default=None, help="Injected error weight (default: t)")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(handler=cmd_attack_toy)

    return parser


def run(argv: Optional[list] = None) -> int:
    """Parse ``argv`` and dispatch to a subcommand.

    Args:
        argv: Arguments without the program name; defaults to ``sys.argv[1:]``.

    Returns:
        0 on success, 2 on usage, parameter or key-value errors, 3 on
        DecapFailure, 4 on I/O or file format errors.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    settings = get_settings()
    _configure_logging(settings, getattr(args, "verbose", 0))
    if getattr(args, "json", None) is None:
        args.json = False

    try:
        return args.handler(args, settings)
    except DecapFailure as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_DECAP
    except (BudgetError, ParamError, AttackGuardError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_IO
    except DimensionError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_IO
    except (RkemError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: Optional[list] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
