"""Command-line front end.

Standard output carries data only; diagnostics and error reasons go to
standard error. Exit codes: 0 success, 2 invalid configuration, 3 resource
limit, 4 strong connectivity required but absent.
"""

import argparse
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from core.blocks import (Block, MessageSemantics, MessageSeq, PhasePoint,
                         validate_block_size)
from core.cbc import (bits_from_hex, blocks_to_bits, cbc_decrypt, cbc_encrypt,
                      pad, parse_bits, unpad)
from core.chaos import (chaos_verdict, make_periodic_point, make_transitive_point,
                        sensitivity_certificate)
from core.ciphers import KeyedPermutation, parse_cipher_spec
from core.config import get_config
from core.dynamics import random_point, trajectory
from core.errors import CbcChaosError, ConfigError, NotStronglyConnectedError
from core.exporter import (export_csv, export_dot, hypothesis_failure_to_dict,
                           periodic_to_dict, sensitivity_to_dict, to_json,
                           transitive_to_dict, verdict_to_dict, write_export)
from core.graph import EXPLICIT, IMPLICIT, TransitionGraph
from core.log import configure_logging, get_logger
from core.version import APP_DESCRIPTION, get_full_version_string

logger = get_logger('cli')

FORMATS = ('json', 'dot', 'csv', 'text')

# Allowed output formats and default, per command
COMMAND_FORMATS = {
    'analyze': (('json',), 'json'),
    'graph': (('dot', 'csv'), 'dot'),
    'simulate': (('text', 'json'), 'text'),
    'cbc': (('text', 'json'), 'text'),
    'witness': (('json',), 'json'),
}


@dataclass
class RunConfig:
    """Validated settings shared by every command."""

    command: str
    n: int
    cipher: KeyedPermutation
    semantics: MessageSemantics
    output_format: str
    q: int
    seed: int
    max_n: int


def epsilon_to_q(text: str) -> int:
    """
    Round a decimal epsilon down to a power 10^(-q).

    Returns:
        The smallest q >= 0 with 10^(-q) <= epsilon.
    """
    try:
        epsilon = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"epsilon must be a decimal number, got {text!r}") from None
    if epsilon <= 0:
        raise ConfigError(f"epsilon must be positive, got {text}")
    if epsilon >= 1:
        return 0
    num, den = epsilon.numerator, epsilon.denominator
    # lower bound on log10(den / num) from bit lengths, then step up
    q = max(0, (den.bit_length() - num.bit_length() - 1) * 30102 // 100000)
    while num * 10 ** q < den:
        q += 1
    return q


def parse_labels(text: Optional[str]) -> List[int]:
    """Comma-separated decimal values; empty or None gives []."""
    if text is None or not text.strip():
        return []
    try:
        return [int(tok) for tok in text.split(',')]
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None


def build_config(args: argparse.Namespace) -> RunConfig:
    """Validate every shared field before any computation."""
    config = get_config()
    max_n = config.effective_max_n(allow_override=args.allow_large_n)
    n = validate_block_size(args.n, max_n)
    semantics = MessageSemantics.from_name(args.semantics)
    cipher = parse_cipher_spec(args.cipher, n)

    allowed, default = COMMAND_FORMATS[args.command]
    output_format = args.format or default
    if output_format not in allowed:
        raise ConfigError(
            f"{args.command} supports --format {' or '.join(allowed)}, got {output_format}")

    q = 0
    if getattr(args, 'epsilon', None) is not None:
        q = epsilon_to_q(args.epsilon)
        logger.info("epsilon %s rounded down to 10^-%d", args.epsilon, q)
    elif getattr(args, 'q', None) is not None:
        if args.q < 0:
            raise ConfigError(f"--q must be non-negative, got {args.q}")
        q = args.q
    seed = config.default_seed if args.seed is None else args.seed
    return RunConfig(args.command, n, cipher, semantics, output_format, q, seed, max_n)


def _emit(text: str):
    sys.stdout.write(text if text.endswith('\n') else text + '\n')


# ==================== Commands ====================

def cmd_analyze(config: RunConfig, args: argparse.Namespace) -> int:
    started = time.perf_counter()
    verdict = chaos_verdict(config.cipher, config.n, config.semantics,
                            args.mode, config.max_n)
    elapsed = (time.perf_counter() - started) * 1000
    _emit(to_json(verdict_to_dict(verdict, elapsed)))
    return 0


def cmd_graph(config: RunConfig, args: argparse.Namespace) -> int:
    G = TransitionGraph(config.cipher, config.semantics)
    text = export_csv(G) if config.output_format == 'csv' else export_dot(G)
    if args.output:
        success, message = write_export(text, args.output)
        if not success:
            raise ConfigError(message)
        logger.info(message)
        return 0
    _emit(text)
    return 0


def cmd_simulate(config: RunConfig, args: argparse.Namespace) -> int:
    n = config.n
    iv = Block(args.iv, n)
    message = MessageSeq.of(parse_labels(args.message), n, config.semantics)
    result = trajectory(config.cipher, PhasePoint(iv, message), len(message))
    if config.output_format == 'json':
        _emit(to_json({
            'states': result.states,
            'ciphertext': [b.value for b in result.ciphertext_blocks],
            'tail_labels_consumed': result.tail_labels_consumed,
        }))
        return 0
    lines = [f"X^{t} state={p.state.value} ({p.state.to_binary()})"
             for t, p in enumerate(result.points)]
    lines.append("ciphertext: " + ','.join(str(b.value) for b in result.ciphertext_blocks))
    _emit('\n'.join(lines))
    return 0


def _input_bits(args: argparse.Namespace) -> str:
    if args.hex_bits is not None:
        return bits_from_hex(args.input or '', args.hex_bits)
    return parse_bits(args.input or '')


def cmd_cbc(config: RunConfig, args: argparse.Namespace) -> int:
    n = config.n
    iv = Block(args.iv, n)
    if args.action == 'encrypt':
        bits = _input_bits(args)
        if args.pad:
            blocks = pad(bits, n)
        else:
            if len(bits) % n:
                raise ConfigError(f"{len(bits)} bits is not a multiple of n={n}; use --pad")
            blocks = [Block(int(bits[i:i + n], 2), n) for i in range(0, len(bits), n)]
        values = [b.value for b in cbc_encrypt(config.cipher, iv, blocks)]
        if config.output_format == 'json':
            _emit(to_json({'blocks': values}))
        else:
            _emit(','.join(str(v) for v in values))
        return 0

    ciphertext = [Block(v, n) for v in parse_labels(args.input)]
    plain = cbc_decrypt(config.cipher, iv, ciphertext)
    bits = unpad(plain) if args.pad else blocks_to_bits(plain)
    if config.output_format == 'json':
        _emit(to_json({'blocks': [b.value for b in plain], 'bits': bits}))
    else:
        _emit(bits)
    return 0


def _endpoint(rng: np.random.Generator, config: RunConfig, state: Optional[int],
              message: Optional[str]) -> PhasePoint:
    if state is None and message is None:
        return random_point(rng, config.n, config.semantics, config.q + 3)
    if state is None:
        state = int(rng.integers(0, 1 << config.n))
    return PhasePoint.of(state, parse_labels(message), config.n, config.semantics)


def cmd_witness(config: RunConfig, args: argparse.Namespace) -> int:
    rng = np.random.default_rng(config.seed)
    anchor = _endpoint(rng, config, args.state, args.message)
    cipher, n, semantics, q = config.cipher, config.n, config.semantics, config.q
    try:
        if args.kind == 'periodic':
            doc = periodic_to_dict(
                make_periodic_point(cipher, n, semantics, anchor, q, config.max_n),
                cipher.descriptor)
        elif args.kind == 'transitive':
            target = _endpoint(rng, config, args.to_state, args.to_message)
            doc = transitive_to_dict(
                make_transitive_point(cipher, n, semantics, anchor, target, q, config.max_n),
                cipher.descriptor)
        else:
            doc = sensitivity_to_dict(
                sensitivity_certificate(cipher, n, semantics, anchor, q), cipher.descriptor)
    except NotStronglyConnectedError as e:
        _emit(to_json(hypothesis_failure_to_dict(args.kind, cipher.descriptor,
                                                 anchor, e.verdict)))
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    _emit(to_json(doc))
    return 0


COMMANDS = {
    'analyze': cmd_analyze,
    'graph': cmd_graph,
    'simulate': cmd_simulate,
    'cbc': cmd_cbc,
    'witness': cmd_witness,
}


# ==================== Argument parsing ====================

def _common(parser: argparse.ArgumentParser):
    parser.add_argument('--n', type=int, required=True, help='bits per block')
    parser.add_argument('--cipher', default='identity',
                        help='identity | negation | caesar:<k> | table:<path>')
    parser.add_argument('--semantics', default='bit-index',
                        help='bit-index | full-block | xor')
    parser.add_argument('--format', choices=FORMATS, help='output format')
    parser.add_argument('--seed', type=int, help='seed for randomized choices (default 0)')
    parser.add_argument('--allow-large-n', action='store_true',
                        help='honor the CBCCHAOS_MAX_N environment override')
    parser.add_argument('--verbose', action='store_true', help='debug diagnostics on stderr')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='cbcchaos', description=APP_DESCRIPTION)
    parser.add_argument('--version', action='version', version=get_full_version_string())
    sub = parser.add_subparsers(dest='command', required=True)

    analyze = sub.add_parser('analyze', help='strong connectivity and chaos verdict')
    _common(analyze)
    analyze.add_argument('--mode', choices=(IMPLICIT, EXPLICIT), default=IMPLICIT)

    graph = sub.add_parser('graph', help='DOT graph or CSV edge table')
    _common(graph)
    graph.add_argument('--output', help='write to a file instead of stdout')

    simulate = sub.add_parser('simulate', help='iterate the mode from (iv, message)')
    _common(simulate)
    simulate.add_argument('--iv', type=int, default=0)
    simulate.add_argument('--message', default='', help='comma-separated labels')

    cbc = sub.add_parser('cbc', help='reference CBC codec with bit padding')
    _common(cbc)
    cbc.add_argument('action', choices=('encrypt', 'decrypt'))
    cbc.add_argument('--iv', type=int, default=0)
    cbc.add_argument('--input', default='',
                     help='encrypt: bit string (or hex with --hex-bits); '
                          'decrypt: comma-separated blocks')
    cbc.add_argument('--hex-bits', type=int, help='read --input as hex of this many bits')
    cbc.add_argument('--pad', dest='pad', action='store_true', default=True)
    cbc.add_argument('--no-pad', dest='pad', action='store_false')

    witness = sub.add_parser('witness', help='periodic, transitive or sensitivity witness')
    _common(witness)
    witness.add_argument('kind', choices=('periodic', 'transitive', 'sensitivity'))
    witness.add_argument('--state', type=int, help='anchor/source state (random if absent)')
    witness.add_argument('--message', help='anchor/source labels')
    witness.add_argument('--to-state', type=int, help='target state (random if absent)')
    witness.add_argument('--to-message', help='target labels')
    group = witness.add_mutually_exclusive_group()
    group.add_argument('--q', type=int, default=1, help='neighbourhood radius 10^-q')
    group.add_argument('--epsilon', help='decimal radius, rounded down to 10^-q')
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    try:
        config = build_config(args)
        return COMMANDS[args.command](config, args)
    except CbcChaosError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == '__main__':
    sys.exit(main())
