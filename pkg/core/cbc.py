"""Reference CBC codec, bit padding, and the trajectory equivalence check."""

import re
from dataclasses import dataclass
from typing import List, Optional, Sequence

from core.blocks import Block, MessageSemantics, MessageSeq, PhasePoint
from core.ciphers import KeyedPermutation
from core.dynamics import trajectory
from core.errors import ConfigError
from core.log import get_logger

logger = get_logger('cbc')


def _values(blocks: Sequence, n: int) -> List[int]:
    values = []
    for b in blocks:
        if isinstance(b, Block):
            if b.n != n:
                raise ConfigError(f"block {b} has n={b.n}, expected n={n}")
            values.append(b.value)
        else:
            values.append(Block(int(b), n).value)
    return values


def cbc_encrypt(cipher: KeyedPermutation, iv: Block,
                plaintext: Sequence[Block]) -> List[Block]:
    """
    Encrypt with cipher block chaining.

    c_0 = encrypt(m_0 XOR iv), c_i = encrypt(m_i XOR c_(i-1)).
    """
    n = cipher.n
    previous = _values([iv], n)[0]
    out = []
    for m in _values(plaintext, n):
        previous = cipher.encrypt(m ^ previous)
        out.append(Block(previous, n))
    return out


def cbc_decrypt(cipher: KeyedPermutation, iv: Block,
                ciphertext: Sequence[Block]) -> List[Block]:
    """
    Decrypt with cipher block chaining.

    m_0 = decrypt(c_0) XOR iv, m_i = decrypt(c_i) XOR c_(i-1).
    """
    n = cipher.n
    previous = _values([iv], n)[0]
    out = []
    for c in _values(ciphertext, n):
        out.append(Block(cipher.decrypt(c) ^ previous, n))
        previous = c
    return out


# ==================== Padding ====================

def parse_bits(text: str) -> str:
    """Validate an ASCII '0'/'1' bit string (empty allowed)."""
    bits = text.strip()
    if bits and not re.fullmatch(r'[01]+', bits):
        raise ConfigError(f"bit string may only contain 0 and 1, got {text!r}")
    return bits


def bits_from_hex(text: str, bit_length: int) -> str:
    """
    Convert hex to a bit string of an explicit length.

    Args:
        text: Hex digits, optional 0x prefix.
        bit_length: Number of bits to keep; the value must fit.

    Returns:
        The '0'/'1' string, left-padded with zeros.
    """
    digits = text.strip().lower()
    if digits.startswith('0x'):
        digits = digits[2:]
    try:
        value = int(digits or '0', 16)
    except ValueError:
        raise ConfigError(f"not a hex string: {text!r}") from None
    if bit_length < 0 or value >> bit_length:
        raise ConfigError(f"hex value {text!r} does not fit in {bit_length} bits")
    return format(value, f'0{bit_length}b') if bit_length else ''


def pad(bits: str, n: int) -> List[Block]:
    """
    Append a single 1 bit, then as few 0 bits as complete the last block.

    Every message is padded: a message already filling whole blocks gains a
    full padding block.
    """
    bits = parse_bits(bits) + '1'
    bits += '0' * (-len(bits) % n)
    return [Block(int(bits[i:i + n], 2), n) for i in range(0, len(bits), n)]


def blocks_to_bits(blocks: Sequence[Block]) -> str:
    return ''.join(b.to_binary() for b in blocks)


def unpad(blocks: Sequence[Block]) -> str:
    """Strip the trailing 1 and 0s added by pad()."""
    if not blocks:
        raise ConfigError("cannot unpad an empty block list")
    bits = blocks_to_bits(blocks)
    end = bits.rfind('1')
    if end < 0:
        raise ConfigError("not a padded message: final content is all zeros")
    if len(bits) - end > blocks[-1].n:
        raise ConfigError("not a padded message: padding spans more than one block")
    return bits[:end]


# ==================== Equivalence with the dynamical system ====================

@dataclass
class EquivalenceReport:
    """Comparison of trajectory states against cbc_encrypt output."""

    equal: bool
    applicable: bool
    first_divergence: Optional[int]
    trajectory_blocks: List[int]
    cbc_blocks: List[int]


def verify_cbc_equivalence(cipher: KeyedPermutation, iv: Block,
                           plaintext: Sequence[Block],
                           semantics: MessageSemantics = MessageSemantics.TRUE_XOR
                           ) -> EquivalenceReport:
    """
    Run the trajectory from (iv, plaintext) and the reference codec side by side.

    Only the TRUE_XOR semantics is the literal CBC chaining; other semantics are
    still iterated (when the labels fit) but reported as not applicable.
    """
    n = cipher.n
    values = _values(plaintext, n)
    reference = [b.value for b in cbc_encrypt(cipher, iv, values)]
    applicable = semantics is MessageSemantics.TRUE_XOR
    try:
        start = PhasePoint(iv, MessageSeq.of(values, n, semantics))
        states = [b.value for b in trajectory(cipher, start, len(values)).ciphertext_blocks]
    except ConfigError as e:
        logger.debug("labels do not fit %s semantics: %s", semantics.value, e)
        states = []
    divergence = next(
        (i for i, (a, b) in enumerate(zip(states, reference)) if a != b),
        None,
    )
    if divergence is None and len(states) != len(reference):
        divergence = min(len(states), len(reference))
    equal = divergence is None
    return EquivalenceReport(
        equal=equal and applicable,
        applicable=applicable,
        first_divergence=divergence,
        trajectory_blocks=states,
        cbc_blocks=reference,
    )
