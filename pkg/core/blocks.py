"""Blocks, message sequences and phase-space points.

Bits are indexed from 0 at the most-significant (leftmost) position, so a
1-based bit j counted from the left is bit ``j - 1`` here:
``bit(Block(2, n=2), 0) == 1`` because 2 reads as (1,0).

Infinite messages are finite prefixes followed by zero labels forever.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple

from core.errors import ConfigError, ResourceLimitError

DEFAULT_MAX_N = 20

BlockSize = int


def check_block_size(n) -> BlockSize:
    """Reject a block size that is not an integer >= 1 (no ceiling)."""
    if isinstance(n, bool) or not isinstance(n, int):
        raise ConfigError(f"block size must be an integer, got {n!r}")
    if n < 1:
        raise ConfigError(f"block size must be at least 1, got {n}")
    return n


def validate_block_size(n, max_n: Optional[int] = None) -> BlockSize:
    """
    Check that n is a usable block size within the ceiling.

    Args:
        n: Number of bits per block.
        max_n: Ceiling to enforce. If None, uses DEFAULT_MAX_N.

    Returns:
        n as an int.
    """
    check_block_size(n)
    ceiling = DEFAULT_MAX_N if max_n is None else max_n
    if n > ceiling:
        raise ResourceLimitError(
            f"block size {n} exceeds the configured maximum {ceiling} "
            f"(raise it with CBCCHAOS_MAX_N and --allow-large-n)"
        )
    return n


class MessageSemantics(Enum):
    """How a message label acts on the internal state."""

    BIT_INDEX = 'bit-index'     # flip the m-th bit
    FULL_BLOCK = 'full-block'   # keep x_j where m_j = 1, negate it elsewhere
    TRUE_XOR = 'xor'            # literal CBC chaining: x XOR m

    @classmethod
    def from_name(cls, name: str) -> 'MessageSemantics':
        """Parse a CLI name ('bit-index', 'full-block', 'xor') or an enum name."""
        key = name.strip().lower()
        for member in cls:
            if key in (member.value, member.name.lower()):
                return member
        raise ConfigError(
            f"unknown semantics {name!r} (expected bit-index, full-block or xor)"
        )

    def label_count(self, n: int) -> int:
        """Size of the label range for blocks of n bits."""
        if self is MessageSemantics.BIT_INDEX:
            return n
        return 1 << n

    def check_label(self, label: int, n: int) -> int:
        """Reject a label outside the semantics-dependent range."""
        if isinstance(label, bool) or not isinstance(label, int):
            raise ConfigError(f"message label must be an integer, got {label!r}")
        if not 0 <= label < self.label_count(n):
            raise ConfigError(
                f"label {label} out of range [0, {self.label_count(n) - 1}] "
                f"for {self.value} semantics with n={n}"
            )
        return label


@dataclass(frozen=True)
class Block:
    """An n-bit value."""

    value: int
    n: int

    def __post_init__(self):
        check_block_size(self.n)
        if isinstance(self.value, bool) or not isinstance(self.value, int):
            raise ConfigError(f"block value must be an integer, got {self.value!r}")
        if not 0 <= self.value < (1 << self.n):
            raise ConfigError(f"block value {self.value} out of range for n={self.n}")

    def bit(self, j: int) -> int:
        """The j-th bit counted from the left (0-based)."""
        return bit(self, j)

    def bits(self) -> Tuple[int, ...]:
        """All bits, leftmost first."""
        return tuple(bit(self, j) for j in range(self.n))

    def to_binary(self) -> str:
        """Binary rendering padded to n digits, e.g. '10'."""
        return format(self.value, f'0{self.n}b')

    def __str__(self) -> str:
        return f"{self.value} ({','.join(str(b) for b in self.bits())})"


def bit(x: Block, j: int) -> int:
    """
    Extract one bit of a block.

    Args:
        x: The block.
        j: Bit index in [0, n-1], 0 being the most-significant bit.

    Returns:
        0 or 1.
    """
    if isinstance(j, bool) or not isinstance(j, int) or not 0 <= j < x.n:
        raise ConfigError(f"bit index {j!r} out of range [0, {x.n - 1}]")
    return (x.value >> (x.n - 1 - j)) & 1


def assemble(bits: Sequence[int], n: Optional[int] = None) -> Block:
    """Build a block from its bits, leftmost first."""
    if n is None:
        n = len(bits)
    if len(bits) != n:
        raise ConfigError(f"expected {n} bits, got {len(bits)}")
    value = 0
    for b in bits:
        if b not in (0, 1):
            raise ConfigError(f"bit values must be 0 or 1, got {b!r}")
        value = (value << 1) | b
    return Block(value, n)


@dataclass(frozen=True)
class MessageSeq:
    """Finite prefix of an infinite message; every later label is 0."""

    labels: Tuple[int, ...]
    n: int
    semantics: MessageSemantics

    def __post_init__(self):
        object.__setattr__(self, 'labels', tuple(self.labels))
        for label in self.labels:
            self.semantics.check_label(label, self.n)

    @classmethod
    def of(cls, labels: Iterable[int], n: int,
           semantics: MessageSemantics) -> 'MessageSeq':
        return cls(tuple(labels), n, semantics)

    def __len__(self) -> int:
        return len(self.labels)

    def label_at(self, k: int) -> int:
        """Label at position k, zero beyond the prefix."""
        return self.labels[k] if k < len(self.labels) else 0

    def extended(self, length: int) -> 'MessageSeq':
        """The same message with its prefix zero-extended to at least length labels."""
        if length <= len(self.labels):
            return self
        padding = (0,) * (length - len(self.labels))
        return MessageSeq(self.labels + padding, self.n, self.semantics)

    def head(self, length: int) -> Tuple[int, ...]:
        """First `length` labels, zero-extended."""
        return self.extended(length).labels[:length]

    def prepend(self, label: int) -> 'MessageSeq':
        return MessageSeq((label,) + self.labels, self.n, self.semantics)


def initial(m: MessageSeq) -> int:
    """The first label of a message (0 for an empty prefix)."""
    return m.label_at(0)


def shift(m: MessageSeq) -> MessageSeq:
    """The message without its first label; an empty prefix stays empty."""
    return MessageSeq(m.labels[1:], m.n, m.semantics)


@dataclass(frozen=True)
class PhasePoint:
    """A (state, message) couple of the phase space."""

    state: Block
    message: MessageSeq

    def __post_init__(self):
        if self.state.n != self.message.n:
            raise ConfigError(
                f"state has n={self.state.n} but message has n={self.message.n}"
            )

    @property
    def n(self) -> int:
        return self.state.n

    @property
    def semantics(self) -> MessageSemantics:
        return self.message.semantics

    @classmethod
    def of(cls, state: int, labels: Iterable[int], n: int,
           semantics: MessageSemantics) -> 'PhasePoint':
        """Convenience constructor from plain integers."""
        return cls(Block(state, n), MessageSeq.of(labels, n, semantics))
