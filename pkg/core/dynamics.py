"""The iteration maps of the mode, trajectories and the phase-space metric.

For the negation used as inner function, every message semantics acts on the
state as an XOR with a label-dependent mask:

    BIT_INDEX   m -> one-hot bit m (from the left)
    FULL_BLOCK  m -> complement(m)   (keep x_j where m_j = 1, negate elsewhere)
    TRUE_XOR    m -> m

so F(x, m) = x ^ mask[m] and g(m, x) = encrypt(x ^ mask[m]).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from core.blocks import Block, MessageSemantics, PhasePoint, initial, shift
from core.ciphers import KeyedPermutation
from core.errors import ConfigError
from core.log import get_logger

logger = get_logger('dynamics')


@lru_cache(maxsize=128)
def _label_masks(n: int, semantics: MessageSemantics) -> np.ndarray:
    mask = (1 << n) - 1
    if semantics is MessageSemantics.BIT_INDEX:
        masks = np.array([1 << (n - 1 - m) for m in range(n)], dtype=np.int64)
    else:
        labels = np.arange(1 << n, dtype=np.int64)
        masks = labels ^ mask if semantics is MessageSemantics.FULL_BLOCK else labels
    masks.setflags(write=False)
    return masks


def label_masks(n: int, semantics: MessageSemantics) -> np.ndarray:
    """XOR mask applied to the state by each label (read-only, indexed by label)."""
    return _label_masks(n, semantics)


def label_mask(m: int, n: int, semantics: MessageSemantics) -> int:
    """XOR mask of one label, after range validation."""
    semantics.check_label(m, n)
    if semantics is MessageSemantics.BIT_INDEX:
        return 1 << (n - 1 - m)
    if semantics is MessageSemantics.FULL_BLOCK:
        return m ^ ((1 << n) - 1)
    return m


def apply_F(x: Block, m: int, semantics: MessageSemantics) -> Block:
    """
    Combine the state with one message label (inner function fixed to negation).

    Args:
        x: Current state.
        m: Message label, range depends on the semantics.
        semantics: BIT_INDEX flips bit m, FULL_BLOCK keeps x_j where m_j = 1 and
            negates it elsewhere, TRUE_XOR computes x XOR m.

    Returns:
        The combined block.
    """
    return Block(x.value ^ label_mask(m, x.n, semantics), x.n)


def g_value(cipher: KeyedPermutation, m: int, x: int,
            semantics: MessageSemantics) -> int:
    """g(m, x) = encrypt(F(x, m)) on plain integers."""
    return cipher.encrypt(x ^ label_mask(m, cipher.n, semantics))


def step_G(cipher: KeyedPermutation, p: PhasePoint,
           semantics: Optional[MessageSemantics] = None) -> PhasePoint:
    """
    One iterate of the mode: consume one label, produce one ciphertext block.

    Returns:
        (encrypt(F(state, initial(message))), shift(message)).
    """
    semantics = semantics or p.semantics
    if semantics is not p.semantics:
        raise ConfigError(
            f"point carries {p.semantics.value} labels, step requested {semantics.value}"
        )
    if cipher.n != p.n:
        raise ConfigError(f"cipher has n={cipher.n}, point has n={p.n}")
    combined = apply_F(p.state, initial(p.message), semantics)
    return PhasePoint(cipher.encrypt_block(combined), shift(p.message))


@dataclass
class Trajectory:
    """X^0 ... X^T and the ciphertext blocks X^1_1 ... X^T_1."""

    points: List[PhasePoint]
    ciphertext_blocks: List[Block]
    tail_labels_consumed: int = 0

    @property
    def states(self) -> List[int]:
        return [p.state.value for p in self.points]

    @property
    def used_tail(self) -> bool:
        """True when the message prefix ran out and zero labels were consumed."""
        return self.tail_labels_consumed > 0


def trajectory(cipher: KeyedPermutation, p0: PhasePoint, steps: int,
               semantics: Optional[MessageSemantics] = None) -> Trajectory:
    """
    Iterate step_G `steps` times from p0.

    Labels beyond the message prefix are read as zeros; their number is
    reported in `tail_labels_consumed`.
    """
    if steps < 0:
        raise ConfigError(f"step count must be non-negative, got {steps}")
    points = [p0]
    current = p0
    for _ in range(steps):
        current = step_G(cipher, current, semantics)
        points.append(current)
    consumed = max(0, steps - len(p0.message))
    if consumed:
        logger.debug("trajectory consumed %d tail labels", consumed)
    return Trajectory(points, [p.state for p in points[1:]], consumed)


# ==================== Metric ====================

def _power(q: int) -> Fraction:
    return Fraction(1, 10 ** q)


@dataclass(frozen=True)
class Distance:
    """
    Exact value de + (9/n) * sum_k h_k * 10^(-k).

    `dm_digits[k-1]` is h_k, the Hamming distance between the k-th blocks.
    Beyond the stored digits both messages are taken equal (zero tails).
    """

    de: int
    dm_digits: Tuple[int, ...]
    n: int
    _value: Fraction = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'dm_digits', tuple(self.dm_digits))
        dm = sum((Fraction(h, 10 ** k) for k, h in enumerate(self.dm_digits, 1)),
                 Fraction(0))
        object.__setattr__(self, '_value', self.de + Fraction(9, self.n) * dm)

    @property
    def tail_bound_exponent(self) -> int:
        return len(self.dm_digits)

    @property
    def dm(self) -> Fraction:
        return self._value - self.de

    @property
    def value(self) -> Fraction:
        return self._value

    def upper_bound(self) -> Fraction:
        """Bound on the true distance when the tails beyond L may differ."""
        return self._value + _power(self.tail_bound_exponent)

    def term(self, k: int) -> Fraction:
        """The k-th digit block (9/n) * h_k, k counted from 1; zero past the prefix."""
        h = self.dm_digits[k - 1] if 1 <= k <= len(self.dm_digits) else 0
        return Fraction(9 * h, self.n)

    def decimal_digit(self, k: int) -> int:
        """The k-th digit after the decimal point of the exact value."""
        return int(self._value * 10 ** k) % 10

    def below(self, q: int) -> bool:
        """value < 10^(-q), compared exactly."""
        return self._value < _power(q)

    def render(self, digits: int = 12) -> str:
        """Decimal rendering truncated to `digits` fractional digits."""
        whole = int(self._value)
        scaled = int((self._value - whole) * 10 ** digits)
        if digits <= 0:
            return str(whole)
        return f"{whole}.{scaled:0{digits}d}"

    def __float__(self) -> float:
        return float(self._value)

    def _other(self, other) -> Fraction:
        return other.value if isinstance(other, Distance) else Fraction(other)

    def __lt__(self, other) -> bool:
        return self._value < self._other(other)

    def __le__(self, other) -> bool:
        return self._value <= self._other(other)

    def __gt__(self, other) -> bool:
        return self._value > self._other(other)

    def __ge__(self, other) -> bool:
        return self._value >= self._other(other)


def distance(p: PhasePoint, q: PhasePoint) -> Distance:
    """
    Metric between two phase points.

    The messages are zero-extended to the longer prefix; BIT_INDEX labels are
    compared through their n-bit encodings like any other label.
    """
    if p.n != q.n:
        raise ConfigError(f"cannot compare points with n={p.n} and n={q.n}")
    if p.semantics is not q.semantics:
        raise ConfigError("cannot compare points with different message semantics")
    de = bin(p.state.value ^ q.state.value).count('1')
    length = max(len(p.message), len(q.message))
    digits = tuple(
        bin(a ^ b).count('1')
        for a, b in zip(p.message.head(length), q.message.head(length))
    )
    return Distance(de, digits, p.n)


@dataclass
class ContinuityCheck:
    """Distance after one step for two points sharing state and k+2 labels."""

    k: int
    distance: Distance
    holds: bool


def check_continuity(cipher: KeyedPermutation, p: PhasePoint, q: PhasePoint,
                     k: int) -> ContinuityCheck:
    """
    Executable continuity modulus of the iteration map.

    If p and q share their state and the first k+2 labels, one step later
    they are closer than 10^(-(k+1)).
    """
    if p.state != q.state:
        raise ConfigError("continuity check needs equal states")
    if p.message.head(k + 2) != q.message.head(k + 2):
        raise ConfigError(f"messages must agree on their first {k + 2} labels")
    after = distance(step_G(cipher, p), step_G(cipher, q))
    return ContinuityCheck(k, after, after.below(k + 1))


def random_point(rng: np.random.Generator, n: int, semantics: MessageSemantics,
                 length: int) -> PhasePoint:
    """A seeded random phase point with a `length`-label prefix."""
    state = int(rng.integers(0, 1 << n))
    labels = rng.integers(0, semantics.label_count(n), size=length)
    return PhasePoint.of(state, (int(v) for v in labels), n, semantics)
