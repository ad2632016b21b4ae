"""Keyed block permutations used as the encryption function of the mode.

Every cipher is stored as a pair of lookup tables over all 2^n blocks, which
keeps the graph sweeps vectorised and makes any bijection (built-in or loaded
from a table file) look the same to the rest of the package.
"""

import os
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from core.blocks import Block, check_block_size, validate_block_size
from core.config import get_config
from core.errors import ConfigError
from core.log import get_logger

logger = get_logger('ciphers')

# Exhaustive bijection checks up to this block size, sampling above it
EXHAUSTIVE_CHECK_MAX_N = 12


def _frozen(table: np.ndarray) -> np.ndarray:
    table = np.ascontiguousarray(table, dtype=np.int64)
    table.setflags(write=False)
    return table


@dataclass(frozen=True, eq=False)
class KeyedPermutation:
    """An encryption/decryption table pair on n-bit blocks."""

    n: int
    enc: np.ndarray
    dec: np.ndarray
    name: str
    key: Optional[object] = None

    def __post_init__(self):
        size = 1 << self.n
        if self.enc.shape != (size,) or self.dec.shape != (size,):
            raise ConfigError(f"cipher tables must have exactly {size} entries")
        object.__setattr__(self, 'enc', _frozen(self.enc))
        object.__setattr__(self, 'dec', _frozen(self.dec))

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def descriptor(self) -> str:
        """Human-readable name plus key material, e.g. 'caesar:1'."""
        if self.key is None:
            return self.name
        return f"{self.name}:{self.key}"

    def encrypt(self, x: int) -> int:
        return int(self.enc[x])

    def decrypt(self, y: int) -> int:
        return int(self.dec[y])

    def encrypt_block(self, x: Block) -> Block:
        return Block(self.encrypt(x.value), self.n)

    def decrypt_block(self, y: Block) -> Block:
        return Block(self.decrypt(y.value), self.n)

    def same_mapping(self, other: 'KeyedPermutation') -> bool:
        """True when both ciphers encrypt every block identically."""
        return self.n == other.n and bool(np.array_equal(self.enc, other.enc))


def identity_cipher(n: int) -> KeyedPermutation:
    """The cipher whose ciphertext equals its plaintext."""
    check_block_size(n)
    table = np.arange(1 << n, dtype=np.int64)
    return KeyedPermutation(n, table, table, 'identity')


def negation_cipher(n: int) -> KeyedPermutation:
    """Bitwise complement within n bits (its own inverse)."""
    check_block_size(n)
    mask = (1 << n) - 1
    table = np.arange(1 << n, dtype=np.int64) ^ mask
    return KeyedPermutation(n, table, table, 'negation')


def caesar_cipher(n: int, k: int) -> KeyedPermutation:
    """
    Caesar shift on n-bit blocks.

    Args:
        n: Block size.
        k: Shift value, reduced modulo 2^n.

    Returns:
        encrypt(x) = (x + k) mod 2^n, decrypt(x) = (x - k) mod 2^n.
    """
    check_block_size(n)
    size = 1 << n
    k = int(k) % size
    values = np.arange(size, dtype=np.int64)
    return KeyedPermutation(n, (values + k) % size, (values - k) % size, 'caesar', k)


def _table_problem(n: int, table: Sequence[int]) -> Optional[str]:
    """Describe the first reason `table` is not a permutation of [0, 2^n - 1]."""
    size = 1 << n
    if len(table) != size:
        return f"table has {len(table)} entries, expected 2^{n}"
    seen = set()
    duplicate = None
    for value in table:
        if not 0 <= value < size:
            return f"value {value} out of range [0, 2^{n} - 1]"
        if value in seen and duplicate is None:
            duplicate = value
        seen.add(value)
    if duplicate is not None:
        missing = min(set(range(size)) - seen)
        return f"value {missing} missing / {duplicate} duplicated"
    return None


def table_cipher(n: int, table: Sequence[int], name: str = 'table',
                 key: Optional[object] = None) -> KeyedPermutation:
    """
    Cipher given by its encryption table; the inverse table is computed.

    Args:
        n: Block size.
        table: The image of 0, 1, 2, ..., 2^n - 1.
        name: Descriptor name.
        key: Descriptor key material (a file path for loaded tables).

    Returns:
        The KeyedPermutation.
    """
    check_block_size(n)
    values = [int(v) for v in table]
    problem = _table_problem(n, values)
    if problem:
        raise ConfigError(f"not a permutation: {problem}")
    enc = np.array(values, dtype=np.int64)
    dec = np.empty_like(enc)
    dec[enc] = np.arange(1 << n, dtype=np.int64)
    return KeyedPermutation(n, enc, dec, name, key)


@dataclass
class BijectionReport:
    """Outcome of validate_bijection."""

    passed: bool
    exhaustive: bool
    checked: int
    violations: List[int] = field(default_factory=list)


def validate_bijection(cipher: KeyedPermutation, seed: int = 0,
                       sample_size: Optional[int] = None) -> BijectionReport:
    """
    Check that decrypt inverts encrypt on both sides.

    Exhaustive for n <= 12, otherwise a seeded random sample of at least
    4096 blocks. Violations are reported, never raised.
    """
    size = cipher.size
    if cipher.n <= EXHAUSTIVE_CHECK_MAX_N:
        blocks = np.arange(size, dtype=np.int64)
        exhaustive = True
    else:
        count = sample_size or get_config().bijection_sample_size
        rng = np.random.default_rng(seed)
        blocks = rng.integers(0, size, size=max(count, 4096), dtype=np.int64)
        exhaustive = False

    forward = cipher.dec[cipher.enc[blocks]] != blocks
    backward = cipher.enc[cipher.dec[blocks]] != blocks
    bad = np.unique(blocks[forward | backward])
    report = BijectionReport(
        passed=bad.size == 0,
        exhaustive=exhaustive,
        checked=int(blocks.size),
        violations=[int(v) for v in bad[:16]],
    )
    if not report.passed:
        logger.debug("%s fails bijection check at block %d", cipher.descriptor,
                     report.violations[0])
    return report


# ==================== Table files ====================

def parse_table_text(text: str, expected_n: Optional[int] = None) -> KeyedPermutation:
    """
    Parse the table format: line 1 = n, line 2 = 2^n decimal values.

    Args:
        text: File contents.
        expected_n: Block size the caller needs. If None, the declared n is
            checked against the configured maximum instead.
    """
    lines = [line for line in text.splitlines() if line.strip()]
    if len(lines) < 2:
        raise ConfigError("table file needs a block size line and a values line")
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise ConfigError("table file block size is not a decimal integer") from None
    if expected_n is not None:
        if n != expected_n:
            raise ConfigError(f"table file declares n={n}, expected n={expected_n}")
    else:
        validate_block_size(n, get_config().max_n)
    try:
        values = [int(tok) for tok in ' '.join(lines[1:]).split()]
    except ValueError:
        raise ConfigError("table file values are not decimal integers") from None
    return table_cipher(n, values)


def load_table_file(path: str, expected_n: Optional[int] = None) -> KeyedPermutation:
    """Read a permutation-table file."""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            cipher = parse_table_text(f.read(), expected_n)
    except OSError as e:
        raise ConfigError(f"cannot read table file {path}: {e}") from None
    return KeyedPermutation(cipher.n, cipher.enc, cipher.dec, 'table', path)


def dump_table(cipher: KeyedPermutation) -> str:
    """Render a cipher in the table-file format."""
    values = ' '.join(str(int(v)) for v in cipher.enc)
    return f"{cipher.n}\n{values}\n"


def parse_cipher_spec(spec: str, n: int) -> KeyedPermutation:
    """
    Build a cipher from its command-line descriptor.

    Args:
        spec: identity | negation | caesar:<k> | table:<path>
        n: Block size (a table file must declare the same n).

    Returns:
        The KeyedPermutation.
    """
    name, _, arg = spec.strip().partition(':')
    name = name.lower()
    if name == 'identity' and not arg:
        return identity_cipher(n)
    if name == 'negation' and not arg:
        return negation_cipher(n)
    if name == 'caesar':
        try:
            k = int(arg)
        except ValueError:
            raise ConfigError(f"caesar shift must be an integer, got {arg!r}") from None
        return caesar_cipher(n, k)
    if name == 'table' and arg:
        if not os.path.exists(arg):
            raise ConfigError(f"table file not found: {arg}")
        return load_table_file(arg, n)
    raise ConfigError(
        f"unknown cipher {spec!r} (expected identity, negation, caesar:<k> or table:<path>)"
    )


def builtin_ciphers(n: int) -> List[KeyedPermutation]:
    """Identity, negation and the Caesar shifts 1 and 2 for a block size."""
    ciphers = [identity_cipher(n), negation_cipher(n), caesar_cipher(n, 1)]
    if n > 1:
        ciphers.append(caesar_cipher(n, 2))
    return ciphers
