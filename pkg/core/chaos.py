"""Chaos verdicts and the constructive witnesses behind them.

A strongly connected transition graph makes the mode regular, strongly
transitive and hence chaotic. The constructions below build the objects that
this argument only asserts to exist:

  - a periodic point within 10^(-q) of any anchor,
  - a point within 10^(-q) of any source that lands exactly on any target,
  - a sensitivity certificate with constant 1 (works for every graph).

The neighbourhood 10^(-q) is secured by copying n0 = q + 1 message labels:
points that share the state and n0 labels differ by at most 10^(-n0).
Every witness is replayed through step_G before it is returned.
"""

import weakref
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple

from core.blocks import MessageSemantics, MessageSeq, PhasePoint
from core.ciphers import KeyedPermutation, identity_cipher, negation_cipher
from core.dynamics import Distance, distance, step_G, trajectory
from core.errors import CbcChaosError, ConfigError, NotStronglyConnectedError
from core.graph import (IMPLICIT, ConnectivityVerdict, TransitionGraph,
                        find_path, follow, strongly_connected)
from core.log import get_logger

logger = get_logger('chaos')

# Sensitivity constant: one differing state bit
SENSITIVITY_DELTA = 1

# Implicit verdicts per cipher and semantics, reused across witness constructions
_connectivity_cache: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


class ChaosStatus(Enum):
    CHAOTIC_BY_THEOREM_1 = 'CHAOTIC_BY_THEOREM_1'
    # Blocks the sufficient condition only; never a "not chaotic" claim.
    NOT_STRONGLY_CONNECTED = 'NOT_STRONGLY_CONNECTED'


@dataclass
class ChaosVerdict:
    status: ChaosStatus
    connectivity: ConnectivityVerdict
    cipher: str
    n: int
    semantics: MessageSemantics

    @property
    def chaotic(self) -> bool:
        return self.status is ChaosStatus.CHAOTIC_BY_THEOREM_1


def _graph(cipher: KeyedPermutation, n: int,
           semantics: MessageSemantics) -> TransitionGraph:
    if cipher.n != n:
        raise ConfigError(f"cipher has n={cipher.n}, analysis requested n={n}")
    return TransitionGraph(cipher, semantics)


def chaos_verdict(cipher: KeyedPermutation, n: int, semantics: MessageSemantics,
                  mode: str = IMPLICIT, max_n: Optional[int] = None) -> ChaosVerdict:
    """
    Decide whether the sufficient condition for chaos holds.

    Args:
        cipher: Encryption permutation.
        n: Block size (must match the cipher).
        semantics: Message semantics.
        mode: Connectivity algorithm, 'implicit' or 'explicit'.
        max_n: Ceiling for implicit mode. If None, uses the configuration.

    Returns:
        ChaosVerdict; NOT_STRONGLY_CONNECTED carries the unreachable pair.
    """
    G = _graph(cipher, n, semantics)
    connectivity = strongly_connected(G, mode, max_n)
    status = (ChaosStatus.CHAOTIC_BY_THEOREM_1 if connectivity.strongly_connected
              else ChaosStatus.NOT_STRONGLY_CONNECTED)
    return ChaosVerdict(status, connectivity, cipher.descriptor, n, semantics)


def _require_connected(G: TransitionGraph, max_n: Optional[int] = None) -> ConnectivityVerdict:
    # verdicts per (semantics, ceiling); a ceiling failure raises before caching
    by_key = _connectivity_cache.setdefault(G.cipher, {})
    key = (G.semantics, max_n)
    verdict = by_key.get(key)
    if verdict is None:
        verdict = by_key[key] = strongly_connected(G, IMPLICIT, max_n)
    if not verdict.strongly_connected:
        u, v = verdict.witness
        raise NotStronglyConnectedError(
            f"{G.descriptor} is not strongly connected: no path {u} -> {v}", verdict)
    return verdict


def _check_point(p: PhasePoint, n: int, semantics: MessageSemantics, role: str):
    if p.n != n or p.semantics is not semantics:
        raise ConfigError(f"{role} point does not match n={n}, {semantics.value}")


def _check_q(q: int) -> int:
    if isinstance(q, bool) or not isinstance(q, int) or q < 0:
        raise ConfigError(f"epsilon exponent q must be a non-negative integer, got {q!r}")
    return q


# ==================== Periodic points ====================

@dataclass
class PeriodicWitness:
    """(state, cycle repeated forever), returning to itself after `period` steps."""

    point: PhasePoint
    period: int
    epsilon_exponent: int
    anchor: PhasePoint
    minimal_period: int = 0
    verified: bool = False

    @property
    def cycle(self) -> Tuple[int, ...]:
        return self.point.message.labels

    def unrolled(self, length: int) -> PhasePoint:
        """The periodic point with its message materialised to `length` labels."""
        repeats = -(-length // self.period) if length > 0 else 1
        labels = (self.cycle * max(repeats, 1))[:max(length, self.period)]
        return PhasePoint(self.point.state, MessageSeq(labels, self.point.n,
                                                       self.point.semantics))

    def distance_bound(self) -> Distance:
        """Distance to the anchor over enough labels for a rigorous upper bound."""
        length = max(len(self.anchor.message), self.epsilon_exponent + 2, self.period)
        return distance(self.unrolled(length), self.anchor)


def _minimal_period(G: TransitionGraph, state: int, cycle: Tuple[int, ...]) -> int:
    """Smallest p with the state back home and the cycle invariant under rotation by p."""
    vertex = state
    for p in range(1, len(cycle) + 1):
        vertex = int(G.cipher.enc[vertex ^ G.masks[cycle[p - 1]]])
        if vertex == state and cycle[p:] + cycle[:p] == cycle:
            return p
    return len(cycle)


def verify_periodic(cipher: KeyedPermutation, witness: PeriodicWitness) -> bool:
    """Replay `period` steps and compare state and cyclic message prefix."""
    if witness.period != len(witness.cycle) or witness.period < 1:
        return False
    point = witness.unrolled(2 * witness.period)
    current = point
    for _ in range(witness.period):
        current = step_G(cipher, current)
    if current.state != point.state:
        return False
    if current.message.head(witness.period) != witness.cycle:
        return False
    return witness.distance_bound().upper_bound() < Fraction(1, 10 ** witness.epsilon_exponent)


def make_periodic_point(cipher: KeyedPermutation, n: int, semantics: MessageSemantics,
                        anchor: PhasePoint, q: int,
                        max_n: Optional[int] = None) -> PeriodicWitness:
    """
    Build a periodic point within 10^(-q) of the anchor.

    Keep the anchor's state and first n0 = q + 1 labels, then close the loop
    with a shortest path from the state reached after those n0 steps back to
    the anchor's state. The resulting cycle repeated forever has period
    n0 + path length.

    max_n overrides the configured ceiling on n, as in chaos_verdict.
    """
    _check_q(q)
    G = _graph(cipher, n, semantics)
    _check_point(anchor, n, semantics, 'anchor')
    _require_connected(G, max_n)

    n0 = q + 1
    head = anchor.message.head(n0)
    reached = follow(G, anchor.state, head)
    closing = find_path(G, reached, anchor.state)
    cycle = tuple(head) + tuple(closing)

    point = PhasePoint(anchor.state, MessageSeq(cycle, n, semantics))
    witness = PeriodicWitness(point, len(cycle), q, anchor)
    witness.minimal_period = _minimal_period(G, anchor.state.value, cycle)
    if not verify_periodic(cipher, witness):
        raise CbcChaosError(f"periodic witness failed replay for {G.descriptor}")
    witness.verified = True
    logger.debug("periodic point for %s: period %d (minimal %d), q=%d",
                 G.descriptor, witness.period, witness.minimal_period, q)
    return witness


# ==================== Transitive points ====================

@dataclass
class TransitiveWitness:
    """A point near `source` whose `steps`-th iterate is exactly `target`."""

    point: PhasePoint
    steps: int
    target: PhasePoint
    source: PhasePoint
    epsilon_exponent: int
    verified: bool = False


def verify_transitive(cipher: KeyedPermutation, witness: TransitiveWitness) -> bool:
    """Replay the witness and compare against the target and the neighbourhood."""
    current = witness.point
    for _ in range(witness.steps):
        current = step_G(cipher, current)
    if current.state != witness.target.state:
        return False
    if current.message.labels != witness.target.message.labels:
        return False
    return distance(witness.point, witness.source).below(witness.epsilon_exponent)


def make_transitive_point(cipher: KeyedPermutation, n: int, semantics: MessageSemantics,
                          source: PhasePoint, target: PhasePoint,
                          q: int, max_n: Optional[int] = None) -> TransitiveWitness:
    """
    Build a point within 10^(-q) of `source` that lands exactly on `target`.

    Message: first n0 = q + 1 labels of the source, a shortest path from the
    state reached after them to the target's state, then the target message.
    """
    _check_q(q)
    G = _graph(cipher, n, semantics)
    _check_point(source, n, semantics, 'source')
    _check_point(target, n, semantics, 'target')
    _require_connected(G, max_n)

    n0 = q + 1
    head = source.message.head(n0)
    reached = follow(G, source.state, head)
    bridge = find_path(G, reached, target.state)
    labels = tuple(head) + tuple(bridge) + target.message.labels
    point = PhasePoint(source.state, MessageSeq(labels, n, semantics))
    witness = TransitiveWitness(point, n0 + len(bridge), target, source, q)
    if not verify_transitive(cipher, witness):
        raise CbcChaosError(f"transitive witness failed replay for {G.descriptor}")
    witness.verified = True
    return witness


# ==================== Sensitivity ====================

@dataclass
class SensitivityCertificate:
    """A point within 10^(-q) of the anchor whose trajectory separates by >= 1."""

    point: PhasePoint
    steps: int
    distance: Distance
    anchor: PhasePoint
    epsilon_exponent: int
    delta: int = SENSITIVITY_DELTA


def sensitivity_certificate(cipher: KeyedPermutation, n: int, semantics: MessageSemantics,
                            anchor: PhasePoint, q: int) -> SensitivityCertificate:
    """
    Alter label q + 1 of the anchor's message and watch the states split.

    The first q + 1 labels and the state are shared, so the altered point is
    within 10^(-(q+1)). Since g(., x) is injective in the label, the states
    differ after q + 2 steps, which puts the iterates at distance >= 1.
    """
    _check_q(q)
    G = _graph(cipher, n, semantics)
    _check_point(anchor, n, semantics, 'anchor')
    if G.label_count < 2:
        raise ConfigError(
            f"{semantics.value} semantics with n={n} has a single label; "
            f"no nearby point can diverge")

    labels = list(anchor.message.head(max(len(anchor.message), q + 2)))
    labels[q + 1] = (labels[q + 1] + 1) % G.label_count
    point = PhasePoint(anchor.state, MessageSeq(labels, n, semantics))
    steps = q + 2
    ends = [trajectory(cipher, p, steps).points[-1] for p in (anchor, point)]
    separation = distance(ends[0], ends[1])
    if separation < SENSITIVITY_DELTA:
        raise CbcChaosError(f"sensitivity certificate failed for {G.descriptor}")
    return SensitivityCertificate(point, steps, separation, anchor, q)


# ==================== Case-study paths ====================

def constructive_path(cipher: KeyedPermutation, semantics: MessageSemantics,
                      x: int, y: int) -> List[int]:
    """
    Explicit bit-index paths for the identity and (even n) negation ciphers.

    Identity: flip each differing bit, leftmost first. Negation: every label
    flips all bits but one, so for each differing bit p follow every label
    except p; bit p flips n - 1 (odd) times, the others n - 2 (even) times.
    """
    n = cipher.n
    if semantics is not MessageSemantics.BIT_INDEX:
        raise ConfigError("constructive paths are defined for bit-index semantics")
    G = TransitionGraph(cipher, semantics)
    x, y = G._vertex(x), G._vertex(y)
    diff = [j for j in range(n) if ((x ^ y) >> (n - 1 - j)) & 1]
    if cipher.same_mapping(identity_cipher(n)):
        labels = diff
    elif cipher.same_mapping(negation_cipher(n)):
        if n % 2:
            raise ConfigError(f"negation paths need an even block size, got n={n}")
        labels = [m for p in diff for m in range(n) if m != p]
    else:
        raise ConfigError(f"no constructive path for cipher {cipher.descriptor}")
    if follow(G, x, labels) != y:
        raise CbcChaosError(f"constructive path {x} -> {y} failed replay")
    return labels
