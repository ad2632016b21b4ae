"""Exporter module for CBCChaos - DOT graphs, CSV edge tables and JSON documents."""

import json
import os
from typing import Optional, Tuple

from core.blocks import PhasePoint
from core.chaos import (ChaosVerdict, PeriodicWitness, SensitivityCertificate,
                        TransitiveWitness)
from core.graph import ConnectivityVerdict, TransitionGraph, edge_table

CSV_HEADER = 'x,x_bits,m,F,F_bits,g,g_bits'


def export_csv(G: TransitionGraph, max_n: Optional[int] = None) -> str:
    """
    Render the edge table as CSV.

    Args:
        G: The transition graph (n <= render ceiling).
        max_n: Override for the render ceiling.

    Returns:
        CSV text, one row per (x, m), x then m ascending.
    """
    lines = [CSV_HEADER]
    for row in edge_table(G, max_n):
        lines.append(
            f"{row.x},{row.bits(row.x)},{row.m},{row.f},{row.bits(row.f)},"
            f"{row.g},{row.bits(row.g)}"
        )
    return '\n'.join(lines) + '\n'


def export_dot(G: TransitionGraph, max_n: Optional[int] = None) -> str:
    """
    Render the graph in graphviz dot syntax.

    Nodes carry the decimal value as label and the binary form as tooltip;
    edges carry the message label. Ordering is fixed, so the output is
    byte-identical across runs. Plot with e.g. ``dot -Tpng -O graph.gv``.
    """
    rows = edge_table(G, max_n)
    out = ['digraph transition_graph {']
    out.append(f'\tlabel="{G.descriptor}";')
    for x in range(G.vertex_count):
        out.append(f'\t"{x}" [label="{x}", tooltip="{format(x, f"0{G.n}b")}"];')
    for row in rows:
        out.append(f'\t"{row.x}" -> "{row.g}" [label="{row.m}"];')
    out.append('}')
    return '\n'.join(out) + '\n'


# ==================== JSON documents ====================

def connectivity_witness(verdict: ConnectivityVerdict) -> Optional[dict]:
    if verdict.witness is None:
        return None
    u, v = verdict.witness
    return {'from': u, 'to': v, 'reachable_from': verdict.reachable_count}


def verdict_to_dict(verdict: ChaosVerdict, elapsed_ms: float) -> dict:
    """Analysis document; optional fields are omitted rather than null."""
    doc = {
        'n': verdict.n,
        'cipher': verdict.cipher,
        'semantics': verdict.semantics.value,
        'strongly_connected': verdict.connectivity.strongly_connected,
        'status': verdict.status.value,
    }
    witness = connectivity_witness(verdict.connectivity)
    if witness is not None:
        doc['witness'] = witness
    if verdict.connectivity.scc_count is not None:
        doc['scc_count'] = verdict.connectivity.scc_count
    doc['elapsed_ms'] = round(elapsed_ms, 3)
    return doc


def point_to_dict(point: PhasePoint) -> dict:
    return {'state': point.state.value, 'message': list(point.message.labels)}


def _header(kind: str, cipher: str, point: PhasePoint, status: str) -> dict:
    return {
        'n': point.n,
        'cipher': cipher,
        'semantics': point.semantics.value,
        'status': status,
        'witness_type': kind,
    }


def periodic_to_dict(witness: PeriodicWitness, cipher: str) -> dict:
    doc = _header('periodic', cipher, witness.point, 'VERIFIED')
    doc.update({
        'q': witness.epsilon_exponent,
        'anchor': point_to_dict(witness.anchor),
        'point': point_to_dict(witness.point),
        'period': witness.period,
        'minimal_period': witness.minimal_period,
        'distance_upper_bound': str(witness.distance_bound().upper_bound()),
        'replay_verified': witness.verified,
    })
    return doc


def transitive_to_dict(witness: TransitiveWitness, cipher: str) -> dict:
    doc = _header('transitive', cipher, witness.point, 'VERIFIED')
    doc.update({
        'q': witness.epsilon_exponent,
        'source': point_to_dict(witness.source),
        'target': point_to_dict(witness.target),
        'point': point_to_dict(witness.point),
        'steps': witness.steps,
        'replay_verified': witness.verified,
    })
    return doc


def sensitivity_to_dict(cert: SensitivityCertificate, cipher: str) -> dict:
    doc = _header('sensitivity', cipher, cert.point, 'VERIFIED')
    doc.update({
        'q': cert.epsilon_exponent,
        'anchor': point_to_dict(cert.anchor),
        'point': point_to_dict(cert.point),
        'steps': cert.steps,
        'delta': cert.delta,
        'distance': str(cert.distance.value),
        'distance_decimal': cert.distance.render(12),
        'replay_verified': True,
    })
    return doc


def hypothesis_failure_to_dict(kind: str, cipher: str, point: PhasePoint,
                               verdict: ConnectivityVerdict) -> dict:
    doc = _header(kind, cipher, point, 'NOT_STRONGLY_CONNECTED')
    doc['witness'] = connectivity_witness(verdict)
    doc['replay_verified'] = False
    return doc


def to_json(doc: dict) -> str:
    """Serialise with stable field order."""
    return json.dumps(doc, indent=2)


def write_export(text: str, output_path: str) -> Tuple[bool, str]:
    """
    Write an export to disk.

    Args:
        text: Rendered DOT, CSV or JSON.
        output_path: Destination file.

    Returns:
        Tuple of (success, message).
    """
    folder = os.path.dirname(os.path.abspath(output_path))
    if not os.path.isdir(folder):
        return False, f"Destination folder does not exist: {folder}"
    try:
        with open(output_path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        return True, f"Wrote {len(text)} bytes to {output_path}"
    except PermissionError:
        return False, "Permission denied - cannot write to destination"
    except OSError as e:
        return False, f"Error writing export: {str(e)}"
