"""
Command-Line Test Suite
=======================
Every subcommand through main(argv), with exit codes and JSON output.

Run with: python -m pytest tests/test_cli.py -v
"""

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import contextlib
import io
import json
import tempfile
import unittest
from unittest import mock

import numpy as np

from core.cli import epsilon_to_q, main, parse_labels
from core.config import MAX_N_ENV, ConfigManager, set_config
from core.errors import ConfigError


def run(*argv):
    """Run the CLI and capture (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


class TestAnalyze(unittest.TestCase):
    """Test the analyze command."""

    def test_chaotic(self):
        code, out, _ = run('analyze', '--n', '2', '--cipher', 'caesar:1')
        doc = json.loads(out)
        self.assertEqual(code, 0)
        self.assertEqual(list(doc), ['n', 'cipher', 'semantics', 'strongly_connected',
                                     'status', 'elapsed_ms'])
        self.assertEqual(doc['status'], 'CHAOTIC_BY_THEOREM_1')
        self.assertEqual(doc['semantics'], 'bit-index')
        print("[OK] analyze caesar:1 n=2")

    def test_not_strongly_connected_still_exits_zero(self):
        code, out, _ = run('analyze', '--n', '2', '--cipher', 'caesar:2')
        doc = json.loads(out)
        self.assertEqual(code, 0)
        self.assertFalse(doc['strongly_connected'])
        self.assertEqual(doc['status'], 'NOT_STRONGLY_CONNECTED')
        self.assertEqual(doc['witness'], {'from': 0, 'to': 1, 'reachable_from': 2})
        print("[OK] analyze caesar:2 n=2 reports the unreachable pair")

    def test_explicit_mode(self):
        code, out, _ = run('analyze', '--n', '3', '--cipher', 'negation', '--mode', 'explicit')
        doc = json.loads(out)
        self.assertEqual(code, 0)
        self.assertEqual(doc['status'], 'NOT_STRONGLY_CONNECTED')
        self.assertEqual(doc['scc_count'], 2)
        print("[OK] Explicit mode reports the component count")

    def test_config_errors(self):
        for argv in (('analyze', '--n', '2', '--cipher', 'rot13'),
                     ('analyze', '--n', '0'),
                     ('analyze', '--n', '2', '--semantics', 'bits'),
                     ('analyze', '--n', '2', '--format', 'dot')):
            code, out, err = run(*argv)
            self.assertEqual(code, 2)
            self.assertEqual(out, '')
            self.assertTrue(err.startswith('error: '))
            self.assertEqual(err.count('\n'), 1)
        print("[OK] Invalid configurations exit 2 with one line on stderr")

    def test_resource_limits(self):
        with mock.patch.dict(os.environ):
            os.environ.pop(MAX_N_ENV, None)
            self.assertEqual(run('analyze', '--n', '21')[0], 3)
        self.assertEqual(run('analyze', '--n', '13', '--mode', 'explicit')[0], 3)
        self.assertEqual(run('graph', '--n', '7')[0], 3)
        print("[OK] Resource limits exit 3")

    def test_override_needs_flag(self):
        with mock.patch.dict(os.environ, {MAX_N_ENV: '21'}):
            self.assertEqual(run('analyze', '--n', '21')[0], 3)
        print("[OK] CBCCHAOS_MAX_N ignored without --allow-large-n")


class TestGraph(unittest.TestCase):
    """Test the graph command."""

    def test_csv(self):
        code, out, _ = run('graph', '--n', '2', '--cipher', 'caesar:1', '--format', 'csv')
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(len(lines), 9)
        self.assertEqual(lines[3], '1,01,0,3,11,0,00')
        print("[OK] graph --format csv")

    def test_dot_is_deterministic(self):
        first = run('graph', '--n', '3', '--cipher', 'caesar:2')[1]
        second = run('graph', '--n', '3', '--cipher', 'caesar:2')[1]
        self.assertEqual(first, second)
        self.assertEqual(first.count(' -> '), 24)
        print("[OK] graph DOT output is byte-identical across runs")

    def test_output_file(self):
        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, 'g.gv')
            code, out, _ = run('graph', '--n', '2', '--output', path)
            self.assertEqual(code, 0)
            self.assertEqual(out, '')
            with open(path, encoding='utf-8') as f:
                self.assertTrue(f.read().startswith('digraph'))
        print("[OK] graph --output writes a file")


class TestSimulate(unittest.TestCase):
    """Test the simulate command."""

    def test_text(self):
        code, out, _ = run('simulate', '--n', '2', '--iv', '0', '--message', '0,1')
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], 'X^0 state=0 (00)')
        self.assertEqual(lines[2], 'X^2 state=3 (11)')
        self.assertEqual(lines[-1], 'ciphertext: 2,3')
        print("[OK] simulate text output")

    def test_empty_message(self):
        code, out, _ = run('simulate', '--n', '3', '--iv', '5', '--format', 'json')
        doc = json.loads(out)
        self.assertEqual(code, 0)
        self.assertEqual(list(doc), ['states', 'ciphertext', 'tail_labels_consumed'])
        self.assertEqual(doc['states'], [5])
        self.assertEqual(doc['ciphertext'], [])
        print("[OK] Empty message yields only X^0")

    def test_label_range(self):
        self.assertEqual(run('simulate', '--n', '2', '--message', '0,2')[0], 2)
        self.assertEqual(run('simulate', '--n', '2', '--iv', '4')[0], 2)
        print("[OK] Out-of-range inputs exit 2")


class TestCbc(unittest.TestCase):
    """Test the cbc command."""

    def test_encrypt_example(self):
        code, out, _ = run('cbc', 'encrypt', '--n', '4', '--input', '1')
        self.assertEqual(code, 0)
        self.assertEqual(out.strip(), '12')
        print("[OK] Padded single bit encrypts to 12 under identity")

    def test_round_trip(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            bits = ''.join(str(int(b)) for b in rng.integers(0, 2, size=int(rng.integers(0, 30))))
            iv = str(int(rng.integers(0, 256)))
            encrypted = run('cbc', 'encrypt', '--n', '8', '--cipher', 'caesar:77',
                            '--iv', iv, '--input', bits)[1].strip()
            code, out, _ = run('cbc', 'decrypt', '--n', '8', '--cipher', 'caesar:77',
                               '--iv', iv, '--input', encrypted)
            self.assertEqual(code, 0)
            self.assertEqual(out.strip(), bits)
        print("[OK] CLI decrypt(encrypt(s)) == s on 100 random bit strings")

    def test_wrong_iv(self):
        ciphertext = run('cbc', 'encrypt', '--n', '4', '--cipher', 'caesar:3', '--iv', '1',
                         '--no-pad', '--input', '001101011100')[1].strip()
        _, out, _ = run('cbc', 'decrypt', '--n', '4', '--cipher', 'caesar:3', '--iv', '2',
                        '--no-pad', '--format', 'json', '--input', ciphertext)
        blocks = json.loads(out)['blocks']
        self.assertNotEqual(blocks[0], 3)
        self.assertEqual(blocks[1:], [5, 12])
        print("[OK] Wrong IV corrupts only the first block")

    def test_hex_input(self):
        code, out, _ = run('cbc', 'encrypt', '--n', '4', '--no-pad', '--hex-bits', '8',
                           '--input', '0xA5')
        self.assertEqual(code, 0)
        self.assertEqual(out.strip(), '10,15')
        print("[OK] Hex input with explicit bit length")

    def test_malformed_padding(self):
        self.assertEqual(run('cbc', 'decrypt', '--n', '4', '--input', '0')[0], 2)
        self.assertEqual(run('cbc', 'encrypt', '--n', '4', '--no-pad', '--input', '101')[0], 2)
        print("[OK] Malformed padding and partial blocks exit 2")


class TestWitness(unittest.TestCase):
    """Test the witness command."""

    def test_periodic(self):
        code, out, _ = run('witness', 'periodic', '--n', '2', '--state', '0',
                           '--message', '0,0', '--q', '1')
        doc = json.loads(out)
        self.assertEqual(code, 0)
        self.assertTrue(doc['replay_verified'])
        self.assertEqual(doc['period'], 2)
        self.assertEqual(doc['point'], {'state': 0, 'message': [0, 0]})
        self.assertEqual(list(doc), ['n', 'cipher', 'semantics', 'status', 'witness_type', 'q',
                                     'anchor', 'point', 'period', 'minimal_period',
                                     'distance_upper_bound', 'replay_verified'])
        print("[OK] witness periodic")

    def test_transitive_random(self):
        code, out, _ = run('witness', 'transitive', '--n', '3', '--cipher', 'caesar:1',
                           '--seed', '4', '--epsilon', '0.05')
        doc = json.loads(out)
        self.assertEqual(code, 0)
        self.assertEqual(doc['q'], 2)
        self.assertTrue(doc['replay_verified'])
        print("[OK] witness transitive with random endpoints")

    def test_sensitivity(self):
        code, out, _ = run('witness', 'sensitivity', '--n', '4', '--cipher', 'negation',
                           '--state', '9', '--message', '1,2,3')
        doc = json.loads(out)
        self.assertEqual(code, 0)
        self.assertEqual(doc['delta'], 1)
        self.assertEqual(list(doc)[5:], ['q', 'anchor', 'point', 'steps', 'delta', 'distance',
                                         'distance_decimal', 'replay_verified'])
        self.assertGreaterEqual(float(doc['distance_decimal']), 1.0)
        print("[OK] witness sensitivity")

    def test_not_strongly_connected(self):
        code, out, err = run('witness', 'periodic', '--n', '2', '--cipher', 'caesar:2',
                             '--state', '0')
        doc = json.loads(out)
        self.assertEqual(code, 4)
        self.assertEqual(list(doc), ['n', 'cipher', 'semantics', 'status', 'witness_type',
                                     'witness', 'replay_verified'])
        self.assertEqual(doc['status'], 'NOT_STRONGLY_CONNECTED')
        self.assertEqual(doc['witness']['from'], 0)
        self.assertEqual(doc['witness']['to'], 1)
        self.assertFalse(doc['replay_verified'])
        self.assertIn('not strongly connected', err)
        print("[OK] witness on Caesar k=2 exits 4 with the connectivity witness")

    def test_message_without_state(self):
        code, out, _ = run('witness', 'periodic', '--n', '3', '--message', '1,2', '--q', '2',
                           '--seed', '3')
        doc = json.loads(out)
        self.assertEqual(code, 0)
        self.assertEqual(doc['anchor']['message'], [1, 2])
        self.assertTrue(0 <= doc['anchor']['state'] < 8)
        self.assertTrue(doc['replay_verified'])
        print("[OK] --message without --state keeps the labels, random state")


class TestWitnessCeiling(unittest.TestCase):
    """Witness commands honor the acknowledged CBCCHAOS_MAX_N override."""

    def setUp(self):
        self.folder = tempfile.TemporaryDirectory()
        custom = ConfigManager(os.path.join(self.folder.name, 'cbcchaos_config.json'))
        custom.config['max_n'] = 3
        set_config(custom)

    def tearDown(self):
        set_config(None)
        self.folder.cleanup()

    def test_override_reaches_witnesses(self):
        with mock.patch.dict(os.environ, {MAX_N_ENV: '4'}):
            self.assertEqual(run('analyze', '--n', '4', '--allow-large-n')[0], 0)
            for kind in ('periodic', 'transitive'):
                code, out, err = run('witness', kind, '--n', '4', '--allow-large-n',
                                     '--state', '0', '--message', '0', '--q', '0')
                self.assertEqual(code, 0, err)
                self.assertTrue(json.loads(out)['replay_verified'])
            self.assertEqual(run('witness', 'periodic', '--n', '4', '--state', '0')[0], 3)
        print("[OK] Raised ceiling applies to analyze and witness alike")


class TestArgumentHelpers(unittest.TestCase):
    """Test epsilon rounding and label parsing."""

    def test_epsilon(self):
        self.assertEqual(epsilon_to_q('1'), 0)
        self.assertEqual(epsilon_to_q('0.1'), 1)
        self.assertEqual(epsilon_to_q('0.05'), 2)
        self.assertEqual(epsilon_to_q('5'), 0)
        self.assertEqual(epsilon_to_q('0.001'), 3)
        self.assertEqual(epsilon_to_q('0.0011'), 3)
        self.assertEqual(epsilon_to_q('0.00099'), 4)
        self.assertEqual(epsilon_to_q('2.5e-7'), 7)
        self.assertEqual(epsilon_to_q('1e-100000'), 100000)
        for bad in ('0', '-1', 'tiny'):
            with self.assertRaises(ConfigError):
                epsilon_to_q(bad)
        print("[OK] epsilon rounded down to a power of ten")

    def test_labels(self):
        self.assertEqual(parse_labels('1, 2,3'), [1, 2, 3])
        self.assertEqual(parse_labels(''), [])
        self.assertEqual(parse_labels(None), [])
        with self.assertRaises(ConfigError):
            parse_labels('1;2')
        print("[OK] Comma-separated labels")


if __name__ == '__main__':
    unittest.main(verbosity=2)
