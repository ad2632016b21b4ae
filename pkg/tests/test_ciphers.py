"""
Cipher Test Suite
=================
Built-in permutations, table ciphers and the bijection checker.

Run with: python -m pytest tests/test_ciphers.py -v
"""

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import tempfile
import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis.strategies import integers, permutations

from core.blocks import Block
from core.ciphers import (KeyedPermutation, builtin_ciphers, caesar_cipher, dump_table,
                          identity_cipher, load_table_file, negation_cipher,
                          parse_cipher_spec, parse_table_text, table_cipher,
                          validate_bijection)
from core.errors import ConfigError, ResourceLimitError


class TestBuiltinCiphers(unittest.TestCase):
    """Test identity, negation and Caesar tables."""

    def test_identity(self):
        self.assertEqual(identity_cipher(2).encrypt(3), 3)
        self.assertEqual(identity_cipher(4).decrypt(11), 11)
        print("[OK] Identity cipher")

    def test_negation(self):
        self.assertEqual(negation_cipher(2).encrypt(0), 3)
        self.assertEqual(negation_cipher(3).encrypt(5), 2)
        cipher = negation_cipher(4)
        for x in range(16):
            self.assertEqual(cipher.encrypt(cipher.encrypt(x)), x)
        print("[OK] Negation cipher is an involution")

    def test_caesar(self):
        self.assertEqual(caesar_cipher(2, 1).encrypt(2), 3)
        self.assertEqual(caesar_cipher(2, 2).encrypt(3), 1)
        self.assertTrue(caesar_cipher(3, 0).same_mapping(identity_cipher(3)))
        self.assertTrue(caesar_cipher(3, 9).same_mapping(caesar_cipher(3, 1)))
        self.assertEqual(caesar_cipher(3, 9).descriptor, 'caesar:1')
        print("[OK] Caesar shift reduced modulo 2^n")

    def test_caesar_composition(self):
        for n in range(1, 7):
            size = 1 << n
            for a in range(size):
                for b in (0, 1, size - 1):
                    composed = caesar_cipher(n, b).enc[caesar_cipher(n, a).enc]
                    self.assertTrue(np.array_equal(composed, caesar_cipher(n, a + b).enc))
        print("[OK] caesar(a) then caesar(b) equals caesar(a + b)")

    def test_builtins_are_bijections(self):
        for n in range(1, 11):
            for cipher in builtin_ciphers(n):
                self.assertEqual(np.unique(cipher.enc).size, 1 << n)
                self.assertTrue(np.array_equal(cipher.dec[cipher.enc], np.arange(1 << n)))
        print("[OK] Built-in ciphers are bijections for n <= 10")

    def test_block_api(self):
        cipher = caesar_cipher(3, 2)
        self.assertEqual(cipher.encrypt_block(Block(7, 3)), Block(1, 3))
        self.assertEqual(cipher.decrypt_block(Block(1, 3)), Block(7, 3))
        print("[OK] Block-level encrypt/decrypt")

    def test_tables_are_read_only(self):
        cipher = caesar_cipher(2, 1)
        with self.assertRaises(ValueError):
            cipher.enc[0] = 0
        print("[OK] Cipher tables are immutable")


class TestTableCipher(unittest.TestCase):
    """Test user-supplied permutation tables."""

    def test_examples(self):
        self.assertTrue(table_cipher(1, (1, 0)).same_mapping(negation_cipher(1)))
        self.assertTrue(table_cipher(2, (1, 2, 3, 0)).same_mapping(caesar_cipher(2, 1)))
        print("[OK] Tables reproduce built-in ciphers")

    def test_rejects_non_permutation(self):
        with self.assertRaises(ConfigError) as ctx:
            table_cipher(2, (0, 1, 2, 2))
        self.assertIn("3 missing", str(ctx.exception))
        self.assertIn("2 duplicated", str(ctx.exception))
        with self.assertRaises(ConfigError):
            table_cipher(2, (0, 1, 2))
        with self.assertRaises(ConfigError):
            table_cipher(2, (0, 1, 2, 4))
        print("[OK] Non-permutations rejected with a reason")

    @given(permutations(list(range(8))))
    def test_any_permutation_is_accepted(self, perm):
        cipher = table_cipher(3, perm)
        self.assertTrue(validate_bijection(cipher).passed)
        for x in range(8):
            self.assertEqual(cipher.decrypt(cipher.encrypt(x)), x)

    def test_table_file(self):
        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, 'perm.txt')
            with open(path, 'w', encoding='utf-8') as f:
                f.write("2\n2 0 3 1\n")
            cipher = parse_cipher_spec(f'table:{path}', 2)
            self.assertEqual([cipher.encrypt(x) for x in range(4)], [2, 0, 3, 1])
            self.assertEqual(cipher.descriptor, f'table:{path}')
            self.assertEqual(load_table_file(path).decrypt(2), 0)
            with self.assertRaises(ConfigError):
                parse_cipher_spec(f'table:{path}', 3)
        print("[OK] Table files load and declare their n")

    def test_dump_and_parse(self):
        cipher = caesar_cipher(3, 5)
        self.assertTrue(parse_table_text(dump_table(cipher)).same_mapping(cipher))
        with self.assertRaises(ConfigError):
            parse_table_text("2\n0 1 x 3\n")
        with self.assertRaises(ConfigError):
            parse_table_text("2\n")
        print("[OK] Table text format")

    def test_huge_declared_size(self):
        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, 'huge.txt')
            with open(path, 'w', encoding='utf-8') as f:
                f.write("15000\n0 1\n")
            with self.assertRaises(ConfigError) as ctx:
                parse_cipher_spec(f'table:{path}', 2)
            self.assertIn('n=15000', str(ctx.exception))
        with self.assertRaises(ResourceLimitError):
            parse_table_text("15000\n0 1\n")
        with self.assertRaises(ConfigError) as ctx:
            parse_table_text("3\n0 1\n")
        self.assertLess(len(str(ctx.exception)), 80)
        print("[OK] Declared block size checked before the table is built")


class TestBijectionCheck(unittest.TestCase):
    """Test validate_bijection on good and corrupted tables."""

    def test_exhaustive(self):
        report = validate_bijection(identity_cipher(8))
        self.assertTrue(report.passed)
        self.assertTrue(report.exhaustive)
        self.assertEqual(report.checked, 256)
        self.assertTrue(validate_bijection(caesar_cipher(10, 77)).passed)
        print("[OK] Exhaustive check passes on valid ciphers")

    def test_corrupted_inverse(self):
        enc = np.array([1, 2, 3, 0])
        dec = np.array([3, 2, 1, 2])
        report = validate_bijection(KeyedPermutation(2, enc, dec, 'broken'))
        self.assertFalse(report.passed)
        self.assertEqual(report.violations, [0, 1])
        print("[OK] Corrupted inverse reported at blocks 0 and 1")

    def test_sampled_above_exhaustive_limit(self):
        report = validate_bijection(caesar_cipher(13, 5), seed=7)
        self.assertTrue(report.passed)
        self.assertFalse(report.exhaustive)
        self.assertGreaterEqual(report.checked, 4096)
        print(f"[OK] Sampled check over {report.checked} blocks")

    @settings(max_examples=25)
    @given(integers(min_value=1, max_value=10), integers(min_value=-1000, max_value=1000))
    def test_caesar_any_key(self, n, k):
        self.assertTrue(validate_bijection(caesar_cipher(n, k)).passed)


class TestCipherSpec(unittest.TestCase):
    """Test command-line cipher descriptors."""

    def test_known(self):
        self.assertEqual(parse_cipher_spec('identity', 3).descriptor, 'identity')
        self.assertEqual(parse_cipher_spec('negation', 3).descriptor, 'negation')
        self.assertEqual(parse_cipher_spec('caesar:2', 3).descriptor, 'caesar:2')
        print("[OK] Built-in descriptors parsed")

    def test_unknown(self):
        for spec in ('foo', 'caesar:x', 'identity:1', 'table:/no/such/file'):
            with self.assertRaises(ConfigError):
                parse_cipher_spec(spec, 3)
        print("[OK] Unknown descriptors rejected")

    def test_caesar_bad_block_size(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_cipher_spec('caesar:1', 0)
        self.assertIn('block size', str(ctx.exception))
        self.assertNotIn('shift', str(ctx.exception))
        print("[OK] Caesar block-size errors keep their own reason")


if __name__ == '__main__':
    unittest.main(verbosity=2)
