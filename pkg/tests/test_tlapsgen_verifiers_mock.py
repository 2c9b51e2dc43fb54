"""
Tests for module tlapsgen.verifiers.mock
"""

import os
import unittest
from tlapsgen.exception import ConfigurationError
from tlapsgen.proof_ast import QED, Obligation, StepLabel
from tlapsgen.prompts import DecompositionProposal
from tlapsgen.verifiers.base import ModuleRenderError, ProverTier, Verdict
from tlapsgen.verifiers.mock import MockVerifier, text_key

# pylint: disable=invalid-name,missing-docstring,protected-access

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

GOAL = Obligation("EvenDouble", "Even(x + x)",
                  ["CONSTANT x", "Even(n) == n % 2 = 0"], ["Naturals"])


def proposal(*subs):
    return DecompositionProposal(
        "", "", "", [(StepLabel(1, str(number)), assertion)
                     for number, assertion in enumerate(subs, 1)],
        "BY " + ", ".join("<1>{0}".format(number)
                          for number in range(1, len(subs) + 1)))


class TestMockVerifier(unittest.TestCase):

    def setUp(self):
        self.v = MockVerifier.from_file(os.path.join(FIXTURES,
                                                     "even_table.yaml"))

    def test_text_key(self):
        self.assertEqual(text_key("a  b", "c"), text_key("a b", " c\n"))
        self.assertNotEqual(text_key("a", "b"), text_key("a b"))

    def test_proofs(self):
        result = self.v.check_proof(GOAL.child("g", "x  +  x = 2 * x"),
                                    "OBVIOUS")
        self.assertEqual(result.overall, Verdict.PROVED)
        result = self.v.check_proof(GOAL.child("g", "x + x = 2 * x"),
                                    "BY SMT")
        self.assertEqual(result.overall, Verdict.FAILED)
        self.assertEqual(result.message, "failed: mock verdict")
        result = self.v.check_proof(GOAL.child("g", "Even(2 * x)"),
                                    "OBVIOUS")
        self.assertEqual(result.message, "1 obligation failed: Even(2 * x)")

    def test_try_tier(self):
        self.assertTrue(self.v.try_tier(GOAL.child("g", "2 * x \\in Nat"),
                                        ProverTier.OBVIOUS).proved)
        self.assertFalse(self.v.try_tier(GOAL.child("g", "2 * x \\in Nat"),
                                         ProverTier.ALL_PROVERS).proved)

    def test_decompositions(self):
        result = self.v.check_decomposition(
            GOAL, proposal("x + x = 2 * x", "Even(2 * x)"))
        self.assertEqual(result.overall, Verdict.PROVED)
        self.assertEqual(result.per_obligation[0].location.label,
                         StepLabel(1, QED))
        result = self.v.check_decomposition(GOAL, proposal("Even(2 * x)"))
        self.assertEqual(result.overall, Verdict.FAILED)

    def test_history(self):
        self.v.check_proof(GOAL, "OBVIOUS")
        self.v.check_decomposition(GOAL, proposal("TRUE"))
        self.assertEqual(self.v.history, [
            ("proof", "EvenDouble", "Even(x + x)", "OBVIOUS",
             Verdict.FAILED),
            ("decomposition", "EvenDouble", "Even(x + x)", ("TRUE",),
             Verdict.FAILED)])

    def test_wildcards_and_defaults(self):
        v = MockVerifier({
            "default": "timeout",
            "decomposition_default": "proved",
            "proofs": [{"obligation": "TRUE", "proof": "*",
                        "verdict": "Proved"}],
            "decompositions": [{"obligation": "FALSE",
                                "verdict": "failed"}]})
        self.assertTrue(v.check_proof(GOAL.child("t", "TRUE"),
                                      "BY SMT").proved)
        self.assertEqual(v.check_proof(GOAL, "OBVIOUS").overall,
                         Verdict.TIMEOUT)
        self.assertTrue(v.check_decomposition(GOAL,
                                              proposal("TRUE")).proved)
        self.assertFalse(v.check_decomposition(GOAL.child("f", "FALSE"),
                                               proposal("TRUE")).proved)

    def test_explicit_defaults(self):
        v = MockVerifier(default=Verdict.PROVED)
        self.assertTrue(v.check_proof(GOAL, "OBVIOUS").proved)
        self.assertTrue(v.check_decomposition(GOAL, proposal("TRUE")).proved)
        v = MockVerifier.from_file(os.path.join(FIXTURES,
                                                "proved_table.yaml"))
        self.assertTrue(v.check_proof(GOAL, "BY AllProvers").proved)

    def test_invalid_table(self):
        for table in ([1, 2], {"default": "maybe"},
                      {"proofs": [{"verdict": "proved"}]},
                      {"decompositions": ["TRUE"]},
                      {"proofs": [{"obligation": "TRUE", "verdict": "no"}]}):
            with self.assertRaises(ConfigurationError):
                MockVerifier(table)
        with self.assertRaises(ConfigurationError):
            MockVerifier.from_file(os.path.join(FIXTURES, "missing.yaml"))

    def test_unrenderable(self):
        with self.assertRaises(ModuleRenderError):
            self.v.check_proof(GOAL, "")
        self.assertEqual(self.v.history, [])
