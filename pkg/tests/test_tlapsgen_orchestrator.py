"""
Tests for module tlapsgen.orchestrator
"""

import io
import json
import os
import shutil
import tempfile
import unittest
try:
    from unittest import mock
except ImportError:  # pragma: no cover
    import mock
import yaml
from tlapsgen.backends.base import Backend, GenerationResult
from tlapsgen.backends.replay import RecordingBackend, ScriptedBackend, \
    load_script, record_transcript, replay_from
from tlapsgen.exception import ConfigurationError, OutputWriteError
from tlapsgen.proof_ast import NodeStatus, Obligation, ProofNode, StepLabel, \
    parse_module, parse_proof, render_proof
from tlapsgen.prompts import DecompositionProposal, PromptKind, \
    format_decomposition_response
from tlapsgen.orchestrator import RUNLOG_VERSION, DepthExceeded, \
    ParseFailureBudget, IncompleteTree, RunConfig, EventKind, RunLog, \
    Outcome, NeedsDecomposition, ProofSearch, assemble, write_proof_module
from tlapsgen.verifiers.mock import MockVerifier

# pylint: disable=invalid-name,missing-docstring,protected-access

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

GOAL = Obligation("EvenDouble", "Even(x + x)",
                  ["CONSTANT x", "ASSUME XNat == x \\in Nat",
                   "Even(n) == n % 2 = 0"], ["Naturals"])

EVEN_PROOF = """<1>1. x + x = 2 * x OBVIOUS
<1>2. Even(2 * x)
  <2>1. 2 * x \\in Nat OBVIOUS
  <2>2. (2 * x) % 2 = 0 OBVIOUS
  <2>. QED BY <2>1, <2>2 DEF Even
<1>. QED BY <1>1, <1>2 DEF Even"""

SCRIPT = load_script(os.path.join(FIXTURES, "even_script.yaml"))
GOAL_DECOMPOSITION = SCRIPT[0]
CHILD_DECOMPOSITION = SCRIPT[5]


def fixture(name):
    return os.path.join(FIXTURES, name)


def even_table():
    return MockVerifier.from_file(fixture("even_table.yaml"))


def even_table_data():
    with io.open(fixture("even_table.yaml"), encoding="utf-8") as table:
        return yaml.safe_load(table)


def fail_table():
    return MockVerifier.from_file(fixture("fail_table.yaml"))


class RuleBackend(Backend):
    """Answers decomposition prompts by obligation, proof prompts alike"""

    backend_id = "rules"

    def __init__(self, proof="BY SMT DEF Even"):
        self.proof = proof
        self.prompts = []

    def generate(self, request):
        self.prompts.append(request.prompt)
        text = request.text
        if request.prompt.kind in (PromptKind.DECOMPOSE, PromptKind.REFINE):
            if "Obligation:\nEven(x + x)" in text:
                answer = GOAL_DECOMPOSITION
            elif "Obligation:\nEven(2 * x)" in text:
                answer = CHILD_DECOMPOSITION
            else:
                answer = "no decomposition"
        else:
            answer = self.proof
        return GenerationResult([answer] * request.n_candidates, "rules",
                                [0] * request.n_candidates)


def goal_decomposition(second):
    return format_decomposition_response(DecompositionProposal(
        "Even(x + x)", "double, then even", "rewrite the sum",
        [(StepLabel(1, "1"), "x + x = 2 * x"), (StepLabel(1, "2"), second)],
        "BY <1>1, <1>2 DEF Even"))


class RefiningBackend(RuleBackend):
    """First proposes an unprovable <1>2 for the goal, then the right one"""

    def generate(self, request):
        if "Obligation:\nEven(x + x)" not in request.text:
            return super(RefiningBackend, self).generate(request)
        self.prompts.append(request.prompt)
        second = "Even(2 * x)" \
            if request.prompt.kind == PromptKind.REFINE else "2 * x = x"
        return GenerationResult([goal_decomposition(second)], "rules", [0])


class TestRunConfig(unittest.TestCase):

    def test_defaults(self):
        cfg = RunConfig().validate()
        self.assertEqual(cfg.max_decomposition_attempts_per_obligation, 10)
        self.assertEqual(cfg.max_depth, 5)
        self.assertEqual(cfg.n_candidates, 4)
        self.assertEqual(cfg.retrieval_k, 5)
        self.assertTrue(cfg.refinement_enabled)
        self.assertIsNone(cfg.max_total_decomposition_attempts)
        self.assertFalse(cfg.llm_on_goal)

    def test_invalid(self):
        with self.assertRaises(ConfigurationError):
            RunConfig(max_breadth=3)
        for fields in ({"max_depth": 0}, {"n_candidates": "4"},
                       {"max_total_decomposition_attempts": 0},
                       {"candidate_temperature": -1}):
            with self.assertRaises(ConfigurationError):
                RunConfig(**fields).validate()


class TestRunLog(unittest.TestCase):

    def test_events(self):
        log = RunLog()
        log.add(EventKind.DECOMPOSE_REQUESTED, "goal", GOAL, "prompt",
                attempt=1)
        log.add(EventKind.TIER_ATTEMPTED, "goal/<1>1", GOAL, tier="OBVIOUS")
        self.assertEqual(len(log), 2)
        self.assertEqual(log.count(EventKind.TIER_ATTEMPTED), 1)
        self.assertEqual(log.count(EventKind.TIER_ATTEMPTED, "goal"), 0)
        self.assertEqual(log.of(path="goal")[0].detail, {"attempt": 1})
        line = json.loads(log.lines(False)[0])
        self.assertEqual(line["kind"], "DecomposeRequested")
        self.assertEqual(len(line["payload"]), 16)
        self.assertNotIn("time", line)
        self.assertIn("time", json.loads(log.lines()[0]))
        self.assertEqual(json.loads(log.lines(False)[1])["payload"], "")

    def test_dump(self):
        tmp = tempfile.mkdtemp()
        try:
            log = RunLog()
            log.add(EventKind.NODE_VERIFIED, "goal", GOAL, "OBVIOUS")
            path = os.path.join(tmp, "run.jsonl")
            log.dump(path)
            with io.open(path, encoding="utf-8") as dumped:
                lines = dumped.read().splitlines()
            self.assertEqual(json.loads(lines[0]),
                             {"version": RUNLOG_VERSION})
            self.assertEqual(json.loads(lines[1])["kind"], "NodeVerified")
        finally:
            shutil.rmtree(tmp, ignore_errors=True)

    def test_dump_unwritable(self):
        log = RunLog()
        log.add(EventKind.NODE_VERIFIED, "goal", GOAL, "OBVIOUS")
        with mock.patch('io.open', side_effect=IOError("read-only")):
            with self.assertRaises(OutputWriteError):
                log.dump("run.jsonl")


class TestProofSearch(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def assert_partial(self, tree):
        self.assertEqual(tree.assertion, "Even(x + x)")
        self.assertEqual(tree.status, NodeStatus.FAILED)
        self.assertEqual([(str(step.label), step.assertion, step.status)
                          for step in tree.steps],
                         [("<1>1", "x + x = 2 * x", NodeStatus.VERIFIED),
                          ("<1>2", "Even(2 * x)", NodeStatus.FAILED)])
        self.assertEqual(tree.children[-1].proof_body,
                         "BY <1>1, <1>2 DEF Even")
        self.assertEqual(tree.steps[1].proof_body, "BY AllProvers")
        for node in tree.walk():
            self.assertNotEqual(bool(node.proof_body), bool(node.children))
        with self.assertRaises(IncompleteTree):
            assemble(tree)

    def test_even_double(self):
        backend = ScriptedBackend(SCRIPT)
        search = ProofSearch(backend, even_table())
        result = search.prove(GOAL)
        self.assertEqual(result.outcome, Outcome.COMPLETE)
        self.assertEqual(result.tree.structure(),
                         parse_proof(EVEN_PROOF).structure())
        self.assertTrue(result.tree.is_verified())
        self.assertEqual(assemble(result.tree), EVEN_PROOF)
        self.assertEqual(backend.remaining, 0)
        log = result.log
        self.assertEqual(log.count(EventKind.DECOMPOSITION_CHECKED, "goal"),
                         1)
        self.assertEqual(
            log.count(EventKind.DECOMPOSITION_CHECKED, "goal/<1>2"), 1)
        self.assertEqual(log.count(EventKind.DECOMPOSITION_CHECKED), 2)
        self.assertEqual(
            log.count(EventKind.CANDIDATE_GENERATED, "goal/<1>2"), 4)
        self.assertEqual(log.count(EventKind.PROOF_CHECKED, "goal/<1>2"), 6)
        self.assertEqual(log.count(EventKind.NODE_VERIFIED), 5)
        # the proof prompt precedes the decomposition of <1>2
        self.assertIn("Obligation:\nEven(2 * x)", backend.prompts[1])
        self.assertIn("level 2", backend.prompts[2])

    def test_tier_order(self):
        result = ProofSearch(ScriptedBackend(SCRIPT), even_table()).prove(GOAL)
        tiers = [event.detail["tier"] for event in result.log.of(
            EventKind.TIER_ATTEMPTED, "goal/<1>2")]
        self.assertEqual(tiers, ["OBVIOUS", "ALL_PROVERS", "LLM"])
        # the goal goes straight to decomposition after the automated tiers
        self.assertEqual([event.detail["tier"] for event in result.log.of(
            EventKind.TIER_ATTEMPTED, "goal")], ["OBVIOUS", "ALL_PROVERS"])
        kinds = [event.kind for event in result.log.of(path="goal/<1>2")]
        self.assertLess(kinds.index(EventKind.CANDIDATE_GENERATED),
                        kinds.index(EventKind.DECOMPOSE_REQUESTED))

    def test_goal_proved_by_tier(self):
        backend = mock.Mock()
        verifier = MockVerifier.from_file(fixture("proved_table.yaml"))
        result = ProofSearch(backend, verifier).prove(GOAL)
        self.assertEqual(result.outcome, Outcome.COMPLETE)
        self.assertEqual(assemble(result.tree), "OBVIOUS")
        self.assertFalse(backend.generate.called)
        self.assertEqual(len(verifier.history), 1)

    def test_always_fail(self):
        backend = ScriptedBackend(load_script(fixture("repeat_script.yaml")))
        search = ProofSearch(backend,
                             fail_table())
        with self.assertLogs('tlapsgen.orchestrator', 'WARNING'):
            result = search.prove(GOAL)
        self.assertEqual(result.outcome, Outcome.EXHAUSTED)
        self.assertEqual(result.tree, ProofNode.leaf(
            None, "Even(x + x)", "BY AllProvers", NodeStatus.FAILED))
        self.assertEqual(
            result.log.count(EventKind.DECOMPOSITION_CHECKED, "goal"), 10)
        self.assertEqual(result.log.count(EventKind.BUDGET_EXHAUSTED), 1)
        self.assertEqual(backend.remaining, 2)
        self.assertNotIn("Rejected decomposition", backend.prompts[0])
        for prompt in backend.prompts[1:]:
            self.assertIn("Rejected decomposition", prompt)
        with self.assertRaises(IncompleteTree):
            assemble(result.tree)

    def test_refinement_disabled(self):
        backend = ScriptedBackend(load_script(fixture("repeat_script.yaml")))
        search = ProofSearch(backend,
                             fail_table(),
                             config=RunConfig(
                                 refinement_enabled=False,
                                 max_decomposition_attempts_per_obligation=3))
        result = search.prove(GOAL)
        self.assertEqual(result.outcome, Outcome.EXHAUSTED)
        self.assertEqual(len(set(backend.prompts)), 1)
        self.assertEqual(len(backend.prompts), 3)

    def test_record_and_replay(self):
        recorder = RecordingBackend(ScriptedBackend(SCRIPT))
        first = ProofSearch(recorder, even_table()).prove(GOAL)
        path = os.path.join(self.tmp, "even.transcript")
        record_transcript(recorder, path)
        second = ProofSearch(replay_from(path), even_table()).prove(GOAL)
        self.assertEqual(second.outcome, Outcome.COMPLETE)
        self.assertEqual(second.log.lines(False), first.log.lines(False))
        self.assertEqual(assemble(second.tree), assemble(first.tree))

    def test_depth_limit(self):
        backend = RuleBackend()
        search = ProofSearch(backend, even_table(), config=RunConfig(
            max_depth=1, max_decomposition_attempts_per_obligation=2))
        result = search.prove(GOAL)
        self.assertEqual(result.outcome, Outcome.EXHAUSTED)
        depth = [event for event in result.log.of(
            EventKind.BUDGET_EXHAUSTED, "goal/<1>2")]
        self.assertEqual(len(depth), 2)
        self.assertEqual(depth[0].detail, {"budget": "depth"})
        self.assertEqual(
            result.log.count(EventKind.DECOMPOSE_REQUESTED, "goal/<1>2"), 0)
        refinement = backend.prompts[2]
        self.assertEqual(refinement.kind, PromptKind.REFINE)
        self.assertIn("sub-obligation <1>2 could not be proved",
                      refinement.text)
        self.assert_partial(result.tree)

    def test_global_budget(self):
        backend = ScriptedBackend(SCRIPT)
        search = ProofSearch(backend, even_table(), config=RunConfig(
            max_total_decomposition_attempts=1))
        result = search.prove(GOAL)
        self.assertEqual(result.outcome, Outcome.EXHAUSTED)
        exhausted = result.log.of(EventKind.BUDGET_EXHAUSTED)
        self.assertEqual(len(exhausted), 1)
        self.assertEqual(exhausted[0].path, "goal/<1>2")
        self.assertEqual(exhausted[0].detail, {"budget": "total"})
        self.assertEqual(backend.remaining, 1)
        self.assert_partial(result.tree)

    def test_concurrent_exhausted_tree(self):
        cfg = RunConfig(max_depth=1,
                        max_decomposition_attempts_per_obligation=2)
        sequential = ProofSearch(RuleBackend(), even_table(),
                                 config=cfg).prove(GOAL)
        concurrent = ProofSearch(
            RuleBackend(), even_table(),
            config=cfg._replace(concurrent_siblings=True)).prove(GOAL)
        self.assertEqual(concurrent.outcome, Outcome.EXHAUSTED)
        self.assert_partial(concurrent.tree)
        self.assertEqual(concurrent.tree, sequential.tree)

    def test_refined_parent_gets_fresh_child_budget(self):
        backend = RefiningBackend()
        table = even_table_data()
        table["decompositions"].append({
            "obligation": "Even(x + x)",
            "subs": ["x + x = 2 * x", "2 * x = x"], "verdict": "proved"})
        search = ProofSearch(backend, MockVerifier(table), config=RunConfig(
            max_decomposition_attempts_per_obligation=3))
        result = search.prove(GOAL)
        self.assertEqual(result.outcome, Outcome.COMPLETE)
        self.assertEqual(assemble(result.tree), EVEN_PROOF)
        # three attempts on 2 * x = x, one on its replacement Even(2 * x)
        self.assertEqual(
            result.log.count(EventKind.DECOMPOSE_REQUESTED, "goal/<1>2"), 4)
        self.assertEqual(
            result.log.count(EventKind.BUDGET_EXHAUSTED, "goal/<1>2"), 1)
        self.assertEqual([event.detail["attempt"] for event in result.log.of(
            EventKind.DECOMPOSE_REQUESTED, "goal/<1>2")], [1, 2, 3, 1])

    def test_concurrent_siblings(self):
        sequential = ProofSearch(RuleBackend(), even_table()).prove(GOAL)
        concurrent = ProofSearch(RuleBackend(), even_table(),
                                 config=RunConfig(concurrent_siblings=True)
                                 ).prove(GOAL)
        self.assertEqual(concurrent.outcome, Outcome.COMPLETE)
        self.assertEqual(assemble(concurrent.tree), EVEN_PROOF)
        self.assertEqual(concurrent.log.lines(False),
                         sequential.log.lines(False))

    def test_llm_on_goal(self):
        verifier = MockVerifier({"proofs": [{
            "obligation": "Even(x + x)", "proof": "BY SMT DEF Even",
            "verdict": "proved"}]})
        result = ProofSearch(RuleBackend(), verifier,
                             config=RunConfig(llm_on_goal=True)).prove(GOAL)
        self.assertEqual(assemble(result.tree), "BY SMT DEF Even")
        self.assertEqual(result.log.count(EventKind.DECOMPOSE_REQUESTED), 0)

    def test_candidates_deduplicated(self):
        backend = mock.Mock()
        backend.generate.return_value = GenerationResult(
            ["OBVIOUS", "BY SMT", "BY  SMT", "no proof here"], "m",
            [0, 0, 0, 0])
        verifier = MockVerifier()
        search = ProofSearch(backend, verifier)
        outcome = search.prove_leaf(GOAL.child("g", "Even(2 * x)"), 1)
        self.assertIsInstance(outcome, NeedsDecomposition)
        self.assertEqual([entry[3] for entry in verifier.history],
                         ["OBVIOUS", "BY AllProvers", "BY SMT",
                          "no proof here"])

    def test_multi_step_candidate_releveled(self):
        body = "<1>1. x + x = 2 * x OBVIOUS\n<1>. QED BY <1>1 DEF Even"
        verifier = MockVerifier({"proofs": [{
            "obligation": "Even(2 * x)", "proof": body,
            "verdict": "proved"}]})
        search = ProofSearch(RuleBackend("```\n" + body + "\n```"), verifier)
        node = search.prove_leaf(GOAL.child("g", "Even(2 * x)"), 1)
        self.assertIsInstance(node, ProofNode)
        self.assertEqual(render_proof(node._replace(label=StepLabel(1, "2"))),
                         "<1>2. Even(2 * x)\n"
                         "  <2>1. x + x = 2 * x OBVIOUS\n"
                         "  <2>. QED BY <2>1 DEF Even")
        self.assertTrue(node.is_verified())

    def test_multi_step_candidate_below_depth_limit(self):
        body = "<1>1. x + x = 2 * x OBVIOUS\n<1>. QED BY <1>1 DEF Even"
        verifier = MockVerifier({"proofs": [{
            "obligation": "Even(2 * x)", "proof": body,
            "verdict": "proved"}]})
        search = ProofSearch(RuleBackend("```\n" + body + "\n```"), verifier,
                             config=RunConfig(max_depth=1))
        outcome = search.prove_leaf(GOAL.child("g", "Even(2 * x)"), 1)
        self.assertIsInstance(outcome, NeedsDecomposition)
        self.assertEqual([entry[3] for entry in verifier.history],
                         ["OBVIOUS", "BY AllProvers"])

    def test_unparseable_responses(self):
        backend = RuleBackend()
        search = ProofSearch(backend, MockVerifier(), config=RunConfig(
            max_decomposition_attempts_per_obligation=3))
        with self.assertRaises(ParseFailureBudget):
            search.decompose_with_retry(GOAL.child("g", "TRUE"), 0)
        proposed = search.log.of(EventKind.DECOMPOSITION_PROPOSED)
        self.assertEqual(len(proposed), 3)
        self.assertEqual(proposed[0].detail, {"error": "MissingSection"})

    def test_depth_exceeded(self):
        search = ProofSearch(RuleBackend(), MockVerifier())
        with self.assertRaises(DepthExceeded):
            search.decompose_with_retry(GOAL, 5)
        with self.assertRaises(DepthExceeded):
            search.prove_leaf(GOAL, 6)

    def test_invalid_goal(self):
        search = ProofSearch(RuleBackend(), MockVerifier())
        with self.assertRaises(ConfigurationError):
            search.prove(GOAL._replace(assertion="  "))
        with self.assertRaises(ConfigurationError):
            search.prove(GOAL, RunConfig(max_depth=0))

    def test_write_proof_module(self):
        result = ProofSearch(ScriptedBackend(SCRIPT), even_table()).prove(GOAL)
        path = os.path.join(self.tmp, "EvenDouble_Proof.tla")
        text = write_proof_module(GOAL, result, path)
        with io.open(path, encoding="utf-8") as written:
            self.assertEqual(written.read(), text)
        self.assertTrue(text.startswith("---- MODULE EvenDouble_Proof ----"))
        self.assertIn("EXTENDS Naturals, TLAPS", text)
        self.assertIn("THEOREM EvenDouble == Even(x + x)\n" + EVEN_PROOF,
                      text)
        module = parse_module(text)
        self.assertEqual(module.theorems[0].proof.structure(),
                         parse_proof(EVEN_PROOF).structure())
