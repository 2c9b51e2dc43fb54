"""
Tests for module tlapsgen.proof_ast
"""

import io
import os
import unittest
from tlapsgen.proof_ast import QED, StepLabel, Definition, Obligation, \
    NodeStatus, ProofNode, ParsedModule, parse_step_label, parse_module, \
    parse_proof, locate_steps, extract_statements, render_proof, \
    render_module, module_name_for, make_decomposition_skeleton, \
    make_proof_module, normalize_text, MalformedLabel, MissingModuleHeader, \
    UnbalancedProofLevels, UnrenderableNode, DuplicateLabel, EmptySubs

# pylint: disable=invalid-name,missing-docstring,protected-access

SPECS = os.path.join(os.path.dirname(__file__), "fixtures", "specs")

EVEN_PROOF = """<1>1. x + x = 2 * x OBVIOUS
<1>2. Even(2 * x)
  <2>1. 2 * x \\in Nat OBVIOUS
  <2>2. (2 * x) % 2 = 0 OBVIOUS
  <2>. QED BY <2>1, <2>2 DEF Even
<1>. QED BY <1>1, <1>2 DEF Even"""


def read_spec(name):
    with io.open(os.path.join(SPECS, name), encoding="utf-8") as spec:
        return spec.read()


def even_obligation():
    return Obligation("EvenDouble", "Even(x + x)",
                      ["CONSTANT x", "ASSUME XNat == x \\in Nat",
                       "Even(n) == n % 2 = 0"], ["Naturals"])


class TestStepLabel(unittest.TestCase):

    def test_parse(self):
        self.assertEqual(parse_step_label("<1>2"), StepLabel(1, "2"))
        self.assertEqual(parse_step_label("<3>10."), StepLabel(3, "10"))
        self.assertEqual(parse_step_label(" <2>a "), StepLabel(2, "a"))
        self.assertEqual(parse_step_label("<1>. QED"), StepLabel(1, QED))
        self.assertEqual(parse_step_label("<1>QED"), StepLabel(1, QED))
        self.assertEqual(parse_step_label("<2>"), StepLabel(2, ""))

    def test_parse_malformed(self):
        for text in ("<0>1", "1>2", "<a>1", "<1>2 QED", "", "<1>x-y"):
            with self.assertRaises(MalformedLabel):
                parse_step_label(text)

    def test_prefix_and_str(self):
        self.assertEqual(StepLabel(1, "2").prefix(), "<1>2.")
        self.assertEqual(StepLabel(2, QED).prefix(), "<2>. QED")
        self.assertEqual(StepLabel(2, "").prefix(), "<2>")
        self.assertEqual(str(StepLabel(1, "2")), "<1>2")
        self.assertTrue(StepLabel(1, QED).is_qed)
        self.assertTrue(StepLabel(1, "").is_anonymous)


class TestDefinitionAndObligation(unittest.TestCase):

    def test_definition_names(self):
        self.assertEqual(Definition.from_text("Even(n) == n % 2 = 0").name,
                         "Even")
        self.assertEqual(Definition.from_text("Init == x = 0").name, "Init")
        self.assertEqual(
            Definition.from_text("ASSUME XNat == x \\in Nat").name, "XNat")
        self.assertEqual(Definition.from_text("LOCAL Sq(n) == n * n").name,
                         "Sq")
        self.assertEqual(Definition.from_text("CONSTANT  x").name,
                         "CONSTANT x")

    def test_operator_names_exclude_declarations(self):
        self.assertEqual(even_obligation().operator_names, ["Even"])

    def test_duplicate_definitions(self):
        with self.assertRaises(DuplicateLabel):
            Obligation("o", "TRUE", ["F == 1", "F == 2"])

    def test_child_shares_context(self):
        goal = even_obligation()
        child = goal.child("EvenDouble_1_2", "Even(2 * x)")
        self.assertEqual(child.definitions, goal.definitions)
        self.assertEqual(child.module_context, ("Naturals",))
        self.assertEqual(child.normalized_assertion, "Even(2 * x)")

    def test_normalize_text(self):
        self.assertEqual(normalize_text("  a\n\t b  "), "a b")


class TestParseModule(unittest.TestCase):

    def test_missing_header(self):
        with self.assertRaises(MissingModuleHeader):
            parse_module("THEOREM T == TRUE OBVIOUS")

    def test_even_module(self):
        module = parse_module(read_spec("EvenDouble.tla"))
        self.assertIsInstance(module, ParsedModule)
        self.assertEqual(module.module_name, "EvenDouble")
        self.assertEqual(module.extends, ["Naturals", "TLAPS"])
        self.assertEqual([d.name for d in module.definitions],
                         ["CONSTANT x", "XNat", "Even"])
        self.assertEqual(len(module.theorems), 1)
        theorem = module.theorems[0]
        self.assertEqual(theorem.name, "EvenDouble")
        self.assertEqual(theorem.assertion, "Even(x + x)")
        root = theorem.proof
        self.assertIsNone(root.label)
        self.assertEqual([str(child.label) for child in root.children],
                         ["<1>1", "<1>2", "<1>. QED"])
        self.assertEqual(root.children[0].assertion, "x + x = 2 * x")
        self.assertEqual(root.children[0].proof_body, "OBVIOUS")
        self.assertEqual(root.qed_clause, "BY <1>1, <1>2 DEF Even")
        inner = root.children[1]
        self.assertEqual(inner.assertion, "Even(2 * x)")
        self.assertEqual(inner.qed_clause, "BY <2>1, <2>2 DEF Even")
        self.assertEqual([str(step.label) for step in inner.steps],
                         ["<2>1", "<2>2"])
        self.assertEqual(root.depth(), 2)

    def test_majority_module_depth(self):
        module = parse_module(read_spec("MajorityInit.tla"))
        root = module.theorems[0].proof
        self.assertEqual(root.depth(), 4)
        self.assertEqual([str(step.label) for step in root.steps],
                         ["<1>1", "<1>2", "<1>3"])
        step3 = root.children[2]
        self.assertEqual([str(step.label) for step in step3.steps],
                         ["<2>1", "<2>2", "<2>3", "<2>4"])
        deepest = [node for node in root.walk()
                   if node.label is not None and node.label.level == 4]
        self.assertEqual([str(node.label) for node in deepest],
                         ["<4>1", "<4>2", "<4>3", "<4>. QED"])
        self.assertEqual(step3.children[2].children[0].label,
                         StepLabel(3, "10"))
        self.assertEqual(
            root.children[0].proof_body, "BY AllProvers DEF Init")

    def test_comments_ignored(self):
        module = parse_module("""---- MODULE C ----
(* a (* nested *) comment *)
F == 1 \\* trailing
THEOREM T == F = 1
<1>1. F = 1 BY DEF F  \\* <1>9. not a step
<1>. QED BY <1>1
====""")
        root = module.theorems[0].proof
        self.assertEqual([str(child.label) for child in root.children],
                         ["<1>1", "<1>. QED"])
        self.assertEqual(root.children[0].proof_body, "BY DEF F")
        self.assertEqual(module.definitions[0].text, "F == 1")

    def test_leaf_theorem_proof(self):
        module = parse_module(read_spec("Arith.tla"))
        names = [theorem.name for theorem in module.theorems]
        self.assertEqual(names, ["DoubleNat", "TimesTwo", "AddComm"])
        root = module.theorems[2].proof
        self.assertEqual(root.children, ())
        self.assertEqual(root.proof_body, "BY AllProvers")

    def test_unbalanced_levels(self):
        with self.assertRaises(UnbalancedProofLevels):
            parse_proof("<1>1. TRUE\n    <3>1. TRUE OBVIOUS\n<1>. QED")

    def test_anonymous_step(self):
        root = parse_proof("<1> USE DEF Even\n<1>1. TRUE OBVIOUS\n"
                           "<1>. QED BY <1>1")
        self.assertEqual(root.children[0].label, StepLabel(1, ""))
        self.assertEqual(root.children[0].assertion, "USE DEF Even")

    def test_locate_steps(self):
        located = locate_steps(EVEN_PROOF)
        self.assertEqual(located[0], (1, StepLabel(1, "1")))
        self.assertEqual(located[2], (3, StepLabel(2, "1")))
        self.assertEqual(located[-1], (6, StepLabel(1, QED)))


class TestRoundTrip(unittest.TestCase):

    def assertRoundTrip(self, name):
        module = parse_module(read_spec(name))
        for theorem in module.theorems:
            text = render_proof(theorem.proof)
            again = parse_proof(text)
            self.assertEqual(again.structure(), theorem.proof.structure())
        rendered = render_module(module.module_name, module.extends,
                                 module.definitions, module.theorems)
        again = parse_module(rendered)
        self.assertEqual(again.module_name, module.module_name)
        self.assertEqual(again.extends, module.extends)
        self.assertEqual([d.text for d in again.definitions],
                         [d.text for d in module.definitions])
        self.assertEqual(
            [(t.name, t.assertion, t.proof.structure())
             for t in again.theorems],
            [(t.name, t.assertion, t.proof.structure())
             for t in module.theorems])

    def test_even(self):
        self.assertRoundTrip("EvenDouble.tla")

    def test_majority(self):
        self.assertRoundTrip("MajorityInit.tla")

    def test_arith(self):
        self.assertRoundTrip("Arith.tla")

    def test_render_even(self):
        root = parse_module(read_spec("EvenDouble.tla")).theorems[0].proof
        self.assertEqual(render_proof(root), EVEN_PROOF)

    def test_render_labeled_subtree(self):
        root = parse_proof(EVEN_PROOF)
        self.assertEqual(render_proof(root.children[1]).split("\n")[0],
                         "<1>2. Even(2 * x)")

    def test_unrenderable(self):
        node = ProofNode(StepLabel(1, "1"), "A", "OBVIOUS",
                         [ProofNode.leaf(StepLabel(2, "1"), "B", "OBVIOUS")])
        with self.assertRaises(UnrenderableNode):
            render_proof(node)
        mixed = ProofNode(None, "", "", [
            ProofNode.leaf(StepLabel(1, "1"), "A", "OBVIOUS"),
            ProofNode.leaf(StepLabel(2, "1"), "B", "OBVIOUS")])
        with self.assertRaises(UnrenderableNode):
            render_proof(mixed)

    def test_internal_and_status(self):
        leaf = ProofNode.leaf(StepLabel(1, "1"), "A", "OBVIOUS",
                              NodeStatus.VERIFIED)
        node = ProofNode.internal(None, "", [leaf], "BY <1>1",
                                  NodeStatus.VERIFIED, level=1)
        self.assertEqual(node.qed_clause, "BY <1>1")
        self.assertTrue(node.is_verified())
        self.assertEqual(render_proof(node), "<1>1. A OBVIOUS\n"
                                             "<1>. QED BY <1>1")
        self.assertFalse(node._replace(children=(
            leaf._replace(status=NodeStatus.FAILED),)).is_verified())


class TestStatements(unittest.TestCase):

    def test_even_statements(self):
        module = parse_module(read_spec("EvenDouble.tla"))
        statements = extract_statements(module, "specs/EvenDouble.tla")
        self.assertEqual(len(statements), 6)
        first = statements[0]
        self.assertEqual(first.text, "x + x = 2 * x OBVIOUS")
        self.assertEqual(first.label, StepLabel(1, "1"))
        self.assertEqual(first.source.path, "specs/EvenDouble.tla")
        self.assertEqual(first.source.theorem, "EvenDouble")
        self.assertEqual(statements[-1].text, "QED BY <1>1, <1>2 DEF Even")

    def test_majority_statements(self):
        module = parse_module(read_spec("MajorityInit.tla"))
        self.assertEqual(len(extract_statements(module)), 21)

    def test_arith_statements(self):
        module = parse_module(read_spec("Arith.tla"))
        self.assertEqual(len(extract_statements(module)), 5)


class TestModules(unittest.TestCase):

    def test_module_name_for(self):
        self.assertEqual(module_name_for("EvenDouble"), "EvenDouble")
        self.assertEqual(module_name_for("Even Double!", "Proof"),
                         "Even_Double_Proof")
        self.assertEqual(module_name_for("1st"), "M1st")
        self.assertEqual(module_name_for("***"), "Obligation")

    def test_decomposition_skeleton(self):
        subs = [(StepLabel(1, "1"), "x + x = 2 * x"),
                (StepLabel(1, "2"), "Even(2 * x)")]
        text = make_decomposition_skeleton(even_obligation(), subs,
                                           "BY <1>1, <1>2 DEF Even")
        self.assertIn("---- MODULE EvenDouble_Decomp ----", text)
        self.assertIn("EXTENDS Naturals, TLAPS", text)
        self.assertIn("ASSUME XNat == x \\in Nat", text)
        self.assertIn("THEOREM EvenDouble == Even(x + x)", text)
        self.assertIn("<1>1. x + x = 2 * x OMITTED", text)
        self.assertIn("<1>2. Even(2 * x) OMITTED", text)
        self.assertIn("<1>. QED BY <1>1, <1>2 DEF Even", text)
        theorem = parse_module(text).theorems[0]
        self.assertEqual(len(theorem.proof.children), 3)

    def test_level_two_skeleton(self):
        goal = even_obligation().child("EvenDouble_1_2", "Even(2 * x)")
        subs = [(StepLabel(2, "1"), "2 * x \\in Nat"),
                (StepLabel(2, "2"), "(2 * x) % 2 = 0")]
        text = make_decomposition_skeleton(goal, subs,
                                           "BY <2>1, <2>2 DEF Even")
        self.assertIn("<2>. QED BY <2>1, <2>2 DEF Even", text)

    def test_skeleton_errors(self):
        goal = even_obligation()
        with self.assertRaises(EmptySubs):
            make_decomposition_skeleton(goal, [], "OBVIOUS")
        with self.assertRaises(DuplicateLabel):
            make_decomposition_skeleton(
                goal, [(StepLabel(1, "1"), "A"), (StepLabel(1, "1"), "B")],
                "OBVIOUS")
        with self.assertRaises(UnbalancedProofLevels):
            make_decomposition_skeleton(
                goal, [(StepLabel(1, "1"), "A"), (StepLabel(2, "1"), "B")],
                "OBVIOUS")

    def test_proof_module(self):
        text = make_proof_module(even_obligation(), EVEN_PROOF)
        self.assertIn("---- MODULE EvenDouble_Proof ----", text)
        self.assertIn(EVEN_PROOF, text)
        leaf = make_proof_module(even_obligation(), "BY DEF Even")
        self.assertIn("THEOREM EvenDouble == Even(x + x)\n  BY DEF Even",
                      leaf)

    def test_proof_module_keeps_broken_proof(self):
        broken = "<1>1. TRUE\n    <3>1. TRUE OBVIOUS"
        text = make_proof_module(even_obligation(), broken)
        self.assertIn("<3>1. TRUE OBVIOUS", text)
