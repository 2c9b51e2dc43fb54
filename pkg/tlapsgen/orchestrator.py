#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Proof search: decompose the goal, check the decomposition, prove the
sub-obligations through the prover tiers and LLM candidates, decompose the
sub-obligations nobody could prove, and assemble the verified proof.

Budgets bound the search: decomposition attempts per obligation (and
optionally in total) and the proof depth. A sub-obligation that cannot be
proved or decomposed fails its branch, and the parent is decomposed again
with that failure as feedback.
"""

import collections
import concurrent.futures
import enum
import hashlib
import io
import itertools
import json
import logging
import re
import threading
import time

from tlapsgen.backends.base import GenerationRequest
from tlapsgen.exception import ConfigurationError, OrchestratorError, \
    OutputWriteError, PromptError, ProofScriptError
from tlapsgen.proof_ast import NodeStatus, ProofNode, Theorem, \
    module_name_for, normalize_text, parse_proof, render_module, render_proof
from tlapsgen.prompts import TemplateSet, format_decomposition_response, \
    parse_decomposition_response, parse_proof_response, \
    render_decomposition_prompt, render_proof_prompt, \
    render_refinement_prompt
from tlapsgen.verifiers.base import Location, ProverTier, TIER_BODIES, \
    VerificationResult, Verdict

LOG = logging.getLogger('tlapsgen.orchestrator')

__all__ = ['DepthExceeded', 'DecompositionBudgetExhausted',
           'ParseFailureBudget', 'GlobalBudgetExhausted', 'IncompleteTree',
           'RunConfig', 'EventKind', 'Event', 'RunLog', 'RUNLOG_VERSION',
           'Outcome', 'ProofResult', 'NeedsDecomposition', 'ProofSearch',
           'assemble', 'write_proof_module']

RUNLOG_VERSION = "runlog/1"

_STEP_REF_RE = re.compile(r'(?<!<)<(\d+)>(?!>)')


class DepthExceeded(OrchestratorError):
    """
    The exception class for work requested below the depth limit
    """
    pass


class DecompositionBudgetExhausted(OrchestratorError):
    """
    The exception class for an obligation without accepted decomposition
    after its attempt budget.

    ``partial`` holds the best partial proof tree of the obligation the
    search gave up on.
    """
    partial = None
    children = None


class ParseFailureBudget(DecompositionBudgetExhausted):
    """
    The exception class for a decomposition budget spent on responses that
    could not be parsed
    """
    pass


class GlobalBudgetExhausted(DecompositionBudgetExhausted):
    """
    The exception class for a run that reached its total decomposition
    budget
    """
    pass


class IncompleteTree(OrchestratorError):
    """
    The exception class for assembling a tree with unverified nodes
    """
    pass


_RUN_DEFAULTS = collections.OrderedDict([
    ("max_decomposition_attempts_per_obligation", 10),
    ("max_depth", 5),
    ("n_candidates", 4),
    ("retrieval_k", 5),
    ("refinement_enabled", True),
    ("max_total_decomposition_attempts", None),
    ("concurrent_siblings", False),
    ("llm_on_goal", False),
    ("candidate_temperature", 0.7),
    ("decomposition_temperature", 0.0),
    ("max_tokens", 2048),
])


class RunConfig(collections.namedtuple('RunConfig', list(_RUN_DEFAULTS))):
    """Budgets and sampling parameters of a proof search"""
    __slots__ = ()

    def __new__(cls, **fields):
        unknown = set(fields) - set(_RUN_DEFAULTS)
        if unknown:
            raise ConfigurationError("unknown run settings: {0}".format(
                ", ".join(sorted(unknown))))
        values = dict(_RUN_DEFAULTS)
        values.update(fields)
        return super(RunConfig, cls).__new__(cls, **values)

    def validate(self):
        """
        Check every budget.

        .. note::
            raises an exception ConfigurationError for a budget below 1 or
            a negative temperature.
        """
        budgets = ["max_decomposition_attempts_per_obligation", "max_depth",
                   "n_candidates", "retrieval_k", "max_tokens"]
        if self.max_total_decomposition_attempts is not None:
            budgets.append("max_total_decomposition_attempts")
        for name in budgets:
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ConfigurationError(
                    "{0} must be a positive integer, got '{1}'".format(
                        name, value))
        for name in ("candidate_temperature", "decomposition_temperature"):
            if getattr(self, name) < 0:
                raise ConfigurationError("{0} must not be negative".format(
                    name))
        return self


class EventKind(enum.Enum):
    """Run log event kinds"""
    DECOMPOSE_REQUESTED = "DecomposeRequested"
    DECOMPOSITION_PROPOSED = "DecompositionProposed"
    DECOMPOSITION_CHECKED = "DecompositionChecked"
    TIER_ATTEMPTED = "TierAttempted"
    CANDIDATE_GENERATED = "CandidateGenerated"
    PROOF_CHECKED = "ProofChecked"
    NODE_VERIFIED = "NodeVerified"
    BUDGET_EXHAUSTED = "BudgetExhausted"


Event = collections.namedtuple(
    'Event', ['kind', 'timestamp', 'path', 'obligation', 'payload',
              'detail'])


def _digest(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


class RunLog(object):
    """Ordered, thread-safe list of search events"""

    def __init__(self):
        self.events = []
        self._lock = threading.Lock()

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(list(self.events))

    # pylint: disable=too-many-arguments
    def add(self, kind, path, obl, payload="", **detail):
        """
        Append an event.

            :param kind: event kind
            :param path: node path in the search, e.g. ``goal/<1>2``
            :param obl: obligation the event is about
            :param payload: text whose hash identifies the event payload
            :type kind: EventKind
            :rtype: Event
        """
        event = Event(kind, time.time(), path,
                      _digest(obl.normalized_assertion),
                      _digest(payload) if payload else "", detail)
        with self._lock:
            self.events.append(event)
        return event

    def extend(self, other):
        """Append the events of another log"""
        with self._lock:
            self.events.extend(other.events)

    def of(self, kind=None, path=None):
        """Events filtered by kind and path"""
        return [event for event in self.events
                if (kind is None or event.kind == kind) and
                (path is None or event.path == path)]

    def count(self, kind, path=None):
        """Number of events of a kind (at a path)"""
        return len(self.of(kind, path))

    def lines(self, include_timestamps=True):
        """
        JSON lines of the events.

            :param include_timestamps: drop the time field when False
            :rtype: list of string
        """
        lines = []
        for event in self.events:
            data = {"kind": event.kind.value, "path": event.path,
                    "obligation": event.obligation, "payload": event.payload,
                    "detail": event.detail}
            if include_timestamps:
                data["time"] = round(event.timestamp, 6)
            lines.append(json.dumps(data, sort_keys=True, ensure_ascii=False))
        return lines

    def dump(self, path):
        """
        Write the log as ``runlog/1`` JSON lines.

        .. note::
            raises an exception OutputWriteError if the file cannot be
            written.
        """
        try:
            with io.open(path, "w", encoding="utf-8", newline="\n") as out:
                out.write(json.dumps({"version": RUNLOG_VERSION}) + "\n")
                for line in self.lines():
                    out.write(line + "\n")
        except (IOError, OSError) as err:
            LOG.error("write run log '%s' error: %s", path, err)
            raise OutputWriteError("cannot write run log '{0}': {1}".format(
                path, err))


class Outcome(enum.Enum):
    """Final state of a proof search"""
    COMPLETE = "complete"
    EXHAUSTED = "exhausted"


ProofResult = collections.namedtuple('ProofResult',
                                     ['outcome', 'tree', 'log'])

NeedsDecomposition = collections.namedtuple('NeedsDecomposition',
                                            ['obligation', 'reason'])


class _BranchFailed(Exception):
    """A sub-obligation that could be neither proved nor decomposed"""

    def __init__(self, label, obl, reason, partial=None):
        super(_BranchFailed, self).__init__(reason)
        message = "sub-obligation {0} could not be proved: {1}\n{2}".format(
            label, reason, obl.assertion)
        self.feedback = VerificationResult.error(Verdict.FAILED, message,
                                                 location=Location(label))
        self.node = (partial or _failed_leaf(obl))._replace(label=label)
        self.children = None


def _failed_leaf(obl):
    """Failed leaf carrying the last automated tactic checked"""
    return ProofNode.leaf(None, obl.assertion,
                          TIER_BODIES[ProverTier.ALL_PROVERS],
                          NodeStatus.FAILED)


def _partial_node(obl, proposal, children, depth):
    """Failed node of an accepted proposal whose children did not all pass"""
    node = ProofNode.internal(None, obl.assertion, children,
                              proposal.qed_clause, NodeStatus.VERIFIED,
                              level=depth + 1)
    return node._replace(status=NodeStatus.FAILED)


def _verified_count(node):
    return sum(1 for step in node.walk()
               if step.status == NodeStatus.VERIFIED)


def _budget_key(path, obl):
    return "{0}#{1}".format(path, _digest(obl.normalized_assertion))


def _step_levels(body):
    """Step levels a proof body adds below its obligation"""
    try:
        return parse_proof(body).depth()
    except ProofScriptError:
        return 0


def _settle(jobs, outcomes):
    """
    Children of a proposal from the outcomes of its sub-obligations, in
    label order. Sub-obligations without outcome stay unproven. The first
    failure in label order is raised with the children attached.
    """
    children = []
    failure = None
    for (label, child, _), outcome in itertools.zip_longest(jobs, outcomes):
        if isinstance(outcome, ProofNode):
            children.append(outcome)
        elif outcome is None:
            children.append(ProofNode.leaf(label, child.assertion, ""))
        elif isinstance(outcome, _BranchFailed):
            children.append(outcome.node)
            failure = failure or outcome
        elif isinstance(outcome, GlobalBudgetExhausted):
            children.append((outcome.partial or _failed_leaf(child))
                            ._replace(label=label))
            failure = failure or outcome
        else:
            raise outcome
    if failure is not None:
        failure.children = children
        raise failure
    return children


def _verified(node):
    return node._replace(status=NodeStatus.VERIFIED,
                         children=tuple(_verified(child)
                                        for child in node.children))


def _shift_levels(node, delta):
    def shift(text):
        return _STEP_REF_RE.sub(
            lambda m: "<{0}>".format(int(m.group(1)) + delta), text)
    label = node.label._replace(level=node.label.level + delta) \
        if node.label is not None else None
    return ProofNode(label, shift(node.assertion), shift(node.proof_body),
                     [_shift_levels(child, delta) for child in node.children],
                     node.status)


def _leaf(obl, body, depth):
    """Unlabeled verified node for an obligation proved by ``body``"""
    try:
        root = parse_proof(body)
    except ProofScriptError:
        root = None
    if root is None or not root.children:
        return ProofNode.leaf(None, obl.assertion, body.strip(),
                              NodeStatus.VERIFIED)
    delta = depth + 1 - root.children[0].label.level
    children = [_verified(_shift_levels(child, delta))
                for child in root.children]
    return ProofNode(None, obl.assertion, "", children, NodeStatus.VERIFIED)


def _child_name(obl, label):
    return "{0}_{1}_{2}".format(obl.name, label.level, label.name)


class ProofSearch(object):
    """
    Proof search over a text generation backend and a verifier.

        :param backend: text generation backend
        :param verifier: verifier
        :param retriever: reference lookup for proof prompts (default: none)
        :param config: default run configuration
        :param templates: prompt templates (default: bundled templates)
        :type config: RunConfig

    :Example:

    >>> search = ProofSearch(backend, verifier, retriever)
    >>> result = search.prove(goal)
    >>> result.outcome
    <Outcome.COMPLETE: 'complete'>
    >>> print(assemble(result.tree))
    """

    # pylint: disable=too-many-arguments
    def __init__(self, backend, verifier, retriever=None, config=None,
                 templates=None):
        self.backend = backend
        self.verifier = verifier
        self.retriever = retriever
        self.config = config or RunConfig()
        self.templates = templates or TemplateSet()
        self.log = RunLog()
        self._attempts = collections.Counter()
        self._total = 0
        self._lock = threading.Lock()

    def _reset(self):
        self.log = RunLog()
        self._attempts = collections.Counter()
        self._total = 0

    def prove(self, goal, cfg=None):
        """
        Search a proof of the goal.

            :param goal: goal obligation
            :param cfg: run configuration (default: the search's)
            :type goal: Obligation
            :type cfg: RunConfig
            :returns: the verified tree of a complete search; for an
                      exhausted search the goal node with the best partial
                      decomposition found, failed nodes marked FAILED and
                      unattempted ones UNPROVEN
            :rtype: ProofResult

        .. note::
            raises ConfigurationError for an invalid configuration or goal;
            backend and prover environment errors propagate.
        """
        cfg = (cfg or self.config).validate()
        if not goal.assertion.strip():
            raise ConfigurationError("goal '{0}' has an empty assertion"
                                     .format(goal.name))
        self._reset()
        LOG.info("proving '%s'", goal.name)
        path = "goal"
        try:
            outcome = self._prove_leaf(goal, 0, cfg, path, self.log,
                                       cfg.llm_on_goal)
            if isinstance(outcome, ProofNode):
                tree = outcome._replace(assertion="")
            else:
                tree = self._decompose_and_prove(goal, 0, cfg, path,
                                                 self.log)._replace(
                                                     assertion="")
        except DecompositionBudgetExhausted as err:
            LOG.warning("search for '%s' exhausted: %s", goal.name, err)
            return ProofResult(Outcome.EXHAUSTED,
                               err.partial or _failed_leaf(goal), self.log)
        LOG.info("proof of '%s' complete, depth %d", goal.name, tree.depth())
        return ProofResult(Outcome.COMPLETE, tree, self.log)

    def prove_leaf(self, obl, depth, cfg=None, path=None, log=None):
        """
        Prove an obligation directly: OBVIOUS, then BY AllProvers, then the
        LLM candidates of a retrieval-augmented prompt, checked in order.

            :param obl: obligation
            :param depth: depth of the obligation (0 for the goal)
            :param cfg: run configuration (default: the search's)
            :type obl: Obligation
            :type depth: int
            :returns: unlabeled verified node, or NeedsDecomposition
            :rtype: ProofNode or NeedsDecomposition

        .. note::
            raises an exception DepthExceeded beyond the depth limit.
        """
        cfg = cfg or self.config
        return self._prove_leaf(obl, depth, cfg, path or obl.name,
                                log or self.log, True)

    # pylint: disable=too-many-arguments,too-many-locals
    def _prove_leaf(self, obl, depth, cfg, path, log, use_llm):
        if depth > cfg.max_depth:
            raise DepthExceeded("depth {0} of '{1}' exceeds {2}".format(
                depth, obl.name, cfg.max_depth))
        for tier in (ProverTier.OBVIOUS, ProverTier.ALL_PROVERS):
            log.add(EventKind.TIER_ATTEMPTED, path, obl, tier=tier.name)
            result = self.verifier.try_tier(obl, tier)
            log.add(EventKind.PROOF_CHECKED, path, obl, TIER_BODIES[tier],
                    tier=tier.name, verdict=result.overall.value)
            if result.proved:
                log.add(EventKind.NODE_VERIFIED, path, obl, TIER_BODIES[tier])
                LOG.info("%s proved by %s", path, TIER_BODIES[tier])
                return _leaf(obl, TIER_BODIES[tier], depth)
        if not use_llm:
            return NeedsDecomposition(obl, "automated tiers failed")
        log.add(EventKind.TIER_ATTEMPTED, path, obl, tier=ProverTier.LLM.name)
        refs = self.retriever.references(obl) if self.retriever else None
        prompt = render_proof_prompt(obl, refs, self.templates)
        result = self.backend.generate(GenerationRequest(
            prompt, cfg.n_candidates, cfg.candidate_temperature,
            cfg.max_tokens))
        for index, text in enumerate(result.candidates):
            log.add(EventKind.CANDIDATE_GENERATED, path, obl, text,
                    index=index)
        checked = set(TIER_BODIES.values())
        for index, text in enumerate(result.candidates):
            try:
                body = parse_proof_response(text)
            except PromptError as err:
                LOG.debug("%s candidate %d unusable: %s", path, index, err)
                continue
            if normalize_text(body) in checked:
                continue
            checked.add(normalize_text(body))
            if depth + _step_levels(body) > cfg.max_depth:
                LOG.debug("%s candidate %d nests below depth %d", path,
                          index, cfg.max_depth)
                continue
            verdict = self.verifier.check_proof(obl, body)
            log.add(EventKind.PROOF_CHECKED, path, obl, body,
                    tier=ProverTier.LLM.name, index=index,
                    verdict=verdict.overall.value)
            if verdict.proved:
                log.add(EventKind.NODE_VERIFIED, path, obl, body)
                LOG.info("%s proved by candidate %d", path, index)
                return _leaf(obl, body, depth)
        LOG.info("%s: all %d candidates failed", path,
                 len(result.candidates))
        return NeedsDecomposition(obl, "all {0} candidates failed".format(
            len(result.candidates)))

    def _spend(self, cfg, key):
        with self._lock:
            if self._attempts[key] >= \
                    cfg.max_decomposition_attempts_per_obligation:
                return False
            if cfg.max_total_decomposition_attempts is not None and \
                    self._total >= cfg.max_total_decomposition_attempts:
                raise GlobalBudgetExhausted(
                    "total decomposition budget of {0} spent".format(
                        cfg.max_total_decomposition_attempts))
            self._attempts[key] += 1
            self._total += 1
            return True

    # pylint: disable=too-many-arguments
    def decompose_with_retry(self, obl, depth, cfg=None, path=None,
                             previous=None, log=None):
        """
        Ask for decompositions until one passes the decomposition check.

        Every LLM call counts against the obligation's attempt budget,
        which is kept per node path and assertion: a refined parent that
        puts a new assertion under a known label starts a fresh budget.
        After a rejected proposal the next prompt is a refinement prompt
        quoting it with its feedback.

            :param obl: obligation to decompose
            :param depth: depth of the obligation
            :param cfg: run configuration (default: the search's)
            :param path: node path (default: the obligation name)
            :param previous: (proposal, VerificationResult) of the last
                             rejected decomposition
            :type obl: Obligation
            :type depth: int
            :rtype: DecompositionProposal

        .. note::
            raises DepthExceeded at the depth limit, ParseFailureBudget when
            the budget ran out on unparseable responses only and
            DecompositionBudgetExhausted otherwise.
        """
        cfg = cfg or self.config
        path = path or obl.name
        log = log or self.log
        if depth >= cfg.max_depth:
            raise DepthExceeded("cannot decompose '{0}' at depth {1}".format(
                obl.name, depth))
        key = _budget_key(path, obl)
        level = depth + 1
        parsed = 0
        calls = 0
        while True:
            try:
                if not self._spend(cfg, key):
                    break
            except GlobalBudgetExhausted:
                log.add(EventKind.BUDGET_EXHAUSTED, path, obl,
                        budget="total")
                raise
            calls += 1
            if previous is not None and cfg.refinement_enabled:
                prompt = render_refinement_prompt(
                    obl, previous[0], previous[1], level, self.templates)
            else:
                prompt = render_decomposition_prompt(obl, level,
                                                     self.templates)
            log.add(EventKind.DECOMPOSE_REQUESTED, path, obl, prompt.text,
                    attempt=self._attempts[key])
            result = self.backend.generate(GenerationRequest(
                prompt, 1, cfg.decomposition_temperature, cfg.max_tokens))
            try:
                proposal = parse_decomposition_response(result.candidates[0],
                                                        obl, level)
            except PromptError as err:
                LOG.warning("%s: unusable decomposition response: %s", path,
                            err)
                log.add(EventKind.DECOMPOSITION_PROPOSED, path, obl,
                        result.candidates[0], error=type(err).__name__)
                continue
            parsed += 1
            log.add(EventKind.DECOMPOSITION_PROPOSED, path, obl,
                    format_decomposition_response(proposal),
                    subs=len(proposal.sub_obligations))
            verdict = self.verifier.check_decomposition(obl, proposal)
            log.add(EventKind.DECOMPOSITION_CHECKED, path, obl,
                    verdict=verdict.overall.value)
            if verdict.proved:
                LOG.info("%s decomposed into %s", path, ", ".join(
                    str(label) for label in proposal.labels))
                return proposal
            previous = (proposal, verdict)
        log.add(EventKind.BUDGET_EXHAUSTED, path, obl,
                budget="obligation")
        if calls and not parsed:
            raise ParseFailureBudget(
                "no parseable decomposition of '{0}' in {1} attempts".format(
                    obl.name, calls))
        raise DecompositionBudgetExhausted(
            "no verified decomposition of '{0}' after {1} attempts".format(
                obl.name, self._attempts[key]))

    # pylint: disable=too-many-arguments
    def _decompose_and_prove(self, obl, depth, cfg, path, log):
        previous = None
        partial = _failed_leaf(obl)
        while True:
            try:
                proposal = self.decompose_with_retry(obl, depth, cfg, path,
                                                     previous, log)
            except DecompositionBudgetExhausted as err:
                err.partial = partial
                raise
            try:
                children = self._prove_children(obl, proposal, depth + 1,
                                                cfg, path, log)
            except GlobalBudgetExhausted as err:
                err.partial = _partial_node(obl, proposal, err.children,
                                            depth)
                raise
            except _BranchFailed as failure:
                attempt = _partial_node(obl, proposal, failure.children,
                                        depth)
                if _verified_count(attempt) >= _verified_count(partial):
                    partial = attempt
                previous = (proposal, failure.feedback)
                continue
            node = ProofNode.internal(None, obl.assertion, children,
                                      proposal.qed_clause,
                                      NodeStatus.VERIFIED,
                                      level=depth + 1)
            log.add(EventKind.NODE_VERIFIED, path, obl, proposal.qed_clause)
            return node

    # pylint: disable=too-many-arguments
    def _prove_child(self, obl, label, depth, cfg, path, log):
        outcome = self._prove_leaf(obl, depth, cfg, path, log, True)
        if isinstance(outcome, ProofNode):
            return outcome._replace(label=label)
        if depth >= cfg.max_depth:
            log.add(EventKind.BUDGET_EXHAUSTED, path, obl, budget="depth")
            raise _BranchFailed(label, obl, "{0} at the depth limit".format(
                outcome.reason))
        try:
            node = self._decompose_and_prove(obl, depth, cfg, path, log)
        except GlobalBudgetExhausted:
            raise
        except DecompositionBudgetExhausted as err:
            raise _BranchFailed(label, obl, str(err), err.partial)
        return node._replace(label=label)

    # pylint: disable=too-many-arguments
    def _prove_children(self, obl, proposal, depth, cfg, path, log):
        jobs = [(label, obl.child(_child_name(obl, label), assertion),
                 "{0}/{1}".format(path, label))
                for label, assertion in proposal.sub_obligations]
        if not cfg.concurrent_siblings or len(jobs) < 2:
            outcomes = []
            for label, child, child_path in jobs:
                try:
                    outcomes.append(self._prove_child(
                        child, label, depth, cfg, child_path, log))
                except (_BranchFailed, GlobalBudgetExhausted) as err:
                    outcomes.append(err)
                    break
            return _settle(jobs, outcomes)
        logs = [RunLog() for _ in jobs]
        with concurrent.futures.ThreadPoolExecutor(len(jobs)) as pool:
            futures = [pool.submit(self._prove_child, child, label, depth,
                                   cfg, child_path, sub_log)
                       for (label, child, child_path), sub_log
                       in zip(jobs, logs)]
            concurrent.futures.wait(futures)
        for sub_log in logs:
            log.extend(sub_log)
        return _settle(jobs, [future.exception() or future.result()
                              for future in futures])


def assemble(tree):
    """
    Proof text of a verified tree.

        :param tree: root node
        :type tree: ProofNode
        :rtype: string

    .. note::
        raises an exception IncompleteTree if a node is not verified.
    """
    for node in tree.walk():
        if node.status != NodeStatus.VERIFIED:
            raise IncompleteTree("node '{0}' is {1}".format(
                node.label if node.label is not None else "root",
                node.status.value))
    return render_proof(tree)


def write_proof_module(goal, result, path):
    """
    Write the proof of a complete search as a ``.tla`` module.

        :param goal: goal obligation
        :param result: complete search result
        :param path: output file; its stem should be the module name
        :type goal: Obligation
        :type result: ProofResult
        :returns: module text
        :rtype: string
    """
    assemble(result.tree)
    extends = list(goal.module_context)
    if "TLAPS" not in extends:
        extends.append("TLAPS")
    text = render_module(module_name_for(goal.name, "Proof"), extends,
                         goal.definitions,
                         [Theorem(module_name_for(goal.name), goal.assertion,
                                  result.tree)])
    with io.open(path, "w", encoding="utf-8", newline="\n") as out:
        out.write(text)
    LOG.info("proof module written to %s", path)
    return text

