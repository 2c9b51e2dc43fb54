#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Prompt rendering from the text templates in ``tlapsgen/templates`` and
parsing of the structured responses.

Templates use ``{{name}}`` placeholders. Decomposition responses are split
on the section headers below (matched case-insensitively, markdown
decoration tolerated)::

    ORIGINAL OBLIGATION:
    DECOMPOSITION REASONING:
    PROOF STRATEGY:
    SUB-OBLIGATIONS:
    QED CLAUSE:
"""

import collections
import enum
import io
import logging
import os
import re

from tlapsgen.exception import PromptError, ProofScriptError
from tlapsgen.proof_ast import QED, ProofNode, StepLabel, locate_steps, \
    normalize_text, parse_proof, render_proof
from tlapsgen.verifiers.base import ObligationStatus, Verdict

LOG = logging.getLogger('tlapsgen.prompts')

__all__ = ['MissingSection', 'NoSubObligations', 'ObligationMismatch',
           'EmptyProof', 'RefineOnSuccess', 'TemplateNotFound', 'PromptKind',
           'PromptText', 'BaselineStyle', 'DecompositionProposal',
           'TemplateSet', 'SECTIONS', 'render_decomposition_prompt',
           'render_refinement_prompt', 'render_proof_prompt',
           'render_baseline_prompt', 'parse_decomposition_response',
           'format_decomposition_response', 'parse_proof_response']

DEFAULT_TEMPLATE_DIR = os.path.join(os.path.dirname(__file__), "templates")

SECTIONS = ("original obligation", "decomposition reasoning",
            "proof strategy", "sub-obligations", "qed clause")
_REQUIRED = SECTIONS[:4]

_SECTION_RE = re.compile(
    r'^[ \t>#*_`]*(?P<name>original\s+obligation|decomposition\s+reasoning|'
    r'proof\s+strategy|sub[\s-]*obligations|qed\s+clause)[ \t*_`]*'
    r'(?::[ \t*_`]*(?P<rest>.*))?$', re.IGNORECASE | re.MULTILINE)
_PLACEHOLDER_RE = re.compile(r'\{\{(\w+)\}\}')
_FENCE_LINE_RE = re.compile(r'^[ \t]*(?:```|~~~).*$', re.MULTILINE)
_FENCED_BLOCK_RE = re.compile(
    r'^[ \t]*(?:```|~~~)[^\n]*\n(.*?)^[ \t]*(?:```|~~~)',
    re.MULTILINE | re.DOTALL)
_BULLET_BEFORE_LABEL_RE = re.compile(
    r'^([ \t]*)(?:[-*+]|\d+[.)])[ \t]+(?=<\d+>)', re.MULTILINE)
_BULLET_RE = re.compile(r'^[ \t]*(?:[-*+]|\d+[.)])[ \t]+(?P<text>.*)$')
_TRAILING_PROOF_RE = re.compile(r'\s+(?:PROOF|BY|OBVIOUS|OMITTED)\b.*$',
                                re.DOTALL)
_QED_PREFIX_RE = re.compile(r'^(?:<\d+>\s*\.?\s*)?QED\b[\s:.]*')
_THEOREM_PREFIX_RE = re.compile(
    r'^(?:THEOREM|LEMMA|PROPOSITION|COROLLARY)\s+(?:[A-Za-z_]\w*\s*==\s*)?')
_PROOF_START_RE = re.compile(
    r'^[ \t]*(?:<\d+>|PROOF\b|BY\b|OBVIOUS\b|OMITTED\b)', re.MULTILINE)
_MODULE_LINE_RE = re.compile(r'^[ \t]*(?:-{4,}|={4,}).*$', re.MULTILINE)
_PROOF_BEGIN_KEYWORDS = ("BY", "OBVIOUS", "OMITTED", "PROOF")


class MissingSection(PromptError):
    """
    The exception class for a response without a required section

        :param name: section name, e.g. "proof strategy"
    """

    def __init__(self, name):
        super(MissingSection, self).__init__(
            "response has no '{0}' section".format(name))
        self.name = name


class NoSubObligations(PromptError):
    """
    The exception class for a sub-obligations section without any
    sub-obligation
    """
    pass


class ObligationMismatch(PromptError):
    """
    The exception class for a response echoing another obligation than the
    one requested
    """
    pass


class EmptyProof(PromptError):
    """
    The exception class for a proof response without proof text
    """
    pass


class RefineOnSuccess(PromptError):
    """
    The exception class for a refinement request with successful feedback
    """
    pass


class TemplateNotFound(PromptError):
    """
    The exception class for a missing template file
    """
    pass


class PromptKind(enum.Enum):
    """Prompt kinds; the kind tells which parser applies to the response"""
    DECOMPOSE = "decompose"
    REFINE = "refine"
    PROVE_WITH_REFERENCES = "prove"
    BASELINE_MINIMAL = "baseline_minimal"
    BASELINE_COT = "baseline_cot"
    BASELINE_TOT = "baseline_tot"
    BASELINE_GOT = "baseline_got"


class BaselineStyle(enum.Enum):
    """Direct prompting styles used for comparison runs"""
    MINIMAL = "minimal"
    COT = "cot"
    TOT = "tot"
    GOT = "got"

    @property
    def kind(self):
        """Prompt kind of the style"""
        return PromptKind("baseline_" + self.value)


class PromptText(collections.namedtuple('PromptText', ['text', 'kind'])):
    """
    Rendered prompt.

    .. note::
        raises an exception PromptError for empty text.
    """
    __slots__ = ()

    def __new__(cls, text, kind):
        if not text.strip():
            raise PromptError("rendered {0} prompt is empty".format(
                kind.value))
        return super(PromptText, cls).__new__(cls, text, kind)


class DecompositionProposal(collections.namedtuple(
        'DecompositionProposal', ['echoed_obligation', 'reasoning',
                                  'proof_strategy', 'sub_obligations',
                                  'qed_clause'])):
    """
    Parsed decomposition response. ``sub_obligations`` holds
    (StepLabel, assertion) pairs.
    """
    __slots__ = ()

    def __new__(cls, echoed_obligation, reasoning, proof_strategy,
                sub_obligations, qed_clause):
        return super(DecompositionProposal, cls).__new__(
            cls, echoed_obligation, reasoning, proof_strategy,
            tuple((label, assertion) for label, assertion in sub_obligations),
            qed_clause)

    @property
    def labels(self):
        """Sub-obligation labels in order"""
        return [label for label, _ in self.sub_obligations]

    @property
    def level(self):
        """Step level of the sub-obligations"""
        return self.sub_obligations[0][0].level


class TemplateSet(object):
    """
    Prompt templates read from a directory, cached after the first read.

        :param directory: template directory (default: the bundled
                          ``templates`` directory)
        :type directory: string
    """

    def __init__(self, directory=None):
        self.directory = directory or DEFAULT_TEMPLATE_DIR
        self._cache = {}

    def template(self, name):
        """
        Template text.

            :param name: template name without extension, e.g. "decompose"
            :rtype: string

        .. note::
            raises an exception TemplateNotFound if the file is missing.
        """
        if name not in self._cache:
            path = os.path.join(self.directory, name + ".txt")
            try:
                with io.open(path, encoding="utf-8") as template_file:
                    self._cache[name] = template_file.read()
            except (IOError, OSError) as err:
                raise TemplateNotFound("cannot read template '{0}': {1}"
                                       .format(path, err))
        return self._cache[name]

    def render(self, kind, **values):
        """
        Substitute ``{{name}}`` placeholders of the template of ``kind``.
        Unknown placeholders are kept.

            :param kind: prompt kind
            :type kind: PromptKind
            :rtype: PromptText
        """
        def substitute(match):
            value = values.get(match.group(1))
            return match.group(0) if value is None else str(value)
        text = _PLACEHOLDER_RE.sub(substitute, self.template(kind.value))
        return PromptText(text, kind)


_DEFAULT_TEMPLATES = TemplateSet()


def _templates(templates):
    return templates if templates is not None else _DEFAULT_TEMPLATES


def _definitions_block(obl):
    return "\n\n".join(definition.text for definition in obl.definitions)


def _subs_block(subs, qed_clause):
    lines = [render_proof(ProofNode.leaf(label, assertion, ""))
             for label, assertion in subs]
    if subs and qed_clause:
        lines.append(StepLabel(subs[0][0].level, QED).prefix() + " " +
                     qed_clause)
    return "\n".join(lines)


def _indent_message(message):
    return "\n    ".join(message.strip().split("\n"))


def _feedback_block(feedback):
    lines = []
    for report in feedback.per_obligation:
        if report.status == ObligationStatus.PROVED or \
                not report.message.strip():
            continue
        label = report.location.label if report.location else None
        where = str(label) if label is not None else "module"
        lines.append("- {0} ({1}): {2}".format(
            where, report.status.value, _indent_message(report.message)))
    if not lines:
        return "TLAPS reported that verification failed ({0}) without a " \
               "message.".format(feedback.overall.value)
    return "\n".join(lines)


def render_decomposition_prompt(obl, level=1, templates=None):
    """
    Decomposition request for an obligation.

        :param obl: obligation to decompose
        :param level: step level of the requested sub-obligations
        :param templates: template set (default: bundled templates)
        :type obl: Obligation
        :type level: int
        :rtype: PromptText
    """
    return _templates(templates).render(
        PromptKind.DECOMPOSE, obligation=obl.assertion,
        definitions=_definitions_block(obl), level=level)


def render_refinement_prompt(obl, failed, feedback, level=None,
                             templates=None):
    """
    Follow-up decomposition request quoting a rejected proposal and the
    prover feedback.

        :param obl: obligation to decompose
        :param failed: rejected proposal
        :param feedback: verification result of the rejected proposal
        :param level: step level (default: level of the rejected subs)
        :type obl: Obligation
        :type failed: DecompositionProposal
        :type feedback: VerificationResult
        :rtype: PromptText

    .. note::
        raises an exception RefineOnSuccess if the feedback is a success.
    """
    if feedback.overall == Verdict.PROVED:
        raise RefineOnSuccess(
            "decomposition of '{0}' was verified, nothing to refine".format(
                obl.name))
    return _templates(templates).render(
        PromptKind.REFINE, obligation=obl.assertion,
        definitions=_definitions_block(obl),
        failed_subs=_subs_block(failed.sub_obligations, failed.qed_clause),
        feedback=_feedback_block(feedback),
        level=level or failed.level)


def render_proof_prompt(obl, refs=None, templates=None):
    """
    Proof request augmented with similar verified proof statements.

        :param obl: obligation to prove
        :param refs: retrieved references (may be None or empty)
        :type obl: Obligation
        :type refs: ReferenceSet
        :rtype: PromptText
    """
    references = ""
    if refs is not None and refs.entries:
        examples = ["Example {0}:\n{1}".format(number, record.statement.text)
                    for number, (record, _) in enumerate(refs.entries, 1)]
        references = ("The following proof statements come from verified "
                      "TLAPS proofs of similar obligations. Use them as "
                      "examples of valid syntax and useful facts.\n\n" +
                      "\n\n".join(examples) + "\n\n")
    return _templates(templates).render(
        PromptKind.PROVE_WITH_REFERENCES, obligation=obl.assertion,
        definitions=_definitions_block(obl), references=references)


def render_baseline_prompt(style, theorem, templates=None):
    """
    Direct prompt of one of the comparison styles.

        :param style: baseline style
        :param theorem: full theorem statement
        :type style: BaselineStyle
        :type theorem: string
        :rtype: PromptText
    """
    if not theorem.strip():
        raise PromptError("baseline prompt needs a theorem")
    return _templates(templates).render(style.kind, theorem=theorem.strip())


def _strip_ticks(text):
    return re.sub(r'(?m)^([ \t]*)`+|`+[ \t]*$', r'\1', text)


def _sections(text):
    text = _FENCE_LINE_RE.sub("", text.replace("\r\n", "\n"))
    found = {}
    matches = list(_SECTION_RE.finditer(text))
    for index, match in enumerate(matches):
        name = re.sub(r'[\s-]+', ' ', match.group('name').lower())
        name = "sub-obligations" if name == "sub obligations" else name
        if name in found:
            continue
        end = matches[index + 1].start() if index + 1 < len(matches) \
            else len(text)
        rest = (match.group('rest') or "").strip().rstrip("*_`").strip()
        body = text[match.end():end].strip("\n")
        found[name] = (rest + "\n" + body).strip() if rest else body.strip()
    return found


def _first_paragraph(text):
    return re.split(r'\n[ \t]*\n', text.strip(), maxsplit=1)[0]


def _labeled_subs(block):
    try:
        root = parse_proof(block)
    except ProofScriptError as err:
        LOG.debug("sub-obligation block is not a step list: %s", err)
        return None, []
    subs = []
    qed = None
    for child in root.children:
        if child.label.is_qed:
            qed = child.proof_body
        elif not child.label.is_anonymous:
            assertion = _first_paragraph(child.assertion)
            if assertion:
                subs.append((child.label, assertion))
    return qed, subs


def _bulleted_subs(block):
    subs = []
    qed = None
    current = None
    for line in block.split("\n"):
        match = _BULLET_RE.match(line)
        if match is not None:
            current = [match.group('text').strip()]
            subs.append(current)
        elif not line.strip():
            current = None
        elif current is not None:
            current.append(line.strip())
    assertions = []
    for parts in subs:
        text = " ".join(parts)
        if _QED_PREFIX_RE.match(text):
            qed = _QED_PREFIX_RE.sub("", text, count=1)
            continue
        text = _TRAILING_PROOF_RE.sub("", text).strip()
        if text:
            assertions.append((None, text))
    return qed, assertions


def _parse_subs(block):
    block = _BULLET_BEFORE_LABEL_RE.sub(r'\1', _strip_ticks(block))
    try:
        labeled = bool(locate_steps(block))
    except ProofScriptError:
        labeled = False
    if labeled:
        qed, subs = _labeled_subs(block)
        if subs:
            return qed, subs
    return _bulleted_subs(block)


def _relabel(subs, qed_clause, level):
    labels = [label for label, _ in subs]
    named = [label for label in labels if label is not None]
    if (len(named) == len(labels) and len(set(named)) == len(named) and
            all(label.level == level and not label.is_anonymous
                for label in named)):
        return subs, qed_clause
    relabelled = [(StepLabel(level, str(number)), assertion)
                  for number, (_, assertion) in enumerate(subs, 1)]
    mapping = {}
    for old, (new, _) in zip(labels, relabelled):
        if old is not None and str(old) not in mapping:
            mapping[str(old)] = str(new)
    LOG.debug("relabelled sub-obligations to level %d", level)
    if qed_clause and mapping:
        pattern = re.compile("|".join(
            re.escape(old) + r'(?!\w)'
            for old in sorted(mapping, key=len, reverse=True)))
        qed_clause = pattern.sub(lambda m: mapping[m.group(0)], qed_clause)
    return relabelled, qed_clause


def _clean_qed(text):
    if not text:
        return ""
    text = _first_paragraph(_strip_ticks(text))
    text = _QED_PREFIX_RE.sub("", text.strip(), count=1)
    text = re.sub(r'^PROOF\b\s*', "", text)
    text = normalize_text(text)
    if text and text.split(" ", 1)[0] not in _PROOF_BEGIN_KEYWORDS:
        text = "BY " + text
    return text


def _synthesized_qed(subs, expected):
    clause = "BY " + ", ".join(str(label) for label, _ in subs)
    names = expected.operator_names if expected is not None else []
    if names:
        clause += " DEF " + ", ".join(names)
    return clause


def _echoed_assertion(echo):
    echo = normalize_text(_strip_ticks(echo).replace("`", " "))
    return _THEOREM_PREFIX_RE.sub("", echo, count=1)


def parse_decomposition_response(text, expected=None, level=1):
    """
    Parse a decomposition response.

    Sub-obligations are read from labeled steps (``<1>1. ...``) or, when
    the response has no step labels, from bullet lines; missing or
    misplaced labels are replaced by ``<level>1`` ... ``<level>m`` and the
    QED clause is rewritten accordingly. Without a QED clause, one citing
    every sub-obligation and every operator definition is synthesized.

        :param text: response text
        :param expected: requested obligation; checked against the echo
                         and used to synthesize the QED clause
        :param level: step level expected for the sub-obligations
        :type text: string
        :type expected: Obligation
        :type level: int
        :rtype: DecompositionProposal

    .. note::
        raises MissingSection, NoSubObligations or ObligationMismatch, and
        no other exception, whatever the text.
    """
    sections = _sections(text or "")
    for name in _REQUIRED:
        if not sections.get(name, "").strip():
            raise MissingSection(name)
    echoed = sections["original obligation"].strip()
    if expected is not None and \
            _echoed_assertion(echoed) != expected.normalized_assertion:
        raise ObligationMismatch(
            "response echoes '{0}' instead of '{1}'".format(
                normalize_text(echoed), expected.normalized_assertion))
    qed_in_block, subs = _parse_subs(sections["sub-obligations"])
    if not subs:
        raise NoSubObligations("sub-obligations section lists no assertion")
    qed_clause = _clean_qed(sections.get("qed clause", "")) or \
        _clean_qed(qed_in_block)
    subs, qed_clause = _relabel(subs, qed_clause, level)
    if not qed_clause:
        qed_clause = _synthesized_qed(subs, expected)
    return DecompositionProposal(
        echoed, sections["decomposition reasoning"].strip(),
        sections["proof strategy"].strip(), subs, qed_clause)


def format_decomposition_response(proposal):
    """
    Render a proposal in the response format read by
    :func:`parse_decomposition_response`.

        :param proposal: decomposition proposal
        :type proposal: DecompositionProposal
        :rtype: string
    """
    subs = "\n".join(render_proof(ProofNode.leaf(label, assertion, ""))
                     for label, assertion in proposal.sub_obligations)
    parts = [("ORIGINAL OBLIGATION", proposal.echoed_obligation),
             ("DECOMPOSITION REASONING", proposal.reasoning),
             ("PROOF STRATEGY", proposal.proof_strategy),
             ("SUB-OBLIGATIONS", subs),
             ("QED CLAUSE", proposal.qed_clause)]
    return "\n\n".join("{0}:\n{1}".format(header, body)
                       for header, body in parts) + "\n"


def parse_proof_response(text):
    """
    Extract the proof body from a proof response: the first fenced code
    block when there is one, without leading commentary, theorem or module
    lines.

        :param text: response text
        :type text: string
        :returns: proof body
        :rtype: string

    .. note::
        raises an exception EmptyProof if no proof text remains.
    """
    text = (text or "").replace("\r\n", "\n")
    fenced = _FENCED_BLOCK_RE.search(text)
    body = fenced.group(1) if fenced is not None else text
    body = _MODULE_LINE_RE.sub("", body)
    start = _PROOF_START_RE.search(body)
    if start is not None:
        body = body[start.start():]
    body = _strip_ticks(body).strip()
    if not body:
        raise EmptyProof("response contains no proof")
    return body
