"""
Data model, parser and renderer for TLAPS proof scripts.

Only the proof-structure layer is understood: modules are split into
top-level units (EXTENDS, declarations, definitions, theorems), theorem
proofs are split at step numbers into a tree of :class:`ProofNode`. TLA+
expressions are carried as opaque text.

Expression text keeps its layout relative to the column it starts at, so
that aligned conjunction and disjunction lists survive re-indentation.
"""

import collections
import enum
import logging
import re

from tlapsgen.exception import ProofScriptError

LOG = logging.getLogger('tlapsgen.proof_ast')

__all__ = ['MalformedLabel', 'MissingModuleHeader', 'UnbalancedProofLevels',
           'UnrenderableNode', 'DuplicateLabel', 'EmptySubs', 'QED',
           'StepLabel', 'Definition', 'Obligation', 'NodeStatus',
           'ProofNode', 'Theorem', 'ParsedModule', 'StatementSource',
           'ProofStatement', 'normalize_text', 'parse_step_label',
           'parse_module', 'extract_statements', 'render_proof',
           'render_module', 'make_decomposition_skeleton', 'make_proof_module',
           'module_name_for']


class MalformedLabel(ProofScriptError):
    """
    The exception class for text that is not a step label
    """
    pass


class MissingModuleHeader(ProofScriptError):
    """
    The exception class for text without a ``---- MODULE name ----`` line
    """
    pass


class UnbalancedProofLevels(ProofScriptError):
    """
    The exception class for a step nested more than one level below its
    parent
    """
    pass


class UnrenderableNode(ProofScriptError):
    """
    The exception class for proof nodes that violate the tree invariants
    """
    pass


class DuplicateLabel(ProofScriptError):
    """
    The exception class for sibling steps sharing a label
    """
    pass


class EmptySubs(ProofScriptError):
    """
    The exception class for a decomposition without sub-obligations
    """
    pass


QED = "QED"

_LABEL_RE = re.compile(
    r'^<(?P<level>\d+)>(?P<name>[A-Za-z0-9_]*)(?P<dot>\.?)'
    r'(?:\s*(?P<qed>QED))?$')
_STEP_RE = re.compile(
    r'^[ \t]*(?P<token><(?P<level>\d+)>(?P<name>[A-Za-z0-9_]*)\.?)'
    r'(?=[ \t\n]|$)', re.MULTILINE)
_PROOF_KEYWORD_RE = re.compile(r'\b(?:PROOF|BY|OBVIOUS|OMITTED)\b')
_TRAILING_PROOF_RE = re.compile(r'\s*\bPROOF\s*$')
_LEADING_PROOF_RE = re.compile(r'^PROOF\b\s*')
_QED_AT_RE = re.compile(r'\s*QED\b')
_HEADER_RE = re.compile(
    r'^[ \t]*-{4,}[ \t]*MODULE[ \t]+(\w+)[ \t]*-{4,}[ \t]*$', re.MULTILINE)
_FOOTER_RE = re.compile(r'^[ \t]*={4,}', re.MULTILINE)
_THEOREM_RE = re.compile(
    r'^(?:THEOREM|LEMMA|PROPOSITION|COROLLARY)\b\s*'
    r'(?:(?P<name>[A-Za-z_]\w*)\s*==(?!=))?')
_UNIT_KEYWORD_RE = re.compile(
    r'^(?:EXTENDS|CONSTANTS?|VARIABLES?|ASSUME|ASSUMPTION|AXIOM|THEOREM|'
    r'LEMMA|PROPOSITION|COROLLARY|LOCAL|INSTANCE|RECURSIVE|USE|HIDE)\b')
_DECLARATION_RE = re.compile(
    r'^(?:LOCAL\s+)?(?:CONSTANTS?|VARIABLES?|ASSUME|ASSUMPTION|AXIOM|'
    r'RECURSIVE|INSTANCE)\b')
_LOCAL_RE = re.compile(r'^LOCAL\s+')
_ASSUMPTION_NAME_RE = re.compile(
    r'^(?:ASSUME|ASSUMPTION|AXIOM)\s+([A-Za-z_]\w*)\s*==(?!=)')
_NOT_DEFINITION_RE = re.compile(r'^(?:PROOF|BY|OBVIOUS|OMITTED|QED|PROVE)\b')
_DEFINITION_NAME_RE = re.compile(r'^([A-Za-z_]\w*)\s*(?=[(\[]|==)')
_IDENTIFIER_RE = re.compile(r'[^A-Za-z0-9_]+')


def normalize_text(text):
    """
    Collapse every run of whitespace to a single space and trim.

        :param text: any text
        :type text: string
        :returns: normalized text
        :rtype: string
    """
    return " ".join(text.split())


class StepLabel(collections.namedtuple('StepLabel', ['level', 'name'])):
    """
    Step identifier ``<level>name``. ``name`` is :data:`QED` for QED steps
    and empty for unnamed steps such as ``<1> USE DEF Foo``.
    """
    __slots__ = ()

    @property
    def is_qed(self):
        """True for a QED step label"""
        return self.name == QED

    @property
    def is_anonymous(self):
        """True for an unnamed non-QED step label"""
        return self.name == ""

    def prefix(self):
        """Text opening a step line: ``<1>1.``, ``<1>. QED`` or ``<1>``"""
        if self.is_qed:
            return "<{0}>. QED".format(self.level)
        if self.is_anonymous:
            return "<{0}>".format(self.level)
        return "<{0}>{1}.".format(self.level, self.name)

    def __str__(self):
        if self.is_qed:
            return "<{0}>. QED".format(self.level)
        return "<{0}>{1}".format(self.level, self.name)


def parse_step_label(text):
    """
    Parse a step label.

    Accepted forms are ``<l>name``, ``<l>name.``, ``<l>``, ``<l>.`` and
    ``<l>. QED``.

        :param text: label text
        :type text: string
        :returns: parsed label
        :rtype: StepLabel

    .. note::
        raises an exception MalformedLabel if the text is not a label.
    """
    match = _LABEL_RE.match(text.strip())
    if match is None or int(match.group('level')) < 1:
        raise MalformedLabel("malformed step label '{0}'".format(text))
    level = int(match.group('level'))
    name = match.group('name')
    if match.group('qed') is not None:
        if name:
            raise MalformedLabel("malformed step label '{0}'".format(text))
        return StepLabel(level, QED)
    return StepLabel(level, name)


class Definition(collections.namedtuple('Definition', ['name', 'text'])):
    """A named unit of module context: operator definition or declaration"""
    __slots__ = ()

    @property
    def is_operator(self):
        """True when the unit may be cited in a ``DEF`` clause"""
        return _DECLARATION_RE.match(self.text.lstrip()) is None

    @classmethod
    def from_text(cls, text):
        """
        Build a definition from its source text, deriving the name.

            :param text: definition or declaration text
            :type text: string
            :rtype: Definition
        """
        text = text.strip()
        match = _ASSUMPTION_NAME_RE.match(text)
        if match is not None:
            return cls(match.group(1), text)
        if _DECLARATION_RE.match(text):
            return cls(normalize_text(text), text)
        body = _LOCAL_RE.sub("", text, count=1)
        match = _DEFINITION_NAME_RE.match(body)
        if match is not None:
            return cls(match.group(1), text)
        return cls(normalize_text(body.split("==", 1)[0]), text)


class Obligation(collections.namedtuple(
        'Obligation', ['name', 'assertion', 'definitions', 'module_context'])):
    """
    A named TLA+ assertion together with the definitions it depends on.

        :param name: identifier
        :param assertion: TLA+ expression text
        :param definitions: ordered definitions (:class:`Definition`)
        :param module_context: names of extended modules

    .. note::
        raises an exception DuplicateLabel when two definitions share a name.
    """
    __slots__ = ()

    def __new__(cls, name, assertion, definitions=(), module_context=()):
        definitions = tuple(d if isinstance(d, Definition)
                            else Definition.from_text(d) for d in definitions)
        seen = set()
        for definition in definitions:
            if definition.name in seen:
                raise DuplicateLabel(
                    "duplicate definition '{0}'".format(definition.name))
            seen.add(definition.name)
        return super(Obligation, cls).__new__(
            cls, name, assertion, definitions, tuple(module_context))

    @property
    def operator_names(self):
        """Names of definitions that can be cited with ``DEF``"""
        return [d.name for d in self.definitions if d.is_operator]

    @property
    def normalized_assertion(self):
        """Whitespace-collapsed assertion"""
        return normalize_text(self.assertion)

    def child(self, name, assertion):
        """
        Sub-obligation sharing this obligation's definitions and context.

            :param name: identifier of the sub-obligation
            :param assertion: TLA+ expression text
            :rtype: Obligation
        """
        return Obligation(name, assertion, self.definitions,
                          self.module_context)


class NodeStatus(enum.Enum):
    """Verification state of a :class:`ProofNode`"""
    UNPROVEN = "unproven"
    DECOMPOSITION_ACCEPTED = "decomposition_accepted"
    VERIFIED = "verified"
    FAILED = "failed"


class ProofNode(collections.namedtuple(
        'ProofNode', ['label', 'assertion', 'proof_body', 'children',
                      'status'])):
    """
    One node of a hierarchical proof. The root of a theorem proof has no
    label and no assertion. QED steps are the last child of an internal
    node.
    """
    __slots__ = ()

    def __new__(cls, label=None, assertion="", proof_body="", children=(),
                status=NodeStatus.UNPROVEN):
        return super(ProofNode, cls).__new__(
            cls, label, assertion, proof_body, tuple(children), status)

    @classmethod
    def leaf(cls, label, assertion, proof_body, status=NodeStatus.UNPROVEN):
        """Node proved directly by ``proof_body``"""
        return cls(label, assertion, proof_body, (), status)

    @classmethod
    def internal(cls, label, assertion, children, qed_clause,
                 status=NodeStatus.UNPROVEN, level=None):
        """
        Node proved by its children followed by a QED step carrying
        ``qed_clause``.

            :param level: QED level, needed only for an unlabeled root
        """
        if level is None:
            level = children[0].label.level if children else label.level + 1
        qed = cls.leaf(StepLabel(level, QED), "", qed_clause, status)
        return cls(label, assertion, "", tuple(children) + (qed,), status)

    @property
    def level(self):
        """Step level, 0 for the root"""
        return self.label.level if self.label is not None else 0

    @property
    def is_leaf(self):
        """True when the node has no children"""
        return not self.children

    @property
    def qed_clause(self):
        """Proof text of the trailing QED step, or empty text"""
        if self.children and self.children[-1].label.is_qed:
            return self.children[-1].proof_body
        return ""

    @property
    def steps(self):
        """Children without the trailing QED step"""
        if self.children and self.children[-1].label.is_qed:
            return self.children[:-1]
        return self.children

    def walk(self):
        """Pre-order (document order) traversal"""
        yield self
        for child in self.children:
            for node in child.walk():
                yield node

    def depth(self):
        """Number of step levels below this node"""
        if not self.children:
            return 0
        return 1 + max(child.depth() for child in self.children)

    def is_verified(self):
        """True when this node and everything below it is verified"""
        if self.status != NodeStatus.VERIFIED:
            return False
        return all(child.is_verified() for child in self.children)

    def structure(self):
        """Comparison key for structural equality (status excluded)"""
        return (self.label, self.assertion, self.proof_body,
                tuple(child.structure() for child in self.children))


Theorem = collections.namedtuple('Theorem', ['name', 'assertion', 'proof'])

ParsedModule = collections.namedtuple(
    'ParsedModule', ['module_name', 'extends', 'definitions', 'theorems'])

StatementSource = collections.namedtuple('StatementSource',
                                         ['path', 'theorem'])


class ProofStatement(collections.namedtuple(
        'ProofStatement', ['text', 'label', 'source', 'normalized_text'])):
    """
    Text between two step numbers of a proof script.

    .. note::
        raises an exception ProofScriptError for blank text.
    """
    __slots__ = ()

    def __new__(cls, text, label=None, source=None):
        if not text.strip():
            raise ProofScriptError("proof statement text is empty")
        if source is None:
            source = StatementSource("", "")
        return super(ProofStatement, cls).__new__(
            cls, text, label, source, normalize_text(text))


def _mask_comments(text):
    # (* *) nests; \* runs to end of line; newlines are kept
    out = list(text)
    depth = 0
    i = 0
    in_string = False
    length = len(text)
    while i < length:
        pair = text[i:i + 2]
        if depth == 0 and in_string:
            if text[i] == '\\':
                i += 2
                continue
            if text[i] == '"':
                in_string = False
            i += 1
            continue
        if pair == '(*':
            depth += 1
            out[i] = out[i + 1] = ' '
            i += 2
            continue
        if depth > 0:
            if pair == '*)':
                depth -= 1
                out[i] = out[i + 1] = ' '
                i += 2
                continue
            if text[i] != '\n':
                out[i] = ' '
            i += 1
            continue
        if pair == '\\*':
            while i < length and text[i] != '\n':
                out[i] = ' '
                i += 1
            continue
        if text[i] == '"':
            in_string = True
        i += 1
    return "".join(out)


def _column(source, offset):
    return offset - (source.rfind("\n", 0, offset) + 1)


def _fragment(source, start, end):
    """
    Text of ``source[start:end]`` trimmed, continuation lines dedented
    relative to the column of the first character.
    """
    chunk = source[start:end]
    start += len(chunk) - len(chunk.lstrip())
    chunk = chunk.strip()
    if not chunk:
        return ""
    lines = chunk.split("\n")
    if len(lines) == 1:
        return lines[0].rstrip()
    rest = [line.rstrip() for line in lines[1:]]
    indents = [len(line) - len(line.lstrip()) for line in rest if line]
    cut = min([_column(source, start)] + indents)
    return "\n".join([lines[0].rstrip()] + [line[cut:] for line in rest])


def _place(text, column):
    """Inverse of :func:`_fragment` for text starting at ``column``"""
    lines = text.split("\n")
    pad = " " * column
    return "\n".join([lines[0]] + [pad + line if line else line
                                   for line in lines[1:]])


class _Step(object):  # pylint: disable=too-few-public-methods
    """Mutable step record used while building a tree"""

    def __init__(self, label, token_start, start, end):
        self.label = label
        self.token_start = token_start
        self.start = start
        self.end = end
        self.children = []


def _continues_list(source, start, offset):
    index = offset - 1
    while index >= start and source[index] in " \t\n":
        index -= 1
    return index >= start and source[index] == ","


def _find_steps(source, start, end):
    steps = []
    for match in _STEP_RE.finditer(source, start, end):
        if _continues_list(source, start, match.start()):
            # continuation of a BY list, not a step
            continue
        level = int(match.group('level'))
        if level < 1:
            raise UnbalancedProofLevels(
                "step level 0 in '{0}'".format(match.group('token')))
        name = match.group('name')
        if name == QED or _QED_AT_RE.match(source, match.end('token')):
            label = StepLabel(level, QED)
        else:
            label = StepLabel(level, name)
        steps.append((label, match.start('token'), match.end('token')))
    return steps


def _split_leaf(source, start, end):
    """Split step content into assertion and proof body"""
    match = _PROOF_KEYWORD_RE.search(source, start, end)
    if match is None:
        return _fragment(source, start, end), ""
    assertion = _fragment(source, start, match.start())
    body = _fragment(source, match.start(), end)
    body = _LEADING_PROOF_RE.sub("", body, count=1)
    return assertion, body


def _freeze(source, step):
    content_start = step.start
    if step.label.is_qed:
        match = _QED_AT_RE.match(source, step.start)
        if match is not None:
            content_start = match.end()
    if step.children:
        first = step.children[0].token_start
        assertion = _fragment(source, content_start, first)
        assertion = _TRAILING_PROOF_RE.sub("", assertion)
        children = [_freeze(source, child) for child in step.children]
        return ProofNode(step.label, assertion, "", children)
    if step.label.is_qed:
        body = _fragment(source, content_start, step.end)
        return ProofNode.leaf(step.label, "",
                              _LEADING_PROOF_RE.sub("", body, count=1))
    assertion, body = _split_leaf(source, content_start, step.end)
    return ProofNode.leaf(step.label, assertion, body)


def _parse_proof(source, start, end):
    """Build the root :class:`ProofNode` of the proof in source[start:end]"""
    found = _find_steps(source, start, end)
    if not found:
        body = _LEADING_PROOF_RE.sub("", _fragment(source, start, end),
                                     count=1)
        return ProofNode(None, "", body)
    records = []
    for index, (label, token_start, token_end) in enumerate(found):
        step_end = found[index + 1][1] if index + 1 < len(found) else end
        records.append(_Step(label, token_start, token_end, step_end))
    base = records[0].label.level
    roots = []
    stack = []
    for step in records:
        level = step.label.level
        if level < base:
            raise UnbalancedProofLevels(
                "step '{0}' is above the first proof level {1}".format(
                    step.label, base))
        while stack and stack[-1].label.level >= level:
            stack.pop()
        parent_level = stack[-1].label.level if stack else base - 1
        if level > parent_level + 1:
            raise UnbalancedProofLevels(
                "step '{0}' skips levels below level {1}".format(
                    step.label, parent_level))
        if stack:
            stack[-1].children.append(step)
        else:
            roots.append(step)
        stack.append(step)
    # a step with children ends where its first child starts
    for step in records:
        if step.children:
            step.end = step.children[0].token_start
    children = [_freeze(source, step) for step in roots]
    return ProofNode(None, "", "", children)


def parse_proof(text):
    """
    Parse proof text outside of a module (a proof body or a list of
    steps).

        :param text: proof text
        :type text: string
        :returns: unlabeled root node
        :rtype: ProofNode

    .. note::
        raises an exception UnbalancedProofLevels if a step skips a level.
    """
    source = _mask_comments("\n" + text.expandtabs(8) + "\n")
    return _parse_proof(source, 0, len(source))


def locate_steps(text):
    """
    Step labels of a module or proof text with their 1-based line numbers.

        :param text: source text
        :type text: string
        :returns: (line number, StepLabel) pairs in document order
        :rtype: list
    """
    source = _mask_comments(text.expandtabs(8))
    located = []
    for label, token_start, _ in _find_steps(source, 0, len(source)):
        located.append((source.count("\n", 0, token_start) + 1, label))
    return located


def _split_units(body, offset):
    """Yield (start, end) offsets of the top-level units of a module body"""
    starts = []
    position = offset
    pending_theorem = False
    for line in body.splitlines(True):
        stripped = line.rstrip()
        is_start = False
        if line[:1] not in (" ", "\t", "\n", "") and stripped:
            if re.match(r'^-{4,}', stripped):
                is_start = True
            elif _UNIT_KEYWORD_RE.match(stripped):
                is_start = not (pending_theorem and
                                stripped.startswith("ASSUME"))
            elif "==" in stripped and not stripped.startswith("<") and \
                    not _NOT_DEFINITION_RE.match(stripped):
                is_start = True
        if is_start:
            starts.append(position)
            pending_theorem = bool(_THEOREM_RE.match(stripped)) and \
                stripped.endswith("==")
        elif stripped:
            pending_theorem = pending_theorem and stripped.endswith("==")
        position += len(line)
    end = offset + len(body)
    for index, start in enumerate(starts):
        stop = starts[index + 1] if index + 1 < len(starts) else end
        yield start, stop


def _clean_unit(text):
    return "\n".join(line.rstrip() for line in text.strip("\n").split("\n"))


def _parse_theorem(source, start, end):
    match = _THEOREM_RE.match(source[start:end])
    name = match.group('name') or ""
    rest = start + match.end()
    proof_start = end
    step = _STEP_RE.search(source, rest, end)
    if step is not None:
        proof_start = step.start()
    keyword = _PROOF_KEYWORD_RE.search(source, rest, end)
    if keyword is not None and keyword.start() < proof_start:
        proof_start = keyword.start()
    assertion = _fragment(source, rest, proof_start)
    proof = _parse_proof(source, proof_start, end)
    return Theorem(name, assertion, proof)


def parse_module(text):
    """
    Parse a TLA+ module into its context and theorem proof trees.

    Comments are ignored. Proof text without step numbers is kept as an
    opaque leaf body of the root.

        :param text: module source
        :type text: string
        :returns: parsed module
        :rtype: ParsedModule

    .. note::
        raises an exception MissingModuleHeader if the module line is absent.
        raises an exception UnbalancedProofLevels if a step skips a level.
    """
    source = _mask_comments(text.expandtabs(8))
    header = _HEADER_RE.search(source)
    if header is None:
        raise MissingModuleHeader("no '---- MODULE name ----' header found")
    body_start = header.end()
    footer = _FOOTER_RE.search(source, body_start)
    body_end = footer.start() if footer is not None else len(source)
    extends = []
    definitions = []
    theorems = []
    for start, end in _split_units(source[body_start:body_end], body_start):
        unit = source[start:end]
        if unit.startswith("EXTENDS"):
            extends.extend(name.strip()
                           for name in unit[len("EXTENDS"):].split(",")
                           if name.strip())
        elif _THEOREM_RE.match(unit):
            theorems.append(_parse_theorem(source, start, end))
        elif unit.startswith(("USE", "HIDE")) or re.match(r'^-{4,}', unit):
            continue
        else:
            definitions.append(Definition.from_text(_clean_unit(unit)))
    LOG.debug("parsed module '%s': %d definitions, %d theorems",
              header.group(1), len(definitions), len(theorems))
    return ParsedModule(header.group(1), extends, definitions, theorems)


def _statement_text(node):
    if node.label.is_qed:
        return normalize_text(" ".join([QED, node.proof_body]))
    if node.children:
        return node.assertion
    if node.proof_body:
        return node.assertion + " " + node.proof_body
    return node.assertion


def extract_statements(module, path=""):
    """
    Proof statements of every labeled step of every theorem, in document
    order.

        :param module: parsed module
        :param path: source path recorded in each statement
        :type module: ParsedModule
        :type path: string
        :returns: statements
        :rtype: list of ProofStatement
    """
    statements = []
    for theorem in module.theorems:
        source = StatementSource(path, theorem.name)
        for node in theorem.proof.walk():
            if node.label is None:
                continue
            text = _statement_text(node)
            if not text.strip():
                LOG.debug("skipping empty statement at '%s' in '%s'",
                          node.label, theorem.name)
                continue
            statements.append(ProofStatement(text, node.label, source))
    return statements


def _check_node(node):
    if node.proof_body and node.children:
        raise UnrenderableNode(
            "node '{0}' has both a proof body and children".format(
                node.label))
    levels = set(child.label.level if child.label is not None else None
                 for child in node.children)
    if None in levels:
        raise UnrenderableNode(
            "child of '{0}' has no label".format(node.label))
    if len(levels) > 1:
        raise UnrenderableNode(
            "children of '{0}' have mixed levels {1}".format(
                node.label, sorted(levels)))
    if node.label is not None and levels and \
            levels != set([node.label.level + 1]):
        raise UnrenderableNode(
            "children of '{0}' are not at level {1}".format(
                node.label, node.label.level + 1))


def _render_step(node, base, lines):
    _check_node(node)
    indent = 2 * (node.label.level - base)
    line = " " * indent + node.label.prefix()
    if node.assertion:
        line += " " + _place(node.assertion, len(line) + 1)
    if node.proof_body:
        last = line.rsplit("\n", 1)[-1]
        line += " " + _place(node.proof_body, len(last) + 1)
    lines.append(line)
    for child in node.children:
        _render_step(child, base, lines)


def render_proof(node):
    """
    Render a proof tree as TLAPS proof text.

        :param node: labeled step or unlabeled theorem root
        :type node: ProofNode
        :returns: proof text
        :rtype: string

    .. note::
        raises an exception UnrenderableNode if the node violates the tree
        invariants.
    """
    _check_node(node)
    if node.label is not None:
        lines = []
        _render_step(node, node.label.level, lines)
        return "\n".join(lines)
    if node.children:
        base = node.children[0].label.level
        lines = []
        for child in node.children:
            _render_step(child, base, lines)
        return "\n".join(lines)
    parts = [part for part in (node.assertion, node.proof_body) if part]
    if len(parts) == 2:
        return parts[0] + " " + _place(
            parts[1], len(parts[0].rsplit("\n", 1)[-1]) + 1)
    return parts[0] if parts else ""


def module_name_for(name, suffix=""):
    """
    Module name derived from an obligation name.

        :param name: obligation name
        :param suffix: appended after an underscore when nonempty
        :rtype: string
    """
    base = _IDENTIFIER_RE.sub("_", name).strip("_") or "Obligation"
    if base[0].isdigit():
        base = "M" + base
    return base + "_" + suffix if suffix else base


def render_module(name, extends, definitions, theorems):
    """
    Render a complete module.

        :param name: module name
        :param extends: extended module names
        :param definitions: :class:`Definition` units, in order
        :param theorems: :class:`Theorem` records
        :type name: string
        :type extends: list
        :type definitions: list
        :type theorems: list
        :returns: module text
        :rtype: string
    """
    title = " MODULE {0} ".format(name)
    out = ["-" * 4 + title + "-" * 4]
    if extends:
        out.append("EXTENDS " + ", ".join(extends))
    for definition in definitions:
        out.append("")
        out.append(definition.text)
    for theorem in theorems:
        out.append("")
        head = "THEOREM "
        if theorem.name:
            head += theorem.name + " == "
        out.append(head + _place(theorem.assertion, len(head)))
        proof = render_proof(theorem.proof)
        if proof:
            if theorem.proof.children:
                out.append(proof)
            else:
                out.append("  " + _place(proof, 2))
    out.append("=" * (len(title) + 8))
    return "\n".join(out) + "\n"


def _extends_with_tlaps(module_context):
    extends = list(module_context)
    if "TLAPS" not in extends:
        extends.append("TLAPS")
    return extends


def make_decomposition_skeleton(obl, subs, qed_clause, module_name=None):
    """
    Module whose only checkable obligation is the QED step of a proposed
    decomposition: every sub-assertion is OMITTED, so a prover run checks
    that the sub-assertions together imply the obligation.

        :param obl: obligation being decomposed
        :param subs: (StepLabel, assertion) pairs
        :param qed_clause: proof text of the QED step, e.g.
                           ``BY <1>1, <1>2 DEF Even``
        :param module_name: defaults to a name derived from the obligation
        :type obl: Obligation
        :type subs: list
        :type qed_clause: string
        :returns: module text
        :rtype: string

    .. note::
        raises an exception EmptySubs if there are no sub-obligations.
        raises an exception DuplicateLabel if two subs share a label.
        raises an exception UnbalancedProofLevels if the subs are on
        different levels.
    """
    if not subs:
        raise EmptySubs("decomposition of '{0}' has no sub-obligations"
                        .format(obl.name))
    labels = [label for label, _ in subs]
    if len(set(labels)) != len(labels):
        raise DuplicateLabel("duplicate sub-obligation label in {0}".format(
            ", ".join(str(label) for label in labels)))
    if len(set(label.level for label in labels)) != 1:
        raise UnbalancedProofLevels(
            "sub-obligations of '{0}' are on different levels".format(
                obl.name))
    for label in labels:
        if label.is_qed or label.is_anonymous:
            raise MalformedLabel(
                "sub-obligation label '{0}' must be named".format(label))
    children = [ProofNode.leaf(label, assertion, "OMITTED")
                for label, assertion in subs]
    root = ProofNode.internal(None, "", children, qed_clause,
                              level=labels[0].level)
    theorem = Theorem(module_name_for(obl.name), obl.assertion, root)
    return render_module(module_name or module_name_for(obl.name, "Decomp"),
                         _extends_with_tlaps(obl.module_context),
                         obl.definitions, [theorem])


def make_proof_module(obl, proof_body, module_name=None):
    """
    Module stating the obligation as a theorem proved by ``proof_body``.

        :param obl: obligation
        :param proof_body: leaf proof text or a step-numbered proof
        :type obl: Obligation
        :type proof_body: string
        :returns: module text
        :rtype: string
    """
    try:
        proof = parse_proof(proof_body.strip())
        render_proof(proof)
    except ProofScriptError as err:
        # the prover reports the broken structure
        LOG.debug("proof kept verbatim: %s", err)
        proof = ProofNode(None, "", proof_body.strip())
    theorem = Theorem(module_name_for(obl.name), obl.assertion, proof)
    return render_module(module_name or module_name_for(obl.name, "Proof"),
                         _extends_with_tlaps(obl.module_context),
                         obl.definitions, [theorem])
