#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Proof statement database built from a tree of verified TLA+ modules.

Every labeled step of every theorem becomes one record keyed by the hash of
its normalized text. The database is stored as line-delimited JSON with a
``corpus/1`` header line, embeddings inline when present.
"""

import collections
import concurrent.futures
import fnmatch
import hashlib
import io
import json
import logging
import os

from tlapsgen.exception import CorpusError, ProofScriptError
from tlapsgen.proof_ast import ProofStatement, StatementSource, \
    extract_statements, parse_module, parse_step_label

LOG = logging.getLogger('tlapsgen.corpus')

__all__ = ['NoInputFiles', 'CorpusFormatError', 'CorpusWriteError',
           'CORPUS_VERSION', 'CorpusRecord', 'ExclusionSet', 'record_id',
           'load_exclusions', 'build_corpus', 'save_corpus', 'load_corpus',
           'embed_corpus']

CORPUS_VERSION = "corpus/1"

_REQUIRED_FIELDS = ("id", "text", "normalized_text", "source_path",
                    "theorem", "label")


class NoInputFiles(CorpusError):
    """
    The exception class for corpus roots without any ``.tla`` file
    """
    pass


class CorpusFormatError(CorpusError):
    """
    The exception class for corpus files that do not follow the format
    """
    pass


class CorpusWriteError(CorpusError):
    """
    The exception class for a corpus file that cannot be written
    """
    pass


def record_id(normalized_text):
    """
    Stable record identifier: SHA-256 of the normalized statement text.

        :param normalized_text: whitespace-normalized statement
        :type normalized_text: string
        :rtype: string
    """
    return hashlib.sha256(normalized_text.encode("utf-8")).hexdigest()


class CorpusRecord(collections.namedtuple(
        'CorpusRecord', ['id', 'statement', 'embedding'])):
    """
    One deduplicated proof statement with an optional embedding.

        :param statement: the proof statement
        :param embedding: vector values or None
        :type statement: ProofStatement
        :type embedding: tuple
    """
    __slots__ = ()

    def __new__(cls, statement, embedding=None):
        if embedding is not None:
            embedding = tuple(float(value) for value in embedding)
        return super(CorpusRecord, cls).__new__(
            cls, record_id(statement.normalized_text), statement, embedding)

    def with_embedding(self, embedding):
        """Copy of the record carrying ``embedding``"""
        return CorpusRecord(self.statement, embedding)


class ExclusionSet(object):
    """
    File-path globs and theorem-name matchers of an evaluation set.

    Path globs are matched against the path relative to the corpus root
    (prefixed with the root directory name), the absolute path and the file
    name. Theorem globs are matched against the theorem name and against
    ``Module!Theorem``.

        :param path_globs: file path patterns
        :param theorem_globs: theorem name patterns
        :type path_globs: list
        :type theorem_globs: list
    """

    def __init__(self, path_globs=(), theorem_globs=()):
        self.path_globs = tuple(path_globs)
        self.theorem_globs = tuple(theorem_globs)

    def __bool__(self):
        return bool(self.path_globs or self.theorem_globs)

    __nonzero__ = __bool__

    def __repr__(self):
        return "ExclusionSet(path_globs={0!r}, theorem_globs={1!r})".format(
            self.path_globs, self.theorem_globs)

    def matches_file(self, source_path, absolute_path=None):
        """
        True when a file is excluded.

            :param source_path: root-relative path with posix separators
            :param absolute_path: absolute file path
            :type source_path: string
            :type absolute_path: string
            :rtype: bool
        """
        candidates = [source_path, source_path.rsplit("/", 1)[-1]]
        if absolute_path:
            candidates.append(absolute_path.replace(os.sep, "/"))
        return any(fnmatch.fnmatchcase(candidate, pattern)
                   for pattern in self.path_globs for candidate in candidates)

    def matches_theorem(self, theorem, module_name=None):
        """
        True when a theorem is excluded.

            :param theorem: theorem name
            :param module_name: name of the module declaring it
            :type theorem: string
            :type module_name: string
            :rtype: bool
        """
        if not theorem:
            return False
        candidates = [theorem]
        if module_name:
            candidates.append(module_name + "!" + theorem)
        return any(fnmatch.fnmatchcase(candidate, pattern)
                   for pattern in self.theorem_globs
                   for candidate in candidates)


def load_exclusions(path):
    """
    Read an exclusion file: one matcher per line, ``path:<glob>``,
    ``theorem:<glob>`` or a bare path glob. ``#`` starts a comment.

        :param path: exclusion file
        :type path: string
        :rtype: ExclusionSet

    .. note::
        raises an exception CorpusError if the file cannot be read.
    """
    path_globs = []
    theorem_globs = []
    try:
        with io.open(path, encoding="utf-8") as exclusion_file:
            lines = exclusion_file.read().splitlines()
    except (IOError, OSError) as err:
        raise CorpusError("cannot read exclusion file '{0}': {1}".format(
            path, err))
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        kind, _, pattern = line.partition(":")
        if kind == "theorem" and pattern.strip():
            theorem_globs.append(pattern.strip())
        elif kind == "path" and pattern.strip():
            path_globs.append(pattern.strip())
        else:
            path_globs.append(line)
    LOG.debug("loaded %d path and %d theorem exclusions from %s",
              len(path_globs), len(theorem_globs), path)
    return ExclusionSet(path_globs, theorem_globs)


def _tla_files(root):
    root = os.path.abspath(root)
    if os.path.isfile(root):
        if root.endswith(".tla"):
            yield os.path.basename(root), root
        return
    if not os.path.isdir(root):
        raise CorpusError("corpus root '{0}' does not exist".format(root))
    base = os.path.basename(root.rstrip(os.sep))
    for directory, subdirs, files in os.walk(root):
        subdirs.sort()
        for name in sorted(files):
            if not name.endswith(".tla"):
                continue
            absolute = os.path.join(directory, name)
            relative = os.path.relpath(absolute, root).replace(os.sep, "/")
            yield base + "/" + relative, absolute


def _read_statements(source_path, absolute_path, exclusions):
    try:
        with io.open(absolute_path, encoding="utf-8") as module_file:
            module = parse_module(module_file.read())
    except (IOError, OSError, UnicodeDecodeError, ProofScriptError) as err:
        LOG.warning("skipping unparseable file %s: %s", source_path, err)
        return []
    statements = []
    for statement in extract_statements(module, source_path):
        if exclusions.matches_theorem(statement.source.theorem,
                                      module.module_name):
            continue
        statements.append(statement)
    return statements


def build_corpus(root_paths, exclusions=None, max_workers=4):
    """
    Parse every ``.tla`` file under the roots and collect the deduplicated
    proof statements that are not excluded.

        :param root_paths: directories (or single files) to scan
        :param exclusions: evaluation-set matchers (default: none)
        :param max_workers: concurrent file parsers (default: 4)
        :type root_paths: list
        :type exclusions: ExclusionSet
        :type max_workers: int
        :returns: records in sorted path order, first occurrence kept
        :rtype: list of CorpusRecord

    .. note::
        raises an exception NoInputFiles if the roots contain no ``.tla``
        file and CorpusError if a root does not exist.
    """
    exclusions = exclusions or ExclusionSet()
    files = []
    for root in root_paths:
        files.extend(_tla_files(root))
    if not files:
        LOG.error("no .tla files under %s", ", ".join(root_paths))
        raise NoInputFiles("no .tla files under {0}".format(
            ", ".join("'{0}'".format(root) for root in root_paths)))
    files.sort()
    kept = [(source, absolute) for source, absolute in files
            if not exclusions.matches_file(source, absolute)]
    LOG.info("parsing %d of %d modules (%d excluded)", len(kept), len(files),
             len(files) - len(kept))
    with concurrent.futures.ThreadPoolExecutor(max_workers) as pool:
        parsed = list(pool.map(
            lambda item: _read_statements(item[0], item[1], exclusions), kept))
    records = []
    seen = set()
    for statements in parsed:
        for statement in statements:
            record = CorpusRecord(statement)
            if record.id in seen:
                continue
            seen.add(record.id)
            records.append(record)
    if exclusions and not records:
        LOG.warning("every statement was excluded")
    LOG.info("corpus holds %d records", len(records))
    return records


def _record_line(record):
    statement = record.statement
    data = {
        "id": record.id,
        "text": statement.text,
        "normalized_text": statement.normalized_text,
        "source_path": statement.source.path,
        "theorem": statement.source.theorem,
        "label": str(statement.label) if statement.label else None,
    }
    if record.embedding is not None:
        data["embedding"] = list(record.embedding)
    return json.dumps(data, sort_keys=True, ensure_ascii=False,
                      separators=(",", ":"))


def save_corpus(records, path):
    """
    Write records as line-delimited JSON after a ``corpus/1`` header line.

        :param records: corpus records
        :param path: output file
        :type records: list
        :type path: string

    .. note::
        raises an exception CorpusWriteError if the file cannot be written.
    """
    header = json.dumps({"version": CORPUS_VERSION}, sort_keys=True)
    try:
        with io.open(path, "w", encoding="utf-8", newline="\n") as out:
            out.write(header + "\n")
            for record in records:
                out.write(_record_line(record) + "\n")
    except (IOError, OSError) as err:
        LOG.error("write corpus '%s' error: %s", path, err)
        raise CorpusWriteError("cannot write corpus '{0}': {1}".format(
            path, err))
    LOG.debug("saved %d records to %s", len(records), path)


def _record_from(data, number):
    if not isinstance(data, dict):
        raise CorpusFormatError("line {0}: record is not an object".format(
            number))
    missing = [field for field in _REQUIRED_FIELDS if field not in data]
    if missing:
        raise CorpusFormatError("line {0}: missing field '{1}'".format(
            number, missing[0]))
    try:
        label = parse_step_label(data["label"]) if data["label"] else None
        statement = ProofStatement(
            data["text"], label,
            StatementSource(data["source_path"], data["theorem"]))
    except (ProofScriptError, TypeError, AttributeError) as err:
        raise CorpusFormatError("line {0}: {1}".format(number, err))
    embedding = data.get("embedding")
    if embedding is not None:
        if not isinstance(embedding, list) or not all(
                isinstance(value, (int, float)) and
                not isinstance(value, bool) for value in embedding):
            raise CorpusFormatError(
                "line {0}: embedding is not a list of numbers".format(number))
    record = CorpusRecord(statement, embedding)
    if (statement.normalized_text != data["normalized_text"] or
            record.id != data["id"]):
        raise CorpusFormatError(
            "line {0}: id does not match the statement text".format(number))
    return record


def load_corpus(path):
    """
    Read a file written by :func:`save_corpus`.

        :param path: corpus file
        :type path: string
        :rtype: list of CorpusRecord

    .. note::
        raises an exception CorpusFormatError on a wrong header, a corrupted
        line or a record missing a required field, CorpusError if the file
        cannot be read.
    """
    try:
        with io.open(path, encoding="utf-8") as corpus_file:
            lines = corpus_file.read().split("\n")
    except (IOError, OSError, UnicodeDecodeError) as err:
        raise CorpusError("cannot read corpus '{0}': {1}".format(path, err))
    try:
        header = json.loads(lines[0])
    except ValueError:
        header = None
    if not isinstance(header, dict) or \
            header.get("version") != CORPUS_VERSION:
        raise CorpusFormatError("'{0}' is not a {1} file".format(
            path, CORPUS_VERSION))
    records = []
    for number, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except ValueError as err:
            raise CorpusFormatError("line {0}: {1}".format(number, err))
        records.append(_record_from(data, number))
    LOG.debug("loaded %d records from %s", len(records), path)
    return records


def embed_corpus(records, embedder, batch_size=64):
    """
    Embedding pass: attach vectors computed from the normalized text.

        :param records: corpus records
        :param embedder: embedder with an ``embed_many`` method
        :param batch_size: texts per embedder call (default: 64)
        :type records: list
        :type batch_size: int
        :returns: new records carrying embeddings
        :rtype: list of CorpusRecord
    """
    embedded = []
    for start in range(0, len(records), batch_size):
        batch = records[start:start + batch_size]
        vectors = embedder.embed_many(
            [record.statement.normalized_text for record in batch])
        embedded.extend(record.with_embedding(vector)
                        for record, vector in zip(batch, vectors))
        LOG.debug("embedded %d/%d records", len(embedded), len(records))
    return embedded
