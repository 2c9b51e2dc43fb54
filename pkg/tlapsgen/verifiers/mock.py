#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Offline verifier answering from a verdict table::

    default: failed
    decomposition_default: failed
    proofs:
      - obligation: x + x = 2 * x
        proof: OBVIOUS          # omitted or "*" matches any proof
        verdict: proved
      - obligation: Even(2 * x)
        verdict: failed
        message: "zenon: false"
    decompositions:
      - obligation: Even(x + x)
        subs: [x + x = 2 * x, Even(2 * x)]   # omitted matches any subs
        verdict: proved

Texts are compared after whitespace normalization, through their hashes.
"""

import hashlib
import io
import logging
import threading

import yaml

from tlapsgen.exception import ConfigurationError
from tlapsgen.proof_ast import QED, StepLabel, normalize_text
from tlapsgen.verifiers.base import Location, ObligationReport, \
    ObligationStatus, VerificationResult, Verdict, Verifier, \
    decomposition_module, proof_module

LOG = logging.getLogger('tlapsgen.verifiers.mock')

__all__ = ['MockVerifier', 'text_key']

_ANY = "*"


def text_key(*texts):
    """Hash of whitespace-normalized texts"""
    digest = hashlib.sha256()
    for text in texts:
        digest.update(normalize_text(text).encode("utf-8"))
        digest.update(b"\x00")
    return digest.hexdigest()


def _verdict(value, where):
    try:
        return Verdict(str(value).strip().lower())
    except ValueError:
        raise ConfigurationError(
            "unknown verdict '{0}' in {1}".format(value, where))


class MockVerifier(Verifier):
    """
    Verifier answering from a table of verdicts.

        :param table: verdict table (see module documentation)
        :param default: verdict of unknown proofs (default: FAILED)
        :param decomposition_default: verdict of unknown decompositions
                                      (default: the table's, else FAILED)
        :type table: dict
        :type default: Verdict

    Every check is appended to :attr:`history` as
    ``(kind, obligation name, assertion, detail, verdict)``.

    .. note::
        raises an exception ConfigurationError for a malformed table.
    """

    name = "mock"

    def __init__(self, table=None, default=None, decomposition_default=None):
        table = table or {}
        if not isinstance(table, dict):
            raise ConfigurationError("verdict table must be a mapping")
        self.default = default or _verdict(
            table.get("default", "failed"), "default")
        self.decomposition_default = decomposition_default or _verdict(
            table.get("decomposition_default", self.default.value),
            "decomposition_default")
        self._proofs = {}
        self._decompositions = {}
        for number, entry in enumerate(table.get("proofs") or (), 1):
            self._add_proof(entry, "proofs entry {0}".format(number))
        for number, entry in enumerate(table.get("decompositions") or (), 1):
            self._add_decomposition(
                entry, "decompositions entry {0}".format(number))
        self.history = []
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path):
        """
        Verifier configured from a YAML or JSON table file.

            :param path: table file
            :rtype: MockVerifier
        """
        try:
            with io.open(path, encoding="utf-8") as table_file:
                table = yaml.safe_load(table_file)
        except (IOError, OSError, yaml.YAMLError) as err:
            raise ConfigurationError(
                "cannot read verdict table '{0}': {1}".format(path, err))
        LOG.debug("verdict table loaded from %s", path)
        return cls(table)

    def _add_proof(self, entry, where):
        if not isinstance(entry, dict) or "obligation" not in entry:
            raise ConfigurationError("{0} needs an obligation".format(where))
        proof = entry.get("proof", _ANY)
        key = text_key(entry["obligation"]) if proof == _ANY else \
            text_key(entry["obligation"], str(proof))
        self._proofs[key] = (_verdict(entry.get("verdict"), where),
                             entry.get("message", ""))

    def _add_decomposition(self, entry, where):
        if not isinstance(entry, dict) or "obligation" not in entry:
            raise ConfigurationError("{0} needs an obligation".format(where))
        subs = entry.get("subs", _ANY)
        if subs == _ANY:
            key = text_key(entry["obligation"])
        else:
            key = text_key(entry["obligation"], *[str(sub) for sub in subs])
        self._decompositions[key] = (_verdict(entry.get("verdict"), where),
                                     entry.get("message", ""))

    def _record(self, kind, obl, detail, verdict):
        with self._lock:
            self.history.append((kind, obl.name, obl.assertion, detail,
                                 verdict))

    @staticmethod
    def _result(verdict, message, label):
        status = ObligationStatus(verdict.value)
        if not message:
            message = "{0}: mock verdict".format(verdict.value)
        return VerificationResult(
            verdict, [ObligationReport(Location(label), status, message)], 0)

    def check_proof(self, obl, proof_body):
        proof_module(obl, proof_body)
        verdict, message = self._proofs.get(
            text_key(obl.assertion, proof_body),
            self._proofs.get(text_key(obl.assertion),
                             (self.default, "")))
        self._record("proof", obl, normalize_text(proof_body), verdict)
        LOG.debug("mock proof of '%s' with '%s': %s", obl.name,
                  normalize_text(proof_body), verdict.value)
        return self._result(verdict, message, None)

    def check_decomposition(self, obl, proposal):
        decomposition_module(obl, proposal)
        subs = [assertion for _, assertion in proposal.sub_obligations]
        verdict, message = self._decompositions.get(
            text_key(obl.assertion, *subs),
            self._decompositions.get(text_key(obl.assertion),
                                     (self.decomposition_default, "")))
        self._record("decomposition", obl, tuple(normalize_text(sub)
                                                 for sub in subs), verdict)
        LOG.debug("mock decomposition of '%s' into %d subs: %s", obl.name,
                  len(subs), verdict.value)
        return self._result(verdict, message,
                            StepLabel(proposal.level, QED))
