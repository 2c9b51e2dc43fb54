#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
TLAPS driver: runs the proof manager in toolbox mode and reads its
obligation status blocks::

    @!!BEGIN
    @!!type:obligation
    @!!id:3
    @!!loc:12:3:12:20
    @!!status:failed
    @!!prover:zenon
    @!!meth:time-limit: 10; time-used: 0.0 (0%)
    @!!reason:false
    @!!obl:
    ASSUME NEW CONSTANT x ...
    @!!END

The last status block of an obligation id is its final status.
"""

import collections
import logging
import threading

import pexpect

from tlapsgen import ProverClient
from tlapsgen.exception import ProverClientError, ProverNotFound, \
    VerifierError
from tlapsgen.proof_ast import QED, locate_steps
from tlapsgen.verifiers.base import Location, ObligationReport, \
    ObligationStatus, VerificationResult, Verdict, Verifier, WorkingDirError, \
    decomposition_module, proof_module

LOG = logging.getLogger('tlapsgen.verifiers.tlaps')

__all__ = ['TLAPSVerifier', 'parse_prover_output']

_STATUSES = {
    "proved": ObligationStatus.PROVED,
    "trivial": ObligationStatus.PROVED,
    "failed": ObligationStatus.FAILED,
    "omitted": ObligationStatus.OMITTED,
    "interrupted": ObligationStatus.TIMEOUT,
    "to be proved": ObligationStatus.PENDING,
    "being proved": ObligationStatus.PENDING,
}
_SKIPPED_BLOCKS = ("obligationsnumber", "warning")
_MULTILINE_FIELDS = ("obl", "msg")


def _blocks(raw):
    block = None
    field = None
    for line in raw.replace("\r\n", "\n").split("\n"):
        if line.startswith("@!!BEGIN"):
            block = collections.OrderedDict()
            field = None
        elif line.startswith("@!!END"):
            if block is not None:
                yield block
            block = None
        elif block is None:
            continue
        elif line.startswith("@!!"):
            key, _, value = line[3:].partition(":")
            block[key] = value
            field = key if key in _MULTILINE_FIELDS else None
        elif field is not None:
            block[field] += ("\n" if block[field] else "") + line


def _span(value):
    try:
        numbers = tuple(int(part) for part in value.split(":"))
    except (AttributeError, ValueError):
        return None
    return numbers if len(numbers) == 4 else None


def _message(block, status):
    parts = []
    if block.get("prover"):
        parts.append("prover {0}".format(block["prover"]))
    if block.get("meth"):
        parts.append(block["meth"])
    if block.get("reason"):
        parts.append("reason: {0}".format(block["reason"]))
    head = "{0}: {1}".format(status, ", ".join(parts)) if parts else status
    if block.get("obl", "").strip():
        return head + "\n" + block["obl"].strip()
    return head


def parse_prover_output(raw):
    """
    Read the toolbox blocks of a prover run.

    One report per obligation id (final status wins, in order of first
    appearance) and per error or unknown block. Locations carry only the
    raw span; see :meth:`TLAPSVerifier.locate` for labels and byte ranges.

        :param raw: prover output
        :type raw: string
        :returns: reports
        :rtype: list of ObligationReport
    """
    reports = []
    by_id = {}
    for block in _blocks(raw or ""):
        kind = block.get("type", "")
        if kind in _SKIPPED_BLOCKS:
            if kind == "warning":
                LOG.debug("prover warning: %s", block.get("msg", ""))
            continue
        if kind != "obligation":
            message = block.get("msg") or "\n".join(
                "{0}:{1}".format(key, value) for key, value in block.items())
            reports.append(ObligationReport(
                Location(span=_span(block.get("loc"))),
                ObligationStatus.TOOL_ERROR,
                "{0}: {1}".format(kind or "unknown block", message.strip())))
            continue
        status_text = block.get("status", "").strip()
        status = _STATUSES.get(status_text, ObligationStatus.TOOL_ERROR)
        report = ObligationReport(Location(span=_span(block.get("loc"))),
                                  status, _message(block, status_text))
        key = block.get("id")
        if key in by_id:
            index = by_id[key]
            previous = reports[index]
            if report.location.span is None:
                report = report._replace(location=previous.location)
            reports[index] = report
        else:
            by_id[key] = len(reports)
            reports.append(report)
    return reports


def _line_offsets(text):
    offsets = [0]
    for line in text.split("\n"):
        offsets.append(offsets[-1] + len(line.encode("utf-8")) + 1)
    return offsets


def _byte_offset(text, offsets, line, column):
    if line < 1 or line > len(offsets) - 1:
        return None
    start = offsets[line - 1]
    line_text = text.split("\n")[line - 1]
    return start + len(line_text[:max(column - 1, 0)].encode("utf-8"))


class TLAPSVerifier(Verifier):
    """
    Verifier running the TLAPS proof manager.

        :param executable: prover executable (default: "tlapm")
        :param args: argument template with ``{module}`` (default: toolbox
                     mode on the whole module)
        :param timeout: seconds per prover run (default: 600)
        :param max_concurrency: concurrent prover runs (default: 2)
        :param work_dir: parent of the run directory (default: system temp)
        :param keep_artifacts: keep generated modules (default: False)

    :Example:

    >>> from tlapsgen.verifiers.tlaps import TLAPSVerifier
    >>> with TLAPSVerifier() as verifier:
    ...     result = verifier.check_proof(obl, "OBVIOUS")
    ...
    >>> result.overall
    <Verdict.PROVED: 'proved'>

    .. note::
        raises ProverNotFound when the executable is missing and
        WorkingDirError when the run directory cannot be created.
    """

    name = "tlaps"

    # pylint: disable=too-many-arguments
    def __init__(self, executable="tlapm", args=None, timeout=600,
                 max_concurrency=2, work_dir=None, keep_artifacts=False):
        self._executable = executable
        self._args = args
        self._timeout = timeout
        self._work_dir = work_dir
        self._keep_artifacts = keep_artifacts
        self._slots = threading.BoundedSemaphore(max(1, max_concurrency))
        self.cli = None

    def init_client(self):
        """Initialize the prover client"""
        self.cli = ProverClient(executable=self._executable, args=self._args,
                                timeout=self._timeout, work_dir=self._work_dir,
                                keep_artifacts=self._keep_artifacts)

    def connect(self):
        """
        Locate the prover and create the run directory.

        .. note::
            raises ProverNotFound or WorkingDirError.
        """
        if pexpect.which(self._executable) is None:
            LOG.error("prover executable '%s' not found", self._executable)
            raise ProverNotFound(
                "prover executable '{0}' not found".format(self._executable))
        self.init_client()
        try:
            self.cli.connect()
        except ProverClientError as err:
            self.cli = None
            raise WorkingDirError(str(err))

    def disconnect(self):
        """Remove the run directory if the client is initialized."""
        if self.cli is not None:
            self.cli.disconnect()
            self.cli = None

    @staticmethod
    def locate(reports, module_text):
        """
        Complete report locations with the enclosing step label and the
        byte range in the module.

            :param reports: reports of :func:`parse_prover_output`
            :param module_text: the checked module
            :rtype: list of ObligationReport
        """
        steps = locate_steps(module_text)
        offsets = _line_offsets(module_text)
        located = []
        for report in reports:
            span = report.location.span
            if span is None:
                located.append(report)
                continue
            label = None
            for line, step in steps:
                if line > span[0]:
                    break
                label = step
            start = _byte_offset(module_text, offsets, span[0], span[1])
            end = _byte_offset(module_text, offsets, span[2], span[3] + 1)
            byte_range = (start, end) if start is not None and \
                end is not None else None
            located.append(report._replace(
                location=Location(label, byte_range, span)))
        return located

    def _run(self, module_name, module_text):
        # (reports, failure result or None, duration)
        if self.cli is None:
            raise VerifierError("prover is not connected")
        with self._slots:
            try:
                run = self.cli.execute(module_name, module_text)
            except ProverClientError as err:
                raise WorkingDirError(str(err))
        if run.timed_out:
            return [], VerificationResult.error(
                Verdict.TIMEOUT, "prover timed out after {0} s".format(
                    self._timeout), run.duration_ms), run.duration_ms
        reports = self.locate(parse_prover_output(run.output), module_text)
        if not reports and run.exit_status:
            tail = "\n".join(run.output.strip().split("\n")[-20:])
            return [], VerificationResult.error(
                Verdict.TOOL_ERROR, "prover exited with status {0}: {1}"
                .format(run.exit_status, tail or "no output"),
                run.duration_ms), run.duration_ms
        return reports, None, run.duration_ms

    def check_proof(self, obl, proof_body):
        module_name, text = proof_module(obl, proof_body)
        reports, failure, duration = self._run(module_name, text)
        result = failure or VerificationResult.from_reports(reports, duration)
        LOG.debug("proof of '%s': %s in %d ms", obl.name,
                  result.overall.value, duration)
        return result

    def check_decomposition(self, obl, proposal):
        module_name, text = decomposition_module(obl, proposal)
        reports, failure, duration = self._run(module_name, text)
        if failure is not None:
            return failure
        level = proposal.sub_obligations[0][0].level
        qed = [report for report in reports
               if report.location.label is not None and
               report.location.label.name == QED and
               report.location.label.level == level]
        errors = [report for report in reports
                  if report.status == ObligationStatus.TOOL_ERROR]
        if not qed:
            return VerificationResult.error(
                Verdict.TOOL_ERROR, "prover reported no obligation for the "
                "QED step" + "".join("\n" + report.message
                                     for report in errors), duration)
        result = VerificationResult.from_reports(qed + errors, duration)
        LOG.debug("decomposition of '%s': %s in %d ms", obl.name,
                  result.overall.value, duration)
        return result
