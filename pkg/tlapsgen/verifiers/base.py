#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Verification results and the base verifier class shared by the prover
drivers.
"""

import collections
import enum
import logging

from tlapsgen import ContextClient
from tlapsgen.exception import VerifierError, ProofScriptError
from tlapsgen.proof_ast import make_decomposition_skeleton, \
    make_proof_module, module_name_for

LOG = logging.getLogger('tlapsgen.verifiers')

__all__ = ['WorkingDirError', 'ModuleRenderError', 'TierError', 'Verdict',
           'ObligationStatus', 'ProverTier', 'Location', 'ObligationReport',
           'VerificationResult', 'Verifier', 'TIER_BODIES',
           'decomposition_module', 'proof_module']


class WorkingDirError(VerifierError):
    """
    The exception class for a prover working directory that cannot be used
    """
    pass


class ModuleRenderError(VerifierError):
    """
    The exception class for an obligation or proof that cannot be wrapped
    in a module
    """
    pass


class TierError(VerifierError):
    """
    The exception class for a tier that is not a prover tactic
    """
    pass


class Verdict(enum.Enum):
    """Overall outcome of one prover run"""
    PROVED = "proved"
    FAILED = "failed"
    TIMEOUT = "timeout"
    TOOL_ERROR = "tool_error"


class ObligationStatus(enum.Enum):
    """Status of one obligation reported by the prover"""
    PROVED = "proved"
    FAILED = "failed"
    OMITTED = "omitted"
    TIMEOUT = "timeout"
    TOOL_ERROR = "tool_error"
    PENDING = "pending"


class ProverTier(enum.IntEnum):
    """Proving tiers, tried in increasing order"""
    OBVIOUS = 1
    ALL_PROVERS = 2
    LLM = 3


TIER_BODIES = {
    ProverTier.OBVIOUS: "OBVIOUS",
    ProverTier.ALL_PROVERS: "BY AllProvers",
}


class Location(collections.namedtuple(
        'Location', ['label', 'byte_range', 'span'])):
    """
    Where an obligation sits in the generated module: the enclosing step
    label (None outside steps), the (start, end) byte range and the raw
    (line, column, line, column) span reported by the prover.
    """
    __slots__ = ()

    def __new__(cls, label=None, byte_range=None, span=None):
        return super(Location, cls).__new__(cls, label, byte_range, span)


ObligationReport = collections.namedtuple(
    'ObligationReport', ['location', 'status', 'message'])

_STATUS_VERDICT = {
    ObligationStatus.TIMEOUT: Verdict.TIMEOUT,
    ObligationStatus.TOOL_ERROR: Verdict.TOOL_ERROR,
}


class VerificationResult(collections.namedtuple(
        'VerificationResult', ['overall', 'per_obligation', 'duration_ms'])):
    """
    Outcome of one check. ``overall`` is PROVED exactly when there is at
    least one report and every report is PROVED.
    """
    __slots__ = ()

    def __new__(cls, overall, per_obligation=(), duration_ms=0):
        return super(VerificationResult, cls).__new__(
            cls, overall, tuple(per_obligation), int(duration_ms))

    @classmethod
    def from_reports(cls, reports, duration_ms=0):
        """
        Result whose verdict is derived from the reports: a timeout or tool
        error anywhere wins over a failure.
        """
        reports = tuple(reports)
        if not reports:
            return cls.error(Verdict.TOOL_ERROR,
                             "prover reported no obligation", duration_ms)
        statuses = set(report.status for report in reports)
        if statuses == set([ObligationStatus.PROVED]):
            return cls(Verdict.PROVED, reports, duration_ms)
        for status in (ObligationStatus.TOOL_ERROR, ObligationStatus.TIMEOUT):
            if status in statuses:
                return cls(_STATUS_VERDICT[status], reports, duration_ms)
        return cls(Verdict.FAILED, reports, duration_ms)

    @classmethod
    def error(cls, verdict, message, duration_ms=0, location=None):
        """Result carrying a single TIMEOUT, TOOL_ERROR or FAILED report"""
        status = ObligationStatus(verdict.value)
        report = ObligationReport(location or Location(), status, message)
        return cls(verdict, [report], duration_ms)

    @property
    def proved(self):
        """True for a PROVED verdict"""
        return self.overall == Verdict.PROVED

    @property
    def message(self):
        """Messages of the reports that are not PROVED"""
        return "\n".join(report.message for report in self.per_obligation
                         if report.status != ObligationStatus.PROVED and
                         report.message)


def proof_module(obl, proof_body):
    """
    Module name and text proving ``obl`` with ``proof_body``.

    .. note::
        raises an exception ModuleRenderError for an empty assertion or an
        empty proof.
    """
    if not obl.assertion.strip():
        raise ModuleRenderError(
            "obligation '{0}' has an empty assertion".format(obl.name))
    if not proof_body.strip():
        raise ModuleRenderError(
            "empty proof for obligation '{0}'".format(obl.name))
    try:
        name = module_name_for(obl.name, "Proof")
        text = make_proof_module(obl, proof_body, name)
    except ProofScriptError as err:
        raise ModuleRenderError(str(err))
    return name, text


def decomposition_module(obl, proposal):
    """
    Module name and text of the decomposition check skeleton.

    .. note::
        raises an exception ModuleRenderError for an empty assertion or a
        proposal that cannot be rendered.
    """
    if not obl.assertion.strip():
        raise ModuleRenderError(
            "obligation '{0}' has an empty assertion".format(obl.name))
    try:
        name = module_name_for(obl.name, "Decomp")
        text = make_decomposition_skeleton(obl, proposal.sub_obligations,
                                           proposal.qed_clause, name)
    except ProofScriptError as err:
        raise ModuleRenderError(str(err))
    return name, text


class Verifier(ContextClient):
    """
    Base verifier class. Drivers implement :meth:`check_decomposition` and
    :meth:`check_proof`; tiers are proof bodies checked with
    :meth:`check_proof`.
    """

    name = "base"

    def connect(self):
        """Prepare the verifier"""
        pass

    def disconnect(self):
        """Release the verifier"""
        pass

    def check_decomposition(self, obl, proposal):
        """
        Check that the proposal's sub-obligations imply the obligation.
        Only the QED step counts; the sub-obligations are OMITTED.

            :param obl: obligation being decomposed
            :param proposal: decomposition proposal
            :type obl: Obligation
            :type proposal: DecompositionProposal
            :rtype: VerificationResult
        """
        raise NotImplementedError()

    def check_proof(self, obl, proof_body):
        """
        Check a proof of the obligation.

            :param obl: obligation
            :param proof_body: proof text
            :type obl: Obligation
            :type proof_body: string
            :rtype: VerificationResult
        """
        raise NotImplementedError()

    def try_tier(self, obl, tier):
        """
        Check the obligation with the tactic of an automated tier.

            :param obl: obligation
            :param tier: OBVIOUS or ALL_PROVERS
            :type obl: Obligation
            :type tier: ProverTier
            :rtype: VerificationResult

        .. note::
            raises an exception TierError for the LLM tier.
        """
        if tier not in TIER_BODIES:
            raise TierError("tier '{0}' has no prover tactic".format(
                ProverTier(tier).name))
        LOG.debug("%s tier on '%s'", ProverTier(tier).name, obl.name)
        return self.check_proof(obl, TIER_BODIES[tier])
