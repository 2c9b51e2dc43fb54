"""
Comparison baselines. The direct prompting baselines send one prompt per
theorem in a fixed style and check each sampled answer as a whole proof.
The automation baseline uses no LLM: it runs the automated prover tiers on
the theorem in order.
"""

import collections
import logging

from tlapsgen.backends.base import GenerationRequest
from tlapsgen.exception import PromptError
from tlapsgen.prompts import parse_proof_response, render_baseline_prompt
from tlapsgen.verifiers.base import TIER_BODIES, VerificationResult, \
    Verdict

LOG = logging.getLogger('tlapsgen.baseline')

__all__ = ['AUTOMATION', 'BaselineAttempt', 'theorem_statement',
           'run_baseline', 'run_automation_baseline']

AUTOMATION = "automation"

BaselineAttempt = collections.namedtuple(
    'BaselineAttempt', ['response', 'proof_body', 'result'])


def theorem_statement(goal):
    """Theorem text given to a baseline prompt"""
    if not goal.definitions:
        return goal.assertion
    return "{0}, where {1}".format(goal.assertion, "; ".join(
        definition.text for definition in goal.definitions))


# pylint: disable=too-many-arguments
def run_baseline(style, goal, backend, verifier, attempts=10,
                 temperature=0.7, max_tokens=2048, templates=None):
    """
    Sample ``attempts`` answers to a baseline prompt and check each one.

        :param style: prompting style
        :param goal: goal obligation
        :param backend: text generation backend
        :param verifier: verifier
        :param attempts: number of sampled answers (default: 10)
        :type style: BaselineStyle
        :type goal: Obligation
        :type attempts: int
        :returns: one attempt per answer, in sampling order
        :rtype: list of BaselineAttempt
    """
    prompt = render_baseline_prompt(style, theorem_statement(goal), templates)
    result = backend.generate(GenerationRequest(prompt, attempts, temperature,
                                                max_tokens))
    outcomes = []
    for index, response in enumerate(result.candidates):
        try:
            body = parse_proof_response(response)
        except PromptError as err:
            LOG.debug("baseline answer %d has no proof: %s", index, err)
            failed = VerificationResult.error(Verdict.FAILED,
                                              "answer contains no proof")
            outcomes.append(BaselineAttempt(response, "", failed))
            continue
        checked = verifier.check_proof(goal, body)
        LOG.info("%s baseline answer %d: %s", style.value, index,
                 checked.overall.value)
        outcomes.append(BaselineAttempt(response, body, checked))
    return outcomes


def run_automation_baseline(goal, verifier):
    """
    Try the automated prover tiers on the goal, in tier order, until one
    proves it.

        :param goal: goal obligation
        :param verifier: verifier
        :type goal: Obligation
        :returns: one attempt per tier tried; ``response`` is the tier name
        :rtype: list of BaselineAttempt
    """
    outcomes = []
    for tier in sorted(TIER_BODIES):
        checked = verifier.try_tier(goal, tier)
        LOG.info("automation baseline %s: %s", tier.name,
                 checked.overall.value)
        outcomes.append(BaselineAttempt(tier.name, TIER_BODIES[tier], checked))
        if checked.proved:
            break
    return outcomes
