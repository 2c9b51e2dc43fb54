"""
Parent backend class and the request and result records
"""

import collections
import hashlib

from tlapsgen import ContextClient
from tlapsgen.exception import BackendError

__all__ = ['AllCandidatesFailed', 'GenerationRequest', 'GenerationResult',
           'Backend', 'prompt_hash', 'prompt_text']


class AllCandidatesFailed(BackendError):
    """
    The exception class for a request where every candidate failed

        :param errors: one error per candidate
    """

    def __init__(self, errors):
        super(AllCandidatesFailed, self).__init__(
            "all {0} candidates failed: {1}".format(
                len(errors), "; ".join(str(err) for err in errors)))
        self.errors = list(errors)


def prompt_text(prompt):
    """Text of a PromptText or of a plain string"""
    return getattr(prompt, "text", prompt)


def prompt_hash(prompt):
    """SHA-256 of the prompt text, the transcript key"""
    return hashlib.sha256(prompt_text(prompt).encode("utf-8")).hexdigest()


class GenerationRequest(collections.namedtuple(
        'GenerationRequest', ['prompt', 'n_candidates', 'temperature',
                              'max_tokens', 'seed_hint'])):
    """
    One sampling request.

    .. note::
        raises an exception BackendError for a non-positive candidate or
        token count or a negative temperature.
    """
    __slots__ = ()

    # pylint: disable=too-many-arguments
    def __new__(cls, prompt, n_candidates=1, temperature=0.0, max_tokens=2048,
                seed_hint=None):
        if n_candidates < 1:
            raise BackendError("n_candidates must be positive, got {0}".format(
                n_candidates))
        if temperature < 0:
            raise BackendError("temperature must not be negative")
        if max_tokens < 1:
            raise BackendError("max_tokens must be positive")
        return super(GenerationRequest, cls).__new__(
            cls, prompt, n_candidates, temperature, max_tokens, seed_hint)

    @property
    def text(self):
        """Prompt text"""
        return prompt_text(self.prompt)


GenerationResult = collections.namedtuple(
    'GenerationResult', ['candidates', 'backend_id', 'latency_ms'])


class Backend(ContextClient):
    """
    Parent backend class from which other backends are inherited
    """

    backend_id = "base"

    def connect(self):
        """Prepare the backend"""
        pass

    def disconnect(self):
        """Release the backend"""
        pass

    def generate(self, request):
        """
        Sample up to ``request.n_candidates`` completions of the prompt.

            :param request: sampling request
            :type request: GenerationRequest
            :rtype: GenerationResult
        """
        raise NotImplementedError()
