#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Chat-completions backend: each candidate is one request with a single user
message, candidates are requested concurrently.
"""

import concurrent.futures
import logging
import time

from tlapsgen import HTTPClient
from tlapsgen.backends.base import AllCandidatesFailed, Backend, \
    GenerationResult
from tlapsgen.exception import BackendRejected, BackendUnreachable, \
    HTTPClientError, HTTPClientRequestError

LOG = logging.getLogger('tlapsgen.backends.http')

__all__ = ['ChatCompletionsBackend']


class ChatCompletionsBackend(Backend):
    """
    Backend for a chat-completions style endpoint.

        :param url: endpoint, e.g. ``https://host/v1/chat/completions``
        :param model: model name
        :param api_key: bearer token (default: None)
        :param timeout: seconds per request (default: 120)
        :param retries: retries per request (default: 2)
        :param max_in_flight: concurrent requests (default: 4)

    :Example:

    >>> from tlapsgen.backends.http import ChatCompletionsBackend
    >>> with ChatCompletionsBackend(url, "some-model", key) as backend:
    ...     result = backend.generate(GenerationRequest(prompt, 4, 0.7))
    ...
    >>> len(result.candidates)
    4

    .. note::
        raises BackendUnreachable when no candidate could reach the service,
        BackendRejected when the single candidate was refused and
        AllCandidatesFailed otherwise. Partial failures are logged and the
        successful candidates returned.
    """

    # pylint: disable=too-many-arguments
    def __init__(self, url, model, api_key=None, timeout=120, retries=2,
                 max_in_flight=4):
        self.cli = HTTPClient(url, api_key=api_key, timeout=timeout,
                              retries=retries)
        self.model = model
        self.max_in_flight = max(1, max_in_flight)
        self.backend_id = "http:{0}".format(model)

    def connect(self):
        """Open the HTTP session"""
        self.cli.connect()

    def disconnect(self):
        """Close the HTTP session"""
        self.cli.disconnect()

    def _payload(self, request, index):
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": request.text}],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        if request.seed_hint is not None:
            payload["seed"] = request.seed_hint + index
        return payload

    def _complete(self, request, index):
        started = time.time()
        try:
            answer = self.cli.post(self._payload(request, index))
        except HTTPClientRequestError as err:
            raise BackendRejected(err.status, err.message)
        except HTTPClientError as err:
            raise BackendUnreachable(str(err))
        try:
            text = answer["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as err:
            raise BackendRejected(None, "unexpected answer: {0!r}".format(
                err))
        return text or "", int((time.time() - started) * 1000)

    def generate(self, request):
        workers = min(self.max_in_flight, request.n_candidates)
        with concurrent.futures.ThreadPoolExecutor(workers) as pool:
            futures = [pool.submit(self._complete, request, index)
                       for index in range(request.n_candidates)]
        candidates = []
        latencies = []
        errors = []
        # futures keep candidate index order
        for index, future in enumerate(futures):
            try:
                text, latency = future.result()
            except (BackendRejected, BackendUnreachable) as err:
                LOG.warning("candidate %d failed: %s", index, err)
                errors.append(err)
                continue
            candidates.append(text)
            latencies.append(latency)
        if not candidates:
            if all(isinstance(err, BackendUnreachable) for err in errors):
                raise BackendUnreachable(str(errors[0]))
            if len(errors) == 1:
                raise errors[0]
            raise AllCandidatesFailed(errors)
        LOG.debug("%d of %d candidates from %s", len(candidates),
                  request.n_candidates, self.backend_id)
        return GenerationResult(candidates, self.backend_id, latencies)
