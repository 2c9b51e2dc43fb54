#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Deterministic backends: a script of responses consumed in order, a
recorder wrapping any backend, and a replayer of recorded transcripts.

Transcript files hold a ``{"version": "transcript/1"}`` header line and one
JSON object per request::

    {"prompt_hash": "...", "prompt_text": "...", "responses": ["...", ...]}
"""

import collections
import io
import json
import logging
import threading

import yaml

from tlapsgen.backends.base import Backend, GenerationResult, prompt_hash
from tlapsgen.exception import BackendError, BackendUnreachable, \
    ConfigurationError, OutputWriteError

LOG = logging.getLogger('tlapsgen.backends.replay')

__all__ = ['TranscriptMismatch', 'TranscriptEntry', 'TRANSCRIPT_VERSION',
           'ScriptedBackend', 'RecordingBackend', 'ReplayBackend',
           'load_script', 'load_transcript', 'record_transcript',
           'replay_from']

TRANSCRIPT_VERSION = "transcript/1"


class TranscriptMismatch(BackendError):
    """
    The exception class for a prompt absent from the replayed transcript
    """
    pass


TranscriptEntry = collections.namedtuple(
    'TranscriptEntry', ['prompt_hash', 'prompt_text', 'responses'])


class ScriptedBackend(Backend):
    """
    Backend returning scripted responses in order, ``n_candidates`` per
    request (fewer when the script runs short).

        :param responses: response texts
        :type responses: list

    .. note::
        raises an exception BackendUnreachable once the script is exhausted.
    """

    backend_id = "scripted"

    def __init__(self, responses):
        self._responses = collections.deque(responses)
        self._lock = threading.Lock()
        self.prompts = []

    @property
    def remaining(self):
        """Number of responses left"""
        return len(self._responses)

    def generate(self, request):
        with self._lock:
            if not self._responses:
                raise BackendUnreachable(
                    "scripted backend exhausted after {0} requests".format(
                        len(self.prompts)))
            self.prompts.append(request.text)
            count = min(request.n_candidates, len(self._responses))
            candidates = [self._responses.popleft() for _ in range(count)]
        return GenerationResult(candidates, self.backend_id, [0] * count)


class RecordingBackend(Backend):
    """
    Wrapper recording every request and its candidates.

        :param backend: recorded backend
    """

    def __init__(self, backend):
        self.backend = backend
        self.backend_id = "recording:" + backend.backend_id
        self.entries = []
        self._lock = threading.Lock()

    def connect(self):
        self.backend.connect()

    def disconnect(self):
        self.backend.disconnect()

    def generate(self, request):
        result = self.backend.generate(request)
        with self._lock:
            self.entries.append(TranscriptEntry(
                prompt_hash(request.prompt), request.text,
                list(result.candidates)))
        return result


class ReplayBackend(Backend):
    """
    Backend answering from transcript entries keyed by prompt hash. A prompt
    asked several times receives its recorded entries in order, the last
    one repeated.

        :param entries: transcript entries
        :type entries: list of TranscriptEntry

    .. note::
        raises an exception TranscriptMismatch for an unknown prompt.
    """

    backend_id = "replay"

    def __init__(self, entries):
        self._entries = collections.OrderedDict()
        for entry in entries:
            self._entries.setdefault(entry.prompt_hash, []).append(entry)
        self._served = collections.Counter()
        self._lock = threading.Lock()

    def generate(self, request):
        key = prompt_hash(request.prompt)
        with self._lock:
            entries = self._entries.get(key)
            if not entries:
                LOG.error("prompt %s is not in the transcript", key[:12])
                raise TranscriptMismatch(
                    "prompt {0} is not in the transcript".format(key[:12]))
            entry = entries[min(self._served[key], len(entries) - 1)]
            self._served[key] += 1
        candidates = list(entry.responses[:request.n_candidates])
        if not candidates:
            raise BackendUnreachable(
                "transcript entry {0} has no responses".format(key[:12]))
        return GenerationResult(candidates, self.backend_id,
                                [0] * len(candidates))


def load_script(path):
    """
    Responses of a script file: a YAML or JSON list of texts, or a mapping
    with a ``responses`` list.

        :param path: script file
        :rtype: list

    .. note::
        raises an exception ConfigurationError for an unreadable script.
    """
    try:
        with io.open(path, encoding="utf-8") as script_file:
            data = yaml.safe_load(script_file)
    except (IOError, OSError, yaml.YAMLError) as err:
        raise ConfigurationError("cannot read script '{0}': {1}".format(
            path, err))
    if isinstance(data, dict):
        data = data.get("responses")
    if not isinstance(data, list) or \
            not all(isinstance(item, str) for item in data):
        raise ConfigurationError(
            "script '{0}' is not a list of responses".format(path))
    return data


def load_transcript(path):
    """
    Entries of a transcript file.

        :param path: transcript file
        :rtype: list of TranscriptEntry

    .. note::
        raises an exception ConfigurationError for a malformed file.
    """
    try:
        with io.open(path, encoding="utf-8") as transcript:
            lines = [line for line in transcript.read().split("\n")
                     if line.strip()]
    except (IOError, OSError) as err:
        raise ConfigurationError("cannot read transcript '{0}': {1}".format(
            path, err))
    entries = []
    try:
        header = json.loads(lines[0]) if lines else {}
        if header.get("version") != TRANSCRIPT_VERSION:
            raise ConfigurationError("'{0}' is not a {1} file".format(
                path, TRANSCRIPT_VERSION))
        for line in lines[1:]:
            data = json.loads(line)
            entries.append(TranscriptEntry(
                data["prompt_hash"], data["prompt_text"],
                list(data["responses"])))
    except (ValueError, KeyError, TypeError, AttributeError) as err:
        raise ConfigurationError("malformed transcript '{0}': {1}".format(
            path, err))
    return entries


def record_transcript(run, path):
    """
    Write the entries recorded during a run.

        :param run: recording backend, or a list of entries
        :param path: output file
        :type run: RecordingBackend
        :type path: string

    .. note::
        raises an exception OutputWriteError if the file cannot be written.
    """
    entries = run.entries if isinstance(run, RecordingBackend) else run
    try:
        with io.open(path, "w", encoding="utf-8",
                     newline="\n") as transcript:
            transcript.write(json.dumps(
                {"version": TRANSCRIPT_VERSION}) + "\n")
            for entry in entries:
                transcript.write(json.dumps(entry._asdict(), sort_keys=True,
                                            ensure_ascii=False) + "\n")
    except (IOError, OSError) as err:
        LOG.error("write transcript '%s' error: %s", path, err)
        raise OutputWriteError("cannot write transcript '{0}': {1}".format(
            path, err))
    LOG.debug("recorded %d requests to %s", len(entries), path)


def replay_from(path):
    """
    Backend replaying a transcript file.

        :param path: transcript file
        :rtype: ReplayBackend
    """
    return ReplayBackend(load_transcript(path))
