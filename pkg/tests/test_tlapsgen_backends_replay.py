"""
Tests for module tlapsgen.backends.replay
"""

import io
import json
import os
import shutil
import tempfile
import unittest
try:
    from unittest import mock
except ImportError:  # pragma: no cover
    import mock
from tlapsgen.backends.base import GenerationRequest, GenerationResult, \
    prompt_hash
from tlapsgen.backends.replay import TRANSCRIPT_VERSION, TranscriptEntry, \
    TranscriptMismatch, ScriptedBackend, RecordingBackend, ReplayBackend, \
    load_script, load_transcript, record_transcript, replay_from
from tlapsgen.exception import BackendUnreachable, ConfigurationError, \
    OutputWriteError

# pylint: disable=invalid-name,missing-docstring,protected-access

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


class TestScriptedBackend(unittest.TestCase):

    def test_in_order(self):
        b = ScriptedBackend(["a", "b", "c"])
        self.assertEqual(b.generate(GenerationRequest("p1", 2)).candidates,
                         ["a", "b"])
        self.assertEqual(b.remaining, 1)
        # fewer candidates when the script runs short
        self.assertEqual(b.generate(GenerationRequest("p2", 4)).candidates,
                         ["c"])
        self.assertEqual(b.prompts, ["p1", "p2"])
        with self.assertRaises(BackendUnreachable):
            b.generate(GenerationRequest("p3"))

    def test_load_script(self):
        responses = load_script(os.path.join(FIXTURES, "even_script.yaml"))
        self.assertEqual(len(responses), 6)
        self.assertTrue(responses[0].startswith("ORIGINAL OBLIGATION:"))
        self.assertEqual(responses[3], "BY SMT DEF Even")
        repeated = load_script(os.path.join(FIXTURES, "repeat_script.yaml"))
        self.assertEqual(len(repeated), 12)
        self.assertEqual(len(set(repeated)), 1)


class TestScriptFiles(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.path = os.path.join(self.tmp, "script.yaml")

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def write(self, text):
        with io.open(self.path, "w", encoding="utf-8") as script:
            script.write(text)

    def test_plain_list(self):
        self.write(u'["OBVIOUS", "BY DEF Even"]')
        self.assertEqual(load_script(self.path), ["OBVIOUS", "BY DEF Even"])

    def test_invalid(self):
        for text in (u"responses: 3", u"- [nested]", u"{unclosed"):
            self.write(text)
            with self.assertRaises(ConfigurationError):
                load_script(self.path)
        with self.assertRaises(ConfigurationError):
            load_script(os.path.join(self.tmp, "missing.yaml"))


class TestRecordReplay(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.path = os.path.join(self.tmp, "run.transcript")

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def test_recording(self):
        inner = mock.Mock(backend_id="http:m")
        inner.generate.return_value = GenerationResult(["x", "y"], "http:m",
                                                       [1, 2])
        recorder = RecordingBackend(inner)
        self.assertEqual(recorder.backend_id, "recording:http:m")
        with recorder:
            inner.connect.assert_called_with()
            result = recorder.generate(GenerationRequest("prove", 2))
        inner.disconnect.assert_called_with()
        self.assertEqual(result.candidates, ["x", "y"])
        self.assertEqual(recorder.entries, [
            TranscriptEntry(prompt_hash("prove"), "prove", ["x", "y"])])

    def test_transcript_file(self):
        recorder = RecordingBackend(ScriptedBackend(["a", "b", "c", "d"]))
        recorder.generate(GenerationRequest("first", 1))
        recorder.generate(GenerationRequest("second", 2))
        recorder.generate(GenerationRequest("first", 1))
        record_transcript(recorder, self.path)
        with io.open(self.path, encoding="utf-8") as transcript:
            lines = transcript.read().splitlines()
        self.assertEqual(json.loads(lines[0]),
                         {"version": TRANSCRIPT_VERSION})
        self.assertEqual(len(lines), 4)
        self.assertEqual(load_transcript(self.path), recorder.entries)

        replayer = replay_from(self.path)
        self.assertEqual(replayer.generate(GenerationRequest("second", 2))
                         .candidates, ["b", "c"])
        # a repeated prompt gets its entries in order, the last repeated
        self.assertEqual(replayer.generate(GenerationRequest("first"))
                         .candidates, ["a"])
        self.assertEqual(replayer.generate(GenerationRequest("first"))
                         .candidates, ["d"])
        self.assertEqual(replayer.generate(GenerationRequest("first"))
                         .candidates, ["d"])
        with self.assertRaises(TranscriptMismatch):
            replayer.generate(GenerationRequest("third"))

    def test_unwritable_transcript(self):
        path = os.path.join(self.tmp, "missing", "run.transcript")
        with self.assertLogs('tlapsgen.backends.replay', 'ERROR'):
            with self.assertRaises(OutputWriteError):
                record_transcript([], path)
        with mock.patch('io.open', side_effect=OSError("disk full")):
            with self.assertRaises(OutputWriteError):
                record_transcript([], self.path)

    def test_replay_truncates_candidates(self):
        replayer = ReplayBackend([TranscriptEntry(prompt_hash("p"), "p",
                                                  ["a", "b", "c"])])
        self.assertEqual(replayer.generate(GenerationRequest("p", 2))
                         .candidates, ["a", "b"])

    def test_replay_empty_entry(self):
        replayer = ReplayBackend([TranscriptEntry(prompt_hash("p"), "p", [])])
        with self.assertRaises(BackendUnreachable):
            replayer.generate(GenerationRequest("p"))

    def test_malformed_transcript(self):
        for text in (u"", u'{"version": "transcript/0"}\n',
                     u'{"version": "transcript/1"}\n{"prompt_hash": "x"}\n',
                     u'{"version": "transcript/1"}\nnot json\n'):
            with io.open(self.path, "w", encoding="utf-8") as transcript:
                transcript.write(text)
            with self.assertRaises(ConfigurationError):
                load_transcript(self.path)
        with self.assertRaises(ConfigurationError):
            load_transcript(os.path.join(self.tmp, "missing"))
