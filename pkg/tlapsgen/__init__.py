#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
TLAPSGen generates TLAPS-checkable proofs for TLA+ proof obligations.

The package root holds the low-level clients every driver is built on:

  - :class:`ProverClient` runs the TLAPS proof manager on generated modules,
    each invocation in a fresh working directory, with a hard timeout.
  - :class:`HTTPClient` posts JSON to text-generation and embedding services
    with retries and exponential backoff.

.. note::
    The prover runs on a pseudo-terminal, so its toolbox output is line
    buffered and a timeout kills its backend provers with it.
"""

import collections
import logging
import os
import shutil
import tempfile
import time

import pexpect
import requests

from tlapsgen.exception import ProverClientError, HTTPClientError, \
    HTTPClientRequestError

LOG = logging.getLogger('tlapsgen')

__version__ = "0.3"

__all__ = ['ContextClient', 'ProverClient', 'ProverRun', 'HTTPClient',
           'clients']

ProverRun = collections.namedtuple(
    'ProverRun', ['output', 'exit_status', 'timed_out', 'duration_ms',
                  'module_path'])


class ContextClient(object):  # pylint: disable=too-few-public-methods
    """Context manager class for all clients and drivers"""

    def __enter__(self):
        self.connect()  # pylint: disable=no-member
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        self.disconnect()  # pylint: disable=no-member


class ProverClient(ContextClient):
    """
    A client class for running the TLAPS proof manager on module files.

        :param executable: name or path of the prover (default: "tlapm")
        :param args: argument template, ``{module}`` is replaced by the module
                     file name (default: ["--toolbox", "0", "0", "{module}"])
        :param timeout: seconds before a run is killed (default: 600)
        :param work_dir: parent of the run-scoped temporary directory
                         (default: system temp directory)
        :param keep_artifacts: keep generated modules after disconnect
                               (default: False)
        :type executable: string
        :type args: list
        :type timeout: int
        :type work_dir: string
        :type keep_artifacts: bool

    :Example:

    >>> from tlapsgen import ProverClient
    >>> with ProverClient() as prover:
    ...     run = prover.execute("Even_Proof", module_text)
    ...
    >>> run.exit_status, run.timed_out
    (0, False)

    .. note::
        raises exceptions inherited from ProverClientError exception
    """

    # pylint: disable=too-many-arguments
    def __init__(self, executable="tlapm", args=None, timeout=600,
                 work_dir=None, keep_artifacts=False):
        self.executable = executable
        self.args = args or ["--toolbox", "0", "0", "{module}"]
        self.timeout = timeout
        self.work_dir = work_dir
        self.keep_artifacts = keep_artifacts
        self.run_dir = None
        self._path = None
        self._counter = 0

    def connect(self):
        """
        Locate the prover executable and create the run-scoped directory.

        .. note::
            raises an exception ProverClientError if the executable is not
            found or the directory cannot be created.
        """
        self._path = pexpect.which(self.executable)
        if self._path is None:
            LOG.error("prover executable '%s' not found", self.executable)
            raise ProverClientError(
                "prover executable '{0}' not found".format(self.executable))
        try:
            self.run_dir = tempfile.mkdtemp(prefix="tlapsgen-",
                                            dir=self.work_dir)
        except OSError as err:
            LOG.error("create working directory error: %s", err)
            raise ProverClientError(
                "Cannot create working directory: {0}".format(err))
        LOG.debug("prover '%s', run directory %s", self._path, self.run_dir)

    def disconnect(self):
        """
        Remove the run-scoped directory unless artifacts are kept.

        .. note::
            not raises exceptions.
        """
        if self.run_dir is None:
            return
        if self.keep_artifacts:
            LOG.info("prover artifacts kept in %s", self.run_dir)
        else:
            shutil.rmtree(self.run_dir, ignore_errors=True)
        self.run_dir = None

    def _fresh_dir(self):
        # mkdtemp keeps names unique, the counter only orders them
        self._counter += 1
        path = tempfile.mkdtemp(prefix="run{0:04d}-".format(self._counter),
                                dir=self.run_dir)
        return path

    def execute(self, module_name, module_text, timeout=None):
        """
        Write a module into a fresh directory and run the prover on it.

            :param module_name: module name, also the file name stem
            :param module_text: complete module text
            :param timeout: seconds, overrides the client timeout
            :type module_name: string
            :type module_text: string
            :type timeout: int
            :returns: output, exit status, timeout flag, duration and path
            :rtype: ProverRun

        .. note::
            raises an exception ProverClientError if the client is not
            connected or the module cannot be written.
        """
        if self.run_dir is None:
            raise ProverClientError("prover client is not connected")
        timeout = timeout or self.timeout
        try:
            cwd = self._fresh_dir()
            file_name = module_name + ".tla"
            module_path = os.path.join(cwd, file_name)
            with open(module_path, "w") as module_file:
                module_file.write(module_text)
        except (IOError, OSError) as err:
            LOG.error("write module '%s' error: %s", module_name, err)
            raise ProverClientError(
                "Cannot write module '{0}': {1}".format(module_name, err))
        args = [arg.format(module=file_name) for arg in self.args]
        LOG.debug("prover command: %s %s (cwd %s)", self._path,
                  " ".join(args), cwd)
        started = time.time()
        try:
            proc = pexpect.spawn(self._path, args, cwd=cwd, timeout=timeout,
                                 encoding="utf-8", codec_errors="replace")
        except pexpect.ExceptionPexpect as err:
            LOG.error("prover spawn error: %s", err)
            raise ProverClientError("Prover spawn error: {0}".format(err))
        answ = proc.expect([pexpect.EOF, pexpect.TIMEOUT])
        output = (proc.before or "").replace("\r\n", "\n")
        timed_out = answ == 1
        if timed_out:
            LOG.error("prover run on '%s' timed out after %s s",
                      module_name, timeout)
            proc.terminate(force=True)
        proc.close()
        duration = int((time.time() - started) * 1000)
        LOG.debug("prover exit status %s after %d ms", proc.exitstatus,
                  duration)
        return ProverRun(output, proc.exitstatus, timed_out, duration,
                         module_path)


class HTTPClient(ContextClient):
    """
    A client class posting JSON requests to a service endpoint.

        :param url: endpoint URL
        :param api_key: bearer token (default: None)
        :param timeout: seconds per request (default: 120)
        :param retries: retries after the first attempt (default: 2)
        :param backoff: first retry delay in seconds, doubled each retry
                        (default: 1.0)
        :type url: string
        :type api_key: string
        :type timeout: int
        :type retries: int
        :type backoff: float

    :Example:

    >>> from tlapsgen import HTTPClient
    >>> with HTTPClient("http://localhost:8000/v1/embeddings") as cli:
    ...     cli.post({"input": ["x + x = 2 * x"]})
    ...
    {'data': [{'embedding': [...], 'index': 0}]}

    .. note::
        raises HTTPClientRequestError when the service answers with an error
        status and HTTPClientError when it cannot be reached.
    """

    retry_statuses = (429, 500, 502, 503, 504)

    # pylint: disable=too-many-arguments
    def __init__(self, url, api_key=None, timeout=120, retries=2,
                 backoff=1.0):
        self.url = url
        self.api_key = api_key
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self.session = None

    def connect(self):
        """Open the HTTP session"""
        self.session = requests.Session()
        self.session.headers["Content-Type"] = "application/json"
        if self.api_key:
            self.session.headers["Authorization"] = "Bearer " + self.api_key

    def disconnect(self):
        """
        Close the HTTP session.

        .. note::
            not raises exceptions.
        """
        if self.session is not None:
            self.session.close()
            self.session = None

    def post(self, payload):
        """
        Post a JSON payload and return the decoded JSON answer.

            :param payload: request body
            :type payload: dict
            :returns: decoded response
            :rtype: dict
        """
        if self.session is None:
            self.connect()
        error = None
        for attempt in range(self.retries + 1):
            if attempt:
                delay = self.backoff * 2 ** (attempt - 1)
                LOG.debug("retry %d for %s in %.1f s", attempt, self.url,
                          delay)
                time.sleep(delay)
            try:
                response = self.session.post(self.url, json=payload,
                                             timeout=self.timeout)
            except (requests.ConnectionError, requests.Timeout) as err:
                LOG.warning("request to %s failed: %s", self.url, err)
                error = HTTPClientError(
                    "Connection to '{0}' error: {1}".format(self.url, err))
                continue
            if response.status_code in self.retry_statuses:
                LOG.warning("request to %s answered %s", self.url,
                            response.status_code)
                error = HTTPClientRequestError(response.status_code,
                                               response.text)
                continue
            if response.status_code >= 400:
                LOG.error("request to %s rejected with %s: %s", self.url,
                          response.status_code, response.text)
                raise HTTPClientRequestError(response.status_code,
                                             response.text)
            try:
                return response.json()
            except ValueError:
                raise HTTPClientRequestError(
                    response.status_code,
                    "response is not JSON: {0}".format(response.text[:200]))
        raise error


clients = {
    "prover": ProverClient,
    "http": HTTPClient
}
