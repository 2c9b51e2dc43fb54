"""
Main exceptions module for tlapsgen
"""


class TLAPSGenError(Exception):
    """
    The base exception class for the tlapsgen package. All other exceptions
    are inherited from this class.
    """
    pass


class ConfigurationError(TLAPSGenError):
    """
    The exception class for invalid or incomplete configuration
    """
    pass


class ProofScriptError(TLAPSGenError):
    """
    The base exception class for parsing and rendering TLAPS proof scripts
    """
    pass


class CorpusError(TLAPSGenError):
    """
    The base exception class for the proof statement database
    """
    pass


class RetrievalError(TLAPSGenError):
    """
    The base exception class for embedding and similarity search
    """
    pass


class PromptError(TLAPSGenError):
    """
    The base exception class for prompt rendering and response parsing
    """
    pass


class BackendError(TLAPSGenError):
    """
    The base exception class for text generation backends
    """
    pass


class BackendUnreachable(BackendError):
    """
    The exception class for a backend that cannot be reached (network
    failure, exhausted script)
    """
    pass


class BackendRejected(BackendError):
    """
    The exception class for a request refused by the backend

        :param status: HTTP status code (or None)
        :param message: text returned by the backend
    """

    def __init__(self, status, message):
        super(BackendRejected, self).__init__(
            "backend rejected request with status {0}: {1}".format(
                status, message))
        self.status = status
        self.message = message


class HTTPClientError(TLAPSGenError):
    """
    The base exception class for the HTTP client, raised as is when the
    endpoint cannot be reached
    """
    pass


class HTTPClientRequestError(HTTPClientError):
    """
    The exception class for requests answered with an error status

        :param status: HTTP status code
        :param message: response body
    """

    def __init__(self, status, message):
        super(HTTPClientRequestError, self).__init__(
            "request failed with status {0}: {1}".format(status, message))
        self.status = status
        self.message = message


class ProverClientError(TLAPSGenError):
    """
    The base exception class for the prover process client
    """
    pass


class VerifierError(TLAPSGenError):
    """
    The base exception class for prover adapters
    """
    pass


class ProverNotFound(VerifierError):
    """
    The exception class for a missing prover executable
    """
    pass


class OrchestratorError(TLAPSGenError):
    """
    The base exception class for the proof search loop
    """
    pass


class OutputWriteError(TLAPSGenError):
    """
    The exception class for a result file (run log, transcript) that cannot
    be written
    """
    pass
