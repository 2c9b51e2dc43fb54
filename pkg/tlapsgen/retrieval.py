#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Embedding of proof statements and exact top-k search by cosine similarity.
"""

import collections
import concurrent.futures
import hashlib
import logging

import numpy as np

from tlapsgen import HTTPClient
from tlapsgen.exception import RetrievalError, HTTPClientError
from tlapsgen.proof_ast import normalize_text

LOG = logging.getLogger('tlapsgen.retrieval')

__all__ = ['EmbedderUnavailable', 'DimensionMismatch', 'ZeroVector',
           'EmptyCorpus', 'MissingEmbedding', 'Embedder', 'HashingEmbedder',
           'RemoteEmbedder', 'embedders', 'cosine_similarity',
           'ReferenceSet', 'RetrievalIndex', 'Retriever', 'top_k',
           'DEFAULT_K', 'DEFAULT_DIMENSION']

DEFAULT_K = 5
DEFAULT_DIMENSION = 256


class EmbedderUnavailable(RetrievalError):
    """
    The exception class for a remote embedder that cannot be used
    """
    pass


class DimensionMismatch(RetrievalError):
    """
    The exception class for vectors of different lengths
    """
    pass


class ZeroVector(RetrievalError):
    """
    The exception class for an all-zero vector in a similarity computation
    """
    pass


class EmptyCorpus(RetrievalError):
    """
    The exception class for a search over an empty corpus
    """
    pass


class MissingEmbedding(RetrievalError):
    """
    The exception class for a corpus record without embedding
    """
    pass


class Embedder(object):
    """Base embedder class: maps text to a fixed-length vector"""

    dimension = None

    def embed(self, text):
        """
        Embed one text.

            :param text: nonempty text
            :type text: string
            :returns: vector values
            :rtype: tuple of float
        """
        return self.embed_many([text])[0]

    def embed_many(self, texts):
        """
        Embed several texts.

            :param texts: nonempty texts
            :type texts: list
            :rtype: list of tuple
        """
        raise NotImplementedError()


class HashingEmbedder(Embedder):
    """
    Offline embedder: term frequencies of hashed character trigrams of the
    normalized text, L2-normalized.

        :param dimension: vector length (default: 256)
        :type dimension: int
    """

    def __init__(self, dimension=DEFAULT_DIMENSION):
        if dimension < 1:
            raise RetrievalError(
                "embedding dimension must be positive, got {0}".format(
                    dimension))
        self.dimension = dimension

    def __repr__(self):
        return "HashingEmbedder(dimension={0})".format(self.dimension)

    def _vector(self, text):
        text = normalize_text(text)
        if not text:
            raise RetrievalError("cannot embed empty text")
        # start and end markers give short texts at least one trigram
        padded = "\x02" + text + "\x03"
        counts = np.zeros(self.dimension)
        for start in range(len(padded) - 2):
            digest = hashlib.md5(padded[start:start + 3].encode("utf-8"))
            counts[int(digest.hexdigest()[:8], 16) % self.dimension] += 1.0
        counts /= np.linalg.norm(counts)
        return tuple(float(value) for value in counts)

    def embed_many(self, texts):
        return [self._vector(text) for text in texts]


class RemoteEmbedder(Embedder):
    """
    Client of an embeddings service answering ``{"model", "input": [...]}``
    with ``{"data": [{"index", "embedding"}]}``.

        :param url: service endpoint
        :param model: model name sent with each request
        :param api_key: bearer token (default: None)
        :param dimension: expected vector length, checked when set
        :param batch_size: texts per request (default: 32)
        :param max_in_flight: concurrent requests (default: 4)
        :param timeout: seconds per request (default: 60)
        :param retries: retries per request (default: 2)

    .. note::
        raises an exception EmbedderUnavailable if the service cannot be
        reached or answers with something that is not a batch of vectors.
    """

    # pylint: disable=too-many-arguments
    def __init__(self, url, model=None, api_key=None, dimension=None,
                 batch_size=32, max_in_flight=4, timeout=60, retries=2):
        self.client = HTTPClient(url, api_key=api_key, timeout=timeout,
                                 retries=retries)
        self.model = model
        self.dimension = dimension
        self.batch_size = batch_size
        self.max_in_flight = max_in_flight

    def __repr__(self):
        return "RemoteEmbedder(url={0!r}, model={1!r})".format(
            self.client.url, self.model)

    def _embed_batch(self, texts):
        payload = {"input": texts}
        if self.model:
            payload["model"] = self.model
        try:
            answer = self.client.post(payload)
            rows = sorted(answer["data"], key=lambda row: row.get("index", 0))
            vectors = [tuple(float(value) for value in row["embedding"])
                       for row in rows]
        except HTTPClientError as err:
            LOG.error("embedder %s unavailable: %s", self.client.url, err)
            raise EmbedderUnavailable(str(err))
        except (KeyError, TypeError, ValueError, AttributeError) as err:
            raise EmbedderUnavailable(
                "unexpected embedder answer from '{0}': {1}".format(
                    self.client.url, err))
        if len(vectors) != len(texts):
            raise EmbedderUnavailable(
                "embedder returned {0} vectors for {1} texts".format(
                    len(vectors), len(texts)))
        return vectors

    def embed_many(self, texts):
        texts = [normalize_text(text) for text in texts]
        batches = [texts[start:start + self.batch_size]
                   for start in range(0, len(texts), self.batch_size)]
        with concurrent.futures.ThreadPoolExecutor(
                max(1, self.max_in_flight)) as pool:
            answers = list(pool.map(self._embed_batch, batches))
        vectors = [vector for answer in answers for vector in answer]
        if self.dimension is None and vectors:
            self.dimension = len(vectors[0])
        for vector in vectors:
            if len(vector) != self.dimension:
                raise DimensionMismatch(
                    "embedder returned dimension {0}, expected {1}".format(
                        len(vector), self.dimension))
        return vectors


embedders = {
    "fallback": HashingEmbedder,
    "remote": RemoteEmbedder
}


def _as_array(values):
    vector = np.asarray(values, dtype=np.float64)
    if vector.ndim != 1:
        raise DimensionMismatch("embedding must be a flat list of numbers")
    return vector


def cosine_similarity(a, b):
    """
    Cosine of the angle between two vectors, clipped to [-1, 1].

        :param a: first vector
        :param b: second vector
        :type a: sequence of float
        :type b: sequence of float
        :rtype: float

    .. note::
        raises DimensionMismatch for vectors of different lengths and
        ZeroVector when a vector has no nonzero component.
    """
    a = _as_array(a)
    b = _as_array(b)
    if a.shape != b.shape:
        raise DimensionMismatch("dimensions {0} and {1} differ".format(
            a.shape[0], b.shape[0]))
    norm_a = np.linalg.norm(a)
    norm_b = np.linalg.norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVector("cosine similarity of an all-zero vector")
    # each vector is normalized first so the value is symmetric and
    # independent of positive scaling
    score = float(np.dot(a / norm_a, b / norm_b))
    return min(1.0, max(-1.0, score))


class ReferenceSet(collections.namedtuple('ReferenceSet', ['entries', 'k'])):
    """
    The ``k`` most similar records, as (CorpusRecord, score) pairs sorted by
    descending score, ties in corpus order.
    """
    __slots__ = ()

    def __new__(cls, entries=(), k=DEFAULT_K):
        return super(ReferenceSet, cls).__new__(cls, tuple(entries), k)

    @property
    def records(self):
        """Records without their scores"""
        return [record for record, _ in self.entries]

    @property
    def texts(self):
        """Statement texts in ranking order"""
        return [record.statement.text for record, _ in self.entries]


class RetrievalIndex(object):
    """
    Immutable exact index over embedded corpus records.

        :param records: records carrying embeddings of one dimension
        :type records: list of CorpusRecord

    .. note::
        raises EmptyCorpus, MissingEmbedding, DimensionMismatch or ZeroVector
        when the records cannot be searched.
    """

    def __init__(self, records):
        records = tuple(records)
        if not records:
            raise EmptyCorpus("retrieval index needs at least one record")
        for record in records:
            if record.embedding is None:
                raise MissingEmbedding(
                    "record {0} has no embedding".format(record.id[:12]))
        dimension = len(records[0].embedding)
        for record in records:
            if len(record.embedding) != dimension:
                raise DimensionMismatch(
                    "record {0} has dimension {1}, expected {2}".format(
                        record.id[:12], len(record.embedding), dimension))
        matrix = np.vstack([_as_array(record.embedding) for record in records])
        norms = np.linalg.norm(matrix, axis=1)
        zero = np.flatnonzero(norms == 0.0)
        if zero.size:
            raise ZeroVector("record {0} has an all-zero embedding".format(
                records[zero[0]].id[:12]))
        self.records = records
        self.dimension = dimension
        self._matrix = matrix / norms[:, np.newaxis]

    def __len__(self):
        return len(self.records)

    def scores(self, vector):
        """
        Cosine similarity of ``vector`` with every record, in corpus order.

            :rtype: numpy.ndarray
        """
        query = _as_array(vector)
        if query.shape[0] != self.dimension:
            raise DimensionMismatch(
                "query has dimension {0}, index has {1}".format(
                    query.shape[0], self.dimension))
        norm = np.linalg.norm(query)
        if norm == 0.0:
            raise ZeroVector("query embedding is all zero")
        return np.clip(self._matrix.dot(query / norm), -1.0, 1.0)

    def top_k(self, vector, k=DEFAULT_K):
        """
        The ``k`` records most similar to ``vector``.

            :param vector: query embedding
            :param k: positive number of entries
            :rtype: ReferenceSet
        """
        if k < 1:
            raise RetrievalError("k must be positive, got {0}".format(k))
        scores = self.scores(vector)
        # scores equal to 12 decimals tie
        order = np.argsort(-np.round(scores, 12), kind="stable")[:k]
        return ReferenceSet([(self.records[i], float(scores[i]))
                             for i in order], k)


def _query_text(query):
    if hasattr(query, "normalized_assertion"):
        return query.normalized_assertion
    return normalize_text(query)


def top_k(query, corpus, k=DEFAULT_K, embedder=None):
    """
    Exact top-k search of a corpus for an obligation or a text.

        :param query: obligation (its assertion is embedded) or text
        :param corpus: embedded records
        :param k: positive number of entries (default: 5)
        :param embedder: embedder of the corpus (default: HashingEmbedder)
        :type query: Obligation or string
        :type corpus: list of CorpusRecord
        :type k: int
        :rtype: ReferenceSet

    .. note::
        raises an exception EmptyCorpus for an empty corpus.
    """
    if not corpus:
        raise EmptyCorpus("cannot search an empty corpus")
    embedder = embedder or HashingEmbedder()
    index = RetrievalIndex(corpus)
    return index.top_k(embedder.embed(_query_text(query)), k)


class Retriever(object):
    """
    Reference lookup used by the proof search: embeds obligations and
    queries an index built once over the corpus.

    Records without embeddings are embedded on first use. When the
    configured embedder turns out to be unavailable, the corpus and the
    queries switch to the offline :class:`HashingEmbedder`.

        :param records: corpus records (may be empty)
        :param embedder: query embedder (default: HashingEmbedder)
        :param k: number of references (default: 5)
    """

    def __init__(self, records, embedder=None, k=DEFAULT_K):
        self.records = list(records)
        self.embedder = embedder or HashingEmbedder()
        self.k = k
        self._index = None

    def _build(self):
        pending = [i for i, record in enumerate(self.records)
                   if record.embedding is None]
        if pending:
            LOG.info("embedding %d corpus records", len(pending))
            vectors = self.embedder.embed_many(
                [self.records[i].statement.normalized_text for i in pending])
            for i, vector in zip(pending, vectors):
                self.records[i] = self.records[i].with_embedding(vector)
        self._index = RetrievalIndex(self.records)

    def _fall_back(self, err):
        LOG.warning("embedder unavailable (%s), using offline embedder", err)
        self.embedder = HashingEmbedder()
        self.records = [record.with_embedding(None)
                        for record in self.records]
        self._build()

    def references(self, obl):
        """
        Reference set for an obligation; empty when the corpus is empty.

            :param obl: obligation or text
            :rtype: ReferenceSet
        """
        if not self.records:
            return ReferenceSet((), self.k)
        try:
            if self._index is None:
                self._build()
            vector = self.embedder.embed(_query_text(obl))
        except EmbedderUnavailable as err:
            if isinstance(self.embedder, HashingEmbedder):
                raise
            self._fall_back(err)
            vector = self.embedder.embed(_query_text(obl))
        if len(vector) != self._index.dimension:
            # stored embeddings come from another embedder configuration
            raise DimensionMismatch(
                "query has dimension {0}, corpus has {1}".format(
                    len(vector), self._index.dimension))
        refs = self._index.top_k(vector, self.k)
        LOG.debug("retrieved %d references for '%s'", len(refs.entries),
                  getattr(obl, "name", obl))
        return refs
