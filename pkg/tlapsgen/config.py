#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Tool configuration: YAML file, environment and command-line overrides, in
increasing precedence, over built-in defaults. Also reads obligation files
and builds the configured backend, verifier and embedder.

Example file::

    corpus_path: corpus.jsonl
    embedder: {kind: fallback, dimension: 256}
    llm: {kind: http, url: "https://host/v1/chat/completions", model: m}
    verifier: {kind: tlaps, executable: tlapm, timeout: 600}
    run: {max_decomposition_attempts_per_obligation: 10, n_candidates: 4}
    log_level: INFO
"""

import collections
import copy
import io
import logging
import os

import yaml

from tlapsgen.backends import backends
from tlapsgen.backends.http import ChatCompletionsBackend
from tlapsgen.backends.replay import ScriptedBackend, load_script, \
    replay_from
from tlapsgen.exception import ConfigurationError, ProofScriptError
from tlapsgen.orchestrator import RunConfig
from tlapsgen.proof_ast import Definition, Obligation, parse_module
from tlapsgen.retrieval import DEFAULT_DIMENSION, HashingEmbedder, \
    RemoteEmbedder, embedders
from tlapsgen.verifiers import verifiers
from tlapsgen.verifiers.mock import MockVerifier
from tlapsgen.verifiers.tlaps import TLAPSVerifier

LOG = logging.getLogger('tlapsgen.config')

__all__ = ['ToolConfig', 'ENVIRONMENT', 'load_config', 'parse_backend_spec',
           'load_obligation', 'obligation_from_module', 'make_backend',
           'make_verifier', 'make_embedder']

ToolConfig = collections.namedtuple(
    'ToolConfig', ['corpus_path', 'template_dir', 'embedder', 'llm',
                   'verifier', 'run', 'log_level'])

_DEFAULTS = {
    "corpus_path": None,
    "template_dir": None,
    "embedder": {"kind": "fallback", "url": None, "model": None,
                 "dimension": None, "api_key": None, "batch_size": 32,
                 "max_in_flight": 4, "timeout": 60, "retries": 2},
    "llm": {"kind": None, "url": None, "model": None, "transcript": None,
            "script": None, "api_key": None, "timeout": 120, "retries": 2,
            "max_in_flight": 4},
    "verifier": {"kind": "tlaps", "executable": "tlapm", "args": None,
                 "timeout": 600, "max_concurrency": 2, "table": None,
                 "keep_artifacts": False, "work_dir": None},
    "run": dict(RunConfig()._asdict()),
    "log_level": "WARNING",
}

ENVIRONMENT = {
    "TLAPSGEN_API_KEY": ("llm", "api_key"),
    "TLAPSGEN_EMBEDDER_KEY": ("embedder", "api_key"),
    "TLAPSGEN_PROVER": ("verifier", "executable"),
    "TLAPSGEN_LLM_URL": ("llm", "url"),
    "TLAPSGEN_LLM_MODEL": ("llm", "model"),
}

_PATHS = [(None, "corpus_path"), (None, "template_dir"),
          ("llm", "transcript"), ("llm", "script"), ("verifier", "table"),
          ("verifier", "work_dir")]

_KINDS = {"embedder": embedders, "llm": backends, "verifier": verifiers}


def _merge(base, update, where):
    for key, value in update.items():
        if key not in base:
            raise ConfigurationError("unknown configuration key '{0}'".format(
                where + key))
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigurationError(
                    "configuration key '{0}' must be a mapping".format(
                        where + key))
            _merge(base[key], value, where + key + ".")
        elif value is not None:
            base[key] = value


def _read_yaml(path, what):
    try:
        with io.open(path, encoding="utf-8") as source:
            return yaml.safe_load(source)
    except (IOError, OSError) as err:
        raise ConfigurationError("cannot read {0} '{1}': {2}".format(
            what, path, err))
    except yaml.YAMLError as err:
        raise ConfigurationError("malformed {0} '{1}': {2}".format(
            what, path, err))


def load_config(path=None, env=None, overrides=None):
    """
    Build the tool configuration.

        :param path: YAML configuration file (default: none)
        :param env: environment mapping (default: os.environ)
        :param overrides: values from command-line flags, same layout as
                          the file; None values are ignored
        :type path: string
        :type env: dict
        :type overrides: dict
        :rtype: ToolConfig

    .. note::
        raises an exception ConfigurationError for unknown keys, unknown
        kinds, invalid run budgets or referenced paths that do not exist.
    """
    values = copy.deepcopy(_DEFAULTS)
    if path is not None:
        data = _read_yaml(path, "configuration") or {}
        if not isinstance(data, dict):
            raise ConfigurationError(
                "configuration '{0}' must be a mapping".format(path))
        _merge(values, data, "")
        LOG.debug("configuration read from %s", path)
    env = os.environ if env is None else env
    for variable, (section, key) in sorted(ENVIRONMENT.items()):
        if env.get(variable):
            values[section][key] = env[variable]
    _merge(values, overrides or {}, "")
    for section, key in _PATHS:
        value = values[section][key] if section else values[key]
        if value is not None and not os.path.exists(value):
            raise ConfigurationError("{0} '{1}' does not exist".format(
                (section + "." if section else "") + key, value))
    for section, registry in _KINDS.items():
        kind = values[section]["kind"]
        if kind is not None and kind not in registry:
            raise ConfigurationError("unknown {0} kind '{1}'".format(
                section, kind))
    run = RunConfig(**values["run"]).validate()
    return ToolConfig(values["corpus_path"], values["template_dir"],
                      values["embedder"], values["llm"], values["verifier"],
                      run, str(values["log_level"]).upper())


def parse_backend_spec(spec, registry):
    """
    Split a ``kind:spec`` flag value.

        :param spec: flag value, e.g. ``replay:run.jsonl``
        :param registry: known kinds
        :type spec: string
        :type registry: dict
        :returns: kind and the rest (possibly empty)
        :rtype: tuple

    .. note::
        raises an exception ConfigurationError for an unknown kind.
    """
    kind, _, rest = spec.partition(":")
    if kind not in registry:
        raise ConfigurationError("unknown kind '{0}' in '{1}', expected one "
                                 "of {2}".format(kind, spec,
                                                 ", ".join(sorted(registry))))
    return kind, rest


def _definition(item, path):
    if isinstance(item, str):
        return Definition.from_text(item)
    if isinstance(item, dict) and item.get("text"):
        if item.get("name"):
            return Definition(str(item["name"]), str(item["text"]).strip())
        return Definition.from_text(str(item["text"]))
    raise ConfigurationError("malformed definition {0!r} in '{1}'".format(
        item, path))


def load_obligation(path):
    """
    Read an obligation file: a YAML or JSON mapping with ``name``,
    ``assertion``, ``definitions`` (texts or ``{name, text}`` mappings) and
    ``extends``.

        :param path: obligation file
        :type path: string
        :rtype: Obligation

    .. note::
        raises an exception ConfigurationError for a missing file, a missing
        assertion or malformed definitions.
    """
    data = _read_yaml(path, "obligation file")
    if not isinstance(data, dict):
        raise ConfigurationError(
            "obligation file '{0}' must be a mapping".format(path))
    unknown = set(data) - set(["name", "assertion", "definitions", "extends"])
    if unknown:
        raise ConfigurationError("unknown keys {0} in '{1}'".format(
            ", ".join(sorted(unknown)), path))
    assertion = str(data.get("assertion") or "").strip()
    if not assertion:
        raise ConfigurationError(
            "obligation file '{0}' has no assertion".format(path))
    name = data.get("name") or \
        os.path.splitext(os.path.basename(path))[0]
    try:
        return Obligation(str(name), assertion,
                          [_definition(item, path)
                           for item in data.get("definitions") or ()],
                          [str(module)
                           for module in data.get("extends") or ()])
    except ProofScriptError as err:
        raise ConfigurationError("obligation file '{0}': {1}".format(
            path, err))


def obligation_from_module(path, theorem_name=None):
    """
    Obligation of a theorem of a module: its assertion with every definition
    and declaration of the module and its EXTENDS list.

        :param path: ``.tla`` file
        :param theorem_name: theorem to take (default: the last one)
        :rtype: Obligation

    .. note::
        raises an exception ConfigurationError if the module cannot be read
        or has no such theorem.
    """
    try:
        with io.open(path, encoding="utf-8") as module_file:
            module = parse_module(module_file.read())
    except (IOError, OSError, ProofScriptError) as err:
        raise ConfigurationError("cannot read module '{0}': {1}".format(
            path, err))
    theorems = [theorem for theorem in module.theorems
                if theorem_name is None or theorem.name == theorem_name]
    if not theorems:
        raise ConfigurationError("no theorem {0}in '{1}'".format(
            "'{0}' ".format(theorem_name) if theorem_name else "", path))
    theorem = theorems[-1]
    name = theorem.name or module.module_name
    try:
        return Obligation(name, theorem.assertion, module.definitions,
                          module.extends)
    except ProofScriptError as err:
        raise ConfigurationError("module '{0}': {1}".format(path, err))


def make_backend(llm):
    """
    Text generation backend of the ``llm`` section.

    .. note::
        raises an exception ConfigurationError if the section is incomplete.
    """
    kind = llm.get("kind")
    if kind == "http":
        if not llm.get("url") or not llm.get("model"):
            raise ConfigurationError("http backend needs a url and a model")
        return ChatCompletionsBackend(llm["url"], llm["model"],
                                      api_key=llm.get("api_key"),
                                      timeout=llm["timeout"],
                                      retries=llm["retries"],
                                      max_in_flight=llm["max_in_flight"])
    if kind == "replay":
        if not llm.get("transcript"):
            raise ConfigurationError("replay backend needs a transcript")
        return replay_from(llm["transcript"])
    if kind == "scripted":
        if not llm.get("script"):
            raise ConfigurationError("scripted backend needs a script")
        return ScriptedBackend(load_script(llm["script"]))
    raise ConfigurationError("no text generation backend configured")


def make_verifier(section, keep_artifacts=None):
    """Verifier of the ``verifier`` section"""
    if section["kind"] == "mock":
        if not section.get("table"):
            return MockVerifier()
        return MockVerifier.from_file(section["table"])
    if keep_artifacts is None:
        keep_artifacts = section["keep_artifacts"]
    return TLAPSVerifier(executable=section["executable"],
                         args=section["args"], timeout=section["timeout"],
                         max_concurrency=section["max_concurrency"],
                         work_dir=section["work_dir"],
                         keep_artifacts=keep_artifacts)


def make_embedder(section):
    """
    Embedder of the ``embedder`` section. A remote embedder checks the
    vector length only when ``dimension`` is set; the offline embedder
    defaults to 256 components.
    """
    if section["kind"] == "remote":
        if not section.get("url"):
            raise ConfigurationError("remote embedder needs a url")
        return RemoteEmbedder(section["url"], model=section.get("model"),
                              api_key=section.get("api_key"),
                              dimension=section["dimension"],
                              batch_size=section["batch_size"],
                              max_in_flight=section["max_in_flight"],
                              timeout=section["timeout"],
                              retries=section["retries"])
    return HashingEmbedder(section["dimension"] or DEFAULT_DIMENSION)
