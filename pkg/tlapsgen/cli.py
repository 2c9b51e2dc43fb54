#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Command-line entry point.

Exit codes: 0 success, 1 domain failure, 2 usage or write error, 3 search
budget exhausted, 4 environment error (configuration, prover, backend).

:Example:

    $ tlapsgen build-corpus specs/ --exclusions eval.excl --out corpus.jsonl
    $ tlapsgen retrieve "Even(x + x)" --corpus corpus.jsonl --k 3
    $ tlapsgen prove even.yaml --llm replay:even.jsonl --verifier mock:t.yaml
    $ tlapsgen check even.yaml Even_Proof.tla
"""

import argparse
import io
import logging
import os
import sys

from tlapsgen import __version__
from tlapsgen.backends import backends
from tlapsgen.backends.replay import RecordingBackend, record_transcript
from tlapsgen.baseline import AUTOMATION, run_automation_baseline, \
    run_baseline, theorem_statement
from tlapsgen.config import load_config, load_obligation, make_backend, \
    make_embedder, make_verifier, obligation_from_module, \
    parse_backend_spec
from tlapsgen.corpus import CorpusWriteError, ExclusionSet, NoInputFiles, \
    build_corpus, embed_corpus, load_corpus, load_exclusions, save_corpus
from tlapsgen.exception import BackendError, ConfigurationError, \
    OutputWriteError, TLAPSGenError, VerifierError
from tlapsgen.orchestrator import Outcome, ProofSearch, write_proof_module
from tlapsgen.prompts import BaselineStyle, TemplateSet, \
    render_baseline_prompt
from tlapsgen.proof_ast import MissingModuleHeader, module_name_for, \
    parse_module, render_proof
from tlapsgen.retrieval import EmbedderUnavailable, EmptyCorpus, Retriever, \
    embedders
from tlapsgen.verifiers import verifiers
from tlapsgen.verifiers.base import ModuleRenderError, TierError

LOG = logging.getLogger('tlapsgen.cli')

__all__ = ['EXIT_OK', 'EXIT_FAILED', 'EXIT_USAGE', 'EXIT_EXHAUSTED',
           'EXIT_ENVIRONMENT', 'build_parser', 'main']

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_EXHAUSTED = 3
EXIT_ENVIRONMENT = 4

_LLM_SPEC_KEYS = {"http": "url", "replay": "transcript", "scripted": "script"}
_VERIFIER_SPEC_KEYS = {"tlaps": "executable", "mock": "table"}
_EMBEDDER_SPEC_KEYS = {"fallback": "dimension", "remote": "url"}
_LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _positive_int(value):
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            "'{0}' is not an integer".format(value))
    if number < 1:
        raise argparse.ArgumentTypeError(
            "'{0}' must be a positive integer".format(value))
    return number


def _spec_section(spec, registry, keys):
    if spec is None:
        return {}
    kind, rest = parse_backend_spec(spec, registry)
    section = {"kind": kind}
    if rest:
        section[keys[kind]] = rest
        if keys[kind] == "dimension":
            try:
                section[keys[kind]] = int(rest)
            except ValueError:
                raise ConfigurationError(
                    "embedding dimension '{0}' is not an integer".format(
                        rest))
    return section


def _overrides(args):
    """Configuration overrides of the parsed flags"""
    get = vars(args).get
    overrides = {
        "corpus_path": get("corpus"),
        "run": {"retrieval_k": get("k"),
                "n_candidates": get("candidates"),
                "max_decomposition_attempts_per_obligation":
                    get("max_attempts"),
                "max_depth": get("max_depth")},
        "llm": _spec_section(get("llm"), backends, _LLM_SPEC_KEYS),
        "verifier": _spec_section(get("verifier"), verifiers,
                                  _VERIFIER_SPEC_KEYS),
        "embedder": _spec_section(get("embedder"), embedders,
                                  _EMBEDDER_SPEC_KEYS),
    }
    if get("keep_artifacts"):
        overrides["verifier"]["keep_artifacts"] = True
    return overrides


def _configure_logging(verbose, log_level):
    if verbose:
        level = logging.DEBUG if verbose > 1 else logging.INFO
    else:
        level = getattr(logging, log_level, logging.WARNING)
    logging.basicConfig(level=level, format=_LOG_FORMAT, stream=sys.stderr)
    logging.getLogger('tlapsgen').setLevel(level)


def _goal(args):
    if args.from_module:
        return obligation_from_module(args.obligation, args.theorem)
    return load_obligation(args.obligation)


def _records(config):
    if config.corpus_path is None:
        return []
    return load_corpus(config.corpus_path)


def _source(record):
    source = record.statement.source
    if source.theorem:
        return "{0}:{1}".format(source.path, source.theorem)
    return source.path or "-"


def _one_line(text):
    return " ".join(text.split())


def cmd_build_corpus(args, config):
    """Build a corpus from ``.tla`` trees and save it"""
    exclusions = load_exclusions(args.exclusions) if args.exclusions \
        else ExclusionSet()
    try:
        records = build_corpus(args.roots, exclusions)
    except NoInputFiles as err:
        sys.stderr.write("tlapsgen: {0}\n".format(err))
        return EXIT_FAILED
    if args.embed:
        records = embed_corpus(records, make_embedder(config.embedder))
    try:
        save_corpus(records, args.out)
    except CorpusWriteError as err:
        sys.stderr.write("tlapsgen: {0}\n".format(err))
        return EXIT_USAGE
    print("{0} records written to {1}".format(len(records), args.out))
    return EXIT_OK


def cmd_embed_corpus(args, config):
    """Embed the records of a saved corpus"""
    if config.corpus_path is None:
        raise ConfigurationError("no corpus given (--corpus or corpus_path)")
    records = embed_corpus(load_corpus(config.corpus_path),
                           make_embedder(config.embedder))
    out = args.out or config.corpus_path
    try:
        save_corpus(records, out)
    except CorpusWriteError as err:
        sys.stderr.write("tlapsgen: {0}\n".format(err))
        return EXIT_USAGE
    print("{0} records embedded into {1}".format(len(records), out))
    return EXIT_OK


def cmd_retrieve(args, config):
    """Print the reference set of a query as (score, source, text) rows"""
    records = _records(config)
    if not records:
        raise EmptyCorpus("the corpus is empty")
    retriever = Retriever(records, make_embedder(config.embedder),
                          config.run.retrieval_k)
    for record, score in retriever.references(args.query).entries:
        print("{0:.6f}\t{1}\t{2}".format(score, _source(record),
                                          _one_line(record.statement.text)))
    return EXIT_OK


def cmd_prove(args, config):
    """Search a proof of an obligation and write it as a module"""
    goal = _goal(args)
    backend = make_backend(config.llm)
    if args.record:
        backend = RecordingBackend(backend)
    retriever = Retriever(_records(config), make_embedder(config.embedder),
                          config.run.retrieval_k)
    templates = TemplateSet(config.template_dir)
    out = args.out or module_name_for(goal.name, "Proof") + ".tla"
    run_log = args.run_log or os.path.splitext(out)[0] + ".runlog.jsonl"
    with make_verifier(config.verifier) as verifier:
        with backend:
            search = ProofSearch(backend, verifier, retriever, config.run,
                                 templates)
            try:
                result = search.prove(goal)
            finally:
                if args.record:
                    record_transcript(backend, args.record)
    result.log.dump(run_log)
    if result.outcome == Outcome.EXHAUSTED:
        print("{0}: exhausted after {1} events, run log {2}".format(
            goal.name, len(result.log), run_log))
        return EXIT_EXHAUSTED
    try:
        write_proof_module(goal, result, out)
    except (IOError, OSError) as err:
        sys.stderr.write("tlapsgen: cannot write '{0}': {1}\n".format(
            out, err))
        return EXIT_USAGE
    print("{0}: complete, depth {1}, proof {2}, run log {3}".format(
        goal.name, result.tree.depth(), out, run_log))
    return EXIT_OK


def _proof_body(path, goal):
    with io.open(path, encoding="utf-8") as proof_file:
        text = proof_file.read()
    try:
        module = parse_module(text)
    except MissingModuleHeader:
        return text.strip()
    theorems = [theorem for theorem in module.theorems
                if theorem.name in (goal.name, module_name_for(goal.name))]
    theorems = theorems or module.theorems
    if not theorems:
        raise ConfigurationError("no theorem in '{0}'".format(path))
    return render_proof(theorems[-1].proof)


def cmd_check(args, config):
    """Check a proof of an obligation and print a per-obligation table"""
    goal = _goal(args)
    try:
        body = _proof_body(args.proof, goal)
    except (IOError, OSError) as err:
        raise ConfigurationError("cannot read proof '{0}': {1}".format(
            args.proof, err))
    with make_verifier(config.verifier) as verifier:
        result = verifier.check_proof(goal, body)
    for report in result.per_obligation:
        label = report.location.label if report.location.label is not None \
            else "-"
        print("{0}\t{1}\t{2}".format(report.status.value, label,
                                     _one_line(report.message or "")))
    print("{0}: {1} ({2} ms)".format(goal.name, result.overall.value,
                                     result.duration_ms))
    return EXIT_OK if result.proved else EXIT_FAILED


def cmd_baseline(args, config):
    """Run a comparison baseline on an obligation"""
    goal = _goal(args)
    if args.style == AUTOMATION:
        if args.render_only:
            sys.stderr.write("tlapsgen: the automation baseline has no "
                             "prompt\n")
            return EXIT_USAGE
        with make_verifier(config.verifier) as verifier:
            attempts = run_automation_baseline(goal, verifier)
        return _baseline_report(args.style, attempts)
    style = BaselineStyle(args.style)
    templates = TemplateSet(config.template_dir)
    if args.render_only:
        print(render_baseline_prompt(style, theorem_statement(goal),
                                     templates).text)
        return EXIT_OK
    with make_verifier(config.verifier) as verifier:
        with make_backend(config.llm) as backend:
            attempts = run_baseline(
                style, goal, backend, verifier, args.attempts,
                config.run.candidate_temperature, config.run.max_tokens,
                templates)
    return _baseline_report(style.value, attempts)


def _baseline_report(name, attempts):
    proved = 0
    for index, attempt in enumerate(attempts):
        proved += attempt.result.proved
        print("{0}\t{1}\t{2}".format(index, attempt.result.overall.value,
                                     _one_line(attempt.result.message)))
    print("{0} baseline: {1}/{2} proved".format(name, proved, len(attempts)))
    return EXIT_OK if proved else EXIT_FAILED


def _obligation_arguments(parser):
    parser.add_argument("obligation", help="obligation file (YAML or JSON)")
    parser.add_argument("--from-module", action="store_true",
                        help="read the obligation from a .tla module")
    parser.add_argument("--theorem", help="theorem of --from-module "
                                          "(default: the last one)")


def build_parser():
    """Argument parser of every subcommand"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML configuration file")
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="log INFO, twice for DEBUG")
    parser = argparse.ArgumentParser(
        prog="tlapsgen", parents=[common],
        description="Generate TLAPS proofs by decomposition and retrieval.")
    parser.add_argument("--version", action="version",
                        version="%(prog)s " + __version__)
    commands = parser.add_subparsers(dest="command")
    commands.required = True

    build = commands.add_parser("build-corpus", parents=[common],
                                help="build a proof statement corpus")
    build.add_argument("roots", nargs="+", help=".tla files or directories")
    build.add_argument("--exclusions", help="exclusion rules file")
    build.add_argument("--out", required=True, help="corpus file")
    build.add_argument("--embed", action="store_true",
                       help="store embeddings of the configured embedder")
    build.add_argument("--embedder", help="fallback[:dimension] | remote:url")
    build.set_defaults(handler=cmd_build_corpus)

    embed = commands.add_parser("embed-corpus", parents=[common],
                                help="embed a saved corpus")
    embed.add_argument("--corpus", help="corpus file")
    embed.add_argument("--embedder", help="fallback[:dimension] | remote:url")
    embed.add_argument("--out", help="output file (default: in place)")
    embed.set_defaults(handler=cmd_embed_corpus)

    retrieve = commands.add_parser("retrieve", parents=[common],
                                   help="most similar corpus statements")
    retrieve.add_argument("query", help="query text")
    retrieve.add_argument("--corpus", help="corpus file")
    retrieve.add_argument("--k", type=_positive_int, help="number of rows")
    retrieve.add_argument("--embedder",
                          help="fallback[:dimension] | remote:url")
    retrieve.set_defaults(handler=cmd_retrieve)

    prove = commands.add_parser("prove", parents=[common],
                                help="search a proof of an obligation")
    _obligation_arguments(prove)
    prove.add_argument("--corpus", help="corpus file")
    prove.add_argument("--k", type=_positive_int, help="references per prompt")
    prove.add_argument("--candidates", type=_positive_int,
                       help="proof candidates per request")
    prove.add_argument("--max-attempts", type=_positive_int,
                       help="decomposition attempts per obligation")
    prove.add_argument("--max-depth", type=_positive_int,
                       help="maximum decomposition depth")
    prove.add_argument("--llm", help="http:url | replay:file | scripted:file")
    prove.add_argument("--verifier", help="tlaps[:executable] | mock[:table]")
    prove.add_argument("--embedder", help="fallback[:dimension] | remote:url")
    prove.add_argument("--keep-artifacts", action="store_true", default=None,
                       help="keep generated prover modules")
    prove.add_argument("--out", help="proof module file")
    prove.add_argument("--run-log", help="run log file")
    prove.add_argument("--record", help="write a replayable transcript")
    prove.set_defaults(handler=cmd_prove)

    check = commands.add_parser("check", parents=[common],
                                help="check a proof of an obligation")
    _obligation_arguments(check)
    check.add_argument("proof", help="proof module or proof text file")
    check.add_argument("--verifier", help="tlaps[:executable] | mock[:table]")
    check.add_argument("--keep-artifacts", action="store_true", default=None,
                       help="keep generated prover modules")
    check.set_defaults(handler=cmd_check)

    baseline = commands.add_parser("baseline", parents=[common],
                                   help="direct prompting baseline")
    _obligation_arguments(baseline)
    baseline.add_argument("--style", required=True,
                          choices=[style.value for style in BaselineStyle] +
                          [AUTOMATION])
    baseline.add_argument("--attempts", type=_positive_int, default=10,
                          help="sampled answers (default: 10)")
    baseline.add_argument("--render-only", action="store_true",
                          help="print the prompt and exit")
    baseline.add_argument("--llm",
                          help="http:url | replay:file | scripted:file")
    baseline.add_argument("--verifier",
                          help="tlaps[:executable] | mock[:table]")
    baseline.set_defaults(handler=cmd_baseline)
    return parser


def main(argv=None):
    """
    Run one command.

        :param argv: arguments without the program name (default: sys.argv)
        :type argv: list
        :returns: exit code
        :rtype: int
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return err.code
    try:
        config = load_config(args.config, overrides=_overrides(args))
        _configure_logging(args.verbose, config.log_level)
        return args.handler(args, config)
    except OutputWriteError as err:
        sys.stderr.write("tlapsgen: {0}\n".format(err))
        return EXIT_USAGE
    except (ModuleRenderError, TierError) as err:
        sys.stderr.write("tlapsgen: {0}\n".format(err))
        return EXIT_FAILED
    except (ConfigurationError, BackendError, EmbedderUnavailable,
            VerifierError) as err:
        LOG.debug("environment error", exc_info=True)
        sys.stderr.write("tlapsgen: {0}\n".format(err))
        return EXIT_ENVIRONMENT
    except TLAPSGenError as err:
        LOG.debug("command failed", exc_info=True)
        sys.stderr.write("tlapsgen: {0}\n".format(err))
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
