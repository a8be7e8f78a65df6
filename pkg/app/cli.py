import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ValidationError

from app.core.config import settings
from app.core.exceptions import PatternsError, PreconditionError, VerificationError
from app.core.logging import setup_logging
from app.db.base import cache_session
from app.schemas.documents import (
    DOCUMENTS,
    ConstructDocument,
    DetectDocument,
    Document,
    ErrorDocument,
    FarnessDocument,
    LemmaDocument,
    RamseyDocument,
    SchemaDocument,
)
from app.schemas.farness import Interval
from app.schemas.graphs import BipartiteGraph, Graph, Ordering, Tournament, TwoColouring
from app.schemas.ramsey import RamseyKind
from app.services.codec_service import Instance, codec_service
from app.services.construct_service import construct_service
from app.services.detect_service import detect_service
from app.services.extremal_service import extremal_service
from app.services.farness_service import farness_service
from app.services.proofsim_service import proofsim_service
from app.services.ramsey_service import ramsey_service

logger = logging.getLogger("app.cli")

# (document, verified, produced object for --output)
Outcome = Tuple[Document, bool, Optional[Instance]]

KINDS = {"colouring": TwoColouring, "tournament": Tournament}


def _text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise PreconditionError(f"cannot read {path}: {exc.strerror}") from exc


def _read(path: str, expected: type) -> Instance:
    return codec_service.decode_as(_text(path), expected)


def _ordering(text: Optional[str], n: int) -> Ordering:
    """Space or comma separated vertex list; identity when absent."""
    if not text:
        return Ordering.identity(n)
    try:
        perm = tuple(int(x) for x in text.replace(",", " ").split())
        return Ordering(perm=perm)
    except ValueError as exc:
        raise PreconditionError(f"invalid ordering {text!r}: {exc}") from exc


def cmd_detect(args: argparse.Namespace) -> Outcome:
    obj = _read(args.input, KINDS[args.kind])
    result = detect_service.find_unavoidable(obj, args.t, args.budget)
    failures = detect_service.verify_witness(obj, result.witness) if result.witness else []
    produced = None
    if result.witness is not None:
        vertices = list(result.witness.vertices)
        produced = obj.induced(vertices)
    logger.info("detect: found=%s after %d nodes", result.found, result.nodes_explored)
    document = DetectDocument(
        kind=args.kind,
        t=args.t,
        n=obj.n,
        found=result.found,
        witness=result.witness,
        nodes_explored=result.nodes_explored,
        verified=not failures,
        failed_checks=failures,
    )
    return document, not failures, produced


def cmd_farness(args: argparse.Namespace) -> Outcome:
    obj = codec_service.decode(_text(args.input))
    if isinstance(obj, TwoColouring):
        report = farness_service.colour_farness(obj)
        logger.info("colour farness %s", report.delta_text)
        document = FarnessDocument(
            numerator=report.numerator,
            n=report.n,
            delta=report.delta_text,
            kind=report.kind.value,
            red_count=report.red_count,
            blue_count=report.blue_count,
        )
        return document, True, None
    if not isinstance(obj, Tournament):
        raise PreconditionError("farness needs a colouring or a tournament")
    if args.exact:
        report = farness_service.min_backward_edges_exact(obj, args.cap)
    elif args.heuristic:
        report = farness_service.min_backward_edges_heuristic(obj, args.seed, args.restarts, args.threads)
    else:
        report = farness_service.minimal_ordering(obj, args.seed, args.restarts, args.cap)
    ordering = report.certificate_ordering()
    local_min = farness_service.verify_local_min(obj, ordering)
    verified = local_min.ok
    logger.info("tournament farness %s (%s)", report.delta_text, report.kind.value)
    document = FarnessDocument(
        numerator=report.numerator,
        n=report.n,
        delta=report.delta_text,
        kind=report.kind.value,
        ordering=list(ordering.perm),
        local_min=local_min,
        verified=verified,
    )
    # relabel so that the certificate ordering becomes 0, 1, ..., n-1
    return document, verified, obj.relabelled(ordering.position)


def cmd_construct(args: argparse.Namespace) -> Outcome:
    name = args.construction
    produced: Optional[Instance]
    if name == "coltight":
        if args.h:
            h = _read(args.h, BipartiteGraph)
        else:
            if args.n is None:
                raise PreconditionError("coltight needs --n or --h")
            with cache_session(args.cache) as db:
                h, _ = construct_service.coltight_instance(args.n, args.t, args.seed, args.budget, db)
        report = construct_service.verify_coltight(h, args.t)
        produced = construct_service.coltight_colouring(h)
        parameters = {"t": args.t, "n": h.n, "seed": args.seed}
    elif name == "tourtight":
        h = _read(args.h, BipartiteGraph) if args.h else extremal_service.incidence_bipartite(args.q)
        report = construct_service.verify_tourtight(h, args.t)
        produced, _ = construct_service.tourtight_tournament(h, args.t)
        parameters = {"t": args.t, "q": None if args.h else args.q}
    elif name == "star":
        report = construct_service.verify_star(args.n, args.t)
        produced = construct_service.star_colouring(args.n)
        parameters = {"n": args.n, "t": args.t}
    elif name == "d2rec":
        report = construct_service.verify_d2(args.depth, args.cap)
        produced = construct_service.d2_recursive(args.depth)
        parameters = {"depth": args.depth}
    elif name == "polarity":
        report = construct_service.verify_polarity(args.q)
        produced = extremal_service.polarity_graph(args.q)
        parameters = {"q": args.q}
    else:
        with cache_session(args.cache) as db:
            record = extremal_service.zarankiewicz_extremal(args.n, args.a, args.b, args.budget, args.seed, db)
        report = construct_service.verify_zarankiewicz(record)
        produced = record.graph
        parameters = {"n": args.n, "a": args.a, "b": args.b}
    logger.info("construct %s: verified=%s %s", name, report.verified, report.failed_checks or "")
    document = ConstructDocument(construction=name, report=report, parameters=parameters)
    return document, report.verified, produced


def cmd_lemma(args: argparse.Namespace) -> Outcome:
    name = args.lemma
    produced: Optional[Instance] = None
    if name == "drc":
        graph = _read(args.input, Graph)
        result = proofsim_service.dependent_random_choice(
            graph, args.k, args.t, seed=args.seed, tries=args.tries, sample_size=args.sample_size
        )
        failures = proofsim_service.verify_dependent_choice(graph, result.vertices, args.k, args.t) if result.found else []
        document = LemmaDocument(lemma=name, result=result, verified=not failures, failed_checks=failures)
        return document, not failures, None
    tournament = _read(args.input, Tournament)
    if name == "long-step":
        if args.ordering:
            ordering = _ordering(args.ordering, tournament.n)
        else:
            ordering = farness_service.minimal_ordering(tournament, args.seed, args.restarts, args.cap).certificate_ordering()
        result = proofsim_service.long_lemma_step(tournament, ordering, args.alpha)
        failures = proofsim_service.verify_long_step(tournament, ordering, args.alpha, result)
        if result.interval is not None:
            produced = tournament.induced(result.interval.vertices(ordering))
    elif name == "long-iter":
        result = proofsim_service.long_lemma_iterate(
            tournament, args.c, args.r, seed=args.seed, restarts=args.restarts, cap=args.cap
        )
        failures = []
        produced = tournament.induced(result.final_vertices)
    else:
        ordering = _ordering(args.ordering, tournament.n)
        first = Interval(start=args.i[0], end=args.i[1])
        second = Interval(start=args.j[0], end=args.j[1])
        result = proofsim_service.density_increment(tournament, ordering, first, second, args.epsilon)
        failures = proofsim_service.verify_density_increment(tournament, ordering, first, second, args.epsilon, result)
    logger.info("lemma %s: %s", name, getattr(result, "branch", getattr(result, "outcome", None)))
    document = LemmaDocument(lemma=name, result=result, verified=not failures, failed_checks=failures)
    return document, not failures, produced


def cmd_ramsey(args: argparse.Namespace) -> Outcome:
    kind = RamseyKind(args.kind)
    if args.mode == "exact":
        with cache_session(args.cache) as db:
            table = ramsey_service.build_table(
                kind, args.t, args.n, threads=args.threads, session=db, witness_dir=args.witness_dir
            )
        verified = all(row.verified for row in table.rows)
        produced = codec_service.decode(table.rows[-1].witness) if table.rows else None
        return RamseyDocument(mode="exact", result=table, verified=verified), verified, produced
    start = None
    if args.start:
        start = _read(args.start, TwoColouring if kind is RamseyKind.COLOURING else Tournament)
    result = ramsey_service.mine(
        kind,
        args.t,
        args.n[0],
        target=args.target,
        seed=args.seed,
        budget=args.budget,
        start=start,
        near_miss=not args.no_near_miss,
        witness_dir=args.witness_dir,
    )
    produced = codec_service.decode(result.witness) if result.witness else None
    return RamseyDocument(mode="mine", result=result), True, produced


def cmd_schema(args: argparse.Namespace) -> Outcome:
    directory = Path(args.dir)
    directory.mkdir(parents=True, exist_ok=True)
    files: List[str] = []
    for name, model in sorted(DOCUMENTS.items()):
        schema = model.model_json_schema()
        schema["schema_version"] = settings.SCHEMA_VERSION
        path = directory / f"{name}.v{settings.SCHEMA_VERSION}.schema.json"
        path.write_text(json.dumps(schema, sort_keys=True, indent=2) + "\n")
        files.append(str(path))
    return SchemaDocument(directory=str(directory), files=files), True, None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="patterns", description="Unavoidable patterns toolkit")
    parser.add_argument("--log-level", default=None, help="stderr log level (default from LOG_LEVEL)")
    parser.add_argument("--threads", type=int, default=None, help="worker threads (default: cores)")
    parser.add_argument("--output", default=None, help="write the produced object in core format")
    parser.add_argument("--cache", action="store_true", help="serve/store exhaustive results in the database")
    commands = parser.add_subparsers(dest="command", required=True)

    detect = commands.add_parser("detect", help="find an unavoidable pattern")
    detect.add_argument("--input", required=True)
    detect.add_argument("--kind", choices=sorted(KINDS), required=True)
    detect.add_argument("--t", type=int, required=True)
    detect.add_argument("--budget", type=int, default=None)
    detect.set_defaults(handler=cmd_detect)

    farness = commands.add_parser("farness", help="farness numerator and delta")
    farness.add_argument("--input", required=True)
    mode = farness.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--heuristic", action="store_true")
    farness.add_argument("--seed", type=int, default=0)
    farness.add_argument("--restarts", type=int, default=None)
    farness.add_argument("--cap", type=int, default=None)
    farness.set_defaults(handler=cmd_farness)

    construct = commands.add_parser("construct", help="build and verify a construction")
    constructions = construct.add_subparsers(dest="construction", required=True)
    coltight = constructions.add_parser("coltight")
    coltight.add_argument("--t", type=int, required=True)
    coltight.add_argument("--n", type=int, default=None)
    coltight.add_argument("--h", default=None, help="bipartite graph file instead of the extremal search")
    coltight.add_argument("--budget", type=int, default=None)
    coltight.add_argument("--seed", type=int, default=0)
    tourtight = constructions.add_parser("tourtight")
    tourtight.add_argument("--t", type=int, required=True)
    tourtight.add_argument("--q", type=int, default=2, help="incidence graph of PG(2, q) as H")
    tourtight.add_argument("--h", default=None, help="bipartite graph file for H")
    star = constructions.add_parser("star")
    star.add_argument("--n", type=int, required=True)
    star.add_argument("--t", type=int, default=2)
    d2rec = constructions.add_parser("d2rec")
    d2rec.add_argument("--depth", type=int, required=True)
    d2rec.add_argument("--cap", type=int, default=None)
    polarity = constructions.add_parser("polarity")
    polarity.add_argument("--q", type=int, required=True)
    zarankiewicz = constructions.add_parser("zarankiewicz")
    zarankiewicz.add_argument("--n", type=int, required=True)
    zarankiewicz.add_argument("--a", type=int, required=True)
    zarankiewicz.add_argument("--b", type=int, required=True)
    zarankiewicz.add_argument("--budget", type=int, default=None)
    zarankiewicz.add_argument("--seed", type=int, default=0)
    construct.set_defaults(handler=cmd_construct)

    lemma = commands.add_parser("lemma", help="run a proof step and re-verify its certificate")
    lemmas = lemma.add_subparsers(dest="lemma", required=True)
    long_step = lemmas.add_parser("long-step")
    long_step.add_argument("--input", required=True)
    long_step.add_argument("--alpha", required=True, help="exact rational, e.g. 1/100")
    long_step.add_argument("--ordering", default=None, help="vertex list; default minimal ordering")
    long_step.add_argument("--seed", type=int, default=0)
    long_step.add_argument("--restarts", type=int, default=None)
    long_step.add_argument("--cap", type=int, default=None)
    long_iter = lemmas.add_parser("long-iter")
    long_iter.add_argument("--input", required=True)
    long_iter.add_argument("--c", required=True, help="exact rational constant C")
    long_iter.add_argument("--r", type=int, required=True)
    long_iter.add_argument("--seed", type=int, default=0)
    long_iter.add_argument("--restarts", type=int, default=None)
    long_iter.add_argument("--cap", type=int, default=None)
    density = lemmas.add_parser("density-inc")
    density.add_argument("--input", required=True)
    density.add_argument("--ordering", default=None, help="vertex list; default identity")
    density.add_argument("--i", type=int, nargs=2, required=True, metavar=("START", "END"))
    density.add_argument("--j", type=int, nargs=2, required=True, metavar=("START", "END"))
    density.add_argument("--epsilon", required=True, help="exact rational in (0, 1/6)")
    drc = lemmas.add_parser("drc")
    drc.add_argument("--input", required=True)
    drc.add_argument("--k", type=int, required=True)
    drc.add_argument("--t", type=int, required=True)
    drc.add_argument("--seed", type=int, default=0)
    drc.add_argument("--tries", type=int, default=100)
    drc.add_argument("--sample-size", type=int, default=None)
    lemma.set_defaults(handler=cmd_lemma)

    ramsey = commands.add_parser("ramsey", help="small-case Ramsey oracles")
    modes = ramsey.add_subparsers(dest="mode", required=True)
    for name in ("exact", "mine"):
        sub = modes.add_parser(name)
        sub.add_argument("--kind", choices=[k.value for k in RamseyKind], required=True)
        sub.add_argument("--t", type=int, required=True)
        sub.add_argument("--n", type=int, nargs="+", required=True)
        sub.add_argument(
            "--witness-dir", default=settings.WITNESS_DIR, help="write witness files here; none are written when unset"
        )
        if name == "mine":
            sub.add_argument("--target", type=int, default=None)
            sub.add_argument("--seed", type=int, default=0)
            sub.add_argument("--budget", type=int, default=1000)
            sub.add_argument("--start", default=None, help="pattern-free starting instance")
            sub.add_argument("--no-near-miss", action="store_true")
    ramsey.set_defaults(handler=cmd_ramsey)

    schema = commands.add_parser("schema", help="dump JSON schemas of every output document")
    schema.add_argument("--dir", default="docs/schemas")
    schema.set_defaults(handler=cmd_schema)
    return parser


def _emit(document: BaseModel) -> None:
    sys.stdout.write(json.dumps(document.model_dump(mode="json"), sort_keys=True, indent=2) + "\n")
    sys.stdout.flush()


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)
    if args.threads is not None:
        settings.THREADS = max(1, args.threads)
    handler: Callable[[argparse.Namespace], Outcome] = args.handler
    try:
        document, verified, produced = handler(args)
    except ValidationError as exc:
        error = PreconditionError(str(exc.errors()[0]["msg"]))
        logger.error("%s failed: %s", args.command, error.message)
        _emit(ErrorDocument(command=args.command, error=error.error, message=error.message))
        return error.exit_code
    except PatternsError as exc:
        logger.error("%s failed: %s", args.command, exc.message)
        _emit(ErrorDocument(command=args.command, error=exc.error, message=exc.message, details=exc.details()))
        return exc.exit_code
    _emit(document)
    if args.output:
        if produced is None:
            logger.warning("%s produced no object; --output ignored", args.command)
        else:
            codec_service.write(produced, args.output)
            logger.info("wrote %s", args.output)
    if not verified:
        logger.error("%s: verification failed", args.command)
        return VerificationError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
