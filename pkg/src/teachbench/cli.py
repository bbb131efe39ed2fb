"""Command-line entry point.

Subcommands: ``diagnose`` (classify one prediction error), ``invalidate``
(minimal failing sub-training-set), ``teach`` (run the simulated-teacher
loop), ``figure1`` (export the regularization-inconsistency fixture and
its decision boundaries), ``serve`` (HTTP session service).

Machine-readable JSON goes to stdout (or ``--out``); human summaries go
to stderr. Exit codes are a stable contract: 0 success, 1 usage or
failed run, 2 no error found, 3 not realizable, 4 environment.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import diagnosis, invalidation, learners, protocol
from .domain import featurize, featurize_training_set
from .learners import LearnerSpec
from .scenarios import ScenarioError, gen_figure1, resolve_scenario

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_ERROR = 2
EXIT_NOT_REALIZABLE = 3
EXIT_ENVIRONMENT = 4

FIGURE1_LAMBDAS = (0.0, 0.5, 1.0)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="teachbench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diagnose", help="classify one prediction error")
    _add_scenario_and_learner(p)
    p.add_argument("--error-object", help="object id to diagnose (default: first error)")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("invalidate", help="find a minimal failing sub-training-set")
    _add_scenario_and_learner(p)
    p.add_argument("--mode", choices=["exact", "greedy"], default="exact")
    p.add_argument("--out")
    p.set_defaults(func=cmd_invalidate)

    p = sub.add_parser("teach", help="run the teaching loop with a simulated teacher")
    _add_scenario_and_learner(p)
    p.add_argument("--teacher", choices=["oracle"], default="oracle")
    p.add_argument("--max-rounds", type=int, default=None,
                   help="step budget (default 10x universe size)")
    p.add_argument("--out", help="write the JSON-lines event log here")
    p.set_defaults(func=cmd_teach)

    p = sub.add_parser("figure1", help="export the regularization fixture and boundaries")
    p.add_argument("--out", default="figure1_points.csv")
    p.add_argument("--boundary-dir", default=".")
    p.set_defaults(func=cmd_figure1)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.set_defaults(func=cmd_serve)
    return parser


def _add_scenario_and_learner(p: argparse.ArgumentParser) -> None:
    p.add_argument("scenario", help="builtin name (xor, figure1, separable) or file path")
    p.add_argument("--learner", required=True,
                   choices=["logreg-ml", "logreg-reg", "1nn", "knn"])
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="penalty strength (logreg-reg)")
    p.add_argument("--k", type=int, default=None, help="neighbor count (knn)")


def _spec_from_args(args) -> LearnerSpec:
    try:
        if args.learner == "logreg-ml":
            return LearnerSpec.logreg_ml()
        if args.learner == "logreg-reg":
            if args.lam is None:
                raise ValueError("logreg-reg requires --lambda")
            return LearnerSpec.logreg_reg(args.lam)
        if args.learner == "1nn":
            return LearnerSpec.one_nn()
        if args.k is None:
            raise ValueError("knn requires --k")
        return LearnerSpec.knn(args.k)
    except ValueError as exc:
        print(f"teachbench: error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE) from None


def _load_scenario(ref: str):
    try:
        return resolve_scenario(ref)
    except FileNotFoundError:
        print(f"teachbench: error: no such scenario {ref!r}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE) from None
    except ScenarioError as exc:
        print(f"teachbench: error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE) from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_diagnose(args) -> int:
    scenario = _load_scenario(args.scenario)
    spec = _spec_from_args(args)
    features = scenario.feature_set()
    training = scenario.initial_training
    oracle = scenario.oracle
    universe = scenario.universe

    if args.error_object is not None:
        if args.error_object not in universe:
            print(f"teachbench: error: unknown object {args.error_object!r}",
                  file=sys.stderr)
            return EXIT_USAGE
        target_ids = [args.error_object]
    else:
        data = featurize_training_set(features, training, universe)
        fitted = learners.fit(spec, data)
        in_training = [
            oid for oid in training.object_ids
            if learners.predict(fitted, featurize(features, universe[oid]))
            != oracle(oid)
        ]
        held_out = [
            oid for oid in universe
            if oid not in training
            and learners.predict(fitted, featurize(features, universe[oid]))
            != oracle(oid)
        ]
        target_ids = in_training[:1] or held_out[:1]

    verdict = None
    for oid in target_ids:
        verdict = diagnosis.classify_prediction_error(
            oid, training, features, spec, oracle, universe
        )
        if verdict is not None:
            break
    if verdict is None:
        print("no prediction error found", file=sys.stderr)
        return EXIT_NO_ERROR
    _emit(json.dumps(verdict.to_doc(), indent=2, sort_keys=True) + "\n", args.out)
    subtype = f"/{verdict.learner_subtype}" if verdict.learner_subtype else ""
    print(f"{verdict.object_id}: {verdict.category}{subtype}", file=sys.stderr)
    return EXIT_OK


def cmd_invalidate(args) -> int:
    scenario = _load_scenario(args.scenario)
    spec = _spec_from_args(args)
    features = scenario.feature_set()
    try:
        result = invalidation.find_invalidation_set(
            scenario.initial_training, features, spec, scenario.universe,
            mode=args.mode,
        )
    except invalidation.SubsetBudgetExceeded as exc:
        print(f"teachbench: {exc}", file=sys.stderr)
        return EXIT_ENVIRONMENT
    if result is None:
        print("no training error to invalidate", file=sys.stderr)
        return EXIT_NO_ERROR
    doc = result.to_doc()
    doc["verified"] = invalidation.verify_invalidation(
        result.subset, features, spec, scenario.universe
    )
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    print(
        f"invalidation set of {result.cardinality} example(s), bound {result.bound}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_teach(args) -> int:
    scenario = _load_scenario(args.scenario)
    spec = _spec_from_args(args)
    max_rounds = args.max_rounds
    if max_rounds is None:
        max_rounds = max(10 * len(scenario.universe), 10)
    try:
        session = protocol.run_with_oracle_teacher(scenario, spec, max_rounds)
    except protocol.ProtocolError as exc:
        print(f"teachbench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(protocol.events_to_jsonl(session), args.out)
    if session.done_with_zero_errors and _universe_error_count(session) == 0:
        print(
            f"done in {session.round} step(s); features {list(session.feature_ids)}; "
            "every object classified correctly",
            file=sys.stderr,
        )
        return EXIT_OK
    if session.outcome == protocol.OUTCOME_NOT_REALIZABLE:
        print("feature pool exhausted with errors remaining", file=sys.stderr)
        return EXIT_NOT_REALIZABLE
    print(
        f"stopped after {session.round} step(s) with errors remaining",
        file=sys.stderr,
    )
    return EXIT_USAGE


def _universe_error_count(session: protocol.TeachingSession) -> int:
    classify = learners.as_item_classifier(session.hypothesis, session.feature_set)
    return sum(
        1
        for oid, item in session.scenario.universe.items()
        if classify(item) != session.scenario.oracle(oid)
    )


def cmd_figure1(args) -> int:
    scenario = gen_figure1()
    features = scenario.feature_set()
    data = featurize_training_set(
        features, scenario.initial_training, scenario.universe
    )
    fits = []
    for lam in FIGURE1_LAMBDAS:
        spec = LearnerSpec.logreg_ml() if lam == 0.0 else LearnerSpec.logreg_reg(lam)
        hypothesis = learners.fit(spec, data)
        fits.append((lam, hypothesis))

    def lam_tag(lam: float) -> str:
        return f"{lam:g}"

    out_path = Path(args.out)
    with out_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["x1", "x2", "label"]
            + [f"pred_lambda_{lam_tag(lam)}" for lam, _ in fits]
        )
        for i in range(len(data)):
            writer.writerow(
                [data.X[i, 0], data.X[i, 1], int(data.y[i])]
                + [int(learners.predict(h, data.X[i])) for _, h in fits]
            )

    pad = 0.3
    bounds = (
        float(data.X[:, 0].min() - pad),
        float(data.X[:, 0].max() + pad),
        float(data.X[:, 1].min() - pad),
        float(data.X[:, 1].max() + pad),
    )
    boundary_dir = Path(args.boundary_dir)
    boundary_dir.mkdir(parents=True, exist_ok=True)
    report = []
    for lam, hypothesis in fits:
        polyline = learners.line_boundary_points(hypothesis, bounds) or []
        b_path = boundary_dir / f"boundary_{lam_tag(lam)}.csv"
        with b_path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x1", "x2"])
            writer.writerows(polyline)
        report.append(
            {
                "lambda": lam,
                "w": [float(x) for x in hypothesis.w],
                "b": float(hypothesis.b),
                "training_errors": learners.training_error_count(hypothesis, data),
                "boundary_file": str(b_path),
            }
        )
    sys.stdout.write(json.dumps({"hypotheses": report}, indent=2) + "\n")
    print(f"wrote {out_path} and {len(fits)} boundary files", file=sys.stderr)
    return EXIT_OK


def cmd_serve(args) -> int:
    import socket

    import uvicorn

    from .service import app

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((args.host, args.port))
    except OSError as exc:
        print(f"teachbench: error: cannot bind {args.host}:{args.port}: {exc}",
              file=sys.stderr)
        return EXIT_ENVIRONMENT
    sock.listen(128)
    host, port = sock.getsockname()[:2]
    print(f"teachbench service listening on http://{host}:{port}", flush=True)
    config = uvicorn.Config(app, log_level="warning")
    server = uvicorn.Server(config)
    server.run(sockets=[sock])
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
