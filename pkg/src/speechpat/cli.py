"""Command-line pipeline: ``synth``, ``extract``, ``evaluate``, ``report``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
import json
import logging
from pathlib import Path
import sys

import numpy as np

from .audio_io import load_wav, resample_check
from .errors import DataError, SpeechPatError
from .evaluation import MODEL_KINDS, TASKS, cross_validate, fit_model, pearson_matrix, ranked_importance
from .features import FEATURE_NAMES, SCHEMA_VERSION, ExtractionConfig, feature_vector
from .synth import CorpusSpec, synth_corpus
from .tables import join_dataset, read_features, read_manifest, write_features

log = logging.getLogger("speechpat")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _extract_one(args):
    rid, path, config = args
    try:
        signal = resample_check(load_wav(path))
        return rid, feature_vector(signal, config), None
    except FileNotFoundError:
        return rid, None, f"{rid}: file not found: {path}"
    except (SpeechPatError, ValueError) as exc:
        return rid, None, f"{rid}: {exc}"


def cmd_extract(manifest_path, out_path, config=ExtractionConfig(), skip_bad=False, jobs=1):
    """Write one feature row per manifest id, in manifest order."""
    rows = read_manifest(manifest_path)
    work = [(r.id, r.path, config) for r in rows]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_extract_one, work))
    else:
        results = [_extract_one(w) for w in work]
    ids, vectors = [], []
    for rid, vec, err in results:
        if err is not None:
            if not skip_bad:
                raise DataError(err)
            log.warning("skipping %s", err)
            continue
        ids.append(rid)
        vectors.append(vec)
    write_features(out_path, ids, np.array(vectors).reshape(len(ids), len(FEATURE_NAMES)))
    return ids


def _dump(doc, path):
    text = json.dumps(doc, indent=2, allow_nan=False) + "\n"
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_evaluate(features_path, manifest_path, task="classify", model="gbm", seed=0, out_path=None, k=5):
    dataset = join_dataset(features_path, manifest_path)
    report = cross_validate(dataset, task, model, None, seed, k)
    doc = {"schema_version": SCHEMA_VERSION, **report.to_dict()}
    _dump(doc, out_path)
    return doc


def cmd_report(features_path, what, out_path=None, manifest_path=None, task="regress", model="gbm",
               seed=0, top_k=10):
    if what == "correlate":
        ids, X, names = read_features(features_path)
        corr = pearson_matrix(X)
        doc = {
            "schema_version": SCHEMA_VERSION,
            "kind": "correlation",
            "features": names,
            "matrix": corr.matrix.tolist(),
            "constant_features": [n for n, c in zip(names, corr.constant) if c],
        }
    elif what == "importance":
        if manifest_path is None:
            raise UsageError("importance needs --manifest")
        if model == "gnb":
            raise UsageError("importance needs a tree model")
        dataset = join_dataset(features_path, manifest_path)
        target = dataset.labels.astype(float) if task == "classify" else dataset.scores
        fitted = fit_model(model, task, dataset.X, target, seed, dataset.feature_names)
        ranked = ranked_importance(fitted)
        doc = {
            "schema_version": SCHEMA_VERSION,
            "kind": "importance",
            "task": task,
            "model": model,
            "seed": seed,
            "all": [{"feature": f, "score": s} for f, s in ranked],
            "top": [{"feature": f, "score": s} for f, s in ranked[: min(top_k, len(ranked))]],
        }
    else:
        raise UsageError(f"unknown report {what!r}")
    _dump(doc, out_path)
    return doc


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--frame-ms", type=float, default=50.0)
    common.add_argument("--hop-ms", type=float, default=25.0)
    common.add_argument("--min-pause-s", type=float, default=0.3)
    common.add_argument("--silence-db", type=float, default=25.0)
    common.add_argument("--skip-bad", action="store_true", help="skip unreadable files instead of aborting")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="speechpat", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", parents=[common], help="write a synthetic labelled corpus")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--n-clips", type=int, default=60)
    s.add_argument("--balance", type=float, default=0.5)
    s.add_argument("--separation", type=float, default=1.0)
    s.add_argument("--sample-rate", type=int, default=16000)

    e = sub.add_parser("extract", parents=[common], help="manifest -> feature CSV")
    e.add_argument("--manifest", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--jobs", type=int, default=1)

    v = sub.add_parser("evaluate", parents=[common], help="k-fold cross-validation report")
    v.add_argument("--features", required=True)
    v.add_argument("--manifest", required=True)
    v.add_argument("--task", choices=TASKS, default="classify")
    v.add_argument("--model", choices=MODEL_KINDS, default="gbm")
    v.add_argument("--k", type=int, default=5)
    v.add_argument("--out", default="-")

    r = sub.add_parser("report", parents=[common], help="correlation or importance document")
    r.add_argument("what", choices=("correlate", "importance"))
    r.add_argument("--features", required=True)
    r.add_argument("--manifest")
    r.add_argument("--task", choices=TASKS, default="regress")
    r.add_argument("--model", choices=[m for m in MODEL_KINDS if m != "gnb"], default="gbm")
    r.add_argument("--top-k", type=int, default=10)
    r.add_argument("--out", default="-")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    config = ExtractionConfig(args.frame_ms, args.hop_ms, args.silence_db, args.min_pause_s)
    try:
        if args.command == "synth":
            manifest = synth_corpus(
                CorpusSpec(args.n_clips, args.balance, args.separation, args.seed, args.sample_rate), args.out
            )
            log.info("wrote %s", manifest)
        elif args.command == "extract":
            ids = cmd_extract(args.manifest, args.out, config, args.skip_bad, args.jobs)
            log.info("extracted %d recordings", len(ids))
        elif args.command == "evaluate":
            cmd_evaluate(args.features, args.manifest, args.task, args.model, args.seed, args.out, args.k)
        elif args.command == "report":
            cmd_report(args.features, args.what, args.out, args.manifest, args.task, args.model,
                       args.seed, args.top_k)
    except UsageError as exc:
        print(f"speechpat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FileNotFoundError) as exc:
        print(f"speechpat: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (SpeechPatError, ValueError) as exc:
        print(f"speechpat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
