"""Command-line entry point: ``scanorder <subcommand> [options]``.

Exit status is 0 on success, 1 on a usage error and 2 when input data
cannot be read or is invalid.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from .cover_merge import dafner_weights, sfc_from_weights
from .curves import CURVE_KINDS, scale_order, universal_order
from .grid import GridSize, InvalidSizeError
from .io.bench import benchmark, to_csv
from .io.curvefile import CurveFile, CurveFileError, read_curve, write_curve
from .io.datasets import DataError, DatasetSpec, find_idx, load_dataset
from .io.idx import IDXError
from .io.pgm import PGMError, write_pgm
from .io.render import render_overlay, render_strip
from .learner.training import TrainConfig
from .lzw import LZWError
from .objectives import Objective, UndefinedObjectiveError, autocorrelation, flatten, sequence_lzw_length
from .order import InvalidOrderError, SfcOrder

log = logging.getLogger("scanorder")

DATA_ERRORS = (
    DataError,
    IDXError,
    PGMError,
    CurveFileError,
    InvalidOrderError,
    InvalidSizeError,
    UndefinedObjectiveError,
    LZWError,
    OSError,
)
CURVE_CHOICES = CURVE_KINDS + ("dafner", "mean-dafner", "annealed", "generated")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n\n{self.format_usage()}")


def _lags(text: str) -> list[int]:
    """``"6"``, ``"4,6,10"`` or ``"1-20"``."""
    out: list[int] = []
    try:
        for part in text.split(","):
            lo, _, hi = part.partition("-")
            out.extend(range(int(lo), int(hi) + 1) if hi else [int(lo)])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad lag list {text!r}") from exc
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError("lags must be positive")
    return out


def _add_data(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("images")
    g.add_argument("--images", help="IDX image file or directory of .pgm files")
    g.add_argument("--labels", help="IDX label file (guessed from --images when omitted)")
    g.add_argument("--dataset", help="dataset name under the data directory (e.g. mnist)")
    g.add_argument("--split", default="test", choices=("test", "train"), help="split for --dataset")
    g.add_argument("--class", dest="class_", type=int, help="keep one label")
    g.add_argument("--pad", type=int, help="zero-pad images to this even side length")
    g.add_argument("--limit", type=int, help="use at most this many images")


def _add_objective(p: argparse.ArgumentParser) -> None:
    p.add_argument("--objective", choices=("ac", "lzw"), default="ac")
    p.add_argument("--lag", type=int, default=6)


def _guess_labels(images: Path) -> Path | None:
    name = images.name.replace("images-idx3", "labels-idx1")
    cand = images.with_name(name)
    return cand if name != images.name and cand.exists() else None


def _load(args, need: bool = True) -> np.ndarray | None:
    if args.images:
        src = Path(args.images)
        labels = Path(args.labels) if args.labels else (_guess_labels(src) if src.is_file() else None)
    elif args.dataset:
        src, labels = find_idx(args.dataset, args.split)
    elif need:
        raise UsageError("give --images PATH or --dataset NAME")
    else:
        return None
    spec = DatasetSpec(
        str(src),
        str(labels) if labels else None,
        class_filter=args.class_,
        pad_to=args.pad,
        limit=args.limit,
    )
    return load_dataset(spec).images


def _objective(args) -> Objective:
    return Objective.parse(args.objective, args.lag)


def cmd_curve(args) -> int:
    kind = args.kind
    meta = {"seed": str(args.seed)}
    if kind in CURVE_KINDS:
        if args.size is None:
            raise UsageError(f"--size is required for {kind}")
        order = universal_order(kind, args.size)
    elif kind == "generated":
        from .learner.checkpoint import load_checkpoint
        from .learner.training import set_weights

        if not args.checkpoint:
            raise UsageError("--checkpoint is required for generated curves")
        images = _load(args)
        gen, _, _ = load_checkpoint(args.checkpoint)
        order = sfc_from_weights(GridSize.of(images[0]), set_weights(gen, images))
        meta["source"] = str(args.checkpoint)
    else:
        images = _load(args)
        size = GridSize.of(images[0])
        if kind == "dafner":
            order = sfc_from_weights(size, dafner_weights(images[args.index]))
            meta["image_index"] = str(args.index)
        elif kind == "mean-dafner":
            from .learner.anneal import mean_dafner_weights

            order = sfc_from_weights(size, mean_dafner_weights(images))
        else:
            from .learner.anneal import AnnealSchedule, anneal

            obj = _objective(args)
            res = anneal(images, obj, AnnealSchedule(steps=args.steps), seed=args.seed)
            order = sfc_from_weights(size, res.weights)
            meta.update(objective=obj.name, lags=",".join(map(str, obj.lags)), energy=f"{res.energy:.6f}")
        meta["images"] = str(len(images))
    order = SfcOrder(order.size, order.pixels, kind=kind)
    write_curve(args.out, CurveFile(order, meta))
    log.info("wrote %s curve with %d pixels to %s", kind, order.size.pixels, args.out)
    return 0


def _curves(names) -> list:
    """Keep built-in order names; read everything else as a curve file named by its stem."""
    out = []
    for name in names:
        if name in CURVE_KINDS or name in ("dafner", "mean-dafner"):
            out.append(name)
        else:
            out.append((Path(name).stem, read_curve(name).order))
    return out


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_metrics(args) -> int:
    images = _load(args)
    size = GridSize.of(images[0])
    rows = ["order,lag,rho"]
    for item in args.curve:
        order = universal_order(item, size) if item in CURVE_KINDS else read_curve(item).order
        seqs = flatten(images, order)
        name = item if item in CURVE_KINDS else Path(item).stem
        for k in args.lags:
            rows.append(f"{name},{k},{float(np.mean(autocorrelation(seqs, k))):.6f}")
    _emit("\n".join(rows) + "\n", args.out)
    return 0


def cmd_compress(args) -> int:
    images = _load(args)
    order = read_curve(args.curve).order
    lengths = [sequence_lzw_length(s) for s in flatten(images, order)]
    lines = ["image,lzw_bytes", *(f"{i},{n}" for i, n in enumerate(lengths))]
    _emit("\n".join(lines) + "\n", args.out)
    print(f"mean LZW length: {np.mean(lengths):.2f} bytes over {len(lengths)} images", file=sys.stderr)
    return 0


def cmd_scale(args) -> int:
    curve = read_curve(args.curve)
    order = curve.order
    for _ in range(args.times):
        order = scale_order(order)
    meta = {**curve.meta, "scaled_from": f"{curve.order.size.height}x{curve.order.size.width}"}
    write_curve(args.out, CurveFile(SfcOrder(order.size, order.pixels, kind=curve.kind), meta))
    return 0


def cmd_train(args) -> int:
    from .learner.checkpoint import save_checkpoint
    from .learner.networks import NetConfig
    from .learner.training import set_weights, train

    images = _load(args)
    rng = np.random.default_rng(args.seed)
    perm = rng.permutation(len(images))
    n_held = int(round(args.heldout * len(images)))
    held, tr = images[perm[:n_held]], images[perm[n_held:]]
    cfg = TrainConfig(
        batch_size=args.batch_size,
        lr_generator=args.lr_generator,
        lr_evaluator=args.lr_evaluator,
        optimizer=args.optimizer,
        lr_schedule=args.lr_schedule,
        objective=_objective(args),
        iterations=args.iterations,
        seed=args.seed,
        eval_every=args.eval_every,
        net=NetConfig(width=args.width, res_blocks=args.res_blocks, gnn_blocks=args.gnn_blocks, dtype="float32"),
    )
    res = train(tr, cfg, heldout=held if n_held else None)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_checkpoint(out / "checkpoint.bin", res.generator, res.evaluator, extra={"seed": args.seed})
    with open(out / "history.csv", "w", newline="") as fh:
        cols = ["iteration", "evaluator_loss", "generator_loss", "heldout_objective", "heldout_normalized"]
        w = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        w.writerows({k: ("" if v is None else v) for k, v in row.items()} for row in res.history.rows())
    order = sfc_from_weights(GridSize.of(images[0]), set_weights(res.generator, tr))
    write_curve(
        out / "curve.txt",
        CurveFile(
            SfcOrder(order.size, order.pixels, kind="generated"),
            {"objective": cfg.objective.name, "seed": str(args.seed)},
        ),
    )
    log.info("trained %d iterations in %.1fs; outputs in %s", cfg.iterations, res.seconds, out)
    return 0


def cmd_bench(args) -> int:
    images = _load(args)
    orders = _curves(args.orders)
    rows = benchmark(images, orders, lags=args.lags, with_lzw=not args.no_lzw, threads=args.threads)
    _emit(to_csv(rows, args.lags), args.out)
    return 0


def cmd_render(args) -> int:
    images = _load(args)
    if not 0 <= args.index < len(images):
        raise UsageError(f"--index {args.index} out of range for {len(images)} images")
    image = images[args.index]
    order = read_curve(args.curve).order
    if args.strip:
        write_pgm(args.out, render_strip(image, order))
    else:
        Path(args.out).write_text(render_overlay(image, order, cell=args.cell))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="scanorder", description="Context-based scan orders for images.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    p = sub.add_parser("curve", help="write a curve file")
    p.add_argument("--kind", required=True, choices=CURVE_CHOICES)
    p.add_argument("--size", type=int, help="side length for universal curves")
    p.add_argument("--index", type=int, default=0, help="image used by --kind dafner")
    p.add_argument("--steps", type=int, default=20_000, help="annealing steps")
    p.add_argument("--checkpoint", help="trained checkpoint for --kind generated")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_objective(p)
    _add_data(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("metrics", help="lag sweep of mean autocorrelation as CSV")
    p.add_argument("--curve", nargs="+", required=True, help="curve files or universal kinds")
    p.add_argument("--lag", dest="lags", type=_lags, default=_lags("1-20"), help="e.g. 6 or 1-20 or 4,6,10")
    p.add_argument("--out")
    _add_data(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("compress", help="LZW bytes per image along a curve")
    p.add_argument("--curve", required=True)
    p.add_argument("--out")
    _add_data(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("scale", help="double the resolution of a curve")
    p.add_argument("--curve", required=True)
    p.add_argument("--times", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scale)

    p = sub.add_parser("train", help="train generator and evaluator; write checkpoint and history")
    p.add_argument("--iterations", type=int, default=2000)
    p.add_argument("--batch-size", type=int, default=TrainConfig.batch_size)
    p.add_argument("--lr-generator", type=float, default=TrainConfig.lr_generator)
    p.add_argument("--lr-evaluator", type=float, default=TrainConfig.lr_evaluator)
    p.add_argument("--optimizer", choices=["adam", "sgd"], default=TrainConfig.optimizer)
    p.add_argument("--lr-schedule", choices=["cosine", "constant"], default=TrainConfig.lr_schedule)
    p.add_argument("--width", type=int, default=32)
    p.add_argument("--res-blocks", type=int, default=8)
    p.add_argument("--gnn-blocks", type=int, default=6)
    p.add_argument("--heldout", type=float, default=0.2, help="fraction kept aside for evaluation")
    p.add_argument("--eval-every", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    _add_objective(p)
    _add_data(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("bench", help="benchmark table as CSV")
    p.add_argument(
        "--orders",
        nargs="+",
        default=["raster", "hilbert", "dafner", "mean-dafner"],
        help="universal kinds, dafner, mean-dafner or curve files",
    )
    p.add_argument("--lag", dest="lags", type=_lags, default=[6, 10])
    p.add_argument("--no-lzw", action="store_true")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out")
    _add_data(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("render", help="curve overlay (SVG) or flattened strip (PGM)")
    p.add_argument("--curve", required=True)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--strip", action="store_true")
    p.add_argument("--cell", type=int, default=12)
    p.add_argument("--out", required=True)
    _add_data(p)
    p.set_defaults(func=cmd_render)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_help())
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
        return args.func(args)
    except UsageError as exc:
        print(str(exc).rstrip(), file=sys.stderr)
        return 1
    except DATA_ERRORS as exc:
        print(f"scanorder: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
