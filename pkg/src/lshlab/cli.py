"""Command-line entry point.

Subcommands (all emit CSV into --out and print their resolved config, so a
rerun with the same flags reproduces outputs byte-for-byte):

    bounds   cosine bound envelope over a grid
    rho      gap curves per method for one regime
    stats    balance histogram, rank profiles, rank-list overlap
    bench    (K, L) sweep: recall vs fraction retrieved, min-fraction table
    synth    write a planted-neighbor corpus as svmlight files
    index    build an index, snapshot it, optionally dump query candidates

Exit codes: 0 success, 1 input error, 2 a requested recall level was not
attained (downgrade to a warning with --warn-unattained).
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from .datasets import (
    DEFAULT_PROFILE,
    DEFAULT_QUERY_NNZ,
    ProfileCell,
    check_registry,
    load_dataset,
    load_svmlight,
    synthesize,
    write_svmlight,
)
from .families import (
    BBIT_MINHASH,
    DEFAULT_SEED,
    FAMILY_KINDS,
    HashFamilyConfig,
)
from .gaps import bounds_curve, rho_curve
from .harness import ranklist_overlap, sweep, top_location_profile, z_histogram
from .index import IndexConfig, LshIndex, build
from .schemas import write_csv

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_UNATTAINED = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; keep 2 reserved for unattained
    # recall levels and report usage problems as input errors instead.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _print_config(args: argparse.Namespace) -> None:
    items = sorted(vars(args).items())
    line = " ".join(f"{k}={v}" for k, v in items if k != "func")
    print(f"config: {line}")


def _grid(start: float, stop: float, step: float) -> np.ndarray:
    if step <= 0:
        raise ValueError("grid step must be positive")
    n = int(round((stop - start) / step))
    return np.round(start + step * np.arange(n + 1), 12)


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _family_from_args(args, num_hashes: int) -> HashFamilyConfig:
    bits = args.bits if args.family == BBIT_MINHASH else None
    return HashFamilyConfig(kind=args.family, num_hashes=num_hashes,
                            master_seed=args.seed, bits=bits)


def cmd_bounds(args) -> int:
    out = _outdir(args)
    grid = _grid(args.start, args.stop, args.step)
    rows = bounds_curve(grid)
    path = out / "bounds.csv"
    write_csv(path, "bounds", rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def cmd_rho(args) -> int:
    out = _outdir(args)
    grid = _grid(args.start, args.stop, args.step)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    curves = []
    for method in methods:
        if method == "bbit":
            for b in _parse_int_list(args.bits_list):
                curves.append(rho_curve(
                    "bbit", args.regime, args.c, grid,
                    balance_cap=args.balance_cap, balance=args.balance, bits=b))
        else:
            curves.append(rho_curve(
                method, args.regime, args.c, grid,
                balance_cap=args.balance_cap, balance=args.balance))
    labels = tuple(c.label for c in curves)
    rows = [
        (grid[i], *(c.rho[i] for c in curves))
        for i in range(grid.size)
    ]
    path = out / "rho.csv"
    write_csv(path, "rho", rows, extra_columns=labels)
    print(f"wrote {path} ({len(rows)} rows, methods: {', '.join(labels)})")
    return EXIT_OK


def cmd_stats(args) -> int:
    out = _outdir(args)
    dataset = load_dataset(args.queries, args.train, binarize=True,
                           dim=args.dim, name=args.name or "dataset")
    if args.expect:
        check_registry(args.expect, dataset)
        print(f"registry check passed for {args.expect}")
    hist = z_histogram(dataset, bin_width=args.bin_width)
    write_csv(out / "z_histogram.csv", "z_histogram",
              zip(hist.bin_lo, hist.bin_hi, hist.count))
    depth = min(args.depth, len(dataset.train))
    profile = top_location_profile(dataset, depth)
    write_csv(out / "rank_profile.csv", "rank_profile",
              zip(profile.rank, profile.median_cosine,
                  profile.median_resemblance, profile.lower, profile.upper))
    overlap = ranklist_overlap(dataset, depth)
    write_csv(out / "ranklist_overlap.csv", "ranklist_overlap",
              zip(overlap.depth, overlap.mean_overlap))
    print(f"wrote {out / 'z_histogram.csv'} ({hist.count.size} bins, "
          f"{hist.total} pairs)")
    print(f"wrote {out / 'rank_profile.csv'} and "
          f"{out / 'ranklist_overlap.csv'} (depth {depth})")
    return EXIT_OK


def cmd_bench(args) -> int:
    out = _outdir(args)
    binarize = args.mode == "binary"
    dataset = load_dataset(args.queries, args.train, binarize=binarize,
                           dim=args.dim, name=args.name or "dataset")
    if args.expect:
        check_registry(args.expect, dataset)
        print(f"registry check passed for {args.expect}")
    k_max, l_max = (30, 200) if args.full_grid else (args.k_max, args.l_max)
    family = _family_from_args(args, num_hashes=k_max * l_max)
    report = sweep(
        dataset, family,
        k_grid=range(1, k_max + 1),
        l_grid=range(1, l_max + 1),
        top_k=args.k,
        recall_levels=_parse_float_list(args.recall_levels),
        mode=args.mode,
    )
    write_csv(out / "sweep_grid.csv", "sweep_grid",
              zip(report.k_values, report.l_values,
                  report.recalls, report.fractions))
    write_csv(out / "recall_levels.csv", "recall_levels",
              [(t.level, t.min_fraction, t.best_k, t.best_l)
               for t in report.targets])
    print(f"wrote {out / 'sweep_grid.csv'} ({report.k_values.size} cells)")
    for t in report.targets:
        if t.attained:
            print(f"recall {t.level:g}: min fraction {t.min_fraction!r} "
                  f"at K={t.best_k} L={t.best_l}")
        else:
            print(f"recall {t.level:g}: UNATTAINED on this grid")
    if any(not t.attained for t in report.targets):
        if args.warn_unattained:
            print("warning: some recall levels were not attained")
            return EXIT_OK
        return EXIT_UNATTAINED
    return EXIT_OK


def _parse_profile(text: str) -> tuple[ProfileCell, ...]:
    cells = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        ratio_s, cos_s = chunk.split(":")
        cells.append(ProfileCell(float(ratio_s), float(cos_s)))
    if not cells:
        raise ValueError("profile must contain at least one ratio:cosine cell")
    return tuple(cells)


def cmd_synth(args) -> int:
    out = _outdir(args)
    profile = _parse_profile(args.profile) if args.profile else DEFAULT_PROFILE
    nnz = tuple(_parse_int_list(args.query_nnz)) if args.query_nnz \
        else DEFAULT_QUERY_NNZ
    dataset = synthesize(args.num_query, args.num_train, args.dim,
                         profile=profile, query_nnz=nnz, seed=args.seed)
    write_svmlight(out / "query.txt", dataset.query)
    write_svmlight(out / "train.txt", dataset.train)
    print(f"wrote {out / 'query.txt'} ({len(dataset.query)} points) and "
          f"{out / 'train.txt'} ({len(dataset.train)} points), dim {dataset.dim}")
    return EXIT_OK


def cmd_index(args) -> int:
    out = _outdir(args)
    train_vecs, dim = load_svmlight(args.train, binarize=True, dim=args.dim)
    family = _family_from_args(args, num_hashes=args.index_k * args.num_tables)
    config = IndexConfig(k=args.index_k, num_tables=args.num_tables,
                         family=family)
    idx = build(train_vecs, config, store_vectors=False)
    snap = out / "index.bin"
    idx.save(snap)
    reloaded = LshIndex.load(snap)
    buckets = sum(len(t) for t in reloaded.tables)
    print(f"wrote {snap} ({idx.num_points} points, {config.num_tables} tables, "
          f"{buckets} buckets)")
    if args.queries:
        qvecs, _ = load_svmlight(args.queries, binarize=True, dim=dim)
        rows = []
        for qid, q in enumerate(qvecs):
            for cid in sorted(reloaded.query(q)):
                rows.append((qid, cid))
        write_csv(out / "candidates.csv", "candidates", rows)
        print(f"wrote {out / 'candidates.csv'} ({len(rows)} rows)")
    return EXIT_OK


def _add_family_flags(p) -> None:
    p.add_argument("--family", choices=FAMILY_KINDS, default="minhash")
    p.add_argument("--bits", type=int, default=1,
                   help="bit width for the b-bit family")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lshlab", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="cosine bound envelope CSV")
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--stop", type=float, default=1.0)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("rho", help="gap curves CSV")
    p.add_argument("--regime", choices=("worst", "restricted", "idealized"),
                   default="worst")
    p.add_argument("--methods", default="simhash,minhash,bbit",
                   help="comma list of simhash, minhash, bbit")
    p.add_argument("--bits-list", default="1",
                   help="comma list of bit widths for the bbit method")
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--balance-cap", type=float, default=None,
                   help="data balance cap (restricted regime)")
    p.add_argument("--balance", type=float, default=None,
                   help="fixed balance (idealized regime)")
    p.add_argument("--start", type=float, default=0.2)
    p.add_argument("--stop", type=float, default=0.9)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rho)

    p = sub.add_parser("stats", help="balance histogram, profiles, overlap")
    p.add_argument("--queries", required=True)
    p.add_argument("--train", required=True)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--name", default=None)
    p.add_argument("--expect", default=None,
                   help="registry name to validate partition sizes against")
    p.add_argument("--bin-width", type=float, default=0.01)
    p.add_argument("--depth", type=int, default=1000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="(K, L) retrieval sweep")
    p.add_argument("--queries", required=True)
    p.add_argument("--train", required=True)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--name", default=None)
    p.add_argument("--expect", default=None)
    p.add_argument("--mode", choices=("binary", "weighted"), default="binary",
                   help="weighted keeps file values: gold standard on the "
                        "weighted cosine, minhash on binarized vectors")
    _add_family_flags(p)
    p.add_argument("--k", type=int, default=10, help="gold standard depth")
    p.add_argument("--k-max", type=int, default=12)
    p.add_argument("--l-max", type=int, default=50)
    p.add_argument("--full-grid", action="store_true",
                   help="use the full K<=30, L<=200 grid")
    p.add_argument("--recall-levels", default="0.5,0.8,0.9,0.95")
    p.add_argument("--warn-unattained", action="store_true",
                   help="exit 0 even when a recall level is unattained")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("synth", help="write a planted-neighbor corpus")
    p.add_argument("--num-query", type=int, default=200)
    p.add_argument("--num-train", type=int, default=2000)
    p.add_argument("--dim", type=int, default=10000)
    p.add_argument("--profile", default=None,
                   help="comma list of ratio:cosine cells")
    p.add_argument("--query-nnz", default=None,
                   help="comma list of query cardinalities to cycle")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("index", help="build and snapshot an index")
    p.add_argument("--train", required=True)
    p.add_argument("--queries", default=None,
                   help="optional query file; dumps candidates.csv")
    p.add_argument("--dim", type=int, default=None)
    _add_family_flags(p)
    p.add_argument("--index-k", type=int, default=4,
                   help="hash functions concatenated per table")
    p.add_argument("--num-tables", type=int, default=8)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_index)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _print_config(args)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
