"""Command-line entry point: gen / eval / stats / vocab / paramcount.

Exit codes: 0 success, 1 usage error, 2 runtime failure. The default seed
comes from $MATSEQ_SEED when --seed is omitted.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import codec, datasets, ensembles, evaluation, params
from .ensembles import (
    DimSpec,
    EnsembleSpec,
    IidGaussian,
    IidLaplace,
    IidUniform,
    SpectralResample,
)
from .errors import MatseqError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_side(text: str) -> int | tuple[int, int]:
    if "-" in text:
        lo, hi = text.split("-", 1)
        return int(lo), int(hi)
    return int(text)


def parse_dims(text: str) -> DimSpec:
    """Dimension grammar: "5x5", "5x7", "5-15" (square range), "5-15x5-20"."""
    if "x" in text:
        rows, cols = text.split("x", 1)
        return DimSpec(_parse_side(rows), _parse_side(cols))
    return DimSpec(_parse_side(text), None)


def _parse_amplitude(text: str) -> float | tuple[float, float]:
    if ":" in text:
        lo, hi = text.split(":", 1)
        return float(lo), float(hi)
    return float(text)


def _default_seed() -> int:
    return int(os.environ.get("MATSEQ_SEED", "0"))


def _build_task(args) -> datasets.MatrixTask:
    dims = parse_dims(args.dims) if args.dims else None
    symmetric = args.symmetric
    if symmetric is None:
        symmetric = args.task in datasets.SYMMETRIC_TASKS
    if args.eig_dist:
        if dims is None:
            dims = ensembles.square_dims(5)
        spec = EnsembleSpec(SpectralResample(args.eig_dist, rel_std=args.eig_rel_std),
                            dims, symmetric=True)
    else:
        if dims is None:
            dims = ensembles.square_dims(4 if args.task in ("svd", "singular_values") else 5)
        amplitude = _parse_amplitude(args.amplitude)
        if args.ensemble == "uniform":
            kind = IidUniform(amplitude)
        elif args.ensemble == "gaussian":
            std = amplitude / np.sqrt(3.0) if not isinstance(amplitude, tuple) else tuple(
                a / np.sqrt(3.0) for a in amplitude)
            kind = IidGaussian(std)
        else:
            if isinstance(amplitude, tuple):
                raise ValueError("laplace ensemble takes a single amplitude")
            kind = IidLaplace(amplitude / np.sqrt(3.0))
        spec = EnsembleSpec(kind, dims, symmetric=symmetric)
    return datasets.MatrixTask(
        args.task, spec,
        scheme_in=codec.get_scheme(args.scheme_in),
        scheme_out=codec.get_scheme(args.scheme_out or args.scheme_in),
        noise_level=args.noise,
        task_prefix=args.prefix,
        max_tokens=args.max_tokens,
    )


def _cmd_gen(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.joint:
        tasks = datasets.joint_goal(
            args.joint,
            dims=parse_dims(args.dims) if args.dims else None,
            scheme_in=codec.get_scheme(args.scheme_in),
            scheme_out=codec.get_scheme(args.scheme_out or args.scheme_in),
        )
        manifest = datasets.make_joint_dataset(
            tasks, args.count, seed, args.out,
            include_values=not args.no_values, workers=args.workers)
    else:
        if not args.task:
            raise ValueError("either --task or --joint is required")
        task = _build_task(args)
        manifest = datasets.write_dataset(
            task, args.count, seed, args.out,
            include_values=not args.no_values, workers=args.workers)
    print(f"wrote {args.count} records to {args.out} "
          f"(seed {seed}, vocab_out {manifest['vocab_out_sha256'][:12]})")
    return 0


def _cmd_eval(args) -> int:
    tolerances = [float(t) / 100.0 for t in args.tol.split(",")]
    norms = [n.strip() for n in args.norm.split(",")]
    report = evaluation.score_file(
        args.dataset, args.pred, tolerances, norms,
        diagnostics=args.diagnostics,
        strict_identity_norm=args.strict_identity_norm)
    print(report.to_text())
    if args.csv:
        Path(args.csv).write_text(report.accuracy_csv())
        print(f"accuracy table written to {args.csv}")
    if args.diagnostics and report.diagnostics:
        keys = [k for k in report.diagnostics[0] if k not in ("index", "task")]
        print("diagnostics (median over well-formed records):")
        for key in keys:
            vals = np.array([row[key] for row in report.diagnostics])
            print(f"  {key}: median {np.median(vals):.6g}  max {vals.max():.6g}")
    return 0


def _cmd_stats(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    sizes = [int(n) for n in args.n.split(",")]
    laws = [w.strip() for w in args.laws.split(",")]
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    all_ok = True
    wigner = args.ens == "wigner"
    print(f"ensemble={args.ens} A={args.A} samples={args.samples}")
    header = f"{'law':<10} {'n':>3} {'empirical':>10} {'reference':>10}"
    print(header + ("   |diff|  status" if wigner else ""))
    for law in laws:
        for n in sizes:
            spec = _stats_spec(args.ens, law, args.A, n)
            hist = ensembles.eig_histogram(spec, args.samples, args.bins, seed)
            theory = ensembles.wigner_eig_std(args.A, n)
            row = f"{law:<10} {n:>3} {hist.std:>10.4f} {theory:>10.4f}"
            if wigner:
                diff = abs(hist.std - theory)
                ok = diff <= 0.01
                all_ok &= ok
                row += f" {diff:>8.4f}  {'ok' if ok else 'OFF'}"
            print(row)
            if out_dir:
                hist.to_csv(out_dir / f"hist_{args.ens}_{law}_n{n}.csv")
    if wigner:
        print(f"all within 0.01 of A*sqrt(n/3): {'yes' if all_ok else 'NO'}")
    return 0


def _stats_spec(ens: str, law: str, amplitude: float, n: int) -> EnsembleSpec:
    dims = ensembles.square_dims(n)
    if ens == "wigner":
        std = amplitude / np.sqrt(3.0)
        if law == "uniform":
            kind = IidUniform(amplitude)
        elif law == "gaussian":
            kind = IidGaussian(std)
        elif law == "laplace":
            kind = IidLaplace(std)
        else:
            raise ValueError(f"unknown coefficient law {law!r}")
        return EnsembleSpec(kind, dims, symmetric=True)
    if ens in ensembles.EIG_FAMILIES:
        return EnsembleSpec(SpectralResample(ens, ref_amplitude=amplitude), dims,
                            symmetric=True)
    raise ValueError(f"unknown ensemble {ens!r}")


def _cmd_vocab(args) -> int:
    scheme = codec.get_scheme(args.scheme)
    task_tokens = [t for t in args.task_tokens.split(",") if t] if args.task_tokens else []
    vocab = codec.build_vocabulary(scheme, args.max_dim, task_tokens)
    if args.out:
        vocab.save(args.out)
        print(f"{scheme.label()}: {len(vocab)} tokens -> {args.out} "
              f"(sha256 {vocab.sha256()[:12]})")
    else:
        sys.stdout.write(vocab.to_text())
    return 0


def _cmd_paramcount(args) -> int:
    shape = params.TransformerShape(
        args.enc_layers, args.dec_layers, args.enc_dim, args.dec_dim,
        args.vocab_in, args.vocab_out, args.max_len)
    counts = params.param_count(shape)
    print(f"input embedding : {counts.input_embedding:>14,}")
    print(f"output embedding: {counts.output_embedding:>14,}")
    print(f"encoder         : {counts.encoder:>14,}")
    print(f"decoder         : {counts.decoder:>14,}")
    print(f"total           : {counts.total:>14,}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="matseq", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a dataset file")
    gen.add_argument("--task", choices=datasets.TASK_NAMES)
    gen.add_argument("--joint", metavar="GOAL",
                     help="joint letters, e.g. TA or TADMEFI (overrides --task)")
    gen.add_argument("--scheme-in", default="P1000")
    gen.add_argument("--scheme-out", default=None)
    gen.add_argument("--dims", default=None, help='e.g. "5x5", "5-15", "5-15x5-20"')
    gen.add_argument("--count", type=int, required=True)
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--noise", type=float, default=0.0,
                     help="gaussian input noise, as a fraction of the coefficient std")
    gen.add_argument("--out", required=True)
    gen.add_argument("--ensemble", choices=("uniform", "gaussian", "laplace"),
                     default="uniform")
    gen.add_argument("--amplitude", default="10",
                     help='coefficient amplitude A, or a per-matrix range "LO:HI"')
    gen.add_argument("--eig-dist", choices=ensembles.EIG_FAMILIES, default=None,
                     help="draw symmetric matrices with this eigenvalue law instead")
    gen.add_argument("--eig-rel-std", type=float, default=1.0)
    gen.add_argument("--symmetric", action=argparse.BooleanOptionalAction, default=None)
    gen.add_argument("--prefix", default=None, help="task token prepended to both sides")
    gen.add_argument("--max-tokens", type=int, default=None)
    gen.add_argument("--no-values", action="store_true",
                     help="omit clean_input/target value lists from records")
    gen.add_argument("--workers", type=int, default=1)
    gen.set_defaults(func=_cmd_gen)

    ev = sub.add_parser("eval", help="score a predictions file against a dataset")
    ev.add_argument("--dataset", required=True)
    ev.add_argument("--pred", required=True)
    ev.add_argument("--tol", default="0.5,1,2,5", help="tolerances in percent")
    ev.add_argument("--norm", default="l1", help="comma list from l1,l2,linf")
    ev.add_argument("--diagnostics", action="store_true")
    ev.add_argument("--strict-identity-norm", action="store_true",
                    help="score inversion against absolute tau instead of tau * n")
    ev.add_argument("--csv", default=None)
    ev.set_defaults(func=_cmd_eval)

    st = sub.add_parser("stats", help="eigenvalue statistics of an ensemble")
    st.add_argument("--ens", default="wigner",
                    choices=("wigner", *ensembles.EIG_FAMILIES))
    st.add_argument("--A", type=float, default=10.0)
    st.add_argument("--n", default="5,10,15,20")
    st.add_argument("--laws", default="uniform",
                    help="coefficient laws for wigner: uniform,gaussian,laplace")
    st.add_argument("--samples", type=int, default=100000)
    st.add_argument("--bins", type=int, default=100)
    st.add_argument("--seed", type=int, default=None)
    st.add_argument("--out-dir", default=None, help="write histogram CSVs here")
    st.set_defaults(func=_cmd_stats)

    vo = sub.add_parser("vocab", help="export a vocabulary file (one token per line)")
    vo.add_argument("--scheme", required=True)
    vo.add_argument("--max-dim", type=int, default=0)
    vo.add_argument("--task-tokens", default=None)
    vo.add_argument("--out", default=None)
    vo.set_defaults(func=_cmd_vocab)

    pc = sub.add_parser("paramcount", help="transformer parameter-count calculator")
    pc.add_argument("--enc-layers", type=int, required=True)
    pc.add_argument("--dec-layers", type=int, required=True)
    pc.add_argument("--enc-dim", type=int, required=True)
    pc.add_argument("--dec-dim", type=int, required=True)
    pc.add_argument("--vocab-in", type=int, required=True)
    pc.add_argument("--vocab-out", type=int, required=True)
    pc.add_argument("--max-len", type=int, required=True)
    pc.set_defaults(func=_cmd_paramcount)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MatseqError, OverflowError, ValueError, OSError) as err:
        print(f"matseq: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
