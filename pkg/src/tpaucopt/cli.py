"""Command-line front end.

Subcommands: gen-data, eval, train, check-bound, dual-check,
inconsistency-demo.  Every run prints its fully resolved configuration
(defaults and seed included) before doing anything, so logs identify the
exact experiment.  Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import data, metrics, risk, scorer, trainer
from .weighting import WeightScheme, dual_check

__all__ = ["main", "run"]


def _print_config(args: argparse.Namespace) -> None:
    pairs = " ".join(
        f"{key.replace('_', '-')}={value}"
        for key, value in sorted(vars(args).items())
        if key != "func"
    )
    print(f"config: {pairs}")


def _scheme_from_args(args, gamma=None) -> WeightScheme:
    return WeightScheme(args.weighting, args.gamma if gamma is None else gamma)


def _cmd_gen_data(args) -> int:
    if args.kind == "gauss-scores":
        scores = data.gen_gaussian_scores(args.n_pos, args.n_neg, args.seed)
        data.save_scores_csv(scores, args.out)
        print(f"wrote {args.n_pos + args.n_neg} scores to {args.out}")
    else:
        ds = data.gen_gaussian_features(
            args.n_pos, args.n_neg, args.dim, args.sep, args.seed
        )
        data.save_csv(ds, args.out)
        print(f"wrote {len(ds.labels)} rows (d={args.dim}) to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    scores = data.load_scores_csv(args.scores)
    spec = metrics.TpaucSpec(args.alpha, args.beta)
    print(f"tpauc {metrics.empirical_tpauc(scores, spec)!r}")
    if args.opauc:
        print(f"opauc {metrics.empirical_opauc(scores, args.beta)!r}")
    return 0


def _cmd_dual_check(args) -> int:
    residual = dual_check(_scheme_from_args(args), args.grid)
    print(f"max residual {residual!r}")
    return 0


def _cmd_check_bound(args) -> int:
    scores = data.load_scores_csv(args.scores)
    spec = metrics.TpaucSpec(args.alpha, args.beta)
    report = risk.check_sufficient_condition(
        scores,
        _scheme_from_args(args),
        spec,
        p_grid=args.p_grid,
        xi_index_sets=args.xi_index_sets,
    )
    status = "indeterminate" if report.indeterminate else str(report.holds).lower()
    print(f"holds={status}")
    print(f"best_margin {report.best_margin!r}")
    print(f"direct_gap {report.direct_gap!r}")
    if report.excluded_pairs:
        print(f"excluded_pairs {report.excluded_pairs}")
    if args.fig_dir is not None:
        from . import report as figures

        out = Path(args.fig_dir)
        out.mkdir(parents=True, exist_ok=True)
        fig_path = out / "bound_margin.png"
        figures.plot_bound_margin(report, fig_path)
        print(f"figure {fig_path}")
    return 0


def _cmd_inconsistency_demo(args) -> int:
    witness = metrics.find_inconsistency(
        args.seed, args.trials, n_pos=args.n_pos, n_neg=args.n_neg
    )
    if witness is None:
        print("no witness found")
        return 0
    a, b = witness
    spec = metrics.TpaucSpec(0.4, 0.6)
    print(
        f"opauc_a {metrics.empirical_opauc(a, 0.6)!r} "
        f"opauc_b {metrics.empirical_opauc(b, 0.6)!r}"
    )
    print(
        f"tpauc_a {metrics.empirical_tpauc(a, spec)!r} "
        f"tpauc_b {metrics.empirical_tpauc(b, spec)!r}"
    )
    print("witness found: opauc orders a < b, tpauc orders a > b")
    return 0


def _cmd_train(args) -> int:
    ds_train = data.load_csv(args.data)
    ds_val = data.load_csv(args.val)
    scheme = WeightScheme(args.weighting, args.gamma)
    scheme_neg = (
        None if args.gamma_neg is None else WeightScheme(args.weighting, args.gamma_neg)
    )
    cfg = trainer.TrainConfig(
        mode=args.mode,
        scheme=scheme,
        scheme_neg=scheme_neg,
        spec=metrics.TpaucSpec(args.alpha, args.beta),
        warmup_epochs=args.warmup_epochs,
        epochs=args.epochs,
        batch=data.BatchSpec(args.batch_size, args.pos_per_batch, args.seed),
        lr_theta=args.lr,
        lr_a=args.lr_a,
        lr_b=args.lr_b,
        lr_decay=args.lr_decay,
        weight_decay=args.weight_decay,
        seed=args.seed,
        theta_grad=args.theta_grad,
        early_stop_patience=args.patience,
        rerank_per_batch=args.rerank_per_batch,
    )
    model = scorer.init(args.model, ds_train.dim, args.hidden, args.seed)
    best, records = trainer.train(ds_train, ds_val, model, cfg)
    scorer.save(best, args.out_model)
    trainer.write_training_log(records, args.log)
    print(f"model {args.out_model}")
    print(f"log {args.log} ({len(records)} epochs)")
    best_val = max(r.tpauc_val for r in records)
    print(f"best_val_tpauc {best_val!r}")
    if args.fig_dir is not None:
        from . import report as figures

        out = Path(args.fig_dir)
        out.mkdir(parents=True, exist_ok=True)
        fig_path = out / "training_curves.png"
        figures.plot_training_curves(records, fig_path)
        print(f"figure {fig_path}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tpaucopt",
        description="Two-way partial AUC estimation and optimization toolkit.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("gen-data", help="generate synthetic scores or features")
    p.add_argument("--kind", choices=("gauss-scores", "gauss-2d"), required=True)
    p.add_argument("--n-pos", type=int, required=True)
    p.add_argument("--n-neg", type=int, required=True)
    p.add_argument("--dim", type=int, default=2, help="feature dimension (gauss-2d)")
    p.add_argument("--sep", type=float, default=1.5, help="class separation (gauss-2d)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("eval", help="evaluate metrics on a score CSV")
    p.add_argument("--scores", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--opauc", action="store_true", help="also report one-way value")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("train", help="train a scorer")
    p.add_argument("--data", required=True)
    p.add_argument("--val", required=True)
    p.add_argument("--model", choices=("linear", "mlp"), default="linear")
    p.add_argument("--hidden", type=int, default=16)
    p.add_argument("--mode", choices=trainer.MODES, default="pairwise-tpauc")
    p.add_argument("--weighting", choices=("poly", "exp"), default="poly")
    p.add_argument("--gamma", type=float, default=3.0)
    p.add_argument("--gamma-neg", type=float, default=None)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--warmup-epochs", type=int, default=5)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--pos-per-batch", type=int, default=None)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--lr-a", type=float, default=0.05)
    p.add_argument("--lr-b", type=float, default=0.05)
    p.add_argument("--lr-decay", type=float, default=0.99)
    p.add_argument("--weight-decay", type=float, default=1e-5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--theta-grad", choices=("saddle", "pairwise"), default="saddle")
    p.add_argument("--patience", type=int, default=20, help="0 disables early stop")
    p.add_argument("--rerank-per-batch", action="store_true")
    p.add_argument("--out-model", required=True)
    p.add_argument("--log", required=True)
    p.add_argument("--fig-dir", default=None, help="also render figures here")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("check-bound", help="upper-bound certificate on a score CSV")
    p.add_argument("--scores", required=True)
    p.add_argument("--weighting", choices=("poly", "exp"), required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--p-grid", type=int, default=99)
    p.add_argument("--xi-index-sets", choices=("proof", "swapped"), default="proof")
    p.add_argument("--fig-dir", default=None, help="also render figures here")
    p.set_defaults(func=_cmd_check_bound)

    p = sub.add_parser("dual-check", help="weighting/penalty inversion residual")
    p.add_argument("--weighting", choices=("poly", "exp"), required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--grid", type=int, default=1000)
    p.set_defaults(func=_cmd_dual_check)

    p = sub.add_parser(
        "inconsistency-demo",
        help="search for scorers ordered oppositely by the one-way and two-way metrics",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--n-pos", type=int, default=50)
    p.add_argument("--n-neg", type=int, default=50)
    p.set_defaults(func=_cmd_inconsistency_demo)

    return parser


def run(argv=None) -> int:
    """Parse argv and execute; returns the process exit code."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    _print_config(args)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
