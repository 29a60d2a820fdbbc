"""Command-line interface.

Subcommands: generate, field-viz, fit-cost, analyze-log, ttest, serve.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analytics
from .costs import fit_coefficients
from .engine import EngineConfig, narrate_plan
from .grouping import candidate_set
from .predicates import Predicate, sample_field
from .scene import load_plan, load_scene
from .service import create_app, load_coefficients


def _read_json(path: str):
    return json.loads(Path(path).read_text())


def _report_rows(reports):
    rows = []
    for report in reports:
        if report.error is not None or report.result is None:
            rows.append({"step": report.index, "error": report.error or "generation failed"})
            continue
        for alt in report.result.alternatives:
            rows.append({
                "step": report.index,
                "surface": alt.surface,
                "depth": alt.depth,
                "props": alt.props,
                "cost": round(alt.cost, 4),
                "best": alt.surface == report.result.best.surface,
            })
    return rows


def _print_table(rows, out=None):
    out = out if out is not None else sys.stdout
    header = ("step", "best", "depth", "#prop", "cost", "directive")
    widths = [4, 4, 5, 5, 7, 0]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip(), file=out)
    for row in rows:
        if "error" in row:
            print(f"{row['step']:<4d}  error: {row['error']}", file=out)
            continue
        print(
            f"{row['step']:<4d}  {'*' if row['best'] else ' ':<4}"
            f"{row['depth']:<5d}  {row['props']:<5d}  {row['cost']:<7.4f}  {row['surface']}",
            file=out,
        )


def cmd_generate(args) -> int:
    scene = load_scene(_read_json(args.scene))
    plan = load_plan(_read_json(args.plan))
    config = EngineConfig(table=load_coefficients(), d_max=args.d_max)
    reports = narrate_plan(scene, plan, config, generator=args.generator)
    rows = _report_rows(reports)
    if args.format == "json":
        print(json.dumps(rows, indent=2))
    elif args.format == "tsv":
        for row in rows:
            if "error" in row:
                print(f"{row['step']}\terror\t{row['error']}")
            else:
                print(
                    f"{row['step']}\t{'*' if row['best'] else ''}\t{row['depth']}"
                    f"\t{row['props']}\t{row['cost']:.4f}\t{row['surface']}"
                )
    else:
        _print_table(rows)
    return 2 if any("error" in row for row in rows) else 0


def cmd_field_viz(args) -> int:
    scene = load_scene(_read_json(args.scene))
    kind = Predicate(args.kind)
    cs = candidate_set(scene)
    ground = cs.find(args.ground)
    if ground is None:
        print(f"unknown ground entity: {args.ground}", file=sys.stderr)
        return 1
    sample = sample_field(kind, ground, scene, args.resolution)
    # Rows run back (large z) to front so the text matches the viewer's frame.
    for row in sample.values:
        print(" ".join(f"{v:4.2f}" for v in row))
    if args.pgm:
        lines = [f"P2 {len(sample.xs)} {len(sample.zs)} 255"]
        for row in sample.values:
            lines.append(" ".join(str(round(v * 255)) for v in row))
        Path(args.pgm).write_text("\n".join(lines) + "\n")
    if args.png:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(5, 5))
        extent = (sample.xs[0], sample.xs[-1], sample.zs[-1], sample.zs[0])
        im = ax.imshow(sample.values, cmap="viridis", vmin=0.0, vmax=1.0, extent=extent)
        ax.set_xlabel("x")
        ax.set_ylabel("z (back at top)")
        ax.set_title(f"{kind.value}({args.ground})")
        fig.colorbar(im, ax=ax, label="probability")
        fig.savefig(args.png, dpi=120, bbox_inches="tight")
        plt.close(fig)
    return 0


def cmd_fit_cost(args) -> int:
    entries = analytics.load_log(Path(args.log).read_text())
    samples = analytics.normalize_times(entries)
    table = fit_coefficients(samples)
    text = table.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def cmd_analyze_log(args) -> int:
    entries = analytics.load_log(Path(args.log).read_text())
    aggregates = analytics.analyze_log(entries)
    print(analytics.format_depth_report(aggregates))
    if args.png:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        depths = [a.depth for a in aggregates]
        fig, axes = plt.subplots(1, 2, figsize=(9, 4))
        axes[0].bar(depths, [a.time_mean for a in aggregates],
                    yerr=[a.time_std for a in aggregates], color="#4878a8")
        axes[0].set_xlabel("directive depth")
        axes[0].set_ylabel("adjusted response time (s)")
        axes[1].bar(depths, [a.accuracy_mean for a in aggregates],
                    yerr=[a.accuracy_std for a in aggregates], color="#72a86a")
        axes[1].set_xlabel("directive depth")
        axes[1].set_ylabel("accuracy")
        axes[1].set_ylim(0, 1.05)
        fig.tight_layout()
        fig.savefig(args.png, dpi=120)
        plt.close(fig)
    return 0


def cmd_ttest(args) -> int:
    a = [float(v) for v in args.a.split(",")]
    b = [float(v) for v in args.b.split(",")]
    t, df, p = analytics.welch_t_test(a, b)
    print(f"t = {t:.4f}")
    print(f"df = {df:.4f}")
    print(f"p = {p:.6g}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    log_dir = Path(args.log_dir) if args.log_dir else None
    app = create_app(log_dir=log_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockspeak")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="narrate a plan as English directives")
    p.add_argument("scene", help="scene JSON file")
    p.add_argument("plan", help="plan JSON file")
    p.add_argument("--format", choices=("table", "json", "tsv"), default="table")
    p.add_argument("--generator", choices=("egt", "naive"), default="egt")
    p.add_argument("--d-max", type=int, default=3)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("field-viz", help="sample a predicate field over the table")
    p.add_argument("kind", help="predicate kind, e.g. behind or at_corner")
    p.add_argument("ground", help="ground entity id (block id, group id, or 'table')")
    p.add_argument("--scene", required=True, help="scene JSON file")
    p.add_argument("--resolution", type=int, default=20)
    p.add_argument("--pgm", help="write an 8-bit PGM image here")
    p.add_argument("--png", help="write a rendered PNG here")
    p.set_defaults(func=cmd_field_viz)

    p = sub.add_parser("fit-cost", help="fit cost coefficients to a session log")
    p.add_argument("log", help="session log file (one JSON entry per line)")
    p.add_argument("--out", help="write the coefficient file here instead of stdout")
    p.set_defaults(func=cmd_fit_cost)

    p = sub.add_parser("analyze-log", help="per-depth response-time/accuracy report")
    p.add_argument("log", help="session log file")
    p.add_argument("--png", help="write a summary figure here")
    p.set_defaults(func=cmd_analyze_log)

    p = sub.add_parser("ttest", help="Welch's t-test on two comma-separated samples")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_ttest)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--log-dir", help="directory for per-session log files")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
