"""Command-line interface: layout, eval, render, bench, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import BenchConfig, PipelineId, run_matrix, run_pipeline, write_matrix
from .fileio import load_layout, load_samples, save_layout
from .measures import report
from .model import GridSpec, LayoutError
from .render import RenderStyle, render_svg
from .service import SessionState, make_server


def _parse_grid(text: str) -> GridSpec:
    try:
        w, h = text.lower().split("x")
        return GridSpec(int(w), int(h))
    except ValueError:
        raise LayoutError(f"grid must look like 30x30, got {text!r}")


def _parse_lambda(text: str):
    if text == "adaptive":
        return "adaptive"
    try:
        return float(text)
    except ValueError:
        raise LayoutError(f"lambda must be 'adaptive' or a number, got {text!r}")


def _cmd_layout(args) -> int:
    samples = load_samples(args.input)
    spec = _parse_grid(args.grid)
    pipeline = PipelineId(args.pipeline)
    result = run_pipeline(samples, spec, pipeline, args.seed, _parse_lambda(args.lam))
    save_layout(result.layout, args.out)
    print(
        json.dumps(
            {
                "out": str(args.out),
                "pipeline": pipeline.value,
                "report": result.report.as_dict(),
                "lap_solves": result.lap_solves,
                "swap_passes": result.swap_passes,
                "wall_ms": round(result.wall_ms, 3),
            }
        )
    )
    return 0


def _cmd_eval(args) -> int:
    samples = load_samples(args.input)
    layout = load_layout(args.layout, samples)
    baseline = load_layout(args.baseline, samples)
    rep = report(layout, baseline)
    Path(args.out).write_text(json.dumps(rep.as_dict(), indent=1, sort_keys=True) + "\n")
    print(json.dumps({"out": args.out, "report": rep.as_dict()}))
    return 0


def _cmd_render(args) -> int:
    layout = load_layout(args.layout)
    style = RenderStyle(cell_px=args.cell_px, show_ids=args.ids)
    Path(args.out).write_text(render_svg(layout, style), encoding="utf-8")
    print(json.dumps({"out": args.out}))
    return 0


def _cmd_bench(args) -> int:
    cfg_data = json.loads(Path(args.config).read_text(encoding="utf-8"))
    cfg = BenchConfig.from_dict(cfg_data)
    result = run_matrix(cfg)
    csv_path, json_path = write_matrix(result, args.out_dir)
    bad = [row for row in result.rows if not row.valid]
    print(json.dumps({"csv": str(csv_path), "summary": str(json_path), "rows": len(result.rows)}))
    if bad:
        raise LayoutError(f"{len(bad)} runs produced invalid layouts")
    return 0


def _cmd_serve(args) -> int:
    samples = load_samples(args.input)
    spec = _parse_grid(args.grid)
    state = SessionState(
        samples, spec, args.seed, PipelineId(args.pipeline), _parse_lambda(args.lam)
    )
    server = make_server(state, host=args.host, port=args.port, static_dir=args.static)
    host, port = server.server_address[:2]
    print(f"listening on http://{host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gridweave", description="Cluster-aware grid layouts")
    sub = parser.add_subparsers(dest="command", required=True)
    pipelines = [p.value for p in PipelineId]

    p = sub.add_parser("layout", help="compute a layout for a sample file")
    p.add_argument("--input", required=True)
    p.add_argument("--grid", required=True, help="WxH, e.g. 30x30")
    p.add_argument("--pipeline", default="g-l-t", choices=pipelines)
    p.add_argument("--lambda", dest="lam", default="adaptive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_layout)

    p = sub.add_parser("eval", help="six-measure report for a stored layout")
    p.add_argument("--layout", required=True)
    p.add_argument("--baseline", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", default="report.json")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("render", help="render a stored layout to SVG")
    p.add_argument("--layout", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--cell-px", type=int, default=16)
    p.add_argument("--ids", action="store_true")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("bench", help="run the measurement matrix")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("serve", help="start the layout service")
    p.add_argument("--input", required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pipeline", default="g-l-t", choices=pipelines)
    p.add_argument("--lambda", dest="lam", default="adaptive")
    p.add_argument("--static", default=None, help="directory of explorer UI files")
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LayoutError as exc:
        print(json.dumps({"error": "layout_error", "detail": str(exc)}), file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(json.dumps({"error": "io_error", "detail": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
