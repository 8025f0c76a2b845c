"""Command-line client of the tracking service.

Every subcommand talks HTTP to the service application — in-process by
default (no daemon needed), or against a remote ``--server URL``.  The
service does the computing and returns data; this client owns every file it
writes, all under ``--out``.

Determinism contract: rerunning a subcommand with identical inputs produces
byte-identical output files.  Wall-clock numbers therefore never enter the
standard outputs; ``--timing`` writes them to a separate ``timing.json``.

Exit codes: 0 success; 1 oracle/verification failure; 2 input error;
3 runtime tracking failure.
"""

from __future__ import annotations

import base64
import json
import os
import sys
from pathlib import Path

import click

from .evaluation import PRECISION_THRESHOLDS, SUCCESS_THRESHOLDS, curve_csv
from .features import ENV_VAR
from .tracking import METHODS

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_INPUT = 2
EXIT_TRACKING = 3


def _make_client(server: str | None):
    import httpx

    if server:
        try:
            return httpx.Client(base_url=server, timeout=600.0)
        except Exception as exc:
            raise click.ClickException(f"cannot reach server {server}: {exc}")
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient

    from .service import create_app

    return TestClient(create_app(), base_url="http://scaletrack.local")


def _post(client, path: str, payload: dict):
    """POST and translate HTTP errors into exit codes per the contract."""
    import httpx

    try:
        response = client.post(path, json=payload)
    except httpx.HTTPError as exc:
        click.echo(f"error: service unreachable: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    if response.status_code >= 500:
        click.echo(f"error: tracking failed: {_error_detail(response)}", err=True)
        sys.exit(EXIT_TRACKING)
    if response.status_code >= 400:
        click.echo(f"error: {_error_detail(response)}", err=True)
        sys.exit(EXIT_INPUT)
    return response.json()


def _error_detail(response) -> str:
    try:
        detail = response.json().get("detail", response.text)
    except ValueError:
        return response.text
    if isinstance(detail, dict):
        return f"{detail.get('error', 'error')}: {detail.get('detail', '')}"
    return str(detail)


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        click.echo(f"error: cannot read config {path}: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    except json.JSONDecodeError as exc:
        click.echo(f"error: config {path} is not valid JSON: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    if not isinstance(data, dict):
        click.echo(f"error: config {path} must hold a JSON object", err=True)
        sys.exit(EXIT_INPUT)
    return data


def _parse_init(text: str | None):
    if text is None:
        return None
    parts = text.split(",")
    if len(parts) != 4:
        click.echo(f'error: --init must be "x,y,w,h", got {text!r}', err=True)
        sys.exit(EXIT_INPUT)
    try:
        values = [float(p) for p in parts]
    except ValueError:
        click.echo(f'error: --init must hold four numbers, got {text!r}', err=True)
        sys.exit(EXIT_INPUT)
    if values[2] <= 0 or values[3] <= 0:
        click.echo("error: --init width and height must be positive", err=True)
        sys.exit(EXIT_INPUT)
    return values


def _boxes_csv(boxes) -> str:
    lines = ["frame,x,y,w,h"]
    for index, (x, y, w, h) in enumerate(boxes):
        lines.append(f"{index},{x:.4f},{y:.4f},{w:.4f},{h:.4f}")
    return "\n".join(lines) + "\n"


def _write_json(path: Path, data: dict) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _out_dir(out: str) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="Base URL of a running service; defaults to in-process execution.")
@click.pass_context
def main(ctx, server):
    """Correlation-filter tracking: run sequences, benchmarks, synthetic data, and verification oracles."""
    ctx.obj = server


@main.command()
@click.argument("sequence", type=click.Path())
@click.option("--out", required=True, type=click.Path(), help="Output directory.")
@click.option("--config", "config_path", type=click.Path(), default=None, help="Tracker config JSON.")
@click.option("--method", type=click.Choice(METHODS), default=None, help="Scale-estimation method override.")
@click.option("--init", "init_text", default=None, metavar='"x,y,w,h"',
              help="Initial box; defaults to the sequence's first ground-truth box.")
@click.option("--timing", is_flag=True, help="Also write wall-clock numbers to timing.json.")
@click.option("--seed", type=int, default=0, show_default=True, help="Echoed into run.json (tracking is deterministic).")
@click.pass_obj
def track(server, sequence, out, config_path, method, init_text, timing, seed):
    """Track one sequence directory; write boxes.csv and run.json under --out."""
    payload = {
        "sequence": str(Path(sequence)),
        "config": _load_config(config_path),
        "method": method,
        "init": _parse_init(init_text),
        "provider": os.environ.get(ENV_VAR),
    }
    client = _make_client(server)
    result = _post(client, "/track", payload)

    out_path = _out_dir(out)
    (out_path / "boxes.csv").write_text(_boxes_csv(result["boxes"]), encoding="utf-8")
    run = {
        "sequence": result["sequence"],
        "frames": result["frames"],
        "seed": seed,
        "init": list(result["boxes"][0]),
        "config": result["config"],
        "low_confidence_frames": int(sum(result["low_confidence"])),
        "scale_factors": result["scale_factors"],
        "scores": result["scores"],
    }
    _write_json(out_path / "run.json", run)
    if timing:
        total_s = sum(result["frame_ms"]) / 1e3
        _write_json(out_path / "timing.json", {
            "fps": result["fps"],
            "frame_ms": result["frame_ms"],
            "total_s": total_s,
        })
    click.echo(f"tracked {result['frames']} frames of {result['sequence']} -> {out_path / 'boxes.csv'}")
    sys.exit(EXIT_OK)


@main.command()
@click.argument("dataset", type=click.Path())
@click.option("--out", required=True, type=click.Path(), help="Output directory.")
@click.option("--config", "config_path", type=click.Path(), default=None, help="Tracker config JSON.")
@click.option("--method", "methods", type=click.Choice(METHODS), multiple=True,
              help="Method(s) to benchmark; repeatable. Default: all three.")
@click.option("--workers", type=int, default=0, show_default=True,
              help="Parallel sequences per method; 0 = one per logical core.")
@click.option("--timing", is_flag=True, help="Also write wall-clock numbers to timing.json.")
@click.option("--seed", type=int, default=0, show_default=True, help="Echoed into the comparison header.")
@click.pass_obj
def bench(server, dataset, out, config_path, methods, workers, timing, seed):
    """Benchmark methods over a dataset of sequence directories."""
    import time

    chosen = list(methods) if methods else list(METHODS)
    payload = {
        "dataset": str(Path(dataset)),
        "methods": chosen,
        "config": _load_config(config_path),
        "workers": workers,
        "provider": os.environ.get(ENV_VAR),
    }
    client = _make_client(server)
    started = time.perf_counter()
    result = _post(client, "/bench", payload)
    elapsed = time.perf_counter() - started

    out_path = _out_dir(out)
    for entry in result["reports"]:
        method = entry["method"]
        report = dict(entry["report"])
        report["method"] = method
        report["failures"] = entry["failures"]
        _write_json(out_path / f"report_{method}.json", report)
        (out_path / f"precision_{method}.csv").write_text(
            curve_csv(PRECISION_THRESHOLDS, report["precision_curve"]), encoding="utf-8")
        (out_path / f"success_{method}.csv").write_text(
            curve_csv(SUCCESS_THRESHOLDS, report["success_curve"]), encoding="utf-8")

    lines = ["method,sequences,precision_at_20,success_at_0.5,auc"]
    for row in result["comparison"]:
        lines.append(
            f"{row['method']},{row['sequences']},{row['precision_at_20']:.10g},"
            f"{row['success_at_0.5']:.10g},{row['auc']:.10g}"
        )
    (out_path / "comparison.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    if timing:
        _write_json(out_path / "timing.json", {"wall_s": elapsed, "methods": chosen, "seed": seed})

    failed = {m["method"]: m["failures"] for m in result["reports"] if m["failures"]}
    if failed:
        click.echo(f"note: per-sequence failures: {json.dumps(failed, sort_keys=True)}", err=True)
    click.echo(f"benchmarked {len(chosen)} method(s) on {len(result['sequences'])} sequence(s) -> {out_path / 'comparison.csv'}")
    sys.exit(EXIT_OK)


@main.command()
@click.argument("kind", type=click.Choice(["static", "zoom", "drift", "zoom+drift"]))
@click.option("--out", required=True, type=click.Path(), help="Directory to write the sequence into.")
@click.option("--frame-size", default="160,200", show_default=True, metavar="H,W", help="Frame dims, pixels.")
@click.option("--object-size", default="40,40", show_default=True, metavar="H,W", help="Object dims, pixels.")
@click.option("--rate", type=float, default=1.02, show_default=True, help="Zoom rate per frame.")
@click.option("--drift", default="2,0", show_default=True, metavar="DX,DY", help="Drift, px/frame.")
@click.option("--length", type=int, default=30, show_default=True, help="Frame count.")
@click.option("--seed", type=int, default=0, show_default=True, help="Texture seed.")
@click.option("--name", default=None, help="Sequence name (directory name under --out).")
@click.pass_obj
def synth(server, kind, out, frame_size, object_size, rate, drift, length, seed, name):
    """Render a synthetic sequence with exact ground truth in the benchmark layout."""

    def pair(text, label, cast):
        parts = text.split(",")
        if len(parts) != 2:
            click.echo(f"error: --{label} must be two comma-separated values, got {text!r}", err=True)
            sys.exit(EXIT_INPUT)
        try:
            return [cast(p) for p in parts]
        except ValueError:
            click.echo(f"error: --{label} must hold numbers, got {text!r}", err=True)
            sys.exit(EXIT_INPUT)

    payload = {
        "kind": kind,
        "frame_size": pair(frame_size, "frame-size", int),
        "object_size": pair(object_size, "object-size", float),
        "rate": rate,
        "drift": pair(drift, "drift", float),
        "length": length,
        "seed": seed,
        "name": name,
    }
    client = _make_client(server)
    result = _post(client, "/synth", payload)

    root = _out_dir(out) / result["name"]
    img_dir = root / "img"
    img_dir.mkdir(parents=True, exist_ok=True)
    for index, blob in enumerate(result["frames_png_b64"]):
        (img_dir / f"{index + 1:04d}.png").write_bytes(base64.b64decode(blob))
    (root / "groundtruth_rect.txt").write_text(result["ground_truth"], encoding="utf-8")
    if result["attributes"]:
        (root / "attributes.txt").write_text("\n".join(result["attributes"]) + "\n", encoding="utf-8")
    click.echo(f"wrote {result['frames']} frames -> {root}")
    sys.exit(EXIT_OK)


@main.command()
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for the random oracle instances (never changes the verdict).")
@click.option("--force-fail", default=None, metavar="NAME",
              help="Mark the named oracle failed; exercises the failure-reporting path.")
@click.pass_obj
def oracle(server, seed, force_fail):
    """Run the brute-force verification suite; exit 0 iff every oracle passes."""
    client = _make_client(server)
    result = _post(client, "/oracle", {"seed": seed, "force_fail": force_fail})
    width = max(len(r["name"]) for r in result["results"])
    for row in result["results"]:
        status = "PASS" if row["passed"] else "FAIL"
        click.echo(f"{status}  {row['name'].ljust(width)}  {row['seconds'] * 1e3:7.1f} ms  {row['detail']}")
    passed = sum(r["passed"] for r in result["results"])
    click.echo(f"{passed}/{len(result['results'])} oracles passed")
    sys.exit(EXIT_OK if result["passed"] else EXIT_VERIFICATION)


if __name__ == "__main__":
    main()
