"""Command-line client for the symmetry-test service.

Every subcommand issues one HTTP request against the service API.  By default
the service runs in-process (no server needed); pass --server to talk to a
remote instance started with ``symmtest serve``.

Output goes to stdout as JSON (the full result under a header echoing the
resolved configuration) or CSV (configuration echoed as '#' comment lines).
Errors are written to stderr and exit with a nonzero status.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

__all__ = ["main", "build_parser"]


def _round_floats(obj, digits: Optional[int]):
    if digits is None:
        return obj
    if isinstance(obj, float):
        return round(obj, digits)
    if isinstance(obj, list):
        return [_round_floats(v, digits) for v in obj]
    if isinstance(obj, dict):
        return {k: _round_floats(v, digits) for k, v in obj.items()}
    return obj


def _fmt(x, digits: Optional[int]) -> str:
    if isinstance(x, float) and digits is not None:
        return repr(round(x, digits))
    return repr(x) if isinstance(x, float) else str(x)


class CliError(Exception):
    pass


def _read_data_file(path: str) -> list[float]:
    """Newline-separated decimals; blank lines and '#' comments allowed."""
    values = []
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    values.append(float(line))
                except ValueError:
                    raise CliError(f"{path}: line {lineno}: could not parse {line!r} as a number")
    except OSError as exc:
        raise CliError(f"could not read {path}: {exc}")
    return values


def _make_client(server: Optional[str]):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        # starlette >= 1.3 warns about its httpx-backed TestClient; it remains
        # the supported way to drive an ASGI app from synchronous code here
        warnings.filterwarnings("ignore", module="starlette.testclient")
        warnings.filterwarnings("ignore", message=".*testclient.*")
        from starlette.testclient import TestClient

    from .service import app

    return TestClient(app)


def _post(client, path: str, payload: dict) -> dict:
    resp = client.post(path, json=payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        raise CliError(f"{path} failed ({resp.status_code}): {detail}")
    return resp.json()


def _emit_json(command: str, config: dict, result: dict, digits: Optional[int]):
    doc = {"command": command, "config": config, "result": _round_floats(result, digits)}
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _emit_csv(config: dict, header: str, rows, digits: Optional[int]):
    out = sys.stdout
    for key in sorted(config):
        out.write(f"# {key}={config[key]}\n")
    out.write(header + "\n")
    for row in rows:
        out.write(",".join(_fmt(v, digits) for v in row) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symmtest",
        description="Symmetry tests about zero: test data, compute limit-law "
        "eigenvalues and curves, efficiency indices, and power studies.",
    )
    parser.add_argument("--server", help="base URL of a running service (default: in-process)")
    parser.add_argument("--format", choices=("json", "csv"), help="output format")
    parser.add_argument("--digits", type=int, help="round floats to this many digits")
    parser.add_argument("--threads", type=int, default=1, help="worker cap for power suites")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run a symmetry test on a data file")
    p.add_argument("--input", required=True, help="file of newline-separated decimals")
    p.add_argument("--stat", required=True, choices=("jn", "kn", "sign", "ks"))
    p.add_argument("--B", type=int, default=0, help="bootstrap resamples (0: no p-value)")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("eigen", help="largest eigenvalue of the integral-type operator")
    p.add_argument("--dist", required=True)
    p.add_argument("--m", type=int, default=1000, help="half grid count of the discretization")
    p.add_argument("--k", type=int, default=5, help="closed-form roots to report (uniform)")
    p.add_argument("--A", type=float, default=None, help="override the truncation bound")

    p = sub.add_parser("curve", help="largest-eigenvalue curve of the threshold family")
    p.add_argument("--dist", required=True)
    p.add_argument("--m-coarse", type=int, default=200)
    p.add_argument("--m-fine", type=int, default=1000)
    p.add_argument("--grid-size", type=int, default=256)

    p = sub.add_parser("slope", help="efficiency indices of both tests for one alternative")
    p.add_argument("--dist", required=True)
    p.add_argument("--alt", required=True)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--eigen-m", type=int, default=1000)
    p.add_argument("--curve-m-coarse", type=int, default=200)
    p.add_argument("--curve-m-fine", type=int, default=1000)
    p.add_argument("--curve-grid-size", type=int, default=256)

    p = sub.add_parser("power", help="run power studies from config files")
    p.add_argument("--config", required=True, action="append", help="study config file (repeatable)")
    p.add_argument("--out-dir", default=None, help="stream per-config reports here (resumable)")

    p = sub.add_parser("limit-null", help="sample the limit law of the scaled integral statistic")
    p.add_argument("--dist", required=True)
    p.add_argument("--k", type=int, default=50, help="eigenvalues kept in the truncated series")
    p.add_argument("--draws", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nystrom-m", type=int, default=500)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _cmd_test(args, client, digits):
    values = _read_data_file(args.input)
    config = {"command": "test", "input": args.input, "stat": args.stat, "B": args.B,
              "seed": args.seed}
    result = _post(client, "/test", {
        "values": values, "statistic": args.stat, "b_resamples": args.B, "seed": args.seed,
    })
    if (args.format or "json") == "json":
        _emit_json("test", config, result, digits)
    else:
        _emit_csv(config, "key,value", list(result.items()), digits)
    return 0


def _cmd_eigen(args, client, digits):
    config = {"command": "eigen", "dist": args.dist, "m": args.m, "k": args.k,
              "A": args.A, "seed": None}
    payload = {"dist": args.dist, "m": args.m, "k": args.k}
    if args.A is not None:
        payload["truncation_A"] = args.A
    result = _post(client, "/eigen", payload)
    if (args.format or "json") == "json":
        _emit_json("eigen", config, result, digits)
    else:
        rows = [("nystrom_nu1", result["nystrom_nu1"]), ("truncation_A", result["truncation_A"])]
        if result.get("closed_form_roots"):
            rows += [(f"closed_form_root_{i+1}", r) for i, r in enumerate(result["closed_form_roots"])]
        _emit_csv(config, "key,value", rows, digits)
    return 0


def _cmd_curve(args, client, digits):
    config = {"command": "curve", "dist": args.dist, "m_coarse": args.m_coarse,
              "m_fine": args.m_fine, "grid_size": args.grid_size, "seed": None}
    result = _post(client, "/curve", {
        "dist": args.dist, "m_coarse": args.m_coarse, "m_fine": args.m_fine,
        "grid_size": args.grid_size,
    })
    if (args.format or "csv") == "csv":
        config = dict(config, argmax_t=result["argmax_t"], sup_value=result["sup_value"])
        _emit_csv(config, "t,nu1", list(zip(result["t"], result["nu1"])), digits)
    else:
        _emit_json("curve", config, result, digits)
    return 0


def _cmd_slope(args, client, digits):
    config = {"command": "slope", "dist": args.dist, "alt": args.alt, "beta": args.beta,
              "eigen_m": args.eigen_m, "curve_m_coarse": args.curve_m_coarse,
              "curve_m_fine": args.curve_m_fine, "curve_grid_size": args.curve_grid_size,
              "seed": None}
    result = _post(client, "/slope", {
        "dist": args.dist, "alt": args.alt, "beta": args.beta, "eigen_m": args.eigen_m,
        "curve_m_coarse": args.curve_m_coarse, "curve_m_fine": args.curve_m_fine,
        "curve_grid_size": args.curve_grid_size,
    })
    if (args.format or "csv") == "csv":
        rows = [
            ("jn", result["jn"]["index"], result["jn"]["b_coefficient"],
             result["jn"]["tail_constant"], ""),
            ("kn", result["kn"]["index"], result["kn"]["b_coefficient"],
             result["kn"]["tail_constant"], result["kn"]["argmax_t"]),
        ]
        _emit_csv(config, "statistic,index,b_coefficient,tail_constant,argmax_t", rows, digits)
    else:
        _emit_json("slope", config, result, digits)
    return 0


def _cmd_power(args, client, digits):
    """Run each config through /power; finished reports stream to --out-dir
    (and are skipped on rerun), and --threads caps concurrent requests.
    Output order is canonical (sorted by config), independent of threads."""
    import os
    from concurrent.futures import ThreadPoolExecutor

    from .simulation import load_study_config

    jobs = []
    for path in args.config:
        try:
            cfg = load_study_config(path)
        except (OSError, ValueError) as exc:
            raise CliError(f"bad config {path}: {exc}")
        jobs.append((path, cfg))
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)

    def out_path(cfg):
        return os.path.join(args.out_dir, cfg.config_hash() + ".json") if args.out_dir else None

    def fetch(job):
        path, cfg = job
        cached = out_path(cfg)
        if cached and os.path.exists(cached):
            with open(cached) as fh:
                return path, cfg, json.load(fh)
        result = _post(client, "/power", {
            "null": cfg.null_dist, "alt": cfg.alternative, "beta": cfg.beta,
            "thetas": list(cfg.theta_values), "n": cfg.n, "N": cfg.N, "level": cfg.level,
            "stats": list(cfg.statistics), "seed": cfg.seed, "orientation": cfg.orientation,
        })
        if cached:
            tmp = cached + ".tmp"
            with open(tmp, "w") as fh:
                json.dump(result, fh, indent=1)
            os.replace(tmp, cached)
        return path, cfg, result

    if args.threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            reports = list(pool.map(fetch, jobs))
    else:
        reports = [fetch(job) for job in jobs]
    reports.sort(key=lambda item: json.dumps(item[2]["config"], sort_keys=True))

    if (args.format or "csv") == "csv":
        first = True
        for path, cfg, result in reports:
            config = dict(sorted(result["config"].items()))
            config["command"] = "power"
            config["config_file"] = path
            rows = [
                (cfg.null_dist, cfg.alternative, row["theta"], cfg.n, row["statistic"], row["power"])
                for row in result["rows"]
            ]
            if not first:
                sys.stdout.write("\n")
            _emit_csv(config, "null,alt,theta,n,statistic,power", rows, digits)
            first = False
    else:
        docs = [
            {"config_file": path, "result": _round_floats(result, digits)}
            for path, cfg, result in reports
        ]
        json.dump({"command": "power", "reports": docs}, sys.stdout, indent=2)
        sys.stdout.write("\n")
    return 0


def _cmd_limit_null(args, client, digits):
    config = {"command": "limit-null", "dist": args.dist, "k": args.k, "draws": args.draws,
              "seed": args.seed, "nystrom_m": args.nystrom_m}
    result = _post(client, "/limit-null", {
        "dist": args.dist, "k_eigen": args.k, "draws": args.draws, "seed": args.seed,
        "nystrom_m": args.nystrom_m,
    })
    if (args.format or "csv") == "csv":
        _emit_csv(config, "value", [(v,) for v in result["values"]], digits)
    else:
        _emit_json("limit-null", config, result, digits)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0
    handlers = {
        "test": _cmd_test,
        "eigen": _cmd_eigen,
        "curve": _cmd_curve,
        "slope": _cmd_slope,
        "power": _cmd_power,
        "limit-null": _cmd_limit_null,
    }
    client = _make_client(args.server)
    try:
        return handlers[args.command](args, client, args.digits)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    finally:
        client.close()


if __name__ == "__main__":
    sys.exit(main())
