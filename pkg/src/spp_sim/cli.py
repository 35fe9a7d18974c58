"""Command-line front end: ``spp-sim <scenario|all> --config FILE``.

Exit status: 0 on success, 1 when a PASS/FAIL row fails, 2 for config parse
errors, 3 for validation errors, 4 for other runtime errors.
"""

import argparse
import hashlib
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .config import load_config
from .errors import ConfigParseError, ValidationError
from .io import write_json
from .scenarios import SCENARIOS, run_scenario

log = logging.getLogger("spp_sim")

EXIT_OK, EXIT_CHECKS, EXIT_PARSE, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2, 3, 4
ORDER = list(SCENARIOS)


def _thread_cap():
    env = os.environ.get("SPP_SIM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigParseError(f"SPP_SIM_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def build_parser():
    p = argparse.ArgumentParser(
        prog="spp-sim",
        description="Directional SPP launching by superradiance: batch scenarios.")
    p.add_argument("scenario", choices=ORDER + ["all"], help="scenario to run")
    p.add_argument("--config", required=True, help="flat key = value or JSON config file")
    p.add_argument("--out", help="output directory (default: outputs.directory)")
    p.add_argument("--parallel", action="store_true",
                   help="run scenarios concurrently (capped by SPP_SIM_THREADS)")
    p.add_argument("--step", type=float, help="dynamics time step in fs")
    p.add_argument("--horizon", type=float,
                   help="dynamics horizon in solver units (1/gamma or fs)")
    p.add_argument("--no-figures", action="store_true", help="skip PNG figures")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out, cfg, names, results):
    files = {}
    for name in names:
        sub = os.path.join(out, name)
        for root, _, fnames in os.walk(sub):
            for f in sorted(fnames):
                full = os.path.join(root, f)
                files[os.path.relpath(full, out).replace(os.sep, "/")] = _sha256(full)
    manifest = {
        "generator": f"spp-sim {__version__}",
        "input_hash": cfg.input_hash,
        "scenarios": {n: results[n] for n in names},
        "files": dict(sorted(files.items())),
    }
    write_json(os.path.join(out, "manifest.json"), manifest)


def _job(name, cfg, out, options):
    summary, checks = run_scenario(name, cfg, os.path.join(out, name), **options)
    return name, all(c.passed for c in checks), len(checks)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        cap = _thread_cap()
    except ConfigParseError as exc:
        print(f"spp-sim: config error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        cfg.validate()
    except ValidationError as exc:
        print(f"spp-sim: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    out = args.out or cfg["outputs.directory"]
    names = ORDER if args.scenario == "all" else [args.scenario]
    options = {"figures": cfg["outputs.figures"] and not args.no_figures,
               "step_fs": args.step, "horizon": args.horizon, "workers": 1}
    os.makedirs(out, exist_ok=True)
    results = {}
    try:
        if args.parallel and len(names) > 1 and cap > 1:
            with ProcessPoolExecutor(max_workers=min(cap, len(names))) as pool:
                futures = [pool.submit(_job, n, cfg, out, options) for n in names]
                done = [f.result() for f in futures]
        else:
            options["workers"] = cap if len(names) == 1 else 1
            done = [_job(n, cfg, out, options) for n in names]
    except ValidationError as exc:
        print(f"spp-sim: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - every module error maps to exit 4
        print(f"spp-sim: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    status = EXIT_OK
    print(f"{'scenario':<16} {'status':<6} checks")
    for name, ok, n_checks in done:
        results[name] = "PASS" if ok else "FAIL"
        print(f"{name:<16} {results[name]:<6} {n_checks}")
        if not ok:
            status = EXIT_CHECKS
    _write_manifest(out, cfg, names, results)
    return status


if __name__ == "__main__":
    sys.exit(main())
