"""Run a YAML-configured two-axis sweep and write CSV, JSON and SVG.

    python3 scripts/run_sweep.py scripts/configs/toy_phase_map.yaml --workers 4
"""
import argparse
import dataclasses
import logging
import time

from partialpump.sweep import load_config, run_sweep, write_outputs


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("config")
    ap.add_argument("--workers", type=int, help="override the config's worker count")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    config = load_config(args.config)
    if args.workers:
        config = dataclasses.replace(config, workers=args.workers)
    t0 = time.perf_counter()
    result = run_sweep(config)
    written = write_outputs(result)
    logging.info("%d points in %.1f s, %d failed", len(result.records), time.perf_counter() - t0,
                 len(result.failures))
    for r in result.failures:
        logging.info("  (%g, %g): %s", r["axis1"], r["axis2"], r["error"])
    for kind, path in written.items():
        logging.info("%s -> %s", kind, path)


if __name__ == "__main__":
    main()
