#!/usr/bin/env python3
"""Runs the CLI on a small config and validates summary.json against the schema.

usage: validate_summary.py CLI SCHEMA CONFIG OUTDIR
"""
import json
import subprocess
import sys

import jsonschema


def main():
    cli, schema_path, config, outdir = sys.argv[1:5]
    with open(schema_path) as f:
        schema = json.load(f)
    for sub in ("verify-all", "wegner"):
        out = f"{outdir}/{sub}"
        code = subprocess.run([cli, sub, "--config", config, "--out", out]).returncode
        if code not in (0, 2):
            print(f"{sub}: exit {code}")
            return 1
        with open(f"{out}/summary.json") as f:
            summary = json.load(f)
        jsonschema.validate(summary, schema)
        if summary["subcommand"] != sub or summary["passed"] != (code == 0):
            print(f"{sub}: subcommand/passed do not match the exit code {code}")
            return 1
        print(f"{sub}: {len(summary['checks'])} checks, schema ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
