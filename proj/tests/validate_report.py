#!/usr/bin/env python3
"""Run a few cheap experiments and validate each report.json against the schema."""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

RUNS = [
    ["check", "--model", "flat-pq"],
    ["check", "--model", "sphere", "--hbar", "0.5", "--uncorrected-sign"],
    ["calibrate", "--model", "hyperbolic"],
    ["jets", "--model", "flat-symmetric"],
    ["bergman"],
    ["riemann"],
]


def main():
    cli, schema_path = sys.argv[1], sys.argv[2]
    schema = json.loads(Path(schema_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    bad = 0
    with tempfile.TemporaryDirectory() as tmp:
        for i, args in enumerate(RUNS):
            out = Path(tmp) / str(i)
            proc = subprocess.run([cli, *args, "--output-dir", str(out)], capture_output=True, text=True)
            if proc.returncode not in (0, 2):
                print(f"FAIL {' '.join(args)}: exit {proc.returncode}\n{proc.stderr}")
                bad += 1
                continue
            report = json.loads((out / "report.json").read_text())
            errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
            for e in errors:
                print(f"FAIL {' '.join(args)}: {list(e.path)}: {e.message}")
            bad += bool(errors)
            if not errors:
                print(f"ok   {' '.join(args)}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
