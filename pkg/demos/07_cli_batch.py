"""Driving the batch front door.

Requests are single-command JSON documents; reports are deterministic JSON
(and CSV profiles where a command produces one).  Mathematical verdicts
never change the exit code: exit 0 means the tool ran, whatever the math
said.  Schema violations exit 2, semantic ones 3, numerical failures 4,
unwritable outputs 5.
"""

import json
import math
import subprocess
import sys
import tempfile
from pathlib import Path

REQUESTS = [
    {
        "command": "curvature",
        "kernel": {"preset": "szego", "power": 2},
        "radii": {"kind": "boundary_dyadic", "k_min": 3, "k_max": 12},
    },
    {
        "command": "hypercontract",
        "shift": {"prefix": [math.sqrt(13 / 25)], "tail": {"p": [1, 1], "q": [2, 1]}},
        "order": 2,
        "N": 64,
    },
    {
        "command": "shields",
        "a": {"preset": "hardy"},
        "b": {"preset": "szego", "power": 2},
        "horizon": 256,
    },
    {
        "command": "reduce",
        "detector": "rank-one-defect",
        "order": 2,
        "operator": {"grid": [[{"kind": "shift", "weights": {"preset": "szego", "power": 2}}]], "N": 48},
    },
]

with tempfile.TemporaryDirectory() as tmp:
    for req in REQUESTS:
        path = Path(tmp) / "request.json"
        path.write_text(json.dumps(req))
        out = Path(tmp) / "report.json"
        args = [sys.executable, "-m", "cdlab.cli", str(path), "--out", str(out)]
        if req["command"] == "curvature":
            args += ["--csv", str(Path(tmp) / "profile.csv")]
        proc = subprocess.run(args, capture_output=True, text=True)
        print(f"$ cdlab request.json   # command={req['command']}  -> exit {proc.returncode}")
        report = json.loads(out.read_text())
        for key in sorted(report):
            if key in ("command",):
                continue
            print(f"    {key}: {report[key]}")
        if req["command"] == "curvature":
            lines = (Path(tmp) / "profile.csv").read_text().splitlines()
            print(f"    csv: {lines[0]} ... ({len(lines) - 1} rows)")
        print()
