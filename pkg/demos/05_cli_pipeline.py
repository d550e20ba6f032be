"""Drive the command-line pipeline end to end.

Writes a config, runs the sandpile study through the CLI, and summarizes
the emitted CSV files and the acceptance manifest.
"""

import csv
import json
import subprocess
import sys
import tempfile
from pathlib import Path

with tempfile.TemporaryDirectory() as workdir:
    workdir = Path(workdir)
    config = workdir / "sandpile.cfg"
    config.write_text(
        "# transported sandpile at a quick desk resolution\n"
        "n_cells = 200\n"
        "dt = 0.001\n"
        "t_end = 1.25\n"
        "snapshot_times = 0 0.75 1.125 1.25\n"
    )
    out_dir = workdir / "out"
    proc = subprocess.run(
        [sys.executable, "-m", "slopecap.cli", "sandpile",
         "--config", str(config), "--out", str(out_dir)],
        capture_output=True, text=True)
    print(f"exit code: {proc.returncode}")

    manifest = json.loads((out_dir / "manifest.json").read_text())
    print(f"wall time: {manifest['wall_time_s']:.2f} s")
    print("acceptance entries:")
    for entry in manifest["acceptance"]:
        flag = "ok " if entry["pass"] else "FAIL"
        print(f"  [{flag}] {entry['name']}: {entry['measured']:.3e} <= {entry['bound']:.3e}")

    with open(out_dir / "profiles.csv") as fh:
        rows = list(csv.DictReader(fh))
    times = sorted({row["t"] for row in rows}, key=float)
    print(f"\nprofiles.csv: {len(rows)} rows at times {times}")
    with open(out_dir / "free_boundary.csv") as fh:
        for row in csv.DictReader(fh):
            print("free boundary:", row)
