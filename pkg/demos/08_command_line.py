"""
Running scenarios from the command line
=======================================

Every experiment is also a ``slag-lab`` scenario.  This script drives the
same entry point in-process and writes reports under ``demo_runs/``.
"""

from pathlib import Path

from slaglab.lab.cli import main

out = Path("demo_runs")
config = out / "ma.ini"
out.mkdir(exist_ok=True)
config.write_text("bc = x1**2 + x2**2/4\nexact = x1**2 + x2**2/4\nc = 1\nresolution = 33,33\n")

runs = [
    ["sweep:symdet", "--set", "trials=2000", "--out", str(out / "symdet")],
    ["solve:ma", "--config", str(config), "--out", str(out / "ma")],
    ["annulus", "--set", "resolution=128", "--out", str(out / "annulus")],
]
for argv in runs:
    print("$ slag-lab", " ".join(argv))
    print("exit code", main(argv), "\n")
