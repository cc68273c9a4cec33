#!/usr/bin/env python3
"""Run the four figure experiments and (optionally) render the plots.

Usage:
    python scripts/reproduce_figures.py [--workers 8] [--trials-scale 0.1]
                                        [--render] [--only fig4 fig6]

Results land in results/<name>.csv (plus .summary.csv).  With --render the
TypeScript renderer in frontend/ is invoked for each figure (requires
`npm install && npm run build` in frontend/ first).
"""

import argparse
import subprocess
import sys
from pathlib import Path

from oiasim import cli
from oiasim.harness import parse_config_file

ROOT = Path(__file__).resolve().parent.parent
FIGURES = {
    "fig3a": ("sumlif-vs-n", "fig3"),
    "fig3b": ("sumlif-vs-n", "fig3"),
    "fig4": ("sumlif-vs-nf", "fig4"),
    "fig5a": ("rate-vs-snr", "fig5"),
    "fig5b": ("rate-vs-snr", "fig5"),
    "fig6": ("rate-vs-n", "fig6"),
}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--trials-scale", type=float, default=1.0,
                    help="scale the trial counts down for a quick pass")
    ap.add_argument("--render", action="store_true",
                    help="render SVGs via the frontend after each run")
    ap.add_argument("--only", nargs="*", choices=sorted(FIGURES), default=None)
    args = ap.parse_args()

    (ROOT / "results").mkdir(exist_ok=True)
    names = args.only or list(FIGURES)
    for name in names:
        command, kind = FIGURES[name]
        cfg_path = ROOT / "configs" / f"{name}.cfg"
        trials = parse_config_file(cfg_path)["trials"]
        scaled = max(1, int(trials * args.trials_scale))
        argv = [
            command, "--config", str(cfg_path),
            "--trials", str(scaled),
            "--workers", str(args.workers),
            "--out", str(ROOT / "results" / f"{name}.csv"),
        ]
        print(f"== {name}: oiasim {' '.join(argv)}")
        code = cli.main(argv)
        if code != 0:
            return code
        if args.render:
            svg = ROOT / "results" / f"{name}.svg"
            rc = subprocess.run(
                ["node", str(ROOT / "frontend" / "dist" / "cli.js"),
                 "render", "--kind", kind,
                 "--in", str(ROOT / "results" / f"{name}.csv"),
                 "--out", str(svg)],
                cwd=ROOT,
            ).returncode
            if rc != 0:
                return rc
            print(f"   rendered {svg}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
