"""Train the 2-10-10-1 net on the 3x3 Gaussian checkerboard under three regimes.

Usage: ``python3 demos/gaussian_regimes.py [out_dir]``.  Writes one boundary
SVG per regime and prints the final exact counts (a few minutes on one core).
"""
import sys
from pathlib import Path

from tropicount.counting import boundary_geometry_2d
from tropicount.svg import boundary_svg
from tropicount.training import run_preset
from tropicount.tropical import dcpa_extract

out = Path(sys.argv[1] if len(sys.argv) > 1 else "gaussian_demo")
out.mkdir(parents=True, exist_ok=True)

for regime in ("ce", "noisy", "adv"):
    hist, cfg, train_set, _ = run_preset("gaussian", regime, seed=0, count="last")
    spec, rec = hist[-1]
    print(f"{regime:>5}: #Boundary {rec.boundary:3d}  #Total {rec.total:4d}  F-norm {rec.fnorm:7.2f}  "
          f"train {rec.train_acc:.1f}%  test {rec.test_acc:.1f}%  R {rec.robustness:.1f}%")
    segs = boundary_geometry_2d(dcpa_extract(spec))
    svg = boundary_svg(segs, (-2, 2, -2, 2), data=train_set, caption=f"gaussian, {regime}: #Boundary = {rec.boundary}")
    (out / f"boundary_{regime}.svg").write_text(svg)
print(f"SVGs written to {out}/")
