"""Text rendering of an operating diagram in the (S2in, D) plane.

Each distinct signature (set of existing equilibria with their verdicts) gets a
letter; the legend lists them. Boundaries between regions follow the break-even
curves of the two growth functions.
"""
import pathlib
import string

from triad.config import load_config
from triad.diagram import ScanSpec, extract_boundaries, scan

cfg = load_config(pathlib.Path(__file__).parent / "reference.json")
s = cfg.scan
grid = scan(ScanSpec(cfg.model, s["axis_x"], tuple(s["x_range"]), s["nx"],
                     s["axis_y"], tuple(s["y_range"]), s["ny"]))

letters = {}
for row in reversed(grid.cells):  # high D at the top
    line = "".join(letters.setdefault(c.signature, string.ascii_uppercase[len(letters)])
                   for c in row)
    print(f"D={row[0].y_val:5.3f} |{line}")
print(" " * 8 + f"S2in {s['x_range'][0]} .. {s['x_range'][1]}")
for sig, ch in letters.items():
    print(f"  {ch}: {sig}")
print(f"{len(extract_boundaries(grid))} boundary segments")
