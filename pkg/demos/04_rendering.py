"""
Pictures
========

SVG output in three colourings, plus the same thing through the command line.
Files land in ``demo_svg/`` under the current directory.
"""

import pathlib

import tessella as ts
from tessella.cli import main

out = pathlib.Path("demo_svg")
out.mkdir(exist_ok=True)

rule = ts.builtin("pinwheel")
patch = ts.iterate(rule, 0, 4)

for mode in ("type", "angle_hue", "handedness"):
    svg = ts.render_svg(patch, rule, ts.RenderSpec(color_by=mode))
    path = out / f"pinwheel_r4_{mode}.svg"
    path.write_text(svg)
    print(f"{path}: {svg.count('<path')} tiles")

# Small patches can carry index labels.
small = ts.iterate(rule, 0, 1)
(out / "pinwheel_r1_labels.svg").write_text(
    ts.render_svg(small, rule, ts.RenderSpec(label_max=10, stroke_width=0.03)))

# The CLI writes byte-identical files for identical arguments.
main(["render", "--builtin", "square", "-r", "3", "--color-by", "type",
      "-o", str(out / "square_r3.svg")])
