import hashlib
import pathlib

from blocks.components.affine.chaos_game import attractor_points
from blocks.components.io.ifs_file import parse_ifs_file
from blocks.components.visual.render_pgm import render_pgm

ifs = parse_ifs_file("knowledge/systems/generic_pair.json")
images = {w: render_pgm(attractor_points(ifs, count=100_000, seed=7, workers=w), 256) for w in (1, 2, 8)}
assert len(set(images.values())) == 1, "render differs across worker counts"
out = pathlib.Path("runner/out/smoke_render.pgm")
out.parent.mkdir(parents=True, exist_ok=True)
out.write_bytes(images[1])
print("OK: attractor rendered:", out, hashlib.sha1(images[1]).hexdigest()[:10])
