import sys

from blocks.components.affine.box_counting import full_dimension_trials
from blocks.components.io.ifs_file import parse_ifs_file

ifs = parse_ifs_file("knowledge/systems/generic_pair.json")
res = full_dimension_trials(ifs, trials=3, seed=20240601, count=1_000_000, n_max=10, depth=4)
for o in res.outcomes:
    print(f"trial {o.index}: estimate {o.estimate:.4f} target {o.target:.4f} {'ok' if o.ok else 'MISS'}")
if not res.passed:
    print(f"FAIL: {res.agreeing} of {len(res.outcomes)} trials within {res.tolerance}")
    sys.exit(1)
print(f"OK: {res.agreeing} of {len(res.outcomes)} trials agree with min(d, dimension)")
