import math

from blocks.components.io.ifs_file import parse_ifs_file
from blocks.components.pressure.dimension import affinity_dimension

conformal = affinity_dimension(parse_ifs_file("knowledge/systems/conformal_rotation_pair.json"), 10, 1e-12)
assert all(abs(t - 1.0) <= 1e-9 for _, t in conformal.roots), conformal.roots
print("OK: conformal pair t_n = 1 for n <= 10")

diagonal = affinity_dimension(parse_ifs_file("knowledge/systems/diagonal_triple.json"), 8, 1e-10)
target = 1.0 + math.log(1.5) / math.log(4.0)
assert all(abs(t - target) <= 1e-6 for _, t in diagonal.roots), diagonal.roots
print("OK: diagonal triple t_n =", diagonal.prediction)

clamp = affinity_dimension(parse_ifs_file("knowledge/systems/similarity_triple.json"), 6, 1e-10)
assert clamp.prediction == 1.0
print("OK: similarity triple clamped to d =", clamp.prediction, "(upper bound", clamp.upper_bound, ")")
