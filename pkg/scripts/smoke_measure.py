from blocks.components.cylinder.cylinder_function import NaturalCylinderFunction
from blocks.components.equilibrium.diagnostics import equilibrium_diagnostics
from blocks.components.io.ifs_file import parse_ifs_file
from blocks.components.pressure.dimension import pressure_root

cf = NaturalCylinderFunction(parse_ifs_file("knowledge/systems/generic_pair.json"))
for n in (6, 8, 12):
    t_n = pressure_root(cf, n, 1e-10)
    diag = equilibrium_diagnostics(cf, t_n, n, 3)
    assert diag.invariance_defect_max <= diag.defect_bound + 1e-12, diag
    print(f"OK: n={n} t_n={t_n:.10f} gap={diag.gap:.3e} defect={diag.invariance_defect_max:.3e}")
