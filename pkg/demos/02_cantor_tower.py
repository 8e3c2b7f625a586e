"""Walk through the Delta tower of a Cantor stage.

Each level doubles the number of frequency variables.  The U^k power is the
Plancherel mass of level k-1, and the origin coefficient of level k equals
that same mass.
"""
from gowers import build_tower, cantor, uk_norm
from gowers.spectral import plancherel_mass

spec = cantor(3, (0, 2), 6)
tower = build_tower(spec, 3, 12, backend="fft")
for j, T in enumerate(tower.levels):
    print(f"level {j}: shape {T.box.shape}, {T.box.size:>9d} coefficients, "
          f"plancherel mass {plancherel_mass(T):.6f}, origin {T.origin.real:.6f}")

for k in (1, 2, 3, 4):
    print(f"||cantor||_U^{k} at M=12: {uk_norm(tower, k):.6f}")
