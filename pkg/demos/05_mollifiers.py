"""Fejer kernels and the composite mollifier phi^[n].

The composite kernel's transform factorises; the quadrature of its defining
integral agrees with the product formula.  Pairing the level-1 tensor of a
point mass against a Fejer kernel of radius R gives R + 1.
"""
from gowers import PhiBracket, build_tower, dirac, fejer_kernel, mollified_pairing
from gowers.mollifiers import phi_bracket_quadrature, phi_bracket_transform

pb = PhiBracket((fejer_kernel(3), fejer_kernel(3)))
for xi, eta in [(0, 0), (1, 1), (2, -1), (-3, 2)]:
    fast = phi_bracket_transform(pb, xi, [eta])
    slow = phi_bracket_quadrature(pb, xi, [eta], grid=64)
    print(f"phi^[1](xi={xi:+d}; eta={eta:+d}) = {fast.real:.6f}   quadrature {slow.real:.6f}")

T = build_tower(dirac(), 1, 16)[1]
for R in (4, 8, 16):
    print(f"Fejer({R}) pairing of Delta^1 dirac: {mollified_pairing(T, T, fejer_kernel(R)).real:.1f}")
