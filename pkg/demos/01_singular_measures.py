"""U^k norms of singular measures grow with the truncation radius.

A point mass has every Fourier coefficient equal to one, so its truncated
U^2 norm is (2M+1)^(1/4) and never settles.  The middle-thirds Cantor stage
decays a little, and Lebesgue measure is exactly 1 at every radius.
"""
from gowers import cantor, dirac, lebesgue, tail_report

schedule = [4, 8, 16, 32]
for name, spec in [("lebesgue", lebesgue()), ("dirac", dirac()), ("cantor depth 6", cantor())]:
    report = tail_report(spec, 2, schedule)
    values = ", ".join(f"{v:.5f}" for v in report.values[2])
    print(f"{name:15s} U^2 over M={schedule}: {values}  -> {report.verdicts[2]}")

print("\n(2M+1)^(1/4) for comparison:", ", ".join(f"{(2 * M + 1) ** 0.25:.5f}" for M in schedule))
