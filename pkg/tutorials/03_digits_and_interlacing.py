"""Digit streams of sparse series and the interlacing condition."""

# %%
from fractions import Fraction

from sparse_series import (
    PowerMap,
    build_field,
    check_interlacing,
    degree_ell_ratio,
    digit_stream,
    explicit_support,
    indicator_sequence,
    nonzero_digit_density,
    power_support,
)

# %% binary digits of sum 2^(-m^3); no carries, a 1 at each cube
s = digit_stream(1, PowerMap(3), 2, 10**5)
print(len(s.nonzero_positions), s.carries, s.nonzero_positions[:5])
for row in nonzero_digit_density(s, 3):
    print(row.x, row.count, row.normalized)

# %% n_k / Q_k for the cubes with ell = 2
H = 10**5
Q2 = build_field("x-2")
rows = degree_ell_ratio(indicator_sequence(Q2, power_support(3, H), H), 2)
for r in rows[9::10]:
    print(r.k, r.n_k, float(r.ratio.mid))

# %% interlacing of the cubes with a two-point set
A = power_support(3, H)
B = explicit_support([1, H - 1], H)
print(check_interlacing(A, B, 8, 1, H).verdict)
res = check_interlacing(A, B, Fraction(101, 100), 1, H)
print(res.verdict, res.violations[:2])
