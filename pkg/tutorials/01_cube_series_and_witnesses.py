"""Cube-indicator series in base 2: classification, tails and norm witnesses.

Run with ``python tutorials/01_cube_series_and_witnesses.py``.
"""

# %% a base number and its classification
from sparse_series import build_field, indicator_sequence, power_support, xi_tail, witness_search

Q2 = build_field("x-2")
print(Q2.classification.kind)  # Pisot

silver = build_field("x^2-2x-1")
print(silver.classification.kind, silver.classification)

# %% the cube indicator up to a horizon
H = 10**4
cubes = indicator_sequence(Q2, power_support(3, H), H)
print(cubes.support[:6])

# tails xi_N = sum_j c(N+j) / 2^j shrink quickly between cubes
for N in (1, 2, 8, 9, 27, 28):
    print(N, xi_tail(cubes, N, 80))

# %% every denominator u <= 100 gets a witness N with 0 < u * xi_N < 1
ws = witness_search(Q2, cubes, None, 100, 200)
for w in ws[:5]:
    print(w.u, w.N, w.value_interval, w.conclusion)
print("largest N used:", max(w.N for w in ws))
