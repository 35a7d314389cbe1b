"""Sparsity diagnostics for fibres of arithmetic functions.

The fibre sequence a(n) = #{m : g(m) = n} is sparse when g grows fast
enough.  Below we build fibres of sigma and phi and watch the ratio
#N / x and its checkpoints.
"""

# %%
import numpy as np

from sparse_series import (
    CheckpointSchedule,
    build_field,
    check_theorem_rational,
    fiber_sequence,
    required_horizon,
    sieve,
    value_set_count,
)

# %% sieve tables
sigma = sieve("sigma", 200)
print(sigma.values[1:13])

phi = sieve("phi", required_horizon("phi", 10))
print(value_set_count(phi, 10))  # (5, (1, 2, 4, 6, 8))

# %% the fibre of sigma up to 10^5
Q2 = build_field("x-2")
H = 10**5 + 1
g = sieve("sigma", required_horizon("sigma", H))
a = fiber_sequence(1, g, Q2, H)
counts = np.asarray(a.int_values())
print("support size", len(a.support), "largest fibre", counts.max())

# %% checkpoint report; the ratio decays like sqrt(#N / x)
schedule = CheckpointSchedule.geometric(10**2, 10**5)
report = check_theorem_rational(2, a, None, schedule, mode="theorem-A")
for row in report.rows:
    print(row.condition_id, row.verdict, row.description)
for cp in report.row("(iii)").checkpoints:
    print(cp.x, float(cp.ratio.mid))
