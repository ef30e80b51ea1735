# Walk on F2 with weights (1, 1, r, r), watched through the wreath recursion
import numpy as np

from basilica.walk import (extract_stopping_times, f, induced_law_test, induced_weights, run,
                           stopping_rates, t_circ)

r = 1.0
traj = run(1 << 14, r, seed=1)
for k in (1, 16, 256, 4096, 16384):
    Y, X, eps = traj.snapshots[k]
    print(f"n={k:6d}  |Y|={len(Y):4d}  |X|={len(X):4d}  eps={eps}")

print("fraction of time with eps=1:", traj.eps.mean())

# stopping times: X only moves at sigma, Y only at tau
st = extract_stopping_times(traj)
print("first sigmas", st.sigma[:8], "increments", st.x_increments[:8])

# the induced walk has step law (r/2, r/2, 1, 1) / (r + 2)
res = induced_law_test(r, 100_000, seed=1)
print("target  ", np.round(induced_weights(r), 4))
print("observed", {x: round(c / res.n, 4) for x, c in res.counts.items()})

# m / sigma(m) tends to f(r); the mean excursion is t_circ(r) = 1 / f(r)
for r in (0.5, 1.0, 2 ** 0.5, 3.0):
    s, t = stopping_rates(r, 50_000, seed=2)
    print(f"r={r:.3f}  m/sigma={s:.4f}  m/tau={t:.4f}  f={f(r):.4f}  t_circ={t_circ(r):.4f}")
