# nu(g) = min(|g|, 1 + nu(g0) + nu(g1)), exact on small balls and
# as a cheap upper bound along long random walks
from basilica import basilica, nu, nu_ball
from basilica.exact import heat_kernel_report
from basilica.walk import estimate_speed, estimate_u

G = basilica()
for w in ["a", "bb", "abab", "bbbbbbbb", "ABAbaBab"]:
    print(f"{w:10s} exact={nu(w, G).value}  upper={nu(w, G, 'upper_bound').value}")

print("nu-ball sizes:", [len(nu_ball(G, n)) for n in range(5)])

# u_r(n) = E max nu(Z_i), expected to grow like n^(2/3)
u = estimate_u(1.0, [2 ** k for k in range(8, 14)], trials=40, seed=3)
for n, v in zip(u.n, u.u):
    print(f"n={n:6d}  u={v:8.2f}")
print("fitted exponent:", round(u.exponent, 3))

# nu(Z_n)/n drifts to zero, while the free length rate does not
sp = estimate_speed(1.0, [2 ** 10, 2 ** 12, 2 ** 14], trials=10, seed=3)
print("nu/n  ", [round(x, 4) for x in sp.mean_nu_rate])
print("|Z|/n ", [round(x, 4) for x in sp.mean_free_rate])

# exact return probabilities, group against free group
hk = heat_kernel_report(1.0, 5)
for n, pg, pf in zip(hk.n, hk.p_group, hk.p_free):
    print(f"P(Z_{2 * n}=1): group {pg:.6f}  free {pf:.6f}")
