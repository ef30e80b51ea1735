# Schreier graphs and the self-similar step law mu -> mu'
import math

from basilica import alpha, basilica, build_schreier, fixed_point, irreducible_cycles, k_example
from basilica.schreier import basilica_weights, product_invariance_check, refine

G = basilica()
print(build_schreier(G, 1).to_dot())
print("level 8 connected:", build_schreier(G, 8).is_connected())

cyc = irreducible_cycles(G, length_cap=8)
print("base", cyc.base, "labels", cyc.labels, "->", cyc.verdict)
print("only a:", irreducible_cycles(G, 1, 8, generators=["a"]).verdict)

# one refinement step sends the weight ratio r to 2/r
for r in (0.5, 1.0, 2.0):
    res = refine(G, basilica_weights(r))
    print(f"r={r}  mu'={res.mu_prime}  ratio'={res.mu_prime['b'] / res.mu_prime['a']:.4f}"
          f"  E tau={res.E_tau:.4f}")

fp = fixed_point(G)
print("Basilica fixed ratio", fp.mu["b"] / fp.mu["a"], "vs sqrt 2", math.sqrt(2))
print("alpha", alpha(G, fp.mu).alpha)

mc = refine(G, basilica_weights(1.0), backend="monte_carlo", samples=50_000, seed=1)
print("Monte Carlo E tau", round(mc.E_tau, 4), "+-", round(mc.se_tau, 4), "(exact 8/3)")

for k in range(1, 6):
    g = k_example(k)
    fpk = fixed_point(g)
    a = alpha(g, fpk.mu) if k > 1 else None
    prod = product_invariance_check(k).product
    print(f"k={k}  E tau={fpk.E_tau:.6f}  2^(1+1/k)={2 ** (1 + 1 / k):.6f}  "
          f"alpha={a.alpha if a else 0.5:.4f}  product={prod:.4f}")
