# The Basilica group as an automaton: a = (1, b), b = (1, a) eps
from basilica import ball, basilica, verify_relations
from basilica.presentation import relator, sigma_sub

G = basilica()
print(G.to_text())

# sections and root permutation of a few words
for w in ["a", "b", "bb", "ab", "ABab"]:
    perm, secs = G.split(w)
    print(f"{w:6s} perm={perm} sections={secs}")

# b^2 = (a, a): the anchor for the right-action convention
assert G.split("bb") == ((0, 1), ("a", "a"))

# word problem
print("[a,b] trivial?", G.is_trivial("ABab"))
print("[a,a^b] trivial?", G.is_trivial(relator(0)))

# growth of word balls
print("ball sizes:", [len(ball(G, n)) for n in range(8)])

# relators under the substitution a -> b^2, b -> a
w = relator(0)
for n in range(4):
    print(n, len(w), w if len(w) < 30 else w[:27] + "...")
    w = sigma_sub(w)

rep = verify_relations(6)
print("all relators trivial:", rep.all_pass)
