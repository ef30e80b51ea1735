"""Random walks, fractal norms and Schreier-graph machinery for the Basilica
group and other self-similar groups acting on rooted trees.

Words are strings: a lowercase letter is a generator, the matching
uppercase letter its inverse.  Groups act on the right, ``v^(gh) = (v^g)^h``,
with sections composing as ``(gh)[v] = g[v] h[v^g]``.
"""

from .automata import AutomatonGroup, basilica, load_definition, odometer, parse_definition, preset
from .elements import ball, table_for, word_norm
from .nu import nu, nu_ball
from .presentation import relator, sigma_sub, verify_relations
from .schreier import (alpha, build_schreier, fixed_point, irreducible_cycles, k_example,
                       product_invariance_check, refine)
from .walk import f, run, t_circ

__version__ = "0.1.0"

__all__ = [
    "AutomatonGroup", "alpha", "ball", "basilica", "build_schreier", "f", "fixed_point",
    "irreducible_cycles", "k_example", "load_definition", "nu", "nu_ball", "odometer",
    "parse_definition", "preset", "product_invariance_check", "refine", "relator", "run",
    "sigma_sub", "t_circ", "table_for", "verify_relations", "word_norm",
]
