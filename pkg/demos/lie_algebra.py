"""
Controllability of the six-term two-qubit Hamiltonian.

Brackets of iXI, iIX, iZI, iIZ, iZZ, iXX are generated breadth first until no
new direction appears. Reaching all 15 directions of su(4) means any unitary
(and so any density matrix with the same spectrum) is reachable. Adding an
arbitrary drift term cannot shrink that.
"""
import time

import numpy as np

from zzctrl import control_generators, dla_closure, format_report
from zzctrl.controllability import random_hermitian

gens = control_generators()
t0 = time.perf_counter()
lie = dla_closure(gens)
print(format_report(lie))
print(f"({time.perf_counter() - t0:.3f} s)\n")

# local terms plus a single ZZ coupling are already enough; XX is redundant
# for the algebra, though it helps the optimizer
small = gens.permuted([0, 1, 2, 3, 4])
print("without XX:", dla_closure(small).dimension)
only_local = gens.permuted([0, 1, 2, 3])
print("local terms only:", dla_closure(only_local).dimension, "(su(2) + su(2))")

rng = np.random.default_rng(0)
for mag in (0.1, 1.0, 10.0):
    dims = [dla_closure(gens.with_extra(1j * random_hermitian(rng, mag), "iHd")).dimension for _ in range(20)]
    print(f"drift magnitude {mag:>4}: dimensions {sorted(set(dims))}")
