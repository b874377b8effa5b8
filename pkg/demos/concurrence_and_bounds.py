"""
Concurrence and the ZZ range reachable by unitary evolution.

For any two-qubit state, conjugating by a unitary moves <ZZ> around a fixed
interval [m, M] set by the spectrum. The concurrence always sits inside it,
which is why a suitable unitary can make a ZZ readout equal the concurrence.
"""
from zzctrl import bell_state, concurrence, sample_state, spectrum_bounds, werner_state, zz_expectation

print("Bell state:", concurrence(bell_state("psi-")))

# Werner family: entangled above p = 1/3
for p in (0.0, 0.2, 1 / 3, 0.5, 0.8, 1.0):
    rho = werner_state(p)
    print(f"werner p={p:.3f}  C={concurrence(rho):.4f}  <ZZ>={zz_expectation(rho):+.4f}")

print()
print("kind    C       m        M")
for kind in ("pure", "mixed", "rank2"):
    for seed in range(3):
        b = spectrum_bounds(sample_state(kind, seed))
        print(f"{kind:<7s} {b.concurrence:.4f}  {b.m:+.4f}  {b.M:+.4f}")

# pure and rank-2 states can reach every value in [-1, 1]
tops = [spectrum_bounds(sample_state("mixed", s)).M for s in range(1000)]
print(f"\nfull-rank states: M ranges over [{min(tops):.3f}, {max(tops):.3f}]")
