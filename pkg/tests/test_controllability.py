import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zzctrl.controllability import (
    GeneratorSet, control_generators, dla_closure, format_report, is_closed, is_dmc, random_hermitian,
)
from zzctrl.exceptions import DegenerateInput
from zzctrl.quantum import IZ, ZI

seeds = st.integers(0, 2**32 - 1)

_MUL = {("X", "Z"): "Y", ("Z", "X"): "Y", ("X", "Y"): "Z", ("Y", "X"): "Z", ("Y", "Z"): "X", ("Z", "Y"): "X"}


def pauli_bracket(p, q):
    """Label of [iP, iQ] up to a scalar, or None when the strings commute."""
    anti = sum(a != "I" and b != "I" and a != b for a, b in zip(p, q))
    if anti % 2 == 0:
        return None
    out = []
    for a, b in zip(p, q):
        out.append(b if a == "I" else a if b == "I" else "I" if a == b else _MUL[a, b])
    return "".join(out)


def symbolic_rounds(labels):
    """Breadth-first closure on Pauli labels, same pair schedule as the numeric engine."""
    basis = list(dict.fromkeys(labels))
    rounds = [len(basis)]
    frontier = list(range(len(basis)))
    while frontier:
        snapshot, start = len(basis), len(basis)
        for i in frontier:
            for j in range(snapshot):
                if j in frontier and j <= i:
                    continue
                c = pauli_bracket(basis[i], basis[j])
                if c is not None and c not in basis:
                    basis.append(c)
        if len(basis) == start:
            break
        rounds.append(len(basis) - start)
        frontier = list(range(start, len(basis)))
    return rounds, basis


def test_symbolic_oracle_sanity():
    assert pauli_bracket("XI", "ZI") == "YI"
    assert pauli_bracket("ZZ", "XX") is None
    assert pauli_bracket("XI", "IX") is None


def test_control_generators_reach_su4():
    lie = dla_closure(control_generators())
    assert lie.dimension == 15
    assert not lie.has_identity
    assert is_closed(lie)


def test_round_growth_matches_symbolic_pauli_closure():
    rounds, labels = symbolic_rounds(["XI", "IX", "ZI", "IZ", "ZZ", "XX"])
    assert len(labels) == 15
    lie = dla_closure(control_generators())
    assert lie.rounds == rounds
    # the first bracket round gives 6 new directions: YI, YZ, IY, ZY, YX, XY
    assert rounds == [6, 6, 3]


def test_single_generator_is_abelian():
    lie = dla_closure(GeneratorSet([1j * ZI], ["iZI"]))
    assert lie.dimension == 1
    assert lie.rounds == [1]


def test_commuting_pair_not_dmc():
    gens = GeneratorSet([1j * ZI, 1j * IZ], ["iZI", "iIZ"])
    assert dla_closure(gens).dimension == 2
    assert not is_dmc(gens)


def test_control_generators_dmc():
    assert is_dmc(control_generators())


@settings(max_examples=20, deadline=None)
@given(seeds, st.sampled_from([0.1, 1.0, 10.0]))
def test_drift_keeps_dmc(seed, mag):
    gens = control_generators().with_extra(1j * random_hermitian(np.random.default_rng(seed), mag), "iHd")
    lie = dla_closure(gens)
    assert lie.dimension == 15
    assert lie.has_identity  # a generic drift has a trace part, tracked separately


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_generic_pair_generates_su4(seed):
    rng = np.random.default_rng(seed)
    gens = GeneratorSet.from_hamiltonians([random_hermitian(rng), random_hermitian(rng)], ["A", "B"])
    assert is_dmc(gens)


@settings(max_examples=20, deadline=None)
@given(st.permutations(range(6)))
def test_order_independence(order):
    assert dla_closure(control_generators().permuted(order)).dimension == 15


@settings(max_examples=20, deadline=None)
@given(st.lists(st.sampled_from(range(6)), min_size=1, max_size=6, unique=True), seeds)
def test_monotone_under_added_generators(subset, seed):
    full = control_generators()
    gens = GeneratorSet([full.generators[i] for i in subset], [full.labels[i] for i in subset])
    extra = 1j * random_hermitian(np.random.default_rng(seed))
    assert dla_closure(gens.with_extra(extra, "iE")).dimension >= dla_closure(gens).dimension


def test_basis_stays_skew_hermitian_and_closed():
    rng = np.random.default_rng(3)
    gens = GeneratorSet.from_hamiltonians([random_hermitian(rng), np.kron(np.diag([1, -1]), np.eye(2))], ["A", "ZI"])
    lie = dla_closure(gens)
    for a in lie.basis:
        assert np.max(np.abs(a.conj().T + a)) < 1e-9
    assert is_closed(lie)


def test_scale_invariance():
    small = GeneratorSet([1e-6 * g for g in control_generators().generators])
    assert dla_closure(small).dimension == 15


def test_rejects_non_skew_hermitian():
    with pytest.raises(DegenerateInput):
        GeneratorSet([ZI])
    with pytest.raises(DegenerateInput):
        GeneratorSet([])


def test_zero_drift_is_ignored():
    base = dla_closure(control_generators())
    with_zero = dla_closure(control_generators().with_extra(np.zeros((4, 4)), "0"))
    assert with_zero.rounds == base.rounds


def test_report_lists_derivations():
    text = format_report(dla_closure(control_generators()))
    assert "dimension: 15" in text
    assert "[iXI, iZI]" in text
