"""Blade bookkeeping against brute-force oracles.

Every identity here is checked against an independent computation built from
``itertools`` and raw determinants, so a sign or indexing slip in the package
cannot cancel itself out.
"""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from affdim.exterior_algebra import (
    MAX_DIM,
    CompoundMatrix,
    ExteriorVector,
    MultiIndex,
    apply_map,
    compound_matrix,
    exterior_inner,
    hodge_star,
    multi_indices,
    wedge,
)
from conftest import random_nonsingular, rng_for

# ---------------------------------------------------------------------------
# oracles


def lex_indices(d: int, m: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(1, d + 1), m))


def minor_oracle(S, rows, cols) -> float:
    S = np.asarray(S, dtype=float)
    idx_r = [r - 1 for r in rows]
    idx_c = [c - 1 for c in cols]
    sub = S[np.ix_(idx_r, idx_c)]
    return float(np.linalg.det(sub)) if len(rows) else 1.0


def perm_sign_oracle(seq) -> int:
    """Sign by explicit inversion count; no reuse of package code."""
    inv = 0
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return -1 if inv % 2 else 1


def wedge_oracle(vectors) -> np.ndarray:
    """Plucker coordinates as raw minors of the stacked column matrix."""
    M = np.column_stack([np.asarray(v, dtype=float) for v in vectors])
    d, m = M.shape
    return np.array([minor_oracle(M, rows, range(1, m + 1)) for rows in lex_indices(d, m)])


def volume_coefficient_oracle(v: ExteriorVector, w: ExteriorVector) -> float:
    """Coefficient of e_1^...^e_d in v ^ star(w), expanded blade by blade."""
    d, m = v.d, v.m
    sw = hodge_star(w)
    total = 0.0
    blades_m = lex_indices(d, m)
    blades_c = lex_indices(d, d - m)
    for J, vj in zip(blades_m, v.coords):
        comp = tuple(i for i in range(1, d + 1) if i not in J)
        # v_J e_J ^ (sw)_{J^c} e_{J^c} = v_J (sw)_{J^c} sgn(J, J^c) omega
        total += vj * sw.coords[blades_c.index(comp)] * perm_sign_oracle(J + comp)
    return total


# ---------------------------------------------------------------------------
# multi-indices and vectors


def test_multi_indices_are_lexicographic():
    assert lex_indices(4, 2) == [mi for mi in multi_indices(4, 2)]
    assert len(multi_indices(5, 3)) == math.comb(5, 3)
    assert multi_indices(3, 0) == ((),)


def test_multi_index_validation():
    MultiIndex(4, (1, 3))
    with pytest.raises(ValueError):
        MultiIndex(4, (3, 1))
    with pytest.raises(ValueError):
        MultiIndex(4, (0, 2))
    with pytest.raises(ValueError):
        MultiIndex(4, (2, 5))
    with pytest.raises(ValueError):
        MultiIndex(4, (2, 2))


def test_multi_index_complement():
    assert MultiIndex(5, (1, 4)).complement().entries == (2, 3, 5)
    assert MultiIndex(3, ()).complement().entries == (1, 2, 3)


def test_exterior_vector_validation():
    ExteriorVector(4, 2, np.zeros(6))
    with pytest.raises(ValueError):
        ExteriorVector(4, 2, np.zeros(5))
    with pytest.raises(ValueError):
        ExteriorVector(4, 5, np.zeros(1))
    v = ExteriorVector(3, 0, [2.5])
    assert v.coords.shape == (1,)


def test_dimension_guard():
    with pytest.raises(ValueError):
        multi_indices(MAX_DIM + 1, 2)


# ---------------------------------------------------------------------------
# wedge


def test_wedge_basis_blade():
    v = wedge([np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])])
    assert np.array_equal(v.coords, [1.0, 0.0, 0.0])


def test_wedge_repeated_vector_is_zero():
    x = np.array([1.0, -2.0, 0.5])
    v = wedge([x, x])
    assert np.allclose(v.coords, 0.0)


def test_plucker_coordinates_match_minor_oracle():
    v1 = np.array([1.0, 2.0, 0.0, 1.0])
    v2 = np.array([0.0, 1.0, 1.0, 3.0])
    hand = [1.0, 1.0, 3.0, 2.0, 5.0, -1.0]  # 2x2 minors worked out by hand
    assert np.allclose(wedge_oracle([v1, v2]), hand, atol=1e-12)
    got = wedge([v1, v2])
    assert np.allclose(got.coords, hand, atol=1e-12)


@given(st.integers(0, 10**6), st.integers(2, 5), st.integers(1))
def test_wedge_matches_minor_oracle(seed, d, _):
    rng = rng_for(seed)
    m = int(rng.integers(1, d + 1))
    vectors = [rng.standard_normal(d) for _ in range(m)]
    got = wedge(vectors).coords
    want = wedge_oracle(vectors)
    assert np.allclose(got, want, atol=1e-10 * max(1.0, np.abs(want).max()))


def test_wedge_errors():
    with pytest.raises(ValueError):
        wedge([])
    with pytest.raises(ValueError):
        wedge([np.zeros(3), np.zeros(2)])
    with pytest.raises(ValueError):
        wedge([np.zeros(2)] * 3)


# ---------------------------------------------------------------------------
# hodge star


def test_star_of_e1e2_in_r3():
    v = ExteriorVector.basis_blade(3, (1, 2))
    sv = hodge_star(v)
    assert sv.m == 1
    # grade-1 basis order: (e1, e2, e3); (1,2,3) is an even permutation
    assert np.array_equal(sv.coords, [0.0, 0.0, 1.0])


def test_star_of_e2_in_r3_is_minus_e1e3():
    v = ExteriorVector.basis_blade(3, (2,))
    sv = hodge_star(v)
    assert sv.m == 2
    # grade-2 basis order: (e1^e2, e1^e3, e2^e3)
    assert np.array_equal(sv.coords, [0.0, -1.0, 0.0])


@given(st.integers(1, 6), st.integers(0, 10**6))
def test_star_table_matches_permutation_oracle(d, seed):
    for m in range(d + 1):
        for J in lex_indices(d, m):
            comp = tuple(i for i in range(1, d + 1) if i not in J)
            sv = hodge_star(ExteriorVector.basis_blade(d, J))
            want = np.zeros(math.comb(d, d - m))
            want[lex_indices(d, d - m).index(comp)] = perm_sign_oracle(J + comp)
            assert np.array_equal(sv.coords, want), (d, m, J)


@given(st.integers(0, 10**6), st.integers(1, 6))
def test_double_star_sign(seed, d):
    rng = rng_for(seed)
    m = int(rng.integers(0, d + 1))
    v = ExteriorVector(d, m, rng.standard_normal(math.comb(d, m)))
    vv = hodge_star(hodge_star(v))
    sign = (-1) ** (m * (d - m))
    assert np.allclose(vv.coords, sign * v.coords, atol=1e-14 * max(1.0, np.abs(v.coords).max()))


# ---------------------------------------------------------------------------
# inner product


def test_inner_orthonormal_blades_exactly():
    for d in (2, 3, 4):
        for m in range(d + 1):
            blades = lex_indices(d, m)
            for J in blades:
                for K in blades:
                    val = exterior_inner(
                        ExteriorVector.basis_blade(d, J), ExteriorVector.basis_blade(d, K)
                    )
                    assert val == (1.0 if J == K else 0.0)


@given(st.integers(0, 10**6), st.integers(1, 6))
def test_inner_equals_wedge_star_route(seed, d):
    rng = rng_for(seed)
    m = int(rng.integers(0, d + 1))
    n = math.comb(d, m)
    v = ExteriorVector(d, m, rng.standard_normal(n))
    w = ExteriorVector(d, m, rng.standard_normal(n))
    direct = exterior_inner(v, w)
    via_volume = volume_coefficient_oracle(v, w)
    scale = max(1.0, abs(direct))
    assert abs(direct - via_volume) <= 1e-12 * scale
    assert abs(direct - float(v.coords @ w.coords)) <= 1e-12 * scale


def test_inner_mismatch_errors():
    a = ExteriorVector.basis_blade(3, (1,))
    b = ExteriorVector.basis_blade(3, (1, 2))
    c = ExteriorVector.basis_blade(4, (1,))
    with pytest.raises(ValueError):
        exterior_inner(a, b)
    with pytest.raises(ValueError):
        exterior_inner(a, c)


# ---------------------------------------------------------------------------
# compound matrices


def test_compound_identity_and_scalars():
    for d in (2, 3, 4):
        for m in range(d + 1):
            C = compound_matrix(np.eye(d), m)
            assert np.array_equal(C.entries, np.eye(math.comb(d, m)))
    S = rng_for(5).standard_normal((3, 3))
    assert np.allclose(compound_matrix(S, 3).entries, [[np.linalg.det(S)]], rtol=1e-12)
    assert np.array_equal(compound_matrix(S, 0).entries, [[1.0]])


def test_compound_of_diagonal():
    C = compound_matrix(np.diag([2.0, 3.0, 5.0]), 2)
    assert np.allclose(C.entries, np.diag([6.0, 10.0, 15.0]), atol=1e-14)


@given(st.integers(0, 10**6), st.integers(2, 5))
def test_compound_entries_match_minor_oracle(seed, d):
    rng = rng_for(seed)
    S = rng.standard_normal((d, d))
    for m in range(d + 1):
        C = compound_matrix(S, m).entries
        blades = lex_indices(d, m)
        want = np.array([[minor_oracle(S, J, I) for I in blades] for J in blades])
        assert np.allclose(C, want, atol=1e-10 * max(1.0, np.abs(want).max())), (d, m)


@given(st.integers(0, 10**6), st.integers(2, 5))
def test_cauchy_binet_functoriality(seed, d):
    rng = rng_for(seed)
    A = rng.standard_normal((d, d))
    B = rng.standard_normal((d, d))
    for m in range(d + 1):
        left = compound_matrix(A @ B, m).entries
        right = compound_matrix(A, m).entries @ compound_matrix(B, m).entries
        scale = max(1.0, float(np.abs(right).max()))
        assert np.abs(left - right).max() <= 1e-9 * scale


@given(st.integers(0, 10**6), st.integers(2, 5))
def test_compound_adjoint(seed, d):
    rng = rng_for(seed)
    A = rng.standard_normal((d, d))
    m = int(rng.integers(1, d + 1))
    n = math.comb(d, m)
    v = ExteriorVector(d, m, rng.standard_normal(n))
    w = ExteriorVector(d, m, rng.standard_normal(n))
    lhs = exterior_inner(apply_map(A, v), w)
    rhs = exterior_inner(v, apply_map(A.T, w))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs), abs(rhs))


def test_compound_out_of_range():
    with pytest.raises(ValueError):
        compound_matrix(np.eye(3), 4)
    with pytest.raises(ValueError):
        compound_matrix(np.eye(3), -1)
    with pytest.raises(ValueError):
        compound_matrix(np.ones((2, 3)), 1)


def test_compound_apply_grade_mismatch():
    C = compound_matrix(np.eye(3), 2)
    with pytest.raises(ValueError):
        C.apply(ExteriorVector.basis_blade(3, (1,)))
    with pytest.raises(ValueError):
        C.apply(ExteriorVector.basis_blade(4, (1, 2)))
    assert isinstance(C, CompoundMatrix)


# ---------------------------------------------------------------------------
# induced action


def test_apply_map_identity_and_determinant():
    v = ExteriorVector(2, 1, [1.0, -2.0])
    assert np.array_equal(apply_map(np.eye(2), v).coords, v.coords)
    top = ExteriorVector.basis_blade(2, (1, 2))
    got = apply_map(np.diag([2.0, 3.0]), top)
    assert np.allclose(got.coords, [6.0], atol=1e-14)


@given(st.integers(0, 10**6), st.integers(2, 5))
@settings(max_examples=60)
def test_apply_map_commutes_with_wedge(seed, d):
    rng = rng_for(seed)
    S = random_nonsingular(rng, d)
    m = int(rng.integers(1, d + 1))
    vectors = [rng.standard_normal(d) for _ in range(m)]
    lhs = apply_map(S, wedge(vectors)).coords
    rhs = wedge([S @ x for x in vectors]).coords
    assert np.allclose(lhs, rhs, atol=1e-9 * max(1.0, np.abs(rhs).max()))
