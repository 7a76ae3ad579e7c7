import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scarlab.geometry import Geometry
from scarlab.gf2 import Gf2System, Infeasible, check_solution, enumerate_affine, gf2_affine_solutions, gf2_rank
from scarlab.pauli import PauliString, pauli_mul, pauli_product


def paulis(n):
    return st.builds(
        PauliString,
        st.just(n),
        st.integers(0, (1 << n) - 1),
        st.integers(0, (1 << n) - 1),
        st.integers(0, 3),
    )


def test_label_roundtrip():
    for lab in ["+XIZY", "-YYI", "+iZ", "-iXZ"]:
        assert PauliString.from_label(lab).label() == lab


def test_y_is_i_x_z():
    y = PauliString.from_label("Y").to_sparse().toarray()
    assert np.allclose(y, [[0, -1j], [1j, 0]])


@settings(derandomize=True, max_examples=60)
@given(paulis(3), paulis(3))
def test_product_matches_matrices(a, b):
    ab = pauli_mul(a, b).to_sparse().toarray()
    assert np.allclose(ab, (a.to_sparse() @ b.to_sparse()).toarray())


@settings(derandomize=True, max_examples=60)
@given(paulis(4), paulis(4))
def test_commutes_matches_matrices(a, b):
    A, B = a.to_sparse(), b.to_sparse()
    comm = abs(A @ B - B @ A).max()
    assert a.commutes(b) == (comm < 1e-12)


@settings(derandomize=True, max_examples=60)
@given(paulis(5), paulis(5), paulis(5))
def test_product_is_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@settings(derandomize=True, max_examples=60)
@given(paulis(4))
def test_square_is_plus_or_minus_identity(p):
    sq = p * p
    assert sq.is_identity()
    assert sq.phase in (0, 2)
    assert (sq.phase == 0) == p.is_hermitian()


def test_pauli_product_of_empty_list_is_identity():
    assert pauli_product([], 3) == PauliString.identity(3)


def test_mask_outside_register_rejected():
    with pytest.raises(ValueError):
        PauliString(2, x_mask=4)


@settings(derandomize=True, max_examples=80)
@given(st.lists(st.integers(0, 255), min_size=1, max_size=10))
def test_rank_bounds(rows):
    r = gf2_rank(rows)
    assert 0 <= r <= min(len(rows), 8)
    assert gf2_rank(rows + [rows[0]]) == r


@settings(derandomize=True, max_examples=80)
@given(st.integers(1, 10), st.lists(st.tuples(st.integers(0, 1023), st.integers(0, 1)), max_size=8))
def test_affine_solutions_solve_the_system(n, rows):
    rows = [(c & ((1 << n) - 1), p) for c, p in rows]
    system = Gf2System.from_rows(n, rows)
    try:
        part, basis = gf2_affine_solutions(system)
    except Infeasible:
        brute = [x for x in range(1 << n) if check_solution(system, x)]
        assert brute == []
        return
    pts = enumerate_affine(part, basis)
    brute = sorted(x for x in range(1 << n) if check_solution(system, x))
    assert sorted(pts.tolist()) == brute
    assert len(basis) == n - gf2_rank([c for c, _ in rows])


def test_inconsistent_system_raises():
    system = Gf2System.from_rows(2, [(0b11, 0), (0b11, 1)])
    with pytest.raises(Infeasible):
        gf2_affine_solutions(system)


@pytest.mark.parametrize("L,k", [(3, 2), (4, 2), (4, 3), (5, 3), (4, 4)])
def test_geometry_counts(L, k):
    geom = Geometry(L, k)
    assert geom.n_links == 2 * L * k
    assert geom.n_plaquettes == L * k
    assert len(geom.site_masks) == L * k
    for mask in geom.plaquette_masks:
        assert bin(mask).count("1") == 4
    for mask in geom.site_masks:
        assert bin(mask).count("1") == 4
    # every link sits on exactly two plaquettes and two sites
    for masks in (geom.plaquette_masks, geom.site_masks):
        counts = [sum((m >> q) & 1 for m in masks) for q in range(geom.n_links)]
        assert counts == [2] * geom.n_links


@pytest.mark.parametrize("L,k", [(3, 2), (4, 3)])
def test_gauss_laws_commute_with_plaquettes_and_multiply_to_one(L, k):
    geom = Geometry(L, k)
    gauss = [geom.gauss_operator(s) for s in range(geom.n_sites)]
    plaq = [geom.plaquette_operator(p) for p in range(1, geom.n_plaquettes + 1)]
    assert all(G.commutes(P) for G in gauss for P in plaq)
    assert pauli_product(gauss, geom.n_links).is_identity()
    assert pauli_product(plaq, geom.n_links).is_identity()


def test_ribbons_commute_with_plaquettes():
    geom = Geometry(5, 2)
    for mask in (geom.ribbon_x_mask, geom.ribbon_y_mask):
        R = PauliString.z_on(geom.n_links, mask)
        for p in range(1, geom.n_plaquettes + 1):
            assert R.commutes(geom.plaquette_operator(p))


def test_link_ids():
    geom = Geometry(4, 2)
    assert geom.h(1, 0) == 4 and geom.v(1, 1) == 7
    assert geom.link_coords(geom.v(3, 1)) == (3, 1, "v")


def test_constraint_system_dimension():
    geom = Geometry(4, 2)
    part, basis = gf2_affine_solutions(geom.constraint_system(1, -1))
    # 16 links, 8 sites with one dependent Gauss law, two ribbons
    assert len(basis) == 16 - 7 - 2
