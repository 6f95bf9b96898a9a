import pytest

from kmroots.cartan import (
    GcmError,
    MatrixKind,
    NonIntegral,
    NotGcm,
    NotSymmetrizable,
    ZeroNorm,
    affine_cartan_matrix,
    cartan_datum,
    finite_cartan_matrix,
    highest_root,
    is_finite_type,
    kind,
    pairing,
    parse_gcm_json,
)


def test_symmetrizer_is_minimal_integer():
    cd = cartan_datum(finite_cartan_matrix("B3"))
    assert cd.d == (2, 2, 1)
    for i in range(3):
        for j in range(3):
            assert cd.gram[i][j] == cd.gram[j][i]
    g2 = cartan_datum([[2, -3], [-1, 2]])
    assert g2.d == (1, 3)


def test_not_gcm_cells():
    with pytest.raises(NotGcm) as e:
        cartan_datum([[2, 1], [-1, 2]])
    assert e.value.cell == (0, 1)
    with pytest.raises(NotGcm) as e:
        cartan_datum([[2, 0], [-1, 2]])
    assert e.value.cell == (0, 1)
    with pytest.raises(NotGcm):
        cartan_datum([[3, -1], [-1, 2]])


def test_not_symmetrizable_cycle():
    with pytest.raises(NotSymmetrizable) as e:
        cartan_datum([[2, -1, -1], [-2, 2, -1], [-1, -1, 2]])
    assert len(e.value.cycle) >= 2


@pytest.mark.parametrize(
    "name,expected",
    [
        ("A3", MatrixKind.FINITE),
        ("G2", MatrixKind.FINITE),
        ("F4", MatrixKind.FINITE),
        ("E8", MatrixKind.FINITE),
    ],
)
def test_kind_finite(name, expected):
    assert kind(cartan_datum(finite_cartan_matrix(name)))[0][1] is expected


@pytest.mark.parametrize("name", ["A1", "A2", "B3", "C2", "D4", "G2", "F4", "E6"])
def test_affine_matrices_are_affine(name):
    cd = cartan_datum(affine_cartan_matrix(name))
    assert kind(cd) == [(tuple(range(cd.rank)), MatrixKind.AFFINE)]


def test_kind_indefinite_and_components():
    assert kind(cartan_datum([[2, -3], [-3, 2]]))[0][1] is MatrixKind.INDEFINITE
    cd = cartan_datum([[2, 0, 0], [0, 2, -1], [0, -1, 2]])
    assert [c for c, _ in kind(cd)] == [(0,), (1, 2)]
    assert is_finite_type(cd)


def test_highest_roots():
    assert highest_root(cartan_datum(finite_cartan_matrix("G2"))) == (3, 2)
    assert highest_root(cartan_datum(finite_cartan_matrix("C3"))) == (2, 2, 1)
    assert highest_root(cartan_datum(finite_cartan_matrix("E8"))) == (
        2,
        3,
        4,
        6,
        5,
        4,
        3,
        2,
    )
    assert highest_root(cartan_datum(finite_cartan_matrix("B3"))) == (1, 2, 2)


def test_pairing_errors():
    cd = cartan_datum(affine_cartan_matrix("A1"))
    with pytest.raises(ZeroNorm):
        pairing(cd, (1, 0), (1, 1))
    g2 = cartan_datum([[2, -3], [-1, 2]])
    assert pairing(g2, (1, 0), (0, 1)) == -1
    assert pairing(g2, (0, 1), (1, 0)) == -3
    with pytest.raises(NonIntegral):
        pairing(g2, (1, 0), (2, 2))


def test_parse_gcm_json():
    g = parse_gcm_json('{"rank": 2, "a": [[2, -4], [-1, 2]]}')
    assert g[0, 1] == -4 and g.to_json() == {"rank": 2, "a": [[2, -4], [-1, 2]]}
    with pytest.raises(GcmError):
        parse_gcm_json('{"rank": 3, "a": [[2, -4], [-1, 2]]}')
    with pytest.raises(GcmError):
        parse_gcm_json('{"rows": []}')
