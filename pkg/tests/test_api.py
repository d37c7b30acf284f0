import pytest
from fastapi.testclient import TestClient

from app.main import app

client = TestClient(app)


def test_root():
    response = client.get("/")
    assert response.status_code == 200
    assert "Legendre" in response.json()["message"]


def test_field_summary():
    data = client.get("/fields/7", params={"s": 2}).json()
    assert data == {"p": 7, "s": 2, "q": 49, "modulus": [1, 0, 1], "generator": 9}
    assert client.get("/fields/13").json()["generator"] == 2


def test_field_modulus_is_leading_coefficient_first():
    # x^3 + x + 1 is the smallest monic irreducible cubic over F_5
    assert client.get("/fields/5", params={"s": 3}).json()["modulus"] == [1, 0, 1, 1]


@pytest.mark.parametrize("path, params", [("/fields/8", {}), ("/fields/3", {}), ("/fields/7", {"s": 9})])
def test_field_errors(path, params):
    assert client.get(path, params=params).status_code == 400


def test_gauss_sum():
    data = client.get("/charsums/gauss", params={"p": 13, "M": 12, "a": 1}).json()
    z = complex(float(data["complex"]["re"]), float(data["complex"]["im"]))
    assert abs(abs(z) ** 2 - 13) < 1e-8
    assert data["value"]["M"] == 12


def test_gauss_sum_over_extension_field():
    data = client.get("/charsums/gauss", params={"p": 7, "M": 8, "a": 1, "s": 2}).json()
    assert data["value"] is None
    z = complex(float(data["complex"]["re"]), float(data["complex"]["im"]))
    assert abs(abs(z) ** 2 - 49) < 1e-6


def test_jacobi_quotient():
    params = {"p": 11, "M": 10, "a": 1, "b": 6, "c": 2, "d": 5}
    data = client.get("/charsums/jacobi", params=params).json()
    assert data["quotient"]["root_exponent"] == 8


def test_jacobi_errors():
    assert client.get("/charsums/jacobi", params={"p": 11, "M": 10, "a": 1, "b": 6, "c": 2}).status_code == 400
    assert client.get("/charsums/jacobi", params={"p": 11, "M": 4, "a": 1, "b": 1}).status_code == 400


def test_hypergeometric_function():
    params = {"p": 7, "M": 6, "A": 1, "B": 2, "C": -1, "lambda": 3}
    data = client.get("/charsums/hgf", params=params).json()
    assert data["agree"] is True

    only_def = client.get("/charsums/hgf", params={**params, "via": "def"}).json()
    assert only_def["expansion"] is None
    assert only_def["agree"] is None


def test_hypergeometric_field_bound():
    params = {"p": 131, "M": 2, "A": 1, "B": 1, "C": 1, "lambda": 2, "via": "sum"}
    assert client.get("/charsums/hgf", params=params).status_code == 400


def test_count():
    params = {"N": 3, "i": 1, "j": 2, "k": 1, "lambda": "2", "p": 7}
    data = client.get("/curves/count", params=params).json()
    assert data["brute"]["total"] == 10
    assert data["hgf"]["total"] == 10
    assert data["agree"] is True


def test_count_errors():
    base = {"N": 3, "i": 1, "j": 2, "k": 1, "p": 7}
    assert client.get("/curves/count", params={**base, "lambda": "1"}).status_code == 400
    assert client.get("/curves/count", params={**base, "lambda": "8"}).status_code == 400
    assert client.get("/curves/count", params={**base, "lambda": "2", "p": 11, "method": "hgf"}).status_code == 400
    assert client.get("/curves/count", params={**base, "lambda": "2", "method": "fast"}).status_code == 422


def test_lpoly():
    params = {"N": 5, "i": 1, "j": 4, "k": 1, "lambda": "2/1", "p": 7}
    data = client.get("/curves/lpoly", params=params).json()
    assert data == {"p": 7, "g": 4, "coeffs": [1, 0, 0, 0, -2, 0, 0, 0, 2401]}


def test_invariants():
    data = client.get("/curves/invariants", params={"N": 6, "i": 4, "j": 3, "k": 1}).json()
    assert data["genus"] == 3
    assert data["dim_Vn"] == {"1": 1, "5": 1}
    assert data["hypergeometric_parameters"] == ["1/6", "1/3", "5/6"]
    assert data["triangle_denominators"] == [6, 3, 6]
    assert client.get("/curves/invariants", params={"N": 6, "i": 2, "j": 4, "k": 2}).status_code == 400


def test_periods():
    params = {"N": 6, "i": 4, "j": 3, "k": 1, "lambda": "0.3", "precision": 20}
    data = client.get("/periods/tau", params=params).json()
    assert data["family"] == "[6;4,3,1]"
    assert sorted(data["periods"]) == ["1", "5"]
    assert data["gamma_check"]["passed"] is True


def test_periods_without_gamma_check():
    params = {"N": 5, "i": 1, "j": 4, "k": 1, "lambda": "0.3", "precision": 20}
    data = client.get("/periods/tau", params=params).json()
    assert data["gamma_check"] is None
    assert sorted(data["periods"]) == ["1", "2", "3", "4"]


def test_periods_errors():
    base = {"N": 6, "i": 4, "j": 3, "k": 1}
    assert client.get("/periods/tau", params={**base, "lambda": "1.5"}).status_code == 400
    assert client.get("/periods/tau", params={**base, "lambda": "0.3", "precision": 500}).status_code == 422


def test_qm_check():
    data = client.get("/periods/qm-check", params={"N": 6, "i": 4, "j": 3, "k": 1, "primes": "7,13"}).json()
    assert data["verdict"] == "QM"
    assert data["jacobi_exponents"] == [4, 5, 1]
    assert data["recognition"]["coefficients"] == ["1/4"]


def test_qm_check_errors():
    assert client.get("/periods/qm-check", params={"N": 5, "i": 1, "j": 4, "k": 1}).status_code == 400
    assert client.get("/periods/qm-check", params={"N": 6, "i": 4, "j": 3, "k": 1, "primes": "a,b"}).status_code == 400
