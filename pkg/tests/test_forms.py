import json
from fractions import Fraction

import pytest

from oracles import convolve, delta_product, eisenstein_coeffs, sigma
from rcdirichlet.forms import (
    FormDescriptor,
    FormFileError,
    builtin_form,
    delta,
    divisor_sigma,
    eisenstein,
    load_form,
    save_form,
)
from rcdirichlet.qseries import GradingError, make_series


@pytest.mark.parametrize("k, n, expected", [(3, 1, 1), (3, 2, 9), (5, 2, 33)])
def test_divisor_sigma_examples(k, n, expected):
    assert divisor_sigma(k, n) == expected


def test_divisor_sigma_matches_naive():
    for k in (0, 1, 3, 5, 9, 11):
        for n in range(1, 200):
            assert divisor_sigma(k, n) == sigma(k, n)


def test_divisor_sigma_rejects_zero():
    with pytest.raises(ValueError):
        divisor_sigma(3, 0)


def test_eisenstein_examples():
    assert eisenstein(4, 3).series.coefficients(0) == (1, 240, 2160, 6720)
    assert eisenstein(6, 2).series.coefficients(0) == (1, -504, -16632)
    e2 = eisenstein(2, 1)
    assert e2.series.coefficients(0) == (1, -24)
    assert (e2.weight, e2.depth) == (2, 1)


def test_eisenstein_against_oracle():
    for k in (2, 4, 6):
        assert list(eisenstein(k, 40).series.coefficients(0)) == eisenstein_coeffs(k, 40)


def test_eisenstein_unsupported_weight():
    with pytest.raises(ValueError):
        eisenstein(8, 3)


def test_delta_examples():
    d = delta(3)
    assert d.series.coefficients(0) == (0, 1, -24, 252)
    assert (d.weight, d.depth) == (12, 0)


def test_delta_product_formula():
    assert list(delta(20).series.coefficients(0)) == delta_product(20)


def test_delta_integrality():
    e4 = eisenstein_coeffs(4, 60)
    e6 = eisenstein_coeffs(6, 60)
    num = [a - b for a, b in zip(convolve(convolve(e4, e4), e4), convolve(e6, e6))]
    assert all(x % 1728 == 0 for x in num)


def test_e4_e6_is_e10(E4, E6):
    prod = (E4.series * E6.series).coefficients(0)
    for n in range(1, 11):
        assert prod[n] == -264 * sigma(9, n)


def test_builtin_lookup():
    assert builtin_form("Delta", 4).name == "Delta"
    assert builtin_form("E6", 4).weight == 6
    with pytest.raises(ValueError):
        builtin_form("E12", 4)


def test_descriptor_invariants():
    s = make_series(1, 2, {1: [0, 1, 0]})
    with pytest.raises(GradingError):
        FormDescriptor("bad", 4, 0, s)
    with pytest.raises(ValueError):
        FormDescriptor("bad", 0, 1, s)
    assert FormDescriptor("ok", 4, 1, s).depth == 1


# -- files ----------------------------------------------------------------


def test_round_trip(tmp_path):
    fd = eisenstein(4, 10)
    path = tmp_path / "e4.json"
    save_form(fd, path)
    assert load_form(path) == fd
    text = path.read_bytes()
    save_form(load_form(path), path)
    assert path.read_bytes() == text


def test_round_trip_fractional_multigrade(tmp_path):
    s = make_series(Fraction(1, 3), 2, {0: [Fraction(-1, 2), 0, 7], 2: [0, Fraction(5, 9), 0]})
    fd = FormDescriptor("mixed", 6, 2, s)
    save_form(fd, tmp_path / "m.json")
    assert load_form(tmp_path / "m.json") == fd


def _write(tmp_path, **overrides):
    obj = {"name": "f", "weight": 4, "depth": 0, "width_h": "1", "precision": 2, "slices": {"0": ["1", "2", "3"]}}
    obj.update(overrides)
    path = tmp_path / "f.json"
    path.write_text(json.dumps(obj), encoding="utf-8")
    return path


def test_zero_denominator(tmp_path):
    with pytest.raises(FormFileError, match="zero"):
        load_form(_write(tmp_path, slices={"0": ["1", "3/0", "0"]}))


def test_homogeneity_violation(tmp_path):
    with pytest.raises(FormFileError, match="homogeneity"):
        load_form(_write(tmp_path, slices={"0": ["1", "0", "0"], "1": ["0", "1", "0"]}))


def test_non_reduced_fraction(tmp_path):
    with pytest.raises(FormFileError):
        load_form(_write(tmp_path, slices={"0": ["2/4", "0", "0"]}))


@pytest.mark.parametrize(
    "overrides, field",
    [
        ({"weight": "4"}, "weight"),
        ({"precision": 5}, "slices"),
        ({"width_h": "0"}, "width_h"),
        ({"name": 3}, "name"),
    ],
)
def test_field_named_in_error(tmp_path, overrides, field):
    with pytest.raises(FormFileError, match=field):
        load_form(_write(tmp_path, **overrides))


def test_malformed_json(tmp_path):
    path = tmp_path / "x.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(FormFileError, match="malformed"):
        load_form(path)


def test_unicode_minus_accepted(tmp_path):
    fd = load_form(_write(tmp_path, slices={"0": ["1", "−2", "3"]}))
    assert fd.series.coefficients(0)[1] == -2
