"""Group models: lengths, cocycles, twists, serialization."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncpt.algebra import ModelError
from ncpt.models import (GroupSpec, build_twisted_group_algebra,
                         character_table, coboundary_length, dual_fourier,
                         explicit_length, load_model_file,
                         model_config_from_json, model_config_to_json,
                         sine2_length)


def test_z4_length_oracle(z4):
    _, _, ell, _, _ = z4
    assert np.allclose(ell.values, [0.0, 2.0, 4.0, 2.0], atol=1e-12)


def test_length_is_symmetric_and_cnd(z4, t5):
    for _, _, ell, _, _ in (z4, t5):
        assert ell.is_symmetric()
        assert ell.cnd_report()["pass"]


def test_explicit_non_cnd_control():
    spec = GroupSpec(orders=(4,))
    ell = explicit_length(spec, [0.0, 0.0, 1.0, 0.0])
    assert ell.is_symmetric()
    assert not ell.cnd_report()["pass"]


def test_cocycle_identity_and_length(z4, t5):
    for spec, _, ell, coc, _ in (z4, t5):
        assert coc.check_identity() <= 1e-12
        assert np.allclose(coc.length().values, ell.values, atol=1e-12)


def test_weight_symmetrization_preserves_length():
    spec = GroupSpec(orders=(4,))
    one_sided, coc = coboundary_length(spec, {(1,): 1.0})
    two_sided, _ = coboundary_length(spec, {(1,): 0.5, (3,): 0.5})
    assert np.allclose(one_sided.values, two_sided.values, atol=1e-12)
    # Symmetrization makes the real structure exist: C0 fixes every c(s).
    for s in spec.elements():
        c = coc.c[spec.index(s)]
        assert np.allclose(coc.real_conjugation(c), c, atol=1e-12)


def test_real_conjugation_commutes_with_pi(t5, rng):
    spec, _, _, coc, _ = t5
    v = rng.standard_normal(coc.rep_dim) + 1j * rng.standard_normal(coc.rep_dim)
    for s in spec.elements()[:7]:
        i = spec.index(s)
        lhs = coc.real_conjugation(coc.pi[i] @ v)
        rhs = coc.pi[i] @ coc.real_conjugation(v)
        assert np.allclose(lhs, rhs, atol=1e-12)


def test_twist_orientation_oracle():
    """V U = exp(2 pi i / 5) U V for the clock/shift pair."""
    spec = GroupSpec(orders=(5, 5), twist=(1, 5))
    model = build_twisted_group_algebra(spec)
    u = model.rep[spec.index((1, 0))]
    v = model.rep[spec.index((0, 1))]
    phase = np.exp(2j * np.pi / 5)
    assert np.allclose(v @ u, phase * (u @ v), atol=1e-12)


def test_twist_fraction_is_reduced():
    spec = GroupSpec(orders=(4, 4), twist=(2, 4))
    assert spec.twist == (1, 2)
    assert GroupSpec(orders=(4, 4), twist=(0, 3)).is_twisted is False


def test_twist_denominator_must_divide_first_two_orders():
    with pytest.raises(ModelError):
        build_twisted_group_algebra(GroupSpec(orders=(3, 2), twist=(1, 2)))
    with pytest.raises(ModelError):
        build_twisted_group_algebra(GroupSpec(orders=(4,), twist=(1, 2)))


def test_character_table_is_unitary_up_to_scale():
    spec = GroupSpec(orders=(3, 2))
    chars = character_table(spec)
    assert np.allclose(chars @ chars.conj().T, spec.size * np.eye(spec.size),
                       atol=1e-10)


def test_dual_fourier_of_trivial_function():
    spec = GroupSpec(orders=(4,))
    ft = dual_fourier(spec, np.ones(4))
    assert ft[0] == pytest.approx(4.0)
    assert np.allclose(ft[1:], 0.0, atol=1e-12)


def test_json_round_trip(z4):
    spec, _, ell, _, _ = z4
    text = model_config_to_json(spec, ell)
    spec2, ell2, coc2 = model_config_from_json(text)
    assert spec2 == spec
    assert np.allclose(ell2.values, ell.values, atol=1e-12)
    assert coc2 is not None


def test_load_model_files(data_paths):
    for key in ("z4", "t5"):
        spec, model, ell, coc = load_model_file(data_paths[key])
        assert model.dim == spec.size
        assert coc is not None
        assert ell.cnd_report()["pass"]
    _, _, ell, coc = load_model_file(data_paths["negative"])
    assert coc is None
    assert not ell.cnd_report()["pass"]


def test_unknown_model_kind_raises():
    with pytest.raises(ValueError):
        model_config_from_json(json.dumps({"kind": "nope"}))
    with pytest.raises(ValueError):
        model_config_from_json(json.dumps(
            {"kind": "twisted_group", "orders": [4],
             "length": {"kind": "mystery"}}))


def test_negative_weights_rejected():
    spec = GroupSpec(orders=(4,))
    with pytest.raises(ValueError):
        coboundary_length(spec, {(1,): -1.0})
    with pytest.raises(ValueError):
        coboundary_length(spec, {})


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=2, max_value=7), st.integers(min_value=0, max_value=6))
def test_sine2_length_closed_form(q, shift):
    spec = GroupSpec(orders=(q,))
    ell, _ = sine2_length(spec)
    s = shift % q
    expected = 4.0 * np.sin(np.pi * s / q) ** 2
    assert ell.value((s,)) == pytest.approx(expected, abs=1e-10)
