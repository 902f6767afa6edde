"""Offline tests for beta coefficients, couplings and mixing-rate models.

Scenarios:
- beta_discrete on product, diagonal and random joints
- beta_discrete equals the expected conditional total variation
- Coupling mismatch rate, marginal law and independence from A
- Mixing models: formulas, monotonicity, table lookups and extrapolation
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from netustat.exceptions import ExtrapolationError, InvalidArgumentError
from netustat.mixing import (
    BerbeeCoupler,
    DependencyGraphMixing,
    DiscreteJoint,
    GeometricMixing,
    IndependentMixing,
    MixingModel,
    TableMixing,
    beta_discrete,
    beta_model,
    beta_q,
    beta_via_conditional_tv,
    berbee_couple,
    coupling_summary,
)
from scipy.stats import chi2_contingency


def _random_joint(rng: np.random.Generator, k1: int, k2: int) -> DiscreteJoint:
    weights = rng.random((k1, k2)) ** 3
    return DiscreteJoint(weights / weights.sum())


def test_product_joint_has_zero_beta() -> None:
    joint = DiscreteJoint(np.outer([0.2, 0.8], [0.1, 0.3, 0.6]))
    assert beta_discrete(joint) == pytest.approx(0.0, abs=1e-15)


def test_perfectly_dependent_fair_coin() -> None:
    joint = DiscreteJoint(np.diag([0.5, 0.5]))
    assert beta_discrete(joint) == pytest.approx(0.5)


def test_beta_identities_on_random_joints(rng) -> None:
    """Both formulas agree, stay in [0, 1] and ignore atom order."""

    for _ in range(100):
        joint = _random_joint(rng, int(rng.integers(1, 6)), int(rng.integers(1, 6)))
        beta = beta_discrete(joint)
        assert 0.0 <= beta <= 1.0
        assert abs(beta - beta_via_conditional_tv(joint)) <= 1e-12
        shuffled = joint.pmf[rng.permutation(joint.pmf.shape[0])][
            :, rng.permutation(joint.pmf.shape[1])
        ]
        assert beta_discrete(DiscreteJoint(shuffled)) == pytest.approx(beta, abs=1e-12)


def test_zero_probability_atoms_do_not_change_beta(rng) -> None:
    joint = _random_joint(rng, 3, 3)
    padded = np.zeros((4, 4))
    padded[:3, :3] = joint.pmf
    assert beta_discrete(DiscreteJoint(padded)) == pytest.approx(beta_discrete(joint), abs=1e-12)


def test_joint_validation() -> None:
    with pytest.raises(InvalidArgumentError):
        DiscreteJoint(np.array([[0.5, 0.4]]))
    with pytest.raises(InvalidArgumentError):
        DiscreteJoint(np.array([[1.5, -0.5]]))
    with pytest.raises(InvalidArgumentError):
        DiscreteJoint(np.array([0.5, 0.5]))
    joint = DiscreteJoint(np.array([[0.5, 0.5]]), a_atoms=("only",), y_atoms=("h", "t"))
    assert joint.y_atoms == ("h", "t")


def test_independent_joint_never_mismatches() -> None:
    joint = DiscreteJoint(np.outer([0.3, 0.7], [0.5, 0.5]))
    _a, y, y_tilde = berbee_couple(joint, np.random.default_rng(1)).sample(5000)
    assert np.array_equal(y, y_tilde)


def test_fair_coin_coupling_mismatch_rate() -> None:
    summary = coupling_summary(DiscreteJoint(np.diag([0.5, 0.5])), 100_000, seed=7)
    assert summary["beta"] == pytest.approx(0.5)
    assert abs(summary["mismatch_rate"] - 0.5) < 0.01


def test_coupling_matches_beta_marginal_and_independence(rng) -> None:
    """Mismatch rate within 3 MC standard errors, marginal within 4; (A, Y~) independent."""

    joint = _random_joint(rng, 3, 4)
    draws = 100_000
    coupler = BerbeeCoupler(joint, np.random.default_rng(11))
    a, y, y_tilde = coupler.sample(draws)

    beta = beta_discrete(joint)
    rate = float(np.mean(y != y_tilde))
    assert abs(rate - beta) <= 3 * math.sqrt(beta * (1 - beta) / draws) + 1e-12

    freq = np.bincount(y_tilde, minlength=4) / draws
    se = np.sqrt(joint.p_y * (1 - joint.p_y) / draws)
    assert np.all(np.abs(freq - joint.p_y) <= 4 * se + 1e-12)

    table = np.zeros((3, 4))
    np.add.at(table, (a, y_tilde), 1)
    assert chi2_contingency(table).pvalue > 0.01


def test_geometric_model_formula() -> None:
    model = GeometricMixing(0.5)
    assert beta_model(model, 1, 1, 3) == pytest.approx(0.125)
    assert model.beta(1, math.inf, 0) == 1.0
    assert GeometricMixing(0.5, scale=10.0).beta(1, 1, 1) == 1.0


def test_dependency_graph_and_independent_models() -> None:
    graph = DependencyGraphMixing(1.0)
    assert graph.beta(2, math.inf, 2) == 0.0
    assert graph.beta(2, 2, 1) == 1.0
    assert IndependentMixing().beta(4, 4, 0.5) == 0.0
    assert IndependentMixing().beta(4, 4, 0) == 1.0


def test_models_non_increasing_in_m() -> None:
    models: list[MixingModel] = [
        IndependentMixing(),
        GeometricMixing(0.8, scale=3.0),
        DependencyGraphMixing(2.0),
    ]
    grid = np.linspace(0, 10, 41)
    for model in models:
        values = [model.beta(1, 3, m) for m in grid]
        assert all(b >= c for b, c in zip(values, values[1:], strict=False))


def _table() -> TableMixing:
    values = np.array(
        [
            [[0.9, 0.5, 0.1], [0.95, 0.6, 0.2]],
            [[0.95, 0.6, 0.2], [1.0, 0.7, 0.3]],
        ]
    )
    return TableMixing((1, 2), (1, 4), (0.0, 1.0, 2.0), values)


def test_table_lookup_is_conservative() -> None:
    table = _table()
    assert table.beta(1, 1, 1) == 0.5
    # n2 = 3 resolves to the n2 = 4 column, m = 1.5 to the m = 1 slice
    assert table.beta(1, 3, 1.5) == 0.6
    assert table.beta(2, 4, 2) == 0.3


def test_table_refuses_extrapolation() -> None:
    table = _table()
    # m past the last radius
    with pytest.raises(ExtrapolationError, match="outside the grid"):
        table.beta(2, 4, 5)
    with pytest.raises(ExtrapolationError):
        table.beta(1, 1, 2.0000001)
    with pytest.raises(ExtrapolationError):
        table.beta(1, 1, math.inf)
    single = TableMixing((1,), (1,), (0.0, 1.0), np.array([[[0.9, 0.5]]]))
    assert single.beta(1, 1, 1) == 0.5
    with pytest.raises(ExtrapolationError):
        single.beta(1, 1, 1000)
    with pytest.raises(ExtrapolationError):
        table.beta(3, 1, 1)
    with pytest.raises(ExtrapolationError):
        table.beta(1, math.inf, 1)


def test_table_rejects_non_monotone_values() -> None:
    values = np.array([[[0.1, 0.5]]])
    with pytest.raises(InvalidArgumentError):
        TableMixing((1,), (1,), (0.0, 1.0), values)


def test_model_from_dict_dispatch() -> None:
    assert isinstance(MixingModel.from_dict({"kind": "independent"}), IndependentMixing)
    geometric = MixingModel.from_dict({"kind": "geometric", "rho": 0.5, "scale": 2.0})
    assert geometric.beta(1, 1, 2) == pytest.approx(0.5)
    assert MixingModel.from_dict({"kind": "dependency_graph", "cutoff": 1}).beta(1, 1, 2) == 0.0
    with pytest.raises(InvalidArgumentError):
        MixingModel.from_dict({"kind": "alpha"})


def test_beta_q_takes_the_worst_split() -> None:
    table = _table()
    # q = 3 splits into (1, 2) and (2, 1)
    assert beta_q(table, 3, 0) == max(table.beta(1, 2, 0), table.beta(2, 1, 0))
    with pytest.raises(InvalidArgumentError):
        beta_q(GeometricMixing(0.5), 1, 0)


def test_size_arguments_are_validated() -> None:
    model = GeometricMixing(0.5)
    with pytest.raises(InvalidArgumentError):
        model.beta(0, 1, 1)
    with pytest.raises(InvalidArgumentError):
        model.beta(1.5, 1, 1)
    with pytest.raises(InvalidArgumentError):
        model.beta(1, 1, -1)
