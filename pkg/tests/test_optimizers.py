"""Single-step oracles: every update hand-computed from the documented rule
on a one-parameter quadratic f(x) = x^2 / 2 (gradient g = x)."""

import math

import numpy as np
import pytest

from fgseglab.model.params import ParameterSet
from fgseglab.train.optim import make_optimizer
from fgseglab.train.schedule import TrainSchedule


def one_param(value=1.0):
    return ParameterSet(params={"x": np.array([value], dtype=np.float64)})


def step(optimizer, pset):
    optimizer.step(pset, {"x": pset.params["x"].copy()})   # g = x
    return float(pset.params["x"][0])


def test_sgd_step():
    pset = one_param(1.0)
    opt = make_optimizer(TrainSchedule(optimizer="sgd", initial_lr=0.1))
    assert math.isclose(step(opt, pset), 1.0 - 0.1 * 1.0, rel_tol=1e-12)


def test_adam_first_step():
    # m = 0.1*g = 0.1; v = 0.001*g^2 = 0.001; mhat = 1; vhat = 1
    # x <- 1 - 0.1 * 1 / (1 + 1e-8)
    pset = one_param(1.0)
    opt = make_optimizer(TrainSchedule(optimizer="adam", initial_lr=0.1))
    want = 1.0 - 0.1 * 1.0 / (1.0 + 1e-8)
    assert abs(step(opt, pset) - want) < 1e-10


def test_adam_second_step():
    pset = one_param(1.0)
    opt = make_optimizer(TrainSchedule(optimizer="adam", initial_lr=0.1))
    x1 = step(opt, pset)
    # by hand: m2 = 0.9*0.1 + 0.1*x1; v2 = 0.999*0.001 + 0.001*x1^2
    m2 = 0.9 * 0.1 * 1.0 + 0.1 * x1
    v2 = 0.999 * 0.001 * 1.0 + 0.001 * x1 * x1
    mhat = m2 / (1 - 0.9 ** 2)
    vhat = v2 / (1 - 0.999 ** 2)
    want = x1 - 0.1 * mhat / (math.sqrt(vhat) + 1e-8)
    assert abs(step(opt, pset) - want) < 1e-10


def test_rmsprop_step():
    # v = 0.1*g^2 = 0.1; x <- 1 - 0.1 * 1 / (sqrt(0.1) + 1e-8)
    pset = one_param(1.0)
    opt = make_optimizer(TrainSchedule(optimizer="rmsprop", initial_lr=0.1))
    want = 1.0 - 0.1 * 1.0 / (math.sqrt(0.1) + 1e-8)
    assert abs(step(opt, pset) - want) < 1e-10


def test_adagrad_two_steps():
    pset = one_param(2.0)
    opt = make_optimizer(TrainSchedule(optimizer="adagrad", initial_lr=0.5))
    # a1 = 4; x1 = 2 - 0.5*2/(2 + 1e-8)
    x1 = 2.0 - 0.5 * 2.0 / (2.0 + 1e-8)
    assert abs(step(opt, pset) - x1) < 1e-10
    # a2 = 4 + x1^2
    a2 = 4.0 + x1 * x1
    want = x1 - 0.5 * x1 / (math.sqrt(a2) + 1e-8)
    assert abs(step(opt, pset) - want) < 1e-10


def test_adadelta_step():
    # Eg = 0.05*g^2; d = -sqrt(1e-6)/sqrt(Eg + 1e-6) * g; x <- x + lr*d
    pset = one_param(1.0)
    opt = make_optimizer(TrainSchedule(optimizer="adadelta", initial_lr=1.0))
    eg = 0.05 * 1.0
    d = -math.sqrt(1e-6) / math.sqrt(eg + 1e-6) * 1.0
    want = 1.0 + 1.0 * d
    assert abs(step(opt, pset) - want) < 1e-12


def test_frozen_parameters_never_move():
    pset = ParameterSet(params={"x": np.array([1.0]), "y": np.array([1.0])},
                        frozen=frozenset({"y"}))
    opt = make_optimizer(TrainSchedule(optimizer="adam", initial_lr=0.1))
    for _ in range(5):
        opt.step(pset, {"x": np.array([0.5]), "y": np.array([0.5])})
    assert pset.params["y"][0] == 1.0
    assert pset.params["x"][0] != 1.0
    assert "y" not in opt.state


def test_lr_mutation_respected():
    pset = one_param(1.0)
    opt = make_optimizer(TrainSchedule(optimizer="sgd", initial_lr=0.1))
    step(opt, pset)
    opt.lr = 0.01
    x1 = float(pset.params["x"][0])
    assert math.isclose(step(opt, pset), x1 - 0.01 * x1, rel_tol=1e-12)


@pytest.mark.parametrize("name", ["adam", "rmsprop", "sgd", "adagrad", "adadelta"])
def test_all_optimizers_descend_quadratic(name):
    pset = one_param(3.0)
    opt = make_optimizer(TrainSchedule(optimizer=name, initial_lr=0.1))
    start = abs(pset.params["x"][0])
    for _ in range(200):
        step(opt, pset)
    assert abs(pset.params["x"][0]) < start
