import math

import numpy as np
import pytest

from gausscub.cubature import build_rule
from gausscub.existence import assemble_system, solve_existence
from gausscub.ortho import build_orthobasis
from gausscub.qcheck import build_Q, verify_corollary, verify_remark

from conftest import catalog

SQ5 = math.sqrt(5.0)


def _yes_instance(spec_text, m):
    y = catalog(spec_text, 4 * m)
    basis = build_orthobasis(y, 2 * m)
    verdict = solve_existence(assemble_system(y, basis, m))
    assert verdict.exists
    return y, basis, verdict


def test_build_Q_zero():
    y, basis, _ = _yes_instance("lebesgue", 1)
    q = build_Q(basis, np.zeros(1))
    assert np.allclose(q.coeffs, 0.0)


def test_build_Q_1d_m1():
    # u = -sqrt(5)/2 with sign -1 gives Q = (5/4)(3x^2 - 1)
    y, basis, verdict = _yes_instance("lebesgue", 1)
    q = build_Q(basis, verdict.u, sign=-1)
    assert q.coeffs == pytest.approx([-1.25, 0.0, 3.75], abs=1e-12)
    assert q.sign == -1


def test_build_Q_validation():
    _, basis, _ = _yes_instance("lebesgue", 1)
    with pytest.raises(ValueError):
        build_Q(basis, np.zeros(2))
    with pytest.raises(ValueError):
        build_Q(basis, np.zeros(1), sign=2)


def test_corollary_identity_1d():
    y, basis, verdict = _yes_instance("lebesgue", 1)
    q = build_Q(basis, verdict.u)
    # oracle: integral(3x^2 * (5/4)(3x^2-1)) with y2=1/3, y4=1/5 equals 1
    assert (15 / 4) * (3 / 5) - (15 / 4) * (1 / 3) == pytest.approx(1.0)
    assert verify_corollary(y, basis, q, 1) <= 1e-12


def test_corollary_zero_polynomial_deviates_by_one():
    y, basis, _ = _yes_instance("lebesgue", 1)
    q = build_Q(basis, np.zeros(1))
    assert verify_corollary(y, basis, q, 1) == pytest.approx(1.0)


def test_positive_sign_convention_deviates_by_two():
    # with the literal +u convention the pairing returns -I instead of I
    y, basis, verdict = _yes_instance("lebesgue", 1)
    q_plus = build_Q(basis, verdict.u, sign=1)
    assert verify_corollary(y, basis, q_plus, 1) == pytest.approx(2.0)


@pytest.mark.parametrize(
    "spec_text,m",
    [("lebesgue", 1), ("lebesgue", 3), ("chebyshev2", 2), ("hermite", 2), ("symmetrized:0.5", 2), ("symmetrized:0.5", 3)],
)
def test_yes_instances_pass_corollary_and_remark(spec_text, m):
    y, basis, verdict = _yes_instance(spec_text, m)
    q = build_Q(basis, verdict.u)
    assert verify_corollary(y, basis, q, m) <= 1e-8
    rule = build_rule(y, basis, m)
    remark = verify_remark(y, basis, q, m, rule)
    assert remark.u_from_rule <= 1e-8
    assert remark.low_degree <= 1e-8
    assert remark.top_degree <= 1e-8
    assert remark.mean <= 1e-8


def test_remark_1d_m1_single_node():
    y, basis, verdict = _yes_instance("lebesgue", 1)
    rule = build_rule(y, basis, 1)
    # single node at 0, probability weight 1: u = P2(0) = -sqrt(5)/2
    q = build_Q(basis, verdict.u)
    remark = verify_remark(y, basis, q, 1, rule)
    assert remark.u_from_rule <= 1e-12
    assert verdict.u[0] == pytest.approx(-SQ5 / 2)


def test_corollary_equivalent_to_residual():
    # the corollary deviation and the linear-system residual are the same
    # statement: both vanish together on a YES instance, and both are large
    # when u is perturbed
    y, basis, verdict = _yes_instance("symmetrized:0.5", 2)
    system = assemble_system(y, basis, 2)
    q = build_Q(basis, verdict.u)
    dev = verify_corollary(y, basis, q, 2)
    res = np.abs(system.a0 + system.A2m @ verdict.u).max()
    assert dev <= 1e-8 and res <= 1e-8
    u_bad = verdict.u + 0.05
    q_bad = build_Q(basis, u_bad)
    dev_bad = verify_corollary(y, basis, q_bad, 2)
    res_bad = np.abs(system.a0 + system.A2m @ u_bad).max()
    assert dev_bad > 1e-3 and res_bad > 1e-3
    assert dev_bad == pytest.approx(res_bad, rel=1e-6)
