"""Correlator quadratures, residue reduction, asymptotics."""
import numpy as np
import pytest

from fpeps.correlators import (
    asymptotic_k,
    asymptotic_scaled,
    correlation_scan,
    correlator_numeric,
    correlator_residue,
    fitted_scale,
    torus_correlator,
    torus_correlator_tables,
    _inner_residue,
)
from fpeps.errors import ContractViolationError


def test_grid_preconditions():
    with pytest.raises(ContractViolationError):
        correlator_numeric(1, 2, "p", grid_size=400)
    with pytest.raises(ContractViolationError):
        correlator_numeric(1, 2, "p", grid_size=99)
    with pytest.raises(ContractViolationError):
        torus_correlator_tables(100)


def test_parity_selection_numeric():
    assert abs(correlator_numeric(2, 2, "p")) < 1e-8
    assert abs(correlator_numeric(1, 2, "q")) < 1e-8
    assert abs(correlator_numeric(3, 1, "p")) < 1e-8


def test_parity_selection_residue_exact():
    assert correlator_residue(2, 2, "p") == 0.0
    assert correlator_residue(2, 1, "q") == 0.0


def test_numeric_matches_residue():
    for (n1, n2, kind) in [
        (1, 2, "p"), (2, 1, "p"), (3, 4, "p"), (9, 10, "p"),
        (1, 1, "q"), (2, 4, "q"), (5, 5, "q"), (10, 10, "q"),
    ]:
        a = correlator_numeric(n1, n2, kind)
        b = correlator_residue(n1, n2, kind)
        assert abs(a - b) < 1e-8, (n1, n2, kind)


def test_exchange_structure():
    # same-type correlators are antisymmetric under exchange, mixed-type
    # ones symmetric; magnitudes are exchange symmetric either way
    assert correlator_residue(3, 4, "p") == pytest.approx(
        -correlator_residue(4, 3, "p"), abs=1e-13
    )
    assert correlator_residue(3, 5, "q") == pytest.approx(
        correlator_residue(5, 3, "q"), abs=1e-13
    )
    assert correlator_residue(0, 5, "p") == pytest.approx(
        -correlator_residue(5, 0, "p"), abs=1e-13
    )


def test_inner_residue_symmetry():
    # I(phi2 + pi) = (-1)^(n1 + 1) I(phi2)
    rng = np.random.default_rng(0)
    for n1 in (1, 2, 5):
        for _ in range(5):
            phi2 = rng.uniform(0.05, np.pi / 2 - 0.05)
            lhs = _inner_residue(n1, phi2 + np.pi)
            rhs = (-1.0) ** (n1 + 1) * _inner_residue(n1, phi2)
            assert lhs == pytest.approx(rhs, rel=1e-12)


def test_only_inner_pole_is_inside_unit_circle():
    for phi2 in np.linspace(0.01, np.pi / 2 - 0.01, 50):
        c, s = np.cos(phi2), np.sin(phi2)
        z_minus = 1j * (1 - c) / s
        z_plus = 1j * (1 + c) / s
        assert abs(z_minus) < 1.0
        assert abs(z_plus) > 1.0


def test_zero_separation_needs_numeric():
    with pytest.raises(ContractViolationError):
        correlator_residue(0, 0, "q")
    # the quadrature handles it; the on-site entry vanishes at half filling
    val = correlator_numeric(0, 0, "q")
    assert np.isfinite(val) and abs(val) < 1e-10


def test_asymptotic_kernel_values():
    assert asymptotic_k(1, 0, "p") == pytest.approx(2 * 0.5)
    K01 = (0 + 3 + 1j) / (0 + 1 + 1j) ** 3
    assert K01 == pytest.approx(-0.5 - 1.0j)
    assert asymptotic_k(0, 1, "p") == pytest.approx(2 * K01.real)
    with pytest.raises(ContractViolationError):
        asymptotic_k(-1, 0, "p")


def test_q_vanishes_on_axis():
    # exact zero by symmetry; the kernel's axis values vanish as well
    assert correlator_residue(6, 0, "q") == 0.0
    assert abs(correlator_numeric(6, 0, "q")) < 1e-10
    # the torus value only vanishes up to image corrections
    assert abs(torus_correlator(6, 0, "q", 401)) < 1e-4
    assert asymptotic_k(6, 0, "q") == 0.0


def test_asymptotic_fit_axis():
    ns = [n for n in range(15, 41) if n % 2 == 1]
    num = [correlator_residue(n, 0, "p") for n in ns]
    ker = [asymptotic_scaled(n, 0, "p") for n in ns]
    scale = fitted_scale(num, ker)
    devs = [abs(a - scale * k) / abs(scale * k) for a, k in zip(num, ker)]
    assert max(devs) < 0.05
    assert scale == pytest.approx(-1.0 / np.pi, rel=0.01)


def test_power_law_decay_slopes():
    ns = np.arange(10, 41)
    for kind, direction in (("p", "axis"), ("q", "diagonal"), ("p", "n-2n"), ("q", "n-2n")):
        vals, used = [], []
        for n in ns:
            n1, n2 = {"axis": (n, 0), "diagonal": (n, n), "n-2n": (n, 2 * n)}[direction]
            allowed = (n1 + n2) % 2 == (1 if kind == "p" else 0)
            if not allowed:
                continue
            vals.append(abs(correlator_residue(n1, n2, kind)))
            used.append(np.hypot(n1, n2))
        slope = np.polyfit(np.log(used), np.log(vals), 1)[0]
        assert abs(slope + 2.0) < 0.3, (kind, direction, slope)


def test_correlation_scan_rows():
    rows = correlation_scan("diagonal", 2, grid_size=101)
    assert len(rows) == 4
    by_key = {(n1, n2, k): (num, res, asym) for n1, n2, k, num, res, asym in rows}
    # p rows on the diagonal vanish (even index sum)
    assert abs(by_key[(1, 1, "p")][0]) < 1e-8
    assert by_key[(1, 1, "p")][1] == 0.0
    assert abs(by_key[(2, 2, "q")][0]) > 1e-3


def test_scan_rejects_unknown_direction():
    with pytest.raises(ContractViolationError):
        correlation_scan("wild", 3)
