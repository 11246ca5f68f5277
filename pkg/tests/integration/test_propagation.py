# tests/integration/test_propagation.py
import numpy as np
import pytest

from mixedspec.operations.oracle import fd_propagate
from mixedspec.operations.series import solve
from mixedspec.schemas.config import TruncationPolicy


def test_zero_data_stays_zero(zero_forcing, unit_domain):
    sol = solve(zero_forcing, unit_domain, TruncationPolicy.fixed(1))
    result = fd_propagate(sol, zero_forcing, 21, 21)
    assert result.max_deviation == 0.0
    assert np.all(result.u_plus == 0.0) and np.all(result.u_minus == 0.0)


def test_single_mode_deviation_shrinks_under_refinement(single_mode_solution, single_mode_forcing):
    coarse = fd_propagate(single_mode_solution, single_mode_forcing, 51, 51)
    fine = fd_propagate(single_mode_solution, single_mode_forcing, 101, 101)
    assert fine.max_deviation < coarse.max_deviation
    assert coarse.max_deviation / fine.max_deviation > 3.0
    assert fine.deviation_plus[0] == 0.0


def test_scaled_seam_velocity_is_detected(single_mode_solution, single_mode_forcing):
    clean = fd_propagate(single_mode_solution, single_mode_forcing, 101, 101)
    corrupted = fd_propagate(single_mode_solution, single_mode_forcing, 101, 101, seam_velocity_scale=1.01)
    assert corrupted.max_deviation_plus > 10.0 * clean.max_deviation_plus
    assert corrupted.max_deviation_minus == clean.max_deviation_minus
    # the velocity error grows away from the seam at first
    assert corrupted.deviation_plus[25] > corrupted.deviation_plus[5] > corrupted.deviation_plus[0]


@pytest.mark.slow
def test_deviation_decreases_over_three_levels(bubble_solution, bubble_forcing):
    deviations = [fd_propagate(bubble_solution, bubble_forcing, size, size).max_deviation
                  for size in (101, 201, 401)]
    assert deviations[0] > deviations[1] > deviations[2]
    assert deviations[2] <= 1e-3
