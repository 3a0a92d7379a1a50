import math

import pytest

from bounds import CaseLabel, classify
from cf_core import InsufficientDigitsError
from frequency import (LOG2, EmptyTotalError, Event, FrequencyReport, LabelMismatchError, Method,
                       RegionMeasure, TotalFrequency, cell_measure, cell_partition, compare_reference_table,
                       conditional_mtong, density_h, dist_H, dist_H_quadrature, event_partition,
                       monte_carlo_frequency, quadrature_measure, total_frequency, truncated_mean)


# ==================== DISTRIBUTION ====================

@pytest.mark.parametrize('R, expected', [(1.0, 0.0), (2.9, 0.178719), (3.0, 0.188722), (3.6, 0.244625)])
def test_dist_H(R, expected):
    assert dist_H(R) == pytest.approx(expected, abs=1e-6)


def test_dist_H_tends_to_one():
    assert dist_H(1e8) == pytest.approx(1.0, abs=1e-6)


def test_dist_H_matches_quadrature():
    assert dist_H_quadrature(3.0) == pytest.approx(dist_H(3.0), abs=1e-8)


def test_density_is_derivative():
    h = 1e-6
    assert density_h(3.0) == pytest.approx((dist_H(3.0 + h) - dist_H(3.0 - h)) / (2 * h), rel=1e-6)


def test_distribution_domain():
    with pytest.raises(ValueError):
        dist_H(0.5)
    with pytest.raises(ValueError):
        density_h(0.5)


@pytest.mark.parametrize('X, expected, ratio', [(1e2, 13.27, 0.867), (1e3, 32.26, 0.937), (1e4, 59.01, 0.964)])
def test_truncated_mean_grows_like_log_squared(X, expected, ratio):
    value = truncated_mean(X)
    assert value == pytest.approx(expected, abs=0.01)
    assert value / (math.log(X) ** 2 / (2 * LOG2)) == pytest.approx(ratio, abs=1e-3)


# ==================== PER-CELL MEASURES ====================

@pytest.mark.parametrize('a, b', [(1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (3, 4), (17, 29), (1, 37)])
@pytest.mark.parametrize('event', [Event.BOTH_GREATER, Event.BOTH_LESS, Event.LESS_GREATER])
def test_closed_form_matches_quadrature(a, b, event):
    label = classify(a, b, 2.9, 3.6)
    closed = cell_measure(label, a, b, 2.9, 3.6, event)
    oracle = quadrature_measure(a, b, 2.9, 3.6, event)
    assert closed.value == pytest.approx(oracle.value, abs=1e-9)
    assert closed.method is Method.CLOSED_FORM
    assert oracle.method is Method.QUADRATURE


@pytest.mark.parametrize('r, R', [(2.9, 3.6), (1.5, 1.5), (5.2, 2.1)])
@pytest.mark.parametrize('event', [Event.BOTH_GREATER, Event.BOTH_LESS])
def test_closed_form_matches_quadrature_on_small_digits(r, R, event):
    for a in range(1, 11):
        for b in range(1, 11):
            closed = cell_measure(classify(a, b, r, R), a, b, r, R, event)
            oracle = quadrature_measure(a, b, r, R, event)
            assert closed.value == pytest.approx(oracle.value, abs=1e-8), (a, b)


@pytest.mark.parametrize('a, b', [(1, 1), (2, 3), (3, 1), (17, 29)])
def test_events_partition_each_rectangle(a, b):
    parts = cell_partition(a, b, 2.9, 3.6)
    assert parts['sum'] == pytest.approx(parts['rectangle'], abs=1e-10)


def test_case_v_has_no_both_less_mass():
    measure = cell_measure(CaseLabel.V, 17, 29, 2.9, 3.6, Event.BOTH_LESS)
    assert measure.value == 0.0


def test_label_mismatch_rejected():
    with pytest.raises(LabelMismatchError):
        cell_measure(CaseLabel.I, 17, 29, 2.9, 3.6)


def test_region_measure_range():
    with pytest.raises(ValueError):
        RegionMeasure(value=1.5, method=Method.CLOSED_FORM)
    assert RegionMeasure(value=-1e-14, method=Method.CLOSED_FORM).value == 0.0


# ==================== TOTALS ====================

def test_reference_total(reference_report):
    assert reference_report.total == pytest.approx(0.6096, abs=5e-4)
    assert reference_report.conditional_mtong == pytest.approx(0.283, abs=1e-3)


@pytest.mark.parametrize('blocks, expected', [
    ([('1', '1')], 0.0676),
    ([('1', '3'), ('1', '>3')], 0.10642),
    ([('2', '>3')], 0.04357),
    ([('>2', '1')], 0.09023),
    ([('>2', '2')], 0.04835),
    ([('>2', '3')], 0.03304),
    ([('>2', '>3')], 0.1155),
])
def test_reference_blocks(reference_report, blocks, expected):
    assert sum(reference_report.per_cell[key].value for key in blocks) == pytest.approx(expected, abs=2e-4)


def test_log2_scaled_blocks(reference_report):
    frame = reference_report.to_frame().set_index(['a_range', 'b_range'])
    assert frame.loc[('1', '1'), 'log2_scaled'] == pytest.approx(0.04686, abs=1e-4)
    assert frame.loc[('2', '2'), 'log2_scaled'] == pytest.approx(0.013262, abs=1e-4)
    assert len(frame) == 12


def test_tail_methods_agree(reference_report):
    integrated = total_frequency(2.9, 3.6, Event.BOTH_GREATER, 'integral')
    assert integrated.total == pytest.approx(reference_report.total, abs=1e-8)
    for key, measure in reference_report.per_cell.items():
        assert integrated.per_cell[key].value == pytest.approx(measure.value, abs=1e-8)


def test_quadrature_cells_agree(reference_report):
    oracle = total_frequency(2.9, 3.6, Event.BOTH_GREATER, 'integral', Method.QUADRATURE)
    assert oracle.total == pytest.approx(reference_report.total, abs=1e-8)


def test_events_partition_omega():
    totals = event_partition(2.9, 3.6)
    assert totals['sum'] == pytest.approx(1.0, abs=1e-8)


def test_conditional_frequency_helper():
    assert conditional_mtong(2.9, 3.6) == pytest.approx(0.283, abs=1e-3)


def test_conditional_needs_mass():
    report = FrequencyReport(r=2.9, R=3.6, event=Event.BOTH_GREATER)
    with pytest.raises(EmptyTotalError):
        report.conditional_mtong


def test_total_frequency_arguments():
    with pytest.raises(ValueError):
        TotalFrequency(1.0, 3.6)
    with pytest.raises(ValueError):
        TotalFrequency(2.9, 3.6, tail_method='guess')
    with pytest.raises(ValueError):
        TotalFrequency(2.9, 3.6, cell_method=Method.MONTE_CARLO)
    with pytest.raises(ValueError):
        TotalFrequency(2.9, 3.6).compute(Event.D_AT_MOST)


def test_report_serializes(reference_report):
    payload = reference_report.to_dict()
    assert payload['event'] == 'both_greater'
    assert len(payload['cells']) == 12
    assert payload['total'] == pytest.approx(reference_report.total)


# ==================== REFERENCE TABLE ====================

def test_reference_table_interpretations(reference_report):
    frame = compare_reference_table(reference_report).set_index(['a', 'b'])
    interpretation = frame['interpretation']
    for key in [('1', '1'), ('1', '2'), ('2', '1'), ('2', '2')]:
        assert interpretation[key] == 'log2_scaled'
    for key in [('1', '>2'), ('2', '>3'), ('>2', '2'), ('>2', '3'), ('>2', '>3')]:
        assert interpretation[key] == 'frequency'
    for key in [('2', '3'), ('>2', '1'), ('total', ''), ('conditional_mtong', '')]:
        assert interpretation[key] == 'deviation'


def test_reference_table_needs_reference_parameters():
    report = total_frequency(2.5, 3.6)
    with pytest.raises(ValueError):
        compare_reference_table(report)


# ==================== MONTE CARLO ====================

def test_monte_carlo_agrees_with_closed_form(reference_report):
    estimate = monte_carlo_frequency(2.9, 3.6, Event.BOTH_GREATER, n_samples=200, n_orbit=30,
                                     seed=7, bits=1024)
    assert estimate.method is Method.MONTE_CARLO
    assert abs(estimate.value - reference_report.total) < 4 * estimate.stderr + 0.01


def test_monte_carlo_long_orbits_agree_closely(reference_report):
    estimate = monte_carlo_frequency(2.9, 3.6, Event.BOTH_GREATER, n_samples=500, n_orbit=200,
                                     seed=2024, bits=2048)
    assert estimate.stderr < 0.004
    assert abs(estimate.value - reference_report.total) < 4 * estimate.stderr


def test_monte_carlo_distribution():
    estimate = monte_carlo_frequency(2.9, 3.6, Event.D_AT_MOST, n_samples=200, n_orbit=30, seed=3, bits=1024)
    assert abs(estimate.value - dist_H(3.6)) < 4 * estimate.stderr + 0.01


def test_monte_carlo_is_reproducible():
    first = monte_carlo_frequency(2.9, 3.6, Event.BOTH_LESS, n_samples=20, n_orbit=10, seed=11, bits=512)
    second = monte_carlo_frequency(2.9, 3.6, Event.BOTH_LESS, n_samples=20, n_orbit=10, seed=11, bits=512)
    assert first == second


def test_monte_carlo_needs_certified_digits():
    with pytest.raises(InsufficientDigitsError):
        monte_carlo_frequency(2.9, 3.6, Event.BOTH_GREATER, n_samples=2, n_orbit=50, seed=0, bits=64)
