import pandas as pd
import pytest

from bounds import BoundKind
from grid_scanner import REFERENCE_TABLE_ONE, BoundGridScanner, scan_table


@pytest.fixture
def scanner(thresholds):
    return BoundGridScanner(*thresholds)


def test_scan_grid_rows(scanner):
    frame = scanner.scan_grid([1, 2], [1, 2, 3])
    assert list(frame.columns) == ['a', 'b', 'case', 'theorem_case', 'bound', 'tong_bound', 'improvement']
    assert len(frame) == 6
    row = frame[(frame.a == 1) & (frame.b == 3)].iloc[0]
    assert row['case'] == 'i'
    assert row['bound'] == pytest.approx(5.7241, abs=1e-4)


def test_empty_lower_regions_have_no_bound(scanner):
    frame = scanner.scan_grid([17], [29], BoundKind.LOWER_D)
    assert len(frame) == 1
    assert frame.iloc[0]['case'] == 'v'
    assert pd.isna(frame.iloc[0]['bound'])


def test_top_improvements_sorted(scanner):
    scanner.scan_grid(range(1, 4), range(1, 6))
    top = scanner.get_top_improvements(3)
    assert len(top) == 3
    improvements = [row['improvement'] for row in top]
    assert improvements == sorted(improvements, reverse=True)
    assert all(value >= 0 for value in improvements)


def test_reference_comparison(scanner):
    frame = scanner.compare_reference_table().set_index(['a', 'b'])
    assert len(frame) == len(REFERENCE_TABLE_ONE)
    for key in [(1, 1), (1, 3), (2, 4), (17, 29)]:
        assert not frame.loc[key, 'flagged']
    for key in [(3, 1), (3, 2), (3, 3), (3, 4)]:
        assert frame.loc[key, 'flagged']
    assert frame.loc[(3, 4), 'tong_delta'] == pytest.approx(0.0088, abs=2e-4)
    assert frame.loc[(17, 29), 'bound_delta'] == pytest.approx(0.0, abs=1e-9)


def test_reference_comparison_needs_reference_thresholds():
    with pytest.raises(ValueError):
        BoundGridScanner(2.5, 3.6).compare_reference_table()


def test_detailed_analysis(scanner):
    analysis = scanner.get_detailed_analysis(17, 29)
    assert analysis['case'] == 'v'
    assert analysis['upper_D']['value'] == 540
    assert analysis['lower_D'] is None

    analysis = scanner.get_detailed_analysis(1, 3)
    assert analysis['lower_D']['theorem_case'] == 1
    assert analysis['curves']['a'] == 1


def test_scan_table_covers_the_grid(thresholds):
    frame = scan_table(*thresholds, max_a=3, max_b=4)
    assert len(frame) == 12
    assert frame['bound'].notna().all()


def test_reference_rows_outside_half_a_printed_unit_are_flagged(scanner):
    frame = scanner.compare_reference_table().set_index(['a', 'b'])
    # the printed 51.44 truncates 51.448
    assert frame.loc[(1, 37), 'bound_delta'] == pytest.approx(0.0083, abs=2e-4)
    assert frame.loc[(1, 37), 'flagged']
    within = frame[~frame['flagged']]
    assert (within['bound_delta'].abs() <= 0.005).all()
    assert (within['tong_delta'].abs() <= 0.005).all()
