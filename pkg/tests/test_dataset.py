from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from effectregions import covariate_distribution, format_dataset, parse_dataset
from effectregions.errors import EmptyDatasetError, ParseError

HEADER = "x1,x2,x3,x4,z,events,trials\n"


def test_single_row():
    ds = parse_dataset(HEADER + "0,0,0,0,1,0,3\n")
    (c,) = ds.cells
    assert (c.stratum, c.z, c.events, c.trials) == ((0, 0, 0, 0), 1, 0, 3)


def test_duplicates_are_summed():
    ds = parse_dataset(HEADER + "1,0,0,0,0,1,2\n1,0,0,0,0,0,1\n")
    (c,) = ds.cells
    assert (c.stratum, c.z, c.events, c.trials) == ((1, 0, 0, 0), 0, 1, 3)


def test_hpylori_shape(hpylori):
    assert len(hpylori) == 30
    assert hpylori.n_total == 109
    assert len(hpylori.strata) == 16
    one_arm = [x for x in hpylori.strata if len({c.z for c in hpylori.cells if c.stratum == x}) == 1]
    assert sorted(one_arm) == [(0, 0, 1, 1), (0, 1, 1, 1)]


def test_crlf_and_bom():
    text = "﻿a,z,events,trials\r\n1,0,2,5\r\n0,1,1,1\r\n"
    ds = parse_dataset(text)
    assert ds.covariates == ("a",)
    assert ds.n_total == 6


@pytest.mark.parametrize(
    "row, fragment",
    [
        ("0,0,0,1,0,3", "expected 7 fields"),
        ("0,0,2,0,1,0,3", "must be 0 or 1"),
        ("0,0,0,0,2,0,3", "z must be"),
        ("0,0,0,0,1,4,3", "events must lie"),
        ("0,0,0,0,1,0,0", "trials must be positive"),
        ("0,0,0,0,1,a,3", "not an integer"),
    ],
)
def test_malformed_rows_name_the_line(row, fragment):
    with pytest.raises(ParseError) as exc:
        parse_dataset(HEADER + "0,0,0,0,0,1,1\n" + row + "\n")
    assert exc.value.line == 3
    assert "line 3" in str(exc.value)
    assert fragment in str(exc.value)


def test_empty_data_section():
    with pytest.raises(EmptyDatasetError):
        parse_dataset(HEADER)
    with pytest.raises(EmptyDatasetError):
        parse_dataset("")


def test_bad_header():
    with pytest.raises(ParseError):
        parse_dataset("x1,events,trials,z\n0,1,1,1\n")


def test_weights_hpylori(hpylori):
    w = covariate_distribution(hpylori)
    assert w[(0, 0, 0, 0)] == pytest.approx(7 / 109)
    assert abs(sum(w.values()) - 1.0) < 1e-12
    # exact rational check of every weight
    totals = {}
    for c in hpylori.cells:
        totals[c.stratum] = totals.get(c.stratum, 0) + c.trials
    assert sum(Fraction(t, 109) for t in totals.values()) == 1
    for x, t in totals.items():
        assert w[x] == t / 109


def test_weights_single_stratum():
    ds = parse_dataset("a,z,events,trials\n1,0,2,5\n1,1,3,4\n")
    assert covariate_distribution(ds) == {(1,): 1.0}


cells = st.lists(
    st.tuples(
        st.tuples(st.integers(0, 1), st.integers(0, 1), st.integers(0, 1)),
        st.integers(0, 1),
        st.integers(1, 20).flatmap(lambda n: st.tuples(st.integers(0, n), st.just(n))),
    ),
    min_size=1,
    max_size=25,
)


def _csv(rows):
    lines = ["a,b,c,z,events,trials"]
    for x, z, (e, n) in rows:
        lines.append(",".join(map(str, (*x, z, e, n))))
    return "\n".join(lines) + "\n"


@settings(max_examples=200, deadline=None)
@given(cells)
def test_roundtrip_and_totals(rows):
    ds = parse_dataset(_csv(rows))
    again = parse_dataset(format_dataset(ds))
    assert again == ds
    assert sum(c.events for c in ds.cells) == sum(r[2][0] for r in rows)
    assert ds.n_total == sum(r[2][1] for r in rows)
    w = covariate_distribution(ds)
    assert abs(sum(w.values()) - 1.0) < 1e-12
    assert all(v > 0 for v in w.values())
    assert set(w) == {r[0] for r in rows}


def test_serializer_order():
    ds = parse_dataset("a,z,events,trials\n1,0,1,2\n0,0,1,1\n0,1,0,1\n")
    assert format_dataset(ds) == "a,z,events,trials\n0,1,0,1\n0,0,1,1\n1,0,1,2\n"
