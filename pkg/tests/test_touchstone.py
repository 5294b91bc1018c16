import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nwave import (
    FrequencyResponse,
    TouchstoneDocument,
    TouchstoneError,
    interpolate_at,
    parse_touchstone,
    write_touchstone,
)

TWO_PORT_MA = """\
! example hybrid data
# MHz S MA R 50
100  0.5 45   0.6 -30   0.01 90   0.4 60
200  0.4 50   0.7 -40   0.02 95   0.3 65
"""

THREE_PORT_RI = """\
# GHz S RI R 50
1  0 0  1 0  1 0
   0 0  1 0  0 0
   0 0  0 0  1 0
"""


def test_two_port_ma_parse():
    doc = parse_touchstone(TWO_PORT_MA, 2)
    assert doc.n_ports == 2
    assert doc.format == "MA"
    assert doc.frequencies[0] == 1.0e8
    s = doc.matrices[0]
    assert s[0, 0] == pytest.approx(0.35355339 + 0.35355339j, rel=1e-6)
    # v1 two-port column order: S21 comes second
    assert s[1, 0] == pytest.approx(0.6 * np.exp(-1j * np.pi / 6), rel=1e-12)
    assert s[0, 1] == pytest.approx(0.01j, rel=1e-9)
    assert doc.comments == ("example hybrid data",)


def test_three_port_wrapped_rows():
    doc = parse_touchstone(THREE_PORT_RI, 3)
    assert doc.frequencies[0] == 1.0e9
    expected = np.array([[0, 1, 1], [0, 1, 0], [0, 0, 1]], dtype=complex)
    np.testing.assert_allclose(doc.matrices[0], expected)


def test_y_parameters_parse_but_cannot_feed_analysis():
    doc = parse_touchstone("# HZ Y RI R 50\n1 0.1 0\n", 1)
    assert doc.parameter_kind == "Y"
    with pytest.raises(Exception, match="Y-parameter"):
        FrequencyResponse.from_touchstone(doc)


def test_accepts_stream_input():
    doc = parse_touchstone(io.StringIO(TWO_PORT_MA), 2)
    assert doc.n_samples == 2


@pytest.mark.parametrize(
    "text, message",
    [
        ("# MHz S MA R 50\n# MHz S RI R 50\n1 0 0\n", "multiple option"),
        ("# MHz S MA R 50\n100 0.5 45 0.6\n", "not a multiple"),
        ("# MHz S MA R 50\n200 0 0\n100 0 0\n", "monotonic"),
        ("[Version] 2.0\n# MHz S MA R 50\n1 0 0\n", "v2"),
        ("# MHz S MA R 50\n", "no data"),
        ("# MHz G MA R 50\n1 0 0\n", "not supported"),
        ("# MHz S MA R 50\n1 zero 0\n", "bad number"),
        ("# MHz S MA R -50\n1 0 0\n", "impedance"),
        ("1 0 0\n# MHz S MA\n", "before"),
    ],
)
def test_parse_errors(text, message):
    with pytest.raises(TouchstoneError, match=message):
        parse_touchstone(text, 1)


def test_option_line_defaults():
    doc = parse_touchstone("#\n1 0.5 0\n", 1)
    assert doc.freq_unit == "Ghz"
    assert doc.format == "MA"
    assert doc.reference_impedance == 50.0


def test_interpolate_grid_point_and_midpoint():
    doc = parse_touchstone(TWO_PORT_MA, 2)
    np.testing.assert_allclose(interpolate_at(doc, 1e8), doc.matrices[0])
    mid = interpolate_at(doc, 1.5e8)
    np.testing.assert_allclose(mid, 0.5 * (doc.matrices[0] + doc.matrices[1]))


def test_interpolate_real_imag_independently():
    doc = TouchstoneDocument(
        n_ports=1,
        freq_unit="Hz",
        parameter_kind="S",
        format="RI",
        reference_impedance=50.0,
        frequencies=np.array([90e6, 110e6]),
        matrices=np.array([[[0.2 + 0.0j]], [[0.4 + 0.2j]]]),
    )
    np.testing.assert_allclose(interpolate_at(doc, 100e6), [[0.3 + 0.1j]], atol=1e-15)


def test_interpolate_out_of_range():
    doc = parse_touchstone(TWO_PORT_MA, 2)
    with pytest.raises(TouchstoneError, match="outside"):
        interpolate_at(doc, 5e8)


@pytest.mark.parametrize("fmt", ["RI", "MA", "DB"])
def test_round_trip_examples(fmt):
    for text, n in [(TWO_PORT_MA, 2), (THREE_PORT_RI, 3)]:
        doc = parse_touchstone(text, n)
        again = parse_touchstone(write_touchstone(doc, fmt), n)
        np.testing.assert_allclose(again.frequencies, doc.frequencies, rtol=1e-15)
        np.testing.assert_allclose(again.matrices, doc.matrices, rtol=1e-12, atol=1e-15)


def test_db_round_trip_with_zeros():
    doc = parse_touchstone(THREE_PORT_RI, 3)
    text = write_touchstone(doc, "DB")
    again = parse_touchstone(text, 3)
    np.testing.assert_allclose(again.matrices, doc.matrices, atol=1e-15)


def test_write_empty_document_fails():
    doc = parse_touchstone(TWO_PORT_MA, 2)
    empty = TouchstoneDocument(
        n_ports=2,
        freq_unit="Hz",
        parameter_kind="S",
        format="MA",
        reference_impedance=50.0,
        frequencies=np.zeros(0),
        matrices=np.zeros((0, 2, 2)),
        comments=doc.comments,
    )
    with pytest.raises(TouchstoneError, match="no data rows"):
        write_touchstone(empty)


def test_comments_survive_as_header_block():
    doc = parse_touchstone(TWO_PORT_MA, 2)
    text = write_touchstone(doc)
    assert text.splitlines()[0] == "! example hybrid data"


complex_values = st.complex_numbers(
    min_magnitude=0.0, max_magnitude=10.0, allow_nan=False, allow_infinity=False
)


@st.composite
def documents(draw):
    n = draw(st.integers(min_value=1, max_value=4))
    n_freq = draw(st.integers(min_value=1, max_value=4))
    freqs = np.cumsum(draw(
        st.lists(
            st.floats(min_value=1e3, max_value=1e9),
            min_size=n_freq,
            max_size=n_freq,
        )
    ))
    mats = np.array(
        draw(
            st.lists(
                st.lists(
                    st.lists(complex_values, min_size=n, max_size=n),
                    min_size=n,
                    max_size=n,
                ),
                min_size=n_freq,
                max_size=n_freq,
            )
        ),
        dtype=complex,
    )
    fmt = draw(st.sampled_from(["RI", "MA", "DB"]))
    return TouchstoneDocument(
        n_ports=n,
        freq_unit="Hz",
        parameter_kind="S",
        format=fmt,
        reference_impedance=50.0,
        frequencies=freqs,
        matrices=mats,
    )


@settings(max_examples=40, deadline=None)
@given(documents())
def test_round_trip_property(doc):
    again = parse_touchstone(write_touchstone(doc), doc.n_ports)
    assert again.n_samples == doc.n_samples
    np.testing.assert_allclose(again.frequencies, doc.frequencies, rtol=1e-14)
    np.testing.assert_allclose(again.matrices, doc.matrices, rtol=1e-12, atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=0.0, max_value=1.0))
def test_interpolation_is_segmentwise_linear(alpha):
    f1, f2 = 90e6, 110e6
    m1 = np.array([[0.2 - 0.1j, 0.5j], [0.5j, -0.3 + 0.4j]])
    m2 = np.array([[0.7 + 0.2j, -0.1j], [-0.1j, 0.1 - 0.6j]])
    doc = TouchstoneDocument(
        n_ports=2,
        freq_unit="Hz",
        parameter_kind="S",
        format="RI",
        reference_impedance=50.0,
        frequencies=np.array([f1, f2]),
        matrices=np.stack([m1, m2]),
    )
    f = alpha * f2 + (1 - alpha) * f1
    np.testing.assert_allclose(
        interpolate_at(doc, f), alpha * m2 + (1 - alpha) * m1, atol=1e-12
    )


def test_sample_count_matches_record_count():
    doc = parse_touchstone(TWO_PORT_MA, 2)
    records = [
        line
        for line in TWO_PORT_MA.splitlines()
        if line and not line.startswith(("!", "#"))
    ]
    assert doc.n_samples == len(records)
