import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fullprop.core import PreferenceProfile, ScoringFunction
from fullprop.io import (
    CSV_HEADER,
    ProfileFormatError,
    ResultRecord,
    read_profile,
    read_psf,
    read_results_csv,
    write_profile,
    write_psf,
    write_results_csv,
)

SAMPLE = """\
# two groups
3
1 Alice
2 Bob
3 Carol
4 2
3: 1 2 3
1: 3 1 2
"""


def test_read_sample():
    p = read_profile(SAMPLE)
    assert p.n == 4 and p.m == 3
    assert p.labels == ("Alice", "Bob", "Carol")
    assert p.rankings.tolist() == [[1, 2, 3]] * 3 + [[3, 1, 2]]
    assert read_profile(io.StringIO(SAMPLE)) == p


def test_write_is_bit_exact():
    text = SAMPLE.split("\n", 1)[1]
    assert write_profile(read_profile(SAMPLE)) == text


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("3\n1 a\n2 b\n3 c\n1 1\n1: 1 2 2\n", "vote group 1"),
        ("3\n1 a\n2 b\n3 c\n2 1\n1: 1 2 3\n", "sum to 1"),
        ("2\n1 a\n3 b\n1 1\n1: 1 2\n", "alternative id 2"),
        ("2\n1 a\n2 b\n1 1\n1 2\n", "<count>"),
        ("2\n1 a\n2 b\n1 1\nx: 1 2\n", "integer"),
        ("2\n1 a\n", "label line"),
        ("2\n1 a\n2 b\n1 1\n1: 1 2\n1: 2 1\n", "after the last"),
    ],
)
def test_malformed_profiles(text, fragment):
    with pytest.raises(ProfileFormatError, match=fragment):
        read_profile(text)


def test_error_reports_line_number():
    with pytest.raises(ProfileFormatError) as info:
        read_profile("3\n1 a\n2 b\n3 c\n1 1\n1: 1 2 2\n")
    assert info.value.line == 6


@st.composite
def labelled_profiles(draw):
    m = draw(st.integers(1, 6))
    n = draw(st.integers(1, 10))
    rows = [draw(st.permutations(list(range(1, m + 1)))) for _ in range(n)]
    word = st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789_", min_size=1, max_size=8)
    labels = draw(st.lists(word, min_size=m, max_size=m))
    return PreferenceProfile(rows, labels)


@given(labelled_profiles())
def test_profile_round_trip(p):
    text = write_profile(p)
    assert text.isascii() and "\r" not in text
    assert read_profile(text) == p
    assert all(line == line.rstrip() for line in text.splitlines())


def test_psf_round_trip():
    courses = read_psf("3 3 3 2 1 0\n", name="courses")
    assert courses.alpha == (3, 3, 3, 2, 1, 0)
    assert write_psf(courses) == "3 3 3 2 1 0\n"
    with pytest.raises(ValueError):
        read_psf("1 2 0\n")
    with pytest.raises(ProfileFormatError):
        read_psf("3 2 0\n1 0\n")


def _record(**kw):
    base = dict(algorithm="c", rule="monroe", psf="borda", m=10, n=100, K=3, d=15,
                samples=None, seed=None, satisfaction=846, c_ideal=900, c_opt=850, time_ms=1.25)
    base.update(kw)
    return ResultRecord(**base)


def test_results_csv_format():
    assert write_results_csv([]) == CSV_HEADER + "\n"
    text = write_results_csv([_record(satisfaction=846)])
    lines = text.splitlines()
    assert len(lines) == 2
    assert lines[1] == "c,monroe,borda,10,100,3,15,,,846,900,0.940000,850,0.995294,1.250"


def test_results_csv_round_trip():
    records = [_record(), _record(algorithm="r", d=None, samples=100, seed=7, c_opt=None, time_ms=0.5)]
    back = read_results_csv(write_results_csv(records))
    assert back == records
    assert back[1].ratio_opt is None
    assert back[0].ratio_ideal == pytest.approx(0.94)
    with pytest.raises(ValueError):
        read_results_csv("a,b\n")
