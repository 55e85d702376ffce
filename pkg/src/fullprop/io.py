"""Text formats for profiles, scoring vectors and experiment results.

Profile document (ASCII, LF newlines, ``#`` lines are comments)::

    3
    1 apple
    2 banana
    3 cherry
    4 2
    3: 1 2 3
    1: 3 2 1

Line 1 is ``m``; then ``m`` lines ``<id> <label>`` with ids in order; then
``<n> <groups>``; then one ``<count>: <ranking>`` line per group, most
preferred first. Consecutive identical rankings are grouped on output.

Scoring vector file: a single line of ``m`` nonincreasing integers ending in 0.
"""

from __future__ import annotations

import csv
import io as _io
from dataclasses import dataclass, fields
from typing import Iterable, Optional, TextIO, Union

from .core import PreferenceProfile, ScoringFunction


class ProfileFormatError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _content_lines(stream: TextIO):
    for number, raw in enumerate(stream, start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield number, line


def _int(token: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ProfileFormatError(f"expected an integer, got {token!r}", line) from None


def read_profile(source: Union[TextIO, str]) -> PreferenceProfile:
    """Parse a profile document (stream or string)."""
    stream = _io.StringIO(source) if isinstance(source, str) else source
    lines = _content_lines(stream)

    def next_line(what):
        try:
            return next(lines)
        except StopIteration:
            raise ProfileFormatError(f"unexpected end of input, expected {what}") from None

    num, text = next_line("the number of alternatives")
    m = _int(text, num)
    if m < 1:
        raise ProfileFormatError("number of alternatives must be >= 1", num)
    labels = []
    for expected in range(1, m + 1):
        num, text = next_line(f"label line for alternative {expected}")
        head, _, label = text.partition(" ")
        if _int(head, num) != expected:
            raise ProfileFormatError(f"expected alternative id {expected}", num)
        labels.append(label.strip() or head)
    num, text = next_line("'<n> <groups>'")
    parts = text.split()
    if len(parts) != 2:
        raise ProfileFormatError("expected '<n> <groups>'", num)
    n, groups = _int(parts[0], num), _int(parts[1], num)
    rankings = []
    for g in range(1, groups + 1):
        num, text = next_line(f"vote group {g}")
        count_text, sep, body = text.partition(":")
        if not sep:
            raise ProfileFormatError("expected '<count>: <ranking>'", num)
        count = _int(count_text.strip(), num)
        if count < 1:
            raise ProfileFormatError("group multiplicity must be >= 1", num)
        ranking = [_int(tok, num) for tok in body.split()]
        if sorted(ranking) != list(range(1, m + 1)):
            raise ProfileFormatError(
                f"vote group {g} is not a permutation of 1..{m}", num
            )
        rankings.extend([ranking] * count)
    extra = next(lines, None)
    if extra is not None:
        raise ProfileFormatError("unexpected content after the last vote group", extra[0])
    if len(rankings) != n:
        raise ProfileFormatError(f"group multiplicities sum to {len(rankings)}, header says n={n}")
    if n < 1:
        raise ProfileFormatError("profile has no votes")
    return PreferenceProfile(rankings, labels)


def write_profile(profile: PreferenceProfile) -> str:
    out = [str(profile.m)]
    out += [f"{a} {label}" for a, label in enumerate(profile.labels, start=1)]
    groups = []
    for row in profile.rankings.tolist():
        if groups and groups[-1][1] == row:
            groups[-1][0] += 1
        else:
            groups.append([1, row])
    out.append(f"{profile.n} {len(groups)}")
    out += [f"{count}: " + " ".join(map(str, row)) for count, row in groups]
    return "\n".join(out) + "\n"


def read_psf(source: Union[TextIO, str], name: str = "custom") -> ScoringFunction:
    stream = _io.StringIO(source) if isinstance(source, str) else source
    content = list(_content_lines(stream))
    if len(content) != 1:
        raise ProfileFormatError("scoring vector file must contain exactly one line")
    num, text = content[0]
    return ScoringFunction(tuple(_int(tok, num) for tok in text.split()), name=name)


def write_psf(psf: ScoringFunction) -> str:
    return " ".join(map(str, psf.alpha)) + "\n"


# ---------------------------------------------------------------------------
# results


CSV_HEADER = (
    "algorithm,rule,psf,m,n,K,d,samples,seed,satisfaction,"
    "c_ideal,ratio_ideal,c_opt,ratio_opt,time_ms"
)


@dataclass(frozen=True)
class ResultRecord:
    algorithm: str
    rule: str
    psf: str
    m: int
    n: int
    K: int
    d: Optional[int]
    samples: Optional[int]
    seed: Optional[int]
    satisfaction: int
    c_ideal: int
    c_opt: Optional[int] = None
    time_ms: float = 0.0

    @property
    def ratio_ideal(self) -> float:
        return self.satisfaction / self.c_ideal if self.c_ideal else 0.0

    @property
    def ratio_opt(self) -> Optional[float]:
        if self.c_opt is None:
            return None
        return self.satisfaction / self.c_opt if self.c_opt else 1.0

    def without_timing(self) -> "ResultRecord":
        return _replace_time(self, 0.0)


def _replace_time(rec: ResultRecord, t: float) -> ResultRecord:
    values = {f.name: getattr(rec, f.name) for f in fields(rec)}
    values["time_ms"] = t
    return ResultRecord(**values)


def _opt(value) -> str:
    return "" if value is None else str(value)


def record_row(rec: ResultRecord) -> list:
    ratio_opt = rec.ratio_opt
    return [
        rec.algorithm, rec.rule, rec.psf, rec.m, rec.n, rec.K,
        _opt(rec.d), _opt(rec.samples), _opt(rec.seed),
        rec.satisfaction, rec.c_ideal, f"{rec.ratio_ideal:.6f}",
        _opt(rec.c_opt), "" if ratio_opt is None else f"{ratio_opt:.6f}",
        f"{rec.time_ms:.3f}",
    ]


def write_results_csv(records: Iterable[ResultRecord]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for rec in records:
        writer.writerow(record_row(rec))
    return buf.getvalue()


def read_results_csv(source: Union[TextIO, str]) -> list:
    """Parse a results CSV. Timing comes back rounded to the printed 3 decimals."""
    stream = _io.StringIO(source) if isinstance(source, str) else source
    reader = csv.DictReader(stream)
    if reader.fieldnames != CSV_HEADER.split(","):
        raise ValueError("unexpected results header")

    def opt_int(v):
        return int(v) if v != "" else None

    return [
        ResultRecord(
            algorithm=row["algorithm"], rule=row["rule"], psf=row["psf"],
            m=int(row["m"]), n=int(row["n"]), K=int(row["K"]),
            d=opt_int(row["d"]), samples=opt_int(row["samples"]), seed=opt_int(row["seed"]),
            satisfaction=int(row["satisfaction"]), c_ideal=int(row["c_ideal"]),
            c_opt=opt_int(row["c_opt"]), time_ms=float(row["time_ms"]),
        )
        for row in reader
    ]
