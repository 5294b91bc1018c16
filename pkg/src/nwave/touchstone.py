"""Touchstone v1 file parsing, interpolation, and writing.

Only version-1 files are handled.  An option line of the form

    # <unit> <parameter> <format> R <impedance>

is expected (fields optional, defaults ``GHz S MA R 50``), followed by
whitespace-separated data records.  Two-port records use the historical
S11 S21 S12 S22 column order; one-port and three-or-more-port records
are row-major, with free line wrapping.  Comments start with ``!``.
Version-2 keyword lines (``[Version]`` etc.) are rejected.

All frequencies are converted to Hz and all values to linear complex
numbers on parse, whatever the source format.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

FREQ_MULTIPLIERS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}
FORMATS = ("RI", "MA", "DB")
PARAMETER_KINDS = ("S", "Y", "Z")


class TouchstoneError(ValueError):
    """Malformed Touchstone content or an out-of-contract query."""


@dataclass(frozen=True)
class TouchstoneDocument:
    """One parsed .snp file: a frequency grid of complex n-port matrices.

    ``frequencies`` are in Hz and strictly increasing; ``matrices`` has
    shape (F, n_ports, n_ports) and holds linear complex values.
    ``format`` records the source number format, which is also the
    default on write.
    """

    n_ports: int
    freq_unit: str
    parameter_kind: str
    format: str
    reference_impedance: float
    frequencies: np.ndarray
    matrices: np.ndarray
    comments: tuple[str, ...] = field(default=())

    def __post_init__(self):
        freqs = np.asarray(self.frequencies, dtype=float)
        mats = np.asarray(self.matrices, dtype=complex)
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "matrices", mats)
        if self.n_ports < 1:
            raise TouchstoneError("n_ports must be positive")
        if self.parameter_kind not in PARAMETER_KINDS:
            raise TouchstoneError(f"unsupported parameter kind {self.parameter_kind!r}")
        if self.format not in FORMATS:
            raise TouchstoneError(f"unsupported format {self.format!r}")
        if self.reference_impedance <= 0:
            raise TouchstoneError("reference impedance must be > 0")
        if mats.ndim != 3 or mats.shape[1:] != (self.n_ports, self.n_ports):
            raise TouchstoneError(
                f"matrices must be (F, {self.n_ports}, {self.n_ports}), got {mats.shape}"
            )
        if freqs.ndim != 1 or len(freqs) != mats.shape[0]:
            raise TouchstoneError("frequency count does not match sample count")
        if len(freqs) > 1 and not np.all(np.diff(freqs) > 0):
            raise TouchstoneError("frequencies must be strictly increasing")

    @property
    def n_samples(self) -> int:
        return len(self.frequencies)

    def samples(self):
        """Iterate (frequency_hz, matrix) pairs."""
        for f, m in zip(self.frequencies, self.matrices):
            yield float(f), m


def _parse_option_line(line: str) -> tuple[str, str, str, float]:
    unit, kind, fmt, z0 = "GHZ", "S", "MA", 50.0
    tokens = line[1:].upper().split()
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok in FREQ_MULTIPLIERS:
            unit = tok
        elif tok in ("S", "Y", "Z", "G", "H"):
            if tok in ("G", "H"):
                raise TouchstoneError(f"parameter kind {tok!r} not supported")
            kind = tok
        elif tok in FORMATS:
            fmt = tok
        elif tok == "R":
            i += 1
            if i >= len(tokens):
                raise TouchstoneError("option line: 'R' with no impedance value")
            try:
                z0 = float(tokens[i])
            except ValueError as exc:
                raise TouchstoneError(f"option line: bad impedance {tokens[i]!r}") from exc
        else:
            raise TouchstoneError(f"option line: unrecognized token {tok!r}")
        i += 1
    if z0 <= 0:
        raise TouchstoneError("option line: reference impedance must be > 0")
    return unit, kind, fmt, z0


def _to_complex(fmt: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if fmt == "RI":
        return a + 1j * b
    if fmt == "MA":
        return a * np.exp(1j * np.deg2rad(b))
    # DB: magnitude in dB, angle in degrees
    return 10.0 ** (a / 20.0) * np.exp(1j * np.deg2rad(b))


def parse_touchstone(text, n_ports: int) -> TouchstoneDocument:
    """Parse Touchstone v1 content into a :class:`TouchstoneDocument`.

    ``text`` may be a string or a readable text stream.  ``n_ports``
    must be supplied by the caller (conventionally from the .sNp file
    extension) because v1 files do not declare it.
    """
    if hasattr(text, "read"):
        text = text.read()
    if n_ports < 1:
        raise TouchstoneError("n_ports must be positive")

    option = None
    comments: list[str] = []
    numbers: list[float] = []
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("["):
            raise TouchstoneError(
                f"line {lineno}: Touchstone v2 keyword {line.split()[0]!r} is not supported"
            )
        if line.startswith("!"):
            comments.append(line[1:].strip())
            continue
        bang = line.find("!")
        if bang >= 0:
            line = line[:bang].strip()
            if not line:
                continue
        if line.startswith("#"):
            if option is not None:
                raise TouchstoneError(f"line {lineno}: multiple option lines")
            option = _parse_option_line(line)
            continue
        if option is None:
            raise TouchstoneError(f"line {lineno}: data before the '#' option line")
        for tok in line.split():
            try:
                numbers.append(float(tok))
            except ValueError as exc:
                raise TouchstoneError(f"line {lineno}: bad number {tok!r}") from exc

    if option is None:
        raise TouchstoneError("missing '#' option line")
    unit, kind, fmt, z0 = option

    record = 1 + 2 * n_ports * n_ports
    if not numbers:
        raise TouchstoneError("no data rows")
    if len(numbers) % record != 0:
        raise TouchstoneError(
            f"data length {len(numbers)} is not a multiple of the {record}-value "
            f"record expected for {n_ports} ports (noise-parameter sections are "
            "not supported)"
        )
    data = np.asarray(numbers, dtype=float).reshape(-1, record)
    freqs = data[:, 0] * FREQ_MULTIPLIERS[unit]
    if len(freqs) > 1 and not np.all(np.diff(freqs) > 0):
        raise TouchstoneError("non-monotonic frequency column")

    pairs = data[:, 1:].reshape(-1, n_ports * n_ports, 2)
    values = _to_complex(fmt, pairs[..., 0], pairs[..., 1])
    if n_ports == 2:
        # v1 two-port order is S11 S21 S12 S22, i.e. column-major
        mats = values.reshape(-1, 2, 2).transpose(0, 2, 1)
    else:
        mats = values.reshape(-1, n_ports, n_ports)

    return TouchstoneDocument(
        n_ports=n_ports,
        freq_unit=unit.capitalize() if unit != "HZ" else "Hz",
        parameter_kind=kind,
        format=fmt,
        reference_impedance=z0,
        frequencies=freqs,
        matrices=mats,
        comments=tuple(comments),
    )


def interpolate_matrices(frequencies: np.ndarray, matrices: np.ndarray, f: float) -> np.ndarray:
    """Element-wise linear interpolation of a matrix grid at frequency ``f``.

    Real and imaginary parts are interpolated independently between the
    bracketing samples; an exact grid point returns the stored matrix.
    """
    freqs = np.asarray(frequencies, dtype=float)
    if len(freqs) == 0:
        raise TouchstoneError("no samples to interpolate")
    if f < freqs[0] or f > freqs[-1]:
        raise TouchstoneError(
            f"frequency {f:g} Hz outside data range [{freqs[0]:g}, {freqs[-1]:g}] Hz"
        )
    idx = int(np.searchsorted(freqs, f))
    if idx < len(freqs) and freqs[idx] == f:
        return np.array(matrices[idx])
    lo, hi = idx - 1, idx
    alpha = (f - freqs[lo]) / (freqs[hi] - freqs[lo])
    return (1.0 - alpha) * matrices[lo] + alpha * matrices[hi]


def interpolate_at(doc: TouchstoneDocument, f: float) -> np.ndarray:
    """Interpolated n×n matrix of ``doc`` at ``f`` (Hz)."""
    return interpolate_matrices(doc.frequencies, doc.matrices, f)


def _format_value(fmt: str, v: complex) -> tuple[float, float]:
    if fmt == "RI":
        return v.real, v.imag
    mag = abs(v)
    ang = math.degrees(math.atan2(v.imag, v.real)) if mag else 0.0
    if fmt == "MA":
        return mag, ang
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(mag) if mag else -math.inf
    return float(db), ang


def write_touchstone(doc: TouchstoneDocument, format: str | None = None) -> str:
    """Serialize a document back to Touchstone v1 text.

    Numbers are written with 17 significant digits so that a
    parse(write(doc)) round trip reproduces every complex value to
    better than 1e-12 relative error.  Comments are emitted as a single
    header block; their original positions are not preserved.
    """
    fmt = (format or doc.format).upper()
    if fmt not in FORMATS:
        raise TouchstoneError(f"unsupported output format {fmt!r}")
    if doc.n_samples == 0:
        raise TouchstoneError("no data rows")

    out: list[str] = []
    for c in doc.comments:
        out.append(f"! {c}" if c else "!")
    out.append(f"# HZ {doc.parameter_kind} {fmt} R {doc.reference_impedance:.17g}")

    n = doc.n_ports
    for f, m in doc.samples():
        if n == 2:
            seq = [m[0, 0], m[1, 0], m[0, 1], m[1, 1]]
            rows = [seq]
        else:
            rows = [list(m[i, :]) for i in range(n)]
        for i, row in enumerate(rows):
            fields = []
            if i == 0:
                fields.append(f"{f:.17g}")
            for v in row:
                a, b = _format_value(fmt, complex(v))
                fields.append(f"{a:.17g}")
                fields.append(f"{b:.17g}")
            prefix = "" if i == 0 else "  "
            out.append(prefix + " ".join(fields))
    return "\n".join(out) + "\n"
