"""Plain-text records for symbols, dense operators, factorizations and CSV tables.

Every float is written with 17 significant digits so a write/read round trip
is exact and re-running an experiment reproduces files byte for byte.
"""

from __future__ import annotations

import csv
import io
import os
from pathlib import Path

import numpy as np

from .linalg import DenseOperator
from .symbols import FourierSymbol

FMT = "%.17g"


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return FMT % x
    if x is None:
        return ""
    return str(x)


def _fmt_complex(z: complex) -> str:
    im = FMT % z.imag
    return f"{FMT % z.real}{im if im.startswith('-') else '+' + im}i"


def format_symbol(sym: FourierSymbol) -> str:
    """Header lines ``N``, ``band``, ``label``, ``hermitian``, then one line per ``k``:
    ``k re(a_k[0,0]) im(a_k[0,0]) re(a_k[0,1]) ...`` in row-major order."""
    lines = ["# symbol", f"N {sym.N}", f"band {sym.band}", f"label {sym.label}", f"hermitian {int(sym.hermitian)}"]
    for k, block in zip(range(-sym.band, sym.band + 1), sym.coeffs):
        flat = block.ravel()
        vals = " ".join(f"{FMT % z.real} {FMT % z.imag}" for z in flat)
        lines.append(f"{k} {vals}")
    return "\n".join(lines) + "\n"


def parse_symbol(text: str) -> FourierSymbol:
    header = {}
    coeffs = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        if key in ("N", "band", "label", "hermitian"):
            header[key] = rest.strip()
            continue
        vals = np.array(rest.split(), dtype=float)
        coeffs[int(key)] = vals[0::2] + 1j * vals[1::2]
    try:
        N = int(header["N"])
        K = int(header["band"])
    except KeyError as exc:
        raise ValueError(f"symbol record is missing the {exc.args[0]!r} header") from None
    arr = np.zeros((2 * K + 1, N, N), dtype=complex)
    for k, v in coeffs.items():
        if abs(k) > K or v.size != N * N:
            raise ValueError(f"bad coefficient line for k={k}")
        arr[k + K] = v.reshape(N, N)
    return FourierSymbol(arr, label=header.get("label", ""), hermitian=header.get("hermitian", "0") == "1")


def write_symbol(sym: FourierSymbol, path) -> None:
    Path(path).write_text(format_symbol(sym))


def read_symbol(path) -> FourierSymbol:
    return parse_symbol(Path(path).read_text())


def format_operator(op: DenseOperator) -> str:
    """``rows cols label`` then one text row per matrix row, entries as ``re+imi``."""
    lines = [f"{op.rows} {op.cols} {op.label}"]
    for row in op.entries:
        lines.append(" ".join(_fmt_complex(z) for z in row))
    return "\n".join(lines) + "\n"


def parse_operator(text: str) -> DenseOperator:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    r, c, label = lines[0].split()
    entries = np.array([[complex(tok.replace("i", "j")) for tok in ln.split()] for ln in lines[1:]])
    entries = entries.reshape(int(r), int(c))
    return DenseOperator(entries, label)


def write_factorization(fact, directory) -> None:
    """Four symbol records plus ``residuals.txt`` with one summary line."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for name in ("u_minus", "u_plus", "v_plus", "v_minus"):
        write_symbol(getattr(fact, name), d / f"{name}.sym")
    leak = max(fact.leakage.values()) if fact.leakage else 0.0
    (d / "residuals.txt").write_text(
        f"right {fmt(fact.right_residual)} left {fmt(fact.left_residual)} leakage {fmt(leak)} "
        f"method {fact.method}\n"
    )


def read_factorization(directory) -> dict:
    d = Path(directory)
    out = {name: read_symbol(d / f"{name}.sym") for name in ("u_minus", "u_plus", "v_plus", "v_minus")}
    toks = (d / "residuals.txt").read_text().split()
    summary = dict(zip(toks[0::2], toks[1::2]))
    out["right_residual"] = float(summary["right"])
    out["left_residual"] = float(summary["left"])
    return out


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    # single writer; newline handling fixed so the bytes do not depend on the platform
    with open(path, "w", newline="") as fh:
        fh.write(csv_text(header, rows))


def split_complex(z) -> tuple[float, float]:
    z = complex(z)
    return z.real, z.imag


def default_output_dir() -> str:
    return os.environ.get("KREINTOEPLITZ_OUT", "kreintoeplitz-out")
