"""Experiment configuration files (INI syntax).

Example::

    [symbol]
    name = S1
    r = 0.5
    s = 0.5

    [krein]
    alpha = 0.75
    beta = 0.75

    [function]
    kind = polynomial
    coeffs = 0, 0, 1

    [contour]
    shape = circle
    center = 3
    radius = 2.5
    nodes = 256

    [experiment]
    tasks = factorize, bo
    ns = 0, 1, 2, 4, 8

A symbol may instead come from a record file (``file = path``, relative to
the config).  Rational functions list poles as ``poles = 5:1; -2:0.5, 1``
(pole, then residues of increasing order).  ``shape = auto`` picks a circle
enclosing the sampled range with margin.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .functions import AnalyticFunction, Contour
from .symbols import FourierSymbol, KreinIndex

TASKS = ("factorize", "bo", "trace", "bounds", "audit")


class ConfigError(ValueError):
    """Unparseable or inconsistent configuration."""


@dataclass
class ExperimentConfig:
    symbol_name: str | None
    symbol_params: dict
    symbol_file: Path | None
    idx: KreinIndex
    function: AnalyticFunction
    contour: dict
    tasks: tuple
    ns: tuple
    seed: int
    band: int | None = None
    section: int | None = None
    grid_exponent: int = 12
    output_dir: str | None = None
    gamma: float | None = None
    source: str = ""
    raw: dict = field(default_factory=dict)

    def build_symbol(self) -> FourierSymbol:
        from .catalog import catalog
        from .io import read_symbol
        if self.symbol_file is not None:
            return read_symbol(self.symbol_file)
        return catalog(self.symbol_name, **self.symbol_params)

    def build_contour(self, sym: FourierSymbol) -> Contour | None:
        c = self.contour
        if not c:
            return None
        nodes = int(c.get("nodes", 256))
        shape = c.get("shape", "auto")
        if shape == "auto":
            from .trace_formula import auto_contour
            return auto_contour(sym, nodes, margin=c.get("margin"))
        skip = ("shape", "nodes", "margin", "probe")
        return Contour.from_params(shape, nodes, **{k: v for k, v in c.items() if k not in skip})


def _number(text: str):
    text = text.strip()
    for cast in (int, float, complex):
        try:
            return cast(text.replace("i", "j")) if cast is complex else cast(text)
        except ValueError:
            pass
    if text.lower() in ("none", ""):
        return None
    return text


def _list(text: str, cast=_number) -> list:
    return [cast(t) for t in text.replace("\n", ",").split(",") if t.strip()]


def _poles(text: str) -> tuple:
    out = []
    for part in text.split(";"):
        if not part.strip():
            continue
        pole, _, res = part.partition(":")
        if not res:
            raise ConfigError(f"pole entry {part.strip()!r} needs residues after ':'")
        out.append((complex(_number(pole)), tuple(complex(x) for x in _list(res))))
    return tuple(out)


def parse_config(text: str, base: Path | None = None, source: str = "<string>") -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";;"))
    cp.optionxform = str  # keep parameter case (S4 takes K)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {source}: {exc}") from None
    base = base or Path(".")
    try:
        return _build(cp, base, source)
    except ConfigError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"{source}: {exc}") from None


def _build(cp: configparser.ConfigParser, base: Path, source: str) -> ExperimentConfig:
    if "symbol" not in cp:
        raise ConfigError(f"{source}: missing [symbol] section")
    sym = dict(cp["symbol"])
    name = sym.pop("name", None)
    file = sym.pop("file", None)
    if (name is None) == (file is None):
        raise ConfigError(f"{source}: [symbol] needs exactly one of 'name' and 'file'")
    sym_file = None
    if file is not None:
        sym_file = (base / file).resolve()
        if not sym_file.exists():
            raise ConfigError(f"{source}: symbol file {sym_file} does not exist")
    else:
        from .catalog import CATALOG
        if name not in CATALOG:
            raise ConfigError(f"{source}: unknown catalog symbol {name!r}")
        unknown = set(sym) - set(CATALOG[name].params)
        if unknown:
            raise ConfigError(f"{source}: {name} does not take parameters {sorted(unknown)}")
    params = {k: _number(v) for k, v in sym.items()}

    kr = cp["krein"] if "krein" in cp else {}
    try:
        idx = KreinIndex(float(kr.get("alpha", 0.75)), float(kr.get("beta", 0.75)))
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    gamma = float(kr["gamma"]) if "gamma" in kr else None

    fn = cp["function"] if "function" in cp else {}
    kind = fn.get("kind", "polynomial")
    coeffs = _list(fn.get("coeffs", "0, 0, 1"))
    if kind == "polynomial":
        f = AnalyticFunction.polynomial(coeffs)
    elif kind == "rational":
        f = AnalyticFunction.rational(coeffs, _poles(fn.get("poles", "")), fn.get("description", ""))
    else:
        raise ConfigError(f"{source}: function kind must be polynomial or rational, got {kind!r}")

    contour = {}
    if "contour" in cp:
        ct = cp["contour"]
        contour["shape"] = ct.get("shape", "auto")
        if contour["shape"] not in ("circle", "ellipse", "polyline", "auto"):
            raise ConfigError(f"{source}: unknown contour shape {contour['shape']!r}")
        for key in ("center", "radius", "a", "b", "margin", "probe"):
            if key in ct:
                contour[key] = _number(ct[key])
        if "vertices" in ct:
            contour["vertices"] = [complex(v) for v in _list(ct["vertices"])]
        nodes = int(ct.get("nodes", 256))
        if nodes < 4 or nodes & (nodes - 1):
            raise ConfigError(f"{source}: contour nodes must be a power of two >= 4")
        contour["nodes"] = nodes

    ex = cp["experiment"] if "experiment" in cp else {}
    tasks = tuple(t.strip() for t in ex.get("tasks", "bo").split(",") if t.strip())
    bad = [t for t in tasks if t not in TASKS]
    if bad:
        raise ConfigError(f"{source}: unknown tasks {bad}; known: {', '.join(TASKS)}")
    ns = tuple(int(x) for x in _list(ex.get("ns", "0, 1, 2, 4, 8, 16, 32, 64"), int))
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ConfigError(f"{source}: ns must be strictly increasing, got {list(ns)}")
    if any(n < 0 for n in ns):
        raise ConfigError(f"{source}: ns must be nonnegative")
    if "trace" in tasks and not contour:
        raise ConfigError(f"{source}: task 'trace' needs a [contour] section")

    cu = cp["cutoffs"] if "cutoffs" in cp else {}
    out = cp["output"] if "output" in cp else {}
    return ExperimentConfig(
        symbol_name=name, symbol_params=params, symbol_file=sym_file, idx=idx, function=f,
        contour=contour, tasks=tasks, ns=ns, seed=int(ex.get("seed", 0)),
        band=int(cu["band"]) if "band" in cu else None,
        section=int(cu["section"]) if "section" in cu else None,
        grid_exponent=int(cu.get("grid_exponent", 12)),
        output_dir=out.get("dir"), gamma=gamma, source=source,
        raw={s: dict(cp[s]) for s in cp.sections()},
    )


def load_config(path) -> ExperimentConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc.strerror}") from None
    return parse_config(text, p.parent, str(p))
