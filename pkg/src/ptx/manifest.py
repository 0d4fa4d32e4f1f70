"""JSON manifests describing a base Poisson algebra and a triple on a free module.

Text indices are 1-based (``"1,2"`` for pi, ``"3;1,2"`` for fiber tensors);
the in-memory structures use 0-based indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .base import PoissonBase
from .poly import ParseError, Poly, parse_poly
from .triple import TripleData

SECTIONS = ("poisson", "fiber_bracket", "connection", "k_tensor")
FIXTURES = ("so3.json", "so3_base_only.json", "matrix2.json", "gl2.json")


class ManifestError(ValueError):
    def __init__(self, where: str, msg: str):
        self.where = where
        super().__init__(f"{where}: {msg}" if where else msg)


@dataclass
class Manifest:
    triple: TripleData
    params: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def base(self) -> PoissonBase:
        return self.triple.base


def _parse_index_list(text: str, where: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",")]
    except ValueError:
        raise ManifestError(where, f"bad index list {text!r}") from None
    return vals


def parse_key(key: str, where: str, shape: str) -> tuple[int, ...]:
    """Turn "i,j" / "a;i,j" / "a;i" / "a,b" text into a 0-based tuple.

    ``shape`` is the expected pattern: "i,j", "a;i,j" or "a;i".
    """
    key = key.replace(" ", "")
    if ";" in shape:
        if key.count(";") != 1:
            raise ManifestError(where, f"key {key!r} does not match pattern {shape!r}")
        head, tail = key.split(";")
        parts = _parse_index_list(head, where) + _parse_index_list(tail, where)
    else:
        if ";" in key:
            raise ManifestError(where, f"key {key!r} does not match pattern {shape!r}")
        parts = _parse_index_list(key, where)
    want = len(shape.replace(";", ",").split(","))
    if len(parts) != want:
        raise ManifestError(where, f"key {key!r} does not match pattern {shape!r}")
    if any(p < 1 for p in parts):
        raise ManifestError(where, f"indices in {key!r} must be positive")
    return tuple(p - 1 for p in parts)


def parse_field(text, n: int, params: dict, where: str) -> Poly:
    if isinstance(text, (int,)) and not isinstance(text, bool):
        text = str(text)
    if not isinstance(text, str):
        raise ManifestError(where, f"expected polynomial text, got {type(text).__name__}")
    try:
        return parse_poly(text, n, params)
    except ParseError as e:
        raise ManifestError(where, str(e)) from None


def _section(data: dict, name: str, where: str) -> dict:
    sec = data.get(name, {})
    if sec is None:
        return {}
    if not isinstance(sec, dict):
        raise ManifestError(f"{where}{name}", "expected an object")
    return sec


def parse_params(raw, where="params") -> dict:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ManifestError(where, "expected an object")
    out = {}
    for name, v in raw.items():
        try:
            out[name] = Fraction(str(v).replace(" ", ""))
        except (ValueError, ZeroDivisionError):
            raise ManifestError(f"{where}.{name}", f"not a rational: {v!r}") from None
    return out


def manifest_from_dict(data: dict, params: dict | None = None) -> Manifest:
    if not isinstance(data, dict):
        raise ManifestError("", "manifest must be a JSON object")
    names = data.get("variables")
    if not isinstance(names, list) or not all(isinstance(v, str) for v in names):
        raise ManifestError("variables", "expected a list of names")
    n = len(names)
    for i, name in enumerate(names):
        if name != f"x{i + 1}":
            raise ManifestError(f"variables[{i}]", f"expected 'x{i + 1}', got {name!r}")
    k = data.get("fiber_rank")
    if not isinstance(k, int) or isinstance(k, bool) or k < 0:
        raise ManifestError("fiber_rank", "expected a nonnegative integer")
    pvals = parse_params(data.get("params"))
    if params:
        pvals.update(parse_params(params, "override"))

    pi = {}
    for key, text in _section(data, "poisson", "").items():
        where = f"poisson[{key!r}]"
        i, j = parse_key(key, where, "i,j")
        if not (i < n and j < n):
            raise ManifestError(where, "index out of range")
        if i == j:
            raise ManifestError(where, "diagonal entry of a skew matrix")
        p = parse_field(text, n, pvals, where)
        if i > j:
            i, j, p = j, i, -p
        if (i, j) in pi and pi[(i, j)] != p:
            raise ManifestError(where, "conflicts with the mirrored entry")
        pi[(i, j)] = p

    tensors = {}
    for name, shape, bounds in (
        ("fiber_bracket", "a;i,j", (k, k, k)),
        ("connection", "a;i,j", (k, n, k)),
        ("k_tensor", "a;i,j", (k, n, n)),
    ):
        out = {}
        for key, text in _section(data, name, "").items():
            where = f"{name}[{key!r}]"
            idx = parse_key(key, where, shape)
            if any(v >= b for v, b in zip(idx, bounds)):
                raise ManifestError(where, "index out of range")
            out[idx] = parse_field(text, n, pvals, where)
        tensors[name] = out

    base = PoissonBase(n, pi)
    try:
        T = TripleData(base, k, tensors["fiber_bracket"], tensors["connection"], tensors["k_tensor"])
    except (ValueError, IndexError) as e:
        raise ManifestError("tensors", str(e)) from None
    meta = data.get("meta", {})
    return Manifest(T, pvals, meta if isinstance(meta, dict) else {"description": meta})


def resolve_path(path) -> Path:
    """A filesystem path, or the name of a bundled fixture."""
    p = Path(path)
    if p.exists():
        return p
    if p.name == str(path) and p.name in FIXTURES:
        return Path(str(resources.files("ptx").joinpath("fixtures").joinpath(p.name)))
    raise FileNotFoundError(f"no such manifest: {path}")


def read_json(path) -> dict:
    p = resolve_path(path)
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ManifestError(str(p), f"invalid JSON: {e}") from None


def manifest_load(path, params: dict | None = None) -> tuple[PoissonBase, TripleData]:
    m = load_manifest(path, params)
    return m.base, m.triple


def load_manifest(path, params: dict | None = None) -> Manifest:
    return manifest_from_dict(read_json(path), params)


def load_fixture(name: str, **params) -> TripleData:
    """Bundled fixture by file name, with optional parameter overrides (e.g. ``eps="0"``)."""
    return load_manifest(name, {k: str(v) for k, v in params.items()}).triple


def _fmt_params(params: dict) -> dict:
    return {k: str(v) for k, v in params.items()}


def manifest_to_dict(T: TripleData, params: dict | None = None, meta: dict | None = None) -> dict:
    n = T.n

    def entries(d, pattern):
        out = {}
        for key in sorted(d):
            if pattern == "i,j":
                i, j = key
                out[f"{i + 1},{j + 1}"] = d[key].to_str()
            else:
                a, i, j = key
                out[f"{a + 1};{i + 1},{j + 1}"] = d[key].to_str()
        return out

    return {
        "variables": [f"x{i + 1}" for i in range(n)],
        "fiber_rank": T.k,
        "params": _fmt_params(params or {}),
        "poisson": entries(T.base.pi, "i,j"),
        "fiber_bracket": entries(T.c, "a;i,j"),
        "connection": entries(T.gamma, "a;i,j"),
        "k_tensor": entries(T.kk, "a;i,j"),
        "meta": dict(meta or {}),
    }


def manifest_save(T: TripleData, path, params: dict | None = None, meta: dict | None = None) -> None:
    data = manifest_to_dict(T, params, meta)
    Path(path).write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# auxiliary inputs for the CLI (gauges, cocycles, derivations)


def _fiber_table(sec: dict, name: str, n: int, k: int, count: int, params: dict):
    """Entries "a;i" -> coefficient of e_a in the i-th fiber element."""
    from .poly import PolyVec

    vals = [[Poly.zero(n)] * k for _ in range(count)]
    for key, text in sec.items():
        where = f"{name}[{key!r}]"
        a, i = parse_key(key, where, "a;i")
        if a >= k or i >= count:
            raise ManifestError(where, "index out of range")
        vals[i][a] = parse_field(text, n, params, where)
    return [PolyVec(v, n) for v in vals]


def _matrix(sec: dict, name: str, n: int, k: int, params: dict):
    M = [[Poly.zero(n)] * k for _ in range(k)]
    for key, text in sec.items():
        where = f"{name}[{key!r}]"
        a, b = parse_key(key, where, "i,j")
        if a >= k or b >= k:
            raise ManifestError(where, "index out of range")
        M[a][b] = parse_field(text, n, params, where)
    return M


def _scalars(sec: dict, name: str, n: int, count: int, params: dict):
    out = [Poly.zero(n)] * count
    for key, text in sec.items():
        where = f"{name}[{key!r}]"
        try:
            i = int(str(key).strip()) - 1
        except ValueError:
            raise ManifestError(where, "expected a single index") from None
        if not 0 <= i < count:
            raise ManifestError(where, "index out of range")
        out[i] = parse_field(text, n, params, where)
    return out


def gauge_from_dict(data: dict, T: TripleData, params: dict | None = None):
    """{"mu": {"a;i": ...}, "phi11": {"a,b": ...}, "phi11_inv": {"a,b": ...}}; phi11 defaults to I."""
    from .gauge import GaugeData, GaugeError

    params = dict(params or {})
    params.update(parse_params(data.get("params")))
    n, k = T.n, T.k
    mu = _fiber_table(_section(data, "mu", ""), "mu", n, k, n, params)
    phi = inv = None
    if "phi11" in data or "phi11_inv" in data:
        if "phi11" not in data or "phi11_inv" not in data:
            raise ManifestError("phi11", "phi11 and phi11_inv must be given together")
        phi = _matrix(_section(data, "phi11", ""), "phi11", n, k, params)
        inv = _matrix(_section(data, "phi11_inv", ""), "phi11_inv", n, k, params)
    try:
        return GaugeData(n, k, mu, phi, inv)
    except GaugeError as e:
        raise ManifestError("phi11_inv", str(e)) from None


def cocycle_from_dict(data: dict, T: TripleData, params: dict | None = None):
    """{"cocycle": {"a;i,j": ...}} -> rank-2 FormTensor."""
    from .cochains import FormTensor
    from .poly import PolyVec

    params = dict(params or {})
    params.update(parse_params(data.get("params")))
    n, k = T.n, T.k
    entries = {}
    for key, text in _section(data, "cocycle", "").items():
        where = f"cocycle[{key!r}]"
        a, i, j = parse_key(key, where, "a;i,j")
        if a >= k or i >= n or j >= n:
            raise ManifestError(where, "index out of range")
        if i == j:
            raise ManifestError(where, "diagonal entry of a skew tensor")
        p = parse_field(text, n, params, where)
        if i > j:
            i, j, p = j, i, -p
        v = list(entries.get((i, j), PolyVec.zero(n, k)))
        v[a] = v[a] + p
        entries[(i, j)] = PolyVec(v, n)
    return FormTensor(n, k, 2, entries)


def derivation_from_dict(data: dict, T: TripleData, params: dict | None = None):
    """{"x00": {"i": ...}, "x01": {"a": ...}, "x10": {"a;i": ...}, "x11": {"a,b": ...}}."""
    from .extension import ExtDerivation
    from .poly import PolyVec

    params = dict(params or {})
    params.update(parse_params(data.get("params")))
    n, k = T.n, T.k
    x00 = _scalars(_section(data, "x00", ""), "x00", n, n, params)
    x01 = _scalars(_section(data, "x01", ""), "x01", n, k, params)
    x10 = _fiber_table(_section(data, "x10", ""), "x10", n, k, n, params)
    M = _matrix(_section(data, "x11", ""), "x11", n, k, params)
    x11 = [PolyVec([M[a][b] for a in range(k)], n) for b in range(k)]
    return ExtDerivation(x00, x01, x10, x11)


def load_aux(path, builder, T: TripleData, params: dict | None = None):
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"no such file: {path}")
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ManifestError(str(p), f"invalid JSON: {e}") from None
    if not isinstance(data, dict):
        raise ManifestError(str(p), "expected a JSON object")
    return builder(data, T, params)


def parse_elem(text: str, n: int, k: int, params: dict | None = None):
    """Element text "f ; a1,...,ak" (the fiber part may be omitted when k = 0)."""
    from .extension import ExtElem
    from .poly import PolyVec

    if text.count(";") > 1:
        raise ManifestError("element", f"expected 'f ; a1,...,ak', got {text!r}")
    if ";" in text:
        head, tail = text.split(";")
    else:
        head, tail = text, ""
    f = parse_field(head, n, params or {}, "element scalar part")
    parts = [t for t in tail.split(",")] if tail.strip() else []
    if len(parts) != k:
        raise ManifestError("element", f"expected {k} fiber coordinates, got {len(parts)}")
    eta = [parse_field(t, n, params or {}, f"element fiber coordinate {a + 1}") for a, t in enumerate(parts)]
    return ExtElem(f, PolyVec(eta, n))
