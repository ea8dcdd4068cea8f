"""Problem files: a strict JSON schema describing one verification instance.

Complex numbers are written as a plain number (real) or a two-element
[re, im] list; vectors are lists of those.  Unknown keys anywhere are an
error that names the offending path, so typos fail loudly instead of being
silently ignored.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bv import BVFunction, DENSITY_KINDS, DensityPiece
from .contour import EtaShiftExtension, RationalExtension
from .dirichlet import CoefficientSequence, DirichletInstance, build_instance
from .growth import CutoffRule, GrowthBound
from .transform import TauberianCertificate
from .vectors import NORM_KINDS


class ProblemFormatError(ValueError):
    """Malformed problem file; the message carries the JSON path."""


def _fail(path: str, message: str):
    raise ProblemFormatError(f"{path}: {message}")


def _check_keys(obj: dict, allowed: set[str], path: str):
    if not isinstance(obj, dict):
        _fail(path, f"expected an object, got {type(obj).__name__}")
    unknown = set(obj) - allowed
    if unknown:
        _fail(path, f"unknown key {sorted(unknown)[0]!r}; allowed keys: {sorted(allowed)}")


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        _fail(path, f"missing required key {key!r}")
    return obj[key]


def _as_float(node, path: str) -> float:
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        _fail(path, f"expected a number, got {node!r}")
    return float(node)


def _as_complex(node, path: str) -> complex:
    if isinstance(node, (int, float)) and not isinstance(node, bool):
        return complex(node)
    if (isinstance(node, list) and len(node) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in node)):
        return complex(node[0], node[1])
    _fail(path, f"expected a number or [re, im] pair, got {node!r}")


def _as_vector(node, dimension: int, path: str) -> np.ndarray:
    if not isinstance(node, list):
        _fail(path, f"expected a list of {dimension} components")
    if isinstance(node, list) and len(node) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in node) and dimension == 1:
        # a bare [re, im] pair is a 1-vector
        return np.asarray([complex(node[0], node[1])])
    if len(node) != dimension:
        _fail(path, f"expected {dimension} components, got {len(node)}")
    return np.asarray([_as_complex(v, f"{path}[{i}]") for i, v in enumerate(node)])


def _build_density(node, dimension: int, path: str) -> DensityPiece:
    _check_keys(node, {"from", "to", "kind", "scale", "rate", "exponent"}, path)
    start = _as_float(_require(node, "from", path), f"{path}.from")
    to = _require(node, "to", path)
    end = math.inf if to == "inf" else _as_float(to, f"{path}.to")
    kind = _require(node, "kind", path)
    if kind not in DENSITY_KINDS:
        _fail(f"{path}.kind", f"unknown density kind {kind!r}; choose from {DENSITY_KINDS}")
    scale = _as_vector(_require(node, "scale", path), dimension, f"{path}.scale")
    rate = 0j
    exponent = 0.0
    if kind in ("exponential", "damped_power"):
        rate = _as_complex(_require(node, "rate", path), f"{path}.rate")
    elif "rate" in node:
        _fail(f"{path}.rate", f"density kind {kind!r} takes no rate")
    if kind in ("power", "damped_power"):
        exponent = _as_float(_require(node, "exponent", path), f"{path}.exponent")
    elif "exponent" in node:
        _fail(f"{path}.exponent", f"density kind {kind!r} takes no exponent")
    try:
        return DensityPiece(start=start, end=end, kind=kind,
                            scale=tuple(scale.tolist()), rate=rate, exponent=exponent)
    except ValueError as exc:
        _fail(path, str(exc))


_GROWTH_BUILDERS = {
    "constant": (("c",), lambda p: GrowthBound.constant(p["c"])),
    "affine": (("c",), lambda p: GrowthBound.affine(p["c"])),
    "power": (("c", "alpha"), lambda p: GrowthBound.power(p["c"], p["alpha"])),
    "log": (("c", "beta"), lambda p: GrowthBound.log_power(p["c"], p["beta"])),
    "exp": (("c", "kappa"), lambda p: GrowthBound.exponential(p["c"], p["kappa"])),
}


def _build_growth(node, path: str) -> GrowthBound:
    _check_keys(node, {"kind", "params"}, path)
    kind = _require(node, "kind", path)
    if kind not in _GROWTH_BUILDERS:
        _fail(f"{path}.kind", f"unknown growth kind {kind!r}; choose from {sorted(_GROWTH_BUILDERS)}")
    names, builder = _GROWTH_BUILDERS[kind]
    params_node = _require(node, "params", path)
    _check_keys(params_node, set(names), f"{path}.params")
    params = {name: _as_float(_require(params_node, name, f"{path}.params"),
                              f"{path}.params.{name}") for name in names}
    try:
        return builder(params)
    except ValueError as exc:
        _fail(path, str(exc))


def _build_cutoff(node, path: str) -> CutoffRule:
    _check_keys(node, {"kind", "value"}, path)
    kind = _require(node, "kind", path)
    if kind == "exp_t":
        return CutoffRule.exp_of_t()
    if kind == "infinite":
        return CutoffRule.infinite()
    if kind == "constant":
        return CutoffRule.constant(_as_float(_require(node, "value", path), f"{path}.value"))
    _fail(f"{path}.kind", f"unknown cutoff kind {kind!r}; choose from ['constant', 'exp_t', 'infinite']")


def _build_certificate(node, cutoff: CutoffRule, path: str) -> TauberianCertificate:
    _check_keys(node, {"C", "x0", "T"}, path)
    C = _as_float(_require(node, "C", path), f"{path}.C")
    x0 = _as_float(_require(node, "x0", path), f"{path}.x0")
    T = _as_float(node.get("T", 0.0), f"{path}.T")
    try:
        return TauberianCertificate(C=C, x0=x0, T=T, R_rule=cutoff)
    except ValueError as exc:
        _fail(path, str(exc))


def _build_extension(node, path: str):
    _check_keys(node, {"kind", "params"}, path)
    kind = _require(node, "kind", path)
    params = node.get("params", {})
    if kind == "rational":
        _check_keys(params, {"numerator", "denominator"}, f"{path}.params")
        num = [_as_complex(v, f"{path}.params.numerator[{i}]")
               for i, v in enumerate(_require(params, "numerator", f"{path}.params"))]
        den = [_as_complex(v, f"{path}.params.denominator[{i}]")
               for i, v in enumerate(_require(params, "denominator", f"{path}.params"))]
        try:
            return RationalExtension(num, den)
        except ValueError as exc:
            _fail(path, str(exc))
    if kind == "eta_shift":
        _check_keys(params, {"terms"}, f"{path}.params")
        terms = params.get("terms", 96)
        if not isinstance(terms, int) or isinstance(terms, bool) or terms < 8:
            _fail(f"{path}.params.terms", "terms must be an integer >= 8")
        return EtaShiftExtension(terms=terms)
    _fail(f"{path}.kind", f"unknown extension kind {kind!r}; choose from ['eta_shift', 'rational']")


def _build_coefficients(node, base_dir: Path, path: str) -> CoefficientSequence:
    if isinstance(node, str):
        if node == "alternating":
            return CoefficientSequence.alternating()
        if node == "ones":
            return CoefficientSequence.ones()
        _fail(path, f"unknown coefficient rule {node!r}; use 'alternating', 'ones', or an object")
    _check_keys(node, {"kind", "values", "path"}, path)
    kind = _require(node, "kind", path)
    if kind in ("alternating", "ones"):
        return CoefficientSequence.alternating() if kind == "alternating" else CoefficientSequence.ones()
    if kind == "periodic":
        values = _require(node, "values", path)
        if not isinstance(values, list) or not values:
            _fail(f"{path}.values", "expected a nonempty list of coefficients")
        first = values[0]
        width = len(first) if isinstance(first, list) and (
            len(first) != 2 or isinstance(first[0], list)) else None
        if width is None:
            vec = [_as_complex(v, f"{path}.values[{i}]") for i, v in enumerate(values)]
            return CoefficientSequence.periodic(np.asarray(vec)[:, None])
        table = [[_as_complex(c, f"{path}.values[{i}][{j}]") for j, c in enumerate(row)]
                 for i, row in enumerate(values)]
        return CoefficientSequence.periodic(np.asarray(table))
    if kind == "file":
        rel = _require(node, "path", path)
        if not isinstance(rel, str):
            _fail(f"{path}.path", "expected a file path string")
        try:
            return CoefficientSequence.from_file(base_dir / rel)
        except (OSError, ValueError) as exc:
            _fail(path, str(exc))
    _fail(f"{path}.kind", f"unknown coefficient kind {kind!r}")


@dataclass(frozen=True)
class Problem:
    name: str
    dimension: int
    norm_kind: str
    bv: BVFunction
    certificate: TauberianCertificate
    growth: GrowthBound | None
    extension: object | None
    f0: np.ndarray | None
    dirichlet: DirichletInstance | None
    source: str

    def require_growth(self) -> GrowthBound:
        if self.growth is None:
            raise ProblemFormatError(
                f"{self.source}: this command needs a 'growth' block in the problem file")
        return self.growth

    def require_extension(self):
        if self.extension is None:
            raise ProblemFormatError(
                f"{self.source}: this command needs an 'extension' block in the problem file")
        return self.extension


_TOP_KEYS = {"name", "dimension", "norm", "jumps", "densities", "growth",
             "cutoff", "certificate", "extension", "f0", "dirichlet"}


def load_problem(path) -> Problem:
    """Parse and validate one problem file into package objects."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ProblemFormatError(f"{path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"{path}: invalid JSON ({exc})") from None
    _check_keys(raw, _TOP_KEYS, str(path))

    name = raw.get("name", path.stem)
    if not isinstance(name, str):
        _fail(f"{path}.name", "expected a string")
    norm_kind = raw.get("norm", "euclidean")
    if norm_kind not in NORM_KINDS:
        _fail(f"{path}.norm", f"unknown norm {norm_kind!r}; choose from {NORM_KINDS}")

    growth = _build_growth(raw["growth"], f"{path}.growth") if "growth" in raw else None
    extension = _build_extension(raw["extension"], f"{path}.extension") if "extension" in raw else None

    if "dirichlet" in raw:
        for key in ("dimension", "jumps", "densities", "certificate", "cutoff"):
            if key in raw:
                _fail(f"{path}.{key}", "not allowed alongside a 'dirichlet' block")
        node = raw["dirichlet"]
        _check_keys(node, {"coefficients", "n_max", "f0"}, f"{path}.dirichlet")
        coeffs = _build_coefficients(_require(node, "coefficients", f"{path}.dirichlet"),
                                     path.parent, f"{path}.dirichlet.coefficients")
        n_max = node.get("n_max", 1_000_000)
        if not isinstance(n_max, int) or isinstance(n_max, bool) or n_max < 2:
            _fail(f"{path}.dirichlet.n_max", "expected an integer >= 2")
        try:
            instance = build_instance(coeffs, n_max=n_max, norm_kind=norm_kind)
        except ValueError as exc:
            _fail(f"{path}.dirichlet", str(exc))
        f0 = instance.f0
        if "f0" in node:
            f0 = _as_vector(node["f0"], instance.bv.dimension, f"{path}.dirichlet.f0")
        return Problem(name=name, dimension=instance.bv.dimension, norm_kind=norm_kind,
                       bv=instance.bv, certificate=instance.certificate, growth=growth,
                       extension=extension, f0=f0, dirichlet=instance, source=str(path))

    dimension = raw.get("dimension", 1)
    if not isinstance(dimension, int) or isinstance(dimension, bool) or dimension < 1:
        _fail(f"{path}.dimension", "expected an integer >= 1")

    jumps = raw.get("jumps", [])
    if not isinstance(jumps, list):
        _fail(f"{path}.jumps", "expected a list")
    times, sizes = [], []
    for i, entry in enumerate(jumps):
        jpath = f"{path}.jumps[{i}]"
        _check_keys(entry, {"t", "value"}, jpath)
        times.append(_as_float(_require(entry, "t", jpath), f"{jpath}.t"))
        sizes.append(_as_vector(_require(entry, "value", jpath), dimension, f"{jpath}.value"))

    densities = raw.get("densities", [])
    if not isinstance(densities, list):
        _fail(f"{path}.densities", "expected a list")
    pieces = tuple(_build_density(node, dimension, f"{path}.densities[{i}]")
                   for i, node in enumerate(densities))

    if not times and not pieces:
        _fail(str(path), "problem defines neither jumps, densities, nor a dirichlet block")

    try:
        bv = BVFunction(dimension=dimension,
                        jump_times=np.asarray(times, dtype=float),
                        jump_sizes=(np.asarray(sizes, dtype=complex)
                                    if sizes else np.empty((0, dimension), dtype=complex)),
                        pieces=pieces, norm_kind=norm_kind)
    except ValueError as exc:
        _fail(f"{path}.jumps", str(exc))

    cutoff = _build_cutoff(raw["cutoff"], f"{path}.cutoff") if "cutoff" in raw else CutoffRule.infinite()
    cert = _build_certificate(_require(raw, "certificate", str(path)), cutoff, f"{path}.certificate")

    f0 = _as_vector(raw["f0"], dimension, f"{path}.f0") if "f0" in raw else None
    return Problem(name=name, dimension=dimension, norm_kind=norm_kind, bv=bv,
                   certificate=cert, growth=growth, extension=extension, f0=f0,
                   dirichlet=None, source=str(path))
