"""Loading presentation files: ring, tangent generators, idempotent, optional potential.

File layout (JSON)::

    {
      "name": "sphere",
      "ring": {"variables": ["x", "y", "z"], "relation": "...", "leading_variable": "z"},
      "generators": [{"name": "D1", "coefficients": ["y", "-x", "0"]}, ...],
      "idempotent": [["1 - x^2", ...], ...],          # or omitted when cofactors are given
      "cofactors": {"c": ["x/2", "y/2", "z/2"], "h": "1"},
      "rho": [[...]],                                   # optional
      "potential": {"D1": [[...]], ...},                # optional, values on generators
      "expected_curvature_type": {"D1,D2": "x", ...},   # optional
      "options": {"maxdeg": 8, "seed": 0, "checks": ["curvature", "lr", "derham"]}
    }

Polynomials are strings in the ring variables.  Validation failures raise
subclasses of :class:`PresentationError` carrying a JSON path.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .connections import GeneratorMap
from .exactring import HypersurfaceRing, PolynomialSyntaxError, RingElem, RingError, parse_poly
from .idempotents import (
    CofactorIdentityError,
    IdempotentPresentation,
    MatrixA,
    NotIdempotentError,
    jacobian_splitting_idempotent,
)
from .vectorfields import Derivation, NotTangentError

BUNDLED = ("sphere", "russel")
ALIASES = {"russell": "russel"}


class PresentationError(ValueError):
    exit_code = 2

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class NotIdempotentInput(PresentationError):
    exit_code = 4


class NonTangentInput(PresentationError):
    exit_code = 5


class CofactorInput(PresentationError):
    exit_code = 6


@dataclass
class Presentation:
    name: str
    ring: HypersurfaceRing
    generators: tuple[Derivation, ...]
    generator_names: tuple[str, ...]
    phi: MatrixA
    rho: MatrixA | None = None
    potential: GeneratorMap | None = None
    cofactors: tuple | None = None
    h: Any = None
    expected_curvature_type: dict[tuple[int, int], RingElem] = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    source: dict = field(default_factory=dict)

    @property
    def digest(self) -> str:
        return canonical_digest(self.source)

    def checks(self) -> list[str]:
        return list(self.options.get("checks", ["curvature"]))


def canonical_digest(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def _expect(cond: bool, message: str, path: str) -> None:
    if not cond:
        raise PresentationError(message, path)


def _poly_elem(ring: HypersurfaceRing, text, path: str) -> RingElem:
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        _expect(float(text).is_integer(), "numeric entries must be integers; use strings for fractions", path)
        text = str(int(text))
    _expect(isinstance(text, str), "expected a polynomial string", path)
    try:
        return ring.normalize(parse_poly(text, ring.variable_names))
    except PolynomialSyntaxError as exc:
        raise PresentationError(str(exc), path) from None


def _matrix(ring: HypersurfaceRing, rows, path: str) -> MatrixA:
    n = ring.nvars
    _expect(isinstance(rows, list) and len(rows) == n, f"expected {n} rows", path)
    out = []
    for i, row in enumerate(rows):
        _expect(isinstance(row, list) and len(row) == n, f"expected {n} entries", f"{path}[{i}]")
        out.append([_poly_elem(ring, e, f"{path}[{i}][{j}]") for j, e in enumerate(row)])
    return MatrixA.from_rows(ring, out)


def parse_ring(data, path: str = "ring") -> HypersurfaceRing:
    _expect(isinstance(data, dict), "expected an object", path)
    for key in ("variables", "relation", "leading_variable"):
        _expect(key in data, f"missing key '{key}'", path)
    names = data["variables"]
    _expect(isinstance(names, list) and names and all(isinstance(v, str) and v.isidentifier() for v in names),
            "variables must be a non-empty list of identifiers", f"{path}.variables")
    try:
        return HypersurfaceRing(tuple(names), data["relation"], data["leading_variable"])
    except PolynomialSyntaxError as exc:
        raise PresentationError(str(exc), f"{path}.relation") from None
    except RingError as exc:
        raise PresentationError(str(exc), path) from None


def load_data(data: dict) -> Presentation:
    _expect(isinstance(data, dict), "top level must be an object", "$")
    _expect("ring" in data, "missing key 'ring'", "$")
    ring = parse_ring(data["ring"])
    n = ring.nvars

    gens_raw = data.get("generators")
    _expect(isinstance(gens_raw, list) and gens_raw, "expected a non-empty list", "generators")
    gens, names = [], []
    for k, g in enumerate(gens_raw):
        p = f"generators[{k}]"
        _expect(isinstance(g, dict) and "coefficients" in g, "expected {name, coefficients}", p)
        coeffs = g["coefficients"]
        _expect(isinstance(coeffs, list) and len(coeffs) == n, f"expected {n} coefficients", f"{p}.coefficients")
        vals = [_poly_elem(ring, c, f"{p}.coefficients[{i}]") for i, c in enumerate(coeffs)]
        try:
            gens.append(Derivation(ring, vals))
        except NotTangentError as exc:
            raise NonTangentInput(str(exc), p) from None
        names.append(str(g.get("name", f"X{k + 1}")))
    _expect(len(set(names)) == len(names), "generator names must be distinct", "generators")

    cofactors = h = None
    from_cofactors = None
    if "cofactors" in data:
        cd = data["cofactors"]
        _expect(isinstance(cd, dict) and "c" in cd, "expected {c, h}", "cofactors")
        _expect(isinstance(cd["c"], list) and len(cd["c"]) == n, f"expected {n} cofactors", "cofactors.c")
        try:
            cofactors = tuple(parse_poly(str(c), ring.variable_names) for c in cd["c"])
            h = parse_poly(str(cd.get("h", "0")), ring.variable_names)
        except PolynomialSyntaxError as exc:
            raise PresentationError(str(exc), "cofactors") from None
        try:
            from_cofactors = jacobian_splitting_idempotent(ring, cofactors, h).phi
        except CofactorIdentityError as exc:
            raise CofactorInput(str(exc), "cofactors") from None

    if "idempotent" in data:
        phi = _matrix(ring, data["idempotent"], "idempotent")
        try:
            IdempotentPresentation(phi)
        except NotIdempotentError as exc:
            raise NotIdempotentInput(str(exc), "idempotent") from None
    elif from_cofactors is not None:
        phi = from_cofactors
    else:
        raise PresentationError("need 'idempotent' or 'cofactors'", "$")

    rho = _matrix(ring, data["rho"], "rho") if "rho" in data else None

    potential = None
    if "potential" in data:
        pd = data["potential"]
        _expect(isinstance(pd, dict), "expected an object keyed by generator name", "potential")
        unknown = sorted(set(pd) - set(names))
        _expect(not unknown, f"unknown generators {unknown}", "potential")
        zero = MatrixA.zero(ring, n)
        values = tuple(_matrix(ring, pd[nm], f"potential.{nm}") if nm in pd else zero for nm in names)
        for nm, v in zip(names, values):
            _expect(phi @ v @ phi == v, "potential value is not an endomorphism of Im(phi)", f"potential.{nm}")
        potential = GeneratorMap(tuple(gens), values)

    expected = {}
    for key, val in data.get("expected_curvature_type", {}).items():
        p = f"expected_curvature_type.{key}"
        parts = key.split(",")
        _expect(len(parts) == 2 and all(q.strip() in names for q in parts), "key must be 'A,B' generator names", p)
        i, j = (names.index(q.strip()) for q in parts)
        expected[(i, j)] = _poly_elem(ring, val, p)

    options = data.get("options", {})
    _expect(isinstance(options, dict), "expected an object", "options")
    return Presentation(
        name=str(data.get("name", "presentation")),
        ring=ring,
        generators=tuple(gens),
        generator_names=tuple(names),
        phi=phi,
        rho=rho,
        potential=potential,
        cofactors=cofactors,
        h=h,
        expected_curvature_type=expected,
        options=dict(options),
        source=data,
    )


def bundled_path(name: str) -> Path:
    name = ALIASES.get(name, name)
    return Path(str(resources.files("lrconn") / "data" / f"{name}.json"))


def load_json_text(text: str, origin: str = "<input>") -> Presentation:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PresentationError(f"invalid JSON: {exc.msg}", f"{origin}:{exc.lineno}:{exc.colno}") from None
    return load_data(data)


def parse_presentation(path_or_name: str | Path) -> Presentation:
    """Load a presentation file, or a bundled preset by name (``sphere``, ``russel``)."""
    key = str(path_or_name)
    if key in BUNDLED or key in ALIASES:
        path = bundled_path(key)
    else:
        path = Path(key)
    try:
        text = path.read_text()
    except OSError as exc:
        raise PresentationError(f"cannot read file: {exc.strerror}", str(path)) from None
    return load_json_text(text, str(path))
