"""Scenario files.

A scenario is a JSON document carrying the model dimensions, grid, step
unitaries, physical family, and named system1 predicates.  Complex
numbers are stored as [re, im] pairs so the format stays diffable and
binary-free.  Loading validates every declared object and fails naming
the first offender.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import ValidationError
from .linalg import DEFAULT_TOL, Tolerance
from .model import Model, PhysicalFamily, TimeGrid, forward_closure, validate_family

FORMAT_VERSION = 1


@dataclass(frozen=True)
class Scenario:
    """A loaded scenario: model, family, and named system1 predicates."""

    name: str
    model: Model
    fam: PhysicalFamily
    predicates: dict
    grid_names: tuple

    def predicate(self, name: str) -> np.ndarray:
        if name not in self.predicates:
            raise KeyError(
                f"unknown predicate {name!r}; available: {', '.join(sorted(self.predicates))}"
            )
        return self.predicates[name]

    def grid_index(self, token: str) -> int:
        """Resolve a grid label name or a bare integer to an index."""
        if token in self.grid_names:
            return self.grid_names.index(token)
        try:
            return self.model.grid.check_index(int(token))
        except (ValueError, IndexError):
            raise KeyError(
                f"unknown grid label {token!r}; available: {', '.join(self.grid_names)}"
            ) from None


def _matrix_to_pairs(m: np.ndarray) -> list:
    return [[[float(c.real), float(c.imag)] for c in row] for row in np.asarray(m)]


def _vector_to_pairs(v: np.ndarray) -> list:
    return [[float(c.real), float(c.imag)] for c in np.asarray(v).reshape(-1)]


def _pairs_to_matrix(rows, what: str) -> np.ndarray:
    try:
        return np.array(
            [[complex(c[0], c[1]) for c in row] for row in rows], dtype=complex
        )
    except (TypeError, IndexError, ValueError):
        raise ValidationError(f"{what}: entries must be [re, im] pairs") from None


def _pairs_to_vector(entries, what: str) -> np.ndarray:
    try:
        return np.array([complex(c[0], c[1]) for c in entries], dtype=complex)
    except (TypeError, IndexError, ValueError):
        raise ValidationError(f"{what}: entries must be [re, im] pairs") from None


def _label_projector(labels, d1: int, what: str) -> np.ndarray:
    p = np.zeros((d1, d1), dtype=complex)
    for l in labels:
        l = int(l)
        if not 0 <= l < d1:
            raise ValidationError(f"{what}: label {l} outside 0..{d1 - 1}")
        p[l, l] = 1.0
    return p


def serialize(name: str, model: Model, fam: PhysicalFamily, predicates: dict,
              grid_names=None, family_spec: dict | None = None) -> str:
    """Render a scenario as a deterministic JSON string.

    The family is stored as explicit projectors unless ``family_spec``
    supplies a forward-closure description to embed instead.
    """
    doc = {
        "format": FORMAT_VERSION,
        "name": name,
        "dimensions": {"d1": model.d1, "d2": model.d2},
        "grid": list(model.grid.times),
        "grid_names": list(grid_names) if grid_names else
                      [str(k) for k in range(model.n_indices)],
        "steps": [_matrix_to_pairs(u) for u in model.steps],
        "family": family_spec if family_spec is not None else {
            "type": "explicit",
            "projectors": [_matrix_to_pairs(p) for p in fam.projectors],
        },
        "predicates": {},
    }
    for pname in sorted(predicates):
        p = linalg.as_matrix(predicates[pname])
        diag = np.diag(p).real
        if linalg.max_abs(p - np.diag(np.round(diag))) <= DEFAULT_TOL.eps_zero:
            doc["predicates"][pname] = {
                "labels": [int(l) for l in np.nonzero(diag > 0.5)[0]]
            }
        else:
            doc["predicates"][pname] = {"matrix": _matrix_to_pairs(p)}
    return json.dumps(doc, indent=2, sort_keys=True)


def loads(text: str, name: str = "<string>",
          tol: Tolerance = DEFAULT_TOL) -> Scenario:
    """Parse and validate a scenario document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{name}: not valid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ValidationError(f"{name}: top level must be an object")

    def need(key):
        if key not in doc:
            raise ValidationError(f"{name}: missing required field {key!r}")
        return doc[key]

    dims = need("dimensions")
    try:
        d1, d2 = int(dims["d1"]), int(dims["d2"])
    except (TypeError, KeyError, ValueError):
        raise ValidationError(f"{name}: dimensions must carry integer d1 and d2") from None

    grid = TimeGrid(tuple(float(t) for t in need("grid")))
    steps = []
    for k, rows in enumerate(need("steps")):
        u = _pairs_to_matrix(rows, f"step {k}")
        if u.shape != (d1 * d2, d1 * d2):
            raise ValidationError(
                f"step {k} has shape {u.shape}, expected {(d1 * d2, d1 * d2)}"
            )
        if not linalg.is_unitary(u, tol):
            raise ValidationError(f"step {k} is not unitary")
        steps.append(u)
    try:
        model = Model(d1, d2, grid, tuple(steps), tol)
    except ValidationError as exc:
        raise ValidationError(f"{name}: {exc}") from None

    famspec = need("family")
    kind = famspec.get("type")
    if kind == "explicit":
        projs = []
        for k, rows in enumerate(famspec.get("projectors", [])):
            p = _pairs_to_matrix(rows, f"family projector {k}")
            if not linalg.is_projector(p, tol):
                raise ValidationError(f"family projector {k} is not a projector")
            projs.append(p)
        fam = PhysicalFamily(tuple(projs))
    elif kind == "forward-closure":
        initial = [
            _pairs_to_vector(v, f"family initial state {i}")
            for i, v in enumerate(famspec.get("initial", []))
        ]
        extras = {
            int(k): [
                _pairs_to_vector(v, f"family extra at index {k}")
                for v in vs
            ]
            for k, vs in famspec.get("extras", {}).items()
        }
        fam = forward_closure(model, initial, extras, tol)
    else:
        raise ValidationError(f"family type must be 'explicit' or 'forward-closure', got {kind!r}")

    report = validate_family(model, fam, tol)
    if not report.passed:
        if report.nesting_violations:
            j, k = report.nesting_violations[0]
            raise ValidationError(f"family violates nesting at index pair ({j}, {k})")
        raise ValidationError("family failed validation (projector or size check)")

    predicates = {}
    for pname, spec in need("predicates").items():
        if "labels" in spec:
            p = _label_projector(spec["labels"], d1, f"predicate {pname!r}")
        elif "matrix" in spec:
            p = _pairs_to_matrix(spec["matrix"], f"predicate {pname!r}")
        else:
            raise ValidationError(f"predicate {pname!r} needs 'labels' or 'matrix'")
        if p.shape != (d1, d1):
            raise ValidationError(f"predicate {pname!r} has shape {p.shape}, expected {(d1, d1)}")
        if not linalg.is_projector(p, tol):
            raise ValidationError(f"predicate {pname!r} is not a projector")
        predicates[pname] = p

    grid_names = tuple(str(g) for g in doc.get(
        "grid_names", [str(k) for k in range(model.n_indices)]
    ))
    if len(grid_names) != model.n_indices:
        raise ValidationError(f"{name}: grid_names length does not match the grid")
    return Scenario(str(doc.get("name", name)), model, fam, predicates, grid_names)


def load_scenario(path, tol: Tolerance = DEFAULT_TOL) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return loads(text, name=str(path), tol=tol)


def _build_reference(tol: Tolerance) -> tuple:
    from .scenarios import build_reference_experiment

    ref = build_reference_experiment(tol)
    return "reference", ref.model, ref.fam, dict(ref.predicates), ("ts", "t0", "t1")


def _build_sg_observers(tol: Tolerance) -> tuple:
    from .scenarios import build_sg_observer_space

    space = build_sg_observer_space(
        [(0.0, 0.0, 1.0), (0.0, 0.0, -1.0), (1.0, 0.0, 0.0), (-1.0, 0.0, 0.0)], tol
    )
    names = ("O+z", "O-z", "O+x", "O-x")
    predicates = {n: p for n, p in zip(names, space.observer_projectors)}
    return "sg-observers", space.model, space.fam, predicates, ("t0", "t1")


BUILTIN_SCENARIOS = ("reference", "sg-observers")


def builtin_scenario(name: str, tol: Tolerance = DEFAULT_TOL) -> Scenario:
    if name == "reference":
        sname, model, fam, preds, gnames = _build_reference(tol)
    elif name == "sg-observers":
        sname, model, fam, preds, gnames = _build_sg_observers(tol)
    else:
        raise KeyError(
            f"unknown scenario {name!r}; built in: {', '.join(BUILTIN_SCENARIOS)}"
        )
    return Scenario(sname, model, fam, preds, gnames)


def dump_builtin(name: str, tol: Tolerance = DEFAULT_TOL) -> str:
    sc = builtin_scenario(name, tol)
    return serialize(sc.name, sc.model, sc.fam, sc.predicates, sc.grid_names)
