"""JSON and DOT serialization.

Scalars are strings "a/b" (or "a"); lattices are written in canonical form so
that serializing equal values gives identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

from .building import Apartment, ClassSet, LatticeClass, class_of, exponent_vector, in_apartment, neighbors
from .lattice import Lattice, SingularMatrixError
from .orders import Order
from .polytrope import ExponentMatrix
from .valuation import PAdicContext, as_scalar, scalar_to_str


class FormatError(ValueError):
    """Malformed input document."""


def _grid(m):
    return [[scalar_to_str(x) for x in row] for row in m]


def _parse_grid(rows, d=None):
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise FormatError("matrix must be a list of rows")
    n = len(rows)
    if d is not None and n != d:
        raise FormatError(f"expected {d} rows, got {n}")
    if any(len(r) != n for r in rows):
        raise FormatError("matrix must be square")
    try:
        return tuple(tuple(as_scalar(x) for x in r) for r in rows)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise FormatError(f"bad scalar: {e}") from None


def _context(obj) -> PAdicContext:
    if not isinstance(obj, dict) or "p" not in obj:
        raise FormatError("missing field 'p'")
    p = obj["p"]
    if not isinstance(p, int) or isinstance(p, bool):
        raise FormatError("'p' must be an integer")
    return PAdicContext(p)


# -- values <-> plain data ------------------------------------------------


def lattice_to_data(lat: Lattice) -> dict:
    return {"p": lat.ctx.p, "d": lat.n, "basis": _grid(lat.basis)}


def lattice_from_data(obj) -> Lattice:
    ctx = _context(obj)
    basis = _parse_grid(obj.get("basis"), obj.get("d"))
    return Lattice.from_basis(ctx, basis)


def classset_to_data(s) -> list:
    return [lattice_to_data(c.rep) for c in ClassSet(s)]


def classset_from_data(items) -> ClassSet:
    if not isinstance(items, list):
        raise FormatError("class set must be a list of lattices")
    return ClassSet(class_of(lattice_from_data(x)) for x in items)


def order_to_data(order: Order) -> dict:
    return {"p": order.ctx.p, "d": order.d, "basis": [_grid(m) for m in order.basis_matrices()]}


def order_from_data(obj) -> Order:
    ctx = _context(obj)
    d = obj.get("d")
    mats = obj.get("basis")
    if not isinstance(mats, list) or not mats:
        raise FormatError("order basis must be a nonempty list of matrices")
    grids = [_parse_grid(m, d) for m in mats]
    return Order.from_matrices(ctx, grids)


def exponent_matrix_to_data(m: ExponentMatrix) -> dict:
    return {"d": m.d, "entries": m.tolist()}


def exponent_matrix_from_data(obj) -> ExponentMatrix:
    entries = obj.get("entries") if isinstance(obj, dict) else obj
    if not isinstance(entries, list) or not all(
            isinstance(r, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in r)
            for r in entries):
        raise FormatError("exponent matrix must be a grid of integers")
    return ExponentMatrix(tuple(tuple(r) for r in entries))


def chain_to_data(chain, class_sets=None) -> dict:
    out = {"orders": [order_to_data(o) for o in chain]}
    if class_sets is not None:
        out["class_sets"] = [classset_to_data(s) for s in class_sets]
    return out


def to_data(value):
    """Plain-data form of any exported value kind."""
    if isinstance(value, Lattice):
        return lattice_to_data(value)
    if isinstance(value, LatticeClass):
        return lattice_to_data(value.rep)
    if isinstance(value, ClassSet):
        return classset_to_data(value)
    if isinstance(value, Order):
        return order_to_data(value)
    if isinstance(value, ExponentMatrix):
        return exponent_matrix_to_data(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"malformed JSON: {e}") from None


def write_output(data, path=None) -> str:
    text = dumps(data) if not isinstance(data, str) else data
    if path is not None and str(path) != "-":
        Path(path).write_text(text, encoding="utf-8")
    return text


def read_json(path):
    return loads(Path(path).read_text(encoding="utf-8"))


# -- DOT ------------------------------------------------------------------


def export_dot(s, apt: Apartment | None = None, path=None, highlight=()) -> str:
    """Distance-1 graph of a class set in DOT.

    Labels are exponent vectors in ``apt`` when given (classes outside it fall
    back to canonical diagonal exponents).  Classes in ``highlight`` are
    filled.
    """
    s = ClassSet(s)
    if not len(s):
        raise ValueError("empty class set")
    index = {c: i for i, c in enumerate(s)}
    marked = set(highlight)
    lines = ["graph classes {"]
    for c, i in index.items():
        if apt is not None and in_apartment(apt, c):
            label = "(" + ",".join(str(x) for x in exponent_vector(apt, c)) + ")"
        else:
            label = "(" + ",".join(str(x) for x in c.rep.exponents) + ")"
            if apt is not None:
                label += "*"
        attrs = f'label="{label}"'
        if c in marked:
            attrs += ", style=filled, fillcolor=palegreen"
        lines.append(f"  n{i} [{attrs}];")
    for c, i in index.items():
        for x in neighbors(c):
            j = index.get(x)
            if j is not None and i < j:
                lines.append(f"  n{i} -- n{j};")
    lines.append("}")
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


__all__ = [
    "FormatError", "SingularMatrixError", "lattice_to_data", "lattice_from_data",
    "classset_to_data", "classset_from_data", "order_to_data", "order_from_data",
    "exponent_matrix_to_data", "exponent_matrix_from_data", "chain_to_data", "to_data",
    "dumps", "loads", "write_output", "read_json", "export_dot",
]
