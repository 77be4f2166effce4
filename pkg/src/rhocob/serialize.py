"""JSON readers and writers for groups, forms, d-tables, families and knots.

Rationals travel as strings ``"a/b"`` (``"a"`` when ``b = 1``); groups as
``[prime, exponent, multiplicity]`` triples; elements as integer arrays.
Output is canonical: sorted keys, fixed separators, trailing newline.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .abelian import FiniteAbelianGroup, from_cyclic_orders
from .errors import ParseError
from .exact import Residue, format_rational
from .linking import LinkingForm, diagonal_form, linking_from_presentation
from .obstruct import KnotRecord, ManifoldDescriptor


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str, source: str = "<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: invalid JSON: {exc.msg}", line=exc.lineno) from exc


def load(path) -> object:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: cannot read file: {exc.strerror}") from exc
    return loads(text, str(path))


def _require(obj, key, where, kind=None):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object", field=where)
    if key not in obj:
        raise ParseError(f"{where}: missing field '{key}'", field=f"{where}.{key}")
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(f"{where}.{key}: expected {kind.__name__}", field=f"{where}.{key}")
    return value


def _int(value, where) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{where}: expected an integer, got {value!r}", field=where)
    return value


def int_matrix(value, where) -> list[list[int]]:
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise ParseError(f"{where}: expected a list of integer rows", field=where)
    return [[_int(x, f"{where}[{i}][{j}]") for j, x in enumerate(row)] for i, row in enumerate(value)]


# -- scalars and groups ---------------------------------------------------


def rational_to_json(q) -> str:
    return format_rational(Fraction(q))


def rational_from_json(value, where="value") -> Fraction:
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    if not isinstance(value, str):
        raise ParseError(f"{where}: rationals must be strings like \"a/b\", got {value!r}", field=where)
    try:
        num, _, den = value.partition("/")
        return Fraction(int(num), int(den) if den else 1)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: not a rational: {value!r}", field=where) from exc


def group_to_json(G: FiniteAbelianGroup) -> list[list[int]]:
    return G.triples()


def group_from_json(value, where="h1") -> FiniteAbelianGroup:
    rows = int_matrix(value, where)
    if any(len(r) != 3 for r in rows):
        raise ParseError(f"{where}: groups are lists of [prime, exponent, multiplicity]", field=where)
    try:
        return FiniteAbelianGroup.from_triples(rows)
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}", field=where) from exc


def element_label(x) -> str:
    return ",".join(str(c) for c in x)


def element_from_label(label: str, G: FiniteAbelianGroup, where="label"):
    try:
        coords = tuple(int(c) for c in label.split(",")) if label != "" else ()
    except ValueError as exc:
        raise ParseError(f"{where}: bad element label {label!r}", field=where) from exc
    if len(coords) != G.rank:
        raise ParseError(f"{where}: label {label!r} needs {G.rank} coordinates", field=where)
    return G.element(coords)


# -- forms ----------------------------------------------------------------


def form_to_json(form: LinkingForm) -> dict:
    return {
        "type": "gram",
        "group": group_to_json(form.group),
        "gram": [[rational_to_json(v.value) for v in row] for row in form.gram],
    }


def form_from_json(obj, where="form") -> LinkingForm:
    kind = _require(obj, "type", where, str)
    try:
        if kind == "diagonal":
            terms = _require(obj, "terms", where, list)
            triples = []
            for i, t in enumerate(terms):
                w = f"{where}.terms[{i}]"
                triples.append(tuple(_int(_require(t, key, w), f"{w}.{key}") for key in ("p", "n", "unit")))
            return diagonal_form(triples)
        if kind == "presentation":
            return linking_from_presentation(int_matrix(_require(obj, "matrix", where), f"{where}.matrix"))[1]
        if kind == "gram":
            G = group_from_json(_require(obj, "group", where), f"{where}.group")
            rows = _require(obj, "gram", where, list)
            gram = tuple(
                tuple(Residue(rational_from_json(v, f"{where}.gram[{i}][{j}]"), 1) for j, v in enumerate(row))
                for i, row in enumerate(rows)
            )
            return LinkingForm(G, gram)
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}", field=where) from exc
    raise ParseError(f"{where}.type: unknown form type {kind!r}", field=f"{where}.type")


# -- d-tables and descriptors ---------------------------------------------


def dtable_to_json(table: dict) -> dict[str, str]:
    return {element_label(x): rational_to_json(v) for x, v in sorted(table.items())}


def dtable_from_json(obj, G: FiniteAbelianGroup, where="d_table") -> dict:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object keyed by element labels", field=where)
    table = {}
    for label, v in obj.items():
        x = element_from_label(label, G, f"{where}.{label}")
        if x in table:
            raise ParseError(f"{where}: label {label!r} given twice", field=f"{where}.{label}")
        table[x] = rational_from_json(v, f"{where}.{label}")
    return table


def _provenance_to_json(prov) -> dict:
    kind = prov[0]
    if kind == "surgery":
        return {"kind": "surgery", "n": prov[1]}
    if kind == "presentation":
        return {"kind": "presentation", "matrix": [list(r) for r in prov[1]]}
    if kind == "connected_sum":
        return {"kind": "connected_sum", "summands": [descriptor_to_json(Y) for Y in prov[1]]}
    if kind == "reversed":
        return {"kind": "reversed", "of": descriptor_to_json(prov[1])}
    return {"kind": "abstract"}


def descriptor_to_json(Y: ManifoldDescriptor) -> dict:
    out = {"name": Y.name, "h1": group_to_json(Y.h1), "provenance": _provenance_to_json(Y.provenance)}
    if Y.linking is not None:
        out["linking"] = form_to_json(Y.linking)
    if Y.rho0 is not None:
        out["rho0"] = rational_to_json(Y.rho0.value)
    if Y.d_table is not None:
        out["d_table"] = dtable_to_json(Y.d_table)
    return out


def descriptor_from_json(obj, where="manifold") -> ManifoldDescriptor:
    """Accepts ``h1`` triples or a shorthand ``orders`` list, ``surgery`` or ``presentation``."""
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object", field=where)
    name = obj.get("name", "Y")
    if not isinstance(name, str):
        raise ParseError(f"{where}.name: expected a string", field=f"{where}.name")
    try:
        if "surgery" in obj:
            Y = ManifoldDescriptor.surgery(_int(obj["surgery"], f"{where}.surgery"), name=name)
        elif "presentation" in obj:
            Y = ManifoldDescriptor.presentation(int_matrix(obj["presentation"], f"{where}.presentation"), name=name)
        elif "h1" in obj:
            G = group_from_json(obj["h1"], f"{where}.h1")
            Y = ManifoldDescriptor(name, G)
        elif "orders" in obj:
            orders = [_int(o, f"{where}.orders") for o in _require(obj, "orders", where, list)]
            Y = ManifoldDescriptor(name, from_cyclic_orders(orders))
        else:
            raise ParseError(f"{where}: needs one of h1, orders, surgery, presentation", field=where)
        linking = form_from_json(obj["linking"], f"{where}.linking") if "linking" in obj else Y.linking
        rho0 = Residue(rational_from_json(obj["rho0"], f"{where}.rho0"), 2) if "rho0" in obj else Y.rho0
        table = dtable_from_json(obj["d_table"], Y.h1, f"{where}.d_table") if "d_table" in obj else None
        return ManifoldDescriptor(name, Y.h1, linking, rho0, table, Y.provenance)
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}", field=where) from exc


def family_from_json(obj) -> list[ManifoldDescriptor]:
    items = _require(obj, "manifolds", "family", list)
    return [descriptor_from_json(m, f"manifolds[{i}]") for i, m in enumerate(items)]


def knot_from_json(obj, where="knot") -> KnotRecord:
    name = _require(obj, "name", where, str)
    det = obj.get("determinant")
    if det is not None:
        det = _int(det, f"{where}.determinant")
    cyclic = obj.get("cyclic", False)
    if not isinstance(cyclic, bool):
        raise ParseError(f"{where}.cyclic: expected true or false", field=f"{where}.cyclic")
    goeritz = obj.get("goeritz")
    if goeritz is not None:
        goeritz = tuple(tuple(r) for r in int_matrix(goeritz, f"{where}.goeritz"))
    cover = None
    if "branched_cover" in obj:
        cover = descriptor_from_json(obj["branched_cover"], f"{where}.branched_cover")
    elif "h1" in obj:
        cover = ManifoldDescriptor(f"Y_{name}", group_from_json(obj["h1"], f"{where}.h1"))
    return KnotRecord(name, det, cyclic, goeritz, cover)


def knots_from_json(obj) -> list[KnotRecord]:
    items = _require(obj, "knots", "knots", list)
    return [knot_from_json(k, f"knots[{i}]") for i, k in enumerate(items)]


def verdict_to_json(v) -> dict:
    return {
        "conclusion": v.conclusion,
        "reasons": list(v.reasons),
        "checklist": [{"clause": name, "holds": ok} for name, ok in v.checklist],
    }
