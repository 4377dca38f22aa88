"""
Parsing of command line values and input documents. Documents are read with yaml.safe_load, which also reads JSON,
and validated against the schemata in core.resources.schema before any model object is built from them.
"""
import math
import os

import numpy as np
import yaml

from pygconvex.core.base import manifold_kinds
from pygconvex.core.exceptions import InputError
from pygconvex.core.geometry.manifold import ManifoldSpec, Point, euclidean, orthant, spd_cone
from pygconvex.core.geometry.matfun import DEFAULT_EIG_FLOOR, SpdMatrix
from pygconvex.core.optimize.brascamp_lieb import BLDatum
from pygconvex.core.optimize.operator_scaling import PositiveOperator
from pygconvex.core.validation.json_schema import validate_document

_MANIFOLDS = {manifold_kinds.euclidean: euclidean, manifold_kinds.orthant: orthant, manifold_kinds.spd: spd_cone}


def parse_vector(text: str, name: str = "vector") -> np.ndarray:
    """
    Parses a comma separated list of reals, e.g. "1.0,0.5".
    """
    try:
        values = [float(v) for v in str(text).split(",") if v.strip() != ""]
    except ValueError:
        raise InputError("Can't parse %s %r, expected comma separated reals" % (name, text))
    if len(values) == 0:
        raise InputError("%s is empty" % name)
    if not all(math.isfinite(v) for v in values):
        raise InputError("%s %r has non finite entries" % (name, text))
    return np.array(values)


def parse_inline_matrix(text: str, name: str = "matrix") -> np.ndarray:
    """
    Parses rows separated by ';' and entries by ',', e.g. "2,0;0,1".
    """
    rows = [parse_vector(row, name) for row in str(text).split(";")]
    if len({len(r) for r in rows}) != 1:
        raise InputError("%s %r has rows of different lengths" % (name, text))
    return np.array(rows)


def read_document(path: str, schema_name: str = None):
    """
    Reads a YAML or JSON document and validates it if a schema name is given.
    :raises InputError: for unreadable files, syntax errors (with line numbers) and schema violations
    """
    try:
        with open(path) as f:
            document = yaml.safe_load(f)
    except OSError as e:
        raise InputError("Can't read %s: %s" % (path, e.strerror))
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark
        where = "" if mark is None else " at line %d, column %d" % (mark.line + 1, mark.column + 1)
        raise InputError("Can't parse %s%s: %s" % (path, where, e.problem))
    except yaml.YAMLError as e:
        raise InputError("Can't parse %s: %s" % (path, e))
    if schema_name is not None:
        try:
            validate_document(document, schema_name)
        except InputError as e:
            raise InputError("%s: %s" % (path, e))
    return document


def _finite(array, what):
    if not np.all(np.isfinite(array)):
        raise InputError("%s has non finite entries" % what)
    return array


def read_matrix(path: str) -> np.ndarray:
    document = read_document(path, "matrix")
    rows = document["matrix"] if isinstance(document, dict) else document
    return _finite(np.array(rows, dtype=float), path)


def manifold_of(kind: str, n: int) -> ManifoldSpec:
    if kind not in _MANIFOLDS:
        raise InputError("Unknown manifold %s, expected one of %s" % (kind, ", ".join(sorted(_MANIFOLDS))))
    return _MANIFOLDS[kind](n)


def parse_matrix_value(text: str, name: str = "matrix") -> np.ndarray:
    """ A matrix given as path of a matrix document or inline as "a,b;c,d". """
    if os.path.exists(text):
        return read_matrix(text)
    if any(c.isdigit() for c in text) and not text.endswith((".json", ".yaml", ".yml")):
        return parse_inline_matrix(text, name)
    raise InputError("Matrix file %s does not exist" % text)


def parse_point(kind: str, text: str, name: str = "point", floor: float = DEFAULT_EIG_FLOOR) -> Point:
    """
    Point on a manifold of the given kind. Vectors are given inline, SPD matrices as file or inline matrix. The
    order of the manifold is taken from the value.
    """
    if kind == manifold_kinds.spd:
        array = parse_matrix_value(text, name)
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise InputError("%s has to be a square matrix, got shape %s" % (name, array.shape))
        return manifold_of(kind, array.shape[0]).point(SpdMatrix(array, floor))
    vector = parse_vector(text, name)
    return manifold_of(kind, vector.shape[0]).point(vector)


def read_bl_datum(path: str) -> BLDatum:
    document = read_document(path, "bl_datum")
    if len(document["B"]) != len(document["p"]):
        raise InputError("%s: %d maps but %d weights" % (path, len(document["B"]), len(document["p"])))
    return BLDatum([_finite(np.array(b, dtype=float), "%s map %d" % (path, j)) for j, b in enumerate(document["B"])],
                   document["p"], n=document["n"])


def read_operator(path: str, probes: int = None, seed: int = None) -> PositiveOperator:
    document = read_document(path, "operator")
    kraus = [_finite(np.array(a, dtype=float), "%s matrix %d" % (path, j)) for j, a in enumerate(document["A"])]
    for j, a in enumerate(kraus):
        if a.shape[0] != document["n"]:
            raise InputError("%s: matrix %d has order %d, n is %d" % (path, j, a.shape[0], document["n"]))
    kwargs = {} if probes is None else {"probes": int(probes)}
    return PositiveOperator(kraus, seed=seed, **kwargs)


def read_posynomial(path: str):
    """
    :return: (n, terms) with terms a list of (c, exponents)
    """
    document = read_document(path, "posynomial")
    n = document["n"]
    terms = []
    for i, term in enumerate(document["terms"]):
        if len(term["e"]) != n:
            raise InputError("%s: term %d has %d exponents, n is %d" % (path, i, len(term["e"]), n))
        terms.append((float(term["c"]), [float(e) for e in term["e"]]))
    return n, terms
