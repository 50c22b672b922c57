"""Reading datasets, model specifications and coefficient points.

Datasets and point tables are RFC-4180 CSV with a header row and plain
decimal numbers.  Model specifications are YAML::

    response: y
    models:
      - label: linear
        terms: [intercept, x]
      - label: spline
        terms:
          - intercept
          - x
          - {poly: x, degree: 2}
          - {spline: x, degree: 3, knots: [2.5, 5.0, 7.5]}

A bare string term is a raw column, except ``intercept``.  A model may
carry its own ``response`` key, but every model must use the same one.
"""
import csv
import re

import numpy as np
import yaml

from .design import Dataset, Intercept, ModelSpec, Polynomial, Raw, TruncatedPowerSpline
from .errors import DimensionMismatch, DuplicateLabel, InputError, ParseError, SpecError

_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_LINE = "__line__"


def _read_text(path):
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise ParseError("file is not valid UTF-8", path) from None


def parse_number(text):
    s = text.strip()
    if not _NUMBER.match(s):
        raise ValueError(s)
    return float(s)


def _read_table(path):
    """Header and rows of a numeric CSV file, with file line numbers."""
    text = _read_text(path)
    reader = csv.reader(text.splitlines())
    header = None
    rows = []
    try:
        for record in reader:
            line = reader.line_num
            if not record or all(not c.strip() for c in record):
                continue
            if header is None:
                header = [c.strip() for c in record]
                if any(not h for h in header):
                    raise ParseError("empty column name in header", path, line)
                if len(set(header)) != len(header):
                    raise ParseError(f"duplicate column names in header {header}", path, line)
                continue
            if len(record) != len(header):
                raise ParseError(f"expected {len(header)} fields, found {len(record)}", path, line)
            values = []
            for name, cell in zip(header, record):
                try:
                    values.append(parse_number(cell))
                except ValueError:
                    raise ParseError(f"row {len(rows) + 1}, column {name!r}: "
                                     f"cannot parse {cell!r} as a number", path, line) from None
            rows.append(values)
    except csv.Error as exc:
        raise ParseError(str(exc), path, reader.line_num) from None
    return header, rows


def read_dataset(path):
    header, rows = _read_table(path)
    if header is None:
        raise ParseError("missing header row", path)
    if not rows:
        raise ParseError("dataset has no data rows", path)
    arr = np.array(rows, dtype=np.float64)
    return Dataset({name: arr[:, j] for j, name in enumerate(header)}, n_rows=arr.shape[0])


def read_points(path, m):
    """Coefficient points as a (P, m) array; an empty file yields P = 0."""
    header, rows = _read_table(path)
    if header is None:
        return np.empty((0, m))
    if len(header) != m:
        raise DimensionMismatch(f"{path}: points have {len(header)} columns, model has m = {m}")
    return np.array(rows, dtype=np.float64).reshape(len(rows), m)


# ---------------------------------------------------------------------------
# Model specifications
# ---------------------------------------------------------------------------

class _LineLoader(yaml.SafeLoader):
    pass


def _construct_mapping(loader, node):
    mapping = loader.construct_mapping(node, deep=True)
    mapping[_LINE] = node.start_mark.line + 1
    return mapping


_LineLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)


def _parse_term(raw, path, line):
    if isinstance(raw, str):
        name = raw.strip()
        if not name:
            raise ParseError("empty term", path, line)
        return Intercept() if name == "intercept" else Raw(name)
    if isinstance(raw, dict):
        line = raw.get(_LINE, line)
        body = {k: v for k, v in raw.items() if k != _LINE}
        if "poly" in body:
            extra = set(body) - {"poly", "degree"}
            if extra or "degree" not in body:
                raise ParseError(f"polynomial term needs exactly 'poly' and 'degree', got {sorted(body)}",
                                 path, line)
            return Polynomial(str(body["poly"]), _int(body["degree"], "degree", path, line))
        if "spline" in body:
            extra = set(body) - {"spline", "degree", "knots"}
            if extra or "knots" not in body or "degree" not in body:
                raise ParseError("spline term needs exactly 'spline', 'degree' and 'knots', "
                                 f"got {sorted(body)}", path, line)
            knots = body["knots"]
            if not isinstance(knots, list) or not all(isinstance(t, (int, float)) and not isinstance(t, bool)
                                                      for t in knots):
                raise ParseError("spline knots must be a list of numbers", path, line)
            return TruncatedPowerSpline(str(body["spline"]), _int(body["degree"], "degree", path, line),
                                        tuple(knots))
    raise ParseError(f"unrecognised term {raw!r}", path, line)


def _int(value, what, path, line):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{what} must be an integer, got {value!r}", path, line)
    return value


def parse_models(text, path="<models>"):
    """Parse a model-specification document into a list of :class:`ModelSpec`."""
    try:
        doc = yaml.load(text, Loader=_LineLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ParseError(f"invalid YAML: {getattr(exc, 'problem', exc)}", path,
                         mark.line + 1 if mark else None) from None
    if not isinstance(doc, dict) or "models" not in doc:
        raise ParseError("expected a mapping with a 'models' list", path)
    models = doc["models"]
    if not isinstance(models, list) or not models:
        raise ParseError("'models' must be a non-empty list", path, doc.get(_LINE))
    default_response = doc.get("response")
    specs = []
    for i, entry in enumerate(models):
        if not isinstance(entry, dict):
            raise ParseError(f"model #{i + 1} must be a mapping", path)
        line = entry.get(_LINE)
        unknown = set(entry) - {"label", "terms", "response", _LINE}
        if unknown:
            raise ParseError(f"unknown keys {sorted(unknown)} in model #{i + 1}", path, line)
        label = entry.get("label")
        if not isinstance(label, str) or not label:
            raise ParseError(f"model #{i + 1} needs a non-empty string 'label'", path, line)
        response = entry.get("response", default_response)
        if not isinstance(response, str) or not response:
            raise ParseError(f"model {label!r} has no response column", path, line)
        terms = entry.get("terms")
        if not isinstance(terms, list) or not terms:
            raise ParseError(f"model {label!r} needs a non-empty 'terms' list", path, line)
        specs.append(ModelSpec(response, [_parse_term(t, path, line) for t in terms], label))
    labels = [s.label for s in specs]
    dupes = sorted({lab for lab in labels if labels.count(lab) > 1})
    if dupes:
        raise DuplicateLabel(f"duplicate model labels: {dupes}")
    if len({s.response for s in specs}) > 1:
        raise SpecError(f"models use different response columns: {sorted({s.response for s in specs})}")
    return specs


def read_models(path):
    return parse_models(_read_text(path), str(path))
