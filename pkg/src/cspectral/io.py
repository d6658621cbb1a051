"""Readers and writers for the on-disk formats.

All formats are UTF-8 text with ``#`` comment lines; node indices are 0-based.

points-csv   ``x1,...,xd[,label]`` per line; a ``# columns: ...,label`` header
             marks the last column as a label.
edge-list    ``i j w`` with ``w > 0``; the two directions are merged by max.
dense-csv    ``n`` rows of ``n`` comma-separated reals.
constraints  ``i j w``; the sign of ``w`` encodes must-link / cannot-link.
             ``i i w`` lines set the diagonal of Q explicitly.
labels       one integer or ``?`` per line.
"""
import csv
import hashlib
import io
import json
import math
import os
import tempfile

import numpy as np

from .constraints import UNKNOWN, ConstraintList
from .errors import FormatError, InvalidMatrix
from .graph import PointCloud, build_laplacian

FORMATS = ("points-csv", "edge-list", "dense-csv")


def _lines(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FormatError(str(exc), path) from None
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append((lineno, line))
    return text, out


def _float(tok, path, lineno):
    try:
        x = float(tok)
    except ValueError:
        raise FormatError(f"not a number: {tok!r}", path, lineno) from None
    if not math.isfinite(x):
        raise FormatError(f"non-finite value {tok!r}", path, lineno)
    return x


def _index(tok, path, lineno):
    try:
        i = int(tok)
    except ValueError:
        raise FormatError(f"not an integer index: {tok!r}", path, lineno) from None
    if i < 0:
        raise FormatError(f"negative index {i}", path, lineno)
    return i


def read_points(path, has_labels=None):
    text, rows = _lines(path)
    if not rows:
        raise FormatError("no data rows", path)
    if has_labels is None:
        has_labels = any(
            ln.startswith("#") and "columns:" in ln and ln.rstrip().endswith("label")
            for ln in text.splitlines()
        )
    values = []
    width = None
    for lineno, line in rows:
        toks = [t.strip() for t in line.split(",")]
        if width is None:
            width = len(toks)
        elif len(toks) != width:
            raise FormatError(f"expected {width} columns, got {len(toks)}", path, lineno)
        values.append([_float(t, path, lineno) for t in toks])
    arr = np.array(values)
    if has_labels:
        if arr.shape[1] < 2:
            raise FormatError("label column needs at least one coordinate", path)
        return PointCloud(arr[:, :-1], arr[:, -1].astype(int))
    return PointCloud(arr)


def write_points(path, points):
    d = points.d
    cols = [f"x{i + 1}" for i in range(d)] + (["label"] if points.labels is not None else [])
    buf = io.StringIO()
    buf.write("# columns: " + ",".join(cols) + "\n")
    for i in range(points.n):
        vals = [repr(float(x)) for x in points.coords[i]]
        if points.labels is not None:
            vals.append(str(int(points.labels[i])))
        buf.write(",".join(vals) + "\n")
    atomic_write(path, buf.getvalue())


def read_edge_list(path, n=None):
    _, rows = _lines(path)
    if not rows:
        raise FormatError("empty edge list", path)
    edges = []
    for lineno, line in rows:
        toks = line.split()
        if len(toks) != 3:
            raise FormatError(f"expected 'i j w', got {line!r}", path, lineno)
        i, j = _index(toks[0], path, lineno), _index(toks[1], path, lineno)
        w = _float(toks[2], path, lineno)
        if w < 0:
            raise InvalidMatrix(f"{path}:{lineno}: negative weight {w}")
        if w == 0:
            raise FormatError("edge weight must be positive", path, lineno)
        edges.append((i, j, w))
    size = max(max(i, j) for i, j, _ in edges) + 1
    n = size if n is None else n
    if size > n:
        raise FormatError(f"index {size - 1} out of range for n={n}", path)
    a = np.zeros((n, n))
    for i, j, w in edges:
        if i == j:
            continue
        a[i, j] = max(a[i, j], w)
    return build_laplacian(np.maximum(a, a.T))


def write_edge_list(path, graph):
    iu, ju = np.nonzero(np.triu(graph.a, 1))
    lines = [f"{i} {j} {float(graph.a[i, j])!r}" for i, j in zip(iu, ju)]
    atomic_write(path, f"# n={graph.n}\n" + "\n".join(lines) + "\n")


def read_dense(path, tol=1e-8):
    _, rows = _lines(path)
    if not rows:
        raise FormatError("empty matrix file", path)
    values = []
    for lineno, line in rows:
        values.append([_float(t, path, lineno) for t in line.split(",")])
    n = len(values)
    for (lineno, _), row in zip(rows, values):
        if len(row) != n:
            raise FormatError(f"expected {n} columns, got {len(row)}", path, lineno)
    a = np.array(values)
    if np.max(np.abs(a - a.T)) > tol:
        raise InvalidMatrix(f"{path}: matrix is not symmetric (max |A - A'| = {np.max(np.abs(a - a.T)):.3g})")
    if np.any(a < 0):
        raise InvalidMatrix(f"{path}: negative affinities")
    return build_laplacian(a)


def write_dense(path, m):
    m = np.asarray(m, dtype=float)
    atomic_write(path, "\n".join(",".join(repr(float(x)) for x in row) for row in m) + "\n")


def load_graph(path, fmt, sigma="auto"):
    """Read a graph file; ``points-csv`` is returned as a PointCloud."""
    if fmt == "points-csv":
        return read_points(path)
    if fmt == "edge-list":
        return read_edge_list(path)
    if fmt == "dense-csv":
        return read_dense(path)
    raise FormatError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")


def read_constraints(path, n):
    _, rows = _lines(path)
    triples = []
    diag = None
    for lineno, line in rows:
        toks = line.split()
        if len(toks) != 3:
            raise FormatError(f"expected 'i j w', got {line!r}", path, lineno)
        i, j = _index(toks[0], path, lineno), _index(toks[1], path, lineno)
        w = _float(toks[2], path, lineno)
        if i >= n or j >= n:
            raise FormatError(f"index out of range for n={n}", path, lineno)
        if i == j:
            diag = [0.0] * n if diag is None else diag
            diag[i] += w
        else:
            triples.append((i, j, w))
    return ConstraintList(n, triples, diag)


def write_constraints(path, clist):
    lines = [f"{i} {j} {w!r}" for i, j, w in clist.triples]
    if clist.diagonal is not None:
        lines += [f"{i} {i} {w!r}" for i, w in enumerate(clist.diagonal) if w != 0]
    atomic_write(path, "\n".join(lines) + ("\n" if lines else ""))


def read_labels(path):
    _, rows = _lines(path)
    if not rows:
        raise FormatError("empty label file", path)
    out = []
    for lineno, line in rows:
        if line == "?":
            out.append(UNKNOWN)
            continue
        try:
            out.append(int(line))
        except ValueError:
            raise FormatError(f"not a label: {line!r}", path, lineno) from None
    return np.array(out, dtype=int)


def write_labels(path, labels):
    atomic_write(path, "".join("?\n" if x == UNKNOWN else f"{int(x)}\n" for x in labels))


def read_label_source(path):
    """Labels from a plain label file or from a result JSON's ``labels``."""
    if str(path).endswith(".json"):
        try:
            with open(path, encoding="utf-8") as fh:
                return np.array(json.load(fh)["labels"], dtype=int)
        except (OSError, ValueError, KeyError) as exc:
            raise FormatError(f"cannot read labels: {exc}", path) from None
    return read_labels(path)


def _fmt_float(x):
    if math.isnan(x) or math.isinf(x):
        return "null"
    return "%.17g" % x


def dumps(obj, indent=0):
    """JSON with every float written to 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(x, (dict, list, tuple, np.ndarray)) for x in obj):
            return "[" + ", ".join(dumps(x) for x in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(x, indent + 1) for x in obj) + "\n" + end + "]"
    if isinstance(obj, dict):
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(path, obj):
    atomic_write(path, dumps(obj) + "\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


SWEEP_HEADER = ["x", "mean", "min", "max", "failures"]


def write_sweep_csv(path, result):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in result.rows:
        w.writerow([_fmt_float(r.x), _fmt_float(r.mean), _fmt_float(r.min), _fmt_float(r.max), r.failures])
    atomic_write(path, buf.getvalue())


def read_sweep_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SWEEP_HEADER:
            raise FormatError(f"expected header {','.join(SWEEP_HEADER)}", path, 1)
        rows = []
        for lineno, rec in enumerate(reader, 2):
            if len(rec) != 5:
                raise FormatError("expected 5 columns", path, lineno)
            nums = [float("nan") if t == "null" else float(t) for t in rec[:4]]
            rows.append((*nums, int(rec[4])))
    return rows


def write_table_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt_float(x) if isinstance(x, float) else x for x in r])
    atomic_write(path, buf.getvalue())


def atomic_write(path, text):
    """Write to a temporary file in the target directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def file_sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()
