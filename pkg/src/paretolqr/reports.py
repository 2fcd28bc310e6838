"""Serialization of fronts and reports (CSV and deterministic JSON)."""
import csv
import io
import json
import math

import numpy as np

SCHEMA = 1


def _num(x):
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def _emit(obj, out, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_num(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            out.append(f"{pad}{json.dumps(str(k))}: ")
            _emit(v, out, indent, level + 1)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else list(obj)
        if not seq:
            out.append("[]")
            return
        if all(isinstance(v, (int, float, np.integer, np.floating, bool)) or v is None for v in seq):
            parts = []
            for v in seq:
                sub = []
                _emit(v, sub, indent, level + 1)
                parts.append("".join(sub))
            out.append("[" + ", ".join(parts) + "]")
            return
        out.append("[\n")
        for i, v in enumerate(seq):
            out.append(pad)
            _emit(v, out, indent, level + 1)
            out.append(",\n" if i < len(seq) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """JSON text with every float at 17 significant digits; non-finite floats become null."""
    out = []
    _emit(obj, out, indent, 0)
    return "".join(out) + "\n"


def front_rows(front):
    m = front.net.m
    header = [f"w_{i + 1}" for i in range(m)]
    if front.points:
        d, n = front.points[0].K.shape
        header += [f"K_{r + 1}_{c + 1}" for r in range(d) for c in range(n)]
    header += [f"loss_{i + 1}" for i in range(m)] + ["scalarized_loss", "dare_residual"]
    rows = []
    for p in front.points:
        rows.append(list(p.w) + list(p.K.ravel()) + list(p.losses) + [p.scalarized_loss, p.P.residual_norm])
    return header, rows


def front_csv(front):
    header, rows = front_rows(front)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_num(x) for x in row])
    return buf.getvalue()


def front_dict(front):
    return {
        "schema": SCHEMA,
        "epsilon": front.epsilon,
        "m": front.net.m,
        "resolution": front.net.resolution,
        "net_size": len(front.net),
        "problem_digest": front.problem_digest,
        "complete": front.complete,
        "failures": [{"index": i, "error": msg} for i, msg in front.failures],
        "points": [
            {
                "index": idx,
                "w": p.w,
                "K": p.K,
                "losses": p.losses,
                "scalarized_loss": p.scalarized_loss,
                "dare_residual": p.P.residual_norm,
            }
            for idx, p in zip(front.indices, front.points)
        ],
    }
