"""JSON measure files and the JSON forms of certificates, tolerance reports
and signed vectors."""

from __future__ import annotations

import json
import re
from fractions import Fraction

import numpy as np

from .errors import FormatError, MovelabError
from .measure import EXACT, FLOAT, Measure, SignedVector, format_bits, ground, parse_bits, scalar
from .tolerance import other_sites_bits


def format_scalar(v):
    if isinstance(v, Fraction):
        return str(v)
    return repr(float(v))


def _json_value(v):
    """Scalars in reports: exact stays a string, floats become JSON numbers."""
    if v is None:
        return None
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def measure_to_dict(mu, include_zeros=False):
    d = {"n": mu.n}
    if mu.ground.labels is not None:
        d["labels"] = list(mu.ground.labels)
    d["mode"] = mu.mode
    if not isinstance(mu, Measure):
        d["signed"] = True
    d["entries"] = [
        [format_bits(x, mu.n), format_scalar(v)] for x, v in enumerate(mu.probs) if include_zeros or v != 0
    ]
    return d


def dumps_measure(mu):
    """Measure file text: one entry per line, ascending bitmask order."""
    d = measure_to_dict(mu)
    head = {k: v for k, v in d.items() if k != "entries"}
    lines = ["{"]
    for k, v in head.items():
        lines.append(f"  {json.dumps(k)}: {json.dumps(v)},")
    rows = [f"    {json.dumps(e)}" for e in d["entries"]]
    lines.append('  "entries": [')
    lines.append(",\n".join(rows))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_measure(mu, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_measure(mu))


def _entry_lines(text):
    start = text.find('"entries"')
    if start < 0:
        return []
    # opening bracket of each [bitstring, value] pair, in order
    return [text.count("\n", 0, start + m.start()) + 1 for m in re.finditer(r'\[\s*"', text[start:])]


def loads_measure(text):
    """Parse a measure (or signed vector) file; errors carry line numbers when known."""
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(e.msg, e.lineno) from None
    if not isinstance(d, dict):
        raise FormatError("top level must be an object", 1)
    lines = _entry_lines(text)
    try:
        n = d["n"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise FormatError('"n" must be an integer')
        mode = d.get("mode", EXACT)
        if mode not in (EXACT, FLOAT):
            raise FormatError(f'"mode" must be "exact" or "float", got {mode!r}')
        g = ground(n, d.get("labels"))
        entries = d.get("entries")
        if not isinstance(entries, list):
            raise FormatError('"entries" must be an array')
    except KeyError as e:
        raise FormatError(f"missing field {e.args[0]!r}") from None
    except FormatError:
        raise
    except MovelabError as e:
        raise FormatError(str(e)) from None
    probs = [Fraction(0) if mode == EXACT else 0.0] * g.size
    seen = set()
    for i, entry in enumerate(entries):
        line = lines[i] if i < len(lines) else None
        try:
            if not (isinstance(entry, list) and len(entry) == 2 and isinstance(entry[0], str)):
                raise FormatError("entry must be [bitstring, value]", line)
            bits, raw = entry
            x = parse_bits(bits, n)
            if x in seen:
                raise FormatError(f"duplicate configuration {bits}", line)
            seen.add(x)
            if isinstance(raw, str):
                v = Fraction(raw.strip()) if mode == EXACT else float(Fraction(raw.strip()))
            elif mode == FLOAT and isinstance(raw, (int, float)) and not isinstance(raw, bool):
                v = float(raw)
            else:
                raise FormatError(f"value for {bits} must be a string", line)
            probs[x] = scalar(v, mode)
        except FormatError:
            raise
        except (ValueError, ZeroDivisionError, MovelabError) as e:
            raise FormatError(str(e), line) from None
    if mode == FLOAT:
        probs = np.array(probs, dtype=np.float64)
    cls = SignedVector if d.get("signed") else Measure
    return cls(g, probs, mode)


def read_measure(path):
    with open(path, encoding="utf-8") as fh:
        return loads_measure(fh.read())


# --------------------------------------------------------------------------
# reports


def certificate_to_dict(cert):
    n = cert.n
    d = {"verdict": cert.verdict, "n": n, "mode": cert.mode}
    if cert.coupling is not None:
        d["coupling"] = [
            [format_bits(x, n), format_bits(y, n), format_scalar(v)] for (x, y), v in sorted(cert.coupling.items())
        ]
    if cert.violator is not None:
        d["violator"] = cert.violator.bitstrings()
    if cert.gap is not None:
        d["gap"] = format_scalar(cert.gap)
    return d


def tolerance_to_dict(rep):
    d = {
        "n": rep.n,
        "insertion": _json_value(rep.insertion),
        "deletion": _json_value(rep.deletion),
        "finite_energy": _json_value(rep.finite_energy),
        "witnesses": {},
    }
    for kind in ("insertion", "deletion"):
        w = rep.witness_bits(kind)
        d["witnesses"][kind] = list(w) if w else None
    if rep.all_witnesses:
        d["all_witnesses"] = {
            k: [[s, other_sites_bits(x, s, rep.n)] for s, x in v] for k, v in rep.all_witnesses.items()
        }
    if rep.excluded:
        d["excluded"] = [[kind, s, other_sites_bits(x, s, rep.n)] for kind, s, x in rep.excluded]
    return d


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=False)
