"""Body file format (JSON) and profile export (CSV).

Body schema::

    {"type": "polygon", "vertices": [[x, y, z], ...]}
    {"type": "arcs", "arcs": [{"center": [x, y, z], "radius": r,
                               "start": [x, y, z], "end": [x, y, z]}, ...]}

All floats are 64-bit.  The loader renormalizes points and validates the
body invariants, rejecting files with a diagnostic naming the failed
invariant.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .bodies import ArcBody, Body, CircleArc, SpherePolygon
from .errors import InvalidBodyFile, NoHemisphere
from .sphere import SpherePoint


def body_to_dict(body: Body) -> dict:
    if isinstance(body, SpherePolygon):
        return {"type": "polygon", "vertices": [list(v) for v in body.vertices]}
    return {
        "type": "arcs",
        "arcs": [
            {
                "center": list(a.center),
                "radius": float(a.radius),
                "start": list(a.start),
                "end": list(a.end),
            }
            for a in body.arcs
        ],
    }


def body_from_dict(data: dict) -> Body:
    if not isinstance(data, dict) or "type" not in data:
        raise InvalidBodyFile("missing 'type' field")
    kind = data["type"]
    try:
        if kind == "polygon":
            vertices = data.get("vertices")
            if not isinstance(vertices, list):
                raise InvalidBodyFile("polygon body needs a 'vertices' list")
            return SpherePolygon([SpherePoint.from_vec(v) for v in vertices])
        if kind == "arcs":
            arcs = data.get("arcs")
            if not isinstance(arcs, list):
                raise InvalidBodyFile("arcs body needs an 'arcs' list")
            return ArcBody(
                [
                    CircleArc(
                        SpherePoint.from_vec(a["center"]),
                        float(a["radius"]),
                        SpherePoint.from_vec(a["start"]),
                        SpherePoint.from_vec(a["end"]),
                    )
                    for a in arcs
                ]
            )
    except InvalidBodyFile:
        raise
    except (NoHemisphere, ValueError, KeyError, TypeError) as exc:
        raise InvalidBodyFile("invalid body: %s" % exc) from exc
    raise InvalidBodyFile("unknown body type %r" % kind)


def save_body(body: Body, path) -> None:
    Path(path).write_text(json.dumps(body_to_dict(body)), encoding="utf-8")


def load_body(path) -> Body:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidBodyFile("cannot read body file: %s" % exc) from exc
    return body_from_dict(data)


def write_width_profile(path, profile) -> None:
    """CSV columns: index, k_x, k_y, k_z, width_radians."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "k_x", "k_y", "k_z", "width_radians"])
        for i, row in enumerate(profile):
            w.writerow([i] + [repr(float(x)) for x in row[:4]])


def write_diameter_profile(path, profile) -> None:
    """CSV columns: index, p_x, p_y, p_z, farthest_distance_radians."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "p_x", "p_y", "p_z", "farthest_distance_radians"])
        for i, row in enumerate(profile):
            w.writerow([i] + [repr(float(x)) for x in row[:4]])
