"""Minimal SVG rendering of a plan: truck tour polyline, drone trip legs,
customers as dots and drone bases as squares. No plotting dependency."""

from __future__ import annotations

from .core import Instance, Plan, stop_point

_SIZE = 520.0
_MARGIN = 20.0


def _xy(point):
    return (_MARGIN + point[0] * (_SIZE - 2 * _MARGIN),
            _MARGIN + (1.0 - point[1]) * (_SIZE - 2 * _MARGIN))


def _fmt(value: float) -> str:
    return "%.2f" % value


def render_svg(inst: Instance, plan: Plan) -> str:
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(_SIZE)}" '
             f'height="{int(_SIZE)}" viewBox="0 0 {int(_SIZE)} {int(_SIZE)}">',
             '<rect width="100%" height="100%" fill="white"/>']

    stops = [stop_point(s, inst) for s in plan.truck_nodes]
    if len(stops) >= 2:
        pts = stops + ([stops[0]] if len(stops) >= 3 else [])
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in map(_xy, pts))
        parts.append(f'<polyline points="{coords}" fill="none" '
                     'stroke="black" stroke-width="2"/>')

    for trip in plan.drone_trips:
        base = inst.drone_bases[trip.drone]
        center = stop_point(trip.center, inst)
        legs = [base, center]
        visits = list(trip.visits)
        for idx, cust in enumerate(visits):
            legs.append(inst.customers[cust])
            if idx < len(visits) - 1:
                legs.append(center)
        legs.append(base)
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in map(_xy, legs))
        parts.append(f'<polyline points="{coords}" fill="none" '
                     'stroke="steelblue" stroke-width="1" '
                     'stroke-dasharray="4 3"/>')

    for point in inst.customers:
        x, y = _xy(point)
        parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="4" '
                     'fill="crimson"/>')
    for point in inst.drone_bases:
        x, y = _xy(point)
        parts.append(f'<rect x="{_fmt(x - 4)}" y="{_fmt(y - 4)}" '
                     'width="8" height="8" fill="seagreen"/>')
    for stop in plan.truck_nodes:
        x, y = _xy(stop_point(stop, inst))
        parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="6" '
                     'fill="none" stroke="black" stroke-width="1.5"/>')

    parts.append(f'<text x="{_fmt(_MARGIN)}" y="{_fmt(_SIZE - 4)}" '
                 f'font-size="12" font-family="sans-serif">objective '
                 f'{plan.objective:.4f}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
