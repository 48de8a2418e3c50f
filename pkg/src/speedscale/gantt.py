"""Static SVG Gantt charts: one lane per job, darker fill for faster speed."""
from __future__ import annotations

from fractions import Fraction
from typing import List
from xml.sax.saxutils import escape

from .core import Instance
from .metrics import Schedule

WIDTH = 800
LANE = 28
LEFT = 70
TOP = 30
# light to dark; levels beyond the palette reuse the darkest shade
PALETTE = ["#c6dbef", "#9ecae1", "#6baed6", "#4292c6", "#2171b5", "#08519c", "#08306b"]


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def _shade(level: int, k: int) -> str:
    if k == 1:
        return PALETTE[3]
    idx = round(level * (len(PALETTE) - 1) / (k - 1))
    return PALETTE[min(idx, len(PALETTE) - 1)]


def render_gantt(schedule: Schedule, instance: Instance, title: str = "") -> str:
    n, k = instance.n, instance.profile.k
    ends = [s.end for s in schedule.segments] + [j.release for j in instance.jobs]
    horizon = max(ends, default=Fraction(1)) or Fraction(1)
    scale = (WIDTH - LEFT - 20) / float(horizon)

    def X(t) -> str:
        return _fmt(LEFT + float(t) * scale)

    height = TOP + n * LANE + 40
    out: List[str] = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">',
    ]
    if title:
        out.append(f'<text x="{LEFT}" y="16">{escape(title)}</text>')
    for j in range(n):
        y = TOP + j * LANE
        out.append(f'<text x="8" y="{y + LANE // 2 + 4}">job {j + 1}</text>')
        out.append(f'<line x1="{LEFT}" y1="{y + LANE}" x2="{WIDTH - 20}" y2="{y + LANE}" stroke="#eeeeee"/>')
    comp = {}
    for s in schedule.segments:
        if s.idle:
            continue
        y = TOP + s.job * LANE + 4
        w = _fmt(float(s.end - s.start) * scale)
        out.append(
            f'<rect x="{X(s.start)}" y="{y}" width="{w}" height="{LANE - 8}" '
            f'fill="{_shade(s.level, k)}" stroke="#333333" stroke-width="0.5">'
            f'<title>job {s.job + 1} speed {instance.profile.speeds[s.level]} [{s.start}, {s.end})</title></rect>'
        )
        comp[s.job] = max(comp.get(s.job, s.end), s.end)
    for j, job in enumerate(instance.jobs):
        y = TOP + j * LANE
        x = X(job.release)
        out.append(f'<path d="M {x} {y + 2} l -4 -6 l 8 0 z" fill="#d62728"><title>release {job.release}</title></path>')
        if j in comp:
            cx = X(comp[j])
            out.append(f'<line x1="{cx}" y1="{y + 2}" x2="{cx}" y2="{y + LANE - 2}" stroke="#000000" stroke-width="2">'
                       f'<title>completion {comp[j]}</title></line>')
    base = TOP + n * LANE
    out.append(f'<line x1="{LEFT}" y1="{base}" x2="{WIDTH - 20}" y2="{base}" stroke="#000000"/>')
    ticks = 10
    for i in range(ticks + 1):
        t = horizon * Fraction(i, ticks)
        out.append(f'<line x1="{X(t)}" y1="{base}" x2="{X(t)}" y2="{base + 4}" stroke="#000000"/>')
        out.append(f'<text x="{X(t)}" y="{base + 16}" text-anchor="middle">{_fmt(float(t))}</text>')
    for i in range(k):
        lx = LEFT + i * 90
        out.append(f'<rect x="{lx}" y="{base + 24}" width="12" height="10" fill="{_shade(i, k)}" stroke="#333333" stroke-width="0.5"/>')
        out.append(f'<text x="{lx + 16}" y="{base + 33}">s={escape(str(instance.profile.speeds[i]))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_gantt(schedule: Schedule, instance: Instance, path, title: str = "") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_gantt(schedule, instance, title))
