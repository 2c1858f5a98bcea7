"""
SVG pictures of preferences and random preferences over the simplex.

Everything is drawn in chart coordinates and mapped to pixels by a
:class:`Viewport`; clipping happens only here, the geometry code never clips.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from src.conf.config import config
from src.entity.models import Chart
from src.services.exceptions import InvalidDistributionError, InvalidRepresentationError
from src.services.geometry import (
    MM_VERTICES,
    SLOPE_BEST,
    SLOPE_MIDDLE,
    SLOPE_WORST,
    convert_point,
    simplex_chord,
    line_normal,
)
from src.services.preferences import EUPreference, Preference, SemiWeightedPreference, WUFunctional, WUPreference
from src.services.random_utility import CircleRWU, FiniteMixture, RandomPreference, SlopePair, UniformEU

logger = logging.getLogger(__name__)

GREY = 160
PIVOT_COLORS = {1: '#1f77b4', -1: '#d62728'}
ADMISSIBLE_COLORS = ('#2ca02c', '#1f77b4')


class Printer:

    def __init__(self, width: int = 600, height: int = 600):
        self.width = width
        self.height = height
        self._output = ''

    def print_output(self, output):
        self._output += output

    def print_line(self, x1, y1, x2, y2, color=0, width=1):
        self.print_output(_svg_line(x1, y1, x2, y2, color=color, width=width))

    def print_circle(self, x, y, r, color=0, width=1, border_color=0):
        self.print_output(_svg_circle(x, y, r, color=color, width=width, border_color=border_color))

    def print_polygon(self, points, color=0, width=1, border_color=0, opacity=1.0):
        self.print_output(_svg_polygon(points, color=color, width=width, border_color=border_color, opacity=opacity))

    def print_text(self, x, y, text, color=0, font_size=12):
        self.print_output(_svg_text(x, y, text, color=color, font_size=font_size))

    def to_file(self, filename):
        with open(filename, 'w', encoding='utf-8') as f:
            f.write(str(self))

    def __str__(self):
        return """<svg width="{}" height="{}" version="1.1" xmlns="http://www.w3.org/2000/svg">
{}</svg>
""".format(self.width, self.height, self._output)


def _fmt(v) -> str:
    return '{:.2f}'.format(float(v))


def _svg_line(x1, y1, x2, y2, color, width):
    color = _svg_color(color)
    return '<line x1="{}" y1="{}" x2="{}" y2="{}" style="stroke-linecap:round;stroke:{};stroke-width:{};" />\n'.format(
        _fmt(x1), _fmt(y1), _fmt(x2), _fmt(y2), color, width)


def _svg_circle(x, y, r, color, width, border_color):
    color = _svg_color(color)
    border_color = _svg_color(border_color)
    return '<circle cx="{}" cy="{}" r="{}" style="fill:{}; stroke:{}; stroke-width:{};" />\n'.format(
        _fmt(x), _fmt(y), _fmt(r), color, border_color, width)


def _svg_polygon(points, color, width, border_color, opacity):
    color = _svg_color(color)
    border_color = _svg_color(border_color)
    coords = ' '.join('{},{}'.format(_fmt(x), _fmt(y)) for x, y in points)
    return '<polygon points="{}" style="fill:{}; fill-opacity:{}; stroke:{}; stroke-width:{};" />\n'.format(
        coords, color, opacity, border_color, width)


def _svg_text(x, y, text, color, font_size):
    color = _svg_color(color)
    return '<text x="{}" y="{}" font-family="Nimbus Sans L" font-size="{}" fill="{}">{}</text>\n'.format(
        _fmt(x), _fmt(y), font_size, color, text)


def _svg_color(color):
    if isinstance(color, str):
        return color
    return 'rgb({}, {}, {})'.format(color, color, color)


@dataclass
class Viewport:
    """
    Affine map from chart coordinates to SVG pixels, y axis pointing up.
    """
    xmin: float
    xmax: float
    ymin: float
    ymax: float
    size: int = 600
    margin: int = 30

    @classmethod
    def around(cls, points, pad: float = 0.1, limit: float = 3.0, size: int = 600) -> Viewport:
        xs = [max(-limit, min(limit, float(x))) for x, _ in points]
        ys = [max(-limit, min(limit, float(y))) for _, y in points]
        span = max(max(xs) - min(xs), max(ys) - min(ys)) + 2 * pad
        cx, cy = (max(xs) + min(xs)) / 2, (max(ys) + min(ys)) / 2
        return cls(cx - span / 2, cx + span / 2, cy - span / 2, cy + span / 2, size)

    @property
    def scale(self) -> float:
        return (self.size - 2 * self.margin) / (self.xmax - self.xmin)

    def px(self, point) -> tuple:
        x, y = (float(v) for v in point)
        return (self.margin + (x - self.xmin) * self.scale, self.margin + (self.ymax - y) * self.scale)

    def contains(self, point) -> bool:
        x, y = (float(v) for v in point)
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax


class Canvas:
    """
    A printer bound to a viewport, taking chart coordinates.
    """

    def __init__(self, viewport: Viewport):
        self.viewport = viewport
        self.printer = Printer(viewport.size, viewport.size)

    def line(self, a, b, color=0, width=1):
        (x1, y1), (x2, y2) = self.viewport.px(a), self.viewport.px(b)
        self.printer.print_line(x1, y1, x2, y2, color=color, width=width)

    def dot(self, point, radius=3, color=0):
        if self.viewport.contains(point):
            x, y = self.viewport.px(point)
            self.printer.print_circle(x, y, radius, color=color, border_color=color)

    def ring(self, center, radius, color=0, width=1):
        x, y = self.viewport.px(center)
        self.printer.print_circle(x, y, radius * self.viewport.scale, color='none', width=width, border_color=color)

    def polygon(self, points, color=0, opacity=0.3):
        self.printer.print_polygon([self.viewport.px(p) for p in points], color=color, width=1,
                                   border_color=color, opacity=opacity)

    def label(self, point, text, color=0, font_size=12):
        x, y = self.viewport.px(point)
        self.printer.print_text(x + 5, y - 5, text, color=color, font_size=font_size)

    def arrow(self, start, direction, length=0.15, color=0, width=2):
        dx, dy = (float(v) for v in direction)
        norm = math.hypot(dx, dy)
        if norm == 0:
            return
        dx, dy = dx / norm * length, dy / norm * length
        sx, sy = (float(v) for v in start)
        tip = (sx + dx, sy + dy)
        self.line(start, tip, color=color, width=width)
        for turn in (2.6, -2.6):
            c, s = math.cos(turn), math.sin(turn)
            self.line(tip, (tip[0] + 0.3 * (c * dx - s * dy), tip[1] + 0.3 * (s * dx + c * dy)), color=color, width=width)

    def __str__(self):
        return str(self.printer)


# -- simplex and indifference maps -------------------------------------------

def lottery_grid(steps: int) -> list[tuple]:
    """
    Interior-and-boundary lotteries with denominators ``steps``.
    """
    return [(Fraction(i, steps), Fraction(j, steps)) for i in range(steps + 1) for j in range(steps + 1 - i)]


def _draw_simplex(canvas: Canvas, chart: Chart = Chart.MM):
    if chart is Chart.MM:
        corners = [MM_VERTICES[1], MM_VERTICES[2], MM_VERTICES[3]]
        names = ['w1', 'w2', 'w3']
    else:
        corners = [SLOPE_BEST, SLOPE_WORST, SLOPE_MIDDLE]
        names = ['best', 'worst', 'middle']
    for k in range(3):
        canvas.line(corners[k], corners[(k + 1) % 3], color=0, width=2)
        canvas.label(corners[k], names[k])


def _chords(normals) -> list[tuple]:
    seen, chords = set(), []
    for n in normals:
        chord = simplex_chord(n)
        if chord is None:
            continue
        key = frozenset(chord)
        if key not in seen:
            seen.add(key)
            chords.append(chord)
    return chords


def indifference_chords(pref: Preference, steps: int = 6) -> list[tuple]:
    """
    Indifference segments through a lottery grid, clipped to the simplex.

    :param pref: Preference: EU or weighted utility, in either representation
    :param steps: int: Grid denominator
    :return: list[tuple]: Chord endpoint pairs, duplicates removed
    """
    if isinstance(pref, WUFunctional):
        pref = pref.to_preference()
    grid = lottery_grid(steps)
    if isinstance(pref, WUPreference):
        return _chords(line_normal(pref.pivot, g) for g in grid if g != pref.pivot)
    if isinstance(pref, EUPreference):
        dx, dy = pref.direction
        return _chords((dx, dy, -(dx * gx + dy * gy)) for gx, gy in grid)
    raise InvalidRepresentationError(f'No indifference map for preference kind {pref.kind}')


def _increase_direction(pref: Preference) -> tuple:
    cx, cy = 1 / 3, 1 / 3
    if isinstance(pref, EUPreference):
        return tuple(float(v) for v in pref.direction)
    px, py = (float(v) for v in pref.pivot)
    # rotated counterclockwise radius; better for o = -1
    perp = (-(cy - py), cx - px)
    o = int(pref.orientation)
    return (-o * perp[0], -o * perp[1])


def _parts(pref: Preference) -> list[Preference]:
    parts = [pref.upper, pref.lower] if isinstance(pref, SemiWeightedPreference) else [pref]
    return [p.to_preference() if isinstance(p, WUFunctional) else p for p in parts]


def render_preference(pref: Preference, steps: int = 6, size: int = 600) -> Canvas:
    """
    Indifference map of a single preference in the MM chart.

    Weighted utility shows the pivot, expected utility shows parallel lines;
    the arrow at the centroid points towards better lotteries.

    :param pref: Preference: EU, weighted utility or semi-weighted utility
    :param steps: int: Grid denominator of the lotteries the lines pass through
    :param size: int: Picture size in pixels
    :return: Canvas
    """
    parts = _parts(pref)
    points = list(MM_VERTICES.values()) + [p.pivot for p in parts if isinstance(p, WUPreference)]
    canvas = Canvas(Viewport.around(points, size=size))
    _draw_simplex(canvas)
    for k, part in enumerate(parts):
        color = GREY if k else 90
        for a, b in indifference_chords(part, steps):
            canvas.line(a, b, color=color)
        if isinstance(part, WUPreference):
            canvas.dot(part.pivot, 4, color=PIVOT_COLORS[int(part.orientation)])
            canvas.label(part.pivot, 'x{}'.format(k + 1))
        canvas.arrow((1 / 3, 1 / 3), _increase_direction(part), color=PIVOT_COLORS[1])
    logger.info('rendered %s with %d part(s)', pref.kind, len(parts))
    return canvas


# -- random preferences ------------------------------------------------------

def _sample_pivots(mu: RandomPreference, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    Y = mu.sample_homogeneous(np.random.default_rng(np.random.SeedSequence(seed)), n)
    finite = Y[:, 2] != 0
    Y = Y[finite]
    return Y[:, :2] / Y[:, 2:3], np.sign(Y[:, 2]).astype(int)


def _admissible_polygons(limit: float) -> list[list[tuple]]:
    reach = limit - 1
    return [[(-1.0, 0.0), (-limit, reach), (-limit, -reach)], [(1.0, 0.0), (limit, reach), (limit, -reach)]]


def render_slope_pair(mu: SlopePair, samples: int = 200, seed: int | None = None, size: int = 600) -> Canvas:
    """
    SLOPE chart with the two regions where pivots of FOSD-monotone weighted utility lie, and sampled pivots.
    """
    limit = 3.0
    canvas = Canvas(Viewport(-limit, limit, -limit, limit, size))
    for polygon, color in zip(_admissible_polygons(limit), ADMISSIBLE_COLORS):
        canvas.polygon(polygon, color=color, opacity=0.25)
    for y in (-1.0, 1.0):
        canvas.line((-limit, y), (limit, y), color=GREY)
    _draw_simplex(canvas, Chart.SLOPE)
    pivots, signs = _sample_pivots(mu, samples, config.seed if seed is None else seed)
    for (x, y), o in zip(pivots, signs):
        canvas.dot(convert_point((float(x), float(y)), Chart.MM, Chart.SLOPE, mu.ranking), 2,
                   color=PIVOT_COLORS[int(o)])
    return canvas


def render_distribution(mu: RandomPreference, samples: int = 200, seed: int | None = None, size: int = 600) -> Canvas:
    """
    Picture of a random preference.

    Circle laws show the circle and sampled pivots coloured by orientation,
    uniform EU shows sampled gradient directions, finite mixtures overlay
    their components and slope laws use the SLOPE chart.

    :param mu: RandomPreference: Law to draw
    :param samples: int: Number of sampled pivots or directions
    :param seed: int | None: Sampling seed
    :param size: int: Picture size in pixels
    :return: Canvas
    """
    seed = config.seed if seed is None else seed
    if isinstance(mu, SlopePair):
        return render_slope_pair(mu, samples, seed, size)
    if isinstance(mu, FiniteMixture):
        canvas = render_preference(mu.components[0][0], size=size)
        for pref, _ in mu.components[1:]:
            for part in _parts(pref):
                for a, b in indifference_chords(part):
                    canvas.line(a, b, color=GREY)
                if isinstance(part, WUPreference):
                    canvas.dot(part.pivot, 4, color=PIVOT_COLORS[int(part.orientation)])
        return canvas
    if isinstance(mu, CircleRWU):
        cx, cy = (float(v) for v in mu.center)
        r = float(mu.radius)
        canvas = Canvas(Viewport(cx - r - 0.1, cx + r + 0.1, cy - r - 0.1, cy + r + 0.1, size))
        _draw_simplex(canvas)
        canvas.ring((cx, cy), r, color=GREY)
        pivots, signs = _sample_pivots(mu, samples, seed)
        for point, o in zip(pivots, signs):
            canvas.dot(point, 2, color=PIVOT_COLORS[int(o)])
        return canvas
    if isinstance(mu, UniformEU):
        canvas = Canvas(Viewport(-0.2, 1.2, -0.2, 1.2, size))
        _draw_simplex(canvas)
        Y = mu.sample_homogeneous(np.random.default_rng(np.random.SeedSequence(seed)), samples)
        for dy, mdx, _ in Y:
            canvas.arrow((1 / 3, 1 / 3), (-mdx, dy), length=0.12, color=GREY, width=1)
        return canvas
    raise InvalidDistributionError(f'No picture for random preference kind {mu.kind}')
