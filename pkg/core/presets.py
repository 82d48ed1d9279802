"""
Preset links
Named curves sampled from fixed parametrizations and rationalized

Every preset is sampled at n vertices per component. Trigonometric
samples are rounded to PRESET_DIGITS decimals, which keeps vertices
exact, decimal-representable and within 1e-12 of the smooth model.
"""
import sys
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from config import PRESET_DIGITS
from core.predicates import Point3
from core.link_model import PolyLink
from core.utils import child_rng, get_logger

logger = get_logger("presets", "link_model.log")


class PresetError(ValueError):
    """Unknown preset or too few edges"""


def rationalize(value: float, digits: int = PRESET_DIGITS) -> Fraction:
    """Round to a finite decimal with `digits` places"""
    scale = 10 ** digits
    return Fraction(round(value * scale), scale)


def _sample(curve: Callable[[float], Tuple[float, float, float]], n: int, phase: float) -> Tuple[Point3, ...]:
    us = phase + 2.0 * math.pi * np.arange(n) / n
    return tuple(Point3(*(rationalize(c) for c in curve(float(u)))) for u in us)


# ============ Parametrizations ============

def _round_unknot(u):
    return (2.0 * math.cos(u), 2.0 * math.sin(u), 0.0)


def _trefoil(u):
    r = 2.0 + math.cos(3 * u)
    return (r * math.cos(2 * u), r * math.sin(2 * u), math.sin(3 * u))


def _figure_eight(u):
    r = 2.0 + math.cos(2 * u)
    return (r * math.cos(3 * u), r * math.sin(3 * u), math.sin(4 * u))


def _hopf_a(u):
    return (math.cos(u), math.sin(u), 0.0)


def _hopf_b(u):
    return (1.0 + math.cos(u), 0.0, math.sin(u))


def _ellipse_xy(u):
    return (2.0 * math.cos(u), math.sin(u), 0.0)


def _ellipse_yz(u):
    return (0.0, 2.0 * math.cos(u), math.sin(u))


def _ellipse_zx(u):
    return (math.sin(u), 0.0, 2.0 * math.cos(u))


def _meridian(u):
    # small circle around the core point (-3, 0, 0) of the clasp torus
    return (-3.0 + 1.5 * math.cos(u), 0.0, 1.5 * math.sin(u))


def _clasp_guide() -> List[Tuple[float, float, float]]:
    """
    Guide polygon of the clasped component: an outer strand and an inner
    strand around the core circle of radius 3, joined by two hooks that
    clasp each other near (3, 0, 0).
    """
    deg = math.pi / 180.0
    outer = [(3.5 * math.cos(a * deg), 3.5 * math.sin(a * deg), 0.0) for a in range(20, 341, 40)]
    inner = [(2.5 * math.cos(a * deg), 2.5 * math.sin(a * deg), 0.0) for a in range(340, 19, -40)]
    hook_out = [(3.5, 0.5, 0.0), (2.5, 0.5, 0.0)]
    hook_back = [(3.0, 0.9, -1.0), (3.0, -0.5, -1.0), (3.0, -0.5, 1.0), (3.0, 0.9, 1.0)]
    return outer + hook_out + inner + hook_back


def _subdivide(guide: Sequence[Tuple[float, float, float]], n: int) -> Tuple[Point3, ...]:
    """Keep every guide vertex; split the longest edges until there are n"""
    pts = [Point3(*(rationalize(c) for c in p)) for p in guide]
    while len(pts) < n:
        lengths = [sum((float(a) - float(b)) ** 2 for a, b in zip(pts[i].xyz, pts[(i + 1) % len(pts)].xyz))
                   for i in range(len(pts))]
        i = max(range(len(pts)), key=lambda k: (lengths[k], -k))
        mid = (pts[i] + pts[(i + 1) % len(pts)]).scaled(Fraction(1, 2))
        pts.insert(i + 1, mid)
    return tuple(pts)


# ============ Registry ============

@dataclass(frozen=True)
class PresetSpec:
    """A named preset and its documented isotopy class"""
    name: str
    isotopy_class: str
    min_edges: int
    description: str


PRESETS: Dict[str, PresetSpec] = {
    "round_unknot": PresetSpec("round_unknot", "unknot (0_1)", 3,
                               "convex planar polygon inscribed in the circle of radius 2, z = 0"),
    "trefoil_t23": PresetSpec("trefoil_t23", "trefoil (3_1), the (2,3) torus knot", 12,
                              "((2+cos 3u) cos 2u, (2+cos 3u) sin 2u, sin 3u)"),
    "figure_eight": PresetSpec("figure_eight", "figure-eight knot (4_1)", 16,
                               "((2+cos 2u) cos 3u, (2+cos 2u) sin 3u, sin 4u)"),
    "hopf": PresetSpec("hopf", "Hopf link (2^2_1)", 4,
                       "unit circles in the planes z = 0 and y = 0, each through the other's center"),
    "whitehead": PresetSpec("whitehead", "Whitehead link (5^2_1)", 24,
                            "meridian circle around a strand pair that closes with a clasp"),
    "borromean": PresetSpec("borromean", "Borromean rings (6^3_2)", 8,
                            "three 2:1 ellipses in the three coordinate planes"),
}


def preset(name: str, n: int, seed: int = 0) -> PolyLink:
    """
    Build a named preset with n vertices per component.

    A nonzero seed shifts the sampling phase of the trigonometric components
    by less than one sampling step; seed 0 starts every curve at u = 0.

    Raises:
        PresetError: unknown name or n below the preset's minimum
    """
    if name not in PRESETS:
        raise PresetError(f"unknown preset '{name}' (known: {', '.join(sorted(PRESETS))})")
    spec = PRESETS[name]
    if n < spec.min_edges:
        raise PresetError(f"preset '{name}' needs at least {spec.min_edges} edges per component, got {n}")

    phase = 0.0
    if seed:
        phase = float(child_rng(seed, "preset").random()) * 2.0 * math.pi / n

    if name == "round_unknot":
        comps = (_sample(_round_unknot, n, phase),)
    elif name == "trefoil_t23":
        comps = (_sample(_trefoil, n, phase),)
    elif name == "figure_eight":
        comps = (_sample(_figure_eight, n, phase),)
    elif name == "hopf":
        comps = (_sample(_hopf_a, n, phase), _sample(_hopf_b, n, phase))
    elif name == "whitehead":
        comps = (_sample(_meridian, n, phase), _subdivide(_clasp_guide(), n))
    else:
        comps = tuple(_sample(f, n, phase) for f in (_ellipse_xy, _ellipse_yz, _ellipse_zx))

    logger.info(f"preset {name}: {len(comps)} component(s) x {n} vertices, seed {seed}")
    return PolyLink(components=comps)


def list_presets() -> List[PresetSpec]:
    return [PRESETS[k] for k in sorted(PRESETS)]
