"""Color ramps with fixed, hard-coded control points.

Control points are fixed so rendered documents are bit-reproducible.
The default ramp is a 9-point sampling of the familiar perceptually
uniform blue-green-yellow sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParameterError

_RAMPS: dict[str, tuple[str, ...]] = {
    # Dark violet to yellow, perceptually uniform.
    "viridis": (
        "#440154", "#482878", "#3e4989", "#31688e", "#26828e",
        "#1f9e89", "#35b779", "#6ece58", "#fde725",
    ),
    "gray": ("#000000", "#ffffff"),
    # Blue-white-red diverging ramp.
    "coolwarm": ("#3b4cc0", "#8db0fe", "#dddddd", "#f49a7b", "#b40426"),
}

DEFAULT_RAMP = "viridis"


def _parse_hex(code: str) -> tuple[int, int, int]:
    code = code.lstrip("#")
    return int(code[0:2], 16), int(code[2:4], 16), int(code[4:6], 16)


@dataclass(frozen=True)
class ColorMap:
    """Monotone mapping from a scalar interval onto a color ramp.

    Values outside [vmin, vmax] are clamped to the endpoints.
    """

    name: str
    colors: tuple[str, ...]
    vmin: float
    vmax: float

    def __post_init__(self):
        if not self.vmin < self.vmax:
            raise InvalidParameterError(
                f"colormap range must satisfy vmin < vmax, got "
                f"({self.vmin}, {self.vmax})"
            )
        if len(self.colors) < 2:
            raise InvalidParameterError("a colormap needs at least two colors")

    def with_range(self, vmin: float, vmax: float) -> "ColorMap":
        return ColorMap(self.name, self.colors, vmin, vmax)

    def position(self, value: float) -> float:
        """Normalized, clamped position of ``value`` in [0, 1]."""
        pos = (value - self.vmin) / (self.vmax - self.vmin)
        return min(1.0, max(0.0, pos))

    def color(self, value: float) -> str:
        """Hex color for ``value``, linearly interpolated between controls."""
        pos = self.position(value) * (len(self.colors) - 1)
        lo = int(np.floor(pos))
        hi = min(lo + 1, len(self.colors) - 1)
        frac = pos - lo
        c0 = _parse_hex(self.colors[lo])
        c1 = _parse_hex(self.colors[hi])
        rgb = tuple(int(round(a + frac * (b - a))) for a, b in zip(c0, c1))
        return "#{:02x}{:02x}{:02x}".format(*rgb)


def get_colormap(name_or_map, vmin: float = 0.0, vmax: float = 1.0) -> ColorMap:
    """Resolve a ramp name (or pass through a ColorMap) with a value range."""
    if isinstance(name_or_map, ColorMap):
        return name_or_map
    name = DEFAULT_RAMP if name_or_map is None else str(name_or_map)
    try:
        ramp = _RAMPS[name]
    except KeyError:
        known = ", ".join(sorted(_RAMPS))
        raise InvalidParameterError(
            f"unknown colormap '{name}' (available: {known})"
        ) from None
    return ColorMap(name, ramp, vmin, vmax)


def colormap_names() -> list[str]:
    return sorted(_RAMPS)
