"""Initial-data profile families.

Profiles are callables evaluable at arbitrary coordinates (the semi-analytic
solver samples them outside the primary grid), with an analytic derivative
where one exists.  The supported families are gaussian, bump (compactly
supported), constant, zero, and file (grid-bound samples).
"""

from __future__ import annotations

import numpy as np

from .errors import ProfileError


class Profile:
    """Base profile: subclasses implement __call__; derivative defaults to
    a central difference."""

    def __call__(self, x):
        raise NotImplementedError

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        h = 1e-6 * max(1.0, float(np.max(np.abs(x))) if x.size else 1.0)
        return (self(x + h) - self(x - h)) / (2.0 * h)


class Constant(Profile):
    def __init__(self, c: float):
        self.c = float(c)

    def __call__(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.c)

    def derivative(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


class Zero(Constant):
    def __init__(self):
        super().__init__(0.0)


class Gaussian(Profile):
    """amplitude * exp(-((x-center)/width)^2)."""

    def __init__(self, amplitude: float, width: float, center: float = 0.0):
        if width <= 0.0:
            raise ProfileError(f"gaussian width must be positive, got {width}")
        self.amplitude = float(amplitude)
        self.width = float(width)
        self.center = float(center)

    def __call__(self, x):
        xi = (np.asarray(x, dtype=float) - self.center) / self.width
        return self.amplitude * np.exp(-(xi**2))

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        xi = (x - self.center) / self.width
        return self.amplitude * np.exp(-(xi**2)) * (-2.0 * xi / self.width)


class Bump(Profile):
    """Compactly supported bump: amplitude * e * exp(-1/(1-xi^2)) on |xi| < 1,
    xi = (x-center)/width; zero outside.  Peak value equals amplitude."""

    def __init__(self, amplitude: float, width: float, center: float = 0.0):
        if width <= 0.0:
            raise ProfileError(f"bump width must be positive, got {width}")
        self.amplitude = float(amplitude)
        self.width = float(width)
        self.center = float(center)

    def _xi(self, x):
        return (np.asarray(x, dtype=float) - self.center) / self.width

    def __call__(self, x):
        xi = self._xi(x)
        out = np.zeros_like(xi)
        inside = np.abs(xi) < 1.0
        r = xi[inside]
        out[inside] = self.amplitude * np.e * np.exp(-1.0 / (1.0 - r**2))
        return out

    def derivative(self, x):
        xi = self._xi(x)
        out = np.zeros_like(xi)
        inside = np.abs(xi) < 1.0
        r = xi[inside]
        core = np.exp(-1.0 / (1.0 - r**2))
        out[inside] = self.amplitude * np.e * core * (-2.0 * r / (1.0 - r**2) ** 2) / self.width
        return out


class FileProfile(Profile):
    """Grid-bound samples loaded from a single-column text file.

    The sample count must match the grid it is bound to; evaluation at other
    coordinates uses linear interpolation with constant extension.
    """

    def __init__(self, path: str, coordinates=None):
        self.path = str(path)
        try:
            values = np.loadtxt(self.path, dtype=float)
        except OSError as exc:
            raise ProfileError(f"cannot read profile file {self.path}: {exc}") from exc
        values = np.atleast_1d(values)
        if values.ndim != 1:
            raise ProfileError(f"profile file {self.path} must hold a single column")
        if not np.all(np.isfinite(values)):
            raise ProfileError(f"profile file {self.path} contains non-finite samples")
        self.values = values
        self.coordinates = None
        if coordinates is not None:
            self.bind(coordinates)

    def bind(self, coordinates):
        coordinates = np.asarray(coordinates, dtype=float)
        if len(self.values) != len(coordinates):
            raise ProfileError(
                f"profile file {self.path} has {len(self.values)} samples, "
                f"grid has {len(coordinates)} points"
            )
        self.coordinates = coordinates
        return self

    def __call__(self, x):
        if self.coordinates is None:
            raise ProfileError(f"profile file {self.path} is not bound to a grid")
        return np.interp(np.asarray(x, dtype=float), self.coordinates, self.values)

    def derivative(self, x):
        if self.coordinates is None:
            raise ProfileError(f"profile file {self.path} is not bound to a grid")
        dv = np.gradient(self.values, self.coordinates)
        return np.interp(np.asarray(x, dtype=float), self.coordinates, dv)


_FAMILIES = ("gaussian", "bump", "constant", "zero", "file")


def make_profile(spec: dict, coordinates=None) -> Profile:
    """Build a profile from a config mapping like {"family": "gaussian", ...}."""
    if not isinstance(spec, dict) or "family" not in spec:
        raise ProfileError(f"profile spec must be a mapping with a 'family' key, got {spec!r}")
    family = spec["family"]
    args = {k: v for k, v in spec.items() if k != "family"}
    try:
        if family == "gaussian":
            return Gaussian(
                amplitude=args.pop("amplitude"),
                width=args.pop("width"),
                center=args.pop("center", 0.0),
            )
        if family == "bump":
            return Bump(
                amplitude=args.pop("amplitude"),
                width=args.pop("width"),
                center=args.pop("center", 0.0),
            )
        if family == "constant":
            return Constant(args.pop("c"))
        if family == "zero":
            return Zero()
        if family == "file":
            return FileProfile(args.pop("path"), coordinates=coordinates)
    except KeyError as exc:
        raise ProfileError(f"profile family {family!r} is missing parameter {exc}") from exc
    finally:
        if family in _FAMILIES and args:
            raise ProfileError(f"unknown parameters for {family!r} profile: {sorted(args)}")
    raise ProfileError(f"unknown profile family {family!r}; choose from {_FAMILIES}")
