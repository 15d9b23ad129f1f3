"""Rectangular evaluation grids on the complex plane."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """A rectangular grid of complex evaluation points.

    ``nodes`` counts points per axis, endpoints included.
    """

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    nodes_re: int
    nodes_im: int

    def __post_init__(self):
        if not (self.re_max > self.re_min and self.im_max > self.im_min):
            raise ValueError("grid extent must have max > min on both axes")
        if self.nodes_re < 3 or self.nodes_im < 3:
            raise ValueError("grid needs at least 3 nodes per axis")

    @classmethod
    def square(cls, lo, hi, nodes):
        return cls(lo, hi, lo, hi, nodes, nodes)

    @property
    def re_axis(self):
        return np.linspace(self.re_min, self.re_max, self.nodes_re)

    @property
    def im_axis(self):
        return np.linspace(self.im_min, self.im_max, self.nodes_im)

    @property
    def spacing(self):
        """(re step, im step)."""
        return (
            (self.re_max - self.re_min) / (self.nodes_re - 1),
            (self.im_max - self.im_min) / (self.nodes_im - 1),
        )

    def mesh(self):
        """Complex nodes, shape (nodes_im, nodes_re); row = fixed Im."""
        re = self.re_axis[None, :]
        im = self.im_axis[:, None]
        return re + 1j * im

    def to_config(self):
        return {
            "re_min": repr(self.re_min),
            "re_max": repr(self.re_max),
            "im_min": repr(self.im_min),
            "im_max": repr(self.im_max),
            "nodes_re": str(self.nodes_re),
            "nodes_im": str(self.nodes_im),
        }

    @classmethod
    def from_config(cls, section):
        return cls(
            float(section["re_min"]),
            float(section["re_max"]),
            float(section["im_min"]),
            float(section["im_max"]),
            int(section["nodes_re"]),
            int(section["nodes_im"]),
        )
