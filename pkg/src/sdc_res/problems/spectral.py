"""Doubly periodic Fourier grid shared by the pseudo-spectral PDE problems."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft


@dataclass
class SpectralGrid2D:
    """Uniform ``n_x`` by ``n_y`` grid on ``[x0, x0 + L_x) x [y0, y0 + L_y)``.

    ``real=True`` uses half-spectrum transforms for real-valued fields.
    """

    n_x: int
    n_y: int
    L_x: float = 2 * np.pi
    L_y: float = 2 * np.pi
    x0: float = 0.0
    y0: float = 0.0
    real: bool = False
    X: np.ndarray = field(init=False, repr=False)
    Y: np.ndarray = field(init=False, repr=False)
    lap: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        for n in (self.n_x, self.n_y):
            if n < 2 or n & (n - 1):
                raise ValueError(f"grid sizes must be powers of two >= 2, got {n}")
        if self.L_x <= 0 or self.L_y <= 0:
            raise ValueError("domain lengths must be positive")
        x = self.x0 + self.L_x * np.arange(self.n_x) / self.n_x
        y = self.y0 + self.L_y * np.arange(self.n_y) / self.n_y
        self.X, self.Y = np.meshgrid(x, y, indexing="ij")
        kx = 2 * np.pi * sfft.fftfreq(self.n_x, d=self.L_x / self.n_x)
        if self.real:
            ky = 2 * np.pi * sfft.rfftfreq(self.n_y, d=self.L_y / self.n_y)
        else:
            ky = 2 * np.pi * sfft.fftfreq(self.n_y, d=self.L_y / self.n_y)
        KX, KY = np.meshgrid(kx, ky, indexing="ij")
        self.kx, self.ky = KX, KY
        self.lap = -(KX**2 + KY**2)

    @property
    def shape(self):
        return (self.n_x, self.n_y)

    def forward(self, u):
        return sfft.rfft2(u) if self.real else sfft.fft2(u)

    def inverse(self, u_hat):
        return sfft.irfft2(u_hat, s=self.shape) if self.real else sfft.ifft2(u_hat)

    def laplacian(self, u):
        return self.inverse(self.lap * self.forward(u))

    def solve_shifted(self, rhs, symbol):
        """Solve the diagonal system ``symbol * v_hat = rhs_hat`` in Fourier space."""
        return self.inverse(self.forward(rhs) / symbol)
