"""Periodic grids, node fields, and the binary field file format.

Everything downstream works on a uniform periodic lattice covering the box
[-L/2, L/2)^n with N nodes per axis.  Data of interest (obstacle, forcing,
contact region) are kept compactly supported in the central quarter of the
box so that the periodic wrap-around stays controlled.
"""

import json
import os

import numpy as np

__all__ = ["GridSpec", "Field", "save_field", "load_field"]


class GridSpec:
    """Uniform periodic lattice on [-L/2, L/2)^n, n in {1, 2}.

    N must be even (and >= 4) so the frequency lattice is closed under
    negation and real transforms keep conjugate symmetry.
    """

    def __init__(self, n, N, L):
        if n not in (1, 2):
            raise ValueError("grid dimension must be 1 or 2, got %r" % (n,))
        if N < 4 or N % 2 != 0:
            raise ValueError("N must be even and >= 4, got %r" % (N,))
        if L <= 0:
            raise ValueError("box side L must be positive, got %r" % (L,))
        self.n = int(n)
        self.N = int(N)
        self.L = float(L)
        self.h = self.L / self.N

    @property
    def shape(self):
        return (self.N,) * self.n

    @property
    def size(self):
        return self.N**self.n

    @property
    def cell_volume(self):
        return self.h**self.n

    def axis_coords(self):
        """Node coordinates along one axis, centered: -L/2 ... L/2 - h."""
        return (np.arange(self.N) - self.N // 2) * self.h

    def coords(self):
        """Meshgrid of node coordinates, tuple of n arrays of grid shape."""
        x = self.axis_coords()
        if self.n == 1:
            return (x,)
        return tuple(np.meshgrid(x, x, indexing="ij"))

    def radius(self, center=None):
        """Distance from each node to `center` (default: the origin)."""
        if center is None:
            center = (0.0,) * self.n
        r2 = np.zeros(self.shape)
        for c, xi in zip(self.coords(), center):
            r2 = r2 + (c - xi) ** 2
        return np.sqrt(r2)

    def axis_freqs(self):
        """Discrete wavenumbers 2*pi*k/L along one axis, fft ordering."""
        return 2.0 * np.pi * np.fft.fftfreq(self.N, d=self.h)

    def freq_norm2(self):
        """|xi|^2 on the full frequency lattice, grid shaped, fft order."""
        k = self.axis_freqs()
        if self.n == 1:
            return k**2
        kx, ky = np.meshgrid(k, k, indexing="ij")
        return kx**2 + ky**2

    def __eq__(self, other):
        return (
            isinstance(other, GridSpec)
            and self.n == other.n
            and self.N == other.N
            and self.L == other.L
        )

    def __hash__(self):
        return hash((self.n, self.N, self.L))

    def __repr__(self):
        return "GridSpec(n=%d, N=%d, L=%g)" % (self.n, self.N, self.L)


class Field:
    """Real values on the nodes of a GridSpec.

    Values are stored grid-shaped; the flat row-major order is the on-disk
    order.  Construction rejects non-finite entries.
    """

    def __init__(self, grid, values):
        values = np.asarray(values, dtype=float)
        if values.size != grid.size:
            raise ValueError(
                "field length %d does not match grid size %d"
                % (values.size, grid.size)
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field contains non-finite entries")
        self.grid = grid
        self.values = values.reshape(grid.shape)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_function(cls, grid, fn):
        return cls(grid, fn(*grid.coords()))

    def copy(self):
        return Field(self.grid, self.values.copy())

    def __repr__(self):
        return "Field(%r, max=%g)" % (self.grid, np.max(np.abs(self.values)))


def _sidecar_path(path):
    return path + ".json"


def save_field(path, field, kind="thin", ylevels=None):
    """Write little-endian float64 row-major binary plus a JSON sidecar.

    `values` may be a Field (thin) or an (nodes..., levels) array for
    half-space data; the sidecar records enough to rebuild the grid.
    """
    grid = field.grid
    values = field.values
    meta = {
        "n": grid.n,
        "N": grid.N,
        "L": grid.L,
        "kind": kind,
        "ylevels": [float(y) for y in ylevels] if ylevels is not None else [],
    }
    np.ascontiguousarray(values, dtype="<f8").tofile(path)
    with open(_sidecar_path(path), "w") as fh:
        json.dump(meta, fh, sort_keys=True)
        fh.write("\n")


def load_field(path):
    """Read a field written by save_field.  Returns (array, meta, grid).

    For kind "thin" the array is grid shaped; for "halfspace" it is
    (grid shape) + (len(ylevels),).
    """
    with open(_sidecar_path(path)) as fh:
        meta = json.load(fh)
    grid = GridSpec(meta["n"], meta["N"], meta["L"])
    raw = np.fromfile(path, dtype="<f8")
    if meta["kind"] == "halfspace":
        nlev = len(meta["ylevels"])
        values = raw.reshape(grid.shape + (nlev,))
    else:
        values = raw.reshape(grid.shape)
    return values, meta, grid


def field_files_equal(path_a, path_b):
    """Bit-exact comparison of two stored fields (payload and sidecar)."""
    with open(path_a, "rb") as fa, open(path_b, "rb") as fb:
        if fa.read() != fb.read():
            return False
    with open(_sidecar_path(path_a)) as fa, open(_sidecar_path(path_b)) as fb:
        return json.load(fa) == json.load(fb)
