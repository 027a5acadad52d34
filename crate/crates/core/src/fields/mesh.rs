//! Particle-in-cell electrostatic solver with open boundaries.
//!
//! Charge is deposited with cloud-in-cell weights on a node-centred grid
//! spanning the particle bounding box. The potential is the discrete
//! convolution of the deposit with the cell-integrated free-space Green's
//! function (exact for uniform charge within a cell, robust for elongated
//! cells), done on a
//! grid doubled along every axis so the cyclic FFT convolution never wraps
//! (Hockney's method). The field is the central difference of the potential,
//! gathered back to the particles with the same weights.

use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::bunch::Vec3;
use crate::constants::COULOMB;
use crate::error::{Error, Result};

/// Nodes kept free between the bounding box and the grid edge.
const GUARD: usize = 2;

struct Grid {
    dims: [usize; 3],
    origin: Vec3,
    spacing: Vec3,
}

impl Grid {
    fn enclosing(positions: &[Vec3], dims: [usize; 3], padding: f64) -> Result<Self> {
        let mut lo = positions[0];
        let mut hi = positions[0];
        for p in positions {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        let mut extent = hi - lo;
        let widest = extent.max();
        if widest <= 0.0 {
            return Err(Error::DegenerateDeposit);
        }
        // Flat bunches get a cubic extent along the collapsed axes.
        for k in 0..3 {
            if extent[k] <= widest * 1e-12 {
                let mid = 0.5 * (lo[k] + hi[k]);
                lo[k] = mid - 0.5 * widest;
                extent[k] = widest;
            }
        }
        let mut origin = Vec3::zeros();
        let mut spacing = Vec3::zeros();
        for k in 0..3 {
            let span = extent[k] * (1.0 + 2.0 * padding);
            let cells = (dims[k] - 1 - 2 * GUARD) as f64;
            spacing[k] = span / cells;
            origin[k] = lo[k] - padding * extent[k] - GUARD as f64 * spacing[k];
        }
        Ok(Grid { dims, origin, spacing })
    }

    fn len(&self) -> usize {
        self.dims.iter().product()
    }

    #[inline]
    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    /// Lower node and trilinear fractions for a position.
    #[inline]
    fn locate(&self, p: &Vec3) -> ([usize; 3], [f64; 3]) {
        let mut cell = [0usize; 3];
        let mut frac = [0.0; 3];
        for k in 0..3 {
            let s = (p[k] - self.origin[k]) / self.spacing[k];
            let c = (s.floor() as usize).min(self.dims[k] - 2);
            cell[k] = c;
            frac[k] = s - c as f64;
        }
        (cell, frac)
    }

    /// Calls `f(node_index, weight)` for the eight nodes around `p`.
    #[inline]
    fn for_each_weight(&self, p: &Vec3, mut f: impl FnMut(usize, f64)) {
        let ([i, j, k], [fx, fy, fz]) = self.locate(p);
        for (di, wx) in [(0, 1.0 - fx), (1, fx)] {
            for (dj, wy) in [(0, 1.0 - fy), (1, fy)] {
                for (dk, wz) in [(0, 1.0 - fz), (1, fz)] {
                    f(self.index(i + di, j + dj, k + dk), wx * wy * wz);
                }
            }
        }
    }
}

pub(super) fn electric_field(
    positions: &[Vec3],
    charge: f64,
    dims: [usize; 3],
    padding: f64,
) -> Result<Vec<Vec3>> {
    let grid = Grid::enclosing(positions, dims, padding)?;

    let mut rho = vec![0.0; grid.len()];
    for p in positions {
        grid.for_each_weight(p, |idx, w| rho[idx] += w);
    }

    let mut phi = convolve_free_space(&grid, &rho);
    let k = COULOMB * charge;
    phi.iter_mut().for_each(|v| *v *= k);

    let field = gradient(&grid, &phi);
    Ok(positions
        .iter()
        .map(|p| {
            let mut e = Vec3::zeros();
            grid.for_each_weight(p, |idx, w| e += field[idx] * w);
            e
        })
        .collect())
}

/// Potential of unit point charges `rho` (without the Coulomb factor).
fn convolve_free_space(grid: &Grid, rho: &[f64]) -> Vec<f64> {
    let [nx, ny, nz] = grid.dims;
    let padded = [2 * nx, 2 * ny, 2 * nz];
    let plen = padded.iter().product::<usize>();
    let pidx = |i: usize, j: usize, k: usize| (i * padded[1] + j) * padded[2] + k;

    let mut source = vec![Complex64::new(0.0, 0.0); plen];
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                source[pidx(i, j, k)].re = rho[grid.index(i, j, k)];
            }
        }
    }

    let h = grid.spacing;
    let mut green = vec![Complex64::new(0.0, 0.0); plen];
    for i in 0..padded[0] {
        let dx = i.min(padded[0] - i) as f64 * h.x;
        for j in 0..padded[1] {
            let dy = j.min(padded[1] - j) as f64 * h.y;
            for k in 0..padded[2] {
                let dz = k.min(padded[2] - k) as f64 * h.z;
                green[pidx(i, j, k)].re = integrated_green(dx, dy, dz, &h);
            }
        }
    }

    let mut planner = FftPlanner::new();
    fft3(&mut planner, &mut source, padded, FftDirection::Forward);
    fft3(&mut planner, &mut green, padded, FftDirection::Forward);
    for (s, g) in source.iter_mut().zip(&green) {
        *s *= g;
    }
    fft3(&mut planner, &mut source, padded, FftDirection::Inverse);

    let scale = 1.0 / plen as f64;
    let mut phi = vec![0.0; grid.len()];
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                phi[grid.index(i, j, k)] = source[pidx(i, j, k)].re * scale;
            }
        }
    }
    phi
}

/// Mean of 1/r over the cell of size `h` centred at `(x, y, z)`.
fn integrated_green(x: f64, y: f64, z: f64, h: &Vec3) -> f64 {
    let (ax, ay, az) = (0.5 * h.x, 0.5 * h.y, 0.5 * h.z);
    let mut sum = 0.0;
    for (sx, px) in [(1.0, x + ax), (-1.0, x - ax)] {
        for (sy, py) in [(1.0, y + ay), (-1.0, y - ay)] {
            for (sz, pz) in [(1.0, z + az), (-1.0, z - az)] {
                sum += sx * sy * sz * antiderivative(px, py, pz);
            }
        }
    }
    sum / (h.x * h.y * h.z)
}

/// F with d^3F/dxdydz = 1/r.
fn antiderivative(x: f64, y: f64, z: f64) -> f64 {
    let r = (x * x + y * y + z * z).sqrt();
    // each term vanishes with its prefactor; guard the 0 * inf cases
    let atan_term = |a: f64, b: f64, c: f64| {
        if a == 0.0 {
            0.0
        } else {
            -0.5 * a * a * (b * c / (a * r)).atan()
        }
    };
    let log_term = |a: f64, b: f64, c: f64| {
        if a == 0.0 || b == 0.0 {
            0.0
        } else {
            a * b * (c + r).ln()
        }
    };
    atan_term(x, y, z) + atan_term(y, x, z) + atan_term(z, x, y)
        + log_term(y, z, x)
        + log_term(x, z, y)
        + log_term(x, y, z)
}

/// Unnormalized 3D FFT over a row-major array.
fn fft3(planner: &mut FftPlanner<f64>, data: &mut [Complex64], dims: [usize; 3], dir: FftDirection) {
    let [nx, ny, nz] = dims;

    // innermost axis is contiguous
    let fz = planner.plan_fft(nz, dir);
    fz.process(data);

    let fy = planner.plan_fft(ny, dir);
    let mut line = vec![Complex64::new(0.0, 0.0); ny.max(nx)];
    for i in 0..nx {
        for k in 0..nz {
            for j in 0..ny {
                line[j] = data[(i * ny + j) * nz + k];
            }
            fy.process(&mut line[..ny]);
            for j in 0..ny {
                data[(i * ny + j) * nz + k] = line[j];
            }
        }
    }

    let fx = planner.plan_fft(nx, dir);
    for j in 0..ny {
        for k in 0..nz {
            for i in 0..nx {
                line[i] = data[(i * ny + j) * nz + k];
            }
            fx.process(&mut line[..nx]);
            for i in 0..nx {
                data[(i * ny + j) * nz + k] = line[i];
            }
        }
    }
}

/// `-grad(phi)` at every node; central differences inside, one-sided at the faces.
fn gradient(grid: &Grid, phi: &[f64]) -> Vec<Vec3> {
    let [nx, ny, nz] = grid.dims;
    let h = grid.spacing;
    let diff = |lo: usize, hi: usize, c: usize, n: usize, f: &dyn Fn(usize) -> f64, h: f64| {
        if c == 0 {
            (f(1) - f(0)) / h
        } else if c == n - 1 {
            (f(c) - f(c - 1)) / h
        } else {
            (f(hi) - f(lo)) / (2.0 * h)
        }
    };
    let mut out = vec![Vec3::zeros(); grid.len()];
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                let gx = diff(i.wrapping_sub(1), i + 1, i, nx, &|a| phi[grid.index(a, j, k)], h.x);
                let gy = diff(j.wrapping_sub(1), j + 1, j, ny, &|a| phi[grid.index(i, a, k)], h.y);
                let gz = diff(k.wrapping_sub(1), k + 1, k, nz, &|a| phi[grid.index(i, j, a)], h.z);
                out[grid.index(i, j, k)] = -Vec3::new(gx, gy, gz);
            }
        }
    }
    out
}
