//! Softened pairwise Coulomb sum.

use crate::bunch::Vec3;
use crate::constants::COULOMB;

/// Softened field of a unit source at separation `d = x_i - x_j`, without the
/// Coulomb factor. Negating `d` negates the result exactly.
#[inline(always)]
fn kernel(dx: f64, dy: f64, dz: f64, soft2: f64) -> (f64, f64, f64) {
    let r2 = dx * dx + dy * dy + dz * dz + soft2;
    let inv = 1.0 / (r2 * r2.sqrt());
    (dx * inv, dy * inv, dz * inv)
}

#[cfg(test)]
fn pair_kernel(xi: &Vec3, xj: &Vec3, soft2: f64) -> Vec3 {
    let d = xi - xj;
    let (x, y, z) = kernel(d.x, d.y, d.z, soft2);
    Vec3::new(x, y, z)
}

/// Electrostatic field at each position from equal point charges `charge` at all the others.
pub(super) fn electric_field(positions: &[Vec3], charge: f64, softening: f64) -> Vec<Vec3> {
    let n = positions.len();
    let soft2 = softening * softening;
    let xs: Vec<f64> = positions.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = positions.iter().map(|p| p.y).collect();
    let zs: Vec<f64> = positions.iter().map(|p| p.z).collect();
    let mut ex = vec![0.0; n];
    let mut ey = vec![0.0; n];
    let mut ez = vec![0.0; n];

    // Visit each pair once. Four independent accumulators let the inner loop
    // vectorize; the summation order is still fixed, so results are reproducible.
    const LANES: usize = 4;
    for i in 0..n {
        let (xi, yi, zi) = (xs[i], ys[i], zs[i]);
        let rest = n - i - 1;
        let full = rest / LANES * LANES;
        let (xj, yj, zj) = (&xs[i + 1..], &ys[i + 1..], &zs[i + 1..]);
        let (exj, eyj, ezj) = (&mut ex[i + 1..], &mut ey[i + 1..], &mut ez[i + 1..]);
        let mut acc = [[0.0; LANES]; 3];
        for c in (0..full).step_by(LANES) {
            for l in 0..LANES {
                let j = c + l;
                let (fx, fy, fz) = kernel(xi - xj[j], yi - yj[j], zi - zj[j], soft2);
                acc[0][l] += fx;
                acc[1][l] += fy;
                acc[2][l] += fz;
                exj[j] -= fx;
                eyj[j] -= fy;
                ezj[j] -= fz;
            }
        }
        for j in full..rest {
            let (fx, fy, fz) = kernel(xi - xj[j], yi - yj[j], zi - zj[j], soft2);
            acc[0][0] += fx;
            acc[1][0] += fy;
            acc[2][0] += fz;
            exj[j] -= fx;
            eyj[j] -= fy;
            ezj[j] -= fz;
        }
        ex[i] += acc[0].iter().sum::<f64>();
        ey[i] += acc[1].iter().sum::<f64>();
        ez[i] += acc[2].iter().sum::<f64>();
    }

    let k = COULOMB * charge;
    (0..n)
        .map(|i| Vec3::new(ex[i], ey[i], ez[i]) * k)
        .collect()
}
