//! Shared inputs for the benchmarks.

use amts_core::harness::{generate_bunch, BunchSpec, Distribution, Species};
use amts_core::Bunch;

/// 1 keV electron bunch of `n` macroparticles, 100 pC, Gaussian with 1 mm widths.
pub fn gaussian_bunch(n: usize) -> Bunch {
    generate_bunch(&BunchSpec {
        distribution: Distribution::Gaussian {
            sigma: [1e-3, 1e-3, 1e-3],
            momentum_spread: [1e-3, 1e-3, 1e-3],
        },
        particles: n,
        total_charge: -1e-10,
        kinetic_energy: 1000.0,
        species: Species::Electron,
        seed: 42,
    })
    .expect("valid bunch")
}
