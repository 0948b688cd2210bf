//! Seed derivation and the random streams used by trajectory simulation.
//!
//! Every stochastic quantity in the toolkit is drawn from a ChaCha8 stream
//! whose seed is derived from a master seed and an integer job index with
//! [`derive_seed`]. Because each kernel entry, trajectory and readout owns its
//! own stream, results do not depend on evaluation order or thread count.
//!
//! The mix is stable across releases:
//!
//! ```text
//! derive_seed(master, index) = fmix(master + 0x9E3779B97F4A7C15 * (index + 1))
//! fmix(z) = z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!           z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
//! ```
//!
//! (wrapping 64-bit arithmetic; `fmix` is the splitmix64 finalizer).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 output finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of job `index` under `master`.
#[inline]
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

/// Seed for kernel-matrix entry `(i, j)` of a matrix with `cols` columns.
#[inline]
pub fn entry_seed(master: u64, i: usize, j: usize, cols: usize) -> u64 {
    derive_seed(
        master,
        (i as u64).wrapping_mul(cols as u64).wrapping_add(j as u64),
    )
}

/// Stream used for Pauli-error draws inside a trajectory.
pub fn noise_stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream used for measurement outcomes; independent of [`noise_stream`].
pub fn readout_stream(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_values() {
        // First outputs of the reference splitmix64 generator seeded with 0:
        // state advances by the golden gamma before finalizing.
        assert_eq!(splitmix64(GOLDEN_GAMMA), 0xE220_A839_7B1D_CDAF);
        assert_eq!(
            splitmix64(GOLDEN_GAMMA.wrapping_mul(2)),
            0x6E78_9E6A_A1B9_65F4
        );
    }

    #[test]
    fn derived_seeds_differ_per_index() {
        let a = derive_seed(7, 0);
        let b = derive_seed(7, 1);
        let c = derive_seed(8, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(7, 0));
    }

    #[test]
    fn entry_seed_is_row_major_index() {
        assert_eq!(entry_seed(3, 2, 1, 5), derive_seed(3, 11));
    }
}
