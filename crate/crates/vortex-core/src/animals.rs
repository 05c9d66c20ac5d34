//! Counting connected plaquette sets (vortex shapes) through a given plaquette.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// Largest size accepted by [`count_vortices_containing`].
pub const MAX_ANIMAL_SIZE: usize = 8;

/// `C(d) = e * 10 (d - 2)`: the number of vortices of size `k` through a
/// plaquette is at most `C(d)^k` (the G2 degree times `e`).
pub fn vortex_growth_constant(dim: usize) -> f64 {
    core::f64::consts::E * (10 * dim.saturating_sub(2)) as f64
}

/// Number of G2-connected plaquette sets of each size `1..=k` containing `p`
/// (entry `i` is size `i + 1`). Redelmeier's untried-set recursion, so each
/// set is produced once.
pub fn count_vortices_containing(lat: &Lattice, p: usize, k: usize) -> Result<Vec<u64>> {
    if k > MAX_ANIMAL_SIZE {
        return Err(Error::EnumerationLimit { k, max: MAX_ANIMAL_SIZE });
    }
    let mut counts = vec![0u64; k];
    if k == 0 {
        return Ok(counts);
    }
    let mut seen = vec![false; lat.num_plaquettes()];
    seen[p] = true;
    let mut untried = vec![p];
    recurse(lat, &mut untried, &mut seen, 0, k, &mut counts);
    Ok(counts)
}

fn recurse(lat: &Lattice, untried: &mut Vec<usize>, seen: &mut [bool], size: usize, k: usize, counts: &mut [u64]) {
    while let Some(v) = untried.pop() {
        counts[size] += 1;
        if size + 1 < k {
            let fresh: Vec<usize> = lat.g2_neighbors(v).iter().copied().filter(|&q| !seen[q]).collect();
            for &q in &fresh {
                seen[q] = true;
            }
            let mut next = untried.clone();
            next.extend_from_slice(&fresh);
            recurse(lat, &mut next, seen, size + 1, k, counts);
            for &q in &fresh {
                seen[q] = false;
            }
        }
    }
}
