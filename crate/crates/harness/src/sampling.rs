//! Reproducible sample points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `count` points drawn uniformly from the box `domain`; the same seed gives
/// the same list on every platform.
pub fn sample_box(seed: u64, count: usize, domain: &[[f64; 2]]) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| domain.iter().map(|&[lo, hi]| rng.gen_range(lo..hi)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inside_box() {
        let d = [[0.2, 2.9], [0.1, 6.0]];
        for p in sample_box(7, 50, &d) {
            assert!(p.iter().zip(&d).all(|(x, [lo, hi])| lo <= x && x < hi));
        }
    }
}
