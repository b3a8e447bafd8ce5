//! Seeded random streams.
//!
//! Every consumer draws from its own ChaCha8 stream: the 64-bit run seed
//! keys the generator and the FNV-1a hash of a text label selects the
//! stream. Streams never overlap, so parallel consumers stay reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fnv1a(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

pub fn stream(seed: u64, label: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(label));
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map({
            let mut r = stream(7, "centers");
            move |_| r.random()
        }).collect();
        let b: Vec<u64> = (0..4).map({
            let mut r = stream(7, "centers");
            move |_| r.random()
        }).collect();
        let c: Vec<u64> = (0..4).map({
            let mut r = stream(7, "continua");
            move |_| r.random()
        }).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
