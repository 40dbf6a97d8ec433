use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Generator used for every seeded draw in the crate.
pub type SmvbsRng = ChaCha20Rng;

pub fn seeded(seed: u64) -> SmvbsRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Independent substream `index` of `seed`.
pub fn substream(seed: u64, index: u64) -> SmvbsRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
