//! Deterministic seed and hash derivation.
//!
//! FNV-1a is used instead of the standard library hasher because results
//! must reproduce across platforms and toolchain versions. Run seeds hash
//! the grid coordinates but deliberately *not* the hop-loss kind, so every
//! kind sees identical networks and GA seeds within a (cell, repeat) pair.

use dcc_dvhop::net::{Network, Topology};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a.
#[derive(Debug, Clone, Copy)]
pub struct Fnv1a(u64);

impl Fnv1a {
    pub fn new() -> Self {
        Self(FNV_OFFSET)
    }

    pub fn write(&mut self, bytes: &[u8]) -> &mut Self {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(FNV_PRIME);
        }
        self
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

impl Default for Fnv1a {
    fn default() -> Self {
        Self::new()
    }
}

/// Seed for one (cell, repeat) of the sweep grid.
pub fn run_seed(base_seed: u64, topology: Topology, n_a: usize, radius: f64, repeat: usize) -> u64 {
    let mut h = Fnv1a::new();
    h.write(&base_seed.to_le_bytes())
        .write(topology.token().as_bytes())
        .write(&(n_a as u32).to_le_bytes())
        .write(&radius.to_bits().to_le_bytes())
        .write(&(repeat as u32).to_le_bytes());
    h.finish()
}

/// Content hash of a network layout; equal hashes across kinds certify that
/// a comparison is paired.
pub fn network_hash(network: &Network) -> u64 {
    let mut h = Fnv1a::new();
    h.write(&(network.len() as u32).to_le_bytes())
        .write(&(network.anchor_count() as u32).to_le_bytes())
        .write(&network.radius().to_bits().to_le_bytes())
        .write(network.topology().token().as_bytes());
    for p in network.positions() {
        h.write(&p.x.to_bits().to_le_bytes());
        h.write(&p.y.to_bits().to_le_bytes());
    }
    h.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use dcc_dvhop::net::generate_topology;

    #[test]
    fn fnv_matches_reference_vectors() {
        // Published FNV-1a test vectors.
        assert_eq!(Fnv1a::new().finish(), 0xcbf29ce484222325);
        assert_eq!(Fnv1a::new().write(b"a").finish(), 0xaf63dc4c8601ec8c);
        assert_eq!(Fnv1a::new().write(b"foobar").finish(), 0x85944171f73967e8);
    }

    #[test]
    fn run_seed_is_stable_and_kind_free() {
        // Frozen values: changing them silently would re-randomize every
        // recorded sweep.
        let s = run_seed(42, Topology::Random, 20, 25.0, 0);
        assert_eq!(s, run_seed(42, Topology::Random, 20, 25.0, 0));
        assert_eq!(s, 0x92ff_fdb1_866a_0601, "seed derivation changed");
        assert_ne!(s, run_seed(42, Topology::Random, 20, 25.0, 1));
        assert_ne!(s, run_seed(42, Topology::Random, 20, 30.0, 0));
        assert_ne!(s, run_seed(42, Topology::CShaped, 20, 25.0, 0));
        assert_ne!(s, run_seed(43, Topology::Random, 20, 25.0, 0));
    }

    #[test]
    fn network_hash_tracks_layout() {
        let a = generate_topology(Topology::Random, 20, 4, 30.0, 7).unwrap();
        let b = generate_topology(Topology::Random, 20, 4, 30.0, 7).unwrap();
        let c = generate_topology(Topology::Random, 20, 4, 30.0, 8).unwrap();
        assert_eq!(network_hash(&a), network_hash(&b));
        assert_ne!(network_hash(&a), network_hash(&c));
    }
}
