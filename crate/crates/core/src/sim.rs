//! Seeded Monte-Carlo runs of the protocol, with or without a cloning attack.
//!
//! Every round draws Alice's and Bob's optimal-basis choices from the
//! configured weights and then samples the outcome exactly, by inverse
//! transform, from precomputed outcome tables. Only rounds on a conjugate
//! pair enter the sifted key.
//!
//! Rounds are grouped in blocks of [`BLOCK_ROUNDS`]; block `b` draws from
//! ChaCha8 seeded with the run seed on stream `b`. Shards own contiguous
//! runs of blocks and their results are merged in block order, so a report
//! does not depend on how many shards produced it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cerf::{
    is_conjugate_pair, joint_distribution, params_to_matrix, sifted_outcome_law, AmplitudeMatrix, CloneParams,
};
use crate::error::{Error, Result};
use crate::qudit::Dim;
use crate::secinfo::plugin_mutual_information;

pub const BLOCK_ROUNDS: u64 = 4096;
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), stream = block index";
const WEIGHT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub n: Dim,
    pub rounds: u64,
    pub basis_weights: [f64; 4],
    pub attack: Option<CloneParams>,
    pub seed: u64,
}

impl ProtocolConfig {
    pub fn new(n: Dim, rounds: u64, attack: Option<CloneParams>, seed: u64) -> Self {
        ProtocolConfig { n, rounds, basis_weights: [0.25; 4], attack, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::InvalidConfig("rounds must be at least 1".into()));
        }
        if self.basis_weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidConfig(format!(
                "basis weights must be nonnegative: {:?}",
                self.basis_weights
            )));
        }
        let total: f64 = self.basis_weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidConfig(format!("basis weights sum to {total}, expected 1")));
        }
        if let Some(p) = &self.attack {
            if p.dim != self.n {
                return Err(Error::InvalidConfig(format!(
                    "attack dimension {} differs from n = {}",
                    p.dim, self.n
                )));
            }
            CloneParams::new(p.dim, p.v, p.x, p.y)?;
        }
        Ok(())
    }
}

/// The (Alice, Bob) basis pairs whose outcomes are perfectly correlated.
pub fn conjugate_pairs() -> [(usize, usize); 4] {
    [(0, 0), (1, 3), (2, 2), (3, 1)]
}

/// What Eve holds for a sifted round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EveRecord {
    /// Bob's error shift, read off from her two outcomes.
    pub branch: usize,
    /// Her clone symbol: the most likely value of Alice's symbol.
    pub guess: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiftedSymbol {
    pub alice: usize,
    pub bob: usize,
    pub eve: Option<EveRecord>,
}

/// Outcome counts for one (Alice basis, Bob basis) pair, row-major
/// over (Alice symbol, Bob symbol).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairTable {
    pub alice_basis: usize,
    pub bob_basis: usize,
    pub counts: Vec<u64>,
}

impl PairTable {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub n: Dim,
    pub rounds: u64,
    pub seed: u64,
    pub rng: String,
    pub sifted_rounds: u64,
    pub sifted_fraction: f64,
    /// Mismatch rate among sifted rounds; 0 when nothing was sifted.
    pub qber: f64,
    pub qber_stderr: f64,
    /// Plug-in I_AB of the sifted table, absent when nothing was sifted.
    pub empirical_i_ab: Option<f64>,
    pub per_pair_tables: Vec<PairTable>,
    pub key_symbols: Vec<SiftedSymbol>,
}

impl SimReport {
    /// Sum of the four conjugate-pair tables.
    pub fn sifted_table(&self) -> Vec<u64> {
        let n = self.n.get();
        let mut out = vec![0u64; n * n];
        for t in self.per_pair_tables.iter().filter(|t| is_conjugate_pair(t.alice_basis, t.bob_basis)) {
            for (o, c) in out.iter_mut().zip(&t.counts) {
                *o += c;
            }
        }
        out
    }

    pub fn table(&self, alice_basis: usize, bob_basis: usize) -> Option<&PairTable> {
        self.per_pair_tables.iter().find(|t| t.alice_basis == alice_basis && t.bob_basis == bob_basis)
    }
}

/// Plug-in mutual information of the sifted Alice/Bob table.
pub fn empirical_info(report: &SimReport) -> Result<f64> {
    let n = report.n.get();
    let table: Vec<f64> = report.sifted_table().iter().map(|&c| c as f64).collect();
    plugin_mutual_information(&table, n, n).ok_or(Error::EmptySift)
}

/// Cumulative sums with the last entry pinned to 1.
fn cumulative(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = p
        .iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect();
    // zero-probability tail entries stay unreachable
    if let Some(top) = p.iter().rposition(|&v| v > 0.0) {
        for v in &mut out[top..] {
            *v = 1.0;
        }
    }
    out
}

fn draw(cdf: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Precomputed sampling tables for one configuration.
struct Sampler {
    n: usize,
    attacked: bool,
    basis_cdf: Vec<f64>,
    sifted_cdf: Vec<f64>,
    pair_cdfs: Vec<Vec<f64>>,
}

impl Sampler {
    fn new(cfg: &ProtocolConfig) -> Result<Self> {
        let params = cfg.attack.unwrap_or_else(|| CloneParams::identity(cfg.n));
        let amps: AmplitudeMatrix = params_to_matrix(&params);
        let mut pair_cdfs = Vec::with_capacity(16);
        for alice in 0..4 {
            for bob in 0..4 {
                pair_cdfs.push(cumulative(&joint_distribution(&params, alice, bob)?.probs));
            }
        }
        Ok(Sampler {
            n: cfg.n.get(),
            attacked: cfg.attack.is_some(),
            basis_cdf: cumulative(&cfg.basis_weights),
            sifted_cdf: cumulative(&sifted_outcome_law(&amps)),
            pair_cdfs,
        })
    }
}

#[derive(Default)]
struct Partial {
    counts: Vec<Vec<u64>>,
    symbols: Vec<SiftedSymbol>,
}

impl Partial {
    fn new(n: usize) -> Self {
        Partial { counts: vec![vec![0; n * n]; 16], symbols: Vec::new() }
    }

    fn absorb(&mut self, other: Partial) {
        for (mine, theirs) in self.counts.iter_mut().zip(other.counts) {
            for (a, b) in mine.iter_mut().zip(theirs) {
                *a += b;
            }
        }
        self.symbols.extend(other.symbols);
    }
}

fn run_block(s: &Sampler, seed: u64, block: u64, rounds: u64) -> Partial {
    let n = s.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let mut out = Partial::new(n);
    for _ in 0..rounds {
        let alice_basis = draw(&s.basis_cdf, &mut rng);
        let bob_basis = draw(&s.basis_cdf, &mut rng);
        let pair = alice_basis * 4 + bob_basis;
        if is_conjugate_pair(alice_basis, bob_basis) {
            // index (k*N + m)*N + l: Alice k, Bob k+m, Eve (l, l+m)
            let idx = draw(&s.sifted_cdf, &mut rng);
            let l = idx % n;
            let m = (idx / n) % n;
            let k = idx / (n * n);
            let bob = (k + m) % n;
            out.counts[pair][k * n + bob] += 1;
            let eve = s.attacked.then_some(EveRecord { branch: m, guess: l });
            out.symbols.push(SiftedSymbol { alice: k, bob, eve });
        } else {
            let idx = draw(&s.pair_cdfs[pair], &mut rng);
            out.counts[pair][idx] += 1;
        }
    }
    out
}

pub fn run_simulation(cfg: &ProtocolConfig) -> Result<SimReport> {
    run_simulation_sharded(cfg, 1)
}

/// Runs the blocks on `shards` threads; the report is identical for every
/// shard count.
pub fn run_simulation_sharded(cfg: &ProtocolConfig, shards: usize) -> Result<SimReport> {
    cfg.validate()?;
    let sampler = Sampler::new(cfg)?;
    let n = cfg.n.get();
    let blocks = cfg.rounds.div_ceil(BLOCK_ROUNDS);
    let shards = shards.clamp(1, blocks.max(1) as usize) as u64;
    let per_shard = blocks.div_ceil(shards);
    let block_len = |b: u64| BLOCK_ROUNDS.min(cfg.rounds - b * BLOCK_ROUNDS);

    let parts: Vec<Partial> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..shards)
            .map(|s| {
                let sampler = &sampler;
                scope.spawn(move || {
                    let mut acc = Partial::new(n);
                    let start = s * per_shard;
                    let end = ((s + 1) * per_shard).min(blocks);
                    for b in start..end {
                        acc.absorb(run_block(sampler, cfg.seed, b, block_len(b)));
                    }
                    acc
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("simulation shard panicked")).collect()
    });

    let mut merged = Partial::new(n);
    for p in parts {
        merged.absorb(p);
    }

    let per_pair_tables: Vec<PairTable> = merged
        .counts
        .into_iter()
        .enumerate()
        .map(|(i, counts)| PairTable { alice_basis: i / 4, bob_basis: i % 4, counts })
        .collect();
    let sifted = merged.symbols.len() as u64;
    let errors = merged.symbols.iter().filter(|s| s.alice != s.bob).count() as u64;
    let (qber, qber_stderr) = if sifted > 0 {
        let q = errors as f64 / sifted as f64;
        (q, (q * (1.0 - q) / sifted as f64).sqrt())
    } else {
        (0.0, 0.0)
    };

    let mut report = SimReport {
        n: cfg.n,
        rounds: cfg.rounds,
        seed: cfg.seed,
        rng: RNG_ALGORITHM.to_string(),
        sifted_rounds: sifted,
        sifted_fraction: sifted as f64 / cfg.rounds as f64,
        qber,
        qber_stderr,
        empirical_i_ab: None,
        per_pair_tables,
        key_symbols: merged.symbols,
    };
    report.empirical_i_ab = empirical_info(&report).ok();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: usize) -> Dim {
        Dim::new(n).unwrap()
    }

    #[test]
    fn pairs_cover_conjugates() {
        let pairs = conjugate_pairs();
        assert!(pairs.contains(&(0, 0)));
        assert!(pairs.contains(&(1, 3)) && pairs.contains(&(3, 1)));
        let all = (0..4).flat_map(|a| (0..4).map(move |b| (a, b)));
        assert_eq!(all.filter(|&(a, b)| is_conjugate_pair(a, b)).count(), 4);
    }

    #[test]
    fn config_validation() {
        let mut cfg = ProtocolConfig::new(dim(3), 10, None, 1);
        assert!(cfg.validate().is_ok());
        cfg.rounds = 0;
        assert!(cfg.validate().is_err());
        cfg.rounds = 10;
        cfg.basis_weights = [0.5, 0.5, 0.5, 0.0];
        assert!(cfg.validate().is_err());
        cfg.basis_weights = [1.5, -0.5, 0.0, 0.0];
        assert!(cfg.validate().is_err());
        cfg.basis_weights = [0.25; 4];
        cfg.attack = Some(CloneParams::identity(dim(2)));
        assert!(cfg.validate().is_err());
        cfg.attack = Some(CloneParams { dim: dim(3), v: 0.9, x: 0.9, y: 0.0 });
        assert!(run_simulation(&cfg).is_err());
    }

    #[test]
    fn cumulative_pins_top() {
        let c = cumulative(&[0.2, 0.3, 0.5, 0.0]);
        assert_eq!(c, vec![0.2, 0.5, 1.0, 1.0]);
    }

    #[test]
    fn clean_channel_has_no_errors() {
        let r = run_simulation(&ProtocolConfig::new(dim(4), 20_000, None, 7)).unwrap();
        assert_eq!(r.qber, 0.0);
        assert!(r.key_symbols.iter().all(|s| s.alice == s.bob && s.eve.is_none()));
        let frac = r.sifted_fraction;
        assert!((frac - 0.25).abs() < 0.02, "{frac}");
    }

    #[test]
    fn only_conjugate_pairs_feed_the_key() {
        let r = run_simulation(&ProtocolConfig::new(dim(3), 10_000, None, 3)).unwrap();
        let conj: u64 = r
            .per_pair_tables
            .iter()
            .filter(|t| is_conjugate_pair(t.alice_basis, t.bob_basis))
            .map(PairTable::total)
            .sum();
        assert_eq!(conj, r.sifted_rounds);
        let all: u64 = r.per_pair_tables.iter().map(PairTable::total).sum();
        assert_eq!(all, r.rounds);
    }

    #[test]
    fn weights_steering_away_from_conjugates() {
        let mut cfg = ProtocolConfig::new(dim(3), 500, None, 3);
        cfg.basis_weights = [0.0, 1.0, 0.0, 0.0];
        let r = run_simulation(&cfg).unwrap();
        assert_eq!(r.sifted_rounds, 0);
        assert_eq!(r.empirical_i_ab, None);
        assert_eq!(empirical_info(&r), Err(Error::EmptySift));
    }

    #[test]
    fn partial_last_block() {
        let cfg = ProtocolConfig::new(dim(2), BLOCK_ROUNDS + 17, None, 11);
        let r = run_simulation_sharded(&cfg, 4).unwrap();
        let all: u64 = r.per_pair_tables.iter().map(PairTable::total).sum();
        assert_eq!(all, BLOCK_ROUNDS + 17);
    }
}
