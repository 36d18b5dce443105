//! Single-photon Monte Carlo: each photon ends at the dark port, in the
//! object, or at the bright port with the probabilities of [`measure`].
//!
//! Generator: ChaCha8 seeded with `seed_from_u64(seed)`. Shard `k` of a
//! sharded run uses ChaCha stream `k`, so a single shard reproduces the
//! serial run exactly. Shard `k` draws `n / shards` photons, plus one more
//! when `k < n % shards`; tallies are summed in shard order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interferometer::{measure, EvConfig, ObjectSample, ProbabilityTriple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeTally {
    pub n_ifm: u64,
    pub n_abs: u64,
    pub n_noresult: u64,
    pub n_total: u64,
    pub seed: u64,
}

impl OutcomeTally {
    /// Observed frequencies (ifm, abs, noresult).
    pub fn frequencies(&self) -> [f64; 3] {
        let n = self.n_total as f64;
        [
            self.n_ifm as f64 / n,
            self.n_abs as f64 / n,
            self.n_noresult as f64 / n,
        ]
    }
}

/// Draw `n` photons through the interferometer.
pub fn monte_carlo(config: &EvConfig, sample: &ObjectSample, n: u64, seed: u64) -> Result<OutcomeTally> {
    monte_carlo_sharded(config, sample, n, seed, 1)
}

pub fn monte_carlo_sharded(
    config: &EvConfig,
    sample: &ObjectSample,
    n: u64,
    seed: u64,
    shards: u64,
) -> Result<OutcomeTally> {
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            domain: "n >= 1",
        });
    }
    if shards == 0 {
        return Err(Error::Domain {
            name: "shards",
            value: 0.0,
            domain: "shards >= 1",
        });
    }
    config.validate()?;
    let probs = measure(config, sample);

    let counts: Vec<[u64; 3]> = (0..shards)
        .into_par_iter()
        .map(|k| {
            let quota = n / shards + u64::from(k < n % shards);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            draw(&mut rng, &probs, quota)
        })
        .collect();

    let mut total = [0u64; 3];
    for c in counts {
        for (t, v) in total.iter_mut().zip(c) {
            *t += v;
        }
    }
    Ok(OutcomeTally {
        n_ifm: total[0],
        n_abs: total[1],
        n_noresult: total[2],
        n_total: n,
        seed,
    })
}

// Inverse CDF over (ifm, abs, noresult).
fn draw<R: Rng>(rng: &mut R, p: &ProbabilityTriple, n: u64) -> [u64; 3] {
    let c1 = p.p_ifm;
    let c2 = p.p_ifm + p.p_abs;
    let mut out = [0u64; 3];
    for _ in 0..n {
        let u: f64 = rng.random();
        let idx = if u < c1 {
            0
        } else if u < c2 {
            1
        } else {
            2
        };
        out[idx] += 1;
    }
    out
}
