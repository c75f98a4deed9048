//! Noise arrays with mean 0 and variance 1 entries.
//!
//! Stream derivation: the generator for `(master, stream)` is
//! `ChaCha8Rng::seed_from_u64(master)` positioned on ChaCha stream `stream`.
//! Streams are independent keystreams under one key, so replicate `r` of an
//! ensemble reads stream `r` and never depends on any other replicate.
//! Entries are drawn in row-major order.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use super::dense::DenseMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    Gaussian,
    Rademacher,
    /// Uniform on `[-√3, √3]`.
    Uniform,
}

impl Distribution {
    pub const ALL: [Distribution; 3] = [Self::Gaussian, Self::Rademacher, Self::Uniform];

    pub fn name(self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Rademacher => "rademacher",
            Self::Uniform => "uniform",
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Distribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownDistribution(s.to_string()))
    }
}

pub fn stream_rng(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// `p × n` array of iid entries drawn from stream `stream` of seed `master`.
pub fn sample_noise(p: usize, n: usize, distribution: Distribution, master: u64, stream: u64) -> Result<DenseMatrix> {
    if p == 0 || n == 0 {
        return Err(Error::InvalidConfig(format!("noise shape {p}x{n} must be nonempty")));
    }
    let mut rng = stream_rng(master, stream);
    let len = p * n;
    let data: Vec<f64> = match distribution {
        Distribution::Gaussian => (0..len).map(|_| rng.sample(StandardNormal)).collect(),
        Distribution::Rademacher => (0..len)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect(),
        Distribution::Uniform => {
            let half = 3f64.sqrt();
            let u = Uniform::new_inclusive(-half, half)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            (0..len).map(|_| u.sample(&mut rng)).collect()
        }
    };
    DenseMatrix::from_vec(p, n, data)
}
