//! Shot sets, post-selection, string order and occupancy estimators.

use crate::error::{Result, SimError};
use crate::statevector::{Bitstring, State};

#[derive(Clone, Debug, PartialEq)]
pub struct ShotSet {
    n_sites: usize,
    shots: Vec<Bitstring>,
    seed: u64,
    /// Total-Z value every shot was filtered to, if post-selected.
    target_sz: Option<i32>,
    /// Shot count before any post-selection.
    raw_count: usize,
}

impl ShotSet {
    pub fn new(n_sites: usize, shots: Vec<Bitstring>, seed: u64) -> Self {
        let raw_count = shots.len();
        Self {
            n_sites,
            shots,
            seed,
            target_sz: None,
            raw_count,
        }
    }

    /// Check every bitstring length before wrapping.
    pub fn try_new(n_sites: usize, shots: Vec<Bitstring>, seed: u64) -> Result<Self> {
        if let Some(b) = shots.iter().find(|b| b.len() != n_sites) {
            return Err(SimError::Config(format!(
                "bitstring {b} has {} sites, expected {n_sites}",
                b.len()
            )));
        }
        Ok(Self::new(n_sites, shots, seed))
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn shots(&self) -> &[Bitstring] {
        &self.shots
    }

    pub fn len(&self) -> usize {
        self.shots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shots.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn post_selected(&self) -> bool {
        self.target_sz.is_some()
    }

    pub fn target_sz(&self) -> Option<i32> {
        self.target_sz
    }

    pub fn raw_count(&self) -> usize {
        self.raw_count
    }

    /// Fraction of the raw shots that survived post-selection.
    pub fn retention(&self) -> f64 {
        if self.raw_count == 0 {
            0.0
        } else {
            self.shots.len() as f64 / self.raw_count as f64
        }
    }

    /// Shot dump: header line, then one bitstring per line with site 0 first.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# sites={} seed={} postselected={}\n",
            self.n_sites,
            self.seed,
            self.post_selected()
        );
        for b in &self.shots {
            out.push_str(&b.to_string());
            out.push('\n');
        }
        out
    }

    /// Inverse of [`ShotSet::to_text`]. A post-selected dump is tagged with the
    /// total Z of its first shot.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(SimError::Parse {
            line: 1,
            msg: "empty shot dump".into(),
        })?;
        let header = header.strip_prefix('#').ok_or(SimError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let (mut n_sites, mut seed, mut post) = (None, None, None);
        for field in header.split_whitespace() {
            let perr = |msg: String| SimError::Parse { line: 1, msg };
            match field.split_once('=') {
                Some(("sites", v)) => {
                    n_sites = Some(v.parse::<usize>().map_err(|e| perr(e.to_string()))?)
                }
                Some(("seed", v)) => {
                    seed = Some(v.parse::<u64>().map_err(|e| perr(e.to_string()))?)
                }
                Some(("postselected", v)) => {
                    post = Some(v.parse::<bool>().map_err(|e| perr(e.to_string()))?)
                }
                _ => return Err(perr(format!("unknown header field {field:?}"))),
            }
        }
        let (Some(n_sites), Some(seed), Some(post)) = (n_sites, seed, post) else {
            return Err(SimError::Parse {
                line: 1,
                msg: "header needs sites, seed and postselected".into(),
            });
        };
        let mut shots = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let b: Bitstring = line.parse().map_err(|e: SimError| SimError::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
            if b.len() != n_sites {
                return Err(SimError::Parse {
                    line: i + 1,
                    msg: format!("expected {n_sites} bits"),
                });
            }
            shots.push(b);
        }
        let mut set = Self::new(n_sites, shots, seed);
        if post {
            let sz = set.shots.first().map(|b| b.total_z()).unwrap_or(0);
            if set.shots.iter().any(|b| b.total_z() != sz) {
                return Err(SimError::Parse {
                    line: 1,
                    msg: "post-selected dump mixes sectors".into(),
                });
            }
            set.target_sz = Some(sz);
        }
        Ok(set)
    }
}

/// Keep only bitstrings whose total Z equals `target_sz`. An empty result is
/// returned as an empty set; estimators then report [`SimError::EmptyShots`].
pub fn post_select(shots: &ShotSet, target_sz: i32) -> ShotSet {
    let kept = shots
        .shots
        .iter()
        .filter(|b| b.total_z() == target_sz)
        .cloned()
        .collect();
    ShotSet {
        n_sites: shots.n_sites,
        shots: kept,
        seed: shots.seed,
        target_sz: Some(target_sz),
        raw_count: shots.raw_count,
    }
}

/// Endpoints of a finite-chain string correlator
/// `-(z_n + z_{n+1}) * P * (z_a + z_{a+1})` with `P = (-1)^(ones in [n+2, a-1])`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StringOrderSpec {
    pub n: usize,
    /// First site `a` of the right pair `(a, a+1)`.
    pub right: usize,
    pub n_sites: usize,
}

impl StringOrderSpec {
    /// Right pair placed as far right as possible while starting on the same
    /// sublattice as `n`, so both pairs cover the same kind of bond.
    pub fn new(n: usize, n_sites: usize) -> Result<Self> {
        if n_sites < n + 2 {
            return Err(SimError::Config(format!(
                "chain of {n_sites} sites too short for n={n}"
            )));
        }
        let right = n + 2 * ((n_sites - 2 - n) / 2);
        Self::with_right_pair(n, right, n_sites)
    }

    /// Explicit right-pair start.
    pub fn with_right_pair(n: usize, right: usize, n_sites: usize) -> Result<Self> {
        if right + 1 >= n_sites {
            return Err(SimError::Config(format!(
                "right pair ({right}, {}) outside chain",
                right + 1
            )));
        }
        if right < n + 3 {
            return Err(SimError::Config(format!(
                "string between pair ({n}, {}) and ({right}, {}) is empty",
                n + 1,
                right + 1
            )));
        }
        Ok(Self { n, right, n_sites })
    }

    pub fn left_pair(&self) -> (usize, usize) {
        (self.n, self.n + 1)
    }

    pub fn right_pair(&self) -> (usize, usize) {
        (self.right, self.right + 1)
    }

    /// Inclusive string interior.
    pub fn string_range(&self) -> (usize, usize) {
        (self.n + 2, self.right - 1)
    }

    /// Per-basis-state value `v` (the correlator before the overall minus sign).
    pub fn value_bits(&self, b: &Bitstring) -> f64 {
        let left = b.z(self.n) + b.z(self.n + 1);
        let right = b.z(self.right) + b.z(self.right + 1);
        let ones: u32 = (self.n + 2..self.right).map(|k| b.bit(k) as u32).sum();
        let p = if ones % 2 == 0 { 1 } else { -1 };
        (left * p * right) as f64
    }

    /// Same as [`StringOrderSpec::value_bits`] on a raw basis index.
    pub fn value_index(&self, i: usize) -> f64 {
        let z = |k: usize| 1 - 2 * ((i >> k) & 1) as i32;
        let left = z(self.n) + z(self.n + 1);
        let right = z(self.right) + z(self.right + 1);
        let width = self.right - self.n - 2;
        let mask = ((1usize << width) - 1) << (self.n + 2);
        let p = if (i & mask).count_ones() % 2 == 0 {
            1
        } else {
            -1
        };
        (left * p * right) as f64
    }

    fn check_sites(&self, n_sites: usize) -> Result<()> {
        if n_sites != self.n_sites {
            return Err(SimError::Dimension {
                expected: self.n_sites,
                got: n_sites,
            });
        }
        Ok(())
    }
}

/// Signed shot estimate; callers usually report the absolute value.
pub fn string_order_shots(shots: &ShotSet, spec: &StringOrderSpec) -> Result<f64> {
    spec.check_sites(shots.n_sites)?;
    if shots.is_empty() {
        return Err(SimError::EmptyShots(
            "string order needs at least one shot".into(),
        ));
    }
    let sum: f64 = shots.shots.iter().map(|b| spec.value_bits(b)).sum();
    Ok(-sum / shots.len() as f64)
}

/// Signed exact expectation over `|amplitude|^2`.
pub fn string_order_exact(state: &State, spec: &StringOrderSpec) -> Result<f64> {
    spec.check_sites(state.n_sites())?;
    let sum: f64 = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|(i, a)| a.norm_sqr() * spec.value_index(i))
        .sum();
    Ok(-sum)
}

/// Probability that `site` holds a 1.
pub fn occupancy_exact(state: &State, site: usize) -> Result<f64> {
    Ok((1.0 - state.expectation_z(site)?) / 2.0)
}

/// Fraction of shots with a 1 at `site`.
pub fn occupancy_shots(shots: &ShotSet, site: usize) -> Result<f64> {
    if site >= shots.n_sites {
        return Err(SimError::Config(format!("site {site} out of range")));
    }
    if shots.is_empty() {
        return Err(SimError::EmptyShots(
            "occupancy needs at least one shot".into(),
        ));
    }
    let ones = shots.shots.iter().filter(|b| b.bit(site) == 1).count();
    Ok(ones as f64 / shots.len() as f64)
}

pub fn occupancy_profile(state: &State) -> Vec<f64> {
    (0..state.n_sites())
        .map(|j| occupancy_exact(state, j).expect("site in range"))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aggregate {
    pub mean: f64,
    /// Sample standard deviation; `None` with fewer than two runs.
    pub stddev: Option<f64>,
}

pub fn aggregate(runs: &[f64]) -> Result<Aggregate> {
    if runs.is_empty() {
        return Err(SimError::EmptyShots("nothing to aggregate".into()));
    }
    let n = runs.len() as f64;
    let mean = runs.iter().sum::<f64>() / n;
    let stddev = (runs.len() >= 2)
        .then(|| (runs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
    Ok(Aggregate { mean, stddev })
}
