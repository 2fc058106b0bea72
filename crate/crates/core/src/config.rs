//! Experiment configuration files.
//!
//! The format is `key = value` lines with optional `[section]` headers and `#`
//! comments. Every key belongs to one section and may appear either under that
//! section or before the first header. Unknown keys, repeated keys and keys
//! under the wrong section are rejected with the offending line number.
//!
//! | section      | key          | default                          |
//! |--------------|--------------|----------------------------------|
//! | `[model]`    | `preset`     | none (`ed`, `sd`, `ed-supplement`) |
//! |              | `j1`, `j1p`, `j2`, `bz` | all four required without a preset |
//! |              | `n_sites`    | required, odd                    |
//! | `[schedule]` | `t_total`    | 3.0                              |
//! |              | `dt`         | 0.25, must divide `t_total`      |
//! | `[run]`      | `mode`       | `trotter` (`exact`, `recompiled`) |
//! |              | `s`          | 1.0, interpolation point for `exact` |
//! | `[ansatz]`   | `m_rounds`   | 5                                |
//! |              | `ansatz`     | `full` (`number-conserving`)     |
//! |              | `max_iters`  | 500                              |
//! |              | `tolerance`  | 1e-4                             |
//! |              | `n_restarts` | 3                                |
//! | `[sampling]` | `shots`      | 8192                             |
//! |              | `seed`       | 0                                |
//! |              | `n_seeds`    | 10                               |
//! |              | `seeds`      | `seed, seed+1, ..` (comma list, excludes `seed`/`n_seeds`) |
//! | `[noise]`    | `theta`, `zeta`, `chi`, `gamma`, `phi` | ideal gate; any key enables noise |
//! |              | `mitigation` | `none` (`cphase`, `zsplit`)      |
//! |              | `phi_est`    | the `phi` value                  |

use std::path::Path;
use std::str::FromStr;

use crate::circuits::{NoiseParams, Schedule};
use crate::error::{Result, SimError};
use crate::model::{CouplingParams, PhasePreset, PresetName};
use crate::noise::Mitigation;
use crate::recompile::{AnsatzMode, AnsatzSpec, OptimizeOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    Exact,
    Trotter,
    Recompiled,
}

impl FromStr for RunMode {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(RunMode::Exact),
            "trotter" => Ok(RunMode::Trotter),
            "recompiled" => Ok(RunMode::Recompiled),
            other => Err(SimError::Config(format!(
                "unknown mode {other:?} (exact, trotter, recompiled)"
            ))),
        }
    }
}

impl RunMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RunMode::Exact => "exact",
            RunMode::Trotter => "trotter",
            RunMode::Recompiled => "recompiled",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Option<PresetName>,
    pub params: CouplingParams,
    pub n_sites: usize,
    pub t_total: f64,
    pub dt: f64,
    pub mode: RunMode,
    pub s: f64,
    pub m_rounds: usize,
    pub ansatz_mode: AnsatzMode,
    pub max_iters: usize,
    pub tolerance: f64,
    pub n_restarts: usize,
    pub shots: usize,
    pub seeds: Vec<u64>,
    pub noise: Option<NoiseParams>,
    pub mitigation: Mitigation,
    pub phi_est: f64,
}

const KEYS: &[(&str, &str)] = &[
    ("preset", "model"),
    ("j1", "model"),
    ("j1p", "model"),
    ("j2", "model"),
    ("bz", "model"),
    ("n_sites", "model"),
    ("t_total", "schedule"),
    ("dt", "schedule"),
    ("mode", "run"),
    ("s", "run"),
    ("m_rounds", "ansatz"),
    ("ansatz", "ansatz"),
    ("max_iters", "ansatz"),
    ("tolerance", "ansatz"),
    ("n_restarts", "ansatz"),
    ("shots", "sampling"),
    ("seed", "sampling"),
    ("n_seeds", "sampling"),
    ("seeds", "sampling"),
    ("theta", "noise"),
    ("zeta", "noise"),
    ("chi", "noise"),
    ("gamma", "noise"),
    ("phi", "noise"),
    ("mitigation", "noise"),
    ("phi_est", "noise"),
];

struct Entry {
    line: usize,
    value: String,
}

struct Raw {
    entries: Vec<(&'static str, Entry)>,
    last_line: usize,
}

impl Raw {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|(k, _)| *k == key).map(|(_, e)| e)
    }

    fn has(&self, key: &str) -> bool {
        self.get(key).is_some()
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<T>()
                .map(Some)
                .map_err(|err| SimError::Parse {
                    line: e.line,
                    msg: format!("invalid value {:?} for {key}: {err}", e.value),
                }),
        }
    }

    fn line_of(&self, key: &str) -> usize {
        self.get(key).map_or(self.last_line, |e| e.line)
    }

    fn fail(&self, key: &str, msg: impl Into<String>) -> SimError {
        SimError::Parse {
            line: self.line_of(key),
            msg: msg.into(),
        }
    }
}

fn lex(text: &str) -> Result<Raw> {
    let mut section: Option<String> = None;
    let mut entries: Vec<(&'static str, Entry)> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| SimError::Parse {
                    line,
                    msg: format!("malformed section header {body:?}"),
                })?
                .trim();
            if !KEYS.iter().any(|(_, s)| *s == name) {
                return Err(SimError::Parse {
                    line,
                    msg: format!("unknown section [{name}]"),
                });
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| SimError::Parse {
            line,
            msg: format!("expected key = value, got {body:?}"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let &(key, home) = KEYS
            .iter()
            .find(|(k, _)| *k == key)
            .ok_or_else(|| SimError::Parse {
                line,
                msg: format!("unknown key {key:?}"),
            })?;
        if let Some(s) = &section {
            if s != home {
                return Err(SimError::Parse {
                    line,
                    msg: format!("key {key} belongs in [{home}], not [{s}]"),
                });
            }
        }
        if value.is_empty() {
            return Err(SimError::Parse {
                line,
                msg: format!("empty value for {key}"),
            });
        }
        if let Some((_, prev)) = entries.iter().find(|(k, _)| *k == key) {
            return Err(SimError::Parse {
                line,
                msg: format!("{key} already set on line {}", prev.line),
            });
        }
        entries.push((
            key,
            Entry {
                line,
                value: value.to_string(),
            },
        ));
    }
    Ok(Raw { entries, last_line })
}

impl ExperimentConfig {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| SimError::Io(format!("{}: {e}", path.as_ref().display())))?;
        text.parse()
    }

    pub fn preset(name: PresetName, n_sites: usize) -> Result<Self> {
        format!("preset = {}\nn_sites = {n_sites}\n", name.as_str()).parse()
    }

    pub fn schedule(&self) -> Result<Schedule> {
        Schedule::new(self.t_total, self.dt)
    }

    pub fn ansatz(&self) -> Result<AnsatzSpec> {
        AnsatzSpec::with_mode(self.n_sites, self.m_rounds, self.ansatz_mode)
    }

    pub fn optimize_options(&self) -> OptimizeOptions {
        OptimizeOptions {
            max_iters: self.max_iters,
            tolerance: self.tolerance,
            n_restarts: self.n_restarts,
            seed: self.seeds[0],
            ..OptimizeOptions::default()
        }
    }

    /// Noise parameters in effect, the ideal gate when none were configured.
    pub fn noise_or_ideal(&self) -> NoiseParams {
        self.noise.unwrap_or(NoiseParams::IDEAL)
    }

    /// Replace the seed list by `n` consecutive seeds starting at `base`, keeping its length.
    pub fn reseed(&mut self, base: u64) {
        let n = self.seeds.len() as u64;
        self.seeds = (0..n).map(|k| base.wrapping_add(k)).collect();
    }
}

impl FromStr for ExperimentConfig {
    type Err = SimError;

    fn from_str(text: &str) -> Result<Self> {
        let raw = lex(text)?;
        let couplings = ["j1", "j1p", "j2", "bz"];
        let preset: Option<PresetName> = raw.parse("preset")?;
        let (params, t_default, dt_default) = match preset {
            Some(name) => {
                if let Some(k) = couplings.iter().find(|k| raw.has(k)) {
                    return Err(raw.fail(k, format!("{k} cannot be combined with preset")));
                }
                let p = PhasePreset::get(name);
                (p.params, p.t_total, p.dt)
            }
            None => {
                let mut v = [0.0; 4];
                for (slot, k) in v.iter_mut().zip(couplings) {
                    *slot = raw.parse::<f64>(k)?.ok_or_else(|| {
                        raw.fail(
                            k,
                            format!("missing {k}: give a preset or all of j1, j1p, j2, bz"),
                        )
                    })?;
                }
                (
                    CouplingParams {
                        j1: v[0],
                        j1p: v[1],
                        j2: v[2],
                        bz: v[3],
                    },
                    3.0,
                    0.25,
                )
            }
        };
        params
            .validate()
            .map_err(|e| raw.fail("j1", e.to_string()))?;

        let n_sites: usize = raw
            .parse("n_sites")?
            .ok_or_else(|| raw.fail("n_sites", "missing n_sites"))?;
        if n_sites % 2 == 0 || n_sites < 3 {
            return Err(raw.fail(
                "n_sites",
                format!("n_sites must be odd and at least 3, got {n_sites}"),
            ));
        }
        if n_sites > crate::statevector::MAX_SITES {
            return Err(raw.fail(
                "n_sites",
                format!("n_sites above {}", crate::statevector::MAX_SITES),
            ));
        }
        let t_total = raw.parse("t_total")?.unwrap_or(t_default);
        let dt = raw.parse("dt")?.unwrap_or(dt_default);
        Schedule::new(t_total, dt)
            .map_err(|e| raw.fail(if raw.has("dt") { "dt" } else { "t_total" }, e.to_string()))?;

        let mode = raw.parse("mode")?.unwrap_or(RunMode::Trotter);
        let s: f64 = raw.parse("s")?.unwrap_or(1.0);
        if !(0.0..=1.0).contains(&s) {
            return Err(raw.fail("s", format!("s must lie in [0, 1], got {s}")));
        }

        let m_rounds: usize = raw.parse("m_rounds")?.unwrap_or(5);
        if m_rounds == 0 {
            return Err(raw.fail("m_rounds", "m_rounds must be at least 1"));
        }
        let ansatz_mode = raw.parse("ansatz")?.unwrap_or_default();
        let defaults = OptimizeOptions::default();
        let max_iters: usize = raw.parse("max_iters")?.unwrap_or(defaults.max_iters);
        let tolerance: f64 = raw.parse("tolerance")?.unwrap_or(defaults.tolerance);
        let n_restarts: usize = raw.parse("n_restarts")?.unwrap_or(defaults.n_restarts);
        if max_iters == 0 {
            return Err(raw.fail("max_iters", "max_iters must be at least 1"));
        }
        if n_restarts == 0 {
            return Err(raw.fail("n_restarts", "n_restarts must be at least 1"));
        }
        if !(tolerance >= 0.0) {
            return Err(raw.fail("tolerance", "tolerance must be non-negative"));
        }

        let shots: usize = raw.parse("shots")?.unwrap_or(8192);
        if shots == 0 {
            return Err(raw.fail("shots", "shots must be at least 1"));
        }
        let seeds = match raw.get("seeds") {
            Some(e) => {
                for k in ["seed", "n_seeds"] {
                    if raw.has(k) {
                        return Err(raw.fail(k, format!("{k} cannot be combined with seeds")));
                    }
                }
                e.value
                    .split(',')
                    .map(|v| {
                        v.trim().parse::<u64>().map_err(|err| SimError::Parse {
                            line: e.line,
                            msg: format!("invalid seed {v:?}: {err}"),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            None => {
                let base: u64 = raw.parse("seed")?.unwrap_or(0);
                let n: u64 = raw.parse("n_seeds")?.unwrap_or(10);
                if n == 0 {
                    return Err(raw.fail("n_seeds", "n_seeds must be at least 1"));
                }
                (0..n).map(|k| base.wrapping_add(k)).collect()
            }
        };

        let noise_keys = ["theta", "zeta", "chi", "gamma", "phi"];
        let noise = if noise_keys.iter().any(|k| raw.has(k)) {
            let mut v = NoiseParams::IDEAL.as_array();
            for (slot, k) in v.iter_mut().zip(noise_keys) {
                if let Some(x) = raw.parse::<f64>(k)? {
                    if !x.is_finite() {
                        return Err(raw.fail(k, format!("{k} must be finite")));
                    }
                    *slot = x;
                }
            }
            Some(NoiseParams::from_array(v))
        } else {
            None
        };
        let mitigation = raw.parse("mitigation")?.unwrap_or(Mitigation::None);
        let phi_est = raw
            .parse("phi_est")?
            .unwrap_or(noise.map_or(0.0, |n| n.phi));

        Ok(Self {
            preset,
            params,
            n_sites,
            t_total,
            dt,
            mode,
            s,
            m_rounds,
            ansatz_mode,
            max_iters,
            tolerance,
            n_restarts,
            shots,
            seeds,
            noise,
            mitigation,
            phi_est,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(err: SimError) -> usize {
        match err {
            SimError::Parse { line, .. } => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_defaults() {
        let c: ExperimentConfig = "preset = ed\nn_sites = 11\n".parse().unwrap();
        assert_eq!(c.params, PhasePreset::ed().params);
        assert_eq!((c.t_total, c.dt, c.m_rounds, c.shots), (3.0, 0.25, 5, 8192));
        assert_eq!(c.seeds, (0..10).collect::<Vec<u64>>());
        assert_eq!(c.mode, RunMode::Trotter);
        assert_eq!(c.noise, None);
        assert_eq!(c.mitigation, Mitigation::None);
    }

    #[test]
    fn sections_and_comments() {
        let text = "# run\n[model]\npreset = sd  # phase\nn_sites = 7\n[sampling]\nseeds = 4, 9\n[noise]\nphi = 0.1\n";
        let c: ExperimentConfig = text.parse().unwrap();
        assert_eq!(c.seeds, vec![4, 9]);
        assert_eq!(c.noise.unwrap().phi, 0.1);
        assert_eq!(c.noise.unwrap().theta, NoiseParams::IDEAL.theta);
        assert_eq!(c.phi_est, 0.1);
    }

    #[test]
    fn rejects_even_sites() {
        let e = "preset = ed\nn_sites = 8\n"
            .parse::<ExperimentConfig>()
            .unwrap_err();
        assert!(e.to_string().contains("odd"));
        assert_eq!(line_of(e), 2);
    }

    #[test]
    fn rejects_non_divisor_dt() {
        let e = "preset = ed\nn_sites = 7\nt_total = 3.0\ndt = 0.4\n"
            .parse::<ExperimentConfig>()
            .unwrap_err();
        assert_eq!(line_of(e), 4);
    }

    #[test]
    fn strictness() {
        assert_eq!(
            line_of(
                "preset = ed\nn_sites = 7\nfoo = 1\n"
                    .parse::<ExperimentConfig>()
                    .unwrap_err()
            ),
            3
        );
        assert_eq!(
            line_of(
                "[noise]\nn_sites = 7\n"
                    .parse::<ExperimentConfig>()
                    .unwrap_err()
            ),
            2
        );
        assert_eq!(
            line_of(
                "n_sites = 7\nn_sites = 9\n"
                    .parse::<ExperimentConfig>()
                    .unwrap_err()
            ),
            2
        );
        assert_eq!(
            line_of(
                "preset = ed\nj1 = 1\nn_sites = 7\n"
                    .parse::<ExperimentConfig>()
                    .unwrap_err()
            ),
            2
        );
        assert_eq!(
            line_of(
                "j1 = 1\nj1p = 1\nn_sites = 7\n"
                    .parse::<ExperimentConfig>()
                    .unwrap_err()
            ),
            3
        );
        assert_eq!(
            line_of("[bogus]\n".parse::<ExperimentConfig>().unwrap_err()),
            1
        );
        assert_eq!(
            line_of(
                "preset = xx\nn_sites = 7\n"
                    .parse::<ExperimentConfig>()
                    .unwrap_err()
            ),
            1
        );
        assert!("preset = ed\nn_sites = 7\nshots = 0\n"
            .parse::<ExperimentConfig>()
            .is_err());
    }

    #[test]
    fn explicit_couplings() {
        let c: ExperimentConfig =
            "j1 = 0\nj1p = 0\nj2 = 0\nbz = 2.5\nn_sites = 7\nmode = exact\ns = 0\n"
                .parse()
                .unwrap();
        assert_eq!(c.preset, None);
        assert_eq!(c.params.bz, 2.5);
        assert_eq!((c.mode, c.s), (RunMode::Exact, 0.0));
    }

    #[test]
    fn reseed_keeps_count() {
        let mut c = ExperimentConfig::preset(PresetName::Ed, 7).unwrap();
        c.reseed(100);
        assert_eq!(c.seeds, (100..110).collect::<Vec<u64>>());
    }
}
