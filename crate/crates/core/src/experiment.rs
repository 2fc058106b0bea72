//! Experiment drivers behind the command-line subcommands, and their CSV output.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::circuits::{asp_states, simulate, Circuit};
use crate::config::{ExperimentConfig, RunMode};
use crate::error::{Result, SimError};
use crate::model::{ground_state, hamiltonian_at, neel_sector};
use crate::noise::{noisy_native, sweep, Mitigation, NoisyAsp, SweepParam, SweepRow};
use crate::observables::{
    aggregate, occupancy_profile, post_select, string_order_exact, string_order_shots, ShotSet,
    StringOrderSpec,
};
use crate::recompile::{recompile_trajectory_with, StartStrategy, TrajectoryPoint};
use crate::statevector::State;

pub const CSV_VERSION: &str = "v1";

/// Default grid for noise sweeps, in radians.
pub const DEFAULT_SWEEP_VALUES: [f64; 4] = [0.0, 0.05, 0.1, 0.2];

fn csv_header(kind: &str) -> String {
    format!("# sptchain-csv {CSV_VERSION} {kind}\n")
}

/// Ground state of `H(cfg.s)` in the alternating-state sector: energy, both
/// string orders and the occupancy of every site.
pub fn run_exact(cfg: &ExperimentConfig) -> Result<Vec<(String, f64)>> {
    let h = hamiltonian_at(&cfg.params, cfg.n_sites, cfg.s)?;
    let (energy, state) = ground_state(&h, Some(neel_sector(cfg.n_sites)))?;
    let mut rows = vec![("energy".to_string(), energy)];
    for n in 0..2 {
        let spec = StringOrderSpec::new(n, cfg.n_sites)?;
        rows.push((
            format!("abs_Oz{n}"),
            string_order_exact(&state, &spec)?.abs(),
        ));
    }
    for (k, occ) in occupancy_profile(&state).into_iter().enumerate() {
        rows.push((format!("occupancy_{k}"), occ));
    }
    Ok(rows)
}

pub fn exact_csv(rows: &[(String, f64)]) -> String {
    let mut out = csv_header("exact");
    out.push_str("observable,value\n");
    for (k, v) in rows {
        let _ = writeln!(out, "{k},{v:?}");
    }
    out
}

/// States along the preparation path, one per step boundary.
#[derive(Clone, Debug)]
pub struct TrajectoryStates {
    pub s: Vec<f64>,
    pub states: Vec<State>,
    /// Present in recompiled mode.
    pub fits: Option<Vec<TrajectoryPoint>>,
}

fn noisy(cfg: &ExperimentConfig) -> bool {
    cfg.noise.is_some() || cfg.mitigation != Mitigation::None
}

pub fn trajectory_states(cfg: &ExperimentConfig) -> Result<TrajectoryStates> {
    let schedule = cfg.schedule()?;
    let s = schedule.boundaries();
    match cfg.mode {
        RunMode::Exact => Err(SimError::Config(
            "trajectories need mode trotter or recompiled".into(),
        )),
        RunMode::Trotter => {
            let states = if noisy(cfg) {
                NoisyAsp {
                    params: cfg.params,
                    schedule,
                    n_sites: cfg.n_sites,
                    mitigation: cfg.mitigation,
                    phi_est: cfg.phi_est,
                }
                .states(&cfg.noise_or_ideal())?
            } else {
                asp_states(&cfg.params, &schedule, cfg.n_sites)?
            };
            Ok(TrajectoryStates {
                s,
                states,
                fits: None,
            })
        }
        RunMode::Recompiled => {
            let spec = cfg.ansatz()?;
            let fits = recompile_trajectory_with(
                &cfg.params,
                &schedule,
                &spec,
                &cfg.optimize_options(),
                StartStrategy::Warm,
            )?;
            let neel = State::neel(cfg.n_sites)?;
            let states = fits
                .par_iter()
                .map(|p| {
                    let c = spec.to_circuit(&p.params)?;
                    let c = if noisy(cfg) {
                        noisy_native(&c, &cfg.noise_or_ideal(), cfg.mitigation, cfg.phi_est)?
                    } else {
                        c
                    };
                    simulate(&c, &neel)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(TrajectoryStates {
                s,
                states,
                fits: Some(fits),
            })
        }
    }
}

/// Sampling seed for trajectory point `point` under run seed `seed`.
pub fn point_seed(seed: u64, point: usize) -> u64 {
    seed ^ ((point as u64) << 32)
}

/// Shots drawn from `state`, post-selected on the alternating-state sector when asked.
pub fn draw(state: &State, shots: usize, seed: u64, postselect: bool) -> Result<ShotSet> {
    let raw = state.sample(shots, seed)?;
    Ok(if postselect {
        post_select(&raw, neel_sector(state.n_sites()))
    } else {
        raw
    })
}

/// Signed shot estimates of both string orders and the retained fraction, one entry per seed.
pub fn shot_estimates(
    state: &State,
    cfg: &ExperimentConfig,
    point: usize,
    postselect: bool,
) -> Result<Vec<(f64, f64, f64)>> {
    let specs = [
        StringOrderSpec::new(0, cfg.n_sites)?,
        StringOrderSpec::new(1, cfg.n_sites)?,
    ];
    cfg.seeds
        .iter()
        .map(|&seed| {
            let shots = draw(state, cfg.shots, point_seed(seed, point), postselect)?;
            Ok((
                string_order_shots(&shots, &specs[0])?,
                string_order_shots(&shots, &specs[1])?,
                shots.retention(),
            ))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub s: f64,
    pub mean_abs_oz0: f64,
    pub std_oz0: Option<f64>,
    pub mean_abs_oz1: f64,
    pub std_oz1: Option<f64>,
    pub exact_abs_oz0: f64,
    pub exact_abs_oz1: f64,
    /// Mean fraction of shots kept by post-selection.
    pub retained: f64,
    pub infidelity: Option<f64>,
    pub converged: Option<bool>,
}

pub fn run_trajectory(cfg: &ExperimentConfig, postselect: bool) -> Result<Vec<TrajectoryRow>> {
    let traj = trajectory_states(cfg)?;
    let specs = [
        StringOrderSpec::new(0, cfg.n_sites)?,
        StringOrderSpec::new(1, cfg.n_sites)?,
    ];
    traj.states
        .par_iter()
        .enumerate()
        .map(|(m, state)| {
            let est = shot_estimates(state, cfg, m, postselect)?;
            let o0: Vec<f64> = est.iter().map(|e| e.0.abs()).collect();
            let o1: Vec<f64> = est.iter().map(|e| e.1.abs()).collect();
            let retained = aggregate(&est.iter().map(|e| e.2).collect::<Vec<_>>())?.mean;
            let (a0, a1) = (aggregate(&o0)?, aggregate(&o1)?);
            let fit = traj.fits.as_ref().map(|f| &f[m]);
            Ok(TrajectoryRow {
                s: traj.s[m],
                mean_abs_oz0: a0.mean,
                std_oz0: a0.stddev,
                mean_abs_oz1: a1.mean,
                std_oz1: a1.stddev,
                exact_abs_oz0: string_order_exact(state, &specs[0])?.abs(),
                exact_abs_oz1: string_order_exact(state, &specs[1])?.abs(),
                retained,
                infidelity: fit.map(|f| f.infidelity),
                converged: fit.map(|f| f.converged),
            })
        })
        .collect()
}

fn opt<T: std::fmt::Debug>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| format!("{x:?}"))
}

pub fn trajectory_csv(rows: &[TrajectoryRow]) -> String {
    let mut out = csv_header("trajectory");
    out.push_str(
        "s,mean_abs_Oz0,std_Oz0,mean_abs_Oz1,std_Oz1,exact_abs_Oz0,exact_abs_Oz1,retained,infidelity,converged\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:?},{:?},{},{:?},{},{:?},{:?},{:?},{},{}",
            r.s,
            r.mean_abs_oz0,
            opt(r.std_oz0),
            r.mean_abs_oz1,
            opt(r.std_oz1),
            r.exact_abs_oz0,
            r.exact_abs_oz1,
            r.retained,
            opt(r.infidelity),
            opt(r.converged),
        );
    }
    out
}

pub fn run_sweep(
    cfg: &ExperimentConfig,
    param: SweepParam,
    values: &[f64],
) -> Result<Vec<SweepRow>> {
    if cfg.mode != RunMode::Trotter {
        return Err(SimError::Config(
            "sweeps run on the non-recompiled circuit (mode = trotter)".into(),
        ));
    }
    let experiment = NoisyAsp {
        params: cfg.params,
        schedule: cfg.schedule()?,
        n_sites: cfg.n_sites,
        mitigation: cfg.mitigation,
        phi_est: cfg.phi_est,
    };
    sweep(param, values, &experiment)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = csv_header("sweep");
    out.push_str("param,value,s,abs_Oz1\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:?},{:?},{:?}",
            r.param.as_str(),
            r.value,
            r.s,
            r.abs_oz1
        );
    }
    out
}

/// Recompiled circuit of every trajectory point, with the fit summary.
pub fn run_recompile(cfg: &ExperimentConfig) -> Result<Vec<(TrajectoryPoint, Circuit)>> {
    let spec = cfg.ansatz()?;
    let fits = recompile_trajectory_with(
        &cfg.params,
        &cfg.schedule()?,
        &spec,
        &cfg.optimize_options(),
        StartStrategy::Warm,
    )?;
    fits.into_iter()
        .map(|p| {
            let c = spec.to_circuit(&p.params)?;
            Ok((p, c))
        })
        .collect()
}

pub fn recompile_csv(points: &[(TrajectoryPoint, Circuit)]) -> String {
    let mut out = csv_header("recompile");
    out.push_str("s,infidelity,converged,iterations\n");
    for (p, _) in points {
        let _ = writeln!(
            out,
            "{:?},{:?},{},{}",
            p.s, p.infidelity, p.converged, p.iterations
        );
    }
    out
}

/// Shots from one state: the ground state in exact mode, otherwise trajectory
/// point `step` (the last one by default). Uses the first configured seed.
pub fn sample_dump(
    cfg: &ExperimentConfig,
    step: Option<usize>,
    postselect: bool,
) -> Result<ShotSet> {
    let (state, point) = if cfg.mode == RunMode::Exact {
        let h = hamiltonian_at(&cfg.params, cfg.n_sites, cfg.s)?;
        (ground_state(&h, Some(neel_sector(cfg.n_sites)))?.1, 0)
    } else {
        let mut traj = trajectory_states(cfg)?;
        let last = traj.states.len() - 1;
        let m = step.unwrap_or(last);
        if m > last {
            return Err(SimError::Config(format!(
                "step {m} beyond the last trajectory point {last}"
            )));
        }
        (traj.states.swap_remove(m), m)
    };
    draw(
        &state,
        cfg.shots,
        point_seed(cfg.seeds[0], point),
        postselect,
    )
}

/// Write `contents` next to `path` and rename it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
