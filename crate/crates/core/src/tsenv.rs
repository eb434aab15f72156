//! Closed-loop tuning environment: runs scenarios through plant + controller
//! with a given parameter set, assembles the agent observation (context,
//! upsampled parameter image, signal window), builds the binary action mask
//! over visited table cells, computes the clipped dense reward, and applies
//! masked parameter updates.

use crate::controller::{
    control_step, select_bank, visited_cell, ControllerState, ParameterSet,
};
use crate::plant::{
    self, ActuatorCommand, ExogenousInput, PlantParams, PlantState, ThermalState, VehicleParams,
};
use crate::scenario::{sample_scenario, synthesize_drive, EdgeCase, LayerStatsSet, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Side length of the upsampled parameter image.
pub const IMAGE_DIM: usize = 8;
/// Image channels: P and I tables of the active bank.
pub const IMAGE_CHANNELS: usize = 2;
/// Flattened action/image length.
pub const ACTION_LEN: usize = IMAGE_CHANNELS * IMAGE_DIM * IMAGE_DIM;
/// Signal-window channels: `[T_D, e_T, dT_amb, u_vlv]`.
pub const WINDOW_CHANNELS: usize = 4;
/// Context-vector length: thermal-state one-hot (2) plus normalized setpoint.
pub const CONTEXT_LEN: usize = 3;

// Affine normalization constants for observations: temperatures map through
// (T - 50) / 50, control errors through e / 10, ambient differences through
// d / 70, valve commands are already in [0,1].
pub const NORM_T_OFFSET: f64 = 50.0;
pub const NORM_T_SCALE: f64 = 50.0;
pub const NORM_E_SCALE: f64 = 10.0;
pub const NORM_DT_SCALE: f64 = 70.0;

#[derive(Debug, Error, PartialEq)]
pub enum TsEnvError {
    #[error("signal window contains non-finite samples")]
    NonFiniteSignal,
    #[error("cannot build a mask from an empty trajectory")]
    EmptyTrajectory,
}

/// Stationary task context observed by the agent.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextVector {
    /// `[config_a, config_b]` one-hot plus the normalized setpoint.
    pub data: [f32; CONTEXT_LEN],
}

/// Normalized, fixed-length signal window; sample `n`, channel `c` lives at
/// `data[n * WINDOW_CHANNELS + c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalWindow {
    pub samples: usize,
    pub data: Vec<f32>,
}

/// Upsampled, normalized parameter image; channel-major `[C, M, M]` layout,
/// channel 0 = P gains, channel 1 = I gains, each divided by its phi_max.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterImage {
    pub data: Vec<f32>,
}

/// The joint agent observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub context: ContextVector,
    pub image: ParameterImage,
    pub window: SignalWindow,
}

/// Binary matrix marking table cells exercised by the last simulated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionMask {
    rows: usize,
    cols: usize,
    cells: Vec<u8>,
}

impl ActionMask {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ActionMask {
            rows,
            cols,
            cells: vec![0; rows * cols],
        }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        ActionMask {
            rows,
            cols,
            cells: vec![1; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.cols + j] != 0
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.cells[i * self.cols + j] = 1;
    }

    pub fn count_ones(&self) -> usize {
        self.cells.iter().filter(|&&c| c != 0).count()
    }

    pub fn is_all_zero(&self) -> bool {
        self.count_ones() == 0
    }

    /// Lift the cell mask to image resolution: an image entry is live iff any
    /// table cell its downsampling footprint touches is live.
    pub fn image_mask(&self, dim: usize) -> Vec<f32> {
        let mut out = vec![0.0f32; dim * dim];
        let contrib_r = footprints(self.rows, dim);
        let contrib_c = footprints(self.cols, dim);
        for (i, rs) in contrib_r.iter().enumerate() {
            for (j, cs) in contrib_c.iter().enumerate() {
                if self.get(i, j) {
                    for &u in rs {
                        for &v in cs {
                            out[u * dim + v] = 1.0;
                        }
                    }
                }
            }
        }
        out
    }
}

/// For each coarse index, the fine indices with nonzero weight in the
/// corner-aligned bilinear downsampling from `fine` to `coarse` points.
fn footprints(coarse: usize, fine: usize) -> Vec<Vec<usize>> {
    (0..coarse)
        .map(|i| {
            let pos = i as f64 * (fine - 1) as f64 / (coarse - 1) as f64;
            let lo = pos.floor() as usize;
            let frac = pos - lo as f64;
            if frac > 1e-12 && lo + 1 < fine {
                vec![lo, lo + 1]
            } else {
                vec![lo]
            }
        })
        .collect()
}

/// Corner-aligned bilinear resampling of a row-major grid.
pub fn resample_bilinear(
    src: &[f64],
    rows: usize,
    cols: usize,
    new_rows: usize,
    new_cols: usize,
) -> Vec<f64> {
    assert_eq!(src.len(), rows * cols);
    assert!(rows >= 2 && cols >= 2 && new_rows >= 2 && new_cols >= 2);
    let mut out = vec![0.0; new_rows * new_cols];
    for r in 0..new_rows {
        let y = r as f64 * (rows - 1) as f64 / (new_rows - 1) as f64;
        let y0 = (y.floor() as usize).min(rows - 2);
        let fy = y - y0 as f64;
        for c in 0..new_cols {
            let x = c as f64 * (cols - 1) as f64 / (new_cols - 1) as f64;
            let x0 = (x.floor() as usize).min(cols - 2);
            let fx = x - x0 as f64;
            let v00 = src[y0 * cols + x0];
            let v01 = src[y0 * cols + x0 + 1];
            let v10 = src[(y0 + 1) * cols + x0];
            let v11 = src[(y0 + 1) * cols + x0 + 1];
            out[r * new_cols + c] = v00 * (1.0 - fy) * (1.0 - fx)
                + v01 * (1.0 - fy) * fx
                + v10 * fy * (1.0 - fx)
                + v11 * fy * fx;
        }
    }
    out
}

/// Upsample the active bank's P and I tables to the common image size and
/// normalize each channel by its clip limit.
pub fn upsample_tables(ps: &ParameterSet, bank: usize) -> ParameterImage {
    let bank = &ps.banks[bank];
    let mut data = Vec::with_capacity(ACTION_LEN);
    for table in [&bank.p, &bank.i] {
        let up = resample_bilinear(
            table.values(),
            table.rows(),
            table.cols(),
            IMAGE_DIM,
            IMAGE_DIM,
        );
        data.extend(up.iter().map(|v| (v / table.phi_max()) as f32));
    }
    ParameterImage { data }
}

/// Downsample an image-sized update back to the two table grids and scale by
/// the per-channel maximum step.
pub fn downsample_action(delta: &[f32], dphi_max: [f64; IMAGE_CHANNELS]) -> [Vec<f64>; 2] {
    assert_eq!(delta.len(), ACTION_LEN);
    let plane = IMAGE_DIM * IMAGE_DIM;
    let mut out: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for ch in 0..IMAGE_CHANNELS {
        let src: Vec<f64> = delta[ch * plane..(ch + 1) * plane]
            .iter()
            .map(|&v| v as f64)
            .collect();
        let down = resample_bilinear(
            &src,
            IMAGE_DIM,
            IMAGE_DIM,
            crate::controller::TABLE_DIM,
            crate::controller::TABLE_DIM,
        );
        out[ch] = down.iter().map(|v| v * dphi_max[ch]).collect();
    }
    out
}

/// Mark the four corner cells of every table cell the trajectory visited.
pub fn build_mask(
    trajectory: &[(f64, f64)],
    axis_i: &[f64],
    axis_j: &[f64],
) -> Result<ActionMask, TsEnvError> {
    if trajectory.is_empty() {
        return Err(TsEnvError::EmptyTrajectory);
    }
    let mut mask = ActionMask::zeros(axis_i.len(), axis_j.len());
    for &(e, d) in trajectory {
        let ci = visited_cell(axis_i, e);
        let cj = visited_cell(axis_j, d);
        mask.set(ci, cj);
        mask.set(ci + 1, cj);
        mask.set(ci, cj + 1);
        mask.set(ci + 1, cj + 1);
    }
    Ok(mask)
}

/// Masked parameter update: the downsampled, scaled deltas are added to the
/// active bank's tables wherever the mask is set, clipped to `[0, phi_max]`.
/// Unmasked entries and the inactive bank are returned bit-identical.
pub fn apply_action(
    ps: &ParameterSet,
    bank: usize,
    delta: &[f32],
    mask: &ActionMask,
    dphi_frac: f64,
) -> ParameterSet {
    let mut out = ps.clone();
    let target = &mut out.banks[bank];
    let dphi_max = [
        dphi_frac * target.p.phi_max(),
        dphi_frac * target.i.phi_max(),
    ];
    let deltas = downsample_action(delta, dphi_max);
    for (table, d) in [(&mut target.p, &deltas[0]), (&mut target.i, &deltas[1])] {
        let (rows, cols) = (table.rows(), table.cols());
        for i in 0..rows {
            for j in 0..cols {
                if mask.get(i, j) {
                    table.set(i, j, table.get(i, j) + d[i * cols + j]);
                }
            }
        }
    }
    out
}

/// Physical-unit signal window used for the reward.
#[derive(Debug, Clone, PartialEq)]
pub struct RawWindow {
    pub t_d: Vec<f64>,
    pub e_t: Vec<f64>,
    pub dt_amb: Vec<f64>,
    pub u_vlv: Vec<f64>,
}

/// Dense tracking/effort reward over a window, clipped from below:
/// `r = -(1/N) sum[ b1 (sqrt|e| + e^2) + b2 u^2 ]`, then `max(r, r_min)`.
pub fn compute_reward(
    e_t: &[f64],
    u_vlv: &[f64],
    b1: f64,
    b2: f64,
    r_min: f64,
) -> Result<f64, TsEnvError> {
    assert!(!e_t.is_empty() && e_t.len() == u_vlv.len());
    let mut acc = 0.0;
    for (&e, &u) in e_t.iter().zip(u_vlv) {
        if !e.is_finite() || !u.is_finite() {
            return Err(TsEnvError::NonFiniteSignal);
        }
        acc += b1 * (e.abs().sqrt() + e * e) + b2 * u * u;
    }
    let r = -acc / e_t.len() as f64;
    Ok(r.max(r_min))
}

/// Uniform decimation with averaging onto `n` samples; short series replicate
/// their nearest sample.
pub fn resample_series(series: &[f64], n: usize) -> Vec<f64> {
    assert!(!series.is_empty() && n >= 1);
    let len = series.len();
    (0..n)
        .map(|k| {
            let start = k * len / n;
            let end = (((k + 1) * len / n).min(len)).max(start + 1);
            let chunk = &series[start..end];
            chunk.iter().sum::<f64>() / chunk.len() as f64
        })
        .collect()
}

/// Environment constants: reward shaping, actuation rules, observation sizes,
/// and the episode-initialization distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvConfig {
    /// Signal-window length N.
    pub window_n: usize,
    /// Tracking-cost weight.
    pub b1: f64,
    /// Actuation-cost weight.
    pub b2: f64,
    /// Reward clip floor.
    pub r_min: f64,
    /// Per-step table change limit as a fraction of phi_max.
    pub dphi_frac: f64,
    /// Nominal downstream setpoint (degC).
    pub t_ref_nominal: f64,
    /// Raised setpoint while warming up (degC).
    pub t_ref_warmup: f64,
    /// Warm-up threshold on T_U1 (degC); below it the circuit runs ConfigB.
    pub warmup_threshold: f64,
    /// |P_ED| above which the electrical state switches to the boost index.
    pub boost_power: f64,
    /// Fixed pump command issued by the supervisory logic.
    pub u_pmp: f64,
    /// Fixed fan command.
    pub u_fan: f64,
    /// Fixed shutter command.
    pub u_shu: f64,
    /// Scenarios per episode batch X_S.
    pub scenario_batch: usize,
    /// Edge-case injection probability.
    pub p_edge: f64,
    /// Relative plant-parameter jitter when sampling episode variants.
    pub theta_jitter: f64,
    /// Relative gain jitter around the conservative initialization.
    pub phi0_jitter: f64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            window_n: 128,
            b1: 25.0,
            b2: 0.1,
            r_min: -100.0,
            dphi_frac: 0.1,
            t_ref_nominal: 50.0,
            t_ref_warmup: 60.0,
            warmup_threshold: 40.0,
            boost_power: 30_000.0,
            u_pmp: 0.5,
            u_fan: 0.4,
            u_shu: 1.0,
            scenario_batch: 8,
            p_edge: 0.05,
            theta_jitter: 0.1,
            phi0_jitter: 0.2,
        }
    }
}

/// Full simulated trace of one scenario evaluation at the plant step.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub dt: f64,
    pub t_d: Vec<f64>,
    pub t_d_ref: Vec<f64>,
    pub e_t: Vec<f64>,
    pub u_vlv: Vec<f64>,
    pub v: Vec<f64>,
    pub dt_amb: Vec<f64>,
    /// Coolant temperature rise over the tractive path, T_U1 - T_D.
    pub dt_ts: Vec<f64>,
    pub bank: Vec<u8>,
    /// Controller-frame error (sign-adapted for the warm-up routing).
    pub e_ctrl: Vec<f64>,
    pub failed: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t_d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_d.is_empty()
    }
}

/// Everything one closed-loop evaluation produces.
#[derive(Debug, Clone)]
pub struct EvalOutcome {
    pub obs: Observation,
    pub mask: ActionMask,
    pub trajectory: Trajectory,
    pub raw_window: RawWindow,
    pub active_bank: usize,
    pub failed: bool,
}

/// Run the full closed-loop simulation of one synthesized scenario.
///
/// The supervisory rule: ConfigB with the raised setpoint while T_U1 is below
/// the warm-up threshold, else ConfigA with the nominal setpoint; the active
/// controller sees the sign-adapted error so positive valve action always
/// pushes the loop toward its setpoint. Initial temperatures equal the
/// scenario's ambient. A plant blow-up ends the run early with the `failed`
/// flag set (the caller clips the reward to r_min).
pub fn eval_scenario(
    sc: &Scenario,
    theta: &PlantParams,
    ps: &ParameterSet,
    cfg: &EnvConfig,
) -> EvalOutcome {
    assert!(!sc.is_empty(), "scenario must be synthesized before evaluation");
    let mut state = PlantState::soaked(sc.values.t_amb, theta);
    let mut cs = [ControllerState::default(); 2];
    let mut traj = Trajectory {
        dt: theta.dt,
        ..Default::default()
    };

    for i in 0..sc.len() {
        let xi_th = if state.t_u1 < cfg.warmup_threshold {
            ThermalState::ConfigB
        } else {
            ThermalState::ConfigA
        };
        let t_ref = match xi_th {
            ThermalState::ConfigA => cfg.t_ref_nominal,
            ThermalState::ConfigB => cfg.t_ref_warmup,
        };
        let xi_el = usize::from(sc.p_ed[i].abs() > cfg.boost_power);
        let bank = select_bank(xi_th, xi_el);
        let e_t = state.t_d - t_ref;
        let dt_amb = state.t_u1 - sc.values.t_amb;
        // In the warm-up routing the valve's plant gain is inverted.
        let e_ctrl = if bank == 1 { -e_t } else { e_t };
        let (u, cs_new) = control_step(cs[bank], ps, bank, e_ctrl, dt_amb, theta.dt);
        cs[bank] = cs_new;

        traj.t_d.push(state.t_d);
        traj.t_d_ref.push(t_ref);
        traj.e_t.push(e_t);
        traj.u_vlv.push(u);
        traj.v.push(sc.v[i]);
        traj.dt_amb.push(dt_amb);
        traj.dt_ts.push(state.t_u1 - state.t_d);
        traj.bank.push(bank as u8);
        traj.e_ctrl.push(e_ctrl);

        let cmd = ActuatorCommand {
            u_vlv: u,
            u_pmp: cfg.u_pmp,
            u_fan: cfg.u_fan,
            u_shu: cfg.u_shu,
        };
        let exo = ExogenousInput {
            v_veh: sc.v[i],
            p_ed: sc.p_ed[i],
            t_amb: sc.values.t_amb,
            xi_th,
            xi_el,
        };
        if plant::step(&mut state, &cmd, &exo, theta).is_err() {
            traj.failed = true;
            break;
        }
    }

    // Active bank: the one engaged for the most samples; ties go to the last.
    let count1 = traj.bank.iter().filter(|&&b| b == 1).count();
    let count0 = traj.len() - count1;
    let active_bank = match count0.cmp(&count1) {
        std::cmp::Ordering::Greater => 0,
        std::cmp::Ordering::Less => 1,
        std::cmp::Ordering::Equal => *traj.bank.last().unwrap_or(&0) as usize,
    };

    // Mask from the samples the active controller actually served, in the
    // coordinates its tables were indexed with.
    let visits: Vec<(f64, f64)> = traj
        .bank
        .iter()
        .zip(traj.e_ctrl.iter().zip(&traj.dt_amb))
        .filter(|(&b, _)| b as usize == active_bank)
        .map(|(_, (&e, &d))| (e, d))
        .collect();
    let table = &ps.banks[active_bank].p;
    let mask = build_mask(&visits, table.axis_i(), table.axis_j())
        .unwrap_or_else(|_| ActionMask::zeros(table.rows(), table.cols()));

    let raw_window = RawWindow {
        t_d: resample_series(&traj.t_d, cfg.window_n),
        e_t: resample_series(&traj.e_t, cfg.window_n),
        dt_amb: resample_series(&traj.dt_amb, cfg.window_n),
        u_vlv: resample_series(&traj.u_vlv, cfg.window_n),
    };
    let mut window = SignalWindow {
        samples: cfg.window_n,
        data: Vec::with_capacity(cfg.window_n * WINDOW_CHANNELS),
    };
    for k in 0..cfg.window_n {
        window
            .data
            .push(((raw_window.t_d[k] - NORM_T_OFFSET) / NORM_T_SCALE) as f32);
        window.data.push((raw_window.e_t[k] / NORM_E_SCALE) as f32);
        window.data.push((raw_window.dt_amb[k] / NORM_DT_SCALE) as f32);
        window.data.push(raw_window.u_vlv[k] as f32);
    }

    let t_ref_active = match active_bank {
        0 => cfg.t_ref_nominal,
        _ => cfg.t_ref_warmup,
    };
    let context = ContextVector {
        data: [
            if active_bank == 0 { 1.0 } else { 0.0 },
            if active_bank == 1 { 1.0 } else { 0.0 },
            ((t_ref_active - NORM_T_OFFSET) / NORM_T_SCALE) as f32,
        ],
    };
    let failed = traj.failed;
    EvalOutcome {
        obs: Observation {
            context,
            image: upsample_tables(ps, active_bank),
            window,
        },
        mask,
        trajectory: traj,
        raw_window,
        active_bank,
        failed,
    }
}

/// One environment transition handed to the agent.
#[derive(Debug, Clone)]
pub struct EnvStep {
    pub obs: Observation,
    pub mask: ActionMask,
    pub reward: f64,
    pub failed: bool,
}

/// A tunable-parameter environment the training loop can drive.
pub trait TuningEnv: Send {
    /// Start a new episode (fresh variant, conservative parameters, fresh
    /// scenario batch); returns the initial observation and mask.
    fn reset(&mut self) -> (Observation, ActionMask);
    /// Apply a masked parameter update, evaluate a freshly drawn scenario,
    /// and return the next observation, mask, and reward.
    fn step(&mut self, action: &[f32]) -> EnvStep;
    /// Snapshot of the current tunable parameters.
    fn param_snapshot(&self) -> ParameterSet;
}

/// The scenario-driven thermal-system tuning environment.
pub struct ThermalEnv {
    theta_ref: PlantParams,
    veh: VehicleParams,
    stats: LayerStatsSet,
    edges: Vec<EdgeCase>,
    cfg: EnvConfig,
    rng: ChaCha8Rng,
    theta: PlantParams,
    params: ParameterSet,
    batch: Vec<Scenario>,
    last_mask: ActionMask,
    last_bank: usize,
}

impl ThermalEnv {
    pub fn new(
        theta: PlantParams,
        veh: VehicleParams,
        stats: LayerStatsSet,
        edges: Vec<EdgeCase>,
        cfg: EnvConfig,
        seed: u64,
    ) -> Self {
        let params = ParameterSet::conservative();
        let dim = crate::controller::TABLE_DIM;
        ThermalEnv {
            theta_ref: theta.clone(),
            veh,
            stats,
            edges,
            cfg,
            rng: ChaCha8Rng::seed_from_u64(seed),
            theta,
            params,
            batch: Vec::new(),
            last_mask: ActionMask::zeros(dim, dim),
            last_bank: 0,
        }
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    /// Draw an episode plant variant around the reference parameters.
    fn sample_theta(&mut self) -> PlantParams {
        let j = self.cfg.theta_jitter;
        let mut theta = self.theta_ref.clone();
        if j > 0.0 {
            for field in [
                &mut theta.c_1,
                &mut theta.c_2,
                &mut theta.c_mix,
                &mut theta.k_he0,
                &mut theta.k_hyd,
                &mut theta.k_drag,
                &mut theta.vair_ref,
            ] {
                *field *= 1.0 + self.rng.gen_range(-j..=j);
            }
        }
        theta
    }

    /// Draw a conservative stable initialization around the base gains.
    fn sample_phi0(&mut self) -> ParameterSet {
        let j = self.cfg.phi0_jitter;
        let base = ParameterSet::conservative();
        let mut p = base.banks[0].p.get(0, 0);
        let mut i = base.banks[0].i.get(0, 0);
        if j > 0.0 {
            p *= 1.0 + self.rng.gen_range(-j..=j);
            i *= 1.0 + self.rng.gen_range(-j..=j);
        }
        ParameterSet::uniform(p, i)
    }

    fn draw_scenario(&mut self) -> Scenario {
        let mut sc = sample_scenario(&self.stats, &self.edges, self.cfg.p_edge, &mut self.rng);
        synthesize_drive(&mut sc, &self.veh, self.theta.dt);
        sc
    }
}

impl TuningEnv for ThermalEnv {
    fn reset(&mut self) -> (Observation, ActionMask) {
        self.theta = self.sample_theta();
        self.params = self.sample_phi0();
        self.batch = (0..self.cfg.scenario_batch.max(1))
            .map(|_| self.draw_scenario())
            .collect();
        let idx = self.rng.gen_range(0..self.batch.len());
        let outcome = eval_scenario(&self.batch[idx], &self.theta, &self.params, &self.cfg);
        self.last_mask = outcome.mask.clone();
        self.last_bank = outcome.active_bank;
        (outcome.obs, outcome.mask)
    }

    fn step(&mut self, action: &[f32]) -> EnvStep {
        self.params = apply_action(
            &self.params,
            self.last_bank,
            action,
            &self.last_mask,
            self.cfg.dphi_frac,
        );
        let idx = self.rng.gen_range(0..self.batch.len());
        let outcome = eval_scenario(&self.batch[idx], &self.theta, &self.params, &self.cfg);
        let reward = if outcome.failed {
            self.cfg.r_min
        } else {
            compute_reward(
                &outcome.raw_window.e_t,
                &outcome.raw_window.u_vlv,
                self.cfg.b1,
                self.cfg.b2,
                self.cfg.r_min,
            )
            .unwrap_or(self.cfg.r_min)
        };
        self.last_mask = outcome.mask.clone();
        self.last_bank = outcome.active_bank;
        EnvStep {
            obs: outcome.obs,
            mask: outcome.mask,
            reward,
            failed: outcome.failed,
        }
    }

    fn param_snapshot(&self) -> ParameterSet {
        self.params.clone()
    }
}
