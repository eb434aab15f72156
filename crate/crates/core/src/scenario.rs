//! Thermal-system scenario generation: Gaussian layer statistics fitted from
//! usage data, quantile-clipped sampling with edge-case injection, and drive
//! synthesis through a proportional driver model and the longitudinal
//! road-load power model.

use crate::plant::{longitudinal_power, VehicleParams};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

/// Standard-normal 90% quantile; the 10%/90% clip bounds are `mu -+ Z_90 * sigma`.
pub const Z_90: f64 = 1.281552;

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("insufficient usage data: need at least 2 records, got {0}")]
    InsufficientData(usize),
    #[error("usage record {index} has a non-finite or invalid field: {field}")]
    InvalidRecord { index: usize, field: &'static str },
}

/// Per-trip summary of usage data.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageRecord {
    /// Data-source tag (e.g. climate region of the development drive).
    pub provenance: String,
    /// Mean target speed over the trip (m/s).
    pub speed_mean: f64,
    /// Variance of the target speed (m^2/s^2).
    pub speed_var: f64,
    /// Mean road gradient (rad).
    pub grad_mean: f64,
    /// Trip duration (s).
    pub duration: f64,
    /// Ambient temperature (degC).
    pub t_amb: f64,
    /// Relative humidity (%). Sampled and stored; no plant effect.
    pub humidity: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct UsageDataset {
    pub records: Vec<UsageRecord>,
}

impl UsageDataset {
    /// Records whose provenance matches `tag`.
    pub fn filter_provenance(&self, tag: &str) -> UsageDataset {
        UsageDataset {
            records: self
                .records
                .iter()
                .filter(|r| r.provenance == tag)
                .cloned()
                .collect(),
        }
    }
}

/// The scenario layer variables sampled per draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayerVar {
    SpeedMean,
    SpeedVar,
    GradMean,
    Duration,
    TAmb,
    Humidity,
}

impl LayerVar {
    pub const ALL: [LayerVar; 6] = [
        LayerVar::SpeedMean,
        LayerVar::SpeedVar,
        LayerVar::GradMean,
        LayerVar::Duration,
        LayerVar::TAmb,
        LayerVar::Humidity,
    ];

    /// Scenario layer the variable belongs to: 1 road, 2 traffic/driver, 5 environment.
    pub fn layer(self) -> u8 {
        match self {
            LayerVar::GradMean => 1,
            LayerVar::SpeedMean | LayerVar::SpeedVar | LayerVar::Duration => 2,
            LayerVar::TAmb | LayerVar::Humidity => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LayerVar::SpeedMean => "speed_mean",
            LayerVar::SpeedVar => "speed_var",
            LayerVar::GradMean => "grad_mean",
            LayerVar::Duration => "duration",
            LayerVar::TAmb => "t_amb",
            LayerVar::Humidity => "humidity",
        }
    }

    fn extract(self, r: &UsageRecord) -> f64 {
        match self {
            LayerVar::SpeedMean => r.speed_mean,
            LayerVar::SpeedVar => r.speed_var,
            LayerVar::GradMean => r.grad_mean,
            LayerVar::Duration => r.duration,
            LayerVar::TAmb => r.t_amb,
            LayerVar::Humidity => r.humidity,
        }
    }
}

/// Fitted normal plus the 10%/90% quantile clip bounds for one layer variable.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStatistics {
    pub var: LayerVar,
    pub mu: f64,
    pub sigma: f64,
    pub clip_lo: f64,
    pub clip_hi: f64,
}

/// The complete statistics collection over all layer variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStatsSet {
    pub stats: Vec<LayerStatistics>,
}

impl LayerStatsSet {
    pub fn get(&self, var: LayerVar) -> &LayerStatistics {
        self.stats
            .iter()
            .find(|s| s.var == var)
            .expect("stats set covers all layer variables")
    }
}

/// Fit per-variable normals (sample mean, n-1 standard deviation) and the
/// analytic 10%/90% quantile clip bounds.
pub fn fit_layer_statistics(data: &UsageDataset) -> Result<LayerStatsSet, ScenarioError> {
    let n = data.records.len();
    if n < 2 {
        return Err(ScenarioError::InsufficientData(n));
    }
    for (index, r) in data.records.iter().enumerate() {
        let fields = [
            ("speed_mean", r.speed_mean),
            ("speed_var", r.speed_var),
            ("grad_mean", r.grad_mean),
            ("duration", r.duration),
            ("t_amb", r.t_amb),
            ("humidity", r.humidity),
        ];
        for (field, v) in fields {
            if !v.is_finite() {
                return Err(ScenarioError::InvalidRecord { index, field });
            }
        }
        if r.duration <= 0.0 {
            return Err(ScenarioError::InvalidRecord {
                index,
                field: "duration",
            });
        }
    }
    let stats = LayerVar::ALL
        .iter()
        .map(|&var| {
            let values: Vec<f64> = data.records.iter().map(|r| var.extract(r)).collect();
            let mu = values.iter().sum::<f64>() / n as f64;
            let ss: f64 = values.iter().map(|v| (v - mu) * (v - mu)).sum();
            let sigma = (ss / (n as f64 - 1.0)).sqrt();
            LayerStatistics {
                var,
                mu,
                sigma,
                clip_lo: mu - Z_90 * sigma,
                clip_hi: mu + Z_90 * sigma,
            }
        })
        .collect();
    Ok(LayerStatsSet { stats })
}

/// One concrete assignment of all layer variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerValues {
    pub speed_mean: f64,
    pub speed_var: f64,
    pub grad_mean: f64,
    pub duration: f64,
    pub t_amb: f64,
    pub humidity: f64,
}

/// A predefined extreme scenario injected on top of the fitted distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCase {
    pub name: String,
    pub values: LayerValues,
}

/// The edge cases shipped with the workbench: desert heat at sustained high
/// speed and sub-polar cold under high load.
pub fn default_edge_cases() -> Vec<EdgeCase> {
    vec![
        EdgeCase {
            name: "desert_high_speed".into(),
            values: LayerValues {
                speed_mean: 45.0,
                speed_var: 4.0,
                grad_mean: 0.0,
                duration: 600.0,
                t_amb: 45.0,
                humidity: 10.0,
            },
        },
        EdgeCase {
            name: "subpolar_high_load".into(),
            values: LayerValues {
                speed_mean: 35.0,
                speed_var: 25.0,
                grad_mean: 0.03,
                duration: 600.0,
                t_amb: -20.0,
                humidity: 80.0,
            },
        },
    ]
}

/// A sampled thermal-system scenario: layer values plus synthesized series.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub values: LayerValues,
    pub is_edge_case: bool,
    /// Seed of the series synthesis; same seed reproduces the series bit-exactly.
    pub seed: u64,
    /// Sample period of the series (s); 0 until synthesized.
    pub dt: f64,
    /// Vehicle speed series (m/s).
    pub v: Vec<f64>,
    /// Road gradient series (rad).
    pub grade: Vec<f64>,
    /// Tractive electrical power series (W).
    pub p_ed: Vec<f64>,
}

impl Scenario {
    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }
}

fn draw_clipped(stats: &LayerStatistics, rng: &mut ChaCha8Rng) -> f64 {
    if stats.sigma == 0.0 {
        return stats.mu;
    }
    let normal = Normal::new(stats.mu, stats.sigma).expect("sigma > 0");
    // Rejection keeps the in-band shape; clamping would pile mass on the bounds.
    for _ in 0..100_000 {
        let x = normal.sample(rng);
        if x >= stats.clip_lo && x <= stats.clip_hi {
            return x;
        }
    }
    stats.mu
}

/// Draw a scenario: with probability `p_edge` a uniformly chosen edge case
/// (flagged), otherwise quantile-clipped draws from the fitted normals.
/// The returned scenario has no series yet; see [`synthesize_drive`].
pub fn sample_scenario(
    stats: &LayerStatsSet,
    edge_cases: &[EdgeCase],
    p_edge: f64,
    rng: &mut ChaCha8Rng,
) -> Scenario {
    let seed = rng.gen::<u64>();
    let is_edge = !edge_cases.is_empty() && rng.gen::<f64>() < p_edge;
    let values = if is_edge {
        let idx = rng.gen_range(0..edge_cases.len());
        edge_cases[idx].values
    } else {
        LayerValues {
            speed_mean: draw_clipped(stats.get(LayerVar::SpeedMean), rng),
            speed_var: draw_clipped(stats.get(LayerVar::SpeedVar), rng),
            grad_mean: draw_clipped(stats.get(LayerVar::GradMean), rng),
            duration: draw_clipped(stats.get(LayerVar::Duration), rng),
            t_amb: draw_clipped(stats.get(LayerVar::TAmb), rng),
            humidity: draw_clipped(stats.get(LayerVar::Humidity), rng),
        }
    };
    Scenario {
        values,
        is_edge_case: is_edge,
        seed,
        dt: 0.0,
        v: Vec::new(),
        grade: Vec::new(),
        p_ed: Vec::new(),
    }
}

/// Target-speed segment length bounds for the synthesized drive (s).
const SEGMENT_LEN_S: (f64, f64) = (20.0, 60.0);
/// Gradient knot spacing (s) and spread around the sampled mean (rad).
const GRADE_KNOT_S: f64 = 60.0;
const GRADE_KNOT_SIGMA: f64 = 0.01;

/// Fill the scenario's series: a piecewise-constant target-speed profile
/// tracked by a proportional driver, a piecewise-linear gradient profile, and
/// the resulting tractive power at every sample.
pub fn synthesize_drive(sc: &mut Scenario, veh: &VehicleParams, dt: f64) {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
    let n = ((sc.values.duration / dt).round() as usize).max(1);
    sc.dt = dt;

    // Target-speed profile: constant segments around the sampled mean.
    let sigma = sc.values.speed_var.max(0.0).sqrt();
    let mut target = Vec::with_capacity(n);
    while target.len() < n {
        let seg_s = rng.gen_range(SEGMENT_LEN_S.0..SEGMENT_LEN_S.1);
        let seg_len = ((seg_s / dt).round() as usize).max(1);
        let level = if sigma > 0.0 {
            Normal::new(sc.values.speed_mean, sigma)
                .expect("sigma > 0")
                .sample(&mut rng)
                .max(0.0)
        } else {
            sc.values.speed_mean.max(0.0)
        };
        for _ in 0..seg_len {
            if target.len() == n {
                break;
            }
            target.push(level);
        }
    }

    // Gradient profile: linear interpolation between knots.
    let knot_step = ((GRADE_KNOT_S / dt).round() as usize).max(1);
    let n_knots = n / knot_step + 2;
    let knots: Vec<f64> = (0..n_knots)
        .map(|_| {
            Normal::new(sc.values.grad_mean, GRADE_KNOT_SIGMA)
                .expect("positive sigma")
                .sample(&mut rng)
        })
        .collect();
    sc.grade = (0..n)
        .map(|i| {
            let pos = i as f64 / knot_step as f64;
            let k = pos.floor() as usize;
            let frac = pos - k as f64;
            knots[k] * (1.0 - frac) + knots[k + 1] * frac
        })
        .collect();

    // Driver model: proportional tracking with acceleration limits.
    let drv = veh.driver;
    sc.v = Vec::with_capacity(n);
    sc.p_ed = Vec::with_capacity(n);
    let mut v = target[0];
    for i in 0..n {
        let a = (drv.k_drv * (target[i] - v)).clamp(drv.a_min, drv.a_max);
        sc.v.push(v);
        sc.p_ed.push(longitudinal_power(v, a, sc.grade[i], veh));
        v = (v + a * dt).max(0.0);
    }
}

/// Bundled synthetic usage data: three climate-tagged subsets emulating hot,
/// moderate, and cold development drives. Deterministic.
pub fn synthetic_usage_dataset() -> UsageDataset {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_DA7A);
    let mut records = Vec::new();
    // (tag, t_amb mu/sigma, humidity mu/sigma, speed mu/sigma)
    let climates = [
        ("hot", 48.0, 2.0, 22.0, 8.0, 25.0, 4.0),
        ("moderate", 25.0, 5.0, 50.0, 10.0, 24.0, 5.0),
        ("cold", -5.0, 6.0, 75.0, 8.0, 20.0, 5.0),
    ];
    for (tag, t_mu, t_sig, h_mu, h_sig, v_mu, v_sig) in climates {
        for _ in 0..40 {
            let draw = |rng: &mut ChaCha8Rng, mu: f64, sig: f64| {
                Normal::new(mu, sig).unwrap().sample(rng)
            };
            records.push(UsageRecord {
                provenance: tag.to_string(),
                speed_mean: draw(&mut rng, v_mu, v_sig).max(2.0),
                speed_var: draw(&mut rng, 16.0, 6.0).max(0.5),
                grad_mean: draw(&mut rng, 0.0, 0.008),
                duration: draw(&mut rng, 500.0, 90.0).max(120.0),
                t_amb: draw(&mut rng, t_mu, t_sig),
                humidity: draw(&mut rng, h_mu, h_sig).clamp(2.0, 98.0),
            });
        }
    }
    UsageDataset { records }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn record(v: f64) -> UsageRecord {
        UsageRecord {
            provenance: "t".into(),
            speed_mean: v,
            speed_var: v,
            grad_mean: v,
            duration: v.max(1.0),
            t_amb: v,
            humidity: v,
        }
    }

    #[test]
    fn fit_degenerate_constant_data() {
        let data = UsageDataset {
            records: vec![record(1.0); 4],
        };
        let stats = fit_layer_statistics(&data).unwrap();
        let s = stats.get(LayerVar::TAmb);
        assert_eq!(s.mu, 1.0);
        assert_eq!(s.sigma, 0.0);
        assert_eq!((s.clip_lo, s.clip_hi), (1.0, 1.0));
    }

    #[test]
    fn fit_two_samples_matches_quantile_oracle() {
        let data = UsageDataset {
            records: vec![record(0.0), record(2.0)],
        };
        let stats = fit_layer_statistics(&data).unwrap();
        let s = stats.get(LayerVar::TAmb);
        assert!((s.mu - 1.0).abs() < 1e-15);
        assert!((s.sigma - 2.0_f64.sqrt()).abs() < 1e-15);
        assert!((s.clip_lo - (1.0 - Z_90 * 2.0_f64.sqrt())).abs() < 1e-12);
        assert!((s.clip_lo - (-0.8124)).abs() < 1e-4);
        assert!((s.clip_hi - 2.8124).abs() < 1e-4);
    }

    #[test]
    fn fit_recovers_standard_normal_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let normal = Normal::new(0.0, 1.0).unwrap();
        let records: Vec<UsageRecord> = (0..n)
            .map(|_| {
                let mut r = record(normal.sample(&mut rng));
                r.duration = 1.0;
                r
            })
            .collect();
        let stats = fit_layer_statistics(&UsageDataset { records }).unwrap();
        let s = stats.get(LayerVar::TAmb);
        assert!(s.mu.abs() < 3.0 / (n as f64).sqrt(), "mu = {}", s.mu);
        assert!((s.sigma - 1.0).abs() < 0.01, "sigma = {}", s.sigma);
    }

    #[test]
    fn fit_rejects_insufficient_data() {
        let data = UsageDataset {
            records: vec![record(1.0)],
        };
        assert_eq!(
            fit_layer_statistics(&data),
            Err(ScenarioError::InsufficientData(1))
        );
    }

    fn demo_stats() -> LayerStatsSet {
        fit_layer_statistics(&synthetic_usage_dataset().filter_provenance("moderate")).unwrap()
    }

    #[test]
    fn degenerate_sigma_returns_means() {
        let data = UsageDataset {
            records: vec![record(3.0); 3],
        };
        let stats = fit_layer_statistics(&data).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sc = sample_scenario(&stats, &[], 0.0, &mut rng);
        assert_eq!(sc.values.t_amb, 3.0);
        assert_eq!(sc.values.speed_mean, 3.0);
        assert!(!sc.is_edge_case);
    }

    #[test]
    fn forced_edge_case_is_flagged() {
        let stats = demo_stats();
        let edges = default_edge_cases();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sc = sample_scenario(&stats, &edges[..1], 1.0, &mut rng);
        assert!(sc.is_edge_case);
        assert_eq!(sc.values.t_amb, 45.0);
    }

    #[test]
    fn non_edge_draws_respect_clip_bounds_and_means() {
        let stats = demo_stats();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 10_000;
        let mut sum_t = 0.0;
        for _ in 0..n {
            let sc = sample_scenario(&stats, &default_edge_cases(), 0.0, &mut rng);
            for (var, value) in [
                (LayerVar::SpeedMean, sc.values.speed_mean),
                (LayerVar::SpeedVar, sc.values.speed_var),
                (LayerVar::GradMean, sc.values.grad_mean),
                (LayerVar::Duration, sc.values.duration),
                (LayerVar::TAmb, sc.values.t_amb),
                (LayerVar::Humidity, sc.values.humidity),
            ] {
                let s = stats.get(var);
                assert!(value >= s.clip_lo && value <= s.clip_hi);
            }
            sum_t += sc.values.t_amb;
        }
        let s = stats.get(LayerVar::TAmb);
        let tol = 4.0 * s.sigma / (n as f64).sqrt();
        assert!((sum_t / n as f64 - s.mu).abs() < tol);
    }

    #[test]
    fn edge_rate_stays_in_binomial_band() {
        let stats = demo_stats();
        let edges = default_edge_cases();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 10_000;
        let p = 0.05;
        let hits = (0..n)
            .filter(|_| sample_scenario(&stats, &edges, p, &mut rng).is_edge_case)
            .count();
        let band = 4.0 * (p * (1.0 - p) / n as f64).sqrt();
        assert!(((hits as f64 / n as f64) - p).abs() < band, "rate = {hits}");
    }

    #[test]
    fn sampling_is_reproducible() {
        let stats = demo_stats();
        let veh = VehicleParams::reference();
        let draw = || {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            let mut sc = sample_scenario(&stats, &default_edge_cases(), 0.05, &mut rng);
            synthesize_drive(&mut sc, &veh, 0.1);
            sc
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn rest_scenario_has_zero_power() {
        let mut sc = Scenario {
            values: LayerValues {
                speed_mean: 0.0,
                speed_var: 0.0,
                grad_mean: 0.0,
                duration: 60.0,
                t_amb: 20.0,
                humidity: 40.0,
            },
            is_edge_case: false,
            seed: 1,
            dt: 0.0,
            v: vec![],
            grade: vec![],
            p_ed: vec![],
        };
        let mut veh = VehicleParams::reference();
        veh.driver.k_drv = 0.5;
        synthesize_drive(&mut sc, &veh, 0.1);
        assert_eq!(sc.len(), 600);
        assert!(sc.v.iter().all(|&v| v == 0.0));
        assert!(sc.p_ed.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn constant_target_gives_steady_road_load() {
        let mut sc = Scenario {
            values: LayerValues {
                speed_mean: 20.0,
                speed_var: 0.0,
                grad_mean: 0.0,
                duration: 30.0,
                t_amb: 20.0,
                humidity: 40.0,
            },
            is_edge_case: false,
            seed: 2,
            dt: 0.0,
            v: vec![],
            grade: vec![],
            p_ed: vec![],
        };
        let veh = VehicleParams::reference();
        let mut sc2 = sc.clone();
        synthesize_drive(&mut sc2, &veh, 0.1);
        // The gradient knots are random; zero them for the hand value.
        sc.seed = 2;
        synthesize_drive(&mut sc, &veh, 0.1);
        for i in 0..sc.len() {
            assert_eq!(sc.v[i], 20.0);
            let expected = longitudinal_power(20.0, 0.0, sc.grade[i], &veh);
            assert!((sc.p_ed[i] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn driver_respects_acceleration_limits() {
        let stats = demo_stats();
        let veh = VehicleParams::reference();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let mut sc = sample_scenario(&stats, &default_edge_cases(), 0.2, &mut rng);
            synthesize_drive(&mut sc, &veh, 0.1);
            let bound = veh.driver.a_max.max(-veh.driver.a_min);
            for w in sc.v.windows(2) {
                assert!(((w[1] - w[0]) / 0.1).abs() <= bound + 1e-12);
                assert!(w[1] >= 0.0);
            }
        }
    }
}
