//! Gain-scheduled PI controller with bilinear lookup tables over the control
//! error and the coolant-to-ambient temperature difference, two controller
//! banks selected by the thermal operating state, conditional anti-windup,
//! and output saturation to [0,1].

use crate::plant::ThermalState;
use thiserror::Error;

/// Grid size of the reference tables (5x5 per table, 2 tables per bank,
/// 2 banks: 100 tunable values).
pub const TABLE_DIM: usize = 5;
/// Number of controller banks.
pub const BANK_COUNT: usize = 2;
/// Upper clip limit for proportional gains (1/K).
pub const PHI_MAX_P: f64 = 2.0;
/// Upper clip limit for integral gains (1/(K*s)).
pub const PHI_MAX_I: f64 = 0.2;
/// Hard bound on the error integrator (K*s).
pub const WINDUP_BOUND: f64 = 1.0e4;

/// Default control-error breakpoints (K), denser near zero.
pub const DEFAULT_E_T_AXIS: [f64; TABLE_DIM] = [-10.0, -3.0, 0.0, 3.0, 10.0];
/// Default coolant-minus-ambient breakpoints (K).
pub const DEFAULT_DT_AMB_AXIS: [f64; TABLE_DIM] = [0.0, 10.0, 25.0, 45.0, 70.0];

#[derive(Debug, Error, PartialEq)]
pub enum ControllerError {
    #[error("invalid parameter table: {0}")]
    InvalidTable(String),
    #[error("bank index {0} out of range")]
    BadBank(usize),
}

/// A gridded gain map with breakpoint axes and an upper clip limit.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterTable {
    /// Row-major values, `axis_i.len() x axis_j.len()`.
    values: Vec<f64>,
    /// Strictly increasing control-error breakpoints (K).
    axis_i: Vec<f64>,
    /// Strictly increasing ambient-difference breakpoints (K).
    axis_j: Vec<f64>,
    /// Values are kept in [0, phi_max].
    phi_max: f64,
}

impl ParameterTable {
    pub fn new(
        values: Vec<f64>,
        axis_i: Vec<f64>,
        axis_j: Vec<f64>,
        phi_max: f64,
    ) -> Result<Self, ControllerError> {
        if axis_i.len() < 2 || axis_j.len() < 2 {
            return Err(ControllerError::InvalidTable(
                "each axis needs at least 2 breakpoints".into(),
            ));
        }
        for axis in [&axis_i, &axis_j] {
            if axis.windows(2).any(|w| !(w[0] < w[1])) || axis.iter().any(|v| !v.is_finite()) {
                return Err(ControllerError::InvalidTable(
                    "axis breakpoints must be finite and strictly increasing".into(),
                ));
            }
        }
        if values.len() != axis_i.len() * axis_j.len() {
            return Err(ControllerError::InvalidTable(format!(
                "expected {} values, got {}",
                axis_i.len() * axis_j.len(),
                values.len()
            )));
        }
        if !(phi_max.is_finite() && phi_max > 0.0) {
            return Err(ControllerError::InvalidTable("phi_max must be > 0".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > phi_max) {
            return Err(ControllerError::InvalidTable(format!(
                "values must be finite and within [0, {phi_max}]"
            )));
        }
        Ok(ParameterTable {
            values,
            axis_i,
            axis_j,
            phi_max,
        })
    }

    /// Constant-valued table on the default axes.
    pub fn constant(value: f64, phi_max: f64) -> Self {
        ParameterTable::new(
            vec![value; TABLE_DIM * TABLE_DIM],
            DEFAULT_E_T_AXIS.to_vec(),
            DEFAULT_DT_AMB_AXIS.to_vec(),
            phi_max,
        )
        .expect("constant table is valid")
    }

    pub fn rows(&self) -> usize {
        self.axis_i.len()
    }

    pub fn cols(&self) -> usize {
        self.axis_j.len()
    }

    pub fn axis_i(&self) -> &[f64] {
        &self.axis_i
    }

    pub fn axis_j(&self) -> &[f64] {
        &self.axis_j
    }

    pub fn phi_max(&self) -> f64 {
        self.phi_max
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols() + j]
    }

    /// Set a node value, clipped to [0, phi_max].
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let cols = self.cols();
        self.values[i * cols + j] = value.clamp(0.0, self.phi_max);
    }
}

/// Axis cell location for interpolation: clamped lower index plus fraction.
fn locate(axis: &[f64], x: f64) -> (usize, f64) {
    let n = axis.len();
    if x <= axis[0] {
        return (0, 0.0);
    }
    if x >= axis[n - 1] {
        return (n - 2, 1.0);
    }
    let mut idx = 0;
    while idx + 2 < n && x >= axis[idx + 1] {
        idx += 1;
    }
    let frac = (x - axis[idx]) / (axis[idx + 1] - axis[idx]);
    (idx, frac)
}

/// Bilinear gain lookup with flat extrapolation beyond the axis ranges.
pub fn lookup(table: &ParameterTable, e_t: f64, dt_amb: f64) -> f64 {
    let (i, fi) = locate(&table.axis_i, e_t);
    let (j, fj) = locate(&table.axis_j, dt_amb);
    let v00 = table.get(i, j);
    let v01 = table.get(i, j + 1);
    let v10 = table.get(i + 1, j);
    let v11 = table.get(i + 1, j + 1);
    v00 * (1.0 - fi) * (1.0 - fj) + v01 * (1.0 - fi) * fj + v10 * fi * (1.0 - fj) + v11 * fi * fj
}

/// Cell visited by a table query, for action-mask construction. Exact hits on
/// an interior breakpoint tie toward the lower cell; queries beyond the axis
/// range clamp to the edge cells.
pub fn visited_cell(axis: &[f64], x: f64) -> usize {
    let n = axis.len();
    // last breakpoint strictly below x
    let mut idx: usize = 0;
    for (k, bp) in axis.iter().enumerate() {
        if *bp < x {
            idx = k;
        }
    }
    idx.min(n - 2)
}

/// One {P, I} table pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerBank {
    pub p: ParameterTable,
    pub i: ParameterTable,
}

/// The full tunable parameter set: two banks of {P, I} tables.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    pub banks: [ControllerBank; BANK_COUNT],
}

impl ParameterSet {
    /// Uniform-gain set on the default axes.
    pub fn uniform(p_gain: f64, i_gain: f64) -> Self {
        let bank = ControllerBank {
            p: ParameterTable::constant(p_gain, PHI_MAX_P),
            i: ParameterTable::constant(i_gain, PHI_MAX_I),
        };
        ParameterSet {
            banks: [bank.clone(), bank],
        }
    }

    /// The conservative stable set used to initialize training episodes.
    pub fn conservative() -> Self {
        ParameterSet::uniform(0.05, 0.005)
    }

    /// Total number of scalar gain values (100 in the reference configuration).
    pub fn param_count(&self) -> usize {
        self.banks
            .iter()
            .map(|b| b.p.values.len() + b.i.values.len())
            .sum()
    }
}

/// PI controller state: error integrator and last output.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControllerState {
    /// Accumulated integral of the control error (K*s).
    pub integrator: f64,
    /// Last commanded output.
    pub last_u: f64,
}

/// Deterministic bank selection from the operating states. The thermal state
/// alone decides; the electrical state only modulates the plant heat input.
pub fn select_bank(xi_th: ThermalState, _xi_el: usize) -> usize {
    match xi_th {
        ThermalState::ConfigA => 0,
        ThermalState::ConfigB => 1,
    }
}

/// One discrete PI step: gains from the bank's tables at the current
/// operating point, conditional anti-windup, output saturated to [0,1].
pub fn control_step(
    cs: ControllerState,
    ps: &ParameterSet,
    bank: usize,
    e_t: f64,
    dt_amb: f64,
    dt: f64,
) -> (f64, ControllerState) {
    let bank = &ps.banks[bank];
    let k_p = lookup(&bank.p, e_t, dt_amb);
    let k_i = lookup(&bank.i, e_t, dt_amb);

    let candidate = (cs.integrator + e_t * dt).clamp(-WINDUP_BOUND, WINDUP_BOUND);
    let u_candidate = k_p * e_t + k_i * candidate;
    // Halt integration when the output is saturated and the error pushes
    // further into the saturation.
    let integrator = if (u_candidate > 1.0 && e_t > 0.0) || (u_candidate < 0.0 && e_t < 0.0) {
        cs.integrator
    } else {
        candidate
    };
    let u = (k_p * e_t + k_i * integrator).clamp(0.0, 1.0);
    (
        u,
        ControllerState {
            integrator,
            last_u: u,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn table_with(values: Vec<f64>) -> ParameterTable {
        ParameterTable::new(
            values,
            DEFAULT_E_T_AXIS.to_vec(),
            DEFAULT_DT_AMB_AXIS.to_vec(),
            PHI_MAX_P,
        )
        .unwrap()
    }

    #[test]
    fn lookup_reproduces_nodes() {
        let mut values = vec![0.0; 25];
        for (k, v) in values.iter_mut().enumerate() {
            *v = (k as f64) * 0.01;
        }
        let t = table_with(values);
        for i in 0..5 {
            for j in 0..5 {
                let got = lookup(&t, DEFAULT_E_T_AXIS[i], DEFAULT_DT_AMB_AXIS[j]);
                assert!((got - t.get(i, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn lookup_cell_center_averages_corners() {
        let mut values = vec![0.0; 25];
        values[0] = 1.0; // (0,0)
        values[1] = 2.0; // (0,1)
        values[5] = 3.0; // (1,0)
        values[6] = 4.0; // (1,1)
        let t = ParameterTable::new(
            values,
            DEFAULT_E_T_AXIS.to_vec(),
            DEFAULT_DT_AMB_AXIS.to_vec(),
            10.0,
        )
        .unwrap();
        let e = 0.5 * (DEFAULT_E_T_AXIS[0] + DEFAULT_E_T_AXIS[1]);
        let d = 0.5 * (DEFAULT_DT_AMB_AXIS[0] + DEFAULT_DT_AMB_AXIS[1]);
        assert!((lookup(&t, e, d) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn lookup_linear_in_one_dimension() {
        // corners {0,10} on axis_i in {0,1}: query at 0.3 -> 3.0
        let t = ParameterTable::new(
            vec![0.0, 0.0, 10.0, 10.0],
            vec![0.0, 1.0],
            vec![0.0, 1.0],
            20.0,
        )
        .unwrap();
        assert!((lookup(&t, 0.3, 0.0) - 3.0).abs() < 1e-12);
        assert!((lookup(&t, 0.3, 1.0) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lookup_clamps_beyond_axis_range() {
        let mut values = vec![0.5; 25];
        values[0] = 0.1;
        values[24] = 0.9;
        let t = table_with(values);
        assert_eq!(lookup(&t, -100.0, -100.0), 0.1);
        assert_eq!(lookup(&t, 100.0, 100.0), 0.9);
    }

    #[test]
    fn lookup_is_continuous_across_breakpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let values: Vec<f64> = (0..25).map(|_| rng.gen_range(0.0..1.0)).collect();
        let t = table_with(values);
        for &bp in &DEFAULT_E_T_AXIS {
            let lo = lookup(&t, bp - 1e-9, 12.0);
            let hi = lookup(&t, bp + 1e-9, 12.0);
            assert!((lo - hi).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_error_is_a_fixed_point() {
        let ps = ParameterSet::uniform(0.1, 0.01);
        let (u, cs) = control_step(ControllerState::default(), &ps, 0, 0.0, 10.0, 1.0);
        assert_eq!(u, 0.0);
        assert_eq!(cs.integrator, 0.0);
    }

    #[test]
    fn matches_closed_form_discrete_pi() {
        let ps = ParameterSet::uniform(0.1, 0.01);
        let mut cs = ControllerState::default();
        let mut u = 0.0;
        for k in 1..=10 {
            let (u_k, cs_k) = control_step(cs, &ps, 0, 2.0, 10.0, 1.0);
            cs = cs_k;
            u = u_k;
            let expected = 0.1 * 2.0 + 0.01 * (2.0 * k as f64);
            assert!((u - expected).abs() < 1e-12);
        }
        assert!((u - 0.4).abs() < 1e-12);
    }

    #[test]
    fn saturation_freezes_the_integrator() {
        let ps = ParameterSet::uniform(1.0, 0.01);
        let cs0 = ControllerState {
            integrator: 3.0,
            last_u: 0.0,
        };
        let (u, cs) = control_step(cs0, &ps, 0, 5.0, 10.0, 1.0);
        assert_eq!(u, 1.0);
        assert_eq!(cs.integrator, 3.0);
        // Integration resumes once the output leaves the saturated range.
        let gentle = ParameterSet::uniform(0.01, 0.01);
        let (_, cs2) = control_step(cs, &gentle, 0, -1.0, 10.0, 1.0);
        assert_eq!(cs2.integrator, 2.0);
    }

    #[test]
    fn integrator_stays_bounded() {
        let ps = ParameterSet::uniform(0.0, 1e-9);
        let mut cs = ControllerState::default();
        for _ in 0..200_000 {
            let (_, next) = control_step(cs, &ps, 0, 10.0, 10.0, 1.0);
            cs = next;
        }
        assert!(cs.integrator.abs() <= WINDUP_BOUND);
    }

    #[test]
    fn raising_gains_never_lowers_raw_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let p = rng.gen_range(0.0..0.5);
            let i = rng.gen_range(0.0..0.05);
            let e = rng.gen_range(0.0..8.0);
            let d = rng.gen_range(0.0..60.0);
            let cs = ControllerState {
                integrator: rng.gen_range(0.0..5.0),
                last_u: 0.0,
            };
            let lo = control_step(cs, &ParameterSet::uniform(p, i), 0, e, d, 0.1).0;
            let hi = control_step(cs, &ParameterSet::uniform(p * 1.5, i * 1.5), 0, e, d, 0.1).0;
            assert!(hi >= lo - 1e-15);
        }
    }

    #[test]
    fn bank_selection_follows_thermal_state() {
        assert_eq!(select_bank(ThermalState::ConfigA, 0), 0);
        assert_eq!(select_bank(ThermalState::ConfigA, 1), 0);
        assert_eq!(select_bank(ThermalState::ConfigB, 0), 1);
        let s = ThermalState::ConfigA;
        assert_eq!(
            select_bank(s.toggle().toggle(), 0),
            select_bank(s, 0),
            "toggling twice returns the original bank"
        );
    }

    #[test]
    fn visited_cell_ties_break_low() {
        let axis = DEFAULT_E_T_AXIS;
        assert_eq!(visited_cell(&axis, 0.0), 1); // exact interior breakpoint -> lower cell
        assert_eq!(visited_cell(&axis, -20.0), 0);
        assert_eq!(visited_cell(&axis, 20.0), 3);
        assert_eq!(visited_cell(&axis, 1.0), 2);
    }

    #[test]
    fn parameter_set_has_100_values() {
        assert_eq!(ParameterSet::conservative().param_count(), 100);
    }

    #[test]
    fn table_validation() {
        assert!(ParameterTable::new(vec![0.0; 4], vec![0.0, 1.0], vec![1.0, 0.0], 1.0).is_err());
        assert!(ParameterTable::new(vec![0.0; 3], vec![0.0, 1.0], vec![0.0, 1.0], 1.0).is_err());
        assert!(ParameterTable::new(vec![2.0; 4], vec![0.0, 1.0], vec![0.0, 1.0], 1.0).is_err());
    }
}
