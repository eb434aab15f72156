// scratch probe: oscillation check at large coolant-to-ambient differences
use thermotune::controller::{ParameterSet, PHI_MAX_I, PHI_MAX_P};
use thermotune::plant::{PlantParams, VehicleParams};
use thermotune::scenario::{synthesize_drive, LayerValues, Scenario};
use thermotune::tsenv::{compute_reward, eval_scenario, EnvConfig};

fn drive(t_amb: f64, speed: f64, dur: f64) -> Scenario {
    let mut sc = Scenario {
        values: LayerValues { speed_mean: speed, speed_var: 25.0, grad_mean: 0.02, duration: dur, t_amb, humidity: 30.0 },
        is_edge_case: false, seed: 11, dt: 0.0, v: vec![], grade: vec![], p_ed: vec![],
    };
    synthesize_drive(&mut sc, &VehicleParams::reference(), 0.1);
    sc
}

fn main() {
    let theta = PlantParams::reference();
    let cfg = EnvConfig::default();
    // high speed uphill at moderate ambient: big heat flux, warm-up completes
    for (t_amb, speed, dur, label) in [(25.0, 40.0, 1200.0, "mod-fast"), (45.0, 45.0, 600.0, "desert-edge"), (-20.0, 35.0, 1200.0, "polar-edge")] {
        for (p, i, tag) in [(0.05, 0.005, "cons"), (PHI_MAX_P, PHI_MAX_I, "max")] {
            let ps = ParameterSet::uniform(p, i);
            let sc = drive(t_amb, speed, dur);
            let out = eval_scenario(&sc, &theta, &ps, &cfg);
            let n = out.trajectory.len();
            let tail = &out.trajectory.e_t[n*3/4..];
            let mae: f64 = tail.iter().map(|e| e.abs()).sum::<f64>() / tail.len() as f64;
            let emax = tail.iter().fold(0.0f64, |a, e| a.max(e.abs()));
            let du: f64 = out.trajectory.u_vlv.windows(2).map(|w| (w[1]-w[0]).abs()).sum::<f64>() / n as f64;
            let banks: usize = out.trajectory.bank.iter().map(|&b| b as usize).sum();
            let r = if out.failed { cfg.r_min } else { compute_reward(&out.raw_window.e_t, &out.raw_window.u_vlv, cfg.b1, cfg.b2, cfg.r_min).unwrap() };
            println!("{label:11} {tag:4} failed={} bank1_frac={:.2} tail_mae={mae:8.3} tail_emax={emax:8.3} mean|du|={du:.4} r={r:9.3}", out.failed, banks as f64 / n as f64);
        }
    }
}
