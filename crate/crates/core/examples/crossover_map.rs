//! Maps the crossover distance as a function of uplink power: for each
//! power level, the target distance at which joint detect-second overtakes
//! detect-first. The resulting curve is a deployment rule of thumb — targets
//! nearer than it favor detecting before decoding.

use fdisac::analysis::{AnalysisEngine, CrossoverVariable};
use fdisac::params::{NetworkParams, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = Scenario::default();
    let v = base.params.v();
    let engine = AnalysisEngine::new(&base.params)?;
    let grid: Vec<f64> = (0..23).map(|i| (1.0 + 0.5 * i as f64) * v).collect();

    println!("uplink threshold -40 dB, detection threshold -60 dB, zeta = 1e-9");
    println!("{:>6}  {:>22}", "p_u", "crossover distance (v)");
    for i in 0..11 {
        let p_u = 0.05 + (1.0 - 0.05) * i as f64 / 10.0;
        let template = Scenario {
            theta_u: 1e-4,
            theta_b: 1e-6,
            params: NetworkParams {
                p_u,
                zeta: 1e-9,
                ..base.params
            },
            ..base
        };
        match engine.find_crossover(&template, CrossoverVariable::R1, &grid)? {
            Some(root) => println!("{p_u:>6.3}  {:>22.3}", root / v),
            None => println!("{p_u:>6.3}  {:>22}", "none in [1 v, 12 v]"),
        }
    }
    Ok(())
}
