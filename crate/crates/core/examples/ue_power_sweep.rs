//! Compares the two SuIC orders as the uplink transmit power grows at a
//! fixed target distance. A stronger uplink is easier to decode and a worse
//! masker of the radar echo, so the preferred order flips once along the
//! power axis.

use fdisac::analysis::{AnalysisEngine, CrossoverVariable};
use fdisac::params::{NetworkParams, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = Scenario::default();
    let template = Scenario {
        r1: 7.0 * base.params.v(),
        theta_u: 1e-3,
        theta_b: 1e-6,
        params: NetworkParams {
            zeta: 1e-9,
            ..base.params
        },
        ..base
    };
    let engine = AnalysisEngine::new(&template.params)?;

    println!("r1 = 7 v, uplink threshold -30 dB, detection threshold -60 dB");
    println!(
        "{:>6}  {:>13}  {:>15}  {:>9}",
        "p_u", "detect_bs_1st", "detect_2nd_joint", "gap"
    );
    let grid: Vec<f64> = (0..25).map(|i| 0.02 + (1.0 - 0.02) * i as f64 / 24.0).collect();
    for &p_u in &grid {
        let sc = Scenario {
            params: NetworkParams {
                p_u,
                ..template.params
            },
            ..template
        };
        let q = engine.quantities(&sc)?;
        let first = q.detect_bs_first.value;
        let joint = q.detect_bs_second_joint.value;
        println!(
            "{p_u:>6.3}  {first:>13.4}  {joint:>15.4}  {:>+9.4}",
            first - joint
        );
    }

    match engine.find_crossover(&template, CrossoverVariable::Pu, &grid)? {
        Some(root) => println!("\nthe preferred order flips at p_u = {root:.4}"),
        None => println!("\none order dominates over the whole range"),
    }
    Ok(())
}
