//! Sweeps the residual self-interference fraction zeta across nine decades
//! and watches each probability degrade. The RSI floor hits the detection
//! curves first, the BS-side uplink decode later, and the UE-side downlink
//! decode last, since only a fraction `p_u zeta` of the much weaker uplink
//! power leaks back into the UE's receiver.

use fdisac::analysis::AnalysisEngine;
use fdisac::params::{NetworkParams, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = Scenario::default();
    let template = Scenario {
        r1: 7.0 * base.params.v(),
        theta_b: 1e-4,
        theta_u: 1e-4,
        ..base
    };
    let engine = AnalysisEngine::new(&template.params)?;

    println!("r1 = 7 v, both thresholds -40 dB");
    println!(
        "{:>8}  {:>9}  {:>13}  {:>15}  {:>13}  {:>15}",
        "zeta", "decode_ue", "decode_bs_1st", "detect_2nd_jnt", "detect_bs_1st", "decode_2nd_jnt"
    );
    for i in 0..19 {
        let zeta = 10f64.powf(-12.0 + 0.5 * i as f64);
        let sc = Scenario {
            params: NetworkParams {
                zeta,
                ..template.params
            },
            ..template
        };
        let q = engine.quantities(&sc)?;
        println!(
            "{zeta:>8.1e}  {:>9.4}  {:>13.4}  {:>15.4}  {:>13.4}  {:>15.4}",
            q.decode_ue.value,
            q.decode_bs_first.value,
            q.detect_bs_second_joint.value,
            q.detect_bs_first.value,
            q.decode_bs_second_joint.value
        );
    }
    Ok(())
}
