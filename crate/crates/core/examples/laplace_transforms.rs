//! Evaluates the interference Laplace transforms in closed form and checks
//! each against a brute-force average of `exp(-s I)` over independent draws
//! of its point-process field, plus the radar round-trip fading transform
//! against its own sampler.

use fdisac::interference::{
    lt_conditioned, lt_h1_squared, lt_repulsion, lt_unconditioned, LtContext,
};
use fdisac::netsim::{
    mc_lt_conditioned, mc_lt_h1_squared, mc_lt_repulsion, mc_lt_unconditioned,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lambda = 1e-5;
    let eta = 4.0;
    let psi: f64 = 150.0;
    let ctx = LtContext::new(lambda, eta);
    let n = 20_000;

    println!("lambda = {lambda:.0e}, eta = {eta}, guard radius psi = {psi}, {n} field draws");
    println!(
        "{:>10}  {:<13}  {:>10}  {:>20}  {:>7}",
        "s", "transform", "closed", "sampled +- stderr", "z"
    );
    for exponent in [-1.0, 0.0, 1.0] {
        let s = psi.powi(4) * 10f64.powf(exponent);
        let rows = [
            (
                "unconditioned",
                lt_unconditioned(s, psi, &ctx),
                mc_lt_unconditioned(
                    s,
                    psi,
                    lambda,
                    eta,
                    n,
                    11,
                    lt_unconditioned(s, psi, &ctx),
                    lt_unconditioned(2.0 * s, psi, &ctx),
                ),
            ),
            (
                "conditioned",
                lt_conditioned(s, psi, &ctx),
                mc_lt_conditioned(
                    s,
                    psi,
                    lambda,
                    eta,
                    n,
                    12,
                    lt_conditioned(s, psi, &ctx),
                    lt_conditioned(2.0 * s, psi, &ctx),
                ),
            ),
            (
                "repulsion",
                lt_repulsion(s, &ctx)?,
                mc_lt_repulsion(
                    s,
                    lambda,
                    eta,
                    n,
                    13,
                    lt_repulsion(s, &ctx)?,
                    lt_repulsion(2.0 * s, &ctx)?,
                ),
            ),
        ];
        for (name, closed, mc) in rows {
            println!(
                "{s:>10.3e}  {name:<13}  {closed:>10.6}  {:>12.6} +- {:.1e}  {:>+7.2}",
                mc.value,
                mc.stderr,
                (mc.value - closed) / mc.stderr
            );
        }
    }

    println!();
    println!("radar round-trip fading: E[exp(-s h1^2)], 10^6 draws");
    println!("{:>6}  {:>10}  {:>20}  {:>7}", "s", "closed", "sampled +- stderr", "z");
    for s in [0.1, 1.0, 10.0] {
        let closed = lt_h1_squared(s);
        let mc = mc_lt_h1_squared(s, 1_000_000, 17);
        println!(
            "{s:>6}  {closed:>10.6}  {:>12.6} +- {:.1e}  {:>+7.2}",
            mc.value,
            mc.stderr,
            (mc.value - closed) / mc.stderr
        );
    }
    Ok(())
}
