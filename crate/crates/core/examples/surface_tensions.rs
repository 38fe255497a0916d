//! Surface-tension functions for three and four phases, the consistency
//! certifier, and the time-step condition they imply.
//!
//!     cargo run --release --example surface_tensions -- 1 2 2

use dbpf::scheme::check_stability_condition;
use dbpf::tension::{build_gamma_n, gamma1_ternary, gamma2_ternary, verify_consistency, DEFAULT_ALPHA};
use dbpf::{GammaSet, ModelParams, SchemeParams, SurfaceTensions};

fn main() -> dbpf::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let [s23, s12, s13] = match args[..] {
        [a, b, c] => [a, b, c],
        _ => [1.0, 2.0, 2.0],
    };
    let s = SurfaceTensions::ternary(s23, s12, s13)?;
    println!("sigma23={s23} sigma12={s12} sigma13={s13}, alpha={DEFAULT_ALPHA}");
    println!("{:>6} {:>12} {:>12}", "x", "gamma1(x)", "gamma2(x)");
    for k in 0..=8 {
        let x = -1.0 + 0.25 * k as f64;
        let (g1, _) = gamma1_ternary(x, &s, DEFAULT_ALPHA)?;
        let (g2, _) = gamma2_ternary(x, &s, DEFAULT_ALPHA)?;
        println!("{x:>6.2} {g1:>12.6} {g2:>12.6}");
    }

    let g = GammaSet::ternary(&s, DEFAULT_ALPHA)?;
    let r = verify_consistency(&g, &s, 1e-8);
    println!(
        "ternary: mechanic {} energetic {} algebraic {} dynamic {} (lambda {:?})",
        r.mechanic.pass, r.energetic.pass, r.algebraic.pass, r.dynamic.pass, r.lambdas
    );

    // four phases through the recursive construction
    let s4 = SurfaceTensions::from_upper(4, &[1.0, 1.3, 0.8, 1.1, 0.9, 1.6])?;
    let g4 = build_gamma_n(&s4, DEFAULT_ALPHA)?;
    let r4 = verify_consistency(&g4, &s4, 1e-8);
    println!(
        "four phases: mechanic {} energetic {} algebraic {} dynamic {} (lambda {:?}, doublings {:?})",
        r4.mechanic.pass,
        r4.energetic.pass,
        r4.algebraic.pass,
        r4.dynamic.pass,
        r4.lambdas,
        r4.lambda_doublings
    );

    let p = ModelParams::ternary(0.01, [s23, s12, s13], DEFAULT_ALPHA, 1e-4)?;
    for a in [100.0, 1000.0] {
        let sp = SchemeParams::new(0.01)?.with_stabilizers(a)?;
        let st = check_stability_condition(&p, &sp);
        println!("tau=0.01 A=B={a}: condition holds {} (margin {:.3})", st.holds, st.margin);
        for t in &st.terms {
            println!("  {:>3}: {:.3} available vs {:.3} needed", t.name, t.available, t.lipschitz);
        }
    }
    Ok(())
}
