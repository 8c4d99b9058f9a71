use wicksell_core::verify::*;
fn main() {
    let t = std::time::Instant::now();
    let rep = run_scenario(Scenario::All, &DEFAULT_ALPHAS, &DEFAULT_ETAS, &VerifyConfig::default());
    print!("{}", render_report(&rep, "markdown").unwrap());
    println!("{:?}", t.elapsed());
}
