use wicksell_core::evt::{
    block_minima_experiment, gumbel_decay_check, local_tail_exponent, min_stable_cdf, reciprocal_hill,
    rv_exponent_probe, MinStableLaw, ProbePoint, TailMethod, TailModel, DEFAULT_S_LIST,
};
use wicksell_core::simulate::sample_section_radii;
use wicksell_core::transform::{tabulate_section_law, GridSpec};
use wicksell_core::{LawSpec, RadiusLawF64, WicksellError};

fn law(spec: &str) -> RadiusLawF64 {
    LawSpec::parse(spec).unwrap().build().unwrap()
}

#[test]
fn min_stable_reference_values() {
    let e1 = 0.6321206;
    assert!((min_stable_cdf(MinStableLaw::Gumbel, 0.0) - e1).abs() < 1e-7);
    assert!((min_stable_cdf(MinStableLaw::Weibull { alpha: 2.0 }, 1.0) - e1).abs() < 1e-7);
    for alpha in [0.3, 1.0, 4.0] {
        assert!(min_stable_cdf(MinStableLaw::Weibull { alpha }, 1e-12) < 1e-3);
        assert_eq!(min_stable_cdf(MinStableLaw::Weibull { alpha }, -1.0), 0.0);
    }
}

#[test]
fn power_law_exponent_is_exact() {
    let s = DEFAULT_S_LIST.to_vec();
    for alpha in [0.25, 0.5, 1.0, 1.7, 3.0] {
        let p = law(&format!("power --alpha {alpha}"));
        let est = local_tail_exponent(|x| p.cdf(x), 0.0, &s, 2.0, TailModel::LogCorrected).unwrap();
        for pt in &est.slopes {
            assert!((pt.slope - alpha).abs() <= 8.0 * f64::EPSILON * alpha, "α={alpha} s={}: {}", pt.s, pt.slope);
        }
        assert!((est.beta_hat - alpha).abs() <= 64.0 * f64::EPSILON * alpha);
        assert_eq!(est.method, TailMethod::LocalExponent);
    }
}

#[test]
fn uniform_section_slopes() {
    let t = tabulate_section_law(&law("uniform"), 1, GridSpec::default()).unwrap();
    let one = local_tail_exponent(|x| t.cdf(x), 0.0, &[1e-4], 2.0, TailModel::Plain).unwrap();
    assert!((one.beta_hat - 1.9005).abs() < 1e-3, "{}", one.beta_hat);
    let s = DEFAULT_S_LIST.to_vec();
    let fit = local_tail_exponent(|x| t.cdf(x), 0.0, &s, 2.0, TailModel::LogCorrected).unwrap();
    assert!((fit.beta_hat - 2.0).abs() < 0.05, "{}", fit.beta_hat);
    assert_eq!(fit.slopes.len(), s.len());
    let json = serde_json::to_value(&fit).unwrap();
    assert_eq!(json["model"], "log-corrected");
    assert_eq!(json["method"], "local-exponent");
}

#[test]
fn reciprocal_hill_recovers_known_indices() {
    let sq = law("power --alpha 0.5").sample(100_000, 31);
    let est = reciprocal_hill(&sq, 0.0, 1000).unwrap();
    assert!((est.beta_hat - 0.5).abs() < 0.05, "{}", est.beta_hat);
    assert!((est.stderr.unwrap() - est.beta_hat / 1000f64.sqrt()).abs() < 1e-15);
    let root = law("power --alpha 2").sample(100_000, 32);
    let est = reciprocal_hill(&root, 0.0, 1000).unwrap();
    assert!((est.beta_hat - 2.0).abs() < 0.2, "{}", est.beta_hat);
    assert!(matches!(reciprocal_hill(&[0.3f64; 50], 0.0, 5), Err(WicksellError::DegenerateThreshold(_))));
}

#[test]
fn hill_scale_equivariance() {
    let xs = law("truncrecipexp").sample(20_000, 8);
    let base = reciprocal_hill(&xs, 0.0, 400).unwrap().beta_hat;
    for c in [1e-3, 0.7, 3.0, 1e4] {
        let scaled: Vec<f64> = xs.iter().map(|x| x * c).collect();
        let b = reciprocal_hill(&scaled, 0.0, 400).unwrap().beta_hat;
        assert!((b - base).abs() < 1e-11 * base, "c={c}: {b} vs {base}");
    }
}

#[test]
fn sum_of_regularly_varying_functions() {
    let dirac_table = tabulate_section_law(&law("dirac --rho 1"), 1, GridSpec::default()).unwrap();
    let pairs: [(&str, &str, f64); 3] = [
        ("power --alpha 0.5", "uniform", 0.5),
        ("uniform", "power --alpha 2.5", 1.0),
        ("power --alpha 1.5", "power --alpha 3", 1.5),
    ];
    for (a, b, want) in pairs {
        let (fa, fb) = (law(a), law(b));
        let p = rv_exponent_probe(|t| fa.cdf(t) + fb.cdf(t), ProbePoint::Zero, &[1e-4], 2.0).unwrap();
        assert!((p.last - want).abs() < 0.02, "{a} + {b}: {}", p.last);
    }
    let mixed = rv_exponent_probe(
        |t| dirac_table.cdf(t) + law("power --alpha 1.5").cdf(t),
        ProbePoint::Zero,
        &[1e-4],
        2.0,
    )
    .unwrap();
    assert!((mixed.last - 1.5).abs() < 0.02);
    let p = rv_exponent_probe(|t| dirac_table.cdf(t), ProbePoint::Zero, &[1e-2, 1e-3], 2.0).unwrap();
    assert!((p.last - 2.0).abs() < 0.01);
    let q = rv_exponent_probe(|t: f64| t.powf(-1.5) * (1.0 + 1.0 / t), ProbePoint::Infinity, &[1e2, 1e6], 2.0).unwrap();
    assert!((q.last + 1.5).abs() < 1e-5);
}

#[test]
fn decay_diagnostic_on_catalog_laws() {
    let tre = law("truncrecipexp");
    let d = gumbel_decay_check(|x| tre.cdf(x), 0.0, 4, 1e-2).unwrap();
    assert!(d.consistent_with_gumbel);
    assert!((d.values[3].1 / 3.720075976020836e-36 - 1.0).abs() < 1e-9);
    let p = law("power --alpha 0.5");
    let d = gumbel_decay_check(|x| p.cdf(x), 0.0, 1, 1e-2).unwrap();
    assert!(!d.consistent_with_gumbel && (d.values[0].1 - 10.0).abs() < 1e-12);
    let dirac = law("dirac --rho 1");
    let d = gumbel_decay_check(|x| dirac.cdf(x), 0.0, 4, 1e-2).unwrap();
    assert!(d.consistent_with_gumbel && d.values.iter().all(|v| v.1 == 0.0));
}

#[test]
fn block_minima_of_semicircle_sections() {
    let d = law("dirac --rho 1");
    let table = tabulate_section_law(&d, 1, GridSpec::default()).unwrap().to_law();
    let sampler = |m: usize, seed: u64| Ok(sample_section_radii(&d, 1, m, seed)?.values);
    let quantile = |p: f64| table.quantile(p);
    let right = block_minima_experiment(sampler, quantile, 0.0, 1000, 5000, MinStableLaw::Weibull { alpha: 2.0 }, 3)
        .unwrap();
    assert_eq!(right.normalized.len(), 5000);
    assert!(right.normalized.iter().all(|&v| v >= 0.0));
    assert!(right.ks_stat < 0.03, "{}", right.ks_stat);
    let wrong = block_minima_experiment(sampler, quantile, 0.0, 1000, 5000, MinStableLaw::Weibull { alpha: 1.0 }, 3)
        .unwrap();
    assert!(wrong.ks_stat > 0.15, "{}", wrong.ks_stat);
    assert!((right.a_m - (0.001f64 * 1.999).sqrt()).abs() < 1e-6);
}

#[test]
fn block_minima_of_power_law_radii() {
    let p = law("power --alpha 0.5");
    let res = block_minima_experiment(
        |m, seed| Ok(p.sample(m, seed)),
        |q| p.quantile(q),
        0.0,
        1000,
        5000,
        MinStableLaw::Weibull { alpha: 0.5 },
        17,
    )
    .unwrap();
    assert!(res.ks_stat < 0.03, "{}", res.ks_stat);
    assert!((0.0..=1.0).contains(&res.ks_stat));
    let json = serde_json::to_string(&res).unwrap();
    assert_eq!(serde_json::from_str::<wicksell_core::evt::BlockMinimaResult>(&json).unwrap(), res);
}

#[test]
fn estimators_agree_on_pure_power_tails() {
    let specs = ["dirac --rho 1", "power --alpha 0.5", "shifted --eta0 0.5 --inner power --alpha 0.5"];
    for (i, spec) in specs.iter().enumerate() {
        let l = law(spec);
        let table = tabulate_section_law(&l, 1, GridSpec::default()).unwrap();
        let s = DEFAULT_S_LIST.to_vec();
        let local = local_tail_exponent(|x| table.cdf(x), 0.0, &s, 2.0, TailModel::LogCorrected).unwrap();
        let xs = sample_section_radii(&l, 1, 100_000, 40 + i as u64).unwrap().values;
        let hill = reciprocal_hill(&xs, 0.0, 1000).unwrap();
        assert!((local.beta_hat - hill.beta_hat).abs() < 0.15, "{spec}: {} vs {}", local.beta_hat, hill.beta_hat);
    }
}
