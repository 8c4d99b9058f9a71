use wicksell_core::evt::{ks_one_sample, ks_two_sample};
use wicksell_core::simulate::{
    load_samples, sample_section_radii, sample_size_biased, simulate_planar_section_3d, SampleMode,
};
use wicksell_core::transform::{moment, tabulate_section_law, GridSpec};
use wicksell_core::{LawSpec, RadiusLawF64, WicksellError};

fn law(spec: &str) -> RadiusLawF64 {
    LawSpec::parse(spec).unwrap().build().unwrap()
}

fn semicircle(x: f64) -> f64 {
    x * x / (1.0 + (1.0 - x.min(1.0) * x.min(1.0)).sqrt())
}

const CATALOG: [&str; 6] = [
    "uniform",
    "power --alpha 0.5",
    "dirac --rho 1",
    "weibull --alpha 2 --lambda 1",
    "truncrecipexp",
    "shifted --eta0 0.5 --inner power --alpha 0.5",
];

#[test]
fn analytic_samples_follow_the_transform() {
    for (i, spec) in CATALOG.iter().enumerate() {
        let l = law(spec);
        for r in 1..=3 {
            let table = tabulate_section_law(&l, r, GridSpec::default()).unwrap();
            let s = sample_section_radii(&l, r, 100_000, 1000 + 10 * i as u64 + r as u64).unwrap();
            let d = ks_one_sample(&s.values, |x| table.cdf(x));
            assert!(d < 0.01, "{spec} r={r}: KS {d}");
        }
    }
}

#[test]
fn dirac_sections_match_closed_forms() {
    let d = law("dirac --rho 1");
    let s1 = sample_section_radii(&d, 1, 100_000, 5).unwrap();
    assert!(ks_one_sample(&s1.values, semicircle) < 0.01);
    let s2 = sample_section_radii(&d, 2, 100_000, 6).unwrap();
    assert!(ks_one_sample(&s2.values, |x| (x * x).min(1.0)) < 0.01);
}

#[test]
fn size_biased_draws() {
    let u = law("uniform");
    let b = sample_size_biased(&u, 1, 100_000, 3).unwrap();
    assert!(ks_one_sample(&b, |x| (x * x).clamp(0.0, 1.0)) < 0.01);
    assert!(sample_size_biased(&law("dirac --rho 1"), 2, 500, 1).unwrap().iter().all(|&v| v == 1.0));
    // Tabulated biased inversion for a law without a closed form.
    let tre = law("truncrecipexp");
    let m1 = moment(&tre, 1).unwrap();
    let m2 = moment(&tre, 2).unwrap();
    let draws = sample_size_biased(&tre, 1, 200_000, 4).unwrap();
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    assert!((mean - m2 / m1).abs() < 0.005, "{mean} vs {}", m2 / m1);
}

#[test]
fn geometric_mode_matches_analytic_mode() {
    for (spec, seed) in [("dirac --rho 1", 11u64), ("uniform", 12)] {
        let l = law(spec);
        let m1 = moment(&l, 1).unwrap();
        let area = 30_500.0 / (2.0 * m1);
        let g = simulate_planar_section_3d(&l, 1.0, l.upper_support(), area, seed).unwrap();
        assert_eq!(g.mode, SampleMode::Geometric3d);
        assert!(g.values.len() >= 30_000, "{spec}: only {} hits", g.values.len());
        let a = sample_section_radii(&l, 1, g.values.len(), seed + 100).unwrap();
        let d = ks_two_sample(&g.values, &a.values);
        assert!(d < 0.02, "{spec}: two-sample KS {d}");
        if spec.starts_with("dirac") {
            assert!(ks_one_sample(&g.values, semicircle) < 0.02);
        }
    }
}

#[test]
fn hit_count_is_unbiased() {
    let u = law("uniform");
    let (intensity, area) = (1.0, 1000.0);
    let expected = intensity * area * 2.0 * moment(&u, 1).unwrap();
    let runs = 50;
    let total: usize = (0..runs)
        .map(|i| simulate_planar_section_3d(&u, intensity, 1.0, area, 500 + i).unwrap().values.len())
        .sum();
    let mean = total as f64 / runs as f64;
    let se = (expected / runs as f64).sqrt();
    assert!((mean - expected).abs() < 3.0 * se, "mean {mean} vs {expected}");
}

#[test]
fn geometric_guards() {
    let u = law("uniform");
    assert!(matches!(simulate_planar_section_3d(&u, 1.0, 0.9, 10.0, 1), Err(WicksellError::InvalidParameter(_))));
    let w = law("weibull --alpha 2 --lambda 1");
    assert!(simulate_planar_section_3d(&w, 1.0, 5.0, 10.0, 1).is_err());
    assert!(matches!(simulate_planar_section_3d(&u, 1.0, 1.0, 6e6, 1), Err(WicksellError::Resource(_))));
    assert!(simulate_planar_section_3d(&u, 0.0, 1.0, 10.0, 1).unwrap().values.is_empty());
}

#[test]
fn deterministic_across_thread_counts() {
    let l = law("truncrecipexp");
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sample_section_radii(&l, 2, 50_000, 77).unwrap())
    };
    let (a, b) = (run(1), run(8));
    assert_eq!(a, b);
    assert_ne!(a.values, sample_section_radii(&l, 2, 50_000, 78).unwrap().values);
}

#[test]
fn values_positive_and_inside_support() {
    for spec in CATALOG {
        let l = law(spec);
        let top = l.upper_support();
        let s = sample_section_radii(&l, 1, 20_000, 9).unwrap();
        assert!(s.values.iter().all(|&v| v > 0.0 && v < top), "{spec}");
    }
    let empty = sample_section_radii(&law("uniform"), 3, 0, 1).unwrap();
    assert!(empty.values.is_empty() && empty.n == 0);
    assert!(sample_section_radii(&law("uniform"), 0, 10, 1).is_err());
}

#[test]
fn sample_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let s = sample_section_radii(&law("power --alpha 0.5"), 2, 1000, 21).unwrap();
    let side = s.write(&path).unwrap();
    assert_eq!(load_samples::<f64>(&path).unwrap(), s.values);
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(side).unwrap()).unwrap();
    assert_eq!(meta["law_spec"], "power --alpha 0.5");
    assert_eq!(meta["mode"], "analytic");
    assert_eq!(meta["n"], 1000);
    assert_eq!(meta["seed"], 21);
    assert_eq!(meta["r"], 2);
}
