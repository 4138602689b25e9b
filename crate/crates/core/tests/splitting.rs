mod common;

use common::*;
use egqft::quad::fit_line;
use egqft::splitting::*;
use num_complex::Complex64;

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64 + 1e-3).collect()
}

#[test]
fn negative_order_split_is_the_theta_cut() {
    let d = LineDistribution::toy("sign_exp").unwrap();
    let r = split(&d, &SplitSpec::unique(d.omega)).unwrap();
    for x in grid(-6.0, 6.0, 25) {
        let lib = r.retarded(x).unwrap();
        let orc = theta_split_sign_exp(x);
        assert!((lib - orc).norm() <= 1e-8, "{x}: {lib} vs {orc}");
        // closed form of the cut transform
        assert!((orc - Complex64::new(1.0, 0.0) / Complex64::new(1.0, -x)).norm() < 1e-12);
    }
    let d = LineDistribution::toy("smooth_cubic").unwrap();
    let r = split(&d, &SplitSpec::unique(-1)).unwrap();
    for x in grid(-5.0, 5.0, 11) {
        let orc = simpson(
            |t| Complex64::new(0.0, x * t).exp() * (t * t * t * (-t * t).exp()),
            0.0,
            9.0,
            20_000,
        );
        let lib = r.retarded(x).unwrap();
        assert!((lib - orc).norm() <= 1e-8, "{x}: {lib} vs {orc}");
    }
}

fn quartic_split(anchor: f64, constants: [f64; 3]) -> SplitResult {
    let d = LineDistribution::toy("quartic").unwrap();
    let spec = SplitSpec::anchored(
        2,
        SubtractionPoint::Value(anchor),
        constants.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
    );
    split(&d, &spec).unwrap()
}

#[test]
fn normalizations_differ_by_a_polynomial() {
    let a = quartic_split(0.0, [0.0, 0.0, 0.0]);
    let b = quartic_split(0.0, [0.3, -0.1, 0.2]);
    let xs = grid(-4.0, 4.0, 33);
    let diff: Vec<Complex64> = xs
        .iter()
        .map(|&x| a.retarded(x).unwrap() - b.retarded(x).unwrap())
        .collect();
    let (coef, resid) = poly_fit(&xs, &diff, 2);
    assert!(resid <= 1e-6, "residual {resid}");
    // a linear fit cannot absorb the difference
    let (_, lin) = poly_fit(&xs, &diff, 1);
    assert!(lin > 1e-3, "{lin}");
    assert!(coef.iter().all(|c| c.im.abs() < 1e-6));
}

#[test]
fn normalization_is_imposed_at_the_anchor() {
    let s = quartic_split(0.0, [0.3, -0.1, 0.2]);
    assert!((s.retarded(0.0).unwrap() - Complex64::new(0.3, 0.0)).norm() < 1e-14);
    let h = 1e-3;
    let d1 = (s.retarded(h).unwrap() - s.retarded(-h).unwrap()) / (2.0 * h);
    assert!((d1.re + 0.1).abs() < 1e-5, "{d1}");
    let d = LineDistribution::toy("quartic").unwrap();
    let off = SplitSpec::anchored(2, SubtractionPoint::Value(0.5), vec![]);
    assert!(matches!(split(&d, &off), Err(SplitError::Point(..))));
}

#[test]
fn difference_reconstructs_the_input() {
    let toys: Vec<(LineDistribution, SplitSpec)> = vec![
        (LineDistribution::toy("sign_exp").unwrap(), SplitSpec::unique(-1)),
        (LineDistribution::toy("smooth_cubic").unwrap(), SplitSpec::unique(-1)),
        (
            LineDistribution::toy("quartic").unwrap(),
            SplitSpec::anchored(2, SubtractionPoint::Zero, vec![]),
        ),
    ];
    for (d, spec) in toys {
        let r = split(&d, &spec).unwrap();
        for (x, ret, adv) in r.sample(&grid(-5.0, 5.0, 21)).unwrap() {
            let dev = (ret - adv - d.eval(x)).norm();
            assert!(dev <= 1e-8, "{x}: {dev}");
        }
    }
}

#[test]
fn retarded_part_keeps_the_scaling_degree() {
    let s = quartic_split(0.0, [0.0, 0.0, 0.0]);
    let d = LineDistribution::toy("quartic").unwrap();
    let lams: Vec<f64> = (0..7).map(|k| 1e3 * 10f64.powf(0.5 * k as f64)).collect();
    let lx: Vec<f64> = lams.iter().map(|l| l.ln()).collect();
    let ly: Vec<f64> = lams.iter().map(|&l| s.retarded(l).unwrap().norm().ln()).collect();
    let ld: Vec<f64> = lams.iter().map(|&l| d.eval(l).norm().ln()).collect();
    let ret = fit_line(&lx, &ly).unwrap().slope;
    let input = fit_line(&lx, &ld).unwrap().slope;
    assert!((ret - input).abs() <= 0.2, "ret {ret}, input {input}");
}

#[test]
fn missing_constants_are_rejected() {
    let d = LineDistribution::toy("quartic").unwrap();
    assert!(matches!(
        split(&d, &SplitSpec::anchored(2, SubtractionPoint::Zero, vec![Complex64::new(1.0, 0.0)])),
        Err(SplitError::MissingNormalization { needed: 3, given: 1, .. })
    ));
    assert!(matches!(split(&d, &SplitSpec::unique(2)), Err(SplitError::MissingSubtractionPoint(2))));
    assert_eq!(ambiguity_dimension(-1), 0);
    assert_eq!(ambiguity_dimension(0), 1);
    assert_eq!(ambiguity_dimension(2), 3);
}

#[test]
fn spectral_split_matches_dispersion_oracle() {
    let m: f64 = 1.0;
    let thr = 4.0 * m * m;
    let rho = move |s: f64| {
        if s <= thr {
            0.0
        } else {
            let beta = (1.0 - thr / s).sqrt();
            (1.0 + 2.0 * m * m / s) * beta / (12.0 * std::f64::consts::PI)
        }
    };
    let d = LineDistribution::spectral(thr, rho, 1);
    let r = split(&d, &SplitSpec::anchored(1, SubtractionPoint::Zero, vec![])).unwrap();
    for s in [-5.0, -1.0, -0.1, 0.7, 2.5, 3.6] {
        let lib = r.retarded(s).unwrap();
        let orc = pi_dispersion_below(&rho, thr, s);
        assert!((lib.re - orc).abs() <= 1e-9 * orc.abs().max(1e-3), "{s}: {lib} vs {orc}");
        assert!(lib.im.abs() < 1e-15);
    }
    // above threshold the imaginary part is the spectral weight
    for s in [4.5, 9.0, 30.0] {
        let lib = r.retarded(s).unwrap();
        assert!((lib.im - rho(s)).abs() < 1e-12, "{s}");
        let adv = r.advanced(s).unwrap();
        assert!((lib - adv - Complex64::new(0.0, 2.0 * rho(s))).norm() <= 1e-8, "{s}");
    }
}
