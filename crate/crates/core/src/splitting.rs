//! Retarded/advanced splitting of causal distributions in one scalar variable.
//!
//! For a distribution `d^(x)` of singularity order `omega` the retarded part is the
//! boundary value of the upper half-plane analytic function
//!
//! ```text
//! r^(x) = (x - x0)^k [ g(x)/2 + (1/(2 pi i)) PV int g(x') / (x' - x) dx' ] + P(x),
//! g(x) = d^(x) / (x - x0)^k,    k = max(omega + 1, 0),
//! ```
//!
//! with `P(x) = sum_j C_j (x - x0)^j` the normalization polynomial. The advanced part
//! is `r^ - d^`, so the polynomial enters both parts. The principal value is taken as
//! `int_0^inf [g(x+u) - g(x-u)] / u du`.
//!
//! For spectral distributions `d^(s) = 2 i rho(s) theta(s - s_th)` this is the
//! `k`-times subtracted dispersion relation, available off the real axis as well.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

use crate::causal::{SpectralFn, SupportTag};
use crate::quad::{composite_gauss_legendre, gauss_legendre_on, integrate_to_infinity, integrate_with_breaks, richardson_limit, QuadError, Tolerance};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SplitError {
    #[error("input distribution is not causal (support tag {0:?})")]
    NotCausal(SupportTag),
    #[error("omega = {omega} needs {needed} normalization constants, got {given}")]
    MissingNormalization { omega: i32, needed: usize, given: usize },
    #[error("omega = {0} needs a subtraction point")]
    MissingSubtractionPoint(i32),
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
    #[error("point {0} is not admissible: {1}")]
    Point(f64, String),
}

/// Number of free constants in the splitting of a distribution of order `omega`.
pub fn ambiguity_dimension(omega: i32) -> usize {
    (omega + 1).max(0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubtractionPoint {
    Zero,
    MassShell(f64),
    Value(f64),
}

impl SubtractionPoint {
    /// Anchor in the splitting variable; `MassShell(m)` is `m^2` in the variable `p^2`.
    pub fn anchor(&self) -> f64 {
        match self {
            SubtractionPoint::Zero => 0.0,
            SubtractionPoint::MassShell(m) => m * m,
            SubtractionPoint::Value(v) => *v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub omega: i32,
    #[serde(default)]
    pub normalization: Vec<Complex64>,
    #[serde(default)]
    pub subtraction_point: Option<SubtractionPoint>,
}

impl SplitSpec {
    pub fn unique(omega: i32) -> Self {
        SplitSpec {
            omega,
            normalization: Vec::new(),
            subtraction_point: None,
        }
    }

    pub fn anchored(omega: i32, point: SubtractionPoint, normalization: Vec<Complex64>) -> Self {
        SplitSpec {
            omega,
            normalization,
            subtraction_point: Some(point),
        }
    }

    fn resolve(&self) -> Result<(usize, f64, Vec<Complex64>), SplitError> {
        let k = ambiguity_dimension(self.omega);
        if k == 0 {
            return Ok((0, 0.0, Vec::new()));
        }
        let point = self
            .subtraction_point
            .ok_or(SplitError::MissingSubtractionPoint(self.omega))?;
        let constants = match self.normalization.len() {
            0 => vec![Complex64::new(0.0, 0.0); k],
            n if n == k => self.normalization.clone(),
            n => {
                return Err(SplitError::MissingNormalization {
                    omega: self.omega,
                    needed: k,
                    given: n,
                })
            }
        };
        Ok((k, point.anchor(), constants))
    }
}

pub type LineFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum LineKind {
    General(LineFn),
    Spectral { threshold: f64, rho: SpectralFn },
}

/// A distribution in one real variable (time-like ray variable or `p^2`).
#[derive(Clone)]
pub struct LineDistribution {
    kind: LineKind,
    pub breaks: Vec<f64>,
    pub omega: i32,
    pub support: SupportTag,
}

impl fmt::Debug for LineDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            LineKind::General(_) => "general".to_string(),
            LineKind::Spectral { threshold, .. } => format!("spectral(threshold={threshold})"),
        };
        f.debug_struct("LineDistribution")
            .field("kind", &kind)
            .field("breaks", &self.breaks)
            .field("omega", &self.omega)
            .field("support", &self.support)
            .finish()
    }
}

impl LineDistribution {
    pub fn general<F>(f: F, omega: i32, breaks: Vec<f64>) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        LineDistribution {
            kind: LineKind::General(Arc::new(f)),
            breaks,
            omega,
            support: SupportTag::Causal,
        }
    }

    /// `2 i rho(s) theta(s - threshold)`.
    pub fn spectral<F>(threshold: f64, rho: F, omega: i32) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::spectral_arc(threshold, Arc::new(rho), omega)
    }

    pub fn spectral_arc(threshold: f64, rho: SpectralFn, omega: i32) -> Self {
        LineDistribution {
            kind: LineKind::Spectral { threshold, rho },
            breaks: vec![threshold],
            omega,
            support: SupportTag::Causal,
        }
    }

    pub fn with_support(mut self, support: SupportTag) -> Self {
        self.support = support;
        self
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match &self.kind {
            LineKind::General(f) => f(x),
            LineKind::Spectral { threshold, rho } => {
                if x > *threshold {
                    Complex64::new(0.0, 2.0 * rho(x))
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }

    /// Named one-dimensional test distributions in the frequency variable.
    ///
    /// * `sign_exp`: transform of `sgn(t) e^{-|t|}`, order `-1`;
    /// * `smooth_cubic`: transform of `t^3 e^{-t^2}`, rapidly decaying;
    /// * `quartic`: `x^4 / (1 + x^2)`, order `2`.
    pub fn toy(name: &str) -> Option<Self> {
        match name {
            "sign_exp" => Some(Self::general(
                |w| Complex64::new(0.0, 2.0 * w / (1.0 + w * w)),
                -1,
                vec![],
            )),
            "smooth_cubic" => Some(Self::general(
                |w| {
                    Complex64::new(
                        0.0,
                        PI.sqrt() * (0.75 * w - w * w * w / 8.0) * (-w * w / 4.0).exp(),
                    )
                },
                -1,
                vec![],
            )),
            "quartic" => Some(Self::general(
                |x| Complex64::new(x.powi(4) / (1.0 + x * x), 0.0),
                2,
                vec![],
            )),
            _ => None,
        }
    }
}

/// Retarded and advanced parts of a split distribution, evaluated on demand.
#[derive(Clone, Debug)]
pub struct SplitResult {
    pub input: LineDistribution,
    pub subtractions: usize,
    pub anchor: f64,
    pub constants: Vec<Complex64>,
    pub tolerance: Tolerance,
}

pub fn split(d: &LineDistribution, spec: &SplitSpec) -> Result<SplitResult, SplitError> {
    split_with_tolerance(d, spec, Tolerance::new(1e-14, 1e-10))
}

pub fn split_with_tolerance(
    d: &LineDistribution,
    spec: &SplitSpec,
    tolerance: Tolerance,
) -> Result<SplitResult, SplitError> {
    if d.support != SupportTag::Causal {
        return Err(SplitError::NotCausal(d.support));
    }
    let (k, anchor, constants) = spec.resolve()?;
    if k > 0 {
        check_anchor(d, anchor, k)?;
    }
    Ok(SplitResult {
        input: d.clone(),
        subtractions: k,
        anchor,
        constants,
        tolerance,
    })
}

/// Subtracting `k` times at a point where a general input does not vanish to order `k`
/// leaves a non-integrable pole.
fn check_anchor(d: &LineDistribution, anchor: f64, k: usize) -> Result<(), SplitError> {
    if let LineKind::Spectral { threshold, .. } = &d.kind {
        if anchor >= *threshold {
            return Err(SplitError::Point(anchor, format!("anchor on the cut starting at {threshold}")));
        }
        return Ok(());
    }
    let ratio = |h: f64| {
        let v = d.eval(anchor + h).norm().max(d.eval(anchor - h).norm());
        v / h.powi(k as i32)
    };
    let (coarse, fine) = (ratio(1e-2), ratio(1e-3));
    if !(fine <= 2.0 * coarse + 1e-12) {
        return Err(SplitError::Point(
            anchor,
            format!("input does not vanish to order {k} at the subtraction point"),
        ));
    }
    Ok(())
}

impl SplitResult {
    pub fn omega(&self) -> i32 {
        self.input.omega
    }

    /// Normalization polynomial `sum_j C_j (z - x0)^j`.
    pub fn polynomial(&self, z: Complex64) -> Complex64 {
        let t = z - self.anchor;
        self.constants
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c)
    }

    fn g(&self, x: f64) -> Complex64 {
        self.input.eval(x) / (x - self.anchor).powi(self.subtractions as i32)
    }

    pub fn retarded(&self, x: f64) -> Result<Complex64, SplitError> {
        if !x.is_finite() {
            return Err(SplitError::Point(x, "not finite".into()));
        }
        let z = Complex64::new(x, 0.0);
        if self.subtractions > 0 && x == self.anchor {
            return Ok(self.polynomial(z));
        }
        let weight = (x - self.anchor).powi(self.subtractions as i32);
        let core = match &self.input.kind {
            LineKind::General(_) => self.general_core(x)?,
            LineKind::Spectral { threshold, rho } => {
                let h = |s: f64| rho(s) / (s - self.anchor).powi(self.subtractions as i32);
                let on = if x > *threshold { h(x) } else { 0.0 };
                Complex64::new(self.spectral_pv(x, *threshold, rho)?, on)
            }
        };
        Ok(core * weight + self.polynomial(z))
    }

    /// Lower boundary value `lim F(x - i eta)` of the Cauchy transform, extrapolated in
    /// `eta`; independent of the principal-value route used by [`Self::retarded`].
    pub fn advanced(&self, x: f64) -> Result<Complex64, SplitError> {
        if !x.is_finite() {
            return Err(SplitError::Point(x, "not finite".into()));
        }
        if self.subtractions > 0 && x == self.anchor {
            return Ok(self.polynomial(Complex64::new(x, 0.0)));
        }
        let mut gap = 1.0 + x.abs();
        if self.subtractions > 0 {
            gap = gap.min((x - self.anchor).abs());
        }
        if let LineKind::Spectral { threshold, .. } = &self.input.kind {
            if x != *threshold {
                gap = gap.min((x - threshold).abs());
            }
        }
        let h0 = 0.02 * gap;
        let failure = std::cell::Cell::new(None);
        let v = richardson_limit(
            |eta| match self.advanced_at(Complex64::new(x, -eta)) {
                Ok(v) => v,
                Err(e) => {
                    failure.set(Some(e));
                    Complex64::new(f64::NAN, 0.0)
                }
            },
            h0,
        );
        match failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }

    /// Continuation of the advanced part to `Im z < 0`.
    pub fn advanced_at(&self, z: Complex64) -> Result<Complex64, SplitError> {
        if z.im >= 0.0 {
            return Err(SplitError::Point(z.im, "advanced part lives in the lower half plane".into()));
        }
        self.cauchy(z)
    }

    /// `g(x)/2 + PV int g(x')/(x' - x) dx' / (2 pi i)`.
    fn general_core(&self, x: f64) -> Result<Complex64, SplitError> {
        let mut breaks: Vec<f64> = self.input.breaks.iter().map(|b| (b - x).abs()).collect();
        if self.subtractions > 0 {
            breaks.push((self.anchor - x).abs());
        }
        let pv = integrate_to_infinity(
            |u| (self.g(x + u) - self.g(x - u)) / u,
            0.0,
            1.0 + x.abs(),
            &breaks,
            self.tolerance,
        )?;
        Ok(self.g(x) * 0.5 + pv / Complex64::new(0.0, 2.0 * PI))
    }

    /// `(1/pi) PV int_thr^inf h(s') / (s' - s) ds'` with `h = rho / (s' - x0)^k`.
    fn spectral_pv(&self, s: f64, threshold: f64, rho: &SpectralFn) -> Result<f64, SplitError> {
        let k = self.subtractions as i32;
        let h = |t: f64| {
            if t > threshold {
                rho(t) / (t - self.anchor).powi(k)
            } else {
                0.0
            }
        };
        let c = |v: f64| Complex64::new(v, 0.0);
        let tol = self.tolerance;
        let value = if s <= threshold {
            // s' = thr + t^2 removes the square-root edge
            integrate_to_infinity(
                |t| {
                    let sp = threshold + t * t;
                    c(2.0 * t * h(sp) / (sp - s))
                },
                0.0,
                (1.0 + threshold).sqrt(),
                &[],
                tol,
            )?
            .re
        } else {
            let half = s - threshold;
            let near = integrate_with_breaks(|u| c((h(s + u) - h(s - u)) / u), 0.0, half, &[], tol)?.re;
            let far = integrate_to_infinity(
                |sp| c(h(sp) / (sp - s)),
                s + half,
                s.abs().max(1.0),
                &[],
                tol,
            )?
            .re;
            near + far
        };
        Ok(value / PI)
    }

    /// Analytic continuation of the retarded part to `Im z > 0`.
    pub fn retarded_at(&self, z: Complex64) -> Result<Complex64, SplitError> {
        if z.im == 0.0 {
            return self.retarded(z.re);
        }
        if z.im < 0.0 {
            return Err(SplitError::Point(z.im, "retarded part lives in the upper half plane".into()));
        }
        self.cauchy(z)
    }

    /// `(z - x0)^k F(z) + P(z)` with `F` the Cauchy transform of `g`, for `Im z != 0`.
    fn cauchy(&self, z: Complex64) -> Result<Complex64, SplitError> {
        let k = self.subtractions as i32;
        let weight = (z - self.anchor).powi(k);
        let tol = self.tolerance;
        let core = match &self.input.kind {
            LineKind::General(_) => {
                let breaks: Vec<f64> = self.input.breaks.iter().chain([z.re, self.anchor].iter()).copied().collect();
                let f = |x: f64| self.g(x) / (Complex64::new(x, 0.0) - z);
                let right = integrate_to_infinity(f, z.re, 1.0 + z.re.abs(), &breaks, tol)?;
                let left = integrate_to_infinity(|u| f(2.0 * z.re - u), z.re, 1.0 + z.re.abs(), &breaks.iter().map(|b| 2.0 * z.re - b).collect::<Vec<_>>(), tol)?;
                (right + left) / Complex64::new(0.0, 2.0 * PI)
            }
            LineKind::Spectral { threshold, rho } => {
                let thr = *threshold;
                let anchor = self.anchor;
                let f = |t: f64| {
                    let sp = thr + t * t;
                    Complex64::new(2.0 * t * rho(sp) / (sp - anchor).powi(k), 0.0) / (Complex64::new(sp, 0.0) - z)
                };
                let peak = (z.re - thr).max(0.0).sqrt();
                let scale = (1.0 + thr).sqrt().max(peak);
                integrate_to_infinity(f, 0.0, scale, &[peak], tol)? / PI
            }
        };
        Ok(core * weight + self.polynomial(z))
    }

    /// Fixed quadrature table for repeated evaluation of a spectral split off the cut.
    pub fn table(&self) -> Option<DispersionTable> {
        match &self.input.kind {
            LineKind::Spectral { threshold, rho } => Some(DispersionTable::new(self, *threshold, rho)),
            LineKind::General(_) => None,
        }
    }

    /// Tabulates `(x, retarded, advanced)`.
    pub fn sample(&self, xs: &[f64]) -> Result<Vec<(f64, Complex64, Complex64)>, SplitError> {
        xs.iter()
            .map(|&x| {
                Ok((x, self.retarded(x)?, self.advanced(x)?))
            })
            .collect()
    }
}

/// The dispersion integral of a spectral split on a fixed rule in `t = sqrt(s' - s_th)`:
/// geometric panels resolve structure near the threshold at every scale, a mapped
/// rule covers the tail.
#[derive(Clone, Debug)]
pub struct DispersionTable {
    split: SplitResult,
    threshold: f64,
    /// `(s', weight * 2 t rho(s') / (s' - x0)^k / pi)`
    nodes: Vec<(f64, f64)>,
}

impl DispersionTable {
    fn new(split: &SplitResult, threshold: f64, rho: &SpectralFn) -> Self {
        let k = split.subtractions as i32;
        let scale = (1.0 + threshold.abs()).sqrt();
        let mut rule = Vec::new();
        let mut lo = 1e-9 * scale;
        rule.extend(gauss_legendre_on(16, 0.0, lo));
        while lo < scale {
            let hi = (lo * 1.25).min(scale);
            rule.extend(gauss_legendre_on(16, lo, hi));
            lo = hi;
        }
        // t = scale / (1 - u) on [0, 1)
        for (u, w) in composite_gauss_legendre(16, 24, 0.0, 1.0) {
            let om = 1.0 - u;
            rule.push((scale / om, w * scale / (om * om)));
        }
        let nodes = rule
            .into_iter()
            .map(|(t, w)| {
                let sp = threshold + t * t;
                (sp, w * 2.0 * t * rho(sp) / (sp - split.anchor).powi(k) / PI)
            })
            .filter(|(_, w)| w.is_finite())
            .collect();
        DispersionTable {
            split: split.clone(),
            threshold,
            nodes,
        }
    }

    /// Whether the fixed rule resolves the integrand at `z`.
    pub fn resolves(&self, z: Complex64) -> bool {
        let above = z.re - self.threshold;
        if above <= 0.0 {
            z.im >= 0.0 && (above.abs() + z.im) > 1e-14 * (1.0 + self.threshold.abs())
        } else {
            z.im >= above / 8.0
        }
    }

    /// Table value; only meaningful where [`Self::resolves`] holds.
    pub fn eval_table(&self, z: Complex64) -> Complex64 {
        let core: Complex64 = self.nodes.iter().map(|&(sp, w)| w / (Complex64::new(sp, 0.0) - z)).sum();
        core * (z - self.split.anchor).powi(self.split.subtractions as i32) + self.split.polynomial(z)
    }

    /// Cut-plane dispersion function at `z`, falling back to adaptive quadrature near
    /// the cut. For `Im z < 0` the value follows by reflection, which needs real
    /// normalization constants.
    pub fn eval(&self, z: Complex64) -> Result<Complex64, SplitError> {
        if z.im < 0.0 {
            if self.split.constants.iter().any(|c| c.im != 0.0) {
                return Err(SplitError::Point(z.im, "reflection needs real normalization constants".into()));
            }
            return Ok(self.eval(z.conj())?.conj());
        }
        if self.resolves(z) && !(z.im == 0.0 && z.re > self.threshold) {
            Ok(self.eval_table(z))
        } else {
            self.split.retarded_at(z)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ambiguity_counts() {
        assert_eq!(ambiguity_dimension(-2), 0);
        assert_eq!(ambiguity_dimension(0), 1);
        assert_eq!(ambiguity_dimension(2), 3);
    }

    #[test]
    fn normalization_is_validated() {
        let d = LineDistribution::toy("quartic").unwrap();
        assert!(matches!(
            split(&d, &SplitSpec::unique(2)),
            Err(SplitError::MissingSubtractionPoint(2))
        ));
        let spec = SplitSpec::anchored(2, SubtractionPoint::Zero, vec![Complex64::new(1.0, 0.0)]);
        assert!(matches!(split(&d, &spec), Err(SplitError::MissingNormalization { .. })));
        let nc = d.clone().with_support(SupportTag::None);
        assert!(matches!(
            split(&nc, &SplitSpec::anchored(2, SubtractionPoint::Zero, vec![])),
            Err(SplitError::NotCausal(_))
        ));
    }

    #[test]
    fn difference_reproduces_input() {
        let d = LineDistribution::toy("sign_exp").unwrap();
        let s = split(&d, &SplitSpec::unique(-1)).unwrap();
        for x in [-3.0, -0.2, 0.0, 0.7, 5.0] {
            let r = s.retarded(x).unwrap();
            let a = s.advanced(x).unwrap();
            assert!((r - a - d.eval(x)).norm() < 1e-10);
        }
    }

    #[test]
    fn polynomial_shift_is_exact() {
        let d = LineDistribution::toy("quartic").unwrap();
        let c = vec![Complex64::new(0.5, 0.1), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 2.0)];
        let s0 = split(&d, &SplitSpec::anchored(2, SubtractionPoint::Zero, vec![])).unwrap();
        let s1 = split(&d, &SplitSpec::anchored(2, SubtractionPoint::Zero, c.clone())).unwrap();
        for x in [-2.0, 0.3, 1.5] {
            let diff = s1.retarded(x).unwrap() - s0.retarded(x).unwrap();
            let poly = c[0] + c[1] * x + c[2] * x * x;
            assert!((diff - poly).norm() < 1e-12);
        }
    }

    #[test]
    fn upper_half_plane_continuation_matches_boundary_value() {
        let d = LineDistribution::toy("sign_exp").unwrap();
        let s = split(&d, &SplitSpec::unique(-1)).unwrap();
        let z = Complex64::new(0.4, 0.3);
        let exact = 1.0 / (Complex64::new(1.0, 0.0) - Complex64::new(0.0, 1.0) * z);
        assert!((s.retarded_at(z).unwrap() - exact).norm() < 1e-8);
    }

    #[test]
    fn table_matches_adaptive_evaluation() {
        for (thr, anchor, k) in [(4.0, 0.0, 2), (0.0, -1.0, 2), (1.21, 1.0, 1)] {
            let d = LineDistribution::spectral(thr, move |s: f64| (1.0 + 0.3 * thr / s) * (1.0 - thr / s).sqrt(), k - 1);
            let spec = SplitSpec::anchored(k - 1, SubtractionPoint::Value(anchor), vec![]);
            let s = split(&d, &spec).unwrap();
            let t = s.table().unwrap();
            for z in [
                Complex64::new(anchor - 0.5, 0.01),
                Complex64::new(thr * 0.5 + 1e-4, 1e-3),
                Complex64::new(thr + 0.02, 0.01),
                Complex64::new(thr + 3.0, 1.0),
                Complex64::new(-2.0, 0.0),
            ] {
                assert!(t.resolves(z), "{z}");
                let exact = s.retarded_at(z).unwrap();
                let fast = t.eval_table(z);
                assert!((exact - fast).norm() <= 1e-10 * (1.0 + exact.norm()), "{thr} {z}: {exact} vs {fast}");
            }
        }
    }
}
