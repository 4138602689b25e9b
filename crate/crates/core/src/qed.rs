//! Second-order QED Green functions from causal splitting: vacuum polarization and
//! electron self energy, with on-mass-shell normalization.
//!
//! The coupling is set to one. Spectral functions are computed by two-body phase-space
//! quadrature of the one-loop traces with the common prefactor `1/(8 pi^2)`:
//!
//! * vacuum polarization, `rho_Pi(s) = (1/(8 pi^2 s)) int dPhi_2 T^{11}`, with
//!   `T^{mu nu} = tr[gamma^mu (k1slash + m) gamma^nu (k2slash - m)]` in the rest frame of `p`;
//! * self energy, `rho_Sigma(s) = (1/(8 pi^2)) int dPhi_2 (2 kslash - 4m)` split into
//!   `rho_a + pslash rho_b`, photon mass `mu` as infrared regulator.
//!
//! `Pi(s)` is the scalar factor of `Pi^{mu nu}(p) = (p^mu p^nu - p^2 g^{mu nu}) Pi(p^2)`
//! and `Sigma(p) = a(p^2) + pslash b(p^2)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

use crate::causal::{CausalDistribution, FourVector};
use crate::quad::{gauss_legendre, integrate_to_infinity, richardson_derivative, Tolerance};
use crate::splitting::{
    split_with_tolerance, DispersionTable, LineDistribution, SplitError, SplitResult, SplitSpec, SubtractionPoint,
};

/// Common prefactor of the one-loop spectral functions.
pub const LOOP_NORM: f64 = 1.0 / (8.0 * PI * PI);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QedError {
    #[error("on-shell normalization impossible: {0}")]
    OnShellImpossible(String),
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error(transparent)]
    Split(#[from] SplitError),
}

/// Normalization of a second-order Green function.
///
/// `Shifted` adds constants to the on-shell solution: `(C0, C1)` to `Pi` as `C0 + C1 p^2`,
/// `(alpha, beta)` to `(a, b)` for the self energy. `Anchored` subtracts at `point` in
/// `p^2` instead and fixes the values there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    OnShell,
    Shifted(Vec<f64>),
    Anchored { point: f64, constants: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GreenFunction {
    Pi,
    Sigma,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralWeight {
    Pi(f64),
    Sigma { a: f64, b: f64 },
}

fn kallen(a: f64, b: f64, c: f64) -> f64 {
    a * a + b * b + c * c - 2.0 * (a * b + a * c + b * c)
}

/// Phase-space integral `int dPhi_2 f(k1, k2)` for `k1 + k2 = (sqrt s, 0)` with
/// `dPhi_2 = d^3k1/(2E1) d^3k2/(2E2) delta^4(p - k1 - k2)`.
///
/// Angles by Gauss-Legendre in `cos theta` and the trapezoid rule in `phi`; both are
/// exact for the low-order polynomial traces used here.
pub fn two_body_phase_space<F, const N: usize>(s: f64, m1: f64, m2: f64, f: F) -> [f64; N]
where
    F: Fn(&FourVector, &FourVector) -> [f64; N],
{
    let mut out = [0.0; N];
    let lam = kallen(s, m1 * m1, m2 * m2);
    if s <= (m1 + m2) * (m1 + m2) || lam <= 0.0 {
        return out;
    }
    let root = s.sqrt();
    let k = lam.sqrt() / (2.0 * root);
    let e1 = (k * k + m1 * m1).sqrt();
    let e2 = (k * k + m2 * m2).sqrt();
    let phase = PI * k / root;
    let (nodes, weights) = gauss_legendre(8);
    let n_phi = 8;
    for (c, w) in nodes.iter().zip(&weights) {
        let sin = (1.0 - c * c).max(0.0).sqrt();
        for j in 0..n_phi {
            let phi = 2.0 * PI * (j as f64 + 0.5) / n_phi as f64;
            let dir = [sin * phi.cos(), sin * phi.sin(), *c];
            let k1 = [e1, k * dir[0], k * dir[1], k * dir[2]];
            let k2 = [e2, -k * dir[0], -k * dir[1], -k * dir[2]];
            let v = f(&k1, &k2);
            // average over the sphere: weights sum to 2 in cos theta, n_phi in phi
            let wt = w / (2.0 * n_phi as f64);
            for (o, x) in out.iter_mut().zip(v.iter()) {
                *o += wt * x;
            }
        }
    }
    for o in out.iter_mut() {
        *o *= phase;
    }
    out
}

/// Vacuum-polarization spectral function.
pub fn pi_spectral(m: f64, s: f64) -> f64 {
    if s <= 4.0 * m * m {
        return 0.0;
    }
    let [t11] = two_body_phase_space(s, m, m, |k1, k2| {
        let k12 = k1[0] * k2[0] - k1[1] * k2[1] - k1[2] * k2[2] - k1[3] * k2[3];
        // T^{mu nu} = 4 [k1^mu k2^nu + k1^nu k2^mu - g^{mu nu} (k1.k2 + m^2)], g^{11} = -1
        [4.0 * (2.0 * k1[1] * k2[1] + k12 + m * m)]
    });
    LOOP_NORM * t11 / s
}

/// Self-energy spectral functions `(rho_a, rho_b)`.
pub fn sigma_spectral(m: f64, mu: f64, s: f64) -> (f64, f64) {
    if s <= (m + mu) * (m + mu) {
        return (0.0, 0.0);
    }
    let root = s.sqrt();
    let [a, b] = two_body_phase_space(s, m, mu, |k, _q| {
        // 2 kslash - 4m; in the rest frame of p the gamma^0 coefficient of kslash is k^0,
        // and pslash = sqrt(s) gamma^0, the spatial parts average out
        [-4.0 * m, 2.0 * k[0] / root]
    });
    (LOOP_NORM * a, LOOP_NORM * b)
}

pub fn causal_imaginary_part(which: GreenFunction, m: f64, mu: f64, s: f64) -> Result<SpectralWeight, QedError> {
    if !(m >= 0.0 && mu >= 0.0 && s.is_finite()) {
        return Err(QedError::Invalid(format!("m = {m}, mu = {mu}, s = {s}")));
    }
    Ok(match which {
        GreenFunction::Pi => SpectralWeight::Pi(pi_spectral(m, s)),
        GreenFunction::Sigma => {
            let (a, b) = sigma_spectral(m, mu, s);
            SpectralWeight::Sigma { a, b }
        }
    })
}

fn tolerance() -> Tolerance {
    Tolerance::new(1e-15, 1e-11)
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Debug, Clone)]
pub struct VacuumPolarization {
    pub m: f64,
    pub normalization: Normalization,
    split: SplitResult,
    table: DispersionTable,
}

impl VacuumPolarization {
    pub fn build(m: f64, normalization: Normalization) -> Result<Self, QedError> {
        if !(m >= 0.0 && m.is_finite()) {
            return Err(QedError::Invalid(format!("electron mass {m}")));
        }
        let threshold = 4.0 * m * m;
        let (point, constants) = match &normalization {
            Normalization::OnShell => (0.0, vec![0.0, 0.0]),
            Normalization::Shifted(cs) => {
                if cs.len() != 2 {
                    return Err(QedError::Invalid(format!("vacuum polarization takes 2 constants, got {}", cs.len())));
                }
                (0.0, cs.clone())
            }
            Normalization::Anchored { point, constants } => {
                if constants.len() != 2 {
                    return Err(QedError::Invalid(format!(
                        "vacuum polarization takes 2 constants, got {}",
                        constants.len()
                    )));
                }
                (*point, constants.clone())
            }
        };
        if point >= threshold {
            return Err(if m == 0.0 && !matches!(normalization, Normalization::Anchored { .. }) {
                QedError::OnShellImpossible("the normalization point p^2 = 0 lies on the massless cut".into())
            } else {
                QedError::Invalid(format!("subtraction point {point} is not below the threshold {threshold}"))
            });
        }
        let d = LineDistribution::spectral(threshold, move |s| pi_spectral(m, s), 1);
        let spec = SplitSpec::anchored(1, SubtractionPoint::Value(point), constants.into_iter().map(c).collect());
        let split = split_with_tolerance(&d, &spec, tolerance())?;
        let table = split.table().expect("spectral split");
        Ok(VacuumPolarization {
            m,
            normalization,
            split,
            table,
        })
    }

    /// Retarded `Pi(p^2)` on the real axis.
    pub fn pi(&self, s: f64) -> Result<Complex64, QedError> {
        Ok(self.split.retarded(s)?)
    }

    /// Continuation to `Im p^2 > 0` (tabulated rule away from the cut).
    pub fn pi_at(&self, z: Complex64) -> Result<Complex64, QedError> {
        Ok(self.table.eval(z)?)
    }

    pub fn spectral(&self, s: f64) -> f64 {
        pi_spectral(self.m, s)
    }

    pub fn threshold(&self) -> f64 {
        4.0 * self.m * self.m
    }

    /// `Pi^{mu nu}(p)`, upper indices.
    pub fn tensor(&self, p: &FourVector) -> Result<[[Complex64; 4]; 4], QedError> {
        let s = crate::causal::square(p);
        let scalar = self.pi(s)?;
        Ok(transverse_tensor(p, scalar))
    }

    /// Causal distribution `(p^2) 2 i sgn(p0) rho_Pi(p^2)` of the scalar channel.
    pub fn causal_distribution(&self) -> CausalDistribution {
        let m = self.m;
        CausalDistribution::spectral(self.threshold(), move |s| pi_spectral(m, s), 1, 2, vec![m])
    }
}

/// `(p^mu p^nu - p^2 g^{mu nu}) scalar`.
pub fn transverse_tensor(p: &FourVector, scalar: Complex64) -> [[Complex64; 4]; 4] {
    let g = [1.0, -1.0, -1.0, -1.0];
    let s = crate::causal::square(p);
    let mut t = [[Complex64::new(0.0, 0.0); 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            let metric = if mu == nu { g[mu] } else { 0.0 };
            t[mu][nu] = scalar * (p[mu] * p[nu] - s * metric);
        }
    }
    t
}

/// `p_mu T^{mu nu}` for each `nu`.
pub fn contract_lower(p: &FourVector, t: &[[Complex64; 4]; 4]) -> [Complex64; 4] {
    let lower = [p[0], -p[1], -p[2], -p[3]];
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for nu in 0..4 {
        for mu in 0..4 {
            out[nu] += t[mu][nu] * lower[mu];
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct SelfEnergy {
    pub m: f64,
    pub mu: f64,
    pub normalization: Normalization,
    a_split: SplitResult,
    b_split: SplitResult,
    a_table: DispersionTable,
    b_table: DispersionTable,
    /// Constants added to the subtracted parts: `a = A + alpha0`, `b = B + beta0`.
    pub alpha0: f64,
    pub beta0: f64,
}

impl SelfEnergy {
    pub fn build(m: f64, mu: f64, normalization: Normalization) -> Result<Self, QedError> {
        if !(m >= 0.0 && mu >= 0.0 && m.is_finite() && mu.is_finite()) {
            return Err(QedError::Invalid(format!("m = {m}, mu = {mu}")));
        }
        let threshold = (m + mu) * (m + mu);
        let on_shell = !matches!(normalization, Normalization::Anchored { .. });
        if on_shell && m == 0.0 {
            return Err(QedError::OnShellImpossible("massless electron".into()));
        }
        if on_shell && mu == 0.0 {
            return Err(QedError::OnShellImpossible(
                "the derivative condition is infrared divergent for mu = 0".into(),
            ));
        }
        let point = match &normalization {
            Normalization::Anchored { point, constants } => {
                if constants.len() != 2 {
                    return Err(QedError::Invalid(format!("self energy takes 2 constants, got {}", constants.len())));
                }
                *point
            }
            _ => m * m,
        };
        if point >= threshold {
            return Err(QedError::Invalid(format!(
                "subtraction point {point} is not below the threshold {threshold}"
            )));
        }
        let rho_a: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(move |s| sigma_spectral(m, mu, s).0);
        let rho_b: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(move |s| sigma_spectral(m, mu, s).1);
        let spec = SplitSpec::anchored(0, SubtractionPoint::Value(point), vec![]);
        let a_split = split_with_tolerance(&LineDistribution::spectral_arc(threshold, rho_a.clone(), 0), &spec, tolerance())?;
        let b_split = split_with_tolerance(&LineDistribution::spectral_arc(threshold, rho_b.clone(), 0), &spec, tolerance())?;
        let (alpha0, beta0) = match &normalization {
            Normalization::Anchored { constants, .. } => (constants[0], constants[1]),
            other => {
                // A(m^2) = B(m^2) = 0; the slopes at the shell follow from the dispersion integrals
                let da = shell_slope(&*rho_a, threshold, m * m)?;
                let db = shell_slope(&*rho_b, threshold, m * m)?;
                let beta = -2.0 * m * (da + m * db);
                let alpha = -m * beta;
                match other {
                    Normalization::Shifted(cs) => {
                        if cs.len() != 2 {
                            return Err(QedError::Invalid(format!("self energy takes 2 constants, got {}", cs.len())));
                        }
                        (alpha + cs[0], beta + cs[1])
                    }
                    _ => (alpha, beta),
                }
            }
        };
        Ok(SelfEnergy {
            m,
            mu,
            normalization,
            a_table: a_split.table().expect("spectral split"),
            b_table: b_split.table().expect("spectral split"),
            a_split,
            b_split,
            alpha0,
            beta0,
        })
    }

    pub fn threshold(&self) -> f64 {
        (self.m + self.mu) * (self.m + self.mu)
    }

    pub fn a(&self, s: f64) -> Result<Complex64, QedError> {
        Ok(self.a_split.retarded(s)? + self.alpha0)
    }

    pub fn b(&self, s: f64) -> Result<Complex64, QedError> {
        Ok(self.b_split.retarded(s)? + self.beta0)
    }

    pub fn a_at(&self, z: Complex64) -> Result<Complex64, QedError> {
        Ok(self.a_table.eval(z)? + self.alpha0)
    }

    pub fn b_at(&self, z: Complex64) -> Result<Complex64, QedError> {
        Ok(self.b_table.eval(z)? + self.beta0)
    }

    pub fn spectral(&self, s: f64) -> (f64, f64) {
        sigma_spectral(self.m, self.mu, s)
    }
}

/// `(1/pi) int rho(s') / (s' - s0)^2 ds'`, the slope at `s0` of the dispersion integral
/// once subtracted at `s0`.
fn shell_slope(rho: &dyn Fn(f64) -> f64, threshold: f64, s0: f64) -> Result<f64, QedError> {
    let v = integrate_to_infinity(
        |t| {
            let sp = threshold + t * t;
            c(2.0 * t * rho(sp) / ((sp - s0) * (sp - s0)))
        },
        0.0,
        (1.0 + threshold).sqrt(),
        &[],
        tolerance(),
    )
    .map_err(SplitError::from)?;
    Ok(v.re / PI)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub name: String,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnShellReport {
    pub conditions: Vec<ConditionResult>,
}

impl OnShellReport {
    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.conditions.iter().find(|c| c.name == name).map(|c| c.residual)
    }
}

pub trait OnShellCheck {
    /// Evaluates each on-shell condition; residuals are signed.
    fn check_on_shell(&self, tol: f64) -> Result<OnShellReport, QedError>;
}

fn condition(name: &str, residual: f64, tol: f64) -> ConditionResult {
    ConditionResult {
        name: name.to_string(),
        residual,
        pass: residual.abs() <= tol,
    }
}

impl OnShellCheck for VacuumPolarization {
    fn check_on_shell(&self, tol: f64) -> Result<OnShellReport, QedError> {
        if self.threshold() == 0.0 {
            return Err(QedError::OnShellImpossible(
                "Pi is not differentiable at p^2 = 0 for m = 0".into(),
            ));
        }
        let pi0 = self.pi(0.0)?.re;
        let h = 0.05 * self.threshold();
        let slope = richardson_derivative(|s| self.pi(s).map(|v| c(v.re)).unwrap_or(c(f64::NAN)), 0.0, h).re;
        Ok(OnShellReport {
            conditions: vec![
                condition("Pi(0)", pi0, tol),
                condition("Pi(p^2)/p^2 at p^2=0", slope, tol),
            ],
        })
    }
}

impl OnShellCheck for SelfEnergy {
    fn check_on_shell(&self, tol: f64) -> Result<OnShellReport, QedError> {
        let m = self.m;
        let s0 = m * m;
        let a = self.a(s0)?.re;
        let b = self.b(s0)?.re;
        let h = 0.05 * (self.threshold() - s0).max(1e-300);
        let da = richardson_derivative(|s| self.a(s).map(|v| c(v.re)).unwrap_or(c(f64::NAN)), s0, h).re;
        let db = richardson_derivative(|s| self.b(s).map(|v| c(v.re)).unwrap_or(c(f64::NAN)), s0, h).re;
        Ok(OnShellReport {
            conditions: vec![
                condition("a(m^2) + m b(m^2)", a + m * b, tol),
                condition("2m a'(m^2) + b(m^2) + 2m^2 b'(m^2)", 2.0 * m * da + b + 2.0 * m * m * db, tol),
            ],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_spectral_closed_form() {
        let m: f64 = 0.7;
        for s in [2.0, 3.0, 10.0, 100.0] {
            let beta = (1.0 - 4.0 * m * m / s).sqrt();
            let exact = (1.0 + 2.0 * m * m / s) * beta / (12.0 * PI);
            assert!((pi_spectral(m, s) - exact).abs() < 1e-14 * exact.abs().max(1e-3), "{s}");
        }
        assert_eq!(pi_spectral(m, 1.0), 0.0);
    }

    #[test]
    fn sigma_thresholds() {
        assert_eq!(sigma_spectral(1.0, 0.1, 1.2), (0.0, 0.0));
        let (a, b) = sigma_spectral(1.0, 0.1, 2.0);
        assert!(a < 0.0 && b > 0.0);
    }

    #[test]
    fn massless_on_shell_refused() {
        assert!(matches!(
            VacuumPolarization::build(0.0, Normalization::OnShell),
            Err(QedError::OnShellImpossible(_))
        ));
        assert!(matches!(
            SelfEnergy::build(0.0, 0.1, Normalization::OnShell),
            Err(QedError::OnShellImpossible(_))
        ));
        assert!(VacuumPolarization::build(0.0, Normalization::Anchored { point: -1.0, constants: vec![0.0, 0.0] }).is_ok());
    }

    #[test]
    fn pi_custom_constant_at_zero() {
        let vp = VacuumPolarization::build(1.0, Normalization::Shifted(vec![1.0, 0.0])).unwrap();
        assert!((vp.pi(0.0).unwrap() - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn on_shell_reports() {
        let vp = VacuumPolarization::build(1.0, Normalization::OnShell).unwrap();
        assert!(vp.check_on_shell(1e-10).unwrap().all_pass());
        let se = SelfEnergy::build(1.0, 0.1, Normalization::OnShell).unwrap();
        let r = se.check_on_shell(1e-8).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }
}
