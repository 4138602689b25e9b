//! Momentum-space pairing and commutation functions, their causal combinations, and
//! power counting.
//!
//! Metric `(+,-,-,-)`, `hbar = c = 1`, Fourier convention `f^(p) = int f(x) e^{ipx} d^4x`.
//! With it the commutation function of mass `m` is `D^(p) = 2 pi sgn(p0) delta(p^2 - m^2)`
//! and `D^ret - D^av -> i D^` as the `i eps` regulator is removed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

use crate::quad::fit_line;

pub type FourVector = [f64; 4];

pub fn dot(p: &FourVector, q: &FourVector) -> f64 {
    p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3]
}

pub fn square(p: &FourVector) -> f64 {
    dot(p, p)
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CausalError {
    #[error("negative external-line count: {0}")]
    NegativeCount(String),
    #[error("evaluation failed at p = {0:?}: {1}")]
    Evaluation(FourVector, String),
    #[error("pole proximity: |m^2 - p^2| = {distance:e} with eps = {eps:e}")]
    Pole { distance: f64, eps: f64 },
    #[error("invalid argument: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportTag {
    Causal,
    Retarded,
    Advanced,
    None,
}

pub type MomentumFn = Arc<dyn Fn(&FourVector) -> Complex64 + Send + Sync>;
pub type SpectralFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// How a distribution is evaluated.
#[derive(Clone)]
pub enum Representation {
    /// Pointwise function of the momentum.
    Function(MomentumFn),
    /// `2 i sgn(p0) theta(p^2 - threshold) p2_power(p^2) rho(p^2)`: the causal form of a
    /// scalar Kallen-Lehmann type distribution, times `(p^2)^power` for tensor factors.
    Spectral {
        threshold: f64,
        rho: SpectralFn,
        power: i32,
    },
    /// `2 pi sgn(p0) delta(p^2 - m^2)`, only available through shell samples.
    Shell { mass: f64 },
}

#[derive(Clone)]
pub struct CausalDistribution {
    pub repr: Representation,
    pub masses: Vec<f64>,
    pub omega: i32,
    pub support: SupportTag,
}

impl fmt::Debug for CausalDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.repr {
            Representation::Function(_) => "function".to_string(),
            Representation::Spectral { threshold, power, .. } => {
                format!("spectral(threshold={threshold}, power={power})")
            }
            Representation::Shell { mass } => format!("shell(m={mass})"),
        };
        f.debug_struct("CausalDistribution")
            .field("repr", &kind)
            .field("masses", &self.masses)
            .field("omega", &self.omega)
            .field("support", &self.support)
            .finish()
    }
}

impl CausalDistribution {
    pub fn function<F>(f: F, omega: i32, support: SupportTag) -> Self
    where
        F: Fn(&FourVector) -> Complex64 + Send + Sync + 'static,
    {
        CausalDistribution {
            repr: Representation::Function(Arc::new(f)),
            masses: Vec::new(),
            omega,
            support,
        }
    }

    pub fn spectral<F>(threshold: f64, rho: F, power: i32, omega: i32, masses: Vec<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        CausalDistribution {
            repr: Representation::Spectral {
                threshold,
                rho: Arc::new(rho),
                power,
            },
            masses,
            omega,
            support: SupportTag::Causal,
        }
    }

    /// Pointwise value; shell measures have none.
    pub fn eval(&self, p: &FourVector) -> Result<Complex64, CausalError> {
        let v = match &self.repr {
            Representation::Function(f) => f(p),
            Representation::Spectral {
                threshold,
                rho,
                power,
            } => {
                let s = square(p);
                if s <= *threshold || p[0] == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, 2.0 * sgn(p[0]) * rho(s) * s.powi(*power))
                }
            }
            Representation::Shell { .. } => {
                return Err(CausalError::Evaluation(
                    *p,
                    "mass-shell measure has no pointwise value; use shell_samples".into(),
                ))
            }
        };
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(CausalError::Evaluation(*p, format!("non-finite value {v}")))
        }
    }

    /// For a shell measure: the support points over spatial momentum `k` with the weight
    /// of the `p0` integral, `int dp0 D^(p0, k) F(p0) = sum w F(p0)`.
    pub fn shell_samples(&self, k: [f64; 3]) -> Result<Vec<(FourVector, f64)>, CausalError> {
        match &self.repr {
            Representation::Shell { mass } => {
                let e = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2] + mass * mass).sqrt();
                if e == 0.0 {
                    return Err(CausalError::Invalid("massless shell at zero momentum".into()));
                }
                let w = 2.0 * std::f64::consts::PI / (2.0 * e);
                Ok(vec![([e, k[0], k[1], k[2]], w), ([-e, k[0], k[1], k[2]], -w)])
            }
            _ => Err(CausalError::Invalid("not a shell measure".into())),
        }
    }
}

/// Commutation function `D^_m` as a signed mass-shell measure.
pub fn pauli_jordan(m: f64) -> Result<CausalDistribution, CausalError> {
    if !(m >= 0.0 && m.is_finite()) {
        return Err(CausalError::Invalid(format!("mass {m}")));
    }
    Ok(CausalDistribution {
        repr: Representation::Shell { mass: m },
        masses: vec![m],
        omega: -2,
        support: SupportTag::Causal,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theory {
    SpinorQed,
    YangMills,
}

/// External-line content of a Wick monomial; the Yang-Mills counts are ignored for QED.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalLineSpec {
    pub fermion_lines: i64,
    pub photon_lines: i64,
    pub derivatives: i64,
    pub boson_lines: i64,
    pub ghost_lines: i64,
    pub antighost_lines: i64,
    pub ym_derivatives: i64,
}

impl ExternalLineSpec {
    pub fn qed(fermions: i64, photons: i64, derivatives: i64) -> Self {
        ExternalLineSpec {
            fermion_lines: fermions,
            photon_lines: photons,
            derivatives,
            ..Default::default()
        }
    }

    pub fn yang_mills(bosons: i64, ghosts: i64, antighosts: i64, derivatives: i64) -> Self {
        ExternalLineSpec {
            boson_lines: bosons,
            ghost_lines: ghosts,
            antighost_lines: antighosts,
            ym_derivatives: derivatives,
            ..Default::default()
        }
    }
}

/// Power-counting bound on the singularity order.
pub fn singularity_bound(spec: &ExternalLineSpec, theory: Theory) -> Result<i64, CausalError> {
    let fields = [
        ("fermion_lines", spec.fermion_lines),
        ("photon_lines", spec.photon_lines),
        ("derivatives", spec.derivatives),
        ("boson_lines", spec.boson_lines),
        ("ghost_lines", spec.ghost_lines),
        ("antighost_lines", spec.antighost_lines),
        ("ym_derivatives", spec.ym_derivatives),
    ];
    if let Some((name, v)) = fields.iter().find(|(_, v)| *v < 0) {
        return Err(CausalError::NegativeCount(format!("{name} = {v}")));
    }
    Ok(match theory {
        // 4 - 3f/2 - k - d, in half units so the floor is exact
        Theory::SpinorQed => {
            let twice = 8 - 3 * spec.fermion_lines - 2 * spec.photon_lines - 2 * spec.derivatives;
            twice.div_euclid(2)
        }
        Theory::YangMills => {
            4 - spec.boson_lines - spec.ghost_lines - spec.antighost_lines - spec.ym_derivatives
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingEstimate {
    pub exponent: f64,
    pub rms: f64,
    pub confident: bool,
}

/// Fits `log |d^(lambda p)|` against `log lambda` on a geometric schedule
/// `lambda in [10, 1e5]`.
pub fn scaling_degree_estimate(
    d: &CausalDistribution,
    direction: &FourVector,
    samples: usize,
) -> Result<ScalingEstimate, CausalError> {
    scaling_degree_on(d, direction, samples, 10.0, 1e5)
}

pub fn scaling_degree_on(
    d: &CausalDistribution,
    direction: &FourVector,
    samples: usize,
    lambda_min: f64,
    lambda_max: f64,
) -> Result<ScalingEstimate, CausalError> {
    if samples < 8 {
        return Err(CausalError::Invalid(format!("{samples} samples, need at least 8")));
    }
    let mut xs = Vec::with_capacity(samples);
    let mut ys = Vec::with_capacity(samples);
    for k in 0..samples {
        let lam = lambda_min * (lambda_max / lambda_min).powf(k as f64 / (samples - 1) as f64);
        let p = direction.map(|c| c * lam);
        let v = d.eval(&p)?.norm();
        if v == 0.0 || !v.is_finite() {
            return Err(CausalError::Evaluation(p, format!("|d| = {v} along the ray")));
        }
        xs.push(lam.ln());
        ys.push(v.ln());
    }
    let fit = fit_line(&xs, &ys).ok_or_else(|| CausalError::Invalid("degenerate fit".into()))?;
    let local: Vec<f64> = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
        .collect();
    let spread = local.iter().cloned().fold(f64::MIN, f64::max) - local.iter().cloned().fold(f64::MAX, f64::min);
    Ok(ScalingEstimate {
        exponent: fit.slope,
        rms: fit.rms,
        confident: fit.rms < 0.05 && spread < 0.2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropagatorKind {
    #[serde(rename = "Dret")]
    DRet,
    #[serde(rename = "Dav")]
    DAv,
    #[serde(rename = "Sret")]
    SRet,
    #[serde(rename = "Sav")]
    SAv,
    #[serde(rename = "Feynman")]
    Feynman,
}

/// Value `scalar * 1 + slash * pslash`; scalar propagators have `slash = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorValue {
    pub scalar: Complex64,
    pub slash: Complex64,
}

/// Retarded/advanced/Feynman propagators with explicit regulator:
/// `Dret = 1/(m^2 - p^2 - i eps p0)`, `Dav = 1/(m^2 - p^2 + i eps p0)`,
/// `DF = 1/(m^2 - p^2 - i eps)`, and `S = (m + pslash) D` for the Dirac kinds.
pub fn ret_adv_commutation(
    kind: PropagatorKind,
    m: f64,
    p: &FourVector,
    eps: f64,
) -> Result<PropagatorValue, CausalError> {
    if !(m >= 0.0) || eps < 0.0 {
        return Err(CausalError::Invalid(format!("m = {m}, eps = {eps}")));
    }
    let re = m * m - square(p);
    let im = match kind {
        PropagatorKind::DRet | PropagatorKind::SRet => -eps * p[0],
        PropagatorKind::DAv | PropagatorKind::SAv => eps * p[0],
        PropagatorKind::Feynman => -eps,
    };
    let scale = m * m + p.iter().map(|c| c * c).sum::<f64>() + 1.0;
    let den = Complex64::new(re, im);
    if den.norm() < 1e-12 * scale {
        return Err(CausalError::Pole {
            distance: re.abs(),
            eps,
        });
    }
    let d = den.inv();
    Ok(match kind {
        PropagatorKind::SRet | PropagatorKind::SAv => PropagatorValue {
            scalar: d * m,
            slash: d,
        },
        _ => PropagatorValue {
            scalar: d,
            slash: Complex64::new(0.0, 0.0),
        },
    })
}

/// JSON descriptor of a propagator-type distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagatorDescriptor {
    pub kind: PropagatorKind,
    pub mass: f64,
    pub eps: f64,
    #[serde(default)]
    pub normalization: Vec<f64>,
}

impl PropagatorDescriptor {
    /// Propagator value plus the polynomial `sum_k c_k (p^2)^k` of the normalization constants.
    pub fn eval(&self, p: &FourVector) -> Result<PropagatorValue, CausalError> {
        let mut v = ret_adv_commutation(self.kind, self.mass, p, self.eps)?;
        let s = square(p);
        let poly: f64 = self.normalization.iter().rev().fold(0.0, |acc, c| acc * s + c);
        v.scalar += poly;
        Ok(v)
    }
}
