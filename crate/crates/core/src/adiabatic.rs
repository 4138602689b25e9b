//! Scaling family `g_eps(x) = g(eps x)` and the adiabatic limit `eps -> 0` of smeared
//! second-order contributions.
//!
//! The switching function enters through its transform in the energy transfer,
//! `ghat_eps(k0) = eps^-1 ghat(k0/eps)`, normalized so that `int ghat_eps dk0/2pi = g(0)`.
//! The `k0` integral runs on the line `Im kappa = eta` (with `k0 = eps kappa`); the retarded
//! Green functions are analytic there, so no `i0` limit is taken numerically.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::str::FromStr;
use thiserror::Error;

use crate::fock::{kernel_product, DiscreteKernel, FockError, MomentumGrid};
use crate::qed::{pi_spectral, OnShellCheck, QedError, SelfEnergy, VacuumPolarization, LOOP_NORM};
use crate::quad::{composite_gauss_legendre, fit_line, gauss_legendre_on, richardson_derivative, richardson_limit};
use crate::splitting::{
    split_with_tolerance, DispersionTable, LineDistribution, SplitError, SplitSpec, SubtractionPoint,
};
use crate::quad::Tolerance;
use crate::wick::{vacuum_expectation, WickPolynomial};

/// `Im kappa` of the integration line. Kept above `cutoff / 8` so that the dispersion
/// tables resolve every point.
const CONTOUR_SHIFT: f64 = 2.0;

/// Smallest admissible scaling parameter.
pub const MIN_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdiabaticError {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("order {0} is not available")]
    Unsupported(usize),
    #[error(transparent)]
    Qed(#[from] QedError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// Shape of the unit switching function, `g(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// `exp(-t^2/2)`
    Gaussian,
    /// `cos t exp(-t^2/2)`
    Modulated,
    /// `(1 + t^2/2) exp(-t^2/2)`
    Hermite,
}

impl Profile {
    pub const ALL: [Profile; 3] = [Profile::Gaussian, Profile::Modulated, Profile::Hermite];

    /// Fourier transform continued to complex `k`.
    pub fn transform(self, k: Complex64) -> Complex64 {
        let root = (2.0 * PI).sqrt();
        match self {
            Profile::Gaussian => root * (-0.5 * k * k).exp(),
            Profile::Modulated => {
                let one = Complex64::new(1.0, 0.0);
                0.5 * root * ((-0.5 * (k - one) * (k - one)).exp() + (-0.5 * (k + one) * (k + one)).exp())
            }
            Profile::Hermite => root * (-0.5 * k * k).exp() * (1.5 - 0.5 * k * k),
        }
    }

    fn cutoff(self) -> f64 {
        match self {
            Profile::Modulated => 13.0,
            _ => 12.0,
        }
    }
}

impl FromStr for Profile {
    type Err = AdiabaticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gaussian" => Ok(Profile::Gaussian),
            "modulated" => Ok(Profile::Modulated),
            "hermite" => Ok(Profile::Hermite),
            other => Err(AdiabaticError::Invalid(format!("unknown profile {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFamily {
    pub profile: Profile,
    /// `g(0)`
    pub g0: f64,
    epsilons: Vec<f64>,
}

impl ScalingFamily {
    pub fn new(profile: Profile, g0: f64, epsilons: Vec<f64>) -> Result<Self, AdiabaticError> {
        if epsilons.is_empty() {
            return Err(AdiabaticError::InvalidSchedule("empty".into()));
        }
        if let Some(e) = epsilons.iter().find(|e| !(e.is_finite() && **e >= MIN_EPSILON)) {
            return Err(AdiabaticError::InvalidSchedule(format!("epsilon {e} below {MIN_EPSILON}")));
        }
        if epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(AdiabaticError::InvalidSchedule("not strictly decreasing".into()));
        }
        if !g0.is_finite() {
            return Err(AdiabaticError::Invalid(format!("g(0) = {g0}")));
        }
        Ok(ScalingFamily { profile, g0, epsilons })
    }

    /// `2^-3, ..., 2^-14`
    pub fn default_schedule() -> Vec<f64> {
        (3..=14).map(|k| 2f64.powi(-k)).collect()
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    /// `ghat_eps(k0)`.
    pub fn transform(&self, k0: Complex64, eps: f64) -> Complex64 {
        self.g0 * self.profile.transform(k0 / eps) / eps
    }
}

/// External wave packets: `xi(p) = A p^2 exp(-p^2/w^2)` on the incoming line and a
/// Gaussian `phihat(P)` on the outgoing one, entire in `P^0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestData {
    pub xi_amplitude: f64,
    pub xi_width: f64,
    pub phi_center: f64,
    pub phi_width: f64,
}

impl Default for TestData {
    fn default() -> Self {
        TestData {
            xi_amplitude: 1.0,
            xi_width: 1.0,
            phi_center: 1.0,
            phi_width: 1.0,
        }
    }
}

impl TestData {
    pub fn xi(&self, p: f64) -> f64 {
        self.xi_amplitude * p * p * (-(p * p) / (self.xi_width * self.xi_width)).exp()
    }

    pub fn phi(&self, p0: Complex64, p: f64) -> Complex64 {
        let w2 = 2.0 * self.phi_width * self.phi_width;
        (-((p0 - self.phi_center) * (p0 - self.phi_center) + p * p) / w2).exp()
    }

    /// Radial nodes `|p|` with weights `4 pi p^2 xi(p) dp`.
    fn radial(&self) -> Vec<(f64, f64)> {
        gauss_legendre_on(32, 0.0, 6.0 * self.xi_width)
            .into_iter()
            .map(|(p, w)| (p, 4.0 * PI * p * p * w * self.xi(p)))
            .collect()
    }
}

/// Where the second-order insertion sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    /// Self energy on an external electron line, `int xi Sigma S phi`.
    SigmaIntoPsi,
    /// Vacuum polarization on an external photon line.
    PiIntoA,
    /// Vacuum polarization between two external currents.
    PiIntoCurrent,
}

impl FromStr for Channel {
    type Err = AdiabaticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sigma_into_psi" => Ok(Channel::SigmaIntoPsi),
            "pi_into_a" => Ok(Channel::PiIntoA),
            "pi_into_current" => Ok(Channel::PiIntoCurrent),
            other => Err(AdiabaticError::Invalid(format!("unknown channel {other}"))),
        }
    }
}

#[derive(Clone, Copy)]
pub enum Insertion<'a> {
    Sigma(&'a SelfEnergy),
    Pi(&'a VacuumPolarization),
}

impl Insertion<'_> {
    fn mass(&self) -> f64 {
        match self {
            Insertion::Sigma(se) => se.m,
            Insertion::Pi(_) => 0.0,
        }
    }
}

fn check_channel(channel: Channel, ins: &Insertion) -> Result<(), AdiabaticError> {
    match (channel, ins) {
        (Channel::SigmaIntoPsi, Insertion::Sigma(_)) => Ok(()),
        (Channel::PiIntoA | Channel::PiIntoCurrent, Insertion::Pi(_)) => Ok(()),
        _ => Err(AdiabaticError::Invalid(format!("{channel:?} does not match the insertion"))),
    }
}

/// Integrand in `k0` at external energy `p0`; `x = P^2 - p^2` for `P = p + (k0, 0)`.
fn kernel(channel: Channel, ins: &Insertion, p0: f64, k0: Complex64) -> Result<Complex64, AdiabaticError> {
    let x = k0 * (2.0 * p0 + k0);
    Ok(match (channel, ins) {
        (Channel::SigmaIntoPsi, Insertion::Sigma(se)) => {
            let m = se.m;
            let z = m * m + x;
            let a = se.a_at(z)?;
            let b = se.b_at(z)?;
            // tr[(pslash + m)(a + b Pslash)(Pslash + m)]
            let n = 4.0 * (m * (m * a + b * z) + (m * b + a) * (m * m + p0 * k0));
            -n / x
        }
        (Channel::PiIntoA, Insertion::Pi(vp)) => -vp.pi_at(x)? / x,
        (Channel::PiIntoCurrent, Insertion::Pi(vp)) => vp.pi_at(x)? / (x * x),
        _ => unreachable!("checked by check_channel"),
    })
}

/// `int d^3p xi(p) int dk0/2pi ghat_eps(k0) I(k0) phihat(p0 + k0, p)` at one `eps`.
pub fn smeared_contribution(
    channel: Channel,
    ins: Insertion,
    data: &TestData,
    family: &ScalingFamily,
    eps: f64,
) -> Result<Complex64, AdiabaticError> {
    check_channel(channel, &ins)?;
    let profile = family.profile;
    let eta = CONTOUR_SHIFT;
    let k = profile.cutoff();
    let kappa_rule = composite_gauss_legendre(16, 48, -k, k);
    let m = ins.mass();
    let mut total = Complex64::new(0.0, 0.0);
    for (p, wp) in data.radial() {
        if wp == 0.0 {
            continue;
        }
        let p0 = (p * p + m * m).sqrt();
        let mut inner = Complex64::new(0.0, 0.0);
        for &(kappa, wk) in &kappa_rule {
            let kc = Complex64::new(kappa, eta);
            let k0 = eps * kc;
            let g = family.g0 * profile.transform(kc);
            inner += wk / (2.0 * PI) * g * kernel(channel, &ins, p0, k0)? * data.phi(p0 + k0, p);
        }
        total += wp * inner;
    }
    Ok(total)
}

/// Value of the `eps -> 0` limit computed without smearing, `g(0) I(0) int xi phihat`,
/// or `None` when `I` is singular at `k0 = 0`.
pub fn epsilon_free_value(
    channel: Channel,
    ins: Insertion,
    data: &TestData,
    g0: f64,
) -> Result<Option<Complex64>, AdiabaticError> {
    check_channel(channel, &ins)?;
    let m = ins.mass();
    let overlap: f64 = data
        .radial()
        .into_iter()
        .map(|(p, w)| w * data.phi(Complex64::new((p * p + m * m).sqrt(), 0.0), p).re)
        .sum();
    const SMALL: f64 = 1e-9;
    let i0 = match ins {
        Insertion::Sigma(se) => {
            let report = se.check_on_shell(SMALL)?;
            let r1 = report.residual("a(m^2) + m b(m^2)").unwrap_or(f64::NAN);
            let r2 = report.residual("2m a'(m^2) + b(m^2) + 2m^2 b'(m^2)").unwrap_or(f64::NAN);
            if !(r1.abs() <= SMALL) {
                return Ok(None);
            }
            -4.0 * se.m * r2
        }
        Insertion::Pi(vp) => {
            if vp.threshold() == 0.0 {
                return Ok(None);
            }
            let pi = |s: f64| vp.pi(s).unwrap_or(Complex64::new(f64::NAN, 0.0));
            let h = 0.05 * vp.threshold();
            let d0 = pi(0.0).re;
            let d1 = richardson_derivative(pi, 0.0, h).re;
            match channel {
                Channel::PiIntoA => {
                    if d0.abs() > SMALL {
                        return Ok(None);
                    }
                    -d1
                }
                _ => {
                    if d0.abs() > SMALL || d1.abs() > SMALL {
                        return Ok(None);
                    }
                    let d2 = richardson_limit(|h| (pi(h) - 2.0 * pi(0.0) + pi(-h)) / (h * h), h).re;
                    0.5 * d2
                }
            }
        }
    };
    Ok(Some(Complex64::new(g0 * i0 * overlap, 0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    Diverged,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    /// Log-log slope of `|V(eps)|` over the tail of the schedule; NaN for an all-zero tail.
    pub exponent: f64,
    pub limit_estimate: Option<Complex64>,
}

/// Reads the tail of a sweep: a slope `<= -1/4` is divergence, a slope above `-1/10`
/// with non-increasing successive differences is convergence.
pub fn classify(epsilons: &[f64], values: &[Complex64]) -> Classification {
    let n = epsilons.len().min(values.len());
    if n < 3 {
        return Classification {
            verdict: Verdict::Inconclusive,
            exponent: f64::NAN,
            limit_estimate: None,
        };
    }
    let start = (n / 2).min(n - 3);
    let eps = &epsilons[start..n];
    let vals = &values[start..n];
    let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    // Aitken on the last three points; exact for `L + c eps^p` on a geometric schedule
    let extrapolated = {
        let (v1, v2, v3) = (vals[vals.len() - 3], vals[vals.len() - 2], vals[vals.len() - 1]);
        let den = (v3 - v2) - (v2 - v1);
        if den.norm() > 1e-300 {
            v3 - (v3 - v2) * (v3 - v2) / den
        } else {
            v3
        }
    };
    if scale == 0.0 {
        return Classification {
            verdict: Verdict::Converged,
            exponent: f64::NAN,
            limit_estimate: Some(Complex64::new(0.0, 0.0)),
        };
    }
    let pts: Vec<(f64, f64)> = eps
        .iter()
        .zip(vals)
        .filter(|(_, v)| v.norm() > 0.0)
        .map(|(e, v)| (e.ln(), v.norm().ln()))
        .collect();
    let (lx, ly): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let exponent = fit_line(&lx, &ly).map(|f| f.slope).unwrap_or(f64::NAN);
    let floor = 1e-13 * scale;
    let diffs: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let settling = diffs.windows(2).all(|d| d[1] <= 1.05 * d[0] + floor);
    let verdict = if exponent <= -0.25 {
        Verdict::Diverged
    } else if exponent > -0.1 && settling {
        Verdict::Converged
    } else {
        Verdict::Inconclusive
    };
    Classification {
        verdict,
        exponent,
        limit_estimate: match verdict {
            Verdict::Converged => Some(extrapolated),
            _ => None,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub channel: Channel,
    pub profile: Profile,
    pub epsilons: Vec<f64>,
    pub values: Vec<Complex64>,
    pub verdict: Verdict,
    pub exponent: f64,
    pub limit_estimate: Option<Complex64>,
    pub epsilon_free: Option<Complex64>,
}

pub fn sweep(
    channel: Channel,
    ins: Insertion,
    data: &TestData,
    family: &ScalingFamily,
) -> Result<SweepResult, AdiabaticError> {
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    sweep_with_threads(channel, ins, data, family, threads)
}

/// [`sweep`] with the schedule distributed over `threads` workers; results are kept in
/// schedule order.
pub fn sweep_with_threads(
    channel: Channel,
    ins: Insertion,
    data: &TestData,
    family: &ScalingFamily,
    threads: usize,
) -> Result<SweepResult, AdiabaticError> {
    let eps = family.epsilons();
    let threads = threads.clamp(1, eps.len());
    let mut slots: Vec<Option<Result<Complex64, AdiabaticError>>> = vec![None; eps.len()];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                scope.spawn(move || {
                    (w..eps.len())
                        .step_by(threads)
                        .map(|i| (i, smeared_contribution(channel, ins, data, family, eps[i])))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, v) in h.join().expect("sweep worker panicked") {
                slots[i] = Some(v);
            }
        }
    });
    let values = slots
        .into_iter()
        .map(|v| v.expect("every epsilon evaluated"))
        .collect::<Result<Vec<_>, _>>()?;
    let class = classify(family.epsilons(), &values);
    Ok(SweepResult {
        channel,
        profile: family.profile,
        epsilons: family.epsilons().to_vec(),
        values,
        verdict: class.verdict,
        exponent: class.exponent,
        limit_estimate: class.limit_estimate,
        epsilon_free: epsilon_free_value(channel, ins, data, family.g0)?,
    })
}

/// Spectral function of the second-order vacuum graph: the photon spectral weight
/// `3 s rho_Pi` folded with the massless two-body phase space.
pub fn vacuum_spectral(m: f64, s: f64) -> f64 {
    let threshold = 4.0 * m * m;
    if s <= threshold {
        return 0.0;
    }
    let top = (s - threshold).sqrt();
    let sum: f64 = gauss_legendre_on(48, 0.0, top)
        .into_iter()
        .map(|(t, w)| {
            let sp = threshold + t * t;
            w * 2.0 * t * 3.0 * sp * pi_spectral(m, sp) * (s - sp)
        })
        .sum();
    LOOP_NORM * PI * sum / (2.0 * s)
}

/// Vacuum graph `t(s)`, split with three subtractions at `s = 0`.
pub struct VacuumGraph {
    pub m: f64,
    table: DispersionTable,
}

impl VacuumGraph {
    pub fn build(m: f64, constants: [f64; 3]) -> Result<Self, AdiabaticError> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(AdiabaticError::Invalid(format!(
                "vacuum graph needs m > 0 for subtraction at p^2 = 0, got {m}"
            )));
        }
        let d = LineDistribution::spectral(4.0 * m * m, move |s| vacuum_spectral(m, s), 2);
        let spec = SplitSpec::anchored(
            2,
            SubtractionPoint::Zero,
            constants.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        );
        let split = split_with_tolerance(&d, &spec, Tolerance::new(1e-14, 1e-10))?;
        let table = split.table().expect("spectral split");
        Ok(VacuumGraph { m, table })
    }

    pub fn eval(&self, s: f64) -> Result<Complex64, AdiabaticError> {
        Ok(self.table.eval(Complex64::new(s, 0.0))?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakLimit {
    pub order: usize,
    pub epsilons: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Extrapolation in `eps^2` from the two smallest `eps`.
    pub limit_estimate: Complex64,
}

/// `<Omega, S_n(g_eps) Omega>` along the schedule, for `n = 1, 2`. Spatially the switching
/// function is a unit Gaussian; the family's profile sets the time dependence.
pub fn weak_limit_vacuum(
    order: usize,
    family: &ScalingFamily,
    m: f64,
    constants: [f64; 3],
) -> Result<WeakLimit, AdiabaticError> {
    let eps = family.epsilons().to_vec();
    let values = match order {
        1 => {
            let vev = vacuum_expectation(&WickPolynomial::qed_vertex(1));
            if !vev.is_empty() {
                return Err(AdiabaticError::Invalid("first-order vertex has a vacuum part".into()));
            }
            vec![Complex64::new(0.0, 0.0); eps.len()]
        }
        2 => {
            let graph = VacuumGraph::build(m, constants)?;
            let q_max = family.profile.cutoff();
            let q_rule = composite_gauss_legendre(16, 12, 0.0, q_max);
            let r_rule = composite_gauss_legendre(16, 6, 0.0, 9.0);
            let spatial = |r: f64| (2.0 * PI).powf(1.5) * (-0.5 * r * r).exp();
            eps.iter()
                .map(|&e| {
                    let mut sum = Complex64::new(0.0, 0.0);
                    for &(q0, wq) in &q_rule {
                        let gt = family.g0 * family.profile.transform(Complex64::new(q0, 0.0)).re;
                        for &(r, wr) in &r_rule {
                            let gs = spatial(r);
                            let weight = 2.0 * wq * 4.0 * PI * r * r * wr * (gt * gs).powi(2);
                            sum += weight * graph.eval(e * e * (q0 * q0 - r * r))?;
                        }
                    }
                    Ok(sum / (2.0 * PI).powi(4) / e.powi(4))
                })
                .collect::<Result<Vec<_>, AdiabaticError>>()?
        }
        n => return Err(AdiabaticError::Unsupported(n)),
    };
    let n = values.len();
    let limit_estimate = if n >= 2 {
        let (e1, e2) = (eps[n - 2] * eps[n - 2], eps[n - 1] * eps[n - 1]);
        (values[n - 1] * e1 - values[n - 2] * e2) / (e1 - e2)
    } else {
        values[0]
    };
    Ok(WeakLimit {
        order,
        epsilons: eps,
        values,
        limit_estimate,
    })
}

/// Kernel of the product of two operators already taken to the adiabatic limit.
pub fn product_of_limits(
    grid: &MomentumGrid,
    a: &DiscreteKernel,
    b: &DiscreteKernel,
) -> Result<Vec<DiscreteKernel>, AdiabaticError> {
    Ok(kernel_product(grid, a, b)?)
}
