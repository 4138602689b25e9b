//! Quadrature and small fitting helpers shared by the numeric modules.

use num_complex::Complex64;
use std::collections::BinaryHeap;
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not converge on [{a}, {b}]: estimate {estimate}, error {error:e}")]
    NonConvergence {
        a: f64,
        b: f64,
        estimate: Complex64,
        error: f64,
    },
    #[error("integrand returned a non-finite value at x = {0}")]
    NonFinite(f64),
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Tolerances for the adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-13,
            rel: 1e-11,
            max_intervals: 4000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            ..Default::default()
        }
    }
}

fn kronrod15<F>(f: &F, a: f64, b: f64) -> Result<(Complex64, f64), QuadError>
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !(fc.re.is_finite() && fc.im.is_finite()) {
        return Err(QuadError::NonFinite(center));
    }
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        if !(f1.re.is_finite() && f1.im.is_finite()) {
            return Err(QuadError::NonFinite(center - dx));
        }
        if !(f2.re.is_finite() && f2.im.is_finite()) {
            return Err(QuadError::NonFinite(center + dx));
        }
        kron += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let kron = kron * half;
    let gauss = gauss * half;
    Ok((kron, (kron - gauss).norm()))
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive 7/15-point Gauss-Kronrod integration of a complex integrand on `[a, b]`.
///
/// `breaks` are interior points where the integrand is known to be non-smooth; the
/// interval is split there before adaptation starts.
pub fn integrate_with_breaks<F>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Complex64, QuadError>
where
    F: Fn(f64) -> Complex64,
{
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (lo, hi, flip) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(hi);

    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    for w in cuts.windows(2) {
        let (value, error) = kronrod15(&f, w[0], w[1])?;
        total += value;
        total_err += error;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }

    let mut count = heap.len();
    while total_err > tol.abs.max(tol.rel * total.norm()) {
        if count >= tol.max_intervals {
            return Err(QuadError::NonConvergence {
                a,
                b,
                estimate: total * flip,
                error: total_err,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval can no longer be bisected in floating point
            heap.push(worst);
            return Err(QuadError::NonConvergence {
                a,
                b,
                estimate: total * flip,
                error: total_err,
            });
        }
        let (v1, e1) = kronrod15(&f, worst.a, mid)?;
        let (v2, e2) = kronrod15(&f, mid, worst.b)?;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        count += 1;
    }
    // recompute the sum to shed accumulated update roundoff
    let sum: Complex64 = heap.iter().map(|s| s.value).sum();
    Ok(sum * flip)
}

pub fn integrate<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Complex64, QuadError>
where
    F: Fn(f64) -> Complex64,
{
    integrate_with_breaks(f, a, b, &[], tol)
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64, QuadError>
where
    F: Fn(f64) -> f64,
{
    integrate(|x| Complex64::new(f(x), 0.0), a, b, tol).map(|z| z.re)
}

/// Integral over `[a, inf)` through the map `x = a + scale * u / (1 - u)`.
pub fn integrate_to_infinity<F>(
    f: F,
    a: f64,
    scale: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Complex64, QuadError>
where
    F: Fn(f64) -> Complex64,
{
    let mapped: Vec<f64> = breaks
        .iter()
        .filter(|&&x| x > a)
        .map(|&x| {
            let t = (x - a) / scale;
            t / (1.0 + t)
        })
        .collect();
    integrate_with_breaks(
        |u| {
            if u >= 1.0 {
                return Complex64::new(0.0, 0.0);
            }
            let om = 1.0 - u;
            let x = a + scale * u / om;
            let jac = scale / (om * om);
            let v = f(x) * jac;
            if v.re.is_finite() && v.im.is_finite() {
                v
            } else if om < 1e-12 {
                Complex64::new(0.0, 0.0)
            } else {
                v
            }
        },
        0.0,
        1.0,
        &mapped,
        tol,
    )
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    x.iter().zip(&w).map(|(&xi, &wi)| (c + h * xi, h * wi)).collect()
}

/// Composite Gauss-Legendre rule with `panels` equal panels of `n` nodes each.
pub fn composite_gauss_legendre(n: usize, panels: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let width = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(n * panels);
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let c = lo + 0.5 * width;
        for (&xi, &wi) in x.iter().zip(&w) {
            out.push((c + 0.5 * width * xi, 0.5 * width * wi));
        }
    }
    out
}

/// Least-squares line `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub rms: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum::<f64>()
        / nf)
        .sqrt();
    Some(LineFit {
        slope,
        intercept,
        rms,
    })
}

/// First derivative at `x` by Richardson-extrapolated central differences.
pub fn richardson_derivative<F>(f: F, x: f64, h0: f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    const LEVELS: usize = 5;
    let mut table = [[Complex64::new(0.0, 0.0); LEVELS]; LEVELS];
    let mut h = h0;
    for i in 0..LEVELS {
        table[i][0] = (f(x + h) - f(x - h)) / (2.0 * h);
        let mut factor = 4.0;
        for j in 1..=i {
            table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
            factor *= 4.0;
        }
        h *= 0.5;
    }
    table[LEVELS - 1][LEVELS - 1]
}

/// Limit of `f(h)` as `h -> 0+` from samples at `h0, h0/2, ...`, assuming an
/// expansion in integer powers of `h`.
pub fn richardson_limit<F>(f: F, h0: f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    const LEVELS: usize = 6;
    let mut table = [[Complex64::new(0.0, 0.0); LEVELS]; LEVELS];
    let mut h = h0;
    for i in 0..LEVELS {
        table[i][0] = f(h);
        let mut factor = 2.0;
        for j in 1..=i {
            table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
            factor *= 2.0;
        }
        h *= 0.5;
    }
    table[LEVELS - 1][LEVELS - 1]
}
