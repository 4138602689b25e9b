//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use egqft::fock::{kernel_product, DiscreteKernel, FockGridState, MomentumGrid};
use egqft::induction::{Block, Series, Word};
use egqft::wick::{Character, Coeff, Factor, Field, FieldLeg, WickPolynomial};
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

// ---------------------------------------------------------------------------
// Dense Fock space

/// Occupation basis truncated at `cutoff` total quanta, with ladder operators as
/// dense matrices; Fermi signs by Jordan-Wigner over lower-indexed Fermi modes.
pub struct DenseFock {
    pub basis: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    pub weights: Vec<f64>,
    pub fermi: Vec<bool>,
    pub krein: Vec<i8>,
    pub cutoff: usize,
}

impl DenseFock {
    pub fn new(weights: &[f64], fermi: &[bool], cutoff: usize) -> Self {
        Self::with_krein(weights, fermi, &vec![1; weights.len()], cutoff)
    }

    pub fn with_krein(weights: &[f64], fermi: &[bool], krein: &[i8], cutoff: usize) -> Self {
        let modes = weights.len();
        let mut basis = Vec::new();
        let mut cur = vec![0u8; modes];
        loop {
            let total: usize = cur.iter().map(|&n| n as usize).sum();
            if total <= cutoff && cur.iter().zip(fermi).all(|(&n, &f)| !f || n <= 1) {
                basis.push(cur.clone());
            }
            // odometer over 0..=cutoff per mode
            let mut i = 0;
            loop {
                if i == modes {
                    let index = basis.iter().cloned().enumerate().map(|(k, b)| (b, k)).collect();
                    return DenseFock {
                        basis,
                        index,
                        weights: weights.to_vec(),
                        fermi: fermi.to_vec(),
                        krein: krein.to_vec(),
                        cutoff,
                    };
                }
                cur[i] += 1;
                if cur[i] as usize <= cutoff {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, config: &[u8]) -> Option<usize> {
        self.index.get(config).copied()
    }

    fn jw(&self, config: &[u8], mode: usize) -> f64 {
        let odd: usize = (0..mode)
            .filter(|&j| self.fermi[j])
            .map(|j| config[j] as usize)
            .sum();
        if self.fermi[mode] && odd % 2 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    /// One ladder step on a basis configuration: `(target, amplitude)`, or `None` when
    /// the result vanishes or leaves the truncated space.
    pub fn ladder(&self, config: &[u8], mode: usize, create: bool) -> Option<(Vec<u8>, f64)> {
        let k = config[mode];
        let mut out = config.to_vec();
        let amp = if create {
            if self.fermi[mode] && k >= 1 {
                return None;
            }
            out[mode] += 1;
            ((k as f64 + 1.0) / self.weights[mode]).sqrt()
        } else {
            if k == 0 {
                return None;
            }
            out[mode] -= 1;
            (k as f64 / self.weights[mode]).sqrt()
        };
        if !self.index.contains_key(&out) {
            return None;
        }
        Some((out, self.jw(config, mode) * amp))
    }

    pub fn annihilator(&self, mode: usize) -> CMat {
        let n = self.dim();
        let mut a = CMat::zeros(n, n);
        for (col, config) in self.basis.iter().enumerate() {
            if let Some((to, amp)) = self.ladder(config, mode, false) {
                a[(self.index[&to], col)] = c(amp);
            }
        }
        a
    }

    pub fn creator(&self, mode: usize) -> CMat {
        self.annihilator(mode).adjoint()
    }

    /// Krein metric `diag(eta_n)`.
    pub fn eta(&self) -> CMat {
        let n = self.dim();
        let mut e = CMat::zeros(n, n);
        for (i, config) in self.basis.iter().enumerate() {
            let neg = config
                .iter()
                .zip(&self.krein)
                .filter(|(k, s)| **s < 0 && **k % 2 == 1)
                .count();
            e[(i, i)] = c(if neg % 2 == 0 { 1.0 } else { -1.0 });
        }
        e
    }

    pub fn vector(&self, state: &FockGridState) -> Vec<Complex64> {
        let mut v = vec![Complex64::zero(); self.dim()];
        for (config, amp) in state.iter() {
            v[self.index[config]] += amp;
        }
        v
    }

    pub fn state(&self, v: &[Complex64]) -> FockGridState {
        let mut s = FockGridState::zero(self.weights.len(), self.cutoff);
        for (config, &a) in self.basis.iter().zip(v) {
            if a != Complex64::zero() {
                s.add(config.clone(), a).unwrap();
            }
        }
        s
    }

    pub fn total(&self, i: usize) -> usize {
        self.basis[i].iter().map(|&n| n as usize).sum()
    }

    /// Random state supported on configurations with at most `max_total` quanta.
    pub fn random_state<R: Rng>(&self, rng: &mut R, max_total: usize) -> Vec<Complex64> {
        (0..self.dim())
            .map(|i| {
                if self.total(i) <= max_total {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                } else {
                    Complex64::zero()
                }
            })
            .collect()
    }

    /// `sum_t k(t) w(t) a+_{p1}..a+_{pl} a_{q1}..a_{qm}` with `k` given on row-major
    /// tuples; each word acts on basis columns right to left.
    pub fn kernel_operator(&self, l: usize, m: usize, values: &[Complex64]) -> CMat {
        let modes = self.weights.len();
        let n = self.dim();
        let mut out = CMat::zeros(n, n);
        for (idx, &k) in values.iter().enumerate() {
            if k == Complex64::zero() {
                continue;
            }
            let mut tuple = vec![0usize; l + m];
            let mut r = idx;
            for slot in (0..l + m).rev() {
                tuple[slot] = r % modes;
                r /= modes;
            }
            let w: f64 = tuple.iter().map(|&md| self.weights[md]).product();
            'col: for (col, config) in self.basis.iter().enumerate() {
                let mut cur = config.clone();
                let mut amp = 1.0;
                for (slot, &md) in tuple.iter().enumerate().rev() {
                    match self.ladder(&cur, md, slot < l) {
                        Some((next, a)) => {
                            cur = next;
                            amp *= a;
                        }
                        None => continue 'col,
                    }
                }
                out[(self.index[&cur], col)] += k * (w * amp);
            }
        }
        out
    }
}

/// `<<X, Y>> = Y^dagger eta X`.
pub fn krein_pairing(eta: &CMat, x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let xv = nalgebra::DVector::from_column_slice(x);
    let yv = nalgebra::DVector::from_column_slice(y);
    (yv.adjoint() * eta * xv)[(0, 0)]
}

pub fn mat_vec(m: &CMat, v: &[Complex64]) -> Vec<Complex64> {
    (m * nalgebra::DVector::from_column_slice(v)).iter().copied().collect()
}

pub fn max_abs(v: impl IntoIterator<Item = Complex64>) -> f64 {
    v.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn grid_weights(grid: &MomentumGrid) -> (Vec<f64>, Vec<bool>) {
    let fermi = (0..grid.modes()).map(|i| grid.is_fermi(i)).collect();
    (grid.weights.clone(), fermi)
}

/// `max |[a_i, a+_j]_(-/+) - delta_ij/w_i|` on states below the cutoff, dense.
pub fn dense_bracket_deviation(dense: &DenseFock) -> f64 {
    let modes = dense.weights.len();
    let low: Vec<usize> = (0..dense.dim()).filter(|&k| dense.total(k) < dense.cutoff).collect();
    let mut worst = 0.0f64;
    for i in 0..modes {
        for j in 0..modes {
            let (a, cj) = (dense.annihilator(i), dense.creator(j));
            let anti = dense.fermi[i] && dense.fermi[j];
            let br = if anti { &a * &cj + &cj * &a } else { &a * &cj - &cj * &a };
            for &col in &low {
                for row in 0..dense.dim() {
                    let expect = if i == j && row == col { 1.0 / dense.weights[i] } else { 0.0 };
                    worst = worst.max((br[(row, col)] - expect).norm());
                }
            }
        }
    }
    worst
}

/// `Xi(a) Xi(b)` against the sum of the product kernels, on states with room for both.
pub fn product_defect(grid: &MomentumGrid, a: &DiscreteKernel, b: &DiscreteKernel, cutoff: usize) -> f64 {
    let (w, f) = grid_weights(grid);
    let dense = DenseFock::new(&w, &f, cutoff);
    let lhs = dense.kernel_operator(a.l, a.m, &a.values) * dense.kernel_operator(b.l, b.m, &b.values);
    let mut rhs = CMat::zeros(dense.dim(), dense.dim());
    for k in kernel_product(grid, a, b).unwrap() {
        rhs += dense.kernel_operator(k.l, k.m, &k.values);
    }
    let room = cutoff - a.l - b.l;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for col in (0..dense.dim()).filter(|&j| dense.total(j) <= room) {
        for row in 0..dense.dim() {
            worst = worst.max((lhs[(row, col)] - rhs[(row, col)]).norm());
            scale = scale.max(lhs[(row, col)].norm());
        }
    }
    worst / scale.max(1.0)
}

// ---------------------------------------------------------------------------
// Wick normal ordering by rewriting

fn oracle_contractible(a: &FieldLeg, b: &FieldLeg) -> bool {
    if a.character != Character::Annihilation || b.character != Character::Creation {
        return false;
    }
    matches!(
        (a.field, b.field),
        (Field::Psi, Field::PsiBar) | (Field::PsiBar, Field::Psi) | (Field::Photon, Field::Photon) | (Field::Scalar, Field::Scalar)
    )
}

type Terms = BTreeMap<(Vec<FieldLeg>, Vec<Factor>), Coeff>;

fn push(out: &mut Terms, legs: Vec<FieldLeg>, mut factors: Vec<Factor>, value: Coeff) {
    factors.sort();
    let e = out.entry((legs.clone(), factors.clone())).or_insert_with(Coeff::zero);
    *e += value;
    if e.is_zero() {
        out.remove(&(legs, factors));
    }
}

/// Bubble sort by the leg order, one graded transposition at a time.
fn bubble_canonical(mut legs: Vec<FieldLeg>) -> Option<(Vec<FieldLeg>, i64)> {
    let mut sign = 1;
    let n = legs.len();
    for pass in 0..n {
        for i in 0..n.saturating_sub(1 + pass) {
            if legs[i] > legs[i + 1] {
                if legs[i].field.is_fermi() && legs[i + 1].field.is_fermi() {
                    sign = -sign;
                }
                legs.swap(i, i + 1);
            }
        }
    }
    for w in legs.windows(2) {
        if w[0] == w[1] && w[0].field.is_fermi() {
            return None;
        }
    }
    Some((legs, sign))
}

/// Brings `a b` to normal order by repeatedly replacing an adjacent
/// annihilator-creator pair with its graded swap plus the pairing.
pub fn rewrite_product(a: &WickPolynomial, b: &WickPolynomial) -> Terms {
    let mut work: Vec<(Vec<FieldLeg>, Vec<Factor>, Coeff)> = Vec::new();
    for ta in a.terms() {
        for tb in b.terms() {
            let mut legs = ta.legs.clone();
            legs.extend(tb.legs.iter().cloned());
            let mut f = ta.factors.clone();
            f.extend(tb.factors.iter().cloned());
            work.push((legs, f, ta.coefficient * tb.coefficient));
        }
    }
    let mut out = Terms::new();
    while let Some((legs, factors, value)) = work.pop() {
        let bad = legs.windows(2).position(|w| {
            w[0].character == Character::Annihilation && w[1].character == Character::Creation
        });
        match bad {
            None => {
                if let Some((sorted, s)) = bubble_canonical(legs) {
                    push(&mut out, sorted, factors, value * Coeff::new(s.into(), 0.into()));
                }
            }
            Some(i) => {
                let (x, y) = (&legs[i], &legs[i + 1]);
                if oracle_contractible(x, y) {
                    let mut f = factors.clone();
                    f.push(Factor::Pairing {
                        field: x.field,
                        left: (x.slot, x.index.clone()),
                        right: (y.slot, y.index.clone()),
                    });
                    let mut rest = legs.clone();
                    rest.drain(i..i + 2);
                    work.push((rest, f, value));
                }
                let swap_sign = if x.field.is_fermi() && y.field.is_fermi() { -1 } else { 1 };
                let mut swapped = legs.clone();
                swapped.swap(i, i + 1);
                work.push((swapped, factors, value * Coeff::new(swap_sign.into(), 0.into())));
            }
        }
    }
    out
}

pub fn term_map(p: &WickPolynomial) -> Terms {
    p.terms()
        .into_iter()
        .map(|t| ((t.legs, t.factors), t.coefficient))
        .collect()
}

// ---------------------------------------------------------------------------
// Inverse series by ordered set partitions

/// Sign of reordering `seq` into increasing order, counting swaps of odd points.
pub fn transposition_sign(seq: &[usize], odd: &[bool]) -> i64 {
    let mut v = seq.to_vec();
    let mut sign = 1;
    for pass in 0..v.len() {
        for i in 0..v.len().saturating_sub(1 + pass) {
            if v[i] > v[i + 1] {
                if odd.get(v[i]).copied().unwrap_or(false) && odd.get(v[i + 1]).copied().unwrap_or(false) {
                    sign = -sign;
                }
                v.swap(i, i + 1);
            }
        }
    }
    sign
}

fn ordered_partitions(points: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if points.is_empty() {
        return vec![vec![]];
    }
    let n = points.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let head: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| points[i]).collect();
        let rest: Vec<usize> = (0..n).filter(|i| mask & (1 << i) == 0).map(|i| points[i]).collect();
        for mut tail in ordered_partitions(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

/// `Sbar(x_1..x_n) = sum over ordered partitions (-1)^k S(P_1)..S(P_k)`, each word
/// weighted with the Grassmann sign of its point sequence.
pub fn sbar_by_partitions(n: usize, odd: &[bool]) -> BTreeMap<Word, i64> {
    let points: Vec<usize> = (0..n).collect();
    let mut out = BTreeMap::new();
    for part in ordered_partitions(&points) {
        let k = part.len() as i64;
        let seq: Vec<usize> = part.iter().flatten().copied().collect();
        let word: Word = part
            .into_iter()
            .map(|p| Block {
                series: Series::S,
                points: p,
            })
            .collect();
        let sign = if k % 2 == 0 { 1 } else { -1 };
        *out.entry(word).or_insert(0) += sign * transposition_sign(&seq, odd);
    }
    out.retain(|_, v| *v != 0);
    out
}

// ---------------------------------------------------------------------------
// Quadrature and fitting

/// Composite Simpson rule with `n` (even) intervals.
pub fn simpson<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, n: usize) -> Complex64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += f(a + i as f64 * h) * w;
    }
    s * (h / 3.0)
}

/// `int_0^inf theta(t) sgn(t) e^{-|t|} e^{iwt} dt` by time quadrature.
pub fn theta_split_sign_exp(w: f64) -> Complex64 {
    simpson(|t| Complex64::new(0.0, w * t).exp() * (-t).exp(), 0.0, 45.0, 90_000)
}

/// Least-squares polynomial of degree `deg`; returns `(coefficients, max residual)`.
pub fn poly_fit(x: &[f64], y: &[Complex64], deg: usize) -> (Vec<Complex64>, f64) {
    let rows = x.len();
    let a = CMat::from_fn(rows, deg + 1, |i, j| c(x[i].powi(j as i32)));
    let b = CMat::from_fn(rows, 1, |i, _| y[i]);
    let svd = a.clone().svd(true, true);
    let coef = svd.solve(&b, 1e-14).expect("solvable");
    let fit = &a * &coef;
    let resid = (0..rows).map(|i| (fit[(i, 0)] - y[i]).norm()).fold(0.0, f64::max);
    (coef.iter().copied().collect(), resid)
}

// ---------------------------------------------------------------------------
// Vacuum polarization

/// Monte Carlo over the two-body sphere of `(1/8pi^2) int dPhi_2 T^{11} / s`, with
/// `T^{mu nu} = 4[k1^mu k2^nu + k1^nu k2^mu - g^{mu nu}(k1.k2 + m^2)]`.
pub fn pi_spectral_mc<R: Rng>(rng: &mut R, m: f64, s: f64, samples: usize) -> f64 {
    if s <= 4.0 * m * m {
        return 0.0;
    }
    let e = s.sqrt() / 2.0;
    let k = (e * e - m * m).sqrt();
    let k12 = e * e + k * k;
    let mut acc = 0.0;
    for _ in 0..samples {
        let cos: f64 = rng.gen_range(-1.0..1.0);
        let phi: f64 = rng.gen_range(0.0..2.0 * PI);
        let nx = (1.0 - cos * cos).sqrt() * phi.cos();
        let k1x = k * nx;
        let k2x = -k1x;
        acc += 4.0 * (2.0 * k1x * k2x + k12 + m * m);
    }
    // int dPhi_2 = pi k / sqrt(s) times the sphere average
    let phase = PI * k / s.sqrt();
    phase * acc / samples as f64 / (8.0 * PI * PI) / s
}

/// `(s^2/pi) int rho(s') / (s'^2 (s' - s)) ds'` for `s` below threshold, by a mapped
/// Simpson rule in `u = 1/(1+t)` with `s' = thr + t^2`.
pub fn pi_dispersion_below(rho: &dyn Fn(f64) -> f64, thr: f64, s: f64) -> f64 {
    let f = |u: f64| {
        if u <= 0.0 || u >= 1.0 {
            return c(0.0);
        }
        let t = (1.0 - u) / u;
        let sp = thr + t * t;
        c(2.0 * t * rho(sp) / (sp * sp * (sp - s)) / (u * u))
    };
    s * s * simpson(f, 0.0, 1.0, 40_000).re / PI
}

// ---------------------------------------------------------------------------
// Cubic scalar oscillator

/// `phi(t) = (a e^{-imt} + a+ e^{imt})/sqrt(2m)` on `0..=cutoff` quanta.
pub struct OscillatorOracle {
    pub m: f64,
    a: CMat,
}

impl OscillatorOracle {
    pub fn new(m: f64, cutoff: usize) -> Self {
        let n = cutoff + 1;
        let a = CMat::from_fn(n, n, |i, j| if j == i + 1 { c((j as f64).sqrt()) } else { c(0.0) });
        OscillatorOracle { m, a }
    }

    /// `:phi(t)^3:/6` expanded binomially with creators to the left.
    pub fn lagrangian(&self, t: f64) -> CMat {
        let n = self.a.nrows();
        let ap = self.a.adjoint() * Complex64::new(0.0, self.m * t).exp();
        let am = &self.a * Complex64::new(0.0, -self.m * t).exp();
        let mut out = CMat::zeros(n, n);
        for k in 0..=3u32 {
            let binom = [1.0, 3.0, 3.0, 1.0][k as usize];
            let mut op = CMat::identity(n, n);
            for _ in 0..k {
                op *= &ap;
            }
            for _ in k..3 {
                op *= &am;
            }
            out += op * c(binom);
        }
        out * c(1.0 / (6.0 * (2.0 * self.m).powf(1.5)))
    }

    /// `T[S_1(t1) S_1(t2)]` with `S_1 = i L`, for `t1 != t2`.
    pub fn chronological(&self, t1: f64, t2: f64) -> CMat {
        let i = Complex64::new(0.0, 1.0);
        let l1 = self.lagrangian(t1) * i;
        let l2 = self.lagrangian(t2) * i;
        if t1 > t2 {
            l1 * l2
        } else {
            l2 * l1
        }
    }
}
