//! The inductive step: from `S_k`, `Sbar_k` (`k < n`) to `A'_n`, `R'_n`, `D_n = R'_n - A'_n`
//! and `S_n = ret D_n - R'_n = adv D_n - A'_n`.
//!
//! Two levels are provided. Words in the symbols `S(X)`, `Sbar(X)` carry the combinatorics
//! and Grassmann signs for `n <= 5`; at `n = 2` the products are expanded with the Wick
//! theorem and evaluated numerically for a single oscillator mode on a time lattice.

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use thiserror::Error;

use crate::grassmann::graded_permutation_sign;
use crate::wick::{
    coeff, operator_product, wick_product, Coeff, Factor, Field, FieldLeg, WickError, WickPolynomial,
};

/// Largest order handled symbolically.
pub const MAX_SYMBOLIC_ORDER: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InductionError {
    #[error("order {n} exceeds the symbolic maximum {max}")]
    OrderTooLarge { n: usize, max: usize },
    #[error("invalid order or grading: {0}")]
    Invalid(String),
    #[error("no split supplied for the causal coefficient of {0}")]
    MissingSplit(String),
    #[error("coefficient cannot be evaluated numerically: {0}")]
    NotNumeric(String),
    #[error(transparent)]
    Wick(#[from] WickError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Series {
    S,
    Sbar,
    /// Retarded part of `D_n`.
    Ret,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    pub series: Series,
    /// Sorted, zero-based points.
    pub points: Vec<usize>,
}

impl Block {
    fn new(series: Series, mut points: Vec<usize>) -> Self {
        points.sort_unstable();
        Block { series, points }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.series {
            Series::S => "S",
            Series::Sbar => "Sbar",
            Series::Ret => "ret D",
        };
        let pts: Vec<String> = self.points.iter().map(|p| format!("x{}", p + 1)).collect();
        write!(f, "{name}({})", pts.join(","))
    }
}

pub type Word = Vec<Block>;

/// Integer combination of words; the coefficient of a word includes the Grassmann sign
/// of its point sequence relative to increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WordPolynomial {
    terms: BTreeMap<Word, i64>,
}

impl WordPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add(&mut self, word: Word, c: i64) {
        if c == 0 {
            return;
        }
        let e = self.terms.entry(word.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&word);
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add(w.clone(), *c);
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(-1))
    }

    pub fn scaled(&self, k: i64) -> Self {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            out.add(w.clone(), c * k);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &i64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, word: &[Block]) -> i64 {
        self.terms.get(word).copied().unwrap_or(0)
    }

    /// Replaces every `Sbar` block by its expansion in `S` words.
    pub fn expand_sbar(&self, odd: &[bool]) -> Self {
        let mut memo = HashMap::new();
        let mut out = Self::zero();
        for (word, c) in &self.terms {
            let mut partial: Vec<(Word, i64)> = vec![(Vec::new(), *c)];
            for block in word {
                if block.series == Series::Sbar {
                    let exp = inverse_block(&block.points, odd, &mut memo);
                    let mut next = Vec::new();
                    for (w, c) in &partial {
                        for (e, k) in &exp.terms {
                            let mut nw = w.clone();
                            nw.extend(e.iter().cloned());
                            next.push((nw, c * k));
                        }
                    }
                    partial = next;
                } else {
                    for (w, _) in partial.iter_mut() {
                        w.push(block.clone());
                    }
                }
            }
            for (w, c) in partial {
                out.add(w, c);
            }
        }
        out
    }
}

impl fmt::Display for WordPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{c:+}")?;
            for b in w {
                write!(f, " {b}")?;
            }
        }
        Ok(())
    }
}

/// Grassmann sign of a point sequence relative to its increasing order.
pub fn sequence_sign(points: &[usize], odd: &[bool]) -> i8 {
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    let target: Vec<usize> = points
        .iter()
        .map(|p| sorted.binary_search(p).expect("point present"))
        .collect();
    let grades: Vec<bool> = sorted.iter().map(|&p| odd.get(p).copied().unwrap_or(false)).collect();
    graded_permutation_sign(&target, &grades)
}

fn word_sign(word: &[Block], odd: &[bool]) -> i64 {
    let seq: Vec<usize> = word.iter().flat_map(|b| b.points.iter().copied()).collect();
    sequence_sign(&seq, odd) as i64
}

fn inverse_block(points: &[usize], odd: &[bool], memo: &mut HashMap<Vec<usize>, WordPolynomial>) -> WordPolynomial {
    if let Some(p) = memo.get(points) {
        return p.clone();
    }
    // S(X) Sbar(0) + sum_{Y} S(Y) Sbar(X\Y) = 0 over nonempty proper Y
    let mut out = WordPolynomial::zero();
    out.add(vec![Block::new(Series::S, points.to_vec())], -1);
    let n = points.len();
    for mask in 1..(1u32 << n) - 1 {
        let y: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| points[i]).collect();
        let rest: Vec<usize> = (0..n).filter(|i| mask & (1 << i) == 0).map(|i| points[i]).collect();
        let inner = inverse_block(&rest, odd, memo);
        let head = Block::new(Series::S, y);
        for (w, c) in inner.terms() {
            let mut nw = vec![head.clone()];
            nw.extend(w.iter().cloned());
            // inner coefficients carry the sign relative to `rest`; re-sign against `points`
            let inner_sign = word_sign(w, odd) * sequence_sign(&rest, odd) as i64;
            out.add(nw.clone(), -c * inner_sign * word_sign(&nw, odd));
        }
    }
    memo.insert(points.to_vec(), out.clone());
    out
}

/// `Sbar(x_1, ..., x_n)` expanded in products of `S`, from `S(g) S(g)^{-1} = 1`.
pub fn invert_series(n: usize, odd: &[bool]) -> Result<WordPolynomial, InductionError> {
    check_order(n, odd)?;
    let points: Vec<usize> = (0..n).collect();
    Ok(inverse_block(&points, odd, &mut HashMap::new()))
}

fn check_order(n: usize, odd: &[bool]) -> Result<(), InductionError> {
    if n == 0 {
        return Err(InductionError::Invalid("order 0".into()));
    }
    if n > MAX_SYMBOLIC_ORDER {
        return Err(InductionError::OrderTooLarge {
            n,
            max: MAX_SYMBOLIC_ORDER,
        });
    }
    if !odd.is_empty() && odd.len() != n {
        return Err(InductionError::Invalid(format!("{} grades for order {n}", odd.len())));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct InductiveStep<P> {
    pub aprime: P,
    pub rprime: P,
    pub d: P,
}

/// `A'_n` and `R'_n` as sums over `Z = X + Y`, `X` nonempty, with `x_n` the last point.
pub fn build_aprime_rprime(n: usize, odd: &[bool]) -> Result<InductiveStep<WordPolynomial>, InductionError> {
    check_order(n, odd)?;
    let xn = n - 1;
    let mut aprime = WordPolynomial::zero();
    let mut rprime = WordPolynomial::zero();
    for mask in 1u32..(1u32 << xn) {
        let x: Vec<usize> = (0..xn).filter(|i| mask & (1 << i) != 0).collect();
        let mut y: Vec<usize> = (0..xn).filter(|i| mask & (1 << i) == 0).collect();
        y.push(xn);
        let a = vec![Block::new(Series::Sbar, x.clone()), Block::new(Series::S, y.clone())];
        let r = vec![Block::new(Series::S, y), Block::new(Series::Sbar, x)];
        let (sa, sr) = (word_sign(&a, odd), word_sign(&r, odd));
        aprime.add(a, sa);
        rprime.add(r, sr);
    }
    let d = rprime.minus(&aprime);
    Ok(InductiveStep { aprime, rprime, d })
}

/// Number of admissible partitions `Z = X + Y`, `X` nonempty.
pub fn partition_count(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        (1usize << (n - 1)) - 1
    }
}

/// `S_n` by both routes, with `ret D_n` a symbol and `adv D_n = ret D_n - D_n`.
pub fn assemble_words(step: &InductiveStep<WordPolynomial>, n: usize) -> (WordPolynomial, WordPolynomial) {
    let mut ret = WordPolynomial::zero();
    if !step.d.is_empty() {
        ret.add(vec![Block::new(Series::Ret, (0..n).collect())], 1);
    }
    let adv = ret.minus(&step.d);
    (ret.minus(&step.rprime), adv.minus(&step.aprime))
}

/// Second-order step for the interaction density `lagrangian(slot)`, `S_1 = i L`.
pub fn wick_step_two(
    lagrangian: &dyn Fn(u32) -> WickPolynomial,
) -> Result<InductiveStep<WickPolynomial>, InductionError> {
    let s1 = |slot: u32| lagrangian(slot).scaled(coeff(0, 1));
    let sbar1 = |slot: u32| s1(slot).scaled(coeff(-1, 0));
    let aprime = operator_product(&sbar1(1), &s1(2))?;
    let rprime = operator_product(&s1(2), &sbar1(1))?;
    let d = rprime.plus(&aprime.scaled(coeff(-1, 0)));
    Ok(InductiveStep { aprime, rprime, d })
}

/// `:phi^3:/3!` at a slot.
pub fn scalar_cubic_vertex(slot: u32) -> WickPolynomial {
    let phi = WickPolynomial::field(Field::Scalar, slot, "");
    wick_product(&[phi.clone(), phi.clone(), phi]).scaled(Coeff::new(
        num_rational::Rational64::new(1, 6),
        num_rational::Rational64::zero(),
    ))
}

/// Leg-free coefficient of each operator structure in `p`.
pub fn causal_coefficients(p: &WickPolynomial) -> BTreeMap<Vec<FieldLeg>, WickPolynomial> {
    let mut out: BTreeMap<Vec<FieldLeg>, WickPolynomial> = BTreeMap::new();
    for t in p.terms() {
        let c = WickPolynomial::monomial(Vec::new(), t.factors.clone(), t.coefficient);
        let e = out.entry(t.legs.clone()).or_default();
        *e = e.plus(&c);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSplit {
    pub retarded: WickPolynomial,
    pub advanced: WickPolynomial,
}

fn legs_label(legs: &[FieldLeg]) -> String {
    legs.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
}

/// Symbolic splits: `ret d` is a fresh tag and `adv d = ret d - d`.
pub fn symbolic_splits(d: &WickPolynomial) -> BTreeMap<Vec<FieldLeg>, CoefficientSplit> {
    causal_coefficients(d)
        .into_iter()
        .map(|(legs, c)| {
            let retarded = WickPolynomial::monomial(
                Vec::new(),
                vec![Factor::Tag(format!("ret[{}]", legs_label(&legs)))],
                Coeff::one(),
            );
            let advanced = retarded.plus(&c.scaled(coeff(-1, 0)));
            (legs, CoefficientSplit { retarded, advanced })
        })
        .collect()
}

fn attach(legs: &[FieldLeg], scalar: &WickPolynomial) -> WickPolynomial {
    let mut out = WickPolynomial::zero();
    for t in scalar.terms() {
        out.add_raw(legs.to_vec(), t.factors.clone(), t.coefficient);
    }
    out
}

/// `(ret D - R', adv D - A')` with the splits applied per operator structure.
pub fn assemble_wick(
    step: &InductiveStep<WickPolynomial>,
    splits: &BTreeMap<Vec<FieldLeg>, CoefficientSplit>,
) -> Result<(WickPolynomial, WickPolynomial), InductionError> {
    let minus = coeff(-1, 0);
    let mut via_ret = step.rprime.scaled(minus);
    let mut via_adv = step.aprime.scaled(minus);
    for legs in causal_coefficients(&step.d).keys() {
        let s = splits
            .get(legs)
            .ok_or_else(|| InductionError::MissingSplit(legs_label(legs)))?;
        via_ret = via_ret.plus(&attach(legs, &s.retarded));
        via_adv = via_adv.plus(&attach(legs, &s.advanced));
    }
    Ok((via_ret, via_adv))
}

/// Dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![Complex64::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::one();
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * o.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn plus(&self, o: &Self) -> Self {
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn minus(&self, o: &Self) -> Self {
        self.plus(&o.scaled(Complex64::new(-1.0, 0.0)))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    /// Largest entry modulus with both indices `<= k`.
    pub fn block_max(&self, k: usize) -> f64 {
        let k = k.min(self.n - 1);
        let mut best = 0.0f64;
        for i in 0..=k {
            for j in 0..=k {
                best = best.max(self.get(i, j).norm());
            }
        }
        best
    }
}

/// One oscillator mode of mass `m` truncated at `cutoff` quanta, with
/// `phi(t) = (a e^{-imt} + a^+ e^{imt}) / sqrt(2m)`.
#[derive(Debug, Clone)]
pub struct Oscillator {
    pub m: f64,
    pub cutoff: usize,
    annihilator: Matrix,
    creator: Matrix,
}

impl Oscillator {
    pub fn new(m: f64, cutoff: usize) -> Result<Self, InductionError> {
        if !(m > 0.0) || cutoff < 7 {
            return Err(InductionError::Invalid(format!("oscillator m = {m}, cutoff = {cutoff}")));
        }
        let n = cutoff + 1;
        let mut a = Matrix::zeros(n);
        for k in 1..n {
            a.data[(k - 1) * n + k] = Complex64::new((k as f64).sqrt(), 0.0);
        }
        let mut c = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                c.data[i * n + j] = a.get(j, i).conj();
            }
        }
        Ok(Oscillator {
            m,
            cutoff,
            annihilator: a,
            creator: c,
        })
    }

    /// Entries with indices up to this bound are free of truncation for products of
    /// two cubic vertices.
    pub fn exact_block(&self) -> usize {
        self.cutoff - 6
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    /// `D^+(t) = e^{-imt}/(2m)`.
    pub fn pairing(&self, t: f64) -> Complex64 {
        Complex64::new(0.0, -self.m * t).exp() / (2.0 * self.m)
    }

    fn leg(&self, leg: &FieldLeg, t: f64) -> Matrix {
        let norm = 1.0 / (2.0 * self.m).sqrt();
        match leg.character {
            crate::wick::Character::Creation => self.creator.scaled(Complex64::new(0.0, self.m * t).exp() * norm),
            crate::wick::Character::Annihilation => {
                self.annihilator.scaled(Complex64::new(0.0, -self.m * t).exp() * norm)
            }
        }
    }

    /// Numeric operator of a scalar Wick polynomial with slot `j` at time `times(j)`.
    pub fn evaluate(&self, p: &WickPolynomial, times: &dyn Fn(u32) -> f64) -> Result<Matrix, InductionError> {
        let mut out = Matrix::zeros(self.dim());
        for t in p.terms() {
            let mut c = Complex64::new(
                t.coefficient.re.to_f64().unwrap_or(f64::NAN),
                t.coefficient.im.to_f64().unwrap_or(f64::NAN),
            );
            for f in &t.factors {
                match f {
                    Factor::Pairing {
                        field: Field::Scalar,
                        left,
                        right,
                    } => c *= self.pairing(times(left.0) - times(right.0)),
                    other => return Err(InductionError::NotNumeric(other.to_string())),
                }
            }
            let mut op = Matrix::identity(self.dim());
            for leg in &t.legs {
                if leg.field != Field::Scalar {
                    return Err(InductionError::NotNumeric(leg.to_string()));
                }
                op = op.mul(&self.leg(leg, times(leg.slot)));
            }
            out = out.plus(&op.scaled(c));
        }
        Ok(out)
    }
}

/// Second order of the cubic scalar model on one mode, evaluated at `(t1, t2)` with
/// `x_n = t2`; the retarded part is supported at `t1 >= t2`.
pub struct LatticeModel {
    pub osc: Oscillator,
    pub step: InductiveStep<WickPolynomial>,
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportReport {
    /// `max |ret D|` over `t1 < t2`.
    pub ret_leakage: f64,
    /// `max |adv D|` over `t1 > t2`.
    pub adv_leakage: f64,
    /// `max |ret D - adv D - D|`.
    pub reconstruction: f64,
}

fn theta(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

impl LatticeModel {
    /// `times = t0 + j tau`, `j = 0..points`.
    pub fn new(m: f64, cutoff: usize, tau: f64, points: usize) -> Result<Self, InductionError> {
        let osc = Oscillator::new(m, cutoff)?;
        let step = wick_step_two(&scalar_cubic_vertex)?;
        let half = (points as f64 - 1.0) / 2.0;
        let times = (0..points).map(|j| (j as f64 - half) * tau).collect();
        Ok(LatticeModel { osc, step, times })
    }

    fn at(&self, p: &WickPolynomial, t1: f64, t2: f64) -> Result<Matrix, InductionError> {
        self.osc.evaluate(p, &|slot| if slot == 1 { t1 } else { t2 })
    }

    pub fn d(&self, t1: f64, t2: f64) -> Result<Matrix, InductionError> {
        self.at(&self.step.d, t1, t2)
    }

    pub fn aprime(&self, t1: f64, t2: f64) -> Result<Matrix, InductionError> {
        self.at(&self.step.aprime, t1, t2)
    }

    pub fn rprime(&self, t1: f64, t2: f64) -> Result<Matrix, InductionError> {
        self.at(&self.step.rprime, t1, t2)
    }

    /// Splitting by `theta(t1 - t2)`, unique here since the coefficients are bounded.
    pub fn ret_d(&self, t1: f64, t2: f64) -> Result<Matrix, InductionError> {
        Ok(self.d(t1, t2)?.scaled(Complex64::new(theta(t1 - t2), 0.0)))
    }

    pub fn adv_d(&self, t1: f64, t2: f64) -> Result<Matrix, InductionError> {
        Ok(self.d(t1, t2)?.scaled(Complex64::new(-theta(t2 - t1), 0.0)))
    }

    pub fn s2_via_ret(&self, t1: f64, t2: f64) -> Result<Matrix, InductionError> {
        Ok(self.ret_d(t1, t2)?.minus(&self.rprime(t1, t2)?))
    }

    pub fn s2_via_adv(&self, t1: f64, t2: f64) -> Result<Matrix, InductionError> {
        Ok(self.adv_d(t1, t2)?.minus(&self.aprime(t1, t2)?))
    }

    /// First order `S_1 = i L` at `t`.
    pub fn s1(&self, t: f64) -> Result<Matrix, InductionError> {
        let l = scalar_cubic_vertex(1).scaled(coeff(0, 1));
        self.osc.evaluate(&l, &|_| t)
    }

    /// Leakage of the supplied splitting out of its half-line, over all lattice pairs.
    pub fn support_check<R, A>(&self, ret: R, adv: A) -> Result<SupportReport, InductionError>
    where
        R: Fn(f64, f64) -> Result<Matrix, InductionError>,
        A: Fn(f64, f64) -> Result<Matrix, InductionError>,
    {
        let k = self.osc.exact_block();
        let mut rep = SupportReport {
            ret_leakage: 0.0,
            adv_leakage: 0.0,
            reconstruction: 0.0,
        };
        for &t1 in &self.times {
            for &t2 in &self.times {
                let r = ret(t1, t2)?;
                let a = adv(t1, t2)?;
                if t1 < t2 {
                    rep.ret_leakage = rep.ret_leakage.max(r.block_max(k));
                }
                if t1 > t2 {
                    rep.adv_leakage = rep.adv_leakage.max(a.block_max(k));
                }
                let d = self.d(t1, t2)?;
                rep.reconstruction = rep.reconstruction.max(r.minus(&a).minus(&d).block_max(k));
            }
        }
        Ok(rep)
    }

    /// `max |S_2 - S_1(t1) S_1(t2)|` over lattice pairs with `t1 > t2`: causal
    /// factorization for switching functions with separated supports.
    pub fn factorization_defect(&self) -> Result<f64, InductionError> {
        let k = self.osc.exact_block();
        let mut worst = 0.0f64;
        for &t1 in &self.times {
            for &t2 in &self.times {
                if t1 > t2 {
                    let s2 = self.s2_via_ret(t1, t2)?;
                    let prod = self.s1(t1)?.mul(&self.s1(t2)?);
                    worst = worst.max(s2.minus(&prod).block_max(k));
                }
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_inverse_terms() {
        let s1 = invert_series(1, &[]).unwrap();
        assert_eq!(s1.len(), 1);
        assert_eq!(s1.coefficient(&[Block::new(Series::S, vec![0])]), -1);
        let s2 = invert_series(2, &[]).unwrap();
        assert_eq!(s2.coefficient(&[Block::new(Series::S, vec![0, 1])]), -1);
        assert_eq!(
            s2.coefficient(&[Block::new(Series::S, vec![0]), Block::new(Series::S, vec![1])]),
            1
        );
        assert_eq!(
            s2.coefficient(&[Block::new(Series::S, vec![1]), Block::new(Series::S, vec![0])]),
            1
        );
    }

    #[test]
    fn order_one_and_guard() {
        let st = build_aprime_rprime(1, &[]).unwrap();
        assert!(st.aprime.is_empty() && st.rprime.is_empty() && st.d.is_empty());
        assert!(matches!(
            build_aprime_rprime(6, &[]),
            Err(InductionError::OrderTooLarge { .. })
        ));
        let (r, a) = assemble_words(&st, 1);
        assert!(r.is_empty() && a.is_empty());
    }

    #[test]
    fn odd_points_change_signs() {
        let st = build_aprime_rprime(2, &[true, true]).unwrap();
        let word = vec![Block::new(Series::S, vec![1]), Block::new(Series::Sbar, vec![0])];
        assert_eq!(st.rprime.coefficient(&word), -1);
    }

    #[test]
    fn second_order_commutator_has_no_uncontracted_part() {
        let step = wick_step_two(&scalar_cubic_vertex).unwrap();
        assert!(step.d.terms().iter().all(|t| t.contraction_count() > 0));
    }
}
