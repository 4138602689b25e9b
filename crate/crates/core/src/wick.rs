//! Symbolic Wick products and the Wick theorem for operator products.
//!
//! A free field is the sum of an emission (creation) and an absorption (annihilation)
//! kernel operator; a monomial is a normal-ordered list of such legs times a rational
//! complex prefactor and a multiset of symbolic coefficient factors. Fermionic
//! reorderings are signed with [`crate::grassmann`].
//!
//! Canonical leg order: creation legs first, then by field, space-time slot and index.

use num_complex::Complex;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

use crate::grassmann::graded_permutation_sign;

pub type Coeff = Complex<Rational64>;

pub fn coeff(re: i64, im: i64) -> Coeff {
    Complex::new(Rational64::from_integer(re), Rational64::from_integer(im))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Psi,
    PsiBar,
    Photon,
    Scalar,
}

impl Field {
    pub fn is_fermi(self) -> bool {
        matches!(self, Field::Psi | Field::PsiBar)
    }

    /// Field whose creation part pairs with the annihilation part of `self`.
    pub fn partner(self) -> Field {
        match self {
            Field::Psi => Field::PsiBar,
            Field::PsiBar => Field::Psi,
            f => f,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Field::Psi => "psi",
            Field::PsiBar => "psibar",
            Field::Photon => "A",
            Field::Scalar => "phi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Character {
    Creation,
    Annihilation,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldLeg {
    pub character: Character,
    pub field: Field,
    pub slot: u32,
    pub index: String,
}

impl FieldLeg {
    pub fn new(field: Field, character: Character, slot: u32, index: impl Into<String>) -> Self {
        FieldLeg {
            character,
            field,
            slot,
            index: index.into(),
        }
    }

    pub fn is_fermi(&self) -> bool {
        self.field.is_fermi()
    }
}

impl fmt::Display for FieldLeg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = match self.character {
            Character::Creation => "+",
            Character::Annihilation => "-",
        };
        if self.index.is_empty() {
            write!(f, "{}{}(x{})", self.field.name(), mark, self.slot)
        } else {
            write!(f, "{}{}_{}(x{})", self.field.name(), mark, self.index, self.slot)
        }
    }
}

/// Symbolic coefficient factor of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    /// Pairing function of the annihilation part of `field` at `left` with the
    /// creation part of its partner at `right`.
    Pairing {
        field: Field,
        left: (u32, String),
        right: (u32, String),
    },
    /// Opaque coefficient distribution tag, e.g. a gamma matrix at a vertex.
    Tag(String),
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Pairing { field, left, right } => {
                let name = match field {
                    Field::Psi => "S+",
                    Field::PsiBar => "S-",
                    Field::Photon => "D+A",
                    Field::Scalar => "D+",
                };
                write!(f, "{}[{}{}, {}{}]", name, left.0, idx(&left.1), right.0, idx(&right.1))
            }
            Factor::Tag(t) => write!(f, "{t}"),
        }
    }
}

fn idx(s: &str) -> String {
    if s.is_empty() {
        String::new()
    } else {
        format!(".{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WickError {
    #[error("legs {0} and {1} cannot be contracted")]
    IncompatiblePairing(String, String),
    #[error("operand is not normal ordered: {0}")]
    NotNormalOrdered(String),
}

/// One normal-ordered monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WickMonomial {
    pub coefficient: Coeff,
    pub factors: Vec<Factor>,
    pub legs: Vec<FieldLeg>,
}

impl WickMonomial {
    /// Overall sign of the (real or imaginary) prefactor; `0` for a vanishing term.
    pub fn sign(&self) -> i8 {
        let c = if self.coefficient.re.is_zero() {
            self.coefficient.im
        } else {
            self.coefficient.re
        };
        if c > Rational64::zero() {
            1
        } else if c < Rational64::zero() {
            -1
        } else {
            0
        }
    }

    pub fn contraction_count(&self) -> usize {
        self.factors
            .iter()
            .filter(|f| matches!(f, Factor::Pairing { .. }))
            .count()
    }
}

impl fmt::Display for WickMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", fmt_coeff(&self.coefficient))?;
        for fac in &self.factors {
            write!(f, " {fac}")?;
        }
        if !self.legs.is_empty() {
            write!(f, " :")?;
            for (i, l) in self.legs.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{l}")?;
            }
            write!(f, ":")?;
        }
        Ok(())
    }
}

pub fn fmt_coeff(c: &Coeff) -> String {
    if c.im.is_zero() {
        format!("{}", c.re)
    } else if c.re.is_zero() {
        format!("{}i", c.im)
    } else {
        format!("{}{}{}i", c.re, if c.im < Rational64::zero() { "" } else { "+" }, c.im)
    }
}

type TermKey = (Vec<FieldLeg>, Vec<Factor>);

/// Finite sum of normal-ordered monomials, merged on identical legs and factors.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WickPolynomial {
    terms: BTreeMap<TermKey, Coeff>,
}

impl WickPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(Coeff::one())
    }

    pub fn scalar(c: Coeff) -> Self {
        let mut p = Self::zero();
        p.push_canonical(Vec::new(), Vec::new(), c);
        p
    }

    /// Free field at a slot: creation part plus annihilation part.
    pub fn field(field: Field, slot: u32, index: impl Into<String>) -> Self {
        let index = index.into();
        let mut p = Self::zero();
        for ch in [Character::Creation, Character::Annihilation] {
            p.push_canonical(
                vec![FieldLeg::new(field, ch, slot, index.clone())],
                Vec::new(),
                Coeff::one(),
            );
        }
        p
    }

    /// Single monomial from legs in arbitrary written order.
    pub fn monomial(legs: Vec<FieldLeg>, factors: Vec<Factor>, c: Coeff) -> Self {
        let mut p = Self::zero();
        p.add_raw(legs, factors, c);
        p
    }

    /// The QED interaction density `:psibar gamma psi A:` at a slot.
    pub fn qed_vertex(slot: u32) -> Self {
        let s = slot.to_string();
        let p = wick_product(&[
            Self::field(Field::PsiBar, slot, format!("a{s}")),
            Self::field(Field::Psi, slot, format!("b{s}")),
            Self::field(Field::Photon, slot, format!("mu{s}")),
        ]);
        p.times_factor(Factor::Tag(format!("gamma[mu{s}](a{s},b{s})")))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> Vec<WickMonomial> {
        self.terms
            .iter()
            .map(|((legs, factors), c)| WickMonomial {
                coefficient: *c,
                factors: factors.clone(),
                legs: legs.clone(),
            })
            .collect()
    }

    pub fn coefficient_of(&self, legs: &[FieldLeg], factors: &[Factor]) -> Coeff {
        let mut f = factors.to_vec();
        f.sort();
        self.terms
            .get(&(legs.to_vec(), f))
            .copied()
            .unwrap_or_else(Coeff::zero)
    }

    pub fn scaled(&self, c: Coeff) -> Self {
        let mut out = Self::zero();
        for ((legs, factors), v) in &self.terms {
            out.push_canonical(legs.clone(), factors.clone(), *v * c);
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((legs, factors), v) in &other.terms {
            out.push_canonical(legs.clone(), factors.clone(), *v);
        }
        out
    }

    pub fn times_factor(&self, factor: Factor) -> Self {
        let mut out = Self::zero();
        for ((legs, factors), v) in &self.terms {
            let mut f = factors.clone();
            f.push(factor.clone());
            f.sort();
            out.push_canonical(legs.clone(), f, *v);
        }
        out
    }

    /// Adds a term whose legs are given in written operator order; the term is brought
    /// to canonical order with the Grassmann sign, and dropped if an odd leg repeats.
    pub fn add_raw(&mut self, legs: Vec<FieldLeg>, mut factors: Vec<Factor>, c: Coeff) {
        if let Some((sorted, sign)) = canonical_order(legs) {
            factors.sort();
            let c = if sign < 0 { -c } else { c };
            self.push_canonical(sorted, factors, c);
        }
    }

    fn push_canonical(&mut self, legs: Vec<FieldLeg>, factors: Vec<Factor>, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let key = (legs, factors);
        let entry = self.terms.entry(key.clone()).or_insert_with(Coeff::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Re-canonicalises every term (idempotent on well-formed polynomials).
    pub fn canonicalize(&self) -> Self {
        let mut out = Self::zero();
        for ((legs, factors), v) in &self.terms {
            out.add_raw(legs.clone(), factors.clone(), *v);
        }
        out
    }

    pub fn is_normal_ordered(&self) -> bool {
        self.terms.keys().all(|(legs, _)| {
            legs.windows(2)
                .all(|w| !(w[0].character == Character::Annihilation && w[1].character == Character::Creation))
        })
    }

    /// Leg-free part.
    pub fn vacuum_part(&self) -> Self {
        let mut out = Self::zero();
        for ((legs, factors), v) in &self.terms {
            if legs.is_empty() {
                out.push_canonical(Vec::new(), factors.clone(), *v);
            }
        }
        out
    }

    pub fn to_canonical_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|((legs, factors), c)| {
                serde_json::json!({
                    "coefficient": { "re": c.re.to_string(), "im": c.im.to_string() },
                    "factors": factors.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                    "legs": legs.iter().map(|l| serde_json::json!({
                        "field": l.field,
                        "character": l.character,
                        "slot": l.slot,
                        "index": l.index,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({ "terms": terms })
    }
}

impl fmt::Display for WickPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Sorts legs into canonical order; `None` if the monomial vanishes by Fermi statistics.
pub fn canonical_order(legs: Vec<FieldLeg>) -> Option<(Vec<FieldLeg>, i8)> {
    let mut order: Vec<usize> = (0..legs.len()).collect();
    order.sort_by(|&a, &b| legs[a].cmp(&legs[b]));
    for w in order.windows(2) {
        if legs[w[0]] == legs[w[1]] && legs[w[0]].is_fermi() {
            return None;
        }
    }
    let odd: Vec<bool> = legs.iter().map(|l| l.is_fermi()).collect();
    let sign = graded_permutation_sign(&order, &odd);
    let sorted = order.iter().map(|&i| legs[i].clone()).collect();
    Some((sorted, sign))
}

/// Wick product of the factors: leg lists are concatenated without contractions.
pub fn wick_product(factors: &[WickPolynomial]) -> WickPolynomial {
    let mut acc = WickPolynomial::one();
    for p in factors {
        let mut next = WickPolynomial::zero();
        for ((la, fa), ca) in &acc.terms {
            for ((lb, fb), cb) in &p.terms {
                let mut legs = la.clone();
                legs.extend(lb.iter().cloned());
                let mut f = fa.clone();
                f.extend(fb.iter().cloned());
                next.add_raw(legs, f, *ca * *cb);
            }
        }
        acc = next;
    }
    acc
}

/// Whether the annihilation leg `a` (left) and creation leg `b` (right) have a
/// non-vanishing pairing function.
pub fn contractible(a: &FieldLeg, b: &FieldLeg) -> bool {
    a.character == Character::Annihilation
        && b.character == Character::Creation
        && a.field.partner() == b.field
}

/// Pairing factor of the annihilation leg `a` standing left of the creation leg `b`.
pub fn pairing_factor(a: &FieldLeg, b: &FieldLeg) -> Result<Factor, WickError> {
    if !contractible(a, b) {
        return Err(WickError::IncompatiblePairing(a.to_string(), b.to_string()));
    }
    Ok(Factor::Pairing {
        field: a.field,
        left: (a.slot, a.index.clone()),
        right: (b.slot, b.index.clone()),
    })
}

/// Operator product `A B` of normal-ordered polynomials, expanded into normal order by
/// summing over all admissible sets of contractions.
pub fn operator_product(a: &WickPolynomial, b: &WickPolynomial) -> Result<WickPolynomial, WickError> {
    for p in [a, b] {
        if !p.is_normal_ordered() {
            return Err(WickError::NotNormalOrdered(p.to_string()));
        }
    }
    let mut out = WickPolynomial::zero();
    for ((la, fa), ca) in &a.terms {
        for ((lb, fb), cb) in &b.terms {
            let word: Vec<FieldLeg> = la.iter().chain(lb.iter()).cloned().collect();
            let odd: Vec<bool> = word.iter().map(|l| l.is_fermi()).collect();
            let ann: Vec<usize> = (0..la.len())
                .filter(|&i| la[i].character == Character::Annihilation)
                .collect();
            let cre: Vec<usize> = (0..lb.len())
                .filter(|&j| lb[j].character == Character::Creation)
                .map(|j| la.len() + j)
                .collect();
            let mut pairs = Vec::new();
            let mut used = vec![false; word.len()];
            let mut emit = |pairs: &[(usize, usize)]| -> Result<(), WickError> {
                let mut target = Vec::with_capacity(word.len());
                let mut factors: Vec<Factor> = fa.iter().chain(fb.iter()).cloned().collect();
                let mut taken = vec![false; word.len()];
                for &(i, j) in pairs {
                    target.push(i);
                    target.push(j);
                    taken[i] = true;
                    taken[j] = true;
                    factors.push(pairing_factor(&word[i], &word[j])?);
                }
                let rest: Vec<usize> = (0..word.len()).filter(|&k| !taken[k]).collect();
                target.extend(rest.iter().copied());
                let sign = graded_permutation_sign(&target, &odd);
                let legs = rest.iter().map(|&k| word[k].clone()).collect();
                let c = *ca * *cb * coeff(sign as i64, 0);
                out.add_raw(legs, factors, c);
                Ok(())
            };
            enumerate_matchings(&word, &ann, &cre, 0, &mut used, &mut pairs, &mut emit)?;
        }
    }
    Ok(out)
}

fn enumerate_matchings<F>(
    word: &[FieldLeg],
    ann: &[usize],
    cre: &[usize],
    k: usize,
    used: &mut Vec<bool>,
    pairs: &mut Vec<(usize, usize)>,
    emit: &mut F,
) -> Result<(), WickError>
where
    F: FnMut(&[(usize, usize)]) -> Result<(), WickError>,
{
    if k == ann.len() {
        return emit(pairs);
    }
    // annihilator ann[k] left uncontracted
    enumerate_matchings(word, ann, cre, k + 1, used, pairs, emit)?;
    let i = ann[k];
    for &j in cre {
        if !used[j] && contractible(&word[i], &word[j]) {
            used[j] = true;
            pairs.push((i, j));
            enumerate_matchings(word, ann, cre, k + 1, used, pairs, emit)?;
            pairs.pop();
            used[j] = false;
        }
    }
    Ok(())
}

/// Sum of the leg-free monomials: the vacuum expectation value as a coefficient expression.
pub fn vacuum_expectation(p: &WickPolynomial) -> WickPolynomial {
    p.vacuum_part()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi(slot: u32) -> WickPolynomial {
        WickPolynomial::field(Field::Scalar, slot, "")
    }

    #[test]
    fn scalar_square_has_binomial_terms() {
        let p = wick_product(&[phi(1), phi(1)]);
        assert_eq!(p.len(), 3);
        let cre = FieldLeg::new(Field::Scalar, Character::Creation, 1, "");
        let ann = FieldLeg::new(Field::Scalar, Character::Annihilation, 1, "");
        assert_eq!(p.coefficient_of(&[cre.clone(), ann.clone()], &[]), coeff(2, 0));
        assert_eq!(p.coefficient_of(&[cre.clone(), cre], &[]), coeff(1, 0));
        assert_eq!(p.coefficient_of(&[ann.clone(), ann], &[]), coeff(1, 0));
    }

    #[test]
    fn single_field_product_is_identity() {
        assert_eq!(wick_product(&[phi(3)]), phi(3));
    }

    #[test]
    fn vertex_has_eight_terms() {
        assert_eq!(WickPolynomial::qed_vertex(1).len(), 8);
    }

    #[test]
    fn scalar_operator_product() {
        let p = operator_product(&phi(1), &phi(2)).unwrap();
        let vev = vacuum_expectation(&p);
        assert_eq!(vev.len(), 1);
        let t = &vev.terms()[0];
        assert_eq!(t.coefficient, coeff(1, 0));
        assert_eq!(
            t.factors,
            vec![Factor::Pairing {
                field: Field::Scalar,
                left: (1, String::new()),
                right: (2, String::new())
            }]
        );
        assert_eq!(p.len(), 5);
        assert!(vacuum_expectation(&wick_product(&[phi(1), phi(1)])).is_empty());
    }

    #[test]
    fn zero_annihilates() {
        let v = WickPolynomial::qed_vertex(1);
        assert!(operator_product(&v, &WickPolynomial::zero()).unwrap().is_empty());
        assert!(operator_product(&WickPolynomial::zero(), &v).unwrap().is_empty());
    }

    #[test]
    fn repeated_fermi_leg_vanishes() {
        let l = FieldLeg::new(Field::Psi, Character::Creation, 1, "a");
        assert!(WickPolynomial::monomial(vec![l.clone(), l], vec![], coeff(1, 0)).is_empty());
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let v = operator_product(&WickPolynomial::qed_vertex(1), &WickPolynomial::qed_vertex(2)).unwrap();
        assert_eq!(v.canonicalize(), v);
        assert!(v.is_normal_ordered());
    }

    #[test]
    fn non_normal_ordered_operand_rejected() {
        let mut p = WickPolynomial::zero();
        p.terms.insert(
            (
                vec![
                    FieldLeg::new(Field::Scalar, Character::Annihilation, 1, ""),
                    FieldLeg::new(Field::Scalar, Character::Creation, 1, ""),
                ],
                vec![],
            ),
            coeff(1, 0),
        );
        assert!(matches!(operator_product(&p, &phi(2)), Err(WickError::NotNormalOrdered(_))));
    }

    #[test]
    fn incompatible_pairing_rejected() {
        let a = FieldLeg::new(Field::Psi, Character::Annihilation, 1, "a");
        let b = FieldLeg::new(Field::Photon, Character::Creation, 2, "mu");
        assert!(pairing_factor(&a, &b).is_err());
    }
}
