//! Hida creation/annihilation operators and integral kernel operators on a truncated
//! Fock space over a finite momentum grid.
//!
//! The Dirac delta of the continuum is replaced by `delta_ij / w_i`, so the grid
//! operators are `a_i = b_i / sqrt(w_i)` with `b_i` the unit-normalised ladder
//! operators of mode `i`, and quadrature sums `sum_i w_i f(p_i)` stand in for the
//! momentum integrals. Fermi modes are ordered by grid index (Jordan-Wigner strings).
//!
//! The pairing `<<X, Y>>` used throughout is linear in `X` and antilinear in `Y`,
//! and carries the diagonal Krein signs of the grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::grassmann::graded_permutation_sign;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FockError {
    #[error("mode index {mode} out of range for a grid of {modes} modes")]
    InvalidMode { mode: usize, modes: usize },
    #[error("particle number {requested} exceeds the cutoff {cutoff}")]
    CutoffExceeded { requested: usize, cutoff: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Bose,
    Fermi,
}

/// One spin-momentum sample of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub momentum: [f64; 3],
    pub spin: u8,
    #[serde(default)]
    pub field: u16,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumGrid {
    pub points: Vec<GridPoint>,
    pub weights: Vec<f64>,
    pub statistics: Vec<Statistics>,
    pub krein_sign: Vec<i8>,
}

impl MomentumGrid {
    pub fn new(
        points: Vec<GridPoint>,
        weights: Vec<f64>,
        statistics: Vec<Statistics>,
        krein_sign: Option<Vec<i8>>,
    ) -> Result<Self, FockError> {
        let n = points.len();
        let krein_sign = krein_sign.unwrap_or_else(|| vec![1; n]);
        let grid = MomentumGrid {
            points,
            weights,
            statistics,
            krein_sign,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// `n` modes of one field along the first momentum axis on `[lo, hi]`, trapezoid weights.
    pub fn line(n: usize, lo: f64, hi: f64, statistics: Statistics) -> Result<Self, FockError> {
        if n < 2 {
            return Err(FockError::InvalidGrid("a line grid needs at least two points".into()));
        }
        let h = (hi - lo) / (n - 1) as f64;
        let points = (0..n)
            .map(|i| GridPoint {
                momentum: [lo + h * i as f64, 0.0, 0.0],
                spin: 0,
                field: 0,
            })
            .collect();
        let weights = (0..n)
            .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
            .collect();
        Self::new(points, weights, vec![statistics; n], None)
    }

    /// Small grid with distinct momenta and the given per-mode weights.
    pub fn with_weights(weights: Vec<f64>, statistics: Statistics) -> Result<Self, FockError> {
        let n = weights.len();
        let points = (0..n)
            .map(|i| GridPoint {
                momentum: [0.25 + 0.5 * i as f64, 0.1 * i as f64, 0.0],
                spin: 0,
                field: 0,
            })
            .collect();
        Self::new(points, weights, vec![statistics; n], None)
    }

    pub fn with_krein(mut self, signs: Vec<i8>) -> Result<Self, FockError> {
        self.krein_sign = signs;
        self.validate()?;
        Ok(self)
    }

    pub fn modes(&self) -> usize {
        self.points.len()
    }

    pub fn is_fermi(&self, mode: usize) -> bool {
        self.statistics[mode] == Statistics::Fermi
    }

    pub fn krein_trivial(&self) -> bool {
        self.krein_sign.iter().all(|&s| s == 1)
    }

    pub fn validate(&self) -> Result<(), FockError> {
        let n = self.points.len();
        if n == 0 {
            return Err(FockError::InvalidGrid("grid has no points".into()));
        }
        if self.weights.len() != n || self.statistics.len() != n || self.krein_sign.len() != n {
            return Err(FockError::InvalidGrid(format!(
                "{} points but {} weights, {} statistics flags, {} Krein signs",
                n,
                self.weights.len(),
                self.statistics.len(),
                self.krein_sign.len()
            )));
        }
        if let Some(w) = self.weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(FockError::InvalidGrid(format!("non-positive weight {w}")));
        }
        if let Some(s) = self.krein_sign.iter().find(|s| !matches!(s, 1 | -1)) {
            return Err(FockError::InvalidGrid(format!("Krein sign {s} is not +1 or -1")));
        }
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (&self.points[i], &self.points[j]);
                if a.momentum == b.momentum && a.spin == b.spin && a.field == b.field {
                    return Err(FockError::InvalidGrid(format!("points {i} and {j} coincide")));
                }
                if a.field == b.field && self.statistics[i] != self.statistics[j] {
                    return Err(FockError::InvalidGrid(format!(
                        "field {} has mixed statistics",
                        a.field
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_mode(&self, mode: usize) -> Result<(), FockError> {
        if mode >= self.modes() {
            Err(FockError::InvalidMode {
                mode,
                modes: self.modes(),
            })
        } else {
            Ok(())
        }
    }

    /// All occupation configurations with total particle number `<= max_total`.
    pub fn basis(&self, max_total: usize) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let mut current = vec![0u8; self.modes()];
        self.enumerate(0, max_total, &mut current, &mut out);
        out
    }

    fn enumerate(&self, mode: usize, left: usize, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if mode == self.modes() {
            out.push(current.clone());
            return;
        }
        let cap = if self.is_fermi(mode) { left.min(1) } else { left };
        for k in 0..=cap {
            current[mode] = k as u8;
            self.enumerate(mode + 1, left - k, current, out);
        }
        current[mode] = 0;
    }

    /// Number of occupied Fermi modes before `mode` (Jordan-Wigner string length).
    fn fermi_parity_before(&self, config: &[u8], mode: usize) -> bool {
        config[..mode]
            .iter()
            .enumerate()
            .filter(|(j, n)| self.is_fermi(*j) && **n > 0)
            .count()
            % 2
            == 1
    }
}

/// State vector over the occupation basis, truncated at a total particle number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "StateSnapshot", try_from = "StateSnapshot")]
pub struct FockGridState {
    modes: usize,
    cutoff: usize,
    amplitudes: BTreeMap<Vec<u8>, Complex64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StateSnapshot {
    modes: usize,
    cutoff: usize,
    amplitudes: Vec<(Vec<u8>, f64, f64)>,
}

impl From<FockGridState> for StateSnapshot {
    fn from(s: FockGridState) -> Self {
        StateSnapshot {
            modes: s.modes,
            cutoff: s.cutoff,
            amplitudes: s
                .amplitudes
                .into_iter()
                .map(|(k, v)| (k, v.re, v.im))
                .collect(),
        }
    }
}

impl TryFrom<StateSnapshot> for FockGridState {
    type Error = FockError;

    fn try_from(s: StateSnapshot) -> Result<Self, FockError> {
        let mut state = FockGridState::zero(s.modes, s.cutoff);
        for (config, re, im) in s.amplitudes {
            state.add(config, Complex64::new(re, im))?;
        }
        Ok(state)
    }
}

impl FockGridState {
    pub fn zero(modes: usize, cutoff: usize) -> Self {
        FockGridState {
            modes,
            cutoff,
            amplitudes: BTreeMap::new(),
        }
    }

    pub fn vacuum(grid: &MomentumGrid, cutoff: usize) -> Self {
        let mut s = Self::zero(grid.modes(), cutoff);
        s.amplitudes.insert(vec![0; grid.modes()], Complex64::new(1.0, 0.0));
        s
    }

    /// Normalised occupation basis vector `|n>`.
    pub fn basis_state(grid: &MomentumGrid, config: Vec<u8>, cutoff: usize) -> Result<Self, FockError> {
        let mut s = Self::zero(grid.modes(), cutoff);
        for (i, &n) in config.iter().enumerate() {
            if grid.is_fermi(i) && n > 1 {
                return Err(FockError::DimensionMismatch(format!(
                    "Fermi mode {i} occupied {n} times"
                )));
            }
        }
        s.add(config, Complex64::new(1.0, 0.0))?;
        Ok(s)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitude(&self, config: &[u8]) -> Complex64 {
        self.amplitudes.get(config).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u8>, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.values().all(|v| *v == Complex64::new(0.0, 0.0))
    }

    pub fn max_particles(&self) -> usize {
        self.amplitudes
            .keys()
            .map(|c| c.iter().map(|&n| n as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Adds `value` to the amplitude of `config`.
    pub fn add(&mut self, config: Vec<u8>, value: Complex64) -> Result<(), FockError> {
        if config.len() != self.modes {
            return Err(FockError::DimensionMismatch(format!(
                "configuration of length {} for {} modes",
                config.len(),
                self.modes
            )));
        }
        let total: usize = config.iter().map(|&n| n as usize).sum();
        if total > self.cutoff {
            return Err(FockError::CutoffExceeded {
                requested: total,
                cutoff: self.cutoff,
            });
        }
        *self.amplitudes.entry(config).or_default() += value;
        Ok(())
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for v in out.amplitudes.values_mut() {
            *v *= factor;
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Result<Self, FockError> {
        if self.modes != other.modes {
            return Err(FockError::DimensionMismatch("states over different grids".into()));
        }
        let mut out = self.clone();
        out.cutoff = self.cutoff.max(other.cutoff);
        for (k, v) in &other.amplitudes {
            *out.amplitudes.entry(k.clone()).or_default() += *v;
        }
        Ok(out)
    }

    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        let mut keys: Vec<&Vec<u8>> = self.amplitudes.keys().collect();
        keys.extend(other.amplitudes.keys());
        keys.into_iter()
            .map(|k| (self.amplitude(k) - other.amplitude(k)).norm())
            .fold(0.0, f64::max)
    }

    fn check_grid(&self, grid: &MomentumGrid) -> Result<(), FockError> {
        if self.modes != grid.modes() {
            return Err(FockError::DimensionMismatch(format!(
                "state over {} modes used with a grid of {}",
                self.modes,
                grid.modes()
            )));
        }
        Ok(())
    }
}

/// Discrete counterpart of the Hida annihilation operator at grid point `mode`.
pub fn apply_annihilation(
    grid: &MomentumGrid,
    mode: usize,
    state: &FockGridState,
) -> Result<FockGridState, FockError> {
    grid.check_mode(mode)?;
    state.check_grid(grid)?;
    let mut out = FockGridState::zero(state.modes, state.cutoff);
    let w = grid.weights[mode];
    for (config, &amp) in &state.amplitudes {
        let n = config[mode];
        if n == 0 {
            continue;
        }
        let mut factor = (n as f64 / w).sqrt();
        if grid.is_fermi(mode) && grid.fermi_parity_before(config, mode) {
            factor = -factor;
        }
        let mut lowered = config.clone();
        lowered[mode] -= 1;
        *out.amplitudes.entry(lowered).or_default() += amp * factor;
    }
    Ok(out)
}

/// Discrete counterpart of the Hida creation operator at grid point `mode`.
pub fn apply_creation(
    grid: &MomentumGrid,
    mode: usize,
    state: &FockGridState,
) -> Result<FockGridState, FockError> {
    grid.check_mode(mode)?;
    state.check_grid(grid)?;
    let mut out = FockGridState::zero(state.modes, state.cutoff);
    let w = grid.weights[mode];
    for (config, &amp) in &state.amplitudes {
        let n = config[mode];
        if grid.is_fermi(mode) && n >= 1 {
            continue;
        }
        let total: usize = config.iter().map(|&k| k as usize).sum();
        if total + 1 > state.cutoff {
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            return Err(FockError::CutoffExceeded {
                requested: total + 1,
                cutoff: state.cutoff,
            });
        }
        let mut factor = ((n as f64 + 1.0) / w).sqrt();
        if grid.is_fermi(mode) && grid.fermi_parity_before(config, mode) {
            factor = -factor;
        }
        let mut raised = config.clone();
        raised[mode] += 1;
        *out.amplitudes.entry(raised).or_default() += amp * factor;
    }
    Ok(out)
}

/// Krein sign operator: `|n> -> prod_i s_i^{n_i} |n>`.
pub fn apply_eta(grid: &MomentumGrid, state: &FockGridState) -> Result<FockGridState, FockError> {
    state.check_grid(grid)?;
    let mut out = state.clone();
    for (config, v) in out.amplitudes.iter_mut() {
        if krein_weight(grid, config) < 0 {
            *v = -*v;
        }
    }
    Ok(out)
}

fn krein_weight(grid: &MomentumGrid, config: &[u8]) -> i8 {
    let odd = config
        .iter()
        .zip(&grid.krein_sign)
        .filter(|(n, s)| **s < 0 && **n % 2 == 1)
        .count();
    if odd % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `<<X, Y>> = sum_n X_n conj(Y_n) eta_n`, linear in `X`.
pub fn pairing(grid: &MomentumGrid, x: &FockGridState, y: &FockGridState) -> Result<Complex64, FockError> {
    x.check_grid(grid)?;
    y.check_grid(grid)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (config, &a) in &x.amplitudes {
        if let Some(&b) = y.amplitudes.get(config) {
            acc += a * b.conj() * krein_weight(grid, config) as f64;
        }
    }
    Ok(acc)
}

/// `eta_{Phi,Psi}(p_1..p_l, q_1..q_m) = << d+_{p_1} .. d+_{p_l} d_{q_1} .. d_{q_m} Phi, Psi >>`.
///
/// `modes` lists the `l` creation points followed by the `m` annihilation points.
pub fn eta_pairing(
    grid: &MomentumGrid,
    l: usize,
    m: usize,
    modes: &[usize],
    phi: &FockGridState,
    psi: &FockGridState,
) -> Result<Complex64, FockError> {
    if modes.len() != l + m {
        return Err(FockError::DimensionMismatch(format!(
            "{} mode indices for an (l, m) = ({l}, {m}) pairing",
            modes.len()
        )));
    }
    if l + m > 2 * phi.cutoff {
        return Err(FockError::CutoffExceeded {
            requested: l + m,
            cutoff: 2 * phi.cutoff,
        });
    }
    let mut state = phi.clone();
    for &q in modes[l..].iter().rev() {
        state = apply_annihilation(grid, q, &state)?;
    }
    for &p in modes[..l].iter().rev() {
        state = apply_creation(grid, p, &state)?;
    }
    pairing(grid, &state, psi)
}

/// Kernel of an integral kernel operator with `l` creation and `m` annihilation slots,
/// tabulated on every grid tuple (row-major, creation slots first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteKernel {
    pub l: usize,
    pub m: usize,
    pub modes: usize,
    pub values: Vec<Complex64>,
}

impl DiscreteKernel {
    pub fn new(l: usize, m: usize, modes: usize, values: Vec<Complex64>) -> Result<Self, FockError> {
        let expected = modes.pow((l + m) as u32);
        if values.len() != expected {
            return Err(FockError::DimensionMismatch(format!(
                "kernel ({l}, {m}) over {modes} modes needs {expected} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(FockError::DimensionMismatch("kernel has non-finite values".into()));
        }
        Ok(DiscreteKernel {
            l,
            m,
            modes,
            values,
        })
    }

    pub fn zeros(l: usize, m: usize, modes: usize) -> Self {
        DiscreteKernel {
            l,
            m,
            modes,
            values: vec![Complex64::new(0.0, 0.0); modes.pow((l + m) as u32)],
        }
    }

    pub fn from_fn<F>(l: usize, m: usize, modes: usize, f: F) -> Self
    where
        F: Fn(&[usize]) -> Complex64,
    {
        let mut k = Self::zeros(l, m, modes);
        for idx in 0..k.values.len() {
            let t = k.tuple(idx);
            k.values[idx] = f(&t);
        }
        k
    }

    pub fn arity(&self) -> usize {
        self.l + self.m
    }

    pub fn tuple(&self, mut index: usize) -> Vec<usize> {
        let mut t = vec![0; self.arity()];
        for slot in (0..self.arity()).rev() {
            t[slot] = index % self.modes;
            index /= self.modes;
        }
        t
    }

    pub fn index(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &i| acc * self.modes + i)
    }

    pub fn get(&self, tuple: &[usize]) -> Complex64 {
        self.values[self.index(tuple)]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.norm() == 0.0)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut k = self.clone();
        k.values.iter_mut().for_each(|v| *v *= c);
        k
    }

    pub fn plus(&self, other: &Self) -> Result<Self, FockError> {
        if (self.l, self.m, self.modes) != (other.l, other.m, other.modes) {
            return Err(FockError::DimensionMismatch("adding kernels of different shape".into()));
        }
        let mut k = self.clone();
        for (a, b) in k.values.iter_mut().zip(&other.values) {
            *a += *b;
        }
        Ok(k)
    }

    /// Kernel of the adjoint operator: `(m, l)` slots, reversed slot order, conjugated values.
    pub fn adjoint(&self) -> Self {
        let mut out = DiscreteKernel::zeros(self.m, self.l, self.modes);
        for idx in 0..self.values.len() {
            let t = self.tuple(idx);
            let reversed: Vec<usize> = t.iter().rev().copied().collect();
            let j = out.index(&reversed);
            out.values[j] = self.values[idx].conj();
        }
        out
    }

    fn weight(&self, grid: &MomentumGrid, tuple: &[usize]) -> f64 {
        tuple.iter().map(|&i| grid.weights[i]).product()
    }

    fn check_grid(&self, grid: &MomentumGrid) -> Result<(), FockError> {
        if self.modes != grid.modes() {
            return Err(FockError::DimensionMismatch(format!(
                "kernel over {} modes used with a grid of {}",
                self.modes,
                grid.modes()
            )));
        }
        Ok(())
    }
}

/// `<<Xi(kappa) Phi, Psi>>` through the defining dual pairing with `eta_{Phi,Psi}`.
pub fn xi_matrix_element(
    grid: &MomentumGrid,
    kernel: &DiscreteKernel,
    phi: &FockGridState,
    psi: &FockGridState,
) -> Result<Complex64, FockError> {
    kernel.check_grid(grid)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for idx in 0..kernel.values.len() {
        let k = kernel.values[idx];
        if k == Complex64::new(0.0, 0.0) {
            continue;
        }
        let t = kernel.tuple(idx);
        let eta = eta_pairing(grid, kernel.l, kernel.m, &t, phi, psi)?;
        acc += k * eta * kernel.weight(grid, &t);
    }
    Ok(acc)
}

/// `Xi(kappa) Phi` as a state.
pub fn apply_xi(
    grid: &MomentumGrid,
    kernel: &DiscreteKernel,
    phi: &FockGridState,
) -> Result<FockGridState, FockError> {
    kernel.check_grid(grid)?;
    let mut out = FockGridState::zero(phi.modes, phi.cutoff);
    for idx in 0..kernel.values.len() {
        let k = kernel.values[idx];
        if k == Complex64::new(0.0, 0.0) {
            continue;
        }
        let t = kernel.tuple(idx);
        let mut state = phi.clone();
        for &q in t[kernel.l..].iter().rev() {
            state = apply_annihilation(grid, q, &state)?;
        }
        for &p in t[..kernel.l].iter().rev() {
            state = apply_creation(grid, p, &state)?;
        }
        out = out.plus(&state.scaled(k * kernel.weight(grid, &t)))?;
    }
    Ok(out)
}

/// Normal-ordered product of two integral kernel operators, `Xi(a) Xi(b) = sum Xi(k_j)`.
///
/// Annihilation slots of `a` are contracted with creation slots of `b` in every possible
/// way; each contraction carries `delta_ij / w_i`, which against the two quadrature
/// weights leaves a single sum over the contracted point.
pub fn kernel_product(
    grid: &MomentumGrid,
    a: &DiscreteKernel,
    b: &DiscreteKernel,
) -> Result<Vec<DiscreteKernel>, FockError> {
    a.check_grid(grid)?;
    b.check_grid(grid)?;
    let n = grid.modes();
    let max_k = a.m.min(b.l);
    let mut out = Vec::new();
    for k in 0..=max_k {
        let l = a.l + b.l - k;
        let m = a.m - k + b.m;
        let mut kernel = DiscreteKernel::zeros(l, m, n);
        // choose which annihilators of a and which creators of b are contracted, and the matching
        for a_set in subsets(a.m, k) {
            for b_seq in arrangements(b.l, k) {
                let a_free: Vec<usize> = (0..a.m).filter(|i| !a_set.contains(i)).collect();
                let b_free: Vec<usize> = (0..b.l).filter(|j| !b_seq.contains(j)).collect();
                // operator word positions: [a creators | a annihilators | b creators | b annihilators]
                let pos_a_ann = |i: usize| a.l + i;
                let pos_b_cre = |j: usize| a.l + a.m + j;
                let mut target: Vec<usize> = Vec::with_capacity(a.arity() + b.arity());
                for (idx, &i) in a_set.iter().enumerate() {
                    target.push(pos_a_ann(i));
                    target.push(pos_b_cre(b_seq[idx]));
                }
                target.extend(0..a.l);
                target.extend(b_free.iter().map(|&j| pos_b_cre(j)));
                target.extend(a_free.iter().map(|&i| pos_a_ann(i)));
                target.extend((0..b.m).map(|j| a.l + a.m + b.l + j));

                for out_idx in 0..kernel.values.len() {
                    let t = kernel.tuple(out_idx);
                    let (cre, ann) = t.split_at(l);
                    let (cre_a, cre_b) = cre.split_at(a.l);
                    let (ann_a, ann_b) = ann.split_at(a.m - k);
                    let mut total = Complex64::new(0.0, 0.0);
                    let mut contracted = vec![0usize; k];
                    loop {
                        let mut ta = vec![0usize; a.arity()];
                        ta[..a.l].copy_from_slice(cre_a);
                        for (f, &i) in a_free.iter().enumerate() {
                            ta[a.l + i] = ann_a[f];
                        }
                        let mut tb = vec![0usize; b.arity()];
                        for (f, &j) in b_free.iter().enumerate() {
                            tb[j] = cre_b[f];
                        }
                        tb[b.l..].copy_from_slice(ann_b);
                        let mut w = 1.0;
                        for (c, &r) in contracted.iter().enumerate() {
                            ta[a.l + a_set[c]] = r;
                            tb[b_seq[c]] = r;
                            w *= grid.weights[r];
                        }
                        let mut word_modes = ta.clone();
                        word_modes.extend_from_slice(&tb);
                        let odd: Vec<bool> = word_modes.iter().map(|&md| grid.is_fermi(md)).collect();
                        let sign = graded_permutation_sign(&target, &odd) as f64;
                        total += a.get(&ta) * b.get(&tb) * (w * sign);
                        if !advance(&mut contracted, n) {
                            break;
                        }
                    }
                    kernel.values[out_idx] += total;
                }
            }
        }
        out.push(kernel);
    }
    Ok(out)
}

fn advance(counter: &mut [usize], base: usize) -> bool {
    for c in counter.iter_mut().rev() {
        *c += 1;
        if *c < base {
            return true;
        }
        *c = 0;
    }
    false
}

/// Increasing `k`-subsets of `0..n`.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Ordered selections of `k` distinct elements of `0..n`.
fn arrangements(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !cur.contains(&i) {
                cur.push(i);
                rec(n, k, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, k, &mut cur, &mut out);
    out
}

/// Largest deviation of `[d_i, d+_j]_(-/+) - delta_ij / w_i` over all basis states
/// strictly below the cutoff.
pub fn commutator_check(grid: &MomentumGrid, cutoff: usize) -> Result<f64, FockError> {
    if cutoff < 1 {
        return Err(FockError::CutoffExceeded {
            requested: 1,
            cutoff,
        });
    }
    let mut worst = 0.0f64;
    for config in grid.basis(cutoff - 1) {
        let state = FockGridState::basis_state(grid, config, cutoff)?;
        for i in 0..grid.modes() {
            let ai = apply_annihilation(grid, i, &state)?;
            for j in 0..grid.modes() {
                let forward = apply_annihilation(grid, i, &apply_creation(grid, j, &state)?)?;
                let backward = apply_creation(grid, j, &ai)?;
                let anti = grid.is_fermi(i) && grid.is_fermi(j);
                let mut bracket = if anti {
                    forward.plus(&backward)?
                } else {
                    forward.plus(&backward.scaled(Complex64::new(-1.0, 0.0)))?
                };
                if i == j {
                    bracket = bracket.plus(&state.scaled(Complex64::new(-1.0 / grid.weights[i], 0.0)))?;
                }
                let dev = bracket.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
                worst = worst.max(dev);
            }
        }
    }
    Ok(worst)
}
