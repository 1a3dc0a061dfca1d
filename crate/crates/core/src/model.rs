//! Exponent signatures and defining functions of the models `P^n_p`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exactpoly::{GRat, HermPoly, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("exponent signature is empty")]
    Empty,
    #[error("exponent at position {0} is {1}; exponents must be >= 1")]
    NonPositive(usize, i64),
    #[error("target dimension N={big_n} is smaller than source dimension n={n}")]
    TargetTooSmall { n: usize, big_n: usize },
    #[error("codimension bound N - n < n fails for n={n}, N={big_n}")]
    CodimensionBound { n: usize, big_n: usize },
}

/// Tuple of positive exponents, stored in normalized order together with the
/// permutation back to the order the user supplied.
///
/// Normalized order puts the entries equal to 1 first (there are `s` of them)
/// and keeps the relative order of the remaining entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentSignature {
    exps: Vec<u32>,
    /// `order[k]` is the user position of normalized position `k`.
    order: Vec<usize>,
    s: usize,
}

impl ExponentSignature {
    /// Normalizes a raw target exponent list.
    pub fn normalize(raw: &[i64]) -> Result<Self, ModelError> {
        let exps = validate(raw)?;
        let mut order: Vec<usize> = (0..exps.len()).filter(|&i| exps[i] == 1).collect();
        let s = order.len();
        order.extend((0..exps.len()).filter(|&i| exps[i] != 1));
        let exps = order.iter().map(|&i| exps[i]).collect();
        Ok(ExponentSignature { exps, order, s })
    }

    /// A signature kept in the given order (used for sources, which are never
    /// reordered).
    pub fn unnormalized(raw: &[i64]) -> Result<Self, ModelError> {
        let exps = validate(raw)?;
        let s = exps.iter().filter(|&&e| e == 1).count();
        let order = (0..exps.len()).collect();
        Ok(ExponentSignature { exps, order, s })
    }

    pub fn from_normalized(exps: &[u32]) -> Result<Self, ModelError> {
        let raw: Vec<i64> = exps.iter().map(|&e| e as i64).collect();
        Self::normalize(&raw)
    }

    /// Exponents in normalized order.
    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    /// Number of leading entries equal to 1.
    pub fn s(&self) -> usize {
        self.s
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// User position of normalized index `k`.
    pub fn user_index(&self, k: usize) -> usize {
        self.order[k]
    }

    /// Normalized index of user position `u`.
    pub fn normalized_index(&self, u: usize) -> Option<usize> {
        self.order.iter().position(|&x| x == u)
    }

    /// Exponents in the order the user supplied.
    pub fn user_exps(&self) -> Vec<u32> {
        self.denormalize(&self.exps)
    }

    /// Reorders a normalized-order slice into user order.
    pub fn denormalize<T: Clone>(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.len());
        let mut out: Vec<Option<T>> = vec![None; v.len()];
        for (k, x) in v.iter().enumerate() {
            out[self.order[k]] = Some(x.clone());
        }
        out.into_iter().map(|x| x.expect("order is a permutation")).collect()
    }

    /// Reorders a user-order slice into normalized order.
    pub fn renormalize<T: Clone>(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.len());
        self.order.iter().map(|&u| v[u].clone()).collect()
    }

    pub fn is_normalized(&self) -> bool {
        self.exps.iter().take(self.s).all(|&e| e == 1) && self.exps[self.s..].iter().all(|&e| e >= 2)
    }
}

fn validate(raw: &[i64]) -> Result<Vec<u32>, ModelError> {
    if raw.is_empty() {
        return Err(ModelError::Empty);
    }
    raw.iter()
        .enumerate()
        .map(|(i, &e)| if e < 1 || e > u32::MAX as i64 { Err(ModelError::NonPositive(i, e)) } else { Ok(e as u32) })
        .collect()
}

/// The pair `(P^n_p, P^N_q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProblemInstance {
    pub source: ExponentSignature,
    pub target: ExponentSignature,
}

impl ProblemInstance {
    /// Source exponents are kept as given; target exponents are normalized.
    /// Instances violating `N - n < n` are accepted here and rejected by the
    /// classification operations.
    pub fn new(p: &[i64], q: &[i64]) -> Result<Self, ModelError> {
        let source = ExponentSignature::unnormalized(p)?;
        let target = ExponentSignature::normalize(q)?;
        if target.len() < source.len() {
            return Err(ModelError::TargetTooSmall { n: source.len(), big_n: target.len() });
        }
        Ok(ProblemInstance { source, target })
    }

    pub fn n(&self) -> usize {
        self.source.len()
    }

    pub fn big_n(&self) -> usize {
        self.target.len()
    }

    pub fn s(&self) -> usize {
        self.target.s()
    }

    pub fn p(&self) -> &[u32] {
        self.source.exps()
    }

    /// Target exponents in normalized order.
    pub fn q(&self) -> &[u32] {
        self.target.exps()
    }

    pub fn satisfies_codimension_bound(&self) -> bool {
        self.big_n() - self.n() < self.n()
    }

    pub fn require_classifiable(&self) -> Result<(), ModelError> {
        if self.satisfies_codimension_bound() {
            Ok(())
        } else {
            Err(ModelError::CodimensionBound { n: self.n(), big_n: self.big_n() })
        }
    }
}

/// Polarized defining function `Q(z, chi, tau) = tau + 2i sum_j z_j^e_j chi_j^e_j`,
/// so that the model is `w = Q(z, conj z, conj w)`.
pub fn defining_polynomial(exps: &[u32]) -> HermPoly {
    let n = exps.len();
    let mut q = HermPoly::var(n, Var::Tau);
    let two_i = GRat::from_ints(0, 2);
    for (j, &e) in exps.iter().enumerate() {
        let mono = &HermPoly::var_pow(n, Var::Z(j), e) * &HermPoly::var_pow(n, Var::Chi(j), e);
        q = &q + &mono.scale(&two_i);
    }
    q
}

/// `sum_j |z_j|^(2 e_j)`.
pub fn hermitian_height(exps: &[u32], z: &[Complex64]) -> f64 {
    exps.iter().zip(z).map(|(&e, zj)| zj.norm_sqr().powi(e as i32)).sum()
}

/// The point `(z, u + i sum_j |z_j|^(2 e_j))` of the model.
pub fn point_on_model(exps: &[u32], z: Vec<Complex64>, u: f64) -> (Vec<Complex64>, Complex64) {
    let h = hermitian_height(exps, &z);
    (z, Complex64::new(u, h))
}

/// Draws points of the model with `|z_j| <= radius` and `|Re w| <= 1`.
#[derive(Clone, Debug)]
pub struct PointSampler {
    rng: ChaCha8Rng,
    radius: f64,
}

impl PointSampler {
    pub const DEFAULT_RADIUS: f64 = 1.2;

    pub fn new(seed: u64) -> Self {
        Self::with_radius(seed, Self::DEFAULT_RADIUS)
    }

    pub fn with_radius(seed: u64, radius: f64) -> Self {
        PointSampler { rng: ChaCha8Rng::seed_from_u64(seed), radius }
    }

    pub fn sample(&mut self, exps: &[u32]) -> (Vec<Complex64>, Complex64) {
        let z = (0..exps.len())
            .map(|_| {
                let r = self.radius * self.rng.gen::<f64>().sqrt();
                let t = self.rng.gen_range(0.0..std::f64::consts::TAU);
                Complex64::from_polar(r, t)
            })
            .collect();
        let u = self.rng.gen_range(-1.0..1.0);
        point_on_model(exps, z, u)
    }
}

/// One sampled point of the model, reproducible from `seed`.
pub fn sample_point(sig: &ExponentSignature, seed: u64) -> (Vec<Complex64>, Complex64) {
    PointSampler::new(seed).sample(sig.exps())
}
