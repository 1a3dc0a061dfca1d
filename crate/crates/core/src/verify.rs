//! Symbolic and numeric checks that a map sends `P^n_p` into `P^N_q`.
//!
//! With `G = G~/delta` and `P_j = P~_j/delta`, the map sends the source into
//! the target iff `Im G = sum_j |P_j|^2` on the source. Clearing denominators
//! and polarizing (`conj z -> chi`, `conj w -> tau`) gives the polynomial
//!
//! `R = G~ bar(delta) - bar(G~) delta - 2i sum_j P~_j bar(P~_j)`
//!
//! where `bar` is [`HermPoly::bar_swap`]. Substituting `w <- Q(z, chi, tau)` for
//! the source model turns membership into the exact test `R == 0`.

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::exactpoly::{GRat, HermPoly, Var};
use crate::maps::ClassifiedMap;
use crate::model::{defining_polynomial, PointSampler, ProblemInstance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("candidate has {got} numerators, target dimension is {expected}")]
    ComponentCount { expected: usize, got: usize },
    #[error("polynomial {0} has arity {1}, expected {2}")]
    Arity(String, usize, usize),
    #[error("polynomial {0} depends on chi or tau")]
    NotHolomorphic(String),
    #[error("denominator vanished at {0} consecutive sample points")]
    PersistentPole(usize),
}

/// A map in common-denominator q-power form: `P_j = numerators[j] / denom`,
/// `G = g_numerator / denom`. Target slots are in normalized order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateMap {
    pub inst: ProblemInstance,
    pub numerators: Vec<HermPoly>,
    pub denom: HermPoly,
    pub g_numerator: HermPoly,
}

impl CandidateMap {
    pub fn new(
        inst: ProblemInstance,
        numerators: Vec<HermPoly>,
        denom: HermPoly,
        g_numerator: HermPoly,
    ) -> Result<Self, VerifyError> {
        if numerators.len() != inst.big_n() {
            return Err(VerifyError::ComponentCount { expected: inst.big_n(), got: numerators.len() });
        }
        let n = inst.n();
        let named = numerators
            .iter()
            .enumerate()
            .map(|(j, p)| (format!("P{}", j + 1), p))
            .chain([("delta".to_string(), &denom), ("G".to_string(), &g_numerator)]);
        for (name, p) in named {
            if p.arity() != n {
                return Err(VerifyError::Arity(name, p.arity(), n));
            }
            let anti = (0..n).any(|i| p.depends_on(Var::Chi(i))) || p.depends_on(Var::Tau);
            if anti {
                return Err(VerifyError::NotHolomorphic(name));
            }
        }
        Ok(CandidateMap { inst, numerators, denom, g_numerator })
    }
}

impl From<&ClassifiedMap> for CandidateMap {
    fn from(h: &ClassifiedMap) -> Self {
        CandidateMap {
            inst: h.instance().clone(),
            numerators: h.numerators().to_vec(),
            denom: h.denominator().clone(),
            g_numerator: h.g_numerator().clone(),
        }
    }
}

/// Outcome of [`check`].
#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub symbolic_zero: bool,
    #[serde(serialize_with = "serialize_poly")]
    pub residual: HermPoly,
    pub residual_terms: usize,
    pub numeric_max_error: f64,
    pub transversal: bool,
    pub denom_min_modulus: f64,
    pub samples: usize,
}

fn serialize_poly<S: serde::Serializer>(p: &HermPoly, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

/// `R` before the substitution of the source model, in `(z, chi, w, tau)`.
pub fn unsubstituted_residual(h: &CandidateMap) -> HermPoly {
    let bar_d = h.denom.bar_swap();
    let mut r = &(&h.g_numerator * &bar_d) - &(&h.g_numerator.bar_swap() * &h.denom);
    let two_i = GRat::from_ints(0, 2);
    for p in &h.numerators {
        if !p.is_zero() {
            r = &r - &(p * &p.bar_swap()).scale(&two_i);
        }
    }
    r
}

/// The cleared, polarized membership identity with `w <- Q(z, chi, tau)`.
pub fn polarized_residual(h: &CandidateMap) -> HermPoly {
    let q = defining_polynomial(h.inst.p());
    unsubstituted_residual(h).substitute_w(&q).expect("Q does not contain w")
}

/// `R` is odd under `bar_swap` followed by re-substitution of the model:
/// `substitute_w(bar_swap(R), Q) == -R`.
pub fn residual_is_antisymmetric(residual: &HermPoly, p: &[u32]) -> bool {
    let q = defining_polynomial(p);
    let back = residual.bar_swap().substitute_w(&q).expect("Q does not contain w");
    back == -residual
}

/// The coefficient of `w` in `G` at the origin, when `G(0) = 0` and `delta(0) != 0`.
pub fn w_coefficient(h: &CandidateMap) -> Option<GRat> {
    let d0 = h.denom.constant_term();
    if d0.is_zero() || !h.g_numerator.constant_term().is_zero() {
        return None;
    }
    let n = h.inst.n();
    let mut e = vec![0; 2 * n + 2];
    e[2 * n] = 1;
    Some(&h.g_numerator.coeff(&e) / &d0)
}

/// `dG/dw (0) != 0`.
pub fn is_transversal(h: &CandidateMap) -> bool {
    w_coefficient(h).is_some_and(|c| !c.is_zero())
}

struct Compiled {
    nums: Vec<crate::exactpoly::CompiledPoly>,
    denom: crate::exactpoly::CompiledPoly,
    g: crate::exactpoly::CompiledPoly,
}

impl Compiled {
    fn new(h: &CandidateMap) -> Self {
        Compiled {
            nums: h.numerators.iter().map(HermPoly::compile).collect(),
            denom: h.denom.compile(),
            g: h.g_numerator.compile(),
        }
    }

    /// `(|delta|, |Im G - sum |P_j|^2|)` at a point; `None` at a pole.
    fn at(&self, z: &[Complex64], w: Complex64) -> Option<(f64, f64)> {
        let d = self.denom.eval_holo(z, w);
        if d.norm() == 0.0 {
            return None;
        }
        let g = self.g.eval_holo(z, w) / d;
        let sum: f64 = self.nums.iter().map(|p| (p.eval_holo(z, w) / d).norm_sqr()).sum();
        Some((d.norm(), (g.im - sum).abs()))
    }
}

/// `|Im G - sum_j |P_j|^2|` at one point.
pub fn membership_error_at(h: &CandidateMap, z: &[Complex64], w: Complex64) -> Option<f64> {
    Compiled::new(h).at(z, w).map(|(_, e)| e)
}

const MAX_POLE_RETRIES: usize = 16;

/// Returns `(max membership error, min |delta|)` over `nsamples` points of the source model.
fn sample(h: &CandidateMap, nsamples: usize, seed: u64) -> Result<(f64, f64), VerifyError> {
    let c = Compiled::new(h);
    let mut sampler = PointSampler::new(seed);
    let (mut max_err, mut min_d) = (0.0f64, f64::INFINITY);
    for _ in 0..nsamples {
        let mut misses = 0;
        loop {
            let (z, w) = sampler.sample(h.inst.p());
            match c.at(&z, w) {
                Some((d, e)) => {
                    max_err = max_err.max(e);
                    min_d = min_d.min(d);
                    break;
                }
                None => {
                    misses += 1;
                    if misses >= MAX_POLE_RETRIES {
                        return Err(VerifyError::PersistentPole(misses));
                    }
                }
            }
        }
    }
    Ok((max_err, min_d))
}

/// Maximum of `|Im G - sum_j |P_j/delta|^2|` over sampled source points.
pub fn numeric_membership(h: &CandidateMap, nsamples: usize, seed: u64) -> Result<f64, VerifyError> {
    sample(h, nsamples, seed).map(|(e, _)| e)
}

/// Minimum of `|delta|` over sampled source points (`inf` for no samples).
pub fn denominator_nonvanishing(h: &CandidateMap, nsamples: usize, seed: u64) -> Result<f64, VerifyError> {
    sample(h, nsamples, seed).map(|(_, d)| d)
}

/// Full report: symbolic residual, transversality and sampled diagnostics.
pub fn check(h: &CandidateMap, nsamples: usize, seed: u64) -> Result<ResidualReport, VerifyError> {
    let residual = polarized_residual(h);
    let (numeric_max_error, denom_min_modulus) = sample(h, nsamples, seed)?;
    Ok(ResidualReport {
        symbolic_zero: residual.is_zero(),
        residual_terms: residual.len(),
        residual,
        numeric_max_error,
        transversal: is_transversal(h),
        denom_min_modulus,
        samples: nsamples,
    })
}
