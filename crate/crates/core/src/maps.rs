//! Classified maps `P^n_p -> P^N_q` in exact q-power form.
//!
//! A component `H_j` with `q_j >= 2` is generally multivalued, so a map is
//! stored through `P_j = H_j^{q_j} = numerator_j / delta` together with
//! `G = lambda^2 w / delta`. Every verification identity only involves the
//! `P_j`; radicals appear in printing and numeric evaluation only. Maps whose
//! components differ by `q_j`-th roots of unity therefore share one
//! representation.
//!
//! The family is parametrized by an admissible pattern, an `n x N` matrix `W`
//! with orthonormal rows, `lambda > 0`, `r`, and a vector `c` supported on the
//! first `s` slots. The unitary completion `U` of `W` and the vector `b` never
//! need to be formed: the map depends on them only through `b' = c W^*` and
//! `|b|^2 = |c|^2`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::autgroup::CanonicalAut;
use crate::exactpoly::{GMatrix, GRat, HermPoly, Var};
use crate::existence::{AdmissiblePattern, ExistenceError};
use crate::model::{ModelError, ProblemInstance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pattern(#[from] ExistenceError),
    #[error("coefficient matrix must be {rows}x{cols}, got {got_rows}x{got_cols}")]
    Shape { rows: usize, cols: usize, got_rows: usize, got_cols: usize },
    #[error("condition (a) fails: W W^* is not the identity")]
    NotOrthonormal,
    #[error("condition (b) fails at row {row}, column {col}")]
    SupportMismatch { row: usize, col: usize },
    #[error("lambda must be positive")]
    NonPositiveLambda,
    #[error("c must have length s={expected}, got {got}")]
    CLength { expected: usize, got: usize },
    #[error("c must vanish when there are no slots with q_j = 1")]
    CWithoutLinearSlots,
    #[error("denominator vanishes at the evaluation point")]
    DenominatorVanishes,
    #[error("point has wrong dimension: expected {expected}, got {got}")]
    PointDimension { expected: usize, got: usize },
    #[error("automorphism acts on q={aut:?}, map targets q={map:?}")]
    SignatureMismatch { aut: Vec<u32>, map: Vec<u32> },
}

/// A map of the classified family, with its derived q-power data.
#[derive(Clone, Debug)]
pub struct ClassifiedMap {
    inst: ProblemInstance,
    pattern: AdmissiblePattern,
    w: GMatrix,
    lambda: BigRational,
    r: BigRational,
    c: Vec<GRat>,
    b_prime: Vec<GRat>,
    beta: BigRational,
    numerators: Vec<HermPoly>,
    denom: HermPoly,
    g_numerator: HermPoly,
}

/// Raw q-power data computed from parameters without checking any condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPowerData {
    pub numerators: Vec<HermPoly>,
    pub denom: HermPoly,
    pub g_numerator: HermPoly,
    pub b_prime: Vec<GRat>,
    pub beta: BigRational,
}

/// Builds numerators, `delta` and `G`'s numerator from the parameters.
///
/// Components with `j >= s` use only the entries of `W` selected by the
/// pattern; the linear slots use the whole column. No validation happens
/// here, which makes this the entry point for deliberately broken candidates.
pub fn qpower_data(
    inst: &ProblemInstance,
    pattern: &AdmissiblePattern,
    w: &GMatrix,
    lambda: &BigRational,
    r: &BigRational,
    c: &[GRat],
) -> QPowerData {
    let n = inst.n();
    let s = inst.s();
    let p = inst.p();
    let lam = GRat::real(lambda.clone());
    let zp: Vec<HermPoly> = (0..n).map(|i| HermPoly::var_pow(n, Var::Z(i), p[i])).collect();
    let wv = HermPoly::var(n, Var::W);

    let mut numerators = Vec::with_capacity(inst.big_n());
    for j in 0..inst.big_n() {
        let num = if j < s {
            let mut acc = wv.scale(c.get(j).unwrap_or(&GRat::zero()));
            for (i, zpi) in zp.iter().enumerate() {
                acc = &acc + &zpi.scale(&w[(i, j)]);
            }
            acc.scale(&lam)
        } else if let Some(i) = pattern.get(j) {
            zp[i].scale(&(&lam * &w[(i, j)]))
        } else {
            HermPoly::zero(n)
        };
        numerators.push(num);
    }

    // b' = c W^*, beta = |c|^2
    let b_prime: Vec<GRat> = (0..n)
        .map(|i| {
            let mut acc = GRat::zero();
            for (j, cj) in c.iter().enumerate() {
                acc += &(cj * &w[(i, j)].conj());
            }
            acc
        })
        .collect();
    let beta = c.iter().map(GRat::norm_sqr).fold(BigRational::zero(), |a, b| a + b);

    // delta = 1 - 2i <z^p, conj(b')> - (r + i beta) w
    let mut denom = HermPoly::one(n);
    let two_i = GRat::from_ints(0, 2);
    for (i, bi) in b_prime.iter().enumerate() {
        denom = &denom - &zp[i].scale(&(&two_i * &bi.conj()));
    }
    denom = &denom - &wv.scale(&GRat::new(r.clone(), beta.clone()));

    let g_numerator = wv.scale(&GRat::real(lambda * lambda));
    QPowerData { numerators, denom, g_numerator, b_prime, beta }
}

/// Reads the pattern off the support of `W` in the slots `j >= s`.
pub fn pattern_from_matrix(inst: &ProblemInstance, w: &GMatrix) -> Result<AdmissiblePattern, MapError> {
    check_shape(inst, w)?;
    let mut sigma = BTreeMap::new();
    for k in inst.s()..inst.big_n() {
        let rows: Vec<usize> = (0..inst.n()).filter(|&i| !w[(i, k)].is_zero()).collect();
        match rows.as_slice() {
            [] => {}
            [i] => {
                sigma.insert(k, *i);
            }
            _ => return Err(MapError::SupportMismatch { row: rows[1], col: k }),
        }
    }
    let pat = AdmissiblePattern::new(sigma);
    pat.validate(inst)?;
    Ok(pat)
}

fn check_shape(inst: &ProblemInstance, w: &GMatrix) -> Result<(), MapError> {
    if w.rows() != inst.n() || w.cols() != inst.big_n() {
        return Err(MapError::Shape { rows: inst.n(), cols: inst.big_n(), got_rows: w.rows(), got_cols: w.cols() });
    }
    Ok(())
}

/// Checks conditions (a) and (b) for `W` against a pattern.
pub fn check_coefficients(inst: &ProblemInstance, pattern: &AdmissiblePattern, w: &GMatrix) -> Result<(), MapError> {
    check_shape(inst, w)?;
    for j in inst.s()..inst.big_n() {
        for i in 0..inst.n() {
            let expected = pattern.get(j) == Some(i);
            if expected == w[(i, j)].is_zero() {
                return Err(MapError::SupportMismatch { row: i, col: j });
            }
        }
    }
    if !w.has_orthonormal_rows() {
        return Err(MapError::NotOrthonormal);
    }
    Ok(())
}

impl ClassifiedMap {
    /// `H_{sigma,W} = (F(z), w)`: lambda = 1, r = 0, c = 0, delta = 1.
    pub fn monomial(inst: &ProblemInstance, pattern: &AdmissiblePattern, w: &GMatrix) -> Result<Self, MapError> {
        let c = vec![GRat::zero(); inst.s()];
        Self::general(inst, pattern, w, BigRational::one(), BigRational::zero(), c)
    }

    /// The canonical witness map of an admissible pattern.
    ///
    /// Source indices not covered by `sigma(K)` fill the first linear slots in
    /// ascending order. For each covered source index the smallest preimage
    /// slot gets coefficient 1 and the remaining preimages get 0; the stored
    /// pattern is restricted to those representatives so that condition (b)
    /// holds for the returned map.
    pub fn default_witness(inst: &ProblemInstance, pattern: &AdmissiblePattern) -> Result<Self, MapError> {
        inst.require_classifiable()?;
        pattern.validate(inst)?;
        let n = inst.n();
        let mut w = GMatrix::zeros(n, inst.big_n());
        for (slot, &t) in pattern.uncovered(n).iter().enumerate() {
            w[(t, slot)] = GRat::one();
        }
        let mut reps = BTreeMap::new();
        for (&k, &i) in &pattern.sigma {
            reps.entry(i).or_insert(k);
        }
        let effective = AdmissiblePattern::new(reps.iter().map(|(&i, &k)| (k, i)).collect());
        for (&i, &k) in &reps {
            w[(i, k)] = GRat::one();
        }
        Self::monomial(inst, &effective, &w)
    }

    /// The full family: `H = (lambda (z^p W + c w) / delta, ..., lambda^2 w / delta)`
    /// with the `q_j`-th powers taken in the slots `j >= s`.
    pub fn general(
        inst: &ProblemInstance,
        pattern: &AdmissiblePattern,
        w: &GMatrix,
        lambda: BigRational,
        r: BigRational,
        c: Vec<GRat>,
    ) -> Result<Self, MapError> {
        inst.require_classifiable()?;
        pattern.validate(inst)?;
        check_coefficients(inst, pattern, w)?;
        if !lambda.is_positive() {
            return Err(MapError::NonPositiveLambda);
        }
        if c.len() != inst.s() {
            return Err(MapError::CLength { expected: inst.s(), got: c.len() });
        }
        Ok(Self::assemble(inst.clone(), pattern.clone(), w.clone(), lambda, r, c))
    }

    fn assemble(
        inst: ProblemInstance,
        pattern: AdmissiblePattern,
        w: GMatrix,
        lambda: BigRational,
        r: BigRational,
        c: Vec<GRat>,
    ) -> Self {
        let data = qpower_data(&inst, &pattern, &w, &lambda, &r, &c);
        ClassifiedMap {
            inst,
            pattern,
            w,
            lambda,
            r,
            c,
            b_prime: data.b_prime,
            beta: data.beta,
            numerators: data.numerators,
            denom: data.denom,
            g_numerator: data.g_numerator,
        }
    }

    pub fn instance(&self) -> &ProblemInstance {
        &self.inst
    }
    pub fn pattern(&self) -> &AdmissiblePattern {
        &self.pattern
    }
    pub fn w(&self) -> &GMatrix {
        &self.w
    }
    pub fn lambda(&self) -> &BigRational {
        &self.lambda
    }
    pub fn r(&self) -> &BigRational {
        &self.r
    }
    /// Linear-slot translation vector (length `s`).
    pub fn c(&self) -> &[GRat] {
        &self.c
    }
    pub fn b_prime(&self) -> &[GRat] {
        &self.b_prime
    }
    pub fn beta(&self) -> &BigRational {
        &self.beta
    }
    /// Numerators of `P_j = H_j^{q_j}`, one per target slot (normalized order).
    pub fn numerators(&self) -> &[HermPoly] {
        &self.numerators
    }
    pub fn denominator(&self) -> &HermPoly {
        &self.denom
    }
    pub fn g_numerator(&self) -> &HermPoly {
        &self.g_numerator
    }

    /// Post-composition with a stability-group element of the target.
    ///
    /// Lifting through `z_j -> z_j^{q_j}` turns `T` into the Heisenberg
    /// automorphism `Z -> lambda_T (Z + a w) V / delta_T` with `V = P diag(U~, mu^q)`
    /// and `a = (beta, 0)`. Composing with the lift of `H` gives
    /// `W' = W V`, `c' = (lambda a + c) V`, `lambda' = lambda_T lambda`,
    /// `r' = lambda^2 rho + r - 2 lambda Im <c, conj a>`.
    pub fn apply_aut(&self, t: &CanonicalAut) -> Result<Self, MapError> {
        if t.signature().exps() != self.inst.q() {
            return Err(MapError::SignatureMismatch {
                aut: t.signature().exps().to_vec(),
                map: self.inst.q().to_vec(),
            });
        }
        let s = self.inst.s();
        let v = t.heisenberg_matrix();
        let w_new = self.w.mul(&v);
        let lam = GRat::real(self.lambda.clone());
        let shifted: Vec<GRat> = (0..self.inst.big_n())
            .map(|j| if j < s { &(&lam * &t.b()[j]) + &self.c[j] } else { GRat::zero() })
            .collect();
        let c_full = GMatrix::row_mul(&shifted, &v);
        let c_new = c_full[..s].to_vec();
        debug_assert!(c_full[s..].iter().all(Zero::is_zero));
        let mut cross = GRat::zero();
        for (cj, aj) in self.c.iter().zip(t.b()) {
            cross += &(cj * &aj.conj());
        }
        let two = BigRational::from_integer(2.into());
        let r_new = &self.lambda * &self.lambda * t.r() + &self.r - two * &self.lambda * &cross.im;
        let lambda_new = t.lambda() * &self.lambda;
        let pattern = pattern_from_matrix(&self.inst, &w_new)?;
        Ok(Self::assemble(self.inst.clone(), pattern, w_new, lambda_new, r_new, c_new))
    }

    /// `(P_1, ..., P_N, G)` at a point, with `P_j = numerator_j / delta`.
    /// Branch-free; this is what every numeric check uses.
    pub fn evaluate_qpower(&self, z: &[Complex64], w: Complex64) -> Result<Vec<Complex64>, MapError> {
        if z.len() != self.inst.n() {
            return Err(MapError::PointDimension { expected: self.inst.n(), got: z.len() });
        }
        let d = self.denom.compile().eval_holo(z, w);
        if d.norm() == 0.0 {
            return Err(MapError::DenominatorVanishes);
        }
        let mut out: Vec<Complex64> = self.numerators.iter().map(|p| p.compile().eval_holo(z, w) / d).collect();
        out.push(self.g_numerator.compile().eval_holo(z, w) / d);
        Ok(out)
    }

    /// Numeric value of `H` with principal `q_j`-th roots.
    pub fn evaluate(&self, z: &[Complex64], w: Complex64) -> Result<Vec<Complex64>, MapError> {
        let mut vals = self.evaluate_qpower(z, w)?;
        for (j, &qj) in self.inst.q().iter().enumerate() {
            if qj > 1 {
                let v = vals[j];
                vals[j] = if v.norm() == 0.0 { v } else { v.powf(1.0 / qj as f64) };
            }
        }
        Ok(vals)
    }

    /// Human-readable components with formal `^(1/q)` roots, normalized order.
    pub fn radical_components(&self) -> Vec<String> {
        let q = self.inst.q();
        let p = self.inst.p();
        let unit_denom = self.denom == HermPoly::one(self.inst.n());
        let den = pretty(&self.denom);
        let mut out = Vec::with_capacity(q.len() + 1);
        for (j, num) in self.numerators.iter().enumerate() {
            let text = if num.is_zero() {
                "0".to_string()
            } else if q[j] == 1 {
                if unit_denom {
                    pretty(num)
                } else {
                    format!("({})/({den})", pretty(num))
                }
            } else {
                let i = self.pattern.get(j).expect("nonzero slot is in K");
                let coeff = &GRat::real(self.lambda.clone()) * &self.w[(i, j)];
                let root = if p[i].is_multiple_of(q[j]) {
                    power_text(i, p[i] / q[j])
                } else {
                    format!("z{}^({}/{})", i + 1, p[i], q[j])
                };
                let mut t = if coeff.is_one() { root } else { format!("({coeff})^(1/{})*{root}", q[j]) };
                if !unit_denom {
                    t = format!("{t}/({den})^(1/{})", q[j]);
                }
                t
            };
            out.push(text);
        }
        out.push(if unit_denom {
            pretty(&self.g_numerator)
        } else {
            format!("({})/({den})", pretty(&self.g_numerator))
        });
        out
    }
}

fn power_text(i: usize, e: u32) -> String {
    if e == 1 {
        format!("z{}", i + 1)
    } else {
        format!("z{}^{e}", i + 1)
    }
}

/// Compact text with unit coefficients suppressed, e.g. `z3^6 + 2*w`.
pub fn pretty(p: &HermPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let n = p.arity();
    let names = |slot: usize| -> String {
        if slot < n {
            format!("z{}", slot + 1)
        } else if slot < 2 * n {
            format!("chi{}", slot - n + 1)
        } else if slot == 2 * n {
            "w".into()
        } else {
            "tau".into()
        }
    };
    let mut parts = Vec::new();
    for (e, c) in p.sorted_terms() {
        let vars: Vec<String> = e
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(slot, &k)| if k == 1 { names(slot) } else { format!("{}^{k}", names(slot)) })
            .collect();
        let mono = vars.join("*");
        let term = if c.is_one() && !mono.is_empty() {
            mono
        } else if mono.is_empty() {
            format!("({c})")
        } else if c == &GRat::from(-1) {
            format!("-{mono}")
        } else {
            format!("({c})*{mono}")
        };
        parts.push(term);
    }
    parts.join(" + ")
}

impl PartialEq for ClassifiedMap {
    /// Equality of q-power representations.
    fn eq(&self, o: &Self) -> bool {
        self.inst == o.inst
            && self.numerators == o.numerators
            && self.denom == o.denom
            && self.g_numerator == o.g_numerator
    }
}

impl Eq for ClassifiedMap {}
