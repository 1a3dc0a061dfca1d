//! The stability group `Aut(P^N_q, 0)` of the target model.
//!
//! Every element has the normal form `T = Delta_lambda o Lambda_{U~,mu} o Psi_{b,r} o Sigma_sigma`:
//!
//! * `Sigma_sigma(z, w) = (z_1..z_s, z_{sigma(s+1)}..z_{sigma(N)}, w)` with `q_{sigma(k)} = q_k`;
//! * `Psi_{b,r}` is the Heisenberg map on the linear block,
//!   `z_j -> (z_j + b_j w)/delta`, `z_k -> z_k / delta^{1/q_k}`, `w -> w/delta`,
//!   `delta = 1 - 2i <z', conj b> - (r + i|b|^2) w`;
//!   `r` is any rational, zero and negative included, since the group law needs it;
//! * `Lambda_{U~,mu}` applies the unitary `U~` to the linear block and phases `mu_k` to the rest;
//! * `Delta_lambda(z, w) = (lambda z_1.., lambda^{1/q_k} z_k.., lambda^2 w)`.
//!
//! In the q-power coordinates `Z_k = z_k^{q_k}` each generator becomes an
//! automorphism of the Heisenberg model, so composition reduces to the
//! Heisenberg group laws:
//!
//! * `Psi_{b,r} o L_V = L_V o Psi_{b V^*, r}`
//! * `Psi_{b,r} o D_lambda = D_lambda o Psi_{lambda b, lambda^2 r}`
//! * `Psi_{b1,r1} o Psi_{b2,r2} = Psi_{b1 + b2, r1 + r2 - 2 Im <b2, conj b1>}`
//! * `L_{V1} o L_{V2} = L_{V2 V1}`
//!
//! Phases are exact unimodular Gaussian rationals; a phase `mu_k` acts on
//! `Z_k` as `mu_k^{q_k}`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactpoly::{dot_conj, GMatrix, GRat, UnimodularGRat};
use crate::existence::AdmissiblePattern;
use crate::maps::{ClassifiedMap, MapError};
use crate::model::{ExponentSignature, ModelError, ProblemInstance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutError {
    #[error("automorphisms act on different signatures: {0:?} vs {1:?}")]
    SignatureMismatch(Vec<u32>, Vec<u32>),
    #[error("invalid automorphism: {0}")]
    Invalid(String),
    #[error("maps belong to different instances")]
    InstanceMismatch,
    #[error("the phase matching slot {slot} has no exact {q}-th root in Q(i)")]
    InexactPhase { slot: usize, q: u32 },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A single generator. Indices refer to the normalized target order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AutElement {
    /// Full-length permutation, identity on the linear block.
    Perm(Vec<usize>),
    Dilation(BigRational),
    /// `b` has length `s`.
    Mobius {
        b: Vec<GRat>,
        r: BigRational,
    },
    /// `u` is `s x s` unitary, `mu` has length `N - s`.
    LinearPhase {
        u: GMatrix,
        mu: Vec<UnimodularGRat>,
    },
}

/// Normal-form element `Delta_lambda o Lambda_{U~,mu} o Psi_{b,r} o Sigma_sigma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalAut {
    sig: ExponentSignature,
    lambda: BigRational,
    u_tilde: GMatrix,
    mu: Vec<UnimodularGRat>,
    b: Vec<GRat>,
    r: BigRational,
    sigma: Vec<usize>,
}

fn check_perm(sig: &ExponentSignature, perm: &[usize]) -> Result<(), AutError> {
    let q = sig.exps();
    if perm.len() != q.len() {
        return Err(AutError::Invalid(format!("permutation has length {}, expected {}", perm.len(), q.len())));
    }
    let mut seen = vec![false; q.len()];
    for (k, &t) in perm.iter().enumerate() {
        if t >= q.len() || seen[t] {
            return Err(AutError::Invalid("not a permutation".into()));
        }
        seen[t] = true;
        if k < sig.s() && t != k {
            return Err(AutError::Invalid("permutation moves a slot with q = 1".into()));
        }
        if q[t] != q[k] {
            return Err(AutError::Invalid(format!("permutation does not preserve q at slot {k}")));
        }
    }
    Ok(())
}

impl CanonicalAut {
    pub fn identity(sig: &ExponentSignature) -> Self {
        let s = sig.s();
        CanonicalAut {
            sig: sig.clone(),
            lambda: BigRational::one(),
            u_tilde: GMatrix::identity(s),
            mu: vec![UnimodularGRat::one(); sig.len() - s],
            b: vec![GRat::zero(); s],
            r: BigRational::zero(),
            sigma: (0..sig.len()).collect(),
        }
    }

    /// Validated constructor.
    pub fn new(
        sig: &ExponentSignature,
        lambda: BigRational,
        u_tilde: GMatrix,
        mu: Vec<UnimodularGRat>,
        b: Vec<GRat>,
        r: BigRational,
        sigma: Vec<usize>,
    ) -> Result<Self, AutError> {
        let s = sig.s();
        if !lambda.is_positive() {
            return Err(AutError::Invalid("lambda must be positive".into()));
        }
        if u_tilde.rows() != s || u_tilde.cols() != s || !u_tilde.is_unitary() {
            return Err(AutError::Invalid("U~ must be an exactly unitary s x s matrix".into()));
        }
        if mu.len() != sig.len() - s {
            return Err(AutError::Invalid(format!("expected {} phases, got {}", sig.len() - s, mu.len())));
        }
        if b.len() != s {
            return Err(AutError::Invalid(format!("b must have length s={s}, got {}", b.len())));
        }
        check_perm(sig, &sigma)?;
        Ok(CanonicalAut { sig: sig.clone(), lambda, u_tilde, mu, b, r, sigma })
    }

    pub fn from_element(sig: &ExponentSignature, e: &AutElement) -> Result<Self, AutError> {
        let id = Self::identity(sig);
        match e {
            AutElement::Perm(p) => Self::new(sig, id.lambda, id.u_tilde, id.mu, id.b, id.r, p.clone()),
            AutElement::Dilation(l) => Self::new(sig, l.clone(), id.u_tilde, id.mu, id.b, id.r, id.sigma),
            AutElement::Mobius { b, r } => Self::new(sig, id.lambda, id.u_tilde, id.mu, b.clone(), r.clone(), id.sigma),
            AutElement::LinearPhase { u, mu } => Self::new(sig, id.lambda, u.clone(), mu.clone(), id.b, id.r, id.sigma),
        }
    }

    pub fn signature(&self) -> &ExponentSignature {
        &self.sig
    }
    pub fn lambda(&self) -> &BigRational {
        &self.lambda
    }
    pub fn u_tilde(&self) -> &GMatrix {
        &self.u_tilde
    }
    /// Phases of the slots `s..N`.
    pub fn mu(&self) -> &[UnimodularGRat] {
        &self.mu
    }
    pub fn b(&self) -> &[GRat] {
        &self.b
    }
    pub fn r(&self) -> &BigRational {
        &self.r
    }
    /// `sigma[k]` is the slot read into slot `k`.
    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.sig)
    }

    /// `V = P diag(U~, mu_k^{q_k})` with `P[sigma(k), k] = 1`: the linear part of
    /// the lifted automorphism acting on row vectors in q-power coordinates.
    pub fn heisenberg_matrix(&self) -> GMatrix {
        let s = self.sig.s();
        let q = self.sig.exps();
        let mut v = GMatrix::zeros(q.len(), q.len());
        for i in 0..s {
            for j in 0..s {
                v[(i, j)] = self.u_tilde[(i, j)].clone();
            }
        }
        for k in s..q.len() {
            v[(self.sigma[k], k)] = self.mu[k - s].pow(q[k]).into_inner();
        }
        v
    }

    /// `self o other` (apply `other` first).
    pub fn then_after(&self, other: &Self) -> Result<Self, AutError> {
        if self.sig.exps() != other.sig.exps() {
            return Err(AutError::SignatureMismatch(self.sig.exps().to_vec(), other.sig.exps().to_vec()));
        }
        let s = self.sig.s();
        let (t1, t2) = (self, other);
        let lam2 = GRat::real(t2.lambda.clone());
        // lambda_2 b_1 U~_2^*
        let moved = GMatrix::row_mul(&t1.b.iter().map(|x| &lam2 * x).collect::<Vec<_>>(), &t2.u_tilde.adjoint());
        let b: Vec<GRat> = moved.iter().zip(&t2.b).map(|(x, y)| x + y).collect();
        let two = BigRational::from_integer(2.into());
        let r = &t2.lambda * &t2.lambda * &t1.r + &t2.r - two * dot_conj(&t2.b, &moved).im;
        let u_tilde = t2.u_tilde.mul(&t1.u_tilde);
        let sigma: Vec<usize> = (0..self.sig.len()).map(|k| t2.sigma[t1.sigma[k]]).collect();
        let mu: Vec<UnimodularGRat> = (s..self.sig.len()).map(|k| t1.mu[k - s].mul(&t2.mu[t1.sigma[k] - s])).collect();
        Ok(CanonicalAut { sig: self.sig.clone(), lambda: &t1.lambda * &t2.lambda, u_tilde, mu, b, r, sigma })
    }

    /// Two-sided inverse.
    pub fn invert(&self) -> Self {
        let s = self.sig.s();
        let mut inv_sigma = vec![0; self.sigma.len()];
        for (k, &t) in self.sigma.iter().enumerate() {
            inv_sigma[t] = k;
        }
        let word = [
            AutElement::Perm(inv_sigma),
            AutElement::Mobius { b: self.b.iter().map(|x| -x).collect(), r: -&self.r },
            AutElement::LinearPhase {
                u: if s > 0 { self.u_tilde.adjoint() } else { GMatrix::zeros(0, 0) },
                mu: self.mu.iter().map(UnimodularGRat::conj).collect(),
            },
            AutElement::Dilation(self.lambda.recip()),
        ];
        compose(&self.sig, &word).expect("inverse parameters are valid")
    }

    /// The automorphism as a self-map of `P^N_q`, i.e. applied to the identity
    /// embedding of the instance `p = q`.
    pub fn as_classified_map(&self) -> Result<ClassifiedMap, AutError> {
        let user: Vec<i64> = self.sig.user_exps().iter().map(|&e| e as i64).collect();
        let inst = ProblemInstance::new(&user, &user)?;
        let big_n = inst.big_n();
        let mut w = GMatrix::zeros(big_n, big_n);
        let mut sigma = BTreeMap::new();
        for k in 0..big_n {
            let src = self.sig.user_index(k);
            w[(src, k)] = GRat::one();
            if k >= inst.s() {
                sigma.insert(k, src);
            }
        }
        let h = ClassifiedMap::monomial(&inst, &AdmissiblePattern::new(sigma), &w)?;
        Ok(h.apply_aut(self)?)
    }
}

/// Normal form of the word `w_0 o w_1 o ... o w_{m-1}`; the last element acts first.
pub fn compose(sig: &ExponentSignature, word: &[AutElement]) -> Result<CanonicalAut, AutError> {
    let mut acc = CanonicalAut::identity(sig);
    for e in word.iter().rev() {
        acc = CanonicalAut::from_element(sig, e)?.then_after(&acc)?;
    }
    Ok(acc)
}

/// Normal form of `t_0 o t_1 o ...` for elements already in normal form.
pub fn compose_canonical(sig: &ExponentSignature, ts: &[CanonicalAut]) -> Result<CanonicalAut, AutError> {
    let mut acc = CanonicalAut::identity(sig);
    for t in ts.iter().rev() {
        acc = t.then_after(&acc)?;
    }
    Ok(acc)
}

/// Connected components are indexed by the permutation part.
pub fn same_component(a: &CanonicalAut, b: &CanonicalAut) -> Result<bool, AutError> {
    if a.sig.exps() != b.sig.exps() {
        return Err(AutError::SignatureMismatch(a.sig.exps().to_vec(), b.sig.exps().to_vec()));
    }
    Ok(a.sigma == b.sigma)
}

/// All q-preserving permutations, one per connected component, in lexicographic order.
pub fn component_permutations(sig: &ExponentSignature) -> Vec<Vec<usize>> {
    let q = sig.exps();
    let s = sig.s();
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..s).collect();
    let mut used = vec![false; q.len()];
    fn rec(q: &[u32], cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let k = cur.len();
        if k == q.len() {
            out.push(cur.clone());
            return;
        }
        for t in 0..q.len() {
            if !used[t] && q[t] == q[k] {
                used[t] = true;
                cur.push(t);
                rec(q, cur, used, out);
                cur.pop();
                used[t] = false;
            }
        }
    }
    for u in used.iter_mut().take(s) {
        *u = true;
    }
    rec(q, &mut cur, &mut used, &mut out);
    out
}

pub fn component_count(sig: &ExponentSignature) -> usize {
    component_permutations(sig).len()
}

/// Finds `T` with `apply_aut(T, h1) == h2`, or `None` if no such element exists.
///
/// The K-columns of `W_2` must be unimodular multiples of K-columns of `W_1`
/// under a q-preserving permutation; the linear blocks must have equal row
/// Gram matrices, and `U~` is then built from successive exact reflections.
/// `lambda_T`, `b` and `r` are solved from `lambda`, `c` and `r` of the two
/// maps. Phases `mu_k` need exact `q_k`-th roots of the column ratios; when
/// the orbits agree structurally but a root leaves `Q(i)` the error
/// [`AutError::InexactPhase`] is returned. Every answer is checked by
/// applying it.
pub fn orbit_equivalent(h1: &ClassifiedMap, h2: &ClassifiedMap) -> Result<Option<CanonicalAut>, AutError> {
    if h1.instance() != h2.instance() {
        return Err(AutError::InstanceMismatch);
    }
    let inst = h1.instance();
    let (n, s, big_n) = (inst.n(), inst.s(), inst.big_n());
    let q = inst.q();
    let (w1, w2) = (h1.w(), h2.w());

    // K-columns: key by (q, row, |u|^2); zero columns key on q alone.
    let key = |w: &GMatrix, k: usize| -> (u32, Option<(usize, BigRational)>) {
        let row = (0..n).find(|&i| !w[(i, k)].is_zero());
        (q[k], row.map(|i| (i, w[(i, k)].norm_sqr())))
    };
    let mut groups: BTreeMap<_, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for k in s..big_n {
        groups.entry(key(w1, k)).or_default().0.push(k);
        groups.entry(key(w2, k)).or_default().1.push(k);
    }
    let mut sigma: Vec<usize> = (0..big_n).collect();
    let mut mu = vec![UnimodularGRat::one(); big_n - s];
    for ((qk, data), (src, dst)) in &groups {
        if src.len() != dst.len() {
            return Ok(None);
        }
        let Some((row, _)) = data else {
            for (&k, &t) in dst.iter().zip(src) {
                sigma[k] = t;
            }
            continue;
        };
        // Bipartite matching on "ratio has an exact q-th root".
        let root = |k: usize, t: usize| -> Option<UnimodularGRat> {
            let ratio = &w2[(*row, k)] / &w1[(*row, t)];
            UnimodularGRat::new(ratio).ok()?.exact_root(*qk)
        };
        let roots: Vec<Vec<Option<UnimodularGRat>>> =
            dst.iter().map(|&k| src.iter().map(|&t| root(k, t)).collect()).collect();
        let assign = match_columns(&roots);
        match assign {
            Some(a) => {
                for (di, si) in a.into_iter().enumerate() {
                    let (k, t) = (dst[di], src[si]);
                    sigma[k] = t;
                    mu[k - s] = roots[di][si].clone().expect("matched edge has a root");
                }
            }
            None => return Err(AutError::InexactPhase { slot: dst[0], q: *qk }),
        }
    }

    // Linear block: W2_s = W1_s U~.
    let b1 = w1.columns(0..s);
    let b2 = w2.columns(0..s);
    if b1.gram() != b2.gram() {
        return Ok(None);
    }
    let mut u = GMatrix::identity(s);
    for i in 0..n {
        let v = GMatrix::row_mul(b1.row(i), &u);
        let Some(r) = GMatrix::reflection_between(&v, b2.row(i)) else {
            return Ok(None);
        };
        u = u.mul(&r);
    }
    debug_assert_eq!(b1.mul(&u), b2);

    let lam1 = h1.lambda();
    let lambda_t = h2.lambda() / lam1;
    let lam1_g = GRat::real(lam1.clone());
    let c2u = GMatrix::row_mul(h2.c(), &u.adjoint());
    let beta: Vec<GRat> = c2u.iter().zip(h1.c()).map(|(x, y)| &(x - y) / &lam1_g).collect();
    let two = BigRational::from_integer(2.into());
    let rho = (h2.r() - h1.r() + two * lam1 * dot_conj(h1.c(), &beta).im) / (lam1 * lam1);
    let t = CanonicalAut::new(&inst.target, lambda_t, u, mu, beta, rho, sigma)?;
    if h1.apply_aut(&t)? == *h2 {
        Ok(Some(t))
    } else {
        Ok(None)
    }
}

/// Perfect matching of rows to columns along `Some` entries (Kuhn's algorithm).
fn match_columns<T>(edges: &[Vec<Option<T>>]) -> Option<Vec<usize>> {
    let m = edges.len();
    let mut owner: Vec<Option<usize>> = vec![None; m];
    fn augment<T>(d: usize, edges: &[Vec<Option<T>>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for c in 0..edges[d].len() {
            if edges[d][c].is_some() && !seen[c] {
                seen[c] = true;
                if owner[c].is_none_or(|o| augment(o, edges, seen, owner)) {
                    owner[c] = Some(d);
                    return true;
                }
            }
        }
        false
    }
    for d in 0..m {
        let mut seen = vec![false; m];
        if !augment(d, edges, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut out = vec![0; m];
    for (c, o) in owner.iter().enumerate() {
        out[o.expect("perfect matching")] = c;
    }
    Some(out)
}
