//! JSON representations in the user's coordinate order.
//!
//! Target indices in JSON are 1-based positions of the `q` list exactly as the
//! user supplied it; source indices are 1-based positions of `p`. Rationals are
//! `"num/den"` strings and Gaussian rationals `{"re": .., "im": ..}`.
//! Polynomials use the canonical text form of [`HermPoly`].

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::autgroup::{AutElement, AutError, CanonicalAut};
use crate::exactpoly::{rational_string, GMatrix, GRat, HermPoly, PolyError, UnimodularGRat};
use crate::existence::{AdmissiblePattern, Decision, ExistenceError, InfeasibilityCertificate};
use crate::maps::{ClassifiedMap, MapError};
use crate::model::{ExponentSignature, ModelError, ProblemInstance};
use crate::verify::{CandidateMap, VerifyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WireError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Existence(#[from] ExistenceError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Aut(#[from] AutError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("{0}")]
    Invalid(String),
}

/// Serde adapter for maps keyed by 1-based indices, written as JSON object keys.
mod index_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<T: Serialize, S: Serializer>(m: &BTreeMap<usize, T>, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(m.len()))?;
        for (k, v) in m {
            map.serialize_entry(&k.to_string(), v)?;
        }
        map.end()
    }

    pub fn deserialize<'de, T: Deserialize<'de>, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, T>, D::Error> {
        let raw = BTreeMap::<String, T>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                k.trim()
                    .parse::<usize>()
                    .map(|k| (k, v))
                    .map_err(|_| serde::de::Error::custom(format!("index key `{k}` is not a positive integer")))
            })
            .collect()
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, WireError> {
    Err(WireError::Invalid(msg.into()))
}

fn one() -> BigRational {
    BigRational::one()
}

fn to_i64(v: &[u32]) -> Vec<i64> {
    v.iter().map(|&e| e as i64).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceJson {
    pub p: Vec<i64>,
    pub q: Vec<i64>,
}

impl InstanceJson {
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        InstanceJson { p: to_i64(inst.p()), q: to_i64(&inst.target.user_exps()) }
    }

    pub fn to_instance(&self) -> Result<ProblemInstance, WireError> {
        Ok(ProblemInstance::new(&self.p, &self.q)?)
    }
}

/// `{"K": [...], "sigma": {"k": i}}` with 1-based user indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternJson {
    #[serde(rename = "K", default)]
    pub k: Vec<usize>,
    #[serde(default, with = "index_map")]
    pub sigma: BTreeMap<usize, usize>,
}

impl PatternJson {
    pub fn from_pattern(inst: &ProblemInstance, pat: &AdmissiblePattern) -> Self {
        let sigma: BTreeMap<usize, usize> =
            pat.sigma.iter().map(|(&k, &i)| (inst.target.user_index(k) + 1, i + 1)).collect();
        PatternJson { k: sigma.keys().copied().collect(), sigma }
    }

    pub fn to_pattern(&self, inst: &ProblemInstance) -> Result<AdmissiblePattern, WireError> {
        let keys: Vec<usize> = self.sigma.keys().copied().collect();
        let mut k_sorted = self.k.clone();
        k_sorted.sort_unstable();
        if !self.k.is_empty() && k_sorted != keys {
            return invalid("pattern K must equal the key set of sigma");
        }
        let mut sigma = BTreeMap::new();
        for (&uk, &ui) in &self.sigma {
            let k = uk
                .checked_sub(1)
                .and_then(|u| inst.target.normalized_index(u))
                .ok_or_else(|| WireError::Invalid(format!("target index {uk} out of range")))?;
            if ui == 0 || ui > inst.n() {
                return invalid(format!("source index {ui} out of range"));
            }
            sigma.insert(k, ui - 1);
        }
        let pat = AdmissiblePattern::new(sigma);
        pat.validate(inst)?;
        Ok(pat)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    /// Source indices `S` (1-based).
    pub hall_set: Vec<usize>,
    /// Target indices dividing into `S` (1-based, user order).
    pub neighborhood: Vec<usize>,
    pub s: usize,
    /// `|S| - |N(S)|` must exceed `s`.
    pub deficiency: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionJson {
    pub exists: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<PatternJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<CertificateJson>,
}

impl DecisionJson {
    pub fn from_decision(inst: &ProblemInstance, d: &Decision) -> Self {
        match d {
            Decision::Exists(p) => {
                DecisionJson { exists: true, witness: Some(PatternJson::from_pattern(inst, p)), certificate: None }
            }
            Decision::Infeasible(c) => DecisionJson {
                exists: false,
                witness: None,
                certificate: Some(CertificateJson::from_certificate(inst, c)),
            },
        }
    }
}

impl CertificateJson {
    pub fn from_certificate(inst: &ProblemInstance, c: &InfeasibilityCertificate) -> Self {
        let mut neighborhood: Vec<usize> = c.neighborhood.iter().map(|&k| inst.target.user_index(k) + 1).collect();
        neighborhood.sort_unstable();
        CertificateJson {
            hall_set: c.hall_set.iter().map(|i| i + 1).collect(),
            neighborhood,
            s: c.s,
            deficiency: c.hall_set.len() - c.neighborhood.len(),
        }
    }
}

/// A map document: either a classified map given by its parameters or an
/// external candidate given by q-power polynomials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum MapJson {
    Classified(ClassifiedJson),
    Candidate(CandidateJson),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifiedJson {
    pub p: Vec<i64>,
    pub q: Vec<i64>,
    #[serde(default)]
    pub pattern: PatternJson,
    /// `n x N`, columns in user order.
    #[serde(rename = "W")]
    pub w: GMatrix,
    #[serde(with = "rational_string", default = "one")]
    pub lambda: BigRational,
    #[serde(with = "rational_string", default)]
    pub r: BigRational,
    /// Length `N` in user order, zero at slots with `q_j >= 2`; empty means zero.
    #[serde(default)]
    pub c: Vec<GRat>,
    /// Derived q-power numerators (user order); checked against the parameters when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numerators: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub denominator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_numerator: Option<String>,
    /// Components with formal roots (output only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radical: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateJson {
    pub p: Vec<i64>,
    pub q: Vec<i64>,
    /// `H_j^{q_j} * delta`, user order.
    pub numerators: Vec<String>,
    #[serde(default = "one_text")]
    pub denominator: String,
    pub g_numerator: String,
}

fn one_text() -> String {
    "1".into()
}

/// A parsed map document.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum ParsedMap {
    Classified(ClassifiedMap),
    Candidate(CandidateMap),
}

impl ParsedMap {
    pub fn candidate(&self) -> CandidateMap {
        match self {
            ParsedMap::Classified(h) => CandidateMap::from(h),
            ParsedMap::Candidate(c) => c.clone(),
        }
    }
}

impl MapJson {
    pub fn from_map(h: &ClassifiedMap, with_radical: bool) -> Self {
        let inst = h.instance();
        let sig = &inst.target;
        let rows: Vec<Vec<GRat>> = h.w().to_rows().iter().map(|r| sig.denormalize(r)).collect();
        let mut c = h.c().to_vec();
        c.resize(inst.big_n(), GRat::zero());
        let nums: Vec<String> = h.numerators().iter().map(|p| p.to_string()).collect();
        let radical = with_radical.then(|| {
            let comps = h.radical_components();
            let mut user = sig.denormalize(&comps[..inst.big_n()]);
            user.push(comps[inst.big_n()].clone());
            user
        });
        MapJson::Classified(ClassifiedJson {
            p: to_i64(inst.p()),
            q: to_i64(&sig.user_exps()),
            pattern: PatternJson::from_pattern(inst, h.pattern()),
            w: GMatrix::from_rows(rows).expect("rectangular"),
            lambda: h.lambda().clone(),
            r: h.r().clone(),
            c: sig.denormalize(&c),
            numerators: Some(sig.denormalize(&nums)),
            denominator: Some(h.denominator().to_string()),
            g_numerator: Some(h.g_numerator().to_string()),
            radical,
        })
    }

    pub fn from_candidate(c: &CandidateMap) -> Self {
        let sig = &c.inst.target;
        let nums: Vec<String> = c.numerators.iter().map(|p| p.to_string()).collect();
        MapJson::Candidate(CandidateJson {
            p: to_i64(c.inst.p()),
            q: to_i64(&sig.user_exps()),
            numerators: sig.denormalize(&nums),
            denominator: c.denom.to_string(),
            g_numerator: c.g_numerator.to_string(),
        })
    }

    pub fn parse(&self) -> Result<ParsedMap, WireError> {
        match self {
            MapJson::Classified(j) => j.to_map().map(ParsedMap::Classified),
            MapJson::Candidate(j) => j.to_candidate().map(ParsedMap::Candidate),
        }
    }
}

impl ClassifiedJson {
    pub fn to_map(&self) -> Result<ClassifiedMap, WireError> {
        let inst = ProblemInstance::new(&self.p, &self.q)?;
        let sig = &inst.target;
        let (n, big_n) = (inst.n(), inst.big_n());
        if self.w.rows() != n || self.w.cols() != big_n {
            return Err(
                MapError::Shape { rows: n, cols: big_n, got_rows: self.w.rows(), got_cols: self.w.cols() }.into()
            );
        }
        let rows: Vec<Vec<GRat>> = self.w.to_rows().iter().map(|r| sig.renormalize(r)).collect();
        let w = GMatrix::from_rows(rows).expect("rectangular");
        let c_user = if self.c.is_empty() { vec![GRat::zero(); big_n] } else { self.c.clone() };
        if c_user.len() != big_n {
            return invalid(format!("c must have length N={big_n}"));
        }
        let c_norm = sig.renormalize(&c_user);
        if c_norm[inst.s()..].iter().any(|x| !x.is_zero()) {
            return Err(MapError::CWithoutLinearSlots.into());
        }
        let pattern = if self.pattern.sigma.is_empty() && self.pattern.k.is_empty() {
            crate::maps::pattern_from_matrix(&inst, &w)?
        } else {
            self.pattern.to_pattern(&inst)?
        };
        let h = ClassifiedMap::general(
            &inst,
            &pattern,
            &w,
            self.lambda.clone(),
            self.r.clone(),
            c_norm[..inst.s()].to_vec(),
        )?;
        if let Some(nums) = &self.numerators {
            if nums.len() != big_n {
                return invalid("numerators must have length N");
            }
            let parsed = nums.iter().map(|t| HermPoly::parse(n, t)).collect::<Result<Vec<_>, _>>()?;
            if sig.renormalize(&parsed) != h.numerators() {
                return invalid("numerators do not match the map parameters");
            }
        }
        if let Some(d) = &self.denominator {
            if &HermPoly::parse(n, d)? != h.denominator() {
                return invalid("denominator does not match the map parameters");
            }
        }
        if let Some(g) = &self.g_numerator {
            if &HermPoly::parse(n, g)? != h.g_numerator() {
                return invalid("g_numerator does not match the map parameters");
            }
        }
        Ok(h)
    }
}

impl CandidateJson {
    pub fn to_candidate(&self) -> Result<CandidateMap, WireError> {
        let inst = ProblemInstance::new(&self.p, &self.q)?;
        let n = inst.n();
        if self.numerators.len() != inst.big_n() {
            return Err(VerifyError::ComponentCount { expected: inst.big_n(), got: self.numerators.len() }.into());
        }
        let nums = self.numerators.iter().map(|t| HermPoly::parse(n, t)).collect::<Result<Vec<_>, _>>()?;
        let nums = inst.target.renormalize(&nums);
        let denom = HermPoly::parse(n, &self.denominator)?;
        let g = HermPoly::parse(n, &self.g_numerator)?;
        Ok(CandidateMap::new(inst, nums, denom, g)?)
    }
}

/// Normal-form automorphism. `u_tilde` and `b` are indexed by the slots with
/// `q_j = 1` in ascending user order; `mu` and `sigma` are keyed by 1-based
/// user target indices. Omitted fields take their identity values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutJson {
    pub q: Vec<i64>,
    #[serde(with = "rational_string", default = "one")]
    pub lambda: BigRational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_tilde: Option<GMatrix>,
    #[serde(default, with = "index_map")]
    pub mu: BTreeMap<usize, UnimodularGRat>,
    #[serde(default)]
    pub b: Vec<GRat>,
    #[serde(with = "rational_string", default)]
    pub r: BigRational,
    #[serde(default, with = "index_map")]
    pub sigma: BTreeMap<usize, usize>,
}

fn user_to_norm(sig: &ExponentSignature, u: usize) -> Result<usize, WireError> {
    u.checked_sub(1)
        .and_then(|x| sig.normalized_index(x))
        .ok_or_else(|| WireError::Invalid(format!("target index {u} out of range")))
}

fn perm_from_user(sig: &ExponentSignature, m: &BTreeMap<usize, usize>) -> Result<Vec<usize>, WireError> {
    let mut perm: Vec<usize> = (0..sig.len()).collect();
    for (&k, &t) in m {
        perm[user_to_norm(sig, k)?] = user_to_norm(sig, t)?;
    }
    Ok(perm)
}

fn phases_from_user(
    sig: &ExponentSignature,
    m: &BTreeMap<usize, UnimodularGRat>,
) -> Result<Vec<UnimodularGRat>, WireError> {
    let s = sig.s();
    let mut mu = vec![UnimodularGRat::one(); sig.len() - s];
    for (&k, v) in m {
        let kn = user_to_norm(sig, k)?;
        if kn < s {
            return invalid(format!("phase given for slot {k} with q = 1; use u_tilde"));
        }
        mu[kn - s] = v.clone();
    }
    Ok(mu)
}

fn vector_or_zero(v: &[GRat], s: usize, name: &str) -> Result<Vec<GRat>, WireError> {
    match v.len() {
        0 => Ok(vec![GRat::zero(); s]),
        l if l == s => Ok(v.to_vec()),
        l => invalid(format!("{name} must have length s={s}, got {l}")),
    }
}

impl AutJson {
    pub fn from_aut(t: &CanonicalAut) -> Self {
        let sig = t.signature();
        let s = sig.s();
        let mu = t.mu().iter().enumerate().map(|(j, v)| (sig.user_index(s + j) + 1, v.clone())).collect();
        let sigma = t
            .sigma()
            .iter()
            .enumerate()
            .skip(s)
            .map(|(k, &v)| (sig.user_index(k) + 1, sig.user_index(v) + 1))
            .collect();
        AutJson {
            q: to_i64(&sig.user_exps()),
            lambda: t.lambda().clone(),
            u_tilde: Some(t.u_tilde().clone()),
            mu,
            b: t.b().to_vec(),
            r: t.r().clone(),
            sigma,
        }
    }

    pub fn to_aut(&self) -> Result<CanonicalAut, WireError> {
        let sig = ExponentSignature::normalize(&self.q)?;
        let s = sig.s();
        Ok(CanonicalAut::new(
            &sig,
            self.lambda.clone(),
            self.u_tilde.clone().unwrap_or_else(|| GMatrix::identity(s)),
            phases_from_user(&sig, &self.mu)?,
            vector_or_zero(&self.b, s, "b")?,
            self.r.clone(),
            perm_from_user(&sig, &self.sigma)?,
        )?)
    }
}

/// One generator; indices as in [`AutJson`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementJson {
    Perm {
        #[serde(with = "index_map")]
        sigma: BTreeMap<usize, usize>,
    },
    Dilation {
        #[serde(with = "rational_string")]
        lambda: BigRational,
    },
    Mobius {
        #[serde(default)]
        b: Vec<GRat>,
        #[serde(with = "rational_string", default)]
        r: BigRational,
    },
    LinearPhase {
        #[serde(default)]
        u: Option<GMatrix>,
        #[serde(default, with = "index_map")]
        mu: BTreeMap<usize, UnimodularGRat>,
    },
}

impl ElementJson {
    pub fn to_element(&self, sig: &ExponentSignature) -> Result<AutElement, WireError> {
        let s = sig.s();
        Ok(match self {
            ElementJson::Perm { sigma } => AutElement::Perm(perm_from_user(sig, sigma)?),
            ElementJson::Dilation { lambda } => AutElement::Dilation(lambda.clone()),
            ElementJson::Mobius { b, r } => AutElement::Mobius { b: vector_or_zero(b, s, "b")?, r: r.clone() },
            ElementJson::LinearPhase { u, mu } => AutElement::LinearPhase {
                u: u.clone().unwrap_or_else(|| GMatrix::identity(s)),
                mu: phases_from_user(sig, mu)?,
            },
        })
    }

    pub fn from_element(sig: &ExponentSignature, e: &AutElement) -> Self {
        let s = sig.s();
        match e {
            AutElement::Perm(p) => ElementJson::Perm {
                sigma: p
                    .iter()
                    .enumerate()
                    .skip(s)
                    .map(|(k, &v)| (sig.user_index(k) + 1, sig.user_index(v) + 1))
                    .collect(),
            },
            AutElement::Dilation(l) => ElementJson::Dilation { lambda: l.clone() },
            AutElement::Mobius { b, r } => ElementJson::Mobius { b: b.clone(), r: r.clone() },
            AutElement::LinearPhase { u, mu } => ElementJson::LinearPhase {
                u: Some(u.clone()),
                mu: mu.iter().enumerate().map(|(j, v)| (sig.user_index(s + j) + 1, v.clone())).collect(),
            },
        }
    }
}
