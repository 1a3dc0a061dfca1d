//! Essential type of `P^n_p`, multiplicity of classified maps, and the bound
//! `mult <= esstype`.
//!
//! Codimensions of monomial ideals are counted on the staircase. The
//! multiplicity of a map is computed by exact linear algebra in the truncated
//! local ring `O / (I + m^{D+1})`; once every monomial of degree `D` lies in
//! `I + m^{D+1}`, Nakayama's lemma gives `m^D ⊆ I` and the truncated count is
//! the true codimension.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactpoly::{GRat, HermPoly, Var};
use crate::maps::ClassifiedMap;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdealError {
    #[error("multiplicity is not certified up to truncation degree {0}")]
    Uncertified(usize),
}

/// Monomial ideal in `n` variables, generators pairwise non-redundant and sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialIdeal {
    n: usize,
    gens: Vec<Vec<u32>>,
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

impl MonomialIdeal {
    pub fn new(n: usize, gens: Vec<Vec<u32>>) -> Self {
        assert!(gens.iter().all(|g| g.len() == n), "generator arity mismatch");
        let mut gens = gens;
        gens.sort();
        gens.dedup();
        let keep: Vec<Vec<u32>> =
            gens.iter().filter(|g| !gens.iter().any(|h| h != *g && divides(h, g))).cloned().collect();
        MonomialIdeal { n, gens: keep }
    }

    /// `(z_1^{p_1}, ..., z_n^{p_n})`.
    pub fn pure_powers(p: &[u32]) -> Self {
        let n = p.len();
        let gens = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = p[i];
                e
            })
            .collect();
        Self::new(n, gens)
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn gens(&self) -> &[Vec<u32>] {
        &self.gens
    }

    pub fn contains(&self, m: &[u32]) -> bool {
        self.gens.iter().any(|g| divides(g, m))
    }

    /// Smallest pure power of variable `i` among the generators.
    fn pure_power(&self, i: usize) -> Option<u32> {
        self.gens.iter().filter(|g| g.iter().enumerate().all(|(j, &e)| j == i || e == 0)).map(|g| g[i]).min()
    }
}

/// Codimension of an ideal: a count of standard monomials, or infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum Codim {
    Finite(u64),
    #[serde(serialize_with = "infinite_str")]
    Infinite,
}

fn infinite_str<S: serde::Serializer>(s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str("infinite")
}

/// Number of monomials outside the staircase of `ideal`.
pub fn monomial_codim(ideal: &MonomialIdeal) -> Codim {
    if (0..ideal.n).any(|i| ideal.pure_power(i).is_none()) {
        return Codim::Infinite;
    }
    let mut memo = HashMap::new();
    Codim::Finite(count_staircase(ideal.n, &ideal.gens, &mut memo))
}

/// Slices on the exponent of the first variable: the standard monomials with
/// `z_1^e` are the standard monomials, in the remaining variables, of the
/// ideal generated by the generators with first exponent `<= e`.
fn count_staircase(n: usize, gens: &[Vec<u32>], memo: &mut HashMap<Vec<Vec<u32>>, u64>) -> u64 {
    if gens.iter().any(|g| g.iter().all(|&e| e == 0)) {
        return 0;
    }
    if n == 0 {
        return 1;
    }
    if let Some(&v) = memo.get(gens) {
        return v;
    }
    let a = gens
        .iter()
        .filter(|g| g[1..].iter().all(|&e| e == 0))
        .map(|g| g[0])
        .min()
        .expect("finite codimension has a pure power of every variable");
    let mut total = 0;
    for e in 0..a {
        let sub: Vec<Vec<u32>> = gens.iter().filter(|g| g[0] <= e).map(|g| g[1..].to_vec()).collect();
        let sub = MonomialIdeal::new(n - 1, sub).gens;
        total += count_staircase(n - 1, &sub, memo);
    }
    memo.insert(gens.to_vec(), total);
    total
}

/// Codimension of `(z_1^{p_1}, ..., z_n^{p_n})`.
pub fn essential_type(p: &[u32]) -> u64 {
    match monomial_codim(&MonomialIdeal::pure_powers(p)) {
        Codim::Finite(v) => v,
        Codim::Infinite => unreachable!("pure powers of every variable"),
    }
}

/// Outcome of [`multiplicity`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityResult {
    /// `dim O/(I + m^{D+1})`; equals `dim O/I` when certified, otherwise a lower bound.
    pub value: u64,
    pub certified: bool,
    pub truncation_degree: usize,
}

/// Sparse polynomial in `n` variables.
pub type SparsePoly = BTreeMap<Vec<u32>, GRat>;

/// Generators of `I(h)`, `h(z) = H(z, 0)`, with unit factors dropped: the linear
/// slots contribute `sum_i u_ij z_i^{p_i}`, each `k` in `K` contributes
/// `z_{sigma(k)}^{p_{sigma(k)}/q_k}`.
pub fn map_generators(h: &ClassifiedMap) -> Vec<SparsePoly> {
    let inst = h.instance();
    let n = inst.n();
    let (p, q) = (inst.p(), inst.q());
    let mut gens = Vec::new();
    for (j, num) in h.numerators().iter().enumerate() {
        if j < inst.s() {
            let at_zero = num.filter_terms(|e| e[2 * n] == 0);
            if !at_zero.is_zero() {
                gens.push(z_part(&at_zero, n));
            }
        } else if let Some(i) = h.pattern().get(j) {
            let mut e = vec![0; n];
            e[i] = p[i] / q[j];
            gens.push(SparsePoly::from([(e, GRat::one())]));
        }
    }
    gens
}

fn z_part(p: &HermPoly, n: usize) -> SparsePoly {
    debug_assert!(!p.depends_on(Var::W));
    p.terms().map(|(e, c)| (e[..n].to_vec(), c.clone())).collect()
}

fn monomials_up_to(n: usize, d: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[i] = e as u32;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, d, &mut cur, &mut out);
    out
}

fn degree(e: &[u32]) -> usize {
    e.iter().map(|&x| x as usize).sum()
}

/// Row echelon basis keyed by leading (largest) monomial, leading coefficient 1.
#[derive(Default)]
struct Echelon {
    pivots: HashMap<Vec<u32>, SparsePoly>,
}

impl Echelon {
    fn reduce(&self, mut row: SparsePoly) -> SparsePoly {
        while let Some((lead, c)) = row.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            let Some(piv) = self.pivots.get(&lead) else { break };
            for (e, pc) in piv {
                let v = row.entry(e.clone()).or_insert_with(GRat::zero);
                *v -= &(&c * pc);
                if v.is_zero() {
                    row.remove(e);
                }
            }
        }
        row
    }

    fn in_span(&self, row: SparsePoly) -> bool {
        self.reduce(row).is_empty()
    }

    fn insert(&mut self, row: SparsePoly) {
        let row = self.reduce(row);
        if let Some((lead, c)) = row.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            let inv = c.inv().expect("nonzero leading coefficient");
            let row = row.into_iter().map(|(e, v)| (e, &v * &inv)).collect();
            self.pivots.insert(lead, row);
        }
    }
}

/// `(dim O/(I + m^{D+1}), m^D ⊆ I + m^{D+1})` for the ideal generated by `gens`.
pub fn truncated_quotient(n: usize, gens: &[SparsePoly], d: usize) -> (u64, bool) {
    let monos = monomials_up_to(n, d);
    let mut ech = Echelon::default();
    for g in gens {
        let ord = g.keys().map(|e| degree(e)).min().unwrap_or(usize::MAX);
        if ord > d {
            continue;
        }
        for m in monos.iter().filter(|m| degree(m) + ord <= d) {
            let row: SparsePoly = g
                .iter()
                .filter_map(|(e, c)| {
                    let prod: Vec<u32> = e.iter().zip(m).map(|(a, b)| a + b).collect();
                    (degree(&prod) <= d).then(|| (prod, c.clone()))
                })
                .collect();
            ech.insert(row);
        }
    }
    let dim = monos.len() as u64 - ech.pivots.len() as u64;
    let certified =
        monos.iter().filter(|m| degree(m) == d).all(|m| ech.in_span(SparsePoly::from([(m.clone(), GRat::one())])));
    (dim, certified)
}

/// Codimension of the ideal generated by `gens`, with truncation-degree doubling
/// from `max degree + 1` up to `cap`.
pub fn multiplicity_of(n: usize, gens: &[SparsePoly], cap: usize) -> MultiplicityResult {
    let max_deg = gens.iter().flat_map(|g| g.keys()).map(|e| degree(e)).max().unwrap_or(0);
    let mut d = (max_deg + 1).min(cap.max(1));
    loop {
        let (value, certified) = truncated_quotient(n, gens, d);
        if certified || d >= cap {
            return MultiplicityResult { value, certified, truncation_degree: d };
        }
        d = (2 * d).min(cap);
    }
}

/// `dim O/I(h)` for `h = H(., 0)`.
pub fn multiplicity(h: &ClassifiedMap) -> MultiplicityResult {
    let gens = map_generators(h);
    let max_deg = gens.iter().flat_map(|g| g.keys()).map(|e| degree(e)).max().unwrap_or(0);
    let cap = essential_type(h.instance().p()) as usize + max_deg;
    multiplicity_of(h.instance().n(), &gens, cap)
}

/// `mult H <= esstype P^n_p`; inconclusive when the multiplicity is uncertified.
pub fn check_mult_bound(h: &ClassifiedMap) -> Result<bool, IdealError> {
    let m = multiplicity(h);
    if !m.certified {
        return Err(IdealError::Uncertified(m.truncation_degree));
    }
    Ok(m.value <= essential_type(h.instance().p()))
}
