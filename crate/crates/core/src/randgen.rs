//! Random exact data: rational sphere points, unitary matrices, coefficient
//! matrices satisfying (a) and (b), maps and automorphisms.
//!
//! Everything stays in `Q(i)`. Unit vectors come from inverse stereographic
//! projection of rational points, unimodular numbers from Pythagorean
//! squares `(a + bi)^2 / (a^2 + b^2)`, and unitary matrices from products of
//! Householder reflections with a diagonal of phases.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::autgroup::AutElement;
use crate::exactpoly::{GMatrix, GRat, UnimodularGRat};
use crate::existence::AdmissiblePattern;
use crate::maps::ClassifiedMap;
use crate::model::{ExponentSignature, ProblemInstance};

pub fn small_rational<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> BigRational {
    BigRational::new(rng.gen_range(-max_num..=max_num).into(), rng.gen_range(1..=max_den).into())
}

pub fn positive_rational<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> BigRational {
    BigRational::new(rng.gen_range(1..=max_num).into(), rng.gen_range(1..=max_den).into())
}

pub fn gaussian<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> GRat {
    GRat::new(small_rational(rng, max_num, max_den), small_rational(rng, max_num, max_den))
}

pub fn unimodular<R: Rng>(rng: &mut R) -> UnimodularGRat {
    loop {
        let (a, b) = (rng.gen_range(-4..=4), rng.gen_range(-4..=4));
        if a != 0 || b != 0 {
            return UnimodularGRat::from_pythagorean(a, b);
        }
    }
}

/// Rational unit vector of length `dim` with every coordinate nonzero.
pub fn sphere_point<R: Rng>(rng: &mut R, dim: usize) -> Vec<BigRational> {
    assert!(dim > 0);
    if dim == 1 {
        let one = BigRational::one();
        return vec![if rng.gen_bool(0.5) { one } else { -one }];
    }
    loop {
        let t: Vec<BigRational> = (0..dim - 1)
            .map(|_| {
                let num = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
                BigRational::new(num.into(), rng.gen_range(1..=3).into())
            })
            .collect();
        let sq: BigRational = t.iter().map(|x| x * x).fold(BigRational::zero(), |a, b| a + b);
        if sq.is_one() {
            continue;
        }
        let den = &sq + BigRational::one();
        let two = BigRational::from_integer(2.into());
        let mut x: Vec<BigRational> = t.iter().map(|ti| &two * ti / &den).collect();
        x.push((&sq - BigRational::one()) / &den);
        return x;
    }
}

/// Random exactly unitary `s x s` matrix.
pub fn unitary<R: Rng>(rng: &mut R, s: usize) -> GMatrix {
    let mut u = GMatrix::identity(s);
    if s == 0 {
        return u;
    }
    for _ in 0..rng.gen_range(1..=2) {
        let x: Vec<GRat> = loop {
            let x: Vec<GRat> = (0..s).map(|_| gaussian(rng, 3, 2)).collect();
            if x.iter().any(|v| !v.is_zero()) {
                break x;
            }
        };
        u = u.mul(&GMatrix::householder(&x));
    }
    let mut d = GMatrix::zeros(s, s);
    for i in 0..s {
        d[(i, i)] = unimodular(rng).into_inner();
    }
    u.mul(&d)
}

/// Random coefficient matrix for `pattern` satisfying conditions (a) and (b).
///
/// Each covered source row splits its unit norm between its K-entries and,
/// while linear slots remain, a share `d_i` of the linear block; the linear
/// block is `diag(d) E U~` with distinct standard rows `E` and a random
/// unitary `U~`. With `root_phases` the phase of each K-entry is a `q_k`-th
/// power in `Q(i)`, so the automorphism that removes it is exact.
pub fn coeff_matrix<R: Rng>(
    rng: &mut R,
    inst: &ProblemInstance,
    pattern: &AdmissiblePattern,
    root_phases: bool,
) -> GMatrix {
    let (n, s, big_n) = (inst.n(), inst.s(), inst.big_n());
    let q = inst.q();
    let mut w = GMatrix::zeros(n, big_n);
    let mut preimages: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (&k, &i) in &pattern.sigma {
        preimages.entry(i).or_default().push(k);
    }
    let uncovered = pattern.uncovered(n);
    let mut capacity = s.saturating_sub(uncovered.len());
    let mut linear_share: Vec<(usize, BigRational)> = uncovered.iter().map(|&i| (i, BigRational::one())).collect();
    for (&i, ks) in &preimages {
        let split = capacity > 0 && rng.gen_bool(0.5);
        let x = sphere_point(rng, ks.len() + usize::from(split));
        for (t, &k) in ks.iter().enumerate() {
            // With root phases the sign of x is dropped: -1 need not be a q-th power.
            let (phase, amp) =
                if root_phases { (unimodular(rng).pow(q[k]), x[t].abs()) } else { (unimodular(rng), x[t].clone()) };
            w[(i, k)] = phase.value().scale(&amp);
        }
        if split {
            capacity -= 1;
            linear_share.push((i, x[ks.len()].abs()));
        }
    }
    let u = unitary(rng, s);
    let mut slots: Vec<usize> = (0..s).collect();
    slots.shuffle(rng);
    for ((i, d), slot) in linear_share.into_iter().zip(slots) {
        for j in 0..s {
            w[(i, j)] = u[(slot, j)].scale(&d);
        }
    }
    w
}

/// Random member of the full family for `pattern`; see [`coeff_matrix`] for `root_phases`.
pub fn general_map<R: Rng>(
    rng: &mut R,
    inst: &ProblemInstance,
    pattern: &AdmissiblePattern,
    root_phases: bool,
) -> ClassifiedMap {
    let w = coeff_matrix(rng, inst, pattern, root_phases);
    let lambda = positive_rational(rng, 5, 4);
    let r = small_rational(rng, 4, 3);
    let c = (0..inst.s()).map(|_| gaussian(rng, 2, 3)).collect();
    ClassifiedMap::general(inst, pattern, &w, lambda, r, c).expect("random parameters satisfy (a), (b)")
}

/// Random q-preserving permutation (identity on the linear block).
pub fn q_permutation<R: Rng>(rng: &mut R, sig: &ExponentSignature) -> Vec<usize> {
    let q = sig.exps();
    let mut perm: Vec<usize> = (0..q.len()).collect();
    let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (k, &qk) in q.iter().enumerate().skip(sig.s()) {
        groups.entry(qk).or_default().push(k);
    }
    for slots in groups.values() {
        let mut targets = slots.clone();
        targets.shuffle(rng);
        for (&k, t) in slots.iter().zip(targets) {
            perm[k] = t;
        }
    }
    perm
}

pub fn aut_element<R: Rng>(rng: &mut R, sig: &ExponentSignature) -> AutElement {
    let s = sig.s();
    match rng.gen_range(0..4) {
        0 => AutElement::Perm(q_permutation(rng, sig)),
        1 => AutElement::Dilation(positive_rational(rng, 5, 4)),
        2 => AutElement::Mobius { b: (0..s).map(|_| gaussian(rng, 2, 3)).collect(), r: small_rational(rng, 4, 3) },
        _ => AutElement::LinearPhase { u: unitary(rng, s), mu: (s..sig.len()).map(|_| unimodular(rng)).collect() },
    }
}

pub fn aut_word<R: Rng>(rng: &mut R, sig: &ExponentSignature, len: usize) -> Vec<AutElement> {
    (0..len).map(|_| aut_element(rng, sig)).collect()
}
