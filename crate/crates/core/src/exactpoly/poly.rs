use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::{GRat, PolyError};

/// One of the named variables of a [`HermPoly`].
///
/// Indices are zero-based inside the library; the text form is one-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    Z(usize),
    Chi(usize),
    W,
    Tau,
}

/// Exponent vector laid out as `[z_1..z_n, chi_1..chi_n, w, tau]`.
pub type Exponents = Vec<u32>;

/// Sparse polynomial over `Q(i)` in the variables `(z, chi, w, tau)`, where
/// `chi` and `tau` are the polarized stand-ins for `conj(z)` and `conj(w)`.
///
/// The term map never stores a zero coefficient, so structural equality is
/// polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HermPoly {
    n: usize,
    terms: BTreeMap<Exponents, GRat>,
}

impl HermPoly {
    pub fn zero(n: usize) -> Self {
        HermPoly { n, terms: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, GRat::one())
    }

    pub fn constant(n: usize, c: GRat) -> Self {
        Self::monomial(n, vec![0; 2 * n + 2], c)
    }

    pub fn monomial(n: usize, exps: Exponents, c: GRat) -> Self {
        assert_eq!(exps.len(), 2 * n + 2, "exponent vector length");
        let mut p = Self::zero(n);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn var(n: usize, v: Var) -> Self {
        Self::var_pow(n, v, 1)
    }

    pub fn var_pow(n: usize, v: Var, e: u32) -> Self {
        let mut exps = vec![0; 2 * n + 2];
        exps[Self::slot(n, v)] = e;
        Self::monomial(n, exps, GRat::one())
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, GRat)>,
    {
        let mut p = Self::zero(n);
        for (e, c) in terms {
            assert_eq!(e.len(), 2 * n + 2, "exponent vector length");
            p.add_term(e, &c);
        }
        p
    }

    pub(crate) fn slot(n: usize, v: Var) -> usize {
        match v {
            Var::Z(i) => {
                assert!(i < n, "z index out of range");
                i
            }
            Var::Chi(i) => {
                assert!(i < n, "chi index out of range");
                n + i
            }
            Var::W => 2 * n,
            Var::Tau => 2 * n + 1,
        }
    }

    /// Size of the z-block (and of the chi-block).
    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &GRat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> GRat {
        self.terms.get(exps).cloned().unwrap_or_else(GRat::zero)
    }

    pub fn constant_term(&self) -> GRat {
        self.coeff(&vec![0; 2 * self.n + 2])
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        let s = Self::slot(self.n, v);
        self.terms.keys().map(|e| e[s]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.degree_in(v) > 0
    }

    fn add_term(&mut self, exps: Exponents, c: &GRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c.clone());
            }
        }
    }

    fn check_arity(&self, o: &Self) -> Result<(), PolyError> {
        if self.n != o.n {
            return Err(PolyError::ArityMismatch(self.n, o.n));
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, PolyError> {
        self.check_arity(o)?;
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self, PolyError> {
        self.check_arity(o)?;
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), &-c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, PolyError> {
        self.check_arity(o)?;
        let mut out = Self::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GRat) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        HermPoly { n: self.n, terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect() }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Replaces every power of `v` by the matching power of `s`.
    /// `s` must not itself depend on `v`.
    pub fn substitute(&self, v: Var, s: &Self) -> Result<Self, PolyError> {
        self.check_arity(s)?;
        if s.depends_on(v) {
            return Err(PolyError::SelfSubstitution(format!("{v:?}")));
        }
        let slot = Self::slot(self.n, v);
        // group terms by the power of v, then Horner-free accumulate with cached powers
        let mut by_power: BTreeMap<u32, Self> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            let k = std::mem::take(&mut rest[slot]);
            by_power.entry(k).or_insert_with(|| Self::zero(self.n)).add_term(rest, c);
        }
        let mut out = Self::zero(self.n);
        let mut power = Self::one(self.n);
        let mut at = 0u32;
        for (k, part) in by_power {
            while at < k {
                power = &power * s;
                at += 1;
            }
            out = &out + &(&part * &power);
        }
        Ok(out)
    }

    /// `w <- s`.
    pub fn substitute_w(&self, s: &Self) -> Result<Self, PolyError> {
        self.substitute(Var::W, s)
    }

    /// Conjugates coefficients and swaps `z <-> chi`, `w <-> tau`.
    pub fn bar_swap(&self) -> Self {
        let n = self.n;
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut s = Vec::with_capacity(e.len());
                s.extend_from_slice(&e[n..2 * n]);
                s.extend_from_slice(&e[..n]);
                s.push(e[2 * n + 1]);
                s.push(e[2 * n]);
                (s, c.conj())
            })
            .collect();
        HermPoly { n, terms }
    }

    /// Exact evaluation at a point given as values for every variable slot.
    pub fn eval_exact(&self, point: &[GRat]) -> GRat {
        assert_eq!(point.len(), 2 * self.n + 2);
        let mut acc = GRat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t = &t * &x.pow(k);
                }
            }
            acc += &t;
        }
        acc
    }

    /// Evaluation at `(z, chi, w, tau)`.
    pub fn eval_c64(&self, z: &[Complex64], chi: &[Complex64], w: Complex64, tau: Complex64) -> Complex64 {
        self.compile().eval(z, chi, w, tau)
    }

    /// Evaluation on the real slice `chi = conj(z)`, `tau = conj(w)`.
    pub fn eval_real_slice(&self, z: &[Complex64], w: Complex64) -> Complex64 {
        let chi: Vec<Complex64> = z.iter().map(|x| x.conj()).collect();
        self.eval_c64(z, &chi, w, w.conj())
    }

    /// Floating copy of the polynomial for repeated evaluation.
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly { n: self.n, terms: self.terms.iter().map(|(e, c)| (e.clone(), c.to_complex64())).collect() }
    }

    /// Terms in canonical print order: total degree descending, then
    /// lexicographically descending exponent vector.
    pub fn sorted_terms(&self) -> Vec<(&Exponents, &GRat)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        v
    }

    /// Keeps only the terms for which `keep` holds.
    pub fn filter_terms(&self, mut keep: impl FnMut(&[u32]) -> bool) -> Self {
        HermPoly {
            n: self.n,
            terms: self.terms.iter().filter(|(e, _)| keep(e)).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    /// Applies `f` to every coefficient, dropping terms that become zero.
    pub fn map_coeffs(&self, mut f: impl FnMut(&GRat) -> GRat) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &f(c));
        }
        out
    }
}

/// Floating copy of a [`HermPoly`].
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    n: usize,
    terms: Vec<(Exponents, Complex64)>,
}

impl CompiledPoly {
    pub fn eval(&self, z: &[Complex64], chi: &[Complex64], w: Complex64, tau: Complex64) -> Complex64 {
        assert_eq!(z.len(), self.n);
        assert_eq!(chi.len(), self.n);
        let n = self.n;
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = *c;
            for i in 0..n {
                if e[i] > 0 {
                    t *= z[i].powu(e[i]);
                }
                if e[n + i] > 0 {
                    t *= chi[i].powu(e[n + i]);
                }
            }
            if e[2 * n] > 0 {
                t *= w.powu(e[2 * n]);
            }
            if e[2 * n + 1] > 0 {
                t *= tau.powu(e[2 * n + 1]);
            }
            acc += t;
        }
        acc
    }

    /// Evaluation of a polynomial in `(z, w)` only.
    pub fn eval_holo(&self, z: &[Complex64], w: Complex64) -> Complex64 {
        let zero = vec![Complex64::new(0.0, 0.0); self.n];
        self.eval(z, &zero, w, Complex64::new(0.0, 0.0))
    }
}

impl<'a> Add<&'a HermPoly> for &'a HermPoly {
    type Output = HermPoly;
    /// Panics on arity mismatch; see [`HermPoly::checked_add`].
    fn add(self, o: &HermPoly) -> HermPoly {
        self.checked_add(o).expect("arity mismatch")
    }
}

impl<'a> Sub<&'a HermPoly> for &'a HermPoly {
    type Output = HermPoly;
    fn sub(self, o: &HermPoly) -> HermPoly {
        self.checked_sub(o).expect("arity mismatch")
    }
}

impl<'a> Mul<&'a HermPoly> for &'a HermPoly {
    type Output = HermPoly;
    fn mul(self, o: &HermPoly) -> HermPoly {
        self.checked_mul(o).expect("arity mismatch")
    }
}

impl Neg for &HermPoly {
    type Output = HermPoly;
    fn neg(self) -> HermPoly {
        self.scale(&GRat::from_ints(-1, 0))
    }
}
