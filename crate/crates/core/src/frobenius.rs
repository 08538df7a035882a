//! Frobenius-basis decompositions, the trace map and test ideals of
//! principal pairs `(A^n, f^{1/p^e})`.
//!
//! Over a perfect field the pushforward `F^e_* S` is free over `S` with basis
//! the monomials `x^a`, `0 <= a_i < p^e`. Writing
//! `f = sum_a s_a^{p^e} x^a`, the trace map sends `F^e_* f` to the coefficient
//! of `x^{p^e - 1, ..., p^e - 1}`, and the test ideal of `f^{1/p^e}` is the
//! ideal generated by all coefficients `s_a`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::ff::Coeff;
use crate::groebner::{GroebnerError, Ideal};
use crate::poly::{LinearForm, Monomial, PolyError, Polynomial, Ring};

/// Largest `|Λ| = p^{e n}` accepted for a pair.
pub const ENUMERATION_GUARD: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrobeniusError {
    #[error("the Frobenius level e must be at least 1")]
    ZeroLevel,
    #[error("the test ideal of the zero polynomial is undefined")]
    ZeroPolynomial,
    #[error("basis size p^(e*n) = {size} exceeds the enumeration guard {guard}")]
    EnumerationGuard { size: u64, guard: u64 },
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

/// A multi-index `a` with entries in `[0, p^e)`, naming the basis element `x^a`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn as_monomial(&self) -> Monomial {
        Monomial::from_exponents(&self.0)
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The family `{s_a}` with `f = sum_a s_a^{p^e} x^a`. Only nonzero `s_a` are stored.
#[derive(Clone, Debug)]
pub struct FrobeniusDecomposition {
    ring: Ring,
    level: u32,
    coeffs: BTreeMap<MultiIndex, Polynomial>,
}

impl FrobeniusDecomposition {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// `p^e`.
    pub fn modulus(&self) -> u32 {
        self.ring.field().characteristic().pow(self.level)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, alpha: &MultiIndex) -> Option<&Polynomial> {
        self.coeffs.get(alpha)
    }

    /// The coefficient `s_a`, zero when absent.
    pub fn coefficient(&self, alpha: &[u32]) -> Polynomial {
        self.coeffs
            .get(&MultiIndex(alpha.to_vec()))
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    /// Nonzero coefficients in ascending multi-index order.
    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Polynomial)> {
        self.coeffs.iter()
    }

    /// `sum_a s_a^{p^e} x^a`, with the powers taken by repeated multiplication.
    pub fn recompose(&self) -> Polynomial {
        let q = self.modulus() as u64;
        self.coeffs
            .iter()
            .fold(self.ring.zero(), |acc, (alpha, s)| {
                &acc + &s.pow(q).mul_monomial(&alpha.as_monomial())
            })
    }
}

/// Splits every term `c x^b` of `f` as `(c^{1/p^e} x^g)^{p^e} x^a` with
/// `b = p^e g + a`.
pub fn frobenius_decompose(
    f: &Polynomial,
    e: u32,
) -> Result<FrobeniusDecomposition, FrobeniusError> {
    if e == 0 {
        return Err(FrobeniusError::ZeroLevel);
    }
    let ring = f.ring().clone();
    let k = ring.field();
    let n = ring.nvars();
    let q = k.characteristic().pow(e);
    let mut parts: HashMap<MultiIndex, Vec<(Monomial, Coeff)>> = HashMap::new();
    for &(m, c) in f.terms() {
        let exps = m.exponents(n);
        let alpha: Vec<u32> = exps.iter().map(|&b| b % q).collect();
        let gamma: Vec<u32> = exps.iter().map(|&b| b / q).collect();
        parts
            .entry(MultiIndex(alpha))
            .or_default()
            .push((Monomial::from_exponents(&gamma), k.pth_root(c, e)));
    }
    let coeffs = parts
        .into_iter()
        .map(|(alpha, terms)| (alpha, Polynomial::from_terms(&ring, terms)))
        .filter(|(_, s)| !s.is_zero())
        .collect();
    Ok(FrobeniusDecomposition {
        ring,
        level: e,
        coeffs,
    })
}

/// The trace `Φ^e(F^e_* f)`: the coefficient of `x^{p^e-1, ..., p^e-1}`.
pub fn trace(f: &Polynomial, e: u32) -> Result<Polynomial, FrobeniusError> {
    let d = frobenius_decompose(f, e)?;
    let top = vec![d.modulus() - 1; f.ring().nvars()];
    Ok(d.coefficient(&top))
}

/// The pair `(A^n, f^{1/p^e})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSpec {
    f: Polynomial,
    level: u32,
}

impl PairSpec {
    pub fn new(f: Polynomial, level: u32) -> Result<PairSpec, FrobeniusError> {
        if level == 0 {
            return Err(FrobeniusError::ZeroLevel);
        }
        if f.is_zero() {
            return Err(FrobeniusError::ZeroPolynomial);
        }
        let p = f.field().characteristic() as u64;
        let n = f.ring().nvars() as u32;
        let size = p
            .checked_pow(level * n)
            .filter(|&s| s <= ENUMERATION_GUARD)
            .ok_or(FrobeniusError::EnumerationGuard {
                size: p.saturating_pow(level * n),
                guard: ENUMERATION_GUARD,
            })?;
        debug_assert!(size <= ENUMERATION_GUARD);
        Ok(PairSpec { f, level })
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.f
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn ring(&self) -> &Ring {
        self.f.ring()
    }

    /// The same level with `f` replaced.
    pub fn with_polynomial(&self, f: Polynomial) -> Result<PairSpec, FrobeniusError> {
        PairSpec::new(f, self.level)
    }
}

impl fmt::Display for PairSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.f.field().characteristic();
        write!(f, "({})^(1/{})", self.f, p.pow(self.level))
    }
}

/// `τ(A^n, f^{1/p^e})`, with its reduced Gröbner basis already computed.
pub fn test_ideal(pair: &PairSpec) -> Result<Ideal, FrobeniusError> {
    let d = frobenius_decompose(&pair.f, pair.level)?;
    let gens: Vec<Polynomial> = d.coeffs.into_values().collect();
    let ideal = Ideal::new(pair.ring(), gens)?;
    ideal.groebner_basis()?;
    Ok(ideal)
}

/// `J^{[p^e]}`, generated by the `p^e`-th powers of the generators of `J`.
pub fn bracket_power(ideal: &Ideal, e: u32) -> Result<Ideal, FrobeniusError> {
    if e == 0 {
        return Err(FrobeniusError::ZeroLevel);
    }
    Ok(ideal.map_generators(ideal.ring(), |g| g.frobenius_power(e))?)
}

/// Generators of `τ(S, (f l)^{1/p})` read off from the decomposition of `f`:
/// for each `a`, `r_0 s_a + sum_j r_j s_{a - 1_j} x_j^{[a_j = 0]}` where
/// `r_j = c_j^{1/p}` and `a - 1_j` wraps `0` to `p - 1`.
pub fn product_pair_generators(
    f: &Polynomial,
    l: &LinearForm,
) -> Result<Vec<Polynomial>, FrobeniusError> {
    if f.is_zero() {
        return Err(FrobeniusError::ZeroPolynomial);
    }
    if l.ring() != f.ring() {
        return Err(PolyError::RingMismatch.into());
    }
    let ring = f.ring();
    let k = ring.field();
    let p = k.characteristic();
    let n = ring.nvars();
    let d = frobenius_decompose(f, 1)?;
    let roots: Vec<Coeff> = l.coeffs().iter().map(|&c| k.pth_root(c, 1)).collect();

    let mut support: BTreeSet<MultiIndex> = BTreeSet::new();
    for (beta, _) in d.iter() {
        support.insert(beta.clone());
        for j in 0..n {
            let mut a = beta.0.clone();
            a[j] = (a[j] + 1) % p;
            support.insert(MultiIndex(a));
        }
    }

    let mut out = Vec::new();
    for alpha in support {
        let mut gen = d.coefficient(&alpha.0).scale(roots[0]);
        for j in 0..n {
            if roots[j + 1] == 0 {
                continue;
            }
            let mut prev = alpha.0.clone();
            let wraps = prev[j] == 0;
            prev[j] = if wraps { p - 1 } else { prev[j] - 1 };
            let Some(s) = d.get(&MultiIndex(prev)) else {
                continue;
            };
            let mut term = s.scale(roots[j + 1]);
            if wraps {
                term = term.mul_monomial(&Monomial::var(j));
            }
            gen = &gen + &term;
        }
        if !gen.is_zero() {
            out.push(gen);
        }
    }
    Ok(out)
}

/// `τ(P^n, F^{1/p^e})` on the affine chart `x_chart = 1`, computed as the
/// test ideal of the dehomogenization in the chart ring.
pub fn projective_chart_test_ideal(
    big_f: &Polynomial,
    chart: usize,
    e: u32,
) -> Result<Ideal, FrobeniusError> {
    if big_f.is_zero() {
        return Err(FrobeniusError::ZeroPolynomial);
    }
    if !big_f.is_homogeneous() {
        return Err(FrobeniusError::NotHomogeneous);
    }
    let local = big_f.dehomogenize(chart)?;
    test_ideal(&PairSpec::new(local, e)?)
}
