//! Sparse multivariate polynomials over `F_{p^r}`.
//!
//! Polynomials keep their terms sorted in descending degree-reverse-lexicographic
//! order with no zero coefficients, so structural equality is ring equality and
//! the `Display` output is canonical.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ff::{Coeff, Field, FieldElement};

/// Upper bound on the number of ring variables.
pub const MAX_VARS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("operands live in different rings")]
    RingMismatch,
    #[error("variable index {index} out of range for a ring with {nvars} variables")]
    VariableIndex { index: usize, nvars: usize },
    #[error("invalid variable name {0:?}")]
    InvalidVariableName(String),
    #[error("duplicate variable name {0:?}")]
    DuplicateVariable(String),
    #[error("at most {MAX_VARS} variables are supported, got {0}")]
    TooManyVariables(usize),
    #[error("parse error at line 1, column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("polynomial {0} is not a linear form")]
    NotLinear(String),
    #[error("linear form has no non-constant part")]
    DegenerateLinearForm,
    #[error("linear form needs {expected} coefficients, got {found}")]
    LinearFormArity { expected: usize, found: usize },
    #[error("polynomial still involves variable {0}")]
    DependsOnVariable(String),
}

/// Exponent vector. Entries past the ring's variable count are zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    deg: u32,
    exps: [u16; MAX_VARS],
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.exps.iter().rposition(|&e| e != 0).map_or(0, |i| i + 1);
        write!(f, "{:?}", &self.exps[..last])
    }
}

impl Default for Monomial {
    fn default() -> Self {
        Monomial::one()
    }
}

impl Monomial {
    pub const fn one() -> Monomial {
        Monomial {
            deg: 0,
            exps: [0; MAX_VARS],
        }
    }

    pub fn var(i: usize) -> Monomial {
        let mut m = Monomial::one();
        m.exps[i] = 1;
        m.deg = 1;
        m
    }

    pub fn from_exponents(exps: &[u32]) -> Monomial {
        assert!(exps.len() <= MAX_VARS, "too many exponents");
        let mut m = Monomial::one();
        for (i, &e) in exps.iter().enumerate() {
            m.exps[i] = u16::try_from(e).expect("exponent overflow");
            m.deg += e;
        }
        m
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.deg
    }

    #[inline]
    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i] as u32
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        self.exps[..nvars].iter().map(|&e| e as u32).collect()
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    pub(crate) fn set_exp(&mut self, i: usize, e: u32) {
        self.deg = self.deg - self.exps[i] as u32 + e;
        self.exps[i] = u16::try_from(e).expect("exponent overflow");
    }

    /// Panics when an exponent leaves the `u16` range.
    #[inline]
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = *self;
        for i in 0..MAX_VARS {
            out.exps[i] = self.exps[i]
                .checked_add(other.exps[i])
                .expect("exponent overflow");
        }
        out.deg = self.deg + other.deg;
        out
    }

    #[inline]
    pub fn divides(&self, other: &Monomial) -> bool {
        self.deg <= other.deg && (0..MAX_VARS).all(|i| self.exps[i] <= other.exps[i])
    }

    /// `self / other`; the caller guarantees divisibility.
    #[inline]
    pub fn div(&self, other: &Monomial) -> Monomial {
        let mut out = *self;
        for i in 0..MAX_VARS {
            out.exps[i] = self.exps[i] - other.exps[i];
        }
        out.deg = self.deg - other.deg;
        out
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut out = Monomial::one();
        for i in 0..MAX_VARS {
            out.exps[i] = self.exps[i].max(other.exps[i]);
            out.deg += out.exps[i] as u32;
        }
        out
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        (0..MAX_VARS).all(|i| self.exps[i] == 0 || other.exps[i] == 0)
    }

    pub fn pow(&self, k: u32) -> Monomial {
        let mut out = Monomial::one();
        for i in 0..MAX_VARS {
            let e = self.exps[i] as u32 * k;
            out.exps[i] = u16::try_from(e).expect("exponent overflow");
        }
        out.deg = self.deg * k;
        out
    }
}

/// Monomial orders supported by the Gröbner engine.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    Lex,
    #[default]
    Grevlex,
}

impl MonomialOrder {
    #[inline]
    pub fn cmp(self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex => {
                for i in 0..MAX_VARS {
                    match a.exps[i].cmp(&b.exps[i]) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            }
            MonomialOrder::Grevlex => match a.deg.cmp(&b.deg) {
                Ordering::Equal => {
                    for i in (0..MAX_VARS).rev() {
                        match a.exps[i].cmp(&b.exps[i]) {
                            Ordering::Equal => continue,
                            o => return o.reverse(),
                        }
                    }
                    Ordering::Equal
                }
                o => o,
            },
        }
    }
}

/// The polynomial ring `K[x_1, ..., x_n]`.
#[derive(Debug, PartialEq, Eq)]
pub struct PolyRing {
    field: Field,
    vars: Vec<String>,
}

/// Shared handle to a [`PolyRing`].
#[derive(Clone, Debug)]
pub struct Ring(Arc<PolyRing>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for Ring {}

fn valid_var_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

impl Ring {
    pub fn new<S: AsRef<str>>(field: Field, vars: &[S]) -> Result<Ring, PolyError> {
        if vars.len() > MAX_VARS {
            return Err(PolyError::TooManyVariables(vars.len()));
        }
        let mut names: Vec<String> = Vec::with_capacity(vars.len());
        for v in vars {
            let v = v.as_ref().trim();
            if !valid_var_name(v) || (v == "g" && field.degree() > 1) {
                return Err(PolyError::InvalidVariableName(v.to_string()));
            }
            if names.iter().any(|n| n == v) {
                return Err(PolyError::DuplicateVariable(v.to_string()));
            }
            names.push(v.to_string());
        }
        Ok(Ring(Arc::new(PolyRing { field, vars: names })))
    }

    /// Variables named `x1, ..., xn`.
    pub fn with_indexed_vars(field: Field, n: usize) -> Result<Ring, PolyError> {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        Ring::new(field, &names)
    }

    pub fn field(&self) -> &Field {
        &self.0.field
    }

    pub fn nvars(&self) -> usize {
        self.0.vars.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.0.vars
    }

    pub fn var_name(&self, i: usize) -> &str {
        &self.0.vars[i]
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.0.vars.iter().position(|v| v == name)
    }

    pub fn check_index(&self, index: usize) -> Result<(), PolyError> {
        if index < self.nvars() {
            Ok(())
        } else {
            Err(PolyError::VariableIndex {
                index,
                nvars: self.nvars(),
            })
        }
    }

    /// Same field, variable `j` removed.
    pub fn without_var(&self, j: usize) -> Result<Ring, PolyError> {
        self.check_index(j)?;
        let names: Vec<&String> = self
            .0
            .vars
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, v)| v)
            .collect();
        Ring::new(self.field().clone(), &names)
    }

    /// Same field, a new variable prepended at index 0.
    pub fn with_leading_var(&self, name: &str) -> Result<Ring, PolyError> {
        let mut names = vec![name.to_string()];
        names.extend(self.0.vars.iter().cloned());
        Ring::new(self.field().clone(), &names)
    }

    pub fn zero(&self) -> Polynomial {
        Polynomial {
            ring: self.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(&self) -> Polynomial {
        self.constant(1)
    }

    pub fn constant(&self, c: Coeff) -> Polynomial {
        self.term(c, Monomial::one())
    }

    pub fn term(&self, c: Coeff, m: Monomial) -> Polynomial {
        let terms = if c == 0 { Vec::new() } else { vec![(m, c)] };
        Polynomial {
            ring: self.clone(),
            terms,
        }
    }

    pub fn var(&self, i: usize) -> Polynomial {
        assert!(i < self.nvars(), "variable index out of range");
        self.term(1, Monomial::var(i))
    }

    pub fn parse(&self, text: &str) -> Result<Polynomial, PolyError> {
        Parser::new(self, text).parse()
    }
}

/// A polynomial in some [`Ring`].
#[derive(Clone)]
pub struct Polynomial {
    ring: Ring,
    terms: Vec<(Monomial, Coeff)>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

fn sort_desc(terms: &mut [(Monomial, Coeff)]) {
    terms.sort_unstable_by(|a, b| MonomialOrder::Grevlex.cmp(&b.0, &a.0));
}

impl Polynomial {
    /// Builds a polynomial from arbitrary terms, merging duplicates and
    /// dropping zeros.
    pub fn from_terms<I>(ring: &Ring, terms: I) -> Polynomial
    where
        I: IntoIterator<Item = (Monomial, Coeff)>,
    {
        let k = ring.field();
        let mut acc: HashMap<Monomial, Coeff> = HashMap::new();
        for (m, c) in terms {
            let e = acc.entry(m).or_insert(0);
            *e = k.add(*e, c);
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|&(_, c)| c != 0).collect();
        sort_desc(&mut terms);
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn field(&self) -> &Field {
        self.ring.field()
    }

    /// Terms in descending grevlex order.
    pub fn terms(&self) -> &[(Monomial, Coeff)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn coefficient(&self, m: &Monomial) -> Coeff {
        self.terms
            .iter()
            .find(|(t, _)| t == m)
            .map_or(0, |&(_, c)| c)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn degree_in(&self, j: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.exp(j)).max().unwrap_or(0)
    }

    pub fn involves(&self, j: usize) -> bool {
        self.degree_in(j) > 0
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.terms.first() {
            None => true,
            Some((m0, _)) => self.terms.iter().all(|(m, _)| m.degree() == m0.degree()),
        }
    }

    pub fn leading_term(&self, order: MonomialOrder) -> Option<(Monomial, Coeff)> {
        self.terms
            .iter()
            .copied()
            .max_by(|a, b| order.cmp(&a.0, &b.0))
    }

    fn same_ring(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(PolyError::RingMismatch)
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.same_ring(other)?;
        Ok(self.add_scaled(other, 1, &Monomial::one()))
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.same_ring(other)?;
        let minus_one = self.field().neg(1);
        Ok(self.add_scaled(other, minus_one, &Monomial::one()))
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.same_ring(other)?;
        let k = self.field();
        if self.is_zero() || other.is_zero() {
            return Ok(self.ring.zero());
        }
        let mut acc: HashMap<Monomial, Coeff> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let e = acc.entry(ma.mul(mb)).or_insert(0);
                *e = k.add(*e, k.mul(*ca, *cb));
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|&(_, c)| c != 0).collect();
        sort_desc(&mut terms);
        Ok(Polynomial {
            ring: self.ring.clone(),
            terms,
        })
    }

    /// `self + c * m * other`, merging the sorted term lists.
    pub(crate) fn add_scaled(&self, other: &Polynomial, c: Coeff, m: &Monomial) -> Polynomial {
        let k = self.field();
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = self.terms.iter().peekable();
        let mut b = other
            .terms
            .iter()
            .map(|(mb, cb)| (mb.mul(m), k.mul(*cb, c)))
            .peekable();
        if c == 0 {
            return self.clone();
        }
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => out.push(*a.next().unwrap()),
                (None, Some(_)) => out.push(b.next().unwrap()),
                (Some(x), Some(y)) => match MonomialOrder::Grevlex.cmp(&x.0, &y.0) {
                    Ordering::Greater => out.push(*a.next().unwrap()),
                    Ordering::Less => out.push(b.next().unwrap()),
                    Ordering::Equal => {
                        let s = k.add(x.1, y.1);
                        if s != 0 {
                            out.push((x.0, s));
                        }
                        a.next();
                        b.next();
                    }
                },
            }
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: out,
        }
    }

    pub fn scale(&self, c: Coeff) -> Polynomial {
        if c == 0 {
            return self.ring.zero();
        }
        let k = self.field();
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|&(m, a)| (m, k.mul(a, c))).collect(),
        }
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(self.field().neg(1))
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|&(t, c)| (t.mul(m), c)).collect(),
        }
    }

    /// Scales so the grevlex-leading coefficient is 1.
    pub fn monic(&self) -> Polynomial {
        match self.terms.first() {
            None => self.clone(),
            Some(&(_, c)) => self.scale(self.field().inv(c).unwrap()),
        }
    }

    pub fn pow(&self, mut k: u64) -> Polynomial {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self^{p^e}`, computed termwise through the Frobenius endomorphism.
    pub fn frobenius_power(&self, e: u32) -> Polynomial {
        let k = self.field();
        let q = k.characteristic().pow(e);
        let terms = self
            .terms
            .iter()
            .map(|&(m, c)| (m.pow(q), k.frobenius(c, e)))
            .collect();
        // Raising to a power preserves the grevlex order of monomials.
        Polynomial {
            ring: self.ring.clone(),
            terms,
        }
    }

    /// Image of `self` under `x_j -> g`.
    pub fn substitute(&self, j: usize, g: &Polynomial) -> Result<Polynomial, PolyError> {
        self.ring.check_index(j)?;
        self.same_ring(g)?;
        let mut by_power: BTreeMap<u32, Vec<(Monomial, Coeff)>> = BTreeMap::new();
        for &(m, c) in &self.terms {
            let mut rest = m;
            rest.set_exp(j, 0);
            by_power.entry(m.exp(j)).or_default().push((rest, c));
        }
        let mut result = self.ring.zero();
        let mut g_pow = self.ring.one();
        let mut current = 0;
        for (k, terms) in by_power {
            while current < k {
                g_pow = &g_pow * g;
                current += 1;
            }
            let part = Polynomial::from_terms(&self.ring, terms);
            result = &result + &(&part * &g_pow);
        }
        Ok(result)
    }

    /// Substitutes `x_j -> g` and then drops `x_j` from the ring.
    pub fn eliminate(
        &self,
        j: usize,
        g: &Polynomial,
        target: &Ring,
    ) -> Result<Polynomial, PolyError> {
        self.substitute(j, g)?.remove_variable(j, target)
    }

    /// Re-expresses an `x_j`-free polynomial in `target`, which must be this
    /// ring with variable `j` removed.
    pub fn remove_variable(&self, j: usize, target: &Ring) -> Result<Polynomial, PolyError> {
        self.ring.check_index(j)?;
        if self.involves(j) {
            return Err(PolyError::DependsOnVariable(
                self.ring.var_name(j).to_string(),
            ));
        }
        if *target != self.ring.without_var(j)? {
            return Err(PolyError::RingMismatch);
        }
        let terms = self.terms.iter().map(|&(m, c)| {
            let mut e = m.exponents(self.ring.nvars());
            e.remove(j);
            (Monomial::from_exponents(&e), c)
        });
        Ok(Polynomial::from_terms(target, terms))
    }

    /// Embeds into `target` (this ring with one variable prepended).
    pub fn shift_into(&self, target: &Ring) -> Polynomial {
        let terms = self.terms.iter().map(|&(m, c)| {
            let mut e = vec![0];
            e.extend(m.exponents(self.ring.nvars()));
            (Monomial::from_exponents(&e), c)
        });
        Polynomial::from_terms(target, terms)
    }

    /// Homogenizes with a new variable `name` placed at index 0.
    pub fn homogenize(&self, name: &str) -> Result<Polynomial, PolyError> {
        let target = self.ring.with_leading_var(name)?;
        let d = self.total_degree().unwrap_or(0);
        let terms = self.terms.iter().map(|&(m, c)| {
            let mut e = vec![d - m.degree()];
            e.extend(m.exponents(self.ring.nvars()));
            (Monomial::from_exponents(&e), c)
        });
        Ok(Polynomial::from_terms(&target, terms))
    }

    /// Sets `x_i = 1` and returns the result in the ring without `x_i`.
    pub fn dehomogenize(&self, i: usize) -> Result<Polynomial, PolyError> {
        let target = self.ring.without_var(i)?;
        let terms = self.terms.iter().map(|&(m, c)| {
            let mut e = m.exponents(self.ring.nvars());
            e.remove(i);
            (Monomial::from_exponents(&e), c)
        });
        Ok(Polynomial::from_terms(&target, terms))
    }

    pub fn homogeneous_components(&self) -> BTreeMap<u32, Polynomial> {
        let mut parts: BTreeMap<u32, Vec<(Monomial, Coeff)>> = BTreeMap::new();
        for &(m, c) in &self.terms {
            parts.entry(m.degree()).or_default().push((m, c));
        }
        parts
            .into_iter()
            .map(|(d, terms)| {
                (
                    d,
                    Polynomial {
                        ring: self.ring.clone(),
                        terms,
                    },
                )
            })
            .collect()
    }
}

impl<'a> std::ops::Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    /// Panics on ring mismatch; see [`Polynomial::checked_add`].
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("ring mismatch")
    }
}

impl<'a> std::ops::Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("ring mismatch")
    }
}

impl<'a> std::ops::Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("ring mismatch")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let k = self.field();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                f.write_str(" + ")?;
            }
            let mono: Vec<String> = (0..self.ring.nvars())
                .filter(|&i| m.exp(i) > 0)
                .map(|i| match m.exp(i) {
                    1 => self.ring.var_name(i).to_string(),
                    e => format!("{}^{}", self.ring.var_name(i), e),
                })
                .collect();
            let coeff = k.format(*c);
            match (mono.is_empty(), *c == 1) {
                (true, _) => f.write_str(&coeff)?,
                (false, false) if coeff.contains('+') => {
                    write!(f, "({})*{}", coeff, mono.join("*"))?
                }
                (false, true) => f.write_str(&mono.join("*"))?,
                (false, false) => write!(f, "{}*{}", coeff, mono.join("*"))?,
            }
        }
        Ok(())
    }
}

/// A hyperplane equation `c_0 + c_1 x_1 + ... + c_n x_n`.
#[derive(Clone, PartialEq, Eq)]
pub struct LinearForm {
    ring: Ring,
    coeffs: Vec<Coeff>,
}

impl fmt::Debug for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearForm({self})")
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_polynomial(), f)
    }
}

impl LinearForm {
    /// `coeffs` is `(c_0, c_1, ..., c_n)`.
    pub fn new(ring: &Ring, coeffs: Vec<Coeff>) -> Result<LinearForm, PolyError> {
        if coeffs.len() != ring.nvars() + 1 {
            return Err(PolyError::LinearFormArity {
                expected: ring.nvars() + 1,
                found: coeffs.len(),
            });
        }
        assert!(coeffs.iter().all(|&c| ring.field().is_valid(c)));
        if coeffs[1..].iter().all(|&c| c == 0) {
            return Err(PolyError::DegenerateLinearForm);
        }
        Ok(LinearForm {
            ring: ring.clone(),
            coeffs,
        })
    }

    /// The constant form `c_0 != 0`. It cuts out no hyperplane; it exists so
    /// the degenerate case `l = c_0` of the augmentation comparison can be
    /// expressed.
    pub fn constant(ring: &Ring, c0: Coeff) -> Result<LinearForm, PolyError> {
        if c0 == 0 {
            return Err(PolyError::DegenerateLinearForm);
        }
        let mut coeffs = vec![0; ring.nvars() + 1];
        coeffs[0] = c0;
        Ok(LinearForm {
            ring: ring.clone(),
            coeffs,
        })
    }

    /// False for forms built by [`LinearForm::constant`].
    pub fn is_hyperplane(&self) -> bool {
        self.coeffs[1..].iter().any(|&c| c != 0)
    }

    pub fn from_elements(ring: &Ring, coeffs: &[FieldElement]) -> Result<LinearForm, PolyError> {
        if coeffs.iter().any(|c| c.field() != ring.field()) {
            return Err(PolyError::RingMismatch);
        }
        LinearForm::new(ring, coeffs.iter().map(|c| c.value()).collect())
    }

    pub fn from_polynomial(p: &Polynomial) -> Result<LinearForm, PolyError> {
        if p.total_degree().unwrap_or(0) > 1 {
            return Err(PolyError::NotLinear(p.to_string()));
        }
        let n = p.ring().nvars();
        let mut coeffs = vec![p.coefficient(&Monomial::one())];
        coeffs.extend((0..n).map(|i| p.coefficient(&Monomial::var(i))));
        LinearForm::new(p.ring(), coeffs)
    }

    pub fn parse(ring: &Ring, text: &str) -> Result<LinearForm, PolyError> {
        LinearForm::from_polynomial(&ring.parse(text)?)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// `c_0, ..., c_n`.
    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> Coeff {
        self.coeffs[0]
    }

    /// Coefficient of variable index `j` (0-based), i.e. `c_{j+1}`.
    pub fn var_coeff(&self, j: usize) -> Coeff {
        self.coeffs[j + 1]
    }

    pub fn to_polynomial(&self) -> Polynomial {
        let terms = std::iter::once((Monomial::one(), self.coeffs[0])).chain(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, &c)| (Monomial::var(i), c)),
        );
        Polynomial::from_terms(&self.ring, terms)
    }

    /// Scales so the first nonzero coefficient is 1; `V(l)` is unchanged.
    pub fn normalized(&self) -> LinearForm {
        let k = self.ring.field();
        let lead = *self.coeffs.iter().find(|&&c| c != 0).unwrap();
        let inv = k.inv(lead).unwrap();
        LinearForm {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|&c| k.mul(c, inv)).collect(),
        }
    }

    /// Solves `l = 0` for `x_j`: returns `-c_j^{-1}(c_0 + sum_{k != j} c_k x_k)`.
    pub fn solve_for(&self, j: usize) -> Option<Polynomial> {
        let k = self.ring.field();
        let cj = self.var_coeff(j);
        let inv = k.inv(cj)?;
        let mut coeffs = self.coeffs.clone();
        coeffs[j + 1] = 0;
        let rest = LinearForm {
            ring: self.ring.clone(),
            coeffs,
        };
        Some(rest.to_polynomial().scale(k.neg(inv)))
    }
}

struct Parser<'a> {
    ring: &'a Ring,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(ring: &'a Ring, text: &str) -> Self {
        Parser {
            ring,
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Parse {
            column: self.pos + 1,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Polynomial, PolyError> {
        if self.peek().is_none() {
            return self.error("empty polynomial");
        }
        let p = self.expr()?;
        if self.peek().is_some() {
            return self.error(format!("unexpected character {:?}", self.chars[self.pos]));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut negate = false;
        match self.peek() {
            Some('+') => self.pos += 1,
            Some('-') => {
                self.pos += 1;
                negate = true;
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some('-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                Some(c) if c == '(' || c.is_ascii_alphanumeric() => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Polynomial, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let k = self.integer()?;
            let k = u64::try_from(k).or_else(|_| self.error("exponent too large"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<u128, PolyError> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected an integer");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().or_else(|_| {
            self.pos = start;
            self.error("integer out of range")
        })
    }

    fn atom(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return self.error("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let p = self.ring.field().characteristic() as u128;
                Ok(self.ring.constant((n % p) as Coeff))
            }
            Some(c) if c.is_ascii_lowercase() => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_ascii_lowercase()
                        || self.chars[self.pos].is_ascii_digit()
                        || self.chars[self.pos] == '_')
                {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                if let Some(i) = self.ring.var_index(&name) {
                    Ok(self.ring.var(i))
                } else if name == "g" && self.ring.field().degree() > 1 {
                    Ok(self.ring.constant(self.ring.field().generator()))
                } else {
                    self.pos = start;
                    self.error(format!("unknown variable {name:?}"))
                }
            }
            Some(c) => self.error(format!("unexpected character {c:?}")),
            None => self.error("unexpected end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(p: u32, vars: &[&str]) -> Ring {
        Ring::new(Field::prime(p).unwrap(), vars).unwrap()
    }

    #[test]
    fn freshmans_dream_in_char_two() {
        let r = ring(2, &["x", "y"]);
        let s = r.parse("x+y").unwrap();
        assert_eq!((&s * &s).to_string(), "x^2 + y^2");
        assert_eq!(&s * &r.one(), s);
    }

    #[test]
    fn product_in_char_three() {
        let r = ring(3, &["x", "y"]);
        let a = r.parse("x+2*y").unwrap();
        let b = r.parse("x+y").unwrap();
        assert_eq!(&a * &b, r.parse("x^2 + 2*y^2").unwrap());
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = ring(2, &["x"]).var(0);
        let b = ring(2, &["y"]).var(0);
        assert_eq!(a.checked_add(&b), Err(PolyError::RingMismatch));
        assert_eq!(a.checked_mul(&b), Err(PolyError::RingMismatch));
    }

    #[test]
    fn substitution_examples() {
        let r = ring(2, &["x", "y", "z", "w"]);
        let g = r.parse("1+x+y+z").unwrap();
        assert_eq!(r.var(3).substitute(3, &g).unwrap(), g);
        assert_eq!(r.one().substitute(3, &g).unwrap(), r.one());
        let f = r.parse("x^3*y*z*w + x*y^3*z^3").unwrap();
        let expected = r.parse("x^3*y*z*(1+x+y+z) + x*y^3*z^3").unwrap();
        assert_eq!(f.substitute(3, &g).unwrap(), expected);
        assert!(matches!(
            f.substitute(7, &g),
            Err(PolyError::VariableIndex { index: 7, .. })
        ));
    }

    #[test]
    fn homogeneous_component_examples() {
        let r = ring(3, &["x", "y", "z"]);
        assert!(r.zero().homogeneous_components().is_empty());
        let h = r.parse("x*y + z^2").unwrap();
        let comps = h.homogeneous_components();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[&2], h);
        let f = r.parse("x + y*z").unwrap();
        let comps = f.homogeneous_components();
        assert_eq!(comps[&1], r.parse("x").unwrap());
        assert_eq!(comps[&2], r.parse("y*z").unwrap());
    }

    #[test]
    fn canonical_text() {
        let r = ring(2, &["x", "y", "z", "w"]);
        let f = r.parse("x*y^3*z^3 + w*z*y*x^3").unwrap();
        assert_eq!(f.to_string(), "x*y^3*z^3 + x^3*y*z*w");
        let r5 = ring(5, &["x"]);
        assert_eq!(r5.parse("-x - 1").unwrap().to_string(), "4*x + 4");
        assert_eq!(r5.zero().to_string(), "0");
    }

    #[test]
    fn extension_coefficients_round_trip() {
        let k = Field::extension(2, 2).unwrap();
        let r = Ring::new(k, &["x", "y"]).unwrap();
        let f = r.parse("(g+1)*x^2 + g*y + 1").unwrap();
        assert_eq!(f.to_string(), "(g+1)*x^2 + g*y + 1");
        assert_eq!(r.parse(&f.to_string()).unwrap(), f);
        assert_eq!(r.parse("g*g").unwrap().to_string(), "g+1");
        assert!(Ring::new(Field::extension(3, 2).unwrap(), &["g"]).is_err());
    }

    #[test]
    fn parse_errors_carry_columns() {
        let r = ring(3, &["x", "y"]);
        match r.parse("x + q") {
            Err(PolyError::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(r.parse("x +"), Err(PolyError::Parse { .. })));
        assert!(matches!(r.parse("(x"), Err(PolyError::Parse { .. })));
        assert!(matches!(r.parse(""), Err(PolyError::Parse { .. })));
    }

    #[test]
    fn ring_validation() {
        let k = Field::prime(2).unwrap();
        assert!(matches!(
            Ring::new(k.clone(), &["X"]),
            Err(PolyError::InvalidVariableName(_))
        ));
        assert!(matches!(
            Ring::new(k.clone(), &["x", "x"]),
            Err(PolyError::DuplicateVariable(_))
        ));
        let many: Vec<String> = (0..17).map(|i| format!("v{i}")).collect();
        assert!(matches!(
            Ring::new(k, &many),
            Err(PolyError::TooManyVariables(17))
        ));
    }

    #[test]
    fn linear_forms() {
        let r = ring(5, &["x", "y"]);
        let l = LinearForm::parse(&r, "2 + 3*x + y").unwrap();
        assert_eq!(l.coeffs(), &[2, 3, 1]);
        assert_eq!(l.normalized().coeffs(), &[1, 4, 3]);
        // y = -(2 + 3x)
        assert_eq!(l.solve_for(1).unwrap(), r.parse("3 + 2*x").unwrap());
        assert!(matches!(
            LinearForm::parse(&r, "x*y"),
            Err(PolyError::NotLinear(_))
        ));
        assert!(matches!(
            LinearForm::parse(&r, "3"),
            Err(PolyError::DegenerateLinearForm)
        ));
    }

    #[test]
    fn homogenize_and_dehomogenize() {
        let r = ring(2, &["x", "y", "z", "w"]);
        let f = r.parse("x^3*y*z*w + x*y^3*z^3").unwrap();
        let h = f.homogenize("t").unwrap();
        assert!(h.is_homogeneous());
        assert_eq!(h.to_string(), "x*y^3*z^3 + t*x^3*y*z*w");
        assert_eq!(h.dehomogenize(0).unwrap(), f);
    }

    #[test]
    fn monomial_orders() {
        let a = Monomial::from_exponents(&[1, 0, 1]);
        let b = Monomial::from_exponents(&[0, 2, 0]);
        // grevlex: equal degree, compare last variable: a has z, so a < b
        assert_eq!(MonomialOrder::Grevlex.cmp(&a, &b), Ordering::Less);
        assert_eq!(MonomialOrder::Lex.cmp(&a, &b), Ordering::Greater);
    }

    fn arb_poly(r: Ring) -> impl Strategy<Value = Polynomial> {
        let n = r.nvars();
        let q = r.field().order();
        prop::collection::vec((prop::collection::vec(0u32..4, n), 0..q), 0..6).prop_map(
            move |terms| {
                Polynomial::from_terms(
                    &r,
                    terms
                        .into_iter()
                        .map(|(e, c)| (Monomial::from_exponents(&e), c)),
                )
            },
        )
    }

    fn triple() -> impl Strategy<Value = (Polynomial, Polynomial, Polynomial)> {
        prop_oneof![Just((2u32, 1u32)), Just((3, 1)), Just((2, 2)), Just((5, 1))].prop_flat_map(
            |(p, deg)| {
                let r = Ring::new(Field::extension(p, deg).unwrap(), &["x", "y", "z"]).unwrap();
                (arb_poly(r.clone()), arb_poly(r.clone()), arb_poly(r))
            },
        )
    }

    proptest! {
        #[test]
        fn ring_axioms((a, b, c) in triple()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
            if !a.is_zero() && !b.is_zero() {
                prop_assert_eq!(
                    (&a * &b).total_degree().unwrap(),
                    a.total_degree().unwrap() + b.total_degree().unwrap()
                );
            }
        }

        #[test]
        fn components_reconstruct((a, _b, _c) in triple()) {
            let sum = a
                .homogeneous_components()
                .values()
                .fold(a.ring().zero(), |acc, p| &acc + p);
            prop_assert_eq!(sum, a.clone());
            for (d, p) in a.homogeneous_components() {
                prop_assert!(p.is_homogeneous());
                prop_assert_eq!(p.total_degree(), Some(d));
            }
        }

        #[test]
        fn elimination_is_idempotent((a, b, c) in triple()) {
            // make the substitute free of z
            let g = b.substitute(2, &c.ring().zero()).unwrap();
            let once = a.substitute(2, &g).unwrap();
            prop_assert_eq!(once.substitute(2, &g).unwrap(), once.clone());
            prop_assert_eq!(once.substitute(2, &c).unwrap(), once);
        }

        #[test]
        fn text_round_trip((a, _b, _c) in triple()) {
            prop_assert_eq!(a.ring().parse(&a.to_string()).unwrap(), a);
        }

        #[test]
        fn frobenius_power_matches_repeated_product((a, _b, _c) in triple()) {
            let p = a.field().characteristic() as u64;
            prop_assert_eq!(a.frobenius_power(1), a.pow(p));
        }
    }
}
