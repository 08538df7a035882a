//! Arithmetic in the finite fields `F_{p^r}`.
//!
//! A [`Field`] is a cheap, shareable handle to a [`FieldDescriptor`]. Elements
//! are encoded as integers `0 <= v < q` whose base-`p` digits are the
//! coordinates in the power basis `1, g, g^2, ...` of the defining modulus.
//! Hot loops (polynomial and Gröbner arithmetic) work on the raw [`Coeff`]
//! encoding through the `Field` methods; [`FieldElement`] is the checked,
//! self-describing value type used at API boundaries.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Raw encoding of a field element relative to some [`Field`].
pub type Coeff = u32;

/// Largest supported field order. Log/exp tables are `O(q)`.
pub const MAX_FIELD_ORDER: u64 = 1 << 16;

/// Fields up to this order get a precomputed addition table.
const ADD_TABLE_LIMIT: u32 = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {0} exceeds the supported maximum {MAX_FIELD_ORDER}")]
    TooLarge(u64),
    #[error("modulus must be monic of degree {expected} over F_{p}")]
    BadModulus { p: u32, expected: u32 },
    #[error("modulus {0} is reducible")]
    Reducible(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields ({0} vs {1})")]
    FieldMismatch(String, String),
    #[error("cannot parse field literal {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

/// Conway polynomials, coefficients listed from the constant term upward.
const BUILTIN_MODULI: &[(u32, &[u32])] = &[
    (2, &[1, 1, 1]),
    (2, &[1, 1, 0, 1]),
    (2, &[1, 1, 0, 0, 1]),
    (3, &[2, 2, 1]),
    (3, &[1, 2, 0, 1]),
    (3, &[2, 0, 0, 2, 1]),
    (5, &[2, 4, 1]),
    (5, &[3, 3, 0, 1]),
    (5, &[2, 4, 4, 0, 1]),
    (7, &[3, 6, 1]),
    (7, &[4, 0, 6, 1]),
    (7, &[3, 4, 5, 0, 1]),
];

/// Immutable description of `F_{p^r}` together with its arithmetic tables.
pub struct FieldDescriptor {
    p: u32,
    r: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<Coeff>,
    log: Vec<u32>,
    neg: Vec<Coeff>,
    add: Option<Vec<u16>>,
    /// `a -> a^p`
    frob: Vec<Coeff>,
    /// `a -> a^{p^{r-1}}`, the inverse of `frob`.
    root: Vec<Coeff>,
}

impl fmt::Debug for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldDescriptor")
            .field("p", &self.p)
            .field("r", &self.r)
            .field("modulus", &self.modulus)
            .finish()
    }
}

/// Shared handle to a finite field.
#[derive(Clone, Debug)]
pub struct Field(Arc<FieldDescriptor>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn digits(mut v: u32, p: u32, r: u32) -> Vec<u32> {
    let mut out = vec![0; r as usize];
    for d in out.iter_mut() {
        *d = v % p;
        v /= p;
    }
    out
}

fn undigits(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Product of two residue vectors modulo the monic `modulus`.
fn mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let r = modulus.len() - 1;
    let p64 = p as u64;
    let mut prod = vec![0u64; 2 * r];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p64;
        }
    }
    for k in (r..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, &m) in modulus[..r].iter().enumerate() {
            let idx = k - r + i;
            prod[idx] = (prod[idx] + (p64 - c) * m as u64) % p64;
        }
    }
    prod.truncate(r);
    prod.into_iter().map(|x| x as u32).collect()
}

/// Remainder of `a` modulo the monic `b` over `F_p`; both low-first.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    let db = b.len() - 1;
    while a.len() > db {
        let lead = *a.last().unwrap();
        let shift = a.len() - 1 - db;
        if lead != 0 {
            for (i, &c) in b.iter().enumerate() {
                a[shift + i] = (a[shift + i] + (p - lead) * c % p) % p;
            }
        }
        a.pop();
    }
    a
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let r = modulus.len() - 1;
    for d in 1..=r / 2 {
        let count = (p as u64).pow(d as u32);
        for v in 0..count {
            let mut cand = digits(v as u32, p, d as u32);
            cand.push(1);
            if poly_rem(modulus, &cand, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn modulus_to_string(modulus: &[u32]) -> String {
    let mut parts = Vec::new();
    for (k, &c) in modulus.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        parts.push(monomial_in_g(c, k as u32));
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join("+")
    }
}

fn monomial_in_g(c: u32, k: u32) -> String {
    match (c, k) {
        (c, 0) => c.to_string(),
        (1, 1) => "g".to_string(),
        (c, 1) => format!("{c}*g"),
        (1, k) => format!("g^{k}"),
        (c, k) => format!("{c}*g^{k}"),
    }
}

impl Field {
    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Field, FieldError> {
        Field::extension(p, 1)
    }

    /// `F_{p^r}` with the built-in modulus when one exists, otherwise the
    /// lexicographically first monic irreducible of degree `r`.
    pub fn extension(p: u32, r: u32) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if r == 0 {
            return Err(FieldError::ZeroDegree);
        }
        check_order(p, r)?;
        if r == 1 {
            return Field::with_modulus(p, &[0, 1]);
        }
        if let Some((_, m)) = BUILTIN_MODULI
            .iter()
            .find(|(bp, m)| *bp == p && m.len() == r as usize + 1)
        {
            return Field::with_modulus(p, m);
        }
        let count = (p as u64).pow(r);
        for v in 0..count {
            let mut cand = digits(v as u32, p, r);
            cand.push(1);
            if cand[0] != 0 && is_irreducible(&cand, p) {
                return Field::with_modulus(p, &cand);
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// `F_p[g]/(modulus)`. `modulus` is listed from the constant term upward
    /// and must be monic and irreducible.
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if modulus.len() < 2 {
            return Err(FieldError::ZeroDegree);
        }
        let r = modulus.len() as u32 - 1;
        check_order(p, r)?;
        if modulus.iter().any(|&c| c >= p) || *modulus.last().unwrap() != 1 {
            return Err(FieldError::BadModulus { p, expected: r });
        }
        if !is_irreducible(modulus, p) {
            return Err(FieldError::Reducible(modulus_to_string(modulus)));
        }
        Ok(Field(Arc::new(build_descriptor(p, modulus.to_vec()))))
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.r
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    /// Defining polynomial, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn modulus_string(&self) -> String {
        modulus_to_string(&self.0.modulus)
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.0
    }

    /// Short name such as `F_3` or `F_9`.
    pub fn name(&self) -> String {
        format!("F_{}", self.0.q)
    }

    #[inline]
    pub fn zero(&self) -> Coeff {
        0
    }

    #[inline]
    pub fn one(&self) -> Coeff {
        1
    }

    /// The generator `g` of the power basis (equal to `0` in a prime field,
    /// where it is meaningless).
    pub fn generator(&self) -> Coeff {
        if self.0.r == 1 {
            0
        } else {
            self.0.p
        }
    }

    pub fn from_int(&self, n: i64) -> Coeff {
        n.rem_euclid(self.0.p as i64) as Coeff
    }

    #[inline]
    pub fn is_valid(&self, a: Coeff) -> bool {
        a < self.0.q
    }

    #[inline]
    pub fn add(&self, a: Coeff, b: Coeff) -> Coeff {
        let d = &*self.0;
        if d.r == 1 {
            let s = a + b;
            return if s >= d.p { s - d.p } else { s };
        }
        if let Some(t) = &d.add {
            return t[(a * d.q + b) as usize] as Coeff;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..d.r {
            let s = (a % d.p + b % d.p) % d.p;
            out += s * place;
            place *= d.p;
            a /= d.p;
            b /= d.p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: Coeff) -> Coeff {
        self.0.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Coeff, b: Coeff) -> Coeff {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Coeff, b: Coeff) -> Coeff {
        if a == 0 || b == 0 {
            return 0;
        }
        let d = &*self.0;
        d.exp[(d.log[a as usize] + d.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: Coeff) -> Option<Coeff> {
        if a == 0 {
            return None;
        }
        let d = &*self.0;
        let n = d.q - 1;
        Some(d.exp[((n - d.log[a as usize]) % n) as usize])
    }

    pub fn div(&self, a: Coeff, b: Coeff) -> Option<Coeff> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Coeff, k: u64) -> Coeff {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let d = &*self.0;
        let n = (d.q - 1) as u64;
        d.exp[((d.log[a as usize] as u64 * (k % n)) % n) as usize]
    }

    /// `a^{p^e}`.
    pub fn frobenius(&self, a: Coeff, e: u32) -> Coeff {
        let mut v = a;
        for _ in 0..e % self.0.r {
            v = self.0.frob[v as usize];
        }
        v
    }

    /// The unique `b` with `b^{p^e} = a`, obtained by applying
    /// `x -> x^{p^{r-1}}` `e` times (reduced mod `r`, the order of Frobenius).
    pub fn pth_root(&self, a: Coeff, e: u32) -> Coeff {
        let mut v = a;
        for _ in 0..e % self.0.r {
            v = self.0.root[v as usize];
        }
        v
    }

    pub fn elements(&self) -> impl Iterator<Item = Coeff> {
        0..self.0.q
    }

    /// Nonzero elements.
    pub fn units(&self) -> impl Iterator<Item = Coeff> {
        1..self.0.q
    }

    /// True when `a` lies in the prime subfield.
    pub fn in_prime_field(&self, a: Coeff) -> bool {
        a < self.0.p
    }

    pub fn element(&self, value: Coeff) -> FieldElement {
        assert!(self.is_valid(value), "element encoding out of range");
        FieldElement {
            field: self.clone(),
            value,
        }
    }

    /// Canonical text: an integer in `[0, p)` for prime fields, otherwise a
    /// polynomial in `g` with descending powers, e.g. `g+1`.
    pub fn format(&self, a: Coeff) -> String {
        let d = &*self.0;
        if d.r == 1 {
            return a.to_string();
        }
        let ds = digits(a, d.p, d.r);
        let parts: Vec<String> = ds
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| monomial_in_g(c, k as u32))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }

    /// Parses integers (any sign, reduced mod `p`) and, for extension
    /// fields, sums of terms `[c][*]g[^k]`.
    pub fn parse(&self, text: &str) -> Result<Coeff, FieldError> {
        let err = |reason: &str| FieldError::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err("empty literal"));
        }
        let mut acc = 0;
        let mut rest = s.as_str();
        let mut first = true;
        while !rest.is_empty() {
            let mut negative = false;
            if let Some(r) = rest.strip_prefix('+') {
                rest = r;
            } else if let Some(r) = rest.strip_prefix('-') {
                rest = r;
                negative = true;
            } else if !first {
                return Err(err("expected '+' or '-'"));
            }
            first = false;
            let end = rest[1.min(rest.len())..]
                .find(['+', '-'])
                .map(|i| i + 1)
                .unwrap_or(rest.len());
            let term = &rest[..end];
            rest = &rest[end..];
            let mut value = self.parse_term(term).ok_or_else(|| err("malformed term"))?;
            if negative {
                value = self.neg(value);
            }
            acc = self.add(acc, value);
        }
        Ok(acc)
    }

    fn parse_term(&self, term: &str) -> Option<Coeff> {
        let (num, gpart) = match term.find('g') {
            Some(i) => (&term[..i], Some(&term[i + 1..])),
            None => (term, None),
        };
        let num = num.strip_suffix('*').unwrap_or(num);
        let coeff = if num.is_empty() {
            gpart?;
            1
        } else {
            let n: i128 = num.parse().ok()?;
            n.rem_euclid(self.0.p as i128) as Coeff
        };
        let Some(g) = gpart else {
            return Some(coeff);
        };
        if self.0.r == 1 {
            return None;
        }
        let k: u64 = if g.is_empty() {
            1
        } else {
            g.strip_prefix('^')?.parse().ok()?
        };
        Some(self.mul(coeff, self.pow(self.generator(), k)))
    }
}

fn check_order(p: u32, r: u32) -> Result<(), FieldError> {
    let q = (p as u64).checked_pow(r).unwrap_or(u64::MAX);
    if q > MAX_FIELD_ORDER {
        Err(FieldError::TooLarge(q))
    } else {
        Ok(())
    }
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn build_descriptor(p: u32, modulus: Vec<u32>) -> FieldDescriptor {
    let r = modulus.len() as u32 - 1;
    let q = p.pow(r);
    let n = q - 1;
    let mul_enc = |a: u32, b: u32| -> u32 {
        undigits(&mulmod(&digits(a, p, r), &digits(b, p, r), &modulus, p), p)
    };
    let pow_enc = |a: u32, mut k: u32| -> u32 {
        let (mut base, mut acc) = (a, 1u32);
        while k > 0 {
            if k & 1 == 1 {
                acc = mul_enc(acc, base);
            }
            base = mul_enc(base, base);
            k >>= 1;
        }
        acc
    };
    let factors = prime_factors(n);
    let primitive = if q == 2 {
        1
    } else {
        (2..q)
            .find(|&c| factors.iter().all(|&l| pow_enc(c, n / l) != 1))
            .expect("multiplicative group of a finite field is cyclic")
    };
    let mut exp = vec![0; 2 * n as usize];
    let mut log = vec![0; q as usize];
    let mut x = 1;
    for i in 0..n {
        exp[i as usize] = x;
        log[x as usize] = i;
        x = mul_enc(x, primitive);
    }
    for i in n..2 * n {
        exp[i as usize] = exp[(i - n) as usize];
    }
    let neg: Vec<Coeff> = (0..q)
        .map(|a| {
            let ds: Vec<u32> = digits(a, p, r).iter().map(|&d| (p - d) % p).collect();
            undigits(&ds, p)
        })
        .collect();
    let add = (r > 1 && q <= ADD_TABLE_LIMIT).then(|| {
        let mut t = vec![0u16; (q * q) as usize];
        for a in 0..q {
            let da = digits(a, p, r);
            for b in 0..q {
                let db = digits(b, p, r);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                t[(a * q + b) as usize] = undigits(&s, p) as u16;
            }
        }
        t
    });
    let frob: Vec<Coeff> = (0..q).map(|a| pow_enc(a, p)).collect();
    let root_exp = p.pow(r - 1);
    let root: Vec<Coeff> = (0..q).map(|a| pow_enc(a, root_exp)).collect();
    FieldDescriptor {
        p,
        r,
        q,
        modulus,
        exp,
        log,
        neg,
        add,
        frob,
        root,
    }
}

/// Operation selector for [`field_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// A field element bundled with the field it belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    value: Coeff,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn value(&self) -> Coeff {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn pth_root(&self, e: u32) -> FieldElement {
        self.field.element(self.field.pth_root(self.value, e))
    }

    pub fn frobenius(&self, e: u32) -> FieldElement {
        self.field.element(self.field.frobenius(self.value, e))
    }

    pub fn pow(&self, k: u64) -> FieldElement {
        self.field.element(self.field.pow(self.value, k))
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        self.field
            .inv(self.value)
            .map(|v| self.field.element(v))
            .ok_or(FieldError::DivisionByZero)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format(self.value))
    }
}

/// Checked binary arithmetic on two elements of the same field.
pub fn field_arith(
    a: &FieldElement,
    b: &FieldElement,
    op: FieldOp,
) -> Result<FieldElement, FieldError> {
    if a.field != b.field {
        return Err(FieldError::FieldMismatch(a.field.name(), b.field.name()));
    }
    let k = &a.field;
    let v = match op {
        FieldOp::Add => k.add(a.value, b.value),
        FieldOp::Sub => k.sub(a.value, b.value),
        FieldOp::Mul => k.mul(a.value, b.value),
        FieldOp::Div => k.div(a.value, b.value).ok_or(FieldError::DivisionByZero)?,
    };
    Ok(k.element(v))
}
