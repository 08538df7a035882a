//! Reference implementations used as oracles by the integration tests.
//!
//! Nothing here calls into the Gröbner or decomposition code of the crate;
//! only field arithmetic and the polynomial container are shared.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tauideal::ff::{Coeff, Field};
use tauideal::poly::{Monomial, Polynomial, Ring};

/// Dense exponent-vector polynomial; the `BTreeMap` order is lex, so the
/// last entry is the lex-leading term.
pub type Dense = BTreeMap<Vec<u32>, Coeff>;

pub fn to_dense(f: &Polynomial) -> Dense {
    let n = f.ring().nvars();
    f.terms()
        .iter()
        .map(|(m, c)| (m.exponents(n), *c))
        .collect()
}

pub fn from_dense(ring: &Ring, d: &Dense) -> Polynomial {
    Polynomial::from_terms(
        ring,
        d.iter().map(|(e, &c)| (Monomial::from_exponents(e), c)),
    )
}

fn axpy(k: &Field, acc: &mut Dense, c: Coeff, shift: &[u32], g: &Dense) {
    for (e, &gc) in g {
        let key: Vec<u32> = e.iter().zip(shift).map(|(a, b)| a + b).collect();
        let v = k.add(*acc.get(&key).unwrap_or(&0), k.mul(c, gc));
        if v == 0 {
            acc.remove(&key);
        } else {
            acc.insert(key, v);
        }
    }
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn monic(k: &Field, f: &Dense) -> Dense {
    let lc = *f.values().next_back().unwrap();
    let inv = k.inv(lc).unwrap();
    f.iter().map(|(e, &c)| (e.clone(), k.mul(c, inv))).collect()
}

/// Remainder of `f` modulo `g` (monic) in lex order.
pub fn lex_reduce(k: &Field, f: &Dense, g: &[Dense]) -> Dense {
    let mut p = f.clone();
    let mut r = Dense::new();
    while let Some((e, &c)) = p.iter().next_back() {
        let e = e.clone();
        match g
            .iter()
            .find(|gi| divides(gi.keys().next_back().unwrap(), &e))
        {
            Some(gi) => {
                let lt = gi.keys().next_back().unwrap();
                let shift: Vec<u32> = e.iter().zip(lt).map(|(a, b)| a - b).collect();
                axpy(k, &mut p, k.neg(c), &shift, gi);
            }
            None => {
                p.remove(&e);
                r.insert(e, c);
            }
        }
    }
    r
}

/// Textbook Buchberger in lex order: lowest-degree pair first, with only
/// the coprime-leading-term criterion.
pub fn lex_groebner(k: &Field, gens: &[Polynomial]) -> Vec<Dense> {
    let mut g: Vec<Dense> = gens
        .iter()
        .filter(|f| !f.is_zero())
        .map(|f| monic(k, &to_dense(f)))
        .collect();
    let mut pairs: Vec<(usize, usize)> = (0..g.len())
        .flat_map(|j| (0..j).map(move |i| (i, j)))
        .collect();
    let lcm_degree = |g: &[Dense], (i, j): (usize, usize)| -> u32 {
        let a = g[i].keys().next_back().unwrap();
        let b = g[j].keys().next_back().unwrap();
        a.iter().zip(b).map(|(x, y)| *x.max(y)).sum()
    };
    while !pairs.is_empty() {
        let pos = (0..pairs.len())
            .min_by_key(|&t| lcm_degree(&g, pairs[t]))
            .unwrap();
        let (i, j) = pairs.swap_remove(pos);
        let a = g[i].keys().next_back().unwrap().clone();
        let b = g[j].keys().next_back().unwrap().clone();
        if a.iter().zip(&b).all(|(x, y)| *x == 0 || *y == 0) {
            continue;
        }
        let lcm: Vec<u32> = a.iter().zip(&b).map(|(x, y)| *x.max(y)).collect();
        let mut s = Dense::new();
        let sa: Vec<u32> = lcm.iter().zip(&a).map(|(l, x)| l - x).collect();
        let sb: Vec<u32> = lcm.iter().zip(&b).map(|(l, x)| l - x).collect();
        axpy(k, &mut s, 1, &sa, &g[i]);
        axpy(k, &mut s, k.neg(1), &sb, &g[j]);
        let r = lex_reduce(k, &s, &g);
        if !r.is_empty() {
            let new = g.len();
            g.push(monic(k, &r));
            pairs.extend((0..new).map(|i| (i, new)));
        }
    }
    g
}

pub fn lex_member(f: &Polynomial, gens: &[Polynomial]) -> bool {
    let k = f.field();
    let g = lex_groebner(k, gens);
    lex_reduce(k, &to_dense(f), &g).is_empty()
}

fn monomials_up_to(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for a in 0..=left {
            cur.push(a);
            rec(n, left - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

/// Decides whether `f` lies in the span of `{m g_i : deg(m g_i) <= bound}`.
/// For homogeneous `f` and generators this is exact with `bound = deg f`;
/// otherwise a `true` answer is a certificate of membership and `false`
/// only means no certificate of that degree exists.
pub fn macaulay_member(f: &Polynomial, gens: &[Polynomial], bound: u32) -> bool {
    let k = f.field();
    let n = f.ring().nvars();
    let mut columns: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut col = |e: Vec<u32>| {
        let len = columns.len();
        *columns.entry(e).or_insert(len)
    };
    let mut rows: Vec<Vec<(usize, Coeff)>> = Vec::new();
    for g in gens.iter().filter(|g| !g.is_zero()) {
        let gd = g.total_degree().unwrap();
        if gd > bound {
            continue;
        }
        let dense = to_dense(g);
        for m in monomials_up_to(n, bound - gd) {
            let row = dense
                .iter()
                .map(|(e, &c)| (col(e.iter().zip(&m).map(|(a, b)| a + b).collect()), c))
                .collect();
            rows.push(row);
        }
    }
    let target: Vec<(usize, Coeff)> = to_dense(f).into_iter().map(|(e, c)| (col(e), c)).collect();
    let width = columns.len();
    let densify = |r: &[(usize, Coeff)]| {
        let mut v = vec![0; width];
        for &(i, c) in r {
            v[i] = k.add(v[i], c);
        }
        v
    };
    let mut matrix: Vec<Vec<Coeff>> = rows.iter().map(|r| densify(r)).collect();
    let mut pivots: Vec<(usize, Vec<Coeff>)> = Vec::new();
    for c in 0..width {
        let Some(pos) = matrix.iter().position(|r| r[c] != 0) else {
            continue;
        };
        let row = matrix.swap_remove(pos);
        let inv = k.inv(row[c]).unwrap();
        let row: Vec<Coeff> = row.iter().map(|&x| k.mul(x, inv)).collect();
        for r in matrix.iter_mut() {
            if r[c] != 0 {
                let fac = r[c];
                for (x, &y) in r.iter_mut().zip(&row) {
                    *x = k.sub(*x, k.mul(fac, y));
                }
            }
        }
        pivots.push((c, row));
    }
    let mut t = densify(&target);
    for (c, row) in &pivots {
        if t[*c] != 0 {
            let fac = t[*c];
            for (x, &y) in t.iter_mut().zip(row) {
                *x = k.sub(*x, k.mul(fac, y));
            }
        }
    }
    t.iter().all(|&x| x == 0)
}

/// `r` with `r^(p^e) = c`, found by search.
pub fn brute_root(k: &Field, c: Coeff, e: u32) -> Coeff {
    let q = k.characteristic().pow(e) as u64;
    k.elements()
        .find(|&r| k.pow(r, q) == c)
        .expect("Frobenius is bijective on a finite field")
}

/// The coefficients `s_alpha` of `f = sum s_alpha^(p^e) x^alpha`, computed
/// term by term with searched roots.
pub fn brute_decompose(f: &Polynomial, e: u32) -> BTreeMap<Vec<u32>, Polynomial> {
    let k = f.field();
    let ring = f.ring();
    let n = ring.nvars();
    let q = k.characteristic().pow(e);
    let mut parts: BTreeMap<Vec<u32>, Vec<(Monomial, Coeff)>> = BTreeMap::new();
    for (m, c) in f.terms() {
        let exps = m.exponents(n);
        let alpha: Vec<u32> = exps.iter().map(|a| a % q).collect();
        let gamma: Vec<u32> = exps.iter().map(|a| a / q).collect();
        parts
            .entry(alpha)
            .or_default()
            .push((Monomial::from_exponents(&gamma), brute_root(k, *c, e)));
    }
    parts
        .into_iter()
        .map(|(a, t)| (a, Polynomial::from_terms(ring, t)))
        .collect()
}

pub fn random_coeff(rng: &mut ChaCha8Rng, k: &Field, nonzero: bool) -> Coeff {
    if nonzero {
        rng.gen_range(1..k.order())
    } else {
        rng.gen_range(0..k.order())
    }
}

pub fn random_monomial(rng: &mut ChaCha8Rng, n: usize, max_deg: u32) -> Monomial {
    let d = rng.gen_range(0..=max_deg);
    let mut e = vec![0u32; n];
    for _ in 0..d {
        e[rng.gen_range(0..n)] += 1;
    }
    Monomial::from_exponents(&e)
}

pub fn random_poly(rng: &mut ChaCha8Rng, ring: &Ring, terms: usize, max_deg: u32) -> Polynomial {
    let k = ring.field();
    Polynomial::from_terms(
        ring,
        (0..terms).map(|_| {
            (
                random_monomial(rng, ring.nvars(), max_deg),
                random_coeff(rng, k, true),
            )
        }),
    )
}

pub fn random_nonzero_poly(
    rng: &mut ChaCha8Rng,
    ring: &Ring,
    terms: usize,
    max_deg: u32,
) -> Polynomial {
    loop {
        let f = random_poly(rng, ring, terms, max_deg);
        if !f.is_zero() {
            return f;
        }
    }
}

pub fn random_homogeneous(rng: &mut ChaCha8Rng, ring: &Ring, terms: usize, deg: u32) -> Polynomial {
    let k = ring.field();
    let n = ring.nvars();
    Polynomial::from_terms(
        ring,
        (0..terms).map(|_| {
            let mut e = vec![0u32; n];
            for _ in 0..deg {
                e[rng.gen_range(0..n)] += 1;
            }
            (Monomial::from_exponents(&e), random_coeff(rng, k, true))
        }),
    )
}

/// A random linear form `c_0 + sum c_j x_j` with at least one `c_j != 0`.
pub fn random_linear(rng: &mut ChaCha8Rng, ring: &Ring) -> tauideal::poly::LinearForm {
    let k = ring.field();
    loop {
        let coeffs: Vec<Coeff> = (0..=ring.nvars())
            .map(|_| random_coeff(rng, k, false))
            .collect();
        if coeffs[1..].iter().any(|&c| c != 0) {
            return tauideal::poly::LinearForm::new(ring, coeffs).unwrap();
        }
    }
}
