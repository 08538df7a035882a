//! Ideals of `K[x_1, ..., x_n]` and the Buchberger engine that decides
//! membership, containment and equality for them.
//!
//! The engine runs Buchberger's algorithm with the Gebauer–Möller installation
//! of the coprime and chain criteria and the normal selection strategy (the
//! pair with the smallest lcm is processed first, ties going to the pair
//! created first). Results are reduced and monic, so two ideals are equal
//! exactly when their reduced bases for a common order coincide.

use std::cmp::Ordering;
use std::sync::OnceLock;

use thiserror::Error;

use crate::ff::{Coeff, Field};
use crate::poly::{Monomial, MonomialOrder, Polynomial, Ring};

pub const DEFAULT_DEGREE_GUARD: u32 = 512;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroebnerError {
    #[error("Gröbner computation reached degree {degree}, above the guard {guard}")]
    DegreeGuard { degree: u32, guard: u32 },
    #[error("generators live in different rings")]
    RingMismatch,
    #[error("no generators given; the ring is unknown")]
    NoGenerators,
    #[error("minimal generators need homogeneous input")]
    NotHomogeneous,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroebnerConfig {
    pub order: MonomialOrder,
    /// Largest S-pair lcm degree the engine will process.
    pub degree_guard: u32,
}

impl Default for GroebnerConfig {
    fn default() -> Self {
        GroebnerConfig {
            order: MonomialOrder::Grevlex,
            degree_guard: DEFAULT_DEGREE_GUARD,
        }
    }
}

impl GroebnerConfig {
    pub fn with_order(order: MonomialOrder) -> Self {
        GroebnerConfig {
            order,
            ..Default::default()
        }
    }
}

/// Terms sorted ascending under the active order; the leading term is last.
type Terms = Vec<(Monomial, Coeff)>;

struct Engine<'a> {
    field: &'a Field,
    order: MonomialOrder,
}

impl Engine<'_> {
    fn to_terms(&self, f: &Polynomial) -> Terms {
        let mut t = f.terms().to_vec();
        t.sort_unstable_by(|a, b| self.order.cmp(&a.0, &b.0));
        t
    }

    fn make_monic(&self, mut t: Terms) -> Terms {
        if let Some(&(_, lc)) = t.last() {
            if lc != 1 {
                let inv = self.field.inv(lc).unwrap();
                for term in t.iter_mut() {
                    term.1 = self.field.mul(term.1, inv);
                }
            }
        }
        t
    }

    /// `a + c * m * b`, both ascending.
    fn add_scaled(
        &self,
        a: &[(Monomial, Coeff)],
        b: &[(Monomial, Coeff)],
        c: Coeff,
        m: &Monomial,
    ) -> Terms {
        let k = self.field;
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() {
                out.extend_from_slice(&a[i..]);
                break;
            }
            let bm = b[j].0.mul(m);
            if i == a.len() {
                out.push((bm, k.mul(b[j].1, c)));
                j += 1;
                continue;
            }
            match self.order.cmp(&a[i].0, &bm) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((bm, k.mul(b[j].1, c)));
                    j += 1;
                }
                Ordering::Equal => {
                    let s = k.add(a[i].1, k.mul(b[j].1, c));
                    if s != 0 {
                        out.push((bm, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    /// Full reduction of `f` by monic divisors.
    fn reduce(&self, mut work: Terms, divisors: &[&Terms]) -> Terms {
        let mut rem: Terms = Vec::new();
        while let Some(&(m, c)) = work.last() {
            let divisor = divisors
                .iter()
                .find(|g| g.last().is_some_and(|(lm, _)| lm.divides(&m)));
            match divisor {
                Some(g) => {
                    let (lm, _) = *g.last().unwrap();
                    let q = m.div(&lm);
                    let body = &g[..g.len() - 1];
                    work.pop();
                    work = self.add_scaled(&work, body, self.field.neg(c), &q);
                }
                None => {
                    rem.push(work.pop().unwrap());
                }
            }
        }
        rem.reverse();
        rem
    }

    fn s_poly(&self, f: &Terms, g: &Terms) -> Terms {
        let lf = f.last().unwrap().0;
        let lg = g.last().unwrap().0;
        let l = lf.lcm(&lg);
        let a: Terms = f[..f.len() - 1]
            .iter()
            .map(|&(m, c)| (m.mul(&l.div(&lf)), c))
            .collect();
        self.add_scaled(&a, &g[..g.len() - 1], self.field.neg(1), &l.div(&lg))
    }
}

#[derive(Clone, Copy)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    seq: u64,
}

fn lm(t: &Terms) -> Monomial {
    t.last().unwrap().0
}

/// Reduced Gröbner basis of the ideal generated by `gens`.
pub fn buchberger(
    gens: &[Polynomial],
    config: &GroebnerConfig,
) -> Result<GroebnerBasis, GroebnerError> {
    let Some(first) = gens.first() else {
        return Err(GroebnerError::NoGenerators);
    };
    let ring = first.ring().clone();
    if gens.iter().any(|g| *g.ring() != ring) {
        return Err(GroebnerError::RingMismatch);
    }
    buchberger_in(&ring, gens, config)
}

fn buchberger_in(
    ring: &Ring,
    gens: &[Polynomial],
    config: &GroebnerConfig,
) -> Result<GroebnerBasis, GroebnerError> {
    let engine = Engine {
        field: ring.field(),
        order: config.order,
    };
    let unit = || GroebnerBasis {
        ring: ring.clone(),
        order: config.order,
        elems: vec![vec![(Monomial::one(), 1)]],
    };
    let mut input: Vec<Terms> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| engine.make_monic(engine.to_terms(g)))
        .collect();
    if input.iter().any(|t| lm(t).is_one()) {
        return Ok(unit());
    }
    // Smaller leading monomials first keeps the initial reductions cheap.
    input.sort_by(|a, b| config.order.cmp(&lm(a), &lm(b)));

    let mut polys: Vec<Terms> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();
    let mut seq = 0u64;

    let mut update =
        |polys: &mut Vec<Terms>, active: &mut Vec<usize>, pairs: &mut Vec<Pair>, h: Terms| {
            let hm = lm(&h);
            let hi = polys.len();
            polys.push(h);
            let cands: Vec<(usize, Monomial)> = active
                .iter()
                .map(|&g| (g, hm.lcm(&lm(&polys[g]))))
                .collect();
            // Chain criterion among the new pairs.
            let mut keep = Vec::new();
            for (idx, &(g, l)) in cands.iter().enumerate() {
                let coprime = hm.is_coprime(&lm(&polys[g]));
                let dominated_later = cands[idx + 1..].iter().any(|(_, l2)| l2.divides(&l));
                let dominated_kept = keep
                    .iter()
                    .any(|&(_, l2): &(usize, Monomial)| l2.divides(&l));
                if coprime || (!dominated_later && !dominated_kept) {
                    keep.push((g, l));
                }
            }
            // Old pairs whose lcm is strictly divisible through h.
            pairs.retain(|pr| {
                !(hm.divides(&pr.lcm)
                    && hm.lcm(&lm(&polys[pr.i])) != pr.lcm
                    && hm.lcm(&lm(&polys[pr.j])) != pr.lcm)
            });
            for (g, l) in keep {
                if !hm.is_coprime(&lm(&polys[g])) {
                    pairs.push(Pair {
                        i: g,
                        j: hi,
                        lcm: l,
                        seq,
                    });
                    seq += 1;
                }
            }
            active.retain(|&g| !hm.divides(&lm(&polys[g])));
            active.push(hi);
        };

    for t in input {
        let divisors: Vec<&Terms> = active.iter().map(|&g| &polys[g]).collect();
        let h = engine.reduce(t, &divisors);
        if h.is_empty() {
            continue;
        }
        let h = engine.make_monic(h);
        if lm(&h).is_one() {
            return Ok(unit());
        }
        update(&mut polys, &mut active, &mut pairs, h);
    }

    while !pairs.is_empty() {
        let best = (0..pairs.len())
            .min_by(|&a, &b| {
                config
                    .order
                    .cmp(&pairs[a].lcm, &pairs[b].lcm)
                    .then(pairs[a].seq.cmp(&pairs[b].seq))
            })
            .unwrap();
        let pair = pairs.swap_remove(best);
        if pair.lcm.degree() > config.degree_guard {
            return Err(GroebnerError::DegreeGuard {
                degree: pair.lcm.degree(),
                guard: config.degree_guard,
            });
        }
        let s = engine.s_poly(&polys[pair.i], &polys[pair.j]);
        let divisors: Vec<&Terms> = active.iter().map(|&g| &polys[g]).collect();
        let h = engine.reduce(s, &divisors);
        if h.is_empty() {
            continue;
        }
        let h = engine.make_monic(h);
        if lm(&h).is_one() {
            return Ok(unit());
        }
        update(&mut polys, &mut active, &mut pairs, h);
    }

    // `active` is minimal; inter-reduce the tails.
    let basis: Vec<Terms> = active.iter().map(|&g| polys[g].clone()).collect();
    let mut reduced: Vec<Terms> = Vec::with_capacity(basis.len());
    for (idx, g) in basis.iter().enumerate() {
        let others: Vec<&Terms> = basis
            .iter()
            .enumerate()
            .filter(|&(o, _)| o != idx)
            .map(|(_, t)| t)
            .collect();
        let head = *g.last().unwrap();
        let mut tail = engine.reduce(g[..g.len() - 1].to_vec(), &others);
        tail.push(head);
        reduced.push(tail);
    }
    reduced.sort_by(|a, b| config.order.cmp(&lm(a), &lm(b)));
    Ok(GroebnerBasis {
        ring: ring.clone(),
        order: config.order,
        elems: reduced,
    })
}

/// A reduced, monic Gröbner basis for a fixed monomial order.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    ring: Ring,
    order: MonomialOrder,
    /// Each element ascending; elements sorted by leading monomial.
    elems: Vec<Terms>,
}

impl PartialEq for GroebnerBasis {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.order == other.order && self.elems == other.elems
    }
}

impl GroebnerBasis {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.elems.len() == 1 && lm(&self.elems[0]).is_one()
    }

    /// Basis elements, ascending by leading monomial.
    pub fn generators(&self) -> Vec<Polynomial> {
        self.elems
            .iter()
            .map(|t| Polynomial::from_terms(&self.ring, t.iter().copied()))
            .collect()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.elems.iter().map(lm).collect()
    }

    pub fn reduce(&self, f: &Polynomial) -> Polynomial {
        let engine = Engine {
            field: self.ring.field(),
            order: self.order,
        };
        let divisors: Vec<&Terms> = self.elems.iter().collect();
        let rem = engine.reduce(engine.to_terms(f), &divisors);
        Polynomial::from_terms(&self.ring, rem)
    }

    pub fn contains(&self, f: &Polynomial) -> bool {
        self.reduce(f).is_zero()
    }
}

/// Remainder of `f` on division by `gb`; zero exactly when `f` is in the ideal.
pub fn normal_form(f: &Polynomial, gb: &GroebnerBasis) -> Polynomial {
    gb.reduce(f)
}

/// A finitely generated ideal with a lazily computed reduced Gröbner basis.
#[derive(Debug)]
pub struct Ideal {
    ring: Ring,
    generators: Vec<Polynomial>,
    config: GroebnerConfig,
    gb: OnceLock<GroebnerBasis>,
}

impl Clone for Ideal {
    fn clone(&self) -> Self {
        let gb = OnceLock::new();
        if let Some(b) = self.gb.get() {
            let _ = gb.set(b.clone());
        }
        Ideal {
            ring: self.ring.clone(),
            generators: self.generators.clone(),
            config: self.config,
            gb,
        }
    }
}

impl Ideal {
    pub fn new(ring: &Ring, generators: Vec<Polynomial>) -> Result<Ideal, GroebnerError> {
        Ideal::with_config(ring, generators, GroebnerConfig::default())
    }

    pub fn with_config(
        ring: &Ring,
        generators: Vec<Polynomial>,
        config: GroebnerConfig,
    ) -> Result<Ideal, GroebnerError> {
        if generators.iter().any(|g| g.ring() != ring) {
            return Err(GroebnerError::RingMismatch);
        }
        Ok(Ideal {
            ring: ring.clone(),
            generators,
            config,
            gb: OnceLock::new(),
        })
    }

    pub fn unit(ring: &Ring) -> Ideal {
        Ideal::new(ring, vec![ring.one()]).unwrap()
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn config(&self) -> &GroebnerConfig {
        &self.config
    }

    /// Computed on first use and cached.
    pub fn groebner_basis(&self) -> Result<&GroebnerBasis, GroebnerError> {
        if let Some(gb) = self.gb.get() {
            return Ok(gb);
        }
        let gb = buchberger_in(&self.ring, &self.generators, &self.config)?;
        debug_assert!(self.generators.iter().all(|g| gb.contains(g)));
        let _ = self.gb.set(gb);
        Ok(self.gb.get().unwrap())
    }

    /// Canonical generators: the reduced basis in ascending order.
    pub fn reduced_generators(&self) -> Result<Vec<Polynomial>, GroebnerError> {
        Ok(self.groebner_basis()?.generators())
    }

    pub fn is_unit(&self) -> Result<bool, GroebnerError> {
        Ok(self.groebner_basis()?.is_unit())
    }

    pub fn is_zero(&self) -> bool {
        self.generators.iter().all(|g| g.is_zero())
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool, GroebnerError> {
        if *f.ring() != self.ring {
            return Err(GroebnerError::RingMismatch);
        }
        Ok(self.groebner_basis()?.contains(f))
    }

    /// `other ⊆ self`.
    pub fn contains_ideal(&self, other: &Ideal) -> Result<bool, GroebnerError> {
        if other.ring != self.ring {
            return Err(GroebnerError::RingMismatch);
        }
        let gb = self.groebner_basis()?;
        Ok(other.generators.iter().all(|g| gb.contains(g)))
    }

    pub fn equals(&self, other: &Ideal) -> Result<bool, GroebnerError> {
        if other.ring != self.ring {
            return Err(GroebnerError::RingMismatch);
        }
        if self.config.order == other.config.order {
            Ok(self.groebner_basis()?.elems == other.groebner_basis()?.elems)
        } else {
            Ok(self.contains_ideal(other)? && other.contains_ideal(self)?)
        }
    }

    /// The first reduced-basis element of `self` that is not in `other`.
    pub fn first_non_member(&self, other: &Ideal) -> Result<Option<Polynomial>, GroebnerError> {
        let theirs = other.groebner_basis()?;
        Ok(self
            .groebner_basis()?
            .generators()
            .into_iter()
            .find(|g| !theirs.contains(g)))
    }

    /// A minimal generating set of a homogeneous ideal: generators are taken
    /// by increasing degree and kept when not already in the span of the
    /// ones kept so far.
    pub fn minimal_homogeneous_generators(&self) -> Result<Vec<Polynomial>, GroebnerError> {
        let mut gens: Vec<Polynomial> = self
            .reduced_generators()?
            .into_iter()
            .filter(|g| !g.is_zero())
            .collect();
        if gens.iter().any(|g| !g.is_homogeneous()) {
            return Err(GroebnerError::NotHomogeneous);
        }
        gens.sort_by_key(|g| g.total_degree());
        let mut kept: Vec<Polynomial> = Vec::new();
        for g in gens {
            let redundant = !kept.is_empty()
                && Ideal::with_config(&self.ring, kept.clone(), self.config)?.contains(&g)?;
            if !redundant {
                kept.push(g);
            }
        }
        Ok(kept)
    }

    /// Ideal generated by the images of the generators under `map`.
    pub fn map_generators<F>(&self, target: &Ring, map: F) -> Result<Ideal, GroebnerError>
    where
        F: FnMut(&Polynomial) -> Polynomial,
    {
        let gens = self.generators.iter().map(map).collect();
        Ideal::with_config(target, gens, self.config)
    }
}

pub fn ideal_equal(a: &Ideal, b: &Ideal) -> Result<bool, GroebnerError> {
    a.equals(b)
}

/// `b ⊆ a`.
pub fn ideal_contains(a: &Ideal, b: &Ideal) -> Result<bool, GroebnerError> {
    a.contains_ideal(b)
}

pub fn ideal_member(f: &Polynomial, a: &Ideal) -> Result<bool, GroebnerError> {
    a.contains(f)
}
