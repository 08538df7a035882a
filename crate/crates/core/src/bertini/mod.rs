//! Bertini-type comparisons for test ideals.
//!
//! Given a pair `(A^n, f^{1/p^e})` and a hyperplane `H = V(l)`:
//!
//! * the augmentation test compares `τ(f^{1/p^e})` with `τ((l f)^{1/p^e})`;
//! * the restriction test compares the image of `τ(f^{1/p^e})` in
//!   `S/(l) ≅ K[x_1, .., x̂_j, .., x_n]` with the test ideal computed on `H`
//!   itself, after eliminating `x_j` through `l = 0`.
//!
//! The module also builds the slice counterexample families, checks their
//! independence condition, and detects the homogeneous-slice situation in
//! which the restriction comparison is predicted to fail.

mod scan;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ff::{Coeff, Field};
use crate::frobenius::{frobenius_decompose, test_ideal, FrobeniusError, PairSpec};
use crate::groebner::{GroebnerError, Ideal};
use crate::poly::{LinearForm, Monomial, PolyError, Polynomial, Ring};

pub use scan::{
    dim2_probe, hyperplane_scan, BertiniVerdict, FilterSpec, ScanConfig, ScanMode, ScanReport,
    Tallies, DEFAULT_BUDGET, SCHEMA_VERSION,
};

/// Attempts made by [`build_cex_lines`] before giving up.
pub const LINE_ATTEMPTS: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BertiniError {
    #[error("cannot eliminate {var}: its coefficient in the hyperplane is zero")]
    ZeroCoefficient { var: String },
    #[error("f vanishes identically on the hyperplane {0}")]
    RestrictionVanishes(String),
    #[error("expected {expected} slice polynomials, got {found}")]
    WrongListLength { expected: usize, found: usize },
    #[error("slice f_{index} involves the last variable")]
    SliceUsesLastVariable { index: usize },
    #[error("the construction needs at least {min} variables, the ring has {found}")]
    TooFewVariables { min: usize, found: usize },
    #[error("{field} has only {available} distinct lines through the origin in {dim} variables; {needed} are needed")]
    FieldTooSmall {
        field: String,
        dim: usize,
        available: u64,
        needed: u64,
    },
    #[error("no line configuration satisfied the independence condition after {attempts} attempts ({detail})")]
    StarUnsatisfiable { attempts: usize, detail: String },
    #[error("enumerating {size} hyperplane candidates exceeds the budget {budget}; use sample mode or raise the budget")]
    BudgetExceeded { size: u64, budget: u64 },
    #[error("the probe works in two variables, the ring has {0}")]
    NotTwoDimensional(usize),
    #[error("homogeneous detection is defined for level e = 1, got {0}")]
    LevelMustBeOne(u32),
    #[error("invalid coefficient filter: {0}")]
    BadFilter(String),
    #[error("pair and hyperplane live in different rings")]
    RingMismatch,
    #[error(transparent)]
    Frobenius(#[from] FrobeniusError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Result of comparing two ideals, with a separating generator when they differ.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub equal: bool,
    /// A reduced-basis element of one ideal that is not in the other.
    pub witness: Option<Polynomial>,
}

#[derive(Clone, Debug)]
pub struct AugmentationOutcome {
    pub equal: bool,
    /// Element of `τ(f)` outside `τ(l f)`.
    pub witness: Option<Polynomial>,
    pub tau: Ideal,
    pub tau_product: Ideal,
}

#[derive(Clone, Debug)]
pub struct RestrictionOutcome {
    pub eliminated: usize,
    pub equal: bool,
    pub witness: Option<Polynomial>,
    /// `τ(f) · S/(l)`, written in the ring without the eliminated variable.
    pub restricted: Ideal,
    /// `τ(H, f|_H)`.
    pub intrinsic: Ideal,
}

fn compare(a: &Ideal, b: &Ideal) -> Result<Comparison, GroebnerError> {
    if a.equals(b)? {
        return Ok(Comparison {
            equal: true,
            witness: None,
        });
    }
    let witness = match a.first_non_member(b)? {
        Some(w) => Some(w),
        None => b.first_non_member(a)?,
    };
    Ok(Comparison {
        equal: false,
        witness,
    })
}

/// A pair with its test ideal computed once, shared by many hyperplane tests.
#[derive(Debug)]
pub struct PreparedPair {
    pair: PairSpec,
    tau: Ideal,
}

impl PreparedPair {
    pub fn new(pair: PairSpec) -> Result<PreparedPair, BertiniError> {
        let tau = test_ideal(&pair)?;
        Ok(PreparedPair { pair, tau })
    }

    pub fn pair(&self) -> &PairSpec {
        &self.pair
    }

    pub fn tau(&self) -> &Ideal {
        &self.tau
    }

    fn check_ring(&self, l: &LinearForm) -> Result<(), BertiniError> {
        if l.ring() != self.pair.ring() {
            Err(BertiniError::RingMismatch)
        } else {
            Ok(())
        }
    }

    pub fn augmentation(&self, l: &LinearForm) -> Result<AugmentationOutcome, BertiniError> {
        self.check_ring(l)?;
        let product = self.pair.polynomial() * &l.to_polynomial();
        let tau_product = test_ideal(&self.pair.with_polynomial(product)?)?;
        // τ(l f) ⊆ τ(f) always, so inequality is strict containment.
        let cmp = compare(&self.tau, &tau_product)?;
        Ok(AugmentationOutcome {
            equal: cmp.equal,
            witness: cmp.witness,
            tau: self.tau.clone(),
            tau_product,
        })
    }

    /// Highest-index variable whose coefficient in `l` is nonzero.
    pub fn default_elimination(l: &LinearForm) -> Option<usize> {
        (0..l.ring().nvars()).rev().find(|&j| l.var_coeff(j) != 0)
    }

    pub fn restriction(
        &self,
        l: &LinearForm,
        eliminate: Option<usize>,
    ) -> Result<RestrictionOutcome, BertiniError> {
        self.check_ring(l)?;
        let ring = self.pair.ring();
        let j = match eliminate {
            Some(j) => {
                ring.check_index(j)?;
                j
            }
            None => PreparedPair::default_elimination(l).ok_or(PolyError::DegenerateLinearForm)?,
        };
        let Some(solution) = l.solve_for(j) else {
            return Err(BertiniError::ZeroCoefficient {
                var: ring.var_name(j).to_string(),
            });
        };
        let h_ring = ring.without_var(j)?;
        let f_bar = self.pair.polynomial().eliminate(j, &solution, &h_ring)?;
        if f_bar.is_zero() {
            return Err(BertiniError::RestrictionVanishes(l.to_string()));
        }
        let restricted_gens = self
            .tau
            .reduced_generators()?
            .iter()
            .map(|g| g.eliminate(j, &solution, &h_ring))
            .collect::<Result<Vec<_>, _>>()?;
        let restricted = Ideal::new(&h_ring, restricted_gens)?;
        let intrinsic = test_ideal(&PairSpec::new(f_bar, self.pair.level())?)?;
        let cmp = compare(&restricted, &intrinsic)?;
        Ok(RestrictionOutcome {
            eliminated: j,
            equal: cmp.equal,
            witness: cmp.witness,
            restricted,
            intrinsic,
        })
    }
}

/// Compares `τ(f^{1/p^e})` with `τ((l f)^{1/p^e})`.
pub fn augmentation_test(
    pair: &PairSpec,
    l: &LinearForm,
) -> Result<AugmentationOutcome, BertiniError> {
    PreparedPair::new(pair.clone())?.augmentation(l)
}

/// Compares `τ(f^{1/p^e}) · O_H` with `τ(H, f|_H^{1/p^e})`, eliminating
/// `x_eliminate` (default: the highest-index variable with nonzero coefficient).
pub fn restriction_test(
    pair: &PairSpec,
    l: &LinearForm,
    eliminate: Option<usize>,
) -> Result<RestrictionOutcome, BertiniError> {
    PreparedPair::new(pair.clone())?.restriction(l, eliminate)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarOutcome {
    pub holds: bool,
    pub first_violation: Option<usize>,
}

/// Checks `f_i ∉ (f_0, .., f_{i-1}) + 𝔭 · (f_0, .., f_{q-1})` for every `i`,
/// where `𝔭 = (x_1, .., x_{n-1})` and `q = p^e` is the list length. The ideal
/// is taken in the expanded form `(f_0, .., f_{i-1}, x_j f_i, .., x_j f_{q-1})`.
pub fn star_check(slices: &[Polynomial], e: u32) -> Result<StarOutcome, BertiniError> {
    let Some(first) = slices.first() else {
        return Err(BertiniError::WrongListLength {
            expected: 1,
            found: 0,
        });
    };
    let ring = first.ring().clone();
    if slices.iter().any(|s| *s.ring() != ring) {
        return Err(BertiniError::RingMismatch);
    }
    let q = ring.field().characteristic().pow(e) as usize;
    if slices.len() != q {
        return Err(BertiniError::WrongListLength {
            expected: q,
            found: slices.len(),
        });
    }
    let n = ring.nvars();
    if n < 2 {
        return Err(BertiniError::TooFewVariables { min: 2, found: n });
    }
    if let Some(index) = slices.iter().position(|s| s.involves(n - 1)) {
        return Err(BertiniError::SliceUsesLastVariable { index });
    }
    for i in 0..q {
        let mut gens: Vec<Polynomial> = slices[..i].to_vec();
        for s in &slices[i..] {
            for j in 0..n - 1 {
                gens.push(s.mul_monomial(&Monomial::var(j)));
            }
        }
        let member = if gens.is_empty() {
            slices[i].is_zero()
        } else {
            Ideal::new(&ring, gens)?.contains(&slices[i])?
        };
        if member {
            return Ok(StarOutcome {
                holds: false,
                first_violation: Some(i),
            });
        }
    }
    Ok(StarOutcome {
        holds: true,
        first_violation: None,
    })
}

/// A pair built from slices `f_0, .., f_{q-1}`.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub pair: PairSpec,
    /// `f_i`, the coefficient of the basis element `(x_1..x_{n-1})^{q-1} x_n^i`.
    pub slices: Vec<Polynomial>,
    /// The lines through the origin the slices were built from, if any.
    pub lines: Vec<Polynomial>,
    /// Number of random configurations drawn (1 for deterministic builds).
    pub attempts: usize,
}

/// `f = (x_1 .. x_{n-1})^{q-1} sum_i f_i^q x_n^i` with `q = p^e`.
pub fn assemble_slices(slices: &[Polynomial], e: u32) -> Result<PairSpec, BertiniError> {
    let Some(first) = slices.first() else {
        return Err(BertiniError::WrongListLength {
            expected: 1,
            found: 0,
        });
    };
    let ring = first.ring().clone();
    let n = ring.nvars();
    if n < 2 {
        return Err(BertiniError::TooFewVariables { min: 2, found: n });
    }
    let q = ring.field().characteristic().pow(e);
    if slices.len() != q as usize {
        return Err(BertiniError::WrongListLength {
            expected: q as usize,
            found: slices.len(),
        });
    }
    let mut block = vec![q - 1; n - 1];
    block.push(0);
    let block = Monomial::from_exponents(&block);
    let mut f = ring.zero();
    for (i, s) in slices.iter().enumerate() {
        let mut xn = vec![0; n];
        xn[n - 1] = i as u32;
        let term = s
            .frobenius_power(e)
            .mul_monomial(&Monomial::from_exponents(&xn));
        f = &f + &term;
    }
    Ok(PairSpec::new(f.mul_monomial(&block), e)?)
}

/// The four-variable family in `K[x, y, z, w]`: slices `f_{p-1} = x` and
/// `f_{p-1-k} = y^{p-k} z^k` for `k = 1, .., p-1`.
pub fn build_cex_dim4(field: &Field) -> Result<Counterexample, BertiniError> {
    let ring = Ring::new(field.clone(), &["x", "y", "z", "w"])?;
    let p = field.characteristic();
    let mut slices = vec![ring.zero(); p as usize];
    slices[p as usize - 1] = ring.var(0);
    for k in 1..p {
        slices[(p - 1 - k) as usize] = ring.term(1, Monomial::from_exponents(&[0, p - k, k, 0]));
    }
    let pair = assemble_slices(&slices, 1)?;
    Ok(Counterexample {
        pair,
        slices,
        lines: Vec::new(),
        attempts: 1,
    })
}

/// Slices `f_i = prod_{j != i} l_j` from explicit lines in `x_1, .., x_{n-1}`.
pub fn cex_from_lines(lines: &[Polynomial], e: u32) -> Result<Counterexample, BertiniError> {
    let slices: Vec<Polynomial> = (0..lines.len())
        .map(|i| {
            lines
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(lines[i].ring().one(), |acc, (_, l)| &acc * l)
        })
        .collect();
    let pair = assemble_slices(&slices, e)?;
    Ok(Counterexample {
        pair,
        slices,
        lines: lines.to_vec(),
        attempts: 1,
    })
}

fn random_line(ring: &Ring, rng: &mut ChaCha8Rng) -> Vec<Coeff> {
    let k = ring.field();
    let m = ring.nvars() - 1;
    loop {
        let coeffs: Vec<Coeff> = (0..m).map(|_| rng.gen_range(0..k.order())).collect();
        if let Some(&lead) = coeffs.iter().find(|&&c| c != 0) {
            let inv = k.inv(lead).unwrap();
            return coeffs.iter().map(|&c| k.mul(c, inv)).collect();
        }
    }
}

/// Random pairwise distinct lines through the origin in `x_1, .., x_{n-1}`
/// (`p^e` of them), assembled into a pair whose slices satisfy the
/// independence condition. Configurations with coincident lines or failing
/// slices are redrawn up to [`LINE_ATTEMPTS`] times.
pub fn build_cex_lines(
    field: &Field,
    n: usize,
    e: u32,
    seed: u64,
) -> Result<Counterexample, BertiniError> {
    if n < 3 {
        return Err(BertiniError::TooFewVariables { min: 3, found: n });
    }
    if e == 0 {
        return Err(FrobeniusError::ZeroLevel.into());
    }
    let ring = Ring::with_indexed_vars(field.clone(), n)?;
    let q = field.order() as u64;
    let needed = (field.characteristic() as u64).pow(e);
    let available = (q.pow(n as u32 - 1) - 1) / (q - 1);
    if available < needed {
        return Err(BertiniError::FieldTooSmall {
            field: field.name(),
            dim: n - 1,
            available,
            needed,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_problem = String::new();
    for attempt in 1..=LINE_ATTEMPTS {
        let coeffs: Vec<Vec<Coeff>> = (0..needed).map(|_| random_line(&ring, &mut rng)).collect();
        let distinct =
            (0..coeffs.len()).all(|a| (a + 1..coeffs.len()).all(|b| coeffs[a] != coeffs[b]));
        if !distinct {
            last_problem = format!("attempt {attempt} drew coincident lines");
            continue;
        }
        let lines: Vec<Polynomial> = coeffs
            .iter()
            .map(|c| {
                Polynomial::from_terms(
                    &ring,
                    c.iter().enumerate().map(|(j, &cj)| (Monomial::var(j), cj)),
                )
            })
            .collect();
        let mut cex = cex_from_lines(&lines, e)?;
        let star = star_check(&cex.slices, e)?;
        if star.holds {
            cex.attempts = attempt;
            return Ok(cex);
        }
        last_problem = format!(
            "attempt {attempt}: slice {} lies in the comparison ideal",
            star.first_violation.unwrap()
        );
    }
    Err(BertiniError::StarUnsatisfiable {
        attempts: LINE_ATTEMPTS,
        detail: last_problem,
    })
}

#[derive(Clone, Debug)]
pub struct HomogeneousDetection {
    pub applicable: bool,
    /// Why the detector does not apply, when it does not.
    pub reason: Option<String>,
    /// The slices `f_0, .., f_{p-1}` when `f` has the block shape.
    pub slices: Vec<Polynomial>,
    pub degree: Option<u32>,
    pub span_dimension: usize,
}

impl HomogeneousDetection {
    fn not_applicable(
        reason: impl Into<String>,
        slices: Vec<Polynomial>,
        span_dimension: usize,
    ) -> Self {
        HomogeneousDetection {
            applicable: false,
            reason: Some(reason.into()),
            slices,
            degree: None,
            span_dimension,
        }
    }

    /// Whether the restriction comparison is predicted to fail on `V(l)`:
    /// the detector applies and `l` involves the last variable.
    pub fn predicts_failure(&self, l: &LinearForm) -> bool {
        self.applicable && l.var_coeff(l.ring().nvars() - 1) != 0
    }
}

/// Rank of the coefficient matrix of `polys` over their field.
pub(crate) fn span_dimension(polys: &[Polynomial]) -> usize {
    let Some(first) = polys.first() else {
        return 0;
    };
    let k = first.field();
    let mut monomials: Vec<Monomial> = polys
        .iter()
        .flat_map(|p| p.terms().iter().map(|(m, _)| *m))
        .collect();
    monomials.sort_by(|a, b| crate::poly::MonomialOrder::Grevlex.cmp(b, a));
    monomials.dedup();
    let mut rows: Vec<Vec<Coeff>> = polys
        .iter()
        .map(|p| monomials.iter().map(|m| p.coefficient(m)).collect())
        .collect();
    let mut rank = 0;
    for col in 0..monomials.len() {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = k.inv(rows[rank][col]).unwrap();
        let pivot_row: Vec<Coeff> = rows[rank].iter().map(|&c| k.mul(c, inv)).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let factor = row[col];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = k.sub(*x, k.mul(factor, y));
                }
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// Recognizes `f = (x_1..x_{n-1})^{p-1} sum_i f_i^p x_n^i` with all `f_i`
/// homogeneous of one degree and spanning at least a plane, the situation in
/// which restriction to a hyperplane involving `x_n` loses a generator in
/// that degree.
pub fn homogeneous_detect(pair: &PairSpec) -> Result<HomogeneousDetection, BertiniError> {
    if pair.level() != 1 {
        return Err(BertiniError::LevelMustBeOne(pair.level()));
    }
    let ring = pair.ring();
    let n = ring.nvars();
    if n < 2 {
        return Ok(HomogeneousDetection::not_applicable(
            "fewer than two variables",
            vec![],
            0,
        ));
    }
    let p = ring.field().characteristic();
    let d = frobenius_decompose(pair.polynomial(), 1)?;
    for (alpha, s) in d.iter() {
        if alpha.0[..n - 1].iter().any(|&a| a != p - 1) {
            return Ok(HomogeneousDetection::not_applicable(
                format!("basis element {alpha} lies outside the (x_1..x_(n-1))^(p-1) block"),
                vec![],
                0,
            ));
        }
        if s.involves(n - 1) {
            return Ok(HomogeneousDetection::not_applicable(
                format!("coefficient of {alpha} involves the last variable"),
                vec![],
                0,
            ));
        }
    }
    let slices: Vec<Polynomial> = (0..p)
        .map(|i| {
            let mut alpha = vec![p - 1; n - 1];
            alpha.push(i);
            d.coefficient(&alpha)
        })
        .collect();
    let span = span_dimension(&slices);
    let nonzero: Vec<&Polynomial> = slices.iter().filter(|s| !s.is_zero()).collect();
    if nonzero.iter().any(|s| !s.is_homogeneous()) {
        return Ok(HomogeneousDetection::not_applicable(
            "a slice is not homogeneous",
            slices,
            span,
        ));
    }
    let mut degrees: Vec<u32> = nonzero.iter().filter_map(|s| s.total_degree()).collect();
    degrees.dedup();
    degrees.sort_unstable();
    degrees.dedup();
    if degrees.len() > 1 {
        return Ok(HomogeneousDetection::not_applicable(
            format!("slices have mixed degrees {degrees:?}"),
            slices,
            span,
        ));
    }
    if span < 2 {
        return Ok(HomogeneousDetection::not_applicable(
            format!("slices span a space of dimension {span}"),
            slices,
            span,
        ));
    }
    Ok(HomogeneousDetection {
        applicable: true,
        reason: None,
        slices,
        degree: degrees.first().copied(),
        span_dimension: span,
    })
}
