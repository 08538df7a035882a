//! Hyperplane scans: run both comparisons over many hyperplanes and report.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{BertiniError, PreparedPair};
use crate::ff::Coeff;
use crate::frobenius::PairSpec;
use crate::poly::{LinearForm, Polynomial, Ring};

pub const DEFAULT_BUDGET: u64 = 1_000_000;
pub const SCHEMA_VERSION: &str = "tauideal.scan.v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMode {
    /// Every hyperplane of `P^n(K)` (one normalized form per hyperplane).
    Enumerate,
    /// `count` hyperplanes drawn uniformly from the seeded stream.
    Sample { count: usize },
}

/// Which coefficients `c_0, .., c_n` are required to be nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FilterSpec {
    Any,
    AllNonzero,
    /// `true` at position `i` requires `c_i != 0`.
    Mask(Vec<bool>),
}

impl FilterSpec {
    /// Accepts `any`, `all-nonzero`, or a mask over `c_0..c_n` written with
    /// `1` (nonzero) and `*` (free), e.g. `1*11`.
    pub fn parse(text: &str) -> Result<FilterSpec, BertiniError> {
        match text.trim() {
            "any" | "none" => Ok(FilterSpec::Any),
            "all-nonzero" | "nonzero" => Ok(FilterSpec::AllNonzero),
            mask if !mask.is_empty() && mask.chars().all(|c| c == '1' || c == '*') => {
                Ok(FilterSpec::Mask(mask.chars().map(|c| c == '1').collect()))
            }
            other => Err(BertiniError::BadFilter(format!(
                "{other:?}; expected any, all-nonzero or a mask of 1 and *"
            ))),
        }
    }

    fn resolve(&self, n: usize) -> Result<Vec<bool>, BertiniError> {
        match self {
            FilterSpec::Any => Ok(vec![false; n + 1]),
            FilterSpec::AllNonzero => Ok(vec![true; n + 1]),
            FilterSpec::Mask(m) if m.len() == n + 1 => Ok(m.clone()),
            FilterSpec::Mask(m) => Err(BertiniError::BadFilter(format!(
                "mask has {} positions, the hyperplane has {} coefficients",
                m.len(),
                n + 1
            ))),
        }
    }
}

impl fmt::Display for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterSpec::Any => f.write_str("any"),
            FilterSpec::AllNonzero => f.write_str("all-nonzero"),
            FilterSpec::Mask(m) => {
                for &b in m {
                    f.write_str(if b { "1" } else { "*" })?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub mode: ScanMode,
    pub seed: u64,
    pub filter: FilterSpec,
    /// Largest number of candidate tuples (or samples) a scan may visit.
    pub budget: u64,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
    /// Variable eliminated in the restriction test; `None` picks the
    /// highest-index variable with nonzero coefficient per hyperplane.
    pub eliminate: Option<usize>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            mode: ScanMode::Enumerate,
            seed: 0,
            filter: FilterSpec::AllNonzero,
            budget: DEFAULT_BUDGET,
            jobs: 0,
            eliminate: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BertiniVerdict {
    pub hyperplane: LinearForm,
    pub eliminated: Option<usize>,
    pub augmentation_equal: bool,
    pub augmentation_witness: Option<Polynomial>,
    /// `None` when the restriction is undefined for this hyperplane.
    pub restriction_equal: Option<bool>,
    pub restriction_witness: Option<Polynomial>,
    pub note: Option<String>,
}

impl BertiniVerdict {
    pub fn is_failure(&self) -> bool {
        !self.augmentation_equal || self.restriction_equal == Some(false)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tallies {
    pub both_equal: usize,
    pub augmentation_only_fails: usize,
    pub restriction_only_fails: usize,
    pub both_fail: usize,
    /// Hyperplanes where the restriction is undefined.
    pub restriction_undefined: usize,
}

impl Tallies {
    fn record(&mut self, v: &BertiniVerdict) {
        match (v.augmentation_equal, v.restriction_equal) {
            (_, None) => self.restriction_undefined += 1,
            (true, Some(true)) => self.both_equal += 1,
            (false, Some(true)) => self.augmentation_only_fails += 1,
            (true, Some(false)) => self.restriction_only_fails += 1,
            (false, Some(false)) => self.both_fail += 1,
        }
    }

    pub fn sum(&self) -> usize {
        self.both_equal
            + self.augmentation_only_fails
            + self.restriction_only_fails
            + self.both_fail
            + self.restriction_undefined
    }
}

#[derive(Clone, Debug)]
pub struct ScanReport {
    pub pair: PairSpec,
    pub tau: Vec<Polynomial>,
    pub mode: ScanMode,
    pub seed: u64,
    pub filter: FilterSpec,
    pub total: usize,
    pub tallies: Tallies,
    pub verdicts: Vec<BertiniVerdict>,
}

#[derive(Serialize)]
struct FieldView {
    characteristic: u32,
    degree: u32,
    order: u32,
    modulus: String,
}

#[derive(Serialize)]
struct VerdictView {
    hyperplane: String,
    coefficients: Vec<String>,
    eliminated: Option<String>,
    augmentation_equal: bool,
    augmentation_witness: Option<String>,
    restriction_equal: Option<bool>,
    restriction_witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

#[derive(Serialize)]
struct ReportView {
    schema: &'static str,
    polynomial: String,
    level: u32,
    vars: Vec<String>,
    field: FieldView,
    mode: &'static str,
    samples: Option<usize>,
    seed: u64,
    filter: String,
    tau: Vec<String>,
    total: usize,
    tallies: Tallies,
    failures: Vec<VerdictView>,
}

fn opt_text(p: &Option<Polynomial>) -> Option<String> {
    p.as_ref().map(|p| p.to_string())
}

impl ScanReport {
    pub fn failures(&self) -> impl Iterator<Item = &BertiniVerdict> {
        self.verdicts.iter().filter(|v| v.is_failure())
    }

    fn verdict_view(&self, v: &BertiniVerdict) -> VerdictView {
        let ring = self.pair.ring();
        let k = ring.field();
        VerdictView {
            hyperplane: v.hyperplane.to_string(),
            coefficients: v.hyperplane.coeffs().iter().map(|&c| k.format(c)).collect(),
            eliminated: v.eliminated.map(|j| ring.var_name(j).to_string()),
            augmentation_equal: v.augmentation_equal,
            augmentation_witness: opt_text(&v.augmentation_witness),
            restriction_equal: v.restriction_equal,
            restriction_witness: opt_text(&v.restriction_witness),
            note: v.note.clone(),
        }
    }

    fn view(&self) -> ReportView {
        let ring = self.pair.ring();
        let k = ring.field();
        ReportView {
            schema: SCHEMA_VERSION,
            polynomial: self.pair.polynomial().to_string(),
            level: self.pair.level(),
            vars: ring.var_names().to_vec(),
            field: FieldView {
                characteristic: k.characteristic(),
                degree: k.degree(),
                order: k.order(),
                modulus: k.modulus_string(),
            },
            mode: match self.mode {
                ScanMode::Enumerate => "enumerate",
                ScanMode::Sample { .. } => "sample",
            },
            samples: match self.mode {
                ScanMode::Enumerate => None,
                ScanMode::Sample { count } => Some(count),
            },
            seed: self.seed,
            filter: self.filter.to_string(),
            tau: self.tau.iter().map(|g| g.to_string()).collect(),
            total: self.total,
            tallies: self.tallies.clone(),
            failures: self.failures().map(|v| self.verdict_view(v)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.view()).expect("report serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.view()).expect("report serializes")
    }

    /// One row per scanned hyperplane.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "hyperplane",
            "eliminated",
            "augmentation_equal",
            "augmentation_witness",
            "restriction_equal",
            "restriction_witness",
        ])
        .expect("in-memory write");
        let show = |b: Option<bool>| b.map_or(String::from("undefined"), |b| b.to_string());
        for v in &self.verdicts {
            let view = self.verdict_view(v);
            w.write_record([
                view.hyperplane,
                view.eliminated.unwrap_or_default(),
                view.augmentation_equal.to_string(),
                view.augmentation_witness.unwrap_or_default(),
                show(view.restriction_equal),
                view.restriction_witness.unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }

    pub fn to_text(&self) -> String {
        let t = &self.tallies;
        let mut out = format!(
            "pair {} over {}\ntau = ({})\nscanned {} hyperplanes (seed {}, filter {})\n",
            self.pair,
            self.pair.ring().field().name(),
            self.tau
                .iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>()
                .join(", "),
            self.total,
            self.seed,
            self.filter
        );
        out += &format!(
            "both equal {}, augmentation fails only {}, restriction fails only {}, both fail {}, restriction undefined {}\n",
            t.both_equal, t.augmentation_only_fails, t.restriction_only_fails, t.both_fail, t.restriction_undefined
        );
        for v in self.failures() {
            let aug = match &v.augmentation_witness {
                Some(w) => format!("augmentation loses {w}"),
                None => "augmentation equal".into(),
            };
            let res = match (v.restriction_equal, &v.restriction_witness) {
                (Some(false), Some(w)) => format!("restriction separated by {w}"),
                (Some(false), None) => "restriction unequal".into(),
                (Some(true), _) => "restriction equal".into(),
                (None, _) => "restriction undefined".into(),
            };
            out += &format!("  {}: {aug}; {res}\n", v.hyperplane);
        }
        out
    }

    /// Re-runs both comparisons on every listed failure and checks the
    /// verdicts agree with the report.
    pub fn verify_failures(&self) -> Result<bool, BertiniError> {
        let prepared = PreparedPair::new(self.pair.clone())?;
        for v in self.failures() {
            let again = evaluate(&prepared, &v.hyperplane, v.eliminated)?;
            if again.augmentation_equal != v.augmentation_equal
                || again.restriction_equal != v.restriction_equal
                || again.augmentation_witness != v.augmentation_witness
                || again.restriction_witness != v.restriction_witness
            {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn evaluate(
    prepared: &PreparedPair,
    l: &LinearForm,
    eliminate: Option<usize>,
) -> Result<BertiniVerdict, BertiniError> {
    let aug = prepared.augmentation(l)?;
    let (eliminated, restriction_equal, restriction_witness, note) =
        match prepared.restriction(l, eliminate) {
            Ok(r) => (Some(r.eliminated), Some(r.equal), r.witness, None),
            Err(
                e @ (BertiniError::RestrictionVanishes(_) | BertiniError::ZeroCoefficient { .. }),
            ) => (eliminate, None, None, Some(e.to_string())),
            Err(e) => return Err(e),
        };
    Ok(BertiniVerdict {
        hyperplane: l.clone(),
        eliminated,
        augmentation_equal: aug.equal,
        augmentation_witness: aug.witness,
        restriction_equal,
        restriction_witness,
        note,
    })
}

fn enumerate_hyperplanes(
    ring: &Ring,
    mask: &[bool],
    budget: u64,
) -> Result<Vec<LinearForm>, BertiniError> {
    let q = ring.field().order() as u64;
    let len = mask.len();
    let size = q.checked_pow(len as u32).unwrap_or(u64::MAX);
    if size > budget {
        return Err(BertiniError::BudgetExceeded { size, budget });
    }
    let mut out = Vec::new();
    let mut tuple: Vec<Coeff> = vec![0; len];
    loop {
        let admissible = tuple[1..].iter().any(|&c| c != 0)
            && tuple.iter().find(|&&c| c != 0) == Some(&1)
            && tuple.iter().zip(mask).all(|(&c, &m)| !m || c != 0);
        if admissible {
            out.push(LinearForm::new(ring, tuple.clone())?);
        }
        // odometer with c_n varying fastest
        let mut i = len;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            tuple[i] += 1;
            if (tuple[i] as u64) < q {
                break;
            }
            tuple[i] = 0;
        }
    }
}

fn sample_hyperplanes(
    ring: &Ring,
    mask: &[bool],
    count: usize,
    seed: u64,
    budget: u64,
) -> Result<Vec<LinearForm>, BertiniError> {
    if count as u64 > budget {
        return Err(BertiniError::BudgetExceeded {
            size: count as u64,
            budget,
        });
    }
    let q = ring.field().order();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let tuple: Vec<Coeff> = mask
            .iter()
            .map(|&m| {
                if m {
                    rng.gen_range(1..q)
                } else {
                    rng.gen_range(0..q)
                }
            })
            .collect();
        if tuple[1..].iter().all(|&c| c == 0) {
            continue;
        }
        out.push(LinearForm::new(ring, tuple)?.normalized());
    }
    Ok(out)
}

/// Runs the augmentation and restriction comparisons on a family of
/// hyperplanes. Hyperplane selection is sequential and seeded, evaluation
/// runs on `config.jobs` threads, and results keep selection order, so the
/// report depends only on the pair and the configuration minus `jobs`.
pub fn hyperplane_scan(pair: &PairSpec, config: &ScanConfig) -> Result<ScanReport, BertiniError> {
    let ring = pair.ring();
    let mask = config.filter.resolve(ring.nvars())?;
    if let Some(j) = config.eliminate {
        ring.check_index(j)?;
    }
    let hyperplanes = match config.mode {
        ScanMode::Enumerate => enumerate_hyperplanes(ring, &mask, config.budget)?,
        ScanMode::Sample { count } => {
            sample_hyperplanes(ring, &mask, count, config.seed, config.budget)?
        }
    };
    let prepared = PreparedPair::new(pair.clone())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .expect("thread pool");
    let verdicts: Vec<BertiniVerdict> = pool.install(|| {
        hyperplanes
            .par_iter()
            .map(|l| evaluate(&prepared, l, config.eliminate))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut tallies = Tallies::default();
    for v in &verdicts {
        tallies.record(v);
    }
    Ok(ScanReport {
        pair: pair.clone(),
        tau: prepared.tau().reduced_generators()?,
        mode: config.mode,
        seed: config.seed,
        filter: config.filter.clone(),
        total: verdicts.len(),
        tallies,
        verdicts,
    })
}

/// A scan of a plane-curve pair `(A^2, f^{1/p^e})`.
pub fn dim2_probe(f: &Polynomial, e: u32, config: &ScanConfig) -> Result<ScanReport, BertiniError> {
    let n = f.ring().nvars();
    if n != 2 {
        return Err(BertiniError::NotTwoDimensional(n));
    }
    hyperplane_scan(&PairSpec::new(f.clone(), e)?, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bertini::build_cex_dim4;
    use crate::ff::Field;

    #[test]
    fn enumeration_counts() {
        // all-nonzero normalized forms: c_0 = 1, the other n coefficients free in K^*
        for (p, r, n) in [(2, 2, 4), (3, 1, 2), (5, 1, 2)] {
            let k = Field::extension(p, r).unwrap();
            let ring = Ring::with_indexed_vars(k.clone(), n).unwrap();
            let hs = enumerate_hyperplanes(&ring, &vec![true; n + 1], DEFAULT_BUDGET).unwrap();
            assert_eq!(hs.len() as u32, (k.order() - 1).pow(n as u32));
        }
        // without a filter: every hyperplane of P^n once, i.e. (q^{n+1}-1)/(q-1) - 1
        let ring = Ring::with_indexed_vars(Field::prime(3).unwrap(), 2).unwrap();
        let hs = enumerate_hyperplanes(&ring, &[false; 3], DEFAULT_BUDGET).unwrap();
        assert_eq!(hs.len(), 12);
    }

    #[test]
    fn budget_is_enforced() {
        let ring = Ring::with_indexed_vars(Field::extension(2, 2).unwrap(), 4).unwrap();
        assert!(matches!(
            enumerate_hyperplanes(&ring, &[true; 5], 1000),
            Err(BertiniError::BudgetExceeded {
                size: 1024,
                budget: 1000
            })
        ));
    }

    #[test]
    fn filter_parsing() {
        assert_eq!(
            FilterSpec::parse("all-nonzero").unwrap(),
            FilterSpec::AllNonzero
        );
        assert_eq!(
            FilterSpec::parse("1*1").unwrap(),
            FilterSpec::Mask(vec![true, false, true])
        );
        assert!(FilterSpec::parse("10x").is_err());
        assert!(FilterSpec::Mask(vec![true]).resolve(2).is_err());
    }

    #[test]
    fn samples_respect_the_mask() {
        let ring = Ring::with_indexed_vars(Field::prime(5).unwrap(), 3).unwrap();
        let hs =
            sample_hyperplanes(&ring, &[false, true, false, true], 50, 9, DEFAULT_BUDGET).unwrap();
        assert_eq!(hs.len(), 50);
        assert!(hs
            .iter()
            .all(|l| l.var_coeff(0) != 0 && l.var_coeff(2) != 0));
    }

    #[test]
    fn dim4_scan_over_f2() {
        let cex = build_cex_dim4(&Field::prime(2).unwrap()).unwrap();
        let report = hyperplane_scan(&cex.pair, &ScanConfig::default()).unwrap();
        assert_eq!(report.total, 1);
        assert_eq!(report.tallies.both_fail, 1);
        assert_eq!(report.tallies.sum(), report.total);
        let json = report.to_json_value();
        assert_eq!(json["schema"], SCHEMA_VERSION);
        assert_eq!(json["failures"][0]["augmentation_witness"], "x");
        assert!(report.verify_failures().unwrap());
        assert_eq!(report.to_csv().lines().count(), 2);
    }

    #[test]
    fn probe_needs_two_variables() {
        let ring = Ring::with_indexed_vars(Field::prime(5).unwrap(), 3).unwrap();
        assert!(matches!(
            dim2_probe(&ring.var(0), 1, &ScanConfig::default()),
            Err(BertiniError::NotTwoDimensional(3))
        ));
    }
}
