use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tauideal::bertini::{
    build_cex_dim4, build_cex_lines, dim2_probe, homogeneous_detect, hyperplane_scan, star_check,
    Counterexample, FilterSpec, PreparedPair, ScanConfig, ScanMode, ScanReport, DEFAULT_BUDGET,
};
use tauideal::ff::Field;
use tauideal::frobenius::{projective_chart_test_ideal, test_ideal, PairSpec};
use tauideal::groebner::Ideal;
use tauideal::poly::{LinearForm, Polynomial, Ring};

#[derive(Parser)]
#[command(
    name = "tauideal",
    version,
    about = "Test ideals of principal pairs and Bertini-type checks over finite fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test ideal of (A^n, f^(1/p^e)).
    Compute(PairArgs),
    /// Compare tau(f) with tau(l f).
    Augment {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        line: LineArgs,
    },
    /// Compare tau(f) restricted to V(l) with the test ideal of f on V(l).
    Restrict {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        line: LineArgs,
    },
    /// Run both comparisons over a family of hyperplanes.
    Scan {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Build a counterexample pair from slice polynomials, optionally scanning it.
    Cex(CexArgs),
    /// Test ideal of a homogeneous F on one affine chart of P^n.
    Chart {
        #[command(flatten)]
        pair: PairArgs,
        /// Variable set to 1.
        #[arg(long)]
        chart: String,
    },
    /// Scan lines for a pair in two variables.
    Dim2 {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        scan: ScanArgs,
    },
}

#[derive(Args)]
struct FieldArgs {
    /// Characteristic p.
    #[arg(long = "char")]
    characteristic: u32,
    /// Degree r of F_{p^r} over F_p.
    #[arg(long)]
    ext_degree: Option<u32>,
    /// Defining polynomial of the extension in g, e.g. "g^2+g+2".
    #[arg(long)]
    modulus: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Exit with status 1 when a comparison is unequal.
    #[arg(long)]
    expect_equal: bool,
}

#[derive(Args)]
struct PairArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Comma-separated variable names.
    #[arg(long, value_delimiter = ',', required = true)]
    vars: Vec<String>,
    #[arg(long)]
    poly: String,
    /// Level e of the pair f^(1/p^e).
    #[arg(long, default_value_t = 1)]
    e: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct LineArgs {
    /// Linear form c_0 + c_1 x_1 + .. + c_n x_n.
    #[arg(long)]
    line: String,
    /// Variable to eliminate in the restriction test.
    #[arg(long)]
    eliminate: Option<String>,
}

#[derive(Args)]
struct ScanArgs {
    /// Scan mode; scan and dim2 default to enumerate, cex scans only when set.
    #[arg(long = "scan", visible_alias = "mode", value_enum)]
    mode: Option<Mode>,
    /// Number of hyperplanes drawn in sample mode.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// any, all-nonzero, or a mask over c_0..c_n such as 1*11.
    #[arg(long, default_value = "all-nonzero")]
    filter: String,
    #[arg(long, env = "TAUIDEAL_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    eliminate: Option<String>,
}

#[derive(Args)]
struct CexArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_enum)]
    family: Family,
    /// Number of variables for the line family.
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    e: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    scan: ScanArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Enumerate,
    Sample,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Dim4,
    Lines,
}

/// Rendered output and whether every comparison in it came out equal.
struct Output {
    json: Value,
    text: String,
    csv: Option<String>,
    all_equal: bool,
}

type Run<T> = Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn build_field(args: &FieldArgs) -> Run<Field> {
    match &args.modulus {
        Some(text) => {
            let prime = Field::prime(args.characteristic).map_err(err)?;
            let ring = Ring::new(prime, &["g"]).map_err(err)?;
            let m = ring.parse(text).map_err(|e| format!("modulus: {e}"))?;
            let deg = m.degree_in(0);
            let coeffs: Vec<u32> = (0..=deg)
                .map(|i| m.coefficient(&tauideal::poly::Monomial::from_exponents(&[i])))
                .collect();
            if let Some(r) = args.ext_degree {
                if r != deg {
                    return Err(format!("modulus has degree {deg} but --ext-degree is {r}"));
                }
            }
            Field::with_modulus(args.characteristic, &coeffs).map_err(err)
        }
        None => Field::extension(args.characteristic, args.ext_degree.unwrap_or(1)).map_err(err),
    }
}

fn field_json(k: &Field) -> Value {
    json!({
        "characteristic": k.characteristic(),
        "degree": k.degree(),
        "order": k.order(),
        "modulus": k.modulus_string(),
    })
}

fn texts(polys: &[Polynomial]) -> Vec<String> {
    polys.iter().map(|p| p.to_string()).collect()
}

fn generators(ideal: &Ideal) -> Run<Vec<String>> {
    Ok(texts(&ideal.reduced_generators().map_err(err)?))
}

fn build_pair(args: &PairArgs) -> Run<PairSpec> {
    let field = build_field(&args.field)?;
    let ring = Ring::new(field, &args.vars).map_err(err)?;
    let f = ring.parse(&args.poly).map_err(|e| format!("--poly: {e}"))?;
    PairSpec::new(f, args.e).map_err(err)
}

fn base_json(schema: &str, pair: &PairSpec, seed: u64) -> serde_json::Map<String, Value> {
    let ring = pair.ring();
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(schema));
    m.insert("seed".into(), json!(seed));
    m.insert("field".into(), field_json(ring.field()));
    m.insert("vars".into(), json!(ring.var_names()));
    m.insert("polynomial".into(), json!(pair.polynomial().to_string()));
    m.insert("level".into(), json!(pair.level()));
    m
}

fn variable(ring: &Ring, name: &Option<String>) -> Run<Option<usize>> {
    match name {
        None => Ok(None),
        Some(n) => ring
            .var_index(n)
            .map(Some)
            .ok_or_else(|| format!("unknown variable {n:?} for --eliminate")),
    }
}

fn compute(args: &PairArgs) -> Run<Output> {
    let pair = build_pair(args)?;
    let gens = generators(&test_ideal(&pair).map_err(err)?)?;
    let mut m = base_json("tauideal.compute.v1", &pair, args.seed);
    m.insert("generators".into(), json!(gens));
    Ok(Output {
        text: format!("tau{pair} = ({})\n", gens.join(", ")),
        json: Value::Object(m),
        csv: None,
        all_equal: true,
    })
}

fn augment(args: &PairArgs, line: &LineArgs) -> Run<Output> {
    let pair = build_pair(args)?;
    let l = LinearForm::parse(pair.ring(), &line.line).map_err(|e| format!("--line: {e}"))?;
    let out = PreparedPair::new(pair.clone())
        .map_err(err)?
        .augmentation(&l)
        .map_err(err)?;
    let witness = out.witness.as_ref().map(|w| w.to_string());
    let tau = generators(&out.tau)?;
    let product = generators(&out.tau_product)?;
    let mut m = base_json("tauideal.augment.v1", &pair, args.seed);
    m.insert("hyperplane".into(), json!(l.to_string()));
    m.insert("equal".into(), json!(out.equal));
    m.insert("witness".into(), json!(witness));
    m.insert("tau".into(), json!(tau));
    m.insert("tau_product".into(), json!(product));
    let mut text = format!(
        "tau(f) = ({})\ntau(l f) = ({})\n",
        tau.join(", "),
        product.join(", ")
    );
    text += &match &witness {
        None => "equal\n".to_string(),
        Some(w) => format!("unequal: {w} lies in tau(f) but not in tau(l f)\n"),
    };
    Ok(Output {
        json: Value::Object(m),
        text,
        csv: None,
        all_equal: out.equal,
    })
}

fn restrict(args: &PairArgs, line: &LineArgs) -> Run<Output> {
    let pair = build_pair(args)?;
    let ring = pair.ring().clone();
    let l = LinearForm::parse(&ring, &line.line).map_err(|e| format!("--line: {e}"))?;
    let j = variable(&ring, &line.eliminate)?;
    let out = PreparedPair::new(pair.clone())
        .map_err(err)?
        .restriction(&l, j)
        .map_err(err)?;
    let witness = out.witness.as_ref().map(|w| w.to_string());
    let restricted = generators(&out.restricted)?;
    let intrinsic = generators(&out.intrinsic)?;
    let mut m = base_json("tauideal.restrict.v1", &pair, args.seed);
    m.insert("hyperplane".into(), json!(l.to_string()));
    m.insert("eliminated".into(), json!(ring.var_name(out.eliminated)));
    m.insert(
        "hyperplane_vars".into(),
        json!(out.restricted.ring().var_names()),
    );
    m.insert("equal".into(), json!(out.equal));
    m.insert("witness".into(), json!(witness));
    m.insert("restricted".into(), json!(restricted));
    m.insert("intrinsic".into(), json!(intrinsic));
    let mut text = format!(
        "eliminating {}\ntau(f) on H = ({})\ntau(H, f|H) = ({})\n",
        ring.var_name(out.eliminated),
        restricted.join(", "),
        intrinsic.join(", ")
    );
    text += &match &witness {
        None => "equal\n".to_string(),
        Some(w) => format!("unequal: separated by {w}\n"),
    };
    Ok(Output {
        json: Value::Object(m),
        text,
        csv: None,
        all_equal: out.equal,
    })
}

fn scan_config(ring: &Ring, args: &ScanArgs, mode: Mode, seed: u64) -> Run<ScanConfig> {
    Ok(ScanConfig {
        mode: match mode {
            Mode::Enumerate => ScanMode::Enumerate,
            Mode::Sample => ScanMode::Sample {
                count: args.samples,
            },
        },
        seed,
        filter: FilterSpec::parse(&args.filter).map_err(err)?,
        budget: args.budget,
        jobs: args.jobs,
        eliminate: variable(ring, &args.eliminate)?,
    })
}

fn report_output(report: &ScanReport) -> Output {
    Output {
        json: report.to_json_value(),
        text: report.to_text(),
        csv: Some(report.to_csv()),
        all_equal: report.failures().next().is_none(),
    }
}

fn scan(args: &PairArgs, s: &ScanArgs, two_dim: bool) -> Run<Output> {
    let pair = build_pair(args)?;
    let config = scan_config(pair.ring(), s, s.mode.unwrap_or(Mode::Enumerate), args.seed)?;
    let report = if two_dim {
        dim2_probe(pair.polynomial(), pair.level(), &config)
    } else {
        hyperplane_scan(&pair, &config)
    }
    .map_err(err)?;
    Ok(report_output(&report))
}

fn cex(args: &CexArgs) -> Run<Output> {
    let field = build_field(&args.field)?;
    let built: Counterexample = match args.family {
        Family::Dim4 => {
            if args.e != 1 {
                return Err("the dim4 family is defined at level e = 1".into());
            }
            build_cex_dim4(&field)
        }
        Family::Lines => build_cex_lines(&field, args.n, args.e, args.seed),
    }
    .map_err(err)?;
    let pair = &built.pair;
    let star = star_check(&built.slices, pair.level()).map_err(err)?;
    let tau = generators(&test_ideal(pair).map_err(err)?)?;
    let mut m = base_json("tauideal.cex.v1", pair, args.seed);
    m.insert(
        "family".into(),
        json!(match args.family {
            Family::Dim4 => "dim4",
            Family::Lines => "lines",
        }),
    );
    m.insert("slices".into(), json!(texts(&built.slices)));
    m.insert("lines".into(), json!(texts(&built.lines)));
    m.insert("attempts".into(), json!(built.attempts));
    m.insert(
        "star".into(),
        json!({ "holds": star.holds, "first_violation": star.first_violation }),
    );
    m.insert("tau".into(), json!(tau));
    let mut text = format!(
        "f = {}\nslices: {}\nstar condition: {}\ntau = ({})\n",
        pair.polynomial(),
        texts(&built.slices).join("; "),
        if star.holds { "holds" } else { "fails" },
        tau.join(", ")
    );
    if pair.level() == 1 {
        let det = homogeneous_detect(pair).map_err(err)?;
        m.insert(
            "detection".into(),
            json!({
                "applicable": det.applicable,
                "reason": det.reason,
                "degree": det.degree,
                "span_dimension": det.span_dimension,
            }),
        );
        text += &format!(
            "homogeneous detection: {}\n",
            if det.applicable {
                "applicable".to_string()
            } else {
                det.reason.unwrap_or_default()
            }
        );
    }
    let mut csv = None;
    let mut all_equal = true;
    if let Some(mode) = args.scan.mode {
        let config = scan_config(pair.ring(), &args.scan, mode, args.seed)?;
        let report = hyperplane_scan(pair, &config).map_err(err)?;
        let out = report_output(&report);
        m.insert("scan".into(), out.json);
        text += &out.text;
        csv = out.csv;
        all_equal = out.all_equal;
    }
    Ok(Output {
        json: Value::Object(m),
        text,
        csv,
        all_equal,
    })
}

fn chart(args: &PairArgs, chart: &str) -> Run<Output> {
    let field = build_field(&args.field)?;
    let ring = Ring::new(field, &args.vars).map_err(err)?;
    let f = ring.parse(&args.poly).map_err(|e| format!("--poly: {e}"))?;
    let index = ring
        .var_index(chart)
        .ok_or_else(|| format!("unknown chart variable {chart:?}"))?;
    let ideal = projective_chart_test_ideal(&f, index, args.e).map_err(err)?;
    let gens = generators(&ideal)?;
    let json = json!({
        "schema": "tauideal.chart.v1",
        "seed": args.seed,
        "field": field_json(ring.field()),
        "vars": ring.var_names(),
        "polynomial": f.to_string(),
        "level": args.e,
        "chart": chart,
        "chart_vars": ideal.ring().var_names(),
        "generators": gens,
    });
    Ok(Output {
        text: format!("chart {chart} = 1: tau = ({})\n", gens.join(", ")),
        json,
        csv: None,
        all_equal: true,
    })
}

fn dispatch(cli: &Cli) -> Run<(Output, Format, bool)> {
    let (out, field) = match &cli.command {
        Command::Compute(p) => (compute(p)?, &p.field),
        Command::Augment { pair, line } => (augment(pair, line)?, &pair.field),
        Command::Restrict { pair, line } => (restrict(pair, line)?, &pair.field),
        Command::Scan { pair, scan: s } => (scan(pair, s, false)?, &pair.field),
        Command::Dim2 { pair, scan: s } => (scan(pair, s, true)?, &pair.field),
        Command::Cex(c) => (cex(c)?, &c.field),
        Command::Chart { pair, chart: c } => (chart(pair, c)?, &pair.field),
    };
    Ok((out, field.format, field.expect_equal))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (out, format, expect_equal) = match dispatch(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let rendered = match format {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("json output") + "\n",
        Format::Text => out.text,
        Format::Csv => match out.csv {
            Some(csv) => csv,
            None => {
                eprintln!("error: CSV output is only available for scans");
                return ExitCode::from(2);
            }
        },
    };
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout
        .write_all(rendered.as_bytes())
        .and_then(|_| stdout.flush())
    {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if expect_equal && !out.all_equal {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
