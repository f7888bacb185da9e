//! Command-line interface for exact computation in two-generator affine
//! algebras `K<x,y | yx = q*xy + alpha*x + beta*y + gamma>`.

use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use affalg::algebra::{classify, iso_from_model, invert_affine, verify_isomorphism, one_dim_reps, AlgebraParams, ModelClass, TableRow};
use affalg::bench::{run_bench_with_cleaning, Workload};
use affalg::center::{center_basis, DegreeWindow};
use affalg::coeffs::{FieldElem, FieldMode, Param};
use affalg::expr::{eval, parse, parse_ratio};
use affalg::identities::{bracket_pow, shift_binomial, weyl_binomial_defect, weyl_binomial_defect_half_powers};
use affalg::ncpoly::{commute_formula, commute_pullback, commute_recurrence, commute_rewrite, CommuteProvider, FormulaEngine, PullbackEngine, RecurrenceEngine, RewriteEngine};
use affalg::{AlgebraRef, CacheStrategy, CommuteCache, NcPoly};

#[derive(Parser)]
#[command(
    name = "affalg",
    version,
    about = "Exact computation in two-generator algebras with an affine commutation relation",
    after_help = "Parameters are exact rationals like 5 or -3/4; omitted parameters stay symbolic."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct AlgebraArgs {
    /// Model algebra: commutative | weyl | shift | qplane | qweyl
    #[arg(long, conflicts_with_all = ["alpha", "beta", "gamma"])]
    algebra: Option<String>,
    /// Exact value for q (integer or fraction); with a quantum model,
    /// the deformation parameter; otherwise defaults to a symbol
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Exact value for alpha
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Exact value for beta
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Exact value for gamma
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// Work over the prime field GF(P) instead of the rationals
    #[arg(long = "char", value_name = "P")]
    characteristic: Option<u64>,
}

impl AlgebraArgs {
    fn resolve(&self) -> Result<AlgebraRef> {
        if let Some(name) = &self.algebra {
            let class: ModelClass = name
                .parse()
                .map_err(|e| anyhow!("{}", e))?;
            let quantum = matches!(class, ModelClass::QuantumPlane | ModelClass::QWeyl);
            let mode = match self.characteristic {
                Some(p) => FieldMode::prime(p)?,
                None if quantum && self.q.is_none() => FieldMode::Symbolic,
                None => FieldMode::Rational,
            };
            if quantum && self.q.is_none() && self.characteristic.is_some() {
                bail!("--algebra {} over GF(p) needs an explicit --q", name);
            }
            let q = match &self.q {
                Some(text) => {
                    let r = parse_ratio(text).map_err(|e| anyhow!(e))?;
                    mode.embed_rat(&r)?
                }
                None if mode == FieldMode::Symbolic => FieldElem::symbol(Param::Q),
                None => mode.one(),
            };
            return Ok(Arc::new(class.params(mode, &q)?));
        }
        let flags = [
            (Param::Q, &self.q),
            (Param::Alpha, &self.alpha),
            (Param::Beta, &self.beta),
            (Param::Gamma, &self.gamma),
        ];
        let mode = match self.characteristic {
            Some(p) => FieldMode::prime(p)?,
            None if flags.iter().all(|(_, v)| v.is_some()) => FieldMode::Rational,
            None => FieldMode::Symbolic,
        };
        let mut values = Vec::with_capacity(4);
        for (param, text) in flags {
            let v = match text {
                Some(t) => {
                    let r = parse_ratio(t).map_err(|e| anyhow!(e))?;
                    mode.embed_rat(&r)
                        .with_context(|| format!("--{} = {}", param.name(), t))?
                }
                None => match mode {
                    FieldMode::Symbolic => FieldElem::symbol(param),
                    _ => bail!("--{} is required over this field", param.name()),
                },
            };
            values.push(v);
        }
        let [q, alpha, beta, gamma]: [FieldElem; 4] =
            values.try_into().expect("four parameters");
        Ok(Arc::new(AlgebraParams::new(q, alpha, beta, gamma)?))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum EngineOpt {
    /// Structural rewriting with the defining relation (the oracle)
    Rewrite,
    /// Closed summation formula of the parameter row
    Formula,
    /// Coefficient recurrence of the parameter row
    Recurrence,
    /// Conjugation through the model-algebra isomorphism
    Pullback,
    /// Closed formula or pullback, with requested entries cached
    Cached,
}

fn provider(engine: EngineOpt, alg: &AlgebraRef) -> Box<dyn CommuteProvider> {
    match engine {
        EngineOpt::Rewrite => Box::new(RewriteEngine::new(alg)),
        EngineOpt::Formula => Box::new(FormulaEngine::new(alg)),
        EngineOpt::Recurrence => Box::new(RecurrenceEngine::new(alg)),
        EngineOpt::Pullback => Box::new(PullbackEngine::new(alg)),
        EngineOpt::Cached => Box::new(CommuteCache::new(alg, CacheStrategy::CacheAndFormulas)),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Name the model algebra these parameters are isomorphic to
    Classify {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long)]
        json: bool,
    },
    /// Multiply two expressions and print the normal form of the product
    Mul {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Left factor
        lhs: String,
        /// Right factor
        rhs: String,
        #[arg(long, value_enum, default_value_t = EngineOpt::Rewrite)]
        engine: EngineOpt,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate an expression to its normal form
    NormalForm {
        #[command(flatten)]
        alg: AlgebraArgs,
        expr: String,
        #[arg(long, value_enum, default_value_t = EngineOpt::Rewrite)]
        engine: EngineOpt,
        #[arg(long)]
        json: bool,
    },
    /// Expand (x+y)^n next to the binomial identity of a model algebra
    Binomial {
        /// One of: weyl | shift | qplane
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        json: bool,
    },
    /// Basis of the center within a total-degree window
    Center {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Largest total degree in the window
        #[arg(long, default_value_t = 6)]
        degree: u32,
        #[arg(long)]
        json: bool,
    },
    /// Witness isomorphism onto the model algebra, with verification
    Iso {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long)]
        json: bool,
    },
    /// Run the deterministic workload suite under the cache strategies
    Bench {
        /// Workload name, or "all"
        #[arg(long, default_value = "all")]
        workload: String,
        /// cache-only | formulas-only | cache-and-formulas | all
        #[arg(long, default_value = "all")]
        strategy: String,
        /// Seed for the randomized workload
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Drop stored entries above this total degree after every operation
        #[arg(long, value_name = "D")]
        clear_above: Option<u32>,
        /// Emit a JSON array of reports
        #[arg(long)]
        json: bool,
        /// Emit the request matrix as CSV (single workload and strategy)
        #[arg(long, conflicts_with = "json")]
        csv: bool,
    },
    /// Check engine agreement on every parameter row
    Selftest {
        /// Largest m and n to compare
        #[arg(long, default_value_t = 6)]
        max_degree: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Classify { alg, json } => cmd_classify(&alg, json),
        Command::Mul { alg, lhs, rhs, engine, json } => cmd_mul(&alg, &lhs, &rhs, engine, json),
        Command::NormalForm { alg, expr, engine, json } => cmd_normal_form(&alg, &expr, engine, json),
        Command::Binomial { algebra, n, json } => cmd_binomial(&algebra, n, json),
        Command::Center { alg, degree, json } => cmd_center(&alg, degree, json),
        Command::Iso { alg, json } => cmd_iso(&alg, json),
        Command::Bench { workload, strategy, seed, clear_above, json, csv } => {
            cmd_bench(&workload, &strategy, seed, clear_above, json, csv)
        }
        Command::Selftest { max_degree } => cmd_selftest(max_degree),
    }
}

fn cmd_classify(args: &AlgebraArgs, json: bool) -> Result<()> {
    let alg = args.resolve()?;
    let class = classify(&alg);
    let map = iso_from_model(&alg);
    let verified = verify_isomorphism(&map);
    let reps = one_dim_reps(&alg);
    if json {
        let value = serde_json::json!({
            "algebra": alg.to_string(),
            "class": class.name(),
            "map_from_model": map.to_string(),
            "verified": verified,
            "one_dim_rep_residual": reps.to_string(),
        });
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        println!("algebra: {}", alg);
        println!("class: {}", class);
        println!("map from model: {}", map);
        println!("verified: {}", verified);
        println!("one-dimensional representations: zero set of {}", reps);
    }
    Ok(())
}

fn cmd_mul(args: &AlgebraArgs, lhs: &str, rhs: &str, engine: EngineOpt, json: bool) -> Result<()> {
    let alg = args.resolve()?;
    let mut prov = provider(engine, &alg);
    let l = eval(&parse(lhs)?, &alg, prov.as_mut())?;
    let r = eval(&parse(rhs)?, &alg, prov.as_mut())?;
    let product = l.mul_with(&r, prov.as_mut())?;
    emit_poly(&alg, &product, json)
}

fn cmd_normal_form(args: &AlgebraArgs, text: &str, engine: EngineOpt, json: bool) -> Result<()> {
    let alg = args.resolve()?;
    let mut prov = provider(engine, &alg);
    let value = eval(&parse(text)?, &alg, prov.as_mut())?;
    emit_poly(&alg, &value, json)
}

fn emit_poly(alg: &AlgebraRef, p: &NcPoly, json: bool) -> Result<()> {
    if json {
        let terms: Vec<serde_json::Value> = p
            .terms_desc()
            .map(|(m, c)| {
                serde_json::json!({"a": m.a(), "b": m.b(), "coeff": c.to_string()})
            })
            .collect();
        let value = serde_json::json!({
            "algebra": alg.to_string(),
            "normal_form": p.to_string(),
            "terms": terms,
        });
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        println!("{}", p);
    }
    Ok(())
}

fn cmd_binomial(algebra: &str, n: u32, json: bool) -> Result<()> {
    let rat = FieldMode::Rational;
    let mut lines: Vec<(&str, String)> = Vec::new();
    let holds;
    match algebra {
        "weyl" => {
            let alg: AlgebraRef = Arc::new(ModelClass::Weyl.params(rat, &rat.one())?);
            let x = NcPoly::gen_x(&alg);
            let d = NcPoly::gen_y(&alg);
            let power = x.add(&d)?.pow(n)?;
            let bracket = bracket_pow(&x, &d, n, false)?;
            let defect = weyl_binomial_defect(&alg, n)?;
            let alt = weyl_binomial_defect_half_powers(&alg, n)?;
            holds = power.sub(&bracket)? == defect && defect == alt;
            lines.push(("power", power.to_string()));
            lines.push(("bracket", bracket.to_string()));
            lines.push(("defect", defect.to_string()));
        }
        "shift" => {
            let alg: AlgebraRef = Arc::new(ModelClass::Shift.params(rat, &rat.one())?);
            let x = NcPoly::gen_x(&alg);
            let s = NcPoly::gen_y(&alg);
            let power = x.add(&s)?.pow(n)?;
            let stirling = shift_binomial(&alg, n)?;
            holds = power == stirling;
            lines.push(("power", power.to_string()));
            lines.push(("stirling form", stirling.to_string()));
        }
        "qplane" => {
            let alg: AlgebraRef = Arc::new(
                ModelClass::QuantumPlane
                    .params(FieldMode::Symbolic, &FieldElem::symbol(Param::Q))?,
            );
            let x = NcPoly::gen_x(&alg);
            let y = NcPoly::gen_y(&alg);
            let power = x.add(&y)?.pow(n)?;
            let bracket = bracket_pow(&x, &y, n, true)?;
            holds = power == bracket;
            lines.push(("power", power.to_string()));
            lines.push(("q-bracket", bracket.to_string()));
        }
        other => bail!("--algebra must be weyl, shift, or qplane (got '{}')", other),
    }
    if json {
        let mut obj = serde_json::Map::new();
        obj.insert("algebra".into(), algebra.into());
        obj.insert("n".into(), n.into());
        for (k, v) in &lines {
            obj.insert(k.replace(' ', "_"), v.clone().into());
        }
        obj.insert("identity_holds".into(), holds.into());
        println!("{}", serde_json::to_string_pretty(&serde_json::Value::Object(obj))?);
    } else {
        println!("algebra: {}", algebra);
        println!("n: {}", n);
        for (k, v) in &lines {
            println!("{}: {}", k, v);
        }
        println!("identity holds: {}", holds);
    }
    if !holds {
        bail!("binomial identity failed for {} at n = {}", algebra, n);
    }
    Ok(())
}

fn cmd_center(args: &AlgebraArgs, degree: u32, json: bool) -> Result<()> {
    let alg = args.resolve()?;
    let basis = center_basis(&alg, DegreeWindow::new(degree))?;
    if json {
        let value = serde_json::json!({
            "algebra": alg.to_string(),
            "degree": degree,
            "basis": basis.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        println!("algebra: {}", alg);
        println!("window: total degree <= {}", degree);
        println!("center basis ({} elements):", basis.len());
        for p in &basis {
            println!("  {}", p);
        }
    }
    Ok(())
}

fn cmd_iso(args: &AlgebraArgs, json: bool) -> Result<()> {
    let alg = args.resolve()?;
    let class = classify(&alg);
    let map = iso_from_model(&alg);
    let verified = verify_isomorphism(&map);
    let inverse = invert_affine(&map).ok();
    if json {
        let value = serde_json::json!({
            "algebra": alg.to_string(),
            "class": class.name(),
            "model": map.source().to_string(),
            "map_from_model": map.to_string(),
            "inverse": inverse.as_ref().map(|m| m.to_string()),
            "verified": verified,
        });
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        println!("algebra: {}", alg);
        println!("class: {}", class);
        println!("model: {}", map.source());
        println!("map from model: {}", map);
        match &inverse {
            Some(inv) => println!("inverse: {}", inv),
            None => println!("inverse: (linear part singular)"),
        }
        println!("verified: {}", verified);
    }
    Ok(())
}

fn cmd_bench(
    workload: &str,
    strategy: &str,
    seed: u64,
    clear_above: Option<u32>,
    json: bool,
    csv: bool,
) -> Result<()> {
    let suite = Workload::default_suite(seed);
    let selected: Vec<&Workload> = if workload == "all" {
        suite.iter().collect()
    } else {
        let found: Vec<&Workload> = suite.iter().filter(|w| w.name == workload).collect();
        if found.is_empty() {
            bail!(
                "unknown workload '{}'; available: {}, all",
                workload,
                suite.iter().map(|w| w.name.as_str()).collect::<Vec<_>>().join(", ")
            );
        }
        found
    };
    let strategies: Vec<CacheStrategy> = if strategy == "all" {
        CacheStrategy::ALL.to_vec()
    } else {
        vec![strategy.parse().map_err(|e: String| anyhow!(e))?]
    };
    if csv && (selected.len() > 1 || strategies.len() > 1) {
        bail!("--csv needs one --workload and one --strategy");
    }
    let mut reports = Vec::new();
    for w in &selected {
        for &s in &strategies {
            let run = run_bench_with_cleaning(w, s, clear_above)?;
            reports.push(run.report);
        }
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    } else if csv {
        print!("{}", reports[0].to_csv());
    } else {
        for r in &reports {
            println!("workload: {}  strategy: {}", r.workload, r.strategy);
            println!("wall_ms: {:.3}  peak entries: {}", r.wall_ms, r.peak_entries);
            print!("{}", r.format_request_matrix());
            println!();
        }
    }
    Ok(())
}

fn cmd_selftest(max_degree: u32) -> Result<()> {
    let mut failed = 0usize;
    for row in TableRow::ALL {
        let alg = row.symbolic_algebra();
        let mut engines = vec!["rewrite"];
        if row.has_closed_formula() {
            engines.push("formula");
        }
        if row.has_recurrence() {
            engines.push("recurrence");
        }
        engines.push("pullback");
        let mut ok = true;
        'pairs: for m in 0..=max_degree {
            for n in 0..=max_degree {
                let oracle = commute_rewrite(&alg, m, n)?;
                if row.has_closed_formula() && commute_formula(&alg, m, n)? != oracle {
                    ok = false;
                    break 'pairs;
                }
                if row.has_recurrence() && commute_recurrence(&alg, m, n)? != oracle {
                    ok = false;
                    break 'pairs;
                }
                if commute_pullback(&alg, m, n)? != oracle {
                    ok = false;
                    break 'pairs;
                }
            }
        }
        if !ok {
            failed += 1;
        }
        println!(
            "row {}: {} [{}]",
            row,
            if ok { "ok" } else { "FAILED" },
            engines.join(", ")
        );
    }
    if failed > 0 {
        bail!("{} of {} rows disagree", failed, TableRow::ALL.len());
    }
    println!(
        "all {} rows agree for 0 <= m, n <= {}",
        TableRow::ALL.len(),
        max_degree
    );
    Ok(())
}
