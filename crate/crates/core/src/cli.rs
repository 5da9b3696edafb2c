//! Command-line front end.
//!
//! Exit codes: 0 success, 1 input error, 2 verification failure,
//! 3 budget exceeded.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;

use crate::counting::{build_table_to, field_order, prime_power, ClassParams, CountRecord, SubgroupClass};
use crate::designs::{a2_determinations, blocks_text, design_json, design_to_code, johnson_check, orbit_design};
use crate::error::{Error, Result};
use crate::ffield::Field;
use crate::oracle::{class_representative, find_witness, three_way, OracleConfig, SubsetBitmask};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "agl-count", version, about = "Count subsets of F_q by their stabilizer in AGL(1, F_q)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-form counts for every class and 0 <= k <= max-k.
    Table(TableArgs),
    /// Closed-form count for one class and one k.
    Count(CountArgs),
    /// Compare closed form, lattice sum and brute force.
    Verify(VerifyArgs),
    /// Orbit design, code and Johnson-bound check for one block.
    Design(DesignArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// Characteristic.
    #[arg(long, conflicts_with = "q")]
    pub p: Option<u64>,
    /// Degree over F_p.
    #[arg(long, requires = "p")]
    pub alpha: Option<u32>,
    /// Field order, factored automatically.
    #[arg(long)]
    pub q: Option<u64>,
}

impl FieldArgs {
    fn resolve(&self) -> Result<(u64, u32)> {
        let (p, alpha) = match (self.p, self.q) {
            (Some(p), None) => (p, self.alpha.unwrap_or(1)),
            (None, Some(q)) => prime_power(q)?,
            _ => return Err(Error::InvalidArgument("give --p [--alpha] or --q".into())),
        };
        field_order(p, alpha)?;
        Ok((p, alpha))
    }
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Largest k (default q/2; up to q).
    #[arg(long)]
    pub max_k: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub k: u64,
    #[arg(long)]
    pub d: u64,
    #[arg(long)]
    pub i: u32,
    #[arg(long)]
    pub j: u32,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Largest k (default q).
    #[arg(long)]
    pub max_k: Option<u64>,
    /// Most subsets one brute-force scan may visit.
    #[arg(long)]
    pub oracle_budget: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct DesignArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub d: Option<u64>,
    #[arg(long)]
    pub i: Option<u32>,
    #[arg(long)]
    pub j: Option<u32>,
    /// Explicit block as comma-separated element indices.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["k", "d", "i", "j"])]
    pub subset: Option<Vec<u64>>,
    #[arg(long)]
    pub oracle_budget: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    if let Some(n) = cli.workers {
        if n == 0 {
            let _ = writeln!(err, "error: --workers must be at least 1");
            return EXIT_INPUT;
        }
        // A pool may already exist when run twice in one process; the
        // existing one is then reused.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = match &cli.command {
        Command::Table(a) => cmd_table(a, out),
        Command::Count(a) => cmd_count(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Design(a) => cmd_design(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded(_) => EXIT_BUDGET,
        Error::DesignCheck(_) | Error::JohnsonInapplicable(_) => EXIT_VERIFY,
        _ => EXIT_INPUT,
    }
}

fn io(e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("write failed: {e}"))
}

fn emit_records(records: &[CountRecord], format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "{}", CountRecord::CSV_HEADER).map_err(io)?;
            for r in records {
                writeln!(out, "{}", r.csv_row()).map_err(io)?;
            }
        }
        Format::Json => {
            let s = serde_json::to_string_pretty(records).expect("records serialize");
            writeln!(out, "{s}").map_err(io)?;
        }
        Format::Text => {
            for r in records {
                writeln!(out, "{r}").map_err(io)?;
            }
        }
    }
    Ok(())
}

fn cmd_table(args: &TableArgs, out: &mut dyn Write) -> Result<i32> {
    let (p, alpha) = args.field.resolve()?;
    let records = build_table_to(p, alpha, args.max_k)?;
    emit_records(&records, args.format, out)?;
    Ok(EXIT_OK)
}

fn cmd_count(args: &CountArgs, out: &mut dyn Write) -> Result<i32> {
    let (p, alpha) = args.field.resolve()?;
    let params = ClassParams::new(p, alpha, args.k, args.d, args.i, args.j)?;
    emit_records(&[CountRecord::from_params(&params)], args.format, out)?;
    Ok(EXIT_OK)
}

fn oracle_config(budget: Option<u64>) -> OracleConfig {
    let mut c = OracleConfig::default();
    if let Some(b) = budget {
        c.subset_budget = b;
    }
    c
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let (p, alpha) = args.field.resolve()?;
    let q = field_order(p, alpha)?;
    let config = oracle_config(args.oracle_budget);
    if q > config.max_q {
        return Err(Error::BudgetExceeded(format!("q = {q} exceeds the oracle limit {}", config.max_q)));
    }
    let max_k = args.max_k.unwrap_or(q);
    if max_k > q {
        return Err(Error::InvalidArgument(format!("max-k = {max_k} exceeds q = {q}")));
    }
    let field = Field::new(p, alpha)?;
    let classes = SubgroupClass::all(p, alpha)?;
    // Refuse up front rather than after hours of partial work.
    for class in &classes {
        let rep = class_representative(&field, class)?;
        for k in 0..=max_k {
            let n = rep.fixed_subset_count(&field, k)?;
            if n > config.subset_budget.into() {
                return Err(Error::BudgetExceeded(format!(
                    "class {class}, k = {k}: {n} candidate subsets exceeds the budget {}",
                    config.subset_budget
                )));
            }
        }
    }
    let mut rows = Vec::new();
    for class in &classes {
        rows.push(three_way(&field, class, 0..=max_k, &config)?);
    }
    let failures = rows.iter().flatten().filter(|r| !r.agrees()).count();
    match args.format {
        Format::Text => {
            writeln!(out, "verify q = {q}, 0 <= k <= {max_k}").map_err(io)?;
            for (class, cells) in classes.iter().zip(&rows) {
                let marks: String = cells.iter().map(|r| if r.agrees() { '.' } else { 'X' }).collect();
                writeln!(out, "{:<40} {marks}", class.to_string()).map_err(io)?;
            }
            for r in rows.iter().flatten().filter(|r| !r.agrees()) {
                writeln!(
                    out,
                    "MISMATCH {} k={}: closed={} lattice={} brute={}",
                    r.class, r.k, r.closed, r.lattice, r.brute
                )
                .map_err(io)?;
            }
            let total: usize = rows.iter().map(Vec::len).sum();
            let verdict = if failures == 0 { "PASS" } else { "FAIL" };
            writeln!(out, "{verdict}: {total} checks, {failures} mismatches").map_err(io)?;
        }
        Format::Csv => {
            writeln!(out, "k,d,odp,i,j,beta,closed,lattice,brute,agree").map_err(io)?;
            for r in rows.iter().flatten() {
                let c = r.class;
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.k,
                    c.d(),
                    c.odp(),
                    c.i(),
                    c.j(),
                    c.beta(),
                    r.closed,
                    r.lattice,
                    r.brute,
                    r.agrees()
                )
                .map_err(io)?;
            }
        }
        Format::Json => {
            let list: Vec<serde_json::Value> = rows
                .iter()
                .flatten()
                .map(|r| {
                    serde_json::json!({
                        "k": r.k, "d": r.class.d(), "odp": r.class.odp(), "i": r.class.i(),
                        "j": r.class.j(), "beta": r.class.beta(),
                        "closed": r.closed.to_string(), "lattice": r.lattice.to_string(),
                        "brute": r.brute.to_string(), "agree": r.agrees(),
                    })
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&list).expect("json")).map_err(io)?;
        }
    }
    Ok(if failures == 0 { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_design(args: &DesignArgs, out: &mut dyn Write) -> Result<i32> {
    let (p, alpha) = args.field.resolve()?;
    let field = Field::new(p, alpha)?;
    let q = field.q() as u64;
    let config = oracle_config(args.oracle_budget);

    let block = match &args.subset {
        Some(xs) => SubsetBitmask::from_indices(&field, xs)?,
        None => {
            let (Some(k), Some(d)) = (args.k, args.d) else {
                return Err(Error::InvalidArgument("give --subset or both --k and --d".into()));
            };
            if k > q {
                return Err(Error::InvalidArgument(format!("k = {k} exceeds q = {q}")));
            }
            let candidates: Vec<SubgroupClass> = SubgroupClass::all(p, alpha)?
                .into_iter()
                .filter(|c| c.d() == d && args.i.is_none_or(|i| c.i() == i) && args.j.is_none_or(|j| c.j() == j))
                .collect();
            if candidates.is_empty() {
                return Err(Error::InvalidArgument(format!("no subgroup class matches d = {d} at q = {q}")));
            }
            let mut chosen = None;
            for c in candidates {
                if !c.count(k)?.is_zero() {
                    chosen = Some(c);
                    break;
                }
            }
            let class = chosen.ok_or_else(|| {
                Error::NoWitness(format!("N = 0 for every class with d = {d} and k = {k} at q = {q}"))
            })?;
            let rep = class_representative(&field, &class)?;
            find_witness(&field, &rep, k, &config)?.ok_or_else(|| {
                Error::DesignCheck(format!("closed form gives N > 0 for {class}, k = {k}, but no subset was found"))
            })?
        }
    };

    let design = orbit_design(&field, &block, &config)?;
    let (code, words) = design_to_code(&design.params, &design.matrix)?;
    let johnson = johnson_check(&code)?;
    let s = design.stabilizer.order(&field);
    let a2 = a2_determinations(q, design.params.k, s)?;
    let dp = &design.params;
    let delta = code.d / 2;
    let den = code.w * code.w + code.n * delta - code.n * code.w;

    match args.format {
        Format::Json => {
            let mut v = design_json(&design, &words);
            v["block"] = serde_json::json!(block.elements().iter().map(|x| x.index()).collect::<Vec<_>>());
            v["stabilizer_order"] = serde_json::json!(s);
            v["code"] = serde_json::to_value(code).expect("json");
            v["johnson_equality"] = serde_json::json!(johnson);
            v["a2"] = serde_json::json!({"n": a2.code.n, "d": a2.code.d, "w": a2.code.w, "value": a2.code.size});
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json")).map_err(io)?;
        }
        Format::Csv | Format::Text => {
            let members: Vec<String> = block.elements().iter().map(|x| x.index().to_string()).collect();
            writeln!(out, "block: {}", members.join(" ")).map_err(io)?;
            writeln!(out, "stabilizer order: {s}").map_err(io)?;
            writeln!(out, "design (v,b,r,k,lambda) = ({},{},{},{},{})", dp.v, dp.b, dp.r, dp.k, dp.lambda).map_err(io)?;
            writeln!(out, "blocks:").map_err(io)?;
            write!(out, "{}", blocks_text(&design.blocks)).map_err(io)?;
            writeln!(out, "code (n,d,w) = ({},{},{}), {} codewords", code.n, code.d, code.w, code.size).map_err(io)?;
            writeln!(out, "codewords:").map_err(io)?;
            for w in &words {
                writeln!(out, "{w}").map_err(io)?;
            }
            writeln!(
                out,
                "johnson: n*delta/(w^2-n*w+n*delta) = {}/{} = {}, size = {}: {}",
                code.n * delta,
                den,
                if den != 0 && (code.n * delta) % den == 0 { ((code.n * delta) / den).to_string() } else { "non-integer".into() },
                code.size,
                if johnson { "equality" } else { "strict" }
            )
            .map_err(io)?;
            writeln!(out, "{a2}").map_err(io)?;
        }
    }
    Ok(if johnson { EXIT_OK } else { EXIT_VERIFY })
}
