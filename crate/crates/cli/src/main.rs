use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use iwasawa_core::classification::{table1_shape, theorem1_enumerate};
use iwasawa_core::function_field::{survey_ff, FfSample};
use iwasawa_core::heuristics::{
    compatibility_check, lambda_table, predicted_a1_distribution, to_decimal, LambdaModel,
};
use iwasawa_core::io::{ingest_csv, tabulate};
use iwasawa_core::quad::{survey, Family};
use iwasawa_core::reiner::oracle::quotient_brute_force;
use iwasawa_core::reiner::{quotient_model, relation_matrix_general, ReinerIdeal};
use iwasawa_core::verify::run_battery;
use iwasawa_core::{Error, Result};

#[derive(Parser)]
#[command(name = "iwasawa", version, about = "First layers of Z_p-extensions with cyclic base class group")]
struct Cli {
    /// Emit JSON instead of text tables.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct IdealArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    r: u32,
    #[arg(long)]
    j: u64,
}

impl IdealArgs {
    fn ideal(&self) -> Result<ReinerIdeal> {
        ReinerIdeal::new(self.p, self.m, self.r, self.j)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Module type of Z_p[σ]/(α, p^m N) from the classification table.
    Classify {
        #[command(flatten)]
        ideal: IdealArgs,
        /// Compare with the Smith normal form computation.
        #[arg(long)]
        verify_snf: bool,
        /// Compare with explicit enumeration (p = 3 only within budget).
        #[arg(long)]
        verify_brute: bool,
    },
    /// All possible A_1 over A_0 = Z/p^m up to order p^E.
    Enumerate {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u32,
        #[arg(long = "max-exp")]
        max_exp: u32,
    },
    /// Relation matrix, Smith normal form and shape of the quotient.
    Quotient {
        #[command(flatten)]
        ideal: IdealArgs,
        /// Also print the matrix row by row.
        #[arg(long)]
        show_matrix: bool,
    },
    /// Heuristic probabilities.
    Heuristics {
        #[command(subcommand)]
        which: HeuristicsCmd,
    },
    /// Desk-scale surveys.
    Survey {
        #[command(subcommand)]
        which: SurveyCmd,
    },
    /// Reads `d,a0,a1` records and tabulates them against the prediction.
    Ingest {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u32,
        /// Largest r tabulated; defaults to the largest observed.
        #[arg(long = "max-r")]
        max_r: Option<u32>,
    },
    /// Cross-validation battery.
    Verify {
        #[arg(long)]
        p: u64,
        #[arg(long = "max-m")]
        max_m: u32,
        #[arg(long = "max-r")]
        max_r: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Ejv,
    New,
}

#[derive(Subcommand)]
enum HeuristicsCmd {
    /// Prob(λ = r) under either model.
    Lambda {
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long = "max-r", default_value_t = 6)]
        max_r: u32,
        /// Include the r = 0 row extrapolated from the general formula.
        #[arg(long)]
        include_zero: bool,
    },
    /// Predicted distribution of A_1 over A_0 = Z/p^m.
    A1 {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u32,
        #[arg(long = "max-r", default_value_t = 10)]
        max_r: u32,
    },
    /// Prob(λ = 1 | A_0 cyclic) along three routes.
    Compat {
        #[arg(long)]
        p: u64,
    },
}

#[derive(Subcommand)]
enum SurveyCmd {
    /// Imaginary quadratic fields d = family(k), k in [min, max].
    Quad {
        #[arg(long)]
        p: u64,
        /// Residue family such as -1-3j, -3j or -2-5k.
        #[arg(long, allow_hyphen_values = true)]
        family: String,
        #[arg(long)]
        min: i64,
        #[arg(long)]
        max: i64,
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
    },
    /// Quadratic extensions of F_3(X) and their first layers.
    Ff {
        /// Survey the whole deduplicated family (default).
        #[arg(long, conflicts_with = "first")]
        full: bool,
        /// Survey only the first N polynomials in order.
        #[arg(long)]
        first: Option<usize>,
        /// Print one row per polynomial.
        #[arg(long)]
        rows: bool,
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
    },
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Output of a command: printable text, a JSON value, and whether it succeeded.
struct Outcome {
    text: String,
    json: Value,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable"));
            } else {
                print!("{}", out.text);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InvalidParameter(_) => 2,
                _ => 1,
            })
        }
    }
}

fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Classify {
            ideal,
            verify_snf,
            verify_brute,
        } => classify(ideal, verify_snf, verify_brute),
        Command::Enumerate { p, m, max_exp } => enumerate(p, m, max_exp),
        Command::Quotient { ideal, show_matrix } => quotient(ideal, show_matrix),
        Command::Heuristics { which } => match which {
            HeuristicsCmd::Lambda {
                p,
                model,
                max_r,
                include_zero,
            } => heur_lambda(p, model, max_r, include_zero),
            HeuristicsCmd::A1 { p, m, max_r } => heur_a1(p, m, max_r),
            HeuristicsCmd::Compat { p } => heur_compat(p),
        },
        Command::Survey { which } => match which {
            SurveyCmd::Quad {
                p,
                family,
                min,
                max,
                jobs,
            } => survey_quad(p, &family, min, max, jobs),
            SurveyCmd::Ff {
                full: _,
                first,
                rows,
                jobs,
            } => survey_function_field(first, rows, jobs),
        },
        Command::Ingest { file, p, m, max_r } => ingest(&file, p, m, max_r),
        Command::Verify { p, max_m, max_r } => verify(p, max_m, max_r),
    }
}

fn classify(a: IdealArgs, verify_snf: bool, verify_brute: bool) -> Result<Outcome> {
    let id = a.ideal()?;
    let shape = table1_shape(a.p, a.m, a.r, a.j)?;
    let mut text = format!(
        "ideal   p={} m={} r={} j={} (s={}, t={})\nshape   {}  ({})\n",
        a.p,
        a.m,
        a.r,
        a.j,
        id.s(),
        id.t(),
        shape,
        shape.pretty(a.p)
    );
    let mut json = json!({ "ideal": id, "shape": shape, "pretty": shape.pretty(a.p) });
    let mut ok = true;
    if verify_snf {
        let snf = quotient_model(&id)?.shape;
        let agree = snf == shape;
        ok &= agree;
        text += &format!("snf     {}  {}\n", snf, if agree { "agrees" } else { "MISMATCH" });
        json["snf"] = json!({ "shape": snf, "agrees": agree });
    }
    if verify_brute {
        let brute = quotient_brute_force(&id, id.policy_precision(iwasawa_core::reiner::precision_guard()?) + 4)?;
        let agree = brute == shape;
        ok &= agree;
        text += &format!("brute   {}  {}\n", brute, if agree { "agrees" } else { "MISMATCH" });
        json["brute"] = json!({ "shape": brute, "agrees": agree });
    }
    json["ok"] = json!(ok);
    Ok(Outcome { text, json, ok })
}

fn enumerate(p: u64, m: u32, max_exp: u32) -> Result<Outcome> {
    let list = theorem1_enumerate(p, m, max_exp)?;
    let mut text = format!("A_0 = Z/{p}^{m}: possible A_1 up to order {p}^{max_exp}\n");
    text += &format!("{:>3}  {:<20}  {:<24}  {:>7}\n", "r", "shape", "group", "classes");
    for e in &list {
        text += &format!(
            "{:>3}  {:<20}  {}  {:>7}\n",
            e.r,
            e.shape.to_string(),
            pad(&e.shape.pretty(p), 24),
            e.j_count
        );
    }
    Ok(Outcome {
        text,
        json: json!({ "p": p, "m": m, "max_exp": max_exp, "groups": list }),
        ok: true,
    })
}

/// Left-aligns text that may contain multi-byte characters such as `×`.
fn pad(s: &str, width: usize) -> String {
    let n = s.chars().count();
    format!("{s}{}", " ".repeat(width.saturating_sub(n)))
}

fn signed_columns(m: &iwasawa_core::padic::LocalMatrix) -> Vec<Vec<String>> {
    let rows = m.to_signed_rows();
    (0..m.cols()).map(|k| rows.iter().map(|r| r[k].to_string()).collect()).collect()
}

fn quotient(a: IdealArgs, show_matrix: bool) -> Result<Outcome> {
    let id = a.ideal()?;
    let model = quotient_model(&id)?;
    let n = model.precision;
    let cols = signed_columns(&model.matrix);
    let mut text = format!(
        "ideal      p={} m={} r={} j={}\nprecision  {}^{}\nrelation matrix columns (T-basis, ascending):\n",
        a.p, a.m, a.r, a.j, a.p, n
    );
    for (i, c) in cols.iter().enumerate() {
        let label = if i < a.p as usize {
            format!("alpha T^{i}")
        } else {
            format!("{}^{} N", a.p, a.m)
        };
        text += &format!("  {:<12} ({})\n", label, c.join(", "));
    }
    if show_matrix {
        text += "matrix:\n";
        for row in model.matrix.to_signed_rows() {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>8}")).collect();
            text += &format!("  [{}]\n", cells.join(" "));
        }
        if a.j != 0 {
            let general = relation_matrix_general(&id, n)?;
            text += &format!("  (with the {}^{} N column: {} columns)\n", a.p, a.m, general.cols());
        }
    }
    let vals: Vec<String> = model.snf.divisor_valuations.iter().map(u32::to_string).collect();
    text += &format!(
        "snf valuations  [{}]\nshape           {}  ({})\n",
        vals.join(", "),
        model.shape,
        model.shape.pretty(a.p)
    );
    Ok(Outcome {
        text,
        json: json!({
            "ideal": id,
            "precision": n,
            "columns": cols,
            "snf_valuations": model.snf.divisor_valuations,
            "shape": model.shape,
            "pretty": model.shape.pretty(a.p),
        }),
        ok: true,
    })
}

fn heur_lambda(p: u64, model: ModelArg, max_r: u32, include_zero: bool) -> Result<Outcome> {
    let model = match model {
        ModelArg::Ejv => LambdaModel::Ejv,
        ModelArg::New => LambdaModel::New,
    };
    let rows = lambda_table(p, model, max_r, include_zero)?;
    let name = match model {
        LambdaModel::Ejv => "ejv",
        LambdaModel::New => "new",
    };
    let mut text = format!("Prob(lambda = r), p = {p}, model {name}\n{:>3}  {:>9}\n", "r", "prob");
    for row in &rows {
        text += &format!(
            "{:>3}  {:>9}{}\n",
            row.r,
            row.probability.decimal(5),
            if row.extrapolated { "  (extrapolated)" } else { "" }
        );
    }
    Ok(Outcome {
        text,
        json: json!({ "p": p, "model": model, "rows": rows }),
        ok: true,
    })
}

fn heur_a1(p: u64, m: u32, max_r: u32) -> Result<Outcome> {
    let dist = predicted_a1_distribution(p, m, max_r)?;
    let mut text = format!("Predicted A_1 for A_0 = Z/{p}^{m}\n");
    text += &format!("{:>3}  {}  {:>9}\n", "r", pad("A_1", 24), "predicted");
    for e in &dist.entries {
        text += &format!("{:>3}  {}  {:>9}\n", e.r, pad(&e.shape.pretty(p), 24), to_decimal(&e.probability, 4));
    }
    text += &format!("tail beyond r = {max_r}: {}\n", to_decimal(&dist.tail, 4));
    let entries: Vec<Value> = dist
        .entries
        .iter()
        .map(|e| {
            json!({
                "shape": e.shape,
                "pretty": e.shape.pretty(p),
                "r": e.r,
                "j_count": e.j_count,
                "probability": e.probability.to_string(),
                "decimal": to_decimal(&e.probability, 4),
            })
        })
        .collect();
    Ok(Outcome {
        text,
        json: json!({ "p": p, "m": m, "max_r": max_r, "entries": entries, "tail": dist.tail.to_string() }),
        ok: true,
    })
}

fn heur_compat(p: u64) -> Result<Outcome> {
    let rep = compatibility_check(p)?;
    let mut text = format!(
        "p = {p}\nexpected        {}\nsymbolic ratio  {}\nnumeric ratio   {}\n",
        rep.expected,
        rep.symbolic_ratio,
        to_decimal(&rep.numeric_ratio, 30)
    );
    for (m, mass) in &rep.cyclic_masses {
        text += &format!("cyclic mass m={m}  {mass}\n");
    }
    text += &format!("{}\n", if rep.agrees { "agrees" } else { "DISAGREES" });
    Ok(Outcome {
        text,
        ok: rep.agrees,
        json: serde_json::to_value(&rep)?,
    })
}

fn survey_quad(p: u64, family: &str, min: i64, max: i64, jobs: usize) -> Result<Outcome> {
    let fam = Family::parse(family)?;
    let s = survey(p, fam, min, max, jobs.max(1))?;
    let mut text = format!(
        "family {} for k in [{min}, {max}], p = {p}\ncandidates       {}\nnot fundamental  {}\n{p} split         {}\nexcluded units   {:?}\nsurveyed         {}\n{p} | h           {} ({:.4})\n",
        s.family,
        s.candidates,
        s.not_fundamental,
        s.split,
        s.excluded_units,
        s.surveyed,
        s.surveyed - s.not_divisible,
        s.divisible_fraction()
    );
    for (m, n) in &s.cyclic {
        text += &format!("A_0 = Z/{p}^{m}     {n}\n");
    }
    text += &format!(
        "non-cyclic       {}\ncyclic among divisible {:.4}\n",
        s.non_cyclic,
        s.cyclic_fraction_of_divisible()
    );
    let mut json = serde_json::to_value(&s)?;
    json["divisible_fraction"] = json!(s.divisible_fraction());
    json["cyclic_fraction_of_divisible"] = json!(s.cyclic_fraction_of_divisible());
    Ok(Outcome { text, json, ok: true })
}

fn survey_function_field(first: Option<usize>, rows: bool, jobs: usize) -> Result<Outcome> {
    let sample = first.map_or(FfSample::Full, FfSample::First);
    let s = survey_ff(sample, jobs.max(1))?;
    let n1 = s.e0_histogram.get(&1).copied().unwrap_or(0);
    let mut text = format!(
        "family size {} (deduplicated), surveyed {}\n3 | h0      {}\n",
        s.family_size, s.total, s.divisible
    );
    for (e, n) in &s.e0_histogram {
        text += &format!("e0 = {e}      {n}\n");
    }
    text += &format!("e0 = 1 with e1 = 2 (lambda = 1): {} of {n1}\n", s.lambda_one);
    text += &format!("{:<10}", "");
    for (c, _) in &s.computed {
        text += &format!("  {}", pad(c, 12));
    }
    text += "\n";
    for (label, row) in [("computed", &s.computed), ("predicted", &s.predicted)] {
        text += &format!("{label:<10}");
        for (_, v) in row.iter() {
            text += &format!("  {}", pad(&format!("{v:.4}"), 12));
        }
        text += "\n";
    }
    let ok = s.injectivity_violations.is_empty();
    text += &format!("records with e1 < e0 + 1: {}\n", s.injectivity_violations.len());
    if rows {
        text += &s.to_tsv();
    }
    Ok(Outcome {
        text,
        json: serde_json::to_value(&s)?,
        ok,
    })
}

fn ingest(file: &std::path::Path, p: u64, m: u32, max_r: Option<u32>) -> Result<Outcome> {
    let rep = ingest_csv(file, p)?;
    let observed = rep
        .records
        .iter()
        .filter(|r| r.a0.exponents() == [m])
        .map(|r| r.a1.order_exponent().saturating_sub(m))
        .max()
        .unwrap_or(1);
    let max_r = max_r.unwrap_or(observed.max(1));
    let table = tabulate(&rep.records, p, m, max_r)?;
    for d in &rep.duplicates {
        eprintln!("warning: line {}: duplicate d = {} (first on line {}), kept the first", d.line, d.d, d.first_line);
    }
    let mut text = format!(
        "{}: {} records, {} duplicates, {} with non-cyclic A_0\n",
        rep.source,
        rep.records.len(),
        rep.duplicates.len(),
        rep.unchecked
    );
    text += &format!("anomalies: {}\n", rep.anomalies.len());
    for a in &rep.anomalies {
        text += &format!("  ANOMALY line {}: d = {}, A_0 = {}, A_1 = {}: {}\n", a.line, a.d, a.a0, a.a1, a.reason);
    }
    text += &table.to_text();
    Ok(Outcome {
        ok: rep.anomalies.is_empty(),
        text,
        json: json!({ "ingest": rep, "table": table }),
    })
}

fn verify(p: u64, max_m: u32, max_r: u32) -> Result<Outcome> {
    let rep = run_battery(p, max_m, max_r)?;
    let mut text = String::new();
    for (name, n) in &rep.checks {
        text += &format!("{name:<24} {n}\n");
    }
    for f in &rep.failures {
        text += &format!("FAIL {f}\n");
    }
    if rep.passed() {
        text += &format!("all checks passed: {} cases\n", rep.cases);
    } else {
        text += &format!("{} failures over {} cases\n", rep.failures.len(), rep.cases);
    }
    Ok(Outcome {
        ok: rep.passed(),
        text,
        json: serde_json::to_value(&rep)?,
    })
}
