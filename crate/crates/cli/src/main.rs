use std::fmt::Write as _;
use std::process::ExitCode;

use aromakit::acceptance::run_all;
use aromakit::algebra::{d_h, d_v, euler_e, euler_eq, euler_estar, interior_euler, parse_coeff, FormCombo, TermRecord};
use aromakit::evaldiff::{elementary_differential, random_divfree_field, random_field, PolyVectorField};
use aromakit::forest::{generate, Forest};
use aromakit::genfun::dimension_table;
use aromakit::homotopy::HomotopyRegistry;
use aromakit::spaces::{
    annihilator_div_basis, basis, divergence_basis, exactness_report, matrix_dh, solenoidal_basis,
    solenoidal_generators, vp_certificate, VpOutcome,
};
use aromakit::util::init_thread_pool;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "aromakit", version, about = "Aromatic forests, their bicomplex and homotopy operators")]
struct Cli {
    /// Order N (number of vertices).
    #[arg(short = 'N', long = "order", global = true, default_value_t = 3)]
    order: usize,
    /// Number of roots n.
    #[arg(short = 'n', long = "roots", global = true, default_value_t = 1)]
    roots: usize,
    /// Number of covertices p.
    #[arg(short = 'p', long = "covertices", global = true, default_value_t = 0)]
    covertices: usize,
    /// Work modulo 1-loops.
    #[arg(long, global = true)]
    divfree: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Shorthand for --format json.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Shorthand for --format csv.
    #[arg(long, global = true)]
    csv: bool,
    #[arg(long, global = true)]
    max_order: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the canonical forests of Ω_{n,p}^N.
    Enumerate,
    /// Basis sizes for every n ≤ N and p ≤ 2 at the current order.
    Dims,
    /// Dimension tables up to --max-order (default 10).
    Tables,
    /// Horizontal differential of a form.
    Dh { form: String },
    /// Vertical differential of a form.
    Dv { form: String },
    /// Euler operators.
    Euler {
        form: String,
        /// Apply E^q instead of E.
        #[arg(long)]
        q: Option<usize>,
        /// Variational derivative E° on Ω_0.
        #[arg(long, conflicts_with_all = ["q", "interior"])]
        variational: bool,
        /// Interior Euler operator I on Ω_{0,p}.
        #[arg(long, conflicts_with = "q")]
        interior: bool,
    },
    /// Apply a named homotopy operator.
    Homotopy { name: String, form: String },
    /// Solenoidal forms of order N.
    Solenoidal {
        #[arg(value_enum)]
        which: SolenoidalKind,
    },
    /// Divergence basis of Ω_0^N.
    DivergenceBasis,
    /// Functionals annihilating the divergences of order N.
    Annihilators,
    /// Exactness of rows and columns at order N.
    Exactness {
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, default_value_t = 2)]
        p_max: usize,
    },
    /// Check whether a modified field is volume preserving; reads a JSON file.
    VpCheck { file: String },
    /// Elementary differential of a form for a polynomial vector field.
    Eval {
        form: String,
        /// Field as a JSON file or inline JSON `{"d":..,"components":[..]}`.
        #[arg(long)]
        field: Option<String>,
        /// Use a random divergence-free field.
        #[arg(long)]
        solenoidal_field: bool,
    },
    /// Run the built-in verification suite.
    CheckPaper,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SolenoidalKind {
    Gen,
    Basis,
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Out = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_thread_pool();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(text)) => {
            print!("{text}");
            ExitCode::from(2)
        }
    }
}

impl Cli {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            self.format
        }
    }
}

fn run(cli: &Cli) -> Out {
    let fmt = cli.format();
    match &cli.command {
        Command::Enumerate => enumerate(cli, fmt),
        Command::Dims => dims(cli, fmt),
        Command::Tables => {
            let t = dimension_table(cli.max_order.unwrap_or(10));
            Ok(match fmt {
                Format::Text => t.to_string(),
                Format::Json => t.to_json() + "\n",
                Format::Csv => format!("{}\n{}", t.table1_csv(), t.table2_csv()),
            })
        }
        Command::Dh { form } => combo_out(&d_h(&parse(form)?)?, fmt),
        Command::Dv { form } => combo_out(&d_v(&parse(form)?)?, fmt),
        Command::Euler { form, q, variational, interior } => {
            let c = parse(form)?;
            let out = if *variational {
                euler_estar(&c)?
            } else if *interior {
                interior_euler(&c)?
            } else if let Some(q) = q {
                euler_eq(&c, *q)
            } else {
                euler_e(&c)
            };
            combo_out(&out, fmt)
        }
        Command::Homotopy { name, form } => {
            let reg = HomotopyRegistry::standard();
            if reg.get(name).is_none() {
                return Err(Failure::Usage(format!(
                    "unknown homotopy '{name}', expected one of: {}",
                    reg.names().join(", ")
                )));
            }
            combo_out(&reg.apply(name, &parse(form)?)?, fmt)
        }
        Command::Solenoidal { which } => {
            let list = match (which, cli.divfree) {
                (SolenoidalKind::Gen, d) => solenoidal_generators(cli.order, d),
                (SolenoidalKind::Basis, false) => solenoidal_basis(cli.order),
                (SolenoidalKind::Basis, true) => matrix_dh(cli.order, 1, 0, true).kernel(),
            };
            combo_list(&list, fmt)
        }
        Command::DivergenceBasis => {
            let pairs = divergence_basis(cli.order);
            match fmt {
                Format::Json => {
                    let v: Vec<Value> = pairs
                        .iter()
                        .map(|(a, d)| json!({"scalar": a.to_string(), "divergence": records(d)}))
                        .collect();
                    json_out(&Value::Array(v))
                }
                Format::Csv => {
                    let mut s = String::from("scalar,divergence\n");
                    for (a, d) in &pairs {
                        let _ = writeln!(s, "{},{}", csv_field(&a.to_string()), csv_field(&d.to_string()));
                    }
                    Ok(s)
                }
                Format::Text => {
                    let mut s = String::new();
                    for (a, d) in &pairs {
                        let _ = writeln!(s, "{a}\t{d}");
                    }
                    Ok(s)
                }
            }
        }
        Command::Annihilators => combo_list(&annihilator_div_basis(cli.order), fmt),
        Command::Exactness { n_max, p_max } => {
            let r = exactness_report(cli.order, n_max.unwrap_or(cli.order), *p_max, cli.divfree);
            Ok(match fmt {
                Format::Text => r.to_string(),
                Format::Json => serde_json::to_string_pretty(&r)? + "\n",
                Format::Csv => r.to_csv(),
            })
        }
        Command::VpCheck { file } => vp_check(cli, file, fmt),
        Command::Eval { form, field, solenoidal_field } => eval(cli, form, field.as_deref(), *solenoidal_field, fmt),
        Command::CheckPaper => {
            let results = run_all();
            let failed = results.iter().filter(|r| !r.passed).count();
            let text = match fmt {
                Format::Json => serde_json::to_string_pretty(&results)? + "\n",
                Format::Csv => {
                    let mut s = String::from("id,name,passed,elapsed_ms,detail\n");
                    for r in &results {
                        let _ = writeln!(s, "{},{},{},{},{}", r.id, csv_field(r.name), r.passed, r.elapsed_ms, csv_field(&r.detail));
                    }
                    s
                }
                Format::Text => {
                    let mut s: String = results.iter().map(|r| format!("{r}\n")).collect();
                    let _ = writeln!(s, "{} of {} passed", results.len() - failed, results.len());
                    s
                }
            };
            if failed > 0 {
                Err(Failure::Verification(text))
            } else {
                Ok(text)
            }
        }
    }
}

fn parse(form: &str) -> Result<FormCombo, Failure> {
    Ok(FormCombo::parse(form)?)
}

fn records(c: &FormCombo) -> Value {
    serde_json::to_value(c.to_records()).expect("records serialize")
}

fn json_out(v: &Value) -> Out {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn combo_out(c: &FormCombo, fmt: Format) -> Out {
    Ok(match fmt {
        Format::Text => format!("{c}\n"),
        Format::Json => c.to_json() + "\n",
        Format::Csv => {
            let mut s = String::from("forest,coeff\n");
            for r in c.to_records() {
                let _ = writeln!(s, "{},{}", csv_field(&r.forest), r.coeff);
            }
            s
        }
    })
}

fn combo_list(list: &[FormCombo], fmt: Format) -> Out {
    match fmt {
        Format::Text => Ok(list.iter().map(|c| format!("{c}\n")).collect()),
        Format::Json => json_out(&Value::Array(list.iter().map(records).collect())),
        Format::Csv => {
            let mut s = String::from("index,forest,coeff\n");
            for (i, c) in list.iter().enumerate() {
                for r in c.to_records() {
                    let _ = writeln!(s, "{i},{},{}", csv_field(&r.forest), r.coeff);
                }
            }
            Ok(s)
        }
    }
}

fn enumerate(cli: &Cli, fmt: Format) -> Out {
    let forests: Vec<Forest> = generate(cli.order, cli.roots, cli.covertices, cli.divfree)?;
    Ok(match fmt {
        Format::Text => forests.iter().map(|f| format!("{f}\n")).collect(),
        Format::Json => {
            let v: Vec<Value> = forests
                .iter()
                .map(|f| json!({"forest": f.to_string(), "symmetry": f.symmetry_order().to_string()}))
                .collect();
            serde_json::to_string_pretty(&v)? + "\n"
        }
        Format::Csv => {
            let mut s = String::from("forest,symmetry\n");
            for f in &forests {
                let _ = writeln!(s, "{},{}", csv_field(&f.to_string()), f.symmetry_order());
            }
            s
        }
    })
}

fn dims(cli: &Cli, fmt: Format) -> Out {
    let n = cli.order;
    let grid: Vec<Vec<usize>> = (0..=2)
        .map(|p| (0..=n).map(|roots| basis(n, roots, p, cli.divfree).len()).collect())
        .collect();
    Ok(match fmt {
        Format::Json => serde_json::to_string_pretty(&json!({"order": n, "divfree": cli.divfree, "dims": grid}))? + "\n",
        Format::Csv => {
            let mut s = String::from("p");
            for roots in 0..=n {
                let _ = write!(s, ",n={roots}");
            }
            s.push('\n');
            for (p, row) in grid.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|d| d.to_string()).collect();
                let _ = writeln!(s, "{p},{}", cells.join(","));
            }
            s
        }
        Format::Text => {
            let mut s = format!("{:>4}", "p\\n");
            for roots in 0..=n {
                let _ = write!(s, " {roots:>8}");
            }
            s.push('\n');
            for (p, row) in grid.iter().enumerate() {
                let _ = write!(s, "{p:>4}");
                for d in row {
                    let _ = write!(s, " {d:>8}");
                }
                s.push('\n');
            }
            s
        }
    })
}

/// Accepts `{"forest": coeff, ...}` with string or integer coefficients,
/// or a list of `{"forest", "coeff"}` records.
fn read_field_combo(text: &str) -> Result<FormCombo, Failure> {
    let v: Value = serde_json::from_str(text)?;
    match v {
        Value::Object(map) => {
            let mut out = FormCombo::zero();
            for (forest, coeff) in map {
                let q = match coeff {
                    Value::String(s) => parse_coeff(&s)?,
                    Value::Number(n) => parse_coeff(&n.to_string())?,
                    other => return Err(Failure::Usage(format!("bad coefficient {other} for {forest}"))),
                };
                out.add_term(Forest::parse(&forest)?.code(), q);
            }
            Ok(out)
        }
        Value::Array(_) => {
            let recs: Vec<TermRecord> = serde_json::from_value(v)?;
            Ok(FormCombo::from_records(&recs)?)
        }
        _ => Err(Failure::Usage("expected a JSON object or array".into())),
    }
}

fn vp_check(cli: &Cli, file: &str, fmt: Format) -> Out {
    let text = std::fs::read_to_string(file).map_err(|e| Failure::Usage(format!("{file}: {e}")))?;
    let b = read_field_combo(&text)?;
    let max_order = cli.max_order.unwrap_or(cli.order);
    let outcome = vp_certificate(&b, max_order, cli.divfree)?;
    let body = match fmt {
        Format::Json => serde_json::to_string_pretty(&outcome.to_json())? + "\n",
        _ => match &outcome {
            VpOutcome::Certified(c) => {
                let mut s = format!("certified up to order {max_order}\n");
                for (k, eta) in &c.eta {
                    let _ = writeln!(s, "eta_{k} = {eta}");
                }
                s
            }
            VpOutcome::Infeasible(f) => format!(
                "infeasible at order {} ({:?})\nscalar: {}\nfunctional: {}\npairing: {}\n",
                f.order,
                f.reason,
                f.scalar,
                f.functional,
                aromakit::algebra::format_coeff(&f.pairing)
            ),
        },
    };
    if outcome.is_certified() {
        Ok(body)
    } else {
        Err(Failure::Verification(body))
    }
}

fn eval(cli: &Cli, form: &str, field: Option<&str>, solenoidal: bool, fmt: Format) -> Out {
    let c = parse(form)?;
    let f = match field {
        Some(spec) if spec.trim_start().starts_with('{') => PolyVectorField::from_json(spec)?,
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
            PolyVectorField::from_json(&text)?
        }
        None if solenoidal => random_divfree_field(3, 2, cli.seed)?,
        None => random_field(3, 2, cli.seed)?,
    };
    let t = elementary_differential(&c, &f)?;
    let comps: Vec<String> = t.components().iter().map(|p| p.to_string()).collect();
    Ok(match fmt {
        Format::Json => serde_json::to_string_pretty(&json!({
            "field": serde_json::from_str::<Value>(&f.to_json())?,
            "rank": t.rank(),
            "dim": t.dim(),
            "components": comps,
        }))? + "\n",
        Format::Csv => {
            let mut s = String::from("index,value\n");
            for (i, p) in comps.iter().enumerate() {
                let _ = writeln!(s, "{i},{}", csv_field(p));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (i, p) in comps.iter().enumerate() {
                if t.rank() == 0 {
                    let _ = writeln!(s, "{p}");
                } else {
                    let _ = writeln!(s, "[{i}] {p}");
                }
            }
            s
        }
    })
}
