//! Command-line front end.
//!
//! Every command validates its inputs before doing any work. Failures print
//! a single line `error[usage]: ...` (exit code 2) or `error[runtime]: ...`
//! (exit code 1) to stderr. A JSON config file given with `--config` may
//! supply any long flag of the chosen command; flags on the command line
//! win over the file.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::encode::{
    build_vocabulary, encode, RawTable, Schema, DEFAULT_TEST_FRACTION, DEFAULT_TOP_K,
};
use crate::error::Error;
use crate::lasso::LassoConfig;
use crate::logistic::LogRegConfig;
use crate::metrics::{auc, pr_curve, roc};
use crate::model::FittedModel;
use crate::pipeline::{load_encoded, run_lasso, run_logreg, write_encoded_csv};
use crate::report::{importance, DEFAULT_TOP_N};
use crate::resample::{sweep, SweepConfig, DEFAULT_SWEEP_GAMMAS, DEFAULT_SWEEP_LAMBDAS};
use crate::select::{
    default_alpha_grid, default_lambda_grid, r2_in_sample, r2_out_of_sample, CvOptions,
    DEFAULT_FOLDS,
};
use crate::synth::{generate_synthetic, SynthKind, SynthSpec};

#[derive(Debug, Parser)]
#[command(
    name = "sparsefit",
    version,
    about = "Sparse linear and logistic regression with L1 penalties",
    args_override_self = true
)]
pub struct Cli {
    /// JSON file supplying default flag values for the command.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Task {
    Lasso,
    Logreg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Linear,
    Logistic,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One-hot encode a CSV table with a schema file.
    Encode {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        /// Categories kept per categorical column.
        #[arg(long, default_value_t = DEFAULT_TOP_K)]
        top_k: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Tune the penalty by cross-validation, refit and evaluate.
    CvFit {
        #[arg(long, value_enum)]
        task: Task,
        /// Encoded dataset written by `encode`.
        #[arg(long)]
        data: PathBuf,
        /// Penalty grid (comma separated); defaults depend on the task.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        grid: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_FOLDS)]
        folds: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TEST_FRACTION)]
        test_fraction: f64,
        /// Fit on raw columns instead of standardized ones.
        #[arg(long)]
        no_standardize: bool,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Rank the most positive and most negative coefficients of a model.
    Importance {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOP_N)]
        top_n: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Score a saved model on an encoded dataset.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Test AUC over penalties, sampling frequencies and sampling schemes.
    Sweep {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = DEFAULT_SWEEP_LAMBDAS)]
        lambdas: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 0.., default_values_t = DEFAULT_SWEEP_GAMMAS)]
        gammas: Vec<f64>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TEST_FRACTION)]
        test_fraction: f64,
        #[arg(long)]
        no_standardize: bool,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic dataset with planted sparse coefficients.
    Synth {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        sparsity: usize,
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
        #[arg(long, default_value_t = 0.5)]
        positive_rate: f64,
        #[arg(long, default_value_t = 1.0)]
        intercept: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    /// Single-line message with a machine-parsable prefix.
    pub fn line(&self) -> String {
        let (tag, msg) = match self {
            CliError::Usage(m) => ("usage", m.clone()),
            CliError::Runtime(e) => ("runtime", e.to_string()),
        };
        let flat: Vec<&str> = msg
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        format!("error[{tag}]: {}", flat.join(" "))
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match parse_with_config(&args) {
        Ok(cli) => cli,
        Err(Parsed::Exit(code)) => return code,
        Err(Parsed::Fail(e)) => {
            eprintln!("{}", e.line());
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(summary) => {
            for line in summary {
                println!("{line}");
            }
            0
        }
        Err(e) => {
            eprintln!("{}", e.line());
            e.exit_code()
        }
    }
}

enum Parsed {
    Exit(i32),
    Fail(CliError),
}

fn clap_failure(e: clap::Error) -> Parsed {
    use clap::error::ErrorKind;
    match e.kind() {
        ErrorKind::DisplayHelp
        | ErrorKind::DisplayVersion
        | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            Parsed::Exit(
                if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                    2
                } else {
                    0
                },
            )
        }
        _ => {
            // Keep the message, drop clap's usage and help hints.
            let rendered = e.render().to_string();
            let message: Vec<&str> = rendered
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            let text = message.join(" ");
            let text = text.trim_start_matches("error: ");
            Parsed::Fail(usage(if text.is_empty() {
                "invalid arguments"
            } else {
                text
            }))
        }
    }
}

/// Splices flags from the `--config` file in right after the subcommand,
/// ahead of the user's own flags so that those override them.
fn parse_with_config(args: &[OsString]) -> Result<Cli, Parsed> {
    let Some((config_path, pos, sub_name)) = locate_config(args) else {
        return Cli::try_parse_from(args).map_err(clap_failure);
    };
    let text = fs::read_to_string(&config_path).map_err(|e| {
        Parsed::Fail(usage(format!(
            "cannot read config {}: {e}",
            config_path.display()
        )))
    })?;
    let value: Value = serde_json::from_str(&text).map_err(|e| {
        Parsed::Fail(usage(format!(
            "invalid config {}: {e}",
            config_path.display()
        )))
    })?;
    // List flags accumulate in clap, so a flag given on the command line
    // replaces the file's value outright.
    let given: Vec<&str> = args[pos + 1..]
        .iter()
        .filter_map(|a| a.to_str()?.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a))
        .collect();
    let flags: Vec<String> = config_flags(&value, &sub_name)
        .map_err(Parsed::Fail)?
        .into_iter()
        .filter(|f| {
            let name = f.trim_start_matches("--");
            !given.contains(&name.split('=').next().unwrap_or(name))
        })
        .collect();

    let mut spliced: Vec<OsString> = args[..=pos].to_vec();
    spliced.extend(flags.into_iter().map(OsString::from));
    spliced.extend(args[pos + 1..].iter().cloned());
    Cli::try_parse_from(spliced).map_err(clap_failure)
}

/// Finds the `--config` path and the position and name of the subcommand
/// without a full parse, since required flags may live in the config file.
fn locate_config(args: &[OsString]) -> Option<(PathBuf, usize, String)> {
    let root = Cli::command();
    let names: Vec<&str> = root.get_subcommands().map(|c| c.get_name()).collect();
    let mut config = None;
    let mut sub = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_str().unwrap_or("");
        if a == "--" {
            break;
        } else if a == "--config" {
            config = args.get(i + 1).map(PathBuf::from);
            i += 1;
        } else if let Some(v) = a.strip_prefix("--config=") {
            config = Some(PathBuf::from(v));
        } else if sub.is_none() && names.contains(&a) {
            sub = Some((i, a.to_owned()));
        }
        i += 1;
    }
    let (pos, name) = sub?;
    Some((config?, pos, name))
}

/// Turns config entries into `--flag value` tokens. Top-level keys apply
/// when the command has such a flag; an object under the command's name
/// applies unconditionally.
fn config_flags(value: &Value, sub_name: &str) -> Result<Vec<String>, CliError> {
    let Value::Object(map) = value else {
        return Err(usage("config file must hold a JSON object"));
    };
    let root = Cli::command();
    let sub = root.find_subcommand(sub_name).expect("subcommand exists");
    let known: Vec<String> = sub
        .get_arguments()
        .filter_map(|a| a.get_long().map(str::to_owned))
        .collect();

    let mut entries: Vec<(String, &Value, bool)> = Vec::new();
    for (k, v) in map {
        if k == sub_name {
            continue;
        }
        if !v.is_object() {
            entries.push((k.replace('_', "-"), v, false));
        }
    }
    if let Some(Value::Object(scoped)) = map.get(sub_name) {
        for (k, v) in scoped {
            entries.push((k.replace('_', "-"), v, true));
        }
    }

    let mut out = Vec::new();
    for (flag, v, strict) in entries {
        if flag == "config" {
            continue;
        }
        if !known.contains(&flag) {
            if strict {
                return Err(usage(format!(
                    "config key '{flag}' is not a flag of {sub_name}"
                )));
            }
            continue;
        }
        match v {
            Value::Bool(true) => out.push(format!("--{flag}")),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let joined: Vec<String> =
                    items.iter().map(scalar_text).collect::<Result<_, _>>()?;
                out.push(format!("--{flag}={}", joined.join(",")));
            }
            other => out.push(format!("--{flag}={}", scalar_text(other)?)),
        }
    }
    Ok(out)
}

fn scalar_text(v: &Value) -> Result<String, CliError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        _ => Err(usage(format!("unsupported config value {v}"))),
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| {
        CliError::Runtime(Error::from(e).context(format!("creating {}", dir.display())))
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| {
        CliError::Runtime(Error::from(e).context(format!("writing {}", path.display())))
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    text.push('\n');
    write_text(path, &text)
}

fn write_with<F>(path: &Path, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut Vec<u8>) -> crate::error::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf)?;
    fs::write(path, buf).map_err(|e| {
        CliError::Runtime(Error::from(e).context(format!("writing {}", path.display())))
    })
}

fn require_file(path: &Path, what: &str) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(format!(
            "{what} file {} does not exist",
            path.display()
        )))
    }
}

fn check_fraction(f: f64) -> Result<(), CliError> {
    if f > 0.0 && f < 1.0 {
        Ok(())
    } else {
        Err(usage(format!(
            "--test-fraction must lie in (0, 1), got {f}"
        )))
    }
}

/// Runs one command, returning summary lines for stdout.
pub fn execute(cmd: &Command) -> Result<Vec<String>, CliError> {
    match cmd {
        Command::Encode {
            csv,
            schema,
            top_k,
            out_dir,
        } => {
            require_file(csv, "csv")?;
            require_file(schema, "schema")?;
            if *top_k == 0 {
                return Err(usage("--top-k must be at least 1"));
            }
            let schema = Schema::load(schema)?;
            let table = RawTable::from_path(csv)?;
            let vocab = build_vocabulary(&table, &schema, *top_k)?;
            let ds = encode(&table, &vocab)?;
            ensure_dir(out_dir)?;
            let vocab_path = out_dir.join("vocabulary.json");
            let data_path = out_dir.join("encoded.csv");
            write_text(&vocab_path, &(vocab.to_json()? + "\n"))?;
            write_with(&data_path, |buf| {
                write_encoded_csv(&ds, &vocab.target.name, buf)
            })?;
            Ok(vec![
                format!(
                    "encoded {} rows into {} features",
                    ds.n_rows(),
                    ds.n_features()
                ),
                format!("wrote {}", vocab_path.display()),
                format!("wrote {}", data_path.display()),
            ])
        }
        Command::CvFit {
            task,
            data,
            grid,
            folds,
            seed,
            test_fraction,
            no_standardize,
            out_dir,
        } => {
            require_file(data, "data")?;
            check_fraction(*test_fraction)?;
            if *folds < 2 {
                return Err(usage("--folds must be at least 2"));
            }
            if let Some(g) = grid {
                if g.is_empty() || g.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                    return Err(usage("--grid needs nonnegative finite values"));
                }
            }
            let (ds, _) = load_encoded(data)?;
            let opts = CvOptions {
                folds: *folds,
                seed: *seed,
                standardize: !no_standardize,
            };
            ensure_dir(out_dir)?;
            let mut lines = Vec::new();
            let cv = match task {
                Task::Lasso => {
                    let grid = grid.clone().unwrap_or_else(default_alpha_grid);
                    let run = run_lasso(&ds, &grid, &opts, *test_fraction, &LassoConfig::new(0.0))?;
                    FittedModel::from(run.model.clone()).save(out_dir.join("model.json"))?;
                    write_json(&out_dir.join("evaluation.json"), &run.evaluation)?;
                    lines.push(format!(
                        "selected alpha {} (R2 in-sample {:.6}, out-of-sample {:.6})",
                        run.cv.selected,
                        run.evaluation.r2_in_sample,
                        run.evaluation.r2_out_of_sample
                    ));
                    run.cv
                }
                Task::Logreg => {
                    let grid = grid.clone().unwrap_or_else(default_lambda_grid);
                    let run =
                        run_logreg(&ds, &grid, &opts, *test_fraction, &LogRegConfig::new(0.0))?;
                    for s in &run.schemes {
                        let name = s.scheme.as_str();
                        FittedModel::from(s.model.clone())
                            .save(out_dir.join(format!("model_{name}.json")))?;
                        write_with(&out_dir.join(format!("roc_{name}.csv")), |b| {
                            s.roc.write_csv(b)
                        })?;
                        write_with(&out_dir.join(format!("pr_{name}.csv")), |b| {
                            s.pr.write_csv(b)
                        })?;
                    }
                    let original = run.scheme(crate::resample::SamplingScheme::Original);
                    FittedModel::from(original.model.clone()).save(out_dir.join("model.json"))?;
                    write_json(&out_dir.join("evaluation.json"), &run.evaluation())?;
                    lines.push(format!(
                        "selected lambda {} (test AUC on original sample {:.6})",
                        run.cv.selected, original.test_auc
                    ));
                    run.cv
                }
            };
            write_text(&out_dir.join("cv_report.json"), &(cv.to_json()? + "\n"))?;
            write_with(&out_dir.join("cv_report.csv"), |b| cv.write_csv(b))?;
            lines.push(format!("wrote results to {}", out_dir.display()));
            Ok(lines)
        }
        Command::Importance {
            model,
            top_n,
            out_dir,
        } => {
            require_file(model, "model")?;
            let m = FittedModel::load(model)?;
            let report = importance(&m, *top_n);
            ensure_dir(out_dir)?;
            write_text(
                &out_dir.join("importance.json"),
                &(report.to_json()? + "\n"),
            )?;
            write_with(&out_dir.join("importance.csv"), |b| report.write_csv(b))?;
            Ok(vec![format!(
                "{} positive and {} negative features written to {}",
                report.positive.len(),
                report.negative.len(),
                out_dir.display()
            )])
        }
        Command::Evaluate {
            model,
            data,
            out_dir,
        } => {
            require_file(model, "model")?;
            require_file(data, "data")?;
            let m = FittedModel::load(model)?;
            let (ds, _) = load_encoded(data)?;
            if m.feature_names() != ds.feature_names.as_slice() {
                return Err(CliError::Runtime(Error::DimensionMismatch(
                    "model features do not match the dataset columns".into(),
                )));
            }
            ensure_dir(out_dir)?;
            match &m {
                FittedModel::Linear(lm) => {
                    let pred = lm.predict(&ds.x)?;
                    let mse =
                        ds.y.iter()
                            .zip(&pred)
                            .map(|(y, p)| (y - p).powi(2))
                            .sum::<f64>()
                            / ds.n_rows() as f64;
                    let eval = serde_json::json!({
                        "kind": "linear",
                        "n": ds.n_rows(),
                        "mse": mse,
                        "r2": r2_in_sample(&ds.y, &pred)?,
                        "r2_correlation": r2_out_of_sample(&ds.y, &pred)?,
                    });
                    write_json(&out_dir.join("evaluation.json"), &eval)?;
                    Ok(vec![format!("mse {mse:.6}")])
                }
                FittedModel::Logistic(lm) => {
                    let scores = lm.decision_function(&ds.x)?;
                    let a = auc(&ds.y, &scores)?;
                    let pr = pr_curve(&ds.y, &scores)?;
                    write_with(&out_dir.join("roc.csv"), |b| {
                        roc(&ds.y, &scores)?.write_csv(b)
                    })?;
                    write_with(&out_dir.join("pr.csv"), |b| pr.write_csv(b))?;
                    let eval = serde_json::json!({
                        "kind": "logistic",
                        "n": ds.n_rows(),
                        "auc": a,
                        "average_precision": pr.average_precision,
                    });
                    write_json(&out_dir.join("evaluation.json"), &eval)?;
                    Ok(vec![format!("auc {a:.6}")])
                }
            }
        }
        Command::Sweep {
            data,
            lambdas,
            gammas,
            seed,
            test_fraction,
            no_standardize,
            out,
        } => {
            if gammas.is_empty() {
                return Err(usage("--gammas needs at least one value"));
            }
            if let Some(g) = gammas.iter().find(|g| !(0.0..=1.0).contains(*g)) {
                return Err(usage(format!("gamma {g} outside [0, 1]")));
            }
            if lambdas.is_empty() || lambdas.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
                return Err(usage("--lambdas needs nonnegative finite values"));
            }
            check_fraction(*test_fraction)?;
            require_file(data, "data")?;
            let (ds, _) = load_encoded(data)?;
            let mut cfg = SweepConfig::new(*seed);
            cfg.lambdas = lambdas.clone();
            cfg.gammas = gammas.clone();
            cfg.test_fraction = *test_fraction;
            cfg.standardize = !no_standardize;
            let report = sweep(&ds, &cfg)?;
            if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
                ensure_dir(parent)?;
            }
            write_with(out, |b| report.write_csv(b))?;
            Ok(vec![format!(
                "wrote {} rows to {}",
                report.rows.len(),
                out.display()
            )])
        }
        Command::Synth {
            kind,
            n,
            p,
            sparsity,
            noise,
            positive_rate,
            intercept,
            seed,
            out_dir,
        } => {
            let spec = SynthSpec {
                kind: match kind {
                    Kind::Linear => SynthKind::Linear,
                    Kind::Logistic => SynthKind::Logistic,
                },
                n: *n,
                p: *p,
                sparsity: *sparsity,
                noise: *noise,
                positive_rate: *positive_rate,
                intercept: *intercept,
                coefficients: None,
            };
            let data = generate_synthetic(&spec, *seed).map_err(|e| usage(e.to_string()))?;
            ensure_dir(out_dir)?;
            let ds = &data.dataset;
            let mut table = csv::Writer::from_writer(Vec::new());
            let mut header: Vec<String> = ds.feature_names.clone();
            header.push("y".into());
            table.write_record(&header).map_err(Error::from)?;
            for i in 0..ds.n_rows() {
                let mut rec: Vec<String> = ds.x.row(i).iter().map(f64::to_string).collect();
                rec.push(ds.y[i].to_string());
                table.write_record(&rec).map_err(Error::from)?;
            }
            let bytes = table
                .into_inner()
                .map_err(|e| Error::from(e.into_error()))?;
            fs::write(out_dir.join("data.csv"), bytes).map_err(Error::from)?;

            let target_kind = match kind {
                Kind::Linear => crate::encode::ColumnKind::TargetNumeric,
                Kind::Logistic => crate::encode::ColumnKind::TargetBinary,
            };
            let mut columns: Vec<crate::encode::ColumnSpec> = ds
                .feature_names
                .iter()
                .map(|f| {
                    crate::encode::ColumnSpec::new(f.clone(), crate::encode::ColumnKind::Numeric)
                })
                .collect();
            columns.push(crate::encode::ColumnSpec::new("y", target_kind));
            write_json(&out_dir.join("schema.json"), &Schema(columns))?;
            write_json(
                &out_dir.join("truth.json"),
                &serde_json::json!({
                    "spec": spec,
                    "seed": seed,
                    "intercept": data.intercept,
                    "coefficients": data.coefficients,
                }),
            )?;
            Ok(vec![format!(
                "wrote {} rows with {} features to {}",
                ds.n_rows(),
                ds.n_features(),
                out_dir.display()
            )])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn config_flags_respect_scope() {
        let v: Value = serde_json::json!({
            "seed": 4,
            "top_n": 3,
            "cv-fit": {"folds": 5, "grid": [0.1, 1.0], "no_standardize": true}
        });
        let flags = config_flags(&v, "cv-fit").unwrap();
        assert!(flags.contains(&"--seed=4".to_string()));
        assert!(flags.contains(&"--folds=5".to_string()));
        assert!(flags.contains(&"--grid=0.1,1.0".to_string()));
        assert!(flags.contains(&"--no-standardize".to_string()));
        assert!(!flags.iter().any(|f| f.starts_with("--top-n")));

        let bad = serde_json::json!({"cv-fit": {"bogus": 1}});
        assert!(config_flags(&bad, "cv-fit").is_err());
    }

    #[test]
    fn error_lines_are_single_line() {
        let e = CliError::Usage("first\nsecond".into());
        assert_eq!(e.line(), "error[usage]: first second");
        assert_eq!(e.exit_code(), 2);
        let e = CliError::Runtime(Error::InvalidDataset("x".into()));
        assert!(e.line().starts_with("error[runtime]: "));
        assert_eq!(e.exit_code(), 1);
    }
}
