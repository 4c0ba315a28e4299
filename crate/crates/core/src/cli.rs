//! Command-line front end: `classify`, `census`, `table1`, `verify`.
//!
//! Output is computed in full before anything is written, so a failing run
//! leaves no partial files behind.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::arith::ExactRational;
use crate::brauer::{classify_with, ctcs_family_check, Classification};
use crate::census::{run_census, write_csv, write_json, CensusConfig, CensusReport};
use crate::density::{verify_paper, Column, DensityTable, VerifyInputs, VerifyReport, DEFAULT_MU_SEED};
use crate::error::{Error, Result};
use crate::local::LocalConfig;
use crate::surface::{orbit, stratify, Stratum, SurfaceTuple};

pub const EXIT_INVALID_TUPLE: u8 = 2;
pub const EXIT_UNDECIDED: u8 = 3;
pub const EXIT_INVARIANT: u8 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "chatelet", version, about = "Local-global census of Chatelet surfaces Y^2 + Z^2 = (aT^2 + b)(cT^2 + d) with |ad - bc| = 1")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify one surface and print its invariants as JSON.
    Classify {
        #[arg(allow_negative_numbers = true)]
        a: i64,
        #[arg(allow_negative_numbers = true)]
        b: i64,
        #[arg(allow_negative_numbers = true)]
        c: i64,
        #[arg(allow_negative_numbers = true)]
        d: i64,
        #[arg(long)]
        depth_cap: Option<u32>,
    },
    /// Count surfaces by height.
    Census(RunArgs),
    /// Recompute the per-stratum class counts.
    Table1 {
        #[arg(long)]
        depth_cap: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Compare every recomputed quantity with its published value.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Largest k checked in the family (1, 1 - k, -1, k).
        #[arg(long, default_value_t = 199)]
        k_max: i64,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = 2000)]
    pub max_norm: u64,
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Vec<u64>,
    #[arg(long, env = "CHATELET_SHARDS", default_value_t = 1)]
    pub shards: usize,
    #[arg(long, default_value_t = DEFAULT_MU_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub depth_cap: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Validated settings for one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub height: u64,
    pub checkpoints: Vec<u64>,
    pub shards: usize,
    pub seed: u64,
    pub depth_cap: Option<u32>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn from_args(command: &'static str, args: &RunArgs) -> Result<Self> {
        let config = RunConfig {
            command,
            height: args.max_norm,
            checkpoints: args.checkpoints.clone(),
            shards: args.shards,
            seed: args.seed,
            depth_cap: args.depth_cap,
            out: args.out.clone(),
            format: args.format,
        };
        config.census_config().resolved_checkpoints()?;
        Ok(config)
    }

    pub fn local(&self) -> LocalConfig {
        LocalConfig {
            depth_cap: self.depth_cap,
        }
    }

    pub fn census_config(&self) -> CensusConfig {
        CensusConfig {
            height: self.height,
            checkpoints: self.checkpoints.clone(),
            shards: self.shards,
            local: self.local(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ClassifyOutput {
    pub tuple: SurfaceTuple,
    #[serde(flatten)]
    pub classification: Classification,
    pub stratum: Stratum,
    pub orbit: Vec<SurfaceTuple>,
}

pub fn cmd_classify(a: i64, b: i64, c: i64, d: i64, local: &LocalConfig) -> Result<ClassifyOutput> {
    let tuple = SurfaceTuple::new(a, b, c, d)?;
    Ok(ClassifyOutput {
        tuple,
        classification: classify_with(&tuple, local)?,
        stratum: stratify(&tuple),
        orbit: orbit(&tuple).into_iter().collect(),
    })
}

/// `path` with its extension replaced by `json`, for the exact sidecar.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn render<F>(write: F) -> Result<Vec<u8>>
where
    F: FnOnce(&mut Vec<u8>) -> Result<()>,
{
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(buf)
}

/// Runs the census and renders it: the reports, the primary output in the
/// chosen format, and for CSV the exact JSON sidecar.
pub fn cmd_census(config: &RunConfig) -> Result<(Vec<CensusReport>, Vec<u8>, Option<Vec<u8>>)> {
    let reports = run_census(&config.census_config())?;
    let (primary, sidecar) = match config.format {
        Format::Csv => (
            render(|w| write_csv(&reports, w))?,
            Some(render(|w| write_json(&reports, w))?),
        ),
        Format::Json => (render(|w| write_json(&reports, w))?, None),
    };
    Ok((reports, primary, sidecar))
}

#[derive(Debug, Serialize)]
struct Table1Record {
    beta_class: String,
    gamma_class: String,
    delta_class: String,
    #[serde(rename = "T")]
    t: ExactRational,
    #[serde(rename = "H")]
    h: ExactRational,
    #[serde(rename = "Htilde")]
    htilde: ExactRational,
    #[serde(rename = "paper_H")]
    paper_h: u32,
    #[serde(rename = "paper_Htilde")]
    paper_htilde: u32,
    #[serde(rename = "match")]
    matches: bool,
}

pub fn write_table1_csv<W: Write>(table: &DensityTable, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    for row in &table.rows {
        w.serialize(Table1Record {
            beta_class: row.published.beta.to_string(),
            gamma_class: row.published.gamma.to_string(),
            delta_class: row.published.delta.to_string(),
            t: row.effective(Column::T),
            h: row.effective(Column::H),
            htilde: row.effective(Column::Htilde),
            paper_h: row.published.h,
            paper_htilde: row.published.htilde,
            matches: row.matches_published(),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_table1(local: &LocalConfig, format: Format) -> Result<(DensityTable, Vec<u8>)> {
    let table = DensityTable::compute(local)?;
    let bytes = match format {
        Format::Csv => render(|w| write_table1_csv(&table, w))?,
        Format::Json => render(|w| {
            serde_json::to_writer_pretty(&mut *w, &table)?;
            w.push(b'\n');
            Ok(())
        })?,
    };
    Ok((table, bytes))
}

pub fn cmd_verify(config: &RunConfig, k_max: i64) -> Result<VerifyReport> {
    let table = DensityTable::compute(&config.local())?;
    let census = run_census(&config.census_config())?;
    let family = ctcs_family_check(k_max)?;
    Ok(verify_paper(&VerifyInputs {
        table: &table,
        census: &census,
        family: &family,
        seed: config.seed,
    }))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn exit_for(err: &Error) -> ExitCode {
    match err {
        Error::InvalidTuple { .. } => ExitCode::from(EXIT_INVALID_TUPLE),
        Error::Undecided { .. } => ExitCode::from(EXIT_UNDECIDED),
        _ => ExitCode::FAILURE,
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Classify { a, b, c, d, depth_cap } => {
            let out = cmd_classify(a, b, c, d, &LocalConfig { depth_cap })?;
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Census(args) => {
            let config = RunConfig::from_args("census", &args)?;
            let (_, primary, sidecar) = cmd_census(&config)?;
            emit(config.out.as_deref(), &primary)?;
            if let (Some(path), Some(json)) = (config.out.as_deref(), sidecar) {
                fs::write(sidecar_path(path), json)?;
            }
        }
        Command::Table1 { depth_cap, out, format } => {
            let (_, bytes) = cmd_table1(&LocalConfig { depth_cap }, format)?;
            emit(out.as_deref(), &bytes)?;
        }
        Command::Verify { run, k_max } => {
            let config = RunConfig::from_args("verify", &run)?;
            let report = cmd_verify(&config, k_max)?;
            let mut json = serde_json::to_vec_pretty(&report)?;
            json.push(b'\n');
            match config.out.as_deref() {
                Some(path) => {
                    fs::write(path, &json)?;
                    print!("{}", report.summary());
                }
                None => {
                    eprint!("{}", report.summary());
                    io::stdout().write_all(&json)?;
                }
            }
            if !report.invariants_hold() {
                return Ok(ExitCode::from(EXIT_INVARIANT));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Parses `std::env::args` and runs the chosen command.
pub fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_for(&err)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_outputs() {
        let out = cmd_classify(1, -2, -1, 3, &LocalConfig::default()).unwrap();
        let json = serde_json::to_value(&out).unwrap();
        assert_eq!(json["verdict"]["kind"], "HasseFailure");
        assert_eq!(out.orbit.len(), 4);
        let err = cmd_classify(1, 1, 1, 1, &LocalConfig::default()).unwrap_err();
        assert!(err.to_string().contains("determinant is 0"));
        assert_eq!(exit_for(&err), ExitCode::from(EXIT_INVALID_TUPLE));
    }

    #[test]
    fn parse_census_flags() {
        let cli = Cli::try_parse_from([
            "chatelet",
            "census",
            "--max-norm",
            "30",
            "--checkpoints",
            "10,20",
            "--shards",
            "2",
        ])
        .unwrap();
        let Command::Census(args) = cli.command else {
            panic!("expected census");
        };
        let config = RunConfig::from_args("census", &args).unwrap();
        assert_eq!(config.checkpoints, vec![10, 20]);
        assert_eq!(config.shards, 2);
        assert!(Cli::try_parse_from(["chatelet", "census", "--max-norm", "x"]).is_err());
    }

    #[test]
    fn negative_classify_arguments_parse() {
        let cli = Cli::try_parse_from(["chatelet", "classify", "1", "-2", "-1", "3"]).unwrap();
        assert!(matches!(cli.command, Command::Classify { b: -2, c: -1, .. }));
    }

    #[test]
    fn census_csv_at_height_two() {
        let config = RunConfig {
            command: "census",
            height: 2,
            checkpoints: vec![],
            shards: 1,
            seed: 0,
            depth_cap: None,
            out: None,
            format: Format::Csv,
        };
        let (_, csv, sidecar) = cmd_census(&config).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("P,raw_total,raw_loc,raw_br,N,"));
        assert!(text.lines().nth(1).unwrap().starts_with("2,16,"));
        assert!(sidecar.is_some());
    }
}
