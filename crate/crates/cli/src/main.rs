use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rellich_cli::{emit_rule, run, status, CliError, Format, RunConfig, RunSummary};

#[derive(Parser)]
#[command(name = "rellich-lab", version, about = "Numerical checks of the Hardy and Rellich equalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured suites and emit one record per report.
    Run(RunArgs),
    /// Write a product sphere rule in the tabular rule format.
    EmitRule {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        degree: u32,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "dim")]
    dims: Vec<usize>,
    #[arg(long = "suite")]
    suites: Vec<String>,
    /// `family:key=val,…` or `(re)+i(im)`
    #[arg(long = "field")]
    fields: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    sphere_degree: Option<u32>,
    #[arg(long)]
    radial_n: Option<usize>,
    #[arg(long)]
    mc_samples: Option<usize>,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if !self.dims.is_empty() {
            c.dims = self.dims;
        }
        if !self.suites.is_empty() {
            c.suites = self.suites;
        }
        if !self.fields.is_empty() {
            c.fields = self.fields;
        }
        c.seed = self.seed.or(c.seed);
        c.output.format = self.format.unwrap_or(c.output.format);
        c.output.path = self.out.or(c.output.path);
        c.quadrature.sphere_degree = self.sphere_degree.or(c.quadrature.sphere_degree);
        c.quadrature.radial_n = self.radial_n.or(c.quadrature.radial_n);
        c.quadrature.mc_samples = self.mc_samples.unwrap_or(c.quadrature.mc_samples);
        Ok(c)
    }
}

fn execute(args: RunArgs) -> Result<RunSummary, CliError> {
    let config = args.into_config()?;
    config.validate()?;
    let timestamp = chrono::Utc::now().to_rfc3339();
    let mut sink: Box<dyn Write> = match &config.output.path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let summary = run(&config, &mut sink, &timestamp)?;
    sink.flush()?;
    Ok(summary)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => execute(args).map(|summary| {
            for f in &summary.failing {
                eprintln!("FAIL {f}");
            }
            for e in &summary.errors {
                eprintln!("ERROR {e}");
            }
            summary.status()
        }),
        Command::EmitRule { dim, degree, out } => {
            let written = match out {
                Some(path) => rellich_cli::emit_rule_to(dim, degree, &path),
                None => emit_rule(dim, degree, &mut io::stdout().lock()),
            };
            written.map(|hash| {
                eprintln!("rule hash {hash}");
                status::PASS
            })
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("rellich-lab: {e}");
            ExitCode::from(e.status())
        }
    }
}
