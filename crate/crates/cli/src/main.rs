use std::path::PathBuf;
use std::process::ExitCode;

use circlefock::certify::Exponent;
use circlefock::Region;
use circlefock_cli::{render, replay_config, run, CliError, Command, Kind, RunConfig};
use clap::Parser;

/// Separation, covering and density experiments on planar point sets, with
/// Fock-space interpolation and sampling certificates.
#[derive(Parser, Debug)]
#[command(name = "circlefock", version)]
struct Cli {
    /// Command to run; omit when replaying with --config
    #[arg(value_enum, required_unless_present = "config")]
    command: Option<Command>,

    /// Re-run the configuration embedded in a report (or a bare config file)
    #[arg(long, conflicts_with = "command")]
    config: Option<PathBuf>,

    /// Print the full-precision JSON report instead of the summary
    #[arg(long)]
    json: bool,

    #[arg(long)]
    alpha: Option<f64>,
    /// Lebesgue exponent, a positive number or `inf`
    #[arg(long, value_parser = parse_exponent)]
    p: Option<Exponent>,
    /// Point set (.csv or .json)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Point file for `lattice`, table for `fock-sweep`, report otherwise
    #[arg(long)]
    output: Option<PathBuf>,
    /// Interpolation data for `fock-interp`: JSON array of [re, im]
    #[arg(long)]
    targets: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[arg(long)]
    spacing: Option<f64>,
    /// Side of the square window centred at the origin
    #[arg(long)]
    window: Option<f64>,
    /// xmin,xmax,ymin,ymax
    #[arg(long, value_parser = parse_region)]
    region: Option<Region>,
    /// Margin kept between the centre region and the window edge
    #[arg(long)]
    pad: Option<f64>,
    /// Comma-separated increasing radii
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    /// Comma-separated lattice spacings for `fock-sweep`
    #[arg(long, value_delimiter = ',')]
    spacings: Option<Vec<f64>>,
    #[arg(long)]
    zeta_step: Option<f64>,
    #[arg(long)]
    grid_step: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Disk radius for `packing`/`covering`
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Random displacement magnitude for `lattice`
    #[arg(long)]
    perturb: Option<f64>,
    /// Hexagonal rings per patch for `fock-sweep`
    #[arg(long)]
    rings: Option<u32>,
    /// Eigenvalue tolerance
    #[arg(long)]
    tol: Option<f64>,
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
        return Ok(Exponent::INFINITY);
    }
    let p: f64 = s.parse().map_err(|e| format!("{e}"))?;
    Exponent::new(p).map_err(|e| e.to_string())
}

fn parse_region(s: &str) -> Result<Region, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("{e}"))?;
    match v[..] {
        [xmin, xmax, ymin, ymax] => Region::new(xmin, xmax, ymin, ymax).map_err(|e| e.to_string()),
        _ => Err("expected xmin,xmax,ymin,ymax".into()),
    }
}

impl Cli {
    fn into_config(self) -> Result<(RunConfig, bool), CliError> {
        let json = self.json;
        if let Some(path) = &self.config {
            return Ok((replay_config(path)?, json));
        }
        let mut c = RunConfig::new(self.command.expect("clap enforces a command"));
        c.alpha = self.alpha;
        c.p = self.p;
        c.input = self.input;
        c.output = self.output;
        c.targets = self.targets;
        c.kind = self.kind;
        c.spacing = self.spacing;
        c.window = self.window;
        c.region = self.region;
        c.pad = self.pad;
        c.radii = self.radii;
        c.spacings = self.spacings;
        c.zeta_step = self.zeta_step;
        c.grid_step = self.grid_step;
        c.sigma = self.sigma;
        c.r0 = self.r0;
        c.seed = self.seed;
        c.perturb = self.perturb;
        c.rings = self.rings;
        c.tol = self.tol;
        Ok((c, json))
    }
}

fn main() -> ExitCode {
    let result = Cli::parse().into_config().and_then(|(config, json)| run(&config).map(|r| (r, json)));
    match result {
        Ok((report, true)) => {
            println!("{}", report.to_json());
            ExitCode::SUCCESS
        }
        Ok((report, false)) => {
            print!("{}", render(&report));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
