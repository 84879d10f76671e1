use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use roadspline::converter::{BoundarySelection, SamplingStrategy, SplineConfig};
use roadspline::fidelity::Pairing;
use roadspline::geometry::LaneFilter;
use roadspline::resim::{LaneChoice, VehicleConfig};

use roadspline_cli::batch::{convert_batch, BatchConfig};

#[derive(Parser)]
#[command(
    name = "roadspline",
    version,
    about = "Convert OpenDRIVE scenarios to Catmull-Rom spline roads with fidelity, validity, and re-simulation reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a file or directory of scenarios and write reports.
    Convert(ConvertArgs),
}

#[derive(Args)]
struct ConvertArgs {
    /// Input .xodr/.json file, or a directory of them (subdirectories become
    /// campaigns).
    #[arg(long)]
    input: PathBuf,

    /// Output directory for per-road artifacts and summary.csv.
    #[arg(long)]
    output: PathBuf,

    /// Boundary source for the control polyline.
    #[arg(long, value_enum, default_value_t = SideArg::Both)]
    side: SideArg,

    /// Knot parameterization exponent (0 = uniform, 0.5 = centripetal).
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,

    /// Interpolated points per control segment.
    #[arg(long, default_value_t = 1)]
    points_per_segment: u32,

    /// Boundary sampling: "starts" or "step:<meters>".
    #[arg(long, default_value = "starts", value_parser = parse_sampling)]
    sampling: SamplingStrategy,

    /// JSON pointer to the OpenDRIVE text inside scenario JSON files.
    #[arg(long, default_value = roadspline::ingest::DEFAULT_JSON_POINTER)]
    json_pointer: String,

    /// Point pairing for the fidelity metrics.
    #[arg(long, value_enum, default_value_t = PairingArg::Nearest)]
    pairing: PairingArg,

    /// Which lanes count toward widths and offsets.
    #[arg(long, value_enum, default_value_t = LanesArg::All)]
    lanes: LanesArg,

    /// Check the validity criteria and include the report.
    #[arg(long)]
    validate: bool,

    /// Re-drive each converted road and record outcome and trace.
    #[arg(long)]
    resim: bool,

    /// Reference lane for re-simulation.
    #[arg(long, value_enum, default_value_t = LaneArg::Center)]
    lane: LaneArg,

    /// Worker threads (defaults to the number of cores).
    #[arg(long)]
    jobs: Option<usize>,

    /// Exit with code 2 if any road fails to convert.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum PairingArg {
    Nearest,
    Index,
}

#[derive(Clone, Copy, ValueEnum)]
enum LanesArg {
    All,
    Driving,
}

#[derive(Clone, Copy, ValueEnum)]
enum LaneArg {
    Center,
    Right,
}

fn parse_sampling(raw: &str) -> Result<SamplingStrategy, String> {
    if raw.eq_ignore_ascii_case("starts") {
        return Ok(SamplingStrategy::Starts);
    }
    if let Some(step) = raw.strip_prefix("step:") {
        let meters: f64 = step
            .parse()
            .map_err(|_| format!("invalid step distance {step:?}"))?;
        if !(meters.is_finite() && meters > 0.0) {
            return Err(format!("step distance must be positive, got {meters}"));
        }
        return Ok(SamplingStrategy::Step(meters));
    }
    Err(format!(
        "expected \"starts\" or \"step:<meters>\", got {raw:?}"
    ))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap would exit 2 on usage errors; this tool reserves 2 for
            // strict-mode conversion failures.
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    match cli.command {
        Command::Convert(args) => run_convert(args),
    }
}

fn run_convert(args: ConvertArgs) -> ExitCode {
    if !(0.0..=1.0).contains(&args.alpha) {
        eprintln!("error: --alpha must be within [0, 1], got {}", args.alpha);
        return ExitCode::from(1);
    }
    if args.points_per_segment == 0 {
        eprintln!("error: --points-per-segment must be positive");
        return ExitCode::from(1);
    }

    let cfg = BatchConfig {
        spline: SplineConfig {
            alpha: args.alpha,
            points_per_segment: args.points_per_segment,
            sampling: args.sampling,
            lanes: match args.lanes {
                LanesArg::All => LaneFilter::All,
                LanesArg::Driving => LaneFilter::Driving,
            },
            boundary: match args.side {
                SideArg::Both => BoundarySelection::Both,
                SideArg::Left => BoundarySelection::LeftOnly,
                SideArg::Right => BoundarySelection::RightOnly,
            },
            ..SplineConfig::default()
        },
        json_pointer: args.json_pointer,
        pairing: match args.pairing {
            PairingArg::Nearest => Pairing::Nearest,
            PairingArg::Index => Pairing::Index,
        },
        validate: args.validate,
        resim: args.resim,
        vehicle: VehicleConfig {
            lane: match args.lane {
                LaneArg::Center => LaneChoice::Center,
                LaneArg::Right => LaneChoice::Right,
            },
            ..VehicleConfig::default()
        },
        jobs: args.jobs,
        strict: args.strict,
        ..BatchConfig::default()
    };

    match convert_batch(&args.input, &args.output, &cfg) {
        Ok(outcome) => {
            for summary in &outcome.summaries {
                println!(
                    "campaign {}: {} roads, {} converted, {} errors, {} valid, sim {}/{}",
                    summary.campaign_id,
                    summary.total,
                    summary.converted,
                    summary.conversion_errors,
                    summary.valid,
                    summary.sim_pass,
                    summary.sim_pass + summary.sim_fail
                );
            }
            if cfg.strict && outcome.conversion_errors > 0 {
                eprintln!(
                    "error: {} road(s) failed to convert (strict mode)",
                    outcome.conversion_errors
                );
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
