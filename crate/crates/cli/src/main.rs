//! Batch command line for the T_mrt estimation pipeline.
//!
//! Exit codes: 0 success, 2 usage/input error, 3 runtime failure.
//! Diagnostics go to stderr; machine output goes to files or stdout.

mod commands;
mod svg;

use clap::{Parser, Subcommand};
use mrtforge_core::CoreError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mrtforge",
    version,
    about = "Outdoor mean radiant temperature estimation: fisheye sky analysis, \
             six-directional radiation physics, and physics-informed learning"
)]
struct Cli {
    /// Worker threads for image processing (0 = automatic). Results are
    /// bitwise identical regardless; 1 minimizes memory.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert cube maps to hemispherical fisheye PNGs and validate sky
    /// exposure ratios
    Fisheye {
        /// Directory holding `<id>_{N,E,S,W,U,D}.png` cube faces
        #[arg(long)]
        cube_dir: PathBuf,
        /// Output directory for `<id>_fisheye.png` and the report
        #[arg(long)]
        out_dir: PathBuf,
        /// Fisheye diameter in pixels (even)
        #[arg(long, default_value_t = 1000)]
        size: u32,
    },
    /// Sun/shade decision for one fisheye image and sun position
    Shade {
        #[arg(long)]
        fisheye: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        lat: f64,
        #[arg(long, allow_negative_numbers = true)]
        lon: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alt_m: f64,
        /// Local date YYYY-MM-DD
        #[arg(long)]
        date: String,
        /// Local time HH:MM[:SS]
        #[arg(long)]
        time: String,
        /// Local time minus UTC, minutes
        #[arg(long, allow_negative_numbers = true)]
        utc_offset: i32,
        /// Optional external sky mask PNG (255 = sky)
        #[arg(long)]
        mask: Option<PathBuf>,
    },
    /// Generate a synthetic labeled dataset (CSV + cube PNGs + truth sidecar)
    Synth {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 128)]
        cube_size: u32,
    },
    /// Train a model per a run-config file
    Train {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate a checkpoint on labeled data
    Evaluate {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        image_dir: Option<PathBuf>,
        /// Write the metrics JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-row predicted fluxes and T_mrt
    Predict {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        image_dir: Option<PathBuf>,
    },
    /// SVG scatter of predicted vs observed T_mrt from a predictions CSV
    Plot {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Input-style errors exit 2; runtime failures exit 3.
fn exit_code_for(e: &CoreError) -> u8 {
    match e {
        CoreError::InvalidInput(_)
        | CoreError::InvalidDate(_)
        | CoreError::PolarLatitude(_)
        | CoreError::BelowHorizon(_)
        | CoreError::MissingFace(_)
        | CoreError::Schema(_)
        | CoreError::Row { .. }
        | CoreError::UnimputableField { .. }
        | CoreError::Config(_)
        | CoreError::CheckpointVersion { .. }
        | CoreError::LengthMismatch { .. }
        | CoreError::MetricUndefined(_)
        | CoreError::Image(_)
        | CoreError::Csv(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // ignore the error if a pool already exists (tests call main twice)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let result = match cli.command {
        Command::Fisheye {
            cube_dir,
            out_dir,
            size,
        } => commands::fisheye(&cube_dir, &out_dir, size),
        Command::Shade {
            fisheye,
            lat,
            lon,
            alt_m,
            date,
            time,
            utc_offset,
            mask,
        } => commands::shade(&fisheye, lat, lon, alt_m, &date, &time, utc_offset, mask.as_deref()),
        Command::Synth {
            n,
            seed,
            out,
            cube_size,
        } => commands::synth(n as usize, seed, &out, cube_size),
        Command::Train { config } => commands::train(&config),
        Command::Evaluate {
            checkpoint,
            data,
            image_dir,
            out,
        } => commands::evaluate(&checkpoint, &data, image_dir.as_deref(), out.as_deref()),
        Command::Predict {
            checkpoint,
            data,
            out,
            image_dir,
        } => commands::predict(&checkpoint, &data, &out, image_dir.as_deref()),
        Command::Plot { pred, out } => commands::plot(&pred, &out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
