use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adapted_filters::experiments::{self, ExperimentConfig};
use adapted_filters::filterbank::{default_n_l, expbin_basis, read_filter, standard_filter, FilterSpec};
use adapted_filters::raster::{read_image, read_sinogram, write_pgm16, Raster};
use adapted_filters::reconstructors::{fbp, KernelKind, Reconstructor};
use adapted_filters::{Error, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "adapted-filters", about = "Implementation-adapted filters for parallel-beam FBP")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (defaults to the config's `outputs`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override every seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate sinograms and ground truths.
    Simulate(RunArgs),
    /// Compute an adapted (or reference-mode) filter for one implementation.
    ComputeFilter {
        #[arg(long = "impl")]
        implementation: String,
        /// Sinogram raster stem.
        #[arg(long)]
        sinogram: PathBuf,
        /// Reference image stem; switches to reference mode.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Config supplying `basis.n_l` and `ridge`.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Filter and reconstruct one sinogram.
    Reconstruct {
        #[arg(long = "impl")]
        implementation: String,
        #[arg(long)]
        sinogram: PathBuf,
        /// `ram-lak`, `shepp-logan` or a filter JSON path.
        #[arg(long)]
        filter: String,
        /// Output raster stem.
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct with every implementation and filter family, emit metrics.
    Compare(RunArgs),
    /// Slice-specific versus central-slice filters.
    Transfer(RunArgs),
    /// Zinger-corrupted data with Shepp-Logan, adapted and SIRT.
    ZingerDemo(RunArgs),
}

fn load(args: &RunArgs) -> Result<(ExperimentConfig, PathBuf)> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg = cfg.with_seed(seed);
    }
    let out = args.out.clone().unwrap_or_else(|| cfg.outputs.clone());
    Ok((cfg, out))
}

fn filter_arg(name: &str, n_det: usize) -> Result<FilterSpec> {
    match name {
        "ram-lak" | "shepp-logan" => standard_filter(name, n_det),
        path => read_filter(Path::new(path)),
    }
}

fn report(entries: &[experiments::ManifestEntry], out: &Path) {
    println!("wrote {} files to {}", entries.len(), out.display());
}

fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| Error::Config {
                field: "jobs".into(),
                msg: e.to_string(),
            })?;
    }
    match cli.command {
        Command::Simulate(args) => {
            let (cfg, out) = load(&args)?;
            report(&experiments::cmd_simulate(&cfg, &out)?, &out);
        }
        Command::Compare(args) => {
            let (cfg, out) = load(&args)?;
            report(&experiments::cmd_compare(&cfg, &out)?, &out);
        }
        Command::Transfer(args) => {
            let (cfg, out) = load(&args)?;
            report(&experiments::cmd_transfer(&cfg, &out)?, &out);
        }
        Command::ZingerDemo(args) => {
            let (cfg, out) = load(&args)?;
            report(&experiments::cmd_zinger_demo(&cfg, &out)?, &out);
        }
        Command::ComputeFilter {
            implementation,
            sinogram,
            reference,
            config,
            out,
        } => {
            let kind = KernelKind::from_name(&implementation)?;
            let p = read_sinogram(&sinogram)?;
            let (n_l, ridge) = match &config {
                Some(path) => {
                    let cfg = ExperimentConfig::load(path)?;
                    (cfg.basis.n_l, cfg.ridge)
                }
                None => (None, 0.0),
            };
            let basis = expbin_basis(p.n_det(), n_l.unwrap_or_else(|| default_n_l(p.n_det())))?;
            let r_ref = reference.as_deref().map(read_image).transpose()?;
            let rep = experiments::cmd_compute_filter(kind, &p, r_ref.as_ref(), &basis, ridge, &out)?;
            println!("residual ram-lak      {:.6e}", rep.residual_ram_lak);
            println!("residual shepp-logan  {:.6e}", rep.residual_shepp_logan);
            println!("residual adapted      {:.6e}", rep.residual_adapted);
            if let Some((before, after)) = rep.reference_rmse {
                println!("reference rmse before {before:.6e} after {after:.6e}");
            }
        }
        Command::Reconstruct {
            implementation,
            sinogram,
            filter,
            out,
        } => {
            let kind = KernelKind::from_name(&implementation)?;
            let p = read_sinogram(&sinogram)?;
            let h = filter_arg(&filter, p.n_det())?;
            let rec = Reconstructor::new(kind, p.geometry().clone())?;
            let r = fbp(&rec, &p, &h)?;
            let scaling = write_pgm16(&out.with_extension("pgm"), &r)?;
            adapted_filters::raster::write_raster_scaled(&out, &Raster::Image(r), scaling)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
