//! Command-line front end. Thread count comes from `VIPSA_THREADS`.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hubbard_vipsa::experiment::{
    cmd_compare, cmd_ed, cmd_pool_info, cmd_run, configure_threads, EdBasis, ExperimentConfig,
};
use hubbard_vipsa::lattice::{Boundary, GridSpec};
use hubbard_vipsa::{Error, Result};

#[derive(Parser)]
#[command(name = "vipsa", version, about = "Interaction-picture ansatz experiments on the 2D Hubbard model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Exact ground energies and degeneracies over a list of couplings.
    Ed {
        #[command(flatten)]
        grid: GridArgs,
        /// Comma-separated couplings.
        #[arg(short, long, value_delimiter = ',', default_value = "2,4,6")]
        u: Vec<f64>,
        #[arg(long)]
        n_up: Option<usize>,
        #[arg(long)]
        n_down: Option<usize>,
        /// real | kspace | both
        #[arg(long, default_value = "kspace")]
        basis: EdBasis,
        /// Directory for ed.csv.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Merge step tables of several runs on the same problem.
    Compare {
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        /// Energy error used for the steps-to-tolerance column.
        #[arg(long, default_value_t = 0.1)]
        tol: f64,
        /// Directory for compare.csv.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Pool size and excluded-operator counts.
    PoolInfo {
        /// Grids as NXxNY; defaults to the four supported shapes.
        #[arg(value_delimiter = ',')]
        grids: Vec<String>,
    },
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    nx: usize,
    #[arg(long)]
    ny: usize,
    #[arg(long)]
    bc_x: Option<Boundary>,
    #[arg(long)]
    bc_y: Option<Boundary>,
    #[arg(short, long, default_value_t = 1.0)]
    t: f64,
}

impl GridArgs {
    fn grid(&self) -> Result<GridSpec> {
        GridSpec::with_boundaries(
            self.nx,
            self.ny,
            self.bc_x.unwrap_or(Boundary::default_for(self.nx)),
            self.bc_y.unwrap_or(Boundary::default_for(self.ny)),
            self.t,
            0.0,
        )
    }
}

fn parse_shape(s: &str) -> Result<GridSpec> {
    let (x, y) = s.split_once('x').ok_or_else(|| Error::Parse(format!("grid {s:?} is not NXxNY")))?;
    let n = |v: &str| v.trim().parse::<usize>().map_err(|_| Error::Parse(format!("grid {s:?} is not NXxNY")));
    GridSpec::new(n(x)?, n(y)?, 1.0, 1.0)
}

fn opt(v: Option<f64>) -> String {
    v.map_or("-".into(), |x| format!("{x:.3e}"))
}

fn execute(command: Command) -> Result<i32> {
    let stdout = &mut std::io::stdout().lock();
    match command {
        Command::Run { config, out } => {
            let mut config = ExperimentConfig::load(&config)?;
            if let Some(out) = out {
                config.output_dir = out;
            }
            return Ok(cmd_run(&config, stdout)?.status.exit_code());
        }
        Command::Ed { grid, u, n_up, n_down, basis, out } => {
            let grid = grid.grid()?;
            let (du, dd) = hubbard_vipsa::experiment::config::default_filling(&grid);
            let rows = cmd_ed(&grid, &u, n_up.unwrap_or(du), n_down.unwrap_or(dd), basis)?;
            writeln!(stdout, "{:>8} {:>16} {:>5} {:>12} {:>12} {:>8}", "U", "E0", "deg", "real-k", "E_sea", "sea_deg")?;
            for r in &rows {
                writeln!(
                    stdout,
                    "{:>8} {:>16.10} {:>5} {:>12} {:>12.6} {:>8}",
                    r.u,
                    r.energy,
                    r.degeneracy,
                    opt(r.basis_difference),
                    r.fermi_sea_energy,
                    r.fermi_sea_degeneracy
                )?;
            }
            if let Some(out) = out {
                std::fs::create_dir_all(&out)?;
                hubbard_vipsa::experiment::artifacts::write_csv(&out.join("ed.csv"), &rows)?;
            }
        }
        Command::Compare { runs, tol, out } => {
            let c = cmd_compare(&runs, tol)?;
            writeln!(stdout, "{:<24} {:>6} {:>14} {:>12} {:>8} {:>10}", "run", "ansatz", "final E", "final gap", "steps", "to tol")?;
            for r in &c.runs {
                let to_tol = r.steps_to_tol.map_or("never".into(), |s| s.to_string());
                writeln!(
                    stdout,
                    "{:<24} {:>6} {:>14.8} {:>12.3e} {:>8} {:>10}",
                    r.name,
                    r.ansatz.tag(),
                    r.final_energy,
                    r.final_gap,
                    r.step_rows,
                    to_tol
                )?;
            }
            if let Some(out) = out {
                std::fs::create_dir_all(&out)?;
                c.write_csv(&out.join("compare.csv"))?;
            }
        }
        Command::PoolInfo { grids } => {
            let shapes = if grids.is_empty() { vec!["2x2".into(), "2x3".into(), "2x4".into(), "3x3".into()] } else { grids };
            writeln!(stdout, "{:<6} {:>8} {:>9} {:>9} {:>9} {:>6}", "grid", "ordered", "diagonal", "zero_eps", "repeated", "pool")?;
            for s in &shapes {
                let c = cmd_pool_info(&parse_shape(s)?)?;
                writeln!(
                    stdout,
                    "{:<6} {:>8} {:>9} {:>9} {:>9} {:>6}",
                    s, c.ordered_nonzero, c.diagonal, c.zero_eps, c.repeated, c.pool_size
                )?;
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| execute(cli.command));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
