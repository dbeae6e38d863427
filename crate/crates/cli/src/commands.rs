use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use clap::{Args, ValueEnum};
use sldg_core::diagnostics::{
    convergence_study, l2_error_vs_reference, projection_study, solve_at, time_convergence_study,
};
use sldg_core::legendre::MAX_DEGREE;
use sldg_core::splitting::run;
use sldg_core::{ConvergenceReport, DGField, ShiftTable};

use crate::config::{parse_list, RunArgs, RunConfig};
use crate::error::CliError;

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn load_dump(path: &Path) -> Result<DGField, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    DGField::read_dump(BufReader::new(file)).map_err(|e| match e {
        sldg_core::Error::Io(io) => CliError::io(path, io),
        other => CliError::Config(format!("{}: {other}", path.display())),
    })
}

fn install_workers(config: &RunConfig) -> Result<(), CliError> {
    if let Some(n) = config.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {n} workers: {e}")))?;
    }
    Ok(())
}

pub fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let config = args.resolve()?;
    config.finish()?;
    install_workers(&config)?;
    config.prepare_output()?;
    let reference = config.reference.as_deref().map(load_dump).transpose()?;
    let grid = config.problem.grid(config.nx, config.nv, config.degree)?;
    let out = run(&config.problem, &grid, config.tau, config.tmax, config.record_every)?;

    let series_path = config.out.join("series.csv");
    out.series.write_csv(create(&series_path)?)?;
    let dump_path = config.out.join("field.dump");
    out.state.field.write_dump(create(&dump_path)?)?;

    let records = out.series.records();
    let first = records.first().expect("a run records its initial state");
    let last = records.last().expect("a run records its final state");
    println!(
        "problem {} ({}), grid {}x{} degree {}, tau {}, {} steps to t = {}",
        config.problem.name(),
        config.problem.dynamics().name(),
        config.nx,
        config.nv,
        config.degree,
        config.tau,
        out.state.step,
        last.time
    );
    println!(
        "final mass drift {:.3e} (relative, net of {:.3e} lost at open boundaries)",
        (last.mass - first.mass + last.lost_mass) / first.mass,
        last.lost_mass
    );
    println!("final electric energy {:.10e}", last.electric_energy);
    if let Some(r) = reference {
        println!("L2 distance to reference {:.6e}", l2_error_vs_reference(&out.state.field, &r)?);
    }
    println!("wrote {} and {}", series_path.display(), dump_path.display());
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StudyMode {
    /// Refine the grid at fixed step against a fine reference run.
    Space,
    /// Refine the step on a fixed grid against a small-step run.
    Time,
    /// Projection error of the initial condition only.
    Projection,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Kind of study.
    #[arg(long, value_enum)]
    pub mode: Option<StudyMode>,
    /// Comma-separated grid sizes (N_x = N_v) for space and projection studies.
    #[arg(long)]
    pub resolutions: Option<String>,
    /// Comma-separated, decreasing time steps for time studies.
    #[arg(long)]
    pub taus: Option<String>,
    /// Grid size of the computed reference (default four times the largest).
    #[arg(long)]
    pub reference_n: Option<usize>,
    /// Degree of the computed reference (default at least 2).
    #[arg(long)]
    pub reference_degree: Option<usize>,
    /// Step of the time-study reference (default a quarter of the smallest).
    #[arg(long)]
    pub reference_tau: Option<f64>,
}

fn take<T: std::str::FromStr>(flag: Option<T>, config: &mut RunConfig, key: &str) -> Result<Option<T>, CliError> {
    match config.extra.remove(key) {
        Some(s) if flag.is_none() => s
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("bad value `{s}` for `{key}` in config file"))),
        _ => Ok(flag),
    }
}

pub fn cmd_convergence(args: &ConvergenceArgs) -> Result<(), CliError> {
    let mut config = args.run.resolve()?;
    let mode = match take(args.mode.map(|m| format!("{m:?}").to_lowercase()), &mut config, "mode")? {
        None => StudyMode::Space,
        Some(s) => StudyMode::from_str(&s, true).map_err(|_| CliError::Config(format!("unknown mode `{s}`")))?,
    };
    let resolutions: Vec<usize> =
        parse_list(&take(args.resolutions.clone(), &mut config, "resolutions")?.unwrap_or("16,32,64".into()), "resolution")?;
    let taus: Vec<f64> = parse_list(&take(args.taus.clone(), &mut config, "taus")?.unwrap_or("0.4,0.2,0.1".into()), "tau")?;
    let reference_n = take(args.reference_n, &mut config, "reference_n")?;
    let reference_degree = take(args.reference_degree, &mut config, "reference_degree")?;
    let reference_tau = take(args.reference_tau, &mut config, "reference_tau")?;
    config.finish()?;
    if reference_degree.is_some_and(|d| d > MAX_DEGREE) {
        return Err(CliError::Config(format!("reference degree exceeds the supported maximum {MAX_DEGREE}")));
    }
    install_workers(&config)?;
    config.prepare_output()?;

    let problem = &config.problem;
    let report: ConvergenceReport = match mode {
        StudyMode::Space => {
            let largest = resolutions.iter().copied().max().unwrap_or(0);
            let reference = match &config.reference {
                Some(path) => load_dump(path)?,
                None => solve_at(
                    problem,
                    reference_n.unwrap_or(4 * largest),
                    reference_degree.unwrap_or(config.degree.max(2)),
                    config.tau,
                    config.tmax,
                )?,
            };
            convergence_study(problem, config.degree, &resolutions, config.tau, config.tmax, &reference)?
        }
        StudyMode::Time => {
            let grid = problem.grid(config.nx, config.nv, config.degree)?;
            let smallest = taus.iter().copied().fold(f64::INFINITY, f64::min);
            time_convergence_study(problem, &grid, &taus, reference_tau.unwrap_or(0.25 * smallest), config.tmax)?
        }
        StudyMode::Projection => projection_study(problem, config.degree, &resolutions)?,
    };
    let path = config.out.join("convergence.csv");
    report.write_csv(create(&path)?)?;
    println!("{:?} study, problem {}, degree {}", mode, problem.name(), config.degree);
    let mut stdout = std::io::stdout().lock();
    report.write_csv(&mut stdout)?;
    let _ = stdout.flush();
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct DumpTablesArgs {
    /// Polynomial degree of the table.
    #[arg(long)]
    pub degree: usize,
    /// Also write the table to this file.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

pub fn cmd_dump_tables(args: &DumpTablesArgs) -> Result<(), CliError> {
    if args.degree > MAX_DEGREE {
        return Err(CliError::Config(format!(
            "degree {} exceeds the supported maximum {MAX_DEGREE}",
            args.degree
        )));
    }
    let text = ShiftTable::new(args.degree).to_text();
    print!("{text}");
    if let Some(path) = &args.out {
        std::fs::write(path, &text).map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}
