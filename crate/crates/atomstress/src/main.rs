use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use atomstress::config::RunConfig;
use atomstress::distgeo::{embeddability_check, SquaredDistanceSet};
use atomstress::dynamics::{initialize_velocities, minimize, run_nve};
use atomstress::elasticity::{CubicConstants, KirschSolution};
use atomstress::error::Error;
use atomstress::estimators::{
    da_stress, hardy_stress, stress_star_counterexample, tsai_traction, FieldGrid, PlanarProbe,
    StressField, VelocityRule,
};
use atomstress::experiments::run_experiment;
use atomstress::system::{build_fcc_lattice, carve_plate_with_hole, xyz, Trajectory};
use atomstress::Vec3;

#[derive(Parser)]
#[command(
    name = "atomstress",
    about = "Continuum stress and traction fields from discrete particle data",
    version
)]
struct Cli {
    /// Worker threads (also ATOMSTRESS_THREADS); default: all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Override the RNG seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigOut {
    /// Key-value config file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an fcc lattice (optionally with a carved in-plane hole) as
    /// extended-XYZ.
    Gen {
        /// Cells per direction: N or NX,NY,NZ.
        #[arg(long, default_value = "4")]
        cells: String,
        #[arg(long, default_value_t = 1.556)]
        lattice_constant: f64,
        #[arg(long, default_value = "Al")]
        species: String,
        /// Carve a hole of this radius around the in-plane center.
        #[arg(long)]
        hole_radius: Option<f64>,
        /// Output extended-XYZ path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run NVE molecular dynamics from an extended-XYZ state.
    Md {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Input state (first frame used).
        #[arg(long = "in", name = "in")]
        input: PathBuf,
        /// Output trajectory path.
        #[arg(long)]
        out: PathBuf,
    },
    /// FIRE lattice-statics relaxation of an extended-XYZ state.
    Minimize {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "in", name = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a stress field over the [grid] of the config.
    Stress {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Input trajectory (whole window used).
        #[arg(long = "in", name = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// hardy | da | star
        #[arg(long, default_value = "hardy")]
        estimator: String,
    },
    /// Tsai traction across a planar probe.
    Traction {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "in", name = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Probe center "x y z".
        #[arg(long)]
        center: String,
        /// Probe normal axis: 0, 1 or 2.
        #[arg(long, default_value_t = 0)]
        normal_axis: usize,
        /// Square probe side length.
        #[arg(long)]
        extent: f64,
    },
    /// Continuum reference solutions.
    #[command(subcommand)]
    Ref(RefCommand),
    /// Distance-geometry checks.
    #[command(subcommand)]
    Distgeo(DistgeoCommand),
    /// Reproduce one of the four numerical experiments.
    Experiment {
        id: u8,
        #[command(flatten)]
        io: ConfigOut,
    },
}

#[derive(Subcommand)]
enum RefCommand {
    /// Anisotropic plate-with-hole field on a square grid, as CSV.
    Kirsch {
        #[arg(long)]
        c11: f64,
        #[arg(long)]
        c12: f64,
        #[arg(long)]
        c44: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        radius: f64,
        /// Grid points per direction over [-5R, 5R].
        #[arg(long, default_value_t = 41)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum DistgeoCommand {
    /// Check an n x n distance table (CSV) for R^3 embeddability.
    /// Exit code 0 = embeddable, 2 = not embeddable.
    Check { table: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Usage problems exit 1 per the interface contract; help/version
            // print and exit 0.
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };

    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("ATOMSTRESS_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    if threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }

    match run(cli) {
        Ok(code) => code,
        Err(Error::InvalidArgument(m)) | Err(Error::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_config(path: &Option<PathBuf>, seed: Option<u64>) -> Result<RunConfig, Error> {
    let mut cfg = match path {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = seed {
        cfg.set("md", "seed", s.to_string());
        cfg.set("experiment", "seed", s.to_string());
    }
    Ok(cfg)
}

fn parse_cells(text: &str) -> Result<(usize, usize, usize), Error> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::invalid(format!("bad cell counts {text:?}")))?;
    match parts.as_slice() {
        [n] => Ok((*n, *n, *n)),
        [a, b, c] => Ok((*a, *b, *c)),
        _ => Err(Error::invalid("cells must be N or NX,NY,NZ")),
    }
}

fn write_stress_csv(path: &PathBuf, field: &StressField) -> Result<(), Error> {
    use std::fmt::Write as _;
    let mut out = String::from("x,y,z");
    for part in ["kinetic", "potential", "total"] {
        for i in 1..=3 {
            for j in 1..=3 {
                let _ = write!(out, ",{part}_s{i}{j}");
            }
        }
    }
    out.push('\n');
    for (p, s) in field.grid.points().iter().zip(&field.samples) {
        let _ = write!(out, "{:.16e},{:.16e},{:.16e}", p.x, p.y, p.z);
        for m in [s.kinetic, s.potential, s.total()] {
            for i in 0..3 {
                for j in 0..3 {
                    let _ = write!(out, ",{:.16e}", m[(i, j)]);
                }
            }
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Gen {
            cells,
            lattice_constant,
            species,
            hole_radius,
            out,
        } => {
            let (nx, ny, nz) = parse_cells(&cells)?;
            let mut state = build_fcc_lattice(nx, ny, nz, lattice_constant, &species)?;
            if let Some(r) = hole_radius {
                let l = state.cell().lengths();
                let center = Vec3::new(0.5 * l.x, 0.5 * l.y, 0.0);
                state = carve_plate_with_hole(&state, center, r)?;
            }
            xyz::write_trajectory(&out, &Trajectory::single(state))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Md { config, input, out } => {
            let cfg = load_config(&config, cli.seed)?;
            let model = cfg.potential()?;
            let integ = cfg.integrator()?;
            let traj_in = xyz::read_trajectory(&input)?;
            let mut state = traj_in.snapshots()[0].state.clone();
            if let Some(t) = cfg.get_f64("md", "temperature")? {
                if t > 0.0 {
                    state = initialize_velocities(&state, t, integ.seed)?;
                }
            }
            let traj = run_nve(&state, &model, &integ)?;
            xyz::write_trajectory(&out, &traj)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Minimize { config, input, out } => {
            let cfg = load_config(&config, cli.seed)?;
            let model = cfg.potential()?;
            let mcfg = cfg.minimizer()?;
            let traj_in = xyz::read_trajectory(&input)?;
            let (state, report) = minimize(&traj_in.snapshots()[0].state, &model, &mcfg)?;
            xyz::write_trajectory(&out, &Trajectory::single(state))?;
            eprintln!(
                "minimize: converged = {}, iterations = {}, max |f| = {:.3e}, energy = {:.9e}",
                report.converged, report.iterations, report.max_force, report.energy
            );
            if report.converged {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }
        Command::Stress {
            config,
            input,
            out,
            estimator,
        } => {
            let cfg = load_config(&config, cli.seed)?;
            let model = cfg.potential()?;
            let wf = cfg.weighting()?;
            let origin = cfg
                .get_triple("grid", "origin")?
                .ok_or_else(|| Error::config("[grid] origin required"))?;
            let spacing = cfg
                .get_triple("grid", "spacing")?
                .ok_or_else(|| Error::config("[grid] spacing required"))?;
            let counts = cfg
                .get_triple("grid", "counts")?
                .ok_or_else(|| Error::config("[grid] counts required"))?;
            let grid = FieldGrid::regular(
                Vec3::new(origin[0], origin[1], origin[2]),
                Vec3::new(spacing[0], spacing[1], spacing[2]),
                [counts[0] as usize, counts[1] as usize, counts[2] as usize],
            )?;
            let traj = xyz::read_trajectory(&input)?;
            let field = match estimator.as_str() {
                "hardy" => hardy_stress(&traj, &wf, &grid, &model)?,
                "da" => da_stress(&traj.snapshots()[0].state, &wf, &grid, &model)?,
                "star" => {
                    stress_star_counterexample(&traj.snapshots()[0].state, &wf, &grid, &model)?
                }
                other => {
                    return Err(Error::invalid(format!(
                        "unknown estimator {other:?} (hardy | da | star)"
                    )))
                }
            };
            std::fs::create_dir_all(&out)?;
            write_stress_csv(&out.join(format!("stress_{estimator}.csv")), &field)?;
            std::fs::write(out.join("config_echo.ini"), cfg.echo())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Traction {
            config,
            input,
            out,
            center,
            normal_axis,
            extent,
        } => {
            let cfg = load_config(&config, cli.seed)?;
            let model = cfg.potential()?;
            let c: Vec<f64> = center
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| Error::invalid(format!("bad probe center {center:?}")))?;
            if c.len() != 3 || normal_axis > 2 {
                return Err(Error::invalid("probe center needs three numbers; axis 0..=2"));
            }
            let probe =
                PlanarProbe::axis_aligned(Vec3::new(c[0], c[1], c[2]), normal_axis, extent)?;
            let traj = xyz::read_trajectory(&input)?;
            let sample = tsai_traction(
                &traj,
                &probe,
                VelocityRule::CrossingLimit {
                    slab_half_thickness: extent,
                },
                &model,
            )?;
            std::fs::create_dir_all(&out)?;
            let mut text = String::from(
                "normal_x,normal_y,normal_z,area,window_start,window_end,\
                 t_pot_x,t_pot_y,t_pot_z,t_kin_x,t_kin_y,t_kin_z,t_tot_x,t_tot_y,t_tot_z,\
                 crossing_events\n",
            );
            use std::fmt::Write as _;
            let t = sample.total();
            let _ = writeln!(
                text,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                sample.normal.x, sample.normal.y, sample.normal.z, sample.area,
                sample.window.0, sample.window.1,
                sample.potential.x, sample.potential.y, sample.potential.z,
                sample.kinetic.x, sample.kinetic.y, sample.kinetic.z,
                t.x, t.y, t.z, sample.crossing_events
            );
            std::fs::write(out.join("traction.csv"), text)?;
            std::fs::write(out.join("config_echo.ini"), cfg.echo())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Ref(RefCommand::Kirsch {
            c11,
            c12,
            c44,
            sigma,
            radius,
            grid,
            out,
        }) => {
            let constants = CubicConstants::new(c11, c12, c44)?;
            let sol = KirschSolution::new(&constants, sigma, radius)?;
            let mut text = String::from("x,y,sigma11,sigma22,sigma12,u1,u2,inside_hole\n");
            use std::fmt::Write as _;
            let span = 5.0 * radius;
            for iy in 0..grid {
                for ix in 0..grid {
                    let x = -span + 2.0 * span * ix as f64 / (grid.max(2) - 1) as f64;
                    let y = -span + 2.0 * span * iy as f64 / (grid.max(2) - 1) as f64;
                    let f = sol.eval(x, y);
                    let _ = writeln!(
                        text,
                        "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                        x,
                        y,
                        f.stress[0],
                        f.stress[1],
                        f.stress[2],
                        f.displacement[0],
                        f.displacement[1],
                        u8::from(f.inside_hole)
                    );
                }
            }
            if let Some(parent) = out.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(out, text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Distgeo(DistgeoCommand::Check { table }) => {
            let text = std::fs::read_to_string(&table)?;
            let mut rows = Vec::new();
            for line in text.lines() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let row: Vec<f64> = line
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| Error::invalid(format!("bad distance entry in {line:?}")))?;
                rows.push(row);
            }
            let n = rows.len();
            if n < 3 || rows.iter().any(|r| r.len() != n) {
                return Err(Error::invalid(format!(
                    "distance table must be square with n >= 3, got {n} rows"
                )));
            }
            let mut squared = vec![0.0; n * n];
            for (i, row) in rows.iter().enumerate() {
                for (j, d) in row.iter().enumerate() {
                    squared[i * n + j] = d * d;
                }
            }
            let set = SquaredDistanceSet::from_squared(n, squared)?;
            let verdict = embeddability_check(&set, 1e-8)?;
            match verdict.first_violated {
                None => {
                    println!("embeddable");
                    Ok(ExitCode::SUCCESS)
                }
                Some(v) => {
                    println!(
                        "not embeddable: condition {} violated by points {:?}",
                        v.condition, v.indices
                    );
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::Experiment { id, io } => {
            let cfg = load_config(&io.config, cli.seed)?;
            run_experiment(id, &cfg, &io.out)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
