//! Command-line front end: bundle construction, verification scans,
//! figure-data emission, and the desk-scale validation run.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dipole_core::dns;
use dipole_core::energy::{self, WeightParams};
use dipole_core::expansion::{self, BundleBuilder, ExpansionBundle};
use dipole_core::fields2d::{self, AssembledField, DipoleParams, Grid2D};
use dipole_core::polar::GridSpec;
use dipole_core::util::log_space;
use dipole_core::Error;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "dipole", version, about = "Viscous vortex-pair core expansions")]
struct Cli {
    /// Plain-text key = value configuration file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonOpts {
    /// Expansion order M.
    #[arg(long)]
    order: Option<usize>,
    /// Radial nodes of the working grid.
    #[arg(long)]
    grid_points: Option<usize>,
    /// Truncation radius of the working grid.
    #[arg(long)]
    r_max: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed for sampled diagnostics.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Construct the expansion and serialize it as JSON.
    Build {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Print the self-propulsion constant and the speed-coefficient table.
    Alpha {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Sweep the defect norm in ε (and optionally δ) and emit the fitted
    /// slopes as CSV.
    ResidualScan {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, default_value_t = 0.02)]
        eps_min: f64,
        #[arg(long, default_value_t = 0.1)]
        eps_max: f64,
        #[arg(long, default_value_t = 6)]
        eps_samples: usize,
        /// Fixed δ for the ε sweep.
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        /// Also sweep δ at the given fixed ε.
        #[arg(long)]
        delta_scan_at: Option<f64>,
    },
    /// Emit co-moving streamline contours (SVG + CSV).
    Streamlines {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// Number of contour levels.
        #[arg(long, default_value_t = 17)]
        levels: usize,
        /// Half-width of the sampled window (core units).
        #[arg(long, default_value_t = 8.0)]
        extent: f64,
        /// Samples per axis.
        #[arg(long, default_value_t = 384)]
        resolution: usize,
    },
    /// Measure the energy/dissipation coercivity constants.
    EnergyCheck {
        #[command(flatten)]
        common: CommonOpts,
        /// Comma-separated ε list.
        #[arg(long, default_value = "0.03,0.05,0.08")]
        eps_list: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0.2)]
        sigma1: f64,
        #[arg(long, default_value_t = 2.0)]
        sigma2: f64,
    },
    /// Run the spectral validation and emit trajectory + report.
    DnsRun {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, default_value_t = std::f64::consts::TAU)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        separation: f64,
        /// Reynolds number Γ/ν (sets the viscosity).
        #[arg(long, default_value_t = 5000.0)]
        reynolds: f64,
        #[arg(long, default_value_t = 0.05)]
        eps0: f64,
        #[arg(long, default_value_t = 0.1)]
        eps_end: f64,
        #[arg(long, default_value_t = 512)]
        resolution: usize,
        #[arg(long, default_value_t = 20.0)]
        box_size: f64,
        #[arg(long, default_value_t = 0.45)]
        cfl: f64,
        /// Horizon exponent σ (run capped at t_adv·δ^{−σ} when σ > 0).
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, default_value_t = 240)]
        samples: usize,
    },
}

#[derive(Serialize)]
struct ErrorDoc {
    error: String,
    kind: &'static str,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file_cfg = match cli.config.as_ref().map(|p| read_config(p)).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => return fail(&e),
    };
    match dispatch(cli.command, &file_cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    let kind = match e {
        Error::Config(_) | Error::InvalidGrid(_) => "config",
        _ => "numerical",
    };
    let doc = ErrorDoc {
        error: e.to_string(),
        kind,
    };
    eprintln!("{}", serde_json::to_string(&doc).unwrap_or_else(|_| e.to_string()));
    if kind == "config" {
        ExitCode::from(2)
    } else {
        ExitCode::from(3)
    }
}

/// Plain key = value file; '#' starts a comment.
fn read_config(path: &Path) -> Result<HashMap<String, String>, Error> {
    let text = fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "{}:{}: expected 'key = value'",
                path.display(),
                lineno + 1
            )));
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn cfg_get<T: std::str::FromStr>(cfg: &HashMap<String, String>, key: &str) -> Result<Option<T>, Error> {
    match cfg.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<T>()
            .map(Some)
            .map_err(|_| Error::Config(format!("config key '{key}': cannot parse '{v}'"))),
    }
}

struct Resolved {
    order: usize,
    grid: GridSpec,
    out: PathBuf,
    seed: u64,
}

fn resolve(common: &CommonOpts, cfg: &HashMap<String, String>) -> Result<Resolved, Error> {
    let order = common
        .order
        .or(cfg_get(cfg, "order")?)
        .unwrap_or(expansion::DEFAULT_ORDER_CAP.min(5));
    let n = common
        .grid_points
        .or(cfg_get(cfg, "grid_points")?)
        .unwrap_or(GridSpec::DEFAULT_N);
    let r_max = common
        .r_max
        .or(cfg_get(cfg, "r_max")?)
        .unwrap_or(GridSpec::DEFAULT_R_MAX);
    let out = common
        .out
        .clone()
        .or(cfg_get::<PathBuf>(cfg, "out")?)
        .unwrap_or_else(|| PathBuf::from("out"));
    let seed = common.seed.or(cfg_get(cfg, "seed")?).unwrap_or(20260209);
    Ok(Resolved {
        order,
        grid: GridSpec::new(r_max, n)?,
        out,
        seed,
    })
}

fn build_bundle(r: &Resolved) -> Result<ExpansionBundle, Error> {
    BundleBuilder::new(r.grid).build(r.order)
}

fn meta(r: &Resolved, extra: &str) -> String {
    format!(
        "dipole v{VERSION} order={} grid_points={} r_max={} seed={} {extra}",
        r.order,
        r.grid.len(),
        r.grid.r_max(),
        r.seed
    )
}

fn write_out(dir: &Path, name: &str, content: &str) -> Result<PathBuf, Error> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, content)?;
    Ok(path)
}

fn dispatch(command: Command, cfg: &HashMap<String, String>) -> Result<(), Error> {
    match command {
        Command::Build { common } => {
            let r = resolve(&common, cfg)?;
            let bundle = build_bundle(&r)?;
            let path = write_out(&r.out, "bundle.json", &bundle.to_json()?)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Alpha { common } => {
            let r = resolve(&common, cfg)?;
            let bundle = build_bundle(&r)?;
            let alpha = expansion::propulsion_alpha(&bundle)?;
            println!("self-propulsion constant alpha = {alpha:.6}");
            println!("quartic speed coefficient -2*pi*alpha = {:.6}", -2.0 * std::f64::consts::PI * alpha);
            println!("speed factor 1 + sum_k eps^k zeta_k with:");
            for k in 0..bundle.n_zeta() {
                let (e, ns) = bundle.zeta_coefficient(k);
                println!("  zeta_{k} = {e:+.9e}  (viscous part {ns:+.9e})");
            }
            Ok(())
        }
        Command::ResidualScan {
            common,
            eps_min,
            eps_max,
            eps_samples,
            delta,
            delta_scan_at,
        } => {
            let r = resolve(&common, cfg)?;
            if !(eps_min > 0.0 && eps_max > eps_min && eps_samples >= 5) {
                return Err(Error::Config(
                    "need 0 < eps_min < eps_max and at least 5 samples".into(),
                ));
            }
            let bundle = build_bundle(&r)?;
            let eps_list = log_space(eps_min, eps_max, eps_samples);
            let scan = expansion::remainder_scan_eps(&bundle, &eps_list, delta)?;
            let mut csv = format!("# {}\n", meta(&r, &format!("delta={delta} slope={}", scan.slope)));
            csv.push_str("eps,delta,norm,fitted_slope\n");
            for s in &scan.samples {
                csv.push_str(&format!("{},{},{},{}\n", s.eps, s.delta, s.norm, scan.slope));
            }
            let path = write_out(&r.out, "residual_scan_eps.csv", &csv)?;
            println!("eps-slope = {:.4} -> {}", scan.slope, path.display());
            if let Some(eps_fixed) = delta_scan_at {
                let deltas = log_space(0.1, 0.8, 5);
                let dscan = expansion::remainder_scan_delta(&bundle, eps_fixed, &deltas)?;
                let mut csv = format!(
                    "# {}\n",
                    meta(&r, &format!("eps={eps_fixed} slope={}", dscan.slope))
                );
                csv.push_str("eps,delta,diff_norm,fitted_slope\n");
                for s in &dscan.samples {
                    csv.push_str(&format!("{},{},{},{}\n", eps_fixed, s.delta, s.norm, dscan.slope));
                }
                let path = write_out(&r.out, "residual_scan_delta.csv", &csv)?;
                println!("delta-slope = {:.4} -> {}", dscan.slope, path.display());
            }
            Ok(())
        }
        Command::Streamlines {
            common,
            eps,
            levels,
            extent,
            resolution,
        } => {
            let r = resolve(&common, cfg)?;
            let bundle = build_bundle(&r)?;
            let grid = Grid2D::centered(extent, extent, resolution, resolution)?;
            let field = fields2d::assemble(&bundle, AssembledField::CoMovingStream, eps, 0.0, &grid)?;
            let (lo, hi) = field
                .values
                .iter()
                .fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
            let level_list: Vec<f64> = (1..=levels)
                .map(|i| lo + (hi - lo) * i as f64 / (levels + 1) as f64)
                .collect();
            let contours = fields2d::extract_contours(&field, &level_list);
            let csv = fields2d::contours_to_csv(&contours, &meta(&r, &format!("eps={eps}")));
            let svg = fields2d::contours_to_svg(&contours, 900);
            let p1 = write_out(&r.out, "streamlines.csv", &csv)?;
            let p2 = write_out(&r.out, "streamlines.svg", &svg)?;
            let p3 = write_out(
                &r.out,
                "comoving_stream.csv",
                &field.to_csv(&meta(&r, &format!("eps={eps} field=comoving_stream"))),
            )?;
            println!("wrote {}, {}, {}", p1.display(), p2.display(), p3.display());
            Ok(())
        }
        Command::EnergyCheck {
            common,
            eps_list,
            samples,
            sigma1,
            sigma2,
        } => {
            let r = resolve(&common, cfg)?;
            let bundle = build_bundle(&r)?;
            let params = WeightParams::new(sigma1, sigma2)?;
            let eps_values: Result<Vec<f64>, Error> = eps_list
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad eps value '{s}'")))
                })
                .collect();
            let mut reports = Vec::new();
            for eps in eps_values? {
                let rep = energy::coercivity_report(&bundle, params, eps, samples, r.seed)?;
                println!(
                    "eps={eps}: kappa_energy={:.4} kappa_dissipation={:.4} positive={}",
                    rep.kappa_energy, rep.kappa_dissipation, rep.all_energies_positive
                );
                reports.push(rep);
            }
            #[derive(Serialize)]
            struct Doc<'a> {
                version: &'static str,
                order: usize,
                grid_points: usize,
                seed: u64,
                reports: &'a [energy::CoercivityReport],
            }
            let doc = Doc {
                version: VERSION,
                order: r.order,
                grid_points: r.grid.len(),
                seed: r.seed,
                reports: &reports,
            };
            let path = write_out(&r.out, "coercivity.json", &serde_json::to_string_pretty(&doc)?)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::DnsRun {
            common,
            gamma,
            separation,
            reynolds,
            eps0,
            eps_end,
            resolution,
            box_size,
            cfl,
            sigma,
            samples,
        } => {
            let r = resolve(&common, cfg)?;
            let gamma = cfg_get(cfg, "gamma")?.unwrap_or(gamma);
            let separation = cfg_get(cfg, "separation")?.unwrap_or(separation);
            let reynolds: f64 = cfg_get(cfg, "reynolds")?.unwrap_or(reynolds);
            let params = DipoleParams::new(gamma, separation, gamma / reynolds)?;
            let config = dns::DnsConfig {
                params,
                eps0: cfg_get(cfg, "eps0")?.unwrap_or(eps0),
                eps_end: cfg_get(cfg, "eps_end")?.unwrap_or(eps_end),
                n: cfg_get(cfg, "resolution")?.unwrap_or(resolution),
                l_over_d: cfg_get(cfg, "box_size")?.unwrap_or(box_size),
                cfl: cfg_get(cfg, "cfl")?.unwrap_or(cfl),
                sigma: cfg_get(cfg, "sigma")?.unwrap_or(sigma),
                samples: cfg_get(cfg, "samples")?.unwrap_or(samples),
            };
            config.validate()?;
            let bundle = build_bundle(&r)?;
            let alpha = expansion::propulsion_alpha(&bundle)?;
            let traj = dns::run(&config, &bundle)?;
            let lo = config.eps0 * 1.08;
            let hi = config.eps_end * 0.97;
            let checkpoints: Vec<f64> = (0..10)
                .map(|i| lo + (hi - lo) * i as f64 / 9.0)
                .collect();
            let report = dns::measure(&traj, alpha, &checkpoints)?;
            let csv = dns::trajectory_csv(
                &traj,
                &meta(
                    &r,
                    &format!(
                        "gamma={gamma} d={separation} reynolds={reynolds} n={} box={}",
                        config.n, config.l_over_d
                    ),
                ),
            );
            let p1 = write_out(&r.out, "trajectory.csv", &csv)?;
            let p2 = write_out(&r.out, "dns_report.json", &serde_json::to_string_pretty(&report)?)?;
            println!(
                "deficit slope = {:.3}, l1 bound ratio = {:.3}",
                report.deficit_slope, report.l1_bound_ratio
            );
            println!("wrote {}, {}", p1.display(), p2.display());
            Ok(())
        }
    }
}
