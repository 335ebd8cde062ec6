//! `dormwave`: wave speeds, fronts and particle simulations for the
//! classical F-KPP equation and its two dormancy variants, from one binary.
//!
//! Data goes to stdout (or `--out`), human commentary to stderr, so every
//! command pipes cleanly. All numeric output carries 12 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dormwave_core::harness::{
    catalog, fmt_sig, join_sig, sweep_csv_lines, write_csv, ExpConfig, SWEEP_CSV_HEADER,
};
use dormwave_core::model::{ModelParams, OffspringLaw, Variant};
use dormwave_core::particles::{empirical_rightmost_cdf, rightmost_speed, Flag, SimOptions};
use dormwave_core::pde::{
    exponential_ic, front_speed, heaviside_ic, integrate, Grid1D, IntegrateOptions,
};
use dormwave_core::wavespeed::{
    critical_speed, perron_eigenvector, speed_function, sweep_critical, SweepAxis,
};

#[derive(Parser)]
#[command(
    name = "dormwave",
    version,
    about = "Travelling waves with dormancy: closed-form speeds, PDE fronts and \
             branching Brownian particles",
    propagate_version = true
)]
struct Cli {
    /// Worker threads for replicates and sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// Model selection shared by every command. Flags override `--config`
/// entries, which override the unit defaults (c = c' = kappa = 1, binary
/// offspring, seed-bank variant).
#[derive(Args, Debug, Clone, Default)]
struct ModelOpts {
    /// Model variant: classical, seedbank or spore.
    #[arg(long)]
    variant: Option<String>,
    /// Rate of falling dormant (forced to 0 for classical).
    #[arg(short = 'c', long)]
    c: Option<f64>,
    /// Rate of waking up (forced to 0 for classical).
    #[arg(long)]
    c_prime: Option<f64>,
    /// Branching rate.
    #[arg(long)]
    kappa: Option<f64>,
    /// Extra-offspring probabilities "p1,p2,...": k extra children with
    /// probability pk.
    #[arg(long)]
    offspring: Option<String>,
    /// key = value file with the same five keys; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ModelOpts {
    fn resolve(&self) -> Result<ModelParams> {
        let mut variant = self.variant.clone();
        let mut c = self.c;
        let mut c_prime = self.c_prime;
        let mut kappa = self.kappa;
        let mut offspring = self.offspring.clone();

        if let Some(path) = &self.config {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            for (idx, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    anyhow!("{}:{}: expected key = value", path.display(), idx + 1)
                })?;
                let (key, value) = (key.trim(), value.trim());
                let parse_rate = || -> Result<f64> {
                    value
                        .parse()
                        .with_context(|| format!("{}:{}: bad number", path.display(), idx + 1))
                };
                match key {
                    "variant" => {
                        variant.get_or_insert_with(|| value.to_string());
                    }
                    "c" => {
                        if c.is_none() {
                            c = Some(parse_rate()?);
                        }
                    }
                    "c_prime" => {
                        if c_prime.is_none() {
                            c_prime = Some(parse_rate()?);
                        }
                    }
                    "kappa" => {
                        if kappa.is_none() {
                            kappa = Some(parse_rate()?);
                        }
                    }
                    "offspring" => {
                        offspring.get_or_insert_with(|| value.to_string());
                    }
                    other => bail!("{}: unknown key '{other}'", path.display()),
                }
            }
        }

        let variant: Variant = variant.as_deref().unwrap_or("seedbank").parse()?;
        let law = match &offspring {
            Some(list) => OffspringLaw::parse_list(list)?,
            None => OffspringLaw::binary(),
        };
        let kappa = kappa.unwrap_or(1.0);
        // The classical equation has no switching, so unset rates default to
        // zero there; explicitly nonzero ones are rejected by the model.
        let default_rate = if variant == Variant::Classical {
            0.0
        } else {
            1.0
        };
        Ok(ModelParams::new(
            variant,
            c.unwrap_or(default_rate),
            c_prime.unwrap_or(default_rate),
            kappa,
            law,
        )?)
    }
}

fn describe(params: &ModelParams) -> String {
    format!(
        "variant={} c={} c_prime={} kappa={} offspring={} s={}",
        params.variant,
        fmt_sig(params.c, 12),
        fmt_sig(params.c_prime, 12),
        fmt_sig(params.kappa, 12),
        params
            .law
            .probs()
            .iter()
            .map(|&p| fmt_sig(p, 12))
            .collect::<Vec<_>>()
            .join(","),
        fmt_sig(params.effective_selection(), 12),
    )
}

/// Writes a CSV to `--out` (with comment headers) or echoes it to stdout.
fn emit(out: Option<&Path>, meta: &[(&str, String)], header: &str, lines: &[String]) -> Result<()> {
    match out {
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let name = path
                .file_name()
                .ok_or_else(|| anyhow!("--out needs a file name"))?
                .to_string_lossy();
            let written = write_csv(dir, &name, meta, header, lines)?;
            eprintln!("wrote {}", written.display());
        }
        None => {
            for (key, value) in meta {
                println!("# {key}: {value}");
            }
            println!("{header}");
            for line in lines {
                println!("{line}");
            }
        }
    }
    Ok(())
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate both speed branches at one or more spatial decay rates.
    Speed {
        #[command(flatten)]
        model: ModelOpts,
        /// Decay rates (negative), repeated or comma-separated.
        #[arg(
            long,
            value_delimiter = ',',
            num_args = 1..,
            required = true,
            allow_hyphen_values = true
        )]
        mu: Vec<f64>,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve for the critical wave speed and its minimizing decay rate.
    Critical {
        #[command(flatten)]
        model: ModelOpts,
    },
    /// Critical speeds of all three variants along one parameter axis.
    Sweep {
        #[command(flatten)]
        model: ModelOpts,
        /// Axis to sweep: s, c, c_prime or c_both.
        #[arg(long)]
        axis: String,
        /// Explicit axis values, comma-separated.
        #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with_all = ["from", "to"])]
        values: Option<Vec<f64>>,
        /// Generated grid start (with --to and --points).
        #[arg(long, requires = "to")]
        from: Option<f64>,
        /// Generated grid end.
        #[arg(long, requires = "from")]
        to: Option<f64>,
        /// Number of generated grid points.
        #[arg(long, default_value_t = 10)]
        points: usize,
        /// Space the generated grid logarithmically.
        #[arg(long)]
        log: bool,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// March the coupled fields and track the front.
    Pde {
        #[command(flatten)]
        model: ModelOpts,
        /// Left edge of the grid.
        #[arg(long, default_value_t = -60.0, allow_negative_numbers = true)]
        x0: f64,
        /// Right edge of the grid.
        #[arg(long, default_value_t = 140.0, allow_negative_numbers = true)]
        x1: f64,
        /// Grid spacing.
        #[arg(long, default_value_t = 0.1)]
        dx: f64,
        /// Final time.
        #[arg(long, default_value_t = 40.0)]
        t: f64,
        /// Time step (default: a stable one from the grid and rates).
        #[arg(long)]
        dt: Option<f64>,
        /// Initial condition: "step", or "wave" for an exponential tail
        /// (needs --mu).
        #[arg(long, default_value = "step")]
        ic: String,
        /// Tail decay rate for --ic wave.
        #[arg(long, allow_negative_numbers = true)]
        mu: Option<f64>,
        /// Front level to track.
        #[arg(long, default_value_t = 0.5)]
        level: f64,
        /// Record the front every N steps.
        #[arg(long, default_value_t = 10)]
        sample_every: usize,
        /// Write the front trace CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the final u/v profile to this CSV.
        #[arg(long)]
        profile_out: Option<PathBuf>,
    },
    /// Simulate on/off branching Brownian replicates; list rightmost
    /// positions, or estimate their CDF with --cdf-probes.
    Bbm {
        #[command(flatten)]
        model: ModelOpts,
        /// Horizon.
        #[arg(long, default_value_t = 5.0)]
        t: f64,
        #[arg(long, default_value_t = 1000)]
        replicates: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Abort a replicate once this many particles have been created.
        #[arg(long, default_value_t = 2_000_000)]
        cap: u64,
        /// Start the ancestor dormant instead of active.
        #[arg(long)]
        start_dormant: bool,
        /// Estimate P(rightmost <= x) at these points instead of listing
        /// raw maxima.
        #[arg(long, value_delimiter = ',', num_args = 1.., allow_hyphen_values = true)]
        cdf_probes: Option<Vec<f64>>,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run named validation experiments and print their reports.
    #[command(after_help = verify_after_help())]
    Verify {
        /// Experiment names (see --list).
        names: Vec<String>,
        /// Run the whole catalog.
        #[arg(long, conflicts_with = "names")]
        all: bool,
        /// List the available experiments and exit.
        #[arg(long)]
        list: bool,
        /// Quarter-size replicate counts, doubled statistical budgets.
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Write experiment CSV artifacts into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn verify_after_help() -> String {
    let mut help = String::from("Experiments:\n");
    for spec in catalog() {
        help.push_str(&format!("  {:<18} {}\n", spec.name, spec.description));
    }
    help
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    #[cfg(feature = "parallel")]
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("initializing the thread pool")?;
    }
    #[cfg(not(feature = "parallel"))]
    if cli.threads.is_some() {
        eprintln!("note: built without the `parallel` feature; --threads is ignored");
    }

    match cli.command {
        Command::Speed { model, mu, out } => {
            let params = model.resolve()?;
            let mut lines = Vec::with_capacity(mu.len());
            for &m in &mu {
                let eval = speed_function(m, &params)?;
                lines.push(join_sig(&[
                    m,
                    eval.lambda_plus,
                    eval.lambda_minus,
                    eval.discriminant,
                ]));
            }
            emit(
                out.as_deref(),
                &[("command", "speed".into()), ("model", describe(&params))],
                "mu,lambda_plus,lambda_minus,discriminant",
                &lines,
            )
        }
        Command::Critical { model } => {
            let params = model.resolve()?;
            let crit = critical_speed(&params)?;
            println!("model         {}", describe(&params));
            println!("lambda_star   {}", fmt_sig(crit.lambda_star, 12));
            println!("mu_star       {}", fmt_sig(crit.mu_star, 12));
            println!(
                "eigvec        ({}, {})",
                fmt_sig(crit.eigvec.0, 12),
                fmt_sig(crit.eigvec.1, 12)
            );
            println!("det_residual  {}", fmt_sig(crit.det_residual, 3));
            Ok(())
        }
        Command::Sweep {
            model,
            axis,
            values,
            from,
            to,
            points,
            log,
            out,
        } => {
            let params = model.resolve()?;
            let axis: SweepAxis = axis.parse()?;
            let values = match values {
                Some(v) => v,
                None => {
                    let (from, to) = from
                        .zip(to)
                        .ok_or_else(|| anyhow!("pass --values, or both --from and --to"))?;
                    if points < 2 {
                        bail!("--points must be at least 2");
                    }
                    if log && (from <= 0.0 || to <= 0.0) {
                        bail!("--log needs positive --from and --to");
                    }
                    (0..points)
                        .map(|i| {
                            let f = i as f64 / (points - 1) as f64;
                            if log {
                                (from.ln() + (to.ln() - from.ln()) * f).exp()
                            } else {
                                from + (to - from) * f
                            }
                        })
                        .collect()
                }
            };
            let rows = sweep_critical(axis, &values, &params)?;
            emit(
                out.as_deref(),
                &[
                    ("command", "sweep".into()),
                    ("axis", axis.name().into()),
                    ("base", describe(&params)),
                ],
                SWEEP_CSV_HEADER,
                &sweep_csv_lines(axis, &rows),
            )
        }
        Command::Pde {
            model,
            x0,
            x1,
            dx,
            t,
            dt,
            ic,
            mu,
            level,
            sample_every,
            out,
            profile_out,
        } => {
            let params = model.resolve()?;
            let grid = Grid1D::from_range(x0, x1, dx)?;
            let init = match ic.as_str() {
                "step" => heaviside_ic(grid)?,
                "wave" => {
                    let mu = mu.ok_or_else(|| anyhow!("--ic wave needs --mu"))?;
                    let d = perron_eigenvector(mu, &params)?;
                    exponential_ic(grid, mu, d)?
                }
                other => bail!("unknown initial condition '{other}' (step or wave)"),
            };
            let opts = IntegrateOptions {
                dt,
                sample_every,
                front_level: level,
                snapshot_times: Vec::new(),
            };
            let run = integrate(&params, init, t, &opts)?;

            let (speed, stderr) = front_speed(&run.trace, 0.5 * t, t)?;
            let crit = critical_speed(&params)?;
            eprintln!(
                "front speed over [{}, {}]: {} +/- {} (critical speed {})",
                fmt_sig(0.5 * t, 6),
                fmt_sig(t, 6),
                fmt_sig(speed, 12),
                fmt_sig(stderr, 3),
                fmt_sig(crit.lambda_star, 12)
            );

            if let Some(path) = &profile_out {
                let lines: Vec<String> = (0..run.field.grid.n)
                    .map(|i| join_sig(&[run.field.grid.x(i), run.field.u[i], run.field.v[i]]))
                    .collect();
                emit(
                    Some(path),
                    &[
                        ("command", "pde profile".into()),
                        ("model", describe(&params)),
                        ("t", fmt_sig(t, 12)),
                    ],
                    "x,u,v",
                    &lines,
                )?;
            }

            let lines: Vec<String> = run
                .trace
                .times
                .iter()
                .zip(&run.trace.positions)
                .map(|(&ti, &xi)| join_sig(&[ti, xi]))
                .collect();
            emit(
                out.as_deref(),
                &[
                    ("command", "pde".into()),
                    ("model", describe(&params)),
                    ("ic", ic),
                    ("level", fmt_sig(level, 12)),
                ],
                "t,front_x",
                &lines,
            )
        }
        Command::Bbm {
            model,
            t,
            replicates,
            seed,
            cap,
            start_dormant,
            cdf_probes,
            out,
        } => {
            let params = model.resolve()?;
            let opts = SimOptions {
                cap,
                initial_flag: if start_dormant {
                    Flag::Dormant
                } else {
                    Flag::Active
                },
                ..Default::default()
            };
            let meta_base = [
                ("command", "bbm".to_string()),
                ("model", describe(&params)),
                ("t", fmt_sig(t, 12)),
                ("replicates", replicates.to_string()),
                ("seed", seed.to_string()),
            ];
            match cdf_probes {
                Some(probes) => {
                    let est =
                        empirical_rightmost_cdf(&params, t, &probes, replicates, seed, &opts)?;
                    eprintln!(
                        "{} replicates, {} hit the particle cap",
                        est.replicates, est.overflows
                    );
                    let lines: Vec<String> = est
                        .points
                        .iter()
                        .map(|p| join_sig(&[p.x, p.p_hat, p.stderr]))
                        .collect();
                    emit(out.as_deref(), &meta_base, "x,p_hat,stderr", &lines)
                }
                None => {
                    let stat = rightmost_speed(&params, t, replicates, seed, &opts)?;
                    eprintln!(
                        "mean rightmost speed {} +/- {} ({} replicates, {} hit the cap)",
                        fmt_sig(stat.mean_speed, 12),
                        fmt_sig(stat.stderr, 3),
                        stat.replicates,
                        stat.overflows
                    );
                    let lines: Vec<String> = stat
                        .samples
                        .iter()
                        .map(|&(replicate, r)| format!("{replicate},{}", fmt_sig(r, 12)))
                        .collect();
                    emit(out.as_deref(), &meta_base, "replicate,R_T", &lines)
                }
            }
        }
        Command::Verify {
            names,
            all,
            list,
            quick,
            seed,
            out_dir,
        } => {
            let specs = catalog();
            if list {
                for spec in &specs {
                    println!("{:<18} {}", spec.name, spec.description);
                }
                return Ok(());
            }
            let selected: Vec<_> = if all {
                specs
            } else {
                if names.is_empty() {
                    bail!("name at least one experiment, or pass --all (see --list)");
                }
                names
                    .iter()
                    .map(|n| {
                        specs.iter().find(|s| s.name == n).copied().ok_or_else(|| {
                            anyhow!("unknown experiment '{n}'; run `dormwave verify --list`")
                        })
                    })
                    .collect::<Result<_>>()?
            };
            let cfg = ExpConfig {
                out_dir,
                seed,
                quick,
            };
            let mut failed = 0usize;
            for spec in &selected {
                let report = (spec.run)(&cfg)?;
                print!("{}", report.render());
                if !report.passed() {
                    failed += 1;
                }
            }
            if failed > 0 {
                bail!("{failed} of {} experiments failed", selected.len());
            }
            println!("all {} experiments passed", selected.len());
            Ok(())
        }
    }
}
