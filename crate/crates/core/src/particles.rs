//! Event-driven simulation of branching on/off Brownian motions — the
//! particle duals of the reaction–diffusion systems.
//!
//! Each particle carries an active/dormant flag. Active particles branch at
//! rate `kappa` (into `1 + k` copies, `k` drawn from the offspring law) and
//! fall dormant at rate `c`; dormant ones wake at rate `c'`. Whether a flag
//! state diffuses depends on the variant: classical and seed-bank particles
//! move while active, spore particles move while dormant.
//!
//! The engine walks one lineage at a time (depth-first), sampling exponential
//! waiting times between events and drawing each Brownian displacement lazily
//! over the whole mobile interval — split at snapshot times so recorded
//! positions are exact. Nothing is ever stored per time step, so a replicate
//! costs memory only for the particles alive on the pending stack plus
//! whatever the sink keeps.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use crate::error::{Error, Result};
use crate::model::{ModelParams, Variant};
use crate::par;
use crate::rng::replicate_rng;

/// Metabolic state of a particle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flag {
    Active,
    Dormant,
}

impl Flag {
    fn toggled(self) -> Flag {
        match self {
            Flag::Active => Flag::Dormant,
            Flag::Dormant => Flag::Active,
        }
    }
}

/// One particle: where it is and whether it is awake.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub position: f64,
    pub flag: Flag,
}

/// Every particle alive at one instant.
#[derive(Debug, Clone)]
pub struct Population {
    pub t: f64,
    pub particles: Vec<Particle>,
}

impl Population {
    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    /// Position of the rightmost particle, if any exist.
    pub fn rightmost(&self) -> Option<f64> {
        self.particles
            .iter()
            .map(|p| p.position)
            .fold(None, |acc, x| Some(acc.map_or(x, |m: f64| m.max(x))))
    }

    /// `(active, dormant)` head counts.
    pub fn counts(&self) -> (usize, usize) {
        let active = self
            .particles
            .iter()
            .filter(|p| p.flag == Flag::Active)
            .count();
        (active, self.particles.len() - active)
    }
}

fn is_mobile(variant: Variant, flag: Flag) -> bool {
    match variant {
        Variant::Classical | Variant::SeedBank => flag == Flag::Active,
        Variant::Spore => flag == Flag::Dormant,
    }
}

/// Controls for one replicate.
#[derive(Debug, Clone)]
pub struct SimOptions {
    /// Abort with [`Error::PopulationOverflow`] once this many particles have
    /// been created in total (the initial one included).
    pub cap: u64,
    pub initial_flag: Flag,
    pub initial_position: f64,
    /// Times at which to record full populations; entries beyond the horizon
    /// are ignored.
    pub snapshot_times: Vec<f64>,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            cap: 2_000_000,
            initial_flag: Flag::Active,
            initial_position: 0.0,
            snapshot_times: Vec::new(),
        }
    }
}

/// Output of a materialized replicate.
#[derive(Debug, Clone)]
pub struct SimRun {
    pub population: Population,
    pub snapshots: Vec<Population>,
    /// Exponential-clock events processed.
    pub events: u64,
    /// Particles created in total.
    pub created: u64,
}

/// Where the engine delivers particles.
trait Sink {
    fn on_final(&mut self, p: Particle);
    fn on_snapshot(&mut self, _idx: usize, _p: Particle) {}
}

struct CollectSink {
    finals: Vec<Particle>,
    snapshots: Vec<Vec<Particle>>,
}

impl Sink for CollectSink {
    fn on_final(&mut self, p: Particle) {
        self.finals.push(p);
    }

    fn on_snapshot(&mut self, idx: usize, p: Particle) {
        self.snapshots[idx].push(p);
    }
}

/// Keeps only the rightmost final position; O(1) memory however large the
/// population grows.
struct MaxSink {
    max: f64,
}

impl Sink for MaxSink {
    fn on_final(&mut self, p: Particle) {
        self.max = self.max.max(p.position);
    }
}

/// A lineage waiting on the depth-first stack.
struct Pending {
    t: f64,
    position: f64,
    flag: Flag,
    /// Next snapshot this lineage has not yet passed.
    snap_idx: usize,
}

fn brownian_step(rng: &mut ChaCha8Rng, duration: f64) -> f64 {
    rng.sample::<f64, _>(StandardNormal) * duration.sqrt()
}

fn drive<S: Sink>(
    params: &ModelParams,
    t_final: f64,
    rng: &mut ChaCha8Rng,
    opts: &SimOptions,
    sink: &mut S,
) -> Result<(u64, u64)> {
    if !t_final.is_finite() || t_final < 0.0 {
        return Err(Error::Domain(format!("bad horizon {t_final}")));
    }
    let mut snap_times: Vec<f64> = opts
        .snapshot_times
        .iter()
        .copied()
        .filter(|&t| t <= t_final)
        .collect();
    snap_times.sort_by(|a, b| a.total_cmp(b));
    snap_times.dedup();

    let active_rate = params.kappa + params.c;
    let exp_active = Exp::new(active_rate).expect("kappa > 0 guarantees a positive rate");
    let exp_dormant =
        (params.c_prime > 0.0).then(|| Exp::new(params.c_prime).expect("positive rate"));

    let mut events: u64 = 0;
    let mut created: u64 = 1;
    let mut stack = vec![Pending {
        t: 0.0,
        position: opts.initial_position,
        flag: opts.initial_flag,
        snap_idx: 0,
    }];

    while let Some(mut p) = stack.pop() {
        loop {
            let wait = match p.flag {
                Flag::Active => exp_active.sample(rng),
                Flag::Dormant => exp_dormant
                    .as_ref()
                    .map(|d| d.sample(rng))
                    .unwrap_or(f64::INFINITY),
            };
            let t_event = p.t + wait;
            let t_stop = t_event.min(t_final);
            let mobile = is_mobile(params.variant, p.flag);

            // Walk through any snapshots inside this quiet interval, splitting
            // the Brownian displacement at each so positions are exact.
            while p.snap_idx < snap_times.len() && snap_times[p.snap_idx] <= t_stop {
                let ts = snap_times[p.snap_idx];
                if mobile {
                    p.position += brownian_step(rng, ts - p.t);
                }
                p.t = ts;
                sink.on_snapshot(
                    p.snap_idx,
                    Particle {
                        position: p.position,
                        flag: p.flag,
                    },
                );
                p.snap_idx += 1;
            }
            if mobile {
                p.position += brownian_step(rng, t_stop - p.t);
            }
            p.t = t_stop;

            if t_event >= t_final {
                sink.on_final(Particle {
                    position: p.position,
                    flag: p.flag,
                });
                break;
            }

            events += 1;
            match p.flag {
                Flag::Active => {
                    if rng.gen::<f64>() * active_rate < params.kappa {
                        let extra = params.law.sample_extra(rng) as u64;
                        created += extra;
                        if created > opts.cap {
                            return Err(Error::PopulationOverflow {
                                cap: opts.cap as usize,
                                t: p.t,
                            });
                        }
                        for _ in 0..extra {
                            stack.push(Pending {
                                t: p.t,
                                position: p.position,
                                flag: Flag::Active,
                                snap_idx: p.snap_idx,
                            });
                        }
                        // The parent keeps running as one of the offspring.
                    } else {
                        p.flag = Flag::Dormant;
                    }
                }
                Flag::Dormant => p.flag = Flag::Active,
            }
        }
    }
    Ok((events, created))
}

/// Runs one materialized replicate on the master seed's stream 0.
pub fn simulate(
    params: &ModelParams,
    t_final: f64,
    seed: u64,
    opts: &SimOptions,
) -> Result<SimRun> {
    simulate_replicate(params, t_final, seed, 0, opts)
}

/// Runs replicate `replicate` of a seeded batch: same master seed, dedicated
/// RNG stream, so any subset of replicates can be reproduced independently.
pub fn simulate_replicate(
    params: &ModelParams,
    t_final: f64,
    master_seed: u64,
    replicate: u64,
    opts: &SimOptions,
) -> Result<SimRun> {
    let mut rng = replicate_rng(master_seed, replicate);
    let snap_count = opts
        .snapshot_times
        .iter()
        .filter(|&&t| t <= t_final)
        .count();
    let mut sink = CollectSink {
        finals: Vec::new(),
        snapshots: vec![Vec::new(); snap_count],
    };
    let (events, created) = drive(params, t_final, &mut rng, opts, &mut sink)?;

    let mut snap_times: Vec<f64> = opts
        .snapshot_times
        .iter()
        .copied()
        .filter(|&t| t <= t_final)
        .collect();
    snap_times.sort_by(|a, b| a.total_cmp(b));
    snap_times.dedup();
    let snapshots = snap_times
        .into_iter()
        .zip(sink.snapshots)
        .map(|(t, particles)| Population { t, particles })
        .collect();

    Ok(SimRun {
        population: Population {
            t: t_final,
            particles: sink.finals,
        },
        snapshots,
        events,
        created,
    })
}

/// Rightmost positions across a replicate batch, with the replicates that
/// blew past the particle cap counted rather than failing the batch.
fn rightmost_samples(
    params: &ModelParams,
    t_final: f64,
    replicates: usize,
    master_seed: u64,
    opts: &SimOptions,
) -> Result<(Vec<(u64, f64)>, usize)> {
    let results = par::map_indexed(replicates, |i| {
        let mut rng = replicate_rng(master_seed, i as u64);
        let mut sink = MaxSink {
            max: f64::NEG_INFINITY,
        };
        drive(params, t_final, &mut rng, opts, &mut sink).map(|_| sink.max)
    });
    let mut samples = Vec::with_capacity(replicates);
    let mut overflows = 0usize;
    for (i, res) in results.into_iter().enumerate() {
        match res {
            Ok(r) => samples.push((i as u64, r)),
            Err(Error::PopulationOverflow { .. }) => overflows += 1,
            Err(e) => return Err(e),
        }
    }
    Ok((samples, overflows))
}

/// Monte Carlo estimate of the front speed `R_T / T`.
#[derive(Debug, Clone)]
pub struct RightmostStat {
    pub t: f64,
    /// `(replicate, rightmost position)` for every replicate that finished.
    pub samples: Vec<(u64, f64)>,
    pub mean_speed: f64,
    /// Standard error of `mean_speed`.
    pub stderr: f64,
    /// Replicates dropped for exceeding the particle cap.
    pub overflows: usize,
    pub replicates: usize,
}

/// Simulates `replicates` independent populations to time `t_final` and
/// averages the rightmost particle's speed.
pub fn rightmost_speed(
    params: &ModelParams,
    t_final: f64,
    replicates: usize,
    master_seed: u64,
    opts: &SimOptions,
) -> Result<RightmostStat> {
    if !t_final.is_finite() || t_final <= 0.0 {
        return Err(Error::Domain(format!("horizon {t_final} must be positive")));
    }
    let (samples, overflows) = rightmost_samples(params, t_final, replicates, master_seed, opts)?;
    let n = samples.len();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let nf = n as f64;
    let mean_r = samples.iter().map(|&(_, r)| r).sum::<f64>() / nf;
    let var_r = samples
        .iter()
        .map(|&(_, r)| (r - mean_r) * (r - mean_r))
        .sum::<f64>()
        / (nf - 1.0);
    Ok(RightmostStat {
        t: t_final,
        mean_speed: mean_r / t_final,
        stderr: (var_r / nf).sqrt() / t_final,
        overflows,
        replicates,
        samples,
    })
}

/// One point of an empirical distribution function.
#[derive(Debug, Clone, Copy)]
pub struct CdfPoint {
    pub x: f64,
    pub p_hat: f64,
    pub stderr: f64,
}

/// Empirical CDF of the rightmost particle at a fixed time.
#[derive(Debug, Clone)]
pub struct CdfEstimate {
    pub t: f64,
    pub replicates: usize,
    pub overflows: usize,
    pub points: Vec<CdfPoint>,
}

/// Estimates `P(rightmost at t <= x)` at each probe point. This is the
/// quantity the nonlinear PDE with a step initial condition computes, so the
/// two solvers validate each other through it.
pub fn empirical_rightmost_cdf(
    params: &ModelParams,
    t_final: f64,
    probes: &[f64],
    replicates: usize,
    master_seed: u64,
    opts: &SimOptions,
) -> Result<CdfEstimate> {
    let (samples, overflows) = rightmost_samples(params, t_final, replicates, master_seed, opts)?;
    let n = samples.len();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let nf = n as f64;
    let points = probes
        .iter()
        .map(|&x| {
            let hits = samples.iter().filter(|&&(_, r)| r <= x).count();
            let p_hat = hits as f64 / nf;
            CdfPoint {
                x,
                p_hat,
                stderr: (p_hat * (1.0 - p_hat) / nf).sqrt(),
            }
        })
        .collect();
    Ok(CdfEstimate {
        t: t_final,
        replicates,
        overflows,
        points,
    })
}

/// The additive martingale of a population: every particle contributes its
/// flag's eigenvector weight times `exp(mu (x + lambda t))`. With `lambda`
/// the upper-branch speed at `mu` and `(d1, d2)` the matching eigenvector,
/// the mean over replicates is constant in time.
pub fn additive_martingale(pop: &Population, mu: f64, lambda: f64, d: (f64, f64)) -> f64 {
    pop.particles
        .iter()
        .map(|p| {
            let weight = match p.flag {
                Flag::Active => d.0,
                Flag::Dormant => d.1,
            };
            weight * (mu * (p.position + lambda * pop.t)).exp()
        })
        .sum()
}

/// Paths per RNG stream in [`onoff_bm_feynman_kac`]; fixed so results do not
/// depend on thread count.
const FK_BATCH: usize = 4096;

/// Feynman–Kac estimate of the linear co-moving system's active component.
///
/// A single particle starts active at `x0`, switches state at rates
/// `c`/`c'`, drifts at `lambda` throughout, and diffuses while mobile. Each
/// path is weighted by `exp(s * active time)` and scored with `f` or `g`
/// according to its terminal flag. Returns `(mean, standard error)` over
/// `paths` paths.
///
/// The exponential weight caps the usable horizon: `s * t` beyond 8 makes
/// the estimator variance useless and is rejected.
#[allow(clippy::too_many_arguments)]
pub fn onoff_bm_feynman_kac<F, G>(
    params: &ModelParams,
    lambda: f64,
    t_final: f64,
    x0: f64,
    f: F,
    g: G,
    paths: usize,
    master_seed: u64,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> f64 + Sync,
{
    if !t_final.is_finite() || t_final <= 0.0 {
        return Err(Error::Domain(format!("bad horizon {t_final}")));
    }
    if paths < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: paths,
        });
    }
    let s = params.effective_selection();
    if s * t_final > 8.0 {
        return Err(Error::Domain(format!(
            "s * t = {} is too large for a stable path weight; split the horizon",
            s * t_final
        )));
    }
    let exp_active = (params.c > 0.0).then(|| Exp::new(params.c).expect("positive rate"));
    let exp_dormant =
        (params.c_prime > 0.0).then(|| Exp::new(params.c_prime).expect("positive rate"));

    let nbatches = paths.div_ceil(FK_BATCH);
    let partials = par::map_indexed(nbatches, |b| {
        let mut rng = replicate_rng(master_seed, b as u64);
        let count = FK_BATCH.min(paths - b * FK_BATCH);
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..count {
            let mut t = 0.0;
            let mut pos = x0;
            let mut flag = Flag::Active;
            let mut active_time = 0.0;
            loop {
                let wait = match flag {
                    Flag::Active => &exp_active,
                    Flag::Dormant => &exp_dormant,
                }
                .as_ref()
                .map(|d| d.sample(&mut rng))
                .unwrap_or(f64::INFINITY);
                let t_stop = (t + wait).min(t_final);
                let seg = t_stop - t;
                if is_mobile(params.variant, flag) && seg > 0.0 {
                    pos += brownian_step(&mut rng, seg);
                }
                pos += lambda * seg;
                if flag == Flag::Active {
                    active_time += seg;
                }
                t = t_stop;
                if t >= t_final {
                    break;
                }
                flag = flag.toggled();
            }
            let terminal = match flag {
                Flag::Active => f(pos),
                Flag::Dormant => g(pos),
            };
            let w = (s * active_time).exp() * terminal;
            sum += w;
            sumsq += w * w;
        }
        (sum, sumsq)
    });

    let (sum, sumsq) = partials
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let nf = paths as f64;
    let mean = sum / nf;
    let var = ((sumsq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    Ok((mean, (var / nf).sqrt()))
}
