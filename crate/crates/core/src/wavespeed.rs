//! Dispersion relations and critical wave speeds.
//!
//! A right-moving front whose leading tail decays like `exp(mu * x)` with
//! `mu < 0` can travel at speed `lambda` only if the 2x2 linearization matrix
//! [`eigen_matrix`] is singular at `(mu, lambda)`. Solving the determinant
//! for `lambda` gives two branches; the critical (minimal) wave speed is the
//! minimum of the upper branch over all admissible decay rates.
//!
//! Every speed is computed along two independent routes — the explicit
//! closed form ([`speed_function`]) and a generic eigenvalue solve of the
//! switching matrix ([`speed_function_via_eigensolve`]) — and their agreement
//! is asserted in debug builds and in the test suite. The minimizer itself is
//! a coarse log-spaced scan, golden-section refinement, and a final Newton
//! polish on the stationarity system, which lands at machine precision.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{ModelParams, Variant};

/// Most negative decay rate the critical-speed search considers.
pub const SCAN_LO: f64 = -64.0;
/// Least negative decay rate the search considers (`mu = 0` is singular).
pub const SCAN_HI: f64 = -1e-6;
/// Points in the initial log-spaced scan.
pub const SCAN_POINTS: usize = 256;

/// Bracket width at which golden-section refinement stops.
const GOLDEN_WIDTH: f64 = 1e-10;
const NEWTON_MAX_ITER: usize = 32;
/// Offset used by the local-minimum certificate.
const CERTIFICATE_STEP: f64 = 1e-4;

/// Both speed branches of the dispersion relation at one decay rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedEval {
    pub mu: f64,
    /// Upper branch: the admissible wave speed. Its minimum over `mu` is the
    /// critical speed.
    pub lambda_plus: f64,
    /// Lower branch. Exposed for plots and sanity checks, never minimized.
    pub lambda_minus: f64,
    /// Radicand separating the branches; zero for the classical equation,
    /// where the relation is scalar.
    pub discriminant: f64,
}

/// Critical travelling wave: minimal speed, its decay rate, and the
/// associated positive eigenvector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalSpeed {
    /// Decay rate at which the upper branch is minimal.
    pub mu_star: f64,
    /// Minimal wave speed.
    pub lambda_star: f64,
    /// `|det|` of the linearization matrix at `(mu_star, lambda_star)`; a
    /// direct measure of how exactly the reported pair sits on the relation.
    pub det_residual: f64,
    /// Positive right null vector `(d1, d2)` of the linearization matrix,
    /// normalized to `d2 = 1`. For the classical equation (and for `c' = 0`,
    /// where the dormant pool is never re-entered) it degenerates to (1, 0).
    pub eigvec: (f64, f64),
}

fn check_mu(mu: f64) -> Result<()> {
    if !mu.is_finite() || mu >= 0.0 {
        return Err(Error::Domain(format!(
            "decay rate mu = {mu} must be finite and negative"
        )));
    }
    Ok(())
}

/// Diagonal of the switching matrix with the `mu * lambda` part left out.
fn lambda_free_diagonal(mu: f64, params: &ModelParams) -> (f64, f64) {
    let s = params.effective_selection();
    let half_mu2 = 0.5 * mu * mu;
    match params.variant {
        Variant::Classical => (half_mu2 + s, 0.0),
        Variant::SeedBank => (half_mu2 - params.c + s, -params.c_prime),
        Variant::Spore => (s - params.c, half_mu2 - params.c_prime),
    }
}

/// Closed-form dispersion relation: both speeds admissible at decay rate
/// `mu < 0`.
///
/// The radicand is evaluated in the grouped form `(a - d)^2 + 4 c c'`, which
/// is manifestly non-negative for non-negative switching rates and free of
/// the cancellation the expanded polynomial suffers from.
pub fn speed_function(mu: f64, params: &ModelParams) -> Result<SpeedEval> {
    check_mu(mu)?;
    if params.variant == Variant::Classical {
        let s = params.effective_selection();
        let lambda = -(0.5 * mu + s / mu);
        return Ok(SpeedEval {
            mu,
            lambda_plus: lambda,
            lambda_minus: lambda,
            discriminant: 0.0,
        });
    }
    let (a, d) = lambda_free_diagonal(mu, params);
    let discriminant = (a - d) * (a - d) + 4.0 * params.c * params.c_prime;
    if discriminant < 0.0 {
        return Err(Error::NonRealSpeed {
            mu,
            radicand: discriminant,
        });
    }
    let root = discriminant.sqrt();
    // mu * lambda = (-(a + d) -/+ root) / 2; dividing by mu < 0 swaps the
    // order, so + root is the upper branch.
    let lambda_plus = -((a + d) + root) / (2.0 * mu);
    let lambda_minus = -((a + d) - root) / (2.0 * mu);
    Ok(SpeedEval {
        mu,
        lambda_plus,
        lambda_minus,
        discriminant,
    })
}

/// The 2x2 linearization matrix whose singularity ties a decay rate to a
/// wave speed. Row/column 1 is the active state, row/column 2 the dormant
/// one; the classical equation uses the same layout with `c = c' = 0`.
pub fn eigen_matrix(mu: f64, lambda: f64, params: &ModelParams) -> [[f64; 2]; 2] {
    let s = params.effective_selection();
    let (c, cp) = (params.c, params.c_prime);
    let half_mu2 = 0.5 * mu * mu;
    let y = mu * lambda;
    match params.variant {
        Variant::Classical => [[half_mu2 + s + y, 0.0], [0.0, y]],
        Variant::SeedBank => [[half_mu2 - c + s + y, c], [cp, y - cp]],
        Variant::Spore => [[s - c + y, c], [cp, half_mu2 - cp + y]],
    }
}

/// Determinant of [`eigen_matrix`]; vanishes exactly on the speed branches.
pub fn determinant_poly(mu: f64, lambda: f64, params: &ModelParams) -> f64 {
    let m = eigen_matrix(mu, lambda, params);
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Dispersion relation computed the generic way: take the switching matrix
/// at `lambda = 0`, find its eigenvalues through the characteristic
/// polynomial, and convert them to speeds. Shares no arithmetic with
/// [`speed_function`]; the two must agree to 1e-10, and the critical-speed
/// solver asserts this at every minimum it reports.
pub fn speed_function_via_eigensolve(mu: f64, params: &ModelParams) -> Result<SpeedEval> {
    check_mu(mu)?;
    let m = eigen_matrix(mu, 0.0, params);
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = tr * tr - 4.0 * det;
    if disc < 0.0 {
        return Err(Error::NonRealSpeed { mu, radicand: disc });
    }
    let root = disc.sqrt();
    // Citardauq-style stable quadratic: large-magnitude root first, the
    // other via the product of roots.
    let q = 0.5 * (tr + tr.signum() * root);
    let (alpha_a, alpha_b) = if q == 0.0 { (0.0, 0.0) } else { (q, det / q) };
    let alpha_hi = alpha_a.max(alpha_b);
    let alpha_lo = alpha_a.min(alpha_b);
    // The matrix at (mu, lambda) is singular iff -mu*lambda is an eigenvalue
    // of the lambda = 0 matrix; mu < 0 keeps the order.
    Ok(SpeedEval {
        mu,
        lambda_plus: -alpha_hi / mu,
        lambda_minus: -alpha_lo / mu,
        discriminant: disc,
    })
}

/// Positive right null vector of the linearization matrix at
/// `(mu, lambda_plus(mu))`, normalized to `d2 = 1`.
///
/// For the classical equation the dormant component carries no mass and the
/// vector is (1, 0) by convention. `c' = 0` in a dormancy variant leaves the
/// normalization undefined and is rejected.
pub fn perron_eigenvector(mu: f64, params: &ModelParams) -> Result<(f64, f64)> {
    check_mu(mu)?;
    if params.variant == Variant::Classical {
        return Ok((1.0, 0.0));
    }
    if params.c_prime == 0.0 {
        return Err(Error::Domain(
            "c' = 0: the dormant state is absorbing and the eigenvector cannot be \
             normalized to d2 = 1"
                .into(),
        ));
    }
    let eval = speed_function(mu, params)?;
    // Second row of the singular matrix reads c' * d1 + m22 * d2 = 0, and
    // m22 < 0 on the upper branch, so d1 = -m22 / c' > 0.
    let m = eigen_matrix(mu, eval.lambda_plus, params);
    Ok((-m[1][1] / params.c_prime, 1.0))
}

/// Diagonal entries of the linearization matrix on the upper branch, i.e.
/// the net local rates felt by the active and dormant components. Both are
/// strictly negative wherever the switching rates are positive.
pub fn diagonal_entries(mu: f64, params: &ModelParams) -> Result<(f64, f64)> {
    if params.variant == Variant::Classical {
        return Err(Error::Domain(
            "the classical equation has no active/dormant split".into(),
        ));
    }
    let eval = speed_function(mu, params)?;
    let m = eigen_matrix(mu, eval.lambda_plus, params);
    Ok((m[0][0], m[1][1]))
}

fn solver_err(message: &str, scanned: usize, real: usize, best_mu: f64, best_lambda: f64) -> Error {
    Error::Solver {
        message: message.into(),
        lo: SCAN_LO,
        hi: SCAN_HI,
        scanned,
        real,
        best_mu,
        best_lambda,
    }
}

/// Minimal wave speed of the model: scan, golden-section, Newton polish,
/// then a local-minimum certificate.
pub fn critical_speed(params: &ModelParams) -> Result<CriticalSpeed> {
    critical_speed_scanned(params, SCAN_POINTS)
}

fn critical_speed_scanned(params: &ModelParams, points: usize) -> Result<CriticalSpeed> {
    assert!(points >= 8, "scan needs a few points to bracket anything");
    let log_lo = (-SCAN_LO).ln();
    let log_hi = (-SCAN_HI).ln();
    let mut mus = Vec::with_capacity(points);
    for i in 0..points {
        let t = i as f64 / (points - 1) as f64;
        mus.push(-(log_lo + t * (log_hi - log_lo)).exp());
    }

    let mut lambdas = vec![f64::INFINITY; points];
    let mut real = 0usize;
    let mut best: Option<(usize, f64)> = None;
    for (i, &mu) in mus.iter().enumerate() {
        if let Ok(eval) = speed_function(mu, params) {
            real += 1;
            lambdas[i] = eval.lambda_plus;
            if best.is_none_or(|(_, l)| eval.lambda_plus < l) {
                best = Some((i, eval.lambda_plus));
            }
        }
    }
    let (ibest, scan_lambda) = best.ok_or_else(|| {
        solver_err(
            "no real speed anywhere in the scan",
            points,
            0,
            f64::NAN,
            f64::NAN,
        )
    })?;
    if ibest == 0
        || ibest + 1 == points
        || !lambdas[ibest - 1].is_finite()
        || !lambdas[ibest + 1].is_finite()
    {
        return Err(solver_err(
            "minimum not bracketed in the scan window",
            points,
            real,
            mus[ibest],
            scan_lambda,
        ));
    }

    // Golden-section refinement inside the bracket.
    let eval_lambda = |mu: f64| -> f64 {
        speed_function(mu, params)
            .map(|e| e.lambda_plus)
            .unwrap_or(f64::INFINITY)
    };
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (mus[ibest - 1], mus[ibest + 1]);
    let mut x1 = b - INVPHI * (b - a);
    let mut x2 = a + INVPHI * (b - a);
    let mut f1 = eval_lambda(x1);
    let mut f2 = eval_lambda(x2);
    while b - a > GOLDEN_WIDTH {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INVPHI * (b - a);
            f1 = eval_lambda(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INVPHI * (b - a);
            f2 = eval_lambda(x2);
        }
    }
    let mut mu_star = 0.5 * (a + b);
    let mut lambda_star = eval_lambda(mu_star);

    // Newton polish of the stationarity system (det = 0, d det/d mu = 0).
    // Rejected if it wanders off the golden-section bracket or lands on the
    // wrong branch; the golden-section answer already stands on its own.
    if let Some((mu_n, lambda_n)) = newton_polish(mu_star, lambda_star, params) {
        let on_upper_branch = speed_function(mu_n, params)
            .map(|e| (e.lambda_plus - lambda_n).abs() <= 1e-9 * (1.0 + lambda_n.abs()))
            .unwrap_or(false);
        if on_upper_branch
            && (mu_n - mu_star).abs() < 1e-3 * (1.0 + mu_star.abs())
            && lambda_n <= lambda_star + 1e-9
        {
            mu_star = mu_n;
            lambda_star = lambda_n;
        }
    }

    // Local-minimum certificate.
    for probe in [mu_star - CERTIFICATE_STEP, mu_star + CERTIFICATE_STEP] {
        if probe >= 0.0 {
            continue;
        }
        if let Ok(e) = speed_function(probe, params) {
            if e.lambda_plus < lambda_star - 1e-12 {
                return Err(solver_err(
                    "local-minimum certificate failed",
                    points,
                    real,
                    mu_star,
                    lambda_star,
                ));
            }
        }
    }

    // Standing self-test: the independent eigensolve route must agree.
    debug_assert!(
        speed_function_via_eigensolve(mu_star, params)
            .is_ok_and(|e| (e.lambda_plus - lambda_star).abs()
                <= 1e-10 * (1.0 + lambda_star.abs())),
        "closed form and eigensolve disagree at mu = {mu_star}"
    );

    let det_residual = determinant_poly(mu_star, lambda_star, params).abs();
    // c' = 0: dormant mass never returns; active component carries the
    // whole wave.
    let eigvec = perron_eigenvector(mu_star, params).unwrap_or((1.0, 0.0));
    Ok(CriticalSpeed {
        mu_star,
        lambda_star,
        det_residual,
        eigvec,
    })
}

/// Newton iteration on `(P, dP/dmu) = 0` where `P(mu, lambda)` is the
/// determinant polynomial. Uses hand-derived second derivatives; returns
/// `None` on divergence so the caller can keep the golden-section answer.
fn newton_polish(mu0: f64, lambda0: f64, params: &ModelParams) -> Option<(f64, f64)> {
    let s = params.effective_selection();
    let (c, cp) = (params.c, params.c_prime);
    let (mut mu, mut lambda) = (mu0, lambda0);
    for _ in 0..NEWTON_MAX_ITER {
        let y = mu * lambda;
        let (p, p_mu, p_lam, p_mumu, p_mulam) = match params.variant {
            // The classical relation is scalar: P is the single matrix entry.
            Variant::Classical => (0.5 * mu * mu + s + y, mu + lambda, mu, 1.0, 1.0),
            Variant::SeedBank => {
                let e = 0.5 * mu * mu - c + s + y;
                let f = y - cp;
                (
                    e * f - c * cp,
                    (mu + lambda) * f + e * lambda,
                    mu * (e + f),
                    f + 2.0 * lambda * (mu + lambda),
                    f + mu * (mu + lambda) + y + e,
                )
            }
            Variant::Spore => {
                let g = s - c + y;
                let h = 0.5 * mu * mu - cp + y;
                (
                    g * h - c * cp,
                    lambda * h + g * (mu + lambda),
                    mu * (g + h),
                    2.0 * lambda * (mu + lambda) + g,
                    h + g + y + mu * (mu + lambda),
                )
            }
        };
        let jac_det = p_mu * p_mulam - p_lam * p_mumu;
        if jac_det == 0.0 || !jac_det.is_finite() {
            return None;
        }
        let dmu = -(p * p_mulam - p_mu * p_lam) / jac_det;
        let dlam = -(p_mu * p_mu - p_mumu * p) / jac_det;
        mu += dmu;
        lambda += dlam;
        if !mu.is_finite() || !lambda.is_finite() || mu >= 0.0 {
            return None;
        }
        if dmu.abs() <= 1e-13 * (1.0 + mu.abs()) && dlam.abs() <= 1e-13 * (1.0 + lambda.abs()) {
            return Some((mu, lambda));
        }
    }
    None
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    /// Effective selection strength (adjusts `kappa` to hit the target).
    S,
    /// Switching rate active -> dormant.
    C,
    /// Switching rate dormant -> active.
    CPrime,
    /// Both switching rates together, `c = c'`.
    CBoth,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 4] = [
        SweepAxis::S,
        SweepAxis::C,
        SweepAxis::CPrime,
        SweepAxis::CBoth,
    ];

    /// Stable name used in CSV output and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::S => "s",
            SweepAxis::C => "c",
            SweepAxis::CPrime => "c_prime",
            SweepAxis::CBoth => "c_both",
        }
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s" => Ok(SweepAxis::S),
            "c" => Ok(SweepAxis::C),
            "c_prime" | "cprime" | "c'" => Ok(SweepAxis::CPrime),
            "c_both" | "cboth" => Ok(SweepAxis::CBoth),
            other => Err(Error::Config(format!(
                "unknown sweep axis {other:?} (expected s, c, c_prime or c_both)"
            ))),
        }
    }
}

/// Critical-speed data for all three variants at one sweep point.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub value: f64,
    pub classical: CriticalSpeed,
    pub seed_bank: CriticalSpeed,
    pub spore: CriticalSpeed,
}

/// Sweeps one parameter axis, solving the critical speed of every variant at
/// each value. `base` supplies the parameters the axis does not touch (its
/// own variant tag is ignored). The classical column ignores the switching
/// axes entirely, which makes it a fixed reference line on those sweeps.
pub fn sweep_critical(
    axis: SweepAxis,
    values: &[f64],
    base: &ModelParams,
) -> Result<Vec<SweepRow>> {
    let rows = crate::par::map_indexed(values.len(), |i| -> Result<SweepRow> {
        let value = values[i];
        let (c, cp, kappa) = match axis {
            SweepAxis::S => (base.c, base.c_prime, value / base.law.mean_extra()),
            SweepAxis::C => (value, base.c_prime, base.kappa),
            SweepAxis::CPrime => (base.c, value, base.kappa),
            SweepAxis::CBoth => (value, value, base.kappa),
        };
        let classical = critical_speed(&ModelParams::classical(kappa, base.law.clone())?)?;
        let seed_bank = critical_speed(&ModelParams::new(
            Variant::SeedBank,
            c,
            cp,
            kappa,
            base.law.clone(),
        )?)?;
        let spore = critical_speed(&ModelParams::new(
            Variant::Spore,
            c,
            cp,
            kappa,
            base.law.clone(),
        )?)?;
        Ok(SweepRow {
            value,
            classical,
            seed_bank,
            spore,
        })
    });
    rows.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::OffspringLaw;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn unit(variant: Variant) -> ModelParams {
        ModelParams::unit(variant)
    }

    #[test]
    fn rejects_nonnegative_mu() {
        let p = unit(Variant::SeedBank);
        assert!(speed_function(0.0, &p).is_err());
        assert!(speed_function(0.5, &p).is_err());
        assert!(speed_function(f64::NAN, &p).is_err());
    }

    #[test]
    fn upper_branch_point_values() {
        let p = unit(Variant::SeedBank);
        assert_abs_diff_eq!(
            speed_function(-1.0, &p).unwrap().lambda_plus,
            1.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            speed_function(-0.6, &p).unwrap().lambda_plus,
            1.25179514359584,
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(
            speed_function(-3.0, &p).unwrap().lambda_plus,
            1.55872499255997,
            epsilon = 1e-13
        );
    }

    #[test]
    fn eigen_matrix_is_singular_on_the_branch() {
        let p = unit(Variant::SeedBank);
        let m = eigen_matrix(-1.0, 1.0, &p);
        assert_eq!(m, [[-0.5, 1.0], [1.0, -2.0]]);
        assert_abs_diff_eq!(determinant_poly(-1.0, 1.0, &p), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn critical_speeds_of_unit_models() {
        let sb = critical_speed(&unit(Variant::SeedBank)).unwrap();
        assert_abs_diff_eq!(sb.mu_star, -1.1910292686889965, epsilon = 1e-12);
        assert_abs_diff_eq!(sb.lambda_star, 0.9824162322341456, epsilon = 1e-12);
        assert!(sb.det_residual < 1e-12);
        assert!(sb.eigvec.0 > 1.0 && sb.eigvec.1 == 1.0);

        let sp = critical_speed(&unit(Variant::Spore)).unwrap();
        assert_abs_diff_eq!(sp.mu_star, -SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(sp.lambda_star, FRAC_1_SQRT_2, epsilon = 1e-12);

        let cl = critical_speed(&unit(Variant::Classical)).unwrap();
        assert_abs_diff_eq!(cl.mu_star, -SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(cl.lambda_star, SQRT_2, epsilon = 1e-13);
        assert_eq!(cl.eigvec, (1.0, 0.0));
    }

    #[test]
    fn perron_vector_point_values() {
        let p = unit(Variant::SeedBank);
        let (d1, d2) = perron_eigenvector(-1.0, &p).unwrap();
        assert_abs_diff_eq!(d1, 2.0, epsilon = 1e-14);
        assert_eq!(d2, 1.0);
        assert_abs_diff_eq!(
            perron_eigenvector(-0.6, &p).unwrap().0,
            1.7510770861575,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            perron_eigenvector(-3.0, &p).unwrap().0,
            5.67617497767991,
            epsilon = 1e-11
        );
    }

    #[test]
    fn eigenvector_kills_both_rows() {
        for variant in [Variant::SeedBank, Variant::Spore] {
            let p = unit(variant);
            for mu in [-0.3, -1.0, -2.5] {
                let eval = speed_function(mu, &p).unwrap();
                let m = eigen_matrix(mu, eval.lambda_plus, &p);
                let (d1, d2) = perron_eigenvector(mu, &p).unwrap();
                assert!(d1 > 0.0);
                assert!((m[0][0] * d1 + m[0][1] * d2).abs() < 1e-12);
                assert!((m[1][0] * d1 + m[1][1] * d2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn diagonal_entries_negative_on_upper_branch() {
        for variant in [Variant::SeedBank, Variant::Spore] {
            let p = unit(variant);
            for mu in [-0.2, -1.0, -4.0] {
                let (fa, fd) = diagonal_entries(mu, &p).unwrap();
                assert!(fa < 0.0 && fd < 0.0, "{variant}: fa = {fa}, fd = {fd}");
            }
        }
        assert!(diagonal_entries(-1.0, &unit(Variant::Classical)).is_err());
    }

    #[test]
    fn closed_form_matches_eigensolve() {
        for variant in Variant::ALL {
            let p = unit(variant);
            for i in 0..40 {
                let mu = -0.05 * 1.2f64.powi(i);
                let a = speed_function(mu, &p).unwrap();
                let b = speed_function_via_eigensolve(mu, &p).unwrap();
                assert!(
                    (a.lambda_plus - b.lambda_plus).abs() <= 1e-10 * (1.0 + a.lambda_plus.abs()),
                    "{variant} at mu = {mu}: {} vs {}",
                    a.lambda_plus,
                    b.lambda_plus
                );
                if variant != Variant::Classical {
                    assert!(
                        (a.lambda_minus - b.lambda_minus).abs()
                            <= 1e-10 * (1.0 + a.lambda_minus.abs())
                    );
                }
            }
        }
    }

    #[test]
    fn scan_doubling_is_stable() {
        for variant in Variant::ALL {
            let p = unit(variant);
            let coarse = critical_speed_scanned(&p, SCAN_POINTS).unwrap();
            let fine = critical_speed_scanned(&p, 2 * SCAN_POINTS).unwrap();
            assert!((coarse.lambda_star - fine.lambda_star).abs() < 1e-8);
        }
    }

    #[test]
    fn local_minimum_certificate_holds() {
        let p = unit(Variant::SeedBank);
        let crit = critical_speed(&p).unwrap();
        for probe in [crit.mu_star - 1e-4, crit.mu_star + 1e-4] {
            let e = speed_function(probe, &p).unwrap();
            assert!(e.lambda_plus >= crit.lambda_star - 1e-12);
        }
    }

    #[test]
    fn rare_switching_approaches_classical() {
        let p =
            ModelParams::new(Variant::SeedBank, 1e-3, 1e-3, 1.0, OffspringLaw::binary()).unwrap();
        let crit = critical_speed(&p).unwrap();
        assert!((crit.lambda_star - SQRT_2).abs() < 0.02);
    }

    #[test]
    fn seedbank_speed_collapses_when_dormancy_drains_growth() {
        // With wake-ups nearly absent the front spreads only if branching
        // outruns the loss to dormancy: s = 1.5 vs c = 1 still moves at
        // about sqrt(2 * (s - c)), while s = 0.5 all but stalls.
        let law = OffspringLaw::binary();
        let moving = ModelParams::new(Variant::SeedBank, 1.0, 1e-4, 1.5, law.clone()).unwrap();
        assert_abs_diff_eq!(
            critical_speed(&moving).unwrap().lambda_star,
            1.00009996003,
            epsilon = 1e-10
        );
        let stalled = ModelParams::new(Variant::SeedBank, 1.0, 1e-4, 0.5, law).unwrap();
        assert_abs_diff_eq!(
            critical_speed(&stalled).unwrap().lambda_star,
            0.000332791012511,
            epsilon = 1e-12
        );
    }

    #[test]
    fn minimum_outside_scan_window_reports_solver_error() {
        let p = ModelParams::classical(3000.0, OffspringLaw::binary()).unwrap();
        match critical_speed(&p) {
            Err(Error::Solver { scanned, .. }) => assert_eq!(scanned, SCAN_POINTS),
            other => panic!("expected a solver error, got {other:?}"),
        }
    }

    #[test]
    fn sweep_rows_keep_the_variant_ordering() {
        let base = unit(Variant::SeedBank);
        let rows = sweep_critical(SweepAxis::S, &[0.5, 1.0, 2.0], &base).unwrap();
        assert_eq!(rows.len(), 3);
        for row in &rows {
            assert_abs_diff_eq!(
                row.classical.lambda_star,
                (2.0 * row.value).sqrt(),
                epsilon = 1e-10
            );
            assert!(row.classical.lambda_star > row.seed_bank.lambda_star);
            assert!(row.seed_bank.lambda_star > row.spore.lambda_star);
        }
    }

    #[test]
    fn sweep_axis_round_trip() {
        for axis in SweepAxis::ALL {
            assert_eq!(axis.name().parse::<SweepAxis>().unwrap(), axis);
        }
        assert!("q".parse::<SweepAxis>().is_err());
    }
}
