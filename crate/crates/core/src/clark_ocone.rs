//! Clark-Ocone hedging: Y(t) = E[D_tF | F_t] in closed form for three
//! terminal functionals of Brownian motion, and the replication identity
//! F ≈ E F + Σ_j Y(t_j)(ω(t_{j+1}) - ω(t_j)).
//!
//! The gains process is accumulated by summation by parts, so a constant
//! strategy telescopes bit for bit: Y ≡ 1 replicates ω(1) with residual
//! exactly zero on every path.

use crate::cm::abel_increment_sum;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::kernels::{KernelSpec, PathSample, PathSampler};
use crate::parallel::map_replicates;
use crate::quadrature::GaussHermite;
use crate::stats::{mean, mean_and_se, normal_cdf, normal_sf, rms};
use crate::stream::RandomStream;

/// A terminal-time-1 payoff functional of the driving Brownian path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PayoffSpec {
    /// (ω(1) - K)⁺. Any finite strike; K ≪ 0 is deep in the money.
    CallOnBM { strike: f64 },
    /// max_j ω(t_j) - ω(1), the floating lookback on node values.
    LookbackFloating,
    /// (X₁ - K)⁺ with X_t = exp(ω(t) - t/2); requires K ≥ 0.
    CallOnGBM { strike: f64 },
}

impl PayoffSpec {
    pub fn name(&self) -> &'static str {
        match self {
            PayoffSpec::CallOnBM { .. } => "call-on-bm",
            PayoffSpec::LookbackFloating => "lookback",
            PayoffSpec::CallOnGBM { .. } => "call-on-gbm",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PayoffSpec::CallOnBM { strike } => {
                if !strike.is_finite() {
                    return Err(Error::invalid("strike", format!("must be finite, got {strike}")));
                }
            }
            PayoffSpec::LookbackFloating => {}
            PayoffSpec::CallOnGBM { strike } => {
                if !(strike.is_finite() && strike >= 0.0) {
                    return Err(Error::invalid(
                        "strike",
                        format!("must be finite and ≥ 0 for the geometric call, got {strike}"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Realized payoff on one path.
    pub fn evaluate(&self, path: &PathSample) -> f64 {
        match *self {
            PayoffSpec::CallOnBM { strike } => (path.terminal() - strike).max(0.0),
            PayoffSpec::LookbackFloating => path.max_value() - path.terminal(),
            PayoffSpec::CallOnGBM { strike } => {
                ((path.terminal() - 0.5).exp() - strike).max(0.0)
            }
        }
    }
}

/// E F under the Wiener measure, on the given grid.
///
/// The lookback expectation is for the node-value maximum, so it depends on
/// the grid: E max_j ω(t_j) = (2πn)^{-1/2} Σ_{k=1}^n k^{-1/2} (Spitzer).
pub fn expected_payoff(payoff: &PayoffSpec, grid: TimeGrid) -> Result<f64> {
    payoff.validate()?;
    Ok(match *payoff {
        PayoffSpec::CallOnBM { strike } => {
            crate::stats::normal_pdf(strike) - strike * normal_sf(strike)
        }
        PayoffSpec::LookbackFloating => {
            let n = grid.cells();
            let sum: f64 = (1..=n).map(|k| 1.0 / (k as f64).sqrt()).sum();
            sum / (std::f64::consts::TAU * n as f64).sqrt()
        }
        PayoffSpec::CallOnGBM { strike } => {
            if strike == 0.0 {
                1.0
            } else {
                normal_cdf(-strike.ln() + 0.5) - strike * normal_cdf(-strike.ln() - 0.5)
            }
        }
    })
}

/// Quadrature value of E[dphi(x + √(1-t)·Z)], Z standard normal; at t = 1
/// the conditioning is trivial and dphi(x) is returned directly.
pub fn conditional_terminal_derivative(
    dphi: impl Fn(f64) -> f64,
    t: f64,
    x: f64,
    rule: &GaussHermite,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid("t", format!("must lie in [0, 1], got {t}")));
    }
    if !x.is_finite() {
        return Err(Error::invalid("x", format!("must be finite, got {x}")));
    }
    if t == 1.0 {
        return Ok(dphi(x));
    }
    let s = (1.0 - t).sqrt();
    Ok(rule.integrate(|z| dphi(x + s * z)))
}

/// Y(t) given the current value x and running maximum m (used by the
/// lookback only). At t = 1 the degenerate formulas are replaced by their
/// t → 1 limits.
fn strategy_value(payoff: &PayoffSpec, t: f64, x: f64, running_max: f64) -> f64 {
    let tau = 1.0 - t;
    match *payoff {
        PayoffSpec::CallOnBM { strike } => {
            if tau == 0.0 {
                if x > strike {
                    1.0
                } else if x < strike {
                    0.0
                } else {
                    0.5
                }
            } else {
                normal_sf((strike - x) / tau.sqrt())
            }
        }
        PayoffSpec::LookbackFloating => {
            // Y_M(t) = 2(1 - Φ((M-x)/√τ)) hedges the max; the -ω(1) leg is -1.
            if running_max == x {
                0.0
            } else if tau == 0.0 {
                -1.0
            } else {
                2.0 * normal_sf((running_max - x) / tau.sqrt()) - 1.0
            }
        }
        PayoffSpec::CallOnGBM { strike } => {
            let xt = (x - 0.5 * t).exp();
            if strike == 0.0 {
                xt
            } else if tau == 0.0 {
                if xt > strike {
                    xt
                } else if xt < strike {
                    0.0
                } else {
                    0.5 * xt
                }
            } else {
                let d1 = ((xt / strike).ln() + 0.5 * tau) / tau.sqrt();
                xt * normal_cdf(d1)
            }
        }
    }
}

/// One hedged path: the strategy table, the gains sum, and the residual.
#[derive(Clone, Debug)]
pub struct HedgeResult {
    grid: TimeGrid,
    y: Vec<f64>,
    ef: f64,
    payoff: f64,
    replication: f64,
    residual: f64,
}

impl HedgeResult {
    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    /// Y(t_j) per node; the terminal entry is the t → 1 limit and does not
    /// enter the gains sum.
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn ef(&self) -> f64 {
        self.ef
    }

    pub fn payoff(&self) -> f64 {
        self.payoff
    }

    /// EF + Σ_j Y(t_j)·Δω_j.
    pub fn replication(&self) -> f64 {
        self.replication
    }

    /// replication - payoff.
    pub fn residual(&self) -> f64 {
        self.residual
    }
}

fn hedge_core(payoff: &PayoffSpec, path: &PathSample, ef: f64) -> (Vec<f64>, f64, f64, f64) {
    let grid = path.grid();
    let w = path.values();
    let running = path.running_max();
    let y: Vec<f64> = (0..grid.len())
        .map(|j| strategy_value(payoff, grid.node(j), w[j], running[j]))
        .collect();
    let replication = ef + abel_increment_sum(&y[..grid.cells()], w);
    let realized = payoff.evaluate(path);
    let residual = replication - realized;
    (y, realized, replication, residual)
}

/// Hedge one path with the closed-form strategy.
pub fn hedge_strategy(payoff: &PayoffSpec, path: &PathSample) -> Result<HedgeResult> {
    let ef = expected_payoff(payoff, path.grid())?;
    let (y, realized, replication, residual) = hedge_core(payoff, path, ef);
    Ok(HedgeResult { grid: path.grid(), y, ef, payoff: realized, replication, residual })
}

/// Residual statistics over a batch of independently hedged paths.
#[derive(Clone, Debug)]
pub struct ReplicationSummary {
    grid: TimeGrid,
    ef: f64,
    payoffs: Vec<f64>,
    replications: Vec<f64>,
    residuals: Vec<f64>,
    mean_payoff: f64,
    mean_residual: f64,
    residual_se: f64,
    rms_residual: f64,
}

impl ReplicationSummary {
    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn ef(&self) -> f64 {
        self.ef
    }

    pub fn count(&self) -> usize {
        self.payoffs.len()
    }

    pub fn payoffs(&self) -> &[f64] {
        &self.payoffs
    }

    pub fn replications(&self) -> &[f64] {
        &self.replications
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn mean_payoff(&self) -> f64 {
        self.mean_payoff
    }

    pub fn mean_residual(&self) -> f64 {
        self.mean_residual
    }

    pub fn residual_se(&self) -> f64 {
        self.residual_se
    }

    pub fn rms_residual(&self) -> f64 {
        self.rms_residual
    }
}

/// Hedge `count` fresh Brownian paths and report residual statistics.
pub fn replicate(
    payoff: &PayoffSpec,
    grid: TimeGrid,
    count: usize,
    stream: &RandomStream,
) -> Result<ReplicationSummary> {
    if count == 0 {
        return Err(Error::invalid("count", "at least one path is required"));
    }
    let ef = expected_payoff(payoff, grid)?;
    let sampler = PathSampler::new(KernelSpec::BrownianMotion, grid)?;
    let rows: Vec<(f64, f64, f64)> = map_replicates(count, |r| {
        let path = sampler.sample(stream.replicate(r as u64)).expect("sampler draw");
        let (_, realized, replication, residual) = hedge_core(payoff, &path, ef);
        (realized, replication, residual)
    });
    let payoffs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let replications: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let residuals: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let (mean_residual, residual_se) = mean_and_se(&residuals);
    Ok(ReplicationSummary {
        grid,
        ef,
        mean_payoff: mean(&payoffs),
        mean_residual,
        residual_se,
        rms_residual: rms(&residuals),
        payoffs,
        replications,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::default_rule;
    use crate::stats::proportion_se;
    use crate::stream::standard_normals;

    fn grid(m: u32) -> TimeGrid {
        TimeGrid::new(m).unwrap()
    }

    #[test]
    fn strikes_are_validated() {
        assert!(PayoffSpec::CallOnBM { strike: -10.0 }.validate().is_ok());
        assert!(PayoffSpec::CallOnBM { strike: f64::NAN }.validate().is_err());
        assert!(PayoffSpec::CallOnGBM { strike: 0.0 }.validate().is_ok());
        assert!(PayoffSpec::CallOnGBM { strike: -0.5 }.validate().is_err());
        assert!(PayoffSpec::CallOnGBM { strike: f64::INFINITY }.validate().is_err());
        assert!(expected_payoff(&PayoffSpec::CallOnGBM { strike: -1.0 }, grid(4)).is_err());
    }

    #[test]
    fn conditional_derivative_handles_constants_and_polynomials() {
        let rule = default_rule();
        let one = conditional_terminal_derivative(|_| 1.0, 0.3, 0.7, rule).unwrap();
        assert!((one - 1.0).abs() < 1e-14);
        assert_eq!(conditional_terminal_derivative(|_| 0.0, 0.3, 0.7, rule).unwrap(), 0.0);
        // E[(x + sZ)²] = x² + (1-t), exact for a degree-2 integrand.
        let sq = conditional_terminal_derivative(|u| u * u, 0.36, -0.5, rule).unwrap();
        assert!((sq - (0.25 + 0.64)).abs() < 1e-12);
    }

    #[test]
    fn conditional_derivative_indicator_matches_gaussian_tail() {
        let rule = default_rule();
        // Threshold at the conditional mean: the quadrature is symmetric.
        let k = 0.5;
        let v = conditional_terminal_derivative(|u| f64::from(u8::from(u > k)), 0.84, k, rule)
            .unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        // One conditional standard deviation away: slow (non-smooth) but close.
        let v = conditional_terminal_derivative(|u| f64::from(u8::from(u > k)), 0.84, k - 0.4, rule)
            .unwrap();
        assert!((v - normal_sf(1.0)).abs() < 2e-3);
        // t = 1 evaluates the integrand directly.
        let v = conditional_terminal_derivative(|u| f64::from(u8::from(u > k)), 1.0, 0.9, rule)
            .unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn conditional_derivative_rejects_bad_arguments() {
        let rule = default_rule();
        assert!(conditional_terminal_derivative(|u| u, -0.1, 0.0, rule).is_err());
        assert!(conditional_terminal_derivative(|u| u, 1.5, 0.0, rule).is_err());
        assert!(conditional_terminal_derivative(|u| u, f64::NAN, 0.0, rule).is_err());
        assert!(conditional_terminal_derivative(|u| u, 0.5, f64::NAN, rule).is_err());
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn expected_payoff_matches_frozen_oracles() {
        let g = grid(6);
        for (k, want) in [
            (0.0, 0.39894228040143268),
            (0.5, 0.19779655740130603),
            (1.0, 0.083315470587686298),
        ] {
            let got = expected_payoff(&PayoffSpec::CallOnBM { strike: k }, g).unwrap();
            assert!((got - want).abs() < 1e-13, "call K={k}: {got}");
        }
        for (k, want) in [
            (0.8, 0.45244801860546516),
            (1.0, 0.38292492254802621),
            (1.2, 0.32761418063896989),
        ] {
            let got = expected_payoff(&PayoffSpec::CallOnGBM { strike: k }, g).unwrap();
            assert!((got - want).abs() < 1e-13, "geometric call K={k}: {got}");
        }
        for (m, want) in [
            (5, 0.70111220165194195),
            (6, 0.72817259443730703),
            (7, 0.74794711439203393),
            (8, 0.76225116893265709),
        ] {
            let got = expected_payoff(&PayoffSpec::LookbackFloating, grid(m)).unwrap();
            assert!((got - want).abs() < 1e-13, "lookback m={m}: {got}");
        }
    }

    #[test]
    fn deep_itm_call_telescopes_exactly() {
        // |ω| ≤ 0.8 keeps every tail argument below -8, so Y rounds to 1.0
        // at every node and the gains sum telescopes to ω(1) bit for bit.
        let g = grid(4);
        let values: Vec<f64> = (0..g.len()).map(|j| 0.8 * (1.7 * j as f64).sin()).collect();
        let path = PathSample::new(g, values).unwrap();
        let hedge = hedge_strategy(&PayoffSpec::CallOnBM { strike: -10.0 }, &path).unwrap();
        assert!(hedge.y().iter().all(|&y| y == 1.0));
        assert_eq!(hedge.residual(), 0.0);
        assert_eq!(hedge.replication(), hedge.payoff());
    }

    #[test]
    fn hedge_reports_the_replication_identity() {
        let g = grid(5);
        let sampler = PathSampler::new(KernelSpec::BrownianMotion, g).unwrap();
        let path = sampler.sample(RandomStream::new(71, 0)).unwrap();
        let payoff = PayoffSpec::CallOnBM { strike: 0.25 };
        let hedge = hedge_strategy(&payoff, &path).unwrap();
        assert_eq!(hedge.y().len(), g.len());
        let gains = abel_increment_sum(&hedge.y()[..g.cells()], path.values());
        assert_eq!(hedge.replication(), hedge.ef() + gains);
        assert_eq!(hedge.residual(), hedge.replication() - payoff.evaluate(&path));
    }

    #[test]
    fn call_strategy_matches_nested_monte_carlo() {
        // Y(t,x) = E[1_{ω(1)>K} | ω(t)=x]; brute-force the conditional law.
        let k = 0.5;
        let probes = [(0.25, 0.3), (0.5, -0.4), (0.75, 1.2), (0.1, 0.0), (0.9, 0.5)];
        for (i, &(t, x)) in probes.iter().enumerate() {
            let s = (1.0f64 - t).sqrt();
            let draws =
                standard_normals(RandomStream::new(400 + i as u64, 0), 40_000).unwrap();
            let hits = draws.iter().filter(|&&z| x + s * z > k).count();
            let p_hat = hits as f64 / draws.len() as f64;
            let se = proportion_se(p_hat, draws.len());
            let y = strategy_value(&PayoffSpec::CallOnBM { strike: k }, t, x, x);
            assert!(
                (y - p_hat).abs() <= 4.0 * se,
                "probe ({t},{x}): y={y} p_hat={p_hat} se={se}"
            );
        }
    }

    #[test]
    fn lookback_strategy_matches_continuation_monte_carlo() {
        // Y_M(t) = P(sup_{[t,1]} ω > M | ω(t)=x): draw the terminal value and
        // average the exact bridge exceedance exp(-2(M-x)(M-y)/τ).
        let probes = [
            (0.5, 0.2, 0.6),
            (0.25, -0.1, 0.3),
            (0.75, 0.4, 0.9),
            (0.1, 0.0, 0.5),
            (0.9, -0.3, 0.2),
        ];
        for (i, &(t, x, m)) in probes.iter().enumerate() {
            let tau: f64 = 1.0 - t;
            let draws =
                standard_normals(RandomStream::new(500 + i as u64, 0), 40_000).unwrap();
            let samples: Vec<f64> = draws
                .iter()
                .map(|&z| {
                    let y_end = x + tau.sqrt() * z;
                    if y_end >= m {
                        1.0
                    } else {
                        (-2.0 * (m - x) * (m - y_end) / tau).exp()
                    }
                })
                .collect();
            let (p_hat, se) = mean_and_se(&samples);
            let y_m = 1.0 + strategy_value(&PayoffSpec::LookbackFloating, t, x, m);
            assert!(
                (y_m - p_hat).abs() <= 4.0 * se,
                "probe ({t},{x},{m}): y_m={y_m} p_hat={p_hat} se={se}"
            );
        }
        // At the running maximum the exceedance is certain: Y_M = 1, Y = 0.
        assert_eq!(strategy_value(&PayoffSpec::LookbackFloating, 0.5, 0.2, 0.2), 0.0);
    }

    #[test]
    fn geometric_call_strategy_matches_derivative_monte_carlo() {
        // Y(t,x) = E[φ'(ω(1)) | ω(t)=x] with φ'(u) = e^{u-1/2} 1_{e^{u-1/2}>K}.
        let probes = [(0.5, 0.2, 1.0), (0.25, -0.3, 0.8), (0.75, 0.6, 1.2)];
        for (i, &(t, x, k)) in probes.iter().enumerate() {
            let s = (1.0f64 - t).sqrt();
            let draws =
                standard_normals(RandomStream::new(600 + i as u64, 0), 60_000).unwrap();
            let samples: Vec<f64> = draws
                .iter()
                .map(|&z| {
                    let xt = (x + s * z - 0.5).exp();
                    if xt > k {
                        xt
                    } else {
                        0.0
                    }
                })
                .collect();
            let (d_hat, se) = mean_and_se(&samples);
            let y = strategy_value(&PayoffSpec::CallOnGBM { strike: k }, t, x, x);
            assert!(
                (y - d_hat).abs() <= 4.0 * se,
                "probe ({t},{x},{k}): y={y} d_hat={d_hat} se={se}"
            );
        }
        // K = 0 degenerates to Y = X(t) with no tail factor.
        let y = strategy_value(&PayoffSpec::CallOnGBM { strike: 0.0 }, 0.36, 0.4, 0.4);
        assert_eq!(y, (0.4f64 - 0.18).exp());
    }

    #[test]
    fn strategy_is_adapted_to_the_past() {
        let g = grid(5);
        let sampler = PathSampler::new(KernelSpec::BrownianMotion, g).unwrap();
        let base = sampler.sample(RandomStream::new(72, 0)).unwrap();
        let cut = 16;
        let mut tail_swapped = base.values().to_vec();
        for (j, v) in tail_swapped.iter_mut().enumerate().skip(cut + 1) {
            *v = base.value(cut) + 0.3 * (j - cut) as f64 * g.dt();
        }
        let swapped = PathSample::new(g, tail_swapped).unwrap();
        for payoff in [
            PayoffSpec::CallOnBM { strike: 0.4 },
            PayoffSpec::LookbackFloating,
            PayoffSpec::CallOnGBM { strike: 1.0 },
        ] {
            let a = hedge_strategy(&payoff, &base).unwrap();
            let b = hedge_strategy(&payoff, &swapped).unwrap();
            for j in 0..=cut {
                assert_eq!(a.y()[j], b.y()[j], "{} node {j}", payoff.name());
            }
        }
    }

    #[test]
    fn replication_residuals_are_centered() {
        let stream = RandomStream::new(73, 0);
        for payoff in [
            PayoffSpec::CallOnBM { strike: 0.0 },
            PayoffSpec::LookbackFloating,
            PayoffSpec::CallOnGBM { strike: 1.0 },
        ] {
            let summary = replicate(&payoff, grid(6), 2_500, &stream).unwrap();
            assert!(
                summary.mean_residual().abs() <= 4.0 * summary.residual_se(),
                "{}: mean={} se={}",
                payoff.name(),
                summary.mean_residual(),
                summary.residual_se()
            );
            let (payoff_mean, payoff_se) = mean_and_se(summary.payoffs());
            assert!(
                (payoff_mean - summary.ef()).abs() <= 4.0 * payoff_se,
                "{}: payoff mean {} vs EF {}",
                payoff.name(),
                payoff_mean,
                summary.ef()
            );
        }
    }

    #[test]
    fn rms_residual_shrinks_between_levels() {
        // The residual is the left-Riemann error of the martingale s ↦ Y_s,
        // so its L² norm scales like √dt: halving dt twice shrinks the RMS
        // by a factor approaching 2.
        let stream = RandomStream::new(74, 0);
        let payoff = PayoffSpec::CallOnBM { strike: 0.0 };
        let rms: Vec<f64> = (5..=8)
            .map(|m| replicate(&payoff, grid(m), 4_000, &stream).unwrap().rms_residual())
            .collect();
        for pair in rms.windows(2) {
            assert!(pair[1] < pair[0], "rms not decreasing: {rms:?}");
        }
        let ratio = rms[1] / rms[3];
        assert!((1.2..=2.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn replicate_validates_count() {
        let err = replicate(&PayoffSpec::LookbackFloating, grid(4), 0, &RandomStream::new(1, 0));
        assert!(err.is_err());
    }
}
