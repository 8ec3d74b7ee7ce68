//! The Ornstein-Uhlenbeck semigroup T_t in two computable forms: the Mehler
//! integral T_tφ(x) = ∫ φ(e^{-t}x + √(1-e^{-2t})y) μ(dy) by tensor
//! Gauss-Hermite quadrature, and the exact eigen-decomposition
//! T_tF = Σ e^{-tn} J_nF on chaos expansions. The number operator N = δD,
//! the Poincaré/decay/commutation identities, and the logarithmic Sobolev
//! inequality are exposed as signed gap functionals (nonnegative when the
//! inequality holds).
//!
//! Sign convention: in coordinates the generator acts as x·∇ - Δ, which has
//! the nonnegative eigenvalues |α| on Hermite products.

use crate::chaos::{chaos_derivative, project_degree, ChaosExpansion, MultiIndex};
use crate::error::{Error, Result};
use crate::malliavin::{chaos_phi, Phi};
use crate::quadrature::GaussHermite;
use crate::stream::RandomStream;
use rand::Rng;

/// Tensor quadrature cost grows as order^dim; higher-dimensional checks go
/// through the chaos form, which is exact.
pub const MEHLER_MAX_DIM: usize = 4;

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::invalid("t", format!("must be a nonnegative time, got {t}")));
    }
    Ok(())
}

/// Mehler form of T_tφ at x, over the active coordinates of φ. t = ∞ is
/// admitted and gives the plain Gaussian mean.
pub fn mehler_apply(phi: &Phi, t: f64, coords: &[f64], rule: &GaussHermite) -> Result<f64> {
    check_time(t)?;
    if phi.dim() > MEHLER_MAX_DIM {
        return Err(Error::DimensionLimit { limit: MEHLER_MAX_DIM, got: phi.dim() });
    }
    if coords.len() != phi.dim() {
        return Err(Error::invalid(
            "coords",
            format!("expected {} coordinates, got {}", phi.dim(), coords.len()),
        ));
    }
    if coords.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("coords", "coordinates must be finite"));
    }
    if phi.dim() == 0 {
        return phi.value(&[]);
    }
    let damp = (-t).exp();
    let spread = (-(-2.0 * t).exp_m1()).sqrt();
    let dim = phi.dim();
    rule.integrate_tensor(dim, |y| {
        let mut z = [0.0f64; MEHLER_MAX_DIM];
        for i in 0..dim {
            z[i] = damp * coords[i] + spread * y[i];
        }
        phi.value(&z[..dim]).expect("dimension checked above")
    })
}

/// Eigen form of the semigroup: the coefficient at α is scaled by e^{-t|α|}.
/// t = ∞ projects to the mean J₀F exactly, avoiding exponent underflow.
pub fn chaos_semigroup_apply(f: &ChaosExpansion, t: f64) -> Result<ChaosExpansion> {
    check_time(t)?;
    if t == f64::INFINITY {
        return Ok(project_degree(f, 0));
    }
    let mut out = ChaosExpansion::new(f.max_degree());
    for (index, coeff) in f.terms() {
        out.add_term(index.clone(), coeff * (-t * f64::from(index.degree())).exp())?;
    }
    Ok(out)
}

/// N F = Σ |α|·c_α F_α, the number operator δD.
pub fn number_operator(f: &ChaosExpansion) -> ChaosExpansion {
    let mut out = ChaosExpansion::new(f.max_degree());
    for (index, coeff) in f.terms() {
        out.add_term(index.clone(), coeff * f64::from(index.degree()))
            .expect("degree unchanged");
    }
    out
}

/// Dirichlet energy ‖DF‖² = ⟨NF, F⟩ = Σ |α| c_α².
pub fn dirichlet_energy(f: &ChaosExpansion) -> f64 {
    f.terms().map(|(index, coeff)| f64::from(index.degree()) * coeff * coeff).sum()
}

/// Variance ‖F - J₀F‖² = Σ_{|α|≥1} c_α².
pub fn centered_norm_sq(f: &ChaosExpansion) -> f64 {
    f.terms().filter(|(index, _)| !index.is_empty()).map(|(_, c)| c * c).sum()
}

/// Poincaré slack ‖DF‖² - ‖F - J₀F‖² = Σ (|α|-1) c_α² ≥ 0, zero exactly on
/// the first chaos.
pub fn poincare_gap(f: &ChaosExpansion) -> f64 {
    dirichlet_energy(f) - centered_norm_sq(f)
}

/// Exponential-decay slack e^{-t}‖F - J₀F‖ - ‖T_tF - J₀F‖ ≥ 0.
pub fn decay_gap(f: &ChaosExpansion, t: f64) -> Result<f64> {
    check_time(t)?;
    let centered = centered_norm_sq(f).sqrt();
    if t == f64::INFINITY {
        return Ok(if centered == 0.0 { 0.0 } else { f64::INFINITY });
    }
    let decayed: f64 = f
        .terms()
        .filter(|(index, _)| !index.is_empty())
        .map(|(index, c)| {
            let d = (-t * f64::from(index.degree())).exp() * c;
            d * d
        })
        .sum();
    Ok((-t).exp() * centered - decayed.sqrt())
}

/// Largest coefficient discrepancy between D T_tF and e^{-t} T_t DF, where
/// T_t acts degree-wise on the H-valued expansion.
pub fn commutation_gap(f: &ChaosExpansion, t: f64) -> Result<f64> {
    check_time(t)?;
    let lhs = chaos_derivative(&chaos_semigroup_apply(f, t)?);
    let df = chaos_derivative(f);
    let damp = (-t).exp();
    let mut gap = 0.0f64;
    for (index, direction, coeff) in df.terms() {
        let expected = damp * (-t * f64::from(index.degree())).exp() * coeff;
        gap = gap.max((lhs.coefficient(index, direction) - expected).abs());
    }
    for (index, direction, coeff) in lhs.terms() {
        let expected = damp * (-t * f64::from(index.degree())).exp() * df.coefficient(index, direction);
        gap = gap.max((coeff - expected).abs());
    }
    Ok(gap)
}

/// Largest coefficient discrepancy between T_t∘T_s and T_{s+t}.
pub fn semigroup_law_gap(f: &ChaosExpansion, s: f64, t: f64) -> Result<f64> {
    let composed = chaos_semigroup_apply(&chaos_semigroup_apply(f, s)?, t)?;
    let direct = chaos_semigroup_apply(f, s + t)?;
    let mut gap = 0.0f64;
    for (index, coeff) in composed.terms() {
        gap = gap.max((coeff - direct.coefficient(index)).abs());
    }
    for (index, coeff) in direct.terms() {
        gap = gap.max((coeff - composed.coefficient(index)).abs());
    }
    Ok(gap)
}

/// |Mehler quadrature - exact chaos semigroup| for F evaluated at the given
/// coordinates (one per basis index up to the largest active one).
pub fn mehler_chaos_gap(
    f: &ChaosExpansion,
    t: f64,
    coords: &[f64],
    rule: &GaussHermite,
) -> Result<f64> {
    let quadrature = mehler_apply(&chaos_phi(f), t, coords, rule)?;
    let exact = chaos_semigroup_apply(f, t)?.eval(coords)?;
    Ok(quadrature - exact)
}

/// Log-Sobolev slack ‖F‖²ln‖F‖ + ‖DF‖² - ∫F²ln|F| dμ ≥ 0, with every
/// integral computed by tensor Gauss-Hermite quadrature over the active
/// coordinates. Requires a gradient evaluator; zero exactly (up to
/// quadrature) for F = e^{λx₁}.
pub fn lsi_gap(phi: &Phi, rule: &GaussHermite) -> Result<f64> {
    if phi.dim() > MEHLER_MAX_DIM {
        return Err(Error::DimensionLimit { limit: MEHLER_MAX_DIM, got: phi.dim() });
    }
    if phi.dim() == 0 {
        return Err(Error::invalid("phi", "at least one active coordinate is required"));
    }
    let dim = phi.dim();
    phi.gradient(&vec![0.0; dim])?;
    let norm_sq = rule.integrate_tensor(dim, |x| {
        let v = phi.value(x).expect("dimension checked above");
        v * v
    })?;
    if !norm_sq.is_finite() || norm_sq <= 0.0 {
        return Err(Error::invalid("phi", "the L² norm must be positive"));
    }
    let entropy = rule.integrate_tensor(dim, |x| {
        let v = phi.value(x).expect("dimension checked above");
        if v == 0.0 {
            0.0
        } else {
            v * v * v.abs().ln()
        }
    })?;
    let energy = rule.integrate_tensor(dim, |x| {
        let g = phi.gradient(x).expect("dimension checked above");
        g.iter().map(|gi| gi * gi).sum()
    })?;
    Ok(norm_sq * 0.5 * norm_sq.ln() + energy - entropy)
}

/// Deterministic pseudo-random chaos expansion for inequality suites: up to
/// `terms` products of Hermite factors on coordinates ≤ coord_cap with total
/// degree ≤ degree_cap and coefficients in ±[0.25, 1].
pub fn random_expansion(
    coord_cap: u32,
    degree_cap: u32,
    terms: usize,
    stream: &RandomStream,
) -> Result<ChaosExpansion> {
    if coord_cap == 0 {
        return Err(Error::invalid("coord_cap", "at least one coordinate is required"));
    }
    if degree_cap == 0 {
        return Err(Error::invalid("degree_cap", "the degree cap must be positive"));
    }
    if terms == 0 {
        return Err(Error::invalid("terms", "at least one term is required"));
    }
    let mut rng = stream.rng();
    let mut out = ChaosExpansion::new(degree_cap.max(crate::chaos::DEFAULT_MAX_DEGREE));
    let mut added = 0usize;
    for _ in 0..(20 * terms) {
        if added == terms {
            break;
        }
        let slots = if coord_cap == 1 { 1 } else { rng.random_range(1..=2u32) };
        let mut orders = std::collections::BTreeMap::new();
        for _ in 0..slots {
            let coord = rng.random_range(1..=coord_cap);
            let order = rng.random_range(1..=3u32.min(degree_cap));
            *orders.entry(coord).or_insert(0u32) += order;
        }
        if orders.values().sum::<u32>() > degree_cap {
            continue;
        }
        let pairs: Vec<(u32, u32)> = orders.into_iter().collect();
        let magnitude = 0.25 + 0.75 * rng.random::<f64>();
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        out.add_term(MultiIndex::new(&pairs)?, sign * magnitude)?;
        added += 1;
    }
    if out.is_empty() {
        return Err(Error::invalid("terms", "no admissible terms were generated"));
    }
    Ok(out)
}
