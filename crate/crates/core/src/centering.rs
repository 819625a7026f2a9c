//! Centering parameter for linear spectral statistics of spiked sample
//! covariance matrices.
//!
//! The value decomposes into two contour integrals in the companion-transform
//! variable m, the base Marčenko–Pastur functional, and point masses at the
//! distant-spike limits φ(a_i):
//!
//! ```text
//! F(f) = −(1/2πip) ∮ f(z(m)) · [M/(y m) − Σ n_i a_i² m/(1+a_i m)²] dm
//!        +(1/2πip) ∮ f′(z(m)) · Σ (1−a_i)n_i/((1+a_i m)(1+m)) · [1/m − y m/(1+m)²] dm
//!        + (1 − M/p)·G^y(f) + (1/p) Σ_{distant} n_i f(φ(a_i))
//! ```
//!
//! The contour is an axis-aligned ellipse around the prescribed real interval
//! of m-values; close-spike poles −1/a_i lie inside, the origin and
//! distant-spike poles stay outside. The periodic trapezoid rule converges
//! spectrally for these analytic integrands.
//!
//! Closed forms for f(x) = x and f(x) = log x serve as independent residue
//! oracles for the quadrature.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral_fn::SpectralFunction;
use crate::spike_model::{phi, SpikedModel};
use crate::stieltjes::{mp_integral, z_of_m};

/// Default relative margin of the contour's horizontal semi-axis over the
/// enclosed half-interval.
pub const DEFAULT_MARGIN: f64 = 0.5;
/// Relative tolerance for the contour quadrature's doubling convergence.
pub const CONTOUR_REL_TOL: f64 = 1e-10;
/// Starting node count for the contour quadrature.
pub const CONTOUR_MIN_NODES: usize = 64;
/// Node-count ceiling; non-convergence past this is a quadrature error.
pub const CONTOUR_MAX_NODES: usize = 1 << 16;

/// Traversal direction of a closed contour.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Counterclockwise,
    Clockwise,
}

/// Axis-aligned ellipse in the complex m-plane.
#[derive(Clone, Debug)]
pub struct Contour {
    center: f64,
    semi_x: f64,
    semi_y: f64,
    orientation: Orientation,
    /// Starting node count for the doubling quadrature (a power of two).
    min_nodes: usize,
}

impl Contour {
    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn min_nodes(&self) -> usize {
        self.min_nodes
    }

    pub fn semi_axes(&self) -> (f64, f64) {
        (self.semi_x, self.semi_y)
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Point at parameter θ ∈ [0, 2π) of the counterclockwise parametrization.
    pub fn point(&self, theta: f64) -> Complex64 {
        Complex64::new(
            self.center + self.semi_x * theta.cos(),
            self.semi_y * theta.sin(),
        )
    }

    /// Tangent dm/dθ of the counterclockwise parametrization.
    pub fn tangent(&self, theta: f64) -> Complex64 {
        Complex64::new(-self.semi_x * theta.sin(), self.semi_y * theta.cos())
    }

    /// Whether a real point lies strictly inside the ellipse.
    pub fn contains_real(&self, x: f64) -> bool {
        (x - self.center).abs() < self.semi_x
    }
}

/// Result of integrating the pair of contour integrands over one contour.
#[derive(Clone, Copy, Debug)]
pub struct ContourTerms {
    pub term1: f64,
    pub term2: f64,
    /// Nodes used by the converged quadrature.
    pub nodes: usize,
    /// Imaginary leakage plus last doubling delta; both should be tiny for
    /// these conjugate-symmetric integrands.
    pub est_error: f64,
}

/// Decomposition of the centering value F(f).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CenteringResult {
    pub term1: f64,
    pub term2: f64,
    pub base: f64,
    pub spike_sum: f64,
    pub total: f64,
    pub quadrature_nodes_used: usize,
    pub est_error: f64,
}

/// Build the integration contour for a model.
///
/// The enclosed real interval is [−1/(1−√y), −1/(1+√y)] for y < 1 and
/// [−1, −1/(1+√y)] for y ≥ 1, widened on the left so every close-spike pole
/// −1/a_i is enclosed (for y ≥ 1 a close spike with a < 1 has its pole left
/// of −1). The horizontal semi-axis is half·(1+margin), capped so the origin
/// and every distant-spike pole stay outside with a gap of at least 10% of
/// their distance to the enclosed interval. The vertical semi-axis is half
/// the horizontal one.
pub fn build_contour(model: &SpikedModel, margin: f64) -> Result<Contour> {
    if !margin.is_finite() || margin <= 0.0 {
        return Err(Error::Contour(format!("margin must be positive, got {margin}")));
    }
    let y = model.aspect_ratio();
    let sqrt_y = y.sqrt();
    let hi = -1.0 / (1.0 + sqrt_y);
    let mut lo = if y < 1.0 { -1.0 / (1.0 - sqrt_y) } else { -1.0 };

    let class = model.classify();
    for s in &class.close {
        lo = lo.min(-1.0 / s.value);
    }

    let mut excluded = vec![0.0];
    for s in &class.distant {
        excluded.push(-1.0 / s.value);
    }

    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut cap = f64::INFINITY;
    for &q in &excluded {
        let dist_to_interval = if q > hi {
            q - hi
        } else if q < lo {
            lo - q
        } else {
            return Err(Error::Contour(format!(
                "excluded pole {q} lies inside the required interval [{lo}, {hi}]"
            )));
        };
        cap = cap.min(half + 0.9 * dist_to_interval);
    }
    let semi_x = (half * (1.0 + margin)).min(cap);
    if semi_x <= half || !semi_x.is_finite() {
        return Err(Error::Contour(format!(
            "no ellipse over [{lo}, {hi}] clears the excluded poles {excluded:?}"
        )));
    }
    Ok(Contour {
        center,
        semi_x,
        semi_y: 0.5 * semi_x,
        orientation: Orientation::Counterclockwise,
        min_nodes: CONTOUR_MIN_NODES,
    })
}

/// Periodic trapezoid quadrature of a pair of contour integrands, doubling
/// the node count from [`CONTOUR_MIN_NODES`] until both values converge to
/// [`CONTOUR_REL_TOL`] relative. Clockwise contours negate the sums.
///
/// The callback receives the node m and must return the two integrand
/// values (without the tangent factor).
pub(crate) fn integrate_pair(
    contour: &Contour,
    mut eval: impl FnMut(Complex64) -> Result<(Complex64, Complex64)>,
) -> Result<(Complex64, Complex64, usize, f64)> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let sign = match contour.orientation {
        Orientation::Counterclockwise => 1.0,
        Orientation::Clockwise => -1.0,
    };

    let mut n = contour.min_nodes.max(2).next_power_of_two();
    let mut sum1 = Complex64::ZERO;
    let mut sum2 = Complex64::ZERO;
    for j in 0..n {
        let theta = two_pi * j as f64 / n as f64;
        let m = contour.point(theta);
        let t = contour.tangent(theta);
        let (g1, g2) = eval(m)?;
        sum1 += g1 * t;
        sum2 += g2 * t;
    }
    let mut v1 = sign * sum1 * two_pi / n as f64;
    let mut v2 = sign * sum2 * two_pi / n as f64;

    loop {
        if n >= CONTOUR_MAX_NODES {
            return Err(Error::Quadrature(format!(
                "contour quadrature did not converge within {CONTOUR_MAX_NODES} nodes"
            )));
        }
        // midpoints of the current grid
        for j in 0..n {
            let theta = two_pi * (j as f64 + 0.5) / n as f64;
            let m = contour.point(theta);
            let t = contour.tangent(theta);
            let (g1, g2) = eval(m)?;
            sum1 += g1 * t;
            sum2 += g2 * t;
        }
        n *= 2;
        let w1 = sign * sum1 * two_pi / n as f64;
        let w2 = sign * sum2 * two_pi / n as f64;
        let delta = ((w1 - v1).norm() / w1.norm().max(1.0))
            .max((w2 - v2).norm() / w2.norm().max(1.0));
        v1 = w1;
        v2 = w2;
        if delta <= CONTOUR_REL_TOL {
            let est = delta;
            return Ok((v1, v2, n, est));
        }
    }
}

/// Evaluate the two contour-integral terms of the centering expansion.
///
/// The f-domain is checked at every image point z(m); a violation (for the
/// principal log this means Re z ≤ 0 somewhere on the image) is a domain
/// error, which [`centering_value`] handles by shrinking the margin.
pub fn contour_terms(
    f: &SpectralFunction,
    model: &SpikedModel,
    contour: &Contour,
) -> Result<ContourTerms> {
    let y = model.aspect_ratio();
    let p = model.p() as f64;
    let m_total = model.total_spike_mult() as f64;
    let spikes = model.spikes();

    let eval = |m: Complex64| -> Result<(Complex64, Complex64)> {
        let z = z_of_m(m, y)
            .map_err(|e| Error::Contour(format!("contour node hit a pole of z(m): {e}")))?;
        if !f.domain().contains(z) {
            return Err(Error::Domain(format!(
                "{} is not analytic at the contour image point {z}",
                f.name()
            )));
        }
        let one_plus = 1.0 + m;

        let mut w1 = m_total / (y * m);
        for s in spikes {
            let den = 1.0 + s.value * m;
            w1 -= s.mult as f64 * s.value * s.value * m / (den * den);
        }

        let mut spike_frac = Complex64::ZERO;
        for s in spikes {
            spike_frac += (1.0 - s.value) * s.mult as f64 / ((1.0 + s.value * m) * one_plus);
        }
        let w2 = spike_frac * (1.0 / m - y * m / (one_plus * one_plus));

        Ok((f.eval(z) * w1, f.deriv(z) * w2))
    };

    let (i1, i2, nodes, delta) = integrate_pair(contour, eval)?;
    // −1/(2πi) · I = I·i/(2π)
    let c1 = i1 * Complex64::new(0.0, 1.0) / (2.0 * std::f64::consts::PI * p);
    let c2 = -i2 * Complex64::new(0.0, 1.0) / (2.0 * std::f64::consts::PI * p);
    let est_error = c1.im.abs().max(c2.im.abs()).max(delta);
    Ok(ContourTerms { term1: c1.re, term2: c2.re, nodes, est_error })
}

/// Assemble the full centering value F(f) for a model.
///
/// For functions analytic only on the right half-plane the contour margin is
/// halved until the z-image of the contour stays inside the domain.
pub fn centering_value(f: &SpectralFunction, model: &SpikedModel) -> Result<CenteringResult> {
    centering_value_with_margin(f, model, DEFAULT_MARGIN)
}

/// [`centering_value`] with an explicit starting margin.
pub fn centering_value_with_margin(
    f: &SpectralFunction,
    model: &SpikedModel,
    margin: f64,
) -> Result<CenteringResult> {
    let y = model.aspect_ratio();
    let p = model.p() as f64;
    let m_total = model.total_spike_mult() as f64;

    let base_integral = mp_integral(f, y)?;

    let mut margin = margin;
    let terms = loop {
        let contour = build_contour(model, margin)?;
        match contour_terms(f, model, &contour) {
            Ok(t) => break t,
            Err(Error::Domain(_)) if margin > 1e-4 => margin *= 0.5,
            Err(e) => return Err(e),
        }
    };

    let class = model.classify();
    let mut spike_sum = 0.0;
    for s in &class.distant {
        let limit = phi(s.value, y)?;
        if !f.domain().contains_real(limit) {
            return Err(Error::Domain(format!(
                "{} is not analytic at the distant-spike limit φ({}) = {limit}",
                f.name(),
                s.value
            )));
        }
        spike_sum += s.mult as f64 * f.eval_real(limit) / p;
    }

    let base = (1.0 - m_total / p) * base_integral;
    let total = terms.term1 + terms.term2 + base + spike_sum;
    Ok(CenteringResult {
        term1: terms.term1,
        term2: terms.term2,
        base,
        spike_sum,
        total,
        quadrature_nodes_used: terms.nodes,
        est_error: terms.est_error,
    })
}

/// Closed form for f(x) = x: F(x) = 1 + (1/p)·Σ n_i a_i − M/p.
///
/// Exact for every aspect ratio (the mean of the finite-horizon law equals
/// the mean of the population spectral distribution).
pub fn closed_form_mean(model: &SpikedModel) -> f64 {
    let p = model.p() as f64;
    let m_total = model.total_spike_mult() as f64;
    let weighted: f64 = model.spikes().iter().map(|s| s.value * s.mult as f64).sum();
    1.0 + weighted / p - m_total / p
}

/// Closed form for f(x) = log x (requires 0 < y_n < 1):
/// F(log x) = (1/p)·Σ n_i log a_i − 1 + (1 − 1/y_n)·log(1 − y_n).
pub fn closed_form_log(model: &SpikedModel) -> Result<f64> {
    let y = model.aspect_ratio();
    if y >= 1.0 {
        return Err(Error::Domain(format!(
            "the log closed form requires 0 < y_n < 1, got y_n = {y}"
        )));
    }
    let p = model.p() as f64;
    let log_sum: f64 = model.spikes().iter().map(|s| s.value.ln() * s.mult as f64).sum();
    Ok(log_sum / p - 1.0 + (1.0 - 1.0 / y) * (1.0 - y).ln())
}

/// Closed form for g(x) = x − log x − 1 (requires 0 < y_n < 1):
/// F(g) = 1 + (1/p)·Σ n_i a_i − M/p − (1/p)·Σ n_i log a_i − (1 − 1/y_n)·log(1 − y_n).
pub fn closed_form_lrt_g(model: &SpikedModel) -> Result<f64> {
    let y = model.aspect_ratio();
    if y >= 1.0 {
        return Err(Error::Domain(format!(
            "the likelihood-ratio closed form requires 0 < y_n < 1, got y_n = {y}"
        )));
    }
    let p = model.p() as f64;
    let m_total = model.total_spike_mult() as f64;
    let weighted: f64 = model.spikes().iter().map(|s| s.value * s.mult as f64).sum();
    let log_sum: f64 = model.spikes().iter().map(|s| s.value.ln() * s.mult as f64).sum();
    Ok(1.0 + weighted / p - m_total / p - log_sum / p - (1.0 - 1.0 / y) * (1.0 - y).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spike_model::phi;
    use crate::stieltjes::mp_integral;

    /// Residue oracle for f(x) = x: the two contour terms equal
    /// nn1 + nn2 + Σ_{close} n_i φ(a_i)/p, with
    /// nn1 = M/p − (y/p)·Σ n_i a_i²/(1−a_i)² and
    /// nn2 = (1/p)·Σ (−n_i + a_i n_i y/(1−a_i)²).
    fn residue_oracle_mean_terms(model: &SpikedModel) -> f64 {
        let y = model.aspect_ratio();
        let p = model.p() as f64;
        let m_total = model.total_spike_mult() as f64;
        let mut nn1 = m_total / p;
        let mut nn2 = 0.0;
        for s in model.spikes() {
            let a = s.value;
            let n_i = s.mult as f64;
            let denom = (1.0 - a) * (1.0 - a);
            nn1 -= y / p * n_i * a * a / denom;
            nn2 += (-n_i + a * n_i * y / denom) / p;
        }
        let mut close_sum = 0.0;
        for s in &model.classify().close {
            close_sum += s.mult as f64 * phi(s.value, y).unwrap() / p;
        }
        nn1 + nn2 + close_sum
    }

    #[test]
    fn contour_geometry_small_y() {
        let model = SpikedModel::null(100, 200).unwrap();
        let c = build_contour(&model, 0.5).unwrap();
        let s = 0.5_f64.sqrt();
        let lo = -1.0 / (1.0 - s);
        let hi = -1.0 / (1.0 + s);
        assert!(c.contains_real(lo) && c.contains_real(hi));
        assert!(!c.contains_real(0.0));
        assert_eq!(c.orientation(), Orientation::Counterclockwise);
        assert!((c.center() - 0.5 * (lo + hi)).abs() < 1e-14);
    }

    #[test]
    fn contour_geometry_large_y() {
        let model = SpikedModel::new(100, 50, &[(4.0, 1)]).unwrap();
        let c = build_contour(&model, 0.5).unwrap();
        let hi = -1.0 / (1.0 + 2.0_f64.sqrt());
        assert!(c.contains_real(-1.0) && c.contains_real(hi));
        assert!(!c.contains_real(0.0));
        assert!(!c.contains_real(-0.25), "distant pole must stay outside");
    }

    #[test]
    fn contour_geometry_y_one() {
        let model = SpikedModel::null(100, 100).unwrap();
        let c = build_contour(&model, 0.5).unwrap();
        assert!(c.contains_real(-1.0) && c.contains_real(-0.5));
        assert!(!c.contains_real(0.0));
    }

    #[test]
    fn contour_encloses_low_close_spikes_for_large_y() {
        // y = 2 with a = 0.3 close: its pole −10/3 sits left of −1 and must
        // be enclosed for the expansion to match the closed form.
        let model = SpikedModel::new(10, 5, &[(0.3, 2)]).unwrap();
        let c = build_contour(&model, 0.5).unwrap();
        assert!(c.contains_real(-1.0 / 0.3));
    }

    #[test]
    fn pole_free_integrand_vanishes() {
        let model = SpikedModel::new(100, 200, &[(3.0, 1)]).unwrap();
        let contour = build_contour(&model, 0.5).unwrap();
        let (v, _, _, _) = integrate_pair(&contour, |m| {
            let g = m * m + 2.0 * m + Complex64::new(0.5, 0.0);
            Ok((g, Complex64::ZERO))
        })
        .unwrap();
        assert!(v.norm() < 1e-10, "analytic integrand gave {v}");
    }

    #[test]
    fn clockwise_negates_counterclockwise() {
        let model = SpikedModel::null(100, 200).unwrap();
        let ccw = build_contour(&model, 0.5).unwrap();
        let cw = Contour { orientation: Orientation::Clockwise, ..ccw.clone() };
        // 1/(m+1) has one enclosed simple pole; ∮ = ±2πi
        let f = |m: Complex64| Ok((1.0 / (m + 1.0), Complex64::ZERO));
        let (a, _, _, _) = integrate_pair(&ccw, f).unwrap();
        let (b, _, _, _) = integrate_pair(&cw, f).unwrap();
        assert!((a + b).norm() < 1e-12);
        assert!((a - Complex64::new(0.0, 2.0 * std::f64::consts::PI)).norm() < 1e-10);
    }

    /// Proof-internal identity used as an orientation sentinel: for the null
    /// model, −(n/p)·(1/2πi)·∮ f(z(m))·m·(1/m² − y/(1+m)²) dm over the built
    /// contour reproduces G^y(f), including the atom for y > 1.
    #[test]
    fn null_contour_identity_matches_mp_integral() {
        for &(p, n) in &[(100usize, 200usize), (100, 100), (100, 50)] {
            let model = SpikedModel::null(p, n).unwrap();
            let y = model.aspect_ratio();
            let contour = build_contour(&model, 0.5).unwrap();
            for f in [SpectralFunction::identity(), SpectralFunction::square()] {
                let (i1, _, _, _) = integrate_pair(&contour, |m| {
                    let z = z_of_m(m, y).unwrap();
                    let w = m * (1.0 / (m * m) - y / ((1.0 + m) * (1.0 + m)));
                    Ok((f.eval(z) * w, Complex64::ZERO))
                })
                .unwrap();
                // −(n/p)·(1/2πi)·I = (n/p)·Re(i·I)/(2π)
                let value = (n as f64 / p as f64)
                    * (Complex64::new(0.0, 1.0) * i1 / (2.0 * std::f64::consts::PI)).re;
                let expected = mp_integral(&f, y).unwrap();
                assert!(
                    (value - expected).abs() < 1e-8,
                    "y={y} f={}: contour {value} vs MP {expected}",
                    f.name()
                );
            }
        }
    }

    #[test]
    fn terms_vanish_without_spikes() {
        let model = SpikedModel::null(100, 200).unwrap();
        let contour = build_contour(&model, 0.5).unwrap();
        let t = contour_terms(&SpectralFunction::identity(), &model, &contour).unwrap();
        assert_eq!(t.term1, 0.0);
        assert_eq!(t.term2, 0.0);
    }

    #[test]
    fn terms_match_residue_oracle_close_spike() {
        // p=200, n=400, one close spike 1.5:
        // nn1 = −0.0175, nn2 = 0.01, close φ-term = φ(1.5)/200 = 0.015
        let model = SpikedModel::new(200, 400, &[(1.5, 1)]).unwrap();
        let expected = residue_oracle_mean_terms(&model);
        assert!((expected - 0.0075).abs() < 1e-15);
        let contour = build_contour(&model, 0.5).unwrap();
        let t = contour_terms(&SpectralFunction::identity(), &model, &contour).unwrap();
        assert!(
            (t.term1 + t.term2 - expected).abs() < 1e-10,
            "terms {} vs oracle {expected}",
            t.term1 + t.term2
        );
        assert!(t.est_error < 1e-9);
    }

    #[test]
    fn terms_match_residue_oracle_mixed_model() {
        let model = SpikedModel::new(100, 200, &[(3.0, 1), (1.2, 2)]).unwrap();
        let expected = residue_oracle_mean_terms(&model);
        assert!((expected - 0.0165).abs() < 1e-12);
        let contour = build_contour(&model, 0.5).unwrap();
        let t = contour_terms(&SpectralFunction::identity(), &model, &contour).unwrap();
        assert!((t.term1 + t.term2 - expected).abs() < 1e-10);
    }

    #[test]
    fn centering_reduces_to_mp_for_null_model() {
        let model = SpikedModel::null(100, 200).unwrap();
        let r = centering_value(&SpectralFunction::identity(), &model).unwrap();
        assert!((r.total - 1.0).abs() < 1e-10);
        assert_eq!(r.term1, 0.0);
        assert_eq!(r.term2, 0.0);
        assert_eq!(r.spike_sum, 0.0);
    }

    #[test]
    fn centering_matches_mean_closed_form() {
        let model = SpikedModel::new(200, 400, &[(3.0, 1), (1.2, 2)]).unwrap();
        let r = centering_value(&SpectralFunction::identity(), &model).unwrap();
        assert!((closed_form_mean(&model) - 1.012).abs() < 1e-15);
        assert!((r.total - 1.012).abs() < 1e-8, "total {}", r.total);
        assert!(
            (r.total - (r.term1 + r.term2 + r.base + r.spike_sum)).abs() == 0.0,
            "total must be the exact fixed-order sum"
        );
    }

    #[test]
    fn centering_matches_log_closed_form() {
        let model = SpikedModel::new(200, 400, &[(3.0, 1)]).unwrap();
        let expected = closed_form_log(&model).unwrap();
        assert!((expected - (-0.30135975799671416)).abs() < 1e-12);
        let r = centering_value(&SpectralFunction::log(), &model).unwrap();
        assert!((r.total - expected).abs() < 1e-8, "total {} vs {expected}", r.total);
    }

    #[test]
    fn centering_matches_mean_closed_form_for_large_y() {
        // distant spike at y = 2
        let model = SpikedModel::new(4, 2, &[(4.0, 1)]).unwrap();
        let r = centering_value(&SpectralFunction::identity(), &model).unwrap();
        assert!((closed_form_mean(&model) - 1.75).abs() < 1e-15);
        assert!((r.total - 1.75).abs() < 1e-8, "total {}", r.total);
        assert!((r.term1 + r.term2 + 2.0 / 3.0).abs() < 1e-8);

        // close spike below 1 at y = 2
        let model = SpikedModel::new(10, 5, &[(0.3, 2)]).unwrap();
        let r = centering_value(&SpectralFunction::identity(), &model).unwrap();
        assert!((closed_form_mean(&model) - 0.86).abs() < 1e-15);
        assert!((r.total - 0.86).abs() < 1e-8, "total {}", r.total);

        // distant spike at y = 1
        let model = SpikedModel::new(6, 6, &[(2.5, 1)]).unwrap();
        let r = centering_value(&SpectralFunction::identity(), &model).unwrap();
        assert!((r.total - 1.25).abs() < 1e-8, "total {}", r.total);
    }

    #[test]
    fn closed_forms_hand_values() {
        let null = SpikedModel::null(100, 200).unwrap();
        assert_eq!(closed_form_mean(&null), 1.0);
        assert!((closed_form_log(&null).unwrap() - (-0.3068528194400547)).abs() < 1e-15);
        assert!((closed_form_lrt_g(&null).unwrap() - 0.3068528194400547).abs() < 1e-15);

        let m = SpikedModel::new(10, 20, &[(2.0, 1)]).unwrap();
        assert!((closed_form_mean(&m) - 1.1).abs() < 1e-15);

        let spiked = SpikedModel::new(200, 400, &[(3.0, 1)]).unwrap();
        assert!((closed_form_lrt_g(&spiked) .unwrap() - 0.3113597579967142).abs() < 1e-12);
        // identity: F(g) = F(x) − F(log) − 1
        let via_parts =
            closed_form_mean(&spiked) - closed_form_log(&spiked).unwrap() - 1.0;
        assert!((closed_form_lrt_g(&spiked).unwrap() - via_parts).abs() < 1e-14);

        let bad = SpikedModel::null(100, 100).unwrap();
        assert!(closed_form_log(&bad).is_err());
        assert!(closed_form_lrt_g(&bad).is_err());
    }

    #[test]
    fn centering_matches_lrt_closed_form() {
        let model = SpikedModel::new(200, 400, &[(3.0, 1)]).unwrap();
        let r = centering_value(&SpectralFunction::lrt_g(), &model).unwrap();
        let expected = closed_form_lrt_g(&model).unwrap();
        assert!((r.total - expected).abs() < 1e-8, "total {} vs {expected}", r.total);
    }

    #[test]
    fn centering_is_linear() {
        let model = SpikedModel::new(150, 300, &[(2.5, 1), (1.3, 1)]).unwrap();
        let f = SpectralFunction::identity();
        let g = SpectralFunction::log();
        let combo = SpectralFunction::linear_combination(2.0, &f, -0.5, &g);
        let lhs = centering_value(&combo, &model).unwrap().total;
        let rhs = 2.0 * centering_value(&f, &model).unwrap().total
            - 0.5 * centering_value(&g, &model).unwrap().total;
        assert!((lhs - rhs).abs() < 1e-9, "{lhs} vs {rhs}");
    }

    #[test]
    fn centering_rejects_log_for_large_y() {
        let model = SpikedModel::new(100, 50, &[(4.0, 1)]).unwrap();
        assert!(matches!(
            centering_value(&SpectralFunction::log(), &model),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn contour_invariance_under_margin_change() {
        let model = SpikedModel::new(100, 200, &[(3.0, 1), (1.2, 2)]).unwrap();
        let f = SpectralFunction::identity();
        let c1 = build_contour(&model, 0.15).unwrap();
        let c2 = build_contour(&model, 0.3).unwrap();
        assert!(c1.semi_axes().0 < c2.semi_axes().0);
        let t1 = contour_terms(&f, &model, &c1).unwrap();
        let t2 = contour_terms(&f, &model, &c2).unwrap();
        assert!(((t1.term1 + t1.term2) - (t2.term1 + t2.term2)).abs() < 1e-9);
    }
}
