//! Marčenko–Pastur law and the companion Stieltjes transform.
//!
//! The forward map z(m) = −1/m + y/(1+m) (and its spiked variant) is cheap;
//! the inverse solvers pick the Herglotz branch: for Im z ≠ 0 the solution
//! with sign(Im m) = sign(Im z), for real z outside the spectrum the boundary
//! value from the upper half-plane.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral_fn::SpectralFunction;
use crate::spike_model::SpikedModel;

/// Relative tolerance for quadrature stopping and for closed-form checks.
pub const QUAD_REL_TOL: f64 = 1e-10;
/// Relative roundtrip residual required from the companion solvers.
pub const SOLVER_REL_TOL: f64 = 1e-12;

/// Marčenko–Pastur law with aspect ratio `y`.
///
/// The continuous part is supported on [a_y, b_y] with
/// a_y = (1−√y)², b_y = (1+√y)²; for y > 1 an atom of mass 1 − 1/y sits at 0.
#[derive(Clone, Copy, Debug)]
pub struct MpLaw {
    y: f64,
}

impl MpLaw {
    pub fn new(y: f64) -> Result<Self> {
        if !y.is_finite() || y <= 0.0 {
            return Err(Error::Domain(format!(
                "Marčenko–Pastur index must be positive, got {y}"
            )));
        }
        Ok(MpLaw { y })
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// Support edges ((1−√y)², (1+√y)²).
    pub fn support(&self) -> (f64, f64) {
        let s = self.y.sqrt();
        ((1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s))
    }

    /// Mass of the atom at the origin: max(0, 1 − 1/y).
    pub fn mass_at_zero(&self) -> f64 {
        (1.0 - 1.0 / self.y).max(0.0)
    }

    /// Density of the continuous part; zero outside the open support.
    pub fn density(&self, x: f64) -> f64 {
        let (a, b) = self.support();
        if x <= a || x >= b {
            return 0.0;
        }
        ((b - x) * (x - a)).sqrt() / (2.0 * std::f64::consts::PI * x * self.y)
    }

    /// G^y(f): the atom term plus the integral of `f` against the density.
    ///
    /// The edge square-root singularities are removed by the substitution
    /// x = a + (b−a)·sin²θ, after which the integrand extends to a smooth
    /// periodic function and the doubling trapezoid rule converges spectrally.
    pub fn integrate(&self, f: &SpectralFunction) -> Result<f64> {
        let (a, b) = self.support();
        if self.y >= 1.0 && !f.domain().contains_real(0.0) {
            return Err(Error::Domain(format!(
                "{} is not integrable against the Marčenko–Pastur law for y = {} \
                 (support touches the origin)",
                f.name(),
                self.y
            )));
        }
        let width = b - a;
        let y = self.y;
        let integrand = |theta: f64| {
            let s2 = theta.sin().powi(2);
            let x = a + width * s2;
            // s²/x, with the exact simplification when a = 0 (only y = 1)
            let ratio = if a == 0.0 { 1.0 / width } else { s2 / x };
            f.eval_real(x) * width * width * ratio * (1.0 - s2)
                / (std::f64::consts::PI * y)
        };
        let (value, _nodes) = trapezoid_doubling(
            integrand,
            0.0,
            std::f64::consts::FRAC_PI_2,
            QUAD_REL_TOL,
            16,
            1 << 20,
        )?;
        let atom = self.mass_at_zero();
        let atom_term = if atom > 0.0 { atom * f.eval_real(0.0) } else { 0.0 };
        Ok(atom_term + value)
    }
}

/// Free-function form of [`MpLaw::support`].
pub fn mp_support(y: f64) -> Result<(f64, f64)> {
    Ok(MpLaw::new(y)?.support())
}

/// Free-function form of [`MpLaw::density`].
pub fn mp_density(x: f64, y: f64) -> Result<f64> {
    Ok(MpLaw::new(y)?.density(x))
}

/// Free-function form of [`MpLaw::integrate`].
pub fn mp_integral(f: &SpectralFunction, y: f64) -> Result<f64> {
    MpLaw::new(y)?.integrate(f)
}

/// Trapezoid rule with panel doubling until successive values agree to
/// `rel_tol` relative (on max(1, |value|)). Returns the value and the final
/// panel count.
fn trapezoid_doubling(
    g: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    start_panels: usize,
    max_panels: usize,
) -> Result<(f64, usize)> {
    let mut n = start_panels;
    let mut h = (hi - lo) / n as f64;
    let mut sum = 0.5 * (g(lo) + g(hi));
    for i in 1..n {
        sum += g(lo + i as f64 * h);
    }
    let mut value = sum * h;
    loop {
        if n >= max_panels {
            return Err(Error::Quadrature(format!(
                "trapezoid rule did not reach relative tolerance {rel_tol} within \
                 {max_panels} panels"
            )));
        }
        let mut mid_sum = 0.0;
        for i in 0..n {
            mid_sum += g(lo + (i as f64 + 0.5) * h);
        }
        n *= 2;
        h *= 0.5;
        sum += mid_sum;
        let next = sum * h;
        let done = (next - value).abs() <= rel_tol * next.abs().max(1.0);
        value = next;
        if done {
            return Ok((value, n));
        }
    }
}

/// Forward companion map z(m) = −1/m + y/(1+m).
pub fn z_of_m(m: Complex64, y: f64) -> Result<Complex64> {
    if !y.is_finite() || y <= 0.0 {
        return Err(Error::Domain(format!("aspect ratio must be positive, got {y}")));
    }
    if !m.is_finite() || m == Complex64::ZERO || m == Complex64::new(-1.0, 0.0) {
        return Err(Error::Domain(format!("z(m) has poles at m = 0 and m = -1; got m = {m}")));
    }
    Ok(-1.0 / m + y / (1.0 + m))
}

/// Spiked forward map
/// z(m) = −1/m + ((p−M)/p)·y/(1+m) + (y/p)·Σ aᵢnᵢ/(1+aᵢm).
pub fn z_of_m_spiked(m: Complex64, model: &SpikedModel) -> Result<Complex64> {
    if !m.is_finite() || m == Complex64::ZERO || m == Complex64::new(-1.0, 0.0) {
        return Err(Error::Domain(format!(
            "spiked z(m) has poles at m = 0 and m = -1; got m = {m}"
        )));
    }
    for s in model.spikes() {
        if m == Complex64::new(-1.0 / s.value, 0.0) {
            return Err(Error::Domain(format!(
                "spiked z(m) has a pole at m = -1/{}",
                s.value
            )));
        }
    }
    let y = model.aspect_ratio();
    let p = model.p() as f64;
    let m_total = model.total_spike_mult() as f64;
    let mut z = -1.0 / m + ((p - m_total) / p) * y / (1.0 + m);
    for s in model.spikes() {
        z += (y / p) * s.value * s.mult as f64 / (1.0 + s.value * m);
    }
    Ok(z)
}

/// Derivative z′(m) of the null forward map.
fn z_prime(m: Complex64, y: f64) -> Complex64 {
    let one_plus = 1.0 + m;
    1.0 / (m * m) - y / (one_plus * one_plus)
}

/// Derivative z′(m) of the spiked forward map.
fn z_prime_spiked(m: Complex64, model: &SpikedModel) -> Complex64 {
    let y = model.aspect_ratio();
    let p = model.p() as f64;
    let m_total = model.total_spike_mult() as f64;
    let one_plus = 1.0 + m;
    let mut d = 1.0 / (m * m) - ((p - m_total) / p) * y / (one_plus * one_plus);
    for s in model.spikes() {
        let den = 1.0 + s.value * m;
        d -= (y / p) * s.value * s.value * s.mult as f64 / (den * den);
    }
    d
}

/// A solved (z, m) pair of the companion equation, with the roundtrip
/// residual |z(m) − z| achieved by the solver.
#[derive(Clone, Copy, Debug)]
pub struct StieltjesPoint {
    pub z: Complex64,
    pub m: Complex64,
    pub residual: f64,
}

/// Solve z = −1/m + y/(1+m) for the companion branch.
///
/// For Im z ≠ 0 this is the quadratic root with sign(Im m) = sign(Im z);
/// for real z outside the open bulk (a_y, b_y) it is the upper-half-plane
/// boundary value, i.e. the real root sitting on an increasing branch of
/// z(m). Real z strictly inside the bulk is rejected.
pub fn solve_companion(z: Complex64, y: f64) -> Result<StieltjesPoint> {
    let law = MpLaw::new(y)?;
    let (a_y, b_y) = law.support();
    let tol = SOLVER_REL_TOL * z.norm().max(1.0);

    if z.im == 0.0 {
        let x = z.re;
        if x > a_y && x < b_y {
            return Err(Error::Domain(format!(
                "real z = {x} lies inside the bulk ({a_y}, {b_y}); the boundary value \
                 is not defined without principal-value handling"
            )));
        }
        if x == 0.0 {
            if y == 1.0 {
                return Err(Error::Domain(
                    "the companion transform diverges at z = 0 when y = 1".into(),
                ));
            }
            let m = Complex64::new(1.0 / (y - 1.0), 0.0);
            let residual = (z_of_m(m, y)? - z).norm();
            return Ok(StieltjesPoint { z, m, residual });
        }
        // z·m² + (z + 1 − y)·m + 1 = 0 with real coefficients.
        let b = x + 1.0 - y;
        let disc = b * b - 4.0 * x;
        let m = if disc <= 0.0 {
            // double root at the support edge
            Complex64::new(-b / (2.0 * x), 0.0)
        } else {
            let sq = disc.sqrt();
            let q = -(b + sq.copysign(b)) * 0.5;
            let r1 = Complex64::new(q / x, 0.0);
            let r2 = Complex64::new(1.0 / q, 0.0);
            // the Stieltjes branch is the increasing branch of z(m)
            if z_prime(r1, y).re >= z_prime(r2, y).re {
                r1
            } else {
                r2
            }
        };
        let residual = (z_of_m(m, y)? - z).norm();
        if residual > tol {
            return Err(Error::SolverFailure {
                z,
                details: format!("roundtrip residual {residual} exceeds {tol}"),
            });
        }
        return Ok(StieltjesPoint { z, m, residual });
    }

    // Complex z: stable quadratic formula, then the half-plane pick.
    let b = z + 1.0 - y;
    let disc = b * b - 4.0 * z;
    let sq = disc.sqrt();
    // choose the sign that avoids cancellation in b + sq
    let sq = if (b.re * sq.re + b.im * sq.im) < 0.0 { -sq } else { sq };
    let q = -(b + sq) * 0.5;
    let r1 = q / z;
    let r2 = 1.0 / q;
    let want = z.im.signum();
    let m = match (r1.im.signum() == want, r2.im.signum() == want) {
        (true, false) => r1,
        (false, true) => r2,
        _ => {
            return Err(Error::SolverFailure {
                z,
                details: format!(
                    "half-plane selection ambiguous: roots {r1} and {r2} for Im z sign {want}"
                ),
            })
        }
    };
    let m = newton_polish(m, z, |m| (z_of_m(m, y), z_prime(m, y)));
    let residual = (z_of_m(m, y)? - z).norm();
    if residual > tol {
        return Err(Error::SolverFailure {
            z,
            details: format!("roundtrip residual {residual} exceeds {tol}"),
        });
    }
    Ok(StieltjesPoint { z, m, residual })
}

/// Solve the spiked companion equation for the Herglotz branch.
///
/// The rational equation is cleared to a degree-(k+2) polynomial whose roots
/// are found with Durand–Kerner iteration; the root in the correct half-plane
/// is Newton-polished against the rational form. Real z is perturbed to
/// z + iε (ε = 1e−9·max(1, |z|)) for the root search and the selected root is
/// polished back onto the real axis.
pub fn solve_companion_spiked(z: Complex64, model: &SpikedModel) -> Result<StieltjesPoint> {
    if model.total_spike_mult() == 0 {
        return solve_companion(z, model.aspect_ratio());
    }
    let tol = SOLVER_REL_TOL * z.norm().max(1.0);
    let perturbed = if z.im == 0.0 {
        // the bulk support does not move under finite-rank spiking
        let (a_y, b_y) = MpLaw::new(model.aspect_ratio())?.support();
        if z.re > a_y && z.re < b_y {
            return Err(Error::Domain(format!(
                "real z = {} lies inside the bulk ({a_y}, {b_y})",
                z.re
            )));
        }
        z + Complex64::new(0.0, 1e-9 * z.norm().max(1.0))
    } else {
        z
    };

    let poly = companion_polynomial(perturbed, model);
    let roots = durand_kerner(&poly).map_err(|details| Error::SolverFailure { z, details })?;

    let want = perturbed.im.signum();
    let scale = roots.iter().map(|r| r.norm()).fold(1.0_f64, f64::max);
    let mut candidates: Vec<Complex64> = Vec::new();
    for &r in &roots {
        if r.im.signum() == want && r.im.abs() > 1e-13 * scale {
            let res = z_of_m_spiked(r, model).map(|w| (w - perturbed).norm());
            if matches!(res, Ok(res) if res < 1e-6 * perturbed.norm().max(1.0)) {
                candidates.push(r);
            }
        }
    }
    if candidates.is_empty() {
        return Err(Error::SolverFailure {
            z,
            details: format!(
                "no polynomial root in the correct half-plane passed the roundtrip check; \
                 roots: {roots:?}"
            ),
        });
    }
    // the Herglotz inverse is unique; keep the best-residual candidate and
    // reject genuinely distinct ties
    candidates.sort_by(|a, b| {
        let ra = z_of_m_spiked(*a, model).map(|w| (w - perturbed).norm()).unwrap_or(f64::MAX);
        let rb = z_of_m_spiked(*b, model).map(|w| (w - perturbed).norm()).unwrap_or(f64::MAX);
        ra.total_cmp(&rb)
    });
    if candidates.len() > 1 && (candidates[0] - candidates[1]).norm() > 1e-6 * scale {
        return Err(Error::SolverFailure {
            z,
            details: format!("multiple distinct half-plane roots: {candidates:?}"),
        });
    }

    // polish against the true (unperturbed) z
    let m = newton_polish(candidates[0], z, |m| {
        (z_of_m_spiked(m, model), z_prime_spiked(m, model))
    });
    let residual = (z_of_m_spiked(m, model)? - z).norm();
    if residual > tol {
        return Err(Error::SolverFailure {
            z,
            details: format!("roundtrip residual {residual} exceeds {tol} after polishing"),
        });
    }
    if z.im != 0.0 && m.im.signum() != z.im.signum() {
        return Err(Error::SolverFailure {
            z,
            details: format!("polished root {m} left the Herglotz half-plane"),
        });
    }
    Ok(StieltjesPoint { z, m, residual })
}

fn newton_polish(
    mut m: Complex64,
    z: Complex64,
    eval: impl Fn(Complex64) -> (Result<Complex64>, Complex64),
) -> Complex64 {
    for _ in 0..8 {
        let (val, deriv) = eval(m);
        let Ok(val) = val else { break };
        if deriv.norm() < 1e-300 {
            break;
        }
        let step = (val - z) / deriv;
        let next = m - step;
        if !next.is_finite() {
            break;
        }
        m = next;
        if step.norm() <= 1e-16 * m.norm().max(1.0) {
            break;
        }
    }
    m
}

/// Coefficients (ascending) of the polynomial obtained by clearing the
/// denominators of z = z_spiked(m).
fn companion_polynomial(z: Complex64, model: &SpikedModel) -> Vec<Complex64> {
    let y = model.aspect_ratio();
    let p = model.p() as f64;
    let m_total = model.total_spike_mult() as f64;
    let c0 = (p - m_total) / p;

    // helpers on ascending-coefficient polynomials
    fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::ZERO; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] += ai * bj;
            }
        }
        out
    }
    fn add_scaled(acc: &mut Vec<Complex64>, poly: &[Complex64], scale: Complex64) {
        if acc.len() < poly.len() {
            acc.resize(poly.len(), Complex64::ZERO);
        }
        for (a, &b) in acc.iter_mut().zip(poly) {
            *a += scale * b;
        }
    }
    let one = |c: f64| vec![Complex64::new(1.0, 0.0), Complex64::new(c, 0.0)]; // 1 + c·m

    // Π (1 + a_i m) and the products with one factor left out
    let mut full = vec![Complex64::new(1.0, 0.0)];
    for s in model.spikes() {
        full = mul(&full, &one(s.value));
    }
    let m_poly = vec![Complex64::ZERO, Complex64::new(1.0, 0.0)];
    let m_one_plus = mul(&m_poly, &one(1.0)); // m(1+m)

    // z·m(1+m)·Π + (1+m)·Π − c0·y·m·Π − (y/p)·Σ a_i n_i · m(1+m)·Π_{j≠i}
    let mut acc: Vec<Complex64> = Vec::new();
    add_scaled(&mut acc, &mul(&m_one_plus, &full), z);
    add_scaled(&mut acc, &mul(&one(1.0), &full), Complex64::new(1.0, 0.0));
    add_scaled(&mut acc, &mul(&m_poly, &full), Complex64::new(-c0 * y, 0.0));
    for (i, s) in model.spikes().iter().enumerate() {
        let mut partial = vec![Complex64::new(1.0, 0.0)];
        for (j, t) in model.spikes().iter().enumerate() {
            if j != i {
                partial = mul(&partial, &one(t.value));
            }
        }
        let weight = -(y / p) * s.value * s.mult as f64;
        add_scaled(&mut acc, &mul(&m_one_plus, &partial), Complex64::new(weight, 0.0));
    }
    acc
}

/// All roots of a complex polynomial (ascending coefficients) via
/// Durand–Kerner iteration.
///
/// Roots are accepted on small steps or small backward error; after the
/// sweep limit the current localizations are returned anyway — callers
/// Newton-polish the root they pick and gate on the roundtrip residual, so
/// a cluster stalling elsewhere (e.g. near a support edge) is harmless.
fn durand_kerner(coeffs: &[Complex64]) -> std::result::Result<Vec<Complex64>, String> {
    let max_coeff = coeffs.iter().map(|c| c.norm()).fold(0.0_f64, f64::max);
    if max_coeff == 0.0 {
        return Err("zero polynomial".into());
    }
    // strip negligible leading coefficients (degree can drop, e.g. z ≈ 0)
    let mut last = coeffs.len();
    while last > 1 && coeffs[last - 1].norm() < 1e-14 * max_coeff {
        last -= 1;
    }
    let coeffs = &coeffs[..last];
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Err("constant polynomial has no roots".into());
    }
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();

    let eval = |x: Complex64| {
        let mut acc = Complex64::ZERO;
        for &c in monic.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    // Σ |c_j|·|x|^j, the scale for a backward-error test
    let scale_at = |x: Complex64| {
        let r = x.norm();
        let mut acc = 0.0;
        let mut pow = 1.0;
        for c in &monic {
            acc += c.norm() * pow;
            pow *= r;
        }
        acc
    };

    // initial guesses on a circle at the Cauchy root bound
    let radius = 1.0 + monic.iter().take(deg).map(|c| c.norm()).fold(0.0_f64, f64::max);
    let mut roots: Vec<Complex64> = (0..deg)
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * i as f64 / deg as f64 + 0.7;
            radius * Complex64::new(angle.cos(), angle.sin())
        })
        .collect();

    for _ in 0..500 {
        let mut biggest_step = 0.0_f64;
        for i in 0..deg {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if j != i {
                    den *= roots[i] - roots[j];
                }
            }
            if den.norm() < 1e-300 {
                den = Complex64::new(1e-300, 0.0);
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
            biggest_step = biggest_step.max(step.norm() / roots[i].norm().max(1.0));
        }
        if biggest_step < 1e-14 {
            break;
        }
        if roots.iter().all(|&r| eval(r).norm() <= 1e-13 * scale_at(r).max(1e-300)) {
            break;
        }
    }
    Ok(roots)
}
