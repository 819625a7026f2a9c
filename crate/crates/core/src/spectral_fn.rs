//! Analytic test functions with explicit derivatives and analyticity domains.

use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

type CFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Region on which a [`SpectralFunction`] is guaranteed analytic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// The whole complex plane (polynomials).
    Entire,
    /// The right half-plane Re z > 0 (principal-branch logarithms).
    RightHalfPlane,
}

impl Domain {
    pub fn contains(self, z: Complex64) -> bool {
        match self {
            Domain::Entire => true,
            Domain::RightHalfPlane => z.re > 0.0,
        }
    }

    pub fn contains_real(self, x: f64) -> bool {
        self.contains(Complex64::new(x, 0.0))
    }

    fn intersect(self, other: Domain) -> Domain {
        if self == Domain::Entire {
            other
        } else {
            self
        }
    }
}

/// An analytic map `f` paired with its derivative `f'` and analyticity domain.
#[derive(Clone)]
pub struct SpectralFunction {
    name: String,
    f: CFn,
    df: CFn,
    domain: Domain,
}

impl fmt::Debug for SpectralFunction {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.debug_struct("SpectralFunction")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

impl SpectralFunction {
    pub fn new(
        name: impl Into<String>,
        domain: Domain,
        f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        df: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        SpectralFunction { name: name.into(), f: Arc::new(f), df: Arc::new(df), domain }
    }

    /// f(x) = x
    pub fn identity() -> Self {
        Self::new("x", Domain::Entire, |z| z, |_| Complex64::new(1.0, 0.0))
    }

    /// f(x) = x²
    pub fn square() -> Self {
        Self::new("x2", Domain::Entire, |z| z * z, |z| 2.0 * z)
    }

    /// f(x) = log x (principal branch)
    pub fn log() -> Self {
        Self::new("log", Domain::RightHalfPlane, |z| z.ln(), |z| 1.0 / z)
    }

    /// f(x) = x − log x − 1, the corrected likelihood-ratio integrand.
    pub fn lrt_g() -> Self {
        Self::new(
            "lrt_g",
            Domain::RightHalfPlane,
            |z| z - z.ln() - 1.0,
            |z| 1.0 - 1.0 / z,
        )
    }

    /// Polynomial c₀ + c₁x + c₂x² + … given its coefficients.
    pub fn polynomial(coeffs: &[f64]) -> Self {
        let c: Vec<f64> = coeffs.to_vec();
        let d: Vec<f64> = c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &ck)| k as f64 * ck)
            .collect();
        let name = format!(
            "poly:{}",
            c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        );
        Self::new(
            name,
            Domain::Entire,
            move |z| horner(&c, z),
            move |z| horner(&d, z),
        )
    }

    /// α·f + β·g with the intersected analyticity domain.
    pub fn linear_combination(alpha: f64, f: &Self, beta: f64, g: &Self) -> Self {
        let (f1, df1) = (f.f.clone(), f.df.clone());
        let (f2, df2) = (g.f.clone(), g.df.clone());
        Self::new(
            format!("{}*{} + {}*{}", alpha, f.name, beta, g.name),
            f.domain.intersect(g.domain),
            move |z| alpha * f1(z) + beta * f2(z),
            move |z| alpha * df1(z) + beta * df2(z),
        )
    }

    /// Parse a function name as accepted by the CLI:
    /// `x`, `x2`, `log`, `lrt_g`, or `poly:<c0,c1,…>`.
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "x" => Some(Self::identity()),
            "x2" => Some(Self::square()),
            "log" => Some(Self::log()),
            "lrt_g" => Some(Self::lrt_g()),
            _ => {
                let coeffs = name.strip_prefix("poly:")?;
                let parsed: Option<Vec<f64>> =
                    coeffs.split(',').map(|c| c.trim().parse::<f64>().ok()).collect();
                let parsed = parsed?;
                if parsed.is_empty() {
                    None
                } else {
                    Some(Self::polynomial(&parsed))
                }
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.f)(z)
    }

    pub fn deriv(&self, z: Complex64) -> Complex64 {
        (self.df)(z)
    }

    /// Evaluate on the real axis (our functions are real there).
    pub fn eval_real(&self, x: f64) -> f64 {
        self.eval(Complex64::new(x, 0.0)).re
    }

    /// Largest relative mismatch between `deriv` and a central difference of
    /// `eval` over the given sample points. Used to validate hand-written
    /// derivatives.
    pub fn max_derivative_mismatch(&self, points: &[Complex64]) -> f64 {
        let mut worst: f64 = 0.0;
        for &z in points {
            let h = 1e-6 * z.norm().max(1.0);
            let numeric = (self.eval(z + h) - self.eval(z - h)) / (2.0 * h);
            let exact = self.deriv(z);
            let scale = exact.norm().max(1e-12);
            worst = worst.max((numeric - exact).norm() / scale);
        }
        worst
    }
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}
