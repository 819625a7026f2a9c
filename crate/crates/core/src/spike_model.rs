//! Spiked population model: validation, distant/close spike classification,
//! and the sample-eigenvalue limit map φ.
//!
//! The population covariance has all eigenvalues equal to 1 except a fixed
//! set of spikes `a_i` with multiplicities `n_i`. A spike is *distant* when it
//! escapes the bulk (|a − 1| > √y for y < 1, a − 1 > √y for y ≥ 1) and its
//! top sample eigenvalue converges to φ(a) = a + y·a/(a − 1); otherwise it is
//! *close* and gets absorbed at the bulk edge.

use crate::error::{Error, Result};

/// One spike group: a population eigenvalue `value ≠ 1` repeated `mult` times.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Spike {
    pub value: f64,
    pub mult: usize,
}

/// Validated spiked population model.
///
/// Spikes are stored sorted in decreasing order with pairwise distinct
/// values; equal spikes must be entered via their multiplicity. The aspect
/// ratio `y_n = p/n` and the total spike multiplicity `M` are derived.
#[derive(Clone, Debug, PartialEq)]
pub struct SpikedModel {
    p: usize,
    n: usize,
    spikes: Vec<Spike>,
}

/// Distant/close partition of a model's spikes, in decreasing value order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpikeClass {
    pub distant: Vec<Spike>,
    pub close: Vec<Spike>,
}

impl SpikeClass {
    /// Number of distant spike groups (the index bound k₁).
    pub fn k1(&self) -> usize {
        self.distant.len()
    }
}

impl SpikedModel {
    /// Build and validate a model from `(value, multiplicity)` pairs.
    ///
    /// Rejects non-positive or unit spike values, zero multiplicities,
    /// duplicate values, and total multiplicity reaching `p`.
    pub fn new(p: usize, n: usize, spikes: &[(f64, usize)]) -> Result<Self> {
        if p == 0 || n == 0 {
            return Err(Error::BadDimensions { p, n });
        }
        let mut parsed = Vec::with_capacity(spikes.len());
        for &(value, mult) in spikes {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidSpike(value));
            }
            if value == 1.0 {
                return Err(Error::NotASpike);
            }
            if mult == 0 {
                return Err(Error::ZeroMultiplicity(value));
            }
            parsed.push(Spike { value, mult });
        }
        parsed.sort_by(|a, b| b.value.total_cmp(&a.value));
        for pair in parsed.windows(2) {
            if pair[0].value == pair[1].value {
                return Err(Error::DuplicateSpike(pair[0].value));
            }
        }
        let m: usize = parsed.iter().map(|s| s.mult).sum();
        if m >= p {
            return Err(Error::TooManySpikes { m, p });
        }
        Ok(SpikedModel { p, n, spikes: parsed })
    }

    /// Model with no spikes (the null case Σ = I).
    pub fn null(p: usize, n: usize) -> Result<Self> {
        Self::new(p, n, &[])
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Aspect ratio y_n = p/n.
    pub fn aspect_ratio(&self) -> f64 {
        self.p as f64 / self.n as f64
    }

    /// Spike groups in decreasing value order.
    pub fn spikes(&self) -> &[Spike] {
        &self.spikes
    }

    /// Number of distinct spike values (k).
    pub fn spike_count(&self) -> usize {
        self.spikes.len()
    }

    /// Total spike multiplicity (M = Σ n_i).
    pub fn total_spike_mult(&self) -> usize {
        self.spikes.iter().map(|s| s.mult).sum()
    }

    /// Partition the spikes into distant and close groups.
    ///
    /// Boundary spikes with |a − 1| = √y_n are classified close.
    pub fn classify(&self) -> SpikeClass {
        let y = self.aspect_ratio();
        let sqrt_y = y.sqrt();
        let mut distant = Vec::new();
        let mut close = Vec::new();
        for &s in &self.spikes {
            let is_distant = if y < 1.0 {
                (s.value - 1.0).abs() > sqrt_y
            } else {
                s.value - 1.0 > sqrt_y
            };
            if is_distant {
                distant.push(s);
            } else {
                close.push(s);
            }
        }
        SpikeClass { distant, close }
    }

    /// Population spectral distribution H_n as `(atom, mass)` pairs:
    /// the base atom at 1 with mass (p − M)/p, then each spike with mass n_i/p.
    pub fn population_esd(&self) -> Vec<(f64, f64)> {
        let p = self.p as f64;
        let m = self.total_spike_mult() as f64;
        let mut esd = Vec::with_capacity(1 + self.spikes.len());
        esd.push((1.0, (p - m) / p));
        for s in &self.spikes {
            esd.push((s.value, s.mult as f64 / p));
        }
        esd
    }
}

/// Limit of the sample eigenvalue generated by a distant spike:
/// φ(a) = a + y·a/(a − 1).
pub fn phi(a: f64, y: f64) -> Result<f64> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::InvalidSpike(a));
    }
    if a == 1.0 {
        return Err(Error::NotASpike);
    }
    if !y.is_finite() || y <= 0.0 {
        return Err(Error::Domain(format!("aspect ratio must be positive, got {y}")));
    }
    Ok(a + y * a / (a - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_and_derives_fields() {
        let m = SpikedModel::new(200, 400, &[(3.0, 1), (1.2, 2)]).unwrap();
        assert_eq!(m.aspect_ratio(), 0.5);
        assert_eq!(m.total_spike_mult(), 3);
        assert_eq!(m.spike_count(), 2);
        // sorted descending
        assert_eq!(m.spikes()[0].value, 3.0);
        assert_eq!(m.spikes()[1].value, 1.2);
    }

    #[test]
    fn null_model() {
        let m = SpikedModel::new(100, 100, &[]).unwrap();
        assert_eq!(m.total_spike_mult(), 0);
        assert_eq!(m.aspect_ratio(), 1.0);
    }

    #[test]
    fn rejects_bad_spikes() {
        assert!(matches!(
            SpikedModel::new(10, 20, &[(1.0, 1)]),
            Err(Error::NotASpike)
        ));
        assert!(matches!(
            SpikedModel::new(10, 20, &[(-2.0, 1)]),
            Err(Error::InvalidSpike(_))
        ));
        assert!(matches!(
            SpikedModel::new(10, 20, &[(2.0, 0)]),
            Err(Error::ZeroMultiplicity(_))
        ));
        assert!(matches!(
            SpikedModel::new(4, 20, &[(2.0, 2), (3.0, 2)]),
            Err(Error::TooManySpikes { m: 4, p: 4 })
        ));
        assert!(matches!(
            SpikedModel::new(10, 20, &[(2.0, 1), (2.0, 1)]),
            Err(Error::DuplicateSpike(_))
        ));
        assert!(matches!(
            SpikedModel::new(0, 20, &[]),
            Err(Error::BadDimensions { .. })
        ));
    }

    #[test]
    fn classifies_by_inequality() {
        // y = 0.5, sqrt(y) ≈ 0.7071
        let m = SpikedModel::new(100, 200, &[(3.0, 1), (1.5, 1), (1.2, 1)]).unwrap();
        let class = m.classify();
        assert_eq!(class.k1(), 1);
        assert_eq!(class.distant[0].value, 3.0);
        assert_eq!(class.close.len(), 2);
        assert_eq!(class.close[0].value, 1.5);
        assert_eq!(class.close[1].value, 1.2);
    }

    #[test]
    fn boundary_spike_is_close() {
        // |1.5 - 1| = sqrt(0.25) exactly
        let m = SpikedModel::new(100, 400, &[(1.5, 1)]).unwrap();
        let class = m.classify();
        assert_eq!(class.k1(), 0);
        assert_eq!(class.close[0].value, 1.5);
    }

    #[test]
    fn classifies_above_one_rule_for_large_y() {
        // y = 2: distant needs a - 1 > sqrt(2); a = 0.3 is close even though
        // |0.3 - 1| < sqrt(2) trivially holds on the other side.
        let m = SpikedModel::new(100, 50, &[(4.0, 1), (0.3, 1)]).unwrap();
        let class = m.classify();
        assert_eq!(class.distant.len(), 1);
        assert_eq!(class.distant[0].value, 4.0);
        assert_eq!(class.close[0].value, 0.3);
    }

    #[test]
    fn phi_matches_hand_values() {
        assert_eq!(phi(2.0, 0.5).unwrap(), 3.0);
        assert!((phi(4.0, 2.0).unwrap() - (4.0 + 8.0 / 3.0)).abs() < 1e-14);
        assert!(matches!(phi(1.0, 0.5), Err(Error::NotASpike)));
    }

    #[test]
    fn phi_edge_identity() {
        // φ(1 ± √y) = (1 ± √y)²
        for &y in &[0.1f64, 0.25, 0.5, 0.9, 1.5, 2.0] {
            let up = 1.0 + y.sqrt();
            assert!((phi(up, y).unwrap() - up * up).abs() < 1e-12, "y={y}");
            if y < 1.0 {
                let dn = 1.0 - y.sqrt();
                assert!((phi(dn, y).unwrap() - dn * dn).abs() < 1e-12, "y={y}");
            }
        }
    }

    #[test]
    fn esd_masses() {
        let m = SpikedModel::new(200, 400, &[(3.0, 1), (1.2, 2)]).unwrap();
        let esd = m.population_esd();
        assert_eq!(esd[0], (1.0, 0.985));
        assert_eq!(esd[1], (3.0, 0.005));
        assert_eq!(esd[2], (1.2, 0.01));
        let total: f64 = esd.iter().map(|&(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-15);

        let null = SpikedModel::null(100, 50).unwrap();
        assert_eq!(null.population_esd(), vec![(1.0, 1.0)]);
    }
}
