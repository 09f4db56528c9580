use crate::direction::DirectionSet;
use crate::distance::{dot, norm};
use crate::error::GeoError;

/// Frequency band `R_{ξ,s} = {η : |ξ·η| < s|η|}` with `ξ` stored as a unit vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Band {
    xi: Vec<f64>,
    s: f64,
}

impl Band {
    pub fn new(xi: &[f64], s: f64) -> Result<Self, GeoError> {
        let r = norm(xi);
        if !(r > 0.0) || !r.is_finite() {
            return Err(GeoError::InvalidArgument("band normal must be nonzero".into()));
        }
        if !(s > 0.0) {
            return Err(GeoError::InvalidArgument(format!("band width must be positive, got {s}")));
        }
        Ok(Self { xi: xi.iter().map(|x| x / r).collect(), s })
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn contains(&self, v: &[f64]) -> bool {
        dot(&self.xi, v).abs() < self.s * norm(v)
    }

    /// The same band with width `factor·s`.
    pub fn widened(&self, factor: f64) -> Self {
        Self { xi: self.xi.clone(), s: self.s * factor }
    }
}

/// Indices of the members of `v` lying in the band.
pub fn band_members(v: &DirectionSet, band: &Band) -> Vec<usize> {
    v.points().iter().enumerate().filter(|(_, p)| band.contains(p)).map(|(i, _)| i).collect()
}

/// `A_n(R) = {x : R^{-1} ≤ |x| < 2R}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Annulus {
    pub r: f64,
}

impl Annulus {
    pub const UNIT: Annulus = Annulus { r: 1.0 };

    pub fn contains(&self, x: &[f64]) -> bool {
        let t = norm(x);
        t >= 1.0 / self.r && t < 2.0 * self.r
    }

    pub fn inner(&self) -> f64 {
        1.0 / self.r
    }

    pub fn outer(&self) -> f64 {
        2.0 * self.r
    }
}
