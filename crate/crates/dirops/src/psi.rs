use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{DirOpError, Result};

/// Default support half-width of `ψ`.
pub const DEFAULT_SIGMA: f64 = 1.0 / 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsiShape {
    /// `A·max(0, 1 - |u|/σ)`, whose inverse transform is a Fejér kernel.
    Triangle,
}

/// Even nonnegative frequency profile `ψ` of the smooth directional averages.
///
/// Its inverse transform `Ψ(t) = (1/2π)∫ψ(u)e^{itu}du` is nonnegative, and the
/// amplitude is calibrated so that `min_{|t|≤1} Ψ(t) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiProfile {
    pub sigma: f64,
    pub amplitude: f64,
    pub shape: PsiShape,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

impl PsiProfile {
    /// Calibrated triangle of half-width `sigma`; needs `σ < 2π` so that the
    /// minimum of `Ψ` on `[-1, 1]` is attained at `t = ±1`.
    pub fn triangle(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || sigma >= TAU {
            return Err(DirOpError::InvalidArgument(format!("sigma must lie in (0, 2π), got {sigma}")));
        }
        let s = sinc(sigma / 2.0);
        let amplitude = TAU / (sigma * s * s);
        Ok(Self { sigma, amplitude, shape: PsiShape::Triangle })
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self.shape {
            PsiShape::Triangle => self.amplitude * (1.0 - u.abs() / self.sigma).max(0.0),
        }
    }

    /// `Ψ(t) = (Aσ/2π)·sinc²(σt/2)`.
    pub fn kernel(&self, t: f64) -> f64 {
        match self.shape {
            PsiShape::Triangle => {
                let s = sinc(self.sigma * t / 2.0);
                self.amplitude * self.sigma / TAU * s * s
            }
        }
    }

    /// `sup ψ = ψ(0)`.
    pub fn sup(&self) -> f64 {
        self.amplitude
    }
}

impl Default for PsiProfile {
    fn default() -> Self {
        Self::triangle(DEFAULT_SIGMA).expect("default sigma is valid")
    }
}
