use std::fmt;
use std::io::{Read, Write};
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{DirOpError, Result};

const MAX_SIDE_2D: usize = 512;
const MAX_SIDE_3D: usize = 256;
const MAGIC: &[u8; 4] = b"VDGF";
const FORMAT_VERSION: u32 = 1;

/// Sizes and box lengths of a periodic grid on `[-L/2, L/2)^n`.
///
/// Sample `i` along axis `k` sits at `-L_k/2 + i·L_k/n_k`, so the origin is a
/// grid point and functions centred there stay centred.
#[derive(Clone, Debug, PartialEq)]
pub struct GridShape {
    sizes: Vec<usize>,
    lengths: Vec<f64>,
}

impl GridShape {
    pub fn new(sizes: Vec<usize>, lengths: Vec<f64>) -> Result<Self> {
        let dim = sizes.len();
        if dim != 2 && dim != 3 {
            return Err(DirOpError::InvalidGrid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if lengths.len() != dim {
            return Err(DirOpError::InvalidGrid(format!("{} box lengths for {dim} axes", lengths.len())));
        }
        let cap = if dim == 2 { MAX_SIDE_2D } else { MAX_SIDE_3D };
        for &n in &sizes {
            if n < 2 || !n.is_power_of_two() || n > cap {
                return Err(DirOpError::InvalidGrid(format!("axis size {n} is not a power of two in [2, {cap}]")));
            }
        }
        for &l in &lengths {
            if !(l > 0.0) || !l.is_finite() {
                return Err(DirOpError::InvalidGrid(format!("box length must be positive, got {l}")));
            }
        }
        Ok(Self { sizes, lengths })
    }

    /// `size^dim` points on a cube of side `length`.
    pub fn cube(dim: usize, size: usize, length: f64) -> Result<Self> {
        Self::new(vec![size; dim], vec![length; dim])
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.sizes[axis] as f64
    }

    pub fn max_spacing(&self) -> f64 {
        (0..self.dim()).map(|k| self.spacing(k)).fold(0.0, f64::max)
    }

    pub fn min_length(&self) -> f64 {
        self.lengths.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|k| self.spacing(k)).product()
    }

    /// The same samples on a box scaled by `factor`.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.sizes.clone(), self.lengths.iter().map(|l| l * factor).collect())
    }

    /// Sizes padded to three axes, with a leading axis of size 1 in 2D.
    pub(crate) fn dims3(&self) -> [usize; 3] {
        match self.sizes.as_slice() {
            [a, b] => [1, *a, *b],
            [a, b, c] => [*a, *b, *c],
            _ => unreachable!("validated dimension"),
        }
    }

    /// Axis indices of the flat index `idx`.
    pub fn unravel(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for k in (0..self.dim()).rev() {
            out[k] = idx % self.sizes[k];
            idx /= self.sizes[k];
        }
        out
    }

    pub fn ravel(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.sizes).fold(0, |acc, (i, n)| acc * n + i % n)
    }

    pub fn coord(&self, idx: usize) -> Vec<f64> {
        self.unravel(idx).iter().enumerate().map(|(k, &i)| -0.5 * self.lengths[k] + i as f64 * self.spacing(k)).collect()
    }

    /// Signed frequency index of position `i` on an axis of `n` points; the
    /// Nyquist position maps to `-n/2`.
    pub fn signed_index(i: usize, n: usize) -> i64 {
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Angular frequency `ξ` of spectrum entry `idx` (convention `e^{ix·ξ}`).
    pub fn frequency(&self, idx: usize) -> Vec<f64> {
        self.unravel(idx)
            .iter()
            .enumerate()
            .map(|(k, &i)| std::f64::consts::TAU * Self::signed_index(i, self.sizes[k]) as f64 / self.lengths[k])
            .collect()
    }

    /// Every frequency represented by spectrum entry `idx`. Entries on a
    /// Nyquist plane stand for both `±πn/L` along that axis.
    pub fn frequency_aliases(&self, idx: usize) -> Vec<Vec<f64>> {
        let base = self.frequency(idx);
        let multi = self.unravel(idx);
        let mut out = vec![base];
        for k in 0..self.dim() {
            if multi[k] == self.sizes[k] / 2 {
                let mirrored: Vec<Vec<f64>> = out
                    .iter()
                    .map(|f| {
                        let mut g = f.clone();
                        g[k] = -g[k];
                        g
                    })
                    .collect();
                out.extend(mirrored);
            }
        }
        out
    }

    /// Index of the frequency `-ξ` for entry `idx`.
    pub fn negated(&self, idx: usize) -> usize {
        let m: Vec<usize> = self.unravel(idx).iter().zip(&self.sizes).map(|(&i, &n)| (n - i) % n).collect();
        self.ravel(&m)
    }
}

/// How a multiplier is evaluated on entries that stand for several
/// frequencies. Either choice keeps it symmetric under `ξ ↦ -ξ`, so real
/// inputs give real outputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AliasRule {
    /// Average over the aliases (smooth multipliers).
    Mean,
    /// Smallest value over the aliases (indicators stay projections).
    Min,
}

/// Multiplier values on the spectrum layout of `shape`.
pub fn multiplier_table<F>(shape: &GridShape, rule: AliasRule, m: F) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    (0..shape.len())
        .into_par_iter()
        .map(|idx| {
            let aliases = shape.frequency_aliases(idx);
            if aliases.len() == 1 {
                return m(&aliases[0]);
            }
            let vals = aliases.iter().map(|xi| m(xi));
            match rule {
                AliasRule::Mean => vals.sum::<f64>() / aliases.len() as f64,
                AliasRule::Min => vals.fold(f64::INFINITY, f64::min),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Samples {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl Samples {
    fn len(&self) -> usize {
        match self {
            Samples::Real(v) => v.len(),
            Samples::Complex(v) => v.len(),
        }
    }
}

/// Samples of a function on a periodic grid, immutable once built.
///
/// The discrete Fourier transform is computed on first use and cached.
#[derive(Clone)]
pub struct GridFunction {
    shape: GridShape,
    samples: Samples,
    spectrum: OnceLock<Arc<Vec<Complex64>>>,
}

impl fmt::Debug for GridFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridFunction")
            .field("sizes", &self.shape.sizes)
            .field("lengths", &self.shape.lengths)
            .field("real", &self.is_real())
            .field("spectrum_cached", &self.spectrum.get().is_some())
            .finish()
    }
}

impl GridFunction {
    pub fn from_real(shape: GridShape, values: Vec<f64>) -> Result<Self> {
        Self::from_samples(shape, Samples::Real(values))
    }

    pub fn from_complex(shape: GridShape, values: Vec<Complex64>) -> Result<Self> {
        Self::from_samples(shape, Samples::Complex(values))
    }

    fn from_samples(shape: GridShape, samples: Samples) -> Result<Self> {
        if samples.len() != shape.len() {
            return Err(DirOpError::InvalidArgument(format!("{} samples for a grid of {}", samples.len(), shape.len())));
        }
        Ok(Self { shape, samples, spectrum: OnceLock::new() })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn<F>(shape: GridShape, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let values = (0..shape.len()).into_par_iter().map(|i| f(&shape.coord(i))).collect();
        Self { shape, samples: Samples::Real(values), spectrum: OnceLock::new() }
    }

    pub fn from_complex_fn<F>(shape: GridShape, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let values = (0..shape.len()).into_par_iter().map(|i| f(&shape.coord(i))).collect();
        Self { shape, samples: Samples::Complex(values), spectrum: OnceLock::new() }
    }

    pub fn constant(shape: GridShape, c: f64) -> Self {
        let n = shape.len();
        Self { shape, samples: Samples::Real(vec![c; n]), spectrum: OnceLock::new() }
    }

    /// Inverse transform of `spectrum`, keeping it as the cached spectrum.
    /// With `real`, the imaginary part of the samples is dropped.
    pub fn from_spectrum(shape: GridShape, spectrum: Vec<Complex64>, real: bool) -> Result<Self> {
        if spectrum.len() != shape.len() {
            return Err(DirOpError::InvalidArgument(format!("{} coefficients for a grid of {}", spectrum.len(), shape.len())));
        }
        let mut data = spectrum.clone();
        fft_nd(&shape, &mut data, FftDirection::Inverse);
        let scale = 1.0 / shape.len() as f64;
        let samples = if real {
            Samples::Real(data.iter().map(|z| z.re * scale).collect())
        } else {
            Samples::Complex(data.iter().map(|z| z * scale).collect())
        };
        let cache = OnceLock::new();
        let _ = cache.set(Arc::new(spectrum));
        Ok(Self { shape, samples, spectrum: cache })
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn len(&self) -> usize {
        self.shape.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_real(&self) -> bool {
        matches!(self.samples, Samples::Real(_))
    }

    pub fn samples(&self) -> &Samples {
        &self.samples
    }

    pub fn real_values(&self) -> Option<&[f64]> {
        match &self.samples {
            Samples::Real(v) => Some(v),
            Samples::Complex(_) => None,
        }
    }

    pub fn get(&self, idx: usize) -> Complex64 {
        match &self.samples {
            Samples::Real(v) => Complex64::new(v[idx], 0.0),
            Samples::Complex(v) => v[idx],
        }
    }

    pub fn to_complex_vec(&self) -> Vec<Complex64> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    pub fn spectrum_cached(&self) -> bool {
        self.spectrum.get().is_some()
    }

    /// Unnormalized forward DFT, `F(ξ) = Σ_x f(x) e^{-i x·ξ}` up to the phase of
    /// the box corner.
    pub fn spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| {
            let mut data = self.to_complex_vec();
            fft_nd(&self.shape, &mut data, FftDirection::Forward);
            Arc::new(data)
        })
    }

    /// Multiplies the spectrum by `m` and transforms back.
    pub fn apply_multiplier(&self, table: &[f64]) -> Result<Self> {
        if table.len() != self.len() {
            return Err(DirOpError::InvalidArgument("multiplier table does not match the grid".into()));
        }
        let spec: Vec<Complex64> = self.spectrum().par_iter().zip(table.par_iter()).map(|(z, m)| z * m).collect();
        Self::from_spectrum(self.shape.clone(), spec, self.is_real())
    }

    pub fn abs(&self) -> Self {
        let v = match &self.samples {
            Samples::Real(v) => v.par_iter().map(|x| x.abs()).collect(),
            Samples::Complex(v) => v.par_iter().map(|z| z.norm()).collect(),
        };
        Self { shape: self.shape.clone(), samples: Samples::Real(v), spectrum: OnceLock::new() }
    }

    /// Pointwise map of a real function.
    pub fn map_real<F: Fn(f64) -> f64 + Sync>(&self, f: F) -> Result<Self> {
        let v = self.real_values().ok_or_else(|| DirOpError::InvalidArgument("expected a real grid function".into()))?;
        Self::from_real(self.shape.clone(), v.par_iter().map(|&x| f(x)).collect())
    }

    /// Pointwise product with a real weight.
    pub fn weighted(&self, w: &[f64]) -> Result<Self> {
        if w.len() != self.len() {
            return Err(DirOpError::InvalidArgument("weight does not match the grid".into()));
        }
        let samples = match &self.samples {
            Samples::Real(v) => Samples::Real(v.iter().zip(w).map(|(a, b)| a * b).collect()),
            Samples::Complex(v) => Samples::Complex(v.iter().zip(w).map(|(a, b)| a * b).collect()),
        };
        Self::from_samples(self.shape.clone(), samples)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let samples = match &self.samples {
            Samples::Real(v) => Samples::Real(v.iter().map(|a| a * c).collect()),
            Samples::Complex(v) => Samples::Complex(v.iter().map(|a| a * c).collect()),
        };
        Self { shape: self.shape.clone(), samples, spectrum: OnceLock::new() }
    }

    /// The same samples on a box scaled by `factor`, i.e. `x ↦ f(x/factor)`.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        Self::from_samples(self.shape.rescaled(factor)?, self.samples.clone())
    }

    pub fn sum_sq(&self) -> f64 {
        match &self.samples {
            Samples::Real(v) => v.par_iter().map(|x| x * x).sum(),
            Samples::Complex(v) => v.par_iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    /// `(h_1⋯h_n Σ |f|²)^{1/2}`, the Riemann sum for the `L²` norm.
    pub fn norm_l2(&self) -> f64 {
        (self.shape.cell_volume() * self.sum_sq()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        match &self.samples {
            Samples::Real(v) => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            Samples::Complex(v) => v.iter().fold(0.0, |m, z| m.max(z.norm())),
        }
    }

    /// Periodic translation by whole grid steps: `g(x) = f(x - shift·h)`.
    pub fn translate(&self, shift: &[isize]) -> Result<Self> {
        if shift.len() != self.dim() {
            return Err(DirOpError::InvalidArgument("shift has the wrong dimension".into()));
        }
        let shape = &self.shape;
        let src = |idx: usize| {
            let m: Vec<usize> = shape
                .unravel(idx)
                .iter()
                .zip(shape.sizes())
                .zip(shift)
                .map(|((&i, &n), &s)| (i as isize - s).rem_euclid(n as isize) as usize)
                .collect();
            shape.ravel(&m)
        };
        let samples = match &self.samples {
            Samples::Real(v) => Samples::Real((0..self.len()).map(|i| v[src(i)]).collect()),
            Samples::Complex(v) => Samples::Complex((0..self.len()).map(|i| v[src(i)]).collect()),
        };
        Self::from_samples(shape.clone(), samples)
    }

    /// Periodic multilinear interpolation at a physical point.
    pub fn interpolate(&self, x: &[f64]) -> Complex64 {
        let d = self.dim();
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for k in 0..d {
            let n = self.shape.sizes[k];
            let u = (x[k] + 0.5 * self.shape.lengths[k]) / self.shape.spacing(k);
            let f = u.floor();
            frac[k] = u - f;
            base[k] = (f as i64).rem_euclid(n as i64) as usize;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            let mut m = [0usize; 3];
            for k in 0..d {
                let up = (corner >> k) & 1 == 1;
                w *= if up { frac[k] } else { 1.0 - frac[k] };
                m[k] = (base[k] + up as usize) % self.shape.sizes[k];
            }
            if w != 0.0 {
                acc += self.get(self.shape.ravel(&m[..d])) * w;
            }
        }
        acc
    }

    /// Raw little-endian format: magic, version, dimension, kind byte, sizes,
    /// lengths, then the samples (interleaved re/im when complex).
    pub fn write_raw<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(self.dim() as u32).to_le_bytes())?;
        w.write_all(&[u8::from(!self.is_real())])?;
        for &n in &self.shape.sizes {
            w.write_all(&(n as u64).to_le_bytes())?;
        }
        for &l in &self.shape.lengths {
            w.write_all(&l.to_le_bytes())?;
        }
        match &self.samples {
            Samples::Real(v) => {
                for x in v {
                    w.write_all(&x.to_le_bytes())?;
                }
            }
            Samples::Complex(v) => {
                for z in v {
                    w.write_all(&z.re.to_le_bytes())?;
                    w.write_all(&z.im.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn read_raw<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(DirOpError::Format("bad magic".into()));
        }
        let version = read_u32(&mut r)?;
        if version != FORMAT_VERSION {
            return Err(DirOpError::Format(format!("unsupported version {version}")));
        }
        let dim = read_u32(&mut r)? as usize;
        if dim != 2 && dim != 3 {
            return Err(DirOpError::Format(format!("dimension {dim}")));
        }
        let mut kind = [0u8; 1];
        r.read_exact(&mut kind)?;
        let mut sizes = Vec::with_capacity(dim);
        for _ in 0..dim {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            sizes.push(usize::try_from(u64::from_le_bytes(b)).map_err(|_| DirOpError::Format("size overflow".into()))?);
        }
        let mut lengths = Vec::with_capacity(dim);
        for _ in 0..dim {
            lengths.push(read_f64(&mut r)?);
        }
        let shape = GridShape::new(sizes, lengths)?;
        let n = shape.len();
        let samples = match kind[0] {
            0 => Samples::Real((0..n).map(|_| read_f64(&mut r)).collect::<Result<_>>()?),
            1 => Samples::Complex((0..n).map(|_| Ok(Complex64::new(read_f64(&mut r)?, read_f64(&mut r)?))).collect::<Result<_>>()?),
            k => return Err(DirOpError::Format(format!("unknown sample kind {k}"))),
        };
        Self::from_samples(shape, samples)
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// In-place unnormalized n-dimensional FFT, one axis at a time.
pub(crate) fn fft_nd(shape: &GridShape, data: &mut [Complex64], direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let sizes = shape.sizes();
    for axis in 0..sizes.len() {
        let n = sizes[axis];
        let stride: usize = sizes[axis + 1..].iter().product();
        let fft = planner.plan_fft(n, direction);
        if stride == 1 {
            data.par_chunks_mut(n * 64).for_each(|chunk| {
                let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
                fft.process_with_scratch(chunk, &mut scratch);
            });
        } else {
            data.par_chunks_mut(n * stride).for_each(|block| strided_pass(fft.as_ref(), block, n, stride));
        }
    }
}

fn strided_pass(fft: &dyn Fft<f64>, block: &mut [Complex64], n: usize, stride: usize) {
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for j in 0..stride {
        for i in 0..n {
            line[i] = block[i * stride + j];
        }
        fft.process_with_scratch(&mut line, &mut scratch);
        for i in 0..n {
            block[i * stride + j] = line[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape2(n: usize, l: f64) -> GridShape {
        GridShape::cube(2, n, l).unwrap()
    }

    #[test]
    fn shape_validation() {
        assert!(GridShape::cube(2, 512, 8.0).is_ok());
        assert!(GridShape::cube(2, 1024, 8.0).is_err());
        assert!(GridShape::cube(3, 512, 8.0).is_err());
        assert!(GridShape::cube(3, 48, 8.0).is_err());
        assert!(GridShape::cube(1, 16, 8.0).is_err());
        assert!(GridShape::new(vec![8, 8], vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn origin_is_a_grid_point() {
        let s = shape2(8, 4.0);
        let idx = s.ravel(&[4, 4]);
        assert_eq!(s.coord(idx), vec![0.0, 0.0]);
        assert_eq!(s.unravel(idx), vec![4, 4]);
    }

    #[test]
    fn nyquist_entries_have_two_aliases_per_axis() {
        let s = shape2(8, 8.0);
        assert_eq!(s.frequency_aliases(s.ravel(&[4, 4])).len(), 4);
        assert_eq!(s.frequency_aliases(s.ravel(&[4, 1])).len(), 2);
        assert_eq!(s.frequency_aliases(s.ravel(&[3, 1])).len(), 1);
        assert_eq!(s.negated(s.ravel(&[3, 1])), s.ravel(&[5, 7]));
    }

    #[test]
    fn plane_wave_lands_on_one_coefficient() {
        let s = shape2(16, 8.0);
        let xi = [std::f64::consts::TAU * 3.0 / 8.0, -std::f64::consts::TAU / 8.0];
        let f = GridFunction::from_complex_fn(s.clone(), |x| Complex64::from_polar(1.0, xi[0] * x[0] + xi[1] * x[1]));
        let spec = f.spectrum();
        let peak = spec.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap().0;
        let got = s.frequency(peak);
        assert!((got[0] - xi[0]).abs() < 1e-12 && (got[1] - xi[1]).abs() < 1e-12);
        let off: f64 = spec.iter().enumerate().filter(|(i, _)| *i != peak).map(|(_, z)| z.norm()).sum();
        assert!(off < 1e-9);
    }

    #[test]
    fn spectrum_round_trip() {
        let s = GridShape::new(vec![8, 16, 4], vec![1.0, 2.0, 3.0]).unwrap();
        let f = GridFunction::from_fn(s.clone(), |x| (x[0] * 3.0).sin() + x[1] * x[2]);
        let g = GridFunction::from_spectrum(s, f.spectrum().to_vec(), true).unwrap();
        let a = f.real_values().unwrap();
        let b = g.real_values().unwrap();
        let err = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12 * f.sup_norm().max(1.0));
    }

    #[test]
    fn interpolation_reproduces_affine_data_inside_a_cell() {
        let s = shape2(16, 4.0);
        let f = GridFunction::from_fn(s, |x| 2.0 * x[0] - x[1] + 0.5);
        let z = f.interpolate(&[0.3, -0.7]);
        assert!((z.re - (0.6 + 0.7 + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn raw_round_trip() {
        let s = shape2(4, 2.0);
        let f = GridFunction::from_complex_fn(s, |x| Complex64::new(x[0], x[1] * 2.0));
        let mut buf = Vec::new();
        f.write_raw(&mut buf).unwrap();
        let g = GridFunction::read_raw(buf.as_slice()).unwrap();
        assert_eq!(f.samples(), g.samples());
        assert_eq!(f.shape(), g.shape());
        buf[0] = b'X';
        assert!(GridFunction::read_raw(buf.as_slice()).is_err());
    }
}
