//! Complex vector/matrix kernel, unit conversion and seeded sampling.

use std::ops::{Add, Index};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Converts a power in dBm to watts.
pub fn dbm_to_watt(power_dbm: f64) -> Result<f64> {
    if !power_dbm.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "power must be finite, got {power_dbm} dBm"
        )));
    }
    Ok(10f64.powf((power_dbm - 30.0) / 10.0))
}

/// Fixed-length complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self(entries)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `sum_k conj(self_k) * other_k`.
    pub fn hermitian_inner(&self, other: &ComplexVector) -> Result<Complex64> {
        check_len(self.len(), other.len())?;
        Ok(self.0.iter().zip(&other.0).map(|(x, y)| x.conj() * y).sum())
    }

    pub fn scale(&self, factor: f64) -> ComplexVector {
        Self(self.0.iter().map(|z| z * factor).collect())
    }

    pub fn conj(&self) -> ComplexVector {
        Self(self.0.iter().map(|z| z.conj()).collect())
    }

    /// Entrywise product, i.e. `diag(self) * other`.
    pub fn hadamard(&self, other: &ComplexVector) -> Result<ComplexVector> {
        check_len(self.len(), other.len())?;
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(x, y)| x * y).collect(),
        ))
    }

    /// Returns `self / ||self||`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<ComplexVector> {
        let norm = self.norm_sq().sqrt();
        (norm > 0.0 && norm.is_finite()).then(|| self.scale(1.0 / norm))
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl Add for &ComplexVector {
    type Output = ComplexVector;

    fn add(self, rhs: &ComplexVector) -> ComplexVector {
        assert_eq!(self.len(), rhs.len(), "vector lengths differ");
        ComplexVector(self.0.iter().zip(&rhs.0).map(|(x, y)| x + y).collect())
    }
}

impl FromIterator<Complex64> for ComplexVector {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

pub fn norm_sq(v: &ComplexVector) -> f64 {
    v.norm_sq()
}

pub fn hermitian_inner(x: &ComplexVector, y: &ComplexVector) -> Result<Complex64> {
    x.hermitian_inner(y)
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn matvec(&self, x: &ComplexVector) -> Result<ComplexVector> {
        check_len(self.cols, x.len())?;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x.iter())
                    .map(|(a, b)| a * b)
                    .sum::<Complex64>()
            })
            .collect())
    }
}

pub fn matvec(a: &ComplexMatrix, x: &ComplexVector) -> Result<ComplexVector> {
    a.matvec(x)
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Master seed. Sub-seeds for trials and purposes are derived with
/// [`Seed::derive`], so every stream is a pure function of the master value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl Seed {
    /// Mixes `tag` into the seed with a SplitMix64 finalizer.
    pub fn derive(self, tag: u64) -> Seed {
        let mut z = self
            .0
            .wrapping_add(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(tag.wrapping_mul(0xD1B5_4A32_D192_ED03));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Seed(z ^ (z >> 31))
    }

    pub fn stream(self) -> SeedStream {
        SeedStream(ChaCha8Rng::seed_from_u64(self.0))
    }
}

/// Random stream owned by one execution context at a time.
#[derive(Debug, Clone)]
pub struct SeedStream(ChaCha8Rng);

impl SeedStream {
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.0
    }

    /// Uniform sample on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        rand::Rng::gen::<f64>(&mut self.0)
    }

    pub fn circular_gaussian(&mut self, variance: f64) -> Complex64 {
        let sd = (variance / 2.0).sqrt();
        let re: f64 = StandardNormal.sample(&mut self.0);
        let im: f64 = StandardNormal.sample(&mut self.0);
        Complex64::new(re * sd, im * sd)
    }
}

/// `n` i.i.d. CN(0, variance) samples.
pub fn sample_circular_gaussian(
    n: usize,
    variance: f64,
    stream: &mut SeedStream,
) -> Result<ComplexVector> {
    if !(variance >= 0.0) || !variance.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "variance must be finite and non-negative, got {variance}"
        )));
    }
    Ok((0..n).map(|_| stream.circular_gaussian(variance)).collect())
}
