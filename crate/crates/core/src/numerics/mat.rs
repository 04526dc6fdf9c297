use std::fmt;

use super::{Complex, Rng};
use crate::{LrpeError, Result};

/// Dense row-major matrix over `f64` or complex `f64`.
///
/// Real and imaginary parts are stored in separate buffers. A real-only
/// matrix has no imaginary buffer at all, so real code paths never touch
/// imaginary arithmetic.
#[derive(Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Option<Vec<f64>>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, re: vec![0.0; rows * cols], im: None }
    }

    pub fn complex_zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, re: vec![0.0; rows * cols], im: Some(vec![0.0; rows * cols]) }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.re[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_real(rows: usize, cols: usize, re: Vec<f64>) -> Result<Self> {
        if re.len() != rows * cols {
            return Err(LrpeError::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", re.len())));
        }
        Ok(Self { rows, cols, re, im: None })
    }

    pub fn from_parts(rows: usize, cols: usize, re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        if re.len() != rows * cols || im.len() != rows * cols {
            return Err(LrpeError::DimensionMismatch(format!(
                "{}/{} entries for a {rows}x{cols} matrix",
                re.len(),
                im.len()
            )));
        }
        Ok(Self { rows, cols, re, im: Some(im) })
    }

    pub fn from_complex(rows: usize, cols: usize, entries: &[Complex]) -> Result<Self> {
        let re = entries.iter().map(|z| z.re).collect();
        let im = entries.iter().map(|z| z.im).collect();
        Self::from_parts(rows, cols, re, im)
    }

    /// Builds a real matrix from row slices. Panics on ragged input.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut re = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            re.extend_from_slice(row);
        }
        Self { rows: r, cols: c, re, im: None }
    }

    pub fn column(values: &[Complex]) -> Self {
        Self::from_complex(values.len(), 1, values).expect("length matches")
    }

    pub fn real_column(values: &[f64]) -> Self {
        Self { rows: values.len(), cols: 1, re: values.to_vec(), im: None }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_real(&self) -> bool {
        self.im.is_none()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex {
        let idx = i * self.cols + j;
        Complex::new(self.re[idx], self.im.as_ref().map_or(0.0, |im| im[idx]))
    }

    pub fn re_at(&self, i: usize, j: usize) -> f64 {
        self.re[i * self.cols + j]
    }

    /// Sets entry `(i, j)`. A real matrix is promoted to complex when `z`
    /// has a nonzero imaginary part.
    pub fn set(&mut self, i: usize, j: usize, z: Complex) {
        let idx = i * self.cols + j;
        self.re[idx] = z.re;
        if z.im != 0.0 {
            self.promote();
        }
        if let Some(im) = self.im.as_mut() {
            im[idx] = z.im;
        }
    }

    pub fn set_re(&mut self, i: usize, j: usize, v: f64) {
        self.re[i * self.cols + j] = v;
    }

    /// Ensures an imaginary buffer exists (all zeros if it did not).
    pub fn promote(&mut self) {
        if self.im.is_none() {
            self.im = Some(vec![0.0; self.re.len()]);
        }
    }

    pub fn to_complex(&self) -> Self {
        let mut m = self.clone();
        m.promote();
        m
    }

    pub fn re(&self) -> &[f64] {
        &self.re
    }

    pub fn im(&self) -> Option<&[f64]> {
        self.im.as_deref()
    }

    pub fn row_re(&self, i: usize) -> &[f64] {
        &self.re[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_im(&self, i: usize) -> Option<&[f64]> {
        self.im.as_ref().map(|im| &im[i * self.cols..(i + 1) * self.cols])
    }

    pub fn row(&self, i: usize) -> Vec<Complex> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    /// Mutable views of row `i`: real part and, if present, imaginary part.
    pub fn row_mut(&mut self, i: usize) -> (&mut [f64], Option<&mut [f64]>) {
        let range = i * self.cols..(i + 1) * self.cols;
        let re = &mut self.re[range.clone()];
        let im = self.im.as_mut().map(|im| &mut im[range]);
        (re, im)
    }

    pub fn entries(&self) -> Vec<Complex> {
        (0..self.rows * self.cols)
            .map(|idx| Complex::new(self.re[idx], self.im.as_ref().map_or(0.0, |im| im[idx])))
            .collect()
    }

    /// Real part as a real-only matrix.
    pub fn real_part(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, re: self.re.clone(), im: None }
    }

    /// Drops the imaginary buffer when every imaginary part is exactly zero.
    pub fn demote_if_real(mut self) -> Self {
        if self.im.as_ref().is_some_and(|im| im.iter().all(|&v| v == 0.0)) {
            self.im = None;
        }
        self
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            re: self.re.iter().map(|v| v * a).collect(),
            im: self.im.as_ref().map(|im| im.iter().map(|v| v * a).collect()),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(LrpeError::DimensionMismatch(format!("{:?} vs {:?}", self.shape(), other.shape())));
        }
        let re = self.re.iter().zip(&other.re).map(|(&a, &b)| f(a, b)).collect();
        let im = match (&self.im, &other.im) {
            (None, None) => None,
            (a, b) => {
                let n = self.re.len();
                let zero = vec![0.0; n];
                let a = a.as_ref().unwrap_or(&zero);
                let b = b.as_ref().unwrap_or(&zero);
                Some(a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
            }
        };
        Ok(Self { rows: self.rows, cols: self.cols, re, im })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let d = self.sub(other)?;
        Ok(d.entries().iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// `‖self − I‖_F`; panics if not square.
    pub fn distance_from_identity(&self) -> f64 {
        assert!(self.is_square());
        fro_norm(&self.sub(&Self::identity(self.rows)).expect("square"))
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} ({})", self.rows, self.cols, if self.is_real() { "real" } else { "complex" })?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let z = self.get(i, j);
                    if self.is_real() {
                        format!("{:.6}", z.re)
                    } else {
                        format!("{:.6}{:+.6}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Matrix product. The result is complex if either operand is.
pub fn matmul(a: &Mat, b: &Mat) -> Result<Mat> {
    if a.cols != b.rows {
        return Err(LrpeError::DimensionMismatch(format!("matmul {}x{} by {}x{}", a.rows, a.cols, b.rows, b.cols)));
    }
    let (n, m, p) = (a.rows, a.cols, b.cols);
    let mut re = vec![0.0; n * p];
    for i in 0..n {
        let out = &mut re[i * p..(i + 1) * p];
        for k in 0..m {
            let x = a.re[i * m + k];
            if x == 0.0 {
                continue;
            }
            for (o, &y) in out.iter_mut().zip(&b.re[k * p..(k + 1) * p]) {
                *o += x * y;
            }
        }
    }
    if a.is_real() && b.is_real() {
        return Ok(Mat { rows: n, cols: p, re, im: None });
    }
    let zero_a;
    let zero_b;
    let a_im = match &a.im {
        Some(v) => v,
        None => {
            zero_a = vec![0.0; a.re.len()];
            &zero_a
        }
    };
    let b_im = match &b.im {
        Some(v) => v,
        None => {
            zero_b = vec![0.0; b.re.len()];
            &zero_b
        }
    };
    let mut im = vec![0.0; n * p];
    for i in 0..n {
        for k in 0..m {
            let (xr, xi) = (a.re[i * m + k], a_im[i * m + k]);
            for j in 0..p {
                let (yr, yi) = (b.re[k * p + j], b_im[k * p + j]);
                re[i * p + j] -= xi * yi;
                im[i * p + j] += xr * yi + xi * yr;
            }
        }
    }
    Ok(Mat { rows: n, cols: p, re, im: Some(im) })
}

/// `(i, j)` entry of the result is `conj(a[j, i])`.
pub fn conj_transpose(a: &Mat) -> Mat {
    let (r, c) = a.shape();
    let mut re = vec![0.0; r * c];
    for i in 0..r {
        for j in 0..c {
            re[j * r + i] = a.re[i * c + j];
        }
    }
    let im = a.im.as_ref().map(|src| {
        let mut im = vec![0.0; r * c];
        for i in 0..r {
            for j in 0..c {
                im[j * r + i] = -src[i * c + j];
            }
        }
        im
    });
    Mat { rows: c, cols: r, re, im }
}

pub fn fro_norm(a: &Mat) -> f64 {
    let re: f64 = a.re.iter().map(|v| v * v).sum();
    let im: f64 = a.im.as_ref().map_or(0.0, |im| im.iter().map(|v| v * v).sum());
    (re + im).sqrt()
}

/// Real matrix of standard-normal draws, filled row-major.
pub fn random_mat(rng: &mut Rng, rows: usize, cols: usize) -> Mat {
    Mat { rows, cols, re: rng.normal_vec(rows * cols), im: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rng;
    use proptest::prelude::*;

    fn naive_matmul(a: &Mat, b: &Mat) -> Vec<Complex> {
        let mut out = Vec::new();
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut acc = Complex::new(0.0, 0.0);
                for k in 0..a.cols() {
                    acc += a.get(i, k) * b.get(k, j);
                }
                out.push(acc);
            }
        }
        out
    }

    fn random_complex(rng: &mut Rng, r: usize, c: usize) -> Mat {
        let re = rng.normal_vec(r * c);
        let im = rng.normal_vec(r * c);
        Mat::from_parts(r, c, re, im).unwrap()
    }

    #[test]
    fn identity_times_m() {
        let mut rng = Rng::new(1);
        let m = random_mat(&mut rng, 3, 3);
        assert_eq!(matmul(&Mat::identity(3), &m).unwrap(), m);
    }

    #[test]
    fn quarter_turn_of_e1() {
        let rot = Mat::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let e1 = Mat::real_column(&[1.0, 0.0]);
        assert_eq!(matmul(&rot, &e1).unwrap(), Mat::real_column(&[0.0, 1.0]));
    }

    #[test]
    fn matches_triple_loop_real_and_complex() {
        let mut rng = Rng::new(11);
        let a = random_mat(&mut rng, 5, 4);
        let b = random_mat(&mut rng, 4, 3);
        let got = matmul(&a, &b).unwrap();
        assert!(got.is_real());
        for (x, y) in got.entries().iter().zip(naive_matmul(&a, &b)) {
            assert!((x - y).norm() <= 1e-12);
        }
        let ac = random_complex(&mut rng, 5, 4);
        let got = matmul(&ac, &b).unwrap();
        assert!(!got.is_real());
        for (x, y) in got.entries().iter().zip(naive_matmul(&ac, &b)) {
            assert!((x - y).norm() <= 1e-12);
        }
    }

    #[test]
    fn matmul_dimension_mismatch() {
        let err = matmul(&Mat::zeros(2, 3), &Mat::zeros(2, 3)).unwrap_err();
        assert!(matches!(err, LrpeError::DimensionMismatch(_)));
    }

    #[test]
    fn conj_transpose_cases() {
        let m = Mat::from_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        let t = conj_transpose(&m);
        assert_eq!(t, Mat::from_rows(&[&[1.0, 4.0], &[2.0, 5.0], &[3.0, 6.0]]));
        let i = Mat::from_complex(1, 1, &[Complex::new(0.0, 1.0)]).unwrap();
        assert_eq!(conj_transpose(&i).get(0, 0), Complex::new(0.0, -1.0));
        let mut rng = Rng::new(5);
        let c = random_complex(&mut rng, 3, 4);
        assert_eq!(conj_transpose(&conj_transpose(&c)), c);
    }

    #[test]
    fn fro_norm_cases() {
        assert_eq!(fro_norm(&Mat::zeros(3, 2)), 0.0);
        assert_eq!(fro_norm(&Mat::identity(4)), 2.0);
        assert_eq!(fro_norm(&Mat::from_rows(&[&[3.0, 4.0]])), 5.0);
    }

    #[test]
    fn random_mat_determinism() {
        let a = random_mat(&mut Rng::new(7), 4, 4);
        let b = random_mat(&mut Rng::new(7), 4, 4);
        let c = random_mat(&mut Rng::new(8), 4, 4);
        assert_eq!(a, b);
        assert!(a.is_real());
        assert_ne!(a, c);
    }

    #[test]
    fn random_mat_moments() {
        let m = random_mat(&mut Rng::new(2024), 100, 100);
        let n = m.re().len() as f64;
        let mean = m.re().iter().sum::<f64>() / n;
        let var = m.re().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.05, "mean {mean}");
        assert!((var - 1.0).abs() < 0.1, "var {var}");
    }

    proptest! {
        #[test]
        fn matmul_is_associative(seed in any::<u64>()) {
            let mut rng = Rng::new(seed);
            let a = random_complex(&mut rng, 3, 4);
            let b = random_mat(&mut rng, 4, 5);
            let c = random_complex(&mut rng, 5, 2);
            let left = matmul(&matmul(&a, &b).unwrap(), &c).unwrap();
            let right = matmul(&a, &matmul(&b, &c).unwrap()).unwrap();
            let rel = fro_norm(&left.sub(&right).unwrap()) / fro_norm(&left).max(1e-300);
            prop_assert!(rel <= 1e-9);
        }

        #[test]
        fn conj_transpose_is_involution(seed in any::<u64>(), r in 1usize..6, c in 1usize..6) {
            let m = random_complex(&mut Rng::new(seed), r, c);
            prop_assert_eq!(conj_transpose(&conj_transpose(&m)), m);
        }
    }
}
