//! Dense real polynomials: the small amount of polynomial algebra shared by
//! the quantization condition (polynomials in lambda), node counting
//! (polynomials in t = x^2), and the residual check (polynomials in x).

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

/// A polynomial with real coefficients in ascending powers. The coefficient
/// vector is never empty; trailing (near-)zeros are allowed and ignored by
/// [`Poly::degree`].
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Poly(pub Vec<f64>);

impl Poly {
    pub fn zero() -> Self {
        Poly(vec![0.0])
    }

    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    /// Degree after trimming exact-zero leading coefficients.
    pub fn degree(&self) -> usize {
        let mut d = self.0.len() - 1;
        while d > 0 && self.0[d] == 0.0 {
            d -= 1;
        }
        d
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn deriv(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly::zero();
        }
        Poly(
            self.0[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| (k + 1) as f64 * c)
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![0.0; n];
        for (k, c) in self.0.iter().enumerate() {
            out[k] += c;
        }
        for (k, c) in other.0.iter().enumerate() {
            out[k] += c;
        }
        Poly(out)
    }

    pub fn scale(&self, f: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * f).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (a, ca) in self.0.iter().enumerate() {
            if *ca == 0.0 {
                continue;
            }
            for (b, cb) in other.0.iter().enumerate() {
                out[a + b] += ca * cb;
            }
        }
        Poly(out)
    }

    /// Multiply by x^k.
    pub fn shift_up(&self, k: usize) -> Poly {
        let mut out = vec![0.0; k];
        out.extend_from_slice(&self.0);
        Poly(out)
    }

    /// All complex roots via the companion matrix of the monic normalization.
    /// Intended for the small degrees (<= ~10) that arise here.
    pub fn complex_roots(&self) -> Result<Vec<Complex<f64>>> {
        let d = self.degree();
        if d == 0 {
            return Ok(Vec::new());
        }
        let lead = self.0[d];
        if lead == 0.0 || !lead.is_finite() {
            return Err(Error::Solver(
                "companion matrix requires a finite nonzero leading coefficient".into(),
            ));
        }
        let mut m = DMatrix::<f64>::zeros(d, d);
        for r in 1..d {
            m[(r, r - 1)] = 1.0;
        }
        for r in 0..d {
            m[(r, d - 1)] = -self.0[r] / lead;
        }
        let eig = m.complex_eigenvalues();
        Ok(eig.iter().copied().collect())
    }

    /// One Newton step for a (near-)root; returns the input unchanged when
    /// the derivative underflows to keep polishing loss-free.
    pub fn newton_step(&self, x: f64) -> f64 {
        let fp = self.deriv().eval(x);
        if fp == 0.0 || !fp.is_finite() {
            return x;
        }
        x - self.eval(x) / fp
    }
}
