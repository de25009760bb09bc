//! The three-term recurrence behind the polynomial ansatz, and the
//! quantization condition it produces.
//!
//! Substituting `psi(x) = x^s e^{-x^2/2} sum_j c_j x^{2j}` into the
//! dimensionless eigenvalue equation couples the coefficients through
//!
//! ```text
//! c_{j+2} = A_j c_{j+1} + B_j c_j,
//! A_j = -[E + 2g(j+1)(2j+2s+1) - 4j - 2s - 5] / [2(j+2)(2j+2s+3)],
//! B_j = -[E g - g(4j+2s+1) - lambda]        / [2(j+2)(2j+2s+3)].
//! ```
//!
//! The series terminates in a degree-n polynomial iff `c_{n+1} = c_{n+2} = 0`.
//! `c_{n+2} = 0` forces `B_n = 0`, i.e. the termination energy
//! `E = 4n + 2s + 1 + lambda/g`; eliminating E with it gives the reduced
//! coefficients
//!
//! ```text
//! A_j = -[2g^2 (j+1)(2j+2s+1) - 4g(j-n+1) + lambda] / [2g(j+2)(2j+2s+3)],
//! B_j = 2g(j-n) / [(j+2)(2j+2s+3)],
//! ```
//!
//! under which each `c_j` is a polynomial of degree j in lambda. The
//! remaining condition `c_{n+1}(lambda) = 0` is the quantization condition:
//! its n+1 real roots `lambda^(n,1) < ... < lambda^(n,n+1) = 0` are the only
//! couplings at which the model has a degree-n polynomial eigenfunction in
//! this parity sector.
//!
//! The recurrence is seeded by extending it to j = -1 with `c_{-1} = 0`, so
//! that `c_1 = A_{-1} c_0`; this reproduces the known closed forms of
//! `c_1`, `c_2`, and `c_3` exactly, which the tests pin coefficient by
//! coefficient.

use crate::error::{Error, Result};
use crate::model::{validate_g, Parity};
use crate::poly::Poly;

/// The pair (A_j, B_j) of the recurrence at index `j >= -1`, evaluated for a
/// fixed numeric coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceCoeffs {
    pub j: i32,
    pub a: f64,
    pub b: f64,
}

impl RecurrenceCoeffs {
    /// The raw form with the energy E as a free parameter.
    pub fn from_energy(j: i32, s: Parity, g: f64, lambda: f64, energy: f64) -> Self {
        debug_assert!(j >= -1);
        let s = s.index() as f64;
        let jf = j as f64;
        let den = 2.0 * (jf + 2.0) * (2.0 * jf + 2.0 * s + 3.0);
        let a = -(energy + 2.0 * g * (jf + 1.0) * (2.0 * jf + 2.0 * s + 1.0)
            - 4.0 * jf
            - 2.0 * s
            - 5.0)
            / den;
        let b = -(energy * g - g * (4.0 * jf + 2.0 * s + 1.0) - lambda) / den;
        RecurrenceCoeffs { j, a, b }
    }

    /// The reduced form with the termination energy for sector degree `n`
    /// eliminated. `B_n = 0` holds identically here.
    pub fn reduced(j: i32, n: usize, s: Parity, g: f64, lambda: f64) -> Self {
        debug_assert!(j >= -1);
        let s = s.index() as f64;
        let nf = n as f64;
        let jf = j as f64;
        let den = (jf + 2.0) * (2.0 * jf + 2.0 * s + 3.0);
        let a = -(2.0 * g * g * (jf + 1.0) * (2.0 * jf + 2.0 * s + 1.0)
            - 4.0 * g * (jf - nf + 1.0)
            + lambda)
            / (2.0 * g * den);
        let b = 2.0 * g * (jf - nf) / den;
        RecurrenceCoeffs { j, a, b }
    }
}

/// One coefficient `c_j` of the terminating series, as a polynomial in
/// lambda (ascending powers), together with the sector it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaPolynomial {
    coeffs: Vec<f64>,
    n: usize,
    s: Parity,
    g: f64,
}

impl LambdaPolynomial {
    /// Coefficients in ascending powers of lambda.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        Poly(self.coeffs.clone()).degree()
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * lambda + c)
    }

    /// The (n, s, g) context the polynomial was built for.
    pub fn context(&self) -> (usize, Parity, f64) {
        (self.n, self.s, self.g)
    }
}

/// Builds `c_0 .. c_{n+1}` as polynomials in lambda for the sector `(n, s, g)`
/// under the termination energy. `c_0 = 1`; `c_j` has lambda-degree exactly j.
pub fn coefficient_polynomials(n: usize, s: Parity, g: f64) -> Result<Vec<LambdaPolynomial>> {
    validate_g(g)?;
    let wrap = |coeffs: Vec<f64>| LambdaPolynomial {
        coeffs,
        n,
        s,
        g,
    };

    // Polynomials in lambda: A_j = a0 + a1*lambda is linear, B_j lambda-free.
    let mut c_prev = Poly::zero(); // c_{-1}
    let mut c_cur = Poly::constant(1.0); // c_0
    let mut out = Vec::with_capacity(n + 2);
    out.push(wrap(c_cur.0.clone()));
    for j in -1..=(n as i32 - 1) {
        let base = RecurrenceCoeffs::reduced(j, n, s, g, 0.0);
        let jf = j as f64;
        let sf = s.index() as f64;
        let slope = -1.0 / (2.0 * g * (jf + 2.0) * (2.0 * jf + 2.0 * sf + 3.0));
        let a_poly = Poly(vec![base.a, slope]);
        let next = a_poly.mul(&c_cur).add(&c_prev.scale(base.b));
        out.push(wrap(next.0.clone()));
        c_prev = c_cur;
        c_cur = next;
    }
    Ok(out)
}

/// The termination energy `E = 4n + 2s + 1 + lambda/g`. A physical
/// eigenvalue only at quantization roots; a formal termination energy
/// everywhere else.
pub fn termination_energy(n: usize, s: Parity, g: f64, lambda: f64) -> f64 {
    debug_assert!(g > 0.0);
    (4 * n + 2 * s.index() + 1) as f64 + lambda / g
}

/// Solves the quantization condition `c_{n+1}(lambda) = 0`.
///
/// Returns the n+1 roots in ascending order, ending with the exact harmonic
/// root `lambda = 0` (deflated analytically: the constant term of `c_{n+1}`
/// vanishes identically, which is asserted rather than assumed). The
/// remaining n roots come from the companion matrix of the deflated
/// cofactor, polished with two Newton steps on the full `c_{n+1}`.
///
/// Any violation of the expected root structure — a residual constant term,
/// complex roots, positive roots, or near-coincident roots — is a
/// [`Error::QuantizationFailure`], never silently repaired.
pub fn quantization_roots(n: usize, s: Parity, g: f64) -> Result<Vec<f64>> {
    let polys = coefficient_polynomials(n, s, g)?;
    let cnp1 = Poly(polys[n + 1].coefficients().to_vec());
    let scale = cnp1.max_abs_coeff();
    let fail = |detail: String| Error::QuantizationFailure {
        n,
        s: s.index(),
        g,
        detail,
    };

    if cnp1.0[0].abs() > 1e-12 * scale {
        return Err(fail(format!(
            "constant term {:.3e} does not vanish against scale {:.3e}",
            cnp1.0[0], scale
        )));
    }
    if n == 0 {
        return Ok(vec![0.0]);
    }

    // Deflate lambda = 0 and find the remaining roots.
    let cofactor = Poly(cnp1.0[1..].to_vec());
    let raw = cofactor.complex_roots()?;
    if raw.len() != n {
        return Err(fail(format!(
            "cofactor degree {} instead of {}",
            raw.len(),
            n
        )));
    }
    let mut roots = Vec::with_capacity(n + 1);
    for z in raw {
        if z.im.abs() > 1e-9 * z.re.abs().max(1.0) {
            return Err(fail(format!("complex root {} + {}i", z.re, z.im)));
        }
        let mut x = z.re;
        for _ in 0..2 {
            x = cnp1.newton_step(x);
        }
        roots.push(x);
    }
    roots.sort_by(f64::total_cmp);

    let spread = roots[0].abs().max(1.0);
    if *roots.last().unwrap() > 1e-9 * spread {
        return Err(fail(format!("positive root {:.6e}", roots.last().unwrap())));
    }
    roots.push(0.0);
    for w in roots.windows(2) {
        if (w[1] - w[0]).abs() < 1e-8 * spread {
            return Err(fail(format!(
                "near-coincident roots {:.12e} and {:.12e}",
                w[0], w[1]
            )));
        }
    }
    Ok(roots)
}

/// Numeric coefficients `c_0 .. c_{n+extra}` of the terminating series at a
/// fixed coupling, from the reduced recurrence. Used to build states (and,
/// with a deliberately wrong lambda, to demonstrate that the residual check
/// catches non-solutions).
pub(crate) fn evaluate_coefficients(
    n: usize,
    s: Parity,
    g: f64,
    lambda: f64,
    extra: usize,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + extra + 1);
    let mut c_prev = 0.0; // c_{-1}
    let mut c_cur = 1.0; // c_0
    out.push(c_cur);
    for j in -1..(n + extra) as i32 - 1 {
        let rc = RecurrenceCoeffs::reduced(j, n, s, g, lambda);
        let next = rc.a * c_cur + rc.b * c_prev;
        out.push(next);
        c_prev = c_cur;
        c_cur = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    const G_GRID: [f64; 4] = [0.2, 0.5, 1.0, 2.0];
    const PARITIES: [Parity; 2] = [Parity::Even, Parity::Odd];

    /// Closed form of the most negative n=1 root.
    fn lambda_11(s: usize, g: f64) -> f64 {
        -2.0 * g * (g * (2 * s + 1) as f64 + 2.0)
    }

    /// Closed forms of the two nonzero n=2 roots (ascending).
    fn lambda_2(s: usize, g: f64) -> (f64, f64) {
        let s = s as f64;
        let disc =
            (g * g * (4.0 * s * s + 20.0 * s + 25.0) + 4.0 * g * (2.0 * s - 3.0) + 4.0).sqrt();
        (
            -g * (disc + g * (6.0 * s + 7.0) + 6.0),
            g * (disc - g * (6.0 * s + 7.0) - 6.0),
        )
    }

    #[test]
    fn c1_closed_form() {
        // c_1(lambda) = -(4 g n + lambda) / (2g(2s+1)); for n=0 this is
        // -lambda / (2g(2s+1)).
        for s in PARITIES {
            for g in G_GRID {
                let c = coefficient_polynomials(0, s, g).unwrap();
                let c1 = &c[1];
                assert_eq!(c1.degree(), 1);
                assert_abs_diff_eq!(c1.coefficients()[0], 0.0);
                assert_relative_eq!(
                    c1.coefficients()[1],
                    -1.0 / (2.0 * g * (2 * s.index() + 1) as f64),
                    max_relative = 1e-15
                );
            }
        }
    }

    #[test]
    fn c2_closed_form() {
        // c_2(lambda) = lambda (2g^2(2s+1) + 4g + lambda) / (8g^2(2s+1)(2s+3))
        for s in PARITIES {
            for g in G_GRID {
                let sf = (2 * s.index() + 1) as f64;
                let den = 8.0 * g * g * sf * (sf + 2.0);
                let c = coefficient_polynomials(1, s, g).unwrap();
                let c2 = &c[2];
                assert_eq!(c2.degree(), 2);
                assert_abs_diff_eq!(c2.coefficients()[0], 0.0);
                assert_relative_eq!(
                    c2.coefficients()[1],
                    (2.0 * g * g * sf + 4.0 * g) / den,
                    max_relative = 1e-14
                );
                assert_relative_eq!(c2.coefficients()[2], 1.0 / den, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn c3_closed_form() {
        // c_3(lambda) = -lambda (8g^4(2s+1)(2s+3) + 32g^3(2s+3)
        //   + 2g^2 (lambda(6s+7) + 16) + 12 g lambda + lambda^2)
        //   / (48 g^3 (2s+1)(2s+3)(2s+5))
        for s in PARITIES {
            for g in G_GRID {
                let sf = s.index() as f64;
                let den = 48.0
                    * g.powi(3)
                    * (2.0 * sf + 1.0)
                    * (2.0 * sf + 3.0)
                    * (2.0 * sf + 5.0);
                let c = coefficient_polynomials(2, s, g).unwrap();
                let c3 = &c[3];
                assert_eq!(c3.degree(), 3);
                assert_abs_diff_eq!(c3.coefficients()[0], 0.0);
                let lin = -(8.0 * g.powi(4) * (2.0 * sf + 1.0) * (2.0 * sf + 3.0)
                    + 32.0 * g.powi(3) * (2.0 * sf + 3.0)
                    + 32.0 * g * g)
                    / den;
                let quad = -(2.0 * g * g * (6.0 * sf + 7.0) + 12.0 * g) / den;
                let cubic = -1.0 / den;
                assert_relative_eq!(c3.coefficients()[1], lin, max_relative = 1e-13);
                assert_relative_eq!(c3.coefficients()[2], quad, max_relative = 1e-13);
                assert_relative_eq!(c3.coefficients()[3], cubic, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn coefficient_degrees_climb_by_one() {
        let c = coefficient_polynomials(6, Parity::Odd, 0.5).unwrap();
        assert_eq!(c.len(), 8);
        for (j, cj) in c.iter().enumerate().skip(1) {
            assert_eq!(cj.degree(), j, "c_{j} should have lambda-degree {j}");
        }
        assert_eq!(c[0].coefficients(), &[1.0]);
    }

    #[test]
    fn reduced_matches_energy_form() {
        // Substituting the termination energy into the raw coefficients must
        // reproduce the reduced ones for every index used by the recurrence.
        for s in PARITIES {
            for g in G_GRID {
                for n in 0..=8usize {
                    for &lambda in &[-25.0, -6.0, -0.5, 0.0] {
                        let e = termination_energy(n, s, g, lambda);
                        for j in -1..=(n as i32 + 1) {
                            let raw = RecurrenceCoeffs::from_energy(j, s, g, lambda, e);
                            let red = RecurrenceCoeffs::reduced(j, n, s, g, lambda);
                            assert_relative_eq!(raw.a, red.a, max_relative = 1e-13);
                            assert_abs_diff_eq!(raw.b, red.b, epsilon = 1e-13 * red.b.abs().max(1.0));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn b_n_vanishes_identically() {
        for s in PARITIES {
            for g in G_GRID {
                for n in 0..=8usize {
                    let rc = RecurrenceCoeffs::reduced(n as i32, n, s, g, -3.7);
                    assert_eq!(rc.b, 0.0);
                }
            }
        }
    }

    #[test]
    fn termination_energy_values() {
        assert_abs_diff_eq!(termination_energy(0, Parity::Even, 1.0, 0.0), 1.0);
        assert_abs_diff_eq!(termination_energy(1, Parity::Even, 1.0, -6.0), -1.0);
        assert_abs_diff_eq!(termination_energy(2, Parity::Odd, 1.0, 0.0), 11.0);
    }

    #[test]
    fn n0_root_is_only_zero() {
        for s in PARITIES {
            for g in G_GRID {
                assert_eq!(quantization_roots(0, s, g).unwrap(), vec![0.0]);
            }
        }
    }

    #[test]
    fn n1_roots_match_closed_form() {
        for s in PARITIES {
            for g in G_GRID {
                let roots = quantization_roots(1, s, g).unwrap();
                assert_eq!(roots.len(), 2);
                assert_relative_eq!(roots[0], lambda_11(s.index(), g), max_relative = 1e-12);
                assert_eq!(roots[1], 0.0);
            }
        }
    }

    #[test]
    fn n2_roots_match_closed_form() {
        for s in PARITIES {
            for g in G_GRID {
                let roots = quantization_roots(2, s, g).unwrap();
                let (r1, r2) = lambda_2(s.index(), g);
                assert_eq!(roots.len(), 3);
                assert_relative_eq!(roots[0], r1, max_relative = 1e-12);
                assert_relative_eq!(roots[1], r2, max_relative = 1e-12);
                assert_eq!(roots[2], 0.0);
            }
        }
    }

    #[test]
    fn n2_numeric_values_at_unit_g() {
        let roots = quantization_roots(2, Parity::Even, 1.0).unwrap();
        let sqrt17 = 17f64.sqrt();
        assert_relative_eq!(roots[0], -(13.0 + sqrt17), max_relative = 1e-13);
        assert_relative_eq!(roots[1], sqrt17 - 13.0, max_relative = 1e-13);
    }

    #[test]
    fn deep_sector_roots_spot_checks() {
        // Reference values from a 50-digit-arithmetic run of the same
        // construction.
        let r = quantization_roots(6, Parity::Even, 1.0).unwrap();
        assert_relative_eq!(r[0], -144.841711625014568, max_relative = 1e-12);
        assert_relative_eq!(r[3], -43.562572324703417, max_relative = 1e-12);
        let r = quantization_roots(6, Parity::Odd, 1.0).unwrap();
        assert_relative_eq!(r[0], -169.834024108503939, max_relative = 1e-12);
        assert_relative_eq!(r[5], -18.824640296736245, max_relative = 1e-12);
        let r = quantization_roots(6, Parity::Even, 0.2).unwrap();
        assert_relative_eq!(r[0], -8.065609082172216, max_relative = 1e-11);
        let r = quantization_roots(4, Parity::Odd, 0.2).unwrap();
        assert_relative_eq!(r[1], -3.968267756799358, max_relative = 1e-11);
    }

    #[test]
    fn root_structure_holds_through_n8() {
        for s in PARITIES {
            for g in G_GRID {
                for n in 0..=8usize {
                    let roots = quantization_roots(n, s, g).unwrap();
                    assert_eq!(roots.len(), n + 1);
                    assert_eq!(*roots.last().unwrap(), 0.0);
                    for w in roots.windows(2) {
                        assert!(w[0] < w[1], "roots out of order: {w:?}");
                    }
                    let polys = coefficient_polynomials(n, s, g).unwrap();
                    let cnp1 = &polys[n + 1];
                    // The lambda = 0 root is exact by analytic deflation;
                    // for the others, measure the residual against the
                    // evaluation's own cancellation scale sum |c_k| |r|^k
                    // rather than the bare coefficients: deep-sector roots
                    // reach |r| > 250 where individual terms are ~1e6.
                    for &r in roots.iter().filter(|&&r| r != 0.0) {
                        let eval_scale: f64 = cnp1
                            .coefficients()
                            .iter()
                            .enumerate()
                            .map(|(k, c)| c.abs() * r.abs().powi(k as i32))
                            .sum();
                        assert!(
                            cnp1.eval(r).abs() <= 1e-12 * eval_scale,
                            "|c_(n+1)({r})| = {:.3e} too large for n={n}, s={s}, g={g}",
                            cnp1.eval(r).abs()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn evaluate_coefficients_terminates_at_roots() {
        for s in PARITIES {
            for g in G_GRID {
                for n in 0..=6usize {
                    for &lambda in &quantization_roots(n, s, g).unwrap() {
                        let c = evaluate_coefficients(n, s, g, lambda, 3);
                        let scale = c.iter().fold(1.0f64, |m, x| m.max(x.abs()));
                        for trailing in &c[n + 1..] {
                            assert!(trailing.abs() <= 1e-10 * scale);
                        }
                    }
                }
            }
        }
    }
}
