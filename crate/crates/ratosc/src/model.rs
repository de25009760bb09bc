//! The physical model and its dimensionless reduction.
//!
//! The underlying Hamiltonian is
//!
//! ```text
//! H = -hbar^2/(2m) d^2/dX^2 + V1 X^2 + V2 X^2 / (X^2 + x0^2),
//! ```
//!
//! a harmonic well with a rational perturbation that saturates at V2 for
//! |X| >> x0. Choosing the length unit L = [hbar^2/(2 m V1)]^(1/4) and the
//! energy unit hbar * sqrt(V1/(2m)) turns it into the dimensionless operator
//!
//! ```text
//! H = -d^2/dx^2 + x^2 + lambda x^2 / (1 + g x^2),
//! lambda = V2 / (V1 x0^2),      g = hbar / (sqrt(2 m V1) x0^2).
//! ```
//!
//! Everything downstream works exclusively with the dimensionless form;
//! [`PhysicalParams`] exists only as the entry point for the reduction.

use crate::error::{Error, Result};

/// Parity sector of an eigenfunction: even states carry no factor of `x`,
/// odd states carry one (and with it a forced node at the origin).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// The index `s` used throughout the formulas: 0 for even, 1 for odd.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    /// Inverse of [`Parity::index`].
    pub fn from_index(s: usize) -> Result<Self> {
        match s {
            0 => Ok(Parity::Even),
            1 => Ok(Parity::Odd),
            _ => Err(Error::invalid("s", s as f64, "parity index must be 0 or 1")),
        }
    }

    /// Parity sector containing the state with `nu` nodes.
    pub fn of_node_count(nu: usize) -> Self {
        if nu % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Parameters of the physical Hamiltonian, before reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    mass: f64,
    hbar: f64,
    v1: f64,
    v2: f64,
    x0: f64,
}

impl PhysicalParams {
    /// Validates `mass, hbar, v1 > 0` and `x0 != 0`; `v2` may have any sign.
    pub fn new(mass: f64, hbar: f64, v1: f64, v2: f64, x0: f64) -> Result<Self> {
        for (name, value) in [("mass", mass), ("hbar", hbar), ("v1", v1)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::invalid(name, value, "must be finite and positive"));
            }
        }
        if !v2.is_finite() {
            return Err(Error::invalid("v2", v2, "must be finite"));
        }
        if x0 == 0.0 || !x0.is_finite() {
            return Err(Error::invalid("x0", x0, "must be finite and nonzero"));
        }
        Ok(Self {
            mass,
            hbar,
            v1,
            v2,
            x0,
        })
    }
}

/// Result of [`reduce_to_dimensionless`]: the dimensionless couplings plus
/// the units that convert back to physical quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reduction {
    /// Coupling of the rational term, `V2 / (V1 x0^2)`.
    pub lambda: f64,
    /// Shape parameter of the rational term, `hbar / (sqrt(2 m V1) x0^2)`.
    pub g: f64,
    /// Length unit `L = [hbar^2 / (2 m V1)]^(1/4)`.
    pub length_unit: f64,
    /// Energy unit `hbar sqrt(V1 / (2m))`.
    pub energy_unit: f64,
}

/// Maps physical parameters to the dimensionless couplings (lambda, g) and
/// the accompanying length and energy units.
pub fn reduce_to_dimensionless(p: &PhysicalParams) -> Reduction {
    let root = (2.0 * p.mass * p.v1).sqrt();
    Reduction {
        lambda: p.v2 / (p.v1 * p.x0 * p.x0),
        g: p.hbar / (root * p.x0 * p.x0),
        length_unit: (p.hbar * p.hbar / (2.0 * p.mass * p.v1)).powf(0.25),
        energy_unit: p.hbar * (p.v1 / (2.0 * p.mass)).sqrt(),
    }
}

/// One dimensionless problem instance: the potential couplings plus the
/// parity sector under study.
///
/// `g = 0` is deliberately excluded: the termination energy divides by `g`,
/// and the harmonic limit is reached by `lambda = 0` instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    g: f64,
    lambda: f64,
    s: Parity,
}

impl ModelParams {
    pub fn new(g: f64, lambda: f64, s: Parity) -> Result<Self> {
        validate_g(g)?;
        if !lambda.is_finite() {
            return Err(Error::invalid("lambda", lambda, "must be finite"));
        }
        Ok(Self { g, lambda, s })
    }

    #[inline]
    pub fn g(&self) -> f64 {
        self.g
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn parity(&self) -> Parity {
        self.s
    }

    /// The dimensionless potential `x^2 + lambda x^2 / (1 + g x^2)`.
    ///
    /// Even in `x`; the denominator never vanishes on the real line because
    /// `g > 0`. For `lambda = 0` this is exactly the harmonic `x^2`, and for
    /// `|x| -> inf` it approaches `x^2 + lambda/g`.
    #[inline]
    pub fn potential(&self, x: f64) -> f64 {
        let x2 = x * x;
        x2 + self.lambda * x2 / (1.0 + self.g * x2)
    }
}

pub(crate) fn validate_g(g: f64) -> Result<()> {
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::invalid("g", g, "must be finite and positive"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn reduction_unit_parameters() {
        let p = PhysicalParams::new(0.5, 1.0, 1.0, -6.0, 1.0).unwrap();
        let r = reduce_to_dimensionless(&p);
        assert_relative_eq!(r.lambda, -6.0);
        assert_relative_eq!(r.g, 1.0);
        assert_relative_eq!(r.length_unit, 1.0);
        assert_relative_eq!(r.energy_unit, 1.0);
    }

    #[test]
    fn reduction_scaled_well() {
        // m = 1/2, hbar = 1, V1 = 4: sqrt(2 m V1) = 2.
        let p = PhysicalParams::new(0.5, 1.0, 4.0, 0.0, 1.0).unwrap();
        let r = reduce_to_dimensionless(&p);
        assert_relative_eq!(r.lambda, 0.0);
        assert_relative_eq!(r.g, 0.5);
        assert_relative_eq!(r.length_unit, 0.25f64.powf(0.25));
        assert_relative_eq!(r.energy_unit, 2.0);
    }

    #[test]
    fn reduction_offset_radius() {
        let p = PhysicalParams::new(0.5, 1.0, 1.0, -3.0, std::f64::consts::SQRT_2).unwrap();
        let r = reduce_to_dimensionless(&p);
        assert_relative_eq!(r.lambda, -1.5, max_relative = 1e-15);
        assert_relative_eq!(r.g, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn physical_params_rejects_bad_values() {
        assert!(PhysicalParams::new(0.0, 1.0, 1.0, 0.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, -1.0, 1.0, 0.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, 1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn model_params_rejects_nonpositive_g() {
        assert!(ModelParams::new(0.0, 1.0, Parity::Even).is_err());
        assert!(ModelParams::new(-1.0, 1.0, Parity::Even).is_err());
        assert!(ModelParams::new(f64::INFINITY, 1.0, Parity::Even).is_err());
        assert!(ModelParams::new(1.0, f64::NAN, Parity::Even).is_err());
    }

    #[test]
    fn potential_point_values() {
        let p = ModelParams::new(1.0, 0.0, Parity::Even).unwrap();
        assert_abs_diff_eq!(p.potential(0.0), 0.0);
        assert_abs_diff_eq!(p.potential(2.0), 4.0);

        let p = ModelParams::new(1.0, -6.0, Parity::Even).unwrap();
        // 1 + (-6)/2 = -2 at x = 1.
        assert_abs_diff_eq!(p.potential(1.0), -2.0);
    }

    #[test]
    fn potential_is_even() {
        let p = ModelParams::new(0.7, -3.3, Parity::Odd).unwrap();
        for i in 0..200 {
            let x = -10.0 + 0.1 * i as f64;
            assert_abs_diff_eq!(p.potential(x), p.potential(-x), epsilon = 0.0);
        }
    }

    #[test]
    fn potential_asymptote() {
        // potential(x) - x^2 - lambda/g = -lambda/(g (1 + g x^2)), which is
        // bounded by |lambda| / (g^2 x^2) for large |x|.
        for &(lambda, g) in &[(-6.0, 1.0), (-2.5, 0.5), (3.0, 2.0)] {
            let p = ModelParams::new(g, lambda, Parity::Even).unwrap();
            let x: f64 = 50.0;
            let err = (p.potential(x) - x * x - lambda / g).abs();
            assert!(err <= lambda.abs() / (g * g * x * x) + 1e-12);
        }
    }

    #[test]
    fn harmonic_limit_is_exact() {
        let p = ModelParams::new(0.3, 0.0, Parity::Even).unwrap();
        for i in 0..100 {
            let x = 0.17 * i as f64;
            assert_eq!(p.potential(x), x * x);
        }
    }

    #[test]
    fn parity_round_trip() {
        assert_eq!(Parity::from_index(0).unwrap(), Parity::Even);
        assert_eq!(Parity::from_index(1).unwrap(), Parity::Odd);
        assert!(Parity::from_index(2).is_err());
        assert_eq!(Parity::of_node_count(4), Parity::Even);
        assert_eq!(Parity::of_node_count(7), Parity::Odd);
    }
}
