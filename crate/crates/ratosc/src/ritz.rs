//! Variational (Rayleigh-Ritz) approximation in a weighted Gaussian basis,
//! the in-crate companion check for the exact states.
//!
//! Basis functions: `phi_j(x) = x^{2j+s} (1 + g x^2) e^{-x^2/2}` for
//! `j = 0..N`. The `(1 + g x^2)` weight cancels the denominator of the
//! rational potential term, so every matrix element reduces to Gaussian
//! moments `M_k = integral x^{2k} e^{-x^2} dx = sqrt(pi) (2k-1)!! / 2^k`
//! and the assembly is closed-form — no quadrature anywhere.
//!
//! The price of that weight is a catastrophically ill-conditioned overlap
//! matrix: cond(S) is already ~6e19 at N = 22 after diagonal scaling, which
//! is beyond what f64 Cholesky survives. The pipeline therefore runs in
//! double-double arithmetic ([`crate::dd`]) from assembly through the
//! congruence reduction and back-transformation; only the reduced,
//! well-conditioned, symmetric standard eigenproblem is solved in f64, and
//! the eigenvalues are then refined as double-double Rayleigh quotients so
//! they are exactly consistent with the returned eigenvectors. Past
//! N ≈ 34 even double-double runs out of headroom and the factorization
//! reports [`Error::IllConditioned`] instead of returning noise.

use nalgebra::DMatrix;

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::grid::{grid_spectrum, GridSpec};
use crate::model::{validate_g, ModelParams, Parity};

/// Basis size used by the validation suite and the command-line tools.
pub const DEFAULT_BASIS_SIZE: usize = 22;

/// A variational basis: size N, parity sector, and the coupling g baked
/// into the `(1 + g x^2)` weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RRBasisSpec {
    size: usize,
    s: Parity,
    g: f64,
}

impl RRBasisSpec {
    pub fn new(size: usize, s: Parity, g: f64) -> Result<Self> {
        validate_g(g)?;
        if size == 0 {
            return Err(Error::invalid(
                "basis_size",
                0.0,
                "the basis must contain at least one function",
            ));
        }
        Ok(Self { size, s, g })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn parity(&self) -> Parity {
        self.s
    }

    pub fn g(&self) -> f64 {
        self.g
    }
}

/// The Gaussian moment `M_k = integral_R x^{2k} e^{-x^2} dx`.
///
/// `M_0 = sqrt(pi)` and `M_{k+1} = M_k (2k+1)/2`. Overflows f64 near
/// k = 171 and reports [`Error::Range`] there instead of returning inf.
pub fn gaussian_moment(k: usize) -> Result<f64> {
    let mut m = std::f64::consts::PI.sqrt();
    for j in 0..k {
        m *= (2 * j + 1) as f64 / 2.0;
        if !m.is_finite() {
            return Err(Error::Range {
                what: "Gaussian moment",
                at: j + 1,
            });
        }
    }
    Ok(m)
}

/// `M_0 .. M_{count-1}` in double-double precision.
pub(crate) fn gaussian_moments_dd(count: usize) -> Result<Vec<Dd>> {
    let mut out = Vec::with_capacity(count);
    let mut m = Dd::PI.sqrt();
    out.push(m);
    for j in 0..count.saturating_sub(1) {
        m = m * ((2 * j + 1) as f64) / 2.0;
        if !m.hi.is_finite() {
            return Err(Error::Range {
                what: "Gaussian moment",
                at: j + 1,
            });
        }
        out.push(m);
    }
    Ok(out)
}

/// Hamiltonian and overlap matrices of a basis at a fixed coupling lambda.
/// The authoritative entries are double-double; the f64 views exist for
/// inspection and external cross-checks.
#[derive(Debug, Clone)]
pub struct RRMatrices {
    spec: RRBasisSpec,
    lambda: f64,
    h: DMatrix<f64>,
    s: DMatrix<f64>,
    pub(crate) h_dd: Vec<Dd>,
    pub(crate) s_dd: Vec<Dd>,
}

impl RRMatrices {
    pub fn spec(&self) -> &RRBasisSpec {
        &self.spec
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// f64 view of the Hamiltonian matrix.
    pub fn hamiltonian(&self) -> &DMatrix<f64> {
        &self.h
    }

    /// f64 view of the overlap matrix.
    pub fn overlap(&self) -> &DMatrix<f64> {
        &self.s
    }
}

/// The three monomial terms of `phi'` for prefactor power p:
/// `phi' = [p x^{p-1} + ((p+2) g - 1) x^{p+1} - g x^{p+3}] e^{-x^2/2}`,
/// as (coefficient, power) pairs with the vanishing p = 0 term dropped.
fn derivative_terms(p: usize, g: f64) -> Vec<(Dd, usize)> {
    let pf = p as f64;
    let mut t = Vec::with_capacity(3);
    if p > 0 {
        t.push((Dd::from_f64(pf), p - 1));
    }
    t.push((Dd::prod(pf + 2.0, g) - Dd::ONE, p + 1));
    t.push((-Dd::from_f64(g), p + 3));
    t
}

/// Assembles H and S for the sector basis at coupling `lambda`. All entries
/// are exact moment combinations evaluated in double-double arithmetic:
/// with m = a + b + s,
///
/// ```text
/// S_ab            = M_m     + 2g M_{m+1} + g^2 M_{m+2}
/// <x^2>_ab        = M_{m+1} + 2g M_{m+2} + g^2 M_{m+3}
/// <rational>_ab   = lambda (M_{m+1} + g M_{m+2})
/// T_ab            = integral phi_a' phi_b'   (by parts; three-term form)
/// ```
pub fn assemble_matrices(lambda: f64, spec: RRBasisSpec) -> Result<RRMatrices> {
    if !lambda.is_finite() {
        return Err(Error::invalid("lambda", lambda, "coupling must be finite"));
    }
    let n = spec.size;
    let s_idx = spec.s.index();
    let g = spec.g;
    let g2 = Dd::prod(g, g);
    let m = gaussian_moments_dd(2 * n + s_idx + 2)?;

    let mut h_dd = vec![Dd::ZERO; n * n];
    let mut s_dd = vec![Dd::ZERO; n * n];
    for a in 0..n {
        let ta = derivative_terms(2 * a + s_idx, g);
        for b in a..n {
            let mm = a + b + s_idx;
            let overlap = m[mm] + m[mm + 1] * (2.0 * g) + m[mm + 2] * g2;
            let x2 = m[mm + 1] + m[mm + 2] * (2.0 * g) + m[mm + 3] * g2;
            let rational = (m[mm + 1] + m[mm + 2] * g) * lambda;
            let mut kinetic = Dd::ZERO;
            for &(ca, ea) in &ta {
                for &(cb, eb) in &derivative_terms(2 * b + s_idx, g) {
                    // ea + eb is always even, so this is a plain moment.
                    kinetic = kinetic + ca * cb * m[(ea + eb) / 2];
                }
            }
            let h = kinetic + x2 + rational;
            h_dd[a * n + b] = h;
            h_dd[b * n + a] = h;
            s_dd[a * n + b] = overlap;
            s_dd[b * n + a] = overlap;
        }
    }

    let h = DMatrix::from_fn(n, n, |r, c| h_dd[r * n + c].to_f64());
    let s = DMatrix::from_fn(n, n, |r, c| s_dd[r * n + c].to_f64());
    Ok(RRMatrices {
        spec,
        lambda,
        h,
        s,
        h_dd,
        s_dd,
    })
}

/// Solution of the generalized problem `H v = E S v`.
#[derive(Debug, Clone)]
pub struct RRSolution {
    spec: RRBasisSpec,
    lambda: f64,
    eigenvalues: Vec<f64>,
    /// Column-major: vector k occupies `[k*size .. (k+1)*size]`.
    vectors: Vec<f64>,
    pub(crate) vectors_dd: Vec<Dd>,
    converged_limit: usize,
}

impl RRSolution {
    pub fn spec(&self) -> &RRBasisSpec {
        &self.spec
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// All N variational eigenvalues, ascending. Within one parity sector
    /// the k-th entry approximates (from above) the level with node count
    /// `nu = 2k + s`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Basis coefficients of the k-th eigenvector, S-normalized, with the
    /// largest-magnitude component made positive.
    pub fn coefficients(&self, k: usize) -> &[f64] {
        let n = self.spec.size;
        &self.vectors[k * n..(k + 1) * n]
    }

    /// Indices below this are converged in the variational sense that basis
    /// truncation, not conditioning, limits their accuracy (N/2 by
    /// construction). Higher indices are returned but untrustworthy.
    pub fn converged_limit(&self) -> usize {
        self.converged_limit
    }
}

fn cholesky_dd(a: &[Dd], n: usize) -> Result<Vec<Dd>> {
    let mut l = vec![Dd::ZERO; n * n];
    for r in 0..n {
        for c in 0..=r {
            let mut sum = a[r * n + c];
            for k in 0..c {
                sum = sum - l[r * n + k] * l[c * n + k];
            }
            if r == c {
                if !(sum.hi > 0.0) {
                    return Err(Error::IllConditioned {
                        pivot: r,
                        largest_usable: r,
                    });
                }
                l[r * n + r] = sum.sqrt();
            } else {
                l[r * n + c] = sum / l[c * n + c];
            }
        }
    }
    Ok(l)
}

/// Solves L Y = B column by column (L lower triangular, all row-major).
fn forward_solve_matrix(l: &[Dd], b: &[Dd], n: usize) -> Vec<Dd> {
    let mut y = vec![Dd::ZERO; n * n];
    for j in 0..n {
        for i in 0..n {
            let mut sum = b[i * n + j];
            for k in 0..i {
                sum = sum - l[i * n + k] * y[k * n + j];
            }
            y[i * n + j] = sum / l[i * n + i];
        }
    }
    y
}

/// Solves L^T u = w.
fn back_solve_transposed(l: &[Dd], w: &[Dd], n: usize) -> Vec<Dd> {
    let mut u = vec![Dd::ZERO; n];
    for i in (0..n).rev() {
        let mut sum = w[i];
        for k in i + 1..n {
            sum = sum - l[k * n + i] * u[k];
        }
        u[i] = sum / l[i * n + i];
    }
    u
}

fn quad_form(mat: &[Dd], n: usize, a: &[Dd], b: &[Dd]) -> Dd {
    let mut acc = Dd::ZERO;
    for r in 0..n {
        let mut row = Dd::ZERO;
        for c in 0..n {
            row = row + mat[r * n + c] * b[c];
        }
        acc = acc + a[r] * row;
    }
    acc
}

/// Solves `H v = E S v` by double-double congruence reduction.
///
/// Pipeline: scale to unit overlap diagonal, Cholesky-factor the scaled
/// overlap (double-double; breakdown is reported as
/// [`Error::IllConditioned`] with the largest leading block that did
/// factor), form the reduced matrix `C = L^-1 H~ L^-T`, solve the
/// well-conditioned symmetric f64 eigenproblem, back-transform the
/// eigenvectors in double-double, S-normalize them, and replace each f64
/// eigenvalue with the double-double Rayleigh quotient of its vector.
pub fn solve_generalized(m: &RRMatrices) -> Result<RRSolution> {
    let n = m.spec.size;
    let d: Vec<Dd> = (0..n).map(|i| m.s_dd[i * n + i].sqrt().recip()).collect();
    let scaled = |mat: &[Dd]| -> Vec<Dd> {
        let mut out = vec![Dd::ZERO; n * n];
        for r in 0..n {
            for c in 0..n {
                out[r * n + c] = d[r] * d[c] * mat[r * n + c];
            }
        }
        out
    };

    let l = cholesky_dd(&scaled(&m.s_dd), n)?;
    let y = forward_solve_matrix(&l, &scaled(&m.h_dd), n);
    let mut yt = vec![Dd::ZERO; n * n];
    for r in 0..n {
        for c in 0..n {
            yt[c * n + r] = y[r * n + c];
        }
    }
    let z = forward_solve_matrix(&l, &yt, n);

    let reduced = DMatrix::from_fn(n, n, |r, c| {
        0.5 * (z[r * n + c].to_f64() + z[c * n + r].to_f64())
    });
    let se = nalgebra::SymmetricEigen::new(reduced);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut vectors = vec![0.0f64; n * n];
    let mut vectors_dd = vec![Dd::ZERO; n * n];
    for (k, &src) in order.iter().enumerate() {
        let w: Vec<Dd> = (0..n)
            .map(|i| Dd::from_f64(se.eigenvectors[(i, src)]))
            .collect();
        let mut v = back_solve_transposed(&l, &w, n);
        for (vi, di) in v.iter_mut().zip(&d) {
            *vi = *vi * *di;
        }
        let norm = quad_form(&m.s_dd, n, &v, &v).sqrt().recip();
        for vi in v.iter_mut() {
            *vi = *vi * norm;
        }
        let mut amax = 0;
        for i in 1..n {
            if v[i].hi.abs() > v[amax].hi.abs() {
                amax = i;
            }
        }
        if v[amax].hi < 0.0 {
            for vi in v.iter_mut() {
                *vi = -*vi;
            }
        }

        let rq = (quad_form(&m.h_dd, n, &v, &v) / quad_form(&m.s_dd, n, &v, &v)).to_f64();
        let raw = se.eigenvalues[src];
        if (rq - raw).abs() > 1e-6 * rq.abs().max(1.0) {
            return Err(Error::Solver(format!(
                "Rayleigh-quotient refinement moved eigenvalue {k} from {raw} to {rq}; \
                 the congruence reduction is unreliable at this size"
            )));
        }
        eigenvalues.push(rq);
        for i in 0..n {
            vectors[k * n + i] = v[i].to_f64();
            vectors_dd[k * n + i] = v[i];
        }
    }
    for w in eigenvalues.windows(2) {
        if w[1] < w[0] - 1e-9 * w[0].abs().max(1.0) {
            return Err(Error::Solver(
                "eigenvalues not ascending after refinement".into(),
            ));
        }
    }

    Ok(RRSolution {
        spec: m.spec,
        lambda: m.lambda,
        eigenvalues,
        vectors,
        vectors_dd,
        converged_limit: n / 2,
    })
}

/// The k lowest variational eigenvalues of the `(lambda, g, s)` problem in
/// a basis of the given size. Convenience wrapper over assembly and solve.
pub fn rr_spectrum(lambda: f64, g: f64, s: Parity, size: usize, k: usize) -> Result<Vec<f64>> {
    let spec = RRBasisSpec::new(size, s, g)?;
    if k > size {
        return Err(Error::invalid(
            "k",
            k as f64,
            "cannot request more eigenvalues than basis functions",
        ));
    }
    let sol = solve_generalized(&assemble_matrices(lambda, spec)?)?;
    Ok(sol.eigenvalues[..k].to_vec())
}

/// Expectation values `(<x^2/(1+gx^2)>, <x^4/(1+gx^2)^2>)` in the idx-th
/// variational state. The weight in the basis again cancels denominators:
/// both operators reduce to plain moment combinations,
/// `P_ab = M_{m+1} + g M_{m+2}` and `Q_ab = M_{m+2}`.
pub fn expectation_values(sol: &RRSolution, idx: usize) -> Result<(f64, f64)> {
    let n = sol.spec.size;
    if idx >= n {
        return Err(Error::invalid(
            "idx",
            idx as f64,
            "state index exceeds basis size",
        ));
    }
    let s_idx = sol.spec.s.index();
    let g = sol.spec.g;
    let m = gaussian_moments_dd(2 * n + s_idx + 2)?;
    let g2 = Dd::prod(g, g);
    let v = &sol.vectors_dd[idx * n..(idx + 1) * n];

    let (mut p, mut q, mut ss) = (Dd::ZERO, Dd::ZERO, Dd::ZERO);
    for a in 0..n {
        for b in 0..n {
            let mm = a + b + s_idx;
            let vv = v[a] * v[b];
            p = p + vv * (m[mm + 1] + m[mm + 2] * g);
            q = q + vv * m[mm + 2];
            ss = ss + vv * (m[mm] + m[mm + 1] * (2.0 * g) + m[mm + 2] * g2);
        }
    }
    Ok(((p / ss).to_f64(), (q / ss).to_f64()))
}

/// Outcome of a Hellmann-Feynman consistency check: a finite-difference
/// slope of the energy against the matching operator expectation value.
#[derive(Debug, Clone, Copy)]
pub struct HftCheck {
    pub fd_slope: f64,
    pub hft_value: f64,
    pub abs_diff: f64,
}

fn sector_index(nu: usize, s: Parity) -> Result<usize> {
    if nu % 2 != s.index() {
        return Err(Error::invalid(
            "nu",
            nu as f64,
            "node count parity does not match the requested sector",
        ));
    }
    Ok((nu - s.index()) / 2)
}

/// Hellmann-Feynman in lambda: `dE/d lambda = <x^2/(1+gx^2)>`.
///
/// The finite-difference side re-solves the variational problem at
/// `lambda ± h` (the basis does not depend on lambda, so the variational
/// energy is differentiable in it); the expectation side uses the state at
/// lambda itself.
pub fn hft_lambda_check(lambda: f64, g: f64, s: Parity, nu: usize, h: f64) -> Result<HftCheck> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid("h", h, "step must be positive and finite"));
    }
    let idx = sector_index(nu, s)?;
    let spec = RRBasisSpec::new(DEFAULT_BASIS_SIZE, s, g)?;
    if idx >= spec.size() {
        return Err(Error::invalid("nu", nu as f64, "state beyond basis size"));
    }
    let energy = |lam: f64| -> Result<f64> {
        Ok(solve_generalized(&assemble_matrices(lam, spec)?)?.eigenvalues[idx])
    };
    let fd_slope = (energy(lambda + h)? - energy(lambda - h)?) / (2.0 * h);
    let sol = solve_generalized(&assemble_matrices(lambda, spec)?)?;
    let (x2w, _) = expectation_values(&sol, idx)?;
    Ok(HftCheck {
        fd_slope,
        hft_value: x2w,
        abs_diff: (fd_slope - x2w).abs(),
    })
}

/// Hellmann-Feynman in g: `dE/dg = -lambda <x^4/(1+gx^2)^2>`.
///
/// The finite-difference side must not come from this module: the basis
/// itself depends on g, so variational energies at g ± h live in different
/// bases and their difference quotient carries basis-change noise. The
/// slope is taken from the independent grid solver instead, at the global
/// level index nu; the expectation side is variational at (lambda, g).
pub fn hft_g_check(lambda: f64, g: f64, s: Parity, nu: usize, h: f64) -> Result<HftCheck> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid("h", h, "step must be positive and finite"));
    }
    let idx = sector_index(nu, s)?;
    let grid_energy = |gg: f64| -> Result<f64> {
        let params = ModelParams::new(gg, lambda, s)?;
        let levels = grid_spectrum(&GridSpec::with_defaults(params), nu + 1)?;
        Ok(levels[nu].energy)
    };
    let fd_slope = (grid_energy(g + h)? - grid_energy(g - h)?) / (2.0 * h);
    let spec = RRBasisSpec::new(DEFAULT_BASIS_SIZE, s, g)?;
    let sol = solve_generalized(&assemble_matrices(lambda, spec)?)?;
    let (_, x4w2) = expectation_values(&sol, idx)?;
    let hft_value = -lambda * x4w2;
    Ok(HftCheck {
        fd_slope,
        hft_value,
        abs_diff: (fd_slope - hft_value).abs(),
    })
}
