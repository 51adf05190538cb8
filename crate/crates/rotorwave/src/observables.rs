//! First and second angular-momentum moments, the squeezing ratio, and the
//! uncertainty-product identity.
//!
//! All expectations are taken with per-shell matrix actions; squared
//! operators are realized as two successive applications, never as explicit
//! squared matrices.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::states::{SphericalState, SqueezeParam};

/// Moments of `(Lx, Ly, Lz)` on a unit-norm state, plus the derived squeezing
/// and uncertainty-product quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableReport<T> {
    /// `(<Lx>, <Ly>, <Lz>)`
    pub mean_l: [T; 3],
    pub var_lx: T,
    pub var_ly: T,
    pub var_lz: T,
    /// `<{Lx, Ly}>` (anticommutator, no 1/2)
    pub anticom_xy: T,
    /// `|<{Lx, Ly}> - <Lx><Ly>|`, the covariance term as printed in the
    /// uncertainty identity this library checks (see `check_uncertainty_product`)
    pub covariance_term: T,
    /// `var_lx / var_ly`; NaN when `var_ly` vanishes
    pub squeeze_ratio: T,
    /// `var_lx * var_ly`
    pub product_lhs: T,
    /// `(1/4) [<Lz>^2 + covariance_term^2]`
    pub product_rhs_bracket: T,
    /// `(1/4) <Lz>^2 / cos^2(alpha)`; requires the generating `eta`, so plain
    /// [`measure`] leaves it `None` and [`measure_with_eta`] fills it
    pub product_rhs_alpha: Option<T>,
    /// Largest imaginary contamination seen in any Hermitian expectation;
    /// a health metric, should sit at rounding level
    pub max_imag: T,
}

/// Measures all moments of a unit-norm state.
pub fn measure<T: Real>(state: &SphericalState<T>) -> ObservableReport<T> {
    let lx_psi = state.apply_lx();
    let ly_psi = state.apply_ly();
    let lz_psi = state.apply_lz();

    let ex = state.inner(&lx_psi);
    let ey = state.inner(&ly_psi);
    let ez = state.inner(&lz_psi);
    let max_imag = ex.im.abs().max(ey.im.abs()).max(ez.im.abs());

    // <A^2> = <A psi | A psi> for Hermitian A
    let exx = lx_psi.inner(&lx_psi).re;
    let eyy = ly_psi.inner(&ly_psi).re;
    let ezz = lz_psi.inner(&lz_psi).re;

    let var_lx = exx - ex.re * ex.re;
    let var_ly = eyy - ey.re * ey.re;
    let var_lz = ezz - ez.re * ez.re;

    // <{Lx, Ly}> = 2 Re <Lx psi | Ly psi>
    let anticom_xy = T::of(2.0) * lx_psi.inner(&ly_psi).re;
    let covariance_term = (anticom_xy - ex.re * ey.re).abs();

    let quarter = T::of(0.25);
    ObservableReport {
        mean_l: [ex.re, ey.re, ez.re],
        var_lx,
        var_ly,
        var_lz,
        anticom_xy,
        covariance_term,
        squeeze_ratio: var_lx / var_ly,
        product_lhs: var_lx * var_ly,
        product_rhs_bracket: quarter * (ez.re * ez.re + covariance_term * covariance_term),
        product_rhs_alpha: None,
        max_imag,
    }
}

/// [`measure`] plus the `alpha`-form right-hand side, which needs the
/// generating squeeze parameter. `None` when `cos(alpha)` vanishes.
pub fn measure_with_eta<T: Real>(
    state: &SphericalState<T>,
    eta: &SqueezeParam<T>,
) -> ObservableReport<T> {
    let mut report = measure(state);
    report.product_rhs_alpha = rhs_alpha(&report, eta);
    report
}

fn rhs_alpha<T: Real>(report: &ObservableReport<T>, eta: &SqueezeParam<T>) -> Option<T> {
    let cos_alpha = eta.alpha().cos();
    if cos_alpha.abs() < T::of(1e-12) {
        return None;
    }
    let mz = report.mean_l[2];
    Some(T::of(0.25) * mz * mz / (cos_alpha * cos_alpha))
}

/// `|squeeze_ratio - |eta|^2|`. Errors when `var_ly` is numerically zero and
/// the ratio is undefined.
pub fn check_squeezing<T: Real>(report: &ObservableReport<T>, eta: &SqueezeParam<T>) -> Result<T> {
    if report.var_ly < T::of(1e-14) {
        return Err(Error::UndefinedRatio {
            var_ly: report.var_ly.as_f64(),
        });
    }
    let target = eta.modulus() * eta.modulus();
    Ok((report.squeeze_ratio - target).abs())
}

/// Deviations of `var_lx * var_ly` from the two printed right-hand sides:
/// the bracket form and the `alpha` form. The second is `None` when
/// `cos(alpha) = 0`. For real `eta` both coincide at `(1/4) <Lz>^2`.
pub fn check_uncertainty_product<T: Real>(
    report: &ObservableReport<T>,
    eta: &SqueezeParam<T>,
) -> (T, Option<T>) {
    let dev_bracket = (report.product_lhs - report.product_rhs_bracket).abs();
    let dev_alpha = rhs_alpha(report, eta).map(|rhs| (report.product_lhs - rhs).abs());
    (dev_bracket, dev_alpha)
}

/// Closed form `<Lz> = eta (N coth(2N) - 1/2)` for the parent with real
/// `eta`; the independent oracle for the measured mean.
pub fn mean_lz_closed_form<T: Real>(eta: T, concentration: T) -> T {
    let two_n = T::of(2.0) * concentration;
    eta * (concentration / two_n.tanh() - T::of(0.5))
}
