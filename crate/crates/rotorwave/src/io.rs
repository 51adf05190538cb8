//! File formats used by the CLI: state JSON, report JSON, scan JSON, and
//! density CSV.
//!
//! Writers are hand-rolled with fixed field order and fixed float formatting
//! (17 significant digits, which round-trips `f64` exactly), so identical
//! inputs produce byte-identical files. Readers accept standard JSON.

use std::io::Write;

use serde::Deserialize;

use crate::dynamics::{DensityGrid, PacketCount, RevivalScanResult};
use crate::error::{Error, Result};
use crate::observables::ObservableReport;
use crate::states::SphericalState;

/// 17 significant digits; non-finite values become JSON null.
fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{:.16e}", x)
    } else {
        "null".to_string()
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => fmt(v),
        None => "null".to_string(),
    }
}

/// Generating parameters embedded in a state file, so downstream commands can
/// recompute closed-form deviations.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct StateFileConfig {
    pub eta_modulus: f64,
    pub eta_phase_alpha: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub k: u32,
    pub omega0: f64,
}

#[derive(Deserialize)]
struct StateFile {
    l_max: usize,
    #[serde(default)]
    config: Option<StateFileConfig>,
    coeffs: Vec<[f64; 2]>,
}

/// State document: `{"l_max": .., "config": {..}?, "coeffs": [[re, im], ..]}`
/// with coefficients ordered by `l` ascending, `m` from `-l` to `l`.
pub fn write_state_json<W: Write + ?Sized>(
    w: &mut W,
    state: &SphericalState<f64>,
    config: Option<&StateFileConfig>,
) -> Result<()> {
    writeln!(w, "{{")?;
    write!(w, "  \"l_max\": {}", state.l_max())?;
    if let Some(c) = config {
        writeln!(w, ",")?;
        writeln!(w, "  \"config\": {{")?;
        writeln!(w, "    \"eta_modulus\": {},", fmt(c.eta_modulus))?;
        writeln!(w, "    \"eta_phase_alpha\": {},", fmt(c.eta_phase_alpha))?;
        writeln!(w, "    \"N\": {},", fmt(c.n))?;
        writeln!(w, "    \"k\": {},", c.k)?;
        writeln!(w, "    \"omega0\": {}", fmt(c.omega0))?;
        write!(w, "  }}")?;
    }
    writeln!(w, ",")?;
    writeln!(w, "  \"coeffs\": [")?;
    let n = state.coeffs().len();
    for (i, c) in state.coeffs().iter().enumerate() {
        let sep = if i + 1 == n { "" } else { "," };
        writeln!(w, "    [{}, {}]{}", fmt(c.re), fmt(c.im), sep)?;
    }
    writeln!(w, "  ]")?;
    writeln!(w, "}}")?;
    Ok(())
}

/// Parses a state document; the coefficient table is renormalized on load
/// (17-digit round trips make this a no-op up to one ulp).
pub fn read_state_json(bytes: &[u8]) -> Result<(SphericalState<f64>, Option<StateFileConfig>)> {
    let file: StateFile =
        serde_json::from_slice(bytes).map_err(|e| Error::Malformed(e.to_string()))?;
    let coeffs = file
        .coeffs
        .iter()
        .map(|[re, im]| num_complex::Complex::new(*re, *im))
        .collect();
    let state = SphericalState::from_coeffs(file.l_max, coeffs)?;
    Ok((state, file.config))
}

/// Deviations from the closed forms, included in a report when the
/// generating configuration is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportDeviations {
    /// `|<Lz> - eta (N coth 2N - 1/2)|`; only defined for real eta and k = 0.
    pub mean_lz_closed_form: Option<f64>,
    pub squeeze_ratio: Option<f64>,
    pub product_bracket: f64,
    pub product_alpha: Option<f64>,
}

/// Flat report document with the observable fields, plus deviation fields
/// when `devs` is present.
pub fn write_report_json<W: Write + ?Sized>(
    w: &mut W,
    report: &ObservableReport<f64>,
    devs: Option<&ReportDeviations>,
) -> Result<()> {
    writeln!(w, "{{")?;
    writeln!(
        w,
        "  \"mean_L\": [{}, {}, {}],",
        fmt(report.mean_l[0]),
        fmt(report.mean_l[1]),
        fmt(report.mean_l[2])
    )?;
    writeln!(w, "  \"var_Lx\": {},", fmt(report.var_lx))?;
    writeln!(w, "  \"var_Ly\": {},", fmt(report.var_ly))?;
    writeln!(w, "  \"var_Lz\": {},", fmt(report.var_lz))?;
    writeln!(w, "  \"anticom_xy\": {},", fmt(report.anticom_xy))?;
    writeln!(w, "  \"covariance_term\": {},", fmt(report.covariance_term))?;
    writeln!(w, "  \"squeeze_ratio\": {},", fmt(report.squeeze_ratio))?;
    writeln!(w, "  \"product_lhs\": {},", fmt(report.product_lhs))?;
    writeln!(w, "  \"product_rhs_bracket\": {},", fmt(report.product_rhs_bracket))?;
    write!(w, "  \"product_rhs_alpha\": {}", fmt_opt(report.product_rhs_alpha))?;
    writeln!(w, ",")?;
    write!(w, "  \"max_imag\": {}", fmt(report.max_imag))?;
    if let Some(d) = devs {
        writeln!(w, ",")?;
        writeln!(
            w,
            "  \"dev_mean_lz_closed_form\": {},",
            fmt_opt(d.mean_lz_closed_form)
        )?;
        writeln!(w, "  \"dev_squeeze_ratio\": {},", fmt_opt(d.squeeze_ratio))?;
        writeln!(w, "  \"dev_product_bracket\": {},", fmt(d.product_bracket))?;
        write!(w, "  \"dev_product_alpha\": {}", fmt_opt(d.product_alpha))?;
    }
    writeln!(w)?;
    writeln!(w, "}}")?;
    Ok(())
}

/// `theta,phi,density` rows, theta-outer / phi-inner, radians.
pub fn write_density_csv<W: Write + ?Sized>(w: &mut W, density: &DensityGrid<f64>) -> Result<()> {
    writeln!(w, "theta,phi,density")?;
    for (i, &theta) in density.thetas().iter().enumerate() {
        for (j, &phi) in density.phis().iter().enumerate() {
            writeln!(w, "{},{},{}", fmt(theta), fmt(phi), fmt(density.values()[(i, j)]))?;
        }
    }
    Ok(())
}

/// Scan document: omega0, T_rev, the `[t, |A(t)|]` trace, and one object per
/// revival event. A ring outcome serializes `q_detected` as the string
/// `"ring"`; fidelity is null when not computed.
pub fn write_scan_json<W: Write + ?Sized>(w: &mut W, scan: &RevivalScanResult<f64>) -> Result<()> {
    writeln!(w, "{{")?;
    writeln!(w, "  \"omega0\": {},", fmt(scan.omega0))?;
    writeln!(w, "  \"T_rev\": {},", fmt(scan.t_rev))?;
    writeln!(w, "  \"samples\": [")?;
    let n = scan.samples.len();
    for (i, (t, a)) in scan.samples.iter().enumerate() {
        let sep = if i + 1 == n { "" } else { "," };
        writeln!(w, "    [{}, {}]{}", fmt(*t), fmt(*a), sep)?;
    }
    writeln!(w, "  ],")?;
    writeln!(w, "  \"events\": [")?;
    let n = scan.events.len();
    for (i, ev) in scan.events.iter().enumerate() {
        let q = match ev.q_detected {
            PacketCount::Count(c) => c.to_string(),
            PacketCount::Ring => "\"ring\"".to_string(),
        };
        let sep = if i + 1 == n { "" } else { "," };
        writeln!(
            w,
            "    {{\"m\": {}, \"n\": {}, \"t\": {}, \"q_expected\": {}, \"q_detected\": {}, \"clone_fidelity\": {}, \"threshold_frac\": {}}}{}",
            ev.m,
            ev.n,
            fmt(ev.t),
            ev.q_expected,
            q,
            fmt_opt(ev.clone_fidelity),
            fmt(ev.threshold_frac),
            sep
        )?;
    }
    writeln!(w, "  ]")?;
    writeln!(w, "}}")?;
    Ok(())
}
