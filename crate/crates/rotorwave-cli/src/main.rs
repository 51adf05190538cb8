//! Command-line front end: build packets, measure observables, evolve, and
//! scan for fractional revivals. Artifacts are deterministic: the same flags
//! produce byte-identical JSON/CSV.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rotorwave::dynamics::{density, evolve, scan_revivals};
use rotorwave::io::{
    read_state_json, write_density_csv, write_report_json, write_scan_json, write_state_json,
    ReportDeviations, StateFileConfig,
};
use rotorwave::observables::{
    check_squeezing, check_uncertainty_product, mean_lz_closed_form, measure, measure_with_eta,
};
use rotorwave::states::{auto_lmax, build_packet, SqueezeParam, WavepacketSpec};
use rotorwave::{Error, SphereGrid};

#[derive(Parser)]
#[command(name = "rotorwave", version, about = "Squeezed wave packets on the sphere and their rigid-rotor revivals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct PacketArgs {
    /// Squeeze modulus |eta| (0 <= |eta| <= 1)
    #[arg(long = "eta")]
    eta: f64,
    /// Squeeze phase alpha in radians (eta = |eta| e^{i alpha})
    #[arg(long = "alpha", default_value_t = 0.0)]
    alpha: f64,
    /// Concentration parameter N > 0
    #[arg(long = "N")]
    n: f64,
    /// Ladder index k >= 0
    #[arg(long = "k", default_value_t = 0)]
    k: u32,
    /// Spectral frequency omega0 > 0 (E_l = omega0 l(l+1), hbar = 1)
    #[arg(long = "omega0", default_value_t = 1.0)]
    omega0: f64,
    /// Basis truncation; picked automatically (tail tolerance 1e-10) if absent
    #[arg(long = "lmax")]
    l_max: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a packet and write its state file
    Build {
        #[command(flatten)]
        packet: PacketArgs,
        /// Output path for the state JSON (stdout if absent)
        #[arg(long = "out")]
        out: Option<PathBuf>,
    },
    /// Measure angular-momentum statistics of a state file
    Observe {
        /// State JSON produced by `build` or `evolve`
        state: PathBuf,
        /// Output path for the report JSON (stdout if absent)
        #[arg(long = "out")]
        out: Option<PathBuf>,
    },
    /// Evolve a state file to t/T_rev and export its density
    Evolve {
        /// State JSON produced by `build` or `evolve`
        state: PathBuf,
        /// Time in units of T_rev = 2 pi / omega0
        #[arg(long = "t", allow_hyphen_values = true)]
        t_over_trev: f64,
        /// Output path for the evolved state JSON (stdout if absent)
        #[arg(long = "out")]
        out: Option<PathBuf>,
        /// Output path for the density CSV (skipped if absent)
        #[arg(long = "density")]
        density_out: Option<PathBuf>,
        /// Grid oversampling factor >= 1 for the density export
        #[arg(long = "oversample", default_value_t = 1.0)]
        oversample: f64,
    },
    /// Sample |A(t)| over one revival period and probe fractional revivals
    Scan {
        #[command(flatten)]
        packet: PacketArgs,
        /// Comma-separated fractions m/n, e.g. "1/3,1/4"
        #[arg(long = "fractions", default_value = "")]
        fractions: String,
        /// Number of uniform time samples over [0, T_rev] (>= 2)
        #[arg(long = "samples", default_value_t = 256)]
        samples: usize,
        /// Packet-detection threshold as a fraction of the profile maximum
        #[arg(long = "threshold", default_value_t = 0.5)]
        threshold: f64,
        /// Output path for the scan JSON (stdout if absent)
        #[arg(long = "out")]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// 2 for usage/validation problems, 3 for numerical non-convergence.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::NoConvergence { .. } | Error::Truncation { .. } | Error::DegenerateResult { .. } => 3,
        _ => 2,
    }
}

fn run(command: Command) -> rotorwave::Result<()> {
    match command {
        Command::Build { packet, out } => cmd_build(&packet, out.as_deref()),
        Command::Observe { state, out } => cmd_observe(&state, out.as_deref()),
        Command::Evolve {
            state,
            t_over_trev,
            out,
            density_out,
            oversample,
        } => cmd_evolve(&state, t_over_trev, out.as_deref(), density_out.as_deref(), oversample),
        Command::Scan {
            packet,
            fractions,
            samples,
            threshold,
            out,
        } => cmd_scan(&packet, &fractions, samples, threshold, out.as_deref()),
    }
}

fn packet_spec(args: &PacketArgs) -> rotorwave::Result<WavepacketSpec<f64>> {
    let eta = SqueezeParam::from_polar(args.eta, args.alpha)?;
    WavepacketSpec::new(eta, args.n, args.k, args.omega0)
}

fn resolve_lmax(spec: &WavepacketSpec<f64>, requested: Option<usize>) -> rotorwave::Result<usize> {
    match requested {
        Some(l) => Ok(l),
        None => auto_lmax(spec, 1e-10),
    }
}

fn file_config(args: &PacketArgs) -> StateFileConfig {
    StateFileConfig {
        eta_modulus: args.eta,
        eta_phase_alpha: args.alpha,
        n: args.n,
        k: args.k,
        omega0: args.omega0,
    }
}

fn emit(
    out: Option<&std::path::Path>,
    f: impl FnOnce(&mut dyn Write) -> rotorwave::Result<()>,
) -> rotorwave::Result<()> {
    match out {
        Some(path) => {
            let mut file = fs::File::create(path)?;
            f(&mut file)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)
        }
    }
}

fn cmd_build(args: &PacketArgs, out: Option<&std::path::Path>) -> rotorwave::Result<()> {
    let spec = packet_spec(args)?;
    let l_max = resolve_lmax(&spec, args.l_max)?;
    let state = build_packet(&spec, l_max)?;
    let config = file_config(args);
    emit(out, |w| write_state_json(w, &state, Some(&config)))?;
    let report = measure(&state);
    eprintln!(
        "built packet: l_max = {}, tail mass = {:.3e}, norm = {:.15}, <Lz> = {:.9}",
        l_max,
        state.tail_mass(),
        state.norm(),
        report.mean_l[2]
    );
    Ok(())
}

fn cmd_observe(path: &std::path::Path, out: Option<&std::path::Path>) -> rotorwave::Result<()> {
    let bytes = fs::read(path)?;
    let (state, config) = read_state_json(&bytes)?;
    let (report, devs) = match config {
        Some(cfg) => {
            let eta = SqueezeParam::from_polar(cfg.eta_modulus, cfg.eta_phase_alpha)?;
            let report = measure_with_eta(&state, &eta);
            // closed-form mean only applies to the real-eta parent
            let eta_is_real = (cfg.eta_modulus * cfg.eta_phase_alpha.sin()).abs() < 1e-12;
            let mean_dev = (eta_is_real && cfg.k == 0).then(|| {
                let eta_real = cfg.eta_modulus * cfg.eta_phase_alpha.cos();
                (report.mean_l[2] - mean_lz_closed_form(eta_real, cfg.n)).abs()
            });
            let (bracket, alpha) = check_uncertainty_product(&report, &eta);
            let devs = ReportDeviations {
                mean_lz_closed_form: mean_dev,
                squeeze_ratio: check_squeezing(&report, &eta).ok(),
                product_bracket: bracket,
                product_alpha: alpha,
            };
            (report, Some(devs))
        }
        None => (measure(&state), None),
    };
    emit(out, |w| write_report_json(w, &report, devs.as_ref()))
}

fn cmd_evolve(
    path: &std::path::Path,
    t_over_trev: f64,
    out: Option<&std::path::Path>,
    density_out: Option<&std::path::Path>,
    oversample: f64,
) -> rotorwave::Result<()> {
    if !t_over_trev.is_finite() {
        return Err(Error::OutOfRange {
            name: "t",
            value: t_over_trev,
        });
    }
    if !(oversample >= 1.0 && oversample.is_finite()) {
        return Err(Error::OutOfRange {
            name: "oversample",
            value: oversample,
        });
    }
    let bytes = fs::read(path)?;
    let (state, config) = read_state_json(&bytes)?;
    let omega0 = config.map(|c| c.omega0).unwrap_or(1.0);
    let t_rev = 2.0 * std::f64::consts::PI / omega0;
    let evolved = evolve(&state, t_over_trev * t_rev, omega0);
    emit(out, |w| write_state_json(w, &evolved, config.as_ref()))?;
    if let Some(csv_path) = density_out {
        let grid = SphereGrid::build_oversampled(evolved.l_max(), oversample);
        let d = density(&evolved, &grid)?;
        let mut file = fs::File::create(csv_path)?;
        write_density_csv(&mut file, &d)?;
    }
    eprintln!(
        "evolved to t = {} T_rev (omega0 = {}), norm = {:.15}",
        t_over_trev,
        omega0,
        evolved.norm()
    );
    Ok(())
}

fn parse_fractions(text: &str) -> rotorwave::Result<Vec<(u32, u32)>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (m, n) = part.split_once('/').ok_or_else(|| {
            Error::Malformed(format!("fraction `{part}` is not of the form m/n"))
        })?;
        let m: u32 = m
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("bad numerator in `{part}`")))?;
        let n: u32 = n
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("bad denominator in `{part}`")))?;
        out.push((m, n));
    }
    Ok(out)
}

fn cmd_scan(
    args: &PacketArgs,
    fractions: &str,
    samples: usize,
    threshold: f64,
    out: Option<&std::path::Path>,
) -> rotorwave::Result<()> {
    if samples < 2 {
        return Err(Error::OutOfRange {
            name: "samples",
            value: samples as f64,
        });
    }
    let spec = packet_spec(args)?;
    let fractions = parse_fractions(fractions)?;
    let t_rev = spec.revival_period();
    let t_grid: Vec<f64> = (0..samples)
        .map(|j| t_rev * j as f64 / (samples - 1) as f64)
        .collect();
    let scan = scan_revivals(&spec, args.l_max, &t_grid, &fractions, threshold)?;
    emit(out, |w| write_scan_json(w, &scan))?;
    for ev in &scan.events {
        let detected = match ev.q_detected {
            rotorwave::PacketCount::Count(c) => c.to_string(),
            rotorwave::PacketCount::Ring => "ring".to_string(),
        };
        let fid = ev
            .clone_fidelity
            .map(|f| format!("{f:.6}"))
            .unwrap_or_else(|| "n/a".to_string());
        eprintln!(
            "t = {}/{} T_rev: q_expected = {}, detected = {}, clone fidelity = {}",
            ev.m, ev.n, ev.q_expected, detected, fid
        );
    }
    Ok(())
}
