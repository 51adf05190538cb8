//! Rigid-rotor time evolution and fractional-revival analysis.
//!
//! The spectrum is `E_l = omega0 * l(l+1)` (hbar = 1), so evolution is a pure
//! per-shell phase. A full revival occurs at `T_rev = 2 pi / omega0`; because
//! `l(l+1)` is always even, the state also reconstructs exactly at `T_rev/2`
//! (a documented property of this timebase, not a redefinition of `T_rev`).
//! At fractional times `t = (m/n) T_rev` the packet splits into `q`
//! fractional packets, `q = n` for odd `n` and `n/2` for even `n`.

use ndarray::Array2;
use num_complex::Complex;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::harmonics::SphereGrid;
use crate::scalar::Real;
use crate::states::{auto_lmax, build_packet, SphericalState, WavepacketSpec};

/// Applies `c_{l,m} -> c_{l,m} e^{-i omega0 l(l+1) t}`.
///
/// The phase is reduced modulo full turns before trigonometry so that large
/// `l(l+1) t` products do not lose the revival structure to rounding.
pub fn evolve<T: Real>(state: &SphericalState<T>, t: T, omega0: T) -> SphericalState<T> {
    let cycles = omega0 * t / (T::of(2.0) * T::PI());
    let phases: Vec<Complex<T>> = (0..=state.l_max())
        .map(|l| {
            let x = cycles * T::of_usize(l * (l + 1));
            let reduced = x - x.round();
            Complex::from_polar(T::one(), -T::of(2.0) * T::PI() * reduced)
        })
        .collect();
    state.apply_shell_phases(&phases)
}

/// Autocorrelation `A(t) = <psi(0) | psi(t)>`; `|A| <= 1`.
pub fn autocorrelation<T: Real>(initial: &SphericalState<T>, t: T, omega0: T) -> Complex<T> {
    initial.inner(&evolve(initial, t, omega0))
}

/// Fractional revival time `t = (m/n) T_rev` and the expected packet count
/// by the parity rule (`q = n` odd, `n/2` even).
pub fn fractional_time<T: Real>(m: u32, n: u32, omega0: T) -> Result<(T, u32)> {
    if m < 1 || n < 2 || m.gcd(&n) != 1 {
        return Err(Error::BadFraction { m, n });
    }
    let t_rev = T::of(2.0) * T::PI() / omega0;
    let t = T::of_i64(m as i64) / T::of_i64(n as i64) * t_rev;
    let q = if n % 2 == 1 { n } else { n / 2 };
    Ok((t, q))
}

/// `|Psi(theta, phi)|^2` sampled on a grid; integrates to 1 on the native
/// quadrature grid of the state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid<T> {
    thetas: Vec<T>,
    phis: Vec<T>,
    values: Array2<T>,
}

impl<T: Real> DensityGrid<T> {
    /// Colatitudes, ascending.
    pub fn thetas(&self) -> &[T] {
        &self.thetas
    }

    pub fn phis(&self) -> &[T] {
        &self.phis
    }

    /// Row-major `(theta, phi)` table, matching `thetas` rows.
    pub fn values(&self) -> &Array2<T> {
        &self.values
    }
}

/// Evaluates the position density on `grid`. The grid band limit must cover
/// the state.
pub fn density<T: Real>(state: &SphericalState<T>, grid: &SphereGrid<T>) -> Result<DensityGrid<T>> {
    let values = state.evaluate_on(grid)?;
    let nt = grid.n_theta();
    let np = grid.n_phi();
    // ascending theta = descending x: flip rows
    let mut thetas: Vec<T> = grid.thetas();
    thetas.reverse();
    let phis: Vec<T> = (0..np).map(|j| grid.phi(j)).collect();
    let mut dens = Array2::from_elem((nt, np), T::zero());
    for i in 0..nt {
        for j in 0..np {
            dens[(nt - 1 - i, j)] = values[(i, j)].norm_sqr();
        }
    }
    Ok(DensityGrid {
        thetas,
        phis,
        values: dens,
    })
}

/// Azimuthal marginal `rho(phi_j) = sum_i w_i |Psi(theta_i, phi_j)|^2`;
/// integrates to 1 over `phi` with the grid's `phi_step`.
pub fn azimuthal_profile<T: Real>(
    state: &SphericalState<T>,
    grid: &SphereGrid<T>,
) -> Result<Vec<T>> {
    let values = state.evaluate_on(grid)?;
    let mut rho = vec![T::zero(); grid.n_phi()];
    for (i, &w) in grid.weights_x().iter().enumerate() {
        for (j, r) in rho.iter_mut().enumerate() {
            *r = *r + w * values[(i, j)].norm_sqr();
        }
    }
    Ok(rho)
}

/// Outcome of packet counting: a discrete lobe count, or the ring regime
/// where the azimuthal profile is too flat for counting to mean anything.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PacketCount {
    Count(usize),
    Ring,
}

/// Counts connected super-threshold runs of the azimuthal profile (circular
/// wrap-around), after the flat-profile check: a profile whose maximum stays
/// below `10 * mean(rho) / (2 pi)` is classified as `Ring` instead.
pub fn count_packets<T: Real>(
    state: &SphericalState<T>,
    grid: &SphereGrid<T>,
    threshold_frac: T,
) -> Result<PacketCount> {
    if !(threshold_frac > T::zero() && threshold_frac < T::one()) {
        return Err(Error::OutOfRange {
            name: "threshold_frac",
            value: threshold_frac.as_f64(),
        });
    }
    let rho = azimuthal_profile(state, grid)?;
    Ok(classify_profile(&rho, threshold_frac))
}

pub(crate) fn classify_profile<T: Real>(rho: &[T], threshold_frac: T) -> PacketCount {
    let max = rho.iter().fold(T::zero(), |a, &b| a.max(b));
    let mean = rho.iter().fold(T::zero(), |a, &b| a + b) / T::of_usize(rho.len());
    if max < T::of(10.0) * mean / (T::of(2.0) * T::PI()) {
        return PacketCount::Ring;
    }
    PacketCount::Count(count_runs_circular(rho, threshold_frac * max))
}

/// Number of connected runs with `rho > level`, circle topology.
pub(crate) fn count_runs_circular<T: Real>(rho: &[T], level: T) -> usize {
    let n = rho.len();
    let above: Vec<bool> = rho.iter().map(|&r| r > level).collect();
    if above.iter().all(|&a| a) {
        return 1;
    }
    let mut runs = 0;
    for j in 0..n {
        if above[j] && !above[(j + n - 1) % n] {
            runs += 1;
        }
    }
    runs
}

/// Lobes (super-threshold runs) and their enclosing windows, the circle
/// partitioned at the profile minima between consecutive lobes. With a single
/// lobe the window is the whole circle.
fn lobes_and_windows<T: Real>(rho: &[T], threshold_frac: T) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let n = rho.len();
    let max = rho.iter().fold(T::zero(), |a, &b| a.max(b));
    let level = threshold_frac * max;
    let above: Vec<bool> = rho.iter().map(|&r| r > level).collect();
    if above.iter().all(|&a| a) {
        let all: Vec<usize> = (0..n).collect();
        return (vec![all.clone()], vec![all]);
    }
    let mut lobes = Vec::new();
    for start in 0..n {
        if above[start] && !above[(start + n - 1) % n] {
            let mut run = vec![start];
            let mut j = (start + 1) % n;
            while above[j] {
                run.push(j);
                j = (j + 1) % n;
            }
            lobes.push(run);
        }
    }
    if lobes.len() <= 1 {
        let windows = vec![(0..n).collect::<Vec<usize>>()];
        return (lobes, windows);
    }
    // cut after lobe i at the minimum of rho in the gap to lobe i+1
    let mut cuts_after = Vec::with_capacity(lobes.len());
    for i in 0..lobes.len() {
        let gap_start = (lobes[i].last().unwrap() + 1) % n;
        let gap_end = lobes[(i + 1) % lobes.len()][0];
        let mut best = gap_start;
        let mut best_v = rho[gap_start];
        let mut j = gap_start;
        while j != gap_end {
            if rho[j] < best_v {
                best = j;
                best_v = rho[j];
            }
            j = (j + 1) % n;
        }
        cuts_after.push(best);
    }
    let mut windows = Vec::with_capacity(lobes.len());
    for i in 0..lobes.len() {
        let from = cuts_after[(i + lobes.len() - 1) % lobes.len()];
        let to = cuts_after[i];
        let mut w = Vec::new();
        let mut j = from;
        while j != to {
            w.push(j);
            j = (j + 1) % n;
        }
        windows.push(w);
    }
    (lobes, windows)
}

/// Circular centroid angle of `rho` restricted to `idx` (all nodes when
/// `idx` is `None`).
fn circular_centroid<T: Real>(rho: &[T], grid: &SphereGrid<T>, idx: Option<&[usize]>) -> T {
    let (mut re, mut im) = (T::zero(), T::zero());
    let mut add = |j: usize| {
        let phi = grid.phi(j);
        re = re + rho[j] * phi.cos();
        im = im + rho[j] * phi.sin();
    };
    match idx {
        Some(list) => list.iter().for_each(|&j| add(j)),
        None => (0..rho.len()).for_each(add),
    }
    im.atan2(re)
}

/// Maximum squared overlap between the initial packet and any of the `q`
/// fractional packets of `state_t`, each isolated by masking its azimuthal
/// window and rotated back to the initial packet's azimuth with per-`m`
/// phases.
///
/// Errors when the detected lobe count differs from `q`, or when the profile
/// is in the ring regime.
pub fn clone_fidelity<T: Real>(
    initial: &SphericalState<T>,
    state_t: &SphericalState<T>,
    q: usize,
    grid: &SphereGrid<T>,
    threshold_frac: T,
) -> Result<T> {
    if q < 1 {
        return Err(Error::OutOfRange {
            name: "q",
            value: q as f64,
        });
    }
    let rho_t = azimuthal_profile(state_t, grid)?;
    if classify_profile(&rho_t, threshold_frac) == PacketCount::Ring {
        return Err(Error::RingProfile);
    }
    let (lobes, windows) = lobes_and_windows(&rho_t, threshold_frac);
    if lobes.len() != q {
        return Err(Error::PacketCountMismatch {
            expected: q,
            detected: lobes.len(),
        });
    }
    let rho_0 = azimuthal_profile(initial, grid)?;
    let phi_initial = circular_centroid(&rho_0, grid, None);
    let values_t = state_t.evaluate_on(grid)?;
    let l_max = state_t.l_max();
    let mut best = T::zero();
    for (lobe, window) in lobes.iter().zip(&windows) {
        // mask this lobe's window, re-expand, rotate back, renormalize
        let mut masked = Array2::from_elem(values_t.dim(), Complex::new(T::zero(), T::zero()));
        for &j in window {
            for i in 0..grid.n_theta() {
                masked[(i, j)] = values_t[(i, j)];
            }
        }
        let restricted = SphericalState::from_grid_values(grid, &masked, l_max)?;
        let delta = circular_centroid(&rho_t, grid, Some(lobe)) - phi_initial;
        // shifting a function by +delta multiplies c_{l,m} by e^{i m delta}
        let rotated =
            restricted.apply_m_phases(|m| Complex::from_polar(T::one(), T::of_i64(m as i64) * delta));
        let overlap = initial.inner(&rotated).norm_sqr();
        best = best.max(overlap);
    }
    Ok(best)
}

/// One fractional-revival probe: the requested fraction, the detection
/// outcome, and the clone fidelity when the detected count matches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalEvent<T> {
    pub m: u32,
    pub n: u32,
    /// Absolute time `(m/n) T_rev`.
    pub t: T,
    pub q_expected: u32,
    pub q_detected: PacketCount,
    /// Highest clone overlap; `None` on ring outcome or count mismatch.
    pub clone_fidelity: Option<T>,
    /// Detection threshold used, recorded for reproducibility.
    pub threshold_frac: T,
}

/// Sampled `|A(t)|` trace plus detected fractional-revival events.
#[derive(Debug, Clone, PartialEq)]
pub struct RevivalScanResult<T> {
    pub omega0: T,
    pub t_rev: T,
    pub samples: Vec<(T, T)>,
    pub events: Vec<RevivalEvent<T>>,
}

/// Builds the packet of `spec` (at `l_max`, or `auto_lmax` with tail
/// tolerance 1e-10 when absent), samples `|A(t)|` on `t_grid`, and probes
/// each requested fraction.
pub fn scan_revivals<T: Real>(
    spec: &WavepacketSpec<T>,
    l_max: Option<usize>,
    t_grid: &[T],
    fractions: &[(u32, u32)],
    threshold_frac: T,
) -> Result<RevivalScanResult<T>> {
    if t_grid.is_empty() {
        return Err(Error::OutOfRange {
            name: "t_grid (must be non-empty)",
            value: 0.0,
        });
    }
    let l_max = match l_max {
        Some(v) => v,
        None => auto_lmax(spec, T::of(1e-10))?,
    };
    let state = build_packet(spec, l_max)?;
    let omega0 = spec.omega0();
    let samples: Vec<(T, T)> = t_grid
        .iter()
        .map(|&t| (t, autocorrelation(&state, t, omega0).norm()))
        .collect();
    let grid = SphereGrid::build(l_max);
    let mut events = Vec::with_capacity(fractions.len());
    for &(m, n) in fractions {
        let (t, q_expected) = fractional_time(m, n, omega0)?;
        let evolved = evolve(&state, t, omega0);
        let q_detected = count_packets(&evolved, &grid, threshold_frac)?;
        let clone_fid = match q_detected {
            PacketCount::Count(c) if c == q_expected as usize => {
                clone_fidelity(&state, &evolved, c, &grid, threshold_frac).ok()
            }
            _ => None,
        };
        events.push(RevivalEvent {
            m,
            n,
            t,
            q_expected,
            q_detected,
            clone_fidelity: clone_fid,
            threshold_frac,
        });
    }
    Ok(RevivalScanResult {
        omega0,
        t_rev: spec.revival_period(),
        samples,
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{build_parent, SqueezeParam};
    use approx::assert_abs_diff_eq;

    fn spec(eta: f64, n: f64, k: u32) -> WavepacketSpec<f64> {
        WavepacketSpec::new(
            SqueezeParam::new(Complex::new(eta, 0.0)).unwrap(),
            n,
            k,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn evolve_t0_is_identity() {
        let state = build_parent(&spec(0.5, 5.0, 0), 24).unwrap();
        let same = evolve(&state, 0.0, 1.0);
        assert_eq!(state, same);
    }

    #[test]
    fn evolve_preserves_norm() {
        let state = build_parent(&spec(0.5, 5.0, 0), 24).unwrap();
        for t in [0.17, 3.4, -12.0, 1e4] {
            assert_abs_diff_eq!(evolve(&state, t, 1.3).norm(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn full_and_half_period_revivals() {
        let sp = spec(0.5, 20.0, 0);
        let state = build_parent(&sp, 48).unwrap();
        let t_rev = sp.revival_period();
        for t in [t_rev, 0.5 * t_rev] {
            let a = autocorrelation(&state, t, sp.omega0()).norm();
            assert!(a > 1.0 - 1e-12, "|A({t})| = {a}");
            assert!(a <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn autocorrelation_matches_shell_weight_sum() {
        // independent route: |A(t)| = |sum_l p_l e^{-i omega0 l(l+1) t}|
        let sp = spec(0.5, 20.0, 0);
        let state = build_parent(&sp, 48).unwrap();
        for t in [0.0, 0.137, 1.9, 4.4] {
            let direct = autocorrelation(&state, t, sp.omega0());
            let mut acc = Complex::new(0.0, 0.0);
            for l in 0..=state.l_max() {
                let p_l: f64 = state.shell(l).iter().map(|c| c.norm_sqr()).sum();
                let phase = -sp.omega0() * (l * (l + 1)) as f64 * t;
                acc += Complex::from_polar(p_l, phase);
            }
            assert!((direct - acc).norm() < 1e-12, "mismatch at t={t}");
        }
    }

    #[test]
    fn fractional_time_parity_rule() {
        assert_eq!(fractional_time(1, 3, 1.0).unwrap().1, 3);
        assert_eq!(fractional_time(1, 4, 1.0).unwrap().1, 2);
        assert_eq!(fractional_time(1, 10, 1.0).unwrap().1, 5);
        assert_eq!(fractional_time(1, 2, 1.0).unwrap().1, 1);
        let (t, _) = fractional_time(1, 3, 2.0).unwrap();
        assert_abs_diff_eq!(t, std::f64::consts::PI / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn fractional_time_rejects_non_coprime() {
        assert!(matches!(
            fractional_time(2, 4, 1.0),
            Err(Error::BadFraction { .. })
        ));
        assert!(matches!(
            fractional_time(0, 3, 1.0),
            Err(Error::BadFraction { .. })
        ));
        assert!(matches!(
            fractional_time(1, 1, 1.0),
            Err(Error::BadFraction { .. })
        ));
    }

    #[test]
    fn density_of_constant_harmonic_is_uniform() {
        let state = SphericalState::<f64>::basis_state(2, 0, 0);
        let grid = SphereGrid::build(2);
        let d = density(&state, &grid).unwrap();
        let want = 1.0 / (4.0 * std::f64::consts::PI);
        for v in d.values().iter() {
            assert_abs_diff_eq!(*v, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn density_integrates_to_one() {
        let state = build_parent(&spec(0.5, 20.0, 0), 48).unwrap();
        let grid = SphereGrid::build(48);
        let d = density(&state, &grid).unwrap();
        // row flip does not matter for the integral
        let flat: Vec<f64> = {
            let nt = grid.n_theta();
            let np = grid.n_phi();
            let mut out = Vec::with_capacity(nt * np);
            for i in 0..nt {
                for j in 0..np {
                    out.push(d.values()[(nt - 1 - i, j)]);
                }
            }
            out
        };
        assert_abs_diff_eq!(grid.integrate(&flat), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn density_peak_sits_at_equator_prime_meridian() {
        let state = build_parent(&spec(1.0, 20.0, 0), 48).unwrap();
        let grid = SphereGrid::build(48);
        let d = density(&state, &grid).unwrap();
        let mut best = (0usize, 0usize);
        let mut best_v = 0.0;
        for i in 0..grid.n_theta() {
            for j in 0..grid.n_phi() {
                if d.values()[(i, j)] > best_v {
                    best_v = d.values()[(i, j)];
                    best = (i, j);
                }
            }
        }
        assert!((d.thetas()[best.0] - std::f64::consts::FRAC_PI_2).abs() < 0.1);
        assert_abs_diff_eq!(d.phis()[best.1], 0.0);
    }

    #[test]
    fn density_rejects_undersized_grid() {
        let state = SphericalState::<f64>::basis_state(8, 3, 0);
        let grid = SphereGrid::build(4);
        assert!(matches!(
            density(&state, &grid),
            Err(Error::BandLimit { .. })
        ));
    }

    #[test]
    fn run_counting_on_synthetic_profiles() {
        // single lobe crossing the wrap-around boundary
        let mut rho = vec![0.0; 16];
        rho[15] = 1.0;
        rho[0] = 0.9;
        rho[1] = 0.8;
        assert_eq!(count_runs_circular(&rho, 0.5), 1);
        // two separated lobes
        rho[7] = 0.9;
        rho[8] = 0.7;
        assert_eq!(count_runs_circular(&rho, 0.5), 2);
        // everything above threshold is one circular run
        assert_eq!(count_runs_circular(&[1.0; 16], 0.5), 1);
    }

    #[test]
    fn flat_profile_classified_as_ring() {
        let flat = vec![1.0 / (2.0 * std::f64::consts::PI); 64];
        assert_eq!(classify_profile(&flat, 0.5), PacketCount::Ring);
        // a zonal state about z has an exactly flat azimuthal marginal
        let state = SphericalState::<f64>::basis_state(4, 3, 0);
        let grid = SphereGrid::build(4);
        assert_eq!(count_packets(&state, &grid, 0.5).unwrap(), PacketCount::Ring);
    }

    #[test]
    fn count_packets_validates_threshold() {
        let state = SphericalState::<f64>::basis_state(2, 1, 1);
        let grid = SphereGrid::build(2);
        assert!(matches!(
            count_packets(&state, &grid, 0.0),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            count_packets(&state, &grid, 1.0),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn clone_fidelity_identity_case() {
        let state = build_parent(&spec(1.0, 5.0, 0), 24).unwrap();
        let grid = SphereGrid::build(24);
        let f = clone_fidelity(&state, &state, 1, &grid, 0.5).unwrap();
        assert!((f - 1.0).abs() < 1e-12, "fidelity {f}");
    }

    #[test]
    fn clone_fidelity_refuses_ring_profile() {
        // zonal state: flat azimuthal marginal, nothing to mask
        let state = SphericalState::<f64>::basis_state(4, 3, 0);
        let grid = SphereGrid::build(4);
        assert!(matches!(
            clone_fidelity(&state, &state, 1, &grid, 0.5),
            Err(Error::RingProfile)
        ));
    }

    #[test]
    fn clone_fidelity_count_mismatch() {
        let state = build_parent(&spec(1.0, 5.0, 0), 24).unwrap();
        let grid = SphereGrid::build(24);
        assert!(matches!(
            clone_fidelity(&state, &state, 5, &grid, 0.5),
            Err(Error::PacketCountMismatch { detected: 1, .. })
        ));
    }

    #[test]
    fn scan_with_empty_fractions_yields_samples_only() {
        let sp = spec(1.0, 5.0, 0);
        let t_grid = [0.0, sp.revival_period()];
        let scan = scan_revivals(&sp, None, &t_grid, &[], 0.5).unwrap();
        assert!(scan.events.is_empty());
        assert_eq!(scan.samples.len(), 2);
        assert!(scan.samples[0].1 > 1.0 - 1e-12);
        assert!(scan.samples[1].1 > 1.0 - 1e-12);
        for (_, a) in &scan.samples {
            assert!(*a <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn scan_half_period_event() {
        let sp = spec(1.0, 5.0, 0);
        let t_grid = [0.0, 0.5 * sp.revival_period(), sp.revival_period()];
        let scan = scan_revivals(&sp, None, &t_grid, &[(1, 2)], 0.5).unwrap();
        let ev = &scan.events[0];
        assert_eq!(ev.q_expected, 1);
        assert_eq!(ev.q_detected, PacketCount::Count(1));
        assert!(ev.clone_fidelity.unwrap() > 1.0 - 1e-10);
        assert_abs_diff_eq!(ev.t, 0.5 * scan.t_rev, epsilon = 1e-14);
        assert_abs_diff_eq!(ev.threshold_frac, 0.5);
    }

    #[test]
    fn scan_rejects_empty_time_grid() {
        let sp = spec(1.0, 5.0, 0);
        assert!(matches!(
            scan_revivals(&sp, None, &[], &[], 0.5),
            Err(Error::OutOfRange { .. })
        ));
    }
}
