//! Quantitative checks connecting the closed-form layer to the numerical
//! propagator: discrete eigenvalue residuals, a lab-frame equation-of-motion
//! residual for the fully assembled wave function, fidelity traces against
//! the separable comoving solution, and a least-squares extraction of the
//! geometric phase coefficient from propagated states.

use crate::eigenmodes::{self, Eigenmode, Geometry};
use crate::error::{Error, Result};
use crate::potentials::PotentialSpec;
use crate::propagator::{
    self, ComovingGrid, GridKind, WaveField,
};
use crate::scale_factor::ScaleFactorTrajectory;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Fidelity `|<u e^(-i E tau / hbar), phi(tau)>|` and wrapped phase error
/// `arg<u, phi> + E tau / hbar` along a propagation.
#[derive(Debug, Clone)]
pub struct FidelityTrace {
    pub taus: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub phase_error: Vec<f64>,
    /// max over steps of |norm - 1|
    pub norm_drift: f64,
}

impl FidelityTrace {
    pub fn min_fidelity(&self) -> f64 {
        self.fidelity.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn final_fidelity(&self) -> f64 {
        *self.fidelity.last().expect("trace never empty")
    }

    pub fn max_abs_phase_error(&self) -> f64 {
        self.phase_error.iter().fold(0.0f64, |m, p| m.max(p.abs()))
    }

    pub fn final_phase_error(&self) -> f64 {
        *self.phase_error.last().expect("trace never empty")
    }
}

fn check_units(mode: &Eigenmode, spec: &PotentialSpec) -> Result<()> {
    if mode.units() != spec.units() {
        return Err(Error::InvalidParameter(
            "mode and potential were built with different units".into(),
        ));
    }
    Ok(())
}

/// `|| H_discrete u - E u ||_2 / || u ||_2`, with the same discrete operator
/// the propagator steps: three-point Laplacian, centrifugal term on radial
/// grids, and the comoving potential the mode diagonalizes.
///
/// Sphere modes use their radial channel; cube modes report the worst
/// per-axis factor residual (each axis factor is an eigenfunction of its own
/// 1D problem).
pub fn tise_residual(mode: &Eigenmode, grid: &ComovingGrid) -> Result<f64> {
    let units = mode.units();
    match mode.geometry() {
        Geometry::Sphere { .. } => {
            let field = propagator::discretize_mode(mode, grid)?;
            let profile: Vec<f64> = (0..grid.n).map(|j| mode.tise_potential(grid.node(j))).collect();
            let diag = propagator::effective_diagonal(grid, &profile, &units);
            residual_of(grid, &diag, &units, field.values(), mode.energy())
        }
        Geometry::Cube { x0 } => {
            let GridKind::Cartesian1D { .. } = grid.kind else {
                return Err(Error::IncompatibleGrid("cube modes need a Cartesian grid".into()));
            };
            let mut worst = 0.0f64;
            for axis in 0..3 {
                let field = propagator::discretize_cube_axis(mode, axis, grid)?;
                let q = mode.axis_index(axis)? as f64;
                let e_axis =
                    units.hbar * units.hbar * PI * PI * q * q / (2.0 * units.mass * x0 * x0);
                let profile = vec![0.0; grid.n];
                let diag = propagator::effective_diagonal(grid, &profile, &units);
                worst = worst.max(residual_of(grid, &diag, &units, field.values(), e_axis)?);
            }
            Ok(worst)
        }
    }
}

fn residual_of(
    grid: &ComovingGrid,
    diag: &[f64],
    units: &crate::Units,
    values: &[Complex64],
    energy: f64,
) -> Result<f64> {
    let h_u = propagator::apply_hamiltonian(grid, diag, units, values);
    let mut res = 0.0;
    let mut norm = 0.0;
    for (hu, u) in h_u.iter().zip(values) {
        res += (hu - energy * u).norm_sqr();
        norm += u.norm_sqr();
    }
    Ok((res / norm).sqrt() / energy.abs().max(1.0))
}

/// Space-time sampling used by [`lab_tdse_residual`]: `n` interior radii,
/// centered time `t`, and the centered-difference half width `dt`.
#[derive(Debug, Clone, Copy)]
pub struct LabGridSpec {
    pub n: usize,
    pub dt: f64,
    pub t: f64,
}

/// Residual of the lab-frame equation of motion applied to the fully
/// assembled wave function of a sphere mode:
///
/// `i hbar d_t psi + (hbar^2 / 2M) lap psi - V psi`,
///
/// evaluated with centered differences on a fixed lab-frame radial grid that
/// stays inside the wall over `[t - dt, t + dt]`. Exercises the whole
/// comoving transformation at once: the `a^(-3/2)` scaling, the rescaled
/// dynamic phase, and the geometric phase.
pub fn lab_tdse_residual(mode: &Eigenmode, spec: &PotentialSpec, grid: &LabGridSpec) -> Result<f64> {
    lab_residual_impl(mode, spec, grid, true)
}

/// Same residual with the geometric phase factor deliberately left out of
/// the assembly; with a moving wall this must inflate the residual.
pub fn lab_tdse_residual_without_dirac_phase(
    mode: &Eigenmode,
    spec: &PotentialSpec,
    grid: &LabGridSpec,
) -> Result<f64> {
    lab_residual_impl(mode, spec, grid, false)
}

fn lab_residual_impl(
    mode: &Eigenmode,
    spec: &PotentialSpec,
    grid: &LabGridSpec,
    include_dirac: bool,
) -> Result<f64> {
    check_units(mode, spec)?;
    let Geometry::Sphere { r0 } = mode.geometry() else {
        return Err(Error::IncompatibleGrid("the lab residual is radial; use sphere modes".into()));
    };
    if grid.n < 8 {
        return Err(Error::UnderResolved("need at least 8 radial points".into()));
    }
    if !(grid.dt.is_finite() && grid.dt > 0.0) {
        return Err(Error::InvalidParameter("dt must be positive".into()));
    }
    let traj = spec.traj().clone();
    let units = mode.units();
    let l = mode.quantum_numbers().l as f64;
    let times = [grid.t - grid.dt, grid.t, grid.t + grid.dt];

    // the grid must stay inside the wall at all three times
    let mut a_min = f64::INFINITY;
    for t in times {
        a_min = a_min.min(traj.scale(t)?);
    }
    let r_max = 0.98 * r0 * a_min;
    let n = grid.n;
    let h = r_max / (n as f64 + 1.0);

    // radial profiles F(r, t) at the three times, j = 0..n+1
    let mut profiles = Vec::with_capacity(3);
    for t in times {
        let a = traj.scale(t)?;
        let tau = traj.tau_of_t(t)?;
        let hubble = traj.hubble(t)?;
        let scale = a.powf(-1.5);
        let dynamic = -mode.energy() * tau / units.hbar;
        let row: Result<Vec<Complex64>> = (0..=n + 1)
            .map(|j| {
                let r = j as f64 * h;
                let mut phase = dynamic;
                if include_dirac {
                    phase += eigenmodes::dirac_phase(&units, hubble, r);
                }
                Ok(scale * mode.radial(r / a)? * Complex64::from_polar(1.0, phase))
            })
            .collect();
        profiles.push(row?);
    }
    let (before, mid, after) = (&profiles[0], &profiles[1], &profiles[2]);

    let a_t = traj.scale(grid.t)?;
    let e_inst = mode.energy() / (a_t * a_t);
    let i_hbar = Complex64::new(0.0, units.hbar);
    let kin = units.hbar * units.hbar / (2.0 * units.mass);

    let mut res = 0.0;
    let mut norm = 0.0;
    for j in 1..=n {
        let r = j as f64 * h;
        let d_t = (after[j] - before[j]) / (2.0 * grid.dt);
        // radial Laplacian via g = r F: lap = g'' / r - l(l+1) F / r^2
        let g_mm = (r - h) * mid[j - 1];
        let g_0 = r * mid[j];
        let g_pp = (r + h) * mid[j + 1];
        let lap = (g_pp - 2.0 * g_0 + g_mm) / (h * h * r) - l * (l + 1.0) / (r * r) * mid[j];
        let v = spec.lab_potential(&[r, 0.0, 0.0], grid.t)?;
        let lhs = i_hbar * d_t + kin * lap - v * mid[j];
        res += r * r * lhs.norm_sqr();
        norm += r * r * (e_inst * mid[j]).norm_sqr();
    }
    Ok((res / norm).sqrt())
}

/// Propagate the discretized mode under `spec` and record fidelity and phase
/// error against the separable comoving solution at every step. Sphere modes
/// run on their radial channel; cube modes run the three axis factors and
/// combine them (fidelities multiply, phases add).
pub fn fidelity_trace(
    mode: &Eigenmode,
    spec: &PotentialSpec,
    grid: &ComovingGrid,
    tau_end: f64,
    dtau: f64,
) -> Result<FidelityTrace> {
    check_units(mode, spec)?;
    if !(dtau.is_finite() && dtau > 0.0) {
        return Err(Error::InvalidParameter(format!("dtau must be positive, got {dtau}")));
    }
    if !(tau_end > 0.0) {
        return Err(Error::InvalidParameter(format!("tau_end must be positive, got {tau_end}")));
    }
    let initial: Vec<WaveField> = match mode.geometry() {
        Geometry::Sphere { .. } => vec![propagator::discretize_mode(mode, grid)?],
        Geometry::Cube { .. } => (0..3)
            .map(|axis| propagator::discretize_cube_axis(mode, axis, grid))
            .collect::<Result<_>>()?,
    };
    let units = mode.units();
    let steps = (tau_end / dtau).ceil() as usize;
    let mut fields = initial.clone();
    let mut trace = FidelityTrace {
        taus: Vec::with_capacity(steps + 1),
        fidelity: Vec::with_capacity(steps + 1),
        phase_error: Vec::with_capacity(steps + 1),
        norm_drift: 0.0,
    };
    record(&mut trace, &initial, &fields, mode.energy(), &units)?;
    for i in 0..steps {
        let this_dtau = if i + 1 == steps { tau_end - i as f64 * dtau } else { dtau };
        for field in &mut fields {
            *field = propagator::step(field, spec, this_dtau)?;
            trace.norm_drift = trace.norm_drift.max((field.norm() - 1.0).abs());
        }
        record(&mut trace, &initial, &fields, mode.energy(), &units)?;
    }
    Ok(trace)
}

fn record(
    trace: &mut FidelityTrace,
    initial: &[WaveField],
    fields: &[WaveField],
    energy: f64,
    units: &crate::Units,
) -> Result<()> {
    let tau = fields[0].tau();
    let mut overlap = Complex64::new(1.0, 0.0);
    for (u0, phi) in initial.iter().zip(fields) {
        overlap *= u0.inner(phi)?;
    }
    trace.taus.push(tau);
    trace.fidelity.push(overlap.norm());
    trace.phase_error.push(eigenmodes::wrap_phase(overlap.arg() + energy * tau / units.hbar));
    Ok(())
}

/// Resolution of the geometric-phase fit.
#[derive(Debug, Clone, Copy)]
pub struct DiracFitOptions {
    /// number of sampled radii (>= 3)
    pub n_radii: usize,
    /// interior points of the propagation grid
    pub grid_points: usize,
    /// propagation step in rescaled time
    pub dtau: f64,
}

impl Default for DiracFitOptions {
    fn default() -> Self {
        Self { n_radii: 9, grid_points: 1024, dtau: 1e-4 }
    }
}

/// Result of fitting the phase of the assembled lab wave function against
/// `r^2`: the slope should be `M H / (2 hbar)`.
#[derive(Debug, Clone)]
pub struct DiracPhaseFit {
    pub coefficient: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    /// `M H(t) / (2 hbar)` from the trajectory, for convenience
    pub expected: f64,
}

/// Extract the geometric-phase coefficient at lab time `t`.
///
/// The comoving field is propagated numerically (no closed-form shortcut),
/// transformed to the lab frame, divided by the comoving eigenfunction and
/// the dynamic phase, and the remaining phase is fit as `c r^2 + b` over
/// sampled radii with nearest-branch unwrapping along increasing `r`.
pub fn extract_dirac_phase(
    mode: &Eigenmode,
    spec: &PotentialSpec,
    t: f64,
    opts: &DiracFitOptions,
) -> Result<DiracPhaseFit> {
    check_units(mode, spec)?;
    if opts.n_radii < 3 {
        return Err(Error::InvalidParameter("need at least 3 sampled radii".into()));
    }
    let traj = spec.traj().clone();
    let units = mode.units();
    let tau_t = traj.tau_of_t(t)?;
    if !(tau_t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time {t} precedes the propagation origin (tau = {tau_t})"
        )));
    }
    let a = traj.scale(t)?;
    let hubble = traj.hubble(t)?;
    let expected = units.mass * hubble / (2.0 * units.hbar);

    // propagated and initial per-factor fields plus the lab radius of each
    // sampled node
    let (samples, radii) = match mode.geometry() {
        Geometry::Sphere { r0 } => {
            let grid = ComovingGrid::radial(mode.quantum_numbers().l, r0, opts.grid_points)?;
            let u0 = propagator::discretize_mode(mode, &grid)?;
            let (phi, _) = propagator::propagate(&u0, spec, tau_t, opts.dtau)?;
            let idx = sample_indices(grid.n, opts.n_radii);
            let samples: Vec<Complex64> =
                idx.iter().map(|&j| phi.values()[j] * u0.values()[j].conj()).collect();
            let radii: Vec<f64> = idx.iter().map(|&j| a * grid.node(j)).collect();
            (samples, radii)
        }
        Geometry::Cube { x0 } => {
            let grid = ComovingGrid::cartesian(-0.5 * x0, 0.5 * x0, opts.grid_points)?;
            let mut per_axis = Vec::with_capacity(3);
            for axis in 0..3 {
                let u0 = propagator::discretize_cube_axis(mode, axis, &grid)?;
                let (phi, _) = propagator::propagate(&u0, spec, tau_t, opts.dtau)?;
                per_axis.push((u0, phi));
            }
            // sample along the main diagonal (X, X, X), X > 0
            let upper: Vec<usize> =
                sample_indices(grid.n / 2, opts.n_radii).iter().map(|j| grid.n / 2 + j).collect();
            let samples: Vec<Complex64> = upper
                .iter()
                .map(|&j| {
                    per_axis
                        .iter()
                        .map(|(u0, phi)| phi.values()[j] * u0.values()[j].conj())
                        .product()
                })
                .collect();
            let radii: Vec<f64> =
                upper.iter().map(|&j| a * grid.node(j) * 3.0f64.sqrt()).collect();
            (samples, radii)
        }
    };

    // assembled lab phase relative to the comoving eigenfunction:
    // arg[psi_lab conj(u) e^(i E tau / hbar)] = gamma(r) + propagation error
    let dynamic = -mode.energy() * tau_t / units.hbar;
    let mut phases = Vec::with_capacity(samples.len());
    for (value, r) in samples.iter().zip(&radii) {
        let gamma = eigenmodes::dirac_phase(&units, hubble, *r);
        phases.push(value.arg() + dynamic + gamma + mode.energy() * tau_t / units.hbar);
    }
    // guard the unwrapping assumption before continuing branches
    for pair in radii.windows(2) {
        let gap = eigenmodes::dirac_phase(&units, hubble, pair[1])
            - eigenmodes::dirac_phase(&units, hubble, pair[0]);
        if gap.abs() > PI {
            return Err(Error::InvalidParameter(
                "phase gap between adjacent radii exceeds pi; refine the radial sampling".into(),
            ));
        }
    }
    // nearest-branch continuation along increasing r
    for i in 1..phases.len() {
        let jump = ((phases[i] - phases[i - 1]) / (2.0 * PI)).round();
        phases[i] -= 2.0 * PI * jump;
    }

    // least squares of phase against r^2 with intercept
    let xs: Vec<f64> = radii.iter().map(|r| r * r).collect();
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = phases.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&phases).map(|(x, y)| x * y).sum();
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-30 {
        return Err(Error::InvalidParameter("degenerate radius sample for the fit".into()));
    }
    let coefficient = (n * sxy - sx * sy) / det;
    let intercept = (sy - coefficient * sx) / n;
    let rms_residual = (xs
        .iter()
        .zip(&phases)
        .map(|(x, y)| (y - coefficient * x - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DiracPhaseFit { coefficient, intercept, rms_residual, expected })
}

fn sample_indices(n: usize, count: usize) -> Vec<usize> {
    // spread through the middle of the grid, clear of both boundaries
    (0..count)
        .map(|i| {
            let frac = 0.25 + 0.6 * i as f64 / (count as f64 - 1.0);
            ((n as f64 * frac).round() as usize).min(n - 1)
        })
        .collect()
}

/// Convenience: the rescaled time at which `a(t) = target` on a trajectory,
/// found on the monotone segment starting at the tau anchor.
pub fn tau_when_scale_reaches(traj: &ScaleFactorTrajectory, target: f64) -> Result<f64> {
    if !(target.is_finite() && target > 0.0) {
        return Err(Error::InvalidParameter(format!("target scale must be positive, got {target}")));
    }
    // bracket forward from the anchor by doubling
    let (_, t_max) = traj.domain();
    let mut lo = 0.0f64;
    let mut hi = 1.0f64.min(if t_max.is_finite() { t_max * 0.5 } else { 1.0 });
    let mut found = false;
    for _ in 0..200 {
        if traj.scale(hi).map(|a| a >= target).unwrap_or(false) {
            found = true;
            break;
        }
        lo = hi;
        hi = if t_max.is_finite() { (hi * 2.0).min(t_max - 1e-12 * t_max.abs().max(1.0)) } else { hi * 2.0 };
    }
    if !found {
        return Err(Error::InvalidParameter(format!("scale never reaches {target}")));
    }
    let t = crate::numerics::roots::bisect(
        |t| traj.scale(t).map(|a| a - target).unwrap_or(f64::NAN),
        lo,
        hi,
        1e-13 * hi.max(1.0),
    )?;
    traj.tau_of_t(t)
}
