//! Per-group check of the rephasing symmetry of a two-level photon echo:
//! a π pulse flips the in-phase (Im) part of ρ₁₂ and keeps the quadrature
//! (Re) part, and the Re parts of ±δ groups cancel at every sample.

use num_complex::Complex64;

use crate::dynamics::PulseRole;
use crate::ensemble::EnsembleTimeSeries;
use crate::error::{Error, Result};
use crate::protocols::Protocol;
use crate::units::angular_khz;

/// Window half-width around t_C searched for the echo maximum, μs.
const ECHO_SEARCH: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    /// Start and end of the π pulse the check is anchored on.
    pub pulse_window: (f64, f64),
    /// Largest |Re ρ₁₂| of the δ = 0 group over the run.
    pub zero_group_max_re: f64,
    /// Im ρ₁₂ of the δ = 0 group changes sign across the pulse.
    pub zero_group_im_flips: bool,
    /// Groups whose coherence after the pulse is not aligned with the
    /// conjugate of the coherence before it (Im flipped, Re kept), once the
    /// free precession during the pulse is removed. Finite pulses on detuned
    /// groups rotate and rescale it, so alignment is judged by the sign of
    /// `Re(after / conj(before))`.
    pub flip_violations: usize,
    /// Largest `|after − flipped(before)| / |before|` over groups.
    pub max_flip_deviation: f64,
    /// Largest |Re ρ₊δ + Re ρ₋δ| over pairs and samples.
    pub pair_re_max: f64,
    /// Largest |Σ_j w_j Re ρ₁₂| relative to the peak |Σ_j w_j Im ρ₁₂|.
    pub ensemble_re_ratio: f64,
    pub data_coherence: Complex64,
    pub echo_time: f64,
    pub echo_coherence: Complex64,
    /// |echo| / |data|.
    pub recovery: f64,
    /// Im echo has the same sign as Im data.
    pub absorptive: bool,
}

/// Grades a two-level run that retained per-group data against the
/// rephasing pulse closest to `t_R`.
pub fn rephasing_symmetry_check(run: &EnsembleTimeSeries, protocol: &Protocol) -> Result<SymmetryReport> {
    let per_group = run
        .per_group
        .as_ref()
        .ok_or_else(|| Error::Precondition("symmetry check needs per-group data".into()))?;
    if protocol.scheme.n_levels() != 2 {
        return Err(Error::Precondition(format!(
            "symmetry check applies to two-level runs, `{}` has {} levels",
            protocol.label,
            protocol.scheme.n_levels()
        )));
    }
    let (a, b) = (protocol.observables.data.lower, protocol.observables.data.upper);
    let t_r = protocol.probes.t_r;
    let pulse = protocol
        .pulses_with_role(PulseRole::Rephase)
        .min_by(|p, q| (p.t_start - t_r).abs().total_cmp(&(q.t_start - t_r).abs()))
        .ok_or_else(|| Error::Precondition(format!("protocol `{}` has no rephasing pulse", protocol.label)))?;
    let (i_start, i_end) = (run.index_at(pulse.t_start), run.index_at(pulse.t_end()));
    let half = 0.5 * (run.times[i_end] - run.times[i_start]);

    let mut zero_group_max_re = 0.0f64;
    let mut zero_group_im_flips = false;
    let mut flip_violations = 0;
    let mut max_flip_deviation = 0.0f64;
    for (group, states) in run.groups.iter().zip(per_group) {
        let series = || states.iter().map(|r| r.get(a, b));
        // free precession of ρ₁₂ is e^{−i2πδt}; undo it over each pulse half
        let drift = Complex64::from_polar(1.0, -angular_khz(group.detuning) * half);
        let before = states[i_start].get(a, b) * drift;
        let after = states[i_end].get(a, b) * drift.conj();
        let flipped = before.conj();
        let scale = before.norm();
        if scale > 0.0 {
            max_flip_deviation = max_flip_deviation.max((after - flipped).norm() / scale);
            // aligned with the Im-flipped, Re-kept coherence
            if (after / flipped).re <= 0.0 {
                flip_violations += 1;
            }
        }
        if group.detuning == 0.0 {
            zero_group_max_re = series().fold(0.0, |m, z| m.max(z.re.abs()));
            zero_group_im_flips = before.im * after.im < 0.0;
        }
    }

    let mut pair_re_max = 0.0f64;
    let n = run.groups.len();
    for j in 0..n / 2 {
        let k = n - 1 - j;
        if run.groups[j].detuning != -run.groups[k].detuning {
            return Err(Error::Precondition("group grid is not symmetric about zero".into()));
        }
        for (p, q) in per_group[j].iter().zip(&per_group[k]) {
            pair_re_max = pair_re_max.max((p.get(a, b).re + q.get(a, b).re).abs());
        }
    }

    let mean = run.element_series(a, b);
    let peak_im = mean.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    let peak_re = mean.iter().fold(0.0f64, |m, z| m.max(z.re.abs()));

    let data_coherence = run.at(protocol.data_time()).get(a, b);
    let t_c = protocol.probes.t_c;
    let (echo_time, echo_coherence) = run
        .times
        .iter()
        .zip(&mean)
        .filter(|(t, _)| (**t - t_c).abs() <= ECHO_SEARCH + 1e-9)
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .map(|(t, z)| (*t, *z))
        .ok_or_else(|| Error::Precondition(format!("run does not reach t_C = {t_c} μs")))?;

    Ok(SymmetryReport {
        pulse_window: (pulse.t_start, pulse.t_end()),
        zero_group_max_re,
        zero_group_im_flips,
        flip_violations,
        max_flip_deviation,
        pair_re_max,
        ensemble_re_ratio: if peak_im > 0.0 { peak_re / peak_im } else { f64::INFINITY },
        data_coherence,
        echo_time,
        echo_coherence,
        recovery: echo_coherence.norm() / data_coherence.norm(),
        absorptive: echo_coherence.im.signum() == data_coherence.im.signum(),
    })
}
