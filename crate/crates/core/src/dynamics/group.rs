use std::collections::hash_map::Entry;
use std::collections::HashMap;

use nalgebra::DVector;
use num_complex::Complex64;

use super::density::DensityMatrix;
use super::hamiltonian::build_hamiltonian;
use super::liouvillian::{build_liouvillian, Liouvillian};
use super::propagate::{rk4_vec, IntervalPropagator};
use crate::ensemble::SpinGroup;
use crate::error::{Error, Result};
use crate::protocols::Protocol;
use crate::units::khz_to_mhz;

/// Default sampling cadence, μs.
pub const DEFAULT_SAMPLE_DT: f64 = 0.01;

/// Pulse edges closer than this to a sample time are merged into it, μs.
const EDGE_SNAP: f64 = 1e-9;

/// Substep size target `‖L‖∞·h` for the RK4 reference integrator.
pub const RK4_REFERENCE_TARGET: f64 = 0.005;

/// How each constant-drive interval is integrated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrator {
    /// One matrix exponential per interval.
    Exact,
    /// Classical RK4 with substeps sized so that `‖L‖∞·h ≤ target`.
    Rk4 { target: f64 },
}

/// Density matrices of one spectral group at the sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSeries {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl GroupSeries {
    /// Index of the sample nearest `t`.
    pub fn index_at(&self, t: f64) -> usize {
        nearest_index(&self.times, t)
    }

    pub fn at(&self, t: f64) -> &DensityMatrix {
        &self.states[self.index_at(t)]
    }
}

pub(crate) fn nearest_index(times: &[f64], t: f64) -> usize {
    match times.binary_search_by(|x| x.total_cmp(&t)) {
        Ok(i) => i,
        Err(0) => 0,
        Err(i) if i >= times.len() => times.len() - 1,
        Err(i) => {
            if (times[i] - t).abs() < (t - times[i - 1]).abs() {
                i
            } else {
                i - 1
            }
        }
    }
}

/// Sample times `k·dt` for `k = 0..=K`, `K = ⌊t_end/dt⌋`.
pub fn sample_times(t_end: f64, sample_dt: f64) -> Result<Vec<f64>> {
    if !(sample_dt > 0.0) || !sample_dt.is_finite() {
        return Err(Error::config(format!("sample_dt must be positive, got {sample_dt}")));
    }
    let k_max = (t_end / sample_dt + 1e-9).floor() as usize;
    Ok((0..=k_max).map(|k| k as f64 * sample_dt).collect())
}

/// One piece of the timeline with constant drive.
#[derive(Debug, Clone)]
struct Segment {
    dt: f64,
    drive: usize,
    /// Index into the sample list recorded at the segment end, if any.
    sample: Option<usize>,
}

/// The timeline of a protocol cut at every sample and every pulse edge,
/// with the distinct active-pulse sets it visits.
#[derive(Debug, Clone)]
pub(crate) struct Timeline {
    times: Vec<f64>,
    segments: Vec<Segment>,
    drives: Vec<Vec<usize>>,
}

impl Timeline {
    pub(crate) fn new(protocol: &Protocol, sample_dt: f64) -> Result<Self> {
        protocol.validate()?;
        let times = sample_times(protocol.t_end, sample_dt)?;
        let last = *times.last().expect("at least t = 0");

        let mut points: Vec<(f64, Option<usize>)> = times.iter().enumerate().map(|(i, &t)| (t, Some(i))).collect();
        for p in protocol.pulses() {
            for edge in [p.t_start, p.t_end()] {
                if edge <= 0.0 || edge >= last {
                    continue;
                }
                let k = nearest_index(&times, edge);
                if (times[k] - edge).abs() > EDGE_SNAP {
                    points.push((edge, None));
                }
            }
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        points.dedup_by(|b, a| (b.0 - a.0).abs() <= EDGE_SNAP && {
            a.1 = a.1.or(b.1);
            true
        });

        let mut drives: Vec<Vec<usize>> = Vec::new();
        let mut segments = Vec::with_capacity(points.len());
        for w in points.windows(2) {
            let (t0, _) = w[0];
            let (t1, sample) = w[1];
            let mid = 0.5 * (t0 + t1);
            let active: Vec<usize> = protocol
                .pulses()
                .iter()
                .enumerate()
                .filter(|(_, p)| p.is_active_at(mid))
                .map(|(i, _)| i)
                .collect();
            let drive = match drives.iter().position(|d| *d == active) {
                Some(i) => i,
                None => {
                    drives.push(active);
                    drives.len() - 1
                }
            };
            // full sample intervals use the nominal step so they share one propagator
            let dt = if sample.is_some() && w[0].1.is_some() { sample_dt } else { t1 - t0 };
            segments.push(Segment { dt, drive, sample });
        }
        Ok(Self {
            times,
            segments,
            drives,
        })
    }

    pub(crate) fn times(&self) -> &[f64] {
        &self.times
    }

    fn liouvillians(&self, protocol: &Protocol, group: &SpinGroup) -> Result<Vec<Liouvillian>> {
        let shift = khz_to_mhz(group.detuning);
        self.drives
            .iter()
            .map(|active| {
                let pulses: Vec<_> = active.iter().map(|&i| &protocol.pulses()[i]).collect();
                let h = build_hamiltonian(&protocol.scheme, &pulses, shift)?;
                build_liouvillian(&h, &protocol.decay)
            })
            .collect()
    }
}

fn dt_key(dt: f64) -> i64 {
    (dt * 1e12).round() as i64
}

/// Propagates one spectral group through `protocol`, recording ρ at every
/// sample time. Starts from [`Protocol::initial_state`].
pub fn simulate_group(protocol: &Protocol, group: &SpinGroup, sample_dt: f64) -> Result<GroupSeries> {
    simulate_group_with(protocol, group, sample_dt, Integrator::Exact)
}

pub fn simulate_group_with(
    protocol: &Protocol,
    group: &SpinGroup,
    sample_dt: f64,
    integrator: Integrator,
) -> Result<GroupSeries> {
    let timeline = Timeline::new(protocol, sample_dt)?;
    run_timeline(&timeline, protocol, group, integrator, |_, _| {}).map(|states| GroupSeries {
        times: timeline.times().to_vec(),
        states,
    })
}

/// Drives one group along a prepared timeline. `visit` sees every sample as
/// it is produced.
pub(crate) fn run_timeline(
    timeline: &Timeline,
    protocol: &Protocol,
    group: &SpinGroup,
    integrator: Integrator,
    mut visit: impl FnMut(usize, &DensityMatrix),
) -> Result<Vec<DensityMatrix>> {
    let n = protocol.scheme.n_levels();
    let generators = timeline.liouvillians(protocol, group)?;
    let mut cache: HashMap<(usize, i64), IntervalPropagator> = HashMap::new();

    let initial = protocol.initial_state();
    let mut v: DVector<Complex64> = initial.to_vec();
    let mut states = Vec::with_capacity(timeline.times.len());
    visit(0, &initial);
    states.push(initial);

    for seg in &timeline.segments {
        let l = &generators[seg.drive];
        v = match integrator {
            Integrator::Exact => {
                let key = (seg.drive, dt_key(seg.dt));
                let propagator = match cache.entry(key) {
                    Entry::Occupied(e) => e.into_mut(),
                    Entry::Vacant(e) => e.insert(IntervalPropagator::new(l, seg.dt)?),
                };
                propagator.apply_vec(&v)
            }
            Integrator::Rk4 { target } => {
                let steps = ((l.norm_inf() * seg.dt / target).ceil() as usize).max(1);
                let h = seg.dt / steps as f64;
                let mut w = v;
                for _ in 0..steps {
                    w = rk4_vec(l, &w, h)?;
                }
                w
            }
        };
        if let Some(k) = seg.sample {
            let rho = DensityMatrix::from_vec(n, &v);
            visit(k, &rho);
            states.push(rho);
        }
    }
    debug_assert_eq!(states.len(), timeline.times.len());
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::DecayConfig;
    use crate::protocols::{controlled_echo_protocol, AccessMode};
    use std::f64::consts::PI;

    fn center() -> SpinGroup {
        SpinGroup {
            detuning: 0.0,
            weight: 1.0,
        }
    }

    fn undamped_fig1() -> Protocol {
        controlled_echo_protocol(AccessMode::CounterIntuitive)
            .with_decay(DecayConfig::none())
            .unwrap()
    }

    #[test]
    fn empty_protocol_stays_in_ground() {
        let proto = undamped_fig1().without_role(crate::dynamics::PulseRole::Data);
        let proto = Protocol::new(
            "empty",
            proto.scheme.clone(),
            vec![],
            DecayConfig::none(),
            proto.probes,
            0.09,
            None,
            proto.map,
            proto.observables,
        );
        // probes beyond t_end are allowed; only pulses are bounded by it
        let proto = proto.unwrap();
        let run = simulate_group(&proto, &center(), 0.01).unwrap();
        assert_eq!(run.states.len(), 10);
        for rho in &run.states {
            assert_eq!(rho.population(1), 1.0);
        }
    }

    #[test]
    fn data_pulse_creates_imaginary_optical_coherence() {
        let run = simulate_group(&undamped_fig1(), &center(), 0.01).unwrap();
        let rho = run.at(1.1);
        let expected = -(PI / 10.0).sin() / 2.0;
        assert!((rho.get(1, 3).im - expected).abs() < 1e-9);
        assert!(rho.get(1, 3).re.abs() < 1e-12);
    }

    #[test]
    fn transfer_pulse_moves_excitation_to_spin_level() {
        let run = simulate_group(&undamped_fig1(), &center(), 0.01).unwrap();
        let rho = run.at(1.2);
        let s2 = (PI / 20.0).sin().powi(2);
        assert!(rho.population(3).abs() < 1e-9);
        assert!((rho.population(2) - s2).abs() < 1e-9);

        // with the 50 kHz optical dephasing the transfer is slightly lossy
        let damped = controlled_echo_protocol(AccessMode::CounterIntuitive);
        let rho = simulate_group(&damped, &center(), 0.01).unwrap().at(1.2).clone();
        assert!(rho.population(3) < 2e-3);
        assert!((rho.population(2) - s2).abs() < 2e-3);
    }

    #[test]
    fn off_grid_edges_are_honoured() {
        // sampling at 0.03 μs puts most pulse edges between samples
        let proto = undamped_fig1();
        let fine = simulate_group(&proto, &center(), 0.01).unwrap();
        let coarse = simulate_group(&proto, &center(), 0.03).unwrap();
        for (t, rho) in coarse.times.iter().zip(&coarse.states) {
            assert!(rho.max_abs_diff(fine.at(*t)) < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn rejects_bad_sample_step() {
        assert!(simulate_group(&undamped_fig1(), &center(), 0.0).is_err());
    }

    #[test]
    fn nearest_index_rounds() {
        let t = [0.0, 0.01, 0.02, 0.03];
        assert_eq!(nearest_index(&t, 0.014), 1);
        assert_eq!(nearest_index(&t, 0.016), 2);
        assert_eq!(nearest_index(&t, -1.0), 0);
        assert_eq!(nearest_index(&t, 9.0), 3);
    }
}
