//! Acceptance suites shared by `controlled-echo verify` and the test target.
//!
//! Each criterion runs the protocols it needs through a [`VerifyContext`],
//! which caches ensemble runs so that suites sharing a protocol simulate it
//! once.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::analysis::{
    ccc_map, extract_echo_metrics, rephasing_symmetry_check, retrieval_efficiency, CccStage, EchoReport,
    PhaseOracle, ECHO_WINDOW,
};
use crate::dynamics::{
    simulate_group, simulate_group_with, DecayConfig, Integrator, LevelScheme, Pulse, PulseRole, Transition,
    DEFAULT_SAMPLE_DT, RK4_REFERENCE_TARGET,
};
use crate::ensemble::{
    dephasing_envelope, gaussian_envelope, simulate_ensemble_with, EnsembleOptions, EnsembleSpec,
    EnsembleTimeSeries, SpinGroup,
};
use crate::error::{Error, Result};
use crate::protocols::{
    controlled_echo_protocol, resonant_raman_protocol, two_level_double_echo_protocol, two_level_echo_protocol,
    wavelength_convert_protocol, AccessMode, EchoMap, Observables, Probes, Protocol, CONTROL_RABI, DATA_RABI,
    OPTICAL_PULSE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Invariants,
    Oracles,
    Figures,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::Invariants, Suite::Oracles, Suite::Figures];

    pub fn criteria(self) -> &'static [u8] {
        match self {
            Suite::Invariants => &[9],
            Suite::Oracles => &[7, 8, 10],
            Suite::Figures => &[1, 2, 3, 4, 5, 6],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Invariants => "invariants",
            Suite::Oracles => "oracles",
            Suite::Figures => "figures",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::config(format!("unknown suite `{s}` (expected invariants, oracles or figures)")))
    }
}

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    /// Measured values behind the verdict.
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] criterion {:>2} {}: {}", self.id, self.title, self.detail)
    }
}

/// Where the echo burst is expected after t_C, μs.
const BURST_WINDOW: f64 = 0.3;

/// Ensemble grid, sampling and a cache of completed runs.
pub struct VerifyContext {
    pub spec: EnsembleSpec,
    pub sample_dt: f64,
    pub options: EnsembleOptions,
    runs: HashMap<String, (EnsembleTimeSeries, Duration)>,
}

impl Default for VerifyContext {
    fn default() -> Self {
        Self::new(EnsembleSpec::default(), DEFAULT_SAMPLE_DT, EnsembleOptions::default())
    }
}

impl VerifyContext {
    pub fn new(spec: EnsembleSpec, sample_dt: f64, options: EnsembleOptions) -> Self {
        Self {
            spec,
            sample_dt,
            options,
            runs: HashMap::new(),
        }
    }

    /// Ensemble run of `protocol`, keyed by its label; `per_group` forces
    /// per-group retention.
    fn run(&mut self, protocol: &Protocol, per_group: bool) -> Result<&EnsembleTimeSeries> {
        let key = format!("{}{}", protocol.label, if per_group { "+groups" } else { "" });
        if !self.runs.contains_key(&key) {
            let opts = EnsembleOptions {
                retain_per_group: per_group,
                ..self.options
            };
            let start = Instant::now();
            let run = simulate_ensemble_with(protocol, &self.spec, self.sample_dt, opts)?;
            self.runs.insert(key.clone(), (run, start.elapsed()));
        }
        Ok(&self.runs[&key].0)
    }

    fn elapsed(&self, protocol: &Protocol) -> Option<Duration> {
        self.runs.get(&protocol.label).map(|r| r.1)
    }

    fn report(&mut self, protocol: &Protocol) -> Result<EchoReport> {
        let run = self.run(protocol, false)?;
        extract_echo_metrics(run, protocol)
    }
}

/// Runs every criterion of `suite` with the paper grid.
pub fn run_suite(suite: Suite) -> Result<Vec<Outcome>> {
    let mut ctx = VerifyContext::default();
    suite.criteria().iter().map(|&id| run_criterion(id, &mut ctx)).collect()
}

pub fn run_criterion(id: u8, ctx: &mut VerifyContext) -> Result<Outcome> {
    match id {
        1 => fig1_counter_intuitive(ctx),
        2 => fig1_conventional(ctx),
        3 => rephasing_necessity(ctx),
        4 => raman_swap(ctx),
        5 => resonant_raman(ctx),
        6 => wavelength_conversion(ctx),
        7 => oracle_equivalence(ctx),
        8 => two_level_suite(ctx),
        9 => structural_invariants(ctx),
        10 => point_evaluations(ctx),
        _ => Err(Error::config(format!("no acceptance criterion {id}"))),
    }
}

fn outcome(id: u8, title: &'static str, checks: &[(&str, bool)], values: String) -> Outcome {
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let detail = if failed.is_empty() {
        values
    } else {
        format!("{values}; failed: {}", failed.join(", "))
    };
    Outcome {
        id,
        title,
        passed: failed.is_empty(),
        detail,
    }
}

fn fig1_counter_intuitive(ctx: &mut VerifyContext) -> Result<Outcome> {
    let p = controlled_echo_protocol(AccessMode::CounterIntuitive);
    let r = ctx.report(&p)?;
    let runtime = ctx.elapsed(&p).unwrap_or_default();
    let t_c = p.probes.t_c;
    let echo_t = r.echo_time().unwrap_or(f64::NAN);
    let echo_im = r.echo_coherence().map_or(0.0, |z| z.im);
    let data = r.data_coherence;
    let pop_ratio = r.excited_pop_at_echo / r.excited_pop_at_data;
    Ok(outcome(
        1,
        "fig1 counter-intuitive echo",
        &[
            ("echo in [t_C, t_C+0.3]", echo_t >= t_c - 1e-9 && echo_t <= t_c + BURST_WINDOW + 1e-9),
            ("emissive", r.emissive == Some(true)),
            ("|Im echo| >= 0.5 |data|", echo_im.abs() >= 0.5 * data.norm()),
            ("excited pop within 2x", (0.5..=2.0).contains(&pop_ratio)),
            ("not inverted", !r.population_inverted),
            ("runtime <= 60 s", runtime <= Duration::from_secs(60)),
        ],
        format!(
            "echo t={echo_t:.2} Im={echo_im:.5}, data Im={:.5} |data|={:.5}, ratio={:.3}, \
             rho33 t_e/t_A+={pop_ratio:.3}, runtime={:.2}s",
            data.im,
            data.norm(),
            echo_im.abs() / data.norm(),
            runtime.as_secs_f64()
        ),
    ))
}

fn fig1_conventional(ctx: &mut VerifyContext) -> Result<Outcome> {
    let ci = controlled_echo_protocol(AccessMode::CounterIntuitive);
    let conv = controlled_echo_protocol(AccessMode::Conventional);
    let t_c = conv.probes.t_c;
    let prefix_diff = {
        let a = ctx.run(&ci, false)?.clone();
        let b = ctx.run(&conv, false)?;
        a.times
            .iter()
            .zip(a.mean_rho.iter().zip(&b.mean_rho))
            .filter(|(t, _)| **t <= t_c + 1e-9)
            .map(|(_, (x, y))| x.max_abs_diff(y))
            .fold(0.0, f64::max)
    };
    let r = ctx.report(&conv)?;
    let echo = r.echo_coherence();
    Ok(outcome(
        2,
        "fig1 conventional echo",
        &[
            ("identical through t_C", prefix_diff < 1e-12),
            ("echo on Im rho13", echo.is_some() && conv.observables.echo == Transition::new(1, 3)),
            ("rho33(t_e) > 0.5", r.excited_pop_at_echo > 0.5),
        ],
        format!(
            "prefix diff={prefix_diff:.1e}, echo Im rho13={:.5}, rho33(t_e)={:.4}, emissive={:?}",
            echo.map_or(0.0, |z| z.im),
            r.excited_pop_at_echo,
            r.emissive
        ),
    ))
}

fn rephasing_necessity(ctx: &mut VerifyContext) -> Result<Outcome> {
    let full = controlled_echo_protocol(AccessMode::CounterIntuitive);
    let bare = full.without_role(PulseRole::Rephase).with_label("fig1_counter_intuitive_without_R");
    let data = ctx.report(&full)?.data_coherence.norm();
    let (t_b, t_c) = (full.probes.t_b, full.probes.t_c);
    let envelope = dephasing_envelope(t_c - t_b, &ctx.spec)?;
    let bound = envelope * data + 1e-4;
    let echo = full.observables.echo;
    let spec = ctx.spec;
    let run = ctx.run(&bare, false)?;
    let mut burst_peak = 0.0f64;
    let mut tail_peak = 0.0f64;
    // the residual keeps dephasing after C, so it must also stay under the
    // envelope at its own elapsed time
    let mut tail_excess = f64::NEG_INFINITY;
    for (t, rho) in run.times.iter().zip(&run.mean_rho) {
        if *t < t_c - 1e-9 || *t > t_c + ECHO_WINDOW + 1e-9 {
            continue;
        }
        let v = rho.get(echo.lower, echo.upper).norm();
        tail_peak = tail_peak.max(v);
        if *t <= t_c + BURST_WINDOW + 1e-9 {
            burst_peak = burst_peak.max(v);
        }
        tail_excess = tail_excess.max(v - (dephasing_envelope(t - t_b, &spec)? * data + 1e-4));
    }
    Ok(outcome(
        3,
        "rephasing necessity",
        &[
            ("echo-window peak below envelope(t_C - t_B) bound", burst_peak <= bound),
            ("tail below envelope(t - t_B) bound", tail_excess <= 0.0),
        ],
        format!(
            "peak |rho23| in [t_C, t_C+0.3]={burst_peak:.3e}, bound={bound:.3e} (envelope {envelope:.3e}); \
             2 us tail peak={tail_peak:.3e}, worst margin to running bound={tail_excess:.3e}"
        ),
    ))
}

fn raman_swap(ctx: &mut VerifyContext) -> Result<Outcome> {
    let p = controlled_echo_protocol(AccessMode::CounterIntuitive);
    let (start, end) = rephase_window(&p)?;
    let run = ctx.run(&p, false)?;
    let (before, after) = (run.at(start), run.at(end));
    let d12 = (after.population(1) - before.population(2)).abs();
    let d21 = (after.population(2) - before.population(1)).abs();
    Ok(outcome(
        4,
        "Raman population swap",
        &[("rho11 <-> rho22 within 0.02", d12 < 0.02 && d21 < 0.02)],
        format!(
            "before rho11={:.4} rho22={:.4}, after rho11={:.4} rho22={:.4}",
            before.population(1),
            before.population(2),
            after.population(1),
            after.population(2)
        ),
    ))
}

fn rephase_window(p: &Protocol) -> Result<(f64, f64)> {
    let pulses: Vec<&Pulse> = p.pulses_with_role(PulseRole::Rephase).collect();
    if pulses.is_empty() {
        return Err(Error::Precondition(format!("protocol `{}` has no rephasing pulse", p.label)));
    }
    let start = pulses.iter().map(|q| q.t_start).fold(f64::INFINITY, f64::min);
    let end = pulses.iter().map(|q| q.t_end()).fold(f64::NEG_INFINITY, f64::max);
    Ok((start, end))
}

/// |ρ₁₂| right after the last data or transfer pulse.
fn spin_coherence(run: &EnsembleTimeSeries, p: &Protocol) -> f64 {
    let from = p
        .pulses()
        .iter()
        .filter(|q| matches!(q.role, PulseRole::Data | PulseRole::Transfer))
        .map(Pulse::t_end)
        .fold(0.0, f64::max);
    run.at(from).get(1, 2).norm()
}

fn resonant_raman(ctx: &mut VerifyContext) -> Result<Outcome> {
    let fig1 = controlled_echo_protocol(AccessMode::CounterIntuitive);
    let fig2 = resonant_raman_protocol(AccessMode::CounterIntuitive);
    let reference = spin_coherence(ctx.run(&fig1, false)?, &fig1);
    let run = ctx.run(&fig2, false)?;
    let after_d = run.at(fig2.data_time());
    let (r22, r33) = (after_d.population(2), after_d.population(3));
    let shelved_rel = (r22 - r33).abs() / r22.max(r33);
    let spin = spin_coherence(run, &fig2);
    let ratio = spin / reference;
    Ok(outcome(
        5,
        "fig2 resonant Raman data",
        &[
            ("rho22 = rho33 within 0.1 rel", shelved_rel <= 0.1),
            ("spin coherence 55-80% of fig1", (0.55..=0.80).contains(&ratio)),
        ],
        format!("rho22={r22:.5} rho33={r33:.5}, |rho12| fig2={spin:.5} fig1={reference:.5} ratio={ratio:.3}"),
    ))
}

fn wavelength_conversion(ctx: &mut VerifyContext) -> Result<Outcome> {
    let fig1 = controlled_echo_protocol(AccessMode::CounterIntuitive);
    let ci = wavelength_convert_protocol(AccessMode::CounterIntuitive);
    let conv = wavelength_convert_protocol(AccessMode::Conventional);
    let reference = ctx.report(&fig1)?.data_coherence.norm();
    let r = ctx.report(&ci)?;
    let rc = ctx.report(&conv)?;
    let ratio = r.data_coherence.norm() / reference;
    let target = std::f64::consts::FRAC_1_SQRT_2;
    Ok(outcome(
        6,
        "fig3 wavelength conversion",
        &[
            ("echo on rho24", r.echo.is_some() && ci.observables.echo == Transition::new(2, 4)),
            ("emissive", r.emissive == Some(true)),
            ("not inverted", !r.population_inverted),
            ("data = fig1/sqrt2 within 5%", (ratio / target - 1.0).abs() <= 0.05),
            ("conventional rho44(t_e) > 0.9", rc.excited_pop_at_echo > 0.9),
        ],
        format!(
            "echo Im rho24={:.5}, data Im rho13={:.5}, data ratio={ratio:.4} (1/sqrt2={target:.4}), \
             rho44(t_e) ci={:.4} conv={:.4}",
            r.echo_coherence().map_or(0.0, |z| z.im),
            r.data_coherence.im,
            r.excited_pop_at_echo,
            rc.excited_pop_at_echo
        ),
    ))
}

fn oracle_equivalence(ctx: &mut VerifyContext) -> Result<Outcome> {
    let p = controlled_echo_protocol(AccessMode::CounterIntuitive)
        .with_decay(DecayConfig::none())?
        .with_label("fig1_counter_intuitive_undamped");
    let oracle = PhaseOracle::from_protocol(&p)?;
    let windows = free_windows(&p, oracle.transfer_time, p.probes.t_c);
    let run = ctx.run(&p, true)?;
    let per_group = run.per_group.as_ref().expect("retained");
    let i_data = run.index_at(p.data_time());
    let mut worst = 0.0f64;
    let mut worst_at = (0.0, 0.0);
    for (g, states) in run.groups.iter().zip(per_group) {
        let rho13 = states[i_data].get(1, 3);
        for (t, rho) in run.times.iter().zip(states) {
            if !windows.iter().any(|w| *t >= w.0 - 1e-9 && *t <= w.1 + 1e-9) {
                continue;
            }
            let expect = oracle.evaluate(rho13, g.detuning, *t)?;
            let rel = (rho.get(1, 2) - expect).norm() / expect.norm();
            if rel > worst {
                worst = rel;
                worst_at = (g.detuning, *t);
            }
        }
    }

    let ccc_err = ccc_two_pulse_error(ctx.sample_dt)?;
    Ok(outcome(
        7,
        "oracle equivalence",
        &[
            ("per-group rho12 within 2%", worst <= 0.02),
            ("ccc map within 1e-3", ccc_err <= 1e-3),
        ],
        format!(
            "max rel dev={worst:.3e} (delta={} kHz, t={:.2}), ccc max dev={ccc_err:.1e}",
            worst_at.0, worst_at.1
        ),
    ))
}

/// Drive-free intervals inside `[from, to]`.
fn free_windows(p: &Protocol, from: f64, to: f64) -> Vec<(f64, f64)> {
    let mut windows = Vec::new();
    let mut cursor = from;
    for q in p.pulses() {
        if q.t_end() <= cursor {
            continue;
        }
        if q.t_start > cursor {
            windows.push((cursor, q.t_start.min(to)));
        }
        cursor = cursor.max(q.t_end());
        if cursor >= to {
            break;
        }
    }
    if cursor < to {
        windows.push((cursor, to));
    }
    windows
}

/// Resonant lambda group driven by data A, transfer B and a second π pulse
/// C on the same leg; compares with the conversion map at both stages.
fn ccc_two_pulse_error(sample_dt: f64) -> Result<f64> {
    let (t13, t23) = (Transition::new(1, 3), Transition::new(2, 3));
    let (t_a, t_b, t_c) = (1.0, 1.1, 1.5);
    let pulses = vec![
        Pulse::new("A", PulseRole::Data, t13, DATA_RABI, t_a, OPTICAL_PULSE),
        Pulse::new("B", PulseRole::Transfer, t23, CONTROL_RABI, t_b, OPTICAL_PULSE),
        Pulse::new("C", PulseRole::Readout, t23, CONTROL_RABI, t_c, OPTICAL_PULSE),
    ];
    let probes = Probes {
        t_a,
        t_b,
        t_r: 1.3,
        t_c,
        t_e: t_c + OPTICAL_PULSE,
    };
    let obs = Observables {
        data: t13,
        echo: t13,
        excited: 3,
        echo_ground: 1,
    };
    let p = Protocol::new(
        "ccc_two_pi",
        LevelScheme::lambda(),
        pulses,
        DecayConfig::none(),
        probes,
        2.0,
        None,
        EchoMap::CoherenceInversion,
        obs,
    )?;
    let run = simulate_group(&p, &SpinGroup { detuning: 0.0, weight: 1.0 }, sample_dt)?;
    let rho13 = run.at(t_b).get(1, 3);
    let after_b = run.at(t_b + OPTICAL_PULSE).get(1, 2);
    let after_c = run.at(t_c + OPTICAL_PULSE).get(1, 3);
    Ok((after_b - ccc_map(rho13, CccStage::AfterB))
        .norm()
        .max((after_c - ccc_map(rho13, CccStage::AfterBAndC)).norm()))
}

fn two_level_suite(ctx: &mut VerifyContext) -> Result<Outcome> {
    let single = two_level_echo_protocol();
    let double = two_level_double_echo_protocol();
    let s = rephasing_symmetry_check(ctx.run(&single, true)?, &single)?;
    let d = rephasing_symmetry_check(ctx.run(&double, true)?, &double)?;
    Ok(outcome(
        8,
        "two-level echo symmetry",
        &[
            ("echo recovers >= 99%", s.recovery >= 0.99),
            ("single echo emissive", !s.absorptive),
            ("Im flips at R (delta=0)", s.zero_group_im_flips),
            ("Re rho12 = 0 (delta=0)", s.zero_group_max_re < 1e-10),
            ("Im flip / Re keep per group", s.flip_violations == 0),
            ("+-delta Re cancel", s.pair_re_max < 1e-10),
            ("double echo absorptive", d.absorptive),
            ("double echo recovers >= 99%", d.recovery >= 0.99),
        ],
        format!(
            "recovery={:.5} at t={:.2}, data Im={:.5} echo Im={:.5}, flip dev={:.3e}, violations={}, \
             pair Re={:.1e}; double: recovery={:.5} echo Im={:.5}",
            s.recovery,
            s.echo_time,
            s.data_coherence.im,
            s.echo_coherence.im,
            s.max_flip_deviation,
            s.flip_violations,
            s.pair_re_max,
            d.recovery,
            d.echo_coherence.im
        ),
    ))
}

/// Every named protocol of the suite.
pub fn suite_protocols() -> Vec<Protocol> {
    let mut out = Vec::new();
    for mode in AccessMode::ALL {
        out.push(controlled_echo_protocol(mode));
        out.push(resonant_raman_protocol(mode));
        out.push(wavelength_convert_protocol(mode));
    }
    out.push(two_level_echo_protocol());
    out.push(two_level_double_echo_protocol());
    out
}

fn structural_invariants(ctx: &mut VerifyContext) -> Result<Outcome> {
    let mut trace = 0.0f64;
    let mut herm = 0.0f64;
    let mut re_ratio = 0.0f64;
    let mut rk4 = 0.0f64;
    let edge = ctx.spec.half_span();
    for p in suite_protocols() {
        let run = ctx.run(&p, false)?;
        for rho in &run.mean_rho {
            trace = trace.max((rho.trace() - Complex64::new(1.0, 0.0)).norm());
            herm = herm.max(rho.hermiticity_error());
        }
        for t in [p.observables.data, p.observables.echo] {
            let series = run.element_series(t.lower, t.upper);
            let peak_im = series.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
            let peak_re = series.iter().fold(0.0f64, |m, z| m.max(z.re.abs()));
            re_ratio = re_ratio.max(peak_re / peak_im);
        }
        for detuning in [0.0, 0.5 * edge, -edge] {
            let g = SpinGroup { detuning, weight: 1.0 };
            let exact = simulate_group(&p, &g, ctx.sample_dt)?;
            let reference = simulate_group_with(
                &p,
                &g,
                ctx.sample_dt,
                Integrator::Rk4 {
                    target: RK4_REFERENCE_TARGET,
                },
            )?;
            for (x, y) in exact.states.iter().zip(&reference.states) {
                rk4 = rk4.max(x.max_abs_diff(y));
            }
        }
    }
    Ok(outcome(
        9,
        "structural invariants",
        &[
            ("trace drift < 1e-9", trace < 1e-9),
            ("hermiticity < 1e-12", herm < 1e-12),
            ("exp vs RK4 < 1e-8", rk4 < 1e-8),
            ("Re-sum < 1e-3 peak |Im|", re_ratio < 1e-3),
        ],
        format!("trace={trace:.1e}, hermiticity={herm:.1e}, exp-vs-RK4={rk4:.1e}, Re/Im={re_ratio:.1e}"),
    ))
}

fn point_evaluations(ctx: &mut VerifyContext) -> Result<Outcome> {
    let eff = retrieval_efficiency(1.0)?;
    let mut worst = 0.0f64;
    for k in 0..=200 {
        let t = k as f64 * 0.01;
        let grid = dephasing_envelope(t, &ctx.spec)?;
        let smooth = gaussian_envelope(t, ctx.spec.fwhm);
        worst = worst.max((grid / smooth - 1.0).abs());
    }
    Ok(outcome(
        10,
        "point evaluations",
        &[
            ("efficiency(1) = 0.39958 +- 1e-5", (eff - 0.39958).abs() <= 1e-5),
            ("envelope vs Gaussian within 2%", worst <= 0.02),
        ],
        format!("efficiency(1)={eff:.6}, envelope max rel dev={worst:.3e} for t<=2"),
    ))
}
