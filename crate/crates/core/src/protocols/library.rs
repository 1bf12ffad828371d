use std::f64::consts::SQRT_2;

use super::{AccessMode, EchoMap, Observables, Probes, Protocol};
use crate::dynamics::{DecayConfig, LevelScheme, Pulse, PulseRole, Transition};

/// Data pulse Rabi frequency, cyclic MHz (area π/10 over 0.1 μs).
pub const DATA_RABI: f64 = 0.5;
/// Transfer and read-out control Rabi frequency, cyclic MHz (area π).
pub const CONTROL_RABI: f64 = 5.0;
/// Rabi frequency of each leg of the Raman rephasing pair, cyclic MHz.
pub const RAMAN_RABI: f64 = 100.0 / SQRT_2;
/// Optical pulse duration, μs.
pub const OPTICAL_PULSE: f64 = 0.1;
/// Raman rephasing pulse duration, μs.
pub const RAMAN_PULSE: f64 = 0.01;

const T_A: f64 = 1.0;
const T_B: f64 = 1.1;
const T_R: f64 = 10.0;
/// Length of the echo search window after t_C.
const ECHO_WINDOW: f64 = 2.0;

const LAMBDA_OPTICAL_DEPHASING_KHZ: f64 = 50.0;
const DOUBLE_LAMBDA_OPTICAL_DEPHASING_KHZ: f64 = 150.0;

const T13: Transition = Transition::new(1, 3);
const T23: Transition = Transition::new(2, 3);
const T14: Transition = Transition::new(1, 4);
const T24: Transition = Transition::new(2, 4);

/// Rotation angle of a rectangular pulse, radians.
pub fn pulse_area(p: &Pulse) -> f64 {
    p.area()
}

/// Generalized Rabi frequency √(Ω_a² + Ω_b²) of a simultaneous pair.
pub fn generalized_rabi(omega_a: f64, omega_b: f64) -> f64 {
    omega_a.hypot(omega_b)
}

fn lambda_decay() -> DecayConfig {
    DecayConfig::none()
        .with_dephasing(1, 3, LAMBDA_OPTICAL_DEPHASING_KHZ)
        .with_dephasing(2, 3, LAMBDA_OPTICAL_DEPHASING_KHZ)
}

fn lambda_observables(mode: AccessMode) -> (Transition, Observables, EchoMap) {
    match mode {
        AccessMode::CounterIntuitive => (
            T13,
            Observables {
                data: T13,
                echo: T23,
                excited: 3,
                echo_ground: 2,
            },
            EchoMap::CoherenceInversion,
        ),
        AccessMode::Conventional => (
            T23,
            Observables {
                data: T13,
                echo: T13,
                excited: 3,
                echo_ground: 1,
            },
            EchoMap::Conjugation,
        ),
    }
}

fn raman_pair(first: Transition, second: Transition, names: [&str; 2]) -> [Pulse; 2] {
    [
        Pulse::new(names[0], PulseRole::Rephase, first, RAMAN_RABI, T_R, RAMAN_PULSE),
        Pulse::new(names[1], PulseRole::Rephase, second, RAMAN_RABI, T_R, RAMAN_PULSE),
    ]
}

#[allow(clippy::too_many_arguments)]
fn build(
    label: String,
    scheme: LevelScheme,
    pulses: Vec<Pulse>,
    decay: DecayConfig,
    probes: Probes,
    access: Option<AccessMode>,
    map: EchoMap,
    observables: Observables,
) -> Protocol {
    let t_end = probes.t_c + ECHO_WINDOW;
    Protocol::new(label, scheme, pulses, decay, probes, t_end, access, map, observables)
        .expect("built-in protocol is valid")
}

/// Controlled echo in a lambda system.
///
/// Data A (π/10) on |1⟩–|3⟩ at 1.0 μs, transfer B (π) on |2⟩–|3⟩ at 1.1 μs,
/// a balanced Raman pair R (joint area 2π) at 10.0 μs, and read-out C (π) at
/// `t_C = 2t_R − t_B` on the leg chosen by `mode`. Optical coherences dephase
/// at 50 kHz.
pub fn controlled_echo_protocol(mode: AccessMode) -> Protocol {
    let t_c = 2.0 * T_R - T_B;
    let (c_transition, observables, map) = lambda_observables(mode);
    let [r1, r2] = raman_pair(T13, T23, ["R13", "R23"]);
    let pulses = vec![
        Pulse::new("A", PulseRole::Data, T13, DATA_RABI, T_A, OPTICAL_PULSE),
        Pulse::new("B", PulseRole::Transfer, T23, CONTROL_RABI, T_B, OPTICAL_PULSE),
        r1,
        r2,
        Pulse::new("C", PulseRole::Readout, c_transition, CONTROL_RABI, t_c, OPTICAL_PULSE),
    ];
    let probes = Probes {
        t_a: T_A,
        t_b: T_B,
        t_r: T_R,
        t_c,
        t_e: t_c + OPTICAL_PULSE,
    };
    build(
        format!("fig1_{mode}"),
        LevelScheme::lambda(),
        pulses,
        lambda_decay(),
        probes,
        Some(mode),
        map,
        observables,
    )
}

/// Controlled echo whose data D is a simultaneous resonant Raman pair.
///
/// Ω_A = 0.5 MHz on |1⟩–|3⟩ and Ω_B on |2⟩–|3⟩ chosen so that the
/// generalized Rabi frequency is 5 MHz, giving D an area of π over 0.1 μs.
/// The transfer happens inside D, so `t_B = t_A` and `t_C = 2t_R − t_A`.
pub fn resonant_raman_protocol(mode: AccessMode) -> Protocol {
    let omega_b = (CONTROL_RABI * CONTROL_RABI - DATA_RABI * DATA_RABI).sqrt();
    let t_c = 2.0 * T_R - T_A;
    let (c_transition, observables, map) = lambda_observables(mode);
    let [r1, r2] = raman_pair(T13, T23, ["R13", "R23"]);
    let pulses = vec![
        Pulse::new("A", PulseRole::Data, T13, DATA_RABI, T_A, OPTICAL_PULSE),
        Pulse::new("B", PulseRole::Data, T23, omega_b, T_A, OPTICAL_PULSE),
        r1,
        r2,
        Pulse::new("C", PulseRole::Readout, c_transition, CONTROL_RABI, t_c, OPTICAL_PULSE),
    ];
    let probes = Probes {
        t_a: T_A,
        t_b: T_A,
        t_r: T_R,
        t_c,
        t_e: t_c + OPTICAL_PULSE,
    };
    build(
        format!("fig2_{mode}"),
        LevelScheme::lambda(),
        pulses,
        lambda_decay(),
        probes,
        Some(mode),
        map,
        observables,
    )
}

/// Wavelength-convertible controlled echo in a double-lambda system.
///
/// A (Ω = 0.5/√2 MHz) and B as in the lambda case, Raman rephasing through
/// |4⟩ with the pair C (|1⟩–|4⟩) and D (|2⟩–|4⟩), and read-out Cn on
/// |1⟩–|4⟩ (counter-intuitive, echo on ρ₂₄) or |2⟩–|4⟩ (conventional, echo on
/// ρ₁₄). Every coherence except the spin coherence ρ₁₂ dephases at 150 kHz.
pub fn wavelength_convert_protocol(mode: AccessMode) -> Protocol {
    let t_c = 2.0 * T_R - T_B;
    let (cn_transition, observables, map) = match mode {
        AccessMode::CounterIntuitive => (
            T14,
            Observables {
                data: T13,
                echo: T24,
                excited: 4,
                echo_ground: 2,
            },
            EchoMap::CoherenceInversion,
        ),
        AccessMode::Conventional => (
            T24,
            Observables {
                data: T13,
                echo: T14,
                excited: 4,
                echo_ground: 1,
            },
            EchoMap::Conjugation,
        ),
    };
    let [rc, rd] = raman_pair(T14, T24, ["C", "D"]);
    let pulses = vec![
        Pulse::new("A", PulseRole::Data, T13, DATA_RABI / SQRT_2, T_A, OPTICAL_PULSE),
        Pulse::new("B", PulseRole::Transfer, T23, CONTROL_RABI, T_B, OPTICAL_PULSE),
        rc,
        rd,
        Pulse::new("Cn", PulseRole::Readout, cn_transition, CONTROL_RABI, t_c, OPTICAL_PULSE),
    ];
    let mut decay = DecayConfig::none();
    for (i, j) in [(1, 3), (1, 4), (2, 3), (2, 4), (3, 4)] {
        decay.set_dephasing(i, j, DOUBLE_LAMBDA_OPTICAL_DEPHASING_KHZ);
    }
    let probes = Probes {
        t_a: T_A,
        t_b: T_B,
        t_r: T_R,
        t_c,
        t_e: t_c + OPTICAL_PULSE,
    };
    build(
        format!("fig3_{mode}"),
        LevelScheme::double_lambda(),
        pulses,
        decay,
        probes,
        Some(mode),
        map,
        observables,
    )
}

const TWO_LEVEL_T_R: f64 = 4.0;
const TWO_LEVEL_T_R2: f64 = 10.0;

fn two_level_observables() -> Observables {
    let t = Transition::new(1, 2);
    Observables {
        data: t,
        echo: t,
        excited: 2,
        echo_ground: 1,
    }
}

fn two_level_pulses() -> Vec<Pulse> {
    let t = Transition::new(1, 2);
    vec![
        Pulse::new("A", PulseRole::Data, t, DATA_RABI, T_A, OPTICAL_PULSE),
        Pulse::new("R1", PulseRole::Rephase, t, CONTROL_RABI, TWO_LEVEL_T_R, OPTICAL_PULSE),
    ]
}

/// Two-level photon echo: weak data at 1.0 μs, π rephasing at 4.0 μs, echo
/// expected at `2t_R − t_A`. No relaxation; inhomogeneity comes from the
/// spin-group grid applied to |2⟩.
pub fn two_level_echo_protocol() -> Protocol {
    let t_c = 2.0 * TWO_LEVEL_T_R - T_A;
    let probes = Probes {
        t_a: T_A,
        t_b: T_A,
        t_r: TWO_LEVEL_T_R,
        t_c,
        t_e: t_c,
    };
    build(
        "two_level_echo".into(),
        LevelScheme::two_level(),
        two_level_pulses(),
        DecayConfig::none(),
        probes,
        None,
        EchoMap::PhotonEcho,
        two_level_observables(),
    )
}

/// Two-level echo with a second π rephasing at 10.0 μs. `t_B` marks the
/// first echo, `t_R` the second π pulse and `t_C` the final echo.
pub fn two_level_double_echo_protocol() -> Protocol {
    let first_echo = 2.0 * TWO_LEVEL_T_R - T_A;
    let t_c = 2.0 * TWO_LEVEL_T_R2 - first_echo;
    let mut pulses = two_level_pulses();
    pulses.push(Pulse::new(
        "R2",
        PulseRole::Rephase,
        Transition::new(1, 2),
        CONTROL_RABI,
        TWO_LEVEL_T_R2,
        OPTICAL_PULSE,
    ));
    let probes = Probes {
        t_a: T_A,
        t_b: first_echo,
        t_r: TWO_LEVEL_T_R2,
        t_c,
        t_e: t_c,
    };
    build(
        "two_level_double_echo".into(),
        LevelScheme::two_level(),
        pulses,
        DecayConfig::none(),
        probes,
        None,
        EchoMap::DoubleRephasing,
        two_level_observables(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn all_protocols() -> Vec<Protocol> {
        let mut v = Vec::new();
        for mode in AccessMode::ALL {
            v.push(controlled_echo_protocol(mode));
            v.push(resonant_raman_protocol(mode));
            v.push(wavelength_convert_protocol(mode));
        }
        v.push(two_level_echo_protocol());
        v.push(two_level_double_echo_protocol());
        v
    }

    #[test]
    fn pulse_area_examples() {
        let p = Pulse::new("B", PulseRole::Transfer, T23, 5.0, 0.0, 0.1);
        assert!((pulse_area(&p) - PI).abs() < 1e-12);
        let a = Pulse::new("A", PulseRole::Data, T13, 0.5, 0.0, 0.1);
        assert!((pulse_area(&a) - PI / 10.0).abs() < 1e-12);
        let z = Pulse::new("Z", PulseRole::Other, T13, 0.0, 0.0, 0.1);
        assert_eq!(pulse_area(&z), 0.0);
    }

    #[test]
    fn generalized_rabi_examples() {
        let r = generalized_rabi(100.0 / SQRT_2, 100.0 / SQRT_2);
        assert!((r - 100.0).abs() < 1e-12);
        assert!((TAU * r * RAMAN_PULSE - TAU).abs() < 1e-12);
        assert_eq!(generalized_rabi(0.0, 7.5), 7.5);
        assert_eq!(generalized_rabi(3.0, 4.0), 5.0);
    }

    #[test]
    fn every_protocol_is_valid_and_raman_symmetric() {
        for p in all_protocols() {
            p.validate().unwrap();
            assert!(p.probes.is_raman_symmetric(1e-9), "{}", p.label);
        }
    }

    #[test]
    fn area_audit() {
        for mode in AccessMode::ALL {
            for p in [controlled_echo_protocol(mode), wavelength_convert_protocol(mode)] {
                let a = p.pulse("A").unwrap();
                let expected_a = if p.scheme.n_levels() == 4 { PI / 10.0 / SQRT_2 } else { PI / 10.0 };
                assert!((a.area() - expected_a).abs() < 1e-12);
                assert!((p.pulse("B").unwrap().area() - PI).abs() < 1e-12);
                for c in p.pulses_with_role(PulseRole::Readout) {
                    assert!((c.area() - PI).abs() < 1e-12);
                }
                let r: Vec<_> = p.pulses_with_role(PulseRole::Rephase).collect();
                assert_eq!(r.len(), 2);
                let joint = TAU * generalized_rabi(r[0].rabi, r[1].rabi) * r[0].duration;
                assert!((joint - TAU).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn controlled_echo_modes() {
        let ci = controlled_echo_protocol(AccessMode::CounterIntuitive);
        assert_eq!(ci.pulse("C").unwrap().transition, T13);
        assert_eq!(ci.observables.echo, T23);
        let conv = controlled_echo_protocol(AccessMode::Conventional);
        assert_eq!(conv.pulse("C").unwrap().transition, T23);
        assert_eq!(conv.observables.echo, T13);
        assert!((ci.probes.t_c - 18.9).abs() < 1e-12);
        assert!((ci.probes.t_e - 19.0).abs() < 1e-12);
    }

    #[test]
    fn modes_share_prefix_before_readout() {
        let families: [fn(AccessMode) -> Protocol; 3] =
            [controlled_echo_protocol, resonant_raman_protocol, wavelength_convert_protocol];
        for f in families {
            let a = f(AccessMode::CounterIntuitive);
            let b = f(AccessMode::Conventional);
            let before = |p: &Protocol| -> Vec<Pulse> {
                p.pulses().iter().filter(|q| q.t_start < p.probes.t_c).cloned().collect()
            };
            assert_eq!(before(&a), before(&b));
            assert_eq!(a.decay, b.decay);
            assert_eq!(a.probes, b.probes);
        }
    }

    #[test]
    fn resonant_raman_data_pulse() {
        let p = resonant_raman_protocol(AccessMode::CounterIntuitive);
        let b = p.pulse("B").unwrap();
        assert!((b.rabi - 4.974_937_185_533_1).abs() < 1e-12);
        let a = p.pulse("A").unwrap();
        assert_eq!(a.t_start, b.t_start);
        let area_d = TAU * generalized_rabi(a.rabi, b.rabi) * a.duration;
        assert!((area_d - PI).abs() < 1e-12);
        assert!((p.data_time() - 1.1).abs() < 1e-12);
    }

    #[test]
    fn wavelength_convert_modes() {
        let ci = wavelength_convert_protocol(AccessMode::CounterIntuitive);
        assert_eq!(ci.pulse("Cn").unwrap().transition, T14);
        assert_eq!(ci.observables.echo, T24);
        let conv = wavelength_convert_protocol(AccessMode::Conventional);
        assert_eq!(conv.pulse("Cn").unwrap().transition, T24);
        assert_eq!(conv.observables.echo, T14);
        assert_eq!(ci.decay.dephasing(1, 2), 0.0);
        assert_eq!(ci.decay.dephasing(2, 4), 150.0);
    }

    #[test]
    fn two_level_echo_timing() {
        let p = two_level_echo_protocol();
        assert!((p.probes.t_c - (2.0 * p.probes.t_r - p.probes.t_a)).abs() < 1e-12);
        let d = two_level_double_echo_protocol();
        assert_eq!(d.pulses_with_role(PulseRole::Rephase).count(), 2);
        assert!((d.probes.t_c - 13.0).abs() < 1e-12);
    }
}
