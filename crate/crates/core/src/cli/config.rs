//! Run configuration, read from TOML.
//!
//! ```toml
//! protocol = "fig1"              # fig1 | fig2 | fig3 | two_level | two_level_double | inline
//! access = "counter-intuitive"   # or "conventional"
//! sample_dt = 0.01               # μs
//! outputs = ["rho13", "rho23", "pop3"]
//! output_path = "out"
//!
//! [ensemble]
//! groups = 201
//! spacing = 2.0                  # kHz
//! fwhm = 170.0                   # kHz
//! ```
//!
//! An inline protocol lists one pulse per string as
//! `transition, rabi, t_start, duration, phase, detuning[, role]`:
//!
//! ```toml
//! protocol = "inline"
//! [inline]
//! levels = 3
//! t_end = 6.0
//! pulses = ["1-3, 0.5, 1.0, 0.1, 0, 0, data", "2-3, 5, 1.1, 0.1, 0, 0, transfer"]
//! dephasing = ["1-3, 50", "2-3, 50"]
//! data = "1-3"
//! echo = "2-3"
//! excited = 3
//! echo_ground = 2
//! probes = { t_a = 1.0, t_b = 1.1, t_r = 3.0, t_c = 4.9, t_e = 5.0 }
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::dynamics::{DecayConfig, LevelScheme, Pulse, PulseRole, Transition, DEFAULT_SAMPLE_DT};
use crate::ensemble::EnsembleSpec;
use crate::error::{Error, Result};
use crate::protocols::{
    controlled_echo_protocol, resonant_raman_protocol, two_level_double_echo_protocol, two_level_echo_protocol,
    wavelength_convert_protocol, AccessMode, EchoMap, Observables, Probes, Protocol,
};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    protocol: String,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    access: Option<String>,
    #[serde(default)]
    sample_dt: Option<f64>,
    #[serde(default)]
    outputs: Option<Vec<String>>,
    #[serde(default)]
    output_path: Option<PathBuf>,
    #[serde(default)]
    ensemble: RawEnsemble,
    #[serde(default)]
    inline: Option<RawInline>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnsemble {
    groups: Option<usize>,
    spacing: Option<f64>,
    fwhm: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInline {
    levels: usize,
    t_end: f64,
    pulses: Vec<String>,
    #[serde(default)]
    dephasing: Vec<String>,
    #[serde(default)]
    population_decay: Vec<String>,
    data: String,
    echo: String,
    excited: usize,
    echo_ground: usize,
    probes: RawProbes,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProbes {
    t_a: f64,
    t_b: f64,
    t_r: f64,
    t_c: f64,
    t_e: f64,
}

/// One exported observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// ρ_ab with a < b, written as Re and Im columns.
    Coherence(usize, usize),
    /// ρ_aa.
    Population(usize),
}

impl Observable {
    /// Parses `rhoAB` or `popA` (1-based levels).
    pub fn parse(s: &str) -> Result<Self> {
        let digits = |d: &str| -> Option<Vec<usize>> {
            d.chars().map(|c| c.to_digit(10).map(|v| v as usize)).collect()
        };
        let bad = || Error::config(format!("unknown observable `{s}` (expected rhoAB or popA)"));
        if let Some(rest) = s.strip_prefix("rho") {
            match digits(rest).as_deref() {
                Some([a, b]) if a == b => Ok(Observable::Population(*a)),
                Some([a, b]) if a < b => Ok(Observable::Coherence(*a, *b)),
                Some([a, b]) => Ok(Observable::Coherence(*b, *a)),
                _ => Err(bad()),
            }
        } else if let Some(rest) = s.strip_prefix("pop") {
            match digits(rest).as_deref() {
                Some([a]) => Ok(Observable::Population(*a)),
                _ => Err(bad()),
            }
        } else {
            Err(bad())
        }
    }

    fn max_level(self) -> usize {
        match self {
            Observable::Coherence(_, b) => b,
            Observable::Population(a) => a,
        }
    }

    /// CSV column names.
    pub fn columns(self) -> Vec<String> {
        match self {
            Observable::Coherence(a, b) => vec![format!("re_rho{a}{b}"), format!("im_rho{a}{b}")],
            Observable::Population(a) => vec![format!("pop{a}")],
        }
    }

    /// Every population and upper-triangle coherence of an `n`-level system.
    pub fn all(n: usize) -> Vec<Observable> {
        let pops = (1..=n).map(Observable::Population);
        let cohs = (1..=n).flat_map(|a| (a + 1..=n).map(move |b| Observable::Coherence(a, b)));
        pops.chain(cohs).collect()
    }
}

/// A validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Basename of the output files.
    pub name: String,
    pub protocol: Protocol,
    pub ensemble: EnsembleSpec,
    pub sample_dt: f64,
    pub outputs: Vec<Observable>,
    pub output_path: PathBuf,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::config(format!("malformed config: {e}")))?;
        build(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Applies command-line overrides and revalidates.
    pub fn with_overrides(
        mut self,
        groups: Option<usize>,
        spacing: Option<f64>,
        fwhm: Option<f64>,
        out: Option<PathBuf>,
    ) -> Result<Self> {
        if let Some(n) = groups {
            self.ensemble.n_groups = n;
        }
        if let Some(s) = spacing {
            self.ensemble.spacing = s;
        }
        if let Some(f) = fwhm {
            self.ensemble.fwhm = f;
        }
        if let Some(o) = out {
            self.output_path = o;
        }
        self.ensemble.validate()?;
        Ok(self)
    }
}

fn build(raw: RawConfig) -> Result<RunConfig> {
    let access = raw.access.as_deref().map(str::parse::<AccessMode>).transpose()?;
    let mode = access.unwrap_or(AccessMode::CounterIntuitive);
    let protocol = match raw.protocol.as_str() {
        "fig1" => controlled_echo_protocol(mode),
        "fig2" => resonant_raman_protocol(mode),
        "fig3" => wavelength_convert_protocol(mode),
        "two_level" => two_level_echo_protocol(),
        "two_level_double" => two_level_double_echo_protocol(),
        "inline" => {
            let inline = raw
                .inline
                .as_ref()
                .ok_or_else(|| Error::config("protocol = \"inline\" needs an [inline] section"))?;
            inline_protocol(inline, access)?
        }
        other => return Err(Error::config(format!("unknown protocol `{other}`"))),
    };
    if raw.protocol != "inline" && raw.inline.is_some() {
        return Err(Error::config("[inline] section given for a named protocol"));
    }

    let defaults = EnsembleSpec::default();
    let ensemble = EnsembleSpec {
        n_groups: raw.ensemble.groups.unwrap_or(defaults.n_groups),
        spacing: raw.ensemble.spacing.unwrap_or(defaults.spacing),
        fwhm: raw.ensemble.fwhm.unwrap_or(defaults.fwhm),
        normalize: true,
    };
    ensemble.validate()?;

    let sample_dt = raw.sample_dt.unwrap_or(DEFAULT_SAMPLE_DT);
    if !(sample_dt > 0.0) || !sample_dt.is_finite() {
        return Err(Error::config(format!("sample_dt must be positive, got {sample_dt}")));
    }

    let n = protocol.scheme.n_levels();
    let outputs = match &raw.outputs {
        None => Observable::all(n),
        Some(list) if list.is_empty() => return Err(Error::config("outputs must name at least one observable")),
        Some(list) => list.iter().map(|s| Observable::parse(s)).collect::<Result<Vec<_>>>()?,
    };
    if let Some(o) = outputs.iter().find(|o| o.max_level() == 0 || o.max_level() > n) {
        return Err(Error::config(format!("observable {o:?} does not exist in the {n}-level protocol")));
    }

    Ok(RunConfig {
        name: raw.name.unwrap_or_else(|| protocol.label.clone()),
        protocol,
        ensemble,
        sample_dt,
        outputs,
        output_path: raw.output_path.unwrap_or_else(|| PathBuf::from(".")),
    })
}

fn parse_role(s: &str) -> Result<PulseRole> {
    Ok(match s {
        "data" => PulseRole::Data,
        "transfer" => PulseRole::Transfer,
        "rephase" => PulseRole::Rephase,
        "readout" => PulseRole::Readout,
        "other" => PulseRole::Other,
        _ => return Err(Error::config(format!("unknown pulse role `{s}`"))),
    })
}

fn fields(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

fn number(v: &str, line: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| Error::config(format!("bad number `{v}` in `{line}`")))
}

fn parse_pulse(index: usize, line: &str) -> Result<Pulse> {
    let f = fields(line);
    if !(6..=7).contains(&f.len()) {
        return Err(Error::config(format!(
            "pulse `{line}` needs transition, rabi, t_start, duration, phase, detuning[, role]"
        )));
    }
    let role = f.get(6).map_or(Ok(PulseRole::Other), |r| parse_role(r))?;
    Ok(Pulse::new(
        format!("P{}", index + 1),
        role,
        f[0].parse::<Transition>()?,
        number(f[1], line)?,
        number(f[2], line)?,
        number(f[3], line)?,
    )
    .with_phase(number(f[4], line)?)
    .with_detuning(number(f[5], line)?))
}

fn parse_rate(line: &str) -> Result<(Transition, f64)> {
    match fields(line).as_slice() {
        [t, rate] => Ok((t.parse()?, number(rate, line)?)),
        _ => Err(Error::config(format!("rate `{line}` must read `i-j, kHz`"))),
    }
}

fn inline_protocol(raw: &RawInline, access: Option<AccessMode>) -> Result<Protocol> {
    let scheme = match raw.levels {
        2 => LevelScheme::two_level(),
        3 => LevelScheme::lambda(),
        4 => LevelScheme::double_lambda(),
        n => return Err(Error::config(format!("inline protocols support 2, 3 or 4 levels, got {n}"))),
    };
    let pulses = raw
        .pulses
        .iter()
        .enumerate()
        .map(|(i, l)| parse_pulse(i, l))
        .collect::<Result<Vec<_>>>()?;
    let mut decay = DecayConfig::none();
    for line in &raw.dephasing {
        let (t, rate) = parse_rate(line)?;
        decay.set_dephasing(t.lower, t.upper, rate);
    }
    for line in &raw.population_decay {
        // `l-u, kHz` decays |u⟩ into |l⟩
        let (t, rate) = parse_rate(line)?;
        decay = decay.with_population_decay(t.upper, t.lower, rate);
    }
    let p = raw.probes;
    let probes = Probes {
        t_a: p.t_a,
        t_b: p.t_b,
        t_r: p.t_r,
        t_c: p.t_c,
        t_e: p.t_e,
    };
    let observables = Observables {
        data: raw.data.parse()?,
        echo: raw.echo.parse()?,
        excited: raw.excited,
        echo_ground: raw.echo_ground,
    };
    Protocol::new(
        "inline",
        scheme,
        pulses,
        decay,
        probes,
        raw.t_end,
        access,
        EchoMap::PhotonEcho,
        observables,
    )
    .map_err(|e| match e {
        Error::Config(m) => Error::config(format!("inline protocol: {m}")),
        other => other,
    })
}
