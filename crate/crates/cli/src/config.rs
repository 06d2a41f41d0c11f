//! Line-oriented experiment configuration.
//!
//! ```text
//! # comment
//! lattice.sites = 4
//! hamiltonian.potential = ramp(0.1)
//! plan.algo = a2-online
//! ```
//!
//! Every key belongs to one of the sections `lattice`, `hamiltonian`, `plan`,
//! `measurement` and `output`. Unknown keys, repeated keys and malformed
//! values are errors that carry the offending line. [`ExperimentConfig::emit`]
//! writes every field in a fixed order, so `parse(emit(c))` reproduces `c`
//! and a second emission is byte-identical to the first.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use fockforge_core::fixedpoint::{InvDistancePath, MAX_BITS};
use fockforge_core::lattice::{Geometry, LatticeSpec};
use fockforge_core::measure::{Pulse, Scheme};
use fockforge_core::Splitting;
use sha2::{Digest, Sha256};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    A1,
    A2,
    A2Online,
}

impl Algo {
    pub const ALL: [Algo; 3] = [Algo::A1, Algo::A2, Algo::A2Online];

    pub fn name(self) -> &'static str {
        match self {
            Algo::A1 => "a1",
            Algo::A2 => "a2",
            Algo::A2Online => "a2-online",
        }
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("expected one of a1, a2, a2-online; got '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialProfile {
    Zero,
    /// `V_p = s·p`.
    Ramp(f64),
    /// `V_p = s·(−1)^p`.
    Staggered(f64),
    Values(Vec<f64>),
}

impl PotentialProfile {
    pub fn values(&self, sites: usize) -> Vec<f64> {
        match self {
            PotentialProfile::Zero => vec![0.0; sites],
            PotentialProfile::Ramp(s) => (0..sites).map(|p| s * p as f64).collect(),
            PotentialProfile::Staggered(s) => (0..sites).map(|p| if p % 2 == 0 { *s } else { -s }).collect(),
            PotentialProfile::Values(v) => v.clone(),
        }
    }
}

impl fmt::Display for PotentialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialProfile::Zero => f.write_str("zero"),
            PotentialProfile::Ramp(s) => write!(f, "ramp({s})"),
            PotentialProfile::Staggered(s) => write!(f, "staggered({s})"),
            PotentialProfile::Values(v) => f.write_str(&join(v)),
        }
    }
}

impl FromStr for PotentialProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "zero" {
            return Ok(PotentialProfile::Zero);
        }
        if let Some(arg) = call_argument(s, "ramp") {
            return Ok(PotentialProfile::Ramp(parse_f64(arg)?));
        }
        if let Some(arg) = call_argument(s, "staggered") {
            return Ok(PotentialProfile::Staggered(parse_f64(arg)?));
        }
        Ok(PotentialProfile::Values(parse_list(s, parse_f64)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitalBasis {
    /// Site orbitals.
    Position,
    /// Plane waves, the rows of the discrete Fourier transform.
    Momentum,
}

impl OrbitalBasis {
    pub fn name(self) -> &'static str {
        match self {
            OrbitalBasis::Position => "position",
            OrbitalBasis::Momentum => "momentum",
        }
    }
}

impl FromStr for OrbitalBasis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "position" => Ok(OrbitalBasis::Position),
            "momentum" => Ok(OrbitalBasis::Momentum),
            other => Err(format!("expected position or momentum; got '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableKind {
    /// Seeded random Hermitian matrix of `measurement.dimension`.
    Random,
    /// The sector Hamiltonian of the configured lattice.
    Hamiltonian,
    /// `diag(measurement.eigenvalues)`.
    Diagonal,
}

impl ObservableKind {
    pub fn name(self) -> &'static str {
        match self {
            ObservableKind::Random => "random",
            ObservableKind::Hamiltonian => "hamiltonian",
            ObservableKind::Diagonal => "diagonal",
        }
    }
}

impl FromStr for ObservableKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random" => Ok(ObservableKind::Random),
            "hamiltonian" => Ok(ObservableKind::Hamiltonian),
            "diagonal" => Ok(ObservableKind::Diagonal),
            other => Err(format!("expected random, hamiltonian or diagonal; got '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Random,
    /// The `k`-th eigenvector of the observable, ascending.
    Eigen(usize),
    /// The `k`-th computational basis vector.
    Basis(usize),
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateKind::Random => f.write_str("random"),
            StateKind::Eigen(k) => write!(f, "eigen({k})"),
            StateKind::Basis(k) => write!(f, "basis({k})"),
        }
    }
}

impl FromStr for StateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "random" {
            return Ok(StateKind::Random);
        }
        if let Some(arg) = call_argument(s, "eigen") {
            return Ok(StateKind::Eigen(parse_usize(arg)?));
        }
        if let Some(arg) = call_argument(s, "basis") {
            return Ok(StateKind::Basis(parse_usize(arg)?));
        }
        Err(format!("expected random, eigen(k) or basis(k); got '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Tsv,
    Csv,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Tsv => "tsv",
            Format::Csv => "csv",
        }
    }

    pub fn separator(self) -> char {
        match self {
            Format::Tsv => '\t',
            Format::Csv => ',',
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tsv" => Ok(Format::Tsv),
            "csv" => Ok(Format::Csv),
            other => Err(format!("expected tsv or csv; got '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSection {
    pub sites: usize,
    pub geometry: Geometry,
    pub spacing: f64,
    pub particles: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSection {
    pub hopping: f64,
    pub potential: PotentialProfile,
    pub coulomb: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanSection {
    pub algo: Algo,
    pub dt: f64,
    pub steps: usize,
    pub splitting: Splitting,
    /// Fixed-point width for the diagonal phases; exact arithmetic when unset.
    pub bits: Option<u32>,
    pub inv_distance: InvDistancePath,
    /// Occupied orbitals of the initial Slater determinant; the lowest `N`
    /// when unset.
    pub orbitals: Option<Vec<usize>>,
    pub basis: OrbitalBasis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSection {
    pub scheme: Scheme,
    pub observable: ObservableKind,
    pub eigenvalues: Option<Vec<f64>>,
    pub lambda: Option<f64>,
    pub dimension: usize,
    pub pointer: usize,
    pub pulse: Pulse,
    pub state: StateKind,
    pub times: Vec<f64>,
    pub shots: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSection {
    pub path: String,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub lattice: LatticeSection,
    pub hamiltonian: HamiltonianSection,
    pub plan: PlanSection,
    pub measurement: MeasurementSection,
    pub output: OutputSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            lattice: LatticeSection {
                sites: 4,
                geometry: Geometry::Ring,
                spacing: 1.0,
                particles: 2,
            },
            hamiltonian: HamiltonianSection {
                hopping: 1.0,
                potential: PotentialProfile::Zero,
                coulomb: 1.0,
            },
            plan: PlanSection {
                algo: Algo::A2,
                dt: 0.05,
                steps: 20,
                splitting: Splitting::Strang2,
                bits: None,
                inv_distance: InvDistancePath::Direct,
                orbitals: None,
                basis: OrbitalBasis::Position,
            },
            measurement: MeasurementSection {
                scheme: Scheme::Kickback,
                observable: ObservableKind::Random,
                eigenvalues: None,
                lambda: None,
                dimension: 4,
                pointer: 8,
                pulse: Pulse::Hadamard,
                state: StateKind::Random,
                times: vec![1.0],
                shots: 1024,
                seed: 0,
            },
            output: OutputSection {
                path: "-".into(),
                format: Format::Tsv,
            },
        }
    }
}

pub const KEYS: [&str; 28] = [
    "lattice.sites",
    "lattice.geometry",
    "lattice.spacing",
    "lattice.particles",
    "hamiltonian.hopping",
    "hamiltonian.potential",
    "hamiltonian.coulomb",
    "plan.algo",
    "plan.dt",
    "plan.steps",
    "plan.splitting",
    "plan.bits",
    "plan.inv_distance",
    "plan.orbitals",
    "plan.basis",
    "measurement.scheme",
    "measurement.observable",
    "measurement.eigenvalues",
    "measurement.lambda",
    "measurement.dimension",
    "measurement.pointer",
    "measurement.pulse",
    "measurement.state",
    "measurement.times",
    "measurement.shots",
    "measurement.seed",
    "output.path",
    "output.format",
];

fn call_argument<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')').map(str::trim)
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if !x.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(x)
}

fn parse_usize(s: &str) -> Result<usize, String> {
    s.trim().parse().map_err(|_| format!("'{s}' is not a nonnegative integer"))
}

fn parse_u64(s: &str) -> Result<u64, String> {
    s.trim().parse().map_err(|_| format!("'{s}' is not a nonnegative integer"))
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    if s.trim().is_empty() {
        return Err("empty list".into());
    }
    s.split(',').map(|x| item(x.trim())).collect()
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn parse_named<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    s.parse::<T>().map_err(|e| e.to_string())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = Self::default();
        let mut lines: HashMap<&'static str, usize> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::at(line_no, content, "expected 'section.key = value'"))?;
            let key = key.trim();
            let value = value.trim();
            let known = KEYS
                .iter()
                .copied()
                .find(|k| *k == key)
                .ok_or_else(|| ConfigError::at(line_no, key, "unknown key"))?;
            if let Some(first) = lines.insert(known, line_no) {
                return Err(ConfigError::at(line_no, key, format!("already set on line {first}")));
            }
            config
                .assign(known, value)
                .map_err(|message| ConfigError::at(line_no, key, message))?;
        }
        config.validate(&lines)?;
        Ok(config)
    }

    fn assign(&mut self, key: &str, value: &str) -> Result<(), String> {
        let m = &mut self.measurement;
        match key {
            "lattice.sites" => self.lattice.sites = parse_usize(value)?,
            "lattice.geometry" => self.lattice.geometry = parse_named(value)?,
            "lattice.spacing" => self.lattice.spacing = parse_f64(value)?,
            "lattice.particles" => self.lattice.particles = parse_usize(value)?,
            "hamiltonian.hopping" => self.hamiltonian.hopping = parse_f64(value)?,
            "hamiltonian.potential" => self.hamiltonian.potential = value.parse()?,
            "hamiltonian.coulomb" => self.hamiltonian.coulomb = parse_f64(value)?,
            "plan.algo" => self.plan.algo = value.parse()?,
            "plan.dt" => self.plan.dt = parse_f64(value)?,
            "plan.steps" => self.plan.steps = parse_usize(value)?,
            "plan.splitting" => self.plan.splitting = parse_named(value)?,
            "plan.bits" => {
                self.plan.bits = match value {
                    "exact" => None,
                    v => Some(v.parse().map_err(|_| format!("'{v}' is not a bit count or 'exact'"))?),
                }
            }
            "plan.inv_distance" => self.plan.inv_distance = parse_named(value)?,
            "plan.orbitals" => self.plan.orbitals = Some(parse_list(value, parse_usize)?),
            "plan.basis" => self.plan.basis = value.parse()?,
            "measurement.scheme" => m.scheme = parse_named(value)?,
            "measurement.observable" => m.observable = value.parse()?,
            "measurement.eigenvalues" => m.eigenvalues = Some(parse_list(value, parse_f64)?),
            "measurement.lambda" => m.lambda = Some(parse_f64(value)?),
            "measurement.dimension" => m.dimension = parse_usize(value)?,
            "measurement.pointer" => m.pointer = parse_usize(value)?,
            "measurement.pulse" => m.pulse = parse_named(value)?,
            "measurement.state" => m.state = value.parse()?,
            "measurement.times" => m.times = parse_list(value, parse_f64)?,
            "measurement.shots" => m.shots = parse_u64(value)?,
            "measurement.seed" => m.seed = parse_u64(value)?,
            "output.path" => {
                if value.is_empty() {
                    return Err("empty path".into());
                }
                self.output.path = value.to_string()
            }
            "output.format" => self.output.format = value.parse()?,
            _ => unreachable!("key checked against KEYS"),
        }
        Ok(())
    }

    fn validate(&self, lines: &HashMap<&'static str, usize>) -> Result<(), ConfigError> {
        let fail = |key: &str, message: String| ConfigError::new(lines.get(key).copied(), key, message);
        let l = &self.lattice;
        LatticeSpec::new(l.sites, l.geometry, l.spacing).map_err(|e| fail("lattice.sites", e.to_string()))?;
        if l.particles > l.sites {
            return Err(fail(
                "lattice.particles",
                format!("{} fermions do not fit on {} sites", l.particles, l.sites),
            ));
        }
        if self.hamiltonian.coulomb < 0.0 {
            return Err(fail("hamiltonian.coulomb", "strength must be nonnegative".into()));
        }
        if let PotentialProfile::Values(v) = &self.hamiltonian.potential {
            if v.len() != l.sites {
                return Err(fail(
                    "hamiltonian.potential",
                    format!("{} values given for {} sites", v.len(), l.sites),
                ));
            }
        }
        if let Some(b) = self.plan.bits {
            if b == 0 || b > MAX_BITS {
                return Err(fail("plan.bits", format!("bit count must lie in 1..={MAX_BITS}")));
            }
        }
        if let Some(orbitals) = &self.plan.orbitals {
            if orbitals.len() != l.particles {
                return Err(fail(
                    "plan.orbitals",
                    format!("{} orbitals given for {} particles", orbitals.len(), l.particles),
                ));
            }
            let mut seen = vec![false; l.sites];
            for &o in orbitals {
                if o >= l.sites || std::mem::replace(&mut seen[o], true) {
                    return Err(fail("plan.orbitals", format!("orbital {o} is out of range or repeated")));
                }
            }
        }
        let m = &self.measurement;
        if m.observable == ObservableKind::Diagonal && m.eigenvalues.is_none() {
            return Err(fail("measurement.observable", "diagonal observable needs measurement.eigenvalues".into()));
        }
        if m.dimension == 0 {
            return Err(fail("measurement.dimension", "dimension must be positive".into()));
        }
        if m.pointer < 2 {
            return Err(fail("measurement.pointer", "pointer needs at least 2 positions".into()));
        }
        if m.times.iter().any(|t| *t <= 0.0) {
            return Err(fail("measurement.times", "times must be positive".into()));
        }
        if m.shots == 0 {
            return Err(fail("measurement.shots", "at least one shot is required".into()));
        }
        Ok(())
    }

    /// Canonical text: every field, fixed order, no comments.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        let mut put = |key: &str, value: String| {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(&value);
            out.push('\n');
        };
        let (l, h, p, m, o) = (&self.lattice, &self.hamiltonian, &self.plan, &self.measurement, &self.output);
        put("lattice.sites", l.sites.to_string());
        put("lattice.geometry", l.geometry.name().into());
        put("lattice.spacing", l.spacing.to_string());
        put("lattice.particles", l.particles.to_string());
        put("hamiltonian.hopping", h.hopping.to_string());
        put("hamiltonian.potential", h.potential.to_string());
        put("hamiltonian.coulomb", h.coulomb.to_string());
        put("plan.algo", p.algo.name().into());
        put("plan.dt", p.dt.to_string());
        put("plan.steps", p.steps.to_string());
        put("plan.splitting", p.splitting.name().into());
        put("plan.bits", p.bits.map_or_else(|| "exact".into(), |b| b.to_string()));
        put("plan.inv_distance", p.inv_distance.name().into());
        if let Some(orbitals) = &p.orbitals {
            put("plan.orbitals", join(orbitals));
        }
        put("plan.basis", p.basis.name().into());
        put("measurement.scheme", m.scheme.name().into());
        put("measurement.observable", m.observable.name().into());
        if let Some(e) = &m.eigenvalues {
            put("measurement.eigenvalues", join(e));
        }
        if let Some(lambda) = m.lambda {
            put("measurement.lambda", lambda.to_string());
        }
        put("measurement.dimension", m.dimension.to_string());
        put("measurement.pointer", m.pointer.to_string());
        put("measurement.pulse", m.pulse.name().into());
        put("measurement.state", m.state.to_string());
        put("measurement.times", join(&m.times));
        put("measurement.shots", m.shots.to_string());
        put("measurement.seed", m.seed.to_string());
        put("output.path", o.path.clone());
        put("output.format", o.format.name().into());
        out
    }

    /// First 16 hex digits of the SHA-256 of [`ExperimentConfig::emit`].
    pub fn hash(&self) -> String {
        Sha256::digest(self.emit().as_bytes())
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn lattice_spec(&self) -> LatticeSpec {
        LatticeSpec::new(self.lattice.sites, self.lattice.geometry, self.lattice.spacing)
            .expect("lattice validated at load")
    }

    pub fn orbitals(&self) -> Vec<usize> {
        self.plan
            .orbitals
            .clone()
            .unwrap_or_else(|| (0..self.lattice.particles).collect())
    }
}
