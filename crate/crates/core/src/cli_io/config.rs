//! Line-oriented run configuration.
//!
//! ```text
//! [run]
//! command = design        # fixed-points | spectrum | damping | phonons |
//!                         # sweep | optimize | design | figure
//! [cavity]
//! gamma = 3 MHz
//! [model]
//! kind = josephson
//! delta = -30 kHz
//! ej = 31.32 ueV
//! phi0 = 0.06
//! [mechanics]
//! omega_m = 302 kHz
//! gamma_m = 0.5 Hz
//! g0 = 2.1 kHz
//! nbar_t = 2778
//! ```
//!
//! Comments start with `#` or `;`. Later assignments override earlier ones,
//! which is how `--set section.key=value` overrides work.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::units::{self, parse_quantity, UnitKind};
use crate::cavity::ModelDescriptor;
use crate::semiclassical::MechanicalMode;
use crate::sweep::{
    Axis, AxisName, BranchPolicy, DetuningChoice, DriveChoice, EnergyConvention, FigureId, FigureParams,
    Quantity, Scale, ThresholdReference,
};

/// Where a value came from: a line of the file or a command-line override.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Override,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Override => f.write_str("--set"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{origin}: {msg}")]
    Syntax { origin: Origin, msg: String },
    #[error("missing key '{section}.{key}'")]
    MissingKey { section: String, key: String },
    #[error("{origin}: unknown key '{section}.{key}'")]
    UnknownKey {
        origin: Origin,
        section: String,
        key: String,
    },
    #[error("{origin}: key '{section}.{key}': {msg}")]
    Value {
        origin: Origin,
        section: String,
        key: String,
        msg: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

const KNOWN_KEYS: &[(&str, &[&str])] = &[
    ("run", &["command", "format", "policy"]),
    ("cavity", &["gamma", "energy_convention"]),
    ("model", &["kind", "delta", "drive", "ej", "kerr", "phi0"]),
    ("mechanics", &["omega_m", "gamma_m", "g0", "nbar_t"]),
    ("spectrum", &["omega_min", "omega_max", "points", "method"]),
    ("sweep", &["axis1", "axis2", "outputs"]),
    ("optimize", &["delta_min", "delta_max"]),
    (
        "design",
        &[
            "drive",
            "margin",
            "reference",
            "detuning",
            "delta_min",
            "delta_max",
        ],
    ),
    (
        "figure",
        &["id", "phi0", "points", "deltas", "drives", "axis_max"],
    ),
];

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    section: String,
    key: String,
    value: String,
    origin: Origin,
}

/// Raw `section.key = value` assignments in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    entries: Vec<Entry>,
}

fn check_key(section: &str, key: &str, origin: Origin) -> Result<(), ConfigError> {
    let known = KNOWN_KEYS
        .iter()
        .find(|(s, _)| *s == section)
        .is_some_and(|(_, keys)| keys.contains(&key));
    if known {
        Ok(())
    } else {
        Err(ConfigError::UnknownKey {
            origin,
            section: section.into(),
            key: key.into(),
        })
    }
}

impl Document {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut doc = Document::default();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let origin = Origin::Line(i + 1);
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::Syntax {
                        origin,
                        msg: format!("unterminated section header '{line}'"),
                    })?
                    .trim();
                if !KNOWN_KEYS.iter().any(|(s, _)| *s == name) {
                    return Err(ConfigError::Syntax {
                        origin,
                        msg: format!("unknown section [{name}]"),
                    });
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                origin,
                msg: format!("expected 'key = value', got '{line}'"),
            })?;
            let section = section.clone().ok_or_else(|| ConfigError::Syntax {
                origin,
                msg: "assignment before any [section] header".into(),
            })?;
            let key = key.trim();
            check_key(&section, key, origin)?;
            doc.entries.push(Entry {
                section,
                key: key.to_string(),
                value: value.trim().to_string(),
                origin,
            });
        }
        Ok(doc)
    }

    /// Applies a `section.key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let origin = Origin::Override;
        let syntax = |msg: String| ConfigError::Syntax { origin, msg };
        let (path, value) = assignment
            .split_once('=')
            .ok_or_else(|| syntax(format!("expected section.key=value, got '{assignment}'")))?;
        let (section, key) = path
            .trim()
            .split_once('.')
            .ok_or_else(|| syntax(format!("expected section.key, got '{}'", path.trim())))?;
        check_key(section, key, origin)?;
        self.entries.push(Entry {
            section: section.to_string(),
            key: key.to_string(),
            value: value.trim().to_string(),
            origin,
        });
        Ok(())
    }

    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries
            .iter()
            .rev()
            .find(|e| e.section == section && e.key == key)
    }

    fn has_section(&self, section: &str) -> bool {
        self.entries.iter().any(|e| e.section == section)
    }
}

fn value_error(e: &Entry, msg: impl Into<String>) -> ConfigError {
    ConfigError::Value {
        origin: e.origin,
        section: e.section.clone(),
        key: e.key.clone(),
        msg: msg.into(),
    }
}

fn missing(section: &str, key: &str) -> ConfigError {
    ConfigError::MissingKey {
        section: section.into(),
        key: key.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    FixedPoints,
    Spectrum,
    Damping,
    Phonons,
    Sweep,
    Optimize,
    Design,
    Figure,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::FixedPoints => "fixed-points",
            Command::Spectrum => "spectrum",
            Command::Damping => "damping",
            Command::Phonons => "phonons",
            Command::Sweep => "sweep",
            Command::Optimize => "optimize",
            Command::Design => "design",
            Command::Figure => "figure",
        }
    }
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        [
            Command::FixedPoints,
            Command::Spectrum,
            Command::Damping,
            Command::Phonons,
            Command::Sweep,
            Command::Optimize,
            Command::Design,
            Command::Figure,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
        .ok_or_else(|| format!("unknown command '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("unknown format '{s}' (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    /// Closed-form spectrum.
    ClosedForm,
    /// Numerical Fourier transform of the correlators.
    Transform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSpec {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    pub method: SpectrumMethod,
}

impl Default for SpectrumSpec {
    fn default() -> Self {
        SpectrumSpec {
            omega_min: -3.0,
            omega_max: 3.0,
            points: 121,
            method: SpectrumMethod::ClosedForm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    pub outputs: Vec<Quantity>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaRange {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    /// `FromInputs` uses the model drive.
    pub drive: DriveChoice,
    pub detuning: DetuningChoice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureSpec {
    pub id: FigureId,
    pub params: FigureParams,
}

/// A validated run, with every value in internal units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub command: Command,
    pub format: OutputFormat,
    pub policy: Option<BranchPolicy>,
    /// Cavity linewidth `gamma / 2 pi` in Hz, when SI units are in play.
    pub gamma_hz: Option<f64>,
    pub energy_convention: EnergyConvention,
    pub model: Option<ModelDescriptor>,
    pub mech: Option<MechanicalMode>,
    pub spectrum: Option<SpectrumSpec>,
    pub sweep: Option<SweepSpec>,
    pub optimize: Option<DeltaRange>,
    pub design: Option<DesignSpec>,
    pub figure: Option<FigureSpec>,
}

struct Reader<'a> {
    doc: &'a Document,
    gamma_hz: Option<f64>,
    convention: EnergyConvention,
}

impl Reader<'_> {
    fn text(&self, section: &str, key: &str) -> Option<&Entry> {
        self.doc.get(section, key)
    }

    fn parsed<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.text(section, key)
            .map(|e| {
                e.value
                    .parse::<T>()
                    .map_err(|err| value_error(e, err.to_string()))
            })
            .transpose()
    }

    fn number(&self, section: &str, key: &str, kind: Option<UnitKind>) -> Result<Option<f64>, ConfigError> {
        let Some(e) = self.text(section, key) else {
            return Ok(None);
        };
        let q = parse_quantity(&e.value, kind).map_err(|m| value_error(e, m))?;
        units::to_internal(q, self.gamma_hz, self.convention)
            .map(Some)
            .map_err(|m| value_error(e, m))
    }

    fn required(&self, section: &str, key: &str, kind: Option<UnitKind>) -> Result<f64, ConfigError> {
        self.number(section, key, kind)?
            .ok_or_else(|| missing(section, key))
    }

    fn list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(e) = self.text(section, key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| value_error(e, format!("'{}' is not a number", s.trim())))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    fn count(&self, section: &str, key: &str) -> Result<Option<usize>, ConfigError> {
        self.parsed::<usize>(section, key)
    }
}

fn parse_axis(e: &Entry) -> Result<Axis, ConfigError> {
    let parts: Vec<&str> = e.value.split(':').map(str::trim).collect();
    if !(parts.len() == 4 || parts.len() == 5) {
        return Err(value_error(e, "expected name:min:max:count[:linear|log]"));
    }
    let name: AxisName = parts[0]
        .parse()
        .map_err(|err: crate::Error| value_error(e, err.to_string()))?;
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| value_error(e, format!("'{s}' is not a number")))
    };
    let count = parts[3]
        .parse::<usize>()
        .map_err(|_| value_error(e, format!("'{}' is not a count", parts[3])))?;
    let scale = match parts.get(4) {
        Some(s) => s
            .parse::<Scale>()
            .map_err(|err| value_error(e, err.to_string()))?,
        None => Scale::Linear,
    };
    let axis = Axis {
        name,
        min: num(parts[1])?,
        max: num(parts[2])?,
        count,
        scale,
    };
    axis.validate().map_err(|err| value_error(e, err.to_string()))?;
    Ok(axis)
}

fn invalid(err: crate::Error) -> ConfigError {
    ConfigError::Invalid(err.to_string())
}

/// Parses a configuration document into a validated [`RunSpec`].
pub fn parse_config(text: &str) -> Result<RunSpec, ConfigError> {
    RunSpec::from_document(&Document::parse(text)?)
}

impl RunSpec {
    pub fn from_document(doc: &Document) -> Result<RunSpec, ConfigError> {
        let command: Command = doc
            .get("run", "command")
            .ok_or_else(|| missing("run", "command"))
            .and_then(|e| e.value.parse().map_err(|m: String| value_error(e, m)))?;

        let mut r = Reader {
            doc,
            gamma_hz: None,
            convention: EnergyConvention::HGamma,
        };
        if let Some(e) = doc.get("cavity", "gamma") {
            match parse_quantity(&e.value, Some(UnitKind::Frequency)).map_err(|m| value_error(e, m))? {
                units::Quantity::Hertz(f) if f > 0.0 => r.gamma_hz = Some(f),
                _ => {
                    return Err(value_error(
                        e,
                        "the linewidth needs a positive value with a frequency unit",
                    ))
                }
            }
        }
        if let Some(c) = r.parsed::<EnergyConvention>("cavity", "energy_convention")? {
            r.convention = c;
        }
        let format = r.parsed::<OutputFormat>("run", "format")?.unwrap_or_default();
        let policy = r.parsed::<BranchPolicy>("run", "policy")?;

        let design = if command == Command::Design || doc.has_section("design") {
            Some(read_design(&r)?)
        } else {
            None
        };
        let drive_optional = matches!(
            design,
            Some(DesignSpec {
                drive: DriveChoice::ThresholdMargin { .. },
                ..
            })
        );

        let needs_model = command != Command::Figure;
        let model = if needs_model || doc.has_section("model") {
            Some(read_model(&r, drive_optional)?)
        } else {
            None
        };

        let needs_mech = matches!(
            command,
            Command::Damping | Command::Phonons | Command::Optimize | Command::Design
        );
        let mech = if needs_mech || doc.has_section("mechanics") {
            let m = MechanicalMode::new(
                r.required("mechanics", "omega_m", Some(UnitKind::Frequency))?,
                r.required("mechanics", "gamma_m", Some(UnitKind::Frequency))?,
                r.required("mechanics", "nbar_t", None)?,
                r.required("mechanics", "g0", Some(UnitKind::Frequency))?,
            )
            .map_err(invalid)?;
            Some(m)
        } else {
            None
        };

        let spectrum = if doc.has_section("spectrum") {
            let d = SpectrumSpec::default();
            let method = match r.text("spectrum", "method") {
                None => d.method,
                Some(e) => match e.value.as_str() {
                    "closed_form" => SpectrumMethod::ClosedForm,
                    "transform" => SpectrumMethod::Transform,
                    other => {
                        return Err(value_error(
                            e,
                            format!("unknown method '{other}' (expected closed_form or transform)"),
                        ))
                    }
                },
            };
            let s = SpectrumSpec {
                omega_min: r
                    .number("spectrum", "omega_min", Some(UnitKind::Frequency))?
                    .unwrap_or(d.omega_min),
                omega_max: r
                    .number("spectrum", "omega_max", Some(UnitKind::Frequency))?
                    .unwrap_or(d.omega_max),
                points: r.count("spectrum", "points")?.unwrap_or(d.points),
                method,
            };
            if !(s.omega_min < s.omega_max) || s.points < 2 {
                return Err(ConfigError::Invalid(
                    "spectrum needs omega_min < omega_max and at least 2 points".into(),
                ));
            }
            Some(s)
        } else {
            None
        };

        let sweep = if command == Command::Sweep || doc.has_section("sweep") {
            let mut axes = vec![parse_axis(
                doc.get("sweep", "axis1")
                    .ok_or_else(|| missing("sweep", "axis1"))?,
            )?];
            if let Some(e) = doc.get("sweep", "axis2") {
                axes.push(parse_axis(e)?);
            }
            let e = doc
                .get("sweep", "outputs")
                .ok_or_else(|| missing("sweep", "outputs"))?;
            let outputs = e
                .value
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<Quantity>()
                        .map_err(|err| value_error(e, err.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Some(SweepSpec { axes, outputs })
        } else {
            None
        };

        let optimize = if command == Command::Optimize || doc.has_section("optimize") {
            let d = DeltaRange {
                min: r.required("optimize", "delta_min", Some(UnitKind::Frequency))?,
                max: r.required("optimize", "delta_max", Some(UnitKind::Frequency))?,
            };
            if !(d.min < d.max) {
                return Err(ConfigError::Invalid(
                    "optimize needs delta_min < delta_max".into(),
                ));
            }
            Some(d)
        } else {
            None
        };

        let figure = if command == Command::Figure || doc.has_section("figure") {
            let id = r
                .parsed::<FigureId>("figure", "id")?
                .ok_or_else(|| missing("figure", "id"))?;
            let params = FigureParams {
                phi0: r.number("figure", "phi0", None)?,
                points: r.count("figure", "points")?,
                deltas: r.list("figure", "deltas")?,
                drives: r.list("figure", "drives")?,
                axis_max: r.number("figure", "axis_max", None)?,
                mech: None,
            };
            Some(FigureSpec { id, params })
        } else {
            None
        };

        if command == Command::Design {
            match model {
                Some(ModelDescriptor::Josephson { .. }) => {}
                _ => return Err(ConfigError::Invalid("design needs a josephson model".into())),
            }
            if r.gamma_hz.is_none() {
                return Err(missing("cavity", "gamma"));
            }
        }

        let spec = RunSpec {
            command,
            format,
            policy,
            gamma_hz: r.gamma_hz,
            energy_convention: r.convention,
            model,
            mech,
            spectrum,
            sweep,
            optimize,
            design,
            figure,
        };
        if let Some(s) = &spec.sweep {
            spec.sweep_grid_from(s).validate(&s.outputs).map_err(invalid)?;
        }
        Ok(spec)
    }

    pub(crate) fn sweep_grid_from(&self, s: &SweepSpec) -> crate::sweep::SweepGrid {
        let model = self.model.unwrap_or(ModelDescriptor::linear(0.0, 0.0));
        let mut grid = crate::sweep::SweepGrid::new(model, s.axes.clone());
        grid.mech = self.mech;
        if let Some(p) = self.policy {
            grid.policy = p;
        }
        grid
    }

    /// Writes the spec back as a configuration document in internal units.
    /// Parsing the result reproduces `self`.
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line("[run]".into());
        line(format!("command = {}", self.command.as_str()));
        line(format!("format = {}", self.format.as_str()));
        if let Some(p) = self.policy {
            line(format!("policy = {}", policy_str(p)));
        }
        line("[cavity]".into());
        if let Some(g) = self.gamma_hz {
            line(format!("gamma = {g} Hz"));
        }
        line(format!("energy_convention = {}", self.energy_convention.as_str()));
        if let Some(m) = self.model {
            line("[model]".into());
            line(format!("kind = {}", m.kind_name()));
            line(format!("delta = {}", m.delta()));
            match m {
                ModelDescriptor::Linear { drive, .. } => line(format!("drive = {drive}")),
                ModelDescriptor::Kerr { drive, kerr, .. } => {
                    line(format!("drive = {drive}"));
                    line(format!("kerr = {kerr}"));
                }
                ModelDescriptor::Josephson { ej, phi0, .. } => {
                    line(format!("ej = {ej} *hgamma"));
                    line(format!("phi0 = {phi0}"));
                }
            }
        }
        if let Some(m) = self.mech {
            line("[mechanics]".into());
            line(format!("omega_m = {}", m.omega_m));
            line(format!("gamma_m = {}", m.gamma_m));
            line(format!("g0 = {}", m.g0));
            line(format!("nbar_t = {}", m.nbar_t));
        }
        if let Some(s) = self.spectrum {
            line("[spectrum]".into());
            line(format!("omega_min = {}", s.omega_min));
            line(format!("omega_max = {}", s.omega_max));
            line(format!("points = {}", s.points));
            let method = match s.method {
                SpectrumMethod::ClosedForm => "closed_form",
                SpectrumMethod::Transform => "transform",
            };
            line(format!("method = {method}"));
        }
        if let Some(s) = &self.sweep {
            line("[sweep]".into());
            for (i, a) in s.axes.iter().enumerate() {
                let scale = match a.scale {
                    Scale::Linear => "linear",
                    Scale::Log => "log",
                };
                line(format!(
                    "axis{} = {}:{}:{}:{}:{}",
                    i + 1,
                    a.name.as_str(),
                    a.min,
                    a.max,
                    a.count,
                    scale
                ));
            }
            let outs: Vec<&str> = s.outputs.iter().map(|q| q.as_str()).collect();
            line(format!("outputs = {}", outs.join(", ")));
        }
        if let Some(d) = self.optimize {
            line("[optimize]".into());
            line(format!("delta_min = {}", d.min));
            line(format!("delta_max = {}", d.max));
        }
        if let Some(d) = self.design {
            line("[design]".into());
            match d.drive {
                DriveChoice::FromInputs | DriveChoice::Internal { .. } => line("drive = inputs".into()),
                DriveChoice::ThresholdMargin { margin, reference } => {
                    line("drive = margin".into());
                    line(format!("margin = {margin}"));
                    let r = match reference {
                        ThresholdReference::Resonance => "resonance",
                        ThresholdReference::AtDetuning => "at_detuning",
                    };
                    line(format!("reference = {r}"));
                }
            }
            match d.detuning {
                DetuningChoice::FromInputs => line("detuning = inputs".into()),
                DetuningChoice::Optimize { min, max } => {
                    line("detuning = optimize".into());
                    line(format!("delta_min = {min}"));
                    line(format!("delta_max = {max}"));
                }
            }
        }
        if let Some(f) = &self.figure {
            line("[figure]".into());
            line(format!("id = {}", f.id));
            let p = &f.params;
            if let Some(v) = p.phi0 {
                line(format!("phi0 = {v}"));
            }
            if let Some(v) = p.points {
                line(format!("points = {v}"));
            }
            let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
            if let Some(v) = &p.deltas {
                line(format!("deltas = {}", join(v)));
            }
            if let Some(v) = &p.drives {
                line(format!("drives = {}", join(v)));
            }
            if let Some(v) = p.axis_max {
                line(format!("axis_max = {v}"));
            }
        }
        out
    }
}

fn policy_str(p: BranchPolicy) -> &'static str {
    match p {
        BranchPolicy::All => "all",
        BranchPolicy::StableOnly => "stable_only",
        BranchPolicy::PlusOnly => "plus_only",
    }
}

fn read_model(r: &Reader<'_>, drive_optional: bool) -> Result<ModelDescriptor, ConfigError> {
    let e = r.text("model", "kind").ok_or_else(|| missing("model", "kind"))?;
    let delta = r.required("model", "delta", Some(UnitKind::Frequency))?;
    let model = match e.value.as_str() {
        "linear" => ModelDescriptor::linear(delta, r.required("model", "drive", Some(UnitKind::Frequency))?),
        "kerr" => ModelDescriptor::kerr(
            delta,
            r.required("model", "drive", Some(UnitKind::Frequency))?,
            r.required("model", "kerr", Some(UnitKind::Frequency))?,
        ),
        "josephson" => {
            let ej = match r.number("model", "ej", Some(UnitKind::Energy))? {
                Some(v) => v,
                None if drive_optional => 0.0,
                None => return Err(missing("model", "ej")),
            };
            ModelDescriptor::josephson(delta, ej, r.required("model", "phi0", None)?)
        }
        other => {
            return Err(value_error(
                e,
                format!("unknown model kind '{other}' (expected linear, kerr or josephson)"),
            ))
        }
    };
    model.validate().map_err(invalid)?;
    Ok(model)
}

fn read_design(r: &Reader<'_>) -> Result<DesignSpec, ConfigError> {
    let drive = match r.text("design", "drive") {
        None => DriveChoice::FromInputs,
        Some(e) => match e.value.as_str() {
            "inputs" => DriveChoice::FromInputs,
            "margin" => {
                let margin = r.required("design", "margin", None)?;
                if !(margin > 0.0 && margin < 1.0) {
                    return Err(value_error(
                        r.text("design", "margin").expect("present"),
                        "margin must lie in (0, 1)",
                    ));
                }
                let reference = match r.text("design", "reference") {
                    None => ThresholdReference::AtDetuning,
                    Some(e) => match e.value.as_str() {
                        "at_detuning" => ThresholdReference::AtDetuning,
                        "resonance" => ThresholdReference::Resonance,
                        other => {
                            return Err(value_error(
                                e,
                                format!("unknown reference '{other}' (expected at_detuning or resonance)"),
                            ))
                        }
                    },
                };
                DriveChoice::ThresholdMargin { margin, reference }
            }
            other => {
                return Err(value_error(
                    e,
                    format!("unknown drive choice '{other}' (expected inputs or margin)"),
                ))
            }
        },
    };
    let detuning = match r.text("design", "detuning") {
        None => DetuningChoice::FromInputs,
        Some(e) => match e.value.as_str() {
            "inputs" => DetuningChoice::FromInputs,
            "optimize" => {
                let min = r.required("design", "delta_min", Some(UnitKind::Frequency))?;
                let max = r.required("design", "delta_max", Some(UnitKind::Frequency))?;
                if !(min < max) {
                    return Err(ConfigError::Invalid("design needs delta_min < delta_max".into()));
                }
                DetuningChoice::Optimize { min, max }
            }
            other => {
                return Err(value_error(
                    e,
                    format!("unknown detuning choice '{other}' (expected inputs or optimize)"),
                ))
            }
        },
    };
    Ok(DesignSpec { drive, detuning })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE1: &str = "\
[run]
command = design
[cavity]
gamma = 3 MHz
[model]
kind = josephson
delta = -30 kHz   ; red detuned
ej = 31.32 ueV
phi0 = 0.06
[mechanics]
omega_m = 302 kHz
gamma_m = 0.5 Hz
g0 = 2.1 kHz
nbar_t = 2778
";

    #[test]
    fn reads_reference_device() {
        let spec = parse_config(TABLE1).unwrap();
        let m = spec.mech.unwrap();
        assert!((m.omega_m - 302.0 / 3e3).abs() < 1e-15);
        assert!((m.g0 - 2.1 / 3e3).abs() < 1e-15);
        let model = spec.model.unwrap();
        assert!((model.delta() + 0.01).abs() < 1e-15);
        assert!((model.drive() - 401.77).abs() < 0.01, "{}", model.drive());
    }

    #[test]
    fn missing_phi0_is_named() {
        let text = TABLE1.replace("phi0 = 0.06\n", "");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err, missing("model", "phi0"));
        assert!(err.to_string().contains("model.phi0"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_config("[run]\ncommand = sweep\n[model]\nkind = linear\ndelta = x\n").unwrap_err();
        assert!(err.to_string().starts_with("line 5"), "{err}");
        let err = parse_config("[run]\ncommand = sweep\n[modle]\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        let err = parse_config("[model]\nphi = 1\n").unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { .. }));
    }

    #[test]
    fn hgamma_suffix_passes_through() {
        let text = "[run]\ncommand = fixed-points\n[model]\nkind = josephson\ndelta = 0\nej = 750 *hgamma\nphi0 = 0.06\n";
        assert_eq!(parse_config(text).unwrap().model.unwrap().drive(), 750.0);
    }

    #[test]
    fn overrides_win() {
        let mut doc = Document::parse(TABLE1).unwrap();
        doc.set("model.delta=0.5").unwrap();
        doc.set("run.command = phonons").unwrap();
        let spec = RunSpec::from_document(&doc).unwrap();
        assert_eq!(spec.model.unwrap().delta(), 0.5);
        assert_eq!(spec.command, Command::Phonons);
        assert!(doc.set("model").is_err());
        assert!(matches!(
            doc.set("model.foo=1"),
            Err(ConfigError::UnknownKey { .. })
        ));
    }

    #[test]
    fn round_trips() {
        let spec = parse_config(TABLE1).unwrap();
        assert_eq!(parse_config(&spec.to_config()).unwrap(), spec);
    }
}
