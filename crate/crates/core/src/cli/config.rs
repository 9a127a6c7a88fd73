//! Typed run configuration: `key = value` files with `[section]` headers,
//! overridden by flags, with defaults filled in and provenance kept.

use std::fmt;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use ini::Ini;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Environment variable naming the output directory when `--out` is absent.
pub const OUT_ENV: &str = "POLYSPEC_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    KernelEval,
    EmpiricalNtk,
    Spectrum,
    DecayFit,
    Harmonics,
    Sinusoids,
    Robustness,
    Gradcheck,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::KernelEval,
        Command::EmpiricalNtk,
        Command::Spectrum,
        Command::DecayFit,
        Command::Harmonics,
        Command::Sinusoids,
        Command::Robustness,
        Command::Gradcheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::KernelEval => "kernel-eval",
            Command::EmpiricalNtk => "empirical-ntk",
            Command::Spectrum => "spectrum",
            Command::DecayFit => "decay-fit",
            Command::Harmonics => "harmonics",
            Command::Sinusoids => "sinusoids",
            Command::Robustness => "robustness",
            Command::Gradcheck => "gradcheck",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command `{s}`")))
    }

    pub fn about(self) -> &'static str {
        match self {
            Command::KernelEval => "Evaluate a dot-product kernel profile at t",
            Command::EmpiricalNtk => "Finite-width NTK estimate against the closed form",
            Command::Spectrum => "Mercer eigenvalues on the sphere",
            Command::DecayFit => "Power-law fit of a spectrum CSV",
            Command::Harmonics => "Spherical-harmonic learning with two-layer networks",
            Command::Sinusoids => "Sinusoid spectrum tracking with deep networks",
            Command::Robustness => "Amplitude retention under parameter perturbation",
            Command::Gradcheck => "Finite-difference check of network gradients",
        }
    }

    pub fn keys(self) -> Vec<KeySpec> {
        use ValueType::*;
        let k = KeySpec::new;
        let mut v = vec![k("master_seed", Int, "0", "master seed for every random stream")];
        let net = |v: &mut Vec<KeySpec>, arch: &'static str| {
            v.extend([
                k("arch", Str, arch, "mlp, pi-ncp, two-layer-relu or two-layer-pi"),
                k("depth", Int, "6", "number of affine layers"),
                k("width", Int, "256", "hidden width"),
                k("mult", IntList, "1,2,3,4,5", "multiplicative layer indices (pi-ncp)"),
                k("skips", Bool, "false", "identity skips from layer 2 on (mlp)"),
                k("placement", Str, "branch", "branch or after-product"),
            ])
        };
        let sinusoid = |v: &mut Vec<KeySpec>, lr: &'static str, iterations: &'static str, stop: &'static str| {
            v.extend([
                k("frequencies", IntList, "5,10,15,20,25,30,35,40,45,50", "target frequencies"),
                k("amplitudes", FloatList, "", "target amplitudes (empty: all ones)"),
                k("samples", Int, "200", "grid size N"),
                k("optimizer", Str, "adam", "adam or gd"),
                k("lr", Float, lr, "learning rate"),
                k("lr_multiplicative", OptFloat, "auto", "rate for multiplicative branches (auto: lr/10)"),
                k("iterations", Int, iterations, "maximum training steps"),
                k("record_every", Int, "100", "checkpoint spacing"),
                k("seeds", Int, "1", "number of runs"),
                k("first_run", Int, "0", "run index of the first run"),
                k("stop_at", OptFloat, stop, "stop once every ratio exceeds this (auto: never)"),
            ])
        };
        match self {
            Command::KernelEval => v.extend([
                k("kernel", Str, "standard", "kappa1, kappa2, standard, pi, linear or constant"),
                k("t", Float, "0", "inner product in [-1, 1]"),
            ]),
            Command::EmpiricalNtk => v.extend([
                k("arch", Str, "two-layer-pi", "two-layer-relu or two-layer-pi"),
                k("width", Int, "16384", "hidden width m"),
                k("d", Int, "5", "sphere dimension (inputs have d+1 coordinates)"),
                k("t", Float, "0.3", "inner product of the input pair"),
                k("draws", Int, "20", "independent initializations"),
            ]),
            Command::Spectrum => v.extend([
                k("kernel", Str, "pi", "kernel profile"),
                k("d", Int, "5", "sphere dimension"),
                k("kmax", Int, "40", "largest degree"),
                k("nodes", Int, "0", "quadrature nodes (0: max(2000, 16 kmax))"),
            ]),
            Command::DecayFit => v.extend([
                k("input", Str, "spectrum.csv", "spectrum CSV, relative to the output directory"),
                k("class", Str, "all", "all, even, odd or mod4eq0..mod4eq3"),
                k("kmin", Int, "10", "smallest degree in the fit"),
                k("kmax", Int, "40", "largest degree in the fit"),
            ]),
            Command::Harmonics => v.extend([
                k("arch", Str, "two-layer-pi", "two-layer-relu or two-layer-pi"),
                k("width", Int, "8192", "hidden width"),
                k("samples", Int, "1000", "training points"),
                k("d", Int, "10", "sphere dimension"),
                k("degrees", IntList, "1,2,4", "harmonic degrees in the target"),
                k("amplitudes", FloatList, "", "weights (empty: all ones)"),
                k("lr", Float, "1", "learning rate"),
                k("iterations", Int, "1000", "training steps"),
                k("record_every", Int, "10", "checkpoint spacing"),
                k("window", Int, "20", "moving-average window in checkpoints"),
                k("stop_at", OptFloat, "auto", "stop once every projection is at or below this (auto: never)"),
                k("seeds", Int, "1", "number of runs"),
                k("first_run", Int, "0", "run index of the first run"),
                k("threshold", Float, "0.5", "time-to-threshold level"),
                k("heatmap", Bool, "true", "write heatmap.svg for the first run"),
            ]),
            Command::Sinusoids => {
                net(&mut v, "pi-ncp");
                sinusoid(&mut v, "0.001", "3000", "auto");
                v.extend([
                    k("threshold", Float, "0.5", "time-to-threshold level"),
                    k("heatmap", Bool, "true", "write heatmap.svg for the first run"),
                    k("checkpoints", Bool, "true", "save final parameters per run"),
                ]);
            }
            Command::Robustness => {
                net(&mut v, "pi-ncp");
                sinusoid(&mut v, "0.003", "12000", "0.8");
                v.extend([
                    k("deltas", FloatList, "0,1,2,4,8", "perturbation radii"),
                    k("checkpoint", Str, "", "parameters to load instead of training"),
                ]);
            }
            Command::Gradcheck => {
                net(&mut v, "pi-ncp");
                v.extend([
                    k("input_dim", Int, "4", "input dimension"),
                    k("batch", Int, "6", "batch size"),
                    k("tolerance", Float, "0.0001", "maximum relative error"),
                ]);
                for s in v.iter_mut() {
                    if s.name == "width" {
                        s.default = "8";
                    }
                }
            }
        }
        v
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueType {
    Int,
    Float,
    /// A real or `auto`.
    OptFloat,
    Str,
    Bool,
    IntList,
    FloatList,
}

impl ValueType {
    pub fn name(self) -> &'static str {
        match self {
            ValueType::Int => "non-negative integer",
            ValueType::Float => "real number",
            ValueType::OptFloat => "real number or `auto`",
            ValueType::Str => "string",
            ValueType::Bool => "boolean",
            ValueType::IntList => "comma-separated non-negative integers",
            ValueType::FloatList => "comma-separated real numbers",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(u64),
    Float(f64),
    OptFloat(Option<f64>),
    Str(String),
    Bool(bool),
    IntList(Vec<u64>),
    FloatList(Vec<f64>),
}

fn list<T: std::str::FromStr>(raw: &str) -> Option<Vec<T>> {
    if raw.trim().is_empty() {
        return Some(Vec::new());
    }
    raw.split(',').map(|s| s.trim().parse().ok()).collect()
}

fn real(raw: &str) -> Option<f64> {
    raw.parse::<f64>().ok().filter(|v| v.is_finite())
}

impl Value {
    pub fn parse(ty: ValueType, key: &str, raw: &str) -> Result<Self> {
        let raw = raw.trim();
        let v = match ty {
            ValueType::Int => raw.parse().ok().map(Value::Int),
            ValueType::Float => real(raw).map(Value::Float),
            ValueType::OptFloat if raw == "auto" => Some(Value::OptFloat(None)),
            ValueType::OptFloat => real(raw).map(|v| Value::OptFloat(Some(v))),
            ValueType::Str => Some(Value::Str(raw.to_string())),
            ValueType::Bool => match raw {
                "true" => Some(Value::Bool(true)),
                "false" => Some(Value::Bool(false)),
                _ => None,
            },
            ValueType::IntList => list(raw).map(Value::IntList),
            ValueType::FloatList => list::<f64>(raw)
                .filter(|v| v.iter().all(|x| x.is_finite()))
                .map(Value::FloatList),
        };
        v.ok_or_else(|| Error::TypeMismatch {
            key: key.to_string(),
            expected: ty.name(),
            value: raw.to_string(),
        })
    }
}

/// Canonical text: integers plain, reals in shortest round-trip form.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join<T: fmt::Debug>(v: &[T]) -> String {
            v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
        }
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{v:?}"),
            Value::OptFloat(None) => f.write_str("auto"),
            Value::OptFloat(Some(v)) => write!(f, "{v:?}"),
            Value::Str(s) => f.write_str(s),
            Value::Bool(b) => write!(f, "{b}"),
            Value::IntList(v) => f.write_str(&join(v)),
            Value::FloatList(v) => f.write_str(&join(v)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeySpec {
    pub name: &'static str,
    pub ty: ValueType,
    pub default: &'static str,
    pub help: &'static str,
}

impl KeySpec {
    fn new(name: &'static str, ty: ValueType, default: &'static str, help: &'static str) -> Self {
        Self { name, ty, default, help }
    }

    /// Flag spelling: `record_every` becomes `--record-every`.
    pub fn flag(&self) -> String {
        self.name.replace('_', "-")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Default,
    File,
    Flag,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Default => "default",
            Provenance::File => "file",
            Provenance::Flag => "flag",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: Value,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: IndexMap<String, Entry>,
    pub master_seed: u64,
    pub output_dir: PathBuf,
}

/// Keeps the `[section]` onward part of a `# `-commented header, so an
/// emitted file can be fed back as a config.
fn embedded_config(text: &str) -> Option<String> {
    if !text.starts_with("# polyspec") && !text.starts_with("<!--") {
        return None;
    }
    let mut out = String::new();
    let mut on = false;
    for line in text.lines() {
        let body = match line.strip_prefix("# ") {
            Some(b) => b,
            None if line.starts_with("<!--") => continue,
            None => break,
        };
        if body.starts_with('[') {
            on = true;
        }
        if on {
            out.push_str(body);
            out.push('\n');
        }
    }
    Some(out)
}

/// Reads `file` (if any), applies `overrides` (`(key, raw value)` pairs) and
/// fills defaults. Keys may sit before any section, in `[run]`, or in the
/// section named after the command; sections of other commands are ignored.
pub fn parse_config(
    file: Option<&Path>,
    command: Command,
    overrides: &[(String, String)],
    output_dir: Option<PathBuf>,
) -> Result<RunConfig> {
    let specs = command.keys();
    let spec_of = |key: &str| -> Result<&KeySpec> {
        specs
            .iter()
            .find(|s| s.name == key)
            .ok_or_else(|| Error::UnknownKey(key.to_string()))
    };
    let mut params: IndexMap<String, Entry> = IndexMap::new();
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let text = embedded_config(&text).unwrap_or(text);
        let ini = Ini::load_from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        for (section, props) in ini.iter() {
            match section {
                None | Some("run") => {}
                Some(s) if s == command.name() => {}
                Some(s) if Command::parse(s).is_ok() => continue,
                Some(s) => return Err(Error::Config(format!("unknown section [{s}]"))),
            }
            for (key, raw) in props.iter() {
                let spec = spec_of(key)?;
                let value = Value::parse(spec.ty, key, raw)?;
                params.insert(
                    key.to_string(),
                    Entry {
                        value,
                        provenance: Provenance::File,
                    },
                );
            }
        }
    }
    for (key, raw) in overrides {
        let spec = spec_of(key)?;
        let value = Value::parse(spec.ty, key, raw)?;
        params.insert(
            key.clone(),
            Entry {
                value,
                provenance: Provenance::Flag,
            },
        );
    }
    // schema order, defaults filled
    let mut ordered = IndexMap::new();
    for spec in &specs {
        let entry = match params.shift_remove(spec.name) {
            Some(e) => e,
            None => Entry {
                value: Value::parse(spec.ty, spec.name, spec.default)?,
                provenance: Provenance::Default,
            },
        };
        ordered.insert(spec.name.to_string(), entry);
    }
    let master_seed = match ordered["master_seed"].value {
        Value::Int(s) => s,
        _ => unreachable!("master_seed is an integer key"),
    };
    let output_dir = output_dir
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    Ok(RunConfig {
        command,
        params: ordered,
        master_seed,
        output_dir,
    })
}

impl RunConfig {
    fn entry(&self, key: &str) -> Result<&Value> {
        self.params
            .get(key)
            .map(|e| &e.value)
            .ok_or_else(|| Error::UnknownKey(key.to_string()))
    }

    fn mismatch(&self, key: &str, expected: &'static str) -> Error {
        Error::TypeMismatch {
            key: key.to_string(),
            expected,
            value: self.params.get(key).map(|e| e.value.to_string()).unwrap_or_default(),
        }
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        match self.entry(key)? {
            Value::Int(v) => Ok(*v),
            _ => Err(self.mismatch(key, ValueType::Int.name())),
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        self.u64(key).map(|v| v as usize)
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        match self.entry(key)? {
            Value::Float(v) => Ok(*v),
            _ => Err(self.mismatch(key, ValueType::Float.name())),
        }
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.entry(key)? {
            Value::OptFloat(v) => Ok(*v),
            _ => Err(self.mismatch(key, ValueType::OptFloat.name())),
        }
    }

    pub fn str(&self, key: &str) -> Result<&str> {
        match self.entry(key)? {
            Value::Str(s) => Ok(s),
            _ => Err(self.mismatch(key, ValueType::Str.name())),
        }
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        match self.entry(key)? {
            Value::Bool(b) => Ok(*b),
            _ => Err(self.mismatch(key, ValueType::Bool.name())),
        }
    }

    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>> {
        match self.entry(key)? {
            Value::IntList(v) => Ok(v.iter().map(|&x| x as usize).collect()),
            _ => Err(self.mismatch(key, ValueType::IntList.name())),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        match self.entry(key)? {
            Value::FloatList(v) => Ok(v.clone()),
            _ => Err(self.mismatch(key, ValueType::FloatList.name())),
        }
    }

    pub fn provenance(&self, key: &str) -> Option<Provenance> {
        self.params.get(key).map(|e| e.provenance)
    }

    /// `[command]` followed by every `key = value`, in schema order.
    pub fn canonical(&self) -> String {
        let mut s = format!("[{}]\n", self.command.name());
        for (k, e) in &self.params {
            s.push_str(&format!("{k} = {}\n", e.value));
        }
        s
    }

    /// First 16 hex digits of the SHA-256 of [`RunConfig::canonical`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Comment header lines (without the comment marker).
    pub fn header_lines(&self) -> Vec<String> {
        let mut v = vec![
            format!("polyspec {}", env!("CARGO_PKG_VERSION")),
            format!("command = {}", self.command.name()),
            format!("config_hash = {}", self.hash()),
            format!("master_seed = {}", self.master_seed),
        ];
        v.extend(self.canonical().lines().map(str::to_string));
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    fn flag(k: &str, v: &str) -> (String, String) {
        (k.to_string(), v.to_string())
    }

    #[test]
    fn empty_file_and_flag() {
        let f = file("");
        let cfg = parse_config(Some(f.path()), Command::KernelEval, &[flag("t", "0.5")], None).unwrap();
        assert_eq!(cfg.f64("t").unwrap(), 0.5);
        assert_eq!(cfg.provenance("t"), Some(Provenance::Flag));
        assert_eq!(cfg.str("kernel").unwrap(), "standard");
        assert_eq!(cfg.provenance("kernel"), Some(Provenance::Default));
    }

    #[test]
    fn flag_beats_file() {
        let f = file("[sinusoids]\nlr = 0.01\n");
        let cfg = parse_config(Some(f.path()), Command::Sinusoids, &[flag("lr", "0.001")], None).unwrap();
        assert_eq!(cfg.f64("lr").unwrap(), 0.001);
        assert_eq!(cfg.provenance("lr"), Some(Provenance::Flag));
        let cfg = parse_config(Some(f.path()), Command::Sinusoids, &[], None).unwrap();
        assert_eq!(cfg.provenance("lr"), Some(Provenance::File));
    }

    #[test]
    fn unknown_key_and_mismatch() {
        let f = file("[sinusoids]\nwidht = 3\n");
        let err = parse_config(Some(f.path()), Command::Sinusoids, &[], None).unwrap_err();
        assert_eq!(err.to_string(), "unknown key: widht");
        let err = parse_config(None, Command::Sinusoids, &[flag("width", "wide")], None).unwrap_err();
        assert!(matches!(err, Error::TypeMismatch { expected, .. } if expected == "non-negative integer"));
        let f = file("[nonsense]\na = 1\n");
        assert!(parse_config(Some(f.path()), Command::Spectrum, &[], None).is_err());
    }

    #[test]
    fn other_sections_are_ignored() {
        let f = file("master_seed = 7\n[spectrum]\nd = 3\n[harmonics]\nwidth = 5\n");
        let cfg = parse_config(Some(f.path()), Command::Spectrum, &[], None).unwrap();
        assert_eq!(cfg.master_seed, 7);
        assert_eq!(cfg.usize("d").unwrap(), 3);
    }

    #[test]
    fn header_round_trip() {
        let cfg = parse_config(None, Command::Harmonics, &[flag("lr", "0.3"), flag("degrees", "1, 3")], None).unwrap();
        let mut text: String = cfg.header_lines().iter().map(|l| format!("# {l}\n")).collect();
        text.push_str("run_id,seed\n");
        let f = file(&text);
        let again = parse_config(Some(f.path()), Command::Harmonics, &[], None).unwrap();
        assert_eq!(again.canonical(), cfg.canonical());
        assert_eq!(again.hash(), cfg.hash());
        assert_eq!(again.usize_list("degrees").unwrap(), vec![1, 3]);
    }

    #[test]
    fn values() {
        assert_eq!(Value::parse(ValueType::OptFloat, "x", "auto").unwrap(), Value::OptFloat(None));
        assert_eq!(Value::parse(ValueType::FloatList, "x", "").unwrap(), Value::FloatList(vec![]));
        assert_eq!(Value::Float(0.1).to_string(), "0.1");
        assert_eq!(Value::Float(1.0).to_string(), "1.0");
        assert!(Value::parse(ValueType::Float, "x", "nan").is_err());
        assert!(Value::parse(ValueType::Bool, "x", "yes").is_err());
    }
}
