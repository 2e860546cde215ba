use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use grover_noise::markov::MAX_HISTORY_STEPS;
use grover_noise::{GroverInstance, MarkovNoiseParams, NoiseSpec, SingleQubitUnitary};
use num_complex::Complex64;

use crate::table::{format_g, Format};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    /// Noiseless success probability
    Ideal,
    /// Success probability under correlated noise, one column per point
    Noisy,
    /// Every noise layout per strength, with deviation columns
    Invariance,
    /// First local maximum of P(t)
    Firstmax,
    /// Trace-distance back-flow
    Blp,
    /// Trace-norm growth on the extended system
    Cpdiv,
    /// Back-flow with thermal ancillas
    Thermal,
    /// Dilation consistency report
    DilationCheck,
    /// Explicit history sum against the walker evolution
    OracleCheck,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Ideal => "ideal",
            Experiment::Noisy => "noisy",
            Experiment::Invariance => "invariance",
            Experiment::Firstmax => "firstmax",
            Experiment::Blp => "blp",
            Experiment::Cpdiv => "cpdiv",
            Experiment::Thermal => "thermal",
            Experiment::DilationCheck => "dilation-check",
            Experiment::OracleCheck => "oracle-check",
        }
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        <Experiment as ValueEnum>::from_str(s, false).map_err(|_| CliError::config(format!("unknown experiment `{s}`")))
    }

    /// Largest register each experiment accepts; the dense ones grow fast.
    fn max_qubits(self) -> usize {
        match self {
            Experiment::Cpdiv | Experiment::DilationCheck => 5,
            Experiment::Invariance | Experiment::OracleCheck => 8,
            _ => 12,
        }
    }

    fn default_qubits(self) -> usize {
        match self {
            Experiment::Cpdiv | Experiment::DilationCheck => 3,
            _ => 5,
        }
    }

    fn default_steps(self) -> usize {
        match self {
            Experiment::Ideal | Experiment::OracleCheck => 10,
            _ => 25,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseKind {
    X,
    Y,
    Z,
    Identity,
    Hadamard,
    /// `a = ar + i ai`, `b = br + i bi`
    Custom { a: Complex64, b: Complex64, theta: f64 },
}

impl NoiseKind {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let kind = match s {
            "x" => NoiseKind::X,
            "y" => NoiseKind::Y,
            "z" => NoiseKind::Z,
            "identity" => NoiseKind::Identity,
            "hadamard" => NoiseKind::Hadamard,
            _ => {
                let body = s
                    .strip_prefix("custom:")
                    .ok_or_else(|| CliError::config(format!("unknown noise `{s}`")))?;
                let v = parse_list::<f64>("noise", body)?;
                let [ar, ai, br, bi, theta] = v[..] else {
                    return Err(CliError::config("custom noise takes five numbers: ar,ai,br,bi,theta"));
                };
                NoiseKind::Custom {
                    a: Complex64::new(ar, ai),
                    b: Complex64::new(br, bi),
                    theta,
                }
            }
        };
        kind.unitary()?;
        Ok(kind)
    }

    pub fn unitary(&self) -> Result<SingleQubitUnitary, CliError> {
        Ok(match *self {
            NoiseKind::X => SingleQubitUnitary::pauli_x(),
            NoiseKind::Y => SingleQubitUnitary::pauli_y(),
            NoiseKind::Z => SingleQubitUnitary::pauli_z(),
            NoiseKind::Identity => SingleQubitUnitary::identity(),
            NoiseKind::Hadamard => SingleQubitUnitary::hadamard(),
            NoiseKind::Custom { a, b, theta } => SingleQubitUnitary::new(a, b, theta).map_err(CliError::from_config)?,
        })
    }

    pub fn canonical(&self) -> String {
        match self {
            NoiseKind::X => "x".into(),
            NoiseKind::Y => "y".into(),
            NoiseKind::Z => "z".into(),
            NoiseKind::Identity => "identity".into(),
            NoiseKind::Hadamard => "hadamard".into(),
            NoiseKind::Custom { a, b, theta } => format!(
                "custom:{},{},{},{},{}",
                format_g(a.re),
                format_g(a.im),
                format_g(b.re),
                format_g(b.im),
                format_g(*theta)
            ),
        }
    }
}

/// Keys accepted in config files and as `--key` flags.
pub const KEYS: &[&str] = &[
    "experiment",
    "n",
    "marked",
    "noise",
    "m",
    "positions",
    "p",
    "mu",
    "steps",
    "temps",
    "trials",
    "seed",
    "format",
    "output",
    "jobs",
];

/// One noise layout: explicit positions, or the first `m` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    pub label: String,
    pub positions: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: usize,
    pub marked: usize,
    pub noise: NoiseKind,
    pub m: Vec<usize>,
    pub positions: Option<Vec<usize>>,
    pub p: Vec<f64>,
    pub mu: Vec<f64>,
    pub steps: usize,
    pub temps: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub jobs: usize,
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("line {}: expected `key = value`", i + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(CliError::config(format!("line {}: unknown key `{k}`", i + 1)));
        }
        if out.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(CliError::config(format!("line {}: duplicate key `{k}`", i + 1)));
        }
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn parse_one<T: std::str::FromStr>(key: &str, s: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    s.trim()
        .parse()
        .map_err(|e| CliError::config(format!("`{key}`: cannot parse `{s}`: {e}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, s: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    let v = s.split(',').map(|x| parse_one(key, x)).collect::<Result<Vec<_>, _>>()?;
    if v.is_empty() {
        return Err(CliError::config(format!("`{key}` is empty")));
    }
    Ok(v)
}

fn join<T: Copy>(v: &[T], f: impl Fn(T) -> String) -> String {
    v.iter().map(|&x| f(x)).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Validates a merged key/value map. Missing keys take per-experiment
    /// defaults.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self, CliError> {
        if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(CliError::config(format!("unknown key `{k}`")));
        }
        let get = |k: &str| map.get(k).map(String::as_str).filter(|v| !v.is_empty());
        let experiment = Experiment::parse(get("experiment").ok_or_else(|| CliError::config("no experiment given"))?)?;
        let n = get("n").map_or(Ok(experiment.default_qubits()), |v| parse_one("n", v))?;
        if !(2..=experiment.max_qubits()).contains(&n) {
            return Err(CliError::config(format!(
                "`n` must lie in 2..={} for {}, got {n}",
                experiment.max_qubits(),
                experiment.name()
            )));
        }
        let marked = get("marked").map_or(Ok(0), |v| parse_one("marked", v))?;
        GroverInstance::new(n, marked).map_err(CliError::from_config)?;
        let noise = get("noise").map_or(Ok(NoiseKind::X), NoiseKind::parse)?;
        let m = get("m").map_or(Ok(vec![1]), |v| parse_list("m", v))?;
        if let Some(&bad) = m.iter().find(|&&k| k == 0 || k > n) {
            return Err(CliError::config(format!("`m` entries must lie in 1..={n}, got {bad}")));
        }
        let positions = get("positions").map(|v| parse_list::<usize>("positions", v)).transpose()?;
        if let Some(pos) = &positions {
            NoiseSpec::new(noise.unitary()?, pos.clone(), n).map_err(CliError::from_config)?;
        }
        let p = get("p").map_or(Ok(vec![0.5]), |v| parse_list("p", v))?;
        let mu = get("mu").map_or(Ok(vec![0.5]), |v| parse_list("mu", v))?;
        for &pp in &p {
            for &mm in &mu {
                MarkovNoiseParams::new(pp, mm).map_err(CliError::from_config)?;
            }
        }
        let steps = get("steps").map_or(Ok(experiment.default_steps()), |v| parse_one("steps", v))?;
        let min_steps = match experiment {
            Experiment::Blp | Experiment::Cpdiv | Experiment::Thermal => 2,
            _ => 1,
        };
        if steps < min_steps {
            return Err(CliError::config(format!("`steps` must be at least {min_steps}")));
        }
        if experiment == Experiment::OracleCheck && steps > MAX_HISTORY_STEPS {
            return Err(CliError::config(format!("oracle-check enumerates 2^steps histories; `steps` ≤ {MAX_HISTORY_STEPS}")));
        }
        let temps = get("temps").map_or(Ok(vec![0.5, 1.0, 2.0]), |v| parse_list("temps", v))?;
        if let Some(&bad) = temps.iter().find(|&&t: &&f64| !(t > 0.0 && t.is_finite())) {
            return Err(CliError::config(format!("temperatures must be positive, got {bad}")));
        }
        let trials = get("trials").map_or(Ok(20), |v| parse_one("trials", v))?;
        let seed = get("seed").map_or(Ok(7), |v| parse_one("seed", v))?;
        let format = match get("format").unwrap_or("csv") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(CliError::config(format!("unknown format `{other}`"))),
        };
        let jobs = match get("jobs") {
            Some(v) => parse_one("jobs", v)?,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        if jobs == 0 {
            return Err(CliError::config("`jobs` must be positive"));
        }
        Ok(ExperimentConfig {
            experiment,
            n,
            marked,
            noise,
            m,
            positions,
            p,
            mu,
            steps,
            temps,
            trials,
            seed,
            format,
            output: get("output").map(PathBuf::from),
            jobs,
        })
    }

    pub fn instance(&self) -> GroverInstance {
        GroverInstance::new(self.n, self.marked).expect("validated")
    }

    pub fn unitary(&self) -> SingleQubitUnitary {
        self.noise.unitary().expect("validated")
    }

    pub fn layouts(&self) -> Vec<Layout> {
        match &self.positions {
            Some(pos) => vec![Layout {
                label: format!("pos{}", join(pos, |q| q.to_string()).replace(',', "-")),
                positions: pos.clone(),
            }],
            None => self
                .m
                .iter()
                .map(|&m| Layout {
                    label: format!("m{m}"),
                    positions: (0..m).collect(),
                })
                .collect(),
        }
    }

    /// `(p, mu)` points, `p` outermost.
    pub fn grid(&self) -> Vec<MarkovNoiseParams> {
        self.p
            .iter()
            .flat_map(|&p| self.mu.iter().map(move |&mu| MarkovNoiseParams::new(p, mu).expect("validated")))
            .collect()
    }

    /// Parameter echo. Excludes `output` and `jobs`, which do not change
    /// the numbers; with `version` removed it is itself a valid config.
    pub fn meta(&self) -> Vec<(String, String)> {
        let m = vec![
            ("experiment", self.experiment.name().to_string()),
            ("version", crate::VERSION.to_string()),
            ("n", self.n.to_string()),
            ("marked", self.marked.to_string()),
            ("noise", self.noise.canonical()),
            ("m", join(&self.m, |k| k.to_string())),
            (
                "positions",
                self.positions.as_ref().map_or(String::new(), |p| join(p, |q| q.to_string())),
            ),
            ("p", join(&self.p, format_g)),
            ("mu", join(&self.mu, format_g)),
            ("steps", self.steps.to_string()),
            ("temps", join(&self.temps, format_g)),
            ("trials", self.trials.to_string()),
            ("seed", self.seed.to_string()),
            ("format", self.format.name().to_string()),
        ];
        m.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn config_text_with_comments() {
        let m = parse_config_text("# sweep\nexperiment = noisy\n\nmu = 0,0.5 # two points\n").unwrap();
        assert_eq!(m["experiment"], "noisy");
        assert_eq!(m["mu"], "0,0.5");
        assert!(parse_config_text("n 5").is_err());
        assert!(parse_config_text("colour = red").is_err());
        assert!(parse_config_text("n = 3\nn = 4").is_err());
    }

    #[test]
    fn defaults_and_grid() {
        let c = ExperimentConfig::from_map(&map(&[("experiment", "noisy"), ("p", "0,1"), ("mu", "0.25,0.5,0.75")])).unwrap();
        assert_eq!(c.n, 5);
        assert_eq!(c.steps, 25);
        let g = c.grid();
        assert_eq!(g.len(), 6);
        assert_eq!((g[1].p(), g[1].mu()), (0.0, 0.5));
        assert_eq!(c.layouts()[0].positions, vec![0]);
    }

    #[test]
    fn rejects_out_of_domain_values() {
        for bad in [
            &[("experiment", "noisy"), ("p", "1.5")][..],
            &[("experiment", "noisy"), ("m", "7")],
            &[("experiment", "noisy"), ("positions", "0,0")],
            &[("experiment", "noisy"), ("noise", "custom:1,0,1,0,0")],
            &[("experiment", "noisy"), ("noise", "w")],
            &[("experiment", "thermal"), ("temps", "0")],
            &[("experiment", "oracle-check"), ("steps", "20")],
            &[("experiment", "cpdiv"), ("n", "8")],
            &[("experiment", "ideal"), ("marked", "32")],
            &[("experiment", "nope")],
            &[("n", "3")],
        ] {
            assert!(ExperimentConfig::from_map(&map(bad)).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn custom_noise_echo_round_trips() {
        let k = NoiseKind::parse("custom:0.6,0,0,0.8,1.5").unwrap();
        assert_eq!(NoiseKind::parse(&k.canonical()).unwrap(), k);
    }
}
