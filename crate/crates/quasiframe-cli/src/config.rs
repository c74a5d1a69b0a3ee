//! Flag and file configuration.
//!
//! Grammar of a config file: one `key = value` pair per line, `#` starts
//! a full-line comment, blank lines ignored. Keys are the long flag
//! names without the leading dashes (`seed`, `experiment`, `s`, `m`,
//! `xyz`, `grid`, `samples`, `chain-len`, `observers`, `format`, `out`,
//! `reset-meter`, `settings`). Unknown keys are rejected. Flags given on
//! the command line override file values.

use std::path::PathBuf;

use clap::Parser;
use quasiframe::measurement::QubitMeterState;
use quasiframe::sic::{bloch_from_sic, SicDist};
use quasiframe::{BlochVec, MeasDirection, Sign};

use crate::output::Format;
use crate::CliError;

/// Command-line flags. The experiment may be named positionally or via
/// `--experiment`; every other option mirrors one config-file key.
#[derive(Debug, Default, Parser)]
#[command(
    name = "quasiframe",
    no_binary_name = true,
    disable_help_subcommand = true,
    about = "Seeded, reproducible experiments on frame representations of a measured qubit",
    after_help = "Experiments: measure, chain, family-scan, uniqueness, entropy, chsh, \
                  negativity, broadcast, oracle-diff.\n\
                  Exit codes: 0 success, 1 usage or I/O error, 2 invariant violation.\n\
                  Errors are emitted as JSON records on stderr."
)]
pub struct Opts {
    /// Experiment name (alias for --experiment)
    #[arg(value_name = "EXPERIMENT")]
    pub positional: Option<String>,

    /// Experiment to run
    #[arg(long)]
    pub experiment: Option<String>,

    /// Config file with `key = value` lines; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// RNG seed recorded in every output
    #[arg(long)]
    pub seed: Option<u64>,

    /// Input state: Bloch 3-vector `x,y,z` or SIC 4-vector `p0,p1,p2,p3`
    #[arg(long)]
    pub s: Option<String>,

    /// Measurement direction, a unit 3-vector `x,y,z`
    #[arg(long)]
    pub m: Option<String>,

    /// Process family parameters `x,y,z`
    #[arg(long)]
    pub xyz: Option<String>,

    /// Grid resolution (points per axis, or direction count)
    #[arg(long)]
    pub grid: Option<usize>,

    /// Random sample count
    #[arg(long)]
    pub samples: Option<usize>,

    /// Number of chained measurements
    #[arg(long)]
    pub chain_len: Option<usize>,

    /// Number of broadcast observers
    #[arg(long)]
    pub observers: Option<usize>,

    /// Output format: csv (default) or json
    #[arg(long)]
    pub format: Option<String>,

    /// Write the payload to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Re-pin the meter to +1 before each chained measurement
    #[arg(long)]
    pub reset_meter: bool,

    /// CHSH settings: tsirelson (default), equal, or random
    #[arg(long)]
    pub settings: Option<String>,
}

/// The nine runnable experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Measure,
    Chain,
    FamilyScan,
    Uniqueness,
    Entropy,
    Chsh,
    Negativity,
    Broadcast,
    OracleDiff,
}

impl Experiment {
    pub fn parse(name: &str) -> Result<Experiment, CliError> {
        match name {
            "measure" => Ok(Experiment::Measure),
            "chain" => Ok(Experiment::Chain),
            "family-scan" => Ok(Experiment::FamilyScan),
            "uniqueness" => Ok(Experiment::Uniqueness),
            "entropy" => Ok(Experiment::Entropy),
            "chsh" => Ok(Experiment::Chsh),
            "negativity" => Ok(Experiment::Negativity),
            "broadcast" => Ok(Experiment::Broadcast),
            "oracle-diff" => Ok(Experiment::OracleDiff),
            other => Err(CliError::Usage(format!(
                "unknown experiment `{other}`; expected one of measure, chain, family-scan, \
                 uniqueness, entropy, chsh, negativity, broadcast, oracle-diff"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Measure => "measure",
            Experiment::Chain => "chain",
            Experiment::FamilyScan => "family-scan",
            Experiment::Uniqueness => "uniqueness",
            Experiment::Entropy => "entropy",
            Experiment::Chsh => "chsh",
            Experiment::Negativity => "negativity",
            Experiment::Broadcast => "broadcast",
            Experiment::OracleDiff => "oracle-diff",
        }
    }
}

/// An input state, accepted as a Bloch 3-vector or SIC 4-vector
/// (detected by component count) and kept with its raw echo.
#[derive(Clone, Debug)]
pub struct StateSpec {
    raw: String,
    kind: StateKind,
}

#[derive(Clone, Debug)]
enum StateKind {
    Bloch(BlochVec),
    Sic(SicDist),
}

impl StateSpec {
    pub fn parse(text: &str) -> Result<StateSpec, CliError> {
        let parts = parse_floats(text)?;
        let kind = match parts.len() {
            3 => StateKind::Bloch(BlochVec::new(parts[0], parts[1], parts[2])?),
            4 => StateKind::Sic(SicDist::from_entries([
                parts[0], parts[1], parts[2], parts[3],
            ])?),
            n => {
                return Err(CliError::Usage(format!(
                    "state `{text}` has {n} components; expected a Bloch 3-vector or SIC 4-vector"
                )))
            }
        };
        Ok(StateSpec {
            raw: text.to_string(),
            kind,
        })
    }

    /// The raw input text, echoed into output metadata.
    pub fn echo(&self) -> &str {
        &self.raw
    }

    /// The state as a Bloch vector.
    pub fn bloch(&self) -> Result<BlochVec, CliError> {
        match &self.kind {
            StateKind::Bloch(s) => Ok(*s),
            StateKind::Sic(p) => Ok(bloch_from_sic(p)?),
        }
    }

    /// The state as a qubit-plus-meter register with the meter at +1.
    pub fn register(&self) -> Result<QubitMeterState, CliError> {
        match &self.kind {
            StateKind::Bloch(s) => Ok(QubitMeterState::initial(s)),
            StateKind::Sic(p) => Ok(QubitMeterState::from_parts(p, Sign::Plus)?),
        }
    }
}

/// Fully resolved configuration after merging flags over file values.
#[derive(Debug)]
pub struct Config {
    pub experiment: Experiment,
    pub seed: u64,
    pub s: Option<StateSpec>,
    pub m: Option<MeasDirection>,
    pub m_echo: Option<String>,
    pub xyz: Option<[f64; 3]>,
    pub grid: Option<usize>,
    pub samples: Option<usize>,
    pub chain_len: Option<usize>,
    pub observers: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub reset_meter: bool,
    pub settings: Option<String>,
}

impl Config {
    /// Merge flags over an optional config file and validate every value.
    pub fn resolve(opts: Opts) -> Result<Config, CliError> {
        let file = match &opts.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Io(format!("cannot read config file {}: {e}", path.display()))
                })?;
                parse_file(&text)?
            }
            None => Opts::default(),
        };

        let experiment_name = match (&opts.positional, &opts.experiment) {
            (Some(pos), Some(flag)) if pos != flag => {
                return Err(CliError::Usage(format!(
                    "positional experiment `{pos}` conflicts with --experiment {flag}"
                )))
            }
            (Some(pos), _) => Some(pos.clone()),
            (None, Some(flag)) => Some(flag.clone()),
            (None, None) => file.experiment.clone(),
        };
        let experiment = match experiment_name {
            Some(name) => Experiment::parse(&name)?,
            None => {
                return Err(CliError::Usage(
                    "no experiment named; pass one positionally, via --experiment, or in the \
                     config file"
                        .to_string(),
                ))
            }
        };

        let m_echo = opts.m.or(file.m);
        let m = match &m_echo {
            Some(text) => {
                let v = parse_vec3(text)?;
                Some(MeasDirection::new(v[0], v[1], v[2])?)
            }
            None => None,
        };

        let format = match opts.format.or(file.format).as_deref() {
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "unknown format `{other}`; expected csv or json"
                )))
            }
        };

        Ok(Config {
            experiment,
            seed: opts.seed.or(file.seed).unwrap_or(0),
            s: match opts.s.or(file.s) {
                Some(text) => Some(StateSpec::parse(&text)?),
                None => None,
            },
            m,
            m_echo,
            xyz: match opts.xyz.or(file.xyz) {
                Some(text) => Some(parse_vec3(&text)?),
                None => None,
            },
            grid: opts.grid.or(file.grid),
            samples: opts.samples.or(file.samples),
            chain_len: opts.chain_len.or(file.chain_len),
            observers: opts.observers.or(file.observers),
            format,
            out: opts.out.or(file.out),
            reset_meter: opts.reset_meter || file.reset_meter,
            settings: opts.settings.or(file.settings),
        })
    }

    /// Direction to use, defaulting to the z axis.
    pub fn m_or_z(&self) -> MeasDirection {
        self.m.unwrap_or_else(MeasDirection::z)
    }

    /// Required state spec.
    pub fn require_s(&self) -> Result<&StateSpec, CliError> {
        self.s.as_ref().ok_or_else(|| {
            CliError::Usage(format!(
                "experiment `{}` needs --s (Bloch 3-vector or SIC 4-vector)",
                self.experiment.name()
            ))
        })
    }

    /// Required direction.
    pub fn require_m(&self) -> Result<&MeasDirection, CliError> {
        self.m.as_ref().ok_or_else(|| {
            CliError::Usage(format!(
                "experiment `{}` needs --m (unit 3-vector)",
                self.experiment.name()
            ))
        })
    }
}

/// Parse a config file into the same shape as the flag set.
fn parse_file(text: &str) -> Result<Opts, CliError> {
    let mut file = Opts::default();
    for (number, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "config line {}: expected `key = value`, got `{line}`",
                number + 1
            ))
        })?;
        let key = key.trim();
        let value = value.trim().to_string();
        match key {
            "experiment" => file.experiment = Some(value),
            "seed" => file.seed = Some(parse_int(key, &value)?),
            "s" => file.s = Some(value),
            "m" => file.m = Some(value),
            "xyz" => file.xyz = Some(value),
            "grid" => file.grid = Some(parse_int(key, &value)?),
            "samples" => file.samples = Some(parse_int(key, &value)?),
            "chain-len" => file.chain_len = Some(parse_int(key, &value)?),
            "observers" => file.observers = Some(parse_int(key, &value)?),
            "format" => file.format = Some(value),
            "out" => file.out = Some(PathBuf::from(value)),
            "reset-meter" => {
                file.reset_meter = match value.as_str() {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(CliError::Usage(format!(
                            "config key reset-meter: expected true or false, got `{other}`"
                        )))
                    }
                }
            }
            "settings" => file.settings = Some(value),
            other => {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key `{other}`",
                    number + 1
                )))
            }
        }
    }
    Ok(file)
}

fn parse_int<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| {
        CliError::Usage(format!(
            "config key {key}: `{value}` is not a valid nonnegative integer"
        ))
    })
}

fn parse_floats(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("`{part}` is not a number (in `{text}`)")))
        })
        .collect()
}

fn parse_vec3(text: &str) -> Result<[f64; 3], CliError> {
    let parts = parse_floats(text)?;
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "`{text}` has {} components; expected 3",
            parts.len()
        )));
    }
    Ok([parts[0], parts[1], parts[2]])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(args: &[&str]) -> Opts {
        Opts::try_parse_from(args.iter().map(|s| s.to_string())).unwrap()
    }

    #[test]
    fn positional_and_flag_experiment_agree() {
        let config = Config::resolve(opts(&["measure", "--s", "0,0,1", "--m", "0,0,1"])).unwrap();
        assert_eq!(config.experiment, Experiment::Measure);
        let config =
            Config::resolve(opts(&["--experiment", "entropy", "--s", "0,0,1", "--m", "1,0,0"]))
                .unwrap();
        assert_eq!(config.experiment, Experiment::Entropy);
        let err = Config::resolve(opts(&["measure", "--experiment", "entropy"])).unwrap_err();
        assert!(matches!(err, CliError::Usage(_)));
    }

    #[test]
    fn state_spec_accepts_both_lengths() {
        let bloch = StateSpec::parse("0,0,1").unwrap();
        let sic = StateSpec::parse("0.25,0.25,0.25,0.25").unwrap();
        assert_eq!(bloch.bloch().unwrap().vector().z, 1.0);
        assert_eq!(sic.bloch().unwrap().norm(), 0.0);
        assert!(StateSpec::parse("1,2").is_err());
        assert!(StateSpec::parse("0,0,2").is_err());
        assert!(StateSpec::parse("0.5,0.5,0.5,0.5").is_err());
    }

    #[test]
    fn non_unit_direction_rejected() {
        let err = Config::resolve(opts(&["measure", "--m", "1,1,1"])).unwrap_err();
        assert!(matches!(err, CliError::Usage(_)));
    }

    #[test]
    fn file_values_merge_under_flags() {
        let path = std::env::temp_dir().join("quasiframe-config-merge-test.txt");
        std::fs::write(
            &path,
            "# demo\nseed = 9\nexperiment = chsh\nformat = json\nsettings = tsirelson\n",
        )
        .unwrap();
        let mut flags = opts(&["--seed", "4"]);
        flags.config = Some(path.clone());
        let merged = Config::resolve(flags).unwrap();
        std::fs::remove_file(&path).ok();
        assert_eq!(merged.seed, 4);
        assert_eq!(merged.experiment, Experiment::Chsh);
        assert_eq!(merged.format, Format::Json);
        assert_eq!(merged.settings.as_deref(), Some("tsirelson"));
    }

    #[test]
    fn unknown_config_key_rejected() {
        let err = parse_file("velocity = 3\n").unwrap_err();
        assert!(matches!(err, CliError::Usage(_)));
        assert!(err.message().contains("velocity"));
    }

    #[test]
    fn malformed_lines_rejected() {
        assert!(parse_file("just words\n").is_err());
        assert!(parse_file("seed = notanumber\n").is_err());
        assert!(parse_file("reset-meter = maybe\n").is_err());
    }
}
