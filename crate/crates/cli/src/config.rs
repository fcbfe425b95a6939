use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use rdmgeo::eigen::{EigenOptions, DEFAULT_SEED};
use rdmgeo::ruling::ScanOptions;
use rdmgeo::spinops::{Model, OperatorKind};
use rdmgeo::sweep::{DirectionGrid, Plane, SweepOptions};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Even particle numbers only; odd N changes the degeneracy pattern.
pub const DEFAULT_NS: [usize; 4] = [2, 10, 100, 1000];

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum GridScheme {
    Fibonacci,
    Latlong,
    /// Directions in `plane` of coupling space.
    GreatCircle,
}

/// Every setting that influences a result. Serialized into each output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<Model>,
    pub lambda: Option<[f64; 3]>,
    pub family: Option<String>,
    pub t: Vec<f64>,
    pub n: Option<usize>,
    pub ns: Vec<usize>,
    /// Eigenpairs reported by `spectrum`.
    pub m: usize,
    pub grid: GridScheme,
    pub count: usize,
    pub plane: Plane,
    pub tol_residual: f64,
    pub tol_deg: Option<f64>,
    pub angle_tol: f64,
    /// Bloch-sphere samples for mean-field bodies and limit outlines.
    pub samples: usize,
    pub eps_scale: f64,
    pub max_n: usize,
    pub operator: Option<OperatorKind>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: None,
            lambda: None,
            family: None,
            t: vec![1.0],
            n: None,
            ns: DEFAULT_NS.to_vec(),
            m: 4,
            grid: GridScheme::Fibonacci,
            count: 200,
            plane: Plane::Xz,
            tol_residual: 1e-10,
            tol_deg: None,
            angle_tol: 0.02,
            samples: 20_000,
            eps_scale: 1.0,
            max_n: 8,
            operator: None,
            input: None,
            output: None,
            seed: DEFAULT_SEED,
        }
    }
}

/// Flags shared by every subcommand. Each one overrides the matching key of
/// the `--config` file.
#[derive(Args, Clone, Debug, Default)]
pub struct RunArgs {
    /// TOML file with run settings
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Model preset: ising or xy
    #[arg(long)]
    pub model: Option<Model>,
    /// Couplings as three comma-separated numbers (ising: J,Bz,Bx; xy: J1,J2,Bz)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Option<Vec<f64>>,
    /// Coupling family such as "J=-1,Bz=t,Bx=0"
    #[arg(long)]
    pub family: Option<String>,
    /// Family parameter values
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t: Option<Vec<f64>>,
    /// Particle number
    #[arg(long)]
    pub n: Option<usize>,
    /// Particle-number ladder
    #[arg(long, value_delimiter = ',')]
    pub ns: Option<Vec<usize>>,
    /// Number of eigenpairs
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum)]
    pub grid: Option<GridScheme>,
    /// Number of coupling directions
    #[arg(long)]
    pub count: Option<usize>,
    /// Coordinate plane: xy, xz or yz
    #[arg(long)]
    pub plane: Option<Plane>,
    #[arg(long)]
    pub tol_residual: Option<f64>,
    #[arg(long)]
    pub tol_deg: Option<f64>,
    #[arg(long)]
    pub angle_tol: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub eps_scale: Option<f64>,
    /// Largest particle number checked by `verify`
    #[arg(long)]
    pub max_n: Option<usize>,
    /// Collective operator for `ops-dump` (Jx, Jy, Jz, Jx2, Jy2, Jz2, Identity)
    #[arg(long)]
    pub operator: Option<OperatorKind>,
    /// Series CSV read by `classify`
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Output file, or output directory for commands that write several files
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; falls back to RDMGEO_THREADS
    #[arg(long)]
    pub threads: Option<usize>,
}

fn positive(name: &str, value: f64) -> Result<f64, CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {value}")))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    /// Defaults, then the `--config` file, then flags.
    pub fn resolve(args: &RunArgs) -> Result<Self, CliError> {
        let mut config = match &args.config {
            Some(path) => Self::from_toml(&fs::read_to_string(path).map_err(CliError::io("read", path))?)?,
            None => Self::default(),
        };
        config.apply(args)?;
        config.validate()?;
        Ok(config)
    }

    fn apply(&mut self, args: &RunArgs) -> Result<(), CliError> {
        if let Some(lambda) = &args.lambda {
            let lambda: [f64; 3] = lambda
                .as_slice()
                .try_into()
                .map_err(|_| CliError::Config(format!("--lambda needs 3 values, got {}", lambda.len())))?;
            self.lambda = Some(lambda);
        }
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = &args.$field {
                    self.$field = v.clone().into();
                }
            )*};
        }
        take!(model, family, n, operator, input, output, tol_deg);
        take!(t, ns, m, grid, count, plane, tol_residual, angle_tol, samples, eps_scale, max_n, seed);
        Ok(())
    }

    fn validate(&self) -> Result<(), CliError> {
        positive("tol_residual", self.tol_residual)?;
        positive("angle_tol", self.angle_tol)?;
        positive("eps_scale", self.eps_scale)?;
        if let Some(tol) = self.tol_deg {
            positive("tol_deg", tol)?;
        }
        if let Some(lambda) = self.lambda {
            if lambda.iter().any(|v| !v.is_finite()) {
                return Err(CliError::Config(format!("lambda {lambda:?} is not finite")));
            }
        }
        if self.t.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Config("t values must be finite".into()));
        }
        if self.m == 0 || self.count == 0 || self.samples == 0 {
            return Err(CliError::Config("m, count and samples must be positive".into()));
        }
        Ok(())
    }

    pub fn model(&self) -> Model {
        self.model.unwrap_or(Model::Ising)
    }

    pub fn require_n(&self) -> Result<usize, CliError> {
        self.n.ok_or_else(|| CliError::Config("--n is required".into()))
    }

    pub fn require_lambda(&self) -> Result<[f64; 3], CliError> {
        self.lambda.ok_or_else(|| CliError::Config("--lambda is required".into()))
    }

    pub fn eigen_options(&self) -> EigenOptions {
        EigenOptions { tol_deg: self.tol_deg, seed: self.seed, ..EigenOptions::default() }
    }

    pub fn sweep_options(&self) -> SweepOptions {
        SweepOptions { tol_residual: self.tol_residual, eigen: self.eigen_options(), ..SweepOptions::default() }
    }

    pub fn scan_options(&self) -> ScanOptions {
        ScanOptions { eps_scale: self.eps_scale, sweep: self.sweep_options(), ..ScanOptions::default() }
    }

    pub fn direction_grid(&self) -> Result<DirectionGrid, CliError> {
        Ok(match self.grid {
            GridScheme::Fibonacci => DirectionGrid::fibonacci(self.count)?,
            GridScheme::Latlong => DirectionGrid::latlong(self.count)?,
            GridScheme::GreatCircle => DirectionGrid::great_circle(self.plane, self.count)?,
        })
    }

    /// Directory for multi-file outputs.
    pub fn output_dir(&self) -> &Path {
        self.output.as_deref().unwrap_or(Path::new("rdmgeo-out"))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config always serializes")
    }
}

/// Comment block opening every text output: version, command, then the
/// serialized configuration, one TOML line per comment line.
pub fn header(command: &str, config: &RunConfig) -> String {
    let mut out = format!("# rdmgeo {VERSION} {command}\n");
    for line in config.to_toml().lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

/// Recovers the configuration from a header written by [`header`].
pub fn config_from_header(text: &str) -> Option<RunConfig> {
    let mut lines = text.lines().take_while(|l| l.starts_with('#'));
    lines.next().filter(|l| l.starts_with("# rdmgeo "))?;
    let body: String = lines.map(|l| format!("{}\n", l.trim_start_matches('#').trim_start())).collect();
    RunConfig::from_toml(&body).ok()
}

#[derive(Serialize)]
pub struct Metadata<'a> {
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a RunConfig,
}

/// `{"metadata": ..., "result": ...}` with a trailing newline.
pub fn json_envelope<T: Serialize>(command: &str, config: &RunConfig, result: &T) -> String {
    #[derive(Serialize)]
    struct Envelope<'a, T> {
        metadata: Metadata<'a>,
        result: &'a T,
    }
    let envelope = Envelope { metadata: Metadata { version: VERSION, command, config }, result };
    let mut text = serde_json::to_string_pretty(&envelope).expect("results always serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let config = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&config.to_toml()).unwrap(), config);
    }

    #[test]
    fn flags_override_file_values() {
        let mut config = RunConfig::from_toml("model = \"xy\"\nn = 6\ncount = 10\nns = [4, 8]\n").unwrap();
        let args = RunArgs { n: Some(12), lambda: Some(vec![1.0, -2.0, 0.5]), ..RunArgs::default() };
        config.apply(&args).unwrap();
        assert_eq!(config.model(), Model::Xy);
        assert_eq!(config.n, Some(12));
        assert_eq!(config.count, 10);
        assert_eq!(config.ns, vec![4, 8]);
        assert_eq!(config.lambda, Some([1.0, -2.0, 0.5]));
    }

    #[test]
    fn bad_inputs_are_config_errors() {
        assert!(RunConfig::from_toml("unknown_key = 1\n").is_err());
        assert!(RunConfig::from_toml("model = \"heisenberg\"\n").is_err());
        let mut config = RunConfig::default();
        let args = RunArgs { lambda: Some(vec![1.0, 2.0]), ..RunArgs::default() };
        assert_eq!(config.apply(&args).unwrap_err().exit_code(), 1);
        let config = RunConfig { tol_residual: -1.0, ..RunConfig::default() };
        assert!(config.validate().is_err());
    }

    #[test]
    fn header_carries_the_full_config() {
        let config = RunConfig {
            model: Some(Model::Xy),
            family: Some("J1=-1,J2=t,Bz=0".into()),
            lambda: Some([0.25, -1.0, 3.0]),
            ..RunConfig::default()
        };
        let text = format!("{}t,N\n1,2\n", header("scaling", &config));
        assert!(text.starts_with(&format!("# rdmgeo {VERSION} scaling\n")));
        assert_eq!(config_from_header(&text), Some(config));
        assert_eq!(config_from_header("t,N\n"), None);
    }

    #[test]
    fn envelope_has_metadata_and_result() {
        let text = json_envelope("spectrum", &RunConfig::default(), &[1.0, 2.0]);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["metadata"]["version"], VERSION);
        assert_eq!(value["metadata"]["config"]["m"], 4);
        assert_eq!(value["result"][1], 2.0);
    }
}
