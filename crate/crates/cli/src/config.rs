//! Command-line surface. Every parsed invocation is a [`RunConfig`], which
//! serializes losslessly; reports echo it without the output location.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub const SEED_ENV: &str = "TRANSVERSAL_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "transversal",
    version,
    about = "Sampling certifiers for nonlinear transversality and regularity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed of all sample streams [default: $TRANSVERSAL_SEED, else 0].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write CSV sidecars next to the report.
    #[arg(long, global = true, requires = "out")]
    pub csv: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// Defaults to 0.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub emit_csv: bool,
}

/// The part of a [`RunConfig`] that determines the results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub command: Command,
    pub seed: u64,
}

impl RunConfig {
    pub fn from_cli(cli: Cli, env_seed: Option<&str>) -> Result<(Self, Option<usize>), String> {
        let seed = match (cli.seed, env_seed) {
            (Some(s), _) => s,
            (None, Some(text)) => text
                .trim()
                .parse()
                .map_err(|_| format!("{SEED_ENV} is not an unsigned integer: {text:?}"))?,
            (None, None) => 0,
        };
        let cfg = RunConfig {
            command: cli.command,
            seed,
            out: cli.out,
            emit_csv: cli.csv,
        };
        Ok((cfg, cli.threads))
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            command: self.command.clone(),
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Certify a transversality property of a scene.
    Certify(CertifyArgs),
    /// Bracket the Hölder modulus of a scene.
    Modulus(ModulusArgs),
    /// Check a slope sufficient condition, or estimate one γ-slope.
    Slope(SlopeArgs),
    /// Move between set transversality and mapping regularity.
    Translate(TranslateArgs),
    /// Run the bundled example corpus.
    Examples(ExamplesArgs),
    /// Recheck every falsification witness in a report.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyArg {
    Semi,
    Sub,
    Full,
}

impl From<PropertyArg> for transversal::certify::Property {
    fn from(p: PropertyArg) -> Self {
        match p {
            PropertyArg::Semi => Self::Semi,
            PropertyArg::Sub => Self::Sub,
            PropertyArg::Full => Self::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryArgs {
    #[arg(long, value_enum)]
    pub property: PropertyArg,
    /// `linear:α`, `power:α,q`, `holder:α,β,q`, `scaled:c,q`, `root:c`,
    /// `table:0,0;t,v;...` or gauge JSON.
    #[arg(long)]
    pub gauge: String,
    /// δ, or δ₁ for sub and full.
    #[arg(long)]
    pub delta: f64,
    /// δ₂ [default: δ₁].
    #[arg(long)]
    pub delta2: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyArgs {
    #[arg(long)]
    pub scene: PathBuf,
    #[command(flatten)]
    pub query: QueryArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulusArgs {
    #[arg(long)]
    pub scene: PathBuf,
    #[arg(long, value_enum)]
    pub property: PropertyArg,
    /// Hölder order of the gauge `α t^q`.
    #[arg(long, default_value_t = 1.0)]
    pub order: f64,
    #[arg(long, default_value_t = 1.0)]
    pub delta_max: f64,
    #[arg(long, default_value_t = 20)]
    pub sweep: u32,
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0.02)]
    pub rel_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeModeArg {
    Semi,
    Sub,
    Full,
    Raw,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlopeArgs {
    #[arg(long)]
    pub scene: PathBuf,
    #[arg(long, value_enum)]
    pub mode: SlopeModeArg,
    #[arg(long)]
    pub gauge: String,
    #[arg(long)]
    pub gamma: f64,
    /// δ, or δ₁; unused in raw mode.
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long)]
    pub delta2: Option<f64>,
    /// Outer samples of the condition check.
    #[arg(long, default_value_t = 200)]
    pub budget: usize,
    /// Raw mode: JSON file `{"shifts": [...], "at": {"omegas": [...], "x": [...]}}`.
    #[arg(long)]
    pub anchor: Option<PathBuf>,
    /// Raw mode: nonlocal instead of local slope.
    #[arg(long)]
    pub nonlocal: bool,
    #[arg(long, default_value_t = 1.0)]
    pub r0: f64,
    #[arg(long, default_value_t = 20)]
    pub shells: usize,
    #[arg(long, default_value_t = 16)]
    pub per_shell: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Scene and its product of translates side by side.
    #[value(name = "sets2map")]
    Sets2map,
    /// Regularity of a mapping, then transversality of its graph pair.
    #[value(name = "map2sets")]
    Map2sets,
    /// Transversality of a mapping to a target set.
    #[value(name = "map2set-target")]
    Map2setTarget,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslateArgs {
    #[arg(long, value_enum)]
    pub direction: Direction,
    #[arg(long, conflicts_with = "mapping")]
    pub scene: Option<PathBuf>,
    #[arg(long)]
    pub mapping: Option<PathBuf>,
    /// Target set JSON `{"set": ..., "point": [...]}` for `map2set-target`.
    #[arg(long)]
    pub target: Option<PathBuf>,
    /// Also certify the target pair through its product of translates.
    #[arg(long)]
    pub cross_check: bool,
    #[command(flatten)]
    pub query: QueryArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExamplesArgs {
    #[arg(long, conflicts_with = "all", required_unless_present_any = ["all", "list"])]
    pub name: Option<String>,
    #[arg(long)]
    pub all: bool,
    /// List the corpus without running it.
    #[arg(long, conflicts_with_all = ["name", "all"])]
    pub list: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportArgs {
    /// Report whose witnesses are recomputed from scratch.
    #[arg(long)]
    pub recheck: PathBuf,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        let cli = Cli::try_parse_from(args).unwrap();
        RunConfig::from_cli(cli, None).unwrap().0
    }

    #[test]
    fn round_trips_through_json() {
        for args in [
            &[
                "transversal",
                "certify",
                "--scene",
                "s.json",
                "--property",
                "sub",
                "--gauge",
                "root:1.1",
                "--delta",
                "1",
                "--delta2",
                "0.1",
            ][..],
            &[
                "transversal",
                "--seed",
                "5",
                "examples",
                "--all",
                "--out",
                "r.json",
                "--csv",
            ],
            &[
                "transversal",
                "translate",
                "--direction",
                "map2set-target",
                "--mapping",
                "m.json",
                "--target",
                "t.json",
                "--property",
                "full",
                "--gauge",
                "linear:0.3",
                "--delta",
                "0.1",
            ],
            &[
                "transversal",
                "slope",
                "--scene",
                "s.json",
                "--mode",
                "raw",
                "--gauge",
                "linear:1",
                "--gamma",
                "1",
                "--anchor",
                "a.json",
            ],
        ] {
            let cfg = parse(args);
            let text = serde_json::to_string(&cfg).unwrap();
            let back: RunConfig = serde_json::from_str(&text).unwrap();
            assert_eq!(back, cfg);
        }
    }

    #[test]
    fn seed_precedence() {
        let cli = || Cli::try_parse_from(["transversal", "examples", "--all"]).unwrap();
        assert_eq!(RunConfig::from_cli(cli(), None).unwrap().0.seed, 0);
        assert_eq!(RunConfig::from_cli(cli(), Some("9")).unwrap().0.seed, 9);
        assert!(RunConfig::from_cli(cli(), Some("x")).is_err());
        let explicit =
            Cli::try_parse_from(["transversal", "--seed", "3", "examples", "--all"]).unwrap();
        assert_eq!(RunConfig::from_cli(explicit, Some("9")).unwrap().0.seed, 3);
    }

    #[test]
    fn csv_needs_out() {
        assert!(Cli::try_parse_from(["transversal", "examples", "--all", "--csv"]).is_err());
    }
}
