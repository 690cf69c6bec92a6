//! Run configuration: the JSON file format, flag overlays and per-command defaults.

use std::path::PathBuf;

use perron::lacunary::LacunaryCertificate;
use perron::{SearchStrategy, Variant};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum CommandId {
    Gen,
    Factor,
    Capacity,
    WitnessT1,
    WitnessT2,
    VerifyProb,
    VerifyP5,
    VerifySpacing,
    Blow,
    Maxop,
    CertifyLacunary,
}

impl CommandId {
    /// Commands whose outcome depends on the random stream.
    pub fn is_random(self) -> bool {
        matches!(
            self,
            CommandId::Capacity
                | CommandId::WitnessT1
                | CommandId::WitnessT2
                | CommandId::VerifyProb
                | CommandId::VerifyP5
                | CommandId::VerifySpacing
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// JSON report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    /// Check table as CSV.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    /// Generated direction sample as CSV (`gen`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pgm: Option<PathBuf>,
}

impl Outputs {
    fn overlay(self, top: Outputs) -> Outputs {
        Outputs {
            report: top.report.or(self.report),
            csv: top.csv.or(self.csv),
            sample: top.sample.or(self.sample),
            svg: top.svg.or(self.svg),
            pgm: top.pgm.or(self.pgm),
        }
    }

    fn is_empty(&self) -> bool {
        *self == Outputs::default()
    }
}

macro_rules! run_config {
    ($( $(#[$m:meta])* $field:ident : $ty:ty ),* $(,)?) => {
        /// Every field is optional in the file and on the command line;
        /// [`RunConfig::resolve`] fills per-command defaults.
        #[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
        #[serde(deny_unknown_fields)]
        pub struct RunConfig {
            $( $(#[$m])* #[serde(default, skip_serializing_if = "Option::is_none")] pub $field: Option<$ty>, )*
        }

        impl RunConfig {
            /// Fields set in `top` win.
            pub fn overlay(mut self, mut top: RunConfig) -> RunConfig {
                let generator = match (self.generator.take(), top.generator.take()) {
                    (Some(a), Some(b)) => Some(GeneratorConfig {
                        gen: b.gen.or(a.gen),
                        count: b.count.or(a.count),
                        seed: b.seed.or(a.seed),
                    }),
                    (a, b) => b.or(a),
                };
                let outputs = match (self.outputs.take(), top.outputs.take()) {
                    (Some(a), Some(b)) => Some(a.overlay(b)),
                    (a, b) => b.or(a),
                };
                let mut out = RunConfig { $( $field: top.$field.or(self.$field), )* };
                out.generator = generator;
                out.outputs = outputs;
                out
            }
        }
    };
}

run_config! {
    command: CommandId,
    generator: GeneratorConfig,
    seed: u64,
    #[serde(rename = "N")]
    order: u32,
    a_max: u64,
    d_max: u64,
    trials: u64,
    d_range: [u64; 2],
    d_values: Vec<u64>,
    resolution: f64,
    #[schemars(with = "Option<String>")]
    variant: Variant,
    #[schemars(with = "Option<String>")]
    strategy: SearchStrategy,
    iterations: u64,
    exact: bool,
    j: u32,
    j_max: u32,
    spread: f64,
    level: f64,
    fraction: f64,
    values: Vec<f64>,
    #[schemars(with = "Option<serde_json::Value>")]
    certificate: LacunaryCertificate,
    lacunary_order: u32,
    outputs: Outputs,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| invalid(format!("config: {e}")))
    }

    pub fn command(&self) -> Result<CommandId, CliError> {
        self.command.ok_or_else(|| invalid("no command given"))
    }

    pub fn need<T: Clone>(&self, value: &Option<T>, name: &str) -> Result<T, CliError> {
        value.clone().ok_or_else(|| invalid(format!("missing `{name}`")))
    }

    /// Applies defaults and checks the schema rules: a command is named,
    /// random runs carry a seed and every limit is positive.
    pub fn resolve(mut self) -> Result<RunConfig, CliError> {
        let cmd = self.command()?;
        if self.outputs.as_ref().is_some_and(Outputs::is_empty) {
            self.outputs = None;
        }
        if let Some(g) = &mut self.generator {
            // a bare seed also seeds a random generator
            if g.seed.is_none() {
                if let Some(name) = &g.gen {
                    if name.parse::<perron::Generator>().is_ok_and(|x| x.is_random()) {
                        g.seed = self.seed;
                    }
                }
            }
        }
        if cmd.is_random() && self.seed.is_none() {
            return Err(invalid(format!("`{}` needs an explicit seed", command_name(cmd))));
        }
        let needs_order = matches!(
            cmd,
            CommandId::Capacity
                | CommandId::WitnessT1
                | CommandId::WitnessT2
                | CommandId::VerifyProb
                | CommandId::VerifyP5
                | CommandId::VerifySpacing
        );
        if needs_order && self.order.is_none() {
            return Err(invalid("missing `N`"));
        }
        match cmd {
            CommandId::Gen => {
                if self.generator.is_none() {
                    return Err(invalid("missing generator"));
                }
            }
            CommandId::Factor | CommandId::Capacity | CommandId::CertifyLacunary => {
                if self.generator.is_none() && self.values.is_none() {
                    return Err(invalid("give either a generator or explicit values"));
                }
                if cmd == CommandId::Factor {
                    self.variant.get_or_insert(Variant::CapacityForm);
                }
                if cmd == CommandId::Capacity {
                    self.strategy.get_or_insert(SearchStrategy::SwapLocalSearch);
                    self.iterations.get_or_insert(20_000);
                }
            }
            CommandId::WitnessT1 => {
                self.a_max.get_or_insert(20_000);
            }
            CommandId::WitnessT2 => {
                self.d_max.get_or_insert(100_000);
            }
            CommandId::VerifyProb => {
                self.trials.get_or_insert(1_000_000);
                self.d_values.get_or_insert_with(|| vec![16, 48]);
            }
            CommandId::VerifyP5 | CommandId::VerifySpacing => {
                self.trials.get_or_insert(10_000);
            }
            CommandId::Blow => {
                self.j.get_or_insert(3);
                self.j_max.get_or_insert(4);
                self.resolution.get_or_insert(256.0);
                self.spread.get_or_insert(std::f64::consts::FRAC_PI_4);
            }
            CommandId::Maxop => {
                self.j.get_or_insert(3);
                self.resolution.get_or_insert(64.0);
                self.spread.get_or_insert(std::f64::consts::FRAC_PI_4);
                self.level.get_or_insert(0.45);
                self.fraction.get_or_insert(0.95);
            }
        }
        self.check_limits()?;
        Ok(self)
    }

    fn check_limits(&self) -> Result<(), CliError> {
        let counts = [
            ("a_max", self.a_max),
            ("d_max", self.d_max),
            ("trials", self.trials),
            ("iterations", self.iterations),
            ("count", self.generator.as_ref().and_then(|g| g.count)),
        ];
        for (name, v) in counts {
            if v == Some(0) {
                return Err(invalid(format!("`{name}` must be positive")));
            }
        }
        let reals = [
            ("resolution", self.resolution),
            ("spread", self.spread),
            ("level", self.level),
            ("fraction", self.fraction),
        ];
        for (name, v) in reals {
            if let Some(x) = v {
                if !(x.is_finite() && x > 0.0) {
                    return Err(invalid(format!("`{name}` must be positive and finite")));
                }
            }
        }
        if let Some([lo, hi]) = self.d_range {
            if lo == 0 || lo > hi {
                return Err(invalid("`d_range` must satisfy 0 < lo <= hi"));
            }
        }
        if self.d_values.as_ref().is_some_and(|d| d.is_empty() || d.contains(&0)) {
            return Err(invalid("`d_values` must be nonempty and positive"));
        }
        if self.values.as_ref().is_some_and(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(invalid("`values` must be finite"));
        }
        Ok(())
    }
}

pub fn command_name(cmd: CommandId) -> &'static str {
    match cmd {
        CommandId::Gen => "gen",
        CommandId::Factor => "factor",
        CommandId::Capacity => "capacity",
        CommandId::WitnessT1 => "witness t1",
        CommandId::WitnessT2 => "witness t2",
        CommandId::VerifyProb => "verify prob",
        CommandId::VerifyP5 => "verify p5",
        CommandId::VerifySpacing => "verify spacing",
        CommandId::Blow => "blow",
        CommandId::Maxop => "maxop",
        CommandId::CertifyLacunary => "certify-lacunary",
    }
}
