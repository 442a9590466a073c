//! Run configuration, read from JSON and overridden by command-line flags.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use qonsager_core::loopsl2::EvalParams;
use qonsager_core::onsager::OnsagerParams;
use qonsager_core::ranka::{AffineTypeA, RankParams};
use qonsager_core::scalars::NumericPoint;
use qonsager_core::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Exact,
    Numeric,
}

/// V_n(a).
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSpec {
    pub n: usize,
    pub a: String,
}

impl EvalSpec {
    pub fn params(&self) -> Result<EvalParams> {
        let a = scalar(&self.a, "a")?;
        Ok(EvalParams::new(self.n, a)?)
    }

    pub fn label(&self) -> String {
        format!("V_{}({})", self.n, self.a)
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModuleSpec {
    /// The one-dimensional module V_0(1).
    Trivial,
    Eval { n: usize, a: String },
    Tensor { factors: Vec<EvalSpec> },
}

impl ModuleSpec {
    pub fn label(&self) -> String {
        match self {
            ModuleSpec::Trivial => "trivial".into(),
            ModuleSpec::Eval { n, a } => EvalSpec { n: *n, a: a.clone() }.label(),
            ModuleSpec::Tensor { factors } => factors.iter().map(EvalSpec::label).collect::<Vec<_>>().join(" x "),
        }
    }

    /// Evaluation factors (one for `eval`, one trivial factor for `trivial`).
    pub fn factors(&self) -> Vec<EvalSpec> {
        match self {
            ModuleSpec::Trivial => vec![EvalSpec { n: 0, a: "1".into() }],
            ModuleSpec::Eval { n, a } => vec![EvalSpec { n: *n, a: a.clone() }],
            ModuleSpec::Tensor { factors } => factors.clone(),
        }
    }
}

/// (c₀, c₁) and (s₀, s₁) as Scalar strings.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    pub c: [String; 2],
    pub s: [String; 2],
}

impl Default for ParamSpec {
    fn default() -> Self {
        ParamSpec { c: ["1".into(), "1".into()], s: ["0".into(), "0".into()] }
    }
}

impl ParamSpec {
    pub fn params(&self) -> Result<OnsagerParams> {
        let c = [scalar(&self.c[0], "c0")?, scalar(&self.c[1], "c1")?];
        let s = [scalar(&self.s[0], "s0")?, scalar(&self.s[1], "s1")?];
        OnsagerParams::new(c, s).context("invalid Onsager parameters")
    }

    pub fn label(&self) -> String {
        format!("c=({}, {}), s=({}, {})", self.c[0], self.c[1], self.s[0], self.s[1])
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RankSpec {
    #[serde(rename = "N")]
    pub n: usize,
    pub a: String,
    pub c: Vec<String>,
    pub s: Vec<String>,
    /// Spectral order.
    #[serde(rename = "T", default = "default_rank_t")]
    pub t: usize,
    /// Relation window |r| ≤ R.
    #[serde(rename = "R", default = "default_rank_r")]
    pub r: usize,
}

fn default_rank_t() -> usize {
    4
}

fn default_rank_r() -> usize {
    2
}

impl RankSpec {
    pub fn build(&self) -> Result<(AffineTypeA, Scalar, RankParams)> {
        let ty = AffineTypeA::new(self.n)?;
        let a = scalar(&self.a, "rank.a")?;
        let c = self.c.iter().map(|x| scalar(x, "rank.c")).collect::<Result<Vec<_>>>()?;
        let s = self.s.iter().map(|x| scalar(x, "rank.s")).collect::<Result<Vec<_>>>()?;
        let p = RankParams::new(&ty, c, s).context("invalid rank parameters")?;
        Ok((ty, a, p))
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub backend: Backend,
    /// Specialization point for numeric steps.
    #[serde(default = "default_q0")]
    pub q0: f64,
    #[serde(default = "default_modules")]
    pub modules: Vec<ModuleSpec>,
    #[serde(default)]
    pub params: ParamSpec,
    /// Lu–Wang relation window |r| ≤ R.
    #[serde(rename = "R", default = "default_r")]
    pub r: usize,
    /// Series order.
    #[serde(rename = "T", default = "default_t")]
    pub t: usize,
    /// Drinfeld relation window |k| ≤ W on evaluation modules.
    #[serde(default = "default_drinfeld_window")]
    pub drinfeld_window: usize,
    /// Check groups to run; all groups of the subcommand when absent.
    #[serde(default)]
    pub checks: Option<Vec<String>>,
    #[serde(default)]
    pub onedim: Vec<ParamSpec>,
    #[serde(default)]
    pub rank: Option<RankSpec>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_q0() -> f64 {
    1.3
}

fn default_modules() -> Vec<ModuleSpec> {
    vec![ModuleSpec::Eval { n: 1, a: "q".into() }]
}

fn default_r() -> usize {
    4
}

fn default_t() -> usize {
    6
}

fn default_drinfeld_window() -> usize {
    3
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

/// Every check group name, by subcommand.
pub const CERTIFY_GROUPS: &[&str] = &["scalars", "drinfeld", "kacmoody", "qdg", "luwang", "tau", "rationality"];
pub const FACTORIZE_GROUPS: &[&str] = &["factorization", "generalized", "grouplike", "coproduct", "numeric"];
pub const DRF_GROUPS: &[&str] = &["drf"];
pub const ONEDIM_GROUPS: &[&str] = &["onedim"];
pub const RANKN_GROUPS: &[&str] = &["rank-kacmoody", "grel", "words", "braid", "rank-spectral"];

fn scalar(s: &str, what: &str) -> Result<Scalar> {
    Scalar::parse(s).with_context(|| format!("cannot parse {what} = {s:?}"))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: RunConfig = serde_json::from_str(text).context("invalid config JSON")?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 || self.t == 0 || self.drinfeld_window == 0 {
            bail!("windows R, T and drinfeld_window must be positive");
        }
        NumericPoint::real(self.q0).context("invalid q0")?;
        self.params.params()?;
        for p in &self.onedim {
            p.params()?;
        }
        for m in &self.modules {
            let f = m.factors();
            if f.is_empty() {
                bail!("tensor module without factors");
            }
            for e in f {
                e.params().with_context(|| format!("module {}", m.label()))?;
            }
        }
        if let Some(r) = &self.rank {
            r.build()?;
            if r.t == 0 || r.r == 0 {
                bail!("rank windows must be positive");
            }
        }
        if let Some(list) = &self.checks {
            let all: Vec<&str> =
                [CERTIFY_GROUPS, FACTORIZE_GROUPS, DRF_GROUPS, ONEDIM_GROUPS, RANKN_GROUPS].concat();
            if let Some(bad) = list.iter().find(|c| !all.contains(&c.as_str())) {
                bail!("unknown check group {bad:?}");
            }
        }
        Ok(())
    }

    pub fn selected(&self, group: &str) -> bool {
        self.checks.as_ref().is_none_or(|l| l.iter().any(|c| c == group))
    }

    pub fn point(&self) -> NumericPoint {
        NumericPoint::real(self.q0).expect("validated")
    }
}
