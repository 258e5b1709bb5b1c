//! Seeded property suites and the deterministic report they produce.
//!
//! Every check maps each trial to a normalized margin that should be
//! nonnegative; a trial passes when `margin >= -(tolerance + bracket width)`.
//! Deviation checks report `-deviation`, so `worst_margin` is minus the worst
//! observed error.

mod checks;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::group::FiniteAbelianGroup;
use crate::measure::{Field, OptimizerConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// The built-in tolerance file, a starting point for `--tolerances` overrides.
pub const DEFAULT_TOLERANCES: &str = include_str!("../../config/tolerances.toml");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Vmeasure,
    Vweyl,
    Vtwisted,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Core, Suite::Vmeasure, Suite::Vweyl, Suite::Vtwisted];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Vmeasure => "vmeasure",
            Suite::Vweyl => "vweyl",
            Suite::Vtwisted => "vtwisted",
        }
    }
}

/// A suite name or `all`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteSelection {
    One(Suite),
    All,
}

impl SuiteSelection {
    fn includes(self, suite: Suite) -> bool {
        self == SuiteSelection::All || self == SuiteSelection::One(suite)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteSelection::One(s) => s.as_str(),
            SuiteSelection::All => "all",
        }
    }
}

impl FromStr for SuiteSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(SuiteSelection::All);
        }
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .map(SuiteSelection::One)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSettings {
    pub tolerance: f64,
    pub trials: usize,
    #[serde(default)]
    pub threshold: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    pub hausdorff_young: Vec<Exponent>,
    pub young: Vec<Exponent>,
    pub space_lq: Vec<Exponent>,
    pub max_dim: usize,
    pub pp: Vec<Exponent>,
    pub vector_young: Vec<(Exponent, Exponent)>,
    pub contain: Vec<Exponent>,
    pub vv_hausdorff_young: Vec<Exponent>,
    pub vv_matrix_size: Vec<usize>,
    pub amplification_levels: usize,
    pub amplification_samples: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptimizerSettings {
    grid_budget: usize,
    /// Budget for the dual-grid side of the semivariation duality check.
    duality_grid_budget: usize,
    starts: usize,
}

/// The parsed tolerance registry.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    optimizer: OptimizerSettings,
    pub grids: Grids,
    pub checks: BTreeMap<String, CheckSettings>,
}

impl Tolerances {
    pub fn parse(text: &str) -> Result<Self> {
        let t: Tolerances = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for c in checks::CHECKS {
            if !t.checks.contains_key(c.name) {
                return Err(Error::Config(format!("no settings for check {:?}", c.name)));
            }
        }
        if let Some(extra) = t.checks.keys().find(|k| checks::CHECKS.iter().all(|c| c.name != k.as_str())) {
            return Err(Error::Config(format!("unknown check {extra:?}")));
        }
        if let Some((p, q)) = t.grids.vector_young.iter().find(|(p, q)| p.recip() + q.recip() <= 1.0 || p.is_infinite() || p.recip() == 1.0) {
            return Err(Error::Config(format!("vector_young grid point ({p}, {q}) violates 1 < p < inf, 1/p + 1/q > 1")));
        }
        if t.grids.max_dim == 0 {
            return Err(Error::Config("max_dim must be positive".into()));
        }
        Ok(t)
    }

    pub fn defaults() -> Self {
        Self::parse(DEFAULT_TOLERANCES).expect("bundled tolerance file is valid")
    }
}

/// Run parameters; everything that can change a report is in here.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub groups: Vec<FiniteAbelianGroup>,
    /// Overrides every check's trial count.
    pub trials: Option<usize>,
    /// Overrides the largest vector dimension.
    pub max_dim: Option<usize>,
    /// Restricts scalar fields; both when `None`.
    pub field: Option<Field>,
    /// Restricts the ℓ^q exponent of the target space.
    pub lq: Option<Exponent>,
    pub tolerances: Tolerances,
}

impl VerifyConfig {
    pub fn default_groups() -> Vec<FiniteAbelianGroup> {
        [vec![2], vec![3], vec![4], vec![2, 2], vec![6]]
            .into_iter()
            .map(|o| FiniteAbelianGroup::new(o).expect("valid orders"))
            .collect()
    }

    fn dims(&self) -> Vec<usize> {
        (1..=self.max_dim.unwrap_or(self.tolerances.grids.max_dim)).collect()
    }

    fn fields(&self) -> Vec<Field> {
        self.field.map_or_else(|| vec![Field::Real, Field::Complex], |f| vec![f])
    }

    fn lqs(&self) -> Vec<Exponent> {
        self.lq.map_or_else(|| self.tolerances.grids.space_lq.clone(), |q| vec![q])
    }

    fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            seed: self.seed,
            starts: self.tolerances.optimizer.starts,
            grid_budget: self.tolerances.optimizer.grid_budget,
            ..OptimizerConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.groups.is_empty() {
            return Err(Error::Config("empty group list".into()));
        }
        if self.max_dim == Some(0) {
            return Err(Error::Config("dimension must be positive".into()));
        }
        Ok(())
    }
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            groups: Self::default_groups(),
            trials: None,
            max_dim: None,
            field: None,
            lq: None,
            tolerances: Tolerances::defaults(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub groups: Vec<FiniteAbelianGroup>,
    pub dims: Vec<usize>,
    pub fields: Vec<Field>,
    pub lq: Vec<Exponent>,
    pub trials_override: Option<usize>,
    pub grids: Grids,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_name: String,
    pub suite: Suite,
    /// The identity or inequality being checked.
    pub anchor: String,
    pub trials: usize,
    pub worst_margin: Option<f64>,
    pub tolerance: f64,
    pub bracket_width: Option<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub suite: String,
    pub config: ConfigEcho,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

/// Normalized outcome of one trial.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Outcome {
    margin: f64,
    width: Option<f64>,
}

impl Outcome {
    pub(crate) fn deviation(d: f64) -> Self {
        Self { margin: -d, width: None }
    }

    pub(crate) fn margin(m: f64) -> Self {
        Self { margin: m, width: None }
    }

    /// `m` and `width` are divided by `scale` when it is positive.
    pub(crate) fn scaled(m: f64, scale: f64, width: f64) -> Self {
        let s = if scale > 0.0 { scale } else { 1.0 };
        Self { margin: m / s, width: Some(width / s) }
    }
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<34} {:<9} {:>7} {:>13} {:>10} {:>10}  status",
            "check", "suite", "trials", "worst_margin", "tolerance", "bracket"
        );
        for c in &self.checks {
            let worst = c.worst_margin.map_or_else(|| "-".to_string(), |m| format!("{m:.3e}"));
            let width = c.bracket_width.map_or_else(|| "-".to_string(), |w| format!("{w:.2e}"));
            let status = if c.pass { "pass" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{:<34} {:<9} {:>7} {:>13} {:>10.1e} {:>10}  {}",
                c.check_name,
                c.suite.as_str(),
                c.trials,
                worst,
                c.tolerance,
                width,
                status
            );
            if let Some(e) = &c.error {
                let _ = writeln!(out, "    error: {e}");
            }
        }
        let _ = writeln!(out, "overall: {}", if self.pass { "pass" } else { "FAIL" });
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("check_name,suite,trials,worst_margin,tolerance,bracket_width,pass\n");
        for c in &self.checks {
            let opt = |x: Option<f64>| x.map_or_else(String::new, |v| format!("{v:e}"));
            let _ = writeln!(
                out,
                "{},{},{},{},{:e},{},{}",
                c.check_name,
                c.suite.as_str(),
                c.trials,
                opt(c.worst_margin),
                c.tolerance,
                opt(c.bracket_width),
                c.pass
            );
        }
        out
    }
}

/// Runs the selected suites. Checks run concurrently; records are ordered by
/// suite, then check name.
pub fn run(selection: SuiteSelection, cfg: &VerifyConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let ctx = checks::Ctx::new(cfg);
    let mut records: Vec<CheckRecord> = checks::CHECKS
        .par_iter()
        .filter(|c| selection.includes(c.suite))
        .map(|c| {
            let settings = &cfg.tolerances.checks[c.name];
            let trials = cfg.trials.unwrap_or(settings.trials);
            let result = if trials == 0 { Ok(Vec::new()) } else { (c.run)(&ctx, c.name, trials, settings) };
            record(c, settings, result)
        })
        .collect();
    records.sort_by(|a, b| (a.suite, &a.check_name).cmp(&(b.suite, &b.check_name)));
    let pass = records.iter().all(|r| r.pass);
    Ok(VerificationReport {
        schema: SCHEMA_VERSION,
        suite: selection.as_str().to_string(),
        config: ConfigEcho {
            seed: cfg.seed,
            groups: cfg.groups.clone(),
            dims: cfg.dims(),
            fields: cfg.fields(),
            lq: cfg.lqs(),
            trials_override: cfg.trials,
            grids: cfg.tolerances.grids.clone(),
        },
        checks: records,
        pass,
    })
}

fn record(c: &checks::Check, settings: &CheckSettings, result: Result<Vec<Outcome>>) -> CheckRecord {
    let tol = settings.tolerance;
    let mut rec = CheckRecord {
        check_name: c.name.to_string(),
        suite: c.suite,
        anchor: c.anchor.to_string(),
        trials: 0,
        worst_margin: None,
        tolerance: tol,
        bracket_width: None,
        pass: true,
        error: None,
    };
    match result {
        Err(e) => {
            rec.pass = false;
            rec.error = Some(e.to_string());
        }
        Ok(outcomes) => {
            rec.trials = outcomes.len();
            for o in &outcomes {
                let w = o.width.unwrap_or(0.0);
                if o.width.is_some() {
                    rec.bracket_width = Some(rec.bracket_width.map_or(w, |b: f64| b.max(w)));
                }
                // NaN margins fail.
                if !(o.margin >= -(tol + w)) {
                    rec.pass = false;
                }
                rec.worst_margin = Some(match rec.worst_margin {
                    Some(m) if !(o.margin < m) && !o.margin.is_nan() => m,
                    _ => o.margin,
                });
            }
            if rec.worst_margin.is_some_and(f64::is_nan) {
                rec.worst_margin = None;
                rec.pass = false;
            }
        }
    }
    rec
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyConfig {
        VerifyConfig {
            groups: vec![FiniteAbelianGroup::cyclic(2).unwrap(), FiniteAbelianGroup::cyclic(3).unwrap()],
            trials: Some(2),
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn bundled_tolerances_cover_every_check() {
        let t = Tolerances::defaults();
        assert_eq!(t.checks.len(), checks::CHECKS.len());
        assert!(Tolerances::parse("nonsense = [").is_err());
        let extra = format!("{DEFAULT_TOLERANCES}\n[checks.bogus]\ntolerance = 1.0\ntrials = 1\n");
        assert!(Tolerances::parse(&extra).is_err());
    }

    #[test]
    fn check_names_are_unique() {
        let mut names: Vec<_> = checks::CHECKS.iter().map(|c| c.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), checks::CHECKS.len());
    }

    #[test]
    fn quick_run_passes_and_is_deterministic() {
        let cfg = quick();
        let a = run(SuiteSelection::All, &cfg).unwrap();
        for c in &a.checks {
            assert!(c.pass, "{}", a.to_table());
        }
        let b = run(SuiteSelection::All, &cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let back: VerificationReport = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn zero_trials_is_vacuous() {
        let cfg = VerifyConfig { trials: Some(0), ..quick() };
        let r = run(SuiteSelection::One(Suite::Vtwisted), &cfg).unwrap();
        assert!(r.pass);
        assert!(r.checks.iter().all(|c| c.trials == 0 && c.worst_margin.is_none()));
        assert!(r.checks.iter().all(|c| c.suite == Suite::Vtwisted));
    }

    #[test]
    fn failing_outcome_fails_record() {
        let c = &checks::CHECKS[0];
        let s = CheckSettings { tolerance: 1e-10, trials: 1, threshold: None };
        let r = record(c, &s, Ok(vec![Outcome::deviation(1e-12), Outcome::deviation(1e-3)]));
        assert!(!r.pass && r.worst_margin == Some(-1e-3));
        let r = record(c, &s, Ok(vec![Outcome::margin(f64::NAN)]));
        assert!(!r.pass);
        let r = record(c, &s, Ok(vec![Outcome::scaled(-0.5, 1.0, 1.0)]));
        assert!(r.pass && r.bracket_width == Some(1.0));
    }

    #[test]
    fn suite_names_parse() {
        assert_eq!("all".parse::<SuiteSelection>().unwrap(), SuiteSelection::All);
        assert_eq!("vweyl".parse::<SuiteSelection>().unwrap(), SuiteSelection::One(Suite::Vweyl));
        assert!("nope".parse::<SuiteSelection>().is_err());
    }
}
