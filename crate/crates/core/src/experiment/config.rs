use std::fmt::Write;
use std::path::PathBuf;

use crate::logic::ConnectiveConfig;
use crate::tasks::{TaskKind, RANDOM_STAGES};

use super::ExperimentError;

/// Explicit seed list or a count meaning `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Seeds {
    Count(u64),
    List(Vec<u64>),
}

impl Seeds {
    pub fn to_vec(&self) -> Vec<u64> {
        match self {
            Seeds::Count(n) => (0..*n).collect(),
            Seeds::List(v) => v.clone(),
        }
    }

    /// `10` is a count; `1,4,9` and `3..7` (half-open) are lists.
    pub fn parse(s: &str) -> Result<Self, ExperimentError> {
        let bad = || ExperimentError::Config(format!("bad seeds `{s}`"));
        let s = s.trim();
        if let Some((a, b)) = s.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            return Ok(Seeds::List((a..b).collect()));
        }
        if let Some(list) = s.strip_suffix(',').or(s.contains(',').then_some(s)) {
            return list
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| bad()))
                .collect::<Result<_, _>>()
                .map(Seeds::List);
        }
        s.parse().map(Seeds::Count).map_err(|_| bad())
    }
}

impl std::fmt::Display for Seeds {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Seeds::Count(n) => write!(f, "{n}"),
            Seeds::List(v) => {
                let parts: Vec<String> = v.iter().map(u64::to_string).collect();
                // a one-element list needs the comma to stay a list
                if parts.len() == 1 {
                    write!(f, "{},", parts[0])
                } else {
                    f.write_str(&parts.join(","))
                }
            }
        }
    }
}

/// Everything needed to reproduce a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub task: TaskKind,
    pub curricula: Vec<String>,
    pub seeds: Seeds,
    /// Epochs per stage of multi-stage curricula.
    pub epochs: usize,
    /// Epochs of the single `baseline` stage; defaults to
    /// `epochs × 3` so every curriculum gets the same number of steps.
    pub baseline_epochs: Option<usize>,
    pub lr: f64,
    pub recall: f64,
    pub connectives: ConnectiveConfig,
    pub out: PathBuf,
    /// Concurrent runs; 0 uses every available core.
    pub jobs: usize,
}

/// Default Adam step size of experiment runs.
pub const DEFAULT_LR: f64 = 0.005;
/// Default rehearsal fraction of experiment runs.
pub const DEFAULT_RECALL: f64 = 0.25;

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            task: TaskKind::Pet,
            curricula: vec!["baseline".into(), "ts".into(), "kc".into(), "random".into()],
            seeds: Seeds::Count(10),
            epochs: 400,
            baseline_epochs: None,
            lr: DEFAULT_LR,
            recall: DEFAULT_RECALL,
            connectives: ConnectiveConfig::default(),
            out: PathBuf::from("results"),
            jobs: 0,
        }
    }
}

/// Partial configuration from a config file or command-line flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub task: Option<TaskKind>,
    pub curricula: Option<Vec<String>>,
    pub seeds: Option<Seeds>,
    pub epochs: Option<usize>,
    pub baseline_epochs: Option<usize>,
    pub lr: Option<f64>,
    pub recall: Option<f64>,
    pub p: Option<f64>,
    pub p_forall: Option<f64>,
    pub p_exists: Option<f64>,
    pub p_kb: Option<f64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

/// Keys accepted in config files, one `key = value` per line.
pub const CONFIG_KEYS: [&str; 13] = [
    "task",
    "curricula",
    "seeds",
    "epochs",
    "baseline_epochs",
    "lr",
    "recall",
    "p",
    "p_forall",
    "p_exists",
    "p_kb",
    "out",
    "jobs",
];

pub fn parse_curricula(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect()
}

impl ConfigOverrides {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let mut o = ConfigOverrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| ExperimentError::Config(format!("config line {}: {m}", i + 1));
            let (key, value) =
                line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
            o.set(key.trim(), value.trim()).map_err(|e| match e {
                ExperimentError::Config(m) => err(m),
                other => other,
            })?;
        }
        Ok(o)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ExperimentError> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ExperimentError> {
            value.parse().map_err(|_| ExperimentError::Config(format!("bad value `{value}` for `{key}`")))
        }
        match key {
            "task" => self.task = Some(value.parse().map_err(|e: crate::tasks::TaskError| ExperimentError::Config(e.to_string()))?),
            "curricula" => self.curricula = Some(parse_curricula(value)),
            "seeds" => self.seeds = Some(Seeds::parse(value)?),
            "epochs" => self.epochs = Some(num(key, value)?),
            "baseline_epochs" => self.baseline_epochs = Some(num(key, value)?),
            "lr" => self.lr = Some(num(key, value)?),
            "recall" => self.recall = Some(num(key, value)?),
            "p" => self.p = Some(num(key, value)?),
            "p_forall" => self.p_forall = Some(num(key, value)?),
            "p_exists" => self.p_exists = Some(num(key, value)?),
            "p_kb" => self.p_kb = Some(num(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "jobs" => self.jobs = Some(num(key, value)?),
            _ => {
                return Err(ExperimentError::Config(format!(
                    "unknown key `{key}` (expected one of {})",
                    CONFIG_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies every set field; `p` is applied before the specific
    /// exponents so those win.
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(t) = self.task {
            cfg.task = t;
        }
        if let Some(c) = &self.curricula {
            cfg.curricula = c.clone();
        }
        if let Some(s) = &self.seeds {
            cfg.seeds = s.clone();
        }
        if let Some(e) = self.epochs {
            cfg.epochs = e;
        }
        if let Some(e) = self.baseline_epochs {
            cfg.baseline_epochs = Some(e);
        }
        if let Some(lr) = self.lr {
            cfg.lr = lr;
        }
        if let Some(r) = self.recall {
            cfg.recall = r;
        }
        if let Some(p) = self.p {
            cfg.connectives.p_forall = p;
            cfg.connectives.p_exists = p;
            cfg.connectives.p_kb = p;
        }
        if let Some(p) = self.p_forall {
            cfg.connectives.p_forall = p;
        }
        if let Some(p) = self.p_exists {
            cfg.connectives.p_exists = p;
        }
        if let Some(p) = self.p_kb {
            cfg.connectives.p_kb = p;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if let Some(j) = self.jobs {
            cfg.jobs = j;
        }
    }
}

impl ExperimentConfig {
    /// Defaults, then the config file, then flags.
    pub fn resolve(file: Option<&ConfigOverrides>, flags: &ConfigOverrides) -> Self {
        let mut cfg = ExperimentConfig::default();
        if let Some(f) = file {
            f.apply(&mut cfg);
        }
        flags.apply(&mut cfg);
        cfg
    }

    pub fn baseline_epochs(&self) -> usize {
        self.baseline_epochs.unwrap_or(self.epochs * RANDOM_STAGES)
    }

    /// Per-stage epoch default for a named curriculum.
    pub fn epochs_for(&self, curriculum: &str) -> usize {
        if curriculum == "baseline" {
            self.baseline_epochs()
        } else {
            self.epochs
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config(m));
        if self.seeds.to_vec().is_empty() {
            return bad("at least one seed is required".into());
        }
        if self.curricula.is_empty() {
            return bad("at least one curriculum is required".into());
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.curricula {
            if !seen.insert(c) {
                return bad(format!("curriculum `{c}` listed twice"));
            }
        }
        if self.epochs == 0 || self.baseline_epochs() == 0 {
            return bad("epochs must be positive".into());
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad(format!("lr must be positive, got {}", self.lr));
        }
        if !(0.0..=1.0).contains(&self.recall) {
            return bad(format!("recall must lie in [0, 1], got {}", self.recall));
        }
        self.connectives.validate().map_err(|e| ExperimentError::Config(e.to_string()))
    }

    /// Resolved configuration in config-file syntax.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let c = &self.connectives;
        let _ = writeln!(s, "task = {}", self.task);
        let _ = writeln!(s, "curricula = {}", self.curricula.join(","));
        let _ = writeln!(s, "seeds = {}", self.seeds);
        let _ = writeln!(s, "epochs = {}", self.epochs);
        let _ = writeln!(s, "baseline_epochs = {}", self.baseline_epochs());
        let _ = writeln!(s, "lr = {}", self.lr);
        let _ = writeln!(s, "recall = {}", self.recall);
        let _ = writeln!(s, "p_forall = {}", c.p_forall);
        let _ = writeln!(s, "p_exists = {}", c.p_exists);
        let _ = writeln!(s, "p_kb = {}", c.p_kb);
        let _ = writeln!(s, "out = {}", self.out.display());
        let _ = writeln!(s, "jobs = {}", self.jobs);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_forms() {
        assert_eq!(Seeds::parse("3").unwrap().to_vec(), [0, 1, 2]);
        assert_eq!(Seeds::parse("4, 9").unwrap().to_vec(), [4, 9]);
        assert_eq!(Seeds::parse("2..5").unwrap().to_vec(), [2, 3, 4]);
        assert_eq!(Seeds::parse("7,").unwrap(), Seeds::List(vec![7]));
        assert_eq!(Seeds::parse("7,,").unwrap_err().to_string(), "bad seeds `7,,`");
        assert!(Seeds::parse("x").is_err());
        for s in ["5", "1,2,3", "2..4"] {
            let seeds = Seeds::parse(s).unwrap();
            assert_eq!(Seeds::parse(&seeds.to_string()).unwrap().to_vec(), seeds.to_vec());
        }
    }

    #[test]
    fn flags_win_over_file() {
        let file = ConfigOverrides::parse("task = sf\nlr = 0.1 # comment\nseeds = 2\n").unwrap();
        let mut flags = ConfigOverrides::default();
        flags.set("lr", "0.5").unwrap();
        let cfg = ExperimentConfig::resolve(Some(&file), &flags);
        assert_eq!(cfg.task, TaskKind::Sf);
        assert_eq!(cfg.lr, 0.5);
        assert_eq!(cfg.seeds, Seeds::Count(2));
    }

    #[test]
    fn specific_exponent_beats_p() {
        let o = ConfigOverrides::parse("p_kb = 3\np = 1.5\n").unwrap();
        let cfg = ExperimentConfig::resolve(Some(&o), &ConfigOverrides::default());
        assert_eq!(cfg.connectives.p_forall, 1.5);
        assert_eq!(cfg.connectives.p_kb, 3.0);
    }

    #[test]
    fn resolved_text_parses_back() {
        let mut cfg = ExperimentConfig { seeds: Seeds::List(vec![3]), ..Default::default() };
        cfg.connectives.p_exists = 4.0;
        let back = ExperimentConfig::resolve(
            Some(&ConfigOverrides::parse(&cfg.to_text()).unwrap()),
            &ConfigOverrides::default(),
        );
        assert_eq!(back.seeds.to_vec(), [3]);
        assert_eq!(back.connectives, cfg.connectives);
        assert_eq!(back.to_text(), cfg.to_text());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ConfigOverrides::parse("colour = red").is_err());
        assert!(ConfigOverrides::parse("epochs = many").is_err());
        assert!(ConfigOverrides::parse("just words").is_err());
        assert!(ConfigOverrides::parse("task = chess").is_err());
        let bad = [
            ExperimentConfig { seeds: Seeds::Count(0), ..Default::default() },
            ExperimentConfig { lr: 0.0, ..Default::default() },
            ExperimentConfig { recall: 1.5, ..Default::default() },
            ExperimentConfig { epochs: 0, ..Default::default() },
            ExperimentConfig { curricula: vec!["ts".into(), "ts".into()], ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
        let mut cfg = ExperimentConfig::default();
        cfg.connectives.p_kb = 0.5;
        assert!(cfg.validate().is_err());
    }
}
