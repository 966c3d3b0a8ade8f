use crate::fol::is_identifier;

use super::{Curriculum, CurriculumError, Stage, StageOverrides};

pub(super) fn parse(name: &str, text: &str) -> Result<Curriculum, CurriculumError> {
    let mut stages = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| CurriculumError::Parse { line: line_no, message };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let rest = line
            .strip_prefix("stage")
            .filter(|r| r.starts_with(char::is_whitespace))
            .ok_or_else(|| err(format!("expected `stage <k>: ...`, found `{line}`")))?;
        let (number, body) =
            rest.split_once(':').ok_or_else(|| err("missing `:` after stage number".into()))?;
        let k: usize =
            number.trim().parse().map_err(|_| err(format!("bad stage number `{}`", number.trim())))?;
        if k != stages.len() + 1 {
            return Err(err(format!("expected stage {}, found stage {k}", stages.len() + 1)));
        }
        let (ids, opts) = match body.split_once('@') {
            Some((ids, opts)) => (ids, Some(opts)),
            None => (body, None),
        };
        let mut rules = Vec::new();
        for id in ids.split(',').map(str::trim) {
            if !is_identifier(id) {
                return Err(err(format!("bad rule id `{id}`")));
            }
            rules.push(id.to_string());
        }
        let mut overrides = StageOverrides::default();
        if let Some(opts) = opts {
            for kv in opts.split(',').map(str::trim) {
                let (key, value) =
                    kv.split_once('=').ok_or_else(|| err(format!("expected key=value, found `{kv}`")))?;
                let (key, value) = (key.trim(), value.trim());
                let bad = || err(format!("bad value `{value}` for `{key}`"));
                match key {
                    "epochs" => overrides.epochs = Some(value.parse().map_err(|_| bad())?),
                    "lr" => overrides.lr = Some(value.parse().map_err(|_| bad())?),
                    "recall" => overrides.recall = Some(value.parse().map_err(|_| bad())?),
                    _ => return Err(err(format!("unknown stage option `{key}`"))),
                }
            }
        }
        stages.push(Stage { rules, overrides });
    }
    if stages.is_empty() {
        return Err(CurriculumError::NoStages(name.to_string()));
    }
    Ok(Curriculum::new(name, stages))
}

pub(super) fn format(c: &Curriculum) -> String {
    let mut out = String::new();
    for (i, stage) in c.stages.iter().enumerate() {
        out.push_str(&format!("stage {}: {}", i + 1, stage.rules.join(", ")));
        let o = stage.overrides;
        let mut opts = Vec::new();
        if let Some(e) = o.epochs {
            opts.push(format!("epochs={e}"));
        }
        if let Some(lr) = o.lr {
            opts.push(format!("lr={lr}"));
        }
        if let Some(r) = o.recall {
            opts.push(format!("recall={r}"));
        }
        if !opts.is_empty() {
            out.push_str(" @ ");
            out.push_str(&opts.join(", "));
        }
        out.push('\n');
    }
    out
}
