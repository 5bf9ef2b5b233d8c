//! Flag-value parsers: schedules, selection rules, and coordinate lists.

use std::fs;

use anyhow::{bail, Context, Result};

use feas_core::{SelectionRule, StepSchedule, TailRule, Vector};

/// `constant:<alpha>`, `harmonic:<c>`, `explicit:<path>`, or
/// `normalized:<inner>` (recursively).
pub fn parse_schedule(spec: &str) -> Result<StepSchedule> {
    let (kind, rest) = spec
        .split_once(':')
        .with_context(|| format!("schedule `{spec}` needs the form kind:argument"))?;
    Ok(match kind {
        "constant" => {
            let alpha: f64 = rest
                .parse()
                .with_context(|| format!("bad constant step `{rest}`"))?;
            StepSchedule::constant(alpha)?
        }
        "harmonic" => {
            let offset: f64 = rest
                .parse()
                .with_context(|| format!("bad harmonic offset `{rest}`"))?;
            StepSchedule::harmonic(offset)?
        }
        "explicit" => {
            let text = fs::read_to_string(rest)
                .with_context(|| format!("cannot read step file `{rest}`"))?;
            parse_explicit(&text)?
        }
        "normalized" => StepSchedule::normalized(parse_schedule(rest)?),
        other => bail!("unknown schedule kind `{other}`"),
    })
}

/// One step per line; a `#tail repeat_last` or `#tail zero` line declares
/// what happens after the list (default: error on exhaustion).
fn parse_explicit(text: &str) -> Result<StepSchedule> {
    let mut tail = TailRule::Error;
    let mut values = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(directive) = line.strip_prefix('#') {
            let directive = directive.trim();
            if let Some(rule) = directive.strip_prefix("tail") {
                tail = match rule.trim() {
                    "repeat_last" => TailRule::RepeatLast,
                    "zero" => TailRule::Zero,
                    other => bail!("line {}: unknown tail rule `{other}`", lineno + 1),
                };
            }
            continue;
        }
        let value: f64 = line
            .parse()
            .with_context(|| format!("line {}: bad step `{line}`", lineno + 1))?;
        values.push(value);
    }
    if values.is_empty() {
        bail!("explicit schedule has no steps");
    }
    Ok(StepSchedule::explicit(values, tail)?)
}

/// `first-violated`, `most-violated`, `cyclic`, or `random` (seeded).
pub fn parse_selection(name: &str, seed: u64) -> Result<SelectionRule> {
    Ok(match name {
        "first-violated" => SelectionRule::FirstViolated,
        "most-violated" => SelectionRule::MostViolated,
        "cyclic" => SelectionRule::Cyclic,
        "random" => SelectionRule::Random { seed },
        other => bail!(
            "unknown selection rule `{other}` (expected first-violated, most-violated, cyclic, or random)"
        ),
    })
}

/// Comma-separated coordinates, e.g. `-5` or `0.5,1.5,-2`.
pub fn parse_vector(spec: &str) -> Result<Vector> {
    let coords = spec
        .split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .with_context(|| format!("bad coordinate `{f}`"))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Vector::new(coords)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules_parse() {
        assert_eq!(
            parse_schedule("constant:1").unwrap(),
            StepSchedule::constant(1.0).unwrap()
        );
        assert_eq!(
            parse_schedule("harmonic:2").unwrap(),
            StepSchedule::harmonic(2.0).unwrap()
        );
        assert_eq!(
            parse_schedule("normalized:constant:0.5").unwrap(),
            StepSchedule::normalized(StepSchedule::constant(0.5).unwrap())
        );
        assert!(parse_schedule("constant:-1").is_err());
        assert!(parse_schedule("polynomial:2").is_err());
        assert!(parse_schedule("harmonic").is_err());
    }

    #[test]
    fn explicit_files_parse() {
        let sched = parse_explicit("#tail repeat_last\n0.5\n0.25\n").unwrap();
        assert_eq!(
            sched,
            StepSchedule::explicit(vec![0.5, 0.25], TailRule::RepeatLast).unwrap()
        );
        assert!(parse_explicit("#tail bounce\n1.0\n").is_err());
        assert!(parse_explicit("\n").is_err());
    }

    #[test]
    fn vectors_parse() {
        assert_eq!(
            parse_vector("0.5, 1.5,-2").unwrap().as_slice(),
            &[0.5, 1.5, -2.0]
        );
        assert!(parse_vector("a,b").is_err());
        assert!(parse_vector("").is_err());
    }
}
