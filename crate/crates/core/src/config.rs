//! Problem files.
//!
//! A flat `key = value` format with three sections:
//!
//! ```text
//! # comment
//! [problem]
//! alpha = 3/2          # numbers may be constant expressions
//! psi = 3*t^2
//! f = exp(-t)*sin(x)
//! ...
//! [constants]          # optional; missing values are estimated
//! L1 = 1/75
//! [solver]             # optional
//! grid_n = 200
//! ```

use std::collections::HashMap;
use std::path::Path;

use crate::bvp::{
    estimate_constants, BvpProblem, ConstantSet, Omega0Convention, Provenance, SolverOptions,
    DEFAULT_BOX_RADIUS, DEFAULT_SAMPLE_GRID,
};
use crate::calculus::FracOrder;
use crate::expr::{parse, Expr};
use crate::psi::{PsiSpec, DEFAULT_VALIDATION_SAMPLES};
use crate::{Error, Result};

pub const EXAMPLE_4_1: &str = include_str!("../configs/example-4-1.cfg");
pub const EXAMPLE_4_2: &str = include_str!("../configs/example-4-2.cfg");

/// Bundled configs by file name.
pub fn bundled(name: &str) -> Option<&'static str> {
    match name {
        "example-4-1.cfg" => Some(EXAMPLE_4_1),
        "example-4-2.cfg" => Some(EXAMPLE_4_2),
        _ => None,
    }
}

const PROBLEM_KEYS: [&str; 9] = ["alpha", "beta", "eta", "xi", "lambda", "mu", "psi", "f", "g"];
const CONSTANT_KEYS: [&str; 8] = ["L1", "L2", "k0", "k1", "k2", "l0", "l1", "l2"];
const SOLVER_KEYS: [&str; 5] = ["grid_n", "quad_n", "tol", "max_iter", "omega0_convention"];

/// User-supplied constants; `None` where the file is silent.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialConstants {
    pub lipschitz_f: Option<f64>,
    pub lipschitz_g: Option<f64>,
    pub growth_f: [Option<f64>; 3],
    pub growth_g: [Option<f64>; 3],
}

impl PartialConstants {
    fn all(&self) -> impl Iterator<Item = Option<f64>> + '_ {
        [self.lipschitz_f, self.lipschitz_g]
            .into_iter()
            .chain(self.growth_f)
            .chain(self.growth_g)
    }

    pub fn is_complete(&self) -> bool {
        self.all().all(|v| v.is_some())
    }

    pub fn is_empty(&self) -> bool {
        self.all().all(|v| v.is_none())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub problem: BvpProblem,
    pub constants: PartialConstants,
    pub options: SolverOptions,
    pub convention: Omega0Convention,
}

impl ProblemConfig {
    /// Supplied constants, with the missing ones (and `M1`, `M2`, which the
    /// format does not carry) filled in by sampling.
    pub fn resolve_constants(&self) -> Result<ConstantSet> {
        let mut est = estimate_constants(&self.problem, DEFAULT_SAMPLE_GRID, DEFAULT_BOX_RADIUS)?;
        let given = &self.constants;
        let pick = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        pick(&mut est.lipschitz_f, given.lipschitz_f);
        pick(&mut est.lipschitz_g, given.lipschitz_g);
        for i in 0..3 {
            pick(&mut est.growth_f[i], given.growth_f[i]);
            pick(&mut est.growth_g[i], given.growth_g[i]);
        }
        if given.is_complete() {
            est.provenance = Provenance::UserSupplied;
            est.warnings.clear();
        } else if !given.is_empty() {
            est.provenance = Provenance::Mixed;
            let missing: Vec<&str> = CONSTANT_KEYS
                .iter()
                .zip(given.all())
                .filter(|(_, v)| v.is_none())
                .map(|(k, _)| *k)
                .collect();
            est.warnings = vec![format!(
                "{} estimated by sampling (lower bounds only)",
                missing.join(", ")
            )];
        }
        est.validate()?;
        Ok(est)
    }
}

/// Reads `path`; a missing file whose name is a bundled config falls back
/// to the bundled copy.
pub fn load_config(path: &Path) -> Result<ProblemConfig> {
    match std::fs::read_to_string(path) {
        Ok(text) => parse_config(&text),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
            match bundled(name) {
                Some(text) if path.parent().is_none_or(|p| p.as_os_str().is_empty()) => {
                    parse_config(text)
                }
                _ => Err(e.into()),
            }
        }
        Err(e) => Err(e.into()),
    }
}

struct Entry {
    line: usize,
    value: String,
}

pub fn parse_config(text: &str) -> Result<ProblemConfig> {
    let mut section: Option<&str> = None;
    let mut entries: HashMap<(&str, String), Entry> = HashMap::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| config_err(line, "unterminated section header"))?
                .trim();
            section = Some(match name {
                "problem" => "problem",
                "constants" => "constants",
                "solver" => "solver",
                other => return Err(config_err(line, format!("unknown section [{other}]"))),
            });
            continue;
        }
        let sec = section.ok_or_else(|| config_err(line, "key outside of any section"))?;
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| config_err(line, "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        let allowed: &[&str] = match sec {
            "problem" => &PROBLEM_KEYS,
            "constants" => &CONSTANT_KEYS,
            _ => &SOLVER_KEYS,
        };
        if !allowed.contains(&key) {
            return Err(config_err(line, format!("unknown key `{key}` in [{sec}]")));
        }
        if value.is_empty() {
            return Err(config_err(line, format!("empty value for `{key}`")));
        }
        let entry = Entry {
            line,
            value: value.to_string(),
        };
        if let Some(prev) = entries.insert((sec, key.to_string()), entry) {
            return Err(config_err(line, format!("duplicate key `{key}` (first on line {})", prev.line)));
        }
    }

    let get = |sec: &'static str, key: &str| entries.get(&(sec, key.to_string()));
    let required = |key: &str| {
        get("problem", key).ok_or_else(|| Error::Validation(format!("missing [problem] key `{key}`")))
    };
    let number = |e: &Entry| -> Result<f64> { constant_value(e) };
    let order = |key: &str| -> Result<FracOrder> {
        let v = number(required(key)?)?;
        FracOrder::new(v).map_err(|_| Error::Validation(format!("{key} must lie in (1,2), got {v}")))
    };

    let psi_entry = required("psi")?;
    let psi = PsiSpec::parse(&psi_entry.value).map_err(|e| located(e, psi_entry.line))?;
    let report = psi.validate(DEFAULT_VALIDATION_SAMPLES);
    if !report.passed() {
        return Err(Error::Validation(format!(
            "psi = {} is not admissible: {}",
            psi_entry.value,
            report.violations.join("; ")
        )));
    }
    let rhs = |key: &str| -> Result<Expr> {
        let e = required(key)?;
        parse(&e.value).map_err(|err| located(err, e.line))
    };

    let problem = BvpProblem {
        alpha: order("alpha")?,
        beta: order("beta")?,
        eta: number(required("eta")?)?,
        xi: number(required("xi")?)?,
        lambda: number(required("lambda")?)?,
        mu: number(required("mu")?)?,
        f: rhs("f")?,
        g: rhs("g")?,
        psi,
    };
    problem.validate()?;

    let constant = |key: &str| -> Result<Option<f64>> {
        match get("constants", key) {
            None => Ok(None),
            Some(e) => {
                let v = number(e)?;
                if v < 0.0 {
                    return Err(config_err(e.line, format!("{key} must be non-negative")));
                }
                Ok(Some(v))
            }
        }
    };
    let constants = PartialConstants {
        lipschitz_f: constant("L1")?,
        lipschitz_g: constant("L2")?,
        growth_f: [constant("k0")?, constant("k1")?, constant("k2")?],
        growth_g: [constant("l0")?, constant("l1")?, constant("l2")?],
    };

    let mut options = SolverOptions::default();
    let count = |key: &str, default: usize| -> Result<usize> {
        match get("solver", key) {
            None => Ok(default),
            Some(e) => {
                let v = number(e)?;
                if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
                    return Err(config_err(e.line, format!("{key} must be a non-negative integer")));
                }
                Ok(v as usize)
            }
        }
    };
    options.grid_n = count("grid_n", options.grid_n)?;
    options.quad_n = count("quad_n", options.quad_n)?;
    options.max_iter = count("max_iter", options.max_iter)?;
    if let Some(e) = get("solver", "tol") {
        options.tol = number(e)?;
    }
    options.validate().map_err(|e| Error::Validation(e.to_string()))?;
    let convention = match get("solver", "omega0_convention") {
        None => Omega0Convention::default(),
        Some(e) => e.value.parse().map_err(|err: Error| config_err(e.line, err.to_string()))?,
    };

    Ok(ProblemConfig {
        problem,
        constants,
        options,
        convention,
    })
}

fn config_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config {
        line,
        msg: msg.into(),
    }
}

fn located(err: Error, line: usize) -> Error {
    config_err(line, err.to_string())
}

fn constant_value(e: &Entry) -> Result<f64> {
    let expr = parse(&e.value).map_err(|err| located(err, e.line))?;
    let v = expr.eval_constant().map_err(|err| located(err, e.line))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(e.line, format!("value `{}` is not finite", e.value)))
    }
}
