//! Experiment files: flat `key = value` lines, `#` starts a comment.
//!
//! ```text
//! potential.kind = mathieu        # mathieu | zero | samples
//! potential.q_re = 0
//! potential.q_im = 0.25
//! initial = indicator(3pi/8, 5pi/8)
//! time.p = 1
//! time.q = 5
//! modes = 100
//! grid = 4096
//! outputs = decomposition_csv, spectrum_csv, plot_svg
//! sweep = i/4, i/2, 3i/4, i
//! ```
//!
//! Real values accept `pi` (`3pi/8`, `pi/2`); complex values accept a
//! trailing `i` (`0.25i`, `i/4`, `0.3+0.1i`).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Mathieu(Complex64),
    Zero,
    Samples(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Indicator(f64, f64),
    Sine(usize),
    Poly,
    Samples(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Output {
    Solution,
    Decomposition,
    Spectrum,
    Plot,
    Continuity,
}

impl Output {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "solution_csv" => Output::Solution,
            "decomposition_csv" => Output::Decomposition,
            "spectrum_csv" => Output::Spectrum,
            "plot_svg" => Output::Plot,
            "continuity_csv" => Output::Continuity,
            other => bail!("unknown output `{other}`"),
        })
    }

    pub fn file_name(self, prefix: &str) -> String {
        let (stem, ext) = match self {
            Output::Solution => ("solution", "csv"),
            Output::Decomposition => ("decomposition", "csv"),
            Output::Spectrum => ("spectrum", "csv"),
            Output::Plot => ("plot", "svg"),
            Output::Continuity => ("continuity", "csv"),
        };
        format!("{prefix}{stem}.{ext}")
    }
}

/// One Mathieu parameter of a sweep, with the text it was written as.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub label: String,
    pub q: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub potential: PotentialSpec,
    pub initial: InitialSpec,
    pub p: u64,
    pub q: u64,
    pub modes: usize,
    pub grid: usize,
    pub outputs: Vec<Output>,
    pub sweep: Vec<SweepEntry>,
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialSpec::Mathieu(q) => write!(f, "mathieu(q = {q})"),
            PotentialSpec::Zero => write!(f, "zero"),
            PotentialSpec::Samples(p) => write!(f, "samples({})", p.display()),
        }
    }
}

pub fn parse_real(s: &str) -> Result<f64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        bail!("empty number");
    }
    if let Some((num, den)) = s.split_once('/') {
        let d = parse_real(den)?;
        if d == 0.0 {
            bail!("division by zero in `{s}`");
        }
        return Ok(parse_real(num)? / d);
    }
    if let Some(coef) = s.strip_suffix("pi") {
        let coef = coef.trim_end_matches('*');
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c
                .parse::<f64>()
                .with_context(|| format!("bad number `{s}`"))?,
        };
        return Ok(c * PI);
    }
    s.parse::<f64>()
        .with_context(|| format!("bad number `{s}`"))
}

pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        bail!("empty number");
    }
    if let Some((num, den)) = s.rsplit_once('/') {
        let d = parse_real(den)?;
        if d == 0.0 {
            bail!("division by zero in `{s}`");
        }
        return Ok(parse_complex(num)? / d);
    }
    // split "a+bi" at the last sign that is not leading and not an exponent
    let bytes = s.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    if let Some(k) = split {
        if s.ends_with('i') && !s.ends_with("pi") {
            return Ok(Complex64::new(parse_real(&s[..k])?, imaginary(&s[k..])?));
        }
    }
    if s.ends_with('i') && !s.ends_with("pi") {
        return Ok(Complex64::new(0.0, imaginary(&s)?));
    }
    Ok(Complex64::new(parse_real(&s)?, 0.0))
}

fn imaginary(s: &str) -> Result<f64> {
    let coef = s
        .strip_suffix('i')
        .expect("checked by caller")
        .trim_end_matches('*');
    match coef {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        c => parse_real(c),
    }
}

fn parse_initial(s: &str, samples: Option<&str>, base: &Path) -> Result<InitialSpec> {
    let s = s.trim();
    let call = |name: &str| -> Option<&str> {
        s.strip_prefix(name)
            .map(str::trim_start)
            .and_then(|r| r.strip_prefix('('))
            .and_then(|r| r.strip_suffix(')'))
    };
    if let Some(args) = call("indicator") {
        let (a, b) = args
            .split_once(',')
            .ok_or_else(|| anyhow!("indicator needs two bounds, got `{s}`"))?;
        let (a, b) = (parse_real(a)?, parse_real(b)?);
        if !(0.0 <= a && a < b && b <= PI + 1e-15) {
            bail!("indicator bounds must satisfy 0 <= a < b <= pi, got {a}, {b}");
        }
        return Ok(InitialSpec::Indicator(a, b.min(PI)));
    }
    if let Some(arg) = call("sine") {
        let j: usize = arg
            .trim()
            .parse()
            .with_context(|| format!("bad mode index in `{s}`"))?;
        if j == 0 {
            bail!("sine mode index must be positive");
        }
        return Ok(InitialSpec::Sine(j));
    }
    match s {
        "poly" => Ok(InitialSpec::Poly),
        "samples_file" => {
            let path = samples
                .ok_or_else(|| anyhow!("initial = samples_file needs initial.samples_file"))?;
            Ok(InitialSpec::Samples(base.join(path)))
        }
        other => bail!("unknown initial data `{other}`"),
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base).with_context(|| format!("in {}", path.display()))
    }

    /// Parses config text; relative file names resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", n + 1))?;
            let k = k.trim().to_string();
            if kv.insert(k.clone(), v.trim().to_string()).is_some() {
                bail!("line {}: duplicate key `{k}`", n + 1);
            }
        }
        let mut take = |k: &str| kv.remove(k);

        let kind = take("potential.kind").unwrap_or_else(|| "mathieu".into());
        let q_re = take("potential.q_re")
            .map(|s| parse_real(&s))
            .transpose()?
            .unwrap_or(0.0);
        let q_im = take("potential.q_im")
            .map(|s| parse_real(&s))
            .transpose()?
            .unwrap_or(0.0);
        let v_samples = take("potential.samples_file");
        let potential = match kind.as_str() {
            "mathieu" => PotentialSpec::Mathieu(Complex64::new(q_re, q_im)),
            "zero" => PotentialSpec::Zero,
            "samples" => PotentialSpec::Samples(base.join(v_samples.ok_or_else(|| {
                anyhow!("potential.kind = samples needs potential.samples_file")
            })?)),
            other => bail!("unknown potential kind `{other}`"),
        };

        let initial_text = take("initial").ok_or_else(|| anyhow!("missing key `initial`"))?;
        let f_samples = take("initial.samples_file");
        let initial = parse_initial(&initial_text, f_samples.as_deref(), base)?;

        let int = |v: Option<String>, name: &str, default: Option<u64>| -> Result<u64> {
            match v {
                Some(s) => s
                    .trim()
                    .parse::<u64>()
                    .with_context(|| format!("`{name}` must be a nonnegative integer")),
                None => default.ok_or_else(|| anyhow!("missing key `{name}`")),
            }
        };
        let p = int(take("time.p"), "time.p", None)?;
        let q = int(take("time.q"), "time.q", None)?;
        if p == 0 || q == 0 {
            bail!("time.p and time.q must be positive");
        }
        let modes = int(take("modes"), "modes", Some(100))? as usize;
        if modes == 0 {
            bail!("modes must be positive");
        }
        let grid = int(take("grid"), "grid", Some(4096))? as usize;

        let mut outputs = match take("outputs") {
            Some(s) => s
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(Output::parse)
                .collect::<Result<Vec<_>>>()?,
            None => vec![Output::Decomposition, Output::Spectrum, Output::Plot],
        };
        outputs.sort();
        outputs.dedup();

        let sweep = match take("sweep") {
            Some(s) => {
                if !matches!(potential, PotentialSpec::Mathieu(_)) {
                    bail!("sweep applies to the Mathieu potential only");
                }
                s.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|t| {
                        Ok(SweepEntry {
                            label: t.to_string(),
                            q: parse_complex(t)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            None => Vec::new(),
        };

        if let Some(k) = kv.keys().next() {
            bail!("unknown key `{k}`");
        }
        Ok(ExperimentConfig {
            potential,
            initial,
            p,
            q,
            modes,
            grid,
            outputs,
            sweep,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_real("3pi/8").unwrap(), 3.0 * PI / 8.0);
        assert_eq!(parse_real("pi").unwrap(), PI);
        assert_eq!(parse_real("-2.5e-1").unwrap(), -0.25);
        assert_eq!(parse_complex("i/4").unwrap(), c(0.0, 0.25));
        assert_eq!(parse_complex("3i/4").unwrap(), c(0.0, 0.75));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("0.25i").unwrap(), c(0.0, 0.25));
        assert_eq!(parse_complex("0.3+0.1i").unwrap(), c(0.3, 0.1));
        assert_eq!(parse_complex("0.3 - i").unwrap(), c(0.3, -1.0));
        assert_eq!(parse_complex("1e-3").unwrap(), c(1e-3, 0.0));
        assert!(parse_real("abc").is_err());
        assert!(parse_complex("").is_err());
        assert!(parse_real("1/0").is_err());
    }

    #[test]
    fn full_config() {
        let text = "\
# figure 1(a)
potential.kind = mathieu
potential.q_im = 0.25
initial = indicator(3pi/8, 5pi/8)   # the step
time.p = 1
time.q = 5
outputs = decomposition_csv, continuity_csv
sweep = i/4, i/2
";
        let cfg = ExperimentConfig::parse(text, Path::new(".")).unwrap();
        assert_eq!(cfg.potential, PotentialSpec::Mathieu(c(0.0, 0.25)));
        assert_eq!(
            cfg.initial,
            InitialSpec::Indicator(3.0 * PI / 8.0, 5.0 * PI / 8.0)
        );
        assert_eq!((cfg.p, cfg.q, cfg.modes, cfg.grid), (1, 5, 100, 4096));
        assert_eq!(cfg.outputs, vec![Output::Decomposition, Output::Continuity]);
        assert_eq!(cfg.sweep.len(), 2);
        assert_eq!(cfg.sweep[1].q, c(0.0, 0.5));
    }

    #[test]
    fn rejects_bad_configs() {
        let base = "initial = poly\ntime.p = 1\ntime.q = 1\n";
        let bad = [
            "initial = indicator(2, 1)\ntime.p = 1\ntime.q = 1\n",
            "initial = indicator(0, 4)\ntime.p = 1\ntime.q = 1\n",
            "initial = sine(0)\ntime.p = 1\ntime.q = 1\n",
            "initial = poly\ntime.p = 0\ntime.q = 1\n",
            "initial = poly\ntime.p = 1\n",
            "initial = poly\ntime.p = 1\ntime.q = 1\nbogus = 3\n",
            "initial = poly\ntime.p = 1\ntime.q = 1\ntime.q = 2\n",
            "initial = poly\ntime.p = 1\ntime.q = 1\noutputs = movie\n",
            "initial = poly\ntime.p = 1\ntime.q = 1\npotential.kind = zero\nsweep = i\n",
            "initial = poly\ntime.p = 1\ntime.q = 1\npotential.kind = samples\n",
            "just text\n",
        ];
        assert!(ExperimentConfig::parse(base, Path::new(".")).is_ok());
        for text in bad {
            assert!(
                ExperimentConfig::parse(text, Path::new(".")).is_err(),
                "{text}"
            );
        }
    }
}
