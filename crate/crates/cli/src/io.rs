use std::fmt::Write as _;
use std::path::Path;

use freeconv::catalog::{MeasureSpec, GRID_MASS_TOL};
use freeconv::idclass::FreeTriplet;
use freeconv::{Error, Rational, SeqKind, SeqN};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

/// A failed run, split by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable or invalid input: exit 2.
    Usage(anyhow::Error),
    /// The computation itself failed: exit 1.
    Compute(anyhow::Error),
}

impl Failure {
    pub fn usage(msg: impl std::fmt::Display) -> Self {
        Failure::Usage(anyhow::anyhow!("{msg}"))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Compute(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(e) | Failure::Compute(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownLaw(_)
            | Error::ParamDomain { .. }
            | Error::OrderTooLarge { .. }
            | Error::InvalidMeasure(_)
            | Error::InvalidArgument(_)
            | Error::NotSymmetric { .. }
            | Error::Unsupported(_)
            | Error::RealArgument(_) => Failure::Usage(e.into()),
            _ => Failure::Compute(e.into()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(anyhow::anyhow!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(anyhow::anyhow!("{}: not a valid {what}: {e}", path.display())))
}

/// Read and validate a measure spec; mass off by more than `1e-6` is rejected.
pub fn read_measure(path: &Path) -> CliResult<MeasureSpec> {
    let spec: MeasureSpec = read_json(path, "measure spec")?;
    spec.validate(GRID_MASS_TOL)
        .map_err(|e| Failure::Usage(anyhow::anyhow!("{}: {e}", path.display())))?;
    Ok(spec)
}

pub fn read_triplet(path: &Path) -> CliResult<FreeTriplet> {
    let t: FreeTriplet = read_json(path, "Lévy triplet")?;
    t.validate().map_err(|e| Failure::Usage(anyhow::anyhow!("{}: {e}", path.display())))?;
    Ok(t)
}

/// A triplet file, or a catalog law with a closed-form triplet.
pub fn read_triplet_or_law(path: &Path) -> CliResult<FreeTriplet> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(anyhow::anyhow!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(anyhow::anyhow!("{}: invalid JSON: {e}", path.display())))?;
    if value.get("type").is_some() {
        match read_measure(path)? {
            MeasureSpec::Law { name, params, push } if push.is_empty() => Ok(FreeTriplet::for_law(&name, &params)?),
            other => Err(Failure::usage(format!(
                "{}: a {} spec has no Lévy triplet; pass a triplet file",
                path.display(),
                other.kind_name()
            ))),
        }
    } else {
        read_triplet(path)
    }
}

/// `%.12g`-style rendering: 12 significant digits, `.` decimal point.
pub fn fmt_g(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    // rounding can bump the exponent; trust the formatter's
    let (mant, e) = sci.split_once('e').expect("exponent");
    let e: i32 = e.parse().expect("exponent digits");
    if (-4..DIGITS).contains(&e) {
        let decimals = (DIGITS - 1 - e).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim(mant), if e < 0 { "-" } else { "+" }, e.abs())
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn kind_name(kind: SeqKind) -> &'static str {
    match kind {
        SeqKind::Moment => "moment",
        SeqKind::FreeCumulant => "free_cumulant",
        SeqKind::BooleanCumulant => "boolean_cumulant",
    }
}

pub fn seq_json(s: &SeqN<f64>) -> Value {
    json!({ "kind": kind_name(s.kind), "values": s.values })
}

/// Exact values as `"p/q"` strings.
pub fn seq_json_exact(s: &SeqN<Rational>) -> Value {
    let values: Vec<String> = s.values.iter().map(|v| v.to_string()).collect();
    json!({ "kind": kind_name(s.kind), "exact": true, "values": values })
}

pub fn seq_csv(s: &SeqN<f64>) -> String {
    let mut out = format!("n,{}\n", kind_name(s.kind));
    for (i, v) in s.values.iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, fmt_g(*v));
    }
    out
}

pub fn density_csv(xs: &[f64], densities: &[f64]) -> String {
    let mut out = String::from("x,density\n");
    for (x, d) in xs.iter().zip(densities) {
        let _ = writeln!(out, "{},{}", fmt_g(*x), fmt_g(*d));
    }
    out
}

/// `lo:hi:n` with `n ≥ 2` points.
pub fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Failure::usage(format!("grid `{s}` is not lo:hi:n"));
    let [lo, hi, n] = parts.as_slice() else { return Err(bad()) };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(lo < hi) || n < 2 || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    Ok(freeconv::transforms::linspace(lo, hi, n))
}

/// `lo:hi:step`, inclusive of `hi` up to rounding.
pub fn parse_range(s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Failure::usage(format!("range `{s}` is not lo:hi:step"));
    let [lo, hi, step] = parts.as_slice() else { return Err(bad()) };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let step: f64 = step.trim().parse().map_err(|_| bad())?;
    if !(lo <= hi) || !(step > 0.0) || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(Failure::usage(format!("range `{s}` has {count} points")));
    }
    Ok((0..count).map(|k| lo + k as f64 * step).collect())
}

/// `re,im`.
pub fn parse_complex(s: &str) -> CliResult<num_complex::Complex64> {
    let bad = || Failure::usage(format!("point `{s}` is not re,im"));
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    Ok(num_complex::Complex64::new(
        re.trim().parse().map_err(|_| bad())?,
        im.trim().parse().map_err(|_| bad())?,
    ))
}
