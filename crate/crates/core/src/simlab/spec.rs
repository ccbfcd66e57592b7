//! Experiment specifications and parameter grids.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::fmt_f64;

/// Default rate-1/16 `C0` for the trellis pipeline (constraint length 8).
pub const DEFAULT_TCQ_G0: &str = "247,371,323,211,357,265,335,313,233,257,275,345,367,217,305,363";
/// Default rate-1/2 `C1` for the trellis pipeline (constraint length 8).
pub const DEFAULT_TCQ_G1: &str = "247,371";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Rates,
    Wz,
    WzGaussian,
    Dpc,
    Tcq,
    Oracle,
}

impl Mode {
    pub const ALL: [Mode; 6] = [Mode::Rates, Mode::Wz, Mode::WzGaussian, Mode::Dpc, Mode::Tcq, Mode::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Rates => "rates",
            Mode::Wz => "wz",
            Mode::WzGaussian => "wz-gaussian",
            Mode::Dpc => "dpc",
            Mode::Tcq => "tcq",
            Mode::Oracle => "oracle",
        }
    }

    /// Grid parameters accepted by this mode, in column order.
    pub fn params(self) -> &'static [ParamSpec] {
        use ParamKind::*;
        const fn req(name: &'static str, kind: ParamKind) -> ParamSpec {
            ParamSpec { name, kind, default: ParamDefault::Required }
        }
        const fn opt(name: &'static str, kind: ParamKind) -> ParamSpec {
            ParamSpec { name, kind, default: ParamDefault::Absent }
        }
        const fn num(name: &'static str, v: f64) -> ParamSpec {
            ParamSpec { name, kind: Num, default: ParamDefault::Num(v) }
        }
        const fn int(name: &'static str, v: f64) -> ParamSpec {
            ParamSpec { name, kind: Int, default: ParamDefault::Num(v) }
        }
        const fn flag(name: &'static str, v: bool) -> ParamSpec {
            ParamSpec { name, kind: Bool, default: ParamDefault::Bool(v) }
        }
        const fn text(name: &'static str, v: &'static str) -> ParamSpec {
            ParamSpec { name, kind: Str, default: ParamDefault::Str(v) }
        }
        const RATES: &[ParamSpec] = &[int("l", 1.0), req("p", Num), opt("q", Num), req("d", Num)];
        const WZ: &[ParamSpec] = &[
            int("l", 1.0),
            req("n", Int),
            req("p", Num),
            opt("q", Num),
            req("d", Num),
            req("r0", Num),
            req("r1", Num),
            flag("redraw", true),
        ];
        const ORACLE: &[ParamSpec] = &[
            int("l", 1.0),
            req("n", Int),
            req("p", Num),
            opt("q", Num),
            req("d", Num),
            req("r0", Num),
            req("r1", Num),
        ];
        const GAUSSIAN: &[ParamSpec] = &[
            req("n", Int),
            num("py", 1.0),
            num("pz", 1.0),
            req("d", Num),
            req("q", Num),
            opt("p0", Num),
            req("r0", Num),
            req("r1", Num),
            num("slack", crate::wz::DEFAULT_GAUSSIAN_SLACK),
            flag("redraw", true),
        ];
        const DPC: &[ParamSpec] = &[
            req("n", Int),
            req("p", Num),
            req("w", Num),
            opt("q", Num),
            req("r0", Num),
            req("r1", Num),
            flag("redraw", true),
        ];
        const TCQ: &[ParamSpec] = &[
            req("n", Int),
            req("p", Num),
            req("d", Num),
            text("g0", DEFAULT_TCQ_G0),
            int("k0", 8.0),
            text("g1", DEFAULT_TCQ_G1),
            int("k1", 8.0),
        ];
        match self {
            Mode::Rates => RATES,
            Mode::Wz => WZ,
            Mode::WzGaussian => GAUSSIAN,
            Mode::Dpc => DPC,
            Mode::Tcq => TCQ,
            Mode::Oracle => ORACLE,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::param("mode", format!("unknown mode `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Num,
    Int,
    Bool,
    Str,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamDefault {
    Required,
    /// Optional with a mode-specific derived value.
    Absent,
    Num(f64),
    Bool(bool),
    Str(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub default: ParamDefault,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridValue {
    Bool(bool),
    Num(f64),
    Str(String),
}

impl GridValue {
    fn kind_ok(&self, kind: ParamKind) -> bool {
        match (self, kind) {
            (GridValue::Num(_), ParamKind::Num) => true,
            (GridValue::Num(v), ParamKind::Int) => v.fract() == 0.0 && *v >= 0.0 && *v <= u32::MAX as f64,
            (GridValue::Bool(_), ParamKind::Bool) => true,
            (GridValue::Str(_), ParamKind::Str) => true,
            _ => false,
        }
    }

    pub fn render(&self) -> String {
        match self {
            GridValue::Bool(b) => b.to_string(),
            GridValue::Num(v) => fmt_f64(*v),
            GridValue::Str(s) => s.clone(),
        }
    }
}

impl From<f64> for GridValue {
    fn from(v: f64) -> Self {
        GridValue::Num(v)
    }
}

impl From<bool> for GridValue {
    fn from(v: bool) -> Self {
        GridValue::Bool(v)
    }
}

impl From<&str> for GridValue {
    fn from(v: &str) -> Self {
        GridValue::Str(v.to_string())
    }
}

/// A grid axis: a single value or a list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    One(GridValue),
    Many(Vec<GridValue>),
}

impl Axis {
    pub fn values(&self) -> &[GridValue] {
        match self {
            Axis::One(v) => std::slice::from_ref(v),
            Axis::Many(v) => v,
        }
    }
}

impl<T: Into<GridValue>> From<Vec<T>> for Axis {
    fn from(v: Vec<T>) -> Self {
        Axis::Many(v.into_iter().map(Into::into).collect())
    }
}

fn default_trials() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub mode: Mode,
    pub grid: BTreeMap<String, Axis>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            grid: BTreeMap::new(),
            trials: 1,
            seed: 0,
            out: None,
        }
    }

    pub fn set(mut self, key: &str, axis: impl Into<Axis>) -> Self {
        self.grid.insert(key.to_string(), axis.into());
        self
    }

    pub fn trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::Parse(format!("experiment spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization cannot fail")
    }

    /// Checks trials, key names, value types and grid non-emptiness.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::param("trials", "must be at least 1"));
        }
        let params = self.mode.params();
        for (key, axis) in &self.grid {
            let Some(spec) = params.iter().find(|p| p.name == key) else {
                let known: Vec<_> = params.iter().map(|p| p.name).collect();
                return Err(Error::param(
                    format!("grid.{key}"),
                    format!("not a parameter of mode {} (expected one of {})", self.mode, known.join(", ")),
                ));
            };
            if axis.values().is_empty() {
                return Err(Error::param(format!("grid.{key}"), "empty list"));
            }
            for v in axis.values() {
                if !v.kind_ok(spec.kind) {
                    let want = match spec.kind {
                        ParamKind::Num => "a number",
                        ParamKind::Int => "a non-negative integer",
                        ParamKind::Bool => "a boolean",
                        ParamKind::Str => "a string",
                    };
                    return Err(Error::param(format!("grid.{key}"), format!("expected {want}, got {}", v.render())));
                }
            }
        }
        for p in params {
            if p.default == ParamDefault::Required && !self.grid.contains_key(p.name) {
                return Err(Error::param(format!("grid.{}", p.name), format!("required by mode {}", self.mode)));
            }
        }
        Ok(())
    }

    /// Cartesian product of the grid; the first parameter varies slowest.
    pub fn expand(&self) -> Result<Vec<GridPoint>> {
        self.validate()?;
        let params = self.mode.params();
        let axes: Vec<Vec<Option<GridValue>>> = params
            .iter()
            .map(|p| match (self.grid.get(p.name), p.default) {
                (Some(axis), _) => axis.values().iter().cloned().map(Some).collect(),
                (None, ParamDefault::Num(v)) => vec![Some(GridValue::Num(v))],
                (None, ParamDefault::Bool(v)) => vec![Some(GridValue::Bool(v))],
                (None, ParamDefault::Str(v)) => vec![Some(GridValue::Str(v.into()))],
                (None, _) => vec![None],
            })
            .collect();
        let total: usize = axes.iter().map(Vec::len).product();
        let mut points = Vec::with_capacity(total);
        for index in 0..total {
            let mut rest = index;
            let mut values = vec![None; params.len()];
            for (k, axis) in axes.iter().enumerate().rev() {
                values[k] = axis[rest % axis.len()].clone();
                rest /= axis.len();
            }
            points.push(GridPoint {
                index,
                names: params.iter().map(|p| p.name).collect(),
                values,
            });
        }
        Ok(points)
    }
}

/// One resolved grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    names: Vec<&'static str>,
    values: Vec<Option<GridValue>>,
}

impl GridPoint {
    fn get(&self, name: &str) -> Option<&GridValue> {
        self.names
            .iter()
            .position(|n| *n == name)
            .and_then(|k| self.values[k].as_ref())
    }

    pub fn num(&self, name: &str) -> Option<f64> {
        match self.get(name) {
            Some(GridValue::Num(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn req(&self, name: &str) -> Result<f64> {
        self.num(name).ok_or_else(|| Error::param(name, "missing"))
    }

    pub fn int(&self, name: &str) -> Result<usize> {
        Ok(self.req(name)? as usize)
    }

    pub fn flag(&self, name: &str) -> bool {
        matches!(self.get(name), Some(GridValue::Bool(true)))
    }

    pub fn text(&self, name: &str) -> Result<&str> {
        match self.get(name) {
            Some(GridValue::Str(s)) => Ok(s),
            _ => Err(Error::param(name, "missing")),
        }
    }

    /// `(name, rendered value)` pairs in column order; absent optionals render empty.
    pub fn columns(&self) -> Vec<(String, String)> {
        self.names
            .iter()
            .zip(&self.values)
            .map(|(n, v)| (n.to_string(), v.as_ref().map(GridValue::render).unwrap_or_default()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_expands() {
        let spec = ExperimentSpec::from_json(
            r#"{"mode": "wz", "grid": {"n": [8, 12], "p": 0.2, "d": [0.1], "r0": [0.1, 0.12, 0.14], "r1": 0.5},
                "trials": 10, "seed": 7, "out": "x.csv"}"#,
        )
        .unwrap();
        assert_eq!(spec.mode, Mode::Wz);
        assert_eq!(spec.trials, 10);
        let pts = spec.expand().unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0].int("n").unwrap(), 8);
        assert_eq!(pts[1].num("r0"), Some(0.12));
        assert_eq!(pts[3].int("n").unwrap(), 12);
        assert_eq!(pts[5].index, 5);
        assert_eq!(pts[0].num("l"), Some(1.0));
        assert_eq!(pts[0].num("q"), None);
        assert!(pts[0].flag("redraw"));
        let cols = pts[0].columns();
        assert_eq!(cols[0], ("l".into(), "1".into()));
        assert_eq!(cols[3], ("q".into(), "".into()));
    }

    #[test]
    fn reports_offending_keys() {
        let err = ExperimentSpec::from_json(r#"{"mode": "rates", "grid": {"p": 0.2, "d": 0.1}, "trails": 3}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("trails"), "{err}");
        let err = ExperimentSpec::from_json(r#"{"mode": "rates", "grid": {"p": 0.2, "d": 0.1, "dd": 1}}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("grid.dd"), "{err}");
        let err = ExperimentSpec::from_json(r#"{"mode": "rates", "grid": {"p": 0.2}}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("grid.d"), "{err}");
        let err = ExperimentSpec::from_json(r#"{"mode": "wz", "grid": {"n": 2.5, "p": 0.2, "d": 0.1, "r0": 0, "r1": 0}}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("grid.n"), "{err}");
        let err = ExperimentSpec::from_json(r#"{"mode": "rates", "grid": {"p": [], "d": 0.1}}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("grid.p"), "{err}");
        let err = ExperimentSpec::from_json(r#"{"mode": "rates", "grid": {"p": 0.1, "d": 0.1}, "trials": 0}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("trials"), "{err}");
        assert!(ExperimentSpec::from_json(r#"{"mode": "nope", "grid": {}}"#).is_err());
    }

    #[test]
    fn json_round_trip() {
        let spec = ExperimentSpec::new(Mode::Tcq)
            .set("n", vec![1000.0])
            .set("p", vec![0.25])
            .set("d", vec![0.1])
            .set("g1", vec!["133,171"])
            .trials(3)
            .seed(u64::MAX);
        let back = ExperimentSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.expand().unwrap()[0].text("g1").unwrap(), "133,171");
        assert_eq!(back.expand().unwrap()[0].text("g0").unwrap(), DEFAULT_TCQ_G0);
    }

    #[test]
    fn mode_names() {
        for m in Mode::ALL {
            assert_eq!(m.name().parse::<Mode>().unwrap(), m);
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(json, format!("\"{}\"", m.name()));
        }
    }
}
