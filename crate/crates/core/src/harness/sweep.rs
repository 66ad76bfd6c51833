//! Policy sweeps over scenario parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::harness::experiment::{Experiment, Variant};
use crate::harness::HarnessError;
use crate::reconcile::StrategyTag;

/// One sweep dimension and its grid values.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    Gamma(Vec<f64>),
    OmegaScale(Vec<f64>),
    /// Explicit per-level monitoring probabilities.
    Omega(Vec<Vec<f64>>),
    Anchors(Vec<Vec<f64>>),
    TaskOrder(Vec<Vec<usize>>),
}

impl SweepAxis {
    fn len(&self) -> usize {
        match self {
            SweepAxis::Gamma(v) | SweepAxis::OmegaScale(v) => v.len(),
            SweepAxis::Omega(v) | SweepAxis::Anchors(v) => v.len(),
            SweepAxis::TaskOrder(v) => v.len(),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            SweepAxis::Gamma(_) => "gamma",
            SweepAxis::OmegaScale(_) => "omega-scale",
            SweepAxis::Omega(_) => "omega",
            SweepAxis::Anchors(_) => "anchors",
            SweepAxis::TaskOrder(_) => "task-order",
        }
    }

    fn apply(&self, i: usize, v: &mut Variant) -> String {
        fn list<T: fmt::Display>(xs: &[T]) -> String {
            xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        match self {
            SweepAxis::Gamma(g) => {
                v.gamma = Some(g[i]);
                g[i].to_string()
            }
            SweepAxis::OmegaScale(s) => {
                v.omega_scale = Some(s[i]);
                s[i].to_string()
            }
            SweepAxis::Omega(w) => {
                v.omega = Some(w[i].clone());
                list(&w[i])
            }
            SweepAxis::Anchors(a) => {
                v.anchors = Some(a[i].clone());
                list(&a[i])
            }
            SweepAxis::TaskOrder(o) => {
                v.order = Some(o[i].clone());
                list(&o[i])
            }
        }
    }
}

/// Parses `name=values`, where scalar axes take comma-separated numbers and
/// vector axes take `;`-separated comma lists, e.g.
/// `gamma=0.8,0.9` or `anchors=0,0.26,0.51,0.76;0,0.3,0.5,0.8`.
impl FromStr for SweepAxis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (name, values) = s
            .split_once('=')
            .ok_or_else(|| format!("axis `{s}` must look like name=values"))?;
        let scalars = |v: &str| -> Result<Vec<f64>, String> {
            v.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| format!("bad number `{x}` in axis `{name}`"))
                })
                .collect()
        };
        let vectors = |v: &str| -> Result<Vec<Vec<f64>>, String> { v.split(';').map(scalars).collect() };
        let axis = match name.trim() {
            "gamma" => SweepAxis::Gamma(scalars(values)?),
            "omega-scale" => SweepAxis::OmegaScale(scalars(values)?),
            "omega" => SweepAxis::Omega(vectors(values)?),
            "anchors" => SweepAxis::Anchors(vectors(values)?),
            "task-order" => SweepAxis::TaskOrder(
                values
                    .split(';')
                    .map(|o| {
                        o.split(',')
                            .map(|x| x.trim().parse::<usize>().map_err(|_| format!("bad task index `{x}`")))
                            .collect()
                    })
                    .collect::<Result<_, _>>()?,
            ),
            other => return Err(format!("unknown sweep axis `{other}`")),
        };
        if axis.len() == 0 {
            return Err(format!("axis `{name}` has no values"));
        }
        Ok(axis)
    }
}

/// The default ablation grid: three discounts, three monitoring scales and
/// the configured anchors shifted by -0.04, 0 and +0.04 (27 points).
pub fn default_axes(exp: &Experiment) -> Vec<SweepAxis> {
    let base = exp.scenario.anchors();
    let shift = |d: f64| -> Vec<f64> {
        base.iter()
            .enumerate()
            .map(|(i, a)| if i == 0 { *a } else { ((a + d) * 1e9).round() / 1e9 })
            .map(|a| a.clamp(0.0, 1.0))
            .collect()
    };
    vec![
        SweepAxis::Gamma(vec![0.8, 0.85, 0.9]),
        SweepAxis::OmegaScale(vec![0.9, 1.0, 1.1]),
        SweepAxis::Anchors(vec![shift(-0.04), base.clone(), shift(0.04)]),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub params: BTreeMap<String, String>,
    pub policy: Vec<StrategyTag>,
    /// Expected discounted cost from the lowest level.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub scenario: String,
    pub points: Vec<SweepPoint>,
    pub modal_policy: Vec<StrategyTag>,
    pub modal_count: usize,
}

fn policy_text(p: &[StrategyTag]) -> String {
    format!("[{}]", p.iter().map(|t| t.short()).collect::<Vec<_>>().join(", "))
}

impl fmt::Display for SweepTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {} ({} points)", self.scenario, self.points.len())?;
        for p in &self.points {
            let params: Vec<String> = p.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(
                f,
                "{}  {}  value {:.6}",
                params.join(" "),
                policy_text(&p.policy),
                p.value
            )?;
        }
        write!(
            f,
            "modal policy {} ({}/{})",
            policy_text(&self.modal_policy),
            self.modal_count,
            self.points.len()
        )
    }
}

/// Solves the decision process at every point of the Cartesian product of
/// `axes` and reports each policy and the most common one (ties go to the
/// lexicographically smallest policy).
pub fn sweep(exp: &Experiment, axes: &[SweepAxis]) -> Result<SweepTable, HarnessError> {
    if axes.is_empty() || axes.iter().any(|a| a.len() == 0) {
        return Err(HarnessError::Invalid("sweep grid is empty".into()));
    }
    let total: usize = axes.iter().map(SweepAxis::len).product();
    let points = (0..total)
        .into_par_iter()
        .map(|mut n| {
            let mut v = Variant::default();
            let mut params = BTreeMap::new();
            for axis in axes.iter().rev() {
                let i = n % axis.len();
                n /= axis.len();
                params.insert(axis.name().to_string(), axis.apply(i, &mut v));
            }
            let e = exp.with_variant(&v)?;
            Ok(SweepPoint {
                params,
                policy: e.policy.choice.clone(),
                value: e.policy.value[0],
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let mut counts: BTreeMap<&Vec<StrategyTag>, usize> = BTreeMap::new();
    for p in &points {
        *counts.entry(&p.policy).or_default() += 1;
    }
    let (modal, count) = counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
        .map(|(p, c)| ((*p).clone(), *c))
        .expect("non-empty grid");
    Ok(SweepTable {
        scenario: exp.scenario.name.clone(),
        points,
        modal_policy: modal,
        modal_count: count,
    })
}
