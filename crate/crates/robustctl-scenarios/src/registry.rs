//! The fixed set of runnable scenarios and the literal defaults each one
//! carries over from its source listing.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioId {
    DipSmc,
    MotorcycleSmc,
    SipNonrobustFailure,
    SipRobustRiccati,
    SipRobustRiccatiMidpoint,
    SipIntervalPolynomial,
    SipAdaptiveOnline,
    SipAdaptiveLookup,
    SipAdaptiveSysid,
    SipCbf,
    Point2dCbfCase1,
    Point2dCbfCase2,
    Point2dClfCbfCase1,
    Point2dClfCbfCase2,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 14] = [
        ScenarioId::DipSmc,
        ScenarioId::MotorcycleSmc,
        ScenarioId::SipNonrobustFailure,
        ScenarioId::SipRobustRiccati,
        ScenarioId::SipRobustRiccatiMidpoint,
        ScenarioId::SipIntervalPolynomial,
        ScenarioId::SipAdaptiveOnline,
        ScenarioId::SipAdaptiveLookup,
        ScenarioId::SipAdaptiveSysid,
        ScenarioId::SipCbf,
        ScenarioId::Point2dCbfCase1,
        ScenarioId::Point2dCbfCase2,
        ScenarioId::Point2dClfCbfCase1,
        ScenarioId::Point2dClfCbfCase2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioId::DipSmc => "dip_smc",
            ScenarioId::MotorcycleSmc => "motorcycle_smc",
            ScenarioId::SipNonrobustFailure => "sip_nonrobust_failure",
            ScenarioId::SipRobustRiccati => "sip_robust_riccati",
            ScenarioId::SipRobustRiccatiMidpoint => "sip_robust_riccati_midpoint",
            ScenarioId::SipIntervalPolynomial => "sip_interval_polynomial",
            ScenarioId::SipAdaptiveOnline => "sip_adaptive_online",
            ScenarioId::SipAdaptiveLookup => "sip_adaptive_lookup",
            ScenarioId::SipAdaptiveSysid => "sip_adaptive_sysid",
            ScenarioId::SipCbf => "sip_cbf",
            ScenarioId::Point2dCbfCase1 => "point2d_cbf_case1",
            ScenarioId::Point2dCbfCase2 => "point2d_cbf_case2",
            ScenarioId::Point2dClfCbfCase1 => "point2d_clf_cbf_case1",
            ScenarioId::Point2dClfCbfCase2 => "point2d_clf_cbf_case2",
        }
    }

    /// File name of the MATLAB listing the scenario reproduces.
    pub fn listing(&self) -> &'static str {
        match self {
            ScenarioId::DipSmc => "DoubleInvertedPendulumSMC.m",
            ScenarioId::MotorcycleSmc => "MotorcycleControlSMC.m",
            ScenarioId::SipNonrobustFailure => "SingleInvertedPendulumNonRobustFailure.m (second run, theta0 = 0.4*pi)",
            ScenarioId::SipRobustRiccati => "SingleInvertedPendulumRobustFSFC.m",
            ScenarioId::SipRobustRiccatiMidpoint => "SingleInvertedPendulumRobustFSFC2.m",
            ScenarioId::SipIntervalPolynomial => "SingleInvertedPendulumIntervalPolynomial.m",
            ScenarioId::SipAdaptiveOnline => "SingleInvertedPendulumAL.m",
            ScenarioId::SipAdaptiveLookup => "SingleInvertedPendulumAL2.m",
            ScenarioId::SipAdaptiveSysid => "SingleInvertedPendulumAdaptiveSI.m",
            ScenarioId::SipCbf => "SingleInvertedPendulumCBF.m",
            ScenarioId::Point2dCbfCase1 => "TwoDPointNonlinearMotionCBF.m (flgUnsafeSet = 1)",
            ScenarioId::Point2dCbfCase2 => "TwoDPointNonlinearMotionCBF.m (flgUnsafeSet = 0)",
            ScenarioId::Point2dClfCbfCase1 => "TwoDPointNonlinearMotionLyapunovCBF.m (flgUnsafeSet = 1)",
            ScenarioId::Point2dClfCbfCase2 => "TwoDPointNonlinearMotionLyapunovCBF.m (flgUnsafeSet = 0)",
        }
    }

    /// Literal defaults of the listing.
    pub fn defaults(&self) -> Defaults {
        let sip = |t_end| Defaults {
            dt: 0.001,
            t_end,
            x0: vec![0.4 * PI, 0.0, 0.2, 0.0],
            slide_rate: Some(8.0),
            preview: None,
        };
        let point = Defaults { dt: 0.001, t_end: 10.0, x0: vec![4.0, 5.0], slide_rate: None, preview: None };
        match self {
            ScenarioId::DipSmc => Defaults {
                dt: 0.001,
                t_end: 8.0,
                x0: vec![0.2, 0.0, 0.0, 0.0, 20.0, 0.0],
                slide_rate: Some(8.0),
                preview: None,
            },
            ScenarioId::MotorcycleSmc => Defaults {
                dt: 0.001,
                t_end: 10.0,
                x0: vec![0.0, -0.2, -0.1, 0.0, 0.3, 0.0],
                slide_rate: None,
                preview: Some(6.0),
            },
            ScenarioId::SipNonrobustFailure => Defaults { slide_rate: None, ..sip(5.0) },
            ScenarioId::SipRobustRiccati | ScenarioId::SipRobustRiccatiMidpoint | ScenarioId::SipIntervalPolynomial => sip(20.0),
            ScenarioId::SipAdaptiveOnline | ScenarioId::SipAdaptiveSysid => Defaults { slide_rate: None, ..sip(3.0) },
            ScenarioId::SipAdaptiveLookup => sip(10.0),
            ScenarioId::SipCbf => Defaults {
                dt: 0.001,
                t_end: 10.0,
                x0: vec![0.2, 0.0, 20.0, 0.0],
                slide_rate: None,
                preview: None,
            },
            ScenarioId::Point2dCbfCase1
            | ScenarioId::Point2dCbfCase2
            | ScenarioId::Point2dClfCbfCase1
            | ScenarioId::Point2dClfCbfCase2 => point,
        }
    }

    /// Terminal event the listing is expected to end with under its
    /// defaults. Scenarios without a success predicate run to the end of
    /// their time span.
    pub fn expected_event(&self) -> &'static str {
        match self {
            ScenarioId::MotorcycleSmc => "destination",
            ScenarioId::SipNonrobustFailure => "failure",
            ScenarioId::SipRobustRiccati
            | ScenarioId::SipRobustRiccatiMidpoint
            | ScenarioId::SipIntervalPolynomial
            | ScenarioId::SipAdaptiveLookup => "success",
            _ => "timeout",
        }
    }

    /// Unsafe disk `(cx, cy, r)` of the planar-point scenarios.
    pub fn unsafe_disk(&self) -> Option<(f64, f64, f64)> {
        match self {
            ScenarioId::Point2dCbfCase1 | ScenarioId::Point2dClfCbfCase1 => Some((2.0, 2.0, 1.0)),
            ScenarioId::Point2dCbfCase2 | ScenarioId::Point2dClfCbfCase2 => Some((0.0, 3.5, 3.0)),
            _ => None,
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = crate::ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScenarioId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| crate::ScenarioError::UnknownScenario(s.to_string()))
    }
}

/// Tunable defaults. `slide_rate` and `preview` are `None` for scenarios
/// that have no such knob.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Defaults {
    pub dt: f64,
    pub t_end: f64,
    pub x0: Vec<f64>,
    pub slide_rate: Option<f64>,
    pub preview: Option<f64>,
}

/// Parameter overrides accepted by [`crate::run_scenario`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub x0: Option<Vec<f64>>,
    /// Single initial-state entries, applied after `x0`.
    pub x0_entries: Vec<(usize, f64)>,
    pub slide_rate: Option<f64>,
    pub preview: Option<f64>,
}

impl Overrides {
    /// Parses one `key=value` pair. Keys: `dt`, `t_end`, `x0` (comma
    /// separated), `x0[i]`, `slide_rate`, `preview`.
    pub fn set(&mut self, pair: &str) -> Result<(), crate::ScenarioError> {
        let bad = || crate::ScenarioError::InvalidOverride(pair.to_string());
        let (key, value) = pair.split_once('=').ok_or_else(bad)?;
        let (key, value) = (key.trim(), value.trim());
        let num = |v: &str| v.parse::<f64>().map_err(|_| bad());
        match key {
            "dt" => self.dt = Some(num(value)?),
            "t_end" => self.t_end = Some(num(value)?),
            "slide_rate" => self.slide_rate = Some(num(value)?),
            "preview" => self.preview = Some(num(value)?),
            "x0" => self.x0 = Some(value.split(',').map(|v| num(v.trim())).collect::<Result<_, _>>()?),
            _ => {
                let idx = key
                    .strip_prefix("x0[")
                    .and_then(|r| r.strip_suffix(']'))
                    .and_then(|i| i.parse::<usize>().ok())
                    .ok_or_else(bad)?;
                self.x0_entries.push((idx, num(value)?));
            }
        }
        Ok(())
    }

    /// Defaults with the overrides applied and validated.
    pub fn apply(&self, id: ScenarioId) -> Result<Defaults, crate::ScenarioError> {
        let mut d = id.defaults();
        let invalid = |what: String| crate::ScenarioError::InvalidOverride(format!("{id}: {what}"));
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(invalid(format!("dt = {dt}")));
            }
            d.dt = dt;
        }
        if let Some(t) = self.t_end {
            if !(t > 0.0 && t.is_finite()) {
                return Err(invalid(format!("t_end = {t}")));
            }
            d.t_end = t;
        }
        if d.t_end < d.dt {
            return Err(invalid("t_end shorter than dt".into()));
        }
        if let Some(x0) = &self.x0 {
            if x0.len() != d.x0.len() {
                return Err(invalid(format!("x0 needs {} entries, got {}", d.x0.len(), x0.len())));
            }
            d.x0 = x0.clone();
        }
        for &(i, v) in &self.x0_entries {
            if i >= d.x0.len() {
                return Err(invalid(format!("x0[{i}] out of range")));
            }
            d.x0[i] = v;
        }
        if d.x0.iter().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite initial state".into()));
        }
        if let Some(s) = self.slide_rate {
            if d.slide_rate.is_none() {
                return Err(invalid("no slide_rate tunable".into()));
            }
            if !(s > 0.0) {
                return Err(invalid(format!("slide_rate = {s}")));
            }
            d.slide_rate = Some(s);
        }
        if let Some(p) = self.preview {
            if d.preview.is_none() {
                return Err(invalid("no preview tunable".into()));
            }
            if !(p > 0.0) {
                return Err(invalid(format!("preview = {p}")));
            }
            d.preview = Some(p);
        }
        Ok(d)
    }
}
