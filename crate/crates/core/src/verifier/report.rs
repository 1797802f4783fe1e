//! Check results, residual reports and their text/CSV renderings.

use std::cmp::Ordering;
use std::fmt::{self, Write as _};

use crate::vecfield::Vec3;

/// Everything the verifier can adjudicate.
///
/// The first three test hypotheses of the construction; the rest test its
/// conclusions. A failed hypothesis outranks any downstream symptom when
/// the dominant failure is named.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Constraint,
    Normalization,
    Harmonicity,
    Continuity,
    Curl,
    Momentum,
    InitialCondition,
    T0Consistency,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::Constraint,
        Check::Normalization,
        Check::Harmonicity,
        Check::Continuity,
        Check::Curl,
        Check::Momentum,
        Check::InitialCondition,
        Check::T0Consistency,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Constraint => "constraint",
            Check::Normalization => "normalization",
            Check::Harmonicity => "harmonicity",
            Check::Continuity => "continuity",
            Check::Curl => "curl",
            Check::Momentum => "momentum",
            Check::InitialCondition => "initial-condition",
            Check::T0Consistency => "t0-consistency",
        }
    }

    pub fn is_hypothesis(self) -> bool {
        matches!(self, Check::Constraint | Check::Normalization | Check::Harmonicity)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Check::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown check '{s}'"))
    }
}

/// One sampled value of a check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Offender {
    pub x: Vec3,
    pub t: f64,
    pub value: f64,
}

/// Largest value first; ties broken by lexicographic `(t, x)`.
fn offender_order(a: &Offender, b: &Offender) -> Ordering {
    b.value
        .total_cmp(&a.value)
        .then(a.t.total_cmp(&b.t))
        .then(a.x.x.total_cmp(&b.x.x))
        .then(a.x.y.total_cmp(&b.x.y))
        .then(a.x.z.total_cmp(&b.x.z))
}

pub const WORST_OFFENDERS: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub check: Check,
    pub max: f64,
    pub mean: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub worst: Vec<Offender>,
    pub note: Option<String>,
}

impl CheckResult {
    /// Reduces sampled values by max/mean; passes iff `max <= tolerance`.
    pub fn from_samples(check: Check, mut samples: Vec<Offender>, tolerance: f64) -> Self {
        let n = samples.len().max(1) as f64;
        let mean = samples.iter().map(|o| o.value).sum::<f64>() / n;
        let max = samples.iter().map(|o| o.value).fold(0.0, |m: f64, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) });
        samples.sort_by(offender_order);
        samples.truncate(WORST_OFFENDERS);
        Self { check, max, mean, tolerance, passed: max <= tolerance, worst: samples, note: None }
    }

    /// A check with a single, position-free value.
    pub fn scalar(check: Check, value: f64, tolerance: f64) -> Self {
        Self { check, max: value, mean: value, tolerance, passed: value <= tolerance, worst: Vec::new(), note: None }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// How far past its tolerance the check landed.
    pub fn severity(&self) -> f64 {
        if self.max.is_nan() {
            f64::INFINITY
        } else {
            self.max / self.tolerance
        }
    }
}

/// Outcome of a verification run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResidualReport {
    pub checks: Vec<CheckResult>,
    /// Quadrature, FD and grid settings used, as `(key, value)` pairs.
    pub settings: Vec<(String, String)>,
}

impl ResidualReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, check: Check) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check == check)
    }

    /// The failing hypothesis check if any (in declaration order), otherwise
    /// the failing check furthest past its tolerance.
    pub fn dominant_failure(&self) -> Option<&CheckResult> {
        let failed = || self.checks.iter().filter(|c| !c.passed);
        failed()
            .filter(|c| c.check.is_hypothesis())
            .min_by_key(|c| c.check)
            .or_else(|| failed().max_by(|a, b| a.severity().total_cmp(&b.severity()).then(b.check.cmp(&a.check))))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("check,max,mean,tolerance,pass\n");
        for c in &self.checks {
            let _ = writeln!(s, "{},{:.16e},{:.16e},{:.16e},{}", c.check, c.max, c.mean, c.tolerance, c.passed);
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "verification report");
        let _ = writeln!(s, "===================");
        for (k, v) in &self.settings {
            let _ = writeln!(s, "{k:<18} {v}");
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<18} {:>24} {:>24} {:>24}  status", "check", "max", "mean", "tolerance");
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            let _ = writeln!(s, "{:<18} {:>24.16e} {:>24.16e} {:>24.16e}  {status}", c.check.name(), c.max, c.mean, c.tolerance);
        }
        for c in &self.checks {
            if c.note.is_none() && c.worst.is_empty() {
                continue;
            }
            let _ = writeln!(s, "\n[{}]", c.check);
            if let Some(n) = &c.note {
                let _ = writeln!(s, "  {n}");
            }
            for o in &c.worst {
                let _ = writeln!(s, "  t={:.16e} x=({:.16e}, {:.16e}, {:.16e}) value={:.16e}", o.t, o.x.x, o.x.y, o.x.z, o.value);
            }
        }
        let _ = writeln!(s);
        match self.dominant_failure() {
            None => {
                let _ = writeln!(s, "result: PASS");
            }
            Some(d) => {
                let _ = writeln!(s, "result: FAIL (dominant failure: {})", d.check);
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn off(t: f64, x: f64, value: f64) -> Offender {
        Offender { x: Vec3::new(x, 0.0, 0.0), t, value }
    }

    #[test]
    fn offenders_tie_break_by_time_then_space() {
        let r = CheckResult::from_samples(
            Check::Continuity,
            vec![off(0.5, 1.0, 2.0), off(0.1, 0.0, 2.0), off(0.1, -1.0, 2.0), off(0.0, 0.0, 1.0), off(0.0, 0.0, 3.0), off(1.0, 0.0, 0.5)],
            1.0,
        );
        assert_eq!(r.max, 3.0);
        assert!(!r.passed);
        let order: Vec<_> = r.worst.iter().map(|o| (o.t, o.x.x, o.value)).collect();
        assert_eq!(order, vec![(0.0, 0.0, 3.0), (0.1, -1.0, 2.0), (0.1, 0.0, 2.0), (0.5, 1.0, 2.0), (0.0, 0.0, 1.0)]);
        assert!((r.mean - 10.5 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn nan_never_passes() {
        let r = CheckResult::from_samples(Check::Curl, vec![off(0.0, 0.0, f64::NAN), off(0.0, 1.0, 0.0)], 1.0);
        assert!(!r.passed);
    }

    #[test]
    fn hypotheses_dominate_symptoms() {
        let report = ResidualReport {
            checks: vec![
                CheckResult::scalar(Check::Continuity, 1e6, 1e-6),
                CheckResult::scalar(Check::Harmonicity, 1e-7, 1e-8),
                CheckResult::scalar(Check::Momentum, 1.0, 1e-6),
            ],
            settings: vec![],
        };
        assert_eq!(report.dominant_failure().unwrap().check, Check::Harmonicity);
        let report = ResidualReport { checks: report.checks[..1].iter().chain(&report.checks[2..]).cloned().collect(), settings: vec![] };
        assert_eq!(report.dominant_failure().unwrap().check, Check::Continuity);
    }

    #[test]
    fn csv_layout() {
        let report = ResidualReport { checks: vec![CheckResult::scalar(Check::Curl, 0.25, 1e-6)], settings: vec![] };
        assert_eq!(report.to_csv(), "check,max,mean,tolerance,pass\ncurl,2.5000000000000000e-1,2.5000000000000000e-1,9.9999999999999995e-7,false\n");
        assert!(report.to_text().contains("dominant failure: curl"));
    }
}
