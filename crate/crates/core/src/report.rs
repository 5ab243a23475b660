//! Pass/fail reports for inequality checks and convergence tables for
//! limit studies.

use std::fmt;

/// One checked relation. `slack` is the margin by which the relation
/// holds (negative when it fails); its units are those of the compared
/// quantities, or natural-log units for relations compared in log form.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub name: String,
    pub holds: bool,
    pub slack: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RelationReport {
    pub relations: Vec<Relation>,
}

impl RelationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, holds: bool, slack: f64) {
        self.push_with(name, holds, slack, String::new());
    }

    pub fn push_with(
        &mut self,
        name: impl Into<String>,
        holds: bool,
        slack: f64,
        detail: impl Into<String>,
    ) {
        self.relations.push(Relation {
            name: name.into(),
            holds,
            slack,
            detail: detail.into(),
        });
    }

    pub fn extend(&mut self, other: RelationReport) {
        self.relations.extend(other.relations);
    }

    pub fn all_hold(&self) -> bool {
        self.relations.iter().all(|r| r.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Relation> {
        self.relations.iter().filter(|r| !r.holds)
    }

    pub fn failure_count(&self) -> usize {
        self.failures().count()
    }

    pub fn get(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }

    /// Smallest slack over all relations, `+inf` when empty.
    pub fn min_slack(&self) -> f64 {
        self.relations
            .iter()
            .map(|r| r.slack)
            .fold(f64::INFINITY, f64::min)
    }
}

impl fmt::Display for RelationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.relations {
            let verdict = if r.holds { "pass" } else { "FAIL" };
            write!(f, "{verdict} {} (slack {:.3e})", r.name, r.slack)?;
            if !r.detail.is_empty() {
                write!(f, " [{}]", r.detail)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A row of a limit study: the sequence parameter, the computed value
/// and its distance to the known limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub parameter: f64,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub limit: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub fn final_error(&self) -> Option<f64> {
        self.rows.last().map(|r| r.error)
    }

    /// True when the error column never increases by more than `tol`.
    pub fn errors_nonincreasing(&self, tol: f64) -> bool {
        nonincreasing(&self.errors(), tol)
    }

    pub fn errors_eventually_decreasing(&self, tol: f64) -> bool {
        eventually_decreasing(&self.errors(), tol)
    }
}

pub(crate) fn nonincreasing(values: &[f64], tol: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] + tol)
}

/// Nonincreasing from the position of the maximum onward, with the last
/// value no larger than the first (up to `tol`). Constant sequences pass.
pub(crate) fn eventually_decreasing(values: &[f64], tol: f64) -> bool {
    if values.len() < 2 {
        return true;
    }
    let peak = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v > values[best] { i } else { best });
    nonincreasing(&values[peak..], tol) && values[values.len() - 1] <= values[0] + tol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eventually_decreasing_accepts_initial_rise() {
        assert!(eventually_decreasing(&[0.1, 0.3, 0.2, 0.05], 0.0));
        assert!(!eventually_decreasing(&[0.3, 0.1, 0.2], 0.0));
        assert!(eventually_decreasing(&[0.0, 0.0, 0.0], 1e-12));
    }

    #[test]
    fn report_counts_failures() {
        let mut r = RelationReport::new();
        r.push("a", true, 1.0);
        r.push("b", false, -0.5);
        assert_eq!(r.failure_count(), 1);
        assert_eq!(r.min_slack(), -0.5);
        assert!(!r.all_hold());
        assert!(r.to_string().contains("FAIL b"));
    }
}
