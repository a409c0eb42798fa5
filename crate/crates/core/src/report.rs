//! Pass/fail constraint reports shared by the design and planning checks.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// value ≤ limit
    AtMost,
    /// value ≥ limit
    AtLeast,
    /// value > limit
    Above,
}

impl Bound {
    fn holds(self, value: f64, limit: f64) -> bool {
        match self {
            Bound::AtMost => value <= limit,
            Bound::AtLeast => value >= limit,
            Bound::Above => value > limit,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
            Bound::Above => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintCheck {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub bound: Bound,
    pub unit: &'static str,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstraintReport {
    pub checks: Vec<ConstraintCheck>,
}

impl ConstraintReport {
    pub fn push(&mut self, name: &str, value: f64, bound: Bound, limit: f64, unit: &'static str) {
        self.checks.push(ConstraintCheck {
            name: name.to_string(),
            value,
            limit,
            bound,
            unit,
            pass: bound.holds(value, limit),
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&ConstraintCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,value,bound,limit,unit,pass\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.name,
                c.value,
                c.bound.symbol(),
                short(c.limit),
                c.unit,
                c.pass
            ));
        }
        out
    }
}

/// At most six decimals, trailing zeros dropped.
fn short(v: f64) -> String {
    let s = format!("{v:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

impl fmt::Display for ConstraintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {:<24} {:>12.6} {} {} {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.bound.symbol(),
                short(c.limit),
                c.unit
            )?;
        }
        Ok(())
    }
}
