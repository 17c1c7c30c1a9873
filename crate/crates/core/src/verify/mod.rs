//! Certificates: exact checks of the strict inequalities behind the
//! finite reduction, the numeric lemmas, and oracles for supporting lemmas.

mod certificates;
mod lemmas;
mod reduction;

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

pub use certificates::{
    better34_report, check_better34_inequalities, default_table, prop027_report, star_zero_probability_search,
    table_report, table_report_from, verify_prop_027, verify_prop_033, Better34, StarSearch, BETTER34_P,
};
pub use lemmas::{
    antichain_expectation_check, blym_check, elo_max, large_linear_part_check, AntichainCheck,
    BlymCheck, EloCheck, LargeLinearCheck,
};
pub use reduction::{
    default_grid, optimize_from_scan, optimize_p, reduction_bound, reduction_bound_at, reduction_bound_with,
    reduction_bounds_upto, OptimizeResult, ProfileTable,
    ReductionBound, DEFAULT_GRID_DENOMINATOR,
};

use crate::error::{Error, Result};
use crate::poly::CanonicalKey;
use crate::rational::{fraction_string, Rational};
use crate::Caps;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Lt,
    Le,
    Eq,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "==",
        }
    }

    pub fn from_symbol(s: &str) -> Result<Self> {
        match s {
            "<" => Ok(Relation::Lt),
            "<=" => Ok(Relation::Le),
            "==" => Ok(Relation::Eq),
            _ => Err(Error::Parse(alloc::format!("unknown relation {s:?}"))),
        }
    }
}

/// One exact comparison `lhs relation rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub lhs: Rational,
    pub relation: Relation,
    pub rhs: Rational,
    pub holds: bool,
}

impl Check {
    pub fn new(name: &str, lhs: Rational, relation: Relation, rhs: Rational) -> Self {
        let holds = relation.holds(&lhs, &rhs);
        Check {
            name: name.to_string(),
            lhs,
            relation,
            rhs,
            holds,
        }
    }

    pub fn recompute(&self) -> bool {
        self.relation.holds(&self.lhs, &self.rhs)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} {} {} [{}]",
            self.name,
            fraction_string(&self.lhs),
            self.relation.symbol(),
            fraction_string(&self.rhs),
            if self.holds { "ok" } else { "FAIL" }
        )
    }
}

/// A polynomial class and value attaining a maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Witness {
    pub key: CanonicalKey,
    pub ell: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub name: String,
    pub inputs: Vec<(String, String)>,
    pub exact_values: Vec<(String, Rational)>,
    pub threshold: Option<Rational>,
    pub witness: Option<Witness>,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub wall_time: Option<Duration>,
}

impl VerificationReport {
    pub fn new(name: &str) -> Self {
        VerificationReport {
            name: name.to_string(),
            inputs: Vec::new(),
            exact_values: Vec::new(),
            threshold: None,
            witness: None,
            checks: Vec::new(),
            passed: true,
            wall_time: None,
        }
    }

    pub fn input(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.inputs.push((key.to_string(), value.to_string()));
        self
    }

    pub fn value(&mut self, key: &str, value: Rational) -> &mut Self {
        self.exact_values.push((key.to_string(), value));
        self
    }

    pub fn check(&mut self, check: Check) -> &mut Self {
        self.passed &= check.holds;
        self.checks.push(check);
        self
    }

    pub fn get_input(&self, key: &str) -> Option<&str> {
        self.inputs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_value(&self, key: &str) -> Option<&Rational> {
        self.exact_values.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// Re-evaluates every stored comparison; true iff the stored verdicts are consistent.
    pub fn is_self_consistent(&self) -> bool {
        self.checks.iter().all(|c| c.recompute() == c.holds)
            && self.passed == self.checks.iter().all(|c| c.holds)
    }

    /// Same report with timing removed, for determinism comparisons.
    pub fn without_time(&self) -> Self {
        VerificationReport {
            wall_time: None,
            ..self.clone()
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.name, if self.passed { "PASS" } else { "FAIL" })?;
        for (k, v) in &self.exact_values {
            writeln!(f, "  {k} = {} ≈ {}", fraction_string(v), crate::rational::decimal_string(v, 12))?;
        }
        if let Some(w) = &self.witness {
            writeln!(f, "  witness: {} at ell = {}", w.key.to_polynomial().poly(), w.ell)?;
        }
        for c in &self.checks {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}

/// Recomputes a report from its recorded inputs.
pub fn rerun(report: &VerificationReport, caps: &Caps) -> Result<VerificationReport> {
    let input = |key: &str| {
        report
            .get_input(key)
            .ok_or_else(|| Error::Parse(alloc::format!("report {} lacks input {key}", report.name)))
    };
    let parse_u32 = |key: &str| -> Result<u32> {
        input(key)?
            .parse()
            .map_err(|_| Error::Parse(alloc::format!("input {key} is not an integer")))
    };
    match report.name.as_str() {
        "prop033" => verify_prop_033(caps),
        "prop027" => Ok(verify_prop_027()),
        "better34" => Ok(better34_report(&crate::rational::parse_rational(input("p")?)?)),
        "table" => {
            let den = parse_u32("grid_denominator")?;
            let table = ProfileTable::for_m(parse_u32("m")?, caps)?;
            table_report(&table, &default_grid(den))
        }
        "star_zero" => {
            let p = crate::rational::parse_rational(input("p")?)?;
            let ells: Vec<i64> = input("ells")?
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| Error::Parse("bad ell list".into())))
                .collect::<Result<_>>()?;
            Ok(star_zero_probability_search(parse_u32("max_vars")? as usize, &ells, &p, caps)?.report())
        }
        other => Err(Error::InvalidInput(alloc::format!("no certificate named {other:?}"))),
    }
}
