//! JSON, JSON-lines and CSV forms of polynomials, distributions and reports.
//! Rationals are always written as `"num/den"` strings.

use std::io::Write;
use std::time::Duration;

use edgestat_core::gm::GmFamily;
use edgestat_core::rational::{decimal_string, fraction_string, parse_rational};
use edgestat_core::verify::{Check, Relation, VerificationReport, Witness};
use edgestat_core::{dist::ValueDist, CanonicalKey, Error, MultilinearPoly, Rational, Result};
use serde_json::{json, Map, Value};

fn parse_err(what: &str) -> Error {
    Error::Parse(format!("malformed {what}"))
}

fn rational_field(v: &Value, what: &str) -> Result<Rational> {
    parse_rational(v.as_str().ok_or_else(|| parse_err(what))?)
}

/// `{"n": .., "c": .., "lin": [[i, c]..], "quad": [[i, j, c]..]}` with 1-based indices.
pub fn poly_to_json(f: &MultilinearPoly) -> Value {
    json!({
        "n": f.num_vars(),
        "c": f.constant(),
        "lin": f.linear().iter().map(|(&i, &c)| json!([i + 1, c])).collect::<Vec<_>>(),
        "quad": f.quadratic().iter().map(|(&(i, j), &c)| json!([i + 1, j + 1, c])).collect::<Vec<_>>(),
    })
}

pub fn poly_from_json(v: &Value) -> Result<MultilinearPoly> {
    let int = |x: &Value| x.as_i64().ok_or_else(|| parse_err("polynomial"));
    let index = |x: &Value| -> Result<usize> {
        let i = int(x)?;
        if i < 1 {
            return Err(Error::Parse("variable indices are 1-based".into()));
        }
        Ok(i as usize - 1)
    };
    let n = v["n"].as_u64().ok_or_else(|| parse_err("polynomial"))? as usize;
    let constant = if v["c"].is_null() { 0 } else { int(&v["c"])? };
    let empty = Vec::new();
    let lin = v["lin"].as_array().unwrap_or(&empty);
    let quad = v["quad"].as_array().unwrap_or(&empty);
    let linear = lin
        .iter()
        .map(|t| Ok((index(&t[0])?, int(&t[1])?)))
        .collect::<Result<Vec<_>>>()?;
    let quadratic = quad
        .iter()
        .map(|t| Ok((index(&t[0])?, index(&t[1])?, int(&t[2])?)))
        .collect::<Result<Vec<_>>>()?;
    MultilinearPoly::from_terms(n, constant, linear, quadratic)
}

/// `{"support": [[value, "num/den"], ..]}` sorted by value.
pub fn dist_to_json(d: &ValueDist) -> Value {
    json!({
        "support": d.iter().map(|(v, m)| json!([v, fraction_string(m)])).collect::<Vec<_>>(),
    })
}

pub fn dist_from_json(v: &Value) -> Result<ValueDist> {
    let support = v["support"].as_array().ok_or_else(|| parse_err("distribution"))?;
    let masses = support
        .iter()
        .map(|pair| {
            let value = pair[0].as_i64().ok_or_else(|| parse_err("distribution"))?;
            Ok((value, rational_field(&pair[1], "distribution")?))
        })
        .collect::<Result<Vec<_>>>()?;
    ValueDist::from_masses(masses)
}

pub fn report_to_json(r: &VerificationReport) -> Value {
    let inputs: Map<String, Value> = r.inputs.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    let exact: Map<String, Value> = r
        .exact_values
        .iter()
        .map(|(k, v)| (k.clone(), json!(fraction_string(v))))
        .collect();
    let decimals: Map<String, Value> = r
        .exact_values
        .iter()
        .map(|(k, v)| (k.clone(), json!(decimal_string(v, 12))))
        .collect();
    let witness = r.witness.map(|w| {
        json!({
            "key": w.key.to_string(),
            "ell": w.ell,
            "poly": w.key.to_polynomial().poly().to_string(),
        })
    });
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "lhs": fraction_string(&c.lhs),
                "relation": c.relation.symbol(),
                "rhs": fraction_string(&c.rhs),
                "holds": c.holds,
            })
        })
        .collect();
    json!({
        "name": r.name,
        "inputs": inputs,
        "exact_values": exact,
        "decimals": decimals,
        "threshold": r.threshold.as_ref().map(fraction_string),
        "witness": witness,
        "checks": checks,
        "passed": r.passed,
        "wall_time": r.wall_time.map(|d| d.as_secs_f64()),
    })
}

pub fn report_from_json(v: &Value) -> Result<VerificationReport> {
    let obj = |key: &str| v[key].as_object().ok_or_else(|| parse_err(key));
    let mut r = VerificationReport::new(v["name"].as_str().ok_or_else(|| parse_err("name"))?);
    for (k, val) in obj("inputs")? {
        r.input(k, val.as_str().ok_or_else(|| parse_err("inputs"))?);
    }
    for (k, val) in obj("exact_values")? {
        r.value(k, rational_field(val, "exact_values")?);
    }
    r.threshold = match &v["threshold"] {
        Value::Null => None,
        t => Some(rational_field(t, "threshold")?),
    };
    r.witness = match &v["witness"] {
        Value::Null => None,
        w => Some(Witness {
            key: w["key"]
                .as_str()
                .ok_or_else(|| parse_err("witness"))?
                .parse::<CanonicalKey>()?,
            ell: w["ell"].as_i64().ok_or_else(|| parse_err("witness"))?,
        }),
    };
    for c in v["checks"].as_array().ok_or_else(|| parse_err("checks"))? {
        let mut check = Check::new(
            c["name"].as_str().ok_or_else(|| parse_err("check"))?,
            rational_field(&c["lhs"], "check")?,
            Relation::from_symbol(c["relation"].as_str().ok_or_else(|| parse_err("check"))?)?,
            rational_field(&c["rhs"], "check")?,
        );
        check.holds = c["holds"].as_bool().ok_or_else(|| parse_err("check"))?;
        r.checks.push(check);
    }
    r.passed = v["passed"].as_bool().ok_or_else(|| parse_err("passed"))?;
    r.wall_time = v["wall_time"].as_f64().map(Duration::from_secs_f64);
    Ok(r)
}

/// One JSON line per member: polynomial, canonical key, `s` and `|L|`.
pub fn write_members_jsonl(family: &GmFamily, out: &mut impl Write) -> std::io::Result<()> {
    for (key, g) in family.members() {
        let line = json!({
            "poly": poly_to_json(g.poly()),
            "key": key.to_string(),
            "s": g.num_vars(),
            "L": g.linear_count(),
        });
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// `m,count,p_star,bound_exact,bound_decimal` rows of the computational table.
pub fn write_table_csv(reports: &[VerificationReport], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
    w.write_record(["m", "count", "p_star", "bound_exact", "bound_decimal"]).map_err(io)?;
    for r in reports {
        let get = |k: &str| r.get_value(k).ok_or_else(|| parse_err(k));
        let bound = get("max")?;
        w.write_record([
            r.get_input("m").unwrap_or("").to_string(),
            get("count")?.to_integer().to_string(),
            fraction_string(get("p_star")?),
            fraction_string(bound),
            decimal_string(bound, 12),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    Ok(())
}

/// `m,count,max_s,wall_time` summary of an enumeration.
pub fn write_enumerate_csv(family: &GmFamily, wall_time: Duration, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
    w.write_record(["m", "count", "max_s", "wall_time"]).map_err(io)?;
    w.write_record([
        family.m().to_string(),
        family.len().to_string(),
        family.max_num_vars().to_string(),
        format!("{:.3}", wall_time.as_secs_f64()),
    ])
    .map_err(io)?;
    w.flush().map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    Ok(())
}
