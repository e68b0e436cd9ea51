//! Serialization of correlation reports: exact rationals as `"num/den"` strings
//! in JSON, floats as `{:.16e}` in CSV.

use num_rational::BigRational;
use serde::ser::SerializeSeq;
use serde::Serializer;

use super::binomial::{rational_string, to_f64};
use super::correlation::CorrelationReport;
use crate::error::Result;

pub const CORRELATION_SCHEMA: &str = "marginrcn correlation v1";

pub const CSV_HEADER: &str = "d,s_star,eps_actual,inner_product,e_fvfu,chi_pair,chi_self,bound_rhs,min_C";

pub fn ser_rational<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(r))
}

pub fn ser_rationals<S: Serializer>(rs: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(rs.len()))?;
    for r in rs {
        seq.serialize_element(&rational_string(r))?;
    }
    seq.end()
}

fn sci(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub fn csv_row(r: &CorrelationReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        r.d,
        r.s_star,
        sci(to_f64(&r.eps_actual)),
        r.inner_product,
        sci(to_f64(&r.e_fvfu)),
        sci(to_f64(&r.chi_pair)),
        sci(to_f64(&r.chi_self)),
        sci(r.bound_rhs),
        r.min_c.map_or_else(|| "inf".to_string(), sci),
    )
}

pub fn to_csv(reports: &[CorrelationReport]) -> String {
    let mut out = String::with_capacity(64 * (reports.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

pub fn to_json(reports: &[CorrelationReport]) -> Result<String> {
    let doc = serde_json::json!({ "schema": CORRELATION_SCHEMA, "reports": reports });
    Ok(serde_json::to_string_pretty(&doc).expect("reports serialize"))
}
