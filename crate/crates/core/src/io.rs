//! File formats: mixture JSON, coefficient / curve / grid CSV, report JSON,
//! and plain-text element positions.
//!
//! Floating-point fields are written with 17 significant digits so that values
//! round-trip exactly.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fb5::{Fb5Params, MixtureModel};
use crate::sfc::{ArrayGeometry, SfcCurve};
use crate::sht::CoeffTable;
use crate::validation::CheckReport;
use crate::Vec3;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentDoc {
    weight: f64,
    kappa: f64,
    beta: f64,
    mu: Vec3,
    eta1: Vec3,
    eta2: Vec3,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MixtureDoc {
    components: Vec<ComponentDoc>,
}

/// Parse a mixture document. Frames within 1e-6 of orthonormal are repaired.
pub fn parse_mixture(text: &str) -> Result<MixtureModel> {
    let doc: MixtureDoc = serde_json::from_str(text).map_err(|e| Error::Parse(format!("mixture JSON: {e}")))?;
    let components = doc
        .components
        .into_iter()
        .map(|c| Ok((c.weight, Fb5Params::with_repaired_frame(c.kappa, c.beta, c.mu, c.eta1, c.eta2)?)))
        .collect::<Result<Vec<_>>>()?;
    MixtureModel::new(components)
}

pub fn read_mixture(path: &std::path::Path) -> Result<MixtureModel> {
    parse_mixture(&std::fs::read_to_string(path)?)
}

pub fn mixture_to_json(model: &MixtureModel) -> String {
    let doc = MixtureDoc {
        components: model
            .components()
            .iter()
            .map(|(w, p)| ComponentDoc {
                weight: *w,
                kappa: p.kappa(),
                beta: p.beta(),
                mu: p.mu(),
                eta1: p.eta1(),
                eta2: p.eta2(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("mixture documents always serialise")
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e.to_string()),
        other => Error::Parse(format!("{other:?}")),
    }
}

/// Header `ell,m,re,im`, ℓ ascending then m from −ℓ to ℓ.
pub fn write_coeffs<W: Write>(coeffs: &CoeffTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["ell", "m", "re", "im"]).map_err(csv_err)?;
    for (ell, m, v) in coeffs.iter() {
        w.write_record([ell.to_string(), m.to_string(), fmt(v.re), fmt(v.im)]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_coeffs`]; rows must be complete and in canonical order.
pub fn read_coeffs<R: Read>(input: R) -> Result<CoeffTable> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != ["ell", "m", "re", "im"] {
        return Err(Error::Parse(format!("unexpected coefficient header {header:?}")));
    }
    let mut data = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let field = |k: usize| rec.get(k).ok_or_else(|| Error::Parse(format!("row {}: missing field", i + 1)));
        let ell: usize = field(0)?.trim().parse().map_err(|e| Error::Parse(format!("row {}: ell: {e}", i + 1)))?;
        let m: i64 = field(1)?.trim().parse().map_err(|e| Error::Parse(format!("row {}: m: {e}", i + 1)))?;
        let re: f64 = field(2)?.trim().parse().map_err(|e| Error::Parse(format!("row {}: re: {e}", i + 1)))?;
        let im: f64 = field(3)?.trim().parse().map_err(|e| Error::Parse(format!("row {}: im: {e}", i + 1)))?;
        let want_ell = (i as f64).sqrt().floor() as usize;
        let want_m = i as i64 - (want_ell * want_ell + want_ell) as i64;
        if ell != want_ell || m != want_m {
            return Err(Error::Parse(format!("row {}: expected ({want_ell},{want_m}), got ({ell},{m})", i + 1)));
        }
        data.push(Complex64::new(re, im));
    }
    let n = data.len();
    let l = (n as f64).sqrt().round() as usize;
    if n == 0 || l * l != n {
        return Err(Error::Parse(format!("{n} rows do not form a complete table")));
    }
    CoeffTable::from_vec(l - 1, data)
}

/// Header `r_over_lambda,re_rho,im_rho,abs_rho`.
pub fn write_curve<W: Write>(curve: &SfcCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r_over_lambda", "re_rho", "im_rho", "abs_rho"]).map_err(csv_err)?;
    for (r, v) in curve.r_over_lambda.iter().zip(&curve.values) {
        w.write_record([fmt(*r), fmt(v.re), fmt(v.im), fmt(v.norm())]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Header `theta,phi,value`; `values` is row-major with φ fastest.
pub fn write_grid<W: Write>(thetas: &[f64], phis: &[f64], values: &[f64], out: W) -> Result<()> {
    if values.len() != thetas.len() * phis.len() {
        return Err(Error::Index(format!("{} values for a {}x{} grid", values.len(), thetas.len(), phis.len())));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta", "phi", "value"]).map_err(csv_err)?;
    for (i, t) in thetas.iter().enumerate() {
        for (j, p) in phis.iter().enumerate() {
            w.write_record([fmt(*t), fmt(*p), fmt(values[i * phis.len() + j])]).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Header `index,x,y,z`.
pub fn write_geometry<W: Write>(g: &ArrayGeometry, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "x", "y", "z"]).map_err(csv_err)?;
    for (i, z) in g.positions().iter().enumerate() {
        w.write_record([(i + 1).to_string(), fmt(z[0]), fmt(z[1]), fmt(z[2])]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// One element per line as `x y z` or `x,y,z`; blank lines and `#` comments are skipped.
pub fn parse_positions(text: &str, label: &str) -> Result<ArrayGeometry> {
    let mut positions = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("line {}: expected 3 coordinates", n + 1)));
        }
        let mut z = [0.0; 3];
        for (k, s) in parts.iter().enumerate() {
            z[k] = s.parse().map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
        }
        positions.push(z);
    }
    if positions.is_empty() {
        return Err(Error::Parse("positions file lists no elements".into()));
    }
    ArrayGeometry::new(positions, label)
}

pub fn reports_to_json(reports: &[CheckReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports always serialise")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fb5::mixture_coeffs;
    use crate::sht::WignerPi2Table;

    const DOC: &str = r#"{"components":[
        {"weight":0.4,"kappa":25,"beta":10,"mu":[0,0,1],"eta1":[1,0,0],"eta2":[0,1,0]},
        {"weight":0.6,"kappa":8,"beta":2,"mu":[1,0,0],"eta1":[0,1,0.0000001],"eta2":[0,0,1]}]}"#;

    #[test]
    fn mixture_round_trip() {
        let m = parse_mixture(DOC).unwrap();
        assert_eq!(m.components().len(), 2);
        let again = parse_mixture(&mixture_to_json(&m)).unwrap();
        for ((wa, a), (wb, b)) in m.components().iter().zip(again.components()) {
            assert_eq!((wa, a.kappa(), a.beta()), (wb, b.kappa(), b.beta()));
            for (u, v) in [(a.mu(), b.mu()), (a.eta1(), b.eta1()), (a.eta2(), b.eta2())] {
                assert!(u.iter().zip(&v).all(|(x, y)| (x - y).abs() < 1e-15));
            }
        }
    }

    #[test]
    fn mixture_errors() {
        assert!(matches!(parse_mixture("{"), Err(Error::Parse(_))));
        assert!(matches!(parse_mixture(r#"{"components":[{"weight":1}]}"#), Err(Error::Parse(_))));
        let bad_beta = DOC.replace("\"beta\":10", "\"beta\":13");
        assert!(matches!(parse_mixture(&bad_beta), Err(Error::Constraint(_))));
        let bad_frame = DOC.replace("0.0000001", "0.1");
        assert!(matches!(parse_mixture(&bad_frame), Err(Error::Constraint(_))));
    }

    #[test]
    fn coeff_round_trip_is_exact() {
        let m = parse_mixture(DOC).unwrap();
        let c = mixture_coeffs(&m, 12, &WignerPi2Table::new(12)).unwrap();
        let mut buf = Vec::new();
        write_coeffs(&c, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("ell,m,re,im\n0,0,"));
        assert_eq!(text.lines().count(), 1 + 169);
        let back = read_coeffs(&buf[..]).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn coeff_csv_rejects_bad_tables() {
        assert!(read_coeffs("ell,m,re,im\n0,0,1,0\n1,0,0,0\n".as_bytes()).is_err());
        assert!(read_coeffs("ell,m,re,im\n0,1,1,0\n".as_bytes()).is_err());
        assert!(read_coeffs("a,b,c,d\n0,0,1,0\n".as_bytes()).is_err());
        assert!(read_coeffs("ell,m,re,im\n0,0,x,0\n".as_bytes()).is_err());
    }

    #[test]
    fn positions_parsing() {
        let g = parse_positions("# square\n1 0 0\n0,1,0\n\n-1 0 0 # left\n", "sq").unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.element(3).unwrap(), [-1.0, 0.0, 0.0]);
        assert!(parse_positions("1 2\n", "x").is_err());
        assert!(parse_positions("", "x").is_err());
    }
}
