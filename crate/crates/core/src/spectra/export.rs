use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::Serialize;

use super::shift::ShiftTable;
use super::sweep::{Backend, Observable, Spectrum, SweptParameter};
use crate::constants::TAU;
use crate::error::{Error, Result};

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

fn fmt(v: f64) -> String {
    format!("{v:e}")
}

fn comments<W: Write>(out: &mut W, lines: &[String]) -> Result<()> {
    for l in lines {
        writeln!(out, "# {l}")?;
    }
    Ok(())
}

fn observable_unit(o: Observable) -> &'static str {
    match o {
        Observable::ImRhoBa | Observable::Transmission => "1",
    }
}

fn provenance_lines(s: &Spectrum) -> Vec<String> {
    let mut v = vec![format!("backend={}", s.backend.name())];
    v.extend(s.provenance.iter().map(|(k, x)| format!("{k}={x}")));
    v
}

/// Spectrum as CSV. `preamble` and the full provenance record go first as
/// `#` lines, then a `name[unit]` header.
pub fn write_spectrum_csv<W: Write>(s: &Spectrum, preamble: &[String], mut out: W) -> Result<()> {
    comments(&mut out, preamble)?;
    comments(&mut out, &provenance_lines(s))?;
    let mut w = writer(out);
    w.write_record([
        format!("{}[{}]", s.parameter.name(), s.parameter.unit()),
        format!("{}[{}]", s.observable.name(), observable_unit(s.observable)),
    ])
    .map_err(csv_err)?;
    for (x, y) in s.axis.iter().zip(&s.values) {
        w.write_record([fmt(*x), fmt(*y)]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Point<'a> {
    parameter: &'a str,
    axis: f64,
    unit: &'a str,
    observable: &'a str,
    value: f64,
    backend: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    power: Option<f64>,
}

/// One JSON object per axis point.
pub fn write_spectrum_jsonl<W: Write>(s: &Spectrum, power: Option<f64>, mut out: W) -> Result<()> {
    for (x, y) in s.axis.iter().zip(&s.values) {
        let p = Point {
            parameter: s.parameter.name(),
            axis: *x,
            unit: s.parameter.unit(),
            observable: s.observable.name(),
            value: *y,
            backend: s.backend.name(),
            power,
        };
        serde_json::to_writer(&mut out, &p).map_err(|e| Error::Io(e.to_string()))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Power map in long format: one row per `(power, axis)` pair.
pub fn write_power_map_csv<W: Write>(map: &[(f64, Spectrum)], preamble: &[String], mut out: W) -> Result<()> {
    comments(&mut out, preamble)?;
    if let Some((_, first)) = map.first() {
        comments(&mut out, &provenance_lines(first))?;
    }
    let mut w = writer(out);
    if let Some((_, s)) = map.first() {
        w.write_record([
            "mw_power[dBm]".to_string(),
            format!("{}[{}]", s.parameter.name(), s.parameter.unit()),
            format!("{}[{}]", s.observable.name(), observable_unit(s.observable)),
        ])
        .map_err(csv_err)?;
    }
    for (p, s) in map {
        for (x, y) in s.axis.iter().zip(&s.values) {
            w.write_record([fmt(*p), fmt(*x), fmt(*y)]).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

/// Shift table as CSV; failed cells have empty numeric fields and the
/// error text in the last column.
pub fn write_shift_table_csv<W: Write>(t: &ShiftTable, preamble: &[String], mut out: W) -> Result<()> {
    comments(&mut out, preamble)?;
    comments(&mut out, &[format!("reference_center={}", fmt(t.reference.center))])?;
    let mut w = writer(out);
    w.write_record([
        "mw_detuning[rad/s]",
        "mw_power[dBm]",
        "omega_mu[rad/s]",
        "shift[rad/s]",
        "center[rad/s]",
        "contrast[1]",
        "fwhm[rad/s]",
        "error",
    ])
    .map_err(csv_err)?;
    for c in &t.cells {
        let m = c.metrics.as_ref();
        w.write_record([
            fmt(c.detuning),
            fmt(c.power),
            fmt(c.omega_mu),
            opt(c.shift),
            opt(m.map(|m| m.center)),
            opt(m.map(|m| m.contrast)),
            opt(m.map(|m| m.fwhm)),
            c.error.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Splits `name[unit]`.
pub fn parse_header(h: &str) -> Result<(String, String)> {
    let h = h.trim();
    match (h.find('['), h.strip_suffix(']')) {
        (Some(i), Some(body)) if i > 0 => Ok((h[..i].trim().to_string(), body[i + 1..].trim().to_string())),
        _ => Err(Error::Data(format!("column header {h:?} is not of the form name[unit]"))),
    }
}

/// Factor converting an axis unit to the internal one.
fn axis_factor(p: SweptParameter, unit: &str) -> Result<f64> {
    let f = match (p, unit) {
        (SweptParameter::MwPowerDbm, "dBm") => 1.0,
        (SweptParameter::MwPowerDbm, _) => f64::NAN,
        (_, "rad/s") => 1.0,
        (_, "Hz") => TAU,
        (_, "kHz") => TAU * 1e3,
        (_, "MHz") => TAU * 1e6,
        _ => f64::NAN,
    };
    if f.is_nan() {
        return Err(Error::Data(format!("unit {unit:?} not accepted for {}", p.name())));
    }
    Ok(f)
}

fn parameter_from_name(n: &str) -> Result<SweptParameter> {
    [SweptParameter::TwoPhotonDetuning, SweptParameter::MwPowerDbm, SweptParameter::MwDetuning]
        .into_iter()
        .find(|p| p.name() == n)
        .ok_or_else(|| Error::Data(format!("unknown axis column {n:?}")))
}

fn observable_from_name(n: &str) -> Result<Observable> {
    [Observable::ImRhoBa, Observable::Transmission]
        .into_iter()
        .find(|o| o.name() == n)
        .ok_or_else(|| Error::Data(format!("unknown observable column {n:?}")))
}

/// Reads a two-column `name[unit]` CSV as written by
/// [`write_spectrum_csv`]. Axis values are converted to internal units;
/// `#` lines are ignored.
pub fn read_spectrum_csv<R: BufRead>(input: R) -> Result<Spectrum> {
    let mut body = String::new();
    for line in input.lines() {
        let line = line?;
        if !line.trim_start().starts_with('#') && !line.trim().is_empty() {
            body.push_str(&line);
            body.push('\n');
        }
    }
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(body.as_bytes());
    let headers = r.headers().map_err(|e| Error::Data(e.to_string()))?.clone();
    if headers.len() != 2 {
        return Err(Error::Data(format!("expected 2 columns, found {}", headers.len())));
    }
    let (an, au) = parse_header(&headers[0])?;
    let (on, ou) = parse_header(&headers[1])?;
    let parameter = parameter_from_name(&an)?;
    let observable = observable_from_name(&on)?;
    if !matches!(ou.as_str(), "1" | "") {
        return Err(Error::Data(format!("observable unit must be dimensionless, got {ou:?}")));
    }
    let factor = axis_factor(parameter, &au)?;
    let (mut axis, mut values) = (Vec::new(), Vec::new());
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::Data(e.to_string()))?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| Error::Data(format!("row {}: column {} is not a number", row + 1, i + 1)))
        };
        axis.push(num(0)? * factor);
        values.push(num(1)?);
    }
    let s = Spectrum { parameter, observable, backend: Backend::Analytic, axis, values, provenance: BTreeMap::new() };
    s.validate()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Spectrum {
        Spectrum {
            parameter: SweptParameter::TwoPhotonDetuning,
            observable: Observable::ImRhoBa,
            backend: Backend::Numeric,
            axis: vec![-1.0, 0.0, 1.5],
            values: vec![0.1, -0.25, 3e-9],
            provenance: BTreeMap::from([("a.b".to_string(), "2".to_string())]),
        }
    }

    #[test]
    fn csv_round_trip() {
        let mut buf = Vec::new();
        write_spectrum_csv(&sample(), &["version=1".into()], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(!text.contains('\r'));
        assert!(text.starts_with("# version=1\n# backend=numeric\n# a.b=2\n"));
        let back = read_spectrum_csv(buf.as_slice()).unwrap();
        assert_eq!(back.axis, sample().axis);
        assert_eq!(back.values, sample().values);
    }

    #[test]
    fn reader_converts_units() {
        let text = "two_photon_detuning[kHz],im_rho_ba[1]\n-1,0\n0,1\n1,0\n";
        let s = read_spectrum_csv(text.as_bytes()).unwrap();
        assert!((s.axis[2] - TAU * 1e3).abs() < 1e-9);
        assert!(read_spectrum_csv("two_photon_detuning[furlong],im_rho_ba[1]\n0,1\n".as_bytes()).is_err());
        assert!(read_spectrum_csv("x,y\n0,1\n".as_bytes()).is_err());
        assert!(read_spectrum_csv("two_photon_detuning[Hz],im_rho_ba[1]\n1,0\n0,1\n".as_bytes()).is_err());
    }

    #[test]
    fn jsonl_has_one_line_per_point() {
        let mut buf = Vec::new();
        write_spectrum_jsonl(&sample(), Some(-3.0), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        let v: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
        assert_eq!(v["value"], -0.25);
        assert_eq!(v["power"], -3.0);
        assert_eq!(v["backend"], "numeric");
    }

    #[test]
    fn header_parsing() {
        assert_eq!(parse_header(" a[rad/s] ").unwrap(), ("a".into(), "rad/s".into()));
        assert!(parse_header("[x]").is_err());
        assert!(parse_header("a").is_err());
    }
}
