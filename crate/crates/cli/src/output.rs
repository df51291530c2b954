//! CSV and JSON writers. Every float is printed with 17 significant digits
//! (`{:.16e}`), so outputs round-trip exactly and are bit-identical across
//! identical runs.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use petviashvili::{Domain, Field, IterationTrace};

use crate::error::CliError;

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON with floats in `{:.16e}` form.
struct ExactFloats<'a>(PrettyFormatter<'a>);

impl Formatter for ExactFloats<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::Runtime(format!("serializing JSON: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    fs::write(dir.join(name), to_json(value)?)?;
    Ok(())
}

/// `iter,residual,factor_discrepancy,norm`; the discrepancy is empty for
/// engines without a factor.
pub fn trace_csv(trace: &IterationTrace) -> String {
    let mut out = String::from("iter,residual,factor_discrepancy,norm\n");
    for r in &trace.records {
        let d = r.factor_discrepancy.map(float).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{}", r.iteration, float(r.residual), d, float(r.norm));
    }
    out
}

/// `x,re,im` on a line; `x,z,re,im` row-major (x outer) on a plane.
pub fn profile_csv(u: &Field) -> String {
    let values = u.to_complex_vec();
    let mut out = String::new();
    match u.domain() {
        Domain::Line(g) => {
            out.push_str("x,re,im\n");
            for (x, v) in g.nodes().iter().zip(&values) {
                let _ = writeln!(out, "{},{},{}", float(*x), float(v.re), float(v.im));
            }
        }
        Domain::Plane(g) => {
            out.push_str("x,z,re,im\n");
            let (xs, zs) = (g.x.nodes(), g.z.nodes());
            for (ix, x) in xs.iter().enumerate() {
                for (iz, z) in zs.iter().enumerate() {
                    let v = values[g.index(ix, iz)];
                    let _ = writeln!(out, "{},{},{},{}", float(*x), float(*z), float(v.re), float(v.im));
                }
            }
        }
    }
    out
}

/// Cross sections through the modulus peak of a 2D field:
/// `(along x at the peak z, along z at the peak x)`.
pub fn cross_sections(u: &Field) -> Option<(String, String)> {
    let g = u.domain().as_plane()?;
    let values = u.to_complex_vec();
    let peak = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(j, _)| j)?;
    let (px, pz) = (peak / g.z.points(), peak % g.z.points());
    let mut along_x = String::from("x,re,im\n");
    for (ix, x) in g.x.nodes().iter().enumerate() {
        let v = values[g.index(ix, pz)];
        let _ = writeln!(along_x, "{},{},{}", float(*x), float(v.re), float(v.im));
    }
    let mut along_z = String::from("z,re,im\n");
    for (iz, z) in g.z.nodes().iter().enumerate() {
        let v = values[g.index(px, iz)];
        let _ = writeln!(along_z, "{},{},{}", float(*z), float(v.re), float(v.im));
    }
    Some((along_x, along_z))
}

pub fn write_profile(dir: &Path, u: &Field, cross: bool) -> Result<(), CliError> {
    fs::write(dir.join("profile.csv"), profile_csv(u))?;
    if cross {
        if let Some((x, z)) = cross_sections(u) {
            fs::write(dir.join("profile_x.csv"), x)?;
            fs::write(dir.join("profile_z.csv"), z)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use petviashvili::{Grid1D, Grid2D};

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(-3.0), "-3.0000000000000000e0");
        let back: f64 = float(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn json_uses_exact_floats_and_null_for_nan() {
        #[derive(Serialize)]
        struct S {
            a: f64,
            b: f64,
            n: usize,
        }
        let text = to_json(&S { a: 0.5, b: f64::NAN, n: 3 }).unwrap();
        assert!(text.contains("\"a\": 5.0000000000000000e-1"), "{text}");
        assert!(text.contains("\"b\": null"));
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["a"].as_f64(), Some(0.5));
    }

    #[test]
    fn profile_layouts() {
        let line = Field::real(Grid1D::new(1.0, 4).unwrap(), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let csv = profile_csv(&line);
        assert!(csv.starts_with("x,re,im\n"));
        assert_eq!(csv.lines().count(), 5);

        let g = Grid2D::square(1.0, 4).unwrap();
        let mut v = vec![0.0; 16];
        v[g.index(1, 2)] = 5.0;
        let plane = Field::real(g, v).unwrap();
        assert!(profile_csv(&plane).starts_with("x,z,re,im\n"));
        let (x, z) = cross_sections(&plane).unwrap();
        assert_eq!(x.lines().nth(2).unwrap().split(',').nth(1).unwrap(), float(5.0));
        assert_eq!(z.lines().nth(3).unwrap().split(',').nth(1).unwrap(), float(5.0));
    }
}
