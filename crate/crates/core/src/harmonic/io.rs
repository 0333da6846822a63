//! Density files (`x1,...,xn,value` CSV or JSON) and spectrum JSON.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::fourier::{ExactSpectrum, Spectrum};
use crate::density::Density;
use crate::error::{Error, Result};
use crate::ring::RingContext;
use crate::scalar::{render_q, Scalar};

/// Reads a density; points absent from the file are zero.
pub fn read_density_csv<S: Scalar, R: Read>(ctx: &RingContext, reader: R) -> Result<Density<S>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let n = ctx.dim();
    let headers = rdr.headers().map_err(|e| Error::Parse(format!("header: {e}")))?;
    let expected: Vec<String> = (1..=n).map(|i| format!("x{i}")).chain(["value".to_string()]).collect();
    if headers.iter().collect::<Vec<_>>() != expected.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(Error::Parse(format!("header must be `{}`", expected.join(","))));
    }
    let mut values = vec![S::zero(); ctx.num_points()];
    let mut seen = vec![false; ctx.num_points()];
    for (row, record) in rdr.records().enumerate() {
        let row = row + 2;
        let record = record.map_err(|e| Error::Parse(format!("row {row}: {e}")))?;
        if record.len() != n + 1 {
            return Err(Error::Parse(format!("row {row}: expected {} fields, got {}", n + 1, record.len())));
        }
        let mut x = Vec::with_capacity(n);
        for field in record.iter().take(n) {
            let c: u64 = field
                .parse()
                .map_err(|_| Error::Parse(format!("row {row}: bad coordinate `{field}`")))?;
            if c >= ctx.modulus() {
                return Err(Error::Parse(format!("row {row}: coordinate {c} not reduced mod {}", ctx.modulus())));
            }
            x.push(c);
        }
        let raw = &record[n];
        let v = S::parse(raw).ok_or_else(|| Error::Parse(format!("row {row}: bad value `{raw}`")))?;
        let i = ctx.index(&x);
        if seen[i] {
            return Err(Error::Parse(format!("row {row}: duplicate point {x:?}")));
        }
        seen[i] = true;
        values[i] = v;
    }
    Density::new(ctx.clone(), values)
}

pub fn write_density_csv<S: Scalar, W: Write>(f: &Density<S>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let n = f.ctx().dim();
    let io = |e: csv::Error| Error::Parse(e.to_string());
    let header: Vec<String> = (1..=n).map(|i| format!("x{i}")).chain(["value".to_string()]).collect();
    w.write_record(&header).map_err(io)?;
    for (i, v) in f.values().iter().enumerate() {
        let mut rec: Vec<String> = f.ctx().coords(i).iter().map(u64::to_string).collect();
        rec.push(v.render());
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct DensityFile {
    schema: u32,
    modulus: u64,
    dim: usize,
    /// Values in lexicographic point order.
    values: Vec<String>,
}

pub fn density_to_json<S: Scalar>(f: &Density<S>) -> Value {
    serde_json::to_value(DensityFile {
        schema: 1,
        modulus: f.ctx().modulus(),
        dim: f.ctx().dim(),
        values: f.values().iter().map(Scalar::render).collect(),
    })
    .expect("plain data")
}

pub fn density_from_json<S: Scalar>(ctx: &RingContext, value: &Value) -> Result<Density<S>> {
    let file: DensityFile =
        serde_json::from_value(value.clone()).map_err(|e| Error::Parse(format!("density JSON: {e}")))?;
    if file.modulus != ctx.modulus() || file.dim != ctx.dim() {
        return Err(Error::Parse(format!(
            "density is over (Z/{})^{}, expected (Z/{})^{}",
            file.modulus,
            file.dim,
            ctx.modulus(),
            ctx.dim()
        )));
    }
    let values = file
        .values
        .iter()
        .enumerate()
        .map(|(i, s)| S::parse(s).ok_or_else(|| Error::Parse(format!("value {i}: bad number `{s}`"))))
        .collect::<Result<Vec<S>>>()?;
    Density::new(ctx.clone(), values)
}

pub fn spectrum_to_json(s: &Spectrum) -> Value {
    let ctx = s.ctx();
    let coeffs: Vec<Value> = s
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let a = ctx.coords(i);
            json!({"a": a, "valuation": ctx.valuation(&a), "re": c.re, "im": c.im})
        })
        .collect();
    json!({"schema": 1, "lane": "float", "modulus": ctx.modulus(), "dim": ctx.dim(), "coefficients": coeffs})
}

/// Exact coefficients as `scale · Σ_k c_k ζ^k` with `ζ = e(1/N)`.
pub fn exact_spectrum_to_json(s: &ExactSpectrum) -> Value {
    let ctx = s.ctx();
    let coeffs: Vec<Value> = (0..ctx.num_points())
        .map(|i| {
            let a = ctx.coords(i);
            json!({"a": a, "valuation": ctx.valuation(&a), "zeta_powers": s.numerator(i)})
        })
        .collect();
    json!({
        "schema": 1,
        "lane": "exact",
        "modulus": ctx.modulus(),
        "dim": ctx.dim(),
        "scale": render_q(&s.scale()),
        "coefficients": coeffs,
    })
}

/// Reads either spectrum layout back as a float spectrum.
pub fn spectrum_from_json(ctx: &RingContext, value: &Value) -> Result<Spectrum> {
    let bad = |m: &str| Error::Parse(format!("spectrum JSON: {m}"));
    if value["modulus"].as_u64() != Some(ctx.modulus()) || value["dim"].as_u64() != Some(ctx.dim() as u64) {
        return Err(bad("ring does not match"));
    }
    let lane = value["lane"].as_str().ok_or_else(|| bad("missing lane"))?;
    let entries = value["coefficients"].as_array().ok_or_else(|| bad("missing coefficients"))?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); ctx.num_points()];
    let scale = match lane {
        "exact" => Some(
            value["scale"]
                .as_str()
                .and_then(crate::scalar::parse_q)
                .ok_or_else(|| bad("missing scale"))?,
        ),
        "float" => None,
        other => return Err(bad(&format!("unknown lane `{other}`"))),
    };
    for (row, e) in entries.iter().enumerate() {
        let a: Vec<u64> = serde_json::from_value(e["a"].clone()).map_err(|_| bad(&format!("entry {row}: bad `a`")))?;
        if a.len() != ctx.dim() || a.iter().any(|&c| c >= ctx.modulus()) {
            return Err(bad(&format!("entry {row}: frequency out of range")));
        }
        let c = match &scale {
            Some(scale) => {
                let powers: Vec<i128> = serde_json::from_value(e["zeta_powers"].clone())
                    .map_err(|_| bad(&format!("entry {row}: bad `zeta_powers`")))?;
                if powers.len() != ctx.modulus() as usize {
                    return Err(bad(&format!("entry {row}: expected {} powers", ctx.modulus())));
                }
                super::cyclotomic::evaluate(&powers, scale)
            }
            None => {
                let re = e["re"].as_f64().ok_or_else(|| bad(&format!("entry {row}: bad `re`")))?;
                let im = e["im"].as_f64().ok_or_else(|| bad(&format!("entry {row}: bad `im`")))?;
                Complex64::new(re, im)
            }
        };
        coeffs[ctx.index(&a)] = c;
    }
    Spectrum::new(ctx.clone(), coeffs)
}

/// Reads the exact layout written by [`exact_spectrum_to_json`].
pub fn exact_spectrum_from_json(ctx: &RingContext, value: &Value) -> Result<ExactSpectrum> {
    let bad = |m: &str| Error::Parse(format!("spectrum JSON: {m}"));
    if value["modulus"].as_u64() != Some(ctx.modulus()) || value["dim"].as_u64() != Some(ctx.dim() as u64) {
        return Err(bad("ring does not match"));
    }
    if value["lane"].as_str() != Some("exact") {
        return Err(bad("not an exact spectrum"));
    }
    let scale = value["scale"]
        .as_str()
        .and_then(crate::scalar::parse_q)
        .ok_or_else(|| bad("missing scale"))?;
    let entries = value["coefficients"].as_array().ok_or_else(|| bad("missing coefficients"))?;
    let mut numerators = vec![vec![0i128; ctx.modulus() as usize]; ctx.num_points()];
    for (row, e) in entries.iter().enumerate() {
        let a: Vec<u64> = serde_json::from_value(e["a"].clone()).map_err(|_| bad(&format!("entry {row}: bad `a`")))?;
        if a.len() != ctx.dim() || a.iter().any(|&c| c >= ctx.modulus()) {
            return Err(bad(&format!("entry {row}: frequency out of range")));
        }
        let powers: Vec<i128> = serde_json::from_value(e["zeta_powers"].clone())
            .map_err(|_| bad(&format!("entry {row}: bad `zeta_powers`")))?;
        if powers.len() != ctx.modulus() as usize {
            return Err(bad(&format!("entry {row}: expected {} powers", ctx.modulus())));
        }
        numerators[ctx.index(&a)] = powers;
    }
    ExactSpectrum::from_parts(ctx.clone(), numerators, scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::fourier::{fourier_exact, fourier_float};
    use crate::scalar::Q;

    #[test]
    fn exact_spectrum_json_round_trip() {
        let ctx = RingContext::plain(6, 2).unwrap();
        let f = Density::<Q>::from_fn(&ctx, |x| Q::new((x[0] * 5 + x[1]) as i128 % 7, 3));
        let s = fourier_exact(&f);
        let back = exact_spectrum_from_json(&ctx, &exact_spectrum_to_json(&s)).unwrap();
        assert!(back.equals(&s));
        assert_eq!(back.inverse().unwrap(), f);
    }

    #[test]
    fn csv_round_trip_exact() {
        let ctx = RingContext::plain(3, 2).unwrap();
        let f = Density::<Q>::from_fn(&ctx, |x| Q::new(x[0] as i128 - 1, 1 + x[1] as i128));
        let mut buf = Vec::new();
        write_density_csv(&f, &mut buf).unwrap();
        let g: Density<Q> = read_density_csv(&ctx, buf.as_slice()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn csv_errors_name_the_row() {
        let ctx = RingContext::plain(3, 2).unwrap();
        let text = "x1,x2,value\n0,0,1\n1,7,1/2\n";
        let err = read_density_csv::<Q, _>(&ctx, text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("row 3"), "{err}");
        let text = "x1,x2,value\n0,0,abc\n";
        let err = read_density_csv::<f64, _>(&ctx, text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
    }

    #[test]
    fn sparse_csv_fills_zeros() {
        let ctx = RingContext::plain(2, 2).unwrap();
        let f: Density<Q> = read_density_csv(&ctx, "x1,x2,value\n1,1,0.5\n".as_bytes()).unwrap();
        assert_eq!(f.values()[3], Q::new(1, 2));
        assert_eq!(f.sum(), Q::new(1, 2));
    }

    #[test]
    fn spectrum_json_round_trips_through_inverse() {
        let ctx = RingContext::plain(4, 2).unwrap();
        let f = Density::<Q>::from_fn(&ctx, |x| Q::new((x[0] * 3 + x[1]) as i128 % 5, 2));
        let back = spectrum_from_json(&ctx, &exact_spectrum_to_json(&fourier_exact(&f))).unwrap();
        assert!(back.inverse_real().max_abs_diff(&f.to_f64()) < 1e-12);
        let back = spectrum_from_json(&ctx, &spectrum_to_json(&fourier_float(&f.to_f64()))).unwrap();
        assert!(back.inverse_real().max_abs_diff(&f.to_f64()) < 1e-12);
        let g: Density<Q> = density_from_json(&ctx, &density_to_json(&f)).unwrap();
        assert_eq!(f, g);
    }
}
