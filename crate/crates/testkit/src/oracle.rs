//! A straight-line re-derivation of the layer fold, reading the dataset
//! JSONL and the query document JSON directly.

use serde_json::Value;

type Rgba = [f64; 4];

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

/// Dataset as parsed JSON plus pooled min/max per normalized field.
pub struct OracleData {
    runs: Vec<Vec<Value>>,
    ranges: Vec<(&'static str, f64, f64)>,
}

impl OracleData {
    pub fn from_jsonl(text: &str) -> Self {
        let runs: Vec<Vec<Value>> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let v: Value = serde_json::from_str(l).expect("json line");
                v["turns"].as_array().expect("turns").clone()
            })
            .collect();
        let mut ranges = Vec::new();
        for field in ["budget", "duration_s", "population", "favorability"] {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for turn in runs.iter().flatten() {
                let vals: Vec<f64> = if field == "budget" || field == "duration_s" {
                    vec![num(&turn[field])]
                } else {
                    turn["districts"].as_array().unwrap().iter().map(|d| num(&d[field])).collect()
                };
                for x in vals {
                    lo = lo.min(x);
                    hi = hi.max(x);
                }
            }
            if hi <= lo {
                hi = lo + 1.0;
            }
            ranges.push((field, lo, hi));
        }
        OracleData { runs, ranges }
    }

    pub fn playthroughs(&self) -> usize {
        self.runs.len()
    }

    pub fn turns(&self, run: usize) -> usize {
        self.runs[run].len()
    }

    fn scaled(&self, field: &str, x: f64) -> f64 {
        let &(_, lo, hi) = self.ranges.iter().find(|r| r.0 == field).unwrap();
        let v = (x - lo) / (hi - lo);
        if v < 0.0 {
            0.0
        } else if v > 1.0 {
            1.0
        } else {
            v
        }
    }

    /// Normalized parameter `p` for a reference string; 0 where it does
    /// not resolve.
    pub fn param(&self, run: usize, turn: usize, reference: &str) -> f64 {
        let rec = &self.runs[run][turn];
        let parts: Vec<&str> = reference.split('.').collect();
        let district = |id: &str| -> Option<&Value> {
            let id: usize = id.parse().ok()?;
            rec["districts"].as_array()?.iter().find(|d| d["id"].as_u64() == Some(id as u64))
        };
        match parts.as_slice() {
            ["baseline"] => 1.0,
            ["budget"] => self.scaled("budget", num(&rec["budget"])),
            ["duration"] => self.scaled("duration_s", num(&rec["duration_s"])),
            ["district", id, field] => {
                let Some(d) = district(id) else { return 0.0 };
                let key = match *field {
                    "for_share" => "for",
                    "against_share" => "against",
                    f => f,
                };
                match key {
                    "population" | "favorability" => self.scaled(key, num(&d[key])),
                    _ => d.get(key).and_then(Value::as_f64).unwrap_or(0.0),
                }
            }
            ["action", name, "district", id] => district(id)
                .and_then(|d| d["actions"].get(*name))
                .and_then(Value::as_f64)
                .unwrap_or(0.0),
            _ => 0.0,
        }
    }
}

/// Curve value from the document's curve object.
pub fn curve_value(curve: &Value, t: f64) -> f64 {
    let ph = t - t.floor();
    if let Some(preset) = curve.get("preset") {
        let name = preset.as_str().or_else(|| preset["name"].as_str()).unwrap();
        return match name {
            "flat" => num(&preset["value"]),
            "ramp" => {
                let e = 1.0 / 1024.0;
                if ph < 1.0 - e {
                    ph / (1.0 - e)
                } else {
                    (1.0 - ph) / e
                }
            }
            "pulse" => {
                let c = num(&preset["center"]);
                let half = num(&preset["width"]) / 2.0;
                let mut d = (ph - c).abs();
                if d > 0.5 {
                    d = 1.0 - d;
                }
                (1.0 - d / half).max(0.0)
            }
            other => panic!("preset {other}"),
        };
    }
    let keys: Vec<(f64, f64)> = curve["keyframes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|k| (num(&k[0]), num(&k[1])))
        .collect();
    if keys.len() == 1 {
        return keys[0].1;
    }
    // Find the last key at or before ph, wrapping to the final key when ph
    // precedes the first.
    let mut i = keys.len() - 1;
    for (j, k) in keys.iter().enumerate() {
        if k.0 <= ph {
            i = j;
        }
    }
    let (t0, v0) = keys[i];
    let (mut t1, v1) = keys[(i + 1) % keys.len()];
    let mut x = ph;
    if t1 <= t0 {
        t1 += 1.0;
        if x < t0 {
            x += 1.0;
        }
    }
    v0 + (v1 - v0) * (x - t0) / (t1 - t0)
}

/// Color from the document's scale object at position `c`.
pub fn scale_color(scale: &Value, c: f64) -> Rgba {
    let stops: Vec<(f64, Rgba)> = scale["stops"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| {
            let col = s[1].as_array().unwrap();
            (num(&s[0]), [num(&col[0]), num(&col[1]), num(&col[2]), num(&col[3])])
        })
        .collect();
    let first = stops[0];
    let last = stops[stops.len() - 1];
    if c < first.0 {
        return first.1;
    }
    if c >= last.0 {
        return last.1;
    }
    let mut k = 0;
    while k + 1 < stops.len() && stops[k + 1].0 <= c {
        k += 1;
    }
    let (p0, c0) = stops[k];
    let (p1, c1) = stops[k + 1];
    let w = (c - p0) / (p1 - p0);
    let mut out = [0.0; 4];
    for ch in 0..4 {
        out[ch] = c0[ch] + (c1[ch] - c0[ch]) * w;
    }
    out
}

pub fn combine(mode: &str, below: Rgba, top: Rgba) -> Rgba {
    match mode {
        "add" => [0, 1, 2, 3].map(|i| (below[i] + top[i]).min(1.0)),
        "multiply" => [0, 1, 2, 3].map(|i| below[i] * top[i]),
        "mask" => [below[0], below[1], below[2], below[3].min(top[3])],
        other => panic!("mode {other}"),
    }
}

/// Final color of one point under the document's layer stack.
pub fn fold(doc: &Value, data: &OracleData, run: usize, turn: usize, t: f64) -> Rgba {
    let mut acc = [0.0; 4];
    for layer in doc["layers"].as_array().unwrap() {
        let a = curve_value(&layer["curve"], t);
        let p = data.param(run, turn, layer["parameter"].as_str().unwrap());
        let m = layer.get("multiplier").map(num).unwrap_or(1.0);
        let c = (a * p * m).max(0.0).min(1.0);
        acc = combine(layer["blend"].as_str().unwrap(), acc, scale_color(&layer["scale"], c));
    }
    acc
}
