use serde_json::{Map, Value};

use crate::data::{ParameterRef, ParameterRegistry};
use crate::kinetics::{Color, ColorScale, ColorStop, CurvePreset, KineticsError};
use crate::pipeline::BlendMode;
use crate::render::{AnimationFormat, Margins, RenderConfig};

use super::{CurveSpec, Diagnostic, LayerSpec, QueryDocument, QueryError};

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

#[derive(Default)]
struct Parser {
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn error(&mut self, path: &str, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(path, msg));
    }

    fn object<'v>(&mut self, v: &'v Value, path: &str, known: &[&str]) -> Option<&'v Map<String, Value>> {
        let Some(obj) = v.as_object() else {
            self.error(path, format!("expected object, got {}", kind(v)));
            return None;
        };
        for key in obj.keys().filter(|k| !known.contains(&k.as_str())) {
            self.diags.push(Diagnostic::warning(format!("{path}/{}", escape(key)), format!("unknown field \"{key}\" ignored")));
        }
        Some(obj)
    }

    fn number(&mut self, v: &Value, path: &str) -> Option<f64> {
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.error(path, format!("expected number, got {}", kind(v)));
                None
            }
        }
    }

    fn uint(&mut self, v: &Value, path: &str) -> Option<u32> {
        match v.as_u64().and_then(|x| u32::try_from(x).ok()) {
            Some(x) => Some(x),
            None => {
                self.error(path, format!("expected non-negative integer, got {v}"));
                None
            }
        }
    }

    fn string<'v>(&mut self, v: &'v Value, path: &str) -> Option<&'v str> {
        let s = v.as_str();
        if s.is_none() {
            self.error(path, format!("expected string, got {}", kind(v)));
        }
        s
    }

    fn array<'v>(&mut self, v: &'v Value, path: &str, len: Option<usize>) -> Option<&'v [Value]> {
        let Some(a) = v.as_array() else {
            self.error(path, format!("expected array, got {}", kind(v)));
            return None;
        };
        if let Some(n) = len {
            if a.len() != n {
                self.error(path, format!("expected {n} elements, got {}", a.len()));
                return None;
            }
        }
        Some(a)
    }

    fn required<'v>(&mut self, obj: &'v Map<String, Value>, key: &str, path: &str) -> Option<&'v Value> {
        let v = obj.get(key);
        if v.is_none() {
            self.error(&format!("{path}/{key}"), format!("missing required field \"{key}\""));
        }
        v
    }

    fn color(&mut self, v: &Value, path: &str) -> Option<Color> {
        let a = self.array(v, path, Some(4))?;
        let mut ch = [0.0; 4];
        let mut ok = true;
        for (i, x) in a.iter().enumerate() {
            match self.number(x, &format!("{path}/{i}")) {
                Some(x) => ch[i] = x,
                None => ok = false,
            }
        }
        let c = Color::new(ch[0], ch[1], ch[2], ch[3]);
        if ok && !c.is_valid() {
            self.error(path, "color channels must lie in [0, 1]");
            return None;
        }
        ok.then_some(c)
    }

    fn curve(&mut self, v: &Value, path: &str) -> Option<CurveSpec> {
        let obj = self.object(v, path, &["preset", "keyframes"])?;
        let spec = match (obj.get("preset"), obj.get("keyframes")) {
            (Some(_), Some(_)) => {
                self.error(path, "give either \"preset\" or \"keyframes\", not both");
                return None;
            }
            (None, None) => {
                self.error(path, "curve needs \"preset\" or \"keyframes\"");
                return None;
            }
            (Some(p), None) => CurveSpec::Preset(self.preset(p, &format!("{path}/preset"))?),
            (None, Some(k)) => {
                let kpath = format!("{path}/keyframes");
                let items = self.array(k, &kpath, None)?;
                let mut keys = Vec::with_capacity(items.len());
                for (i, item) in items.iter().enumerate() {
                    let ipath = format!("{kpath}/{i}");
                    let pair = self.array(item, &ipath, Some(2))?;
                    let t = self.number(&pair[0], &format!("{ipath}/0"));
                    let val = self.number(&pair[1], &format!("{ipath}/1"));
                    keys.push([t?, val?]);
                }
                CurveSpec::Keyframes(keys)
            }
        };
        if let Err(e) = spec.build() {
            let at = match (&spec, &e) {
                (CurveSpec::Keyframes(_), KineticsError::KeyframePhase { index, .. } | KineticsError::KeyframeOrder { index }) => {
                    format!("{path}/keyframes/{index}/0")
                }
                (CurveSpec::Keyframes(_), KineticsError::KeyframeValue { index, .. }) => format!("{path}/keyframes/{index}/1"),
                (CurveSpec::Keyframes(_), _) => format!("{path}/keyframes"),
                (CurveSpec::Preset(_), _) => format!("{path}/preset"),
            };
            self.error(&at, e.to_string());
            return None;
        }
        Some(spec)
    }

    fn preset(&mut self, v: &Value, path: &str) -> Option<CurvePreset> {
        let name = v
            .as_object()
            .and_then(|o| o.get("name"))
            .and_then(Value::as_str)
            .or_else(|| v.as_str());
        let known: &[&str] = match name {
            Some("flat") => &["name", "value"],
            Some("pulse") => &["name", "center", "width"],
            Some("ramp") => &["name"],
            Some(other) => {
                self.error(&format!("{path}/name"), format!("unknown preset \"{other}\"; allowed: flat, pulse, ramp"));
                return None;
            }
            None => {
                self.error(&format!("{path}/name"), "preset needs a \"name\": flat, pulse or ramp");
                return None;
            }
        };
        if v.is_string() {
            return match name {
                Some("ramp") => Some(CurvePreset::Ramp),
                _ => {
                    self.error(path, "only \"ramp\" may be given by name alone");
                    None
                }
            };
        }
        let obj = self.object(v, path, known)?;
        let field = |p: &mut Self, key: &str| {
            let x = p.required(obj, key, path)?;
            p.number(x, &format!("{path}/{key}"))
        };
        Some(match name {
            Some("flat") => CurvePreset::Flat { value: field(self, "value")? },
            Some("pulse") => {
                let center = field(self, "center");
                let width = field(self, "width");
                CurvePreset::Pulse { center: center?, width: width? }
            }
            _ => CurvePreset::Ramp,
        })
    }

    fn scale(&mut self, v: &Value, path: &str) -> Option<ColorScale> {
        let obj = self.object(v, path, &["stops"])?;
        let spath = format!("{path}/stops");
        let raw = self.required(obj, "stops", path)?;
        let items = self.array(raw, &spath, None)?;
        let mut stops = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            let ipath = format!("{spath}/{i}");
            let pair = self.array(item, &ipath, Some(2))?;
            let position = self.number(&pair[0], &format!("{ipath}/0"));
            let color = self.color(&pair[1], &format!("{ipath}/1"));
            stops.push(ColorStop { position: position?, color: color? });
        }
        match ColorScale::new(stops) {
            Ok(s) => Some(s),
            Err(e) => {
                let at = match e {
                    KineticsError::StopPosition { index, .. } | KineticsError::StopOrder { index } => format!("{spath}/{index}/0"),
                    KineticsError::StopColor { index } => format!("{spath}/{index}/1"),
                    _ => spath,
                };
                self.error(&at, e.to_string());
                None
            }
        }
    }

    fn layer(&mut self, v: &Value, path: &str) -> Option<LayerSpec> {
        let obj = self.object(v, path, &["curve", "scale", "parameter", "blend", "multiplier"])?;
        let curve = self.required(obj, "curve", path).and_then(|c| self.curve(c, &format!("{path}/curve")));
        let scale = self.required(obj, "scale", path).and_then(|s| self.scale(s, &format!("{path}/scale")));
        let parameter = self.required(obj, "parameter", path).and_then(|p| {
            let ppath = format!("{path}/parameter");
            let s = self.string(p, &ppath)?;
            s.parse::<ParameterRef>().map_err(|e| self.error(&ppath, e.to_string())).ok()
        });
        let blend = self.required(obj, "blend", path).and_then(|b| {
            let bpath = format!("{path}/blend");
            let s = self.string(b, &bpath)?;
            s.parse::<BlendMode>().map_err(|e| self.error(&bpath, e)).ok()
        });
        let multiplier = match obj.get("multiplier") {
            None => Some(1.0),
            Some(m) => self.number(m, &format!("{path}/multiplier")),
        };
        Some(LayerSpec { curve: curve?, scale: scale?, parameter: parameter?, blend: blend?, multiplier: multiplier? })
    }

    fn render(&mut self, v: &Value, path: &str) -> Option<RenderConfig> {
        const KNOWN: &[&str] = &[
            "width", "height", "margins", "line_width", "background", "supersample", "n_frames", "fps", "y_domain",
            "format", "axes",
        ];
        let obj = self.object(v, path, KNOWN)?;
        let mut cfg = RenderConfig::default();
        let mut ok = true;
        let at = |k: &str| format!("{path}/{k}");
        for (key, val) in obj {
            let p = at(key);
            let good = match key.as_str() {
                "width" => self.uint(val, &p).map(|x| cfg.width = x),
                "height" => self.uint(val, &p).map(|x| cfg.height = x),
                "supersample" => self.uint(val, &p).map(|x| cfg.supersample = x),
                "fps" => self.uint(val, &p).map(|x| cfg.fps = x),
                "n_frames" => self.uint(val, &p).map(|x| cfg.n_frames = x as usize),
                "line_width" => self.number(val, &p).map(|x| cfg.line_width = x),
                "background" => self.color(val, &p).map(|c| cfg.background = c),
                "axes" => match val.as_bool() {
                    Some(b) => Some(cfg.axes = b),
                    None => {
                        self.error(&p, format!("expected boolean, got {}", kind(val)));
                        None
                    }
                },
                "format" => self
                    .string(val, &p)
                    .and_then(|s| s.parse::<AnimationFormat>().map_err(|e| self.error(&p, e)).ok())
                    .map(|f| cfg.format = f),
                "y_domain" if val.is_null() => Some(cfg.y_domain = None),
                "y_domain" => self.array(val, &p, Some(2)).and_then(|a| {
                    let lo = self.number(&a[0], &format!("{p}/0"));
                    let hi = self.number(&a[1], &format!("{p}/1"));
                    Some(cfg.y_domain = Some([lo?, hi?]))
                }),
                "margins" => self.margins(val, &p).map(|m| cfg.margins = m),
                _ => Some(()),
            };
            ok &= good.is_some();
        }
        if !ok {
            return None;
        }
        let problems = cfg.problems();
        for (field, msg) in &problems {
            self.error(&at(field), msg.clone());
        }
        problems.is_empty().then_some(cfg)
    }

    fn margins(&mut self, v: &Value, path: &str) -> Option<Margins> {
        if v.is_number() {
            return self.number(v, path).map(Margins::uniform);
        }
        let obj = self.object(v, path, &["left", "right", "top", "bottom"])?;
        let mut m = Margins::default();
        for (key, slot) in [("left", &mut m.left), ("right", &mut m.right), ("top", &mut m.top), ("bottom", &mut m.bottom)] {
            if let Some(x) = obj.get(key) {
                *slot = self.number(x, &format!("{path}/{key}"))?;
            }
        }
        Some(m)
    }

    fn document(&mut self, root: &Value) -> Option<QueryDocument> {
        let obj = self.object(root, "", &["dataset", "meta", "render", "layers"])?;
        let dataset = match obj.get("dataset") {
            None | Some(Value::Null) => Some(None),
            Some(d) => self.string(d, "/dataset").map(|s| Some(s.to_owned())),
        };
        let meta = match obj.get("meta") {
            None => Some(Map::new()),
            Some(Value::Object(m)) => Some(m.clone()),
            Some(other) => {
                self.error("/meta", format!("expected object, got {}", kind(other)));
                None
            }
        };
        let render = match obj.get("render") {
            None => Some(RenderConfig::default()),
            Some(r) => self.render(r, "/render"),
        };
        let layers = self.required(obj, "layers", "").and_then(|l| {
            let items = self.array(l, "/layers", None)?;
            if items.is_empty() {
                self.error("/layers", "query needs at least one layer");
                return None;
            }
            let parsed: Vec<Option<LayerSpec>> =
                items.iter().enumerate().map(|(i, v)| self.layer(v, &format!("/layers/{i}"))).collect();
            parsed.into_iter().collect::<Option<Vec<_>>>()
        });
        if let Some(first) = layers.as_ref().and_then(|l| l.first()) {
            if first.blend != BlendMode::Add {
                self.diags.push(Diagnostic::warning(
                    "/layers/0/blend",
                    format!("first layer folds against zero color; {} will leave it transparent", first.blend),
                ));
            }
        }
        Some(QueryDocument { dataset: dataset?, meta: meta?, render: render?, layers: layers? })
    }
}

/// Parse and validate a query document. On success returns the document
/// with its warnings; on failure every diagnostic found.
pub fn parse_query(text: &str) -> Result<(QueryDocument, Vec<Diagnostic>), QueryError> {
    let root: Value = serde_json::from_str(text).map_err(|e| QueryError {
        diagnostics: vec![Diagnostic::error("", format!("invalid JSON at line {}, column {}: {e}", e.line(), e.column()))],
    })?;
    let mut p = Parser::default();
    let doc = p.document(&root);
    match doc {
        Some(doc) if !p.diags.iter().any(Diagnostic::is_error) => Ok((doc, p.diags)),
        _ => Err(QueryError { diagnostics: p.diags }),
    }
}

/// Check every layer's parameter against a dataset's registry.
pub fn validate_against(doc: &QueryDocument, registry: &ParameterRegistry) -> Vec<Diagnostic> {
    doc.layers
        .iter()
        .enumerate()
        .filter_map(|(i, l)| registry.check(&l.parameter).err().map(|m| Diagnostic::error(format!("/layers/{i}/parameter"), m)))
        .collect()
}
