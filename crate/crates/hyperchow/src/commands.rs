//! Command dispatch: each command renders a text report and a JSON document.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};

use hyperchow_core::arrangement::{bounded_regions, validate, StackyArrangement};
use hyperchow_core::boxes::BoxElement;
use hyperchow_core::inertia::inertia_components;
use hyperchow_core::lawrence::{hypertoric_ideal, lawrence_fan};
use hyperchow_core::multifan::Cone;
use hyperchow_core::orbring::{hilbert_series_via_inertia, ChowRing, Presentation, RingElement, StructureTable, Which};
use hyperchow_core::qlinalg::Q;
use hyperchow_core::zlattice::{FgAbGroup, GroupElement};

use crate::input::{json_int, parse_path, InputError};
use crate::suite;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Gale,
    Arrangement { sign: i32 },
    Multifan,
    Lawrence,
    Box,
    Inertia,
    Chow(Which),
    Hilbert(Which),
    Multiply { left: String, right: String },
    Selftest { random: usize, samples: usize },
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
    pub json: Value,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn error_outcome(kind: &str, message: String) -> Outcome {
    Outcome {
        code: EXIT_USAGE,
        text: format!("error: {}\n", message),
        json: json!({ "error": { "kind": kind, "message": message } }),
    }
}

fn input_error(e: InputError) -> Outcome {
    let kind = match e {
        InputError::Parse { .. } => "parse",
        InputError::Schema(_) => "schema",
        InputError::Value(_) => "value",
        InputError::Io(..) => "io",
    };
    error_outcome(kind, e.to_string())
}

fn ints(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(json_int).collect())
}

fn rational(x: &Q) -> Value {
    Value::String(x.to_string())
}

fn rationals(xs: &[Q]) -> Value {
    Value::Array(xs.iter().map(rational).collect())
}

fn cone_json(c: &Cone) -> Value {
    json!(c.one_based())
}

fn group_json(g: &FgAbGroup) -> Value {
    json!({ "rank": g.rank(), "torsion": ints(g.torsion()), "display": g.to_string() })
}

fn vec_text(xs: &[BigInt]) -> String {
    format!("({})", xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn qvec_text(xs: &[Q]) -> String {
    format!("({})", xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn element_json(x: &GroupElement) -> Value {
    ints(&x.coords())
}

fn box_json(b: &BoxElement) -> Value {
    json!({ "v": element_json(&b.v), "sigma": cone_json(&b.sigma), "alphas": rationals(&b.alphas), "age": b.age() })
}

fn box_text(b: &BoxElement) -> String {
    format!(
        "v = {}  sigma = {}  alphas = {}  age = {}",
        vec_text(&b.v.coords()),
        b.sigma,
        qvec_text(&b.alphas),
        b.age()
    )
}

pub fn run(cmd: &Command, path: Option<&Path>) -> Outcome {
    if let Command::Selftest { random, samples } = cmd {
        return selftest(*random, *samples);
    }
    let Some(path) = path else {
        return error_outcome("usage", "an arrangement file is required".into());
    };
    let doc = match parse_path(path) {
        Ok(d) => d,
        Err(e) => return input_error(e),
    };
    let a = match doc.arrangement() {
        Ok(a) => a,
        Err(e) => return error_outcome("value", e.to_string()),
    };
    let report = validate(&a);
    let report_json = json!(report
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
        .collect::<Vec<_>>());
    if *cmd == Command::Validate || !report.all_passed() {
        let code = if report.all_passed() { EXIT_OK } else { EXIT_INVALID };
        let mut text = report.to_string();
        if !text.ends_with('\n') {
            text.push('\n');
        }
        if *cmd != Command::Validate {
            text.push_str("arrangement is not valid\n");
        }
        return Outcome {
            code,
            text,
            json: json!({ "command": "validate", "valid": report.all_passed(), "checks": report_json }),
        };
    }
    let result = match cmd {
        Command::Gale => Ok(gale(&a)),
        Command::Arrangement { sign } => arrangement(&a, *sign),
        Command::Multifan => Ok(multifan(&a)),
        Command::Lawrence => lawrence(&a),
        Command::Box => Ok(boxes(&a)),
        Command::Inertia => inertia(&a),
        Command::Chow(which) => chow(&a, *which),
        Command::Hilbert(which) => hilbert(&a, *which),
        Command::Multiply { left, right } => multiply(&a, left, right),
        Command::Validate | Command::Selftest { .. } => unreachable!("handled above"),
    };
    match result {
        Ok((text, json)) => Outcome { code: EXIT_OK, text, json },
        Err(o) => o,
    }
}

type Rendered = Result<(String, Value), Outcome>;

fn value_err<E: ToString>(e: E) -> Outcome {
    error_outcome("value", e.to_string())
}

fn gale(a: &StackyArrangement) -> (String, Value) {
    let bd = a.beta_dual().matrix();
    let mut text = format!("DG(beta) = {}\nbeta_dual columns:\n", a.dg());
    for (i, c) in bd.columns().iter().enumerate() {
        let _ = writeln!(text, "  a{} = {}", i + 1, vec_text(c));
    }
    let _ = writeln!(text, "theta = {}", vec_text(&a.theta().coords()));
    let json = json!({
        "command": "gale",
        "dg": group_json(a.dg()),
        "beta_dual": bd.columns().iter().map(|c| ints(c)).collect::<Vec<_>>(),
        "theta": element_json(a.theta()),
    });
    (text, json)
}

fn arrangement(a: &StackyArrangement, sign: i32) -> Rendered {
    let bc = bounded_regions(a, sign).map_err(value_err)?;
    let mut text = String::from("hyperplanes:\n");
    for h in &bc.hyperplanes {
        let _ = writeln!(text, "  H{}: <{}, x> + {} = 0", h.index + 1, vec_text(&h.normal), h.offset);
    }
    let _ = writeln!(text, "vertices: {}", bc.vertices.len());
    for v in &bc.vertices {
        let _ = writeln!(text, "  {}", qvec_text(v));
    }
    let _ = writeln!(text, "bounded regions: {}", bc.regions.len());
    for r in &bc.regions {
        let signs: String = r.signs.iter().map(|s| if *s > 0 { '+' } else { '-' }).collect();
        let verts: Vec<String> = r.vertices.iter().map(|v| qvec_text(v)).collect();
        let _ = writeln!(text, "  {}  {}", signs, verts.join(" "));
    }
    let g = &bc.gamma;
    let one = |xs: &[usize]| xs.iter().map(|i| i + 1).collect::<Vec<_>>();
    let _ = writeln!(
        text,
        "gamma: bounded = {}, full dimensional = {}, bounding = {:?}, extra = {:?}",
        g.bounded,
        g.full_dimensional,
        one(&g.bounding),
        one(&g.extra)
    );
    let json = json!({
        "command": "arrangement",
        "sign": sign,
        "hyperplanes": bc.hyperplanes.iter().map(|h| json!({ "index": h.index + 1, "normal": ints(&h.normal), "offset": json_int(&h.offset) })).collect::<Vec<_>>(),
        "vertices": bc.vertices.iter().map(|v| rationals(v)).collect::<Vec<_>>(),
        "regions": bc.regions.iter().map(|r| json!({ "signs": r.signs, "vertices": r.vertices.iter().map(|v| rationals(v)).collect::<Vec<_>>() })).collect::<Vec<_>>(),
        "gamma": {
            "vertices": g.vertices.iter().map(|v| rationals(v)).collect::<Vec<_>>(),
            "bounded": g.bounded,
            "full_dimensional": g.full_dimensional,
            "bounding": one(&g.bounding),
            "extra": one(&g.extra),
        },
    });
    Ok((text, json))
}

fn multifan(a: &StackyArrangement) -> (String, Value) {
    let fan = a.fan();
    let mut text = String::new();
    for dim in 0..=fan.rank() {
        let cs: Vec<String> = fan.cones().iter().filter(|c| c.len() == dim).map(|c| c.to_string()).collect();
        let _ = writeln!(text, "dimension {}: {}", dim, cs.join(" "));
    }
    let top = fan.top_cones();
    let circuits = fan.circuits();
    let _ = writeln!(text, "top cones: {}", top.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
    let _ = writeln!(text, "circuits: {}", circuits.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
    let json = json!({
        "command": "multifan",
        "cones": fan.cones().iter().map(cone_json).collect::<Vec<_>>(),
        "top_cones": top.iter().map(cone_json).collect::<Vec<_>>(),
        "circuits": circuits.iter().map(cone_json).collect::<Vec<_>>(),
    });
    (text, json)
}

fn lawrence(a: &StackyArrangement) -> Rendered {
    let l = lawrence_fan(a).map_err(value_err)?;
    let ideal = hypertoric_ideal(a);
    let m = a.m();
    let ray_name = |k: usize| if k < m { format!("bL{}", k + 1) } else { format!("bL'{}", k - m + 1) };
    let mut text = format!("N_L = {}\nvectors:\n", l.group);
    for (k, v) in l.vectors.iter().enumerate() {
        let _ = writeln!(text, "  {} = {}", ray_name(k), vec_text(&v.coords()));
    }
    text.push_str("maximal cones:\n");
    for c in &l.maximal_cones {
        let names: Vec<String> = c.indices().iter().map(|&k| ray_name(k)).collect();
        let _ = writeln!(text, "  {{{}}}", names.join(","));
    }
    let irr: Vec<String> = l.irrelevant.iter().map(|x| x.to_string()).collect();
    let _ = writeln!(text, "irrelevant ideal: ({})", irr.join(", "));
    let quads: Vec<String> = ideal.iter().map(|x| x.to_string()).collect();
    let _ = writeln!(text, "hypertoric ideal: ({})", quads.join(", "));
    let json = json!({
        "command": "lawrence",
        "group": group_json(&l.group),
        "vectors": l.vectors.iter().map(element_json).collect::<Vec<_>>(),
        "maximal_cones": l.maximal_cones.iter().map(cone_json).collect::<Vec<_>>(),
        "irrelevant": irr,
        "ideal": quads,
        "ideal_coefficients": ideal.iter().map(|x| ints(&x.0)).collect::<Vec<_>>(),
    });
    Ok((text, json))
}

fn boxes(a: &StackyArrangement) -> (String, Value) {
    let bs = a.rays().enumerate_box();
    let mut text = format!("box elements: {}\n", bs.len());
    for b in &bs {
        let _ = writeln!(text, "  {}", box_text(b));
    }
    (text, json!({ "command": "box", "boxes": bs.iter().map(box_json).collect::<Vec<_>>() }))
}

fn inertia(a: &StackyArrangement) -> Rendered {
    let comps = inertia_components(a).map_err(value_err)?;
    let mut text = format!("inertia components: {}\n", comps.len());
    let mut records = Vec::new();
    for c in &comps {
        let q = &c.quotient;
        let qa = &q.arrangement;
        let lift = qa.lift(1).map_err(value_err)?;
        let link: Vec<usize> = q.link.iter().map(|i| i + 1).collect();
        let vecs: Vec<String> = qa.vector_coords().iter().map(|v| vec_text(v)).collect();
        let _ = writeln!(text, "  {}", box_text(&c.box_element));
        let _ = writeln!(
            text,
            "    N(sigma) = {}  link = {:?}  vectors = [{}]  theta lift = {}  scale = {}",
            qa.group(),
            link,
            vecs.join(", "),
            vec_text(&lift),
            q.theta_scale
        );
        records.push(json!({
            "box": box_json(&c.box_element),
            "age": c.age,
            "quotient": {
                "group": group_json(qa.group()),
                "link": link,
                "vectors": qa.vector_coords().iter().map(|v| ints(v)).collect::<Vec<_>>(),
                "theta_lift": ints(&lift),
                "theta_scale": json_int(&q.theta_scale),
                "valid": validate(qa).all_passed(),
            },
        }));
    }
    Ok((text, json!({ "command": "inertia", "components": records })))
}

fn table_json(t: &StructureTable) -> Value {
    let mut entries = Vec::new();
    for (i, row) in t.products.iter().enumerate() {
        for (j, coords) in row.iter().enumerate() {
            if j < i || coords.is_empty() {
                continue;
            }
            entries.push(json!({
                "left": i,
                "right": j,
                "product": coords.iter().map(|(k, c)| json!([k, rational(c)])).collect::<Vec<_>>(),
            }));
        }
    }
    json!({
        "basis": t.basis.iter().zip(&t.degrees).map(|(m, d)| json!({ "monomial": m.to_string(), "degree": d })).collect::<Vec<_>>(),
        "products": entries,
    })
}

pub fn presentation_json(p: &Presentation, verified: bool, table: &StructureTable) -> Value {
    let names = p.names();
    json!({
        "generators": p.generators.iter().map(|g| json!({ "name": g.name, "degree": g.degree, "box": g.box_index })).collect::<Vec<_>>(),
        "relations": p.relations.iter().map(|r| json!({ "kind": r.kind.to_string(), "poly": r.poly.format(&names) })).collect::<Vec<_>>(),
        "graded_dimensions": p.graded_dims,
        "verified": verified,
        "structure_constants": table_json(table),
    })
}

fn chow(a: &StackyArrangement, which: Which) -> Rendered {
    let r = ChowRing::new(a).map_err(value_err)?;
    let p = match which {
        Which::Orbifold => r.presentation().map_err(value_err)?,
        Which::Coarse => r.coarse_presentation(),
    };
    let verified = p.verify().map_err(value_err)?;
    let table = r.structure_constants(which).map_err(value_err)?;
    let mut text = p.to_string();
    let basis: Vec<String> = table.basis.iter().map(|m| m.to_string()).collect();
    let _ = writeln!(text, "basis: {}", basis.join(", "));
    let _ = writeln!(text, "verified: {}", verified);
    if !r.boxes().is_empty() && which == Which::Orbifold {
        text.push_str("box generators:\n");
        for (k, b) in r.boxes().iter().enumerate().skip(1) {
            let _ = writeln!(text, "  u{} = y^({}, {})", k, vec_text(&b.v.coords()), b.sigma);
        }
    }
    let mut json = presentation_json(&p, verified, &table);
    json["command"] = json!("chow");
    json["which"] = json!(which_name(which));
    Ok((text, json))
}

fn which_name(w: Which) -> &'static str {
    match w {
        Which::Orbifold => "orbifold",
        Which::Coarse => "coarse",
    }
}

fn series_text(s: &[usize]) -> String {
    s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn hilbert(a: &StackyArrangement, which: Which) -> Rendered {
    let r = ChowRing::new(a).map_err(value_err)?;
    let s = r.hilbert_series(which);
    let mut json = json!({ "command": "hilbert", "which": which_name(which), "series": s });
    if which == Which::Orbifold {
        let via = hilbert_series_via_inertia(a).map_err(value_err)?;
        json["via_inertia"] = json!(via);
        if via != s {
            return Err(Outcome {
                code: EXIT_INVALID,
                text: format!("series {} disagrees with the inertia sum {}\n", series_text(&s), series_text(&via)),
                json,
            });
        }
    }
    Ok((format!("{}\n", series_text(&s)), json))
}

/// Sums of terms `c*u3*y1^2*y2` with rational c.
pub fn parse_element(r: &ChowRing, s: &str) -> Result<RingElement, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty expression".into());
    }
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for (i, ch) in compact.chars().enumerate() {
        if (ch == '+' || ch == '-') && !(i > 0 && compact[..i].ends_with('^')) {
            if !cur.is_empty() || i > 0 {
                if cur.is_empty() {
                    return Err(format!("missing term before '{}'", ch));
                }
                terms.push((neg, std::mem::take(&mut cur)));
            }
            neg = ch == '-';
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return Err("expression ends with an operator".into());
    }
    terms.push((neg, cur));
    let mut total = r.zero();
    for (neg, t) in terms {
        let mut coeff = if neg { -Q::one() } else { Q::one() };
        let mut value = r.one();
        for f in t.split('*') {
            if f.is_empty() {
                return Err(format!("empty factor in '{}'", t));
            }
            if f.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                coeff *= f.parse::<Q>().map_err(|_| format!("bad coefficient '{}'", f))?;
                continue;
            }
            let (base, exp) = match f.split_once('^') {
                Some((b, e)) => (b, e.parse::<u32>().map_err(|_| format!("bad exponent in '{}'", f))?),
                None => (f, 1),
            };
            let idx: usize = base
                .get(1..)
                .and_then(|x| x.parse().ok())
                .filter(|&x: &usize| x >= 1)
                .ok_or_else(|| format!("unknown factor '{}'", f))?;
            let g = match base.chars().next() {
                Some('y') if idx <= r.rays().m() => r.ray(idx - 1),
                Some('u') if idx < r.boxes().len() => r.box_generator(idx).map_err(|e| e.to_string())?,
                _ => return Err(format!("unknown factor '{}'", f)),
            };
            for _ in 0..exp {
                value = r.multiply(&value, &g).map_err(|e| e.to_string())?;
            }
        }
        total = total.add(&value.scale(&coeff)).map_err(|e| e.to_string())?;
    }
    Ok(total)
}

fn multiply(a: &StackyArrangement, left: &str, right: &str) -> Rendered {
    let r = ChowRing::new(a).map_err(value_err)?;
    let x = parse_element(&r, left).map_err(|e| error_outcome("usage", format!("--left: {}", e)))?;
    let y = parse_element(&r, right).map_err(|e| error_outcome("usage", format!("--right: {}", e)))?;
    let p = r.multiply(&x, &y).map_err(value_err)?;
    let coords: Vec<Value> = r.coordinates(&p).iter().map(|(i, c)| json!([i, rational(c)])).collect();
    let json = json!({
        "command": "multiply",
        "left": x.to_string(),
        "right": y.to_string(),
        "product": p.to_string(),
        "coordinates": coords,
    });
    Ok((format!("{}\n", p), json))
}

fn selftest(random: usize, samples: usize) -> Outcome {
    let results = suite::selftest(random, samples);
    let failed = results.iter().filter(|r| !r.passed).count();
    let mut text = String::new();
    for r in &results {
        if r.passed {
            let _ = writeln!(text, "{}: PASS", r.name);
        } else {
            let _ = writeln!(text, "{}: FAIL ({})", r.name, r.detail);
        }
    }
    let _ = writeln!(text, "{} passed, {} failed", results.len() - failed, failed);
    let json = json!({
        "command": "selftest",
        "passed": results.len() - failed,
        "failed": failed,
        "checks": results.iter().map(|r| json!({ "name": r.name, "passed": r.passed, "detail": r.detail })).collect::<Vec<_>>(),
    });
    Outcome { code: if failed == 0 { EXIT_OK } else { EXIT_INVALID }, text, json }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_parser() {
        let r = ChowRing::new(&suite::fixture("p12")).unwrap();
        assert_eq!(parse_element(&r, "y1").unwrap(), r.ray(1).scale(&Q::from_integer(BigInt::from(2))));
        assert!(parse_element(&r, "u1*u1").unwrap().is_zero());
        assert!(parse_element(&r, "y1 - 2*y2").unwrap().is_zero());
        assert_eq!(parse_element(&r, "1/2*y1").unwrap(), r.ray(1));
        assert!(parse_element(&r, "y3").is_err());
        assert!(parse_element(&r, "u2").is_err());
        assert!(parse_element(&r, "y1 +").is_err());
        assert!(!parse_element(&r, "1").unwrap().is_zero());
    }
}
