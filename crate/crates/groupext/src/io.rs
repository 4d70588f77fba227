//! JSON exchange formats.
//!
//! Five kinds of document, recognized by their keys:
//!
//! - groupoid: `{"units": [...], "arrows": [{"id","src","tgt"}...],
//!   "comp": [["a","b","ab"]...], "inv": [["a","a_inv"]...]}`. Composition
//!   triples are exhaustive; absent pairs are non-composable.
//! - bundle: `{"fibers": {unit: [d1,...,dk]}}`.
//! - action: `{"groupoid": <path>, "bundle": <path>,
//!   "matrices": {arrow: [[int]]}}`, one matrix per arrow in exponent
//!   coordinates.
//! - extension: `{"total": <path>, "base": <path>, "action": <path>,
//!   "iota": [[fiber-element, arrow]...], "proj": [[arrow, arrow]...]}`.
//! - cocycle: `{"action": <path>, "values": [[arrow1, arrow2,
//!   fiber-element]...]}`; omitted composable pairs are zero.
//!
//! Fiber elements are integer arrays in exponent coordinates. References are
//! paths resolved relative to the referencing file. Writers emit the same
//! shapes deterministically (sorted keys, canonical entry order), so equal
//! objects serialize byte-identically.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::abelian::{Elem, FiniteAbelianGroup};
use crate::bundle::{BundleHom, GroupBundle, GroupoidAction};
use crate::cohomology::Cocycle2;
use crate::error::{Error, Result};
use crate::extension::Extension;
use crate::groupoid::{FiniteGroupoid, GSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Groupoid,
    Bundle,
    Action,
    Hom,
    Space,
    Extension,
    Cocycle,
}

impl FileKind {
    pub fn name(self) -> &'static str {
        match self {
            FileKind::Groupoid => "groupoid",
            FileKind::Bundle => "bundle",
            FileKind::Action => "action",
            FileKind::Hom => "hom",
            FileKind::Space => "space",
            FileKind::Extension => "extension",
            FileKind::Cocycle => "cocycle",
        }
    }
}

/// Decide what a parsed document describes, from its keys alone.
pub fn sniff(v: &Value) -> Result<FileKind> {
    let o = as_obj(v, "document")?;
    if o.contains_key("iota") || o.contains_key("proj") {
        return Ok(FileKind::Extension);
    }
    if o.contains_key("values") {
        return Ok(FileKind::Cocycle);
    }
    if o.contains_key("matrices") {
        return Ok(if o.contains_key("source") { FileKind::Hom } else { FileKind::Action });
    }
    if o.contains_key("points") && o.contains_key("moves") {
        return Ok(FileKind::Space);
    }
    if o.contains_key("fibers") {
        return Ok(FileKind::Bundle);
    }
    if o.contains_key("units") && o.contains_key("arrows") {
        return Ok(FileKind::Groupoid);
    }
    Err(Error::Shape(
        "unrecognized document: expected groupoid, bundle, action, hom, space, extension, \
         or cocycle keys"
            .into(),
    ))
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    Ok(fs::write(path, text)?)
}

fn as_obj<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::Shape(format!("{what} must be a json object")))
}

fn as_arr<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Shape(format!("{what} must be a json array")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| Error::Shape(format!("{what} must be a string")))
}

fn as_int(v: &Value, what: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| Error::Shape(format!("{what} must be an integer")))
}

fn field<'a>(o: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    o.get(key).ok_or_else(|| Error::Shape(format!("missing field `{key}`")))
}

fn elem_from_json(v: &Value) -> Result<Elem> {
    let coords = as_arr(v, "fiber element")?
        .iter()
        .map(|c| as_int(c, "fiber element coordinate"))
        .collect::<Result<Vec<_>>>()?;
    Ok(Elem(coords))
}

fn elem_to_json(e: &Elem) -> Value {
    Value::Array(e.0.iter().map(|&c| json!(c)).collect())
}

/// Resolve a reference value (a path string) against the directory of the
/// file containing it.
fn resolve(base_file: &Path, reference: &str) -> PathBuf {
    let r = Path::new(reference);
    if r.is_absolute() {
        r.to_path_buf()
    } else {
        base_file.parent().unwrap_or_else(|| Path::new(".")).join(r)
    }
}

pub fn groupoid_to_json(g: &FiniteGroupoid) -> Value {
    let (units, arrows, comp, inv) = g.to_tables();
    json!({
        "units": units,
        "arrows": arrows
            .iter()
            .map(|(id, src, tgt)| json!({"id": id, "src": src, "tgt": tgt}))
            .collect::<Vec<_>>(),
        "comp": comp.iter().map(|(a, b, ab)| json!([a, b, ab])).collect::<Vec<_>>(),
        "inv": inv.iter().map(|(a, ai)| json!([a, ai])).collect::<Vec<_>>(),
    })
}

pub fn groupoid_from_json(v: &Value) -> Result<FiniteGroupoid> {
    let o = as_obj(v, "groupoid")?;
    let units = as_arr(field(o, "units")?, "units")?
        .iter()
        .map(|u| Ok(as_str(u, "unit")?.to_string()))
        .collect::<Result<Vec<_>>>()?;
    let arrows = as_arr(field(o, "arrows")?, "arrows")?
        .iter()
        .map(|a| {
            let ao = as_obj(a, "arrow")?;
            Ok((
                as_str(field(ao, "id")?, "arrow id")?.to_string(),
                as_str(field(ao, "src")?, "arrow src")?.to_string(),
                as_str(field(ao, "tgt")?, "arrow tgt")?.to_string(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let comp = as_arr(field(o, "comp")?, "comp")?
        .iter()
        .map(|t| {
            let t = as_arr(t, "composition triple")?;
            if t.len() != 3 {
                return Err(Error::Shape("composition triple must have three entries".into()));
            }
            Ok((
                as_str(&t[0], "composition entry")?.to_string(),
                as_str(&t[1], "composition entry")?.to_string(),
                as_str(&t[2], "composition entry")?.to_string(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let inv = as_arr(field(o, "inv")?, "inv")?
        .iter()
        .map(|p| {
            let p = as_arr(p, "inverse pair")?;
            if p.len() != 2 {
                return Err(Error::Shape("inverse pair must have two entries".into()));
            }
            Ok((
                as_str(&p[0], "inverse entry")?.to_string(),
                as_str(&p[1], "inverse entry")?.to_string(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteGroupoid::from_tables(units, arrows, comp, inv)
}

pub fn bundle_to_json(b: &GroupBundle) -> Value {
    let mut fibers = Map::new();
    for (u, id) in b.unit_ids().iter().enumerate() {
        let factors: Vec<Value> = b.fiber(u).factors().iter().map(|&d| json!(d)).collect();
        fibers.insert(id.clone(), Value::Array(factors));
    }
    json!({ "fibers": fibers })
}

pub fn bundle_from_json(v: &Value) -> Result<GroupBundle> {
    let o = as_obj(v, "bundle")?;
    let fibers = as_obj(field(o, "fibers")?, "fibers")?;
    let mut by_unit = Vec::new();
    for (unit, factors) in fibers {
        let orders = as_arr(factors, "fiber factors")?
            .iter()
            .map(|d| as_int(d, "fiber factor"))
            .collect::<Result<Vec<_>>>()?;
        by_unit.push((unit.clone(), FiniteAbelianGroup::from_orders(&orders)?));
    }
    GroupBundle::new(by_unit)
}

/// Serialize an action's matrices; the groupoid and bundle references are
/// supplied by the caller (they name the files written next to this one).
pub fn action_to_json(act: &GroupoidAction, groupoid_ref: &str, bundle_ref: &str) -> Value {
    let mut matrices = Map::new();
    for a in 0..act.groupoid.n_arrows() {
        let m: Vec<Value> = act
            .matrix(a)
            .iter()
            .map(|row| Value::Array(row.iter().map(|&x| json!(x)).collect()))
            .collect();
        matrices.insert(act.groupoid.arrow_ids()[a].clone(), Value::Array(m));
    }
    json!({ "groupoid": groupoid_ref, "bundle": bundle_ref, "matrices": matrices })
}

pub fn action_from_json(v: &Value, file: &Path) -> Result<GroupoidAction> {
    let o = as_obj(v, "action")?;
    let g = groupoid_from_json(&read_json(&resolve(file, as_str(field(o, "groupoid")?, "groupoid reference")?))?)?;
    let b = bundle_from_json(&read_json(&resolve(file, as_str(field(o, "bundle")?, "bundle reference")?))?)?;
    let matrices = as_obj(field(o, "matrices")?, "matrices")?;
    let mut mats = Vec::new();
    for (arrow, m) in matrices {
        let rows = as_arr(m, "matrix")?
            .iter()
            .map(|row| {
                as_arr(row, "matrix row")?
                    .iter()
                    .map(|x| as_int(x, "matrix entry"))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        mats.push((arrow.clone(), rows));
    }
    GroupoidAction::new(&g, &b, mats)
}

/// A bundle homomorphism: `{"source": <bundle path>, "target": <bundle
/// path>, "matrices": {unit: [[int]]}}`.
pub fn hom_to_json(f: &BundleHom, source_ref: &str, target_ref: &str) -> Value {
    let mut matrices = Map::new();
    for (u, id) in f.source.unit_ids().iter().enumerate() {
        let m: Vec<Value> = f
            .matrix(u)
            .iter()
            .map(|row| Value::Array(row.iter().map(|&x| json!(x)).collect()))
            .collect();
        matrices.insert(id.clone(), Value::Array(m));
    }
    json!({ "source": source_ref, "target": target_ref, "matrices": matrices })
}

pub fn hom_from_json(v: &Value, file: &Path) -> Result<BundleHom> {
    let o = as_obj(v, "hom")?;
    let src = bundle_from_json(&read_json(&resolve(
        file,
        as_str(field(o, "source")?, "source reference")?,
    ))?)?;
    let tgt = bundle_from_json(&read_json(&resolve(
        file,
        as_str(field(o, "target")?, "target reference")?,
    ))?)?;
    let matrices = as_obj(field(o, "matrices")?, "matrices")?;
    let mut mats = Vec::new();
    for (unit, m) in matrices {
        let rows = as_arr(m, "matrix")?
            .iter()
            .map(|row| {
                as_arr(row, "matrix row")?
                    .iter()
                    .map(|x| as_int(x, "matrix entry"))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        mats.push((unit.clone(), rows));
    }
    BundleHom::new(&src, &tgt, mats)
}

/// A right action on a finite point set: `{"groupoid": <path>, "points":
/// {point: anchor-unit}, "moves": [[point, arrow, point]...]}`. A move
/// `[x, γ, y]` says the arrow γ carries x to y; moves must cover every pair
/// whose anchor matches the arrow's target.
pub fn space_to_json(space: &GSpace, g: &FiniteGroupoid, groupoid_ref: &str) -> Value {
    let mut points = Map::new();
    for (x, id) in space.point_ids().iter().enumerate() {
        points.insert(id.clone(), json!(g.unit_ids()[space.anchor(x)]));
    }
    let mut moves = Vec::new();
    for (x, id) in space.point_ids().iter().enumerate() {
        for a in 0..g.n_arrows() {
            if let Some(y) = space.act(x, a) {
                moves.push(json!([id, g.arrow_ids()[a], space.point_ids()[y]]));
            }
        }
    }
    json!({ "groupoid": groupoid_ref, "points": points, "moves": moves })
}

pub fn space_from_json(v: &Value, file: &Path) -> Result<(GSpace, FiniteGroupoid)> {
    let o = as_obj(v, "space")?;
    let g = groupoid_from_json(&read_json(&resolve(
        file,
        as_str(field(o, "groupoid")?, "groupoid reference")?,
    ))?)?;
    let points = as_obj(field(o, "points")?, "points")?
        .iter()
        .map(|(p, u)| Ok((p.clone(), as_str(u, "anchor unit")?.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let mut moves: HashMap<(String, String), String> = HashMap::new();
    for t in as_arr(field(o, "moves")?, "moves")? {
        let t = as_arr(t, "move")?;
        if t.len() != 3 {
            return Err(Error::Shape("move must be [point, arrow, point]".into()));
        }
        let key = (
            as_str(&t[0], "move point")?.to_string(),
            as_str(&t[1], "move arrow")?.to_string(),
        );
        if moves
            .insert(key.clone(), as_str(&t[2], "move image")?.to_string())
            .is_some()
        {
            return Err(Error::Shape(format!("duplicate move for ({}, {})", key.0, key.1)));
        }
    }
    let space = GSpace::from_fn(&g, points, |p, a| {
        moves
            .get(&(p.to_string(), a.to_string()))
            .cloned()
            .unwrap_or_else(|| format!("<no move for ({p}, {a})>"))
    })?;
    Ok((space, g))
}

pub fn cocycle_to_json(phi: &Cocycle2, action_ref: &str) -> Value {
    let values: Vec<Value> = phi
        .entries()
        .iter()
        .map(|(a1, a2, e)| json!([a1, a2, elem_to_json(e)]))
        .collect();
    json!({ "action": action_ref, "values": values })
}

pub fn cocycle_from_json(v: &Value, file: &Path) -> Result<Cocycle2> {
    let o = as_obj(v, "cocycle")?;
    let act = action_from_json(
        &read_json(&resolve(file, as_str(field(o, "action")?, "action reference")?))?,
        &resolve(file, as_str(field(o, "action")?, "action reference")?),
    )?;
    cocycle_values_with_action(v, &act)
}

/// Parse a cocycle document against an already-loaded action, ignoring the
/// document's own action reference if present.
pub fn cocycle_values_with_action(v: &Value, act: &GroupoidAction) -> Result<Cocycle2> {
    let o = as_obj(v, "cocycle")?;
    let entries = as_arr(field(o, "values")?, "values")?
        .iter()
        .map(|t| {
            let t = as_arr(t, "cocycle entry")?;
            if t.len() != 3 {
                return Err(Error::Shape("cocycle entry must be [arrow, arrow, element]".into()));
            }
            Ok((
                as_str(&t[0], "cocycle arrow")?.to_string(),
                as_str(&t[1], "cocycle arrow")?.to_string(),
                elem_from_json(&t[2])?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Cocycle2::new(act, entries)
}

pub fn extension_to_json(
    ext: &Extension,
    total_ref: &str,
    base_ref: &str,
    action_ref: &str,
) -> Value {
    let iota: Vec<Value> = ext
        .iota_entries()
        .iter()
        .map(|(_, e, arrow)| json!([elem_to_json(e), arrow]))
        .collect();
    let proj: Vec<Value> =
        ext.proj_pairs().iter().map(|(a, b)| json!([a, b])).collect();
    json!({
        "total": total_ref,
        "base": base_ref,
        "action": action_ref,
        "iota": iota,
        "proj": proj,
    })
}

pub fn extension_from_json(v: &Value, file: &Path) -> Result<Extension> {
    let o = as_obj(v, "extension")?;
    let total = groupoid_from_json(&read_json(&resolve(
        file,
        as_str(field(o, "total")?, "total reference")?,
    ))?)?;
    let base = groupoid_from_json(&read_json(&resolve(
        file,
        as_str(field(o, "base")?, "base reference")?,
    ))?)?;
    let action_path = resolve(file, as_str(field(o, "action")?, "action reference")?);
    let action = action_from_json(&read_json(&action_path)?, &action_path)?;
    let kernel = action.bundle.clone();

    let proj = as_arr(field(o, "proj")?, "proj")?
        .iter()
        .map(|p| {
            let p = as_arr(p, "projection pair")?;
            if p.len() != 2 {
                return Err(Error::Shape("projection pair must be [arrow, arrow]".into()));
            }
            Ok((
                as_str(&p[0], "projection entry")?.to_string(),
                as_str(&p[1], "projection entry")?.to_string(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut iota = Vec::new();
    for t in as_arr(field(o, "iota")?, "iota")? {
        let t = as_arr(t, "inclusion entry")?;
        if t.len() != 2 {
            return Err(Error::Shape("inclusion entry must be [element, arrow]".into()));
        }
        let elem = elem_from_json(&t[0])?;
        let arrow = as_str(&t[1], "inclusion arrow")?.to_string();
        let a = total.arrow_idx(&arrow)?;
        let unit = total.unit_ids()[total.tgt(a)].clone();
        iota.push((unit, elem, arrow));
    }

    Extension::new(total, base, kernel, action, iota, proj)
}

/// File names used when an object is written as a group of documents next to
/// a primary file `stem.json`.
pub fn companion(path: &Path, part: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}.{part}.json"))
}

fn ref_name(path: &Path) -> String {
    path.file_name().and_then(|s| s.to_str()).unwrap_or("out.json").to_string()
}

/// Write an action and the groupoid/bundle documents it references.
pub fn save_action(path: &Path, act: &GroupoidAction) -> Result<()> {
    let g_path = companion(path, "groupoid");
    let b_path = companion(path, "bundle");
    write_json(&g_path, &groupoid_to_json(&act.groupoid))?;
    write_json(&b_path, &bundle_to_json(&act.bundle))?;
    write_json(path, &action_to_json(act, &ref_name(&g_path), &ref_name(&b_path)))
}

/// Write an extension as a group of documents: the primary file plus total,
/// base, action, and the action's groupoid/bundle companions.
pub fn save_extension(path: &Path, ext: &Extension) -> Result<()> {
    let total_path = companion(path, "total");
    let base_path = companion(path, "base");
    let action_path = companion(path, "action");
    write_json(&total_path, &groupoid_to_json(ext.total()))?;
    write_json(&base_path, &groupoid_to_json(ext.base()))?;
    let kernel_path = companion(&action_path, "bundle");
    write_json(&kernel_path, &bundle_to_json(ext.kernel()))?;
    write_json(
        &action_path,
        &action_to_json(ext.action(), &ref_name(&base_path), &ref_name(&kernel_path)),
    )?;
    write_json(
        path,
        &extension_to_json(ext, &ref_name(&total_path), &ref_name(&base_path), &ref_name(&action_path)),
    )
}

pub fn save_cocycle(path: &Path, phi: &Cocycle2) -> Result<()> {
    let action_path = companion(path, "action");
    save_action(&action_path, phi.action())?;
    write_json(path, &cocycle_to_json(phi, &ref_name(&action_path)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::extension::semidirect;

    #[test]
    fn groupoid_round_trips() {
        let g = crate::groupoid::pair_groupoid(3);
        let v = groupoid_to_json(&g);
        assert_eq!(sniff(&v).unwrap(), FileKind::Groupoid);
        assert_eq!(groupoid_from_json(&v).unwrap(), g);
    }

    #[test]
    fn extension_files_round_trip() {
        let dir = std::env::temp_dir().join("groupext-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let ext = semidirect(&corpus::sign_action().unwrap()).unwrap();
        let path = dir.join("sign.json");
        save_extension(&path, &ext).unwrap();
        let v = read_json(&path).unwrap();
        assert_eq!(sniff(&v).unwrap(), FileKind::Extension);
        let back = extension_from_json(&v, &path).unwrap();
        assert_eq!(back.total(), ext.total());
        assert_eq!(back.iota_entries(), ext.iota_entries());
        assert_eq!(back.proj_pairs(), ext.proj_pairs());
    }

    #[test]
    fn cocycle_files_round_trip() {
        let dir = std::env::temp_dir().join("groupext-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let phi = corpus::heisenberg_cocycle().unwrap();
        let path = dir.join("heis.json");
        save_cocycle(&path, &phi).unwrap();
        let v = read_json(&path).unwrap();
        assert_eq!(sniff(&v).unwrap(), FileKind::Cocycle);
        let back = cocycle_from_json(&v, &path).unwrap();
        assert_eq!(back, phi);
    }

    #[test]
    fn hom_files_round_trip() {
        let dir = std::env::temp_dir().join("groupext-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let z4 = crate::abelian::FiniteAbelianGroup::cyclic(4);
        let z2 = crate::abelian::FiniteAbelianGroup::cyclic(2);
        let src = GroupBundle::constant(&["u".into()], &z4).unwrap();
        let tgt = GroupBundle::constant(&["u".into()], &z2).unwrap();
        let f = BundleHom::constant(&src, &tgt, vec![vec![1]]).unwrap();
        let src_path = dir.join("src-bundle.json");
        let tgt_path = dir.join("tgt-bundle.json");
        write_json(&src_path, &bundle_to_json(&src)).unwrap();
        write_json(&tgt_path, &bundle_to_json(&tgt)).unwrap();
        let path = dir.join("hom.json");
        let v = hom_to_json(&f, "src-bundle.json", "tgt-bundle.json");
        assert_eq!(sniff(&v).unwrap(), FileKind::Hom);
        write_json(&path, &v).unwrap();
        let back = hom_from_json(&read_json(&path).unwrap(), &path).unwrap();
        assert_eq!(back.matrix(0), f.matrix(0));
    }

    #[test]
    fn space_files_round_trip() {
        let dir = std::env::temp_dir().join("groupext-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let g = crate::groupoid::cyclic_group(2);
        let points: Vec<(String, String)> = (0..4).map(|i| (format!("x{i}"), "u".into())).collect();
        let space = crate::groupoid::GSpace::from_fn(&g, points, |p, a| {
            let i: usize = p[1..].parse().unwrap();
            let k: usize = a.parse().unwrap();
            format!("x{}", (i / 2) * 2 + (i + k) % 2)
        })
        .unwrap();
        let g_path = dir.join("space-groupoid.json");
        write_json(&g_path, &groupoid_to_json(&g)).unwrap();
        let path = dir.join("space.json");
        let v = space_to_json(&space, &g, "space-groupoid.json");
        assert_eq!(sniff(&v).unwrap(), FileKind::Space);
        write_json(&path, &v).unwrap();
        let (back, g2) = space_from_json(&read_json(&path).unwrap(), &path).unwrap();
        assert_eq!(g2, g);
        assert_eq!(back.point_ids(), space.point_ids());
        for x in 0..4 {
            for a in 0..g.n_arrows() {
                assert_eq!(back.act(x, a), space.act(x, a));
            }
        }
    }

    #[test]
    fn malformed_documents_are_rejected() {
        assert!(sniff(&serde_json::json!({"nonsense": 1})).is_err());
        assert!(groupoid_from_json(&serde_json::json!({"units": ["u"]})).is_err());
        assert!(bundle_from_json(&serde_json::json!({"fibers": {"u": "x"}})).is_err());
    }
}
