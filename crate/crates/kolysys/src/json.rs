//! JSON interchange formats: graded elements, wedge tensors, instances,
//! system collections, unit systems, and cyclotomic configurations.
//!
//! All numbers are exact integers; object keys serialize in sorted order,
//! so equal values produce byte-identical files.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::cyclo::{CycloConfig, Rational};
use crate::exterior::WedgeTensor;
use crate::graded::{GradedElement, Monomial, Site, SiteSet};
use crate::instance::SevenTuple;
use crate::ksystems::{SystemCollection, SystemKind};
use crate::unitsys::{Chain, UnitSystem};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("expected {0} at {1}")]
    Expected(&'static str, String),
    #[error("unknown site label {0}")]
    UnknownSite(String),
    #[error("unknown system kind {0}")]
    UnknownKind(String),
    #[error("coefficient cap must equal the modulus for serialization")]
    Capped,
    #[error("invalid chain: {0}")]
    BadChain(String),
    #[error("{0}")]
    Invalid(String),
}

fn want_u64(v: &Value, ctx: &str) -> Result<u64, JsonError> {
    v.as_u64().ok_or(JsonError::Expected("integer", ctx.into()))
}

fn want_usize(v: &Value, ctx: &str) -> Result<usize, JsonError> {
    Ok(want_u64(v, ctx)? as usize)
}

fn want_str<'a>(v: &'a Value, ctx: &str) -> Result<&'a str, JsonError> {
    v.as_str().ok_or(JsonError::Expected("string", ctx.into()))
}

fn want_array<'a>(v: &'a Value, ctx: &str) -> Result<&'a Vec<Value>, JsonError> {
    v.as_array().ok_or(JsonError::Expected("array", ctx.into()))
}

fn want_object<'a>(v: &'a Value, ctx: &str) -> Result<&'a Map<String, Value>, JsonError> {
    v.as_object()
        .ok_or(JsonError::Expected("object", ctx.into()))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &'static str) -> Result<&'a Value, JsonError> {
    obj.get(key)
        .ok_or(JsonError::Expected(key, "object".into()))
}

/// `[{"monomial": {label: exponent}, "coeff": c}, …]`, monomials in the
/// canonical term order.
pub fn graded_to_json(g: &GradedElement) -> Result<Value, JsonError> {
    if g.cap() != g.ambient().modulus() {
        return Err(JsonError::Capped);
    }
    let sites = g.ambient();
    let mut out = Vec::new();
    for (mono, coeff) in g.terms() {
        let mut mobj = Map::new();
        for (i, &e) in mono.iter().enumerate() {
            if e > 0 {
                mobj.insert(sites.site(i).label.clone(), json!(e));
            }
        }
        out.push(json!({ "monomial": Value::Object(mobj), "coeff": coeff }));
    }
    Ok(Value::Array(out))
}

pub fn graded_from_json(v: &Value, sites: &Arc<SiteSet>) -> Result<GradedElement, JsonError> {
    let arr = want_array(v, "graded element")?;
    let mut terms: Vec<(Monomial, i128)> = Vec::new();
    for rec in arr {
        let obj = want_object(rec, "graded term")?;
        let mobj = want_object(field(obj, "monomial")?, "monomial")?;
        let mut mono = vec![0u32; sites.len()];
        for (label, e) in mobj {
            let idx = sites
                .index_of(label)
                .ok_or_else(|| JsonError::UnknownSite(label.clone()))?;
            mono[idx] = want_u64(e, "exponent")? as u32;
        }
        let coeff = want_u64(field(obj, "coeff")?, "coeff")?;
        terms.push((mono, coeff as i128));
    }
    Ok(GradedElement::from_terms(sites, terms))
}

/// `[{"basis": [indices], "value": <graded>}, …]`, zero-based basis
/// indices in increasing tuples.
pub fn wedge_to_json(w: &WedgeTensor) -> Result<Value, JsonError> {
    let mut out = Vec::new();
    for (mask, g) in w.entries() {
        let idx: Vec<usize> = crate::exterior::bits(mask).collect();
        out.push(json!({ "basis": idx, "value": graded_to_json(g)? }));
    }
    Ok(Value::Array(out))
}

pub fn wedge_from_json(
    v: &Value,
    sites: &Arc<SiteSet>,
    rank: usize,
    h_rank: usize,
) -> Result<WedgeTensor, JsonError> {
    let arr = want_array(v, "wedge tensor")?;
    let mut out = WedgeTensor::zero(sites, rank, h_rank);
    for rec in arr {
        let obj = want_object(rec, "wedge entry")?;
        let idx = want_array(field(obj, "basis")?, "basis")?;
        let mut mask = 0u32;
        for i in idx {
            let i = want_usize(i, "basis index")?;
            if i >= h_rank {
                return Err(JsonError::Invalid(format!(
                    "basis index {i} out of range for hRank {h_rank}"
                )));
            }
            mask |= 1 << i;
        }
        if mask.count_ones() as usize != rank {
            return Err(JsonError::Invalid(format!(
                "basis tuple {idx:?} does not have rank {rank}"
            )));
        }
        let g = graded_from_json(field(obj, "value")?, sites)?;
        out = out.add(&WedgeTensor::single(sites, h_rank, mask, g));
    }
    Ok(out)
}

/// `{"modulus": m, "sites": [{"label": s, "t": t}], "hRank": h,
///   "v": {label: [row]}, "u": {label: [row]}, "P": {label: <graded>}}`.
pub fn instance_to_json(t: &SevenTuple) -> Result<Value, JsonError> {
    let sites = t.sites();
    let site_list: Vec<Value> = sites
        .sites()
        .iter()
        .map(|s| json!({ "label": s.label, "t": s.t }))
        .collect();
    let mut v_map = Map::new();
    let mut u_map = Map::new();
    let mut p_map = Map::new();
    for q in 0..sites.len() {
        let label = sites.site(q).label.clone();
        v_map.insert(label.clone(), json!(t.v_row(q)));
        u_map.insert(label.clone(), json!(t.u_row(q)));
        p_map.insert(label, graded_to_json(t.p_at(q))?);
    }
    Ok(json!({
        "modulus": sites.modulus(),
        "sites": site_list,
        "hRank": t.h_rank(),
        "v": Value::Object(v_map),
        "u": Value::Object(u_map),
        "P": Value::Object(p_map),
    }))
}

pub fn instance_from_json(v: &Value) -> Result<SevenTuple, JsonError> {
    let obj = want_object(v, "instance")?;
    let m = want_u64(field(obj, "modulus")?, "modulus")?;
    let h_rank = want_usize(field(obj, "hRank")?, "hRank")?;
    let mut sites_vec = Vec::new();
    for s in want_array(field(obj, "sites")?, "sites")? {
        let sobj = want_object(s, "site")?;
        sites_vec.push(Site::new(
            want_str(field(sobj, "label")?, "label")?,
            want_u64(field(sobj, "t")?, "t")?,
        ));
    }
    let sites = SiteSet::new(m, sites_vec).map_err(|e| JsonError::Invalid(e.to_string()))?;
    let v_map = want_object(field(obj, "v")?, "v")?;
    let u_map = want_object(field(obj, "u")?, "u")?;
    let p_map = want_object(field(obj, "P")?, "P")?;
    let mut rows_v = Vec::new();
    let mut rows_u = Vec::new();
    let mut p_fam = Vec::new();
    for q in 0..sites.len() {
        let label = &sites.site(q).label;
        let parse_row = |m: &Map<String, Value>, name: &str| -> Result<Vec<u64>, JsonError> {
            let row = m
                .get(label)
                .ok_or_else(|| JsonError::Invalid(format!("{name} row missing for {label}")))?;
            want_array(row, name)?
                .iter()
                .map(|x| want_u64(x, name))
                .collect()
        };
        rows_v.push(parse_row(v_map, "v")?);
        rows_u.push(parse_row(u_map, "u")?);
        let p = p_map
            .get(label)
            .ok_or_else(|| JsonError::Invalid(format!("P missing for {label}")))?;
        p_fam.push(graded_from_json(p, &sites)?);
    }
    SevenTuple::new(sites, h_rank, rows_v, rows_u, p_fam)
        .map_err(|e| JsonError::Invalid(e.to_string()))
}

/// `{"kind": k, "r": r, "entries": [{"n": [labels], "value": <wedge>}]}`,
/// entries for every subset in mask order.
pub fn system_to_json(s: &SystemCollection) -> Result<Value, JsonError> {
    let sites = s.instance().sites();
    let mut entries = Vec::new();
    for (n, w) in s.entries() {
        entries.push(json!({
            "n": sites.labels_of_subset(n),
            "value": wedge_to_json(w)?,
        }));
    }
    Ok(json!({
        "kind": s.kind().as_str(),
        "r": s.rank(),
        "entries": entries,
    }))
}

pub fn system_from_json(
    v: &Value,
    instance: &Arc<SevenTuple>,
) -> Result<SystemCollection, JsonError> {
    let obj = want_object(v, "system")?;
    let kind_str = want_str(field(obj, "kind")?, "kind")?;
    let kind =
        SystemKind::parse(kind_str).ok_or_else(|| JsonError::UnknownKind(kind_str.to_string()))?;
    let r = want_usize(field(obj, "r")?, "r")?;
    let sites = instance.sites();
    let mut entries = Vec::new();
    for rec in want_array(field(obj, "entries")?, "entries")? {
        let eobj = want_object(rec, "entry")?;
        let labels: Vec<String> = want_array(field(eobj, "n")?, "n")?
            .iter()
            .map(|l| want_str(l, "label").map(str::to_string))
            .collect::<Result<_, _>>()?;
        let n = sites
            .subset_of_labels(&labels)
            .ok_or_else(|| JsonError::UnknownSite(labels.join(",")))?;
        let w = wedge_from_json(field(eobj, "value")?, sites, r, instance.h_rank())?;
        entries.push((n, w));
    }
    Ok(SystemCollection::from_entries(instance, r, kind, entries))
}

/// `{"ordering": [labels], "chain": [[labels]…], "r": r,
///   "epsTop": <wedge>}`.
pub fn unit_system_to_json(u: &UnitSystem) -> Result<Value, JsonError> {
    let sites = u.instance().sites();
    let ordering: Vec<String> = u
        .chain()
        .ordering()
        .iter()
        .map(|&q| sites.site(q).label.clone())
        .collect();
    let chain: Vec<Vec<String>> = u
        .chain()
        .level_sizes()
        .iter()
        .map(|&k| ordering[..k].to_vec())
        .collect();
    Ok(json!({
        "ordering": ordering,
        "chain": chain,
        "r": u.rank(),
        "epsTop": wedge_to_json(u.top())?,
    }))
}

pub fn unit_system_from_json(
    v: &Value,
    instance: &Arc<SevenTuple>,
) -> Result<UnitSystem, JsonError> {
    let obj = want_object(v, "unit system")?;
    let sites = instance.sites();
    let mut ordering = Vec::new();
    for l in want_array(field(obj, "ordering")?, "ordering")? {
        let l = want_str(l, "ordering label")?;
        ordering.push(
            sites
                .index_of(l)
                .ok_or_else(|| JsonError::UnknownSite(l.to_string()))?,
        );
    }
    let mut level_sizes = Vec::new();
    for (i, level) in want_array(field(obj, "chain")?, "chain")?
        .iter()
        .enumerate()
    {
        let labels = want_array(level, "chain level")?;
        for (j, l) in labels.iter().enumerate() {
            let l = want_str(l, "chain label")?;
            let idx = sites
                .index_of(l)
                .ok_or_else(|| JsonError::UnknownSite(l.to_string()))?;
            if ordering.get(j) != Some(&idx) {
                return Err(JsonError::BadChain(format!(
                    "level {i} is not an initial segment of the ordering"
                )));
            }
        }
        level_sizes.push(labels.len());
    }
    let chain =
        Chain::new(ordering, level_sizes).map_err(|e| JsonError::BadChain(e.to_string()))?;
    let r = want_usize(field(obj, "r")?, "r")?;
    let top_rank = sites.len() + r;
    let top = wedge_from_json(field(obj, "epsTop")?, sites, top_rank, instance.h_rank())?;
    Ok(UnitSystem::from_top(instance, chain, r, top))
}

/// `{"p": p, "k": k, "sigma": [primes], "roots": {prime: g},
///   "generators": ["num/den"]}`.
pub fn cyclo_config_to_json(cfg: &CycloConfig) -> Value {
    let roots: Map<String, Value> = cfg
        .roots
        .iter()
        .map(|(&ell, &g)| (ell.to_string(), json!(g)))
        .collect();
    json!({
        "p": cfg.p,
        "k": cfg.k,
        "sigma": cfg.sigma,
        "roots": Value::Object(roots),
        "generators": cfg.generators.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
    })
}

pub fn cyclo_config_from_json(v: &Value) -> Result<CycloConfig, JsonError> {
    let obj = want_object(v, "cyclo config")?;
    let p = want_u64(field(obj, "p")?, "p")?;
    let k = want_u64(field(obj, "k")?, "k")? as u32;
    let sigma = want_array(field(obj, "sigma")?, "sigma")?
        .iter()
        .map(|x| want_u64(x, "sigma prime"))
        .collect::<Result<Vec<_>, _>>()?;
    let mut roots = BTreeMap::new();
    for (key, g) in want_object(field(obj, "roots")?, "roots")? {
        let ell: u64 = key
            .parse()
            .map_err(|_| JsonError::Invalid(format!("bad prime key {key}")))?;
        roots.insert(ell, want_u64(g, "root")?);
    }
    let generators = want_array(field(obj, "generators")?, "generators")?
        .iter()
        .map(|s| {
            Rational::parse(want_str(s, "generator")?)
                .map_err(|e| JsonError::Invalid(e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CycloConfig {
        p,
        k,
        sigma,
        roots,
        generators,
    })
}

/// Canonical text form: pretty JSON with sorted keys and a trailing
/// newline. Equal values produce byte-identical output.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{random_instance, InstanceParams};
    use crate::ksystems::SystemKind;
    use crate::unitsys::build_unit_systems;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn inst() -> Arc<SevenTuple> {
        Arc::new(random_instance(7, &InstanceParams::new(9, vec![3, 9], 3)).unwrap())
    }

    #[test]
    fn instance_round_trip_byte_identical() {
        let t = inst();
        let j = instance_to_json(&t).unwrap();
        let t2 = instance_from_json(&j).unwrap();
        assert_eq!(*t, t2);
        let j2 = instance_to_json(&t2).unwrap();
        assert_eq!(to_canonical_string(&j), to_canonical_string(&j2));
    }

    #[test]
    fn system_round_trip() {
        let t = inst();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let s = crate::ksystems::SystemCollection::random_in_product(&t, 2, &mut rng)
            .with_kind(SystemKind::Tks);
        let j = system_to_json(&s).unwrap();
        let s2 = system_from_json(&j, &t).unwrap();
        assert_eq!(s, s2);
    }

    #[test]
    fn unit_system_round_trip() {
        let t = inst();
        let chain = crate::unitsys::Chain::full_prefix(2);
        for u in build_unit_systems(&t, &chain, 1) {
            let j = unit_system_to_json(&u).unwrap();
            let u2 = unit_system_from_json(&j, &t).unwrap();
            assert_eq!(u, u2);
        }
    }

    #[test]
    fn cyclo_config_round_trip() {
        let cfg = CycloConfig {
            p: 3,
            k: 1,
            sigma: vec![7, 13],
            roots: [(7, 3), (13, 2)].into_iter().collect(),
            generators: vec![
                Rational::integer(2).unwrap(),
                Rational::parse("1/5").unwrap(),
            ],
        };
        let j = cyclo_config_to_json(&cfg);
        let cfg2 = cyclo_config_from_json(&j).unwrap();
        assert_eq!(cfg, cfg2);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        let t = inst();
        assert!(instance_from_json(&serde_json::json!({"modulus": 9})).is_err());
        assert!(system_from_json(
            &serde_json::json!({"kind": "XYZ", "r": 1, "entries": []}),
            &t
        )
        .is_err());
        let bad_basis = serde_json::json!([{"basis": [99], "value": []}]);
        assert!(wedge_from_json(&bad_basis, t.sites(), 1, 3).is_err());
    }
}
