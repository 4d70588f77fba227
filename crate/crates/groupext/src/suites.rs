//! Batch verification suites over the named corpus.
//!
//! Each suite runs a family of independent checks (in parallel) and returns a
//! `VerificationReport` whose check order does not depend on the schedule.
//! Per-instance errors become failed checks rather than aborting the suite;
//! only corpus construction errors propagate.

use std::time::Instant;

use rayon::prelude::*;

use crate::abelian::FiniteAbelianGroup;
use crate::algebra::{character_twists, groupoid_algebra, masa_check, twisted_algebra};
use crate::cohomology::{canonical_section, cocycle_from_extension, hat_cocycle, Cocycle2};
use crate::corpus;
use crate::error::{Error, Result};
use crate::extension::{baer_sum, inverse_ext, pushout, semidirect, t_groupoid, Extension};
use crate::groupoid::{abelian_group, invariant_partition_fibers};
use crate::iso::{properly_isomorphic, properly_isomorphic_search, IsoResult, DEFAULT_NODE_CAP};
use crate::report::{CheckResult, VerificationReport};
use crate::wedderburn::{fingerprint, FingerprintOptions, DEFAULT_TOLERANCE};

pub const SUITE_NAMES: &[&str] = &[
    "ext-group-axioms",
    "pushout-functoriality",
    "pushout-theorem",
    "compact-decomposition",
    "power-decomposition",
    "bundle-decomposition",
    "masa",
    "cocycle-roundtrip",
];

/// Shared knobs for the suites that fingerprint or search.
#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub seed: u64,
    pub tolerance: f64,
    pub max_nodes: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 0, tolerance: DEFAULT_TOLERANCE, max_nodes: DEFAULT_NODE_CAP }
    }
}

impl SuiteOptions {
    fn fp(&self) -> FingerprintOptions {
        FingerprintOptions { seed: self.seed, tolerance: self.tolerance }
    }
}

/// Run one suite by its report name.
pub fn run_suite(name: &str, o: &SuiteOptions) -> Result<VerificationReport> {
    match name {
        "ext-group-axioms" => ext_group_axioms(),
        "pushout-functoriality" => pushout_functoriality(),
        "pushout-theorem" => pushout_theorem(o),
        "compact-decomposition" => compact_decomposition(o),
        "power-decomposition" => power_decomposition(o),
        "bundle-decomposition" => bundle_decomposition(o),
        "masa" => masa(o),
        "cocycle-roundtrip" => cocycle_roundtrip(o),
        _ => Err(Error::Precondition(format!("unknown suite {name}"))),
    }
}

enum Outcome {
    Pass,
    Fail(String),
    Unknown(String),
}

type Job = (String, Box<dyn FnOnce() -> Result<Outcome> + Send>);

fn run_check(name: String, f: impl FnOnce() -> Result<Outcome>) -> CheckResult {
    let t0 = Instant::now();
    let mut c = match f() {
        Ok(Outcome::Pass) => CheckResult::pass(name),
        Ok(Outcome::Fail(w)) => CheckResult::fail(name, w),
        Ok(Outcome::Unknown(w)) => CheckResult::unknown(name, w),
        Err(Error::SearchCapExceeded { cap }) => {
            CheckResult::unknown(name, format!("search hit the {cap}-node cap"))
        }
        Err(e) => CheckResult::fail(name, e.to_string()),
    };
    c.wall_ms = t0.elapsed().as_millis();
    c
}

fn run_jobs(suite: &str, jobs: Vec<Job>) -> VerificationReport {
    let mut report = VerificationReport::new(suite);
    report.checks = jobs.into_par_iter().map(|(name, f)| run_check(name, f)).collect();
    report
}

fn iso_outcome(e1: &Extension, e2: &Extension) -> Result<Outcome> {
    Ok(match properly_isomorphic(e1, e2)? {
        IsoResult::Witness(_) => Outcome::Pass,
        IsoResult::NotIsomorphic => Outcome::Fail("no proper isomorphism exists".into()),
        IsoResult::Unknown => Outcome::Unknown("undecided".into()),
    })
}

fn multiset_eq(a: &[usize], b: &[usize]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

fn fmt_fp(fp: &[usize]) -> String {
    let parts: Vec<String> = fp.iter().map(|d| d.to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn union_outcome(whole: &[usize], summands: &[Vec<usize>]) -> Outcome {
    let union: Vec<usize> = summands.iter().flatten().copied().collect();
    if multiset_eq(&union, whole) {
        Outcome::Pass
    } else {
        Outcome::Fail(format!(
            "total algebra splits as {} but the summand union is {}",
            fmt_fp(whole),
            fmt_fp(&union)
        ))
    }
}

fn expect_outcome(got: &[usize], want: &[usize]) -> Outcome {
    if multiset_eq(got, want) {
        Outcome::Pass
    } else {
        Outcome::Fail(format!("got {}, expected {}", fmt_fp(got), fmt_fp(want)))
    }
}

fn extension_cocycle(ext: &Extension) -> Result<Cocycle2> {
    let tau = canonical_section(ext)?;
    cocycle_from_extension(ext, &tau)
}

/// The class operations form an abelian group: the split extension is
/// neutral, the inverse extension cancels, and sums commute and associate.
pub fn ext_group_axioms() -> Result<VerificationReport> {
    let mut families = corpus::cyclic_families()?;
    families.push(corpus::klein_family()?);

    let mut jobs: Vec<Job> = Vec::new();
    for fam in &families {
        let split = semidirect(&fam.action)?;
        for ne in &fam.extensions {
            let (e, s) = (ne.ext.clone(), split.clone());
            jobs.push((
                format!("zero-law:{}", ne.name),
                Box::new(move || iso_outcome(&baer_sum(&e, &s)?, &e)),
            ));
            let (e, s) = (ne.ext.clone(), split.clone());
            jobs.push((
                format!("inverse-law:{}", ne.name),
                Box::new(move || iso_outcome(&baer_sum(&e, &inverse_ext(&e)?)?, &s)),
            ));
        }
        for i in 0..fam.extensions.len() {
            for j in (i + 1)..fam.extensions.len() {
                let a = fam.extensions[i].ext.clone();
                let b = fam.extensions[j].ext.clone();
                jobs.push((
                    format!("commutes:{}+{}", fam.extensions[i].name, fam.extensions[j].name),
                    Box::new(move || iso_outcome(&baer_sum(&a, &b)?, &baer_sum(&b, &a)?)),
                ));
            }
        }
        if fam.extensions.len() > 1 {
            let e = fam.extensions[1].ext.clone();
            jobs.push((
                format!("associates:{}", fam.extensions[1].name),
                Box::new(move || {
                    let ee = baer_sum(&e, &e)?;
                    iso_outcome(&baer_sum(&ee, &e)?, &baer_sum(&e, &ee)?)
                }),
            ));
        }
    }
    Ok(run_jobs("ext-group-axioms", jobs))
}

/// Pushing forward along `g ∘ f` agrees with pushing forward in two stages.
pub fn pushout_functoriality() -> Result<VerificationReport> {
    let jobs: Vec<Job> = corpus::functoriality_family()?
        .into_iter()
        .map(|inst| -> Job {
            (
                format!("two-stage-agrees:{}", inst.name),
                Box::new(move || {
                    let (e_mid, _) = pushout(&inst.ext, &inst.f, &inst.mid)?;
                    let (e_staged, _) = pushout(&e_mid, &inst.g, &inst.top)?;
                    let gf = inst.g.compose(&inst.f)?;
                    let (e_direct, _) = pushout(&inst.ext, &gf, &inst.top)?;
                    iso_outcome(&e_direct, &e_staged)
                }),
            )
        })
        .collect();
    Ok(run_jobs("pushout-functoriality", jobs))
}

fn pinned_fingerprint(name: &str) -> Option<Vec<usize>> {
    match name {
        "z2-by-z2-split" | "z4-over-z2" => Some(vec![1, 1, 1, 1]),
        "heisenberg-3" => Some(vec![1, 1, 1, 1, 1, 1, 1, 1, 1, 3, 3]),
        _ => None,
    }
}

/// The algebra of the total groupoid equals the twisted algebra of the
/// enlarged groupoid over the dual bundle, fingerprint for fingerprint.
pub fn pushout_theorem(o: &SuiteOptions) -> Result<VerificationReport> {
    let fp_opts = o.fp();
    let mut jobs: Vec<Job> = Vec::new();
    for ne in corpus::dual_side_family()? {
        let ext = ne.ext.clone();
        jobs.push((
            format!("algebra-matches-dual:{}", ne.name),
            Box::new(move || {
                let whole = fingerprint(&groupoid_algebra(ext.total()), &fp_opts)?;
                let phi = extension_cocycle(&ext)?;
                let (hat, _) = hat_cocycle(&phi)?;
                let dual_side = fingerprint(&twisted_algebra(&hat, 1)?, &fp_opts)?;
                if multiset_eq(&whole, &dual_side) {
                    Ok(Outcome::Pass)
                } else {
                    Ok(Outcome::Fail(format!(
                        "total algebra splits as {} but the dual side gives {}",
                        fmt_fp(&whole),
                        fmt_fp(&dual_side)
                    )))
                }
            }),
        ));
        let ext = ne.ext.clone();
        jobs.push((
            format!("dual-model-agrees:{}", ne.name),
            Box::new(move || {
                let t = t_groupoid(&ext)?;
                let phi = extension_cocycle(&ext)?;
                let (hat, _) = hat_cocycle(&phi)?;
                let from_hat = crate::cohomology::extension_from_cocycle(&hat)?;
                iso_outcome(&t.extension, &from_hat)
            }),
        ));
        if let Some(want) = pinned_fingerprint(&ne.name) {
            let ext = ne.ext.clone();
            jobs.push((
                format!("expected-fingerprint:{}", ne.name),
                Box::new(move || {
                    let got = fingerprint(&groupoid_algebra(ext.total()), &fp_opts)?;
                    Ok(expect_outcome(&got, &want))
                }),
            ));
        }
    }
    Ok(run_jobs("pushout-theorem", jobs))
}

/// Every generalized twist in the corpus splits its total algebra into the
/// character summands of its kernel: directly for the central extensions,
/// and over the induced twist for the dual-side models.
pub fn compact_decomposition(o: &SuiteOptions) -> Result<VerificationReport> {
    let fp_opts = o.fp();
    let mut jobs: Vec<Job> = Vec::new();
    for ne in corpus::central_decomposition_family()? {
        let ext = ne.ext.clone();
        jobs.push((
            format!("splits-over-characters:{}", ne.name),
            Box::new(move || {
                let whole = fingerprint(&groupoid_algebra(ext.total()), &fp_opts)?;
                let phi = extension_cocycle(&ext)?;
                let mut summands = Vec::new();
                for (_, chi_phi) in character_twists(&phi)? {
                    summands.push(fingerprint(&twisted_algebra(&chi_phi, 1)?, &fp_opts)?);
                }
                Ok(union_outcome(&whole, &summands))
            }),
        ));
    }
    for ne in corpus::dual_side_family()? {
        jobs.push((
            format!("dual-model-splits:{}", ne.name),
            Box::new(move || {
                let t = t_groupoid(&ne.ext)?;
                let phi = extension_cocycle(&ne.ext)?;
                let (hat, _) = hat_cocycle(&phi)?;
                let whole = fingerprint(&groupoid_algebra(t.extension.total()), &fp_opts)?;
                let mut summands = Vec::new();
                for k in 0..t.modulus {
                    summands.push(fingerprint(&twisted_algebra(&hat, k)?, &fp_opts)?);
                }
                Ok(union_outcome(&whole, &summands))
            }),
        ));
    }
    Ok(run_jobs("compact-decomposition", jobs))
}

/// For a cyclic central kernel the characters are the powers of the twist.
pub fn power_decomposition(o: &SuiteOptions) -> Result<VerificationReport> {
    let fp_opts = o.fp();
    let mut instances: Vec<(String, Extension)> = Vec::new();
    for ne in corpus::central_decomposition_family()? {
        if ne.ext.kernel().fiber(0).rank() <= 1 {
            instances.push((ne.name, ne.ext));
        }
    }
    for n in [2, 3] {
        let phi = corpus::bicharacter_cocycle(n)?;
        instances.push((
            format!("bicharacter-{n}"),
            crate::cohomology::extension_from_cocycle(&phi)?,
        ));
    }

    let jobs: Vec<Job> = instances
        .into_iter()
        .map(|(name, ext)| -> Job {
            (
                format!("splits-over-powers:{name}"),
                Box::new(move || {
                    let n = ext.kernel().joint_exponent()?.max(1);
                    let whole = fingerprint(&groupoid_algebra(ext.total()), &fp_opts)?;
                    let phi = extension_cocycle(&ext)?;
                    let mut summands = Vec::new();
                    for k in 0..n {
                        summands.push(fingerprint(&twisted_algebra(&phi, k)?, &fp_opts)?);
                    }
                    Ok(union_outcome(&whole, &summands))
                }),
            )
        })
        .collect();
    Ok(run_jobs("power-decomposition", jobs))
}

/// Restricting to the fibers of an invariant partition splits the algebra.
pub fn bundle_decomposition(o: &SuiteOptions) -> Result<VerificationReport> {
    let fp_opts = o.fp();
    let jobs: Vec<Job> = corpus::partition_family()?
        .into_iter()
        .map(|(name, g, part)| -> Job {
            (
                format!("splits-over-fibers:{name}"),
                Box::new(move || {
                    let whole = fingerprint(&groupoid_algebra(&g), &fp_opts)?;
                    let mut summands = Vec::new();
                    for (_, fiber) in invariant_partition_fibers(&g, &part)? {
                        summands.push(fingerprint(&groupoid_algebra(&fiber), &fp_opts)?);
                    }
                    Ok(union_outcome(&whole, &summands))
                }),
            )
        })
        .collect();
    Ok(run_jobs("bundle-decomposition", jobs))
}

/// The diagonal of the bilinear twist on `Z_n × Z_n` is maximal abelian in
/// the twisted algebra but not in the untwisted one.
pub fn masa(o: &SuiteOptions) -> Result<VerificationReport> {
    let tol = o.tolerance;
    let mut jobs: Vec<Job> = Vec::new();
    for n in [2i64, 3, 5] {
        jobs.push((
            format!("diagonal-is-masa:bicharacter-{n}"),
            Box::new(move || {
                let (alg, sub) = corpus::bicharacter_masa(n)?;
                let r = masa_check(&alg, &sub, tol)?;
                if !r.is_masa() {
                    return Ok(Outcome::Fail(format!(
                        "subalgebra dim {} has commutant dim {}",
                        r.sub_dim, r.commutant_dim
                    )));
                }
                if r.commutant_dim != n as usize {
                    return Ok(Outcome::Fail(format!(
                        "commutant dim {} instead of {n}",
                        r.commutant_dim
                    )));
                }
                Ok(Outcome::Pass)
            }),
        ));
        jobs.push((
            format!("untwisted-control:bicharacter-{n}"),
            Box::new(move || {
                let h = FiniteAbelianGroup::from_orders(&[n, n])?;
                let g = abelian_group(&h)?;
                let alg = groupoid_algebra(&g);
                let sub: Vec<usize> = h
                    .elements()?
                    .iter()
                    .filter(|e| e.0[1] == 0)
                    .map(|e| alg.index_of(&h.elem_id(e)))
                    .collect::<Result<Vec<_>>>()?;
                let r = masa_check(&alg, &sub, tol)?;
                if r.is_masa() {
                    return Ok(Outcome::Fail(
                        "diagonal is maximal abelian without the twist".into(),
                    ));
                }
                if r.commutant_dim != (n * n) as usize {
                    return Ok(Outcome::Fail(format!(
                        "commutant dim {} instead of {}",
                        r.commutant_dim,
                        n * n
                    )));
                }
                Ok(Outcome::Pass)
            }),
        ));
    }
    Ok(run_jobs("masa", jobs))
}

/// Extracting a twist from an extension and rebuilding recovers the
/// extension, and the cohomological isomorphism decision agrees with a
/// direct section-by-section search.
pub fn cocycle_roundtrip(o: &SuiteOptions) -> Result<VerificationReport> {
    let max_nodes = o.max_nodes;
    let mut families = corpus::cyclic_families()?;
    families.push(corpus::klein_family()?);

    let mut singles: Vec<corpus::NamedExtension> = Vec::new();
    singles.push(corpus::sign_extension()?);
    singles.push(corpus::heisenberg_extension()?);
    for (k, m) in [(3, 2), (2, 3)] {
        let act = corpus::pair_context(k, m)?;
        singles.push(corpus::NamedExtension {
            name: format!("pair{k}-z{m}-split"),
            ext: semidirect(&act)?,
        });
    }

    let mut jobs: Vec<Job> = Vec::new();
    let mut roundtrip = |ne: &corpus::NamedExtension| {
        let e = ne.ext.clone();
        jobs.push((
            format!("roundtrip:{}", ne.name),
            Box::new(move || {
                let phi = extension_cocycle(&e)?;
                let rebuilt = crate::cohomology::extension_from_cocycle(&phi)?;
                iso_outcome(&e, &rebuilt)
            }),
        ));
    };
    for fam in &families {
        for ne in &fam.extensions {
            roundtrip(ne);
        }
    }
    for ne in &singles {
        roundtrip(ne);
    }

    let mut agreement = |name: String, a: Extension, b: Extension| {
        jobs.push((
            format!("deciders-agree:{name}"),
            Box::new(move || {
                let direct = properly_isomorphic(&a, &b)?;
                let searched = properly_isomorphic_search(&a, &b, max_nodes)?;
                Ok(match (direct, searched) {
                    (_, IsoResult::Unknown) | (IsoResult::Unknown, _) => {
                        Outcome::Unknown("search undecided".into())
                    }
                    (IsoResult::Witness(_), IsoResult::Witness(_))
                    | (IsoResult::NotIsomorphic, IsoResult::NotIsomorphic) => Outcome::Pass,
                    (IsoResult::Witness(_), IsoResult::NotIsomorphic) => {
                        Outcome::Fail("cohomological route found a witness, search refuted".into())
                    }
                    (IsoResult::NotIsomorphic, IsoResult::Witness(_)) => {
                        Outcome::Fail("search found a witness, cohomological route refuted".into())
                    }
                })
            }),
        ));
    };
    for fam in &families {
        for i in 0..fam.extensions.len() {
            for j in i..fam.extensions.len() {
                agreement(
                    format!("{}~{}", fam.extensions[i].name, fam.extensions[j].name),
                    fam.extensions[i].ext.clone(),
                    fam.extensions[j].ext.clone(),
                );
            }
        }
    }
    for ne in &singles {
        agreement(format!("{}~{}", ne.name, ne.name), ne.ext.clone(), ne.ext.clone());
    }

    Ok(run_jobs("cocycle-roundtrip", jobs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_clean(r: &VerificationReport) {
        assert!(!r.checks.is_empty());
        assert!(
            r.all_passed(),
            "{}: {:?}",
            r.suite,
            r.first_failure().map(|c| (c.name.clone(), c.witness.clone()))
        );
    }

    #[test]
    fn functoriality_suite_passes() {
        assert_clean(&pushout_functoriality().unwrap());
    }

    #[test]
    fn masa_suite_passes() {
        assert_clean(&masa(&SuiteOptions::default()).unwrap());
    }

    #[test]
    fn bundle_decomposition_suite_passes() {
        assert_clean(&bundle_decomposition(&SuiteOptions::default()).unwrap());
    }

    #[test]
    fn power_decomposition_suite_passes() {
        assert_clean(&power_decomposition(&SuiteOptions::default()).unwrap());
    }

    #[test]
    #[ignore = "minutes-long in debug builds; exercised by the acceptance tests"]
    fn ext_group_axioms_suite_passes() {
        assert_clean(&ext_group_axioms().unwrap());
    }

    #[test]
    #[ignore = "minutes-long in debug builds; exercised by the acceptance tests"]
    fn pushout_theorem_suite_passes() {
        assert_clean(&pushout_theorem(&SuiteOptions::default()).unwrap());
    }

    #[test]
    #[ignore = "minutes-long in debug builds; exercised by the acceptance tests"]
    fn compact_decomposition_suite_passes() {
        assert_clean(&compact_decomposition(&SuiteOptions::default()).unwrap());
    }

    #[test]
    #[ignore = "minutes-long in debug builds; exercised by the acceptance tests"]
    fn cocycle_roundtrip_suite_passes() {
        assert_clean(&cocycle_roundtrip(&SuiteOptions::default()).unwrap());
    }
}
