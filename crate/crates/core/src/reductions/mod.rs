//! Reductions between factored problems and languages of pairs, and the
//! constructions that compose them and move witnesses across them.

pub mod catalog;
mod f;

pub use f::{compose_f, pull_back_witness, verify_f_reduction, FReduction};

use std::fmt;

use crate::bound::PolylogBound;
use crate::encoding::{back, front, pack_at, DataQueryPair, Instance};
use crate::error::{Error, Result};
use crate::factorization::{CrFactorization, FactoredLanguage};
use crate::language::{DecisionProblem, InstanceMap, LanguageOfPairs, RestoreMap};
use crate::preprocessing::PreprocessingWitness;
use crate::report::Report;

/// `(Υ1, Υ2, α, β)`.
#[derive(Clone)]
pub struct FcrReduction {
    name: String,
    pub source_fact: CrFactorization,
    pub target_fact: CrFactorization,
    pub alpha: InstanceMap,
    pub beta: InstanceMap,
}

impl FcrReduction {
    pub fn new(
        name: impl Into<String>,
        source_fact: CrFactorization,
        target_fact: CrFactorization,
        alpha: InstanceMap,
        beta: InstanceMap,
    ) -> Self {
        FcrReduction {
            name: name.into(),
            source_fact,
            target_fact,
            alpha,
            beta,
        }
    }

    /// `(Υ, Υ, id, id)`.
    pub fn identity(fact: CrFactorization) -> Self {
        FcrReduction::new(
            format!("identity/{}", fact.name()),
            fact.clone(),
            fact,
            InstanceMap::identity(),
            InstanceMap::identity(),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn map_pair(&self, pair: &DataQueryPair) -> DataQueryPair {
        DataQueryPair {
            data: self.alpha.apply(&pair.data),
            query: self.beta.apply(&pair.query),
        }
    }
}

impl fmt::Debug for FcrReduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FcrReduction")
            .field("name", &self.name)
            .field("source_fact", &self.source_fact)
            .field("target_fact", &self.target_fact)
            .finish()
    }
}

/// Checks `⟨D,Q⟩ ∈ S_(L1,Υ1) ⇔ ⟨α(D),β(Q)⟩ ∈ S_(L2,Υ2)` on the given pairs.
pub fn verify_fcr_pairs(
    r: &FcrReduction,
    l1: &DecisionProblem,
    l2: &DecisionProblem,
    pairs: &[DataQueryPair],
) -> Report {
    let s1 = FactoredLanguage::new(l1.clone(), r.source_fact.clone());
    let s2 = FactoredLanguage::new(l2.clone(), r.target_fact.clone());
    let mut report = Report::new(format!("fcr-reduction/{}", r.name())).with_samples(pairs.len());
    let (mut positives, mut broken) = (0, 0);
    for (i, p) in pairs.iter().enumerate() {
        let lhs = s1.contains(&p.data, &p.query);
        let image = r.map_pair(p);
        let rhs = s2.contains(&image.data, &image.query);
        positives += usize::from(lhs);
        if lhs != rhs {
            broken += 1;
            report.violation(
                i,
                "iff",
                format!("source pair is {}, image is {}", member_word(lhs), member_word(rhs)),
            );
        }
    }
    report.check("positives", positives as f64, 1.0, positives > 0);
    report.check("negatives", (pairs.len() - positives) as f64, 1.0, positives < pairs.len());
    report.check_zero("iff-violations", broken);
    report
}

fn member_word(m: bool) -> &'static str {
    if m {
        "a member"
    } else {
        "not a member"
    }
}

/// [`verify_fcr_pairs`] on `Υ1`-splits of source instances (members and non-members).
pub fn verify_fcr_reduction(
    r: &FcrReduction,
    l1: &DecisionProblem,
    l2: &DecisionProblem,
    samples: &[Instance],
) -> Report {
    let pairs: Vec<_> = samples.iter().map(|x| r.source_fact.split(x)).collect();
    verify_fcr_pairs(r, l1, l2, &pairs)
}

/// `σ1(x) = π1(x)@π2(x)`, `σ2(x) = ε`, `c′ = c + 1`.
pub fn packed(f: &CrFactorization) -> CrFactorization {
    let (pi1, pi2, rho) = (f.pi1.clone(), f.pi2.clone(), f.rho.clone());
    CrFactorization::new(
        format!("packed({})", f.name()),
        InstanceMap::new(move |x| pack_at(&pi1.apply(x), &pi2.apply(x))),
        InstanceMap::empty(),
        RestoreMap::new(move |z, _| match (front(z), back(z)) {
            (Ok(d), Ok(q)) => rho.apply(&d, &q),
            _ => z.clone(),
        }),
        f.c + 1,
        PolylogBound::constant(0.0),
    )
}

/// `x ↦ ρ(α(front x), β(back x))`. Inputs that are not packed are treated as
/// `x@ε`.
fn pull_through(rho: RestoreMap, alpha: InstanceMap, beta: InstanceMap) -> InstanceMap {
    InstanceMap::new(move |x| {
        let d = front(x).unwrap_or_else(|_| x.clone());
        let q = back(x).unwrap_or_default();
        rho.apply(&alpha.apply(&d), &beta.apply(&q))
    })
}

/// Composes `L1 → L2` and `L2 → L3` through the middle factorizations
/// `(Υ2, Υ2′)`, which must be the target of `r12` and the source of `r23`.
///
/// `probes` are `L2` instances on which both middle factorizations must agree
/// about membership.
pub fn compose_fcr(
    r12: &FcrReduction,
    r23: &FcrReduction,
    mid: (&CrFactorization, &CrFactorization),
    l2: &DecisionProblem,
    probes: &[Instance],
) -> Result<FcrReduction> {
    let (up2, up2b) = mid;
    if r12.target_fact.name() != up2.name() || r23.source_fact.name() != up2b.name() {
        return Err(Error::FactorizationMismatch(format!(
            "middle pair ({}, {}) does not match ({}, {})",
            up2.name(),
            up2b.name(),
            r12.target_fact.name(),
            r23.source_fact.name()
        )));
    }
    let s2 = FactoredLanguage::new(l2.clone(), up2.clone());
    let s2b = FactoredLanguage::new(l2.clone(), up2b.clone());
    for (i, y) in probes.iter().enumerate() {
        let (a, b) = (up2.split(y), up2b.split(y));
        let (ma, mb) = (s2.contains(&a.data, &a.query), s2b.contains(&b.data, &b.query));
        if ma != mb {
            return Err(Error::FactorizationMismatch(format!(
                "probe {i}: {} says {}, {} says {}",
                up2.name(),
                member_word(ma),
                up2b.name(),
                member_word(mb)
            )));
        }
    }
    let h = pull_through(up2.rho.clone(), r12.alpha.clone(), r12.beta.clone());
    let (sigma1, sigma2, alpha2, beta2) = (up2b.pi1.clone(), up2b.pi2.clone(), r23.alpha.clone(), r23.beta.clone());
    let alpha = InstanceMap::new(move |x| {
        let y = h.apply(x);
        pack_at(&alpha2.apply(&sigma1.apply(&y)), &beta2.apply(&sigma2.apply(&y)))
    });
    Ok(FcrReduction::new(
        format!("({} ; {})", r12.name(), r23.name()),
        packed(&r12.source_fact),
        packed(&r23.target_fact),
        alpha,
        InstanceMap::identity(),
    ))
}

/// Moves a witness for `S_(L2,Υ2′)` back across `r` to `S_(L1,Υ1′)`.
///
/// `growth_degree` bounds `|h(x)| ≤ |x|^degree` for the induced map `h` and
/// feeds the output bound.
pub fn transfer_witness(
    r: &FcrReduction,
    w2: &PreprocessingWitness,
    mid: &CrFactorization,
    growth_degree: u32,
) -> (CrFactorization, PreprocessingWitness) {
    let h = pull_through(r.target_fact.rho.clone(), r.alpha.clone(), r.beta.clone());
    let (sigma1, sigma2, pre) = (mid.pi1.clone(), mid.pi2.clone(), w2.pre.clone());
    let pre_prime = InstanceMap::new(move |x| {
        let y = h.apply(x);
        pack_at(&pre.apply(&sigma1.apply(&y)), &sigma2.apply(&y))
    });
    let s = w2.post.clone();
    let post = LanguageOfPairs::new(format!("unpacked({})", s.name()), PolylogBound::constant(0.0), move |d, q| {
        q.is_empty()
            && match (front(d), back(d)) {
                (Ok(a), Ok(b)) => s.contains(&a, &b),
                _ => false,
            }
    });
    let digest = w2.output_bound.shifted(mid.c).after_polynomial(growth_degree);
    let query = mid.derived_query_bound().after_polynomial(growth_degree);
    // Escaping can at most double each packed part; the `@` adds one symbol.
    let output_bound = digest.sum(&query).scaled(2.0).plus(1.0);
    let witness = PreprocessingWitness::new(format!("transfer({}, {})", r.name(), w2.name()), pre_prime, post, output_bound);
    (packed(&r.source_fact), witness)
}

/// The packing reduction from `L` to BDS given a many-one map `h` with
/// `x ∈ L ⇔ h(x) ∈ BDS`, validated on `samples`.
pub fn hardness_pack(
    l: &DecisionProblem,
    bds: &DecisionProblem,
    h: InstanceMap,
    bds_fact: &CrFactorization,
    samples: &[Instance],
) -> Result<FcrReduction> {
    for (index, x) in samples.iter().enumerate() {
        let (source_member, target_member) = (l.contains(x), bds.contains(&h.apply(x)));
        if source_member != target_member {
            return Err(Error::InvalidManyOneMap {
                index,
                source_member,
                target_member,
            });
        }
    }
    let (pi1, pi2) = (bds_fact.pi1.clone(), bds_fact.pi2.clone());
    let alpha = InstanceMap::new(move |x| {
        let y = h.apply(x);
        pack_at(&pi1.apply(&y), &pi2.apply(&y))
    });
    Ok(FcrReduction::new(
        format!("hardness({} => {})", l.name(), bds.name()),
        CrFactorization::identity(format!("identity/{}", l.name())),
        packed(bds_fact),
        alpha,
        InstanceMap::identity(),
    ))
}
