use std::fmt;

use crate::encoding::DataQueryPair;
use crate::language::{InstanceMap, LanguageOfPairs};
use crate::preprocessing::PreprocessingWitness;
use crate::report::Report;

/// `(α, β)` acting directly on languages of pairs.
#[derive(Clone)]
pub struct FReduction {
    name: String,
    pub alpha: InstanceMap,
    pub beta: InstanceMap,
}

impl FReduction {
    pub fn new(name: impl Into<String>, alpha: InstanceMap, beta: InstanceMap) -> Self {
        FReduction {
            name: name.into(),
            alpha,
            beta,
        }
    }

    pub fn identity() -> Self {
        FReduction::new("identity", InstanceMap::identity(), InstanceMap::identity())
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for FReduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FReduction").field("name", &self.name).finish()
    }
}

/// Checks `⟨D,Q⟩ ∈ S1 ⇔ ⟨α(D),β(Q)⟩ ∈ S2` on the samples.
pub fn verify_f_reduction(r: &FReduction, s1: &LanguageOfPairs, s2: &LanguageOfPairs, samples: &[DataQueryPair]) -> Report {
    let mut report = Report::new(format!("f-reduction/{}", r.name())).with_samples(samples.len());
    let (mut positives, mut broken) = (0, 0);
    for (i, p) in samples.iter().enumerate() {
        let lhs = s1.contains_pair(p);
        let rhs = s2.contains(&r.alpha.apply(&p.data), &r.beta.apply(&p.query));
        positives += usize::from(lhs);
        if lhs != rhs {
            broken += 1;
            report.violation(i, "iff", format!("source {lhs}, image {rhs}"));
        }
    }
    report.check("positives", positives as f64, 1.0, positives > 0);
    report.check("negatives", (samples.len() - positives) as f64, 1.0, positives < samples.len());
    report.check_zero("iff-violations", broken);
    report
}

/// `(α2 ∘ α1, β2 ∘ β1)`.
pub fn compose_f(r12: &FReduction, r23: &FReduction) -> FReduction {
    FReduction::new(
        format!("({} ; {})", r12.name(), r23.name()),
        r12.alpha.then(&r23.alpha),
        r12.beta.then(&r23.beta),
    )
}

/// A witness for `S1` from one for `S2`: `Π ∘ α` with
/// `S′ = {⟨D,Q⟩ | ⟨D,β(Q)⟩ ∈ S}`.
///
/// `growth_degree` bounds `|α(D)| ≤ |D|^degree`.
pub fn pull_back_witness(r: &FReduction, w: &PreprocessingWitness, growth_degree: u32) -> PreprocessingWitness {
    let s = w.post.clone();
    let beta = r.beta.clone();
    let post = LanguageOfPairs::new(format!("pulled({})", s.name()), s.short_query_bound(), move |d, q| {
        s.contains(d, &beta.apply(q))
    });
    PreprocessingWitness::new(
        format!("pull-back({}, {})", r.name(), w.name()),
        r.alpha.then(&w.pre),
        post,
        w.output_bound.after_polynomial(growth_degree),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::PolylogBound;
    use crate::encoding::Instance;

    #[test]
    fn composition_is_function_composition() {
        let add_a = FReduction::new("a", InstanceMap::new(|x| x.concat(&"a".into())), InstanceMap::identity());
        let add_b = FReduction::new("b", InstanceMap::new(|x| x.concat(&"b".into())), InstanceMap::identity());
        let both = compose_f(&add_a, &add_b);
        assert_eq!(both.alpha.apply(&"x".into()), Instance::from("xab"));
        let id = compose_f(&FReduction::identity(), &FReduction::identity());
        assert_eq!(id.alpha.apply(&"x".into()), Instance::from("x"));
    }

    #[test]
    fn verification_counts_both_sides() {
        let s = LanguageOfPairs::new("equal", PolylogBound::constant(10.0), |d, q| d == q);
        let samples = [DataQueryPair::new("a", "a"), DataQueryPair::new("a", "b")];
        assert!(verify_f_reduction(&FReduction::identity(), &s, &s, &samples).passed());
        let swap = FReduction::new("swap", InstanceMap::constant("z".into()), InstanceMap::identity());
        assert!(!verify_f_reduction(&swap, &s, &s, &samples).passed());
    }
}
