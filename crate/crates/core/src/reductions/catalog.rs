//! Concrete reductions between the shipped problems.

use crate::encoding::decode_pair;
use crate::language::InstanceMap;
use crate::problems::{bds, cvp};

use super::{FReduction, FcrReduction};

/// `L_QBDS → BDS` under the two BDS factorizations; data parts coincide, so
/// `α = β = id`.
pub fn qbds_to_bds() -> FcrReduction {
    FcrReduction::new(
        "qbds-to-bds",
        bds::example4_factorization(),
        bds::example3_factorization(),
        InstanceMap::identity(),
        InstanceMap::identity(),
    )
}

/// `BDS → L_QBDS`, the reverse repackaging.
pub fn bds_to_qbds() -> FcrReduction {
    FcrReduction::new(
        "bds-to-qbds",
        bds::example3_factorization(),
        bds::example4_factorization(),
        InstanceMap::identity(),
        InstanceMap::identity(),
    )
}

pub fn bds_identity() -> FcrReduction {
    FcrReduction::identity(bds::example3_factorization())
}

/// `qbds-to-bds` with `α` resetting the numbering to the identity. Wrong
/// whenever the numbering changes the visit order.
pub fn broken_numbering() -> FcrReduction {
    FcrReduction::new(
        "qbds-to-bds-drop-numbering",
        bds::example4_factorization(),
        bds::example3_factorization(),
        InstanceMap::new(|x| match bds::parse_instance(x) {
            Some(b) => {
                let n = b.graph.node_count();
                let g = b.graph.renumbered((1..=n).collect()).expect("identity numbering is valid");
                bds::BdsInstance::new(g, b.u, b.v).to_instance()
            }
            None => x.clone(),
        }),
        InstanceMap::identity(),
    )
}

/// `G#(u,v) ↦ (G,(u,v))`.
pub fn qbds_many_one() -> InstanceMap {
    InstanceMap::new(|y| match decode_pair(y) {
        Ok(p) => p.data.concat(&p.query),
        Err(_) => y.clone(),
    })
}

/// Sends every input to a fixed BDS yes-instance.
pub fn constant_yes_map() -> InstanceMap {
    let g = bds::NumberedGraph::with_identity_numbering(2, []).expect("two isolated nodes");
    InstanceMap::constant(bds::BdsInstance::new(g, 1, 2).to_instance())
}

/// `S_CVP → S_CVP` by splicing `NOT(NOT(·))` in front of the output.
pub fn cvp_double_negation() -> FReduction {
    FReduction::new(
        "cvp-double-negation",
        InstanceMap::new(|x| {
            cvp::parse_instance(x)
                .and_then(|c| c.double_negated().ok())
                .map(|c| c.to_instance())
                .unwrap_or_else(|| x.clone())
        }),
        InstanceMap::identity(),
    )
}

/// Names accepted by [`by_name`].
pub const FCR_NAMES: [&str; 4] = ["qbds-to-bds", "bds-to-qbds", "bds-identity", "qbds-to-bds-drop-numbering"];

pub fn by_name(name: &str) -> Option<FcrReduction> {
    Some(match name {
        "qbds-to-bds" => qbds_to_bds(),
        "bds-to-qbds" => bds_to_qbds(),
        "bds-identity" => bds_identity(),
        "qbds-to-bds-drop-numbering" => broken_numbering(),
        _ => return None,
    })
}
