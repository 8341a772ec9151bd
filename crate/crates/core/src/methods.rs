//! Registry of the built-in collocation node sets.
//!
//! The five named methods are stored to all available digits. The three-,
//! four-, five-, and six-stage sets were chosen so that the node polynomial
//! satisfies the superconvergence orthogonality conditions, giving step
//! orders 5 through 8; the second five-stage set does not satisfy them and
//! stays at order 5. Pair names such as `geptrkn52` denote the adaptive
//! main/embedded combination built on the same nodes (embedded method on the
//! first s-1 stages, here of order 2).

use crate::collocation::{CollocationScheme, EmbeddedScheme, NodeSet};
use crate::error::{Error, Result};

pub const GEPTRKN5_NODES: [f64; 3] = [0.182647322580547, 0.742402187612118, 1.474950489807336];

pub const GEPTRKN6_NODES: [f64; 4] = [0.138502716885383, 0.605842632479162, 1.0, 1.588987983968791];

pub const GEPTRKN7_NODES: [f64; 5] = [
    0.0,
    0.253662773062501,
    0.693421021629012,
    1.0,
    1.624344776737066,
];

pub const GEPTRKN8_NODES: [f64; 6] = [
    0.0,
    0.160867438838146,
    0.475690327561694,
    0.809991289295481,
    1.0,
    1.664562055415935,
];

pub const GEPTRKN54_NODES: [f64; 5] = [
    0.14717733121747,
    0.66145426898123,
    1.28305172479853,
    1.81537781109684,
    2.25988885044222,
];

/// Canonical method names accepted by [`method_nodes`].
pub const METHOD_NAMES: [&str; 5] = ["geptrkn5", "geptrkn6", "geptrkn7", "geptrkn8", "geptrkn54"];

/// Adaptive pair spellings, mapped to the same node sets.
pub const PAIR_NAMES: [&str; 4] = ["geptrkn52", "geptrkn63", "geptrkn74", "geptrkn85"];

/// Resolves a method or pair name to its node set.
pub fn method_nodes(name: &str) -> Result<NodeSet> {
    let nodes: &[f64] = match name {
        "geptrkn5" | "geptrkn52" => &GEPTRKN5_NODES,
        "geptrkn6" | "geptrkn63" => &GEPTRKN6_NODES,
        "geptrkn7" | "geptrkn74" => &GEPTRKN7_NODES,
        "geptrkn8" | "geptrkn85" => &GEPTRKN8_NODES,
        "geptrkn54" => &GEPTRKN54_NODES,
        _ => return Err(Error::UnknownMethod(name.to_string())),
    };
    NodeSet::new(nodes.to_vec())
}

/// Derives the scheme for a named method.
pub fn method_scheme(name: &str) -> Result<CollocationScheme> {
    CollocationScheme::from_nodes(method_nodes(name)?)
}

/// Derives the main scheme plus its default embedded companion (first s-1
/// stages) for a named method or pair.
pub fn method_pair(name: &str) -> Result<(CollocationScheme, EmbeddedScheme)> {
    let scheme = method_scheme(name)?;
    let embedded = scheme.embedded_default()?;
    Ok((scheme, embedded))
}
