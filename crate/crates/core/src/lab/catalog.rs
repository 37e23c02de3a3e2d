//! Terms without a normal form, kept as source files for negative tests.

use crate::syntax::parse_term;
use crate::term::Term;

const SOURCES: &[(&str, &str)] = &[
    ("omega", include_str!("../../catalog/omega.lm")),
    ("var_omega", include_str!("../../catalog/var_omega.lm")),
    ("lam_omega", include_str!("../../catalog/lam_omega.lm")),
    ("mu_omega", include_str!("../../catalog/mu_omega.lm")),
    ("mu_omega_applied", include_str!("../../catalog/mu_omega_applied.lm")),
    ("mu_omega_named", include_str!("../../catalog/mu_omega_named.lm")),
    ("grower", include_str!("../../catalog/grower.lm")),
];

/// `(name, source text)` of every catalog entry.
pub fn catalog_sources() -> &'static [(&'static str, &'static str)] {
    SOURCES
}

/// The parsed catalog, in file order.
pub fn non_sn_catalog() -> Vec<(&'static str, Term)> {
    SOURCES.iter().map(|(name, src)| (*name, parse_term(src).expect("catalog entries parse"))).collect()
}
