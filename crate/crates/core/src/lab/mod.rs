//! Typed-term inventories and executable lemma checks.

pub mod catalog;
pub mod checks;
pub mod enumerate;
pub mod random;
pub mod suite;

pub use catalog::{catalog_sources, non_sn_catalog};
pub use checks::{
    build_mu_substitution, check_application_to_variable, check_arg_substitution_inclusion,
    check_same_type_substitution, check_sn_decomposition, check_sn_decomposition_with, measure_quadruple,
    ApplicationOutcome, LabError, MeasureQuadruple, SubstitutionOutcome, Verdict,
};
pub use enumerate::{enumerate_typed_terms, enumerate_types, TermEnumerator, TypedInstance};
pub use random::{random_term, random_typed_term, random_typed_term_with};
pub use suite::{run_suite, LemmaReport, Suite, SuiteConfig, SuiteOptions};
