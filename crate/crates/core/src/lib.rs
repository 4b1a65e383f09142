pub mod abelian_ham;
pub mod catalog;
pub mod certificate;
pub mod formats;
pub mod graph;
pub mod lemmas;
pub mod lifting;
pub mod oracle;
pub mod partition;
pub mod pipeline;
pub mod permgroup;
