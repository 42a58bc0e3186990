//! One module per subcommand.

pub mod analyze;
pub mod curate;
pub mod grade;
pub mod pipeline;
pub mod serve;
