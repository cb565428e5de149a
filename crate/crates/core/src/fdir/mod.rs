//! PUS-style monitoring chain over the classifier's failure indices.
//!
//! Each sensor owns one parameter monitor (pMon) whose expected value is
//! "no fault", one functional monitor (fMon) counting consecutive out-of-limit
//! samples, one event and one recovery action. Reactions are recorded, not
//! executed: the chain is open loop.

mod chain;
mod log;

pub use chain::{
    fmon_update, pmon_check, run_chain, run_chain_with, run_monitor, set_pmon_enabled, FdirChainState, FdirConfig,
    FdirEvent, MonitorState, ReactionEvent, RearmPolicy,
};
pub use log::{read_reaction_log, reaction_log_rows, write_reaction_log, ReactionLogRow};
