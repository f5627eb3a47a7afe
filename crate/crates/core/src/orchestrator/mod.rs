//! Scripted sessions across all components, plus the protocol-level games
//! used by the test suites.

mod games;
mod scenario;
mod session;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use games::{
    check_lifecycle_trace, conservation_stress, forged_half, mutate, non_repudiation_check, privacy_diff, privacy_game,
    scan_for_leaks, soundness_game, transcript_text, MutationTarget, NonRepudiation, PrivacyError, PrivacyReport,
    SignatureStatus, SoundnessReport, StressReport, ALLOWED_DIFF_FIELDS, EVENTS, LEAK_WINDOW,
};
pub use scenario::{bundled_template, Expectations, Scenario, SignaturePlan, SignedInput};
pub use session::{
    check_expectations, execute, execute_on, random_field, run_session, run_session_on, SessionReport, SessionRun,
    Settlement, TranscriptEntry,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    Load,
    Compile,
    Sign,
    Fund,
    Commit,
    Submit,
    Install,
    Evaluate,
    Prove,
    Settle,
    Expectation,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("step serializes");
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("step `{step}`: {message}")]
pub struct SessionError {
    pub step: Step,
    pub message: String,
}

impl SessionError {
    pub fn new(step: Step, message: String) -> Self {
        Self { step, message }
    }
}
