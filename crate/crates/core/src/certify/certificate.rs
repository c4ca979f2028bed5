use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Identity,
    ZeroRemainder,
    LinearTest,
    RationalCompare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub kind: StepKind,
    pub desc: String,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Success,
    Failure,
}

/// Transcript of one proof pipeline. `Success` iff every step verified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub pipeline: String,
    pub status: Status,
    /// Index of the first failed step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failed_step: Option<usize>,
    pub steps: Vec<StepRecord>,
    pub ms: u64,
}

impl Certificate {
    pub fn new(pipeline: &str) -> Self {
        Self {
            pipeline: pipeline.to_string(),
            status: Status::Success,
            failed_step: None,
            steps: Vec::new(),
            ms: 0,
        }
    }

    pub fn succeeded(&self) -> bool {
        self.status == Status::Success
    }

    /// Appends a step; the first failing one fixes the status.
    pub fn record(&mut self, kind: StepKind, desc: impl Into<String>, ok: bool) -> bool {
        self.record_with(kind, desc, ok, None)
    }

    pub fn record_with(
        &mut self,
        kind: StepKind,
        desc: impl Into<String>,
        ok: bool,
        witness: Option<serde_json::Value>,
    ) -> bool {
        if !ok && self.failed_step.is_none() {
            self.failed_step = Some(self.steps.len());
            self.status = Status::Failure;
        }
        self.steps.push(StepRecord {
            kind,
            desc: desc.into(),
            ok,
            witness,
        });
        ok
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    /// JSON with the timing field zeroed, for comparing runs.
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.ms = 0;
        c.to_json()
    }
}
