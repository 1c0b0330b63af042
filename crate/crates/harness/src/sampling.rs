//! Draw up to `samples` outputs and keep the first that passes Tier 1.

use serde::{Deserialize, Serialize};

use crate::client::{ClientError, GenerationRequest, ModelClient};
use crate::config::EvalConfig;
use crate::prompt::assemble_prompt;
use crate::tiers::{run_tiers, EvalRecord, Example};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleResult {
    pub id: String,
    /// Index into `records` of the accepted output.
    pub chosen: Option<usize>,
    pub attempts: u32,
    pub records: Vec<EvalRecord>,
    pub errors: Vec<ClientError>,
}

impl SampleResult {
    pub fn chosen_record(&self) -> Option<&EvalRecord> {
        self.chosen.map(|i| &self.records[i])
    }
}

pub fn rejection_sample(example: &Example, client: &dyn ModelClient, config: &EvalConfig) -> SampleResult {
    let prompt = assemble_prompt(&example.problem_statement, config.format_prompting);
    let request = GenerationRequest::new(&prompt, config);
    let mut out =
        SampleResult { id: example.id.clone(), chosen: None, attempts: 0, records: Vec::new(), errors: Vec::new() };
    while out.attempts < config.samples {
        out.attempts += 1;
        match client.generate(&example.id, &request) {
            Ok(text) => {
                let record = run_tiers(example, &text, config, None);
                let valid = record.report.valid;
                out.records.push(record);
                if valid {
                    out.chosen = Some(out.records.len() - 1);
                    break;
                }
            }
            Err(e) => out.errors.push(e),
        }
    }
    out
}
