//! Deterministic dataset mixing.

use serde::{Deserialize, Serialize};

use super::{CorpusError, InstructionExample};

/// Where a mixed example came from. `audit[i]` describes `examples[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixProvenance {
    pub tag: String,
    pub index_in_source: usize,
}

/// The shuffled union plus its provenance sidecar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixOutput {
    pub examples: Vec<InstructionExample>,
    pub audit: Vec<MixProvenance>,
}

/// Shuffle the multiset union of the tagged datasets with a seeded
/// Fisher-Yates permutation. The same inputs and seed always produce the
/// same order, on any platform; the PRNG is built in so no external crate
/// version can change the permutation.
pub fn mix(
    datasets: &[(String, Vec<InstructionExample>)],
    seed: u64,
) -> Result<MixOutput, CorpusError> {
    if datasets.is_empty() || datasets.iter().all(|(_, examples)| examples.is_empty()) {
        return Err(CorpusError::EmptyInput);
    }

    let mut combined: Vec<(InstructionExample, MixProvenance)> = Vec::new();
    for (tag, examples) in datasets {
        for (index_in_source, example) in examples.iter().enumerate() {
            combined.push((
                example.clone(),
                MixProvenance {
                    tag: tag.clone(),
                    index_in_source,
                },
            ));
        }
    }

    let mut rng = SplitMix64::new(seed);
    // Fisher-Yates; the modulo bias is irrelevant at dataset sizes.
    for i in (1..combined.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        combined.swap(i, j);
    }

    let (examples, audit) = combined.into_iter().unzip();
    Ok(MixOutput { examples, audit })
}

/// SplitMix64 (Steele et al.), small and stable.
struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }
}
