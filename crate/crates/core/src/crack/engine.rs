use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::generate::{generate_candidates, Candidate};
use super::{AttackStrategy, CrackError, StrategyKind, DEFAULT_SNAKE_BUDGET};
use crate::credential::CredentialRecord;
use crate::exec::{Execution, Executor};
use crate::grid::Alphabet;
use crate::kdf::{Kdf, KdfError, KdfWorker};
use crate::placement::Placement;

#[derive(Debug, Clone)]
pub struct CrackConfig {
    pub strategies: Vec<StrategyKind>,
    pub execution: Execution,
    /// Words with characters outside this alphabet are skipped.
    pub alphabet: Alphabet,
    pub snake_budget: u64,
    /// Start-cell partitions hashed between two checkpoints.
    pub partitions_per_checkpoint: usize,
}

impl CrackConfig {
    pub fn new(strategies: Vec<StrategyKind>) -> Self {
        CrackConfig {
            strategies,
            execution: Execution::default(),
            alphabet: Alphabet::printable(),
            snake_budget: DEFAULT_SNAKE_BUDGET,
            partitions_per_checkpoint: 64,
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

/// Position of the next unit of work: record, word, strategy, then the
/// first start cell not yet hashed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub record: usize,
    pub word: usize,
    pub strategy: usize,
    pub start_cell: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recovery {
    pub username: String,
    pub word: String,
    pub strategy: String,
    /// Recovered password in tagged form.
    pub tagged: String,
}

/// Resumable running totals of an attack.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CrackProgress {
    pub next: Checkpoint,
    pub candidates_generated: u64,
    pub raw_candidates: u64,
    pub hashes_computed: u64,
    /// (record, word) pairs skipped because the word cannot be placed.
    pub pairs_skipped: u64,
    pub recovered: Vec<Recovery>,
    pub done: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrackReport {
    pub records: usize,
    pub words: usize,
    pub strategies: Vec<String>,
    /// Distinct candidates summed over records, words and strategies.
    pub candidates_generated: u64,
    /// Candidates before per-word deduplication.
    pub raw_candidates: u64,
    pub hashes_computed: u64,
    pub pairs_skipped: u64,
    pub recovered: Vec<Recovery>,
    pub recovery_fraction: f64,
    pub elapsed_secs: Option<f64>,
}

pub fn crack(
    records: &[CredentialRecord],
    words: &[String],
    config: &CrackConfig,
) -> Result<CrackReport, CrackError> {
    crack_with(records, words, config, None, |_| {})
}

/// Runs (or resumes) an attack, calling `on_checkpoint` after every batch of
/// start-cell partitions with totals that can be fed back as `resume`.
pub fn crack_with(
    records: &[CredentialRecord],
    words: &[String],
    config: &CrackConfig,
    resume: Option<CrackProgress>,
    mut on_checkpoint: impl FnMut(&CrackProgress),
) -> Result<CrackReport, CrackError> {
    if words.is_empty() {
        return Err(CrackError::EmptyDictionary);
    }
    let started = Instant::now();
    let exec = Executor::new(config.execution)?;
    let strategies: Vec<StrategyKind> = config
        .strategies
        .iter()
        .copied()
        .filter(|k| k.is_enumerable())
        .collect();
    let mut prog = resume.unwrap_or_default();
    let batch = config.partitions_per_checkpoint.max(1);

    let at = prog.next;
    for (ri, rec) in records.iter().enumerate().skip(at.record) {
        let kdf = Kdf::new(rec.params)?;
        let dims = rec.grid.dims;
        let first_word = if ri == at.record { at.word } else { 0 };
        for (wi, word) in words.iter().enumerate().skip(first_word) {
            let resuming_word = ri == at.record && wi == at.word;
            let mid_word = resuming_word && (at.strategy > 0 || at.start_cell > 0);
            if !mid_word && !placeable(word, &config.alphabet, dims.cells()) {
                prog.pairs_skipped += 1;
                prog.next = next_word(ri, wi, words.len());
                continue;
            }
            let first_strategy = if resuming_word { at.strategy } else { 0 };
            for (si, &kind) in strategies.iter().enumerate().skip(first_strategy) {
                let first_cell = if resuming_word && si == at.strategy {
                    at.start_cell
                } else {
                    0
                };
                let strategy = AttackStrategy::new(kind, dims).with_budget(config.snake_budget);
                let set = generate_candidates(&strategy, word)?;
                if first_cell == 0 {
                    prog.candidates_generated += set.len() as u64;
                    prog.raw_candidates += set.raw_count();
                }
                let remaining: Vec<&[Candidate]> = set
                    .partitions()
                    .into_iter()
                    .filter(|p| dims.index(p[0].start) >= first_cell)
                    .collect();
                for chunk in remaining.chunks(batch) {
                    let tally = hash_partitions(&exec, &kdf, rec, chunk)?;
                    prog.hashes_computed += tally.hashes;
                    let already = prog.recovered.iter().any(|r| r.username == rec.username);
                    if let (false, Some(p)) = (already, tally.first_hit()) {
                        prog.recovered.push(Recovery {
                            username: rec.username.clone(),
                            word: word.clone(),
                            strategy: kind.to_string(),
                            tagged: p.to_tagged().into_string(),
                        });
                    }
                    let last = chunk.last().expect("chunks are non-empty");
                    prog.next = Checkpoint {
                        record: ri,
                        word: wi,
                        strategy: si,
                        start_cell: dims.index(last[0].start) + 1,
                    };
                    on_checkpoint(&prog);
                }
                prog.next = if si + 1 < strategies.len() {
                    Checkpoint {
                        record: ri,
                        word: wi,
                        strategy: si + 1,
                        start_cell: 0,
                    }
                } else {
                    next_word(ri, wi, words.len())
                };
            }
        }
        prog.next = Checkpoint {
            record: ri + 1,
            ..Checkpoint::default()
        };
    }
    prog.done = true;
    on_checkpoint(&prog);

    let recovered = prog.recovered.len();
    Ok(CrackReport {
        records: records.len(),
        words: words.len(),
        strategies: config.strategies.iter().map(ToString::to_string).collect(),
        candidates_generated: prog.candidates_generated,
        raw_candidates: prog.raw_candidates,
        hashes_computed: prog.hashes_computed,
        pairs_skipped: prog.pairs_skipped,
        recovered: prog.recovered,
        recovery_fraction: if records.is_empty() {
            0.0
        } else {
            recovered as f64 / records.len() as f64
        },
        elapsed_secs: Some(started.elapsed().as_secs_f64()),
    })
}

fn next_word(ri: usize, wi: usize, words: usize) -> Checkpoint {
    if wi + 1 < words {
        Checkpoint {
            record: ri,
            word: wi + 1,
            strategy: 0,
            start_cell: 0,
        }
    } else {
        Checkpoint {
            record: ri + 1,
            ..Checkpoint::default()
        }
    }
}

fn placeable(word: &str, alphabet: &Alphabet, cells: usize) -> bool {
    let n = word.chars().count();
    n > 0 && n <= cells && word.chars().all(|c| alphabet.contains(c))
}

struct Tally<'k> {
    worker: Option<KdfWorker<'k>>,
    hashes: u64,
    /// (start index, position in partition, placement)
    hits: Vec<(usize, usize, Placement)>,
    error: Option<KdfError>,
}

impl Tally<'_> {
    fn first_hit(&self) -> Option<&Placement> {
        self.hits.iter().min_by_key(|h| (h.0, h.1)).map(|h| &h.2)
    }
}

fn hash_partitions<'k>(
    exec: &Executor,
    kdf: &'k Kdf,
    rec: &CredentialRecord,
    parts: &[&[Candidate]],
) -> Result<Tally<'k>, CrackError> {
    let dims = rec.grid.dims;
    let tally = exec.fold_reduce(
        parts,
        || Tally {
            worker: None,
            hashes: 0,
            hits: Vec::new(),
            error: None,
        },
        |mut t, part| {
            if t.error.is_some() {
                return t;
            }
            let worker = t.worker.get_or_insert_with(|| kdf.worker());
            for (k, cand) in part.iter().enumerate() {
                match worker.hash(cand.placement.to_canonical().as_bytes(), &rec.salt) {
                    Ok(d) => {
                        t.hashes += 1;
                        if d.ct_eq(&rec.hash) {
                            t.hits
                                .push((dims.index(cand.start), k, cand.placement.clone()));
                        }
                    }
                    Err(e) => {
                        t.error = Some(e);
                        break;
                    }
                }
            }
            t
        },
        |mut a, b| {
            a.hashes += b.hashes;
            a.hits.extend(b.hits);
            a.error = a.error.or(b.error);
            if a.worker.is_none() {
                a.worker = b.worker;
            }
            a
        },
    );
    match tally.error {
        Some(e) => Err(e.into()),
        None => Ok(tally),
    }
}
