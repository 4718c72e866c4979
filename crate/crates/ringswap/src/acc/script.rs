//! Line-oriented accumulator operation scripts.
//!
//! One operation per line; `#` starts a comment and blank lines are skipped.
//! Elements are whitespace-free tokens taken as raw bytes (hex-encode
//! anything unprintable before scripting it).
//!
//! ```text
//! insert apple
//! insert pear
//! batch-insert plum fig date
//! remove pear
//! batch-remove plum fig
//! multiswap apple date -> kiwi
//! ```
//!
//! `multiswap` removes everything left of `->` and inserts everything right
//! of it; either side may be empty.

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

/// A parsed accumulator operation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AccOp {
    Insert(Vec<u8>),
    Remove(Vec<u8>),
    BatchInsert(Vec<Vec<u8>>),
    BatchRemove(Vec<Vec<u8>>),
    MultiSwap {
        removals: Vec<Vec<u8>>,
        insertions: Vec<Vec<u8>>,
    },
}

fn err(line: usize, message: impl Into<String>) -> ScriptError {
    ScriptError { line, message: message.into() }
}

pub fn parse_script(text: &str) -> Result<Vec<AccOp>, ScriptError> {
    let mut ops = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let verb = tokens.next().expect("nonempty line");
        let rest: Vec<&str> = tokens.collect();
        let op = match verb {
            "insert" | "remove" => {
                if rest.len() != 1 {
                    return Err(err(lineno, format!("{verb} takes exactly one element")));
                }
                let elem = rest[0].as_bytes().to_vec();
                if verb == "insert" {
                    AccOp::Insert(elem)
                } else {
                    AccOp::Remove(elem)
                }
            }
            "batch-insert" | "batch-remove" => {
                if rest.is_empty() {
                    return Err(err(lineno, format!("{verb} needs at least one element")));
                }
                let batch: Vec<Vec<u8>> = rest.iter().map(|t| t.as_bytes().to_vec()).collect();
                if verb == "batch-insert" {
                    AccOp::BatchInsert(batch)
                } else {
                    AccOp::BatchRemove(batch)
                }
            }
            "multiswap" => {
                let Some(sep) = rest.iter().position(|t| *t == "->") else {
                    return Err(err(lineno, "multiswap requires a '->' separator"));
                };
                let removals = rest[..sep].iter().map(|t| t.as_bytes().to_vec()).collect();
                let insertions = rest[sep + 1..].iter().map(|t| t.as_bytes().to_vec()).collect();
                AccOp::MultiSwap { removals, insertions }
            }
            other => return Err(err(lineno, format!("unknown operation '{other}'"))),
        };
        ops.push(op);
    }
    Ok(ops)
}

/// Render an operation back to its script line.
pub fn format_op(op: &AccOp) -> String {
    fn join(elems: &[Vec<u8>]) -> String {
        elems
            .iter()
            .map(|e| String::from_utf8_lossy(e).into_owned())
            .collect::<Vec<_>>()
            .join(" ")
    }
    match op {
        AccOp::Insert(e) => format!("insert {}", String::from_utf8_lossy(e)),
        AccOp::Remove(e) => format!("remove {}", String::from_utf8_lossy(e)),
        AccOp::BatchInsert(b) => format!("batch-insert {}", join(b)),
        AccOp::BatchRemove(b) => format!("batch-remove {}", join(b)),
        AccOp::MultiSwap { removals, insertions } => {
            format!("multiswap {} -> {}", join(removals), join(insertions))
        }
    }
}
