use std::path::Path;

use crate::error::{Error, Result};
use crate::sim::{PauliSum, PauliWord};

/// Parses Hamiltonian blocks. Each non-blank line is `WORD COEFF`; blocks are
/// separated by `---`; `#` starts a comment.
///
/// ```text
/// # H at R = 0.7
/// ZZ 1.0
/// XI 0.5
/// ---
/// ZZ 0.8
/// ```
pub fn parse_pauli_hamiltonians(text: &str) -> Result<Vec<PauliSum>> {
    let mut blocks: Vec<Vec<(f64, PauliWord)>> = vec![Vec::new()];
    let mut width: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if body == "---" {
            if blocks.last().is_some_and(|b| b.is_empty()) {
                return Err(Error::Parse { line, msg: "empty Hamiltonian block".into() });
            }
            blocks.push(Vec::new());
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let [word, coeff] = fields[..] else {
            return Err(Error::Parse { line, msg: format!("expected `WORD COEFF`, got `{body}`") });
        };
        let word: PauliWord = word.parse().map_err(|e: Error| Error::Parse { line, msg: e.to_string() })?;
        if coeff.contains(['i', 'j']) && coeff.parse::<f64>().is_err() {
            return Err(Error::Parse { line, msg: format!("coefficient `{coeff}` is not real") });
        }
        let c: f64 = coeff.parse().map_err(|_| Error::Parse { line, msg: format!("invalid coefficient `{coeff}`") })?;
        if !c.is_finite() {
            return Err(Error::Parse { line, msg: format!("coefficient `{coeff}` is not finite") });
        }
        match width {
            None => width = Some(word.num_qubits()),
            Some(w) if w != word.num_qubits() => {
                return Err(Error::Parse {
                    line,
                    msg: format!("word acts on {} qubits, earlier words on {w}", word.num_qubits()),
                })
            }
            _ => {}
        }
        blocks.last_mut().expect("at least one block").push((c, word));
    }
    let Some(n) = width else {
        return Err(Error::Parse { line: 0, msg: "no Hamiltonian terms found".into() });
    };
    if blocks.last().is_some_and(|b| b.is_empty()) {
        blocks.pop();
    }
    blocks.into_iter().map(|terms| PauliSum::new(n, terms)).collect()
}

pub fn load_pauli_hamiltonians(path: &Path) -> Result<Vec<PauliSum>> {
    parse_pauli_hamiltonians(&std::fs::read_to_string(path)?)
}
