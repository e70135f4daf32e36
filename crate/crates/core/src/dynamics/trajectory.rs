use std::io::Write;

use super::state::QuantumState;
use crate::error::{Error, Result};

/// CSV with columns `time`, `p<i>` for each watched basis index (all of them
/// when `watch` is `None`), and `norm`.
pub fn write_trajectory_csv<W: Write>(out: W, samples: &[QuantumState], watch: Option<&[usize]>) -> Result<()> {
    let dim = samples.first().map_or(0, QuantumState::dim);
    let indices: Vec<usize> = match watch {
        Some(w) => w.to_vec(),
        None => (0..dim).collect(),
    };
    if let Some(&bad) = indices.iter().find(|&&i| i >= dim && !samples.is_empty()) {
        return Err(Error::invalid("watch", format!("basis index {bad} out of range for dimension {dim}")));
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["time".to_string()];
    header.extend(indices.iter().map(|i| format!("p{i}")));
    header.push("norm".into());
    w.write_record(&header)?;
    for s in samples {
        let mut row = vec![format!("{}", s.time)];
        row.extend(indices.iter().map(|&i| format!("{}", s.amplitudes[i].norm_sqr())));
        row.push(format!("{}", s.norm()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
