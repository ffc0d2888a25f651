//! Human-readable channel summaries.

use dyncoh::io::load_channel;
use dyncoh::monotones::{coherence_power, OptimizerConfig};
use std::path::Path;

/// Loads a channel file and formats dimensions, CPTP residuals, free-set
/// membership, and the coherence power. Invalid files surface the violated
/// invariant through the error.
pub fn channel_info(path: &Path) -> anyhow::Result<String> {
    let channel =
        load_channel(path).map_err(|e| anyhow::anyhow!("rejected {}: {e}", path.display()))?;
    let (herm, min_eig, tp) = channel.cptp_residuals();
    let coherence = coherence_power(&channel, &OptimizerConfig::default());
    let mut out = String::new();
    out.push_str(&format!(
        "channel: {} → {}\n",
        channel.dim_in(),
        channel.dim_out()
    ));
    out.push_str(&format!(
        "CPTP residuals: hermiticity {herm:.3e}, min eigenvalue {min_eig:.3e}, trace \
         preservation {tp:.3e}\n"
    ));
    out.push_str(&format!(
        "MIO: {}, DIO: {}\n",
        if channel.is_mio() { "yes" } else { "no" },
        if channel.is_dio() { "yes" } else { "no" }
    ));
    out.push_str(&format!("C = {:.6}\n", coherence.value));
    Ok(out)
}
