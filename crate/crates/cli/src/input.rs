use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use voter_blotto::blotto::Allocation;
use voter_blotto::graph::{load_edge_list, SocialGraph};
use voter_blotto::valuation::{values_for, Horizon, ValuationProfile};
use voter_blotto::Error;

use crate::ProfileArgs;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn load_graph(path: &Path, no_auto_loops: bool) -> Result<SocialGraph> {
    let text = read(path)?;
    load_edge_list(&text, !no_auto_loops).map_err(|e| match e {
        Error::Parse { line, message } => anyhow!("{}:{line}: {message}", path.display()),
        other => anyhow!("{}: {other}", path.display()),
    })
}

pub struct ResolvedProfile {
    pub profile: ValuationProfile,
    pub labels: Vec<String>,
}

pub fn resolve_profile(args: &ProfileArgs) -> Result<ResolvedProfile> {
    if !(args.budget > 0.0 && args.budget.is_finite()) {
        bail!("budget must be positive, got {}", args.budget);
    }
    if let Some(values) = &args.values {
        let profile = ValuationProfile::from_values(values)?;
        let labels = (0..values.len()).map(|i| i.to_string()).collect();
        return Ok(ResolvedProfile { profile, labels });
    }
    let path = args.graph.as_ref().expect("clap requires --graph or --values");
    let g = load_graph(path, args.no_auto_loops)?;
    let horizon: Horizon = args.horizon.parse()?;
    let profile = values_for(&g, horizon)?;
    Ok(ResolvedProfile {
        profile,
        labels: g.labels().to_vec(),
    })
}

/// One allocation per line; amounts separated by commas or whitespace.
/// Blank lines and `#` comments are skipped.
pub fn parse_allocations(text: &str) -> std::result::Result<Vec<Allocation>, (usize, String)> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let amounts = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|_| (k + 1, format!("'{t}' is not a number"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let alloc = Allocation::from_amounts(amounts).map_err(|e| (k + 1, e.to_string()))?;
        out.push(alloc);
    }
    Ok(out)
}

pub fn load_allocations(path: &Path) -> Result<Vec<Allocation>> {
    let text = read(path)?;
    let allocs = parse_allocations(&text).map_err(|(line, msg)| anyhow!("{}:{line}: {msg}", path.display()))?;
    if allocs.is_empty() {
        bail!("{}: no allocations found", path.display());
    }
    Ok(allocs)
}

pub fn load_single_allocation(path: &Path) -> Result<Allocation> {
    let mut allocs = load_allocations(path)?;
    if allocs.len() > 1 {
        bail!("{}: expected one allocation, found {}", path.display(), allocs.len());
    }
    Ok(allocs.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_allocation_lines() {
        let a = parse_allocations("# header\n0.5, 0.5\n\n1 0 # trailing\n").unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a[1].amounts(), [1.0, 0.0]);
        assert_eq!(parse_allocations("0.5,x\n").unwrap_err().0, 1);
        assert_eq!(parse_allocations("1,0\n-1,2\n").unwrap_err().0, 2);
    }
}
