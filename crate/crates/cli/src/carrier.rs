//! Textual carrier specifications.
//!
//! A carrier is `poisson_schur:N` (Schur multipliers with rates `|i − j|` on
//! `M_N`), any builtin group (`cyclic_planar:12`, `word_length_cyclic:8`,
//! `symmetric_permutation:4`, `symmetric_permutation:3:1,2,4`), or a tensor
//! product `A*B` of two carriers of the same species.

use ncharm::groups::{builtin_cocycles, BuiltinGroup, GroupModel};
use ncharm::semigroup::MarkovSemigroup;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug)]
pub struct Carrier {
    pub name: String,
    pub semigroup: MarkovSemigroup,
    /// The group model, for a single builtin group.
    pub model: Option<GroupModel>,
}

pub fn parse_carrier(spec: &str) -> CliResult<Carrier> {
    let spec = spec.trim();
    if let Some((a, b)) = spec.split_once('*') {
        let left = parse_carrier(a)?;
        let right = parse_carrier(b)?;
        return Ok(Carrier {
            name: spec.to_string(),
            semigroup: left.semigroup.tensor_product(&right.semigroup)?,
            model: None,
        });
    }
    if let Some(n) = spec.strip_prefix("poisson_schur:") {
        let n: usize = n
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| CliError::Config(format!("bad Schur size in {spec:?}")))?;
        return Ok(Carrier {
            name: spec.to_string(),
            semigroup: MarkovSemigroup::poisson_schur(n),
            model: None,
        });
    }
    let model = builtin_cocycles(&BuiltinGroup::parse(spec)?)?;
    Ok(Carrier {
        name: spec.to_string(),
        semigroup: MarkovSemigroup::group(model.length.clone()),
        model: Some(model),
    })
}

/// `;`-separated carrier list.
pub fn parse_carriers(list: &str) -> CliResult<Vec<Carrier>> {
    list.split(';').filter(|s| !s.trim().is_empty()).map(parse_carrier).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs() {
        assert_eq!(parse_carrier("poisson_schur:3").unwrap().semigroup.dim(), 3);
        let c = parse_carrier("cyclic_planar:5").unwrap();
        assert!(c.model.unwrap().cocycle.is_some());
        assert_eq!(parse_carrier("cyclic_planar:3*cyclic_planar:4").unwrap().semigroup.dim(), 12);
        assert_eq!(parse_carrier("symmetric_permutation:3:1,2,4").unwrap().semigroup.dim(), 6);
        assert_eq!(parse_carriers("poisson_schur:2; cyclic_planar:3").unwrap().len(), 2);
        assert!(parse_carrier("poisson_schur:2*cyclic_planar:3").is_err());
        assert!(parse_carrier("poisson_schur:x").is_err());
        assert!(parse_carrier("torus:3").is_err());
    }
}
